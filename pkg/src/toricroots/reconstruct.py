"""Rebuilding a toric isomorphism from a root bijection.

Pipeline for an oracle ``U: D(X) -> D(X')``:

1. split off torus factors on both sides and induce ``U0`` on the cores;
2. per ray, build an admissible system, calibrate a threshold D and sign,
   and read off the facet map psi_rho from images of e0 and e0 + m;
3. check that facet maps agree on shared faces and have one global sign;
4. solve for Psi_0 from independent boundary points and verify it everywhere;
5. extend by the identity on Hermite-matched torus-factor bases.

Every failure raises :class:`InvalidUpsilonError` with a stage tag and
integer witnesses; successful checks are appended to a :class:`Report`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import comb
from typing import Sequence

from .cones import RationalCone, facet_group_generators, orthogonal_sublattice
from .degeneration import compute_m_x, induce_reduced_bijection, reduce_datum
from .linalg import (
    Matrix,
    add,
    as_integer_matrix,
    as_matrix,
    determinant,
    dot,
    identity,
    is_unimodular,
    mat_vec,
    rank,
    solve_linear_map,
    sub,
)
from .oracles import InvalidUpsilonError, UpsilonOracle
from .roots import (
    AdmissibleSystem,
    DemazureRoot,
    Side,
    ToricDatum,
    base_root,
    build_admissible_system,
    classify_slices,
    enumerate_roots,
    facet_interior_point,
    find_point_in_B,
    h_set,
)


@dataclass
class Check:
    stage: str
    passed: bool
    detail: str = ""
    witness: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"stage": self.stage, "passed": self.passed, "detail": self.detail,
                "witness": [list(w) for w in self.witness]}


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def add(self, stage, passed=True, detail="", witness=()):
        self.checks.append(Check(stage, passed, detail, [list(w) for w in witness]))

    def record(self, error: InvalidUpsilonError):
        self.add(error.stage, False, error.message, error.witness)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def stages(self, name: str) -> list[Check]:
        return [c for c in self.checks if c.stage == name]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.as_dict() for c in self.checks],
                "notes": list(self.notes)}


@dataclass(frozen=True)
class LinearLatticeMap:
    """An integer matrix acting on column vectors of M."""

    matrix: Matrix

    def __post_init__(self):
        object.__setattr__(self, "matrix", as_matrix(self.matrix))

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return mat_vec(self.matrix, v)

    @property
    def det(self) -> int:
        return determinant(self.matrix)

    @property
    def is_unimodular(self) -> bool:
        return is_unimodular(self.matrix)


# --- validation -----------------------------------------------------------------


def _sample_tuples(count: int, n: int, budget: int, rng: random.Random):
    if comb(count, n) <= budget:
        yield from combinations(range(count), n)
        return
    for _ in range(budget):
        yield tuple(sorted(rng.sample(range(count), n)))


def validate_upsilon(U: UpsilonOracle, bound: int, sample_size: int = 500, seed: int = 0) -> Report:
    """Check properties I-III of U on the roots of X in the box.

    Property I is checked for every box root.  Property II is checked on up
    to ``sample_size`` n-tuples (all of them when there are few) drawn from the
    box roots and their translates by the M_X basis, and property III on those
    translates.  Images leaving the box of X' are reported as notes, not
    failures.
    """
    X, Y = U.source, U.target
    report = Report()
    rng = random.Random(seed)
    if X.rank != Y.rank:
        report.add("property I", False, "lattice ranks differ", [[X.rank, Y.rank]])
        return report
    images: dict[DemazureRoot, DemazureRoot] = {}
    for r in enumerate_roots(X, bound):
        try:
            images[r] = U.query(r)
        except InvalidUpsilonError as exc:
            report.record(exc)
            return report
    report.add("property I", True, f"{len(images)} roots")

    owners: dict[DemazureRoot, DemazureRoot] = {}
    for r, f in images.items():
        if f in owners:
            report.add("bijectivity", False, "two roots share an image",
                       [owners[f].weight, r.weight, f.weight])
            return report
        owners[f] = r
        back = U.inverse_query(f)
        if back != r:
            report.add("bijectivity", False, "inverse query does not return the root",
                       [r.weight, f.weight, back.weight])
            return report
    outside = sum(1 for f in images.values() if max(map(abs, f.weight), default=0) > bound)
    if outside:
        report.notes.append(f"{outside} images leave the target box (box asymmetry)")
    report.add("bijectivity", True)

    m_x, m_x_target = compute_m_x(X), compute_m_x(Y)
    if len(m_x) != len(m_x_target):
        report.add("property III", False, "torus factors have different ranks",
                   [[len(m_x), len(m_x_target)]])
        return report
    # translates by +-M_X basis vectors; they also join the property II pool
    pool = sorted(images)
    shifts = list(m_x) + [tuple(-a for a in x) for x in m_x]
    probes = pool if len(pool) <= sample_size else rng.sample(pool, sample_size)
    translates: list[tuple[DemazureRoot, DemazureRoot]] = []
    for r in probes if shifts else ():
        for x in shifts:
            moved = DemazureRoot(r.ray, add(r.weight, x))
            try:
                f = images[moved] if moved in images else U.query(moved)
            except InvalidUpsilonError as exc:
                if exc.stage == "table":
                    continue
                report.record(exc)
                return report
            translates.append((r, moved))
            images.setdefault(moved, f)

    extended = sorted(images)
    n = X.rank
    tested = 0
    for idx in _sample_tuples(len(extended), n, sample_size, rng):
        src = [extended[i].weight for i in idx]
        img = [images[extended[i]].weight for i in idx]
        tested += 1
        if abs(determinant(src)) != abs(determinant(img)):
            report.add("property II", False, "|det| not preserved", src + img)
            return report
    report.add("property II", True, f"{tested} tuples")

    for r, moved in translates:
        diff = sub(images[moved].weight, images[r].weight)
        if any(dot(diff, v) for v in Y.rays):
            report.add("property III", False, "coset translate leaves the image coset",
                       [r.weight, moved.weight, images[r].weight, images[moved].weight])
            return report
    report.add("property III", True)
    return report


# --- calibration and facet maps ----------------------------------------------------


@dataclass(frozen=True)
class Calibration:
    ray: int
    thresholds: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def D(self) -> int:
        return max(self.thresholds, default=0)


def calibrate(U: UpsilonOracle, rho: int, system: AdmissibleSystem) -> Calibration:
    """Thresholds and signs matching slices of X with slices of X' through U."""
    X, Y = U.source, U.target
    target_ray = U.ray_map[rho]
    thresholds, signs = [], []
    for E in system.tuples:
        images = [U.query(DemazureRoot(rho, e)).weight for e in E]
        mine = classify_slices(X, rho, E)
        if rank(images) != len(images):
            raise InvalidUpsilonError("calibration", "image tuple does not span a hyperplane",
                                      list(E) + images)
        theirs = classify_slices(Y, target_ray, images)
        if not theirs.all_finite:
            raise InvalidUpsilonError("calibration", "image slices are infinite",
                                      images + [theirs.certificate.direction])
        if mine.finite_side not in (Side.PLUS, Side.MINUS) or theirs.finite_side not in (Side.PLUS, Side.MINUS):
            raise InvalidUpsilonError("calibration", "no unique finite side", images)
        threshold = 1 + max(mine.max_abs_d, theirs.max_abs_d)
        sign = mine.finite_side.sign * theirs.finite_side.sign
        probe = find_point_in_B(X, rho, AdmissibleSystem(rho, (E,)), threshold)
        d = determinant(list(E) + [probe.weight])
        d_image = determinant(images + [U.query(probe).weight])
        if d_image != sign * d:
            raise InvalidUpsilonError("calibration", "probe slice has the wrong level",
                                      list(E) + [probe.weight] + images + [U.query(probe).weight])
        thresholds.append(threshold)
        signs.append(sign)
    return Calibration(rho, tuple(thresholds), tuple(signs))


def check_calibration(U: UpsilonOracle, rho: int, system: AdmissibleSystem, cal: Calibration,
                      levels: int = 2) -> list:
    """Compare U(H_{E,rho,d}) with H_{U(E),rho',eps d} for D <= |d| < D + levels.

    Returns a list of mismatching levels (empty on success).
    """
    X, Y = U.source, U.target
    target_ray = U.ray_map[rho]
    bad = []
    for E, D, eps in zip(system.tuples, cal.thresholds, cal.signs):
        images = [U.query(DemazureRoot(rho, e)).weight for e in E]
        for d in [s * k for k in range(D, D + levels) for s in (1, -1)]:
            mine = h_set(X, rho, E, d)
            theirs = h_set(Y, target_ray, images, eps * d)
            if sorted(U.query(r) for r in mine) != sorted(theirs):
                bad.append((E, d))
    return bad


def psi_rho(U: UpsilonOracle, rho: int, system: AdmissibleSystem, cal: Calibration,
            start: Sequence[int] | None = None) -> Matrix:
    """The linear map agreeing with U on all roots of S_rho far enough out.

    With e0 in B_{E,rho,D} the differences U(e0 + m) - U(e0) are additive in m
    on the facet, so images of e0 and of facet group generators determine it.
    """
    X, Y = U.source, U.target
    n = X.rank
    target_ray = U.ray_map[rho]
    if n == 1:
        e = base_root(X, rho)
        f = U.query(e)
        return ((f.weight[0] * e.weight[0],),)
    e0 = find_point_in_B(X, rho, system, cal.D, start)
    f0 = U.query(e0)
    gens = facet_group_generators(X.sigma_dual, X.rays[rho])
    alpha = {m: sub(U.query(DemazureRoot(rho, add(e0.weight, m))).weight, f0.weight) for m in gens}
    chosen = []
    for m in gens:
        if rank(chosen + [m]) > len(chosen):
            chosen.append(m)
    rational = solve_linear_map([e0.weight] + chosen, [f0.weight] + [alpha[m] for m in chosen])
    psi = as_integer_matrix(rational)
    if psi is None:
        raise InvalidUpsilonError("facet map", f"map for ray {rho} is not integral",
                                  [e0.weight, f0.weight] + chosen + [alpha[m] for m in chosen])
    for m in gens:
        if mat_vec(psi, m) != alpha[m]:
            raise InvalidUpsilonError("facet map", "differences are not additive",
                                      [e0.weight, m, alpha[m], mat_vec(psi, m)])
    if not is_unimodular(psi):
        raise InvalidUpsilonError("facet map", "map is not unimodular", psi)
    target_normal = Y.rays[target_ray]
    for a in orthogonal_sublattice([X.rays[rho]]):
        if dot(mat_vec(psi, a), target_normal):
            raise InvalidUpsilonError("facet map", "rho-perp is not mapped to rho'-perp",
                                      [a, mat_vec(psi, a)])
    image = RationalCone.from_generators([mat_vec(psi, r) for r in X.facets[rho].rays], n)
    if image != Y.facets[target_ray]:
        raise InvalidUpsilonError("facet map", "facet cone is not mapped onto the target facet",
                                  list(image.rays) + list(Y.facets[target_ray].rays))
    return psi


# --- gluing ------------------------------------------------------------------------


def _boundary_points(X: ToricDatum):
    points = []
    for rho, facet in enumerate(X.facets):
        for u in list(facet.rays) + facet_group_generators(X.sigma_dual, X.rays[rho]):
            points.append((u, rho))
    return points


def _glue_core(U0: UpsilonOracle, report: Report, check_uniqueness: bool,
               sign_samples: int, rng: random.Random) -> Matrix:
    X0, Y0 = U0.source, U0.target
    n0 = X0.rank
    if n0 == 0:
        return ()
    psis = {}
    for rho in range(len(X0.rays)):
        system = build_admissible_system(X0, rho)
        cal = calibrate(U0, rho, system)
        psi = psi_rho(U0, rho, system, cal)
        report.add("facet map", True, f"ray {rho}, D = {cal.D}, signs {list(cal.signs)}", psi)
        if check_uniqueness and n0 >= 2:
            other = build_admissible_system(X0, rho, variant=1)
            other_cal = calibrate(U0, rho, other)
            shifted = add(base_root(X0, rho).weight, facet_interior_point(X0, rho))
            again = psi_rho(U0, rho, other, other_cal, start=shifted)
            if again != psi:
                raise InvalidUpsilonError("uniqueness", f"ray {rho} gives two different maps",
                                          list(psi) + list(again))
            report.add("uniqueness", True, f"ray {rho}")
        psis[rho] = psi
    if n0 == 1:
        return psis[0]

    for a, b in combinations(range(len(X0.rays)), 2):
        face = X0.sigma_dual.restrict(equalities=[X0.rays[a], X0.rays[b]])
        for u in face.rays:
            if mat_vec(psis[a], u) != mat_vec(psis[b], u):
                raise InvalidUpsilonError("facet agreement", f"rays {a} and {b} disagree",
                                          [u, mat_vec(psis[a], u), mat_vec(psis[b], u)])
        report.add("facet agreement", True, f"rays {a}, {b}: {len(face.rays)} generators")

    points = _boundary_points(X0)
    epsilons = set()
    for idx in _sample_tuples(len(points), n0, sign_samples, rng):
        us = [points[i][0] for i in idx]
        d = determinant(us)
        if not d:
            continue
        images = [mat_vec(psis[points[i][1]], points[i][0]) for i in idx]
        ratio, rem = divmod(determinant(images), d)
        if rem or abs(ratio) != 1:
            raise InvalidUpsilonError("sign coherence", "determinant ratio is not a unit", us + images)
        epsilons.add(ratio)
        if len(epsilons) > 1:
            raise InvalidUpsilonError("sign coherence", "two different global signs", us + images)
    report.add("sign coherence", True, f"epsilon = {epsilons.pop() if epsilons else 'n/a'}")

    chosen = []
    for u, rho in points:
        if rank([c for c, _ in chosen] + [u]) > len(chosen):
            chosen.append((u, rho))
    rational = solve_linear_map([u for u, _ in chosen], [mat_vec(psis[r], u) for u, r in chosen])
    core = as_integer_matrix(rational)
    if core is None:
        raise InvalidUpsilonError("gluing", "boundary values do not give an integral map",
                                  [u for u, _ in chosen])
    for u, rho in points:
        if mat_vec(core, u) != mat_vec(psis[rho], u):
            raise InvalidUpsilonError("well-definedness", "glued map disagrees on the boundary",
                                      [u, mat_vec(core, u), mat_vec(psis[rho], u)])
    report.add("well-definedness", True, f"{len(points)} boundary points")
    return core


def _assemble(rd, rd_target, core: Matrix) -> Matrix:
    """Psi on M = section(M0) ⊕ M_X from Psi_0 and the identity on torus-factor bases."""
    split, split_target = rd.split, rd_target.split
    k = len(split.complement_basis)
    sources = list(split.complement_basis) + list(split.m_x_basis)
    images = [split_target.section([core[i][j] for i in range(k)]) for j in range(k)]
    images += list(split_target.m_x_basis)
    psi = as_integer_matrix(solve_linear_map(sources, images))
    if psi is None:
        raise AssertionError("assembled map is not integral")
    return psi


def glue_and_extend(U: UpsilonOracle, report: Report | None = None, check_uniqueness: bool = True,
                    sign_samples: int = 200, seed: int = 0) -> LinearLatticeMap:
    """Reconstruct a lattice isomorphism Psi with Psi(sigma_dual) = sigma'_dual."""
    report = report if report is not None else Report()
    X, Y = U.source, U.target
    if X.rank != Y.rank:
        raise InvalidUpsilonError("reduction", "lattice ranks differ", [[X.rank, Y.rank]])
    rd, rd_target = reduce_datum(X), reduce_datum(Y)
    U0 = induce_reduced_bijection(rd, rd_target, U)
    report.add("reduction", True, f"torus factor rank {rd.s}")
    core = _glue_core(U0, report, check_uniqueness, sign_samples, random.Random(seed))
    psi = LinearLatticeMap(_assemble(rd, rd_target, core))
    if not verify_toric_iso(psi, X, Y):
        raise InvalidUpsilonError("final", "Psi does not map sigma_dual onto sigma'_dual", psi.matrix)
    report.add("final", True, "Psi(M) = M' and Psi(sigma_dual) = sigma'_dual", psi.matrix)
    return psi


# --- independent oracle and verifier ------------------------------------------------


def verify_toric_iso(psi: LinearLatticeMap | Sequence[Sequence[int]], X: ToricDatum, Y: ToricDatum) -> bool:
    matrix = psi.matrix if isinstance(psi, LinearLatticeMap) else as_matrix(psi)
    if X.rank != Y.rank or len(matrix) != X.rank:
        raise ValueError("rank mismatch")
    if not is_unimodular(matrix):
        return False
    image = RationalCone.from_generators([mat_vec(matrix, r) for r in X.sigma_dual.rays], X.rank)
    return image == Y.sigma_dual


def brute_force_iso(X: ToricDatum, Y: ToricDatum, max_rays: int = 8) -> LinearLatticeMap | None:
    """First unimodular Psi with Psi(sigma_dual) = sigma'_dual, searching ray permutations."""
    if X.rank != Y.rank:
        raise ValueError("rank mismatch")
    if X.rank > 4:
        raise ValueError("brute force is limited to rank 4")
    rd, rd_target = reduce_datum(X), reduce_datum(Y)
    if rd.s != rd_target.s:
        return None
    src = rd.X0.sigma_dual.rays
    dst = rd_target.X0.sigma_dual.rays
    if len(src) != len(dst):
        return None
    if len(src) > max_rays:
        raise ValueError(f"brute force is limited to {max_rays} rays")
    n0 = rd.X0.rank
    if n0 == 0:
        return LinearLatticeMap(_assemble(rd, rd_target, ()))
    basis_idx = []
    for i, r in enumerate(src):
        if rank([src[j] for j in basis_idx] + [r]) > len(basis_idx):
            basis_idx.append(i)
    tried: dict[tuple[int, ...], bool] = {}
    target_set = set(dst)
    for perm in permutations(range(len(dst))):
        key = tuple(perm[i] for i in basis_idx)
        if key in tried:
            continue
        rational = solve_linear_map([src[i] for i in basis_idx], [dst[j] for j in key])
        core = as_integer_matrix(rational)
        ok = (core is not None and is_unimodular(core)
              and {mat_vec(core, r) for r in src} == target_set)
        tried[key] = ok
        if ok:
            psi = LinearLatticeMap(_assemble(rd, rd_target, core))
            if verify_toric_iso(psi, X, Y):
                return psi
    return None


def identity_map(n: int) -> LinearLatticeMap:
    return LinearLatticeMap(identity(n))
