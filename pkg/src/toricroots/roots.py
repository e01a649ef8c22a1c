"""Demazure roots of affine toric varieties.

A toric datum is a strongly convex cone sigma in N = Z^n.  For an extremal ray
rho with primitive generator v, the roots attached to rho are the weights

    S_rho = {e in M : <e, v> = -1 and <e, v_mu> >= 0 for the other rays mu}.

Ray indices are 0-based positions in the canonical (sorted) ray list of sigma.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .cones import (
    AffineSlab,
    NotStronglyConvexError,
    Polytope,
    RationalCone,
    UnboundedError,
    first_success,
    lattice_points,
    relative_interior_point,
)
from .linalg import (
    Vector,
    add,
    as_vector,
    determinant,
    dot,
    hyperplane_normal,
    integer_kernel,
    neg,
    rank,
    scale,
    unit,
    zero,
)


@dataclass(frozen=True)
class ToricDatum:
    """An affine toric variety given by a strongly convex cone sigma in N."""

    sigma: RationalCone

    def __post_init__(self):
        if not self.sigma.is_strongly_convex:
            raise NotStronglyConvexError("sigma is not strongly convex")

    @classmethod
    def from_rays(cls, rays: Iterable[Sequence[int]], rank: int | None = None) -> ToricDatum:
        return cls(RationalCone.from_generators(rays, rank))

    @property
    def rank(self) -> int:
        return self.sigma.rank

    @property
    def rays(self) -> tuple[Vector, ...]:
        return self.sigma.rays

    @cached_property
    def sigma_dual(self) -> RationalCone:
        return self.sigma.dual()

    @cached_property
    def facets(self) -> tuple[RationalCone, ...]:
        """sigma_dual ∩ rho⊥ for each ray."""
        return tuple(self.sigma_dual.restrict(equalities=[v]) for v in self.rays)

    @cached_property
    def slabs(self) -> tuple[AffineSlab, ...]:
        out = []
        for i, v in enumerate(self.rays):
            others = [w for j, w in enumerate(self.rays) if j != i]
            directions = RationalCone.from_generators(others, self.rank).dual()
            out.append(AffineSlab(zero(self.rank), directions, ((v, -1),)))
        return tuple(out)

    def ray_index(self, v: Sequence[int]) -> int:
        """Position of a ray generator in the canonical ray list."""
        return self.rays.index(as_vector(v))

    def is_root(self, ray: int, weight: Sequence[int]) -> bool:
        return self.root_ray(weight) == ray

    def root_ray(self, weight: Sequence[int]) -> int | None:
        """The ray whose family contains the weight, or None."""
        pairings = [dot(weight, v) for v in self.rays]
        negative = [j for j, p in enumerate(pairings) if p < 0]
        if len(negative) == 1 and pairings[negative[0]] == -1:
            return negative[0]
        return None


@dataclass(frozen=True, order=True)
class DemazureRoot:
    ray: int
    weight: Vector


def root(ray: int, weight: Sequence[int]) -> DemazureRoot:
    return DemazureRoot(ray, as_vector(weight))


def _s_rho_constraints(X: ToricDatum, rho: int):
    ineqs = [(v, 0) for j, v in enumerate(X.rays) if j != rho]
    eqs = [(X.rays[rho], -1)]
    return ineqs, eqs


def _box(n: int, bound: int):
    return ([(unit(n, i), -bound) for i in range(n)]
            + [(neg(unit(n, i)), -bound) for i in range(n)])


def enumerate_s_rho(X: ToricDatum, rho: int, bound: int) -> list[DemazureRoot]:
    """Roots of the family rho with all coordinates in [-bound, bound]."""
    ineqs, eqs = _s_rho_constraints(X, rho)
    poly = Polytope(X.rank, ineqs + _box(X.rank, bound), eqs)
    return [DemazureRoot(rho, w) for w in lattice_points(poly)]


def enumerate_roots(X: ToricDatum, bound: int) -> list[DemazureRoot]:
    return [r for rho in range(len(X.rays)) for r in enumerate_s_rho(X, rho, bound)]


@dataclass(frozen=True)
class RootFamily:
    ray: int
    slab: AffineSlab
    datum: ToricDatum

    def truncation(self, bound: int) -> list[DemazureRoot]:
        return enumerate_s_rho(self.datum, self.ray, bound)

    def __contains__(self, weight) -> bool:
        return self.slab.contains(weight)


def root_family(X: ToricDatum, rho: int) -> RootFamily:
    return RootFamily(rho, X.slabs[rho], X)


def base_root(X: ToricDatum, rho: int, limit: int = 1 << 12) -> DemazureRoot:
    """Deterministic representative of S_rho: lexicographically first root in the smallest box."""
    bound = 0
    while bound <= limit:
        found = enumerate_s_rho(X, rho, bound)
        if found:
            return found[0]
        bound = 2 * bound + 1
    raise RuntimeError("no root found; S_rho should be nonempty")


# --- monomials and derivations ---------------------------------------------


class MonomialPolynomial:
    """A finite linear combination of characters chi^m with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None,
                 datum: ToricDatum | None = None):
        clean = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[as_vector(m)] = clean.get(as_vector(m), 0) + c
        clean = {m: c for m, c in clean.items() if c}
        if datum is not None:
            bad = [m for m in clean if not datum.sigma_dual.contains(m)]
            if bad:
                raise ValueError(f"exponent {list(bad[0])} is not in the weight monoid")
        self._terms = clean

    @classmethod
    def monomial(cls, m: Sequence[int], coefficient=1, datum: ToricDatum | None = None):
        return cls({tuple(m): coefficient}, datum)

    @property
    def terms(self) -> dict[Vector, Fraction]:
        return dict(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        return isinstance(other, MonomialPolynomial) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return MonomialPolynomial(out)

    def __sub__(self, other):
        return self + MonomialPolynomial({m: -c for m, c in other._terms.items()})

    def __repr__(self):
        body = " + ".join(f"{c}*chi^{list(m)}" for m, c in sorted(self._terms.items()))
        return f"MonomialPolynomial({body or '0'})"


def derivation_apply(X: ToricDatum, r: DemazureRoot, p: MonomialPolynomial) -> MonomialPolynomial:
    """Apply the root derivation chi^m -> <m, v_rho> chi^(e+m)."""
    v = X.rays[r.ray]
    out: dict[Vector, Fraction] = {}
    for m, c in p._terms.items():
        k = dot(m, v)
        if k:
            target = add(m, r.weight)
            out[target] = out.get(target, 0) + c * k
    result = MonomialPolynomial(out)
    for m in result._terms:
        if not X.sigma_dual.contains(m):
            raise AssertionError(f"derivation left the weight monoid at {list(m)}")
    return result


def roots_commute(X: ToricDatum, r1: DemazureRoot, r2: DemazureRoot) -> bool:
    """Whether the two root derivations commute."""
    if r1.ray == r2.ray:
        return True
    return dot(r1.weight, X.rays[r2.ray]) == 0 and dot(r2.weight, X.rays[r1.ray]) == 0


def bracket(X: ToricDatum, r1: DemazureRoot, r2: DemazureRoot, p: MonomialPolynomial) -> MonomialPolynomial:
    """[d1, d2] p computed symbolically."""
    return (derivation_apply(X, r1, derivation_apply(X, r2, p))
            - derivation_apply(X, r2, derivation_apply(X, r1, p)))


# --- slices ----------------------------------------------------------------


@dataclass(frozen=True)
class Infinite:
    """Certificate that a slice is not a finite set.

    ``direction`` is a nonzero lattice vector of the common recession cone,
    or None when the reference tuple does not span a hyperplane.
    """

    reason: str
    direction: Vector | None = None


def slice_polytope(X: ToricDatum, rho: int, normal: Sequence[int], d: int | None = None,
                   side: int = 0) -> Polytope:
    """S_rho cut by det = d (or by sign(side) * det >= 0 when d is None)."""
    ineqs, eqs = _s_rho_constraints(X, rho)
    if d is not None:
        eqs = eqs + [(tuple(normal), d)]
    elif side:
        ineqs = ineqs + [(tuple(side * c for c in normal), 0)]
    return Polytope(X.rank, ineqs, eqs)


def _hyperplane_cone(X: ToricDatum, rho: int, normal: Sequence[int], side: int = 0) -> RationalCone:
    facet = X.facets[rho]
    if side:
        return facet.restrict(inequalities=[tuple(side * c for c in normal)])
    return facet.restrict(equalities=[normal])


def h_set(X: ToricDatum, rho: int, E: Sequence[Sequence[int]], d: int) -> list[DemazureRoot] | Infinite:
    """Roots e of S_rho with det(E, e) = d, or a certificate that the slices are infinite."""
    normal = hyperplane_normal(E, X.rank)
    if not any(normal):
        return Infinite("reference tuple does not span a hyperplane")
    cone = _hyperplane_cone(X, rho, normal)
    if not cone.is_zero:
        return Infinite("span meets the facet cone", cone.rays[0])
    return [DemazureRoot(rho, w) for w in lattice_points(slice_polytope(X, rho, normal, d))]


class Side(Enum):
    PLUS = "+1"
    MINUS = "-1"
    BOTH = "both"
    NEITHER = "neither"

    @property
    def sign(self) -> int:
        return {"+1": 1, "-1": -1}.get(self.value, 0)


@dataclass(frozen=True)
class SliceClassification:
    all_finite: bool
    finite_side: Side
    max_abs_d: int
    finite_set: tuple[DemazureRoot, ...]
    certificate: Infinite | None = None


def classify_slices(X: ToricDatum, rho: int, E: Sequence[Sequence[int]]) -> SliceClassification:
    normal = hyperplane_normal(E, X.rank)
    if not any(normal):
        raise ValueError("reference tuple does not span a hyperplane")
    cone = _hyperplane_cone(X, rho, normal)
    if not cone.is_zero:
        return SliceClassification(False, Side.NEITHER, 0, (),
                                   Infinite("span meets the facet cone", cone.rays[0]))
    plus = _hyperplane_cone(X, rho, normal, 1).is_zero
    minus = _hyperplane_cone(X, rho, normal, -1).is_zero
    if plus and minus:
        side = Side.BOTH
        poly = slice_polytope(X, rho, normal)
    elif plus or minus:
        side = Side.PLUS if plus else Side.MINUS
        poly = slice_polytope(X, rho, normal, side=side.sign)
    else:
        return SliceClassification(True, Side.NEITHER, 0, ())
    found = tuple(DemazureRoot(rho, w) for w in lattice_points(poly))
    top = max((abs(dot(normal, r.weight)) for r in found), default=0)
    return SliceClassification(True, side, top, found)


@dataclass(frozen=True)
class FinitenessReport:
    """Four equivalent finiteness conditions for the slices of one reference tuple."""

    symmetric_pairs_finite: bool
    all_slices_finite: bool
    some_slice_finite_nonempty: bool
    cone_condition: bool
    plus_finite: bool
    minus_finite: bool

    @property
    def consistent(self) -> bool:
        return len({self.symmetric_pairs_finite, self.all_slices_finite,
                    self.some_slice_finite_nonempty, self.cone_condition}) == 1


def _slice_is_finite(X, rho, normal, d=None, side=0):
    """Finite as a set of lattice points; empty counts as finite."""
    try:
        poly = slice_polytope(X, rho, normal, d, side)
    except UnboundedError:
        return False, True
    return True, bool(lattice_points(poly))


def finiteness_conditions(X: ToricDatum, rho: int, E: Sequence[Sequence[int]],
                          window: int = 10) -> FinitenessReport:
    """Evaluate the slice-finiteness conditions independently of one another.

    The per-slice conditions are decided on every d with |d| <= window plus
    the level of the base root (which is guaranteed nonempty).  A nonempty
    unbounded rational polyhedron always has infinitely many lattice points,
    so boundedness of each slice decides finiteness of its lattice points.
    """
    normal = hyperplane_normal(E, X.rank)
    levels = sorted(set(range(-window, window + 1)) | {dot(normal, base_root(X, rho).weight)})
    finite = {d: _slice_is_finite(X, rho, normal, d) for d in levels}
    pairs = all(finite[d][0] and finite.get(-d, (True,))[0] for d in levels)
    every = all(f for f, _ in finite.values())
    some = any(f and nonempty for f, nonempty in finite.values())
    cone = _hyperplane_cone(X, rho, normal).is_zero
    plus = _slice_is_finite(X, rho, normal, side=1)[0]
    minus = _slice_is_finite(X, rho, normal, side=-1)[0]
    return FinitenessReport(pairs, every, some, cone, plus, minus)


# --- admissible systems -------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleSystem:
    ray: int
    tuples: tuple[tuple[Vector, ...], ...]

    def normals(self, n: int) -> list[Vector]:
        return [hyperplane_normal(E, n) for E in self.tuples]

    def verify(self, X: ToricDatum) -> None:
        n = X.rank
        if len(self.tuples) != n - 1:
            raise AssertionError("an admissible system has n - 1 tuples")
        normals = self.normals(n)
        for E, c in zip(self.tuples, normals):
            if len(E) != n - 1 or not any(c):
                raise AssertionError(f"tuple {E} does not span a hyperplane")
            if not _hyperplane_cone(X, self.ray, c).is_zero:
                raise AssertionError(f"span of {E} meets the facet cone")
            for e in E:
                if X.root_ray(e) != self.ray:
                    raise AssertionError(f"{e} is not a root of ray {self.ray}")
        if rank(normals + [X.rays[self.ray]]) != n:
            raise AssertionError("hyperplanes meet rho-perp in a nonzero subspace")


def facet_interior_point(X: ToricDatum, rho: int) -> Vector:
    return relative_interior_point(X.facets[rho])


def build_admissible_system(X: ToricDatum, rho: int, variant: int = 0) -> AdmissibleSystem:
    """Construct an admissible system for rho (sigma_dual must be strongly convex).

    Positive functionals on the facet are built as w_i = w0 + K v_i, with w0
    the sum of the other ray generators and v_i other rays independent modulo
    v_rho.  Their kernels A_i in rho⊥ meet the facet only at 0.  With m0 an
    interior point of the facet and e0 a root, the tuples are
    (e0 + t m0, e0 + t m0 + a_i2, ...) for lattice bases a_ij of A_i.
    ``variant`` perturbs K, e0 and t to produce an independent system.
    """
    n = X.rank
    if not X.sigma_dual.is_strongly_convex:
        raise ValueError("admissible systems need a strongly convex dual cone")
    if n == 1:
        return AdmissibleSystem(rho, ())
    v = X.rays[rho]
    others = [w for j, w in enumerate(X.rays) if j != rho]
    w0 = zero(n)
    for w in others:
        w0 = add(w0, w)
    chosen: list[Vector] = []
    for w in others:
        if rank([v] + chosen + [w]) > len(chosen) + 1:
            chosen.append(w)
    k = 1 + variant
    while True:
        functionals = [add(w0, scale(k, w)) for w in chosen]
        if rank([v] + functionals) == n:
            break
        k += 1
    m0 = facet_interior_point(X, rho)
    facet = X.facets[rho]
    e0 = add(base_root(X, rho).weight, scale(variant, m0))
    kernels = [integer_kernel([v, w], n) for w in functionals]

    def inside(t):
        return all(facet.contains(add(scale(t, m0), a)) for basis in kernels for a in basis)

    t = first_success(inside, start=1) + variant
    start = add(e0, scale(t, m0))
    tuples = tuple((start,) + tuple(add(start, a) for a in basis) for basis in kernels)
    system = AdmissibleSystem(rho, tuples)
    system.verify(X)
    return system


def find_point_in_B(X: ToricDatum, rho: int, system: AdmissibleSystem, D: int,
                    start: Sequence[int] | None = None) -> DemazureRoot:
    """A root e of S_rho with |det(E_i, e)| >= D for every tuple of the system.

    Walks e + t m0 with m0 interior to the facet; along the walk each
    determinant is affine in t with nonzero slope.
    """
    e = as_vector(start) if start is not None else base_root(X, rho).weight
    normals = system.normals(X.rank)
    if all(abs(dot(c, e)) >= D for c in normals):
        return DemazureRoot(rho, e)
    m0 = facet_interior_point(X, rho)
    slopes = [dot(c, m0) for c in normals]
    if any(s == 0 for s in slopes):
        raise ValueError("system is not admissible: zero slope along the facet")

    def far_enough(t):
        return all((dot(c, e) + t * s) * (1 if s > 0 else -1) >= D
                   for c, s in zip(normals, slopes))

    t = first_success(far_enough, start=1)
    return DemazureRoot(rho, add(e, scale(t, m0)))


def in_B(system: AdmissibleSystem, n: int, e: Sequence[int], D: int) -> bool:
    return all(abs(dot(c, e)) >= D for c in system.normals(n))


# --- asymptotic cone and weight monoid ---------------------------------------


def asymptotic_root_cone(X: ToricDatum) -> RationalCone:
    """The cone generated by the union of the facets sigma_dual ∩ rho⊥."""
    gens = [r for facet in X.facets for r in facet.rays]
    return RationalCone.from_generators(gens, X.rank)


@dataclass(frozen=True)
class WeightMonoid:
    """Lattice points of ``cone``; ``case`` records how the cone was obtained."""

    cone: RationalCone
    case: str


def weight_monoid_from_roots(X: ToricDatum) -> WeightMonoid:
    """Recover sigma_dual ∩ M from the asymptotic shape of the roots."""
    n = X.rank
    if not X.rays:
        return WeightMonoid(RationalCone.whole_space(n), "no roots")
    hull = asymptotic_root_cone(X)
    if hull.dim == n:
        return WeightMonoid(hull, "full-dimensional hull")
    if hull.dim == n - 1 and len(hull.lineality_basis) == n - 1:
        normal = hull.inequalities[0]
        if dot(normal, base_root(X, 0).weight) > 0:
            normal = neg(normal)
        return WeightMonoid(RationalCone.from_inequalities([normal], n), "half-space")
    raise AssertionError("asymptotic hull is neither full-dimensional nor a hyperplane")


def determinant_of(vectors: Sequence[Sequence[int]]) -> int:
    return determinant([as_vector(v) for v in vectors])
