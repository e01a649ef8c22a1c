"""Splitting off the torus factor of a degenerate toric datum.

For sigma spanning a proper subspace, M_X = M ∩ sigma⊥ is nonzero.  Let N_0 be
the saturated lattice spanned by sigma, with Hermite basis b_1..b_k.  The
projection tau: M -> M_0 = Z^k is m -> (<m, b_1>, ..., <m, b_k>), whose kernel
is M_X.  A section is given by vectors c_j with <c_j, b_i> = delta_ij, so that
M = span(c) ⊕ M_X.  The reduced datum X_0 is sigma written in the basis b.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .cones import RationalCone, orthogonal_sublattice
from .linalg import (
    Matrix,
    Vector,
    add,
    as_vector,
    complete_to_basis,
    determinant,
    dot,
    from_columns,
    integer_inverse,
    integer_kernel,
    mat_vec,
    neg,
    rank,
    scale,
    zero,
)
from .oracles import InvalidUpsilonError, UpsilonOracle
from .roots import DemazureRoot, ToricDatum, enumerate_roots


@dataclass(frozen=True)
class SplitLattice:
    rank: int
    m_x_basis: tuple[Vector, ...]
    complement_basis: tuple[Vector, ...]
    tau_matrix: Matrix

    @property
    def s(self) -> int:
        return len(self.m_x_basis)

    def tau(self, m: Sequence[int]) -> Vector:
        return mat_vec(self.tau_matrix, m)

    def section(self, u: Sequence[int]) -> Vector:
        out = zero(self.rank)
        for coeff, c in zip(u, self.complement_basis):
            out = add(out, scale(coeff, c))
        return out

    def assembled(self) -> Matrix:
        """Columns: the complement basis followed by the M_X basis."""
        return from_columns(self.complement_basis + self.m_x_basis)

    def in_m_x(self, m: Sequence[int]) -> bool:
        return not any(self.tau(m))


def compute_m_x(X: ToricDatum) -> tuple[Vector, ...]:
    """Hermite basis of M ∩ sigma⊥."""
    return orthogonal_sublattice(X.rays, X.rank)


def split_lattice(X: ToricDatum) -> SplitLattice:
    n = X.rank
    m_x = compute_m_x(X)
    n0_basis = integer_kernel(m_x, n)
    extra = complete_to_basis(n0_basis, n)
    full = integer_inverse(from_columns(n0_basis + extra))
    k = len(n0_basis)
    complement = []
    for c in full[:k]:
        for x in m_x:
            pivot = next(i for i, a in enumerate(x) if a)
            q = c[pivot] // x[pivot]
            if q:
                c = tuple(a - q * b for a, b in zip(c, x))
        complement.append(tuple(c))
    return SplitLattice(n, m_x, tuple(complement), tuple(n0_basis))


@dataclass(frozen=True)
class ReducedDatum:
    X: ToricDatum
    X0: ToricDatum
    split: SplitLattice
    ray_map: tuple[int, ...]

    @property
    def s(self) -> int:
        return self.split.s

    def embedded_dual(self) -> RationalCone:
        """sigma_0 dual pushed back into M and summed with M_X ⊗ Q."""
        gens = [self.split.section(r) for r in self.X0.sigma_dual.rays]
        gens += list(self.split.m_x_basis) + [neg(x) for x in self.split.m_x_basis]
        return RationalCone.from_generators(gens, self.X.rank)

    def lift(self, r0: DemazureRoot) -> DemazureRoot:
        """The canonical lift of a root of X0 through the section."""
        return DemazureRoot(self.ray_map.index(r0.ray), self.split.section(r0.weight))


def reduce_datum(X: ToricDatum) -> ReducedDatum:
    split = split_lattice(X)
    coords = [tuple(dot(c, v) for c in split.complement_basis) for v in X.rays]
    X0 = ToricDatum.from_rays(coords, len(split.complement_basis))
    if not X0.sigma_dual.is_strongly_convex:
        raise AssertionError("reduced datum is still degenerate")
    ray_map = tuple(X0.ray_index(c) for c in coords)
    return ReducedDatum(X, X0, split, ray_map)


def project_roots(rd: ReducedDatum, roots: Sequence[DemazureRoot]) -> list[DemazureRoot]:
    out = []
    for r in roots:
        if rd.X.root_ray(r.weight) != r.ray:
            raise ValueError(f"{list(r.weight)} is not a root of ray {r.ray}")
        out.append(DemazureRoot(rd.ray_map[r.ray], rd.split.tau(r.weight)))
    return out


def fiber(rd: ReducedDatum, r0: DemazureRoot, bound: int) -> list[DemazureRoot]:
    """Roots of X in the box lying over r0."""
    return [r for r in enumerate_roots(rd.X, bound)
            if rd.ray_map[r.ray] == r0.ray and rd.split.tau(r.weight) == r0.weight]


def min_lifted_determinant(rd: ReducedDatum, e0_tuple: Sequence[Sequence[int]], bound: int) -> int:
    """Least |det| over independent n-tuples of box roots lifting exactly the given roots of X0."""
    n = rd.X.rank
    targets = {as_vector(e) for e in e0_tuple}
    if rank(list(targets)) != len(targets) or len(targets) != rd.X0.rank:
        raise ValueError("need n - s independent roots of the reduced datum")
    lifts = [r.weight for r in enumerate_roots(rd.X, bound) if rd.split.tau(r.weight) in targets]
    best = None
    for combo in combinations(lifts, n):
        if {rd.split.tau(e) for e in combo} != targets:
            continue
        d = abs(determinant(combo))
        if d and (best is None or d < best):
            best = d
    if best is None:
        raise ValueError("box too small: no independent lifts")
    return best


class ReducedUpsilon(UpsilonOracle):
    """The bijection induced on the reduced data through tau and tau'.

    Each query lifts the root of X0 twice (the section lift and that lift
    shifted by the first M_X basis vector) and checks that both images agree
    modulo M_X'.
    """

    def __init__(self, rd: ReducedDatum, rd_target: ReducedDatum, upsilon: UpsilonOracle):
        if rd.s != rd_target.s:
            raise InvalidUpsilonError("property III", "torus factors have different ranks",
                                      [[rd.s, rd_target.s]])
        ray_map = [0] * len(rd.X0.rays)
        for i, j in enumerate(upsilon.ray_map):
            ray_map[rd.ray_map[i]] = rd_target.ray_map[j]
        super().__init__(rd.X0, rd_target.X0, ray_map)
        self.rd, self.rd_target, self.upsilon = rd, rd_target, upsilon

    @staticmethod
    def _lifts(rd: ReducedDatum, r0: DemazureRoot) -> list[DemazureRoot]:
        first = rd.lift(r0)
        if not rd.s:
            return [first]
        return [first, DemazureRoot(first.ray, add(first.weight, rd.split.m_x_basis[0]))]

    def _through(self, r0, rd, rd_other, query):
        images = [query(r) for r in self._lifts(rd, r0)]
        projected = {rd_other.split.tau(f.weight) for f in images}
        if len(projected) > 1:
            witness = [r.weight for r in self._lifts(rd, r0)] + [f.weight for f in images]
            raise InvalidUpsilonError("property III", "lifts of one reduced root disagree", witness)
        return projected.pop()

    def _forward(self, r0):
        return self._through(r0, self.rd, self.rd_target, self.upsilon.query)

    def _backward(self, r0):
        return self._through(r0, self.rd_target, self.rd, self.upsilon.inverse_query)


def induce_reduced_bijection(rd: ReducedDatum, rd_target: ReducedDatum,
                             upsilon: UpsilonOracle) -> ReducedUpsilon:
    return ReducedUpsilon(rd, rd_target, upsilon)
