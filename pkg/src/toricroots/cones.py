"""Rational polyhedral cones, polyhedra and lattice-point enumeration.

A :class:`RationalCone` stores two canonical lists: ``rays`` generate the cone
and ``inequalities`` generate its dual, so that the cone is
``{x : <h, x> >= 0 for h in inequalities}``.  Duality is a swap.  Both lists
come out of Fourier-Motzkin elimination followed by canonicalization:

* a lineality space contributes both signs of its Hermite basis;
* every other ray is an extremal ray of the pointed part, projected
  orthogonally onto the complement of the lineality space and made primitive.

With this normal form, equal cones have equal ray lists.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from math import ceil, floor, gcd
from typing import Callable, Iterable, Sequence

from .linalg import (
    Vector,
    add,
    as_rational_vector,
    as_vector,
    dot,
    identity,
    integer_kernel,
    integer_solutions,
    integral_multiple,
    lattice_basis,
    neg,
    rank,
    rref,
    scale,
    solve,
    unit,
    zero,
)

MAX_RANK = 8


class NotStronglyConvexError(ValueError):
    """The cone contains a line."""


class UnboundedError(ValueError):
    """A region expected to be bounded has a nonzero recession direction."""

    def __init__(self, message: str, direction: Vector):
        super().__init__(f"{message}: recession direction {list(direction)}")
        self.direction = direction


def _primitive_row(row: list[int]) -> list[int]:
    g = gcd(*row)
    return [x // g for x in row] if g > 1 else row


def _fourier_motzkin_dual(gens: Sequence[Vector], n: int) -> list[Vector]:
    """Generators ``a`` of the dual of cone(gens): cone = {x : a . x >= 0}.

    Eliminates the multipliers ``lam`` from ``x = sum lam_i g_i, lam >= 0``.
    Equalities go first by Gaussian substitution, then Fourier-Motzkin with
    Chernikov's history rule to prune redundant combinations.
    """
    k = len(gens)
    width = n + k
    equalities = [[1 if c == j else 0 for c in range(n)] + [-g[j] for g in gens]
                  for j in range(n)]
    inequalities = [([0] * n + [1 if c == i else 0 for c in range(k)], frozenset([i]))
                    for i in range(k)]

    def eliminate(row, eq, col):
        c = eq[col]
        s = 1 if c > 0 else -1
        return _primitive_row([abs(c) * x - s * row[col] * y for x, y in zip(row, eq)])

    pure = []
    while equalities:
        eq = equalities.pop()
        col = next((c for c in range(n, width) if eq[c]), None)
        if col is None:
            if any(eq):
                pure.append(eq[:n])
            continue
        equalities = [eliminate(r, eq, col) if r[col] else r for r in equalities]
        inequalities = [(eliminate(r, eq, col) if r[col] else r, h) for r, h in inequalities]

    steps = 0
    for col in range(n, width):
        pos = [(r, h) for r, h in inequalities if r[col] > 0]
        negs = [(r, h) for r, h in inequalities if r[col] < 0]
        if not pos and not negs:
            continue
        steps += 1
        combined = {tuple(r): h for r, h in inequalities if r[col] == 0}
        for (p, hp), (q, hq) in product(pos, negs):
            hist = hp | hq
            if len(hist) > steps + 1:
                continue
            row = tuple(_primitive_row([-q[col] * x + p[col] * y for x, y in zip(p, q)]))
            if row not in combined or len(hist) < len(combined[row]):
                combined[row] = hist
        inequalities = [(list(r), h) for r, h in combined.items()]

    out = {tuple(r[:n]) for r, _ in inequalities if any(r[:n])}
    for p in pure:
        p = tuple(_primitive_row(list(p)))
        out.add(p)
        out.add(neg(p))
    return sorted(out)


def _project_off(v: Sequence, basis: Sequence[Vector]) -> tuple[Fraction, ...]:
    """Orthogonal projection of v onto the complement of span(basis)."""
    if not basis:
        return as_rational_vector(v)
    gram = [[dot(a, b) for b in basis] for a in basis]
    coeffs = solve(gram, [dot(a, v) for a in basis])
    out = list(as_rational_vector(v))
    for c, b in zip(coeffs, basis):
        for i, x in enumerate(b):
            out[i] -= c * x
    return tuple(out)


def _canonical_generators(gens: Sequence[Vector], ineqs: Sequence[Vector], n: int) -> tuple[Vector, ...]:
    """Canonical rays of K = cone(gens) = {x : a . x >= 0 for a in ineqs}."""
    lineality = integer_kernel(ineqs, n) if ineqs else identity(n)
    full = rank(ineqs)
    out = set(lineality) | {neg(v) for v in lineality}
    for g in gens:
        tight = [a for a in ineqs if dot(a, g) == 0]
        if len(tight) < len(ineqs) and rank(tight) == full - 1:
            out.add(integral_multiple(_project_off(g, lineality)))
    return tuple(sorted(out))


@dataclass(frozen=True)
class RationalCone:
    """A rational polyhedral cone in Q^rank in canonical double description."""

    rank: int
    rays: tuple[Vector, ...]
    inequalities: tuple[Vector, ...] = field(compare=False, repr=False)

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence[int]], rank: int | None = None) -> RationalCone:
        gens = [as_vector(g) for g in gens]
        if rank is None:
            if not gens:
                raise ValueError("rank required for an empty generator list")
            rank = len(gens[0])
        if any(len(g) != rank for g in gens):
            raise ValueError("generator of the wrong rank")
        if rank > MAX_RANK:
            raise ValueError(f"rank {rank} exceeds the Fourier-Motzkin guard {MAX_RANK}")
        dual_gens = _fourier_motzkin_dual(gens, rank)
        rays = _canonical_generators(gens, dual_gens, rank)
        ineqs = _canonical_generators(dual_gens, gens, rank)
        cone = cls(rank, rays, ineqs)
        if any(dot(h, r) < 0 for h in ineqs for r in rays):
            raise AssertionError("generator and inequality descriptions disagree")
        return cone

    @classmethod
    def from_inequalities(cls, ineqs: Iterable[Sequence[int]], rank: int,
                          equalities: Iterable[Sequence[int]] = ()) -> RationalCone:
        """The cone {x : <h,x> >= 0 for h in ineqs, <c,x> = 0 for c in equalities}."""
        ineqs = [as_vector(h) for h in ineqs]
        equalities = [as_vector(c) for c in equalities]
        gens = ineqs + equalities + [neg(c) for c in equalities]
        return cls.from_generators(gens, rank).dual()

    @classmethod
    def whole_space(cls, rank: int) -> RationalCone:
        return cls.from_generators([], rank).dual()

    def dual(self) -> RationalCone:
        return RationalCone(self.rank, self.inequalities, self.rays)

    @cached_property
    def lineality_basis(self) -> tuple[Vector, ...]:
        if not self.inequalities:
            return identity(self.rank)
        return integer_kernel(self.inequalities, self.rank)

    @property
    def dim(self) -> int:
        return rank(self.rays)

    @property
    def is_zero(self) -> bool:
        return not self.rays

    @property
    def is_strongly_convex(self) -> bool:
        return not self.lineality_basis

    def contains(self, x: Sequence) -> bool:
        return all(dot(h, x) >= 0 for h in self.inequalities)

    def contains_relative_interior(self, x: Sequence) -> bool:
        """True when x lies in the relative interior of the cone."""
        return self.contains(x) and all(dot(h, x) > 0 for h in self.inequalities
                                        if any(dot(h, r) for r in self.rays))

    def face(self, normal: Sequence[int]) -> RationalCone:
        """The face cut out by a supporting functional from the dual cone."""
        return RationalCone.from_generators(
            [r for r in self.rays if dot(normal, r) == 0], self.rank)

    def intersect(self, other: RationalCone) -> RationalCone:
        return RationalCone.from_inequalities(self.inequalities + other.inequalities, self.rank)

    def restrict(self, equalities: Iterable[Sequence[int]] = (),
                 inequalities: Iterable[Sequence[int]] = ()) -> RationalCone:
        """Intersect with a linear subspace and/or extra half-spaces."""
        return RationalCone.from_inequalities(
            list(self.inequalities) + [as_vector(h) for h in inequalities],
            self.rank, equalities)


def dual_cone(c: RationalCone) -> RationalCone:
    if c.rank > MAX_RANK:
        raise ValueError(f"rank {c.rank} exceeds the Fourier-Motzkin guard {MAX_RANK}")
    return c.dual()


def extremal_rays(c: RationalCone) -> list[Vector]:
    if not c.is_strongly_convex:
        raise NotStronglyConvexError("cone is not strongly convex")
    return list(c.rays)


def is_strongly_convex(c: RationalCone) -> bool:
    return c.is_strongly_convex


def orthogonal_sublattice(vs: Sequence[Sequence[int]], rank: int | None = None) -> tuple[Vector, ...]:
    """Hermite basis of {m : <m, v> = 0 for all v in vs}."""
    vs = [as_vector(v) for v in vs]
    if rank is None:
        if not vs:
            raise ValueError("rank required for an empty list")
        rank = len(vs[0])
    return integer_kernel(vs, rank) if vs else identity(rank)


def relative_interior_point(c: RationalCone) -> Vector:
    """Sum of the canonical rays: a lattice point in the relative interior."""
    if c.is_zero:
        raise ValueError("the zero cone has no nonzero interior point")
    point = zero(c.rank)
    for r in c.rays:
        point = add(point, r)
    return point


def first_success(predicate: Callable[[int], bool], start: int = 1) -> int:
    """Least t >= start with predicate(t), for a predicate monotone in t.

    Doubles t until the predicate holds, then bisects back to the first
    success.  Loops forever only if the predicate never holds.
    """
    if predicate(start):
        return start
    lo, hi = start, max(1, start) * 2
    while not predicate(hi):
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


# --- polyhedra ------------------------------------------------------------

Constraint = tuple[tuple[Fraction, ...], Fraction]


def _integral_constraint(normal: Sequence, value) -> tuple[Vector, int]:
    """Scale a rational constraint <normal, x> (op) value to integer data."""
    items = [Fraction(x) for x in normal] + [Fraction(value)]
    den = 1
    for x in items:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in items]
    return tuple(ints[:-1]), ints[-1]


def _homogenization(ineqs, eqs, n: int) -> RationalCone:
    """{(x, s) : a.x - b s >= 0, c.x - d s = 0, s >= 0} in rank n + 1."""
    hom_ineqs = [a + (-b,) for a, b in ineqs] + [unit(n + 1, n)]
    hom_eqs = [c + (-d,) for c, d in eqs]
    return RationalCone.from_inequalities(hom_ineqs, n + 1, hom_eqs)


def _normalize(ineqs, eqs):
    return ([_integral_constraint(a, b) for a, b in ineqs],
            [_integral_constraint(c, d) for c, d in eqs])


@dataclass(frozen=True)
class Polytope:
    """A bounded polyhedron {a.x >= b, c.x = d}, possibly empty.

    Construction computes the vertices exactly and raises
    :class:`UnboundedError` if the region is nonempty and unbounded.
    """

    rank: int
    inequalities: tuple[tuple[Vector, int], ...]
    equalities: tuple[tuple[Vector, int], ...] = ()
    vertices: tuple[tuple[Fraction, ...], ...] = field(init=False, compare=False)

    def __post_init__(self):
        ineqs, eqs = _normalize(self.inequalities, self.equalities)
        object.__setattr__(self, "inequalities", tuple(ineqs))
        object.__setattr__(self, "equalities", tuple(eqs))
        hom = _homogenization(ineqs, eqs, self.rank)
        tops = [r for r in hom.rays if r[-1] > 0]
        flat = [r for r in hom.rays if r[-1] == 0]
        if tops and flat:
            raise UnboundedError("polytope is unbounded", flat[0][:-1])
        verts = sorted({tuple(Fraction(x, r[-1]) for x in r[:-1]) for r in tops})
        object.__setattr__(self, "vertices", tuple(verts))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def contains(self, x: Sequence) -> bool:
        return (all(dot(a, x) >= b for a, b in self.inequalities)
                and all(dot(c, x) == d for c, d in self.equalities))


def recession_cone(ineqs, eqs, rank: int) -> RationalCone:
    """Recession cone of the nonempty polyhedron {a.x >= b, c.x = d}.

    ``ineqs`` and ``eqs`` are lists of ``(normal, value)`` pairs.
    """
    ineqs, eqs = _normalize(ineqs, eqs)
    if not any(r[-1] > 0 for r in _homogenization(ineqs, eqs, rank).rays):
        raise ValueError("empty polyhedron has no recession cone")
    return RationalCone.from_inequalities([a for a, _ in ineqs], rank, [c for c, _ in eqs])


def lattice_points(p: Polytope) -> list[Vector]:
    """All integer points of a polytope, sorted.

    Integer solutions of the equalities are parametrized as x0 + K t; the
    vertices give a bounding box in t, which is then filtered.
    """
    if p.is_empty:
        return []
    n = p.rank
    if p.equalities:
        param = integer_solutions([c for c, _ in p.equalities], [d for _, d in p.equalities], n)
        if param is None:
            return []
        origin, kernel = param
    else:
        origin, kernel = zero(n), identity(n)
    if not kernel:
        return [origin] if p.contains(origin) else []
    columns = [[row[j] for row in kernel] for j in range(n)]
    coords = [solve(columns, [v - o for v, o in zip(vert, origin)]) for vert in p.vertices]
    ranges = [range(floor(min(c[j] for c in coords)), ceil(max(c[j] for c in coords)) + 1)
              for j in range(len(kernel))]
    points = []
    for t in product(*ranges):
        x = list(origin)
        for tj, k in zip(t, kernel):
            if tj:
                for i in range(n):
                    x[i] += tj * k[i]
        if p.contains(x):
            points.append(tuple(x))
    return sorted(points)


@dataclass(frozen=True)
class AffineSlab:
    """Lattice points of (base + directions) cut by equalities <normal, m> = value."""

    base: Vector
    directions: RationalCone
    equalities: tuple[tuple[Vector, int], ...]

    def contains(self, m: Sequence[int]) -> bool:
        return (all(dot(c, m) == d for c, d in self.equalities)
                and self.directions.contains([a - b for a, b in zip(m, self.base)]))


def facet_group_generators(sigma_dual: RationalCone, normal: Sequence[int]) -> list[Vector]:
    """Lattice points of sigma_dual ∩ normal⊥ whose integer span is normal⊥ ∩ M.

    Takes an interior point m0 of the facet and a Hermite basis a_j of
    normal⊥ ∩ M, and returns m0 together with t*m0 + a_j for the least t >= 0
    putting every t*m0 + a_j inside the facet.
    """
    normal = as_vector(normal)
    facet = sigma_dual.restrict(equalities=[normal])
    basis = orthogonal_sublattice([normal])
    if not basis:
        return []
    m0 = relative_interior_point(facet) if not facet.is_zero else zero(len(normal))

    def inside(t):
        return all(facet.contains(add(scale(t, m0), a)) for a in basis)

    t = first_success(inside, start=0)
    out = {m0} | {add(scale(t, m0), a) for a in basis}
    out.discard(zero(len(normal)))
    return sorted(out)


def span_basis(vectors: Iterable[Sequence[int]], n: int) -> tuple[Vector, ...]:
    return lattice_basis([as_vector(v) for v in vectors], n)
