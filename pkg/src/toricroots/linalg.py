"""Exact integer and rational linear algebra.

Vectors are tuples of Python ints and matrices are tuples of row tuples.
Rationals are :class:`fractions.Fraction`.  Nothing here uses floating point,
and integers never overflow.
"""
from __future__ import annotations

import operator
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]
RationalVector = tuple[Fraction, ...]


def as_vector(v: Iterable) -> Vector:
    """Coerce to an integer tuple, rejecting non-integral entries."""
    return tuple(operator.index(x) for x in v)


def as_rational_vector(v: Iterable) -> RationalVector:
    return tuple(Fraction(x) for x in v)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    m = tuple(as_vector(r) for r in rows)
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def zero(n: int) -> Vector:
    return (0,) * n


def unit(n: int, i: int) -> Vector:
    return tuple(1 if j == i else 0 for j in range(n))


def identity(n: int) -> Matrix:
    return tuple(unit(n, i) for i in range(n))


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def add(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def scale(c, v: Sequence) -> tuple:
    return tuple(c * a for a in v)


def neg(v: Sequence) -> tuple:
    return tuple(-a for a in v)


def transpose(m: Sequence[Sequence]) -> tuple:
    return tuple(zip(*m))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(dot(row, v) for row in m)


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    cols = transpose(b)
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def from_columns(columns: Sequence[Sequence]) -> tuple:
    return transpose(columns)


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination.

    >>> determinant([[1, 0], [1, 2]])
    2
    """
    m = as_matrix(m)
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(m: Sequence[Sequence[int]]) -> bool:
    m = as_matrix(m)
    return all(len(r) == len(m) for r in m) and abs(determinant(m)) == 1


def primitive_vector(v: Sequence[int]) -> Vector:
    """Divide a nonzero integer vector by the gcd of its coordinates."""
    v = as_vector(v)
    g = gcd(*v) if v else 0
    if g == 0:
        raise ValueError("the zero vector has no primitive generator")
    return tuple(x // g for x in v)


def integral_multiple(v: Sequence) -> Vector:
    """Smallest positive multiple of a rational vector that is primitive integral."""
    v = as_rational_vector(v)
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive_vector(int(x * den) for x in v)


def lattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """|det| of n vectors in rank n: the index of their span, or 0 if dependent."""
    m = as_matrix(vectors)
    if any(len(r) != len(m) for r in m):
        raise ValueError("lattice_index needs exactly n vectors of rank n")
    return abs(determinant(m))


# --- rational elimination -------------------------------------------------


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over the rationals, with pivot columns."""
    a = [[Fraction(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def rational_kernel(rows: Sequence[Sequence], n: int) -> list[RationalVector]:
    """Basis of {x in Q^n : rows . x = 0}."""
    reduced, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> RationalVector | None:
    """One rational solution of a x = b, or None when inconsistent."""
    n = len(a[0]) if a else 0
    aug = [list(r) + [y] for r, y in zip(a, b)]
    reduced, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, p in zip(reduced, pivots):
        x[p] = row[n]
    return tuple(x)


def inverse(m: Sequence[Sequence]) -> tuple[RationalVector, ...]:
    n = len(m)
    aug = [list(r) + list(unit(n, i)) for i, r in enumerate(m)]
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("singular matrix")
    return tuple(tuple(row[n:]) for row in reduced)


def integer_inverse(m: Sequence[Sequence[int]]) -> Matrix:
    inv = inverse(m)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def solve_linear_map(sources: Sequence[Sequence], images: Sequence[Sequence]):
    """The rational matrix L with L s = t for n independent sources s and images t."""
    src = from_columns(sources)
    img = from_columns(images)
    return mat_mul(img, inverse(src))


def as_integer_matrix(m: Sequence[Sequence]) -> Matrix | None:
    """Integer copy of a rational matrix, or None if some entry is fractional."""
    if any(Fraction(x).denominator != 1 for row in m for x in row):
        return None
    return tuple(tuple(int(x) for x in row) for row in m)


# --- integer elimination --------------------------------------------------


def _echelon(vectors: Iterable[Sequence[int]], length: int):
    """Unimodular elimination on the first ``length`` coordinates.

    Returns ``(pivots, rest)`` where ``pivots`` is a list of ``(row, vector)``
    in increasing row order, each vector having positive entry at its row and
    zeros before it, and ``rest`` are the vectors whose leading ``length``
    coordinates vanished.  Together they span the same lattice as the input.
    """
    work = [list(v) for v in vectors]
    pivots = []
    for i in range(length):
        active = [w for w in work if w[i] != 0]
        if not active:
            continue
        rest = [w for w in work if w[i] == 0]
        while len(active) > 1:
            active.sort(key=lambda w: abs(w[i]))
            p = active[0]
            survivors = [p]
            for w in active[1:]:
                q = w[i] // p[i]
                w = [a - q * b for a, b in zip(w, p)]
                (survivors if w[i] != 0 else rest).append(w)
            active = survivors
        p = active[0]
        if p[i] < 0:
            p = [-a for a in p]
        pivots.append((i, p))
        work = rest
    return pivots, work


def lattice_basis(vectors: Sequence[Sequence[int]], n: int | None = None) -> tuple[Vector, ...]:
    """Canonical (Hermite) basis of the lattice spanned by ``vectors``."""
    vectors = [as_vector(v) for v in vectors]
    if n is None:
        n = len(vectors[0]) if vectors else 0
    pivots, _ = _echelon(vectors, n)
    basis: list[list[int]] = []
    for row, p in pivots:
        for b in basis:
            q = b[row] // p[row]
            if q:
                b[:] = [x - q * y for x, y in zip(b, p)]
        basis.append(p)
    return tuple(tuple(b) for b in basis)


def hermite_normal_form(m: Sequence[Sequence[int]]) -> tuple[Matrix, tuple[int, ...]]:
    """Column-style Hermite normal form of the lattice spanned by the columns of ``m``.

    The basis columns are lower triangular with positive pivots; entries to the
    left of a pivot lie in ``[0, pivot)``.  Zero columns are dropped.  Returns
    the basis as a matrix (same number of rows as ``m``) and the pivot rows.
    """
    m = as_matrix(m)
    n = len(m)
    columns = transpose(m)
    basis = lattice_basis(columns, n)
    pivots = tuple(next(i for i, x in enumerate(b) if x) for b in basis)
    return (transpose(basis) if basis else tuple(() for _ in range(n))), pivots


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> tuple[Vector, ...]:
    """Hermite basis of {x in Z^n : rows . x = 0}."""
    rows = as_matrix(rows)
    k = len(rows)
    augmented = [tuple(r[j] for r in rows) + unit(n, j) for j in range(n)]
    _, rest = _echelon(augmented, k)
    return lattice_basis([w[k:] for w in rest], n)


def integer_solutions(rows: Sequence[Sequence[int]], rhs: Sequence[int], n: int):
    """Parametrize {x in Z^n : rows . x = rhs} as ``x0 + span(kernel)``.

    Returns ``(x0, kernel)`` or ``None`` when there is no integer solution.
    """
    rows = as_matrix(rows)
    if not rows:
        return zero(n), identity(n)
    diag, left, right = smith_normal_form(rows)
    target = mat_vec(left, rhs)
    y = [0] * n
    for i, t in enumerate(target):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if t != 0:
                return None
        elif t % d:
            return None
        else:
            y[i] = t // d
    x0 = mat_vec(right, y)
    kernel = lattice_basis([tuple(right[r][j] for r in range(n))
                            for j in range(n) if j >= len(diag) or diag[j] == 0], n)
    return x0, kernel


def smith_normal_form(m: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], Matrix, Matrix]:
    """Smith normal form with transforms.

    Returns ``(diagonal, U, V)`` with ``U m V`` diagonal, ``U`` and ``V``
    unimodular, entries non-negative and each dividing the next.

    >>> smith_normal_form([[2, 4], [0, 6]])[0]
    (2, 6)
    """
    a = [list(r) for r in as_matrix(m)]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst -= q * row src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col dst -= q * col src
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    diag = []
    for t in range(min(rows, cols)):
        while True:
            entries = [(abs(a[i][j]), i, j) for i in range(t, rows)
                       for j in range(t, cols) if a[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, a[i][t] // p)
                    dirty |= a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, a[t][j] // p)
                    dirty |= a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, rows)
                        for j in range(t + 1, cols) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        diag.append(a[t][t])
    return tuple(diag), as_matrix(u), as_matrix(v)


def complete_to_basis(vectors: Sequence[Sequence[int]], n: int) -> tuple[Vector, ...]:
    """Vectors extending a basis of a saturated sublattice to a basis of Z^n."""
    vectors = [as_vector(v) for v in vectors]
    k = len(vectors)
    if k == 0:
        return identity(n)
    diag, left, _ = smith_normal_form(from_columns(vectors))
    if any(d != 1 for d in diag):
        raise ValueError("sublattice is not saturated")
    back = integer_inverse(left)
    return tuple(tuple(back[r][j] for r in range(n)) for j in range(k, n))


def hyperplane_normal(vectors: Sequence[Sequence[int]], n: int) -> Vector:
    """The integer vector c with det(v_1, ..., v_{n-1}, x) = <c, x> for all x."""
    vectors = [as_vector(v) for v in vectors]
    return tuple(determinant(vectors + [unit(n, j)]) for j in range(n))
