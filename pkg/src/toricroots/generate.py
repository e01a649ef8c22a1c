"""Seeded random toric data and unimodular maps."""
from __future__ import annotations

import random
from typing import Sequence

from .cones import NotStronglyConvexError
from .linalg import Matrix, from_columns, identity, integer_inverse, mat_mul, primitive_vector
from .linalg import rank as matrix_rank
from .roots import ToricDatum

MAX_GENERATED_RANK = 4
RETRY_BUDGET = 1000


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_datum(rank: int, ray_count: int, coordinate_bound: int, seed,
                 full_dimensional: bool = False) -> ToricDatum:
    """A strongly convex cone generated by ``ray_count`` extremal primitive rays.

    Draws integer vectors uniformly from the box and rejects draws that are
    zero, redundant, or span a line.  With ``full_dimensional`` the rays must
    also span N (so sigma_dual is strongly convex).
    """
    if rank > MAX_GENERATED_RANK:
        raise ValueError(f"rank {rank} exceeds the generator limit {MAX_GENERATED_RANK}")
    if rank < 0 or ray_count < 0 or coordinate_bound < 1:
        raise ValueError("rank, ray count and coordinate bound must be positive")
    if full_dimensional and ray_count < rank:
        raise ValueError("a full-dimensional cone needs at least rank many rays")
    rng = _rng(seed)
    for _ in range(RETRY_BUDGET):
        rays = []
        for _ in range(ray_count):
            v = [rng.randint(-coordinate_bound, coordinate_bound) for _ in range(rank)]
            if not any(v):
                break
            rays.append(primitive_vector(v))
        if len(rays) != ray_count or len(set(rays)) != ray_count:
            continue
        if full_dimensional and matrix_rank(rays) < rank:
            continue
        try:
            X = ToricDatum.from_rays(rays, rank)
        except NotStronglyConvexError:
            continue
        if len(X.rays) == ray_count:
            return X
    raise RuntimeError(f"no admissible datum after {RETRY_BUDGET} draws")


def random_unimodular(rank: int, seed, entry_bound: int = 3, steps: int | None = None) -> Matrix:
    """A product of a signed permutation and elementary row operations, entries at most ``entry_bound``."""
    rng = _rng(seed)
    steps = 2 * rank if steps is None else steps
    for _ in range(RETRY_BUDGET):
        rows = [list(r) for r in identity(rank)]
        rng.shuffle(rows)
        for r in rows:
            if rng.random() < 0.5:
                r[:] = [-a for a in r]
        for _ in range(rng.randint(0, steps) if rank > 1 else 0):
            i, j = rng.sample(range(rank), 2)
            c = rng.choice((-1, 1))
            rows[i] = [a + c * b for a, b in zip(rows[i], rows[j])]
        if all(abs(a) <= entry_bound for r in rows for a in r):
            return tuple(tuple(r) for r in rows)
    raise RuntimeError(f"no unimodular matrix within bound after {RETRY_BUDGET} draws")


def random_block_unimodular(basis: Sequence[Sequence[int]], s: int, seed,
                            entry_bound: int = 3) -> Matrix | None:
    """A unimodular A preserving the span of the last ``s`` basis columns.

    In the basis ``basis`` (columns: complement then M_X) A is block lower
    triangular.  Returns None when no draw within the budget respects
    ``entry_bound`` in standard coordinates.
    """
    rng = _rng(seed)
    n = len(basis)
    k = n - s
    P = from_columns(basis)
    P_inv = integer_inverse(P)
    for _ in range(RETRY_BUDGET):
        top = random_unimodular(k, rng) if k else ()
        bottom = random_unimodular(s, rng) if s else ()
        B = [[0] * n for _ in range(n)]
        for i in range(k):
            B[i][:k] = top[i]
        for i in range(s):
            B[k + i][k:] = bottom[i]
            B[k + i][:k] = [rng.randint(-1, 1) for _ in range(k)]
        A = mat_mul(mat_mul(P, tuple(tuple(r) for r in B)), P_inv)
        if all(abs(a) <= entry_bound for r in A for a in r):
            return A
    return None
