"""Queryable root bijections between two toric data.

An oracle answers ``query(root of X) -> root of X'`` and its inverse.  Every
answer is checked against the target datum (the image must be a root of the
announced ray), and answers are memoized and recorded in ``transcript``.
Oracles keep mutable caches, so each instance is meant for a single thread.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .linalg import Matrix, as_matrix, integer_inverse, is_unimodular, mat_vec, primitive_vector, transpose
from .roots import DemazureRoot, ToricDatum


class InvalidUpsilonError(Exception):
    """The bijection violates a required property; carries a stage tag and integer witnesses."""

    def __init__(self, stage: str, message: str, witness: Iterable[Sequence[int]] = ()):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.message = message
        self.witness = [list(w) for w in witness]

    def as_dict(self) -> dict:
        return {"stage": self.stage, "message": self.message, "witness": self.witness}


class UpsilonOracle:
    """Base class; subclasses provide ``_forward`` and ``_backward`` on roots."""

    def __init__(self, source: ToricDatum, target: ToricDatum, ray_map: Sequence[int]):
        ray_map = tuple(ray_map)
        if len(source.rays) != len(target.rays) or sorted(ray_map) != list(range(len(target.rays))):
            raise InvalidUpsilonError("property I", "ray map is not a bijection of ray sets",
                                      [list(ray_map)])
        self.source = source
        self.target = target
        self.ray_map = ray_map
        self.inverse_ray_map = tuple(ray_map.index(j) for j in range(len(ray_map)))
        self.transcript: list[tuple[str, DemazureRoot, DemazureRoot]] = []
        self._forward_cache: dict[DemazureRoot, DemazureRoot] = {}
        self._backward_cache: dict[DemazureRoot, DemazureRoot] = {}

    def _forward(self, r: DemazureRoot) -> Sequence[int]:
        raise NotImplementedError

    def _backward(self, r: DemazureRoot) -> Sequence[int]:
        raise NotImplementedError

    def query(self, r: DemazureRoot) -> DemazureRoot:
        if r in self._forward_cache:
            return self._forward_cache[r]
        if self.source.root_ray(r.weight) != r.ray:
            raise ValueError(f"{list(r.weight)} is not a root of ray {r.ray}")
        image = DemazureRoot(self.ray_map[r.ray], tuple(self._forward(r)))
        if self.target.root_ray(image.weight) != image.ray:
            raise InvalidUpsilonError("property I", "image is not a root of the mapped ray",
                                      [r.weight, image.weight])
        self._forward_cache[r] = image
        self.transcript.append(("query", r, image))
        return image

    def inverse_query(self, r: DemazureRoot) -> DemazureRoot:
        if r in self._backward_cache:
            return self._backward_cache[r]
        if self.target.root_ray(r.weight) != r.ray:
            raise ValueError(f"{list(r.weight)} is not a root of ray {r.ray}")
        image = DemazureRoot(self.inverse_ray_map[r.ray], tuple(self._backward(r)))
        if self.source.root_ray(image.weight) != image.ray:
            raise InvalidUpsilonError("property I", "preimage is not a root of the mapped ray",
                                      [r.weight, image.weight])
        self._backward_cache[r] = image
        self.transcript.append(("inverse", r, image))
        return image

    def __call__(self, weight: Sequence[int]) -> tuple[int, ...]:
        """Image of a bare weight (its ray is inferred)."""
        ray = self.source.root_ray(weight)
        if ray is None:
            raise ValueError(f"{list(weight)} is not a root")
        return self.query(DemazureRoot(ray, tuple(weight))).weight


def image_datum(X: ToricDatum, matrix: Sequence[Sequence[int]]) -> ToricDatum:
    """The datum X' with sigma'_dual = A sigma_dual, i.e. sigma' = A^{-T} sigma."""
    inv_t = transpose(integer_inverse(matrix))
    return ToricDatum.from_rays([mat_vec(inv_t, v) for v in X.rays], X.rank)


class LinearUpsilon(UpsilonOracle):
    """The restriction of a unimodular map A: M -> M' to the roots."""

    def __init__(self, source: ToricDatum, matrix: Sequence[Sequence[int]],
                 target: ToricDatum | None = None):
        matrix = as_matrix(matrix)
        if not is_unimodular(matrix):
            raise ValueError("hidden map must be unimodular")
        self.matrix: Matrix = matrix
        self.inverse_matrix: Matrix = integer_inverse(matrix)
        target = target or image_datum(source, matrix)
        inv_t = transpose(self.inverse_matrix)
        ray_map = [target.ray_index(primitive_vector(mat_vec(inv_t, v))) for v in source.rays]
        super().__init__(source, target, ray_map)

    def _forward(self, r):
        return mat_vec(self.matrix, r.weight)

    def _backward(self, r):
        return mat_vec(self.inverse_matrix, r.weight)


class TableUpsilon(UpsilonOracle):
    """A finite table of root pairs; queries outside it raise."""

    def __init__(self, source: ToricDatum, target: ToricDatum,
                 pairs: Iterable[tuple[Sequence[int], Sequence[int]]], ray_map: Sequence[int]):
        super().__init__(source, target, ray_map)
        self.forward_table: dict[tuple[int, ...], tuple[int, ...]] = {}
        self.backward_table: dict[tuple[int, ...], tuple[int, ...]] = {}
        for a, b in pairs:
            a, b = tuple(a), tuple(b)
            if a in self.forward_table or b in self.backward_table:
                raise InvalidUpsilonError("table", "table is not injective", [a, b])
            self.forward_table[a] = b
            self.backward_table[b] = a

    def _forward(self, r):
        try:
            return self.forward_table[r.weight]
        except KeyError:
            raise InvalidUpsilonError("table", "query outside the table", [r.weight]) from None

    def _backward(self, r):
        try:
            return self.backward_table[r.weight]
        except KeyError:
            raise InvalidUpsilonError("table", "inverse query outside the table", [r.weight]) from None


class SwappedUpsilon(UpsilonOracle):
    """Another oracle with the images of two roots exchanged (a mutation)."""

    def __init__(self, base: UpsilonOracle, first: DemazureRoot, second: DemazureRoot):
        super().__init__(base.source, base.target, base.ray_map)
        self.base = base
        self.swap = {first: second, second: first}
        images = {base.query(first): base.query(second), base.query(second): base.query(first)}
        self.back_swap = images

    def query(self, r):
        # bypass the ray map check so cross-family swaps surface as property I failures
        if r in self.swap:
            image = self.base.query(self.swap[r])
            mapped = self.ray_map[r.ray]
            if image.ray != mapped:
                raise InvalidUpsilonError("property I", "image is not a root of the mapped ray",
                                          [r.weight, image.weight])
            return image
        return self.base.query(r)

    def inverse_query(self, r):
        if r in self.back_swap:
            pre = self.base.inverse_query(self.back_swap[r])
            if pre.ray != self.inverse_ray_map[r.ray]:
                raise InvalidUpsilonError("property I", "preimage is not a root of the mapped ray",
                                          [r.weight, pre.weight])
            return pre
        return self.base.inverse_query(r)
