"""JSON file formats: cone files and root tables.

Files are integer-only JSON, UTF-8 with LF line endings, two-space indent,
innermost integer arrays written on one line.  A cone file stores the rays of
sigma in N; the writer emits them canonically (primitive, extremal, sorted),
so ``dump(load(f))`` reproduces a canonical file byte for byte.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .cones import NotStronglyConvexError
from .oracles import InvalidUpsilonError, TableUpsilon, UpsilonOracle
from .roots import ToricDatum, enumerate_roots

FORMAT_VERSION = 1

_INT_ARRAY = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


class InputError(Exception):
    """Malformed or inadmissible input; ``code`` is one of the class constants."""

    SCHEMA = "schema"
    NOT_STRONGLY_CONVEX = "not-strongly-convex"
    RANK_MISMATCH = "rank-mismatch"

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


def canonical_json(obj: Any) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    text = _INT_ARRAY.sub(lambda m: "[" + ", ".join(re.split(r",\s*", m.group(1))) + "]", text)
    return text + "\n"


def _write(path, obj) -> None:
    Path(path).write_bytes(canonical_json(obj).encode("utf-8"))


def _read(path) -> Any:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(InputError.SCHEMA, f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(InputError.SCHEMA, f"{path}: invalid JSON ({exc.msg})") from None


def _is_int(x) -> bool:
    return type(x) is int


def _int_array(x, what: str, length: int | None = None) -> tuple[int, ...]:
    if not isinstance(x, list) or not all(_is_int(a) for a in x):
        raise InputError(InputError.SCHEMA, f"{what} must be an array of integers")
    if length is not None and len(x) != length:
        raise InputError(InputError.RANK_MISMATCH, f"{what} has length {len(x)}, expected {length}")
    return tuple(x)


def _require(obj: dict, key: str, what: str):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(InputError.SCHEMA, f"{what}: missing field '{key}'")
    return obj[key]


# --- cone files ------------------------------------------------------------------


def cone_to_dict(X: ToricDatum, label: str | None = None) -> dict:
    out: dict[str, Any] = {"version": FORMAT_VERSION, "lattice_rank": X.rank}
    if label is not None:
        out["label"] = label
    out["rays"] = [list(v) for v in X.rays]
    return out


def datum_from_dict(obj: Any) -> ToricDatum:
    version = _require(obj, "version", "cone file")
    if version != FORMAT_VERSION or not _is_int(version):
        raise InputError(InputError.SCHEMA, f"unsupported version {version!r}")
    n = _require(obj, "lattice_rank", "cone file")
    if not _is_int(n) or n < 0:
        raise InputError(InputError.SCHEMA, "lattice_rank must be a non-negative integer")
    rays = _require(obj, "rays", "cone file")
    if not isinstance(rays, list):
        raise InputError(InputError.SCHEMA, "rays must be an array")
    if "label" in obj and not isinstance(obj["label"], str):
        raise InputError(InputError.SCHEMA, "label must be a string")
    extra = set(obj) - {"version", "lattice_rank", "rays", "label"}
    if extra:
        raise InputError(InputError.SCHEMA, f"unknown fields {sorted(extra)}")
    vectors = [_int_array(v, f"ray {i}", n) for i, v in enumerate(rays)]
    if any(not any(v) for v in vectors):
        raise InputError(InputError.SCHEMA, "rays must be nonzero")
    try:
        return ToricDatum.from_rays(vectors, n)
    except NotStronglyConvexError as exc:
        raise InputError(InputError.NOT_STRONGLY_CONVEX, str(exc)) from None


def load_datum(path) -> ToricDatum:
    return datum_from_dict(_read(path))


def load_label(path) -> str | None:
    obj = _read(path)
    return obj.get("label") if isinstance(obj, dict) else None


def save_datum(X: ToricDatum, path, label: str | None = None) -> None:
    _write(path, cone_to_dict(X, label))


# --- root tables -----------------------------------------------------------------


@dataclass(frozen=True)
class RootTable:
    datum: ToricDatum
    bound: int
    roots: tuple[tuple[tuple[int, ...], ...], ...]
    target: ToricDatum | None = None
    ray_map: tuple[int, ...] | None = None
    pairs: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...] = ()

    def upsilon(self) -> UpsilonOracle:
        if self.target is None:
            raise InputError(InputError.SCHEMA, "root table has no upsilon section")
        return TableUpsilon(self.datum, self.target, self.pairs, self.ray_map)


def root_table(X: ToricDatum, bound: int, upsilon: UpsilonOracle | None = None) -> RootTable:
    """Roots of X in the box, and optionally the images of all of them under ``upsilon``."""
    found = enumerate_roots(X, bound)
    per_ray = tuple(tuple(r.weight for r in found if r.ray == i) for i in range(len(X.rays)))
    if upsilon is None:
        return RootTable(X, bound, per_ray)
    pairs = tuple((r.weight, upsilon.query(r).weight) for r in found)
    return RootTable(X, bound, per_ray, upsilon.target, upsilon.ray_map, pairs)


def table_to_dict(table: RootTable) -> dict:
    out: dict[str, Any] = {
        "version": FORMAT_VERSION,
        "datum": cone_to_dict(table.datum),
        "bound": table.bound,
        "roots": [{"ray": list(v), "weights": [list(w) for w in ws]}
                  for v, ws in zip(table.datum.rays, table.roots)],
    }
    if table.target is not None:
        out["upsilon"] = {
            "target": cone_to_dict(table.target),
            "ray_map": list(table.ray_map),
            "pairs": [[list(a), list(b)] for a, b in table.pairs],
        }
    return out


def table_from_dict(obj: Any) -> RootTable:
    if _require(obj, "version", "root table") != FORMAT_VERSION:
        raise InputError(InputError.SCHEMA, "unsupported root table version")
    X = datum_from_dict(_require(obj, "datum", "root table"))
    bound = _require(obj, "bound", "root table")
    if not _is_int(bound) or bound < 0:
        raise InputError(InputError.SCHEMA, "bound must be a non-negative integer")
    entries = _require(obj, "roots", "root table")
    if not isinstance(entries, list) or len(entries) != len(X.rays):
        raise InputError(InputError.SCHEMA, "roots must list every ray of the datum once")
    roots = []
    for i, entry in enumerate(entries):
        ray = _int_array(_require(entry, "ray", f"roots[{i}]"), f"roots[{i}].ray", X.rank)
        if ray != X.rays[i]:
            raise InputError(InputError.SCHEMA, f"roots[{i}] is not listed under ray {list(X.rays[i])}")
        weights = _require(entry, "weights", f"roots[{i}]")
        if not isinstance(weights, list):
            raise InputError(InputError.SCHEMA, f"roots[{i}].weights must be an array")
        ws = tuple(_int_array(w, f"roots[{i}] weight", X.rank) for w in weights)
        for w in ws:
            if not X.is_root(i, w):
                raise InputError(InputError.SCHEMA, f"{list(w)} is not a root of ray {list(ray)}")
        roots.append(ws)
    if "upsilon" not in obj:
        return RootTable(X, bound, tuple(roots))
    section = obj["upsilon"]
    Y = datum_from_dict(_require(section, "target", "upsilon"))
    if Y.rank != X.rank:
        raise InputError(InputError.RANK_MISMATCH, "target datum has a different lattice rank")
    ray_map = _int_array(_require(section, "ray_map", "upsilon"), "ray_map", len(X.rays))
    if sorted(ray_map) != list(range(len(Y.rays))):
        raise InputError(InputError.SCHEMA, "ray_map is not a bijection of ray indices")
    raw_pairs = _require(section, "pairs", "upsilon")
    if not isinstance(raw_pairs, list):
        raise InputError(InputError.SCHEMA, "pairs must be an array")
    pairs = []
    for k, pair in enumerate(raw_pairs):
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError(InputError.SCHEMA, f"pairs[{k}] must be a two-element array")
        a = _int_array(pair[0], f"pairs[{k}][0]", X.rank)
        b = _int_array(pair[1], f"pairs[{k}][1]", X.rank)
        if X.root_ray(a) is None:
            raise InputError(InputError.SCHEMA, f"pairs[{k}][0] = {list(a)} is not a root of the datum")
        if Y.root_ray(b) is None:
            raise InputError(InputError.SCHEMA, f"pairs[{k}][1] = {list(b)} is not a root of the target")
        pairs.append((a, b))
    return RootTable(X, bound, tuple(roots), Y, ray_map, tuple(pairs))


def load_root_table(path) -> RootTable:
    try:
        return table_from_dict(_read(path))
    except InvalidUpsilonError as exc:
        raise InputError(InputError.SCHEMA, exc.message) from None


def save_root_table(table: RootTable, path) -> None:
    _write(path, table_to_dict(table))


def rays_as_lists(vectors: Sequence[Sequence[int]]) -> list[list[int]]:
    return [list(v) for v in vectors]
