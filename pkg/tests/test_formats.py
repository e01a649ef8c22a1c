import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricroots.formats import (
    InputError,
    canonical_json,
    cone_to_dict,
    load_datum,
    load_label,
    load_root_table,
    root_table,
    save_datum,
    save_root_table,
    table_from_dict,
    table_to_dict,
)
from toricroots.degeneration import split_lattice
from toricroots.generate import random_block_unimodular, random_datum, random_unimodular
from toricroots.linalg import is_unimodular
from toricroots.oracles import InvalidUpsilonError, LinearUpsilon
from toricroots.roots import ToricDatum, enumerate_roots

GOLDEN = Path(__file__).parent / "golden"


def write(tmp_path, obj, name="cone.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj), encoding="utf-8")
    return path


# --- cone files --------------------------------------------------------------------


def test_load_affine_plane(tmp_path, affine_plane):
    path = write(tmp_path, {"version": 1, "lattice_rank": 2, "rays": [[1, 0], [0, 1]]})
    assert load_datum(path) == affine_plane


def test_load_canonicalizes_rays(tmp_path):
    path = write(tmp_path, {"version": 1, "lattice_rank": 2, "rays": [[2, -1], [0, 1], [4, -2]]})
    X = load_datum(path)
    assert X.rays == ((0, 1), (2, -1))
    assert X.sigma_dual.rays == ((1, 0), (1, 2))


@pytest.mark.parametrize("obj, code", [
    ({"version": 1, "lattice_rank": 2, "rays": [[1, 0], [-1, 0]]}, InputError.NOT_STRONGLY_CONVEX),
    ({"version": 1, "lattice_rank": 2, "rays": [[1, 0, 0]]}, InputError.RANK_MISMATCH),
    ({"version": 2, "lattice_rank": 2, "rays": []}, InputError.SCHEMA),
    ({"version": 1, "lattice_rank": 2, "rays": [[1.0, 0]]}, InputError.SCHEMA),
    ({"version": 1, "lattice_rank": 2, "rays": [[True, 0]]}, InputError.SCHEMA),
    ({"version": 1, "lattice_rank": 2, "rays": [[0, 0]]}, InputError.SCHEMA),
    ({"version": 1, "lattice_rank": 2}, InputError.SCHEMA),
    ({"version": 1, "lattice_rank": 2, "rays": [], "extra": 1}, InputError.SCHEMA),
    ([1, 2], InputError.SCHEMA),
])
def test_load_errors_have_distinct_codes(tmp_path, obj, code):
    with pytest.raises(InputError) as info:
        load_datum(write(tmp_path, obj))
    assert info.value.code == code


def test_error_codes_are_distinct():
    codes = {InputError.SCHEMA, InputError.NOT_STRONGLY_CONVEX, InputError.RANK_MISMATCH}
    assert len(codes) == 3


def test_invalid_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    for path in (bad, tmp_path / "missing.json"):
        with pytest.raises(InputError) as info:
            load_datum(path)
        assert info.value.code == InputError.SCHEMA


def test_canonical_json_layout():
    text = canonical_json({"a": [[1, -2], [3, 4]], "b": 5})
    assert text == '{\n  "a": [\n    [1, -2],\n    [3, 4]\n  ],\n  "b": 5\n}\n'


def test_label_round_trip(tmp_path, a1_cone):
    path = tmp_path / "a1.json"
    save_datum(a1_cone, path, label="A1")
    assert load_label(path) == "A1" and load_datum(path) == a1_cone


@st.composite
def data(draw):
    n = draw(st.integers(1, 3))
    return random_datum(n, draw(st.integers(0, n if n <= 2 else n + 1)), 3, draw(st.integers(0, 10 ** 6)))


@settings(max_examples=30)
@given(data())
def test_save_load_is_byte_identical(tmp_path_factory, X):
    d = tmp_path_factory.mktemp("rt")
    first, second = d / "a.json", d / "b.json"
    save_datum(X, first)
    save_datum(load_datum(first), second)
    assert first.read_bytes() == second.read_bytes()
    raw = first.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


# --- generators --------------------------------------------------------------------


def test_random_datum_golden(tmp_path):
    path = tmp_path / "out.json"
    save_datum(random_datum(2, 2, 3, 7), path)
    assert path.read_bytes() == (GOLDEN / "random_datum_2_2_3_7.json").read_bytes()


def test_random_datum_is_deterministic():
    first = canonical_json(cone_to_dict(random_datum(3, 4, 2, 99)))
    assert first == canonical_json(cone_to_dict(random_datum(3, 4, 2, 99)))


def test_random_datum_rank_guard():
    with pytest.raises(ValueError):
        random_datum(9, 2, 3, 0)


@settings(max_examples=30)
@given(st.integers(1, 4), st.integers(0, 4), st.integers(0, 10 ** 6))
def test_random_datum_properties(n, count, seed):
    if n <= 2:
        count = min(count, n)
    X = random_datum(n, count, 2, seed)
    assert X.rank == n and len(X.rays) <= count
    assert all(max(map(abs, v)) <= 2 for v in X.rays)


@settings(max_examples=30)
@given(st.integers(1, 3), st.integers(0, 10 ** 6))
def test_full_dimensional_option(n, seed):
    X = random_datum(n, n, 2, seed, full_dimensional=True)
    assert X.sigma_dual.is_strongly_convex and len(X.rays) == n


@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_random_unimodular(n, seed):
    A = random_unimodular(n, seed)
    assert is_unimodular(A) and A == random_unimodular(n, seed)
    assert max(abs(a) for r in A for a in r) <= 3


def test_block_unimodular_keeps_torus_factor():
    X = ToricDatum.from_rays([(1, 0, 0)], 3)
    split = split_lattice(X)
    for seed in range(10):
        A = random_block_unimodular(split.complement_basis + split.m_x_basis, split.s, seed)
        if A is None:
            continue
        Y = LinearUpsilon(X, A).target
        # M_X is carried onto M_X' = M_X, so both sides split the same way
        assert split_lattice(Y).s == split.s


# --- root tables -------------------------------------------------------------------


def test_root_table_round_trip(tmp_path, affine_plane):
    U = LinearUpsilon(affine_plane, ((1, 1), (0, 1)))
    table = root_table(affine_plane, 3, U)
    path = tmp_path / "table.json"
    save_root_table(table, path)
    again = load_root_table(path)
    assert again == table
    other = tmp_path / "again.json"
    save_root_table(again, other)
    assert path.read_bytes() == other.read_bytes()
    table_oracle = again.upsilon()
    for r in enumerate_roots(affine_plane, 3):
        assert table_oracle.query(r) == U.query(r)


def test_root_table_rejects_non_roots(affine_plane):
    obj = table_to_dict(root_table(affine_plane, 2))
    obj["roots"][0]["weights"].append([5, 5])
    with pytest.raises(InputError) as info:
        table_from_dict(obj)
    assert info.value.code == InputError.SCHEMA


def test_root_table_rejects_duplicate_pairs(tmp_path, affine_plane):
    U = LinearUpsilon(affine_plane, ((1, 0), (0, 1)))
    obj = table_to_dict(root_table(affine_plane, 2, U))
    obj["upsilon"]["pairs"].append(obj["upsilon"]["pairs"][0])
    path = write(tmp_path, obj)
    table = load_root_table(path)
    with pytest.raises(InvalidUpsilonError) as info:
        table.upsilon()
    assert info.value.stage == "table"


def test_tables_contain_no_floats(affine_space3):
    text = canonical_json(table_to_dict(root_table(affine_space3, 2, LinearUpsilon(
        affine_space3, random_unimodular(3, 1)))))
    assert "." not in text
