import json
import math
import re

import pytest

import stabletrees as st


def test_version_string():
    assert re.fullmatch(r"\d+\.\d+\.\d+", st.__version__)


def test_grow_returns_tree_and_masses():
    res = st.grow(alpha=1.5, leaves=64, algorithm="I", seed=11)
    tree = res["tree"]
    assert tree.leaves == 64
    tree.validate()
    assert res["m1"] > 0.0
    assert res["m_final"] > res["m1"]
    assert tree.total_length < res["m_final"]
    assert res["trunc_warning"] is False


def test_grow_is_deterministic_in_seed_and_stream():
    a = st.grow(1.5, 32, "II", seed=5, stream=2)["tree"].to_json(1.5, 5)
    b = st.grow(1.5, 32, "II", seed=5, stream=2)["tree"].to_json(1.5, 5)
    c = st.grow(1.5, 32, "II", seed=5, stream=3)["tree"].to_json(1.5, 5)
    assert a == b
    assert a != c


def test_tree_round_trips_preserve_distances():
    tree = st.grow(1.7, 20, "I", seed=9)["tree"]
    want = tree.distance_matrix()

    via_json = st.Tree.from_json(tree.to_json())
    via_newick = st.Tree.from_newick(tree.to_newick())
    for other in (via_json, via_newick):
        got = other.distance_matrix()
        assert len(got) == len(want)
        for ri, rj in zip(got, want):
            assert all(abs(x - y) <= 1e-12 for x, y in zip(ri, rj))

    doc = json.loads(tree.to_json(alpha=1.7, seed=9))
    assert doc["format"] == "stabletrees-tree"
    assert doc["alpha"] == 1.7

    csv = tree.to_distance_csv()
    header = csv.splitlines()[0].split(",")
    assert header[:2] == ["node", "root"]
    assert len(header) == 1 + len(want)


def test_brownian_growth_has_no_extra_mass():
    res = st.grow(2.0, 80, "I", seed=3)
    assert math.isclose(res["tree"].total_length, res["m_final"], rel_tol=1e-9)
    census = res["tree"].degree_census()
    assert all(c == 0 for c in census[4:])


def test_ml_moment_closed_forms():
    assert abs(st.ml_moment(1 / 3, 1 / 3, 3) - 18.0) <= 1e-9
    assert abs(st.ml_moment(0.5, 0.5, 1) - math.sqrt(math.pi)) <= 1e-12
    assert abs(st.ml_moment(1 / 3, 1 / 3, 1) - 1.9783642596) <= 1e-9
    with pytest.raises(Exception):
        st.ml_moment(1.5, 0.5, 1)


def test_chain_trajectory_is_increasing():
    rows = st.chain(1.5, 40, seed=8)
    assert len(rows) == 40
    assert rows[0][0] == 1
    masses = [m for _, m in rows]
    assert all(b > a for a, b in zip(masses, masses[1:]))

    rows2 = st.chain(2.0, 10, seed=8)
    assert len(rows2) == 10 and rows2[-1][0] == 10


def test_shape_law_enumeration_matches_formula():
    enum = st.enumerate_shape_law(1.5, 4)
    form = st.shape_formula_law(1.5, 4)
    assert abs(sum(enum.values()) - 1.0) <= 1e-12
    assert set(enum) == set(form)
    assert all(abs(enum[k] - form[k]) <= 1e-10 for k in enum)

    star = st.enumerate_shape_law(1.5, 3)
    assert len(star) == 2
    assert abs(max(star.values()) - 0.75) <= 1e-12


def test_run_suite_reports():
    names = st.suite_names()
    assert names == ["shapes", "lengths", "mixture", "dirichlet", "brownian", "all"]

    reports = st.run_suite("shapes", alphas=[1.5], n=5000, seed=3)
    assert len(reports) == 10
    for r in reports:
        assert r["verdict"] in ("pass", "inconclusive")
        assert set(r) >= {"name", "kind", "stat", "pvalue", "n", "seed", "verdict"}

    with pytest.raises(ValueError):
        st.run_suite("frilled")
