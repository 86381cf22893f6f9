import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moapprox.errors import DomainError
from moapprox.mocore import (
    alpha_approximates,
    dominates,
    pareto_filter,
    ratios,
    verify_approx_pareto,
)

from oracles import pareto_weights

vectors = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6)),
                   min_size=1, max_size=40)


def test_dominates_examples():
    assert not dominates((3, 2), (3, 2))
    assert dominates((3, 2), (2, 2))
    assert not dominates((3, 1), (2, 2))
    with pytest.raises(DomainError):
        dominates((1,), (1, 2))


def test_pareto_filter_examples():
    items = [("a", (1, 2)), ("b", (2, 1)), ("c", (1, 1))]
    assert pareto_filter(items) == [("a", (1, 2)), ("b", (2, 1))]
    assert pareto_filter([("x", (5,))]) == [("x", (5,))]
    assert pareto_filter([]) == []


def test_pareto_filter_keeps_first_of_equals():
    items = [("a", (1, 1)), ("b", (2, 0)), ("c", (1, 1))]
    assert pareto_filter(items) == [("a", (1, 1)), ("b", (2, 0))]


def test_pareto_filter_against_quadratic_oracle():
    rng = random.Random(3)
    ws = [tuple(rng.randint(0, 9) for _ in range(3)) for _ in range(50)]
    got = [w for _, w in pareto_filter(list(enumerate(ws)))]
    assert len(got) == len(set(got))
    assert set(got) == pareto_weights(ws)


@given(vectors)
def test_pareto_filter_properties(ws):
    items = list(enumerate(ws))
    out = pareto_filter(items)
    front = [w for _, w in out]
    assert not any(dominates(a, b) for a in front for b in front)
    assert pareto_filter(out) == out
    for w in ws:
        assert any(f == w or dominates(f, w) for f in front)
    assert set(front) == pareto_weights(ws)


def test_alpha_approximates_examples():
    assert alpha_approximates((2, 2), (4, 4), F(1, 2))
    assert not alpha_approximates((1, 4), (4, 4), F(1, 2))
    assert alpha_approximates((3, 7), (3, 7), 1)
    with pytest.raises(DomainError):
        alpha_approximates((1,), (1, 1), 1)


@given(st.tuples(st.integers(0, 9), st.integers(0, 9)),
       st.tuples(st.integers(0, 9), st.integers(0, 9)),
       st.fractions(0, 1), st.fractions(0, 1))
def test_alpha_monotone(a, b, x, y):
    lo, hi = sorted((x, y))
    if alpha_approximates(a, b, hi):
        assert alpha_approximates(a, b, lo)
    assert alpha_approximates(a, (0, 0), hi)


def test_ratios_zero_target():
    assert ratios((3, 1), (6, 0)) == (F(1, 2), None)


def test_verify_identity_and_boundary():
    assert verify_approx_pareto([(1, 2), (2, 1)], [(1, 2), (2, 1)], 1).satisfied
    assert verify_approx_pareto([(2, 2)], [(4, 4)], F(1, 2)).satisfied


def test_verify_halved_outputs():
    rng = random.Random(5)
    ws = [tuple(2 * rng.randint(1, 9) for _ in range(2)) for _ in range(30)]
    exact = [w for _, w in pareto_filter(list(enumerate(ws)))]
    halved = [tuple(x // 2 for x in w) for w in exact]
    assert verify_approx_pareto(halved, exact, F(1, 2)).satisfied
    report = verify_approx_pareto(halved, exact, F(3, 4))
    assert not report.satisfied
    assert report.uncovered()


def test_verify_empty_exact_set():
    with pytest.raises(DomainError):
        verify_approx_pareto([(1,)], [], F(1, 2))
    assert verify_approx_pareto([], [], F(1, 2)).satisfied


def test_verify_picks_best_min_ratio():
    report = verify_approx_pareto([(10, 1), (5, 5)], [(10, 10)], F(1, 2))
    assert report.entries[0].best == (5, 5)
    assert report.entries[0].ratios == (F(1, 2), F(1, 2))


def test_report_serialization():
    report = verify_approx_pareto([(1, 3)], [(2, 3), (0, 4)], F(1, 2))
    data = json.loads(report.to_json_string())
    assert data["alpha"] == "1/2"
    assert set(data) == {"alpha", "satisfied", "entries"}
    assert data["entries"][0]["ratios"] == ["1/2", "1"]
    assert set(data["entries"][0]) == {"target", "best", "ratios"}
    assert "satisfied\ttrue" in report.to_tsv()
