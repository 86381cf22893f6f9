import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moapprox.errors import CapRefusal, DomainError, ParseError
from moapprox.maxsat import (
    CnfInstance,
    alg_k_maxsat,
    brute_force_sat,
    clauses_satisfied_by,
    default_cap,
    format_assignment,
    format_mowcnf,
    fractional_gains,
    is_heuristic,
    parse_mowcnf,
    random_instance,
    satisfied_weight,
)
from moapprox.mocore import verify_approx_pareto

from oracles import covered, pareto_weights, sat_weights

seeds = st.integers(0, 10 ** 6)


def instance(seed, n=None, m=None, k=2, high=9):
    rng = random.Random(seed)
    n = rng.randint(1, 7) if n is None else n
    m = rng.randint(0, 10) if m is None else m
    return random_instance(rng, n, m, k, 0, high)


def weight_of(H, idxs):
    total = [0] * H.k
    for i in idxs:
        total = [a + b for a, b in zip(total, H.weights[i])]
    return tuple(total)


def test_instance_validation():
    with pytest.raises(DomainError):
        CnfInstance(2, [()], [(1,)])
    with pytest.raises(DomainError):
        CnfInstance(2, [(1, 1)], [(1,)])
    with pytest.raises(DomainError):
        CnfInstance(2, [(3,)], [(1,)])
    with pytest.raises(DomainError):
        CnfInstance(2, [(1,)], [(-1,)])
    with pytest.raises(DomainError):
        CnfInstance(2, [(1,)], [(1, 2)], 1)


def test_clauses_satisfied_by_examples():
    H = CnfInstance(2, [(1, -2)], [(1,)])
    assert clauses_satisfied_by(H, 1, 1) == {0}
    assert clauses_satisfied_by(H, 1, 0) == set()
    assert clauses_satisfied_by(H, 2, 0) == {0}
    assert clauses_satisfied_by(H, [1, 2], 1) == {0}
    with pytest.raises(DomainError):
        clauses_satisfied_by(H, 3, 1)


@given(seeds)
def test_clauses_satisfied_by_scan(seed):
    H = instance(seed)
    for v in range(1, H.num_vars + 1):
        for i in (0, 1):
            want = {idx for idx, c in enumerate(H.clauses) if (v if i else -v) in c}
            assert clauses_satisfied_by(H, v, i) == want


def test_satisfied_weight_examples():
    H = CnfInstance(2, [(1,), (-2,), (1, 2)], [(1, 2), (3, 4), (5, 6)])
    assert satisfied_weight(H, (1, 0)) == (9, 12)
    assert satisfied_weight(CnfInstance(3, [], [], 2), (0, 1, 0)) == (0, 0)
    with pytest.raises(DomainError):
        satisfied_weight(H, (1,))


@given(seeds, st.randoms(use_true_random=False))
def test_satisfied_weight_clause_scan(seed, rng):
    H = instance(seed)
    bits = tuple(rng.randint(0, 1) for _ in range(H.num_vars))
    want = [0] * H.k
    for clause, w in zip(H.clauses, H.weights):
        if any((l > 0 and bits[l - 1]) or (l < 0 and not bits[-l - 1]) for l in clause):
            want = [a + b for a, b in zip(want, w)]
    assert satisfied_weight(H, bits) == tuple(want)


def test_fractional_gains_even_split():
    H = CnfInstance(2, [(1, 2)], [(6,)])
    gains = fractional_gains(H, [0], [1, 2])
    assert gains[(1, 1)] == gains[(2, 1)] == (3,)
    assert gains[(1, 0)] == gains[(2, 0)] == (0,)
    assert all(v == (0,) for v in fractional_gains(H, [], [1, 2]).values())


def test_fractional_gains_construction_bug():
    H = CnfInstance(2, [(1,)], [(6,)])
    with pytest.raises(Exception):
        fractional_gains(H, [0], [2])


def test_single_unit_clause():
    H = CnfInstance(1, [(1,)], [(1, 1)])
    out = alg_k_maxsat(H)
    assert any(satisfied_weight(H, a) == (1, 1) for a in out)


def test_complementary_unit_clauses():
    H = CnfInstance(1, [(1,), (-1,)], [(2, 0), (0, 2)])
    weights = [satisfied_weight(H, a) for a in alg_k_maxsat(H)]
    assert verify_approx_pareto(weights, [(2, 0), (0, 2)], F(1, 2)).satisfied


def test_seeded_eight_variables():
    H = random_instance(random.Random(8), 8, 12, 2, 0, 9)
    weights = [satisfied_weight(H, a) for a in alg_k_maxsat(H)]
    exact = [w for _, w in brute_force_sat(H)]
    assert verify_approx_pareto(weights, exact, F(1, 2)).satisfied


def test_outputs_are_distinct_and_total():
    H = instance(3, n=5, m=8)
    out = alg_k_maxsat(H)
    assert len(out) == len(set(out))
    assert all(len(a) == 5 and set(a) <= {0, 1} for a in out)


def test_cap_zero_still_emits():
    H = instance(4, n=6, m=8)
    out = alg_k_maxsat(H, cap=0)
    assert len(out) <= 1
    assert is_heuristic(2, 0) and not is_heuristic(2, default_cap(2))
    with pytest.raises(DomainError):
        alg_k_maxsat(H, cap=-1)


def check_iteration(H, it):
    k = H.k
    full = set(range(len(H.clauses)))
    g = {b for b in full if it.g >> b & 1}
    gprime = {b for b in full if it.gprime >> b & 1}
    sat_by = {(v, i): clauses_satisfied_by(H, v, i)
              for v in range(1, H.num_vars + 1) for i in (0, 1)}
    forced = set()
    for v in it.v0:
        forced |= sat_by[(v, 0)]
    for v in it.v1:
        forced |= sat_by[(v, 1)]
    assert g == full - forced
    rest = weight_of(H, full - g)
    assert not it.v0 & it.v1 and not it.heavy0 & it.heavy1
    # heavy sets as defined, with the "not <=" comparison
    for v in range(1, H.num_vars + 1):
        if v in it.v0 | it.v1:
            continue
        for i in (0, 1):
            heavy = any(4 * k * a > b for a, b in zip(weight_of(H, g & sat_by[(v, i)]), rest))
            assert heavy == (v in (it.heavy1 if i == 0 else it.heavy0))
    vprime = set(range(1, H.num_vars + 1)) - it.v0 - it.v1 - it.heavy0 - it.heavy1
    assert set(it.vprime) == vprime
    touched = set()
    for v in vprime:
        touched |= g & (sat_by[(v, 0)] | sat_by[(v, 1)])
    dropped = set()
    for v in it.heavy0:
        dropped |= g & sat_by[(v, 0)]
    for v in it.heavy1:
        dropped |= g & sat_by[(v, 1)]
    assert gprime == touched - dropped
    # gains identity and caps
    total = [F(0)] * k
    for v in vprime:
        for i in (0, 1):
            x = it.gains[(v, i)]
            total = [a + b for a, b in zip(total, x)]
            cap = weight_of(H, g & sat_by[(v, i)])
            assert all(a <= b for a, b in zip(x, cap))
            assert all(4 * k * a <= b for a, b in zip(x, rest))
    assert tuple(total) == weight_of(H, gprime)
    # coloring inequality
    if vprime:
        for r in range(k):
            delta = max(it.gains[(v, i)][r] for v in vprime for i in (0, 1))
            chosen = sum(it.gains[(v, b)][r] for v, b in zip(it.vprime, it.choice))
            both = sum(it.gains[(v, i)][r] for v in vprime for i in (0, 1))
            assert chosen >= both / 2 - 2 * k * delta
    # assembled assignment
    a = it.assignment
    assert all(a[v - 1] == 0 for v in it.v0 | it.heavy0)
    assert all(a[v - 1] == 1 for v in it.v1 | it.heavy1)
    assert all(a[v - 1] == b for v, b in zip(it.vprime, it.choice))


@given(seeds)
def test_iteration_invariants(seed):
    H = instance(seed, n=random.Random(seed).randint(1, 5))
    trace = []
    out = alg_k_maxsat(H, trace=trace)
    assert {it.assignment for it in trace} == set(out)
    for it in trace:
        check_iteration(H, it)


@given(seeds)
def test_half_coverage_full_cap(seed):
    H = instance(seed)
    weights = [satisfied_weight(H, a) for a in alg_k_maxsat(H)]
    assert covered(weights, sat_weights(H), F(1, 2))


def test_brute_force_examples():
    H = CnfInstance(2, [], [], 2)
    out = brute_force_sat(H)
    assert len(out) == 1 and out[0][1] == (0, 0)
    H = instance(5, n=6, m=9, k=1)
    assert [w for _, w in brute_force_sat(H)] == [max(sat_weights(H))]
    with pytest.raises(CapRefusal):
        brute_force_sat(CnfInstance(17, [(1,)], [(1,)]))


def test_brute_force_snapshot():
    H = random_instance(random.Random(10), 10, 20, 2, max_len=2)
    want = {(56, 94), (59, 86), (60, 85), (61, 77), (63, 65), (64, 64)}
    assert {w for _, w in brute_force_sat(H)} == want == pareto_weights(sat_weights(H))


# --- file format -----------------------------------------------------------

def test_parse_example():
    text = "c demo\np mowcnf 3 2 2\n1 2 1 -3 0\nc mid\n0 5 2 0\n"
    H = parse_mowcnf(text)
    assert H.num_vars == 3 and H.clauses == ((1, -3), (2,))
    assert H.weights == ((1, 2), (0, 5))
    assert format_mowcnf(H) == "p mowcnf 3 2 2\n1 2 1 -3 0\n0 5 2 0\n"


@given(seeds, st.integers(1, 3))
def test_format_round_trip(seed, k):
    H = instance(seed, k=k)
    text = format_mowcnf(H)
    assert format_mowcnf(parse_mowcnf(text)) == text


@pytest.mark.parametrize("text,line", [
    ("1 1 0\n", 1),
    ("p cnf 1 1\n", 1),
    ("p mowcnf 1 1 1\np mowcnf 1 1 1\n", 2),
    ("p mowcnf 1 1 1\n1 2 0\n", 2),
    ("p mowcnf 1 1 1\n1 1\n", 2),
    ("p mowcnf 2 1 1\n1 1 1 0\n", 2),
    ("p mowcnf 2 1 1\n-1 1 0\n", 2),
    ("p mowcnf 2 1 1\n1 1 0 2 0\n", 2),
    ("p mowcnf 2 2 1\n1 1 0\n", None),
    ("c nothing\n", None),
])
def test_parse_errors(text, line):
    with pytest.raises(ParseError) as info:
        parse_mowcnf(text)
    assert info.value.line == line


def test_format_assignment():
    assert format_assignment((1, 0, 1)) == "v 1 -2 3"
