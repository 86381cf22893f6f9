"""Multiobjective maximum weighted satisfiability.

Variables are ``1 .. n``; literals are DIMACS-style signed integers. Clause
sets are handled as bitmasks over clause indices. Assignments are tuples of
bits, position ``v - 1`` holding the value of variable ``v``.
"""

from dataclasses import dataclass
from itertools import product

from gmpy2 import mpq

from .discrepancy import balanced_choice
from .errors import CapRefusal, DomainError, InternalError, ParseError
from .mocore import pareto_filter

SAT_ORACLE_CAP = 16


@dataclass(frozen=True)
class CnfInstance:
    num_vars: int
    clauses: tuple
    weights: tuple
    k: int = None

    def __post_init__(self):
        clauses = tuple(tuple(c) for c in self.clauses)
        weights = tuple(tuple(w) for w in self.weights)
        object.__setattr__(self, "clauses", clauses)
        object.__setattr__(self, "weights", weights)
        if self.k is None:
            object.__setattr__(self, "k", len(weights[0]) if weights else 0)
        if len(clauses) != len(weights):
            raise DomainError("one weight vector per clause required")
        if any(len(w) != self.k for w in weights):
            raise DomainError(f"clause weights must have {self.k} components")
        for c in clauses:
            if not c:
                raise DomainError("empty clause")
            if len(set(c)) != len(c):
                raise DomainError(f"duplicate literal in clause {c}")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise DomainError(f"literal {lit} outside 1..{self.num_vars}")
        for w in weights:
            if any(x < 0 for x in w):
                raise DomainError("clause weights must be non-negative")



def _var_masks(H):
    pos = [0] * (H.num_vars + 1)
    neg = [0] * (H.num_vars + 1)
    for idx, clause in enumerate(H.clauses):
        for lit in clause:
            if lit > 0:
                pos[lit] |= 1 << idx
            else:
                neg[-lit] |= 1 << idx
    return pos, neg


def clauses_satisfied_by(H, v, i):
    """Indices of the clauses containing literal ``v`` (i=1) or its negation (i=0).

    ``v`` may also be an iterable of variables, giving the union.
    """
    variables = [v] if isinstance(v, int) else list(v)
    out = set()
    for var in variables:
        if not 1 <= var <= H.num_vars:
            raise DomainError(f"unknown variable {var}")
        lit = var if i else -var
        out.update(idx for idx, c in enumerate(H.clauses) if lit in c)
    return out


def satisfied_weight(H, assignment):
    """Sum of the weights of the clauses ``assignment`` satisfies."""
    if len(assignment) != H.num_vars:
        raise DomainError("assignment must cover every variable")
    total = [0] * H.k
    for clause, w in zip(H.clauses, H.weights):
        if any(assignment[abs(l) - 1] == (l > 0) for l in clause):
            for r, x in enumerate(w):
                total[r] += x
    return tuple(total)


class _Weights:
    """Memoized weight of clause bitmasks."""

    def __init__(self, H):
        self.H = H
        self.k = H.k
        self._memo = {0: (0,) * H.k}

    def __call__(self, mask):
        w = self._memo.get(mask)
        if w is None:
            total = [0] * self.k
            m, idx = mask, 0
            while m:
                if m & 1:
                    for r, x in enumerate(self.H.weights[idx]):
                        total[r] += x
                m >>= 1
                idx += 1
            w = self._memo[mask] = tuple(total)
        return w


def fractional_gains(H, gprime, vprime):
    """Split each clause of ``gprime`` evenly over its literals on ``vprime``.

    ``gprime`` is an iterable of clause indices, ``vprime`` of variables.
    Returns ``{(v, i): vector}`` with exact rational entries.
    """
    vprime = set(vprime)
    k = H.k
    gains = {(v, i): [mpq(0)] * k for v in sorted(vprime) for i in (0, 1)}
    for idx in gprime:
        clause = H.clauses[idx]
        inside = [l for l in clause if abs(l) in vprime]
        if not inside:
            raise InternalError(f"clause {idx} has no literal on the remaining variables")
        share = [mpq(x, len(inside)) for x in H.weights[idx]]
        for lit in inside:
            g = gains[(abs(lit), int(lit > 0))]
            for r in range(k):
                g[r] += share[r]
    return {key: tuple(v) for key, v in gains.items()}


@dataclass(frozen=True)
class SatIteration:
    """One emitting iteration, for invariant checks."""

    v0: frozenset
    v1: frozenset
    heavy0: frozenset
    heavy1: frozenset
    vprime: tuple
    g: int
    gprime: int
    gains: dict
    choice: tuple
    assignment: tuple


def default_cap(k):
    return 4 * k * k


def is_heuristic(k, cap):
    """True when ``cap`` is below the value the ratio guarantee needs."""
    return cap < default_cap(k)


def _patterns(n, cap):
    """(V0, V1) in order: each variable unselected, in V0 or in V1, at most ``cap`` selected."""
    status = [None] * n

    def rec(v, used):
        if v == n:
            yield tuple(status)
            return
        for s in (None, 0, 1):
            if s is not None and used == cap:
                continue
            status[v] = s
            yield from rec(v + 1, used + (s is not None))
        status[v] = None

    yield from rec(0, 0)


def alg_k_maxsat(H, cap=None, trace=None):
    """Truth assignments approximating the Pareto set of ``H``.

    With ``cap = 4 k^2`` every assignment is 1/2-approximated by some output.
    Outputs are deduplicated, in order of first emission.
    """
    k = H.k
    if cap is None:
        cap = default_cap(k)
    if cap < 0:
        raise DomainError("cap must be non-negative")
    n = H.num_vars
    pos, neg = _var_masks(H)
    sat = (neg, pos)  # sat[i][v]: clauses satisfied by v = i
    full = (1 << len(H.clauses)) - 1
    weight = _Weights(H)
    outputs = {}
    choices = {}

    for status in _patterns(n, cap):
        covered = 0
        for v in range(1, n + 1):
            s = status[v - 1]
            if s is not None:
                covered |= sat[s][v]
        g = full & ~covered
        w_rest = weight(full & covered)
        heavy = ([], [])
        for v in range(1, n + 1):
            if status[v - 1] is not None:
                continue
            for i in (0, 1):
                wg = weight(g & sat[i][v])
                if any(4 * k * a > b for a, b in zip(wg, w_rest)):
                    heavy[1 - i].append(v)
        if set(heavy[0]) & set(heavy[1]):
            continue
        fixed = set(heavy[0]) | set(heavy[1])
        vprime = tuple(v for v in range(1, n + 1) if status[v - 1] is None and v not in fixed)
        touched = 0
        for v in vprime:
            touched |= g & (pos[v] | neg[v])
        drop = 0
        for i in (0, 1):
            for v in heavy[i]:
                drop |= g & sat[i][v]
        gprime = touched & ~drop

        key = (gprime, vprime)
        cached = choices.get(key)
        if cached is None:
            idxs = [b for b in range(gprime.bit_length()) if gprime >> b & 1]
            gains = fractional_gains(H, idxs, vprime)
            if vprime:
                grid = [[gains[(v, 0)], gains[(v, 1)]] for v in vprime]
                choice = balanced_choice(grid).choice
            else:
                choice = ()
            cached = choices[key] = (gains, choice)
        gains, choice = cached

        bits = [0] * n
        for v in range(1, n + 1):
            s = status[v - 1]
            if s is not None:
                bits[v - 1] = s
        for i in (0, 1):
            for v in heavy[i]:
                bits[v - 1] = i
        for v, r in zip(vprime, choice):
            bits[v - 1] = r
        assignment = tuple(bits)
        outputs.setdefault(assignment, None)
        if trace is not None:
            v0 = frozenset(v for v in range(1, n + 1) if status[v - 1] == 0)
            v1 = frozenset(v for v in range(1, n + 1) if status[v - 1] == 1)
            trace.append(SatIteration(v0, v1, frozenset(heavy[0]), frozenset(heavy[1]),
                                      vprime, g, gprime, gains, choice, assignment))
    return list(outputs)


def brute_force_sat(H, cap=SAT_ORACLE_CAP):
    """Exact Pareto set of assignments, as ``(assignment, weight)`` pairs."""
    if H.num_vars > cap:
        raise CapRefusal("assignment enumeration", H.num_vars, cap)
    items = [(bits, satisfied_weight(H, bits)) for bits in product((0, 1), repeat=H.num_vars)]
    return pareto_filter(items)


# --- mowcnf format ----------------------------------------------------------

def parse_mowcnf(text):
    header = None
    clauses, weights = [], []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        fields = line.split()
        if fields[0] == "p":
            if header is not None:
                raise ParseError("second header line", no)
            if len(fields) != 5 or fields[1] != "mowcnf":
                raise ParseError("expected 'p mowcnf <num_vars> <num_clauses> <k>'", no)
            try:
                header = tuple(int(f) for f in fields[2:])
            except ValueError:
                raise ParseError("non-integer header field", no) from None
            continue
        if header is None:
            raise ParseError("clause before header", no)
        n, _, k = header
        try:
            nums = [int(f) for f in fields]
        except ValueError:
            raise ParseError("non-integer field", no) from None
        if len(nums) < k + 2 or nums[-1] != 0:
            raise ParseError("clause line must be '<w1> ... <wk> <lit> ... <lit> 0'", no)
        w, lits = nums[:k], nums[k:-1]
        if any(x < 0 for x in w):
            raise ParseError("negative weight", no)
        if 0 in lits:
            raise ParseError("literal 0 inside clause", no)
        if any(abs(l) > n for l in lits):
            raise ParseError(f"literal outside 1..{n}", no)
        if len(set(lits)) != len(lits):
            raise ParseError("duplicate literal in clause", no)
        clauses.append(tuple(lits))
        weights.append(tuple(w))
    if header is None:
        raise ParseError("missing 'p mowcnf' header")
    if len(clauses) != header[1]:
        raise ParseError(f"header announces {header[1]} clauses, found {len(clauses)}")
    if header[2] < 1:
        raise ParseError("k must be positive")
    return CnfInstance(header[0], tuple(clauses), tuple(weights), header[2])


def format_mowcnf(H):
    lines = [f"p mowcnf {H.num_vars} {len(H.clauses)} {H.k}"]
    for clause, w in zip(H.clauses, H.weights):
        lines.append(" ".join(map(str, (*w, *clause, 0))))
    return "\n".join(lines) + "\n"


def format_assignment(bits):
    return "v " + " ".join(str(v if b else -v) for v, b in enumerate(bits, 1))


def random_instance(rng, num_vars, num_clauses, k, low=0, high=9, max_len=3):
    clauses, weights = [], []
    for _ in range(num_clauses):
        size = rng.randint(1, min(max_len, num_vars))
        vs = rng.sample(range(1, num_vars + 1), size)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
        weights.append(tuple(rng.randint(low, high) for _ in range(k)))
    return CnfInstance(num_vars, tuple(clauses), tuple(weights), k)
