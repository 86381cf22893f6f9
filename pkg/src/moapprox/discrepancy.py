"""Multi-color Beck-Fiala rounding and balanced selection of vectors.

Colorings are flat vectors of length ``c * n``: block ``b`` (0-based) owns
coordinates ``c*b .. c*b + c - 1``, one per color. Colors are 0-based.
"""

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import DomainError, InternalError
from .exactmath import ONE, ZERO, as_matrix, matvec, norm_one, rational, second_solution


@dataclass(frozen=True)
class FractionalColoring:
    c: int
    n: int
    values: tuple

    def __post_init__(self):
        if self.c < 2 or self.n < 1:
            raise DomainError(f"need c >= 2 and n >= 1, got c={self.c}, n={self.n}")
        values = tuple(rational(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != self.c * self.n:
            raise DomainError(f"expected {self.c * self.n} values, got {len(values)}")
        for v in values:
            if not ZERO <= v <= ONE:
                raise DomainError(f"value {v} outside [0, 1]")
        for b in range(self.n):
            if sum(self.block(b)) != 1:
                raise DomainError(f"block {b} does not sum to 1")

    @classmethod
    def uniform(cls, c, n):
        return cls(c, n, (mpq(1, c),) * (c * n))

    def block(self, b):
        return self.values[self.c * b:self.c * (b + 1)]

    def floating(self):
        return tuple(j for j, v in enumerate(self.values) if v != 0 and v != 1)

    def is_integral(self):
        return not self.floating()


@dataclass(frozen=True)
class MultiColoring:
    c: int
    choice: tuple

    @property
    def n(self):
        return len(self.choice)

    def as_vector(self):
        out = [ZERO] * (self.c * self.n)
        for b, color in enumerate(self.choice):
            out[self.c * b + color] = ONE
        return out

    @classmethod
    def from_vector(cls, c, values):
        n = len(values) // c
        choice = []
        for b in range(n):
            block = values[c * b:c * (b + 1)]
            if sorted(block) != [0] * (c - 1) + [1]:
                raise DomainError(f"block {b} is not integral: {block}")
            choice.append(list(block).index(1))
        return cls(c, tuple(choice))


@dataclass(frozen=True)
class RoundingState:
    chi: FractionalColoring
    floating: tuple
    active: tuple
    delta: object


def _active_rows(A, floating, delta):
    bound = 2 * delta
    return tuple(i for i, row in enumerate(A)
                 if sum(abs(row[j]) for j in floating) > bound)


def make_state(A, chi, delta):
    floating = chi.floating()
    return RoundingState(chi, floating, _active_rows(A, floating, delta), delta)


def _check_shape(A, p):
    ncols = p.c * p.n
    for row in A:
        if len(row) != ncols:
            raise DomainError(f"matrix has {len(row)} columns, coloring has {ncols}")


def choose_lambda(chi, x_extended, floating):
    """Step length along ``chi -> x_extended`` that fixes a floating coordinate.

    Of all steps that send some floating coordinate to exactly 0 or 1 and keep
    every coordinate inside [0, 1], returns the one of smallest magnitude,
    preferring the positive one on ties.
    """
    values = chi.values if isinstance(chi, FractionalColoring) else tuple(chi)
    # The feasible steps form an interval [lo, hi]; its ends are the only
    # boundary hits that stay inside the polytope.
    lo = hi = None
    for j in floating:
        d = x_extended[j] - values[j]
        if not d:
            continue
        a, b = -values[j] / d, (ONE - values[j]) / d
        if d < 0:
            a, b = b, a
        lo = a if lo is None or a > lo else lo
        hi = b if hi is None or b < hi else hi
    if lo is None:
        raise InternalError("x_extended equals chi on the floating columns")
    if hi > 0 and (lo >= 0 or hi <= -lo):
        return hi
    if lo < 0:
        return lo
    raise InternalError("no step keeps the coloring inside the polytope")


def _build_system(A, p, chi, floating, active):
    """Equations over the floating columns: active rows, then touched blocks."""
    c = chi.c
    pos = {j: t for t, j in enumerate(floating)}
    rows, rhs = [], []
    for i in active:
        row = A[i]
        rows.append([row[j] for j in floating])
        rhs.append(sum((a * (pv if j in pos else pv - v)
                        for j, (a, pv, v) in enumerate(zip(row, p.values, chi.values)) if a),
                       ZERO))
    blocks = sorted({j // c for j in floating})
    for b in blocks:
        eq = [ZERO] * len(floating)
        fixed = ZERO
        for j in range(c * b, c * (b + 1)):
            if j in pos:
                eq[pos[j]] = ONE
            else:
                fixed += chi.values[j]
        rows.append(eq)
        rhs.append(ONE - fixed)
    return rows, rhs, blocks


def advance(state, A, p):
    """One rounding step; the returned state has strictly fewer floating columns."""
    chi, floating, active = state.chi, state.floating, state.active
    if not floating:
        raise InternalError("advance called on an integral coloring")
    rows, rhs, blocks = _build_system(A, p, chi, floating, active)
    if not 2 * len(active) < len(floating):
        raise InternalError(f"|I|={len(active)} not below |J|/2 with |J|={len(floating)}")
    if not 2 * len(blocks) <= len(floating):
        raise InternalError(f"|B|={len(blocks)} exceeds |J|/2 with |J|={len(floating)}")
    known = [chi.values[j] for j in floating]
    x = second_solution(rows, rhs, known, 0)
    if x is None:
        raise InternalError("rounding system has a unique solution")
    x_ext = list(chi.values)
    for t, j in enumerate(floating):
        x_ext[j] = x[t]
    lam = choose_lambda(chi, x_ext, floating)
    values = tuple((1 - lam) * v + lam * xe for v, xe in zip(chi.values, x_ext))
    new_chi = FractionalColoring(chi.c, chi.n, values)
    new_state = make_state(A, new_chi, state.delta)
    if not set(new_state.floating) < set(floating):
        raise InternalError("floating set did not shrink")
    dev = matvec([A[i] for i in active], [pv - v for pv, v in zip(p.values, values)])
    if any(dev):
        raise InternalError("active rows lost their exact balance")
    return new_state


def beck_fiala_round(A, p, trace=None):
    """Round ``p`` to a coloring ``chi`` with ``|A (p - chi)|_inf <= 2 |A|_1``.

    ``A`` is a sequence of rational rows with ``p.c * p.n`` columns. If
    ``trace`` is a list, every intermediate :class:`RoundingState` is
    appended to it, starting with the initial one.
    """
    _check_shape(A, p)
    A = as_matrix(A, p.c * p.n)
    delta = norm_one(A) if A else ZERO
    state = make_state(A, p, delta)
    if trace is not None:
        trace.append(state)
    for _ in range(p.c * p.n):
        if not state.floating:
            break
        state = advance(state, A, p)
        if trace is not None:
            trace.append(state)
    if state.floating:
        raise InternalError("rounding did not terminate within c*n steps")
    return MultiColoring.from_vector(p.c, state.chi.values)


def deviation(A, p, coloring):
    """``A (p - chi)`` as exact rationals."""
    chi = coloring.as_vector()
    return matvec(A, [pv - v for pv, v in zip(p.values, chi)])


def choice_deviation(vectors, choice):
    """Per row, ``(1/c) * sum of all vectors - sum of the chosen ones``."""
    c = len(vectors[0])
    m = len(vectors[0][0])
    out = []
    for i in range(m):
        total = sum((rational(v[i]) for group in vectors for v in group), ZERO)
        chosen = sum((rational(group[r][i]) for group, r in zip(vectors, choice)), ZERO)
        out.append(total / c - chosen)
    return out


def choice_bounds(vectors):
    """Per row, ``2 m max_{j,r} |v_i|``."""
    m = len(vectors[0][0])
    return [2 * m * max(abs(rational(v[i])) for group in vectors for v in group)
            for i in range(m)]


def balanced_choice(vectors):
    """Pick one vector per group so every row stays near its average.

    ``vectors[j][r]`` is the ``r``-th candidate of group ``j``. The result
    satisfies ``|choice_deviation| <= choice_bounds`` row by row.
    """
    if not vectors:
        raise DomainError("no groups to choose from")
    c = len(vectors[0])
    if c < 1 or any(len(group) != c for group in vectors):
        raise DomainError("every group needs the same positive number of candidates")
    m = len(vectors[0][0])
    if any(len(v) != m for group in vectors for v in group):
        raise DomainError("vectors have inhomogeneous dimensions")
    n = len(vectors)
    if c == 1:
        return MultiColoring(1, (0,) * n)
    A = []
    for i in range(m):
        scale = max(abs(rational(v[i])) for group in vectors for v in group)
        if scale == 0:
            A.append([ZERO] * (c * n))
        else:
            A.append([rational(v[i]) / scale for group in vectors for v in group])
    return beck_fiala_round(A, FractionalColoring.uniform(c, n))
