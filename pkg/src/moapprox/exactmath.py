"""Exact rational linear algebra.

Rationals are ``gmpy2.mpq`` values, which compare and hash equal to
:class:`fractions.Fraction`. Matrices are sequences of rows and vectors are
sequences. Nothing in here touches floating point.
"""

from fractions import Fraction

from gmpy2 import mpq

from .errors import DomainError

Rational = mpq
ZERO = mpq(0)
ONE = mpq(1)


def rational(x):
    """Parse ints, Fractions, mpq values and strings like ``"-3/4"``."""
    if isinstance(x, str):
        try:
            return mpq(Fraction(x.strip()))
        except ValueError:
            raise DomainError(f"not a rational number: {x!r}") from None
    if isinstance(x, float):
        raise DomainError("floats are not accepted as exact rationals")
    return mpq(x)


def as_vector(values):
    return [rational(v) for v in values]


def as_matrix(rows, ncols=None):
    """Convert ``rows`` to lists of rationals, checking the matrix is rectangular."""
    out = [as_vector(r) for r in rows]
    if ncols is None and out:
        ncols = len(out[0])
    for r in out:
        if len(r) != ncols:
            raise DomainError("ragged matrix")
    return out


def norm_one(A):
    """Maximum column sum of absolute values."""
    if not A or not A[0]:
        raise DomainError("norm_one of an empty matrix")
    ncols = len(A[0])
    return max(sum((abs(rational(row[j])) for row in A), ZERO) for j in range(ncols))


def norm_inf(x):
    if not len(x):
        raise DomainError("norm_inf of an empty vector")
    return max(abs(rational(v)) for v in x)


def matvec(A, x):
    return [sum((a * v for a, v in zip(row, x) if a), ZERO) for row in A]


def residual(A, x, b):
    return [ax - bi for ax, bi in zip(matvec(A, x), b)]


def _check_system(A, b, ncols):
    if len(A) != len(b):
        raise DomainError(f"matrix has {len(A)} rows but right-hand side has {len(b)}")
    if ncols is None:
        if not A:
            raise DomainError("ncols required for a system with no equations")
        ncols = len(A[0])
    for row in A:
        if len(row) != ncols:
            raise DomainError("ragged matrix")
    return ncols


def solve_linear(A, b, ncols=None):
    """Return one exact solution of ``A x = b`` or None if inconsistent.

    Gauss-Jordan elimination, pivoting on the first nonzero entry of each
    column. Free variables are set to zero.
    """
    n = _check_system(A, b, ncols)
    rows = [[mpq(a) for a in row] + [mpq(bi)] for row, bi in zip(A, b)]
    pivots = []
    r = 0
    for col in range(n):
        if r == len(rows):
            break
        for i in range(r, len(rows)):
            if rows[i][col]:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        prow = rows[r]
        inv = 1 / prow[col]
        for j in range(col, n + 1):
            prow[j] *= inv
        for i, row in enumerate(rows):
            f = row[col]
            if i != r and f:
                for j in range(col, n + 1):
                    if prow[j]:
                        row[j] -= f * prow[j]
        pivots.append(col)
        r += 1
    for row in rows[r:]:
        if row[n]:
            return None
    x = [ZERO] * n
    for i, col in enumerate(pivots):
        x[col] = rows[i][n]
    return x


def second_solution(A, b, known, pivot_hint=0):
    """Return a solution of ``A x = b`` different from ``known``, or None.

    Appends ``x[j] = 2`` for ``j = pivot_hint, pivot_hint + 1, ...`` (wrapping
    around) until the augmented system is consistent. If ``known[j]`` is
    already 2 the appended value is 3 instead, so any solution found differs
    from ``known``. None means the solution is unique.
    """
    n = len(known)
    _check_system(A, b, n)
    if n == 0:
        return None
    if not 0 <= pivot_hint < n:
        raise DomainError(f"pivot_hint {pivot_hint} out of range for {n} variables")
    for step in range(n):
        j = (pivot_hint + step) % n
        target = mpq(3) if known[j] == 2 else mpq(2)
        unit = [ZERO] * n
        unit[j] = ONE
        x = solve_linear(list(A) + [unit], list(b) + [target], ncols=n)
        if x is not None:
            return x
    return None
