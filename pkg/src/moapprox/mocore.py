"""Dominance, Pareto filtering and alpha-approximation checks on weight vectors."""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError


def _same_dim(a, b):
    if len(a) != len(b):
        raise DomainError(f"dimension mismatch: {len(a)} vs {len(b)}")


def dominates(a, b):
    """True iff ``a >= b`` componentwise and ``a != b``."""
    _same_dim(a, b)
    return all(x >= y for x, y in zip(a, b)) and tuple(a) != tuple(b)


def pareto_filter(items):
    """Keep the ``(id, weight)`` items whose weight no other item dominates.

    Of several items with equal weight only the first is kept. Output
    preserves input order.
    """
    items = list(items)
    if not items:
        return []
    dim = len(items[0][1])
    for _, w in items:
        if len(w) != dim:
            raise DomainError("items have inhomogeneous dimensions")
    # In lexicographically decreasing order nothing can dominate an earlier
    # item, so each one only needs checking against the front built so far.
    order = sorted(range(len(items)), key=lambda t: tuple(-x for x in items[t][1]))
    front = []
    keep = []
    for t in order:
        w = tuple(items[t][1])
        if any(all(x >= y for x, y in zip(f, w)) for f in front):
            continue
        front.append(w)
        keep.append(t)
    keep.sort()
    return [items[t] for t in keep]


def alpha_approximates(candidate, target, alpha):
    """``candidate_i >= alpha * target_i`` for every objective, exactly."""
    _same_dim(candidate, target)
    alpha = Fraction(alpha)
    return all(Fraction(x) >= alpha * y for x, y in zip(candidate, target))


def ratios(candidate, target):
    """Per-objective ``candidate_i / target_i``; None where the target is 0."""
    return tuple(Fraction(x, 1) / y if y else None for x, y in zip(candidate, target))


def _coverage(candidate, target):
    # Largest alpha at which candidate covers target; None means any alpha.
    rs = [r for r in ratios(candidate, target) if r is not None]
    return min(rs) if rs else None


def format_rational(q):
    if q is None:
        return "-"
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class ReportEntry:
    target: tuple
    best: tuple
    ratios: tuple
    covered: bool


@dataclass
class ParetoReport:
    alpha: Fraction
    entries: list = field(default_factory=list)
    satisfied: bool = True

    def uncovered(self):
        return [e for e in self.entries if not e.covered]

    def to_json(self):
        return {
            "alpha": format_rational(self.alpha),
            "satisfied": self.satisfied,
            "entries": [
                {
                    "target": list(e.target),
                    "best": None if e.best is None else list(e.best),
                    "ratios": [format_rational(r) for r in e.ratios],
                }
                for e in self.entries
            ],
        }

    def to_json_string(self):
        return json.dumps(self.to_json(), indent=2)

    def to_tsv(self):
        lines = [f"alpha\t{format_rational(self.alpha)}",
                 f"satisfied\t{str(self.satisfied).lower()}"]
        lines.append("target\tbest\tratios\tcovered")
        for e in self.entries:
            best = "-" if e.best is None else " ".join(map(str, e.best))
            lines.append("\t".join([
                " ".join(map(str, e.target)),
                best,
                " ".join(format_rational(r) for r in e.ratios),
                "yes" if e.covered else "no",
            ]))
        return "\n".join(lines)


def verify_approx_pareto(outputs, exact_pareto, alpha):
    """Check that every exact Pareto point is alpha-covered by some output.

    For each target, the reported ``best`` output is the one with the largest
    worst-case ratio over the objectives (first one on ties).
    """
    outputs = [tuple(o) for o in outputs]
    exact_pareto = [tuple(t) for t in exact_pareto]
    alpha = Fraction(alpha)
    if not exact_pareto:
        if outputs:
            raise DomainError("empty exact Pareto set for a nonempty solution space")
        return ParetoReport(alpha, [], True)
    dim = len(exact_pareto[0])
    for w in outputs + exact_pareto:
        if len(w) != dim:
            raise DomainError("inhomogeneous dimensions")
    entries = []
    for target in exact_pareto:
        best, best_cov = None, None
        for cand in outputs:
            cov = _coverage(cand, target)
            if best is None or (best_cov is not None and (cov is None or cov > best_cov)):
                best, best_cov = cand, cov
        if best is None:
            entries.append(ReportEntry(target, None, (None,) * dim, False))
            continue
        entries.append(ReportEntry(target, best, ratios(best, target),
                                   alpha_approximates(best, target, alpha)))
    return ParetoReport(alpha, entries, all(e.covered for e in entries))
