"""Complete weighted graphs, cycle-cover enumeration and the edge-fixed reduction.

Vertices are ``0 .. n-1``. Directed edges are ordered pairs ``(u, v)``;
undirected edges are stored as ``(min, max)``.
"""

from dataclasses import dataclass
from fractions import Fraction

from .errors import CapRefusal, DomainError, ParseError
from .mocore import pareto_filter

DIRECTED_CAP = 9
UNDIRECTED_CAP = 10


def norm_edge(u, v, directed):
    if directed or u < v:
        return (u, v)
    return (v, u)


def complete_edges(n, directed):
    if directed:
        return [(u, v) for u in range(n) for v in range(n) if u != v]
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


@dataclass(frozen=True)
class CompleteGraph:
    """A complete graph whose edges carry vectors in N^k."""

    n: int
    directed: bool
    weights: dict

    def __post_init__(self):
        edges = complete_edges(self.n, self.directed)
        if set(self.weights) != set(edges):
            raise DomainError("weights must cover exactly the edges of the complete graph")
        dims = {len(w) for w in self.weights.values()}
        if len(dims) > 1:
            raise DomainError("edge weights have different dimensions")
        for w in self.weights.values():
            if any(x < 0 for x in w):
                raise DomainError("edge weights must be non-negative")
        object.__setattr__(self, "weights", {e: tuple(w) for e, w in self.weights.items()})

    @property
    def k(self):
        return len(next(iter(self.weights.values()))) if self.weights else 0

    def edges(self):
        return complete_edges(self.n, self.directed)

    def edge(self, u, v):
        return norm_edge(u, v, self.directed)

    def weight(self, edges):
        total = [0] * self.k
        for e in edges:
            for i, x in enumerate(self.weights[e]):
                total[i] += x
        return tuple(total)

    def with_weights(self, weights):
        return CompleteGraph(self.n, self.directed, weights)


def cycle_edges(cycle, directed):
    m = len(cycle)
    return [norm_edge(cycle[i], cycle[(i + 1) % m], directed) for i in range(m)]


def canonical_cycle(cycle, directed):
    """Rotate to start at the smallest vertex; undirected cycles also fix a direction."""
    cycle = tuple(cycle)
    i = cycle.index(min(cycle))
    cycle = cycle[i:] + cycle[:i]
    if not directed and len(cycle) > 2 and cycle[-1] < cycle[1]:
        cycle = (cycle[0],) + cycle[:0:-1]
    return cycle


@dataclass(frozen=True)
class CycleCover:
    """Vertex-disjoint cycles covering every vertex, each as a vertex sequence."""

    cycles: tuple
    directed: bool

    def __post_init__(self):
        cycles = tuple(sorted(canonical_cycle(c, self.directed) for c in self.cycles))
        object.__setattr__(self, "cycles", cycles)

    @property
    def edges(self):
        return frozenset(e for c in self.cycles for e in cycle_edges(c, self.directed))

    def edge_list(self):
        return [e for c in self.cycles for e in cycle_edges(c, self.directed)]

    def vertices(self):
        return sorted(v for c in self.cycles for v in c)

    def min_length(self):
        return min(len(c) for c in self.cycles)


def _fixed_maps(F, n, directed):
    """Per-vertex fixed neighbours; None if no cover can contain F."""
    if directed:
        out_of, into = {}, {}
        for u, v in F:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise DomainError(f"({u}, {v}) is not an edge")
            if out_of.get(u, v) != v or into.get(v, u) != u:
                return None
            out_of[u] = v
            into[v] = u
        return out_of, into
    nbrs = {}
    for u, v in F:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise DomainError(f"{{{u}, {v}}} is not an edge")
        nbrs.setdefault(u, set()).add(v)
        nbrs.setdefault(v, set()).add(u)
    if any(len(s) > 2 for s in nbrs.values()):
        return None
    return nbrs


def _check_cap(G, cap):
    if cap is None:
        cap = DIRECTED_CAP if G.directed else UNDIRECTED_CAP
    if G.n > cap:
        raise CapRefusal("cycle cover enumeration", G.n, cap)


def enumerate_cycle_covers(G, c=None, fixed=(), cap=None):
    """Yield every cycle cover of ``G`` with cycles of length >= ``c`` containing ``fixed``.

    Each cycle starts at the smallest vertex not yet covered; undirected cycles
    are traversed in the direction whose second vertex is smaller than the last.
    """
    directed = G.directed
    if c is None:
        c = 2 if directed else 3
    if c < (2 if directed else 3):
        raise DomainError(f"minimum cycle length {c} too small")
    _check_cap(G, cap)
    n = G.n
    F = {norm_edge(u, v, directed) for u, v in fixed}
    maps = _fixed_maps(F, n, directed)
    if maps is None or n == 0:
        return

    if directed:
        out_of, into = maps

        def step_ok(u, w):
            return out_of.get(u, w) == w and into.get(w, u) == u
    else:
        nbrs = maps

        def vertex_ok(v, a, b):
            return nbrs.get(v, set()) <= {a, b}

    uncovered = set(range(n))
    cycles = []

    def extend(path):
        head, last = path[0], path[-1]
        if len(path) >= c and len(path) >= (2 if directed else 3):
            if directed:
                close_ok = step_ok(last, head)
            else:
                close_ok = (path[1] < last and vertex_ok(last, path[-2], head)
                            and vertex_ok(head, path[1], last))
            if close_ok:
                cycles.append(tuple(path))
                yield from cover_rest()
                cycles.pop()
        for w in sorted(uncovered):
            if directed:
                if not step_ok(last, w):
                    continue
            elif len(path) >= 2 and not vertex_ok(last, path[-2], w):
                continue
            uncovered.discard(w)
            path.append(w)
            yield from extend(path)
            path.pop()
            uncovered.add(w)

    def cover_rest():
        if not uncovered:
            yield CycleCover(tuple(cycles), directed)
            return
        head = min(uncovered)
        uncovered.discard(head)
        yield from extend([head])
        uncovered.add(head)

    yield from cover_rest()


def pareto_cycle_covers(G, c=None, fixed=(), cap=None):
    """Exact Pareto set of covers (one per weight vector), as ``(cover, weight)`` pairs."""
    items = [(cov, G.weight(cov.edge_list())) for cov in enumerate_cycle_covers(G, c, fixed, cap)]
    return pareto_filter(items)


def exact_solver(G, epsilon=None, cap=None):
    """Exact Pareto solver for the unconstrained cycle cover problem.

    Usable as the base solver of :func:`edge_fixed_reduction`; ``epsilon``
    is accepted for interface compatibility and ignored.
    """
    return [cov for cov, _ in pareto_cycle_covers(G, None, (), cap)]


def reduction_epsilon(epsilon, r):
    return min(Fraction(epsilon), Fraction(1, r + 1))


def edge_fixed_reduction(G, F, epsilon, base_solver=exact_solver):
    """Covers approximating the Pareto set of covers that contain ``F``.

    Adds an objective counting the edges of ``F``, runs ``base_solver`` at
    accuracy ``min(epsilon, 1/(|F|+1))`` and keeps the covers that contain
    all of ``F``.
    """
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    F = {norm_edge(u, v, G.directed) for u, v in F}
    for e in F:
        if e not in G.weights:
            raise DomainError(f"{e} is not an edge of the graph")
    r = len(F)
    extended = G.with_weights({e: w + (1 if e in F else 0,) for e, w in G.weights.items()})
    covers = base_solver(extended, reduction_epsilon(epsilon, r))
    return [cov for cov in covers if extended.weight(cov.edge_list())[-1] == r]


# --- graph file format ---------------------------------------------------

def format_graph(G):
    lines = [f"graph {'directed' if G.directed else 'undirected'} n={G.n} k={G.k}"]
    for e in G.edges():
        lines.append(" ".join(map(str, (*e, *G.weights[e]))))
    return "\n".join(lines) + "\n"


def parse_graph(text):
    lines = [(no, line.strip()) for no, line in enumerate(text.splitlines(), 1) if line.strip()]
    if not lines:
        raise ParseError("empty graph file")
    no, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "graph" or parts[1] not in ("directed", "undirected"):
        raise ParseError("expected 'graph <directed|undirected> n=<int> k=<int>'", no)
    try:
        if not (parts[2].startswith("n=") and parts[3].startswith("k=")):
            raise ValueError
        n, k = int(parts[2][2:]), int(parts[3][2:])
    except ValueError:
        raise ParseError("bad n= or k= field", no) from None
    directed = parts[1] == "directed"
    weights = {}
    for no, line in lines[1:]:
        fields = line.split()
        if len(fields) != 2 + k:
            raise ParseError(f"expected {2 + k} fields, got {len(fields)}", no)
        try:
            u, v, *w = (int(f) for f in fields)
        except ValueError:
            raise ParseError("non-integer field", no) from None
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ParseError(f"invalid edge {u} {v}", no)
        if not directed and u > v:
            raise ParseError("undirected edges must be listed with u < v", no)
        if any(x < 0 for x in w):
            raise ParseError("negative weight", no)
        if (u, v) in weights:
            raise ParseError(f"duplicate edge {u} {v}", no)
        weights[(u, v)] = tuple(w)
    missing = set(complete_edges(n, directed)) - set(weights)
    if missing:
        raise ParseError(f"{len(missing)} edges missing, e.g. {min(missing)}")
    return CompleteGraph(n, directed, weights)


def random_graph(rng, n, k, directed, low=0, high=20):
    return CompleteGraph(n, directed, {e: tuple(rng.randint(low, high) for _ in range(k))
                                       for e in complete_edges(n, directed)})
