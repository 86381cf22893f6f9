"""Multiobjective maximum TSP through cycle covers and balanced edge removal."""

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from math import comb

import numpy as np

from .cyclecover import (
    DIRECTED_CAP,
    CycleCover,
    canonical_cycle,
    cycle_edges,
    enumerate_cycle_covers,
    norm_edge,
    pareto_cycle_covers,
)
from .discrepancy import balanced_choice
from .errors import CapRefusal, DomainError
from .mocore import pareto_filter


@dataclass(frozen=True)
class Tour:
    """A Hamiltonian cycle, stored as a vertex order starting at vertex 0."""

    order: tuple
    directed: bool

    def __post_init__(self):
        object.__setattr__(self, "order", canonical_cycle(self.order, self.directed))

    def edges(self):
        return cycle_edges(self.order, self.directed)

    def is_hamiltonian(self, n):
        return sorted(self.order) == list(range(n))


@dataclass(frozen=True)
class TspConfig:
    """Parameters of the TSP algorithm.

    ``solver``, when given, is called as ``solver(graph, c, fixed, epsilon)``
    and must return cycle covers containing ``fixed``. None selects the
    built-in exact Pareto oracle.
    """

    c: int
    cap_fh: int
    cap_fl: int
    t: int
    solver: object = None
    epsilon: Fraction = None
    enum_cap: int = None

    @classmethod
    def paper(cls, k, directed, c=None, **kw):
        c = c or (2 if directed else 3)
        return cls(c, 3 * c * k * k, 3 * c * c * k * k, 3 * c * k, **kw)

    @classmethod
    def desk(cls, k, directed, cap_fh, cap_fl, c=None, **kw):
        c = c or (2 if directed else 3)
        return cls(c, cap_fh, cap_fl, 3 * c * k, **kw)

    def heuristic(self, k):
        """True when the caps fall below the values the ratio guarantee needs."""
        return (self.cap_fh < 3 * self.c * k * k or self.cap_fl < self.c * self.cap_fh
                or self.t != 3 * self.c * k)


@dataclass(frozen=True)
class IterationRecord:
    """What one emitting inner iteration did, for invariant checks."""

    heavy: tuple
    light: tuple
    delta: tuple
    cover: CycleCover
    paths: tuple
    path_weights: tuple
    choice: tuple
    removed: tuple
    tour: Tour


def compute_delta(heavy, weights, t):
    """Per objective, the ``t``-th largest weight among ``heavy``.

    None stands for "unbounded" when fewer than ``t`` heavy edges exist.
    """
    heavy = list(heavy)
    if len(heavy) < t or t < 1:
        return None
    k = len(next(iter(weights.values())))
    return tuple(sorted((weights[e][i] for e in heavy), reverse=True)[t - 1] for i in range(k))


def truncate_weights(weights, heavy, delta):
    """Zero every non-heavy edge whose weight is not below ``delta``; returns a new dict."""
    if delta is None:
        return dict(weights)
    heavy = set(heavy)
    zero = (0,) * len(delta)
    return {e: w if e in heavy or all(x <= d for x, d in zip(w, delta)) else zero
            for e, w in weights.items()}


def select_paths(cover, heavy, c):
    """For each cycle the first window of ``c`` consecutive edges avoiding ``heavy``.

    Windows are scanned from the cycle's canonical start. Returns None when
    some cycle has no such window.
    """
    heavy = set(heavy)
    paths = []
    for cyc in cover.cycles:
        edges = cycle_edges(cyc, cover.directed)
        L = len(edges)
        if L < c:
            return None
        if heavy.isdisjoint(edges):
            paths.append(tuple(edges[t % L] for t in range(c)))
            continue
        for s in range(L):
            window = [edges[(s + t) % L] for t in range(c)]
            if heavy.isdisjoint(window):
                paths.append(tuple(window))
                break
        else:
            return None
    return tuple(paths)


def remove_and_reconnect(cover, removed):
    """Drop one edge per cycle and chain the resulting paths into a tour.

    Paths are ordered by their smallest vertex; each path's end is joined to
    the next path's start.
    """
    directed = cover.directed
    removed = [norm_edge(*e, directed) for e in removed]
    if len(removed) != len(cover.cycles):
        raise DomainError(f"need one removed edge per cycle, got {len(removed)} for "
                          f"{len(cover.cycles)} cycles")
    paths = []
    used = set()
    for cyc in cover.cycles:
        edges = cycle_edges(cyc, directed)
        hits = [i for i, e in enumerate(edges) if e in removed]
        if len(hits) != 1:
            raise DomainError(f"cycle {cyc} must lose exactly one edge")
        i = hits[0]
        used.add(edges[i])
        paths.append(cyc[i + 1:] + cyc[:i + 1])
    if len(used) != len(removed):
        raise DomainError("removed edges do not match the cycles")
    paths.sort(key=min)
    return Tour(tuple(v for p in paths for v in p), directed)


def _check_instance(G, config):
    if G.n <= config.c:
        raise DomainError(f"need n > c, got n={G.n}, c={config.c}")


class _Emitter:
    """Turns (heavy set, cover) pairs into tours, memoizing the coloring step."""

    def __init__(self, G, c, trace):
        self.G, self.c, self.trace = G, c, trace
        self.tours = {}
        self._choices = {}
        self._done = {}

    def emit(self, heavy, light, delta, weights, cover, key=None):
        paths = select_paths(cover, heavy, self.c)
        if paths is None:
            return
        choice, removed, tour = self._solve(cover, key, paths, weights)
        self.tours.setdefault(tour, None)
        if self.trace is not None:
            grid = tuple(tuple(weights[e] for e in p) for p in paths)
            self.trace.append(IterationRecord(tuple(heavy), light, delta, cover, paths,
                                              grid, choice, removed, tour))

    def emit_plain(self, cover, key):
        """Emit with untouched weights and windows that meet no heavy edge.

        The result then depends on the cover alone.
        """
        self.emit((), None, None, self.G.weights, cover, key)

    def _solve(self, cover, key, paths, weights):
        grid = tuple(tuple(weights[e] for e in p) for p in paths)
        memo_key = (cover if key is None else key, paths, grid)
        hit = self._done.get(memo_key)
        if hit is None:
            choice = self._choices.get(grid)
            if choice is None:
                choice = balanced_choice(grid).choice
                self._choices[grid] = choice
            removed = tuple(p[r] for p, r in zip(paths, choice))
            hit = self._done[memo_key] = (choice, removed, remove_and_reconnect(cover, removed))
        return hit


def _literal_run(G, config, emitter):
    # Every (F_H, F_L) pair in turn, with the solver on the truncated graph.
    edges = G.edges()
    eps = config.epsilon if config.epsilon is not None else Fraction(1, G.n)
    for h in range(config.cap_fh + 1):
        for heavy in combinations(edges, h):
            delta = compute_delta(heavy, G.weights, config.t)
            weights = truncate_weights(G.weights, heavy, delta)
            Gt = G.with_weights(weights)
            for l in range(min(config.cap_fl, config.c * h) + 1):
                for light in combinations(edges, l):
                    fixed = set(heavy) | set(light)
                    for cover in config.solver(Gt, config.c, fixed, eps):
                        emitter.emit(heavy, light, delta, weights, cover)


def _weight_array(rows):
    arr = np.array(rows, dtype=object)
    if arr.size and max(int(x) for x in arr.flat) < 2 ** 40:
        return arr.astype(np.int64)
    return arr


def _beaten_by(totals, block):
    """Column ``t`` marks the rows ``u`` that dominate ``t``, or tie and come earlier."""
    ge = np.ones((len(totals), len(block)), dtype=bool)
    eq = ge.copy()
    for i in range(totals.shape[1]):
        col, sub = totals[:, i][:, None], totals[block, i][None, :]
        ge &= col >= sub
        eq &= col == sub
    earlier = np.arange(len(totals))[:, None] < block[None, :]
    return ge & (~eq | earlier)


def _subset_masks(free, size):
    return np.array([sum(1 << b for b in light) for light in combinations(range(free), size)],
                    dtype=np.int64)


def _survivors(totals, incidence, size, free, chunk=512):
    """Members that are Pareto representatives for some light set of ``size`` edges.

    A light set ``X`` inside member ``t`` knocks ``t`` out exactly when some
    member beating ``t`` also contains ``X``. A beating member sharing ``o``
    light edges with ``t`` can knock out at most ``C(o, size)`` of the
    ``C(free, size)`` candidate sets, which settles most members without
    looking at the sets themselves. The rest are checked set by set, with
    edges renumbered by their position among the light edges of ``t``.
    """
    binom = np.array([comb(o, size) for o in range(free + 1)], dtype=np.int64)
    candidates = _subset_masks(free, size)[:, None]
    powers = (1 << np.arange(free)).astype(np.float64)
    out = []
    for lo in range(0, len(totals), chunk):
        block = np.arange(lo, min(lo + chunk, len(totals)))
        beats = _beaten_by(totals, block)
        shared = (incidence @ incidence[block].T).astype(np.int64)
        reach = np.where(beats, binom[shared], 0).sum(axis=0)
        for col in np.flatnonzero(reach >= binom[free]):
            t = block[col]
            us = np.flatnonzero(beats[:, col] & (shared[:, col] >= size))
            light_cols = np.flatnonzero(incidence[t])
            local = (incidence[np.ix_(us, light_cols)] @ powers).astype(np.int64)
            blocked = ((candidates & local[None, :]) == candidates).any(axis=1)
            if not blocked.all():
                reach[col] = 0
        out.extend(int(t) for t in block[reach < binom[free]])
    return out


def _grouped_run(G, config, emitter):
    # Same output as the literal loop with the exact Pareto solver. A cover S
    # is emitted for F_H iff it is a Pareto representative among the covers
    # containing F_H | F_L for some F_L inside S; growing F_L inside S only
    # removes competitors, so it suffices to try F_L of the largest size.
    c = config.c
    edges = G.edges()
    eindex = {e: i for i, e in enumerate(edges)}
    covers = list(enumerate_cycle_covers(G, c, (), config.enum_cap))
    if not covers:
        return
    rows = [tuple(sorted(eindex[e] for e in cov.edge_list())) for cov in covers]
    cover_edges = np.array(rows)
    # float32 products of 0/1 rows are exact and go through BLAS
    full_incidence = np.zeros((len(rows), len(edges)), dtype=np.float32)
    full_incidence[np.arange(len(rows))[:, None], cover_edges] = 1
    windows = np.zeros((len(rows), len(edges)), dtype=bool)
    for pos, cov in enumerate(covers):
        for path in select_paths(cov, (), c) or ():
            windows[pos, [eindex[e] for e in path]] = True
    plain_done = np.zeros(len(rows), dtype=bool)
    base = _weight_array([G.weights[e] for e in edges])

    groups = {}
    for pos, row in enumerate(rows):
        for h in range(min(config.cap_fh, len(row)) + 1):
            for heavy in combinations(row, h):
                groups.setdefault(heavy, []).append(pos)

    for heavy_idx in sorted(groups, key=lambda s: (len(s), s)):
        members = groups[heavy_idx]
        heavy = tuple(edges[i] for i in heavy_idx)
        delta = compute_delta(heavy, G.weights, config.t)
        weights = truncate_weights(G.weights, heavy, delta)
        wt = base if delta is None else _weight_array([weights[e] for e in edges])
        totals = wt[cover_edges[members]].sum(axis=1)
        free = G.n - len(heavy_idx)
        size = min(config.cap_fl, c * len(heavy_idx), free)
        if size == free:
            chosen = range(len(members))
        elif size == 0:
            chosen = [t for t, _ in pareto_filter([(t, tuple(w)) for t, w in enumerate(totals)])]
        else:
            incidence = full_incidence[members]
            incidence[:, list(heavy_idx)] = 0
            chosen = _survivors(totals, incidence, size, free)
        chosen = np.asarray(chosen, dtype=np.int64)
        if delta is None and emitter.trace is None:
            # the first windows of a cover avoid the heavy edges: then
            # select_paths picks them and the tour is the cover's plain one
            pos = np.asarray(members)[chosen]
            clear = ~windows[np.ix_(pos, list(heavy_idx))].any(axis=1)
            fresh = np.unique(pos[clear & ~plain_done[pos]])
            plain_done[fresh] = True
            for p in fresh:
                emitter.emit_plain(covers[p], int(p))
            chosen = chosen[~clear]
        for t in chosen:
            pos = members[t]
            emitter.emit(heavy, None, delta, weights, covers[pos], pos)


def alg_k_maxtsp(G, config, trace=None):
    """Hamiltonian cycles approximating the Pareto set of ``G``.

    With caps at the values of :meth:`TspConfig.paper` the output
    ``(1 - 1/c)``-approximates every tour. Smaller caps still give valid tours
    but no certified ratio. ``trace``, if a list, collects one
    :class:`IterationRecord` per emitted tour.
    """
    _check_instance(G, config)
    emitter = _Emitter(G, config.c, trace)
    if config.solver is None:
        _grouped_run(G, config, emitter)
    else:
        _literal_run(G, config, emitter)
    return list(emitter.tours)


def exact_fixed_solver(cap=None):
    """Solver for :class:`TspConfig` backed by exact Pareto enumeration."""
    def solve(G, c, fixed, epsilon):
        return [cov for cov, _ in pareto_cycle_covers(G, c, fixed, cap)]
    return solve


def reduction_fixed_solver(base_solver):
    """Solver for :class:`TspConfig` that goes through the edge-fixed reduction.

    Only meaningful for the smallest cycle length (2 directed, 3 undirected),
    where every cycle cover qualifies.
    """
    from .cyclecover import edge_fixed_reduction

    def solve(G, c, fixed, epsilon):
        if c != (2 if G.directed else 3):
            raise DomainError("the reduction only handles unrestricted cycle covers")
        return edge_fixed_reduction(G, fixed, epsilon, base_solver)
    return solve


def brute_force_tsp(G, cap=DIRECTED_CAP):
    """Exact Pareto set of Hamiltonian cycles, as ``(tour, weight)`` pairs."""
    if G.n > cap:
        raise CapRefusal("Hamiltonian cycle enumeration", G.n, cap)
    if G.n < (2 if G.directed else 3):
        raise DomainError("graph too small to have a Hamiltonian cycle")
    items = []
    for rest in permutations(range(1, G.n)):
        if not G.directed and len(rest) > 1 and rest[0] > rest[-1]:
            continue
        tour = Tour((0,) + rest, G.directed)
        items.append((tour, G.weight(tour.edges())))
    return pareto_filter(items)


def format_tour(tour, weight):
    return f"tour {' '.join(map(str, tour.order))} | {' '.join(map(str, weight))}"
