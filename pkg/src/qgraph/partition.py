"""Spectral minimal partitions of metric graphs.

A k-partition is the family of connected components of a cut graph. The
search splits into combinatorial classes (how many interior cuts each edge
receives, and which vertices are split and how) and, inside a class, a
continuous search over the cut positions. Within a class the topology of
every cluster is fixed and its edge lengths are affine in the positions,
so clusters are set up once and then re-evaluated with new lengths.

The Neumann energy of a partition is the largest cluster spectral gap
``mu_2``; the Dirichlet energy is the largest ground state ``lambda_1`` with
Dirichlet conditions at the points created by the cuts.
"""
from __future__ import annotations

import functools
import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, EmptyBoundary, InfeasibleK, PartitionError
from .graph import (
    CutSet,
    GraphPoint,
    MetricGraph,
    Partition,
    VertexSplit,
    apply_cut,
    betti_number,
    components,
    partition_graph,
)
from .spectral import BoundaryCondition, Skeleton, eigenvalue_list, eigenvalues, lambda1, mu2

log = logging.getLogger(__name__)

NEUMANN = "neumann"
DIRICHLET = "dirichlet"
KINDS = (NEUMANN, DIRICHLET)

EQUI_RTOL = 1e-6
CLASS_BUDGET = 100_000
MULTISTARTS = 5
STOP_RTOL = 1e-7
SCREEN_STOP = 1e-3
SCREEN_KEEP = 6
SCREEN_MARGIN = 0.05
TIE_RTOL = 1e-13
SWEEP_CAP = 20
EDGE_MARGIN = 1e-9


@dataclass(frozen=True)
class PartitionEnergy:
    kind: str
    values: tuple[tuple[int, float], ...]
    energy: float
    equipartition: bool


@dataclass(frozen=True)
class ClassResult:
    signature: str
    energy: float


@dataclass(frozen=True)
class MinimalPartitionResult:
    k: int
    kind: str
    energy: float
    partition: Partition
    cutset: CutSet
    values: tuple[float, ...]
    equipartition: bool
    classes_examined: int
    candidates_examined: int
    trace: tuple[ClassResult, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        cuts: list[dict] = [p.as_dict() for p in self.cutset.interior]
        cuts += [
            {"vertex": s.vertex, "groups": [[list(end) for end in grp] for grp in s.groups]}
            for s in self.cutset.vertex_splits
        ]
        return {
            "k": self.k,
            "kind": self.kind,
            "energy": self.energy,
            "cuts": cuts,
            "clusters": [
                {"edges": sorted(e.id for e in c.edges), "mu2_or_lambda1": v}
                for c, v in zip(self.partition.clusters, self.values)
            ],
            "equipartition": self.equipartition,
            "classes_examined": self.classes_examined,
        }


def _check_kind(kind: str) -> str:
    kind = kind.lower()
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def _is_equi(values: Sequence[float]) -> bool:
    top = max(values)
    return all(abs(v - top) <= EQUI_RTOL * abs(top) for v in values)


def cluster_value(c: MetricGraph, kind: str) -> float:
    """mu_2 of a cluster (Neumann) or lambda_1 with Dirichlet points at its cut points."""
    if kind == NEUMANN:
        return mu2(c)
    if not c.boundary:
        raise EmptyBoundary("cluster has no cut points to carry Dirichlet conditions")
    return lambda1(c, c.boundary)


def _energy(p: Partition, kind: str) -> PartitionEnergy:
    vals = tuple((i, cluster_value(c, kind)) for i, c in enumerate(p.clusters))
    vs = [v for _, v in vals]
    return PartitionEnergy(kind, vals, max(vs), _is_equi(vs))


def lambda_N(p: Partition) -> PartitionEnergy:
    """Neumann energy: the largest cluster spectral gap."""
    return _energy(p, NEUMANN)


def lambda_D(p: Partition) -> PartitionEnergy:
    """Dirichlet energy: the largest cluster ground state, Dirichlet at cut points."""
    return _energy(p, DIRICHLET)


# --- combinatorial classes -------------------------------------------------


@dataclass(frozen=True)
class CutClass:
    counts: tuple[tuple[str, int], ...]
    splits: tuple[VertexSplit, ...]

    @property
    def signature(self) -> str:
        parts = [f"{e}:{c}" for e, c in self.counts if c]
        parts += [
            f"{s.vertex}[{'|'.join(','.join(f'{e}.{i}' for e, i in grp) for grp in s.groups)}]"
            for s in self.splits
        ]
        return " ".join(parts) or "(no cuts)"

    @property
    def n_cuts(self) -> int:
        return sum(c for _, c in self.counts) + len(self.splits)


def binary_splits(g: MetricGraph, v: str) -> list[VertexSplit]:
    """All splits of ``v`` into two nonempty groups of edge ends."""
    ends = sorted(g.ends[v])
    first, rest = ends[0], ends[1:]
    out = []
    for r in range(0, len(rest)):
        for grp in itertools.combinations(rest, r):
            a = (first, *grp)
            b = tuple(x for x in rest if x not in grp)
            out.append(VertexSplit(v, (a, b)))
    return out


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first, *rest)


def _n_compositions(total: int, parts: int) -> int:
    return math.comb(total + parts - 1, parts - 1) if parts else int(total == 0)


def _representative(g: MetricGraph, cls: CutClass) -> CutSet:
    pts = []
    for eid, c in cls.counts:
        ell = g.edge(eid).length
        pts += [GraphPoint(eid, ell * (j + 1) / (c + 1)) for j in range(c)]
    return CutSet(tuple(pts), cls.splits)


def enumerate_classes(g: MetricGraph, k: int, kind: str, budget: int = CLASS_BUDGET) -> list[CutClass]:
    """Cut classes whose cut graph has exactly ``k`` components.

    Neumann classes must also leave a forest (every cycle broken), so they
    use exactly ``k - 1 + beta`` cuts; Dirichlet classes use between
    ``k - 1`` and ``k - 1 + beta``.
    """
    beta = betti_number(g)
    split_vertices = [v for v in g.vertices if g.degree(v) >= 3]
    if any(g.degree(v) >= 4 for v in split_vertices):
        log.info("vertex of degree >= 4 present: only binary vertex splits are searched")
    options = [[None, *binary_splits(g, v)] for v in split_vertices]
    totals = [k - 1 + beta] if kind == NEUMANN else list(range(k - 1, k + beta))
    edge_ids = [e.id for e in g.edges]

    estimate = 0
    for t in totals:
        for n_split in range(0, min(t, len(split_vertices)) + 1):
            ways = sum(
                math.prod(len(options[i]) - 1 for i in chosen)
                for chosen in itertools.combinations(range(len(split_vertices)), n_split)
            )
            estimate += ways * _n_compositions(t - n_split, len(edge_ids))
    if estimate > budget:
        raise BudgetExceeded(f"{estimate} cut classes exceed the budget of {budget}")

    out = []
    for t in totals:
        for choice in itertools.product(*options):
            splits = tuple(s for s in choice if s is not None)
            if len(splits) > t:
                continue
            for comp in _compositions(t - len(splits), len(edge_ids)):
                cls = CutClass(tuple(zip(edge_ids, comp)), splits)
                cut_graph = apply_cut(g, _representative(g, cls))
                if cut_graph.n_components != k:
                    continue
                if kind == NEUMANN and betti_number(cut_graph) != 0:
                    continue
                out.append(cls)
    return out


# --- continuous search inside a class --------------------------------------


class _ClusterModel:
    """One cluster of a class: lengths as functions of the cut positions."""

    def __init__(self, cluster: MetricGraph, kind: str, seg_of: dict[str, tuple[str, int]]):
        self.kind = kind
        self.path = cluster.is_path
        self.fast = self.path
        self.n_dirichlet = 0
        if kind == DIRICHLET:
            if not cluster.boundary:
                raise EmptyBoundary("cluster without cut points")
            leaves = set(cluster.leaves())
            self.fast = self.path and cluster.boundary <= leaves
            self.n_dirichlet = len(cluster.boundary)
            bc = BoundaryCondition.on(cluster.boundary)
        else:
            bc = BoundaryCondition()
        self.skeleton = None if self.fast else Skeleton(cluster, bc)
        # lengths are passed in skeleton edge order
        ids = self.skeleton.edge_ids if self.skeleton is not None else [e.id for e in cluster.edges]
        self.refs = [seg_of[eid] for eid in ids]
        self.cache: dict[tuple[float, ...], float] = {}
        self.last_k: float | None = None

    def value(self, lengths: tuple[float, ...]) -> float:
        hit = self.cache.get(lengths)
        if hit is not None:
            return hit
        if self.fast:
            L = sum(lengths)
            if self.kind == NEUMANN:
                v = (math.pi / L) ** 2
            else:
                v = (math.pi / L) ** 2 if self.n_dirichlet == 2 else (math.pi / (2.0 * L)) ** 2
        else:
            n = 2 if self.kind == NEUMANN else 1
            k = self.skeleton.nth_wavenumber(n, np.array(lengths), guess=self.last_k)
            self.last_k = k
            v = k * k
        self.cache[lengths] = v
        return v


class _ClassModel:
    def __init__(self, g: MetricGraph, cls: CutClass, kind: str):
        self.g = g
        self.cls = cls
        self.kind = kind
        self.var_edges = [eid for eid, c in cls.counts for _ in range(c)]
        self.var_len = np.array([g.edge(eid).length for eid in self.var_edges])
        self.edge_slices: dict[str, slice] = {}
        i = 0
        for eid, c in cls.counts:
            if c:
                self.edge_slices[eid] = slice(i, i + c)
                i += c
        self.multi_slices = [(eid, sl) for eid, sl in self.edge_slices.items() if sl.stop - sl.start > 1]
        rep = _representative(g, cls)
        cut = apply_cut(g, rep)
        seg_of: dict[str, tuple[str, int]] = {}
        for e in cut.edges:
            if e.id in g.edge_map:
                seg_of[e.id] = (e.id, -1)
            else:
                # segment i of edge "<id>" is "<id>.i"; g may itself be a cut graph
                eid, i = e.id.rsplit(".", 1)
                seg_of[e.id] = (eid, int(i))
        part = components(cut, rep)
        self.clusters = [_ClusterModel(c, kind, seg_of) for c in part.clusters]
        self.evaluations = 0

    def normalize(self, x: np.ndarray) -> np.ndarray:
        y = np.clip(x, EDGE_MARGIN * self.var_len, (1.0 - EDGE_MARGIN) * self.var_len)
        for eid, sl in self.multi_slices:
            ell = self.g.edge(eid).length
            gap = EDGE_MARGIN * ell
            z = np.sort(y[sl])
            # keep cuts on one edge apart so no segment degenerates
            for j in range(1, len(z)):
                z[j] = max(z[j], z[j - 1] + gap)
            z[-1] = min(z[-1], ell - gap)
            for j in range(len(z) - 2, -1, -1):
                z[j] = min(z[j], z[j + 1] - gap)
            y[sl] = z
        return y

    def segment_lengths(self, x: np.ndarray) -> dict[tuple[str, int], float]:
        out = {}
        for e in self.g.edges:
            sl = self.edge_slices.get(e.id)
            if sl is None:
                out[(e.id, -1)] = e.length
                continue
            knots = [0.0, *x[sl].tolist(), e.length]
            for i in range(len(knots) - 1):
                out[(e.id, i)] = knots[i + 1] - knots[i]
        return out

    def values(self, x: np.ndarray) -> list[float]:
        self.evaluations += 1
        seg = self.segment_lengths(x)
        return [c.value(tuple(seg[r] for r in c.refs)) for c in self.clusters]

    def key(self, x: np.ndarray) -> tuple[float, ...]:
        return tuple(sorted(self.values(x), reverse=True))

    def cutset(self, x: np.ndarray) -> CutSet:
        pts = tuple(GraphPoint(eid, float(v)) for eid, v in zip(self.var_edges, x))
        return CutSet(pts, self.cls.splits)

    def starts(self, rng: np.random.Generator, count: int) -> list[np.ndarray]:
        """Equispaced start, then stratified random ones."""
        out = []
        for s in range(count):
            x = np.empty(len(self.var_edges))
            for eid, sl in self.edge_slices.items():
                c = sl.stop - sl.start
                ell = self.g.edge(eid).length
                j = np.arange(c)
                if s == 0:
                    x[sl] = ell * (j + 1) / (c + 1)
                else:
                    x[sl] = ell * (j + rng.uniform(0.05, 0.95, size=c)) / c
            out.append(self.normalize(x))
        return out


def _lex_less(a: Sequence[float], b: Sequence[float]) -> bool:
    """Descending-sorted energy vectors compared lexicographically with a tie tolerance."""
    for ai, bi in zip(a, b):
        tol = TIE_RTOL * max(abs(ai), abs(bi))
        if ai < bi - tol:
            return True
        if ai > bi + tol:
            return False
    return False


def compass_search(
    objective: Callable[[np.ndarray], tuple[float, ...]],
    x0: np.ndarray,
    scales: np.ndarray,
    normalize: Callable[[np.ndarray], np.ndarray],
    stop: float,
    step0: float = 0.25,
) -> tuple[np.ndarray, tuple[float, ...]]:
    """Coordinate pattern search on a lexicographic objective.

    Steps are ``step * scales[i]``; the step halves after a sweep without
    improvement and the search ends once ``step < stop``. After a
    successful sweep the accumulated move is tried once more (pattern move).
    Comparing whole sorted energy vectors instead of just the maximum keeps
    the search moving across ties, where a single coordinate cannot lower
    the maximum alone. Lexicographic descent can creep forever on the
    trailing entries, so each step level allows at most ``max_sweeps``
    improving sweeps before the step halves.
    """
    max_sweeps = SWEEP_CAP * max(len(x0), 1)
    x = normalize(x0)
    fx = objective(x)
    step = step0
    n = len(x)
    if n == 0:
        return x, fx
    sweeps = 0
    while step >= stop:
        start = x.copy()
        improved = False
        for i in range(n):
            for sign in (1.0, -1.0):
                y = x.copy()
                y[i] += sign * step * scales[i]
                y = normalize(y)
                if np.array_equal(y, x):
                    continue
                fy = objective(y)
                if _lex_less(fy, fx):
                    x, fx, improved = y, fy, True
                    break
        sweeps += 1
        if improved and sweeps < max_sweeps:
            y = normalize(x + (x - start))
            if not np.array_equal(y, x):
                fy = objective(y)
                if _lex_less(fy, fx):
                    x, fx = y, fy
        else:
            step *= 0.5
            sweeps = 0
    return x, fx


def _search_class(model: _ClassModel, starts: Sequence[np.ndarray], stop: float) -> tuple[np.ndarray, tuple[float, ...]]:
    best_x, best_f = None, None
    if not model.var_edges:
        x = np.zeros(0)
        return x, model.key(x)
    for x0 in starts:
        x, f = compass_search(model.key, x0, model.var_len, model.normalize, stop)
        if best_f is None or _lex_less(f, best_f):
            best_x, best_f = x, f
    return best_x, best_f


def _trivial(g: MetricGraph, kind: str) -> MinimalPartitionResult:
    """k = 1 without cuts: mu_2(g), or lambda_1 with no Dirichlet point (= mu_1 = 0)."""
    part = partition_graph(g, CutSet())
    v = mu2(g) if kind == NEUMANN else 0.0
    return MinimalPartitionResult(1, kind, v, part, CutSet(), (v,), True, 1, 1)


def _optimize(g: MetricGraph, k: int, kind: str, seed: int, screen: bool, budget: int) -> MinimalPartitionResult:
    kind = _check_kind(kind)
    if k < 1:
        raise InfeasibleK(f"k must be at least 1, got {k}")
    beta = betti_number(g)
    if k == 1 and (beta == 0 or kind == DIRICHLET):
        return _trivial(g, kind)
    classes = enumerate_classes(g, k, kind, budget)
    if not classes:
        raise InfeasibleK(f"no cut class yields {k} clusters")
    rng = np.random.default_rng(seed)
    lmin = min(e.length for e in g.edges)
    stop = STOP_RTOL * lmin / max(e.length for e in g.edges)

    models = [_ClassModel(g, cls, kind) for cls in classes]
    starts = [m.starts(rng, MULTISTARTS) for m in models]
    trace: list[ClassResult] = []
    if screen and len(models) > SCREEN_KEEP:
        coarse = []
        for i, m in enumerate(models):
            _, f = _search_class(m, starts[i][:1], SCREEN_STOP)
            coarse.append((f[0], m.cls.signature, i))
        coarse.sort()
        cutoff = coarse[0][0] * (1.0 + SCREEN_MARGIN)
        keep = [i for rank, (e, _, i) in enumerate(coarse) if rank < SCREEN_KEEP or e <= cutoff]
        log.debug("screening kept %d of %d classes", len(keep), len(models))
    else:
        keep = list(range(len(models)))

    results = []
    for i in keep:
        x, f = _search_class(models[i], starts[i], stop)
        results.append((f, models[i].cls.signature, i, x))
        trace.append(ClassResult(models[i].cls.signature, f[0]))
    results.sort(key=lambda r: (r[0][0], r[1]))
    f, _, i, x = results[0]
    for other in results[1:]:
        if _lex_less(other[0], f):
            f, _, i, x = other
    best = models[i]
    cut = best.cutset(x)
    part = partition_graph(g, cut)
    energy = _energy(part, kind)
    values = tuple(v for _, v in energy.values)
    if abs(energy.energy - f[0]) > 1e-9 * energy.energy:
        log.warning("re-evaluated energy %.15g differs from search value %.15g", energy.energy, f[0])
    return MinimalPartitionResult(
        k,
        kind,
        energy.energy,
        part,
        cut,
        values,
        energy.equipartition,
        len(models),
        sum(m.evaluations for m in models),
        tuple(sorted(trace, key=lambda t: (t.energy, t.signature))),
    )


@functools.lru_cache(maxsize=512)
def _optimize_cached(
    g: MetricGraph, k: int, kind: str, seed: int, screen: bool, budget: int
) -> MinimalPartitionResult:
    # results are immutable and deterministic in (graph, k, kind, seed)
    return _optimize(g, k, kind, seed, screen, budget)


def minimal_partition(
    g: MetricGraph, k: int, kind: str = NEUMANN, seed: int = 0, screen: bool = True, budget: int = CLASS_BUDGET
) -> MinimalPartitionResult:
    """Minimal k-partition energy of a tree."""
    if betti_number(g) != 0:
        raise PartitionError("graph has cycles; use minimal_partition_general")
    return _optimize_cached(g, k, kind, seed, screen, budget)


def minimal_partition_general(
    g: MetricGraph, k: int, kind: str = NEUMANN, seed: int = 0, screen: bool = True, budget: int = CLASS_BUDGET
) -> MinimalPartitionResult:
    """Minimal k-partition energy of a graph with cycles.

    The cycle-breaking cuts are part of the class enumeration, and their
    positions are optimized together with the separating cuts.
    """
    beta = betti_number(g)
    if beta > 2:
        log.warning("first Betti number %d: the class count grows quickly", beta)
    return _optimize_cached(g, k, kind, seed, screen, budget)


def spectral_minimal_energy(g: MetricGraph, k: int, kind: str = NEUMANN, **kw) -> MinimalPartitionResult:
    return minimal_partition_general(g, k, kind, **kw)


# --- theorem checks ----------------------------------------------------------


def _slack(upper: float, lower: float) -> float:
    """Relative margin of ``upper >= lower`` (absolute when ``lower`` is zero)."""
    return (upper - lower) / abs(lower) if lower else upper - lower


def verify_interlacing(
    g: MetricGraph, n: int, seed: int = 0, tol: float = 1e-6, cache: dict | None = None
) -> dict:
    """Check lambda_{n-1} >= L^N_{n-1} >= L^D_{n-beta} >= mu_{n-beta}.

    lambda carries Dirichlet conditions at the degree-one vertices. Pass the
    same ``cache`` dict across calls on one graph to reuse partition energies.
    """
    beta = betti_number(g)
    if n < beta + 1 or n < 2:
        raise ValueError(f"need n >= max(2, beta + 1), got n={n}, beta={beta}")
    cache = {} if cache is None else cache

    def energy(k: int, kind: str) -> float:
        if (k, kind) not in cache:
            cache[k, kind] = minimal_partition_general(g, k, kind, seed=seed).energy
        return cache[k, kind]

    bc = BoundaryCondition.topological(g)
    lam = eigenvalue_list(eigenvalues(g, bc, n - 1))[n - 2]
    ln = energy(n - 1, NEUMANN)
    ld = energy(n - beta, DIRICHLET)
    mu = eigenvalue_list(eigenvalues(g, BoundaryCondition(), n - beta))[n - beta - 1]
    chain = [lam, ln, ld, mu]
    slacks = [float(_slack(chain[i], chain[i + 1])) for i in range(3)]
    return {
        "n": n,
        "beta": beta,
        "lambda_n_minus_1": lam,
        "LN_n_minus_1": ln,
        "LD_n_minus_beta": ld,
        "mu_n_minus_beta": mu,
        "slacks": slacks,
        "ok": all(s >= -tol for s in slacks),
    }


def _cycle_cut(c: MetricGraph, rng: np.random.Generator) -> CutSet | None:
    """A random cut of ``c`` that keeps it connected, or None for a tree."""
    if betti_number(c) == 0:
        return None
    options: list[CutSet] = []
    for e in c.edges:
        x = float(rng.uniform(0.1, 0.9)) * e.length
        cut = CutSet((GraphPoint(e.id, x),))
        if apply_cut(c, cut).is_connected:
            options.append(cut)
    for v in c.vertices:
        if c.degree(v) >= 2:
            for s in binary_splits(c, v):
                cut = CutSet((), (s,))
                if apply_cut(c, cut).is_connected:
                    options.append(cut)
    return options[int(rng.integers(len(options)))] if options else None


def surgery_trial(g: MetricGraph, rng: np.random.Generator) -> dict | None:
    """One random partition, one connectivity-preserving cut of a cluster."""
    cuts = []
    for _ in range(int(rng.integers(0, 4))):
        e = g.edges[int(rng.integers(len(g.edges)))]
        cuts.append(GraphPoint(e.id, float(rng.uniform(0.05, 0.95)) * e.length))
    if len({(p.edge, p.x) for p in cuts}) != len(cuts):
        return None
    part = partition_graph(g, CutSet(tuple(cuts)))
    cyclic = [i for i, c in enumerate(part.clusters) if betti_number(c) > 0]
    if not cyclic:
        return None
    i = cyclic[int(rng.integers(len(cyclic)))]
    extra = _cycle_cut(part.clusters[i], rng)
    if extra is None:
        return None
    new_cluster = apply_cut(part.clusters[i], extra)
    clusters = list(part.clusters)
    clusters[i] = new_cluster
    after = Partition(tuple(clusters), part.cutset)
    before_n, after_n = lambda_N(part).energy, lambda_N(after).energy
    if all(c.boundary for c in part.clusters):
        before_d, after_d = lambda_D(part).energy, lambda_D(after).energy
        d_slack = _slack(after_d, before_d)
    else:
        before_d = after_d = None
        d_slack = math.inf
    old_c, new_c = part.clusters[i], new_cluster
    mu_pair = (cluster_value(old_c, NEUMANN), cluster_value(new_c, NEUMANN))
    lam_pair = (cluster_value(old_c, DIRICHLET), cluster_value(new_c, DIRICHLET)) if old_c.boundary else None
    return {
        "clusters": part.k,
        "cut_cluster": i,
        "neumann": (before_n, after_n),
        "dirichlet": (before_d, after_d) if before_d is not None else None,
        "neumann_slack": _slack(before_n, after_n),
        "dirichlet_slack": d_slack,
        "cluster_mu2": mu_pair,
        "cluster_lambda1": lam_pair,
        "cluster_slack": min(
            _slack(mu_pair[0], mu_pair[1]),
            _slack(lam_pair[1], lam_pair[0]) if lam_pair else math.inf,
        ),
    }


def verify_surgery_monotonicity(
    graphs: Sequence[MetricGraph], trials: int, seed: int = 0, tol: float = 1e-8
) -> dict:
    """Cutting inside a cluster never raises Lambda^N and never lowers Lambda^D."""
    rng = np.random.default_rng(seed)
    cases = []
    attempts = 0
    while len(cases) < trials:
        attempts += 1
        if attempts > 200 * trials:
            raise PartitionError("could not generate enough surgery trials (no cycles?)")
        g = graphs[len(cases) % len(graphs)]
        case = surgery_trial(g, rng)
        if case is None:
            continue
        case["ok"] = min(case["neumann_slack"], case["dirichlet_slack"], case["cluster_slack"]) >= -tol
        cases.append(case)
    return {"trials": cases, "ok": all(c["ok"] for c in cases)}
