"""Nodal and Neumann structure of eigenfunctions.

On an edge a nonzero eigenfunction is ``R cos(kx - phi)``, so its zeros and
extrema form arithmetic lattices with spacing ``pi/k`` and can be listed in
closed form. Points within ``SNAP_RTOL * length`` of an endpoint are
attributed to the vertex instead, where they are decided by the vertex
values and incident derivatives.
"""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AnalysisError, NotEquipartition, NotGenericMinimizer, NotMorse, ZeroAtInterface
from .graph import CutSet, GraphPoint, MetricGraph, Partition, full_split, partition_graph
from .spectral import STANDARD, BoundaryCondition, Eigenfunction, Eigenpair, mu2, vertex_residual

log = logging.getLogger(__name__)

ZERO_RTOL = 1e-9
SNAP_RTOL = 1e-9
EQUI_RTOL = 1e-8
ANGLE_GRID = 360


@dataclass(frozen=True)
class PointSet:
    """Critical points split into strictly interior edge points and vertices."""

    interior: tuple[GraphPoint, ...] = ()
    vertices: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.interior) + len(self.vertices)

    def points(self, g: MetricGraph) -> list[GraphPoint]:
        """All points as GraphPoints; a vertex is addressed by its first incident edge end."""
        out = list(self.interior)
        for v in self.vertices:
            eid, end = g.ends[v][0]
            out.append(GraphPoint(eid, 0.0 if end == 0 else g.edge(eid).length))
        return sorted(out, key=lambda p: (p.edge, p.x))

    def cutset(self, g: MetricGraph) -> CutSet:
        splits = tuple(s for s in (full_split(g, v) for v in self.vertices) if s is not None)
        return CutSet(self.interior, splits)


@dataclass(frozen=True)
class DomainReport:
    nodal_points: PointSet
    node_count: int
    nodal_domains: Partition | None
    nodal_count: int
    neumann_points: PointSet
    neumann_domains: Partition | None
    is_morse: bool
    is_generic: bool | None = None
    reasons: tuple[str, ...] = ()
    degenerate: bool = False
    notes: tuple[str, ...] = field(default=())


def sup_norm(g: MetricGraph, f: Eigenfunction) -> float:
    """max |f| over the graph, exact for the trigonometric form."""
    best = 0.0
    for e in g.edges:
        a, b = f.coeffs[e.id]
        best = max(best, abs(f.value(e.id, 0.0)), abs(f.value(e.id, e.length)))
        if f.k > 0.0 and _lattice(e.length, f.k, math.atan2(b, a), 0.0, 0.0):
            best = max(best, math.hypot(a, b))
    return best


def _lattice(length: float, k: float, phase: float, shift: float, snap: float) -> list[float]:
    """Points ``x = (phase + shift + j pi) / k`` with ``snap < x < length - snap``."""
    j0 = math.ceil((k * snap - phase - shift) / math.pi)
    out = []
    j = j0
    while True:
        x = (phase + shift + j * math.pi) / k
        if x >= length - snap:
            break
        if x > snap:
            out.append(x)
        j += 1
    return out


def _vertex_values(g: MetricGraph, f: Eigenfunction, v: str) -> tuple[list[float], list[float]]:
    """Values and outgoing derivatives of ``f`` on every edge end at ``v``."""
    vals, ders = [], []
    for eid, end in g.ends[v]:
        x = 0.0 if end == 0 else g.edge(eid).length
        vals.append(f.value(eid, x))
        d = f.derivative(eid, x)
        ders.append(d if end == 0 else -d)
    return vals, ders


def zero_edges(g: MetricGraph, f: Eigenfunction) -> list[str]:
    """Edges on which ``f`` vanishes identically (relative to max|f|)."""
    scale = sup_norm(g, f)
    return [e.id for e in g.edges if f.amplitude(e.id) <= ZERO_RTOL * scale]


def is_morse(g: MetricGraph, f: Eigenfunction) -> bool:
    return f.k > 0.0 and not zero_edges(g, f)


def _require_morse(g: MetricGraph, f: Eigenfunction) -> None:
    dead = zero_edges(g, f)
    if dead:
        raise NotMorse(f"eigenfunction vanishes identically on {', '.join(dead)}")


def nodal_points(
    g: MetricGraph,
    f: Eigenfunction,
    bc: BoundaryCondition = STANDARD,
    allow_non_morse: bool = False,
) -> PointSet:
    """Isolated zeros of ``f``; a zero at a vertex counts once.

    Dirichlet vertices are excluded (the zero is imposed). With
    ``allow_non_morse`` edges where ``f`` vanishes identically are skipped
    and a vertex zero still counts when some incident edge carries ``f``.
    """
    dead = set(zero_edges(g, f))
    if dead and not allow_non_morse:
        raise NotMorse(f"eigenfunction vanishes identically on {', '.join(sorted(dead))}")
    if f.k == 0.0:
        return PointSet()
    scale = sup_norm(g, f)
    interior = []
    for e in g.edges:
        if e.id in dead:
            continue
        a, b = f.coeffs[e.id]
        for x in _lattice(e.length, f.k, math.atan2(b, a), math.pi / 2, SNAP_RTOL * e.length):
            interior.append(GraphPoint(e.id, x))
    vertices = []
    for v in g.vertices:
        if v in bc.dirichlet:
            continue
        vals, _ = _vertex_values(g, f, v)
        live = [eid for eid, _ in g.ends[v] if eid not in dead]
        if live and max(abs(x) for x in vals) <= ZERO_RTOL * scale:
            vertices.append(v)
    return PointSet(tuple(interior), tuple(vertices))


def neumann_points(g: MetricGraph, f: Eigenfunction) -> PointSet:
    """Interior extrema plus vertices of degree >= 2 with all incident derivatives zero."""
    _require_morse(g, f)
    if f.k == 0.0:
        raise AnalysisError("constant eigenfunction: every point is extremal")
    scale = sup_norm(g, f)
    interior = []
    for e in g.edges:
        a, b = f.coeffs[e.id]
        for x in _lattice(e.length, f.k, math.atan2(b, a), 0.0, SNAP_RTOL * e.length):
            interior.append(GraphPoint(e.id, x))
    vertices = []
    for v in g.vertices:
        if g.degree(v) < 2:
            continue
        _, ders = _vertex_values(g, f, v)
        if max(abs(d) for d in ders) <= ZERO_RTOL * f.k * scale:
            vertices.append(v)
    return PointSet(tuple(interior), tuple(vertices))


def nodal_domains(g: MetricGraph, f: Eigenfunction, bc: BoundaryCondition = STANDARD) -> Partition:
    pts = nodal_points(g, f, bc)
    return partition_graph(g, pts.cutset(g))


def neumann_domains(g: MetricGraph, f: Eigenfunction) -> Partition:
    pts = neumann_points(g, f)
    return partition_graph(g, pts.cutset(g))


def classify(
    g: MetricGraph,
    pair: Eigenpair,
    basis_index: int = 0,
    bc: BoundaryCondition = STANDARD,
    f: Eigenfunction | None = None,
) -> tuple[bool, bool, list[str]]:
    """(is_morse, is_generic, reasons) for one eigenfunction of ``pair``."""
    f = pair.basis[basis_index] if f is None else f
    reasons = []
    if f.k == 0.0:
        reasons.append("constant eigenfunction")
    dead = zero_edges(g, f)
    if dead:
        reasons.append(f"vanishes identically on edges {', '.join(dead)}")
    morse = not reasons
    if pair.multiplicity > 1:
        reasons.append(f"eigenvalue has multiplicity {pair.multiplicity}")
    if f.k > 0.0:
        scale = sup_norm(g, f)
        for v in g.vertices:
            if v in bc.dirichlet:
                continue
            vals, ders = _vertex_values(g, f, v)
            if max(abs(x) for x in vals) <= ZERO_RTOL * scale:
                reasons.append(f"vanishes at vertex {v}")
            elif g.degree(v) >= 2 and max(abs(d) for d in ders) <= ZERO_RTOL * f.k * scale:
                reasons.append(f"extremum at interior vertex {v}")
    return morse, not reasons, reasons


def _combine(fs: Sequence[Eigenfunction], weights: Sequence[float]) -> Eigenfunction:
    coeffs = {}
    for eid in fs[0].coeffs:
        a = sum(w * f.coeffs[eid][0] for w, f in zip(weights, fs))
        b = sum(w * f.coeffs[eid][1] for w, f in zip(weights, fs))
        coeffs[eid] = (a, b)
    return Eigenfunction(fs[0].k, coeffs)


def _normalized(g: MetricGraph, f: Eigenfunction) -> Eigenfunction:
    from .spectral import l2_inner

    nrm = math.sqrt(l2_inner(g, f, f))
    out = f.scaled(1.0 / nrm)
    big = [c for e in g.edges for c in out.coeffs[e.id] if abs(c) > 1e-9]
    return out.scaled(-1.0) if big and big[0] < 0 else out


def _min_amplitude(g: MetricGraph, f: Eigenfunction) -> float:
    return min(f.amplitude(e.id) for e in g.edges)


def morse_representative(g: MetricGraph, basis: Sequence[Eigenfunction]) -> Eigenfunction | None:
    """Eigenspace member maximizing the smallest edge amplitude.

    Pairs of basis vectors are mixed over an angle grid and the best angle
    is refined locally; the winner absorbs the next basis vector. Returns
    None if every combination vanishes on some edge.
    """
    best = basis[0]
    for nxt in basis[1:]:
        score = lambda t: _min_amplitude(g, _combine((best, nxt), (math.cos(t), math.sin(t))))  # noqa: E731
        grid = np.linspace(0.0, math.pi, ANGLE_GRID, endpoint=False)
        vals = [score(t) for t in grid]
        t0 = float(grid[int(np.argmax(vals))])
        step = math.pi / ANGLE_GRID
        lo, hi = t0 - step, t0 + step
        for _ in range(80):
            m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
            if score(m1) < score(m2):
                lo = m1
            else:
                hi = m2
        t = 0.5 * (lo + hi)
        if score(t0) > score(t):
            t = t0
        best = _combine((best, nxt), (math.cos(t), math.sin(t)))
    best = _normalized(g, best)
    return best if is_morse(g, best) else None


def localized_representative(g: MetricGraph, basis: Sequence[Eigenfunction]) -> Eigenfunction | None:
    """An eigenspace member vanishing identically on some edge, if one exists."""
    if len(basis) < 2:
        f = basis[0]
        return f if zero_edges(g, f) else None
    for e in g.edges:
        block = np.array([[f.coeffs[e.id][0] for f in basis], [f.coeffs[e.id][1] for f in basis]])
        _, s, vt = np.linalg.svd(block)
        rank = int(np.sum(s > ZERO_RTOL * max(1.0, s[0] if s.size else 0.0)))
        if rank < len(basis):
            w = vt[-1]
            f = _combine(basis, w)
            f = Eigenfunction(f.k, {**f.coeffs, e.id: (0.0, 0.0)})
            return _normalized(g, f)
    return None


def domain_summary(p: Partition) -> list[dict]:
    out = []
    for c in p.clusters:
        out.append(
            {
                "edges": sorted(e.id for e in c.edges),
                "length": c.total_length,
                "mu2": mu2(c) if c.edges else 0.0,
            }
        )
    return out


def report(
    g: MetricGraph,
    pair: Eigenpair,
    f: Eigenfunction | None = None,
    bc: BoundaryCondition = STANDARD,
    allow_non_morse: bool = False,
) -> DomainReport:
    """Full nodal/Neumann report for ``f`` (default: the first basis vector of ``pair``)."""
    f = pair.basis[0] if f is None else f
    if f.k == 0.0:
        whole = partition_graph(g, CutSet())
        return DomainReport(
            PointSet(), 0, whole, 1, PointSet(), whole, False, False,
            ("constant eigenfunction",), degenerate=True,
            notes=("constant eigenfunction: no nodal points, every point is extremal",),
        )
    morse, generic, reasons = classify(g, pair, f=f, bc=bc)
    nodes = nodal_points(g, f, bc, allow_non_morse=allow_non_morse)
    notes = []
    if morse:
        nd = partition_graph(g, nodes.cutset(g))
        npts = neumann_points(g, f)
        nm = partition_graph(g, npts.cutset(g))
        deg2 = [v for v in npts.vertices if g.degree(v) == 2]
        if deg2:
            notes.append(f"degree-2 vertices counted as Neumann points: {', '.join(deg2)}")
    else:
        nd, npts, nm = None, PointSet(), None
        notes.append("not Morse: domains undefined, isolated zeros counted")
    return DomainReport(
        nodes, len(nodes), nd, nd.k if nd else 0, npts, nm, morse, generic, tuple(reasons),
        notes=tuple(notes),
    )


def _site(vertex: str) -> str:
    """Common id of the boundary vertices created by one cut."""
    if "~" in vertex:
        return vertex.rsplit("~", 1)[0]
    if "|" in vertex:
        return vertex[:-1]
    return vertex


def _to_parent_coords(k: float, a: float, b: float, offset: float) -> tuple[float, float]:
    c, s = math.cos(k * offset), math.sin(k * offset)
    return a * c - b * s, a * s + b * c


def glue_equipartition(
    g: MetricGraph,
    partition: Partition,
    minimizers: Sequence[Eigenfunction],
    mu: float,
    check_generic: bool = True,
) -> Eigenfunction:
    """Scale cluster eigenfunctions into one eigenfunction of the tree ``g``.

    Clusters are visited breadth-first through shared cut sites; each new
    cluster is scaled so its value at the site matches the already fixed
    neighbour.
    """
    if len(minimizers) != partition.k:
        raise ValueError("one minimizer per cluster required")
    k = math.sqrt(mu)
    for i, (c, f) in enumerate(zip(partition.clusters, minimizers)):
        if abs(f.mu - mu) > EQUI_RTOL * mu:
            raise NotEquipartition(f"cluster {i}: eigenvalue {f.mu} differs from {mu}")
        if check_generic:
            pair = Eigenpair(f.k, 1, (f,))
            _, generic, reasons = classify(c, pair, f=f)
            if not generic:
                raise NotGenericMinimizer(f"cluster {i}: {'; '.join(reasons)}")

    # values at cut sites
    sites: dict[str, list[tuple[int, float]]] = {}
    for i, (c, f) in enumerate(zip(partition.clusters, minimizers)):
        for v in c.boundary:
            vals, _ = _vertex_values(c, f, v)
            sites.setdefault(_site(v), []).append((i, float(np.mean(vals))))
    adj: dict[int, list[tuple[int, float, float]]] = {i: [] for i in range(partition.k)}
    for members in sites.values():
        for i, vi in members:
            for j, vj in members:
                if i != j:
                    adj[i].append((j, vi, vj))

    scale: dict[int, float] = {0: 1.0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j, vi, vj in adj[i]:
            if j in scale:
                continue
            tol = ZERO_RTOL * max(sup_norm(partition.clusters[j], minimizers[j]), 1e-300)
            if abs(vj) <= tol:
                raise ZeroAtInterface(f"cluster {j} vanishes at a shared cut point")
            scale[j] = scale[i] * vi / vj
            queue.append(j)
    if len(scale) != partition.k:
        raise AnalysisError("clusters do not form a connected adjacency tree")

    coeffs: dict[str, tuple[float, float]] = {}
    for i, (c, f) in enumerate(zip(partition.clusters, minimizers)):
        for e in c.edges:
            if e.root in coeffs:
                continue
            a, b = f.coeffs[e.id]
            a, b = _to_parent_coords(k, scale[i] * a, scale[i] * b, e.offset)
            coeffs[e.root] = (a, b)
    glued = _normalized(g, Eigenfunction(k, {e.id: coeffs[e.id] for e in g.edges}))
    res = vertex_residual(g, STANDARD, glued)
    if res > 1e-8:
        raise AnalysisError(f"glued function violates vertex conditions (residual {res:.3e})")
    return glued



def representative_for_index(
    g: MetricGraph, pair: Eigenpair, first: int, n: int
) -> tuple[Eigenfunction | None, str]:
    """The eigenfunction reported for index ``n`` of a possibly degenerate ``pair``.

    A simple eigenvalue gives its basis vector. In a degenerate eigenspace
    the first index takes a member vanishing on some edge, when one exists,
    and the remaining indices take the Morse representative.
    """
    if pair.multiplicity == 1 or pair.k == 0.0:
        return pair.basis[0], "basis"
    if n == first:
        loc = localized_representative(g, pair.basis)
        if loc is not None:
            return loc, "localized"
    return morse_representative(g, pair.basis), "morse"
