"""Compact metric graphs, cuts and partitions.

Every edge carries a fixed orientation: the coordinate ``x`` runs from
0 at ``source`` to ``length`` at ``target``. Cutting never re-orients an
edge; segments created by cuts remember the original edge (``parent``)
and where they start on it (``offset``), so points can always be reported
in the coordinates of the graph the user built.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    CutPointOffGraph,
    Disconnected,
    DanglingEndpoint,
    DuplicateCut,
    GraphError,
    ZeroOrNegativeLength,
)

# An edge end is (edge id, 0) for the source side and (edge id, 1) for the target side.
EdgeEnd = tuple[str, int]


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    length: float
    parent: str = ""
    offset: float = 0.0

    @property
    def root(self) -> str:
        """Id of the user-facing edge this segment belongs to."""
        return self.parent or self.id

    @property
    def is_loop(self) -> bool:
        return self.source == self.target


@dataclass(frozen=True)
class GraphPoint:
    edge: str
    x: float

    def as_dict(self) -> dict:
        return {"edge_id": self.edge, "x": self.x}


@dataclass(frozen=True)
class VertexSplit:
    vertex: str
    groups: tuple[tuple[EdgeEnd, ...], ...]


@dataclass(frozen=True)
class CutSet:
    interior: tuple[GraphPoint, ...] = ()
    vertex_splits: tuple[VertexSplit, ...] = ()

    @property
    def size(self) -> int:
        return len(self.interior) + len(self.vertex_splits)


@dataclass(frozen=True)
class MetricGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    # vertices created by cuts (the cluster boundary once split into components)
    boundary: frozenset[str] = field(default_factory=frozenset)

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def ends(self) -> dict[str, tuple[EdgeEnd, ...]]:
        """Incident edge ends of every vertex, in edge order."""
        acc: dict[str, list[EdgeEnd]] = {v: [] for v in self.vertices}
        for e in self.edges:
            acc[e.source].append((e.id, 0))
            acc[e.target].append((e.id, 1))
        return {v: tuple(x) for v, x in acc.items()}

    def edge(self, edge_id: str) -> Edge:
        return self.edge_map[edge_id]

    def degree(self, v: str) -> int:
        return len(self.ends[v])

    def end_vertex(self, end: EdgeEnd) -> str:
        e = self.edge_map[end[0]]
        return e.source if end[1] == 0 else e.target

    @property
    def total_length(self) -> float:
        return total_length(self)

    @cached_property
    def labels(self) -> dict[str, int]:
        return component_labels(self)

    @property
    def n_components(self) -> int:
        return len(set(self.labels.values())) if self.vertices else 0

    @property
    def is_connected(self) -> bool:
        return self.n_components == 1

    @cached_property
    def is_path(self) -> bool:
        """Connected tree with every vertex degree at most 2."""
        return self.is_connected and betti_number(self) == 0 and all(
            len(x) <= 2 for x in self.ends.values()
        )

    def leaves(self) -> list[str]:
        return [v for v in self.vertices if self.degree(v) == 1]

    def to_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"id": e.id, "from": e.source, "to": e.target, "length": e.length}
                for e in self.edges
            ],
        }

    def locate(self, root_edge: str, x: float) -> GraphPoint:
        """Translate a coordinate on an original edge into this (possibly cut) graph."""
        for e in self.edges:
            if e.root == root_edge and e.offset - 1e-12 <= x <= e.offset + e.length + 1e-12:
                return GraphPoint(e.id, min(max(x - e.offset, 0.0), e.length))
        raise CutPointOffGraph(f"no point at {root_edge}:{x}")


def _check_id(name: object, what: str) -> str:
    if not isinstance(name, str) or not name:
        raise GraphError(f"{what} ids must be nonempty strings, got {name!r}")
    return name


def build_graph(
    vertices: Iterable[str],
    edges: Iterable[Mapping | Sequence],
    *,
    require_connected: bool = True,
) -> MetricGraph:
    """Validate vertex ids and edge records and return a sorted MetricGraph.

    Edge records are either mappings with keys ``id, from, to, length`` or
    4-tuples ``(id, from, to, length)``.
    """
    vs = [_check_id(v, "vertex") for v in vertices]
    if len(set(vs)) != len(vs):
        raise GraphError("duplicate vertex id")
    vset = set(vs)
    out = []
    for rec in edges:
        if isinstance(rec, Mapping):
            try:
                eid, a, b, ln = rec["id"], rec["from"], rec["to"], rec["length"]
            except KeyError as exc:
                raise GraphError(f"edge record missing field {exc}") from None
        else:
            eid, a, b, ln = rec
        _check_id(eid, "edge")
        if isinstance(ln, bool) or not isinstance(ln, (int, float)):
            raise GraphError(f"edge {eid}: length must be a number")
        ln = float(ln)
        if not ln > 0.0 or ln != ln or ln == float("inf"):
            raise ZeroOrNegativeLength(f"edge {eid} has length {ln}")
        for end in (a, b):
            if end not in vset:
                raise DanglingEndpoint(f"edge {eid} references unknown vertex {end!r}")
        out.append(Edge(eid, a, b, ln))
    if len({e.id for e in out}) != len(out):
        raise GraphError("duplicate edge id")
    g = MetricGraph(tuple(sorted(vs)), tuple(sorted(out, key=lambda e: e.id)))
    if require_connected and not g.is_connected:
        raise Disconnected("graph is not connected")
    return g


def graph_from_json(text: str) -> MetricGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from None
    if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
        raise GraphError("graph JSON needs 'vertices' and 'edges'")
    return build_graph(data["vertices"], data["edges"])


def component_labels(g: MetricGraph) -> dict[str, int]:
    parent = {v: v for v in g.vertices}

    def find(v: str) -> str:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        ra, rb = find(e.source), find(e.target)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    roots: dict[str, int] = {}
    labels = {}
    for v in g.vertices:
        r = find(v)
        labels[v] = roots.setdefault(r, len(roots))
    return labels


def betti_number(g: MetricGraph) -> int:
    return len(g.edges) - len(g.vertices) + g.n_components


def is_tree(g: MetricGraph) -> bool:
    return betti_number(g) == 0


def total_length(g: MetricGraph) -> float:
    return float(sum(e.length for e in g.edges))


def _canonical_splits(g: MetricGraph, cut: CutSet) -> tuple[list[GraphPoint], dict[str, list[set]]]:
    """Validate a cut set; fold endpoint cuts into vertex splits.

    Returns the strictly interior cuts and, per vertex, the common refinement
    of every split requested there (as a list of edge-end groups).
    """
    interior: list[GraphPoint] = []
    requested: dict[str, list[list[set]]] = defaultdict(list)
    seen_points: set[tuple[str, float]] = set()
    for p in cut.interior:
        if p.edge not in g.edge_map:
            raise CutPointOffGraph(f"unknown edge {p.edge!r}")
        e = g.edge_map[p.edge]
        if not (0.0 <= p.x <= e.length):
            raise CutPointOffGraph(f"x={p.x} outside edge {e.id} of length {e.length}")
        key = (p.edge, p.x)
        if key in seen_points:
            raise DuplicateCut(f"duplicate cut at {p.edge}:{p.x}")
        seen_points.add(key)
        if 0.0 < p.x < e.length:
            interior.append(p)
            continue
        end: EdgeEnd = (e.id, 0 if p.x == 0.0 else 1)
        v = g.end_vertex(end)
        rest = set(g.ends[v]) - {end}
        if rest:
            requested[v].append([{end}, rest])
    seen_vertices: set[str] = set()
    for s in cut.vertex_splits:
        if s.vertex not in g.vertex_index:
            raise CutPointOffGraph(f"unknown vertex {s.vertex!r}")
        if s.vertex in seen_vertices:
            raise DuplicateCut(f"vertex {s.vertex!r} split twice")
        seen_vertices.add(s.vertex)
        groups = [set(map(tuple, grp)) for grp in s.groups]
        flat = [x for grp in groups for x in grp]
        if len(groups) < 2 or any(not grp for grp in groups):
            raise GraphError(f"split of {s.vertex!r} needs at least two nonempty groups")
        if len(flat) != len(set(flat)) or set(flat) != set(g.ends[s.vertex]):
            raise GraphError(f"split of {s.vertex!r} must partition its edge ends")
        requested[s.vertex].append(groups)
    refined: dict[str, list[set]] = {}
    for v, parts in requested.items():
        cells = [set(g.ends[v])]
        for groups in parts:
            cells = [c & grp for c in cells for grp in groups if c & grp]
        if len(cells) > 1:
            refined[v] = sorted(cells, key=lambda c: sorted(c))
    return interior, refined


def apply_cut(g: MetricGraph, cut: CutSet) -> MetricGraph:
    """Cut ``g``; the result may be disconnected (see ``components``).

    An interior cut at ``x`` on edge ``e`` replaces ``e`` by two segments
    ending at two new degree-one vertices; a vertex split replaces the
    vertex by one new vertex per group. New vertices join ``boundary``.
    """
    interior, splits = _canonical_splits(g, cut)
    by_edge: dict[str, list[float]] = defaultdict(list)
    for p in interior:
        by_edge[p.edge].append(p.x)

    # where each edge end attaches after the vertex splits
    attach: dict[EdgeEnd, str] = {}
    vertices: list[str] = []
    boundary = set(g.boundary)
    for v in g.vertices:
        if v in splits:
            for i, grp in enumerate(splits[v]):
                nv = f"{v}~{i}"
                vertices.append(nv)
                boundary.add(nv)
                for end in grp:
                    attach[end] = nv
            boundary.discard(v)
        else:
            vertices.append(v)
            for end in g.ends[v]:
                attach[end] = v

    edges: list[Edge] = []
    for e in g.edges:
        xs = sorted(by_edge.get(e.id, []))
        a, b = attach[(e.id, 0)], attach[(e.id, 1)]
        if not xs:
            edges.append(Edge(e.id, a, b, e.length, e.parent, e.offset))
            continue
        knots = [0.0, *xs, e.length]
        for i in range(len(knots) - 1):
            left = a if i == 0 else f"{e.id}|{i}b"
            right = b if i == len(knots) - 2 else f"{e.id}|{i + 1}a"
            for nv in (left, right):
                if nv not in (a, b):
                    boundary.add(nv)
            edges.append(
                Edge(f"{e.id}.{i}", left, right, knots[i + 1] - knots[i], e.root, e.offset + knots[i])
            )
        for i in range(1, len(knots) - 1):
            vertices.extend((f"{e.id}|{i}a", f"{e.id}|{i}b"))
    return MetricGraph(
        tuple(sorted(vertices)), tuple(sorted(edges, key=lambda e: e.id)), frozenset(boundary)
    )


@dataclass(frozen=True)
class Partition:
    clusters: tuple[MetricGraph, ...]
    cutset: CutSet = field(default_factory=CutSet)

    @property
    def k(self) -> int:
        return len(self.clusters)

    def boundary(self, i: int) -> frozenset[str]:
        return self.clusters[i].boundary


def components(g: MetricGraph, cutset: CutSet | None = None) -> Partition:
    """Split a (possibly disconnected) graph into its connected clusters."""
    labels = g.labels
    groups_v: dict[int, list[str]] = defaultdict(list)
    groups_e: dict[int, list[Edge]] = defaultdict(list)
    for v in g.vertices:
        groups_v[labels[v]].append(v)
    for e in g.edges:
        groups_e[labels[e.source]].append(e)
    clusters = []
    for lab in groups_v:
        vs = tuple(groups_v[lab])
        clusters.append(
            MetricGraph(vs, tuple(groups_e[lab]), frozenset(v for v in vs if v in g.boundary))
        )
    clusters.sort(key=lambda c: (min((e.root, e.offset) for e in c.edges) if c.edges else ("", 0.0)))
    return Partition(tuple(clusters), cutset or CutSet())


def partition_graph(g: MetricGraph, cut: CutSet) -> Partition:
    return components(apply_cut(g, cut), cut)


def full_split(g: MetricGraph, v: str) -> VertexSplit | None:
    """Split separating every incident edge end (None for degree-one vertices)."""
    ends = g.ends[v]
    if len(ends) < 2:
        return None
    return VertexSplit(v, tuple((end,) for end in ends))
