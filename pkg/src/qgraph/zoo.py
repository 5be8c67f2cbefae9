"""Named example graphs and seeded random graphs."""
from __future__ import annotations

import math
from typing import Sequence

from .graph import MetricGraph, build_graph

DEFAULT_EPS = 0.1


class LCG:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``state <- (a * state + c) mod 2**64`` with a = 6364136223846793005 and
    c = 1442695040888963407; floats use the top 53 bits.
    """

    A = 6364136223846793005
    C = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = (seed ^ 0x9E3779B97F4A7C15) & self.MASK
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (self.A * self.state + self.C) & self.MASK
        return self.state

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * (self.next_u64() >> 11) / float(1 << 53)

    def randrange(self, n: int) -> int:
        return int(self.uniform() * n) % n


def path(length: float = 1.0, pieces: int = 1) -> MetricGraph:
    """Interval of total ``length``, optionally subdivided by degree-2 vertices."""
    vs = [f"v{i}" for i in range(pieces + 1)]
    es = [(f"e{i + 1}", vs[i], vs[i + 1], length / pieces) for i in range(pieces)]
    return build_graph(vs, es)


def star3(lengths: Sequence[float] | None = None, eps: float | None = None) -> MetricGraph:
    """Three-edge star; ``eps`` lengthens the third edge to ``1 + eps``."""
    if lengths is None:
        lengths = (1.0, 1.0, 1.0 + (eps or 0.0))
    if len(lengths) != 3:
        raise ValueError("star3 needs three lengths")
    return build_graph(
        ["c", "l1", "l2", "l3"],
        [(f"e{i + 1}", "c", f"l{i + 1}", float(x)) for i, x in enumerate(lengths)],
    )


def star(lengths: Sequence[float]) -> MetricGraph:
    return build_graph(
        ["c", *[f"l{i + 1}" for i in range(len(lengths))]],
        [(f"e{i + 1}", "c", f"l{i + 1}", float(x)) for i, x in enumerate(lengths)],
    )


def tadpole(loop: float = 2 * math.pi, tail: float = 2 * math.pi) -> MetricGraph:
    """A loop at vertex ``a`` with a pendant edge to ``b``."""
    return build_graph(["a", "b"], [("loop", "a", "a", loop), ("tail", "a", "b", tail)])


def _prufer_edges(seq: Sequence[int], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [i for i in range(n) if degree[i] == 1]
    edges.append((u, w))
    return edges


def random_tree(n_edges: int, seed: int, lo: float = 0.5, hi: float = 1.5) -> MetricGraph:
    """Uniformly random labelled tree (Pruefer sequence) with lengths in [lo, hi]."""
    if n_edges < 1:
        raise ValueError("a tree needs at least one edge")
    rng = LCG(seed)
    n = n_edges + 1
    seq = [rng.randrange(n) for _ in range(n - 2)]
    pairs = _prufer_edges(seq, n)
    vs = [f"v{i}" for i in range(n)]
    es = [
        (f"e{i + 1}", f"v{min(a, b)}", f"v{max(a, b)}", rng.uniform(lo, hi))
        for i, (a, b) in enumerate(pairs)
    ]
    return build_graph(vs, es)


def random_graph(n_edges: int, beta: int, seed: int, lo: float = 0.5, hi: float = 1.5) -> MetricGraph:
    """Random tree plus ``beta`` extra edges (loops and parallel edges allowed)."""
    if beta < 0 or n_edges - beta < 1:
        raise ValueError("need 0 <= beta < n_edges")
    base = random_tree(n_edges - beta, seed, lo, hi)
    rng = LCG(seed + 0x5EED)
    vs = list(base.vertices)
    es = [(e.id, e.source, e.target, e.length) for e in base.edges]
    for j in range(beta):
        a, b = vs[rng.randrange(len(vs))], vs[rng.randrange(len(vs))]
        es.append((f"c{j + 1}", a, b, rng.uniform(lo, hi)))
    return build_graph(vs, es)


def random_trees(count: int, seed: int, max_edges: int = 5, min_edges: int = 2) -> list[MetricGraph]:
    """``count`` reproducible random trees with edge counts in [min_edges, max_edges]."""
    rng = LCG(seed)
    out = []
    for i in range(count):
        m = min_edges + rng.randrange(max_edges - min_edges + 1)
        out.append(random_tree(m, rng.next_u64() & 0xFFFFFFFF))
    return out


ZOO = ("path", "star3", "tadpole", "random-tree")


def from_zoo(
    name: str,
    length: float | None = None,
    lengths: Sequence[float] | None = None,
    eps: float | None = None,
    seed: int = 0,
    edges: int = 4,
) -> MetricGraph:
    if name == "path":
        return path(length if length is not None else 1.0)
    if name == "star3":
        if lengths is None and eps is None:
            eps = 0.0
        return star3(lengths, eps)
    if name == "tadpole":
        if lengths:
            return tadpole(*lengths)
        return tadpole()
    if name == "random-tree":
        return random_tree(edges, seed)
    raise KeyError(f"unknown zoo graph {name!r}; choose from {', '.join(ZOO)}")
