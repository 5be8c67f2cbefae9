"""Laplacian eigenvalues and eigenfunctions on metric graphs.

On every edge an eigenfunction for ``mu = k**2 > 0`` is
``A cos(kx) + B sin(kx)``. Stacking the vertex conditions (continuity and
Kirchhoff at standard vertices, vanishing values at Dirichlet vertices)
gives a ``2|E| x 2|E|`` matrix ``M(k)`` whose null space is the eigenspace.
Derivative rows are divided by ``k`` so the entries stay bounded.

Eigenvalues are located by scanning the smallest singular value of
``M(k)`` and refining its local minima by golden-section search. An exact
eigenvalue counting function (inertia of the vertex Dirichlet-to-Neumann
matrix plus the Dirichlet spectra of the edges) guards against roots the
scan steps over.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from . import linalg
from .errors import ConvergenceFailure, RankMismatch, ScanExhausted
from .graph import GraphPoint, MetricGraph

log = logging.getLogger(__name__)

TOL_RANK = 1e-8
TOL_COND = 1e-8
REFINE_RTOL = 1e-12
SCAN_OVERSAMPLING = 16
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _near_resonance(kl: np.ndarray) -> np.ndarray:
    """Edges with ``k l`` within 1e-9 of a positive multiple of pi."""
    j = np.round(kl / math.pi)
    return (j >= 1) & (np.abs(kl - j * math.pi) < 1e-9 * np.maximum(kl, 1.0))


@dataclass(frozen=True)
class BoundaryCondition:
    dirichlet: frozenset[str] = frozenset()

    @classmethod
    def standard(cls) -> "BoundaryCondition":
        return cls()

    @classmethod
    def on(cls, vertices: Iterable[str]) -> "BoundaryCondition":
        return cls(frozenset(vertices))

    @classmethod
    def topological(cls, g: MetricGraph) -> "BoundaryCondition":
        """Dirichlet on every degree-one vertex."""
        return cls(frozenset(g.leaves()))


STANDARD = BoundaryCondition()


@dataclass(frozen=True)
class Eigenfunction:
    """Edgewise trigonometric function; ``coeffs[e] = (A, B)``."""

    k: float
    coeffs: Mapping[str, tuple[float, float]]

    @property
    def mu(self) -> float:
        return self.k * self.k

    def value(self, edge: str, x: float) -> float:
        a, b = self.coeffs[edge]
        if self.k == 0.0:
            return a + b * x
        return a * math.cos(self.k * x) + b * math.sin(self.k * x)

    def derivative(self, edge: str, x: float) -> float:
        a, b = self.coeffs[edge]
        if self.k == 0.0:
            return b
        k = self.k
        return k * (-a * math.sin(k * x) + b * math.cos(k * x))

    def scaled(self, c: float) -> "Eigenfunction":
        return Eigenfunction(self.k, {e: (c * a, c * b) for e, (a, b) in self.coeffs.items()})

    def amplitude(self, edge: str) -> float:
        a, b = self.coeffs[edge]
        return math.hypot(a, b)


@dataclass(frozen=True)
class Eigenpair:
    k: float
    multiplicity: int
    basis: tuple[Eigenfunction, ...] = field(default=(), compare=False)

    @property
    def mu(self) -> float:
        return self.k * self.k


class Skeleton:
    """Length-independent structure of a graph with a Dirichlet set.

    Solvers take edge lengths separately, so clusters whose topology stays
    fixed while cut positions move can reuse one skeleton.
    """

    def __init__(self, g: MetricGraph, bc: BoundaryCondition = STANDARD):
        self.graph = g
        self.bc = bc
        self.edge_ids = [e.id for e in g.edges]
        col = {e.id: i for i, e in enumerate(g.edges)}
        free = [v for v in g.vertices if v not in bc.dirichlet]
        fidx = {v: i for i, v in enumerate(free)}
        self.n_free = len(free)
        self.src = np.array([fidx.get(e.source, -1) for e in g.edges], dtype=int)
        self.dst = np.array([fidx.get(e.target, -1) for e in g.edges], dtype=int)
        self.loop = np.array([e.is_loop for e in g.edges], dtype=bool)
        self.lengths = np.array([e.length for e in g.edges], dtype=float)
        ne = len(g.edges)
        n = 2 * ne
        const = np.zeros((n, n))
        cos_t = np.zeros((ne, n, n))
        sin_t = np.zeros((ne, n, n))

        def put_value(row: int, end: tuple[str, int], sign: float) -> None:
            i = col[end[0]]
            if end[1] == 0:
                const[row, 2 * i] += sign
            else:
                cos_t[i, row, 2 * i] += sign
                sin_t[i, row, 2 * i + 1] += sign

        def put_deriv(row: int, end: tuple[str, int]) -> None:
            i = col[end[0]]
            if end[1] == 0:
                const[row, 2 * i + 1] += 1.0
            else:
                sin_t[i, row, 2 * i] += 1.0
                cos_t[i, row, 2 * i + 1] -= 1.0

        row = 0
        for v in g.vertices:
            ends = g.ends[v]
            if v in bc.dirichlet:
                for end in ends:
                    put_value(row, end, 1.0)
                    row += 1
                continue
            for end in ends[1:]:
                put_value(row, end, 1.0)
                put_value(row, ends[0], -1.0)
                row += 1
            for end in ends:
                put_deriv(row, end)
            row += 1
        assert row == n
        self.const, self.cos_t, self.sin_t = const, cos_t, sin_t
        # sparse form of the templates for single-k assembly
        ce, cr, cc = np.nonzero(cos_t)
        se, sr, sc = np.nonzero(sin_t)
        self._size = n
        self._flat = np.concatenate([cr * n + cc, sr * n + sc])
        self._edge_c, self._val_c = ce, cos_t[ce, cr, cc]
        self._edge_s, self._val_s = se, sin_t[se, sr, sc]

    @property
    def standard(self) -> bool:
        return not self.bc.dirichlet

    def matrix(self, k: float, lengths: np.ndarray | None = None) -> np.ndarray:
        ls = self.lengths if lengths is None else lengths
        kl = k * ls
        w = np.concatenate([np.cos(kl)[self._edge_c] * self._val_c, np.sin(kl)[self._edge_s] * self._val_s])
        n = self._size
        return self.const + np.bincount(self._flat, weights=w, minlength=n * n).reshape(n, n)

    def stack(self, ks: np.ndarray, lengths: np.ndarray | None = None) -> np.ndarray:
        ls = self.lengths if lengths is None else lengths
        kl = np.outer(ks, ls)
        return (
            self.const[None]
            + np.tensordot(np.cos(kl), self.cos_t, axes=1)
            + np.tensordot(np.sin(kl), self.sin_t, axes=1)
        )

    def det(self, k: float, lengths: np.ndarray | None = None) -> float:
        return float(np.linalg.det(self.matrix(k, lengths)))

    def count_below(self, k: float, lengths: np.ndarray | None = None) -> int:
        """Number of eigenvalues (with multiplicity) strictly below ``k**2``.

        Splits H^1 into functions vanishing at all vertices and k-harmonic
        extensions of vertex values; the two pieces are orthogonal for the
        form ``q(f) = |f'|^2 - k^2 |f|^2`` so the negative indices add up.
        """
        ls = self.lengths if lengths is None else lengths
        if k <= 0.0:
            return 0
        kl = k * ls
        # stay off edge Dirichlet eigenvalues; stepping down keeps "strictly below"
        while np.any(_near_resonance(kl)):
            k *= 1.0 - 1e-9
            kl = k * ls
        n_edge = int(np.sum(np.ceil(kl / math.pi) - 1.0))
        if self.n_free == 0:
            return n_edge
        s = np.sin(kl)
        cot = k * np.cos(kl) / s
        csc = k / s
        q = np.zeros((self.n_free, self.n_free))
        for i in range(len(ls)):
            a, b = self.src[i], self.dst[i]
            if self.loop[i]:
                if a >= 0:
                    q[a, a] += 2.0 * (cot[i] - csc[i])
                continue
            if a >= 0:
                q[a, a] += cot[i]
            if b >= 0:
                q[b, b] += cot[i]
            if a >= 0 and b >= 0:
                q[a, b] -= csc[i]
                q[b, a] -= csc[i]
        return n_edge + int(np.sum(np.linalg.eigvalsh(q) < 0.0))

    def nth_wavenumber(self, n: int, lengths: np.ndarray | None = None, guess: float | None = None) -> float:
        """Wavenumber of the n-th eigenvalue (1-based, with multiplicity).

        Bisection on the counting function until one simple eigenvalue is
        isolated, then Brent on ``det M(k)``, which changes sign there.
        ``guess`` (e.g. the value for nearby lengths) narrows the first bracket.
        """
        ls = self.lengths if lengths is None else lengths
        if n == 1 and self.standard:
            return 0.0
        total = float(np.sum(ls))
        floor = 1e-3 * math.pi / total
        if guess is not None and guess > floor:
            lo, hi = 0.98 * guess, 1.02 * guess
        else:
            lo, hi = floor, math.pi / total
        n_lo = self.count_below(lo, ls)
        while n_lo >= n:
            if lo <= floor:
                raise ConvergenceFailure("eigenvalue below the bracketing floor")
            hi, lo = lo, max(0.5 * lo, floor)
            n_lo = self.count_below(lo, ls)
        n_hi = self.count_below(hi, ls)
        while n_hi < n:
            lo, n_lo = hi, n_hi
            hi *= 2.0
            n_hi = self.count_below(hi, ls)
        while True:
            if n_lo == n - 1 and n_hi == n:
                return _isolated_root(self, lo, hi, ls)
            if hi - lo <= 1e-13 * hi:
                return 0.5 * (lo + hi)
            mid = 0.5 * (lo + hi)
            n_mid = self.count_below(mid, ls)
            if n_mid >= n:
                hi, n_hi = mid, n_mid
            else:
                lo, n_lo = mid, n_mid


def secular_matrix(g: MetricGraph, bc: BoundaryCondition, k: float) -> np.ndarray:
    if k <= 0:
        raise ValueError("secular matrix needs k > 0")
    return Skeleton(g, bc).matrix(k)


def smallest_singular_values(m: np.ndarray, count: int) -> list[float]:
    return linalg.smallest_singular_values(m, count)


def count_below(g: MetricGraph, bc: BoundaryCondition, k: float) -> int:
    return Skeleton(g, bc).count_below(k)


def nth_eigenvalue(g: MetricGraph, bc: BoundaryCondition, n: int) -> float:
    """The n-th eigenvalue ``mu_n`` (or ``lambda_n`` for a Dirichlet set)."""
    k = Skeleton(g, bc).nth_wavenumber(n)
    return k * k


def _sigma_ratio(m: np.ndarray) -> np.ndarray:
    s = np.linalg.svd(m, compute_uv=False)
    return s[..., -1] / s[..., 0]


def _golden_min(f, a: float, b: float, rtol: float) -> float:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(400):
        if b - a <= rtol * abs(b):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    else:
        raise ConvergenceFailure("golden-section refinement did not converge")
    return c if fc <= fd else d


def _isolated_root(sk: Skeleton, lo: float, hi: float, ls: np.ndarray | None = None) -> float:
    """The single eigenvalue in (lo, hi).

    ``det M`` changes sign across a simple root. Near a multiple root the
    count can round to one, and then the determinant only touches zero, so
    fall back to minimising the singular value ratio.
    """
    ls = sk.lengths if ls is None else ls
    f_lo, f_hi = sk.det(lo, ls), sk.det(hi, ls)
    if f_lo * f_hi < 0.0:
        return brentq(lambda x: sk.det(x, ls), lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps)
    # the count steps k down by up to 1e-9 relative near edge resonances
    pad = 4e-9 * hi
    return _golden_min(lambda x: float(_sigma_ratio(sk.matrix(x, ls))), max(lo - pad, 0.5 * lo), hi + pad, REFINE_RTOL)


def _null_vectors(sk: Skeleton, k: float) -> np.ndarray:
    s, v = linalg.svd(sk.matrix(k))
    keep = s < TOL_RANK * s[0]
    return v[:, keep]


def _l2_gram(ls: np.ndarray, k: float, vecs: np.ndarray) -> np.ndarray:
    a = vecs[0::2]
    b = vecs[1::2]
    if k == 0.0:
        icc, iss, ics = ls, ls**3 / 3.0, ls**2 / 2.0
    else:
        icc = ls / 2.0 + np.sin(2 * k * ls) / (4 * k)
        iss = ls / 2.0 - np.sin(2 * k * ls) / (4 * k)
        ics = np.sin(k * ls) ** 2 / (2 * k)
    return (
        a.T @ (icc[:, None] * a)
        + b.T @ (iss[:, None] * b)
        + a.T @ (ics[:, None] * b)
        + b.T @ (ics[:, None] * a)
    )


def l2_inner(g: MetricGraph, f: Eigenfunction, h: Eigenfunction) -> float:
    if f.k != h.k:
        raise ValueError("inner product implemented for a common wavenumber")
    ls = np.array([e.length for e in g.edges])
    vf = np.array([c for e in g.edges for c in f.coeffs[e.id]])
    vh = np.array([c for e in g.edges for c in h.coeffs[e.id]])
    return float(_l2_gram(ls, f.k, np.stack([vf, vh], axis=1))[0, 1])


def _to_functions(sk: Skeleton, k: float, vecs: np.ndarray) -> tuple[Eigenfunction, ...]:
    """L2-orthonormalize coefficient vectors and fix signs."""
    # Gram-Schmidt in the L2 metric, column order preserved
    out = []
    basis = vecs.copy()
    for j in range(basis.shape[1]):
        w = basis[:, j].copy()
        for u in out:
            w -= (_l2_gram(sk.lengths, k, np.stack([u, w], axis=1))[0, 1]) * u
        nrm = math.sqrt(max(_l2_gram(sk.lengths, k, w[:, None])[0, 0], 0.0))
        if nrm == 0.0:
            raise RankMismatch("degenerate null vector")
        w /= nrm
        big = np.abs(w) > 1e-9 * np.max(np.abs(w))
        if w[np.argmax(big)] < 0:
            w = -w
        out.append(w)
    return tuple(
        Eigenfunction(k, {eid: (float(w[2 * i]), float(w[2 * i + 1])) for i, eid in enumerate(sk.edge_ids)})
        for w in out
    )


def _constant_pair(g: MetricGraph) -> Eigenpair:
    c = 1.0 / math.sqrt(g.total_length)
    return Eigenpair(0.0, 1, (Eigenfunction(0.0, {e.id: (c, 0.0) for e in g.edges}),))


def _find_roots_by_count(sk: Skeleton, lo: float, hi: float, n_lo: int, n_hi: int) -> list[tuple[float, int]]:
    """All eigenvalues in [lo, hi) located with the counting function."""
    if n_hi <= n_lo:
        return []
    if hi - lo <= 1e-12 * hi:
        return [(0.5 * (lo + hi), n_hi - n_lo)]
    if n_hi - n_lo == 1:
        return [(_isolated_root(sk, lo, hi), 1)]
    mid = 0.5 * (lo + hi)
    n_mid = sk.count_below(mid)
    return _find_roots_by_count(sk, lo, mid, n_lo, n_mid) + _find_roots_by_count(sk, mid, hi, n_mid, n_hi)


def _scan_roots(sk: Skeleton, n_max: int, have: int) -> list[tuple[float, int]]:
    total = float(np.sum(sk.lengths))
    dk = math.pi / (SCAN_OVERSAMPLING * total)
    k_cap = 4.0 * math.pi * (n_max + 1) / total
    roots: list[tuple[float, int]] = []
    found = have
    chunk = 256
    j0 = 1
    prev_k: list[float] = []
    prev_s: list[float] = []
    ratio = lambda x: float(_sigma_ratio(sk.matrix(x)))  # noqa: E731
    while found < n_max:
        if j0 * dk > k_cap:
            raise ScanExhausted(f"only {found} of {n_max} eigenvalues below k_cap={k_cap:.6g}")
        ks = dk * np.arange(j0, j0 + chunk)
        sig = _sigma_ratio(sk.stack(ks))
        all_k = prev_k + list(ks)
        all_s = prev_s + list(sig)
        for j in range(1, len(all_k) - 1):
            if not (all_s[j - 1] > all_s[j] <= all_s[j + 1]):
                continue
            k = _golden_min(ratio, all_k[j - 1], all_k[j + 1], REFINE_RTOL)
            s_all, _ = linalg.svd(sk.matrix(k), want_v=False)
            mult = int(np.sum(s_all < TOL_RANK * s_all[0]))
            if mult:
                roots.append((k, mult))
                found += mult
                if found >= n_max:
                    break
        prev_k, prev_s = all_k[-2:], all_s[-2:]
        j0 += chunk
    return roots


def _repair(sk: Skeleton, roots: list[tuple[float, int]], base: int, n_max: int) -> list[tuple[float, int]]:
    """Cross-check scan results against the exact counting function.

    Between consecutive roots the count must grow by exactly the
    multiplicity found; any interval where it does not is re-solved by
    bisection on the count.
    """
    roots = sorted(roots)
    total = float(np.sum(sk.lengths))
    lo = 1e-3 * math.pi / total
    n_lo = base
    out: list[tuple[float, int]] = []
    for i, (k, m) in enumerate(roots):
        probe = 0.5 * (k + roots[i + 1][0]) if i + 1 < len(roots) else k * (1 + 1e-7)
        n_probe = sk.count_below(probe)
        if n_probe == n_lo + m:
            out.append((k, m))
        else:
            log.info("count guard: re-solving (%.6g, %.6g), scan %d vs count %d", lo, probe, n_lo + m, n_probe)
            out.extend(_find_roots_by_count(sk, lo, probe, n_lo, n_probe))
        lo, n_lo = probe, n_probe
    hi = max(lo, math.pi / total)
    while n_lo < n_max:
        hi *= 1.5
        n_hi = sk.count_below(hi)
        out.extend(_find_roots_by_count(sk, lo, hi, n_lo, n_hi))
        lo, n_lo = hi, n_hi
    return out


def eigenvalues(g: MetricGraph, bc: BoundaryCondition = STANDARD, n_max: int = 6) -> list[Eigenpair]:
    """First eigenvalues up to ``n_max`` counted with multiplicity.

    Each distinct eigenvalue appears once, with its multiplicity and an
    L2-orthonormal eigenbasis; the last pair may push the total past n_max.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    sk = Skeleton(g, bc)
    pairs: list[Eigenpair] = []
    base = 0
    if sk.standard:
        pairs.append(_constant_pair(g))
        base = 1
    if base >= n_max:
        return pairs
    roots = _scan_roots(sk, n_max, base)
    roots = _repair(sk, roots, base, n_max)
    total = base
    for k, m in roots:
        vecs = _null_vectors(sk, k)
        if vecs.shape[1] != m:
            raise RankMismatch(f"k={k}: multiplicity {m} but {vecs.shape[1]} null vectors")
        pairs.append(Eigenpair(k, m, _to_functions(sk, k, vecs)))
        total += m
        if total >= n_max:
            break
    return pairs


def eigenvalue_list(pairs: Sequence[Eigenpair], n_max: int | None = None) -> list[float]:
    """Expand pairs into eigenvalues repeated by multiplicity."""
    out = [p.mu for p in pairs for _ in range(p.multiplicity)]
    return out[:n_max] if n_max else out


def pair_for_index(pairs: Sequence[Eigenpair], n: int) -> tuple[Eigenpair, int]:
    """Pair holding the n-th eigenvalue (1-based) and the first index of that pair."""
    first = 1
    for p in pairs:
        if n < first + p.multiplicity:
            return p, first
        first += p.multiplicity
    raise IndexError(f"eigenvalue index {n} beyond computed range")


def eigenfunction_basis(g: MetricGraph, bc: BoundaryCondition, pair: Eigenpair) -> tuple[Eigenfunction, ...]:
    if pair.k == 0.0:
        if bc.dirichlet:
            raise RankMismatch("zero is not an eigenvalue with a Dirichlet set")
        return _constant_pair(g).basis
    sk = Skeleton(g, bc)
    vecs = _null_vectors(sk, pair.k)
    if vecs.shape[1] != pair.multiplicity:
        raise RankMismatch(f"expected {pair.multiplicity} null vectors, found {vecs.shape[1]}")
    return _to_functions(sk, pair.k, vecs)


def evaluate(f: Eigenfunction, p: GraphPoint) -> tuple[float, float]:
    return f.value(p.edge, p.x), f.derivative(p.edge, p.x)


def vertex_residual(g: MetricGraph, bc: BoundaryCondition, f: Eigenfunction) -> float:
    """Largest violation of the vertex conditions, relative to max amplitude."""
    scale = max(f.amplitude(e.id) for e in g.edges) or 1.0
    kscale = max(f.k, 1.0 / g.total_length)
    worst = 0.0
    for v in g.vertices:
        vals, ders = [], []
        for eid, end in g.ends[v]:
            x = 0.0 if end == 0 else g.edge(eid).length
            vals.append(f.value(eid, x))
            d = f.derivative(eid, x)
            ders.append(d if end == 0 else -d)
        if v in bc.dirichlet:
            worst = max(worst, max(abs(x) for x in vals) / scale)
        else:
            worst = max(worst, (max(vals) - min(vals)) / scale, abs(sum(ders)) / (kscale * scale))
    return worst


def eigenvalue_count_check(g: MetricGraph, bc: BoundaryCondition, kmax: float) -> dict:
    """Weyl-law sanity check on the number of wavenumbers up to ``kmax``."""
    L = g.total_length
    guess = int(L * kmax / math.pi) + 2 * (len(g.edges) + len(g.vertices)) + 4
    pairs = eigenvalues(g, bc, guess)
    found = sum(p.multiplicity for p in pairs if p.k <= kmax * (1 + 1e-8))
    weyl = L * kmax / math.pi
    bound = 2 * (len(g.edges) + len(g.vertices))
    exact = Skeleton(g, bc).count_below(kmax * (1 + 1e-8))
    return {
        "kmax": kmax,
        "count": found,
        "weyl": weyl,
        "bound": bound,
        "exact_count": exact,
        "ok": abs(found - weyl) <= bound,
        "missed_root_suspected": found != exact,
    }


def sample_eigenfunction(g: MetricGraph, f: Eigenfunction, samples: int) -> list[tuple[str, float, float, float]]:
    """Uniform samples per edge, endpoints included: (edge_id, x, value, derivative)."""
    if samples < 2:
        raise ValueError("need at least 2 samples per edge")
    rows = []
    for e in g.edges:
        for x in np.linspace(0.0, e.length, samples):
            rows.append((e.id, float(x), f.value(e.id, float(x)), f.derivative(e.id, float(x))))
    return rows


def _path_ends(g: MetricGraph) -> tuple[str, str] | None:
    """End vertices of a path graph, or None if ``g`` is not a path."""
    if not g.is_path:
        return None
    if len(g.vertices) == 1:
        return None
    leaves = g.leaves()
    return (leaves[0], leaves[1]) if len(leaves) == 2 else None


def mu2(g: MetricGraph) -> float:
    """Spectral gap ``mu_2`` under standard conditions (closed form on paths)."""
    if _path_ends(g) is not None:
        return (math.pi / g.total_length) ** 2
    return Skeleton(g).nth_wavenumber(2) ** 2


def lambda1(g: MetricGraph, dirichlet: Iterable[str]) -> float:
    """Ground state with Dirichlet conditions on ``dirichlet`` (closed form on paths)."""
    bc = BoundaryCondition.on(dirichlet)
    if not bc.dirichlet:
        raise ValueError("lambda_1 needs a nonempty Dirichlet set")
    ends = _path_ends(g)
    if ends is not None and bc.dirichlet <= set(ends):
        L = g.total_length
        return (math.pi / L) ** 2 if len(bc.dirichlet) == 2 else (math.pi / (2.0 * L)) ** 2
    return Skeleton(g, bc).nth_wavenumber(1) ** 2
