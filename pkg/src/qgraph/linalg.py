"""Dense SVD for the small square matrices produced by the secular solver.

Golub-Kahan-Reinsch: Householder reduction to upper bidiagonal form, then
implicitly shifted QR sweeps on the bidiagonal until every superdiagonal
entry is negligible. Only right singular vectors are accumulated; the
solver needs null vectors, never the left basis.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure

EPS = np.finfo(float).eps
MAX_SWEEPS_PER_VALUE = 75


def _householder(x: np.ndarray) -> tuple[np.ndarray, float]:
    """Return (v, tau) with (I - tau v v^T) x = -sign(x0) |x| e0."""
    alpha = float(np.linalg.norm(x))
    v = x.astype(float).copy()
    if alpha == 0.0:
        return v, 0.0
    v[0] += math.copysign(alpha, v[0] if v[0] != 0 else 1.0)
    vv = float(v @ v)
    return v, 2.0 / vv


def bidiagonalize(a: np.ndarray, want_v: bool = True) -> tuple[np.ndarray, np.ndarray | None]:
    """Reduce square ``a`` to upper bidiagonal ``b = U^T a V``."""
    b = np.array(a, dtype=float, copy=True)
    n = b.shape[0]
    v_acc = np.eye(n) if want_v else None
    for j in range(n):
        h, tau = _householder(b[j:, j])
        if tau:
            b[j:, j:] -= tau * np.outer(h, h @ b[j:, j:])
        b[j + 1:, j] = 0.0
        if j < n - 2:
            h, tau = _householder(b[j, j + 1:])
            if tau:
                b[j:, j + 1:] -= tau * np.outer(b[j:, j + 1:] @ h, h)
                if v_acc is not None:
                    v_acc[:, j + 1:] -= tau * np.outer(v_acc[:, j + 1:] @ h, h)
            b[j, j + 2:] = 0.0
    return b, v_acc


def _rot(f: float, g: float) -> tuple[float, float, float]:
    if g == 0.0:
        return 1.0, 0.0, f
    r = math.hypot(f, g)
    return f / r, g / r, r


def svd(a: np.ndarray, want_v: bool = True) -> tuple[np.ndarray, np.ndarray | None]:
    """Singular values (descending) and, optionally, right singular vectors.

    Returns ``(s, V)`` with ``a @ V[:, i]`` of norm ``s[i]``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("svd expects a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0)) if want_v else None
    b, v_acc = bidiagonalize(a, want_v)
    d = [float(b[i, i]) for i in range(n)]
    e = [float(b[i, i + 1]) for i in range(n - 1)] + [0.0]
    scale = max(max(abs(x) for x in d), max(abs(x) for x in e), 1e-300)
    tol = EPS * scale

    def right(i: int, j: int, c: float, s: float) -> None:
        # new col i = c col i + s col j ; new col j = -s col i + c col j
        if v_acc is not None:
            vi = v_acc[:, i].copy()
            v_acc[:, i] = c * vi + s * v_acc[:, j]
            v_acc[:, j] = -s * vi + c * v_acc[:, j]

    iters = 0
    max_iters = MAX_SWEEPS_PER_VALUE * n
    while True:
        for i in range(n - 1):
            if abs(e[i]) <= EPS * (abs(d[i]) + abs(d[i + 1])) or abs(e[i]) <= tol * EPS:
                e[i] = 0.0
        for i in range(n):
            if abs(d[i]) <= tol:
                d[i] = 0.0
        q = n - 1
        while q > 0 and e[q - 1] == 0.0:
            q -= 1
        if q == 0:
            break
        p = q - 1
        while p > 0 and e[p - 1] != 0.0:
            p -= 1
        iters += 1
        if iters > max_iters:
            raise ConvergenceFailure(f"bidiagonal QR did not converge in {max_iters} sweeps")

        zero_at = next((i for i in range(p, q) if d[i] == 0.0), None)
        if zero_at is not None:
            # chase e[zero_at] to the right with left rotations; V untouched
            i = zero_at
            f = e[i]
            e[i] = 0.0
            for j in range(i + 1, q + 1):
                c, s, r = _rot(d[j], f)
                d[j] = r
                if j < q:
                    f = -s * e[j]
                    e[j] = c * e[j]
            continue
        if d[q] == 0.0:
            # chase e[q-1] upwards with right rotations
            f = e[q - 1]
            e[q - 1] = 0.0
            for j in range(q - 1, p - 1, -1):
                c, s, r = _rot(d[j], f)
                d[j] = r
                right(j, q, c, s)
                if j > p:
                    f = -s * e[j - 1]
                    e[j - 1] = c * e[j - 1]
            continue

        # Wilkinson shift from the trailing 2x2 block of B^T B
        t11 = d[q - 1] ** 2 + (e[q - 2] ** 2 if q - 1 > p else 0.0)
        t12 = d[q - 1] * e[q - 1]
        t22 = d[q] ** 2 + e[q - 1] ** 2
        delta = 0.5 * (t11 - t22)
        if t12 == 0.0:
            mu = t22
        else:
            mu = t22 - t12 * t12 / (delta + math.copysign(math.hypot(delta, t12), delta if delta else 1.0))
        y = d[p] * d[p] - mu
        z = d[p] * e[p]
        for k in range(p, q):
            c, s, r = _rot(y, z)
            if k > p:
                e[k - 1] = r
            # right rotation on columns k, k+1
            dk, ek, dk1 = d[k], e[k], d[k + 1]
            d[k] = c * dk + s * ek
            e[k] = -s * dk + c * ek
            bulge = s * dk1
            d[k + 1] = c * dk1
            right(k, k + 1, c, s)
            # left rotation on rows k, k+1 removes the bulge below the diagonal
            c, s, r = _rot(d[k], bulge)
            d[k] = r
            ek, dk1 = e[k], d[k + 1]
            e[k] = c * ek + s * dk1
            d[k + 1] = -s * ek + c * dk1
            if k < q - 1:
                ek1 = e[k + 1]
                y, z = e[k], s * ek1
                e[k + 1] = c * ek1
    s_vals = np.abs(np.array(d))
    order = np.argsort(-s_vals, kind="stable")
    s_vals = s_vals[order]
    if v_acc is not None:
        v_acc = v_acc[:, order]
    return s_vals, v_acc


def smallest_singular_values(m: np.ndarray, count: int) -> list[float]:
    """The ``count`` smallest singular values of square ``m``, ascending."""
    s, _ = svd(m, want_v=False)
    return [float(x) for x in s[::-1][:count]]
