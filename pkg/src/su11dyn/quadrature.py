"""Cumulative adaptive quadrature on [0, t_max].

The integrals Lambda(t) and R(t) are queried at arbitrary t many thousands of
times (every right-hand-side evaluation of the oracle needs Lambda), so they are
tabulated once on an adaptive mesh and completed locally with a fixed
Gauss-Legendre rule on the partial leaf.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import DomainError, ToleranceError

GL_ORDER = 10
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_EPS = np.finfo(float).eps


def as_vectorized(f: Callable) -> Callable[[np.ndarray], np.ndarray]:
    """Wrap ``f`` so that it maps a float array to a float array of the same shape.

    Numpy-aware callables are called once on the whole array, scalar-only ones
    are looped over; a scalar returned for array input is broadcast.
    """
    if getattr(f, "_vectorized", False):
        return f
    probe = np.array([0.0, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        native = out.shape in ((2,), ())
    except (TypeError, ValueError):
        native = False

    if native:
        def g(t):
            t = np.asarray(t, dtype=float)
            return np.broadcast_to(np.asarray(f(t), dtype=float), t.shape)
    else:
        def g(t):
            t = np.asarray(t, dtype=float)
            flat = np.fromiter((f(float(x)) for x in t.ravel()), dtype=float, count=t.size)
            return flat.reshape(t.shape)

    g._vectorized = True
    g.__wrapped__ = f
    return g


def gauss_legendre(f: Callable, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fixed-order Gauss-Legendre integrals of vectorized ``f`` over [a_i, b_i]."""
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    half = 0.5 * (b - a)
    pts = (0.5 * (a + b))[..., None] + half[..., None] * _GL_X
    vals = f(pts)
    return half * (vals @ _GL_W)


def _kahan_cumsum(x: np.ndarray) -> np.ndarray:
    out = np.empty(len(x) + 1)
    out[0] = 0.0
    s = c = 0.0
    for i, v in enumerate(x):
        y = v - c
        tmp = s + y
        c = (tmp - s) - y
        s = tmp
        out[i + 1] = s
    return out


class CumulativeIntegral:
    """Tabulated F(t) = int_0^t f(s) ds for 0 <= t <= t_max.

    The mesh starts with ``n_cells`` equal cells; a cell is bisected while the
    Gauss-Legendre estimate on the whole cell disagrees with the sum over its
    halves by more than its share of ``tol``.
    """

    def __init__(self, integrand: Callable, t_max: float, *, n_cells: int = 1024,
                 tol: float = 1e-10, max_depth: int = 30):
        if not t_max > 0:
            raise DomainError("t_max must be positive")
        self.f = as_vectorized(integrand)
        self.t_max = float(t_max)
        self.tol = tol
        edges, pieces, err = self._build(n_cells, max_depth)
        self.edges = edges
        self.values = _kahan_cumsum(pieces)
        self.est_error = err

    def _build(self, n_cells, max_depth):
        a = np.linspace(0.0, self.t_max, n_cells + 1)
        lo, hi = a[:-1], a[1:]
        leaves_lo, leaves_val, leaves_err = [], [], []
        for depth in range(max_depth + 1):
            mid = 0.5 * (lo + hi)
            whole = gauss_legendre(self.f, lo, hi)
            split = gauss_legendre(self.f, lo, mid) + gauss_legendre(self.f, mid, hi)
            if not np.all(np.isfinite(split)):
                bad = lo[~np.isfinite(split)][0]
                raise ToleranceError(f"integrand not finite near t={bad}")
            diff = np.abs(whole - split)
            local = np.maximum(self.tol * (hi - lo) / self.t_max, 64 * _EPS * np.abs(split))
            ok = diff <= local
            leaves_lo.append(np.stack([lo[ok], hi[ok]], axis=1))
            leaves_val.append(split[ok])
            leaves_err.append(diff[ok])
            if np.all(ok):
                break
            if depth == max_depth:
                total = float(np.sum(np.concatenate(leaves_val)) + np.sum(split[~ok]))
                raise ToleranceError(
                    f"quadrature did not converge on {int(np.sum(~ok))} cells "
                    f"(first near t={lo[~ok][0]:.6g})",
                    estimate=total,
                    error=float(np.sum(diff)),
                )
            lo, mid, hi = lo[~ok], mid[~ok], hi[~ok]
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        cells = np.concatenate(leaves_lo)
        vals = np.concatenate(leaves_val)
        errs = np.concatenate(leaves_err)
        order = np.argsort(cells[:, 0])
        edges = np.append(cells[order, 0], self.t_max)
        return edges, vals[order], float(np.sum(errs))

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * self.t_max
        if np.any(~np.isfinite(t)) or np.any(t < -slack) or np.any(t > self.t_max + slack):
            raise DomainError(f"t outside [0, {self.t_max}]")
        return np.clip(t, 0.0, self.t_max)

    def __call__(self, t):
        t = self._check(t)
        flat = np.atleast_1d(t).ravel()
        k = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        out = self.values[k] + gauss_legendre(self.f, self.edges[k], flat)
        return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)

    @property
    def n_leaves(self) -> int:
        return len(self.edges) - 1


def integrate(f: Callable, a: float, b: float, tol: float = 1e-12, max_depth: int = 40) -> float:
    """One-off adaptive Gauss-Legendre integral of ``f`` over [a, b]."""
    f = as_vectorized(f)

    def rec(lo, hi, whole, depth):
        mid = 0.5 * (lo + hi)
        left = float(gauss_legendre(f, lo, mid)[0])
        right = float(gauss_legendre(f, mid, hi)[0])
        if abs(left + right - whole) <= max(tol, 64 * _EPS * abs(whole)) or depth >= max_depth:
            if depth >= max_depth and abs(left + right - whole) > tol:
                raise ToleranceError("integrate: no convergence", estimate=left + right,
                                     error=abs(left + right - whole))
            return left + right
        return rec(lo, mid, left, depth + 1) + rec(mid, hi, right, depth + 1)

    if not math.isfinite(b - a):
        raise DomainError("integration bounds must be finite")
    if a == b:
        return 0.0
    return rec(a, b, float(gauss_legendre(f, a, b)[0]), 0)
