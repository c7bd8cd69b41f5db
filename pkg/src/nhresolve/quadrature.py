"""Vectorized quadrature primitives.

Global adaptive Gauss-Kronrod (7/15) for complex-valued integrands of a
real parameter, composite Gauss-Legendre panels, and two routes for
semi-infinite Fourier-type tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _si

__all__ = [
    "QuadratureError",
    "QuadResult",
    "gauss_kronrod",
    "gauss_legendre_panels",
    "fourier_tail",
    "ibp_tail_estimate",
]

# QUADPACK qk15 abscissae / weights (nonnegative half, last entry is the centre).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes sit at odd positions of the full 15-point layout.
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to meet its tolerance within the panel budget."""

    def __init__(self, message, *, worst_interval=None, error=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error = error


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    n_panels: int
    n_evals: int
    roundoff_limited: bool
    worst_interval: tuple[float, float]


def _kronrod_panels(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    vals = np.asarray(f(t), dtype=complex)
    if vals.shape != t.shape:
        vals = np.broadcast_to(vals, t.shape).astype(complex)
    if not np.all(np.isfinite(vals)):
        bad = t[~np.isfinite(vals)][0]
        raise FloatingPointError(f"non-finite integrand at t={bad!r}")
    k = half * (vals @ KRONROD_WEIGHTS)
    g = half * (vals @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(vals) @ KRONROD_WEIGHTS)
    mean = k / np.where(hi != lo, hi - lo, 1.0)
    resasc = np.abs(half) * (np.abs(vals - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    return k, np.maximum(err, floor), floor


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    breakpoints=None,
    n_init: int = 1,
    max_panels: int = 200_000,
) -> QuadResult:
    """Globally adaptive G7/K15 integration of a vectorized integrand.

    ``f`` receives an ndarray of real abscissae and must return an array of
    the same shape (complex values allowed). The interval is first split at
    ``breakpoints`` and then into ``n_init`` equal pieces; panels whose error
    exceeds their length-proportional share of the tolerance are bisected
    until the global estimate meets ``max(abs_tol, rel_tol*|I|)``. Panels
    whose error is at the roundoff floor are frozen.

    Raises:
        QuadratureError: panel budget exhausted before convergence.
    """
    if a == b:
        return QuadResult(0j, 0.0, 0, 0, False, (a, b))
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = [a]
    if breakpoints is not None:
        edges += sorted(float(p) for p in breakpoints if a < p < b)
    edges.append(b)
    edges = np.asarray(edges, dtype=float)
    n_init = max(int(n_init), 1)
    lo = np.concatenate([np.linspace(l, r, n_init + 1)[:-1] for l, r in zip(edges[:-1], edges[1:])])
    hi = np.concatenate([np.linspace(l, r, n_init + 1)[1:] for l, r in zip(edges[:-1], edges[1:])])

    done_val = 0j
    done_err = 0.0
    done_n = 0
    roundoff = False
    n_evals = 0
    width = b - a
    worst = (a, b)
    while True:
        k, err, floor = _kronrod_panels(f, lo, hi)
        n_evals += 15 * lo.size
        total = done_val + k.sum()
        total_err = done_err + err.sum()
        tol = max(abs_tol, rel_tol * abs(total))
        if total_err <= tol:
            break
        share = tol * (hi - lo) / width
        at_floor = err <= floor * 1.0000001
        split = (err > share) & ~at_floor & ((hi - lo) > 64 * _EPS * max(abs(a), abs(b), 1.0))
        if not split.any():
            roundoff = bool(at_floor.any())
            break
        keep = ~split
        done_val += k[keep].sum()
        done_err += err[keep].sum()
        done_n += int(keep.sum())
        i_worst = int(np.argmax(err))
        worst = (float(lo[i_worst]), float(hi[i_worst]))
        mid = 0.5 * (lo[split] + hi[split])
        lo, hi = np.concatenate([lo[split], mid]), np.concatenate([mid, hi[split]])
        if done_n + lo.size > max_panels:
            raise QuadratureError(
                f"adaptive quadrature did not converge within {max_panels} panels "
                f"(error {total_err:.3e} > {tol:.3e}); worst panel {worst}",
                worst_interval=worst,
                error=total_err,
            )
    i_worst = int(np.argmax(err)) if err.size else 0
    if err.size:
        worst = (float(lo[i_worst]), float(hi[i_worst]))
    return QuadResult(
        complex(sign * total), float(total_err), done_n + lo.size, n_evals, roundoff, worst
    )


def gauss_legendre_panels(f, edges, order: int = 20) -> complex:
    """Composite fixed-order Gauss-Legendre rule over consecutive ``edges``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.asarray(edges, dtype=float)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = mid[:, None] + half[:, None] * x[None, :]
    vals = np.asarray(f(t), dtype=complex)
    return complex(np.sum(half * (vals @ w)))


def _ray_tail(g, omega, L, tol):
    # Rotate onto L + i*s*sign(omega): the oscillation becomes exp(-|omega| s).
    direction = 1j if omega > 0 else -1j
    w = abs(omega)
    phase = np.exp(1j * omega * L)

    def integrand(s):
        x = L + direction * s
        return g(x) * np.exp(-w * s)

    s_max = 745.0 / w
    res = gauss_kronrod(integrand, 0.0, s_max, abs_tol=tol, rel_tol=tol,
                        breakpoints=[1.0 / w, 10.0 / w, 40.0 / w])
    return complex(direction * phase * res.value)


def _qawf_tail(g, omega, L, tol):
    w = abs(omega)

    def part(fn, weight):
        val, _ = _si.quad(fn, L, np.inf, weight=weight, wvar=w, epsabs=tol, limlst=200, limit=400)
        return val

    gr = lambda x: float(np.real(g(np.asarray(x))))
    gi = lambda x: float(np.imag(g(np.asarray(x))))
    cr, sr = part(gr, "cos"), part(gr, "sin")
    ci, si = part(gi, "cos"), part(gi, "sin")
    sgn = math.copysign(1.0, omega)
    # exp(i*omega*x) = cos(w x) + i*sgn*sin(w x)
    return complex(cr - sgn * si, sgn * sr + ci)


def fourier_tail(g, omega: float, L: float, side: str = "right", *, method: str = "ray", tol: float = 1e-13) -> complex:
    """Semi-infinite oscillatory tail ``int g(x) exp(i omega x) dx``.

    ``side="right"`` integrates over ``[L, inf)``, ``side="left"`` over
    ``(-inf, -L]``. ``method="ray"`` deforms onto a vertical ray and needs
    ``g`` analytic (and subexponential) on the half-plane beyond ``L``;
    ``method="qawf"`` uses QUADPACK's cycle-sum extrapolation on the real
    axis and only needs real-axis evaluation.
    """
    if omega == 0:
        raise ValueError("fourier_tail needs a nonzero frequency")
    if side == "left":
        return fourier_tail(lambda y: g(-y), -omega, L, "right", method=method, tol=tol)
    if side != "right":
        raise ValueError(f"unknown side {side!r}")
    if method == "ray":
        return _ray_tail(g, omega, L, tol)
    if method == "qawf":
        return _qawf_tail(g, omega, L, tol)
    raise ValueError(f"unknown tail method {method!r}")


def ibp_tail_estimate(g, omega: float, L: float, side: str = "right") -> float:
    """Leading integration-by-parts size ``|g(L)|/|omega|`` of an oscillatory tail."""
    x = L if side == "right" else -L
    return float(abs(g(np.asarray(x, dtype=float))) / abs(omega))
