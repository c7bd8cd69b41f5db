"""Pairings of kernel families with test functions and their limits.

A probe evaluates ``(K_p, phi)`` along a parameter grid (``A -> inf`` or
``eps -> 0``), extrapolates, fits a power-law rate and classifies the
behaviour into a :class:`ConvergenceReport` verdict.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .kernels import (
    ExpSum,
    XKernel,
    _psi0_expsum,
    _psi1_expsum,
    cosine_band,
    cosine_band_expsum,
    edge_kernel_slice,
    inner_kernel_slice,
    kpow_psi_edge,
    biortho_partial_closed,
)
from .models import EdgeModel, InnerModel, psi0_inner, psi1_inner, psi_edge
from .quadrature import fourier_tail, gauss_kronrod
from .testspace import TestFunction, cutoff_split, eta_window, membership_check, slow_growth_fn

__all__ = [
    "ConvergenceReport",
    "PairResult",
    "PreconditionError",
    "TruncationError",
    "DEFAULT_A_GRID",
    "DEFAULT_EPS_GRID",
    "pair",
    "richardson",
    "fit_rate",
    "classify",
    "delta_probe",
    "slow_growth_probe",
    "vanishing_family",
    "vanishing_probe",
    "boundary_family",
    "boundary_weak_limit_probe",
    "infinity_kernel",
    "infinity_functional_probe",
    "locality_at_infinity_check",
    "witness_search",
    "biortho_smeared_probe",
    "VANISHING_THRESHOLDS",
]

DEFAULT_A_GRID = (25.0, 50.0, 100.0, 200.0, 400.0)
DEFAULT_EPS_GRID = (0.2, 0.1, 0.05, 0.025, 0.0125)
NOISE_FLOOR = 1e-12
STRETCH_T = 40.0


def _tail_start(xp, eps, power=1.0):
    # tail pieces cancel like (eps L)^(-1/power); psi0-based families tolerate power 1/2
    return abs(xp) + STRETCH_T / eps**power

VANISHING_THRESHOLDS = {
    "L3.7": -1.0,
    "L3.8": 1.0,
    "L3.9": 3.0,
    "L3.10": 3.0,
    "L4.6": -1.0,
    "L4.7": -1.0,
    "L4.8": 1.0,
}


class PreconditionError(ValueError):
    """A probe precondition (growth class, grid shape, parameter range) failed."""


class TruncationError(RuntimeError):
    def __init__(self, message, suggested_R):
        super().__init__(message)
        self.suggested_R = suggested_R


# --- pairing ---------------------------------------------------------------

@dataclass(frozen=True)
class PairResult:
    value: complex
    error: float
    tail: float
    method: str


def _geometric_points(center: float, lo: float, hi: float, base: float = 1.0) -> list:
    pts = [center]
    r = base
    while r < max(hi - center, center - lo):
        pts += [center - r, center + r]
        r *= 2.0
    return [p for p in pts if lo < p < hi]


def _central(f, a, b, freq, breakpoints, tol, stretch=None):
    if a >= b:
        return 0j, 0.0
    bps = set()
    for p in breakpoints:
        bps.update(_geometric_points(p, a, b))
    bps.update(_geometric_points(0.0, a, b))
    bps = sorted(bps)
    if stretch is not None:
        # integrate in t = scale (x - center) so eps-families live on a fixed t-range
        c, s = stretch
        g = lambda t: f(c + t / s) / s
        ta, tb = s * (a - c), s * (b - c)
        tbps = [s * (p - c) for p in bps]
        n_init = max(1, int(math.ceil((tb - ta) * max(freq / s, 0.0) / math.pi)))
        res = gauss_kronrod(g, ta, tb, abs_tol=tol, rel_tol=1e-12, breakpoints=tbps, n_init=min(n_init, 4000))
        return res.value, res.error
    n_init = max(1, int(math.ceil((b - a) * freq / math.pi)))
    n_init = max(1, min(n_init // max(len(bps) + 1, 1), 20000))
    res = gauss_kronrod(f, a, b, abs_tol=tol, rel_tol=1e-12, breakpoints=bps, n_init=n_init)
    return res.value, res.error


def _phi_expsum(phi: TestFunction, side: str):
    terms = phi.tail_terms(side)
    if terms is None:
        return None
    out = ExpSum()
    for k0, amp in terms:
        out = out + ExpSum.of(amp, k0, analytic=True)
    return out


def _plain_tail(g, L, side, tol):
    # int_L^inf g(x) dx through x = L / s
    sgn = 1.0 if side == "right" else -1.0

    def h(s):
        s = np.asarray(s)
        x = sgn * L / s
        return g(x) * L / s**2

    lo = 1e-300
    res = gauss_kronrod(h, lo, 1.0, abs_tol=tol, rel_tol=1e-12, n_init=8,
                        breakpoints=[1e-6, 1e-4, 1e-2, 0.1])
    return res.value


def _tail_estimate(f, R):
    xs = np.geomspace(R, 16 * R, 33)
    vals = np.concatenate([np.abs(f(xs)) * xs, np.abs(f(-xs)) * xs])
    return float(np.max(vals)), xs


def pair(
    kernel,
    phi: TestFunction,
    domain: str = "truncated",
    *,
    R: float | None = None,
    L: float | None = None,
    tol: float = 1e-11,
    tail_tol: float | None = 1e-6,
    stretch: tuple | None = None,
    tail_method: str | None = None,
) -> PairResult:
    """``int K(x) phi(x) dx`` for a kernel at fixed ``x'``.

    Args:
        kernel: an :class:`XKernel` or a vectorized callable of ``x``.
        phi: the test function.
        domain: ``"truncated"`` integrates over ``[-R, R]`` (``R`` defaults to
            the support of ``phi``) and reports a tail estimate;
            ``"oscillatory_tail"`` integrates ``[-L, L]`` directly and each
            side beyond ``L`` term by term from the exponential-sum forms of
            the kernel and of ``phi``.
        tol: absolute quadrature tolerance.
        tail_tol: raise :class:`TruncationError` when the truncated tail
            estimate exceeds it (``None`` disables).
        stretch: ``(center, scale)``: integrate the central part in
            ``t = scale (x - center)``.
        tail_method: force ``"ray"`` or ``"qawf"`` for oscillatory tails.

    Raises:
        TruncationError: truncated tail estimate above ``tail_tol``.
        PreconditionError: tail data missing for ``"oscillatory_tail"``.
    """
    if isinstance(kernel, XKernel):
        kfun, freq, bps = kernel.func, kernel.freq, list(kernel.breakpoints)
    else:
        kfun, freq, bps = kernel, 0.0, []
    freq_total = freq + phi.freq
    f = lambda x: kfun(x) * phi(x)
    sup = phi.support
    if domain == "truncated":
        if R is None:
            if sup is None:
                raise PreconditionError("truncated pairing of a non-compact test function needs R")
            a, b = sup
            R = max(abs(a), abs(b))
            if not math.isfinite(R):
                raise PreconditionError("truncated pairing of a non-compact test function needs R")
        else:
            a, b = -R, R
            if sup is not None:
                a, b = max(a, sup[0]), min(b, sup[1])
        val, err = _central(f, a, b, freq_total, bps, tol, stretch)
        tail = 0.0
        if sup is None or sup[0] < -R or sup[1] > R:
            tail, _ = _tail_estimate(f, R)
            if tail_tol is not None and tail > tail_tol:
                est = tail
                R_new = R
                while est > tail_tol and R_new < 1e9:
                    R_new *= 2.0
                    est, _ = _tail_estimate(f, R_new)
                raise TruncationError(f"tail estimate {tail:.3e} above {tail_tol:.1e}; try R={R_new:g}", R_new)
        return PairResult(complex(val), float(err), float(tail), "truncated")
    if domain != "oscillatory_tail":
        raise ValueError(f"unknown pairing domain {domain!r}")
    if not isinstance(kernel, XKernel):
        raise PreconditionError("oscillatory_tail pairing needs a decomposed XKernel")
    L = max(L or 0.0, kernel.tail_start, phi.tail_start, 1.0)
    a, b = -L, L
    if sup is not None:
        a, b = max(a, sup[0]), min(b, sup[1])
    val, err = _central(f, a, b, freq_total, bps, tol, stretch)
    total = complex(val)
    for side in ("right", "left"):
        if sup is not None and ((side == "right" and sup[1] <= L) or (side == "left" and sup[0] >= -L)):
            continue
        ptail = _phi_expsum(phi, side)
        ktail = kernel.tails.get(side)
        if ptail is None or ktail is None:
            raise PreconditionError(f"no {side} tail data for {phi.label!r} or the kernel")
        for term in (ktail * ptail).grouped().terms:
            if abs(term.omega) < 1e-12:
                total += _plain_tail(term.amp, L, side, tol)
                continue
            method = tail_method or ("ray" if term.analytic else "qawf")
            total += fourier_tail(term.amp, term.omega, L, side, method=method, tol=tol)
    return PairResult(total, float(err), 0.0, "oscillatory_tail")


# --- extrapolation and classification -------------------------------------

def _step(grid):
    # h -> 0 along the grid: h = 1/p for increasing grids, p for decreasing ones
    g = np.asarray(grid, dtype=float)
    return 1.0 / g if g[-1] > g[0] else g


def richardson(grid: Sequence[float], values: Sequence[complex], floor: float = NOISE_FLOOR) -> tuple[complex, float]:
    """Richardson step on the leading power fitted from the last three points.

    Returns ``(extrapolated, power)``; falls back to the last value (power
    ``nan``) when the differences are at the noise floor or not contracting.
    """
    v = np.asarray(values, dtype=complex)
    if v.size < 3:
        return complex(v[-1]), float("nan")
    h = _step(grid)
    d1 = v[-2] - v[-3]
    d2 = v[-1] - v[-2]
    if abs(d2) <= floor or abs(d1) <= floor:
        return complex(v[-1]), float("nan")
    q = abs(d1) / abs(d2)
    rho = h[-2] / h[-1]
    if not np.isfinite(q) or q <= 1.0 + 1e-6 or rho <= 1.0:
        return complex(v[-1]), float("nan")
    p = math.log(q) / math.log(rho)
    return complex(v[-1] + d2 / (q - 1.0)), float(p)


def fit_rate(grid: Sequence[float], residuals: Sequence[float], floor: float = NOISE_FLOOR) -> float:
    """Slope of ``log residual`` against ``log parameter`` over points above ``floor``."""
    g = np.asarray(grid, dtype=float)
    r = np.asarray(residuals, dtype=float)
    keep = r > floor
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(g[keep]), np.log(r[keep]), 1)
    return float(slope)


DEFAULT_TOLERANCES = {
    "last": 1e-2,
    "extrapolated": 1e-4,
    "growth_per_decade": 2.0,
    "floor": NOISE_FLOOR,
    "nontrivial_min": 1e-3,
    "stable_rel": 1e-2,
    "require_monotone": True,
}


@dataclass
class ConvergenceReport:
    kind: str
    label: str
    parameter_grid: list
    values: list
    target: object
    extrapolated: complex
    fitted_rate: float
    verdict: str
    tolerances: dict
    residuals: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex) or isinstance(v, np.complexfloating):
                return {"re": float(v.real), "im": float(v.imag)}
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, float) and not math.isfinite(v):
                return None if math.isnan(v) else str(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        return {k: enc(v) for k, v in asdict(self).items()}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["parameter", "value_re", "value_im", "residual"])
        for p, v, r in zip(self.parameter_grid, self.values, self.residuals):
            w.writerow([repr(float(p)), repr(float(np.real(v))), repr(float(np.imag(v))), repr(float(r))])
        return buf.getvalue()

    def rederive(self) -> str:
        """Recompute the verdict from the stored values."""
        return classify(self.kind, self.parameter_grid, self.values, self.target, self.tolerances)["verdict"]


def _check_grid(grid, increasing, min_points):
    g = np.asarray(grid, dtype=float)
    if g.size < min_points:
        raise PreconditionError(f"grid needs at least {min_points} points")
    d = np.diff(g)
    if increasing and not np.all(d > 0):
        raise PreconditionError("grid must be strictly increasing")
    if not increasing and not np.all(d < 0):
        raise PreconditionError("grid must be strictly decreasing")


def classify(kind: str, grid, values, target, tolerances: dict | None = None) -> dict:
    """Verdict and metrics from a value sequence.

    ``kind`` is ``"delta"`` (converge to ``target``), ``"vanishing"`` (to 0),
    ``"infinity"`` (vanishing or a stable nonzero limit) or ``"boundary"``
    (decay relative to the first value).
    """
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    v = np.asarray(values, dtype=complex)
    tgt = 0j if target in (None, "none") else complex(target)
    r = np.abs(v - tgt)
    floor = tol["floor"]
    extrap, power = richardson(grid, v, floor)
    ext_res = abs(extrap - tgt)
    rate = fit_rate(grid, r, floor)
    monotone = bool(np.all(r[1:] <= r[:-1] + floor))
    g = np.asarray(grid, dtype=float)
    decades = abs(math.log10(g[-1] / g[0])) if g.size > 1 else 0.0
    growth = (max(r[-1], floor) / max(r[0], floor)) ** (1.0 / decades) if decades > 0 else 1.0
    metrics = {
        "monotone": monotone,
        "last_residual": float(r[-1]),
        "extrapolated_residual": float(ext_res),
        "richardson_power": power,
        "growth_per_decade": float(growth),
    }
    verdict = "inconclusive"
    if kind == "delta":
        ok = r[-1] < tol["last"] and ext_res < tol["extrapolated"]
        if ok and (monotone or not tol["require_monotone"]):
            verdict = "converged"
        elif growth > tol["growth_per_decade"]:
            verdict = "diverging"
    elif kind == "vanishing":
        if r[-1] < tol["last"] and ext_res < tol["extrapolated"]:
            verdict = "vanishing"
        elif growth > tol["growth_per_decade"]:
            verdict = "diverging"
    elif kind == "infinity":
        last2 = abs(v[-1] - v[-2]) / max(abs(v[-1]), 1e-300) if v.size > 1 else float("inf")
        metrics["last_two_rel"] = float(last2)
        if r[-1] < tol["last"] and ext_res < tol["extrapolated"]:
            verdict = "vanishing"
        elif abs(extrap) > tol["nontrivial_min"] and last2 < tol["stable_rel"]:
            verdict = "nontrivial_limit"
        elif growth > tol["growth_per_decade"]:
            verdict = "diverging"
    elif kind == "boundary":
        first = abs(v[0])
        ratio = float(abs(v[-1]) / first) if first > 0 else (0.0 if abs(v[-1]) == 0 else float("inf"))
        metrics["decay_ratio"] = ratio
        verdict = "vanishing" if ratio < tol.get("ratio", 1e-3) else "inconclusive"
    else:
        raise ValueError(f"unknown report kind {kind!r}")
    return {"verdict": verdict, "extrapolated": extrap, "fitted_rate": rate, "residuals": r.tolist(),
            "metrics": metrics}


def _report(kind, label, grid, values, target, tolerances, extra=None) -> ConvergenceReport:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    c = classify(kind, grid, values, target, tol)
    metrics = c["metrics"]
    metrics.update(extra or {})
    return ConvergenceReport(kind, label, [float(p) for p in grid], [complex(v) for v in values],
                             "none" if target is None else complex(target), c["extrapolated"],
                             c["fitted_rate"], c["verdict"], tol, c["residuals"], metrics)


# --- delta and slow-growth probes ---------------------------------------------

def delta_probe(family: Callable, phi: TestFunction, xp: float, grid: Sequence[float] = DEFAULT_A_GRID[:4], *,
                domain: str = "truncated", R: float | None = None, tolerances: dict | None = None,
                label: str = "delta", target: complex | None = None) -> ConvergenceReport:
    """Pair ``family(A)`` (a kernel at ``x'``) with ``phi`` along an increasing A-grid.

    The target defaults to ``phi(x')``.
    """
    _check_grid(grid, True, 4)
    target = complex(phi(np.asarray(xp))) if target is None else complex(target)
    values = [pair(family(A), phi, domain, R=R).value for A in grid]
    return _report("delta", label, grid, values, target, tolerances)


def _model_slice(model):
    if isinstance(model, EdgeModel):
        return lambda A, xp: edge_kernel_slice(model, A, xp)
    if isinstance(model, InnerModel):
        return lambda A, xp: inner_kernel_slice(model, A, xp)
    raise TypeError(f"unsupported model {model!r}")


def slow_growth_probe(model, A_grid: Sequence[float] = DEFAULT_A_GRID, kappa: float = 0.5, k0: float = 2.0,
                      sign: int = 1, xp: float = 3.0, *, L: float = 40.0,
                      tolerances: dict | None = None) -> ConvergenceReport:
    """Pair the model kernel with ``eta(+-x) exp(i k0 x) |x|^kappa`` via oscillatory tails."""
    _check_grid(A_grid, True, 3)
    if min(A_grid) <= abs(k0):
        raise PreconditionError("every A must exceed |k0|")
    phi = slow_growth_fn(kappa, k0, sign)
    target = complex(phi(np.asarray(xp)))
    make = _model_slice(model)
    values = [pair(make(A, xp), phi, "oscillatory_tail", L=max(L, abs(xp) + 2)).value for A in A_grid]
    tol = {"require_monotone": False}
    tol.update(tolerances or {})
    return _report("delta", f"slow_growth[{model.descriptor()}]", A_grid, values, target, tol)


def biortho_smeared_probe(n: int, m: int, phi: TestFunction, kp: float, R_grid: Sequence[float], *,
                          z: complex = 1j, tolerances: dict | None = None) -> ConvergenceReport:
    """Pair the R-truncated biorthogonality kernel in ``k`` with ``phi(k)``.

    Target ``(k')^(2n) phi(k') / (1 + k'^2)^m``.
    """
    _check_grid(R_grid, True, 3)
    model = EdgeModel(n, z)
    w = (1 + kp * kp) ** (m / 2)

    def family(R):
        return XKernel(lambda k: biortho_partial_closed(model, R, k, kp).total / ((1 + k * k) ** (m / 2) * w),
                       f"biortho[R={R}]", freq=float(R), breakpoints=(float(kp),))

    target = kp ** (2 * n) * complex(phi(np.asarray(kp))) / (1 + kp * kp) ** m
    values = [pair(family(R), phi, "truncated").value for R in R_grid]
    return _report("delta", f"biortho[n={n},m={m},k'={kp}]", R_grid, values, target, tolerances)


# --- vanishing families -------------------------------------------------------

def _t_minus_2sin_half(t):
    """``t - 2 sin(t/2)`` without cancellation for small ``t``."""
    t = np.asarray(t, dtype=float)
    out = t - 2 * np.sin(t / 2)
    small = np.abs(t) < 0.5
    if np.any(small):
        h = t[small] / 2
        acc = np.zeros_like(h)
        term = h.copy()
        for m in range(1, 9):
            term = term * h * h / ((2 * m) * (2 * m + 1))
            acc = acc + (-1) ** (m + 1) * term
        out = np.where(small, 0.0, out)
        out[small] = 2 * acc
    return out


def _sin_expsum(c: float, xp: float) -> ExpSum:
    # sin(c (x - x'))
    return ExpSum.wave(c, np.exp(-1j * c * xp) / 2j) + ExpSum.wave(-c, -np.exp(1j * c * xp) / 2j)


def _cos_expsum(c: float, xp: float) -> ExpSum:
    return ExpSum.wave(c, 0.5 * np.exp(-1j * c * xp)) + ExpSum.wave(-c, 0.5 * np.exp(1j * c * xp))


def _require_inner(model):
    if not isinstance(model, InnerModel):
        raise PreconditionError("this family needs an inner model")
    return model


def vanishing_family(name: str, xp: float, *, z: complex = 1j, model: InnerModel | None = None) -> Callable:
    """``eps -> XKernel`` for the eps-families that vanish in the limit.

    ``L3.7``..``L3.10`` use ``z``; ``L4.6``..``L4.8`` use the inner model.
    """
    z = complex(z)
    xp = float(xp)
    u = lambda x: np.asarray(x) - xp
    over = lambda p: (lambda x: 1.0 / ((np.asarray(x) - z) ** p * (xp - z) ** p))

    if name == "L3.7":
        def make(eps):
            tails = _sin_expsum(eps, xp).times(lambda x: 1.0 / u(x))
            return XKernel(lambda x: math.pi * _sinc_eps(eps, u(x)), f"L3.7[eps={eps}]",
                           {"right": tails, "left": tails}, _tail_start(xp, eps), eps, (xp,))
    elif name == "L3.8":
        def make(eps):
            # sin^2(e u/2) = (1 - cos(e u))/2
            t = (ExpSum.wave(0.0, 0.5) + _cos_expsum(eps, xp) * (-0.5)).times(over(1)) * (1.0 / eps)
            return XKernel(lambda x: np.sin(eps * u(x) / 2) ** 2 / eps * over(1)(x), f"L3.8[eps={eps}]",
                           {"right": t, "left": t}, _tail_start(xp, eps), eps, (xp,))
    elif name == "L3.9":
        return infinity_kernel("fun96a", xp, z=z)
    elif name == "L3.10":
        return infinity_kernel("fun96b", xp, z=z)
    elif name == "L4.6":
        m = _require_inner(model)

        def make(eps):
            L = _tail_start(xp, eps, 0.5)
            trig = (_cos_expsum(2 * m.alpha, xp) * _cos_expsum(eps, xp)) * eps \
                + (_sin_expsum(2 * m.alpha, xp) * _sin_expsum(eps, xp)) * (2 * m.alpha)
            t = (_psi0_expsum(m, L) * trig).grouped()

            def f(x):
                w = u(x)
                return psi0_inner(m, x) * (eps * np.cos(2 * m.alpha * w) * np.cos(eps * w)
                                           + 2 * m.alpha * np.sin(2 * m.alpha * w) * np.sin(eps * w))

            return XKernel(f, f"L4.6[eps={eps}]", {"right": t, "left": t}, _tail_start(xp, eps, 0.5),
                           2 * m.alpha + m.alpha + eps, (xp,))
    elif name == "L4.7":
        m = _require_inner(model)

        def make(eps):
            a = m.alpha
            p0p, p1p = complex(psi0_inner(m, xp)), complex(psi1_inner(m, xp))
            L = _tail_start(xp, eps, 0.5)
            s_part = _psi0_expsum(m, L) * p1p + _psi1_expsum(m, L) * p0p
            tails = {side: (s_part * cosine_band_expsum(2 * a - eps, 2 * a + eps, xp, side)).grouped()
                     for side in ("right", "left")}

            def f(x):
                s = psi0_inner(m, x) * p1p + psi1_inner(m, x) * p0p
                return s * cosine_band(2 * a - eps, 2 * a + eps, u(x))

            return XKernel(f, f"L4.7[eps={eps}]", tails, _tail_start(xp, eps, 0.5), 3 * a + eps, (xp,))
    elif name == "L4.8":
        m = _require_inner(model)
        base = infinity_kernel("funA96", xp, model=m)
        scale = math.pi * m.alpha / (2 * complex(psi0_inner(m, xp))) if psi0_inner(m, xp) != 0 else None

        def make(eps):
            if scale is None:
                # psi0(x') = 0: build psi0(x) sin^2(eps u/2)/eps directly
                t = ((ExpSum.wave(0.0, 0.5) + _cos_expsum(eps, xp) * (-0.5))
                     * _psi0_expsum(m, _tail_start(xp, eps, 0.5))).grouped() * (1.0 / eps)
                return XKernel(lambda x: psi0_inner(m, x) * np.sin(eps * u(x) / 2) ** 2 / eps, f"L4.8[eps={eps}]",
                               {"right": t, "left": t}, _tail_start(xp, eps, 0.5), m.alpha + eps, (xp,))
            k = base(eps)
            return XKernel(lambda x: scale * k.func(x), f"L4.8[eps={eps}]",
                           {s: e * scale for s, e in k.tails.items()}, k.tail_start, k.freq, k.breakpoints)
    else:
        raise KeyError(f"unknown vanishing family {name!r}; known: {sorted(VANISHING_THRESHOLDS)}")
    return make


def _sinc_eps(eps, w):
    w = np.asarray(w, dtype=float)
    safe = np.where(w == 0, 1.0, w)
    return np.where(w == 0, eps / math.pi, np.sin(eps * safe) / (math.pi * safe))


def infinity_kernel(which: str, xp: float, *, z: complex = 1j, model: InnerModel | None = None) -> Callable:
    """``eps -> XKernel`` for the functionals supported at infinity.

    ``fun96a``: ``u sin^2(eps u/4) sin(eps u/2) / (eps^2 (x-z)^2 (x'-z)^2)``;
    ``fun96b``: ``[eps u - 2 sin(eps u/2)]^2 / (eps^3 (x-z)^2 (x'-z)^2)``;
    ``funA96``: ``2/(pi eps alpha) sin^2(eps u/2) psi0(x) psi0(x')``.
    """
    z = complex(z)
    xp = float(xp)
    u = lambda x: np.asarray(x) - xp
    over2 = lambda x: 1.0 / ((np.asarray(x) - z) ** 2 * (xp - z) ** 2)
    if which == "fun96a":
        def make(eps):
            # sin^2(a) sin(2a) = sin(2a)/2 - sin(4a)/4 with a = eps u/4
            trig = _sin_expsum(eps / 2, xp) * 0.5 + _sin_expsum(eps, xp) * (-0.25)
            t = trig.times(lambda x: u(x) * over2(x)) * (1.0 / eps**2)

            def f(x):
                w = u(x)
                return w * np.sin(eps * w / 4) ** 2 * np.sin(eps * w / 2) / eps**2 * over2(x)

            return XKernel(f, f"fun96a[eps={eps}]", {"right": t, "left": t}, _tail_start(xp, eps), eps, (xp,))
    elif which == "fun96b":
        def make(eps):
            # [e u - 2 sin(e u/2)]^2 = e^2 u^2 + 2 - 4 e u sin(e u/2) - 2 cos(e u)
            plain = ExpSum.of(lambda x: eps**2 * u(x) ** 2 + 2.0)
            osc = _sin_expsum(eps / 2, xp).times(lambda x: -4 * eps * u(x)) + _cos_expsum(eps, xp) * (-2.0)
            t = (plain + osc).times(over2) * (1.0 / eps**3)

            def f(x):
                return _t_minus_2sin_half(eps * u(x)) ** 2 / eps**3 * over2(x)

            return XKernel(f, f"fun96b[eps={eps}]", {"right": t, "left": t}, _tail_start(xp, eps), eps, (xp,))
    elif which == "funA96":
        m = _require_inner(model)
        p0p = complex(psi0_inner(m, xp))
        c = 2 * p0p / (math.pi * m.alpha)

        def make(eps):
            psi0 = _psi0_expsum(m, _tail_start(xp, eps, 0.5))
            t = ((ExpSum.wave(0.0, 0.5) + _cos_expsum(eps, xp) * (-0.5)) * psi0).grouped() * (c / eps)

            def f(x):
                return c / eps * np.sin(eps * u(x) / 2) ** 2 * psi0_inner(m, x)

            return XKernel(f, f"funA96[eps={eps}]", {"right": t, "left": t}, _tail_start(xp, eps, 0.5),
                           m.alpha + eps, (xp,))
    else:
        raise KeyError(f"unknown functional {which!r}; expected fun96a, fun96b or funA96")
    return make


def _pair_eps(kernel: XKernel, phi: TestFunction, eps: float, xp: float) -> complex:
    sup = phi.support
    if sup is not None and max(abs(sup[0]), abs(sup[1])) < kernel.tail_start:
        return pair(kernel, phi, "truncated", stretch=(xp, eps)).value
    L = max(kernel.tail_start, phi.tail_start)
    return pair(kernel, phi, "oscillatory_tail", L=L, stretch=(xp, eps)).value


def _gamma_ok(phi: TestFunction, gamma: float) -> str:
    verdict = membership_check(phi, gamma)
    if verdict == "inconclusive":
        sup = getattr(phi.growth, "gamma_sup", None)
        if sup is not None and gamma < sup:
            return "member"
    return verdict


def vanishing_probe(family: Callable, phi: TestFunction, gamma_required: float,
                    eps_grid: Sequence[float] = DEFAULT_EPS_GRID, *, xp: float = 0.0, gamma: float | None = None,
                    tolerances: dict | None = None, label: str = "vanishing") -> ConvergenceReport:
    """Pair ``family(eps)`` with ``phi`` along a decreasing eps-grid; expect 0.

    Raises:
        PreconditionError: ``phi`` is not a member of ``CL_gamma`` for some
            ``gamma > gamma_required`` (default ``gamma_required + 1``).
    """
    _check_grid(eps_grid, False, 3)
    gamma = gamma_required + 1.0 if gamma is None else gamma
    if gamma <= gamma_required:
        raise PreconditionError(f"gamma={gamma} must exceed gamma_required={gamma_required}")
    verdict = _gamma_ok(phi, gamma)
    if verdict != "member":
        raise PreconditionError(f"{phi.label} is not a member of CL_gamma at gamma={gamma} "
                                f"(needs gamma > gamma_required={gamma_required}; membership: {verdict})")
    values = [_pair_eps(family(e), phi, e, xp) for e in eps_grid]
    return _report("vanishing", label, eps_grid, values, 0.0, tolerances,
                   {"gamma": gamma, "gamma_required": gamma_required})


# --- boundary weak limits -----------------------------------------------------

def boundary_family(name: str, **p) -> Callable:
    """``P -> XKernel`` in the integration variable for the boundary terms.

    ``L3.2``: ``k^l exp(i x (k-k')) / ((1+k^2)^(m/2) (x-z)^j)``, ``P = x``, variable ``k``.
    ``C3.1``: ``(k')^(2l) [k^(n-1-l) psi_(n-1-l)(x;k)/(1+k^2)^(m/2)] [(k')^(n-l) psi_(n-l)(x;-k')/(1+k'^2)^(m/2)]``, ``P = x``.
    ``L3.5``: ``exp(i k (x-x')) / (k^l (x-z)^m)``, ``P = k``, variable ``x``.
    ``C3.2``: ``((x'-z)/(x-z))^l psi_(n-1-l)(x;k) psi_(n-l)(x';-k) / (i(x-z))``, ``P = k``.
    ``L4.2``: ``exp(i k (x-x')) psi0(x) / k``, ``P = k``.
    """
    z = complex(p.get("z", 1j))
    if name == "L3.2":
        l, m, j, kp = p.get("l", 0), p.get("m", 0), p.get("j", 1), float(p.get("kprime", 0.5))

        def make(P):
            f = lambda k: k**l * np.exp(1j * P * (k - kp)) / ((1 + k * k) ** (m / 2) * (P - z) ** j)
            return XKernel(f, f"L3.2[x={P}]", freq=abs(P))
    elif name == "C3.1":
        n, l, m, kp = p.get("n", 2), p.get("l", 0), p.get("m", 1), float(p.get("kprime", 0.5))
        model = EdgeModel(n, z)

        def make(P):
            right = (kp ** (n - l) * psi_edge(model, P, -kp, n - l)) / (1 + kp * kp) ** (m / 2)
            f = lambda k: kp ** (2 * l) * kpow_psi_edge(model, P, k, n - 1 - l) / (1 + k * k) ** (m / 2) * right
            return XKernel(f, f"C3.1[x={P}]", freq=abs(P))
    elif name == "L3.5":
        l, m, xp = p.get("l", 0), p.get("m", 1), float(p.get("xprime", 0.3))

        def make(P):
            f = lambda x: np.exp(1j * P * (x - xp)) / (P**l * (x - z) ** m)
            return XKernel(f, f"L3.5[k={P}]", freq=abs(P), breakpoints=(xp,))
    elif name == "C3.2":
        n, l, xp = p.get("n", 2), p.get("l", 1), float(p.get("xprime", 0.3))
        model = EdgeModel(n, z)

        def make(P):
            c = complex(psi_edge(model, xp, -P, n - l))
            f = lambda x: ((xp - z) / (x - z)) ** l * psi_edge(model, x, P, n - 1 - l) * c / (1j * (x - z))
            return XKernel(f, f"C3.2[k={P}]", freq=abs(P), breakpoints=(xp,))
    elif name == "L4.2":
        model = p.get("model") or InnerModel(float(p.get("alpha", 1.0)), z)
        xp = float(p.get("xprime", 0.3))

        def make(P):
            f = lambda x: np.exp(1j * P * (x - xp)) * psi0_inner(model, x) / P
            return XKernel(f, f"L4.2[k={P}]", freq=abs(P) + model.alpha, breakpoints=(xp,))
    else:
        raise KeyError(f"unknown boundary family {name!r}")
    return make


def boundary_weak_limit_probe(term: Callable, phi: TestFunction, gamma: float, grid: Sequence[float], *,
                              gamma_threshold: float | None = None, ratio: float = 1e-3,
                              label: str = "boundary") -> ConvergenceReport:
    """Pair ``term(P)`` with ``phi`` as ``|P|`` grows; expect Riemann-Lebesgue decay.

    Verdict ``vanishing`` when the last value is below ``ratio`` times the first.
    """
    g = np.abs(np.asarray(grid, dtype=float))
    if g.size < 2 or not np.all(np.diff(g) > 0):
        raise PreconditionError("boundary grid must grow in magnitude")
    if gamma_threshold is not None and not gamma > gamma_threshold:
        raise PreconditionError(f"gamma={gamma} must exceed the threshold {gamma_threshold}")
    if gamma_threshold is not None and _gamma_ok(phi, gamma) != "member":
        raise PreconditionError(f"{phi.label} is not a member of CL_gamma at gamma={gamma}")
    values = [pair(term(P), phi, "truncated", tol=1e-15).value for P in grid]
    return _report("boundary", label, g, values, None, {"ratio": ratio}, {"gamma": gamma})


# --- functionals supported at infinity ----------------------------------------

def infinity_functional_probe(which: str, phi: TestFunction, xp: float, eps_grid: Sequence[float] = DEFAULT_EPS_GRID,
                              *, z: complex = 1j, model: InnerModel | None = None,
                              tolerances: dict | None = None) -> ConvergenceReport:
    """Evaluate the defining eps-limit of a functional supported at infinity."""
    _check_grid(eps_grid, False, 5)
    make = infinity_kernel(which, xp, z=z, model=model)
    values = [_pair_eps(make(e), phi, e, xp) for e in eps_grid]
    return _report("infinity", f"{which}[{phi.label}]", eps_grid, values, None, tolerances)


def locality_at_infinity_check(which: str, phi: TestFunction, xp: float, R_list: Sequence[float],
                               eps_grid: Sequence[float] = DEFAULT_EPS_GRID, *, z: complex = 1j,
                               model: InnerModel | None = None, rel_tol: float = 1e-2,
                               tolerances: dict | None = None) -> dict:
    """Compare the functional on ``phi`` with its value on far parts ``eta(|x|-R) phi``.

    Also runs the near part for the first ``R`` (expected to vanish).
    """
    base = infinity_functional_probe(which, phi, xp, eps_grid, z=z, model=model, tolerances=tolerances)
    if base.verdict != "nontrivial_limit":
        raise PreconditionError(f"locality needs a nontrivial limit; got {base.verdict}")
    rows = []
    ok = True
    for R in R_list:
        near, far = cutoff_split(phi, R)
        rep = infinity_functional_probe(which, far, xp, eps_grid, z=z, model=model, tolerances=tolerances)
        rel = abs(rep.extrapolated - base.extrapolated) / abs(base.extrapolated)
        ok &= rel <= rel_tol
        rows.append({"R": R, "far_limit": rep.extrapolated, "rel_diff": rel, "verdict": rep.verdict})
    near, _ = cutoff_split(phi, R_list[0])
    near_rep = infinity_functional_probe(which, near, xp, eps_grid, z=z, model=model, tolerances=tolerances)
    return {
        "which": which,
        "limit": base.extrapolated,
        "rows": rows,
        "near_verdict": near_rep.verdict,
        "near_limit": near_rep.extrapolated,
        "pass": bool(ok and near_rep.verdict == "vanishing"),
        "reports": [base, near_rep],
    }


def witness_search(which: str, candidates: Sequence[TestFunction], xp: float,
                   eps_grid: Sequence[float] = DEFAULT_EPS_GRID, *, z: complex = 1j,
                   model: InnerModel | None = None) -> list:
    """Run the functional over candidate test functions; returns ``(label, report)`` pairs."""
    out = []
    for phi in candidates:
        try:
            rep = infinity_functional_probe(which, phi, xp, eps_grid, z=z, model=model)
        except (PreconditionError, ArithmeticError, RuntimeError) as exc:
            out.append((phi.label, str(exc)))
            continue
        out.append((phi.label, rep))
    return out
