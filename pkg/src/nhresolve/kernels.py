"""Spectral kernels of both models, closed form and by direct quadrature.

Every closed form returns a :class:`KernelValue` whose named terms add up
to the total. The direct routes integrate the eigenfunction products along
the deformed contours (k-space) or over ``[-R, R]`` (x-space). For pairings
against slowly decaying test functions each kernel can also be expanded as
an :class:`ExpSum`, a finite sum ``sum_j amp_j(x) exp(i omega_j x)`` that is
valid on the far left or far right of the real line.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .contours import (
    Arc,
    Contour,
    DeformationSpec,
    edge_contour,
    epsilon_arc,
    inner_contour,
    integrate,
)
from .models import (
    SQRT_2PI,
    EdgeModel,
    InnerModel,
    PoleError,
    edge_coefficients,
    inner_denominator,
    psi0_inner,
    psi1_inner,
    psi_edge,
)
from .quadrature import gauss_kronrod

__all__ = [
    "KernelValue",
    "ExpTerm",
    "ExpSum",
    "XKernel",
    "kpow_psi_edge",
    "edge_kernel_closed",
    "edge_kernel_direct",
    "edge_induction_check",
    "biortho_partial_closed",
    "biortho_partial_quadrature",
    "biortho_induction_check",
    "inner_product_integrand",
    "inner_kernel_closed",
    "inner_kernel_direct",
    "inner_eps_kernel_closed",
    "inner_eps_kernel_direct",
    "inner_residues",
    "cosine_band",
    "cosine_band_expsum",
    "exp1_scaled",
    "shape_constant",
    "est_constants",
    "est_bound",
    "sinc_kernel",
    "edge_kernel_slice",
    "inner_kernel_slice",
]


@dataclass(frozen=True)
class KernelValue:
    """Kernel value with its additive decomposition (arrays allowed)."""

    terms: dict
    total: complex = field(default=None)

    def __post_init__(self):
        if self.total is None:
            tot = 0j
            for v in self.terms.values():
                tot = tot + v
            object.__setattr__(self, "total", tot)

    def __getitem__(self, name):
        return self.terms.get(name, 0j)


# --- exponential sums ----------------------------------------------------

@dataclass(frozen=True)
class ExpTerm:
    omega: float
    amp: Callable
    analytic: bool = True


def _const(c):
    return lambda x: c + 0 * np.asarray(x)


def _prod(f, g):
    return lambda x: f(x) * g(x)


def _scale(f, c):
    return lambda x: c * f(x)


def _sum_amps(fs):
    def h(x):
        out = 0j
        for f in fs:
            out = out + f(x)
        return out

    return h


@dataclass(frozen=True)
class ExpSum:
    """``x -> sum_j amp_j(x) exp(i omega_j x)``.

    ``analytic`` flags whether ``amp_j`` continues analytically (and without
    exponential growth) into the half plane beyond the tail, which lets the
    tail integral be rotated onto a vertical ray.
    """

    terms: tuple = ()

    @staticmethod
    def wave(omega: float, coeff: complex = 1.0) -> "ExpSum":
        return ExpSum((ExpTerm(float(omega), _const(complex(coeff))),))

    @staticmethod
    def of(amp: Callable, omega: float = 0.0, analytic: bool = True) -> "ExpSum":
        return ExpSum((ExpTerm(float(omega), amp, analytic),))

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, ExpSum):
            return ExpSum(tuple(
                ExpTerm(a.omega + b.omega, _prod(a.amp, b.amp), a.analytic and b.analytic)
                for a in self.terms for b in other.terms
            ))
        c = complex(other)
        return ExpSum(tuple(ExpTerm(t.omega, _scale(t.amp, c), t.analytic) for t in self.terms))

    __rmul__ = __mul__

    def times(self, g: Callable, analytic: bool = True) -> "ExpSum":
        return ExpSum(tuple(ExpTerm(t.omega, _prod(t.amp, g), t.analytic and analytic) for t in self.terms))

    def __call__(self, x):
        x = np.asarray(x)
        out = np.zeros(np.shape(x), dtype=complex)
        for t in self.terms:
            out = out + t.amp(x) * np.exp(1j * t.omega * x)
        return out

    def grouped(self, tol: float = 1e-12) -> "ExpSum":
        """Merge terms with equal frequency (to ``tol``)."""
        groups: dict = {}
        for t in self.terms:
            key = round(t.omega / tol) * tol if tol else t.omega
            groups.setdefault(key, []).append(t)
        out = []
        for key in sorted(groups):
            ts = groups[key]
            out.append(ExpTerm(ts[0].omega, _sum_amps([t.amp for t in ts]), all(t.analytic for t in ts)))
        return ExpSum(tuple(out))


@dataclass(frozen=True)
class XKernel:
    """A kernel as a function of ``x`` at fixed ``x'``.

    ``tails`` maps ``"right"``/``"left"`` to an :class:`ExpSum` equal to the
    kernel for ``|x| >= tail_start`` on that side. ``freq`` is the largest
    oscillation frequency in ``x``; ``breakpoints`` lists points where the
    integrand has structure (e.g. ``x'``).
    """

    func: Callable
    label: str = ""
    tails: dict = field(default_factory=dict)
    tail_start: float = 0.0
    freq: float = 0.0
    breakpoints: tuple = ()

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


# --- edge model ----------------------------------------------------------

def sinc_kernel(A: float, u):
    """``sin(A u)/(pi u)`` with the value ``A/pi`` at ``u = 0``."""
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0, 1.0, u)
    return np.where(u == 0, A / math.pi, np.sin(A * safe) / (math.pi * safe))


def kpow_psi_edge(model: EdgeModel, x, k, j: int):
    """``k^j psi_j(x; k)``, a polynomial in ``k``; regular at ``k = 0``."""
    c = edge_coefficients(j).coeffs
    x = np.asarray(x)
    k = np.asarray(k)
    v = 1.0 / (x - model.z)
    out = np.zeros(np.broadcast(x, k).shape, dtype=complex)
    for i, ci in enumerate(c):
        out = out + ci * k ** (j - i) * v**i
    return np.exp(1j * k * x) / SQRT_2PI * out


def _edge_boundary(model: EdgeModel, A, x, xp):
    n = model.n
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    ratio = (xp - model.z) / (x - model.z)
    out = 0j
    for l in range(n):
        hi = psi_edge(model, x, A, n - 1 - l) * psi_edge(model, xp, -A, n - l)
        lo = psi_edge(model, x, -A, n - 1 - l) * psi_edge(model, xp, A, n - l)
        out = out + ratio**l * (hi - lo) / (1j * (x - model.z))
    return out


def edge_kernel_closed(model: EdgeModel, A: float, x, xp) -> KernelValue:
    """Closed form of ``int_L(A) psi_n(x;k) psi_n(x';-k) dk``.

    Boundary sum ``sum_l ((x'-z)/(x-z))^l psi_(n-1-l)(x;k) psi_(n-l)(x';-k)
    / (i(x-z)) |_(-A)^A`` plus the weighted sinc ``((x'-z)/(x-z))^n
    sin A(x-x') / (pi (x-x'))``. Broadcasts over ``x`` and ``x'``.
    """
    if not A > 0:
        raise ValueError("A must be positive")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    ratio = (xp - model.z) / (x - model.z)
    sinc = ratio**model.n * sinc_kernel(A, x - xp)
    return KernelValue({"boundary": _edge_boundary(model, A, x, xp) + 0 * sinc, "sinc": sinc + 0j})


def _edge_product(model, x, xp, n):
    return lambda k: psi_edge(model, x, k, n) * psi_edge(model, xp, -k, n)


def edge_kernel_direct(model: EdgeModel, A: float, spec: DeformationSpec | None, x: float, xp: float,
                       *, n: int | None = None, tol: float = 1e-12) -> complex:
    """Contour quadrature of ``psi_n(x;k) psi_n(x';-k)`` over the deformed segment."""
    n = model.n if n is None else n
    c = edge_contour(A, spec)
    return integrate(c, _edge_product(model, x, xp, n), tol, period_hint=abs(x - xp))


def edge_induction_check(model: EdgeModel, A: float, spec: DeformationSpec | None, x: float, xp: float,
                         *, tol: float = 1e-12) -> dict:
    """One induction step: the n-kernel against boundary term plus ratio times the (n-1)-kernel.

    Both kernels come from contour quadrature; the boundary term is exact.
    """
    n = model.n
    if n < 1:
        raise ValueError("the induction step needs n >= 1")
    lhs = edge_kernel_direct(model, A, spec, x, xp, tol=tol)
    prev = edge_kernel_direct(model, A, spec, x, xp, n=n - 1, tol=tol)
    b = (psi_edge(model, x, A, n - 1) * psi_edge(model, xp, -A, n)
         - psi_edge(model, x, -A, n - 1) * psi_edge(model, xp, A, n)) / (1j * (x - model.z))
    rhs = complex(b) + (xp - model.z) / (x - model.z) * prev
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs) / (1 + abs(rhs))}


def _biortho_boundary(model, R, k, kp, j):
    # -i [k^(j-1) psi_(j-1)(x;k)] [k'^j psi_j(x;-k')] |_(-R)^R
    def at(x):
        return kpow_psi_edge(model, x, k, j - 1) * kpow_psi_edge(model, x, -kp, j) * (-1) ** j
    return -1j * (at(R) - at(-R))


def biortho_partial_closed(model: EdgeModel, R: float, k, kp) -> KernelValue:
    """Closed form of ``int_(-R)^R [k^n psi_n(x;k)] [k'^n psi_n(x;-k')] dx``.

    Note ``(k')^j psi_j(x;-k') = (-1)^j (-k')^j psi_j(x;-k')``; the sign is
    absorbed so that every factor is the polynomial :func:`kpow_psi_edge`.
    """
    if not R > 0:
        raise ValueError("R must be positive")
    n = model.n
    k = np.asarray(k, dtype=complex)
    kp = np.asarray(kp, dtype=complex)
    d = k - kp
    safe = np.where(d == 0, 1.0, d)
    sinc = np.where(d == 0, R / math.pi, np.sin(R * safe) / (math.pi * safe))
    boundary = 0j
    for l in range(n):
        boundary = boundary + kp ** (2 * l) * _biortho_boundary(model, R, k, kp, n - l)
    return KernelValue({"boundary": boundary + 0 * sinc, "sinc": kp ** (2 * n) * sinc})


def _biortho_integrand(model, k, kp, n):
    sgn = (-1) ** n
    return lambda x: sgn * kpow_psi_edge(model, x, k, n) * kpow_psi_edge(model, x, -kp, n)


def biortho_partial_quadrature(model: EdgeModel, R: float, k: complex, kp: complex, *,
                               n: int | None = None, tol: float = 1e-13) -> complex:
    """Adaptive x-quadrature of the left side of :func:`biortho_partial_closed`."""
    n = model.n if n is None else n
    f = _biortho_integrand(model, k, kp, n)
    cycles = 2 * R * max(abs(k - kp), abs(k.real if isinstance(k, complex) else k), 1.0) / (2 * math.pi)
    res = gauss_kronrod(f, -R, R, abs_tol=tol, rel_tol=tol,
                        breakpoints=[model.z.real], n_init=int(min(2000, max(4, math.ceil(cycles)))))
    return res.value


def biortho_induction_check(model: EdgeModel, R: float, k: complex, kp: complex, *, tol: float = 1e-13) -> dict:
    """One x-space induction step, both integrals by quadrature."""
    n = model.n
    if n < 1:
        raise ValueError("the induction step needs n >= 1")
    lhs = biortho_partial_quadrature(model, R, k, kp, tol=tol)
    prev = biortho_partial_quadrature(model, R, k, kp, n=n - 1, tol=tol)
    rhs = complex(_biortho_boundary(model, R, k, kp, n)) + kp**2 * prev
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs) / (1 + abs(rhs))}


# --- inner model ---------------------------------------------------------

def _inner_factors(model: InnerModel, x, xp):
    p0x, p0p = psi0_inner(model, x), psi0_inner(model, xp)
    p1x, p1p = psi1_inner(model, x), psi1_inner(model, xp)
    return p0x * p0p, p0x * p1p + p1x * p0p


def inner_product_integrand(model: InnerModel, x, xp, k):
    """Decomposed ``psi(x;k) psi(x';-k)`` of the inner model.

    Free wave ``exp(iku)/2pi``, a derivative block
    ``-(1/4 pi alpha) psi0 psi0' sum_(+-) d/dk[exp(i(k-+alpha)u)/(k-+alpha)]``
    and a simple-pole block ``(1/2pi)(psi0 psi1' + psi1 psi0')
    [exp(i(k-alpha)u)/(k-alpha) - exp(i(k+alpha)u)/(k+alpha)]``, ``u = x - x'``.

    Raises:
        PoleError: ``k = +-alpha``.
    """
    a = model.alpha
    k = np.asarray(k, dtype=complex)
    if np.any(np.abs(np.abs(k.real) - a) + np.abs(k.imag) == 0):
        raise PoleError("k = +-alpha is a pole of the inner-model integrand")
    u = np.asarray(x, dtype=float) - np.asarray(xp, dtype=float)
    p00, s = _inner_factors(model, x, xp)
    free = np.exp(1j * k * u) / (2 * math.pi)
    deriv = 0j
    for q in (k - a, k + a):
        deriv = deriv + np.exp(1j * q * u) * (1j * u / q - 1.0 / q**2)
    pole = np.exp(1j * (k - a) * u) / (k - a) - np.exp(1j * (k + a) * u) / (k + a)
    return free - p00 / (4 * math.pi * a) * deriv + s / (2 * math.pi) * pole


def cosine_band(a, b, u):
    """``int_a^b cos(t u) dt / t`` for ``0 < a < b``.

    Power series in ``u`` while ``b|u| <= 1``, otherwise ``Ci(b|u|) - Ci(a|u|)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a <= 0) or np.any(b <= a):
        raise ValueError("cosine_band needs 0 < a < b")
    u = np.abs(np.asarray(u, dtype=float))
    scalar = np.ndim(a) == 0 and np.ndim(b) == 0 and np.ndim(u) == 0
    a, b, u = (np.atleast_1d(v) for v in np.broadcast_arrays(a, b, u))
    out = np.log(b / a)
    small = b * u <= 1.0
    if np.any(small):
        us, as_, bs = u[small], a[small], b[small]
        acc = np.log(bs / as_)
        term_u = np.ones_like(us)
        fact = 1.0
        bpow = np.ones_like(bs)
        apow = np.ones_like(as_)
        for m in range(1, 12):
            fact *= (2 * m - 1) * (2 * m)
            term_u = term_u * us * us
            bpow = bpow * bs * bs
            apow = apow * as_ * as_
            acc = acc + (-1) ** m * term_u * (bpow - apow) / (2 * m * fact)
        out[small] = acc
    big = ~small
    if np.any(big):
        _, cib = special.sici(b[big] * u[big])
        _, cia = special.sici(a[big] * u[big])
        out[big] = cib - cia
    return float(out[0]) if scalar else out


def exp1_scaled(w):
    """``exp(w) E1(w)`` on the principal branch, without overflow for large ``|w|``.

    Direct product for ``|w| < 20``, otherwise the continued fraction
    ``1/(w + 1 - 1/(w + 3 - 4/(w + 5 - ...)))`` evaluated bottom-up.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < 20.0
    if np.any(small):
        ws = w[small]
        out[small] = np.exp(ws) * special.exp1(ws)
    if np.any(~small):
        wl = w[~small]
        acc = np.zeros_like(wl)
        for k in range(60, 0, -1):
            acc = k * k / (wl + 2 * k + 1 - acc)
        out[~small] = 1.0 / (wl + 1 - acc)
    return out


def _ci_expsum(c: float, xp: float, side: str) -> ExpSum:
    # Ci(c|u|) = -(E1(i c|u|) + E1(-i c|u|))/2 and E1(iy) = exp(-iy) [exp(iy) E1(iy)];
    # the bracket continues analytically off the negative real axis
    sgn = 1.0 if side == "right" else -1.0
    out = ExpSum()
    for s in (1.0, -1.0):
        def amp(x, s=s):
            y = sgn * (np.asarray(x) - xp)
            w = 1j * s * c * y
            return -0.5 * exp1_scaled(w) * np.exp(1j * s * c * sgn * xp)
        # exp(-i s c |u|) = exp(-i s c sgn x) exp(i s c sgn x')
        out = out + ExpSum.of(amp, -s * c * sgn)
    return out


def cosine_band_expsum(a: float, b: float, xp: float, side: str) -> ExpSum:
    """Exponential-sum form of ``x -> cosine_band(a, b, x - x')`` on one side of ``x'``."""
    return _ci_expsum(b, xp, side) + (-1.0) * _ci_expsum(a, xp, side)


def inner_kernel_closed(model: InnerModel, A: float, x, xp) -> KernelValue:
    """Closed form of the inner-model kernel over the deformed segment.

    Terms: ``sinc``, ``cos_band`` (``-psi0 psi0'/(2 pi alpha)`` times the
    cosines at ``A +- alpha``) and ``log_band`` (``-(1/pi)`` band integral
    times ``psi0 psi1' + psi1 psi0'``).
    """
    a = model.alpha
    if not A > a:
        raise ValueError(f"need A > alpha, got A={A}, alpha={a}")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    u = x - xp
    p00, s = _inner_factors(model, x, xp)
    cos_term = np.cos((A + a) * u) / (A + a) + np.cos((A - a) * u) / (A - a)
    return KernelValue({
        "sinc": sinc_kernel(A, u) + 0j,
        "cos_band": -p00 / (2 * math.pi * a) * cos_term,
        "log_band": -s / math.pi * cosine_band(A - a, A + a, u),
    })


def inner_kernel_direct(model: InnerModel, A: float, spec: DeformationSpec | None, x: float, xp: float,
                        *, tol: float = 1e-12) -> complex:
    c = inner_contour(A, model.alpha, spec)
    return integrate(c, lambda k: inner_product_integrand(model, x, xp, k), tol, period_hint=abs(x - xp))


def inner_eps_kernel_closed(model: InnerModel, eps: float, x, xp, sign: int = 1) -> KernelValue:
    """Closed form of the kernel over the two semicircles of radius ``eps`` at ``k = +-alpha``.

    The value does not depend on ``sign`` (the simple-pole residues cancel);
    the argument is kept for symmetry with the quadrature route.
    """
    a = model.alpha
    if not 0 < eps < a:
        raise ValueError(f"need 0 < eps < alpha, got eps={eps}, alpha={a}")
    x = np.asarray(x, dtype=float)
    xp = np.asarray(xp, dtype=float)
    u = x - xp
    p00, s = _inner_factors(model, x, xp)
    den = 4 * a * a - eps * eps
    block = (np.cos(eps * u) / eps - eps * np.cos(2 * a * u) * np.cos(eps * u) / den
             - 2 * a * np.sin(2 * a * u) * np.sin(eps * u) / den)
    return KernelValue({
        "sinc": 2 * np.cos(a * u) * sinc_kernel(eps, u) + 0j,
        "fejer": -p00 / (math.pi * a) * block,
        "log_band": -s / math.pi * cosine_band(2 * a - eps, 2 * a + eps, u),
    })


def inner_eps_kernel_direct(model: InnerModel, eps: float, x: float, xp: float, sign: int = 1,
                            *, tol: float = 1e-12) -> complex:
    f = lambda k: inner_product_integrand(model, x, xp, k)
    a = model.alpha
    return integrate(epsilon_arc(-a, eps, sign), f, tol) + integrate(epsilon_arc(a, eps, sign), f, tol)


def inner_residues(model: InnerModel, x: float, xp: float, *, radius: float | None = None,
                   tol: float = 1e-13) -> tuple[complex, complex]:
    """Residues of the integrand at ``k = -alpha`` and ``k = +alpha`` by circle quadrature."""
    a = model.alpha
    rho = radius or 0.25 * a
    f = lambda k: inner_product_integrand(model, x, xp, k)
    out = []
    for k0 in (-a, a):
        circle = Contour((Arc(complex(k0), rho, 0.0, 2 * math.pi),), {"type": "circle", "k0": k0, "r": rho})
        out.append(integrate(circle, f, tol) / (2j * math.pi))
    return out[0], out[1]


# --- the (est) bound -----------------------------------------------------

@functools.lru_cache(maxsize=None)
def shape_constant() -> float:
    """``C = 2 sup_(xi>0) |(1 + xi) sin(xi) / xi|``."""
    from scipy.optimize import minimize_scalar

    xi = np.linspace(1e-6, 60.0, 600001)
    g = np.abs((1 + xi) * np.sin(xi) / xi)
    i = int(np.argmax(g))
    res = minimize_scalar(lambda t: -abs((1 + t) * math.sin(t) / t), bounds=(xi[max(i - 1, 0)], xi[i + 1]),
                          method="bounded", options={"xatol": 1e-14})
    return 2.0 * max(float(g[i]), -float(res.fun))


def _grid_sup(f, lo, hi, n):
    from scipy.optimize import minimize_scalar

    x = np.linspace(lo, hi, n)
    v = np.abs(f(x))
    best = float(v.max())
    for i in np.argsort(v)[-5:]:
        a, b = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
        res = minimize_scalar(lambda t: -abs(f(np.asarray(t))), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


@functools.lru_cache(maxsize=None)
def _est_sups(alpha: float, z: complex):
    model = InnerModel(alpha, z)
    span = 60.0 / alpha + abs(z.real)
    n = int(min(2_000_000, 200 * span * max(alpha, 1.0)))
    s0 = _grid_sup(lambda x: psi0_inner(model, x), -span, span, n)
    s1 = _grid_sup(lambda x: psi1_inner(model, x), -span, span, n)
    # beyond the grid: |psi0| <= (2a)^(3/2)/|d| and |psi1| <= (1 + 1/|d|)/sqrt(2a)
    dmin = 2 * alpha * max(span - abs(z.real), 0.0) - 1.0
    if dmin > 0:
        s0 = max(s0, (2 * alpha) ** 1.5 / dmin)
    return s0, s1


def est_constants(model: InnerModel) -> dict:
    """``C``, ``sup|psi0|``, ``sup|psi1|`` and ``D = 2 C sup|psi0| sup|psi1|``."""
    C = shape_constant()
    s0, s1 = _est_sups(model.alpha, model.z)
    return {"C": C, "sup_psi0": s0, "sup_psi1": s1, "D": 2 * C * s0 * s1}


def est_bound(model: InnerModel, A, u, D: float | None = None):
    """``A D / ([1 + (A - alpha)|u|] (A - alpha))``."""
    a = model.alpha
    D = est_constants(model)["D"] if D is None else D
    A = np.asarray(A, dtype=float)
    return A * D / ((1 + (A - a) * np.abs(u)) * (A - a))


# --- kernel slices for pairings -----------------------------------------

def _edge_wave(model: EdgeModel, k: float, j: int) -> ExpSum:
    coeffs = edge_coefficients(j)

    def amp(x):
        return coeffs(1.0 / (k * (np.asarray(x) - model.z))) / SQRT_2PI

    return ExpSum.of(amp, k)


def _sinc_expsum(A: float, xp: float, weight: Callable | None = None) -> ExpSum:
    # sin(A u)/(pi u) = [exp(iAu) - exp(-iAu)] / (2 pi i u)
    def amp(s):
        return lambda x: s * np.exp(-1j * s * A * xp) / (2j * math.pi * (np.asarray(x) - xp))

    out = ExpSum.of(amp(1.0), A) + ExpSum.of(amp(-1.0), -A)
    return out.times(weight) if weight is not None else out


def edge_kernel_slice(model: EdgeModel, A: float, xp: float) -> XKernel:
    """The edge kernel at fixed ``x'`` as a function of ``x``, with tail expansions."""
    z = model.z
    n = model.n
    ratio = lambda x: (xp - z) / (np.asarray(x) - z)
    tail = _sinc_expsum(A, xp, (lambda x: ratio(x) ** n) if n else None)
    for l in range(n):
        c_hi = complex(psi_edge(model, xp, -A, n - l))
        c_lo = complex(psi_edge(model, xp, A, n - l))
        w = (lambda l: (lambda x: ratio(x) ** l / (1j * (np.asarray(x) - z))))(l)
        tail = tail + (_edge_wave(model, A, n - 1 - l) * c_hi + _edge_wave(model, -A, n - 1 - l) * (-c_lo)).times(w)
    tail = tail.grouped()
    return XKernel(
        lambda x: edge_kernel_closed(model, A, x, xp).total,
        f"edge_kernel[n={n},A={A},x'={xp}]",
        {"right": tail, "left": tail},
        abs(xp) + 1.0,
        float(A),
        (float(xp),),
    )


def _inv_d_expsum(model: InnerModel, L: float) -> ExpSum:
    """``1/d`` for ``|x| >= L`` as ``sum_k (-sin 2ax)^k / (2a(x-z))^(k+1)``, expanded in exponentials.

    Every amplitude is rational, so the tails become ray-rotatable.
    """
    a, z = model.alpha, model.z
    r = 1.0 / (2 * a * (L - abs(z)))
    if not 0 < r < 0.25:
        raise ValueError(f"series for 1/d needs 2 alpha (L - |z|) > 4, got L={L}")
    K = int(math.ceil(math.log(1e-17) / math.log(r)))
    out = ExpSum()
    for k in range(K + 1):
        base = (lambda k: (lambda x: (-1.0) ** k / (2 * a * (np.asarray(x) - z)) ** (k + 1)))(k)
        for j in range(k + 1):
            # sin^k(t) = (2i)^(-k) sum_j C(k,j) (-1)^(k-j) exp(i (2j-k) t)
            c = math.comb(k, j) * (-1.0) ** (k - j) / (2j) ** k
            out = out + ExpSum.of(base, 2 * a * (2 * j - k)) * c
    return out.grouped()


def _psi0_expsum(model: InnerModel, L: float | None = None) -> ExpSum:
    """``psi0`` for ``|x| >= L``; with ``L`` the amplitudes are analytic."""
    a = model.alpha
    if L is not None:
        waves = ExpSum.wave(a, a * math.sqrt(2 * a)) + ExpSum.wave(-a, a * math.sqrt(2 * a))
        return (waves * _inv_d_expsum(model, L)).grouped()
    amp = lambda x: a * math.sqrt(2 * a) / inner_denominator(model, x)
    return ExpSum.of(amp, a, analytic=False) + ExpSum.of(amp, -a, analytic=False)


def _psi1_expsum(model: InnerModel, L: float | None = None) -> ExpSum:
    a = model.alpha
    out = ExpSum()
    for s in (1.0, -1.0):
        num = (lambda s: (lambda x: (-1j * s * a * (np.asarray(x) - model.z) + 0.5) / math.sqrt(2 * a)))(s)
        if L is not None:
            out = out + (_inv_d_expsum(model, L) * ExpSum.wave(s * a)).times(num)
        else:
            amp = (lambda num: (lambda x: num(x) / inner_denominator(model, x)))(num)
            out = out + ExpSum.of(amp, s * a, analytic=False)
    return out.grouped() if L is not None else out


def _cos_expsum(c: float, xp: float) -> ExpSum:
    # cos(c (x - x'))
    return ExpSum.wave(c, 0.5 * np.exp(-1j * c * xp)) + ExpSum.wave(-c, 0.5 * np.exp(1j * c * xp))


def inner_kernel_slice(model: InnerModel, A: float, xp: float) -> XKernel:
    """The inner kernel at fixed ``x'`` as a function of ``x``, with tail expansions."""
    a = model.alpha
    p0p = complex(psi0_inner(model, xp))
    p1p = complex(psi1_inner(model, xp))
    # far enough out for a short 1/d series, so every tail amplitude is analytic
    start = max(abs(xp) + 1.0, abs(model.z) + 20.0 / a)
    psi0 = _psi0_expsum(model, start)
    psi1 = _psi1_expsum(model, start)
    cosines = _cos_expsum(A + a, xp) * (1.0 / (A + a)) + _cos_expsum(A - a, xp) * (1.0 / (A - a))
    cos_part = (psi0 * cosines) * (-p0p / (2 * math.pi * a))
    s_part = psi0 * p1p + psi1 * p0p
    tails = {}
    for side in ("right", "left"):
        band = cosine_band_expsum(A - a, A + a, xp, side)
        tails[side] = (_sinc_expsum(A, xp) + cos_part + (s_part * band) * (-1.0 / math.pi)).grouped()
    return XKernel(
        lambda x: inner_kernel_closed(model, A, x, xp).total,
        f"inner_kernel[alpha={a},A={A},x'={xp}]",
        tails,
        start,
        float(A + a),
        (float(xp),),
    )
