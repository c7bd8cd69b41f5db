"""Test functions, weighted L2 norms and smooth windows.

Test functions live in the weighted spaces of smooth functions with
``int |f|^2 (1+|x|)^gamma dx < inf``; a second family of bounded or slowly
increasing functions ``eta(+-x) exp(i k0 x) |x|^kappa`` is handled through
explicit oscillatory tail data instead of a weight.
"""

from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import QuadratureError, gauss_kronrod

__all__ = [
    "WeightedL2",
    "SlowGrowth",
    "GammaWeight",
    "TestFunction",
    "NonFiniteIntegrand",
    "weighted_l2_norm",
    "membership_check",
    "eta_window",
    "eta_window_derivs",
    "plateau_window",
    "slow_growth_fn",
    "cutoff_split",
    "gaussian",
    "bump",
    "inverse_square",
    "constant",
    "cos_over_linear",
    "parse_test_function",
    "CATALOG",
]


@dataclass(frozen=True)
class WeightedL2:
    """Membership tag: the function lies in every weighted space with ``gamma < gamma_sup``."""

    gamma_sup: float


@dataclass(frozen=True)
class SlowGrowth:
    kappa: float
    k0: float
    sign: int


@dataclass(frozen=True)
class GammaWeight:
    gamma: float

    def __call__(self, x):
        return (1.0 + np.abs(x)) ** self.gamma


class NonFiniteIntegrand(ValueError):
    def __init__(self, x):
        super().__init__(f"non-finite integrand sample at x={x!r}")
        self.x = x


def _fd(fn, order, h=1e-4):
    if order == 1:
        return lambda x: (fn(x + h) - fn(x - h)) / (2 * h)
    if order == 2:
        return lambda x: (fn(x + h) - 2 * fn(x) + fn(x - h)) / h**2
    raise ValueError("only derivative orders 0-2 are supported")


@dataclass(frozen=True)
class TestFunction:
    """Smooth complex test function on the real line.

    ``tails`` optionally maps ``"right"``/``"left"`` to a list of ``(k0, amp)``
    pairs such that ``f(x) = sum amp(x) * exp(i k0 x)`` for ``|x| >= tail_start`` on
    that side, with ``amp`` analytic and accepting complex arguments; slowly
    increasing functions are paired through this representation. ``support`` is a closed interval
    outside of which ``f`` vanishes (or is below double precision) and
    ``freq`` a hint of the intrinsic oscillation frequency.
    """

    __test__ = False  # not a pytest class

    func: Callable
    growth: object
    label: str
    derivs: tuple = ()
    support: Optional[tuple] = None
    tails: dict = field(default_factory=dict)
    freq: float = 0.0
    tail_start: float = 2.0

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def deriv(self, order: int) -> Callable:
        """Evaluator of the ``order``-th derivative (0, 1 or 2)."""
        if order == 0:
            return self.__call__
        if order - 1 < len(self.derivs):
            d = self.derivs[order - 1]
            return lambda x: d(np.asarray(x, dtype=float))
        return _fd(self.__call__, order)

    def scaled(self, c, label=None) -> "TestFunction":
        return TestFunction(
            lambda x: c * self.func(x),
            self.growth,
            label or f"{c}*{self.label}",
            tuple((lambda d: (lambda x: c * d(x)))(d) for d in self.derivs),
            self.support,
            {s: [(k0, (lambda a: (lambda x: c * a(x)))(a)) for k0, a in terms] for s, terms in self.tails.items()},
            self.freq,
            self.tail_start,
        )

    def __add__(self, other: "TestFunction") -> "TestFunction":
        sup = None
        if self.support is not None and other.support is not None:
            sup = (min(self.support[0], other.support[0]), max(self.support[1], other.support[1]))
        derivs = ()
        if len(self.derivs) >= 2 and len(other.derivs) >= 2:
            derivs = tuple((lambda a, b: (lambda x: a(x) + b(x)))(a, b) for a, b in zip(self.derivs, other.derivs))
        g1, g2 = self.growth, other.growth
        growth = g1
        if isinstance(g1, WeightedL2) and isinstance(g2, WeightedL2):
            growth = WeightedL2(min(g1.gamma_sup, g2.gamma_sup))
        return TestFunction(
            lambda x: self.func(x) + other.func(x),
            growth,
            f"({self.label}+{other.label})",
            derivs,
            sup,
            _merge_tails(self, other),
            max(self.freq, other.freq),
            _tail_reach(self, other),
        )

    def tail_terms(self, side: str) -> list:
        """``[(k0, amp), ...]`` on ``side``, or ``None`` without tail data."""
        return self.tails.get(side)


def _tail_reach(f, g):
    # tails of a sum start beyond every compact support that lacks tail data
    reach = max(f.tail_start, g.tail_start)
    for h in (f, g):
        if h.support is not None and not h.tails:
            reach = max(reach, *(abs(p) for p in h.support if math.isfinite(p)))
    return reach


def _merge_tails(f, g):
    reach = _tail_reach(f, g)
    out = {}
    for side in ("right", "left"):
        tf, tg = f.tails.get(side), g.tails.get(side)
        f_zero = f.support is not None and (f.support[1] <= reach if side == "right" else f.support[0] >= -reach)
        g_zero = g.support is not None and (g.support[1] <= reach if side == "right" else g.support[0] >= -reach)
        if (tf is not None or f_zero) and (tg is not None or g_zero):
            out[side] = list(tf or []) + list(tg or [])
    return out


def _norm_breakpoints(R, support):
    pts = [0.0]
    r = 1.0
    while r < R:
        pts += [r, -r]
        r *= 4.0
    if support is not None:
        pts += [p for p in support if math.isfinite(p)]
    return pts


def weighted_l2_norm(f: TestFunction, gamma: float, R: float, *, abs_tol: float = 1e-10) -> float:
    """Truncated weighted norm ``(int_{-R}^{R} |f|^2 (1+|x|)^gamma dx)^(1/2)``.

    Raises:
        NonFiniteIntegrand: a sampled integrand value is not finite.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    weight = GammaWeight(gamma)

    def integrand(x):
        v = np.abs(f(x)) ** 2 * weight(x)
        bad = ~np.isfinite(v)
        if bad.any():
            raise NonFiniteIntegrand(float(np.asarray(x)[bad].flat[0]))
        return v

    a, b = -R, R
    if f.support is not None:
        a, b = max(a, f.support[0]), min(b, f.support[1])
        if a >= b:
            return 0.0
    n_init = max(1, int(math.ceil((b - a) * max(f.freq, 1.0) / 50.0)))
    res = gauss_kronrod(integrand, a, b, abs_tol=abs_tol, rel_tol=1e-13,
                        breakpoints=_norm_breakpoints(R, f.support), n_init=min(n_init, 2000))
    return math.sqrt(max(res.value.real, 0.0))


LADDER = (10.0, 1e2, 1e3, 1e4)


def membership_check(f: TestFunction, gamma: float) -> str:
    """Decide ``member`` / ``non_member`` / ``inconclusive`` from a truncation ladder.

    Squared norms are taken at R = 10, 1e2, 1e3, 1e4. ``member`` when the
    last two agree to 1e-6 relative, or when the ladder increments shrink
    geometrically (ratio < 0.9 on both of the last two steps), which catches
    power-law tails whose remainder is still above 1e-6 at R = 1e4.
    ``non_member`` when the squared norm grows by more than 1.5 across the
    final doubling 1e4 -> 2e4.
    """
    try:
        sq = [weighted_l2_norm(f, gamma, R) ** 2 for R in LADDER]
    except (NonFiniteIntegrand, QuadratureError):
        return "inconclusive"
    last = sq[-1]
    if last == 0.0 or abs(last - sq[-2]) <= 1e-6 * last:
        return "member"
    inc = np.diff(sq)
    if inc[0] > 0 and inc[1] > 0 and inc[2] >= 0:
        q1, q2 = inc[1] / inc[0], inc[2] / inc[1]
        if q1 < 0.9 and q2 < 0.9:
            return "member"
    try:
        doubled = weighted_l2_norm(f, gamma, 2 * LADDER[-1]) ** 2
    except (NonFiniteIntegrand, QuadratureError):
        return "inconclusive"
    if doubled > 1.5 * last:
        return "non_member"
    return "inconclusive"


# --- windows -------------------------------------------------------------

def _s(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _s_derivs(t):
    t = np.asarray(t, dtype=float)
    s = _s(t)
    d1 = np.zeros_like(t)
    d2 = np.zeros_like(t)
    pos = s > 0
    tp = t[pos]
    d1[pos] = s[pos] / tp**2
    d2[pos] = s[pos] * (1.0 / tp**4 - 2.0 / tp**3)
    return s, d1, d2


def eta_window(x):
    """Smooth step: 0 on (-inf, 1], 1 on [2, inf), ``exp(-1/t)`` blend between."""
    a = _s(np.asarray(x, dtype=float) - 1.0)
    b = _s(2.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def eta_window_derivs(x):
    """Return ``(eta, eta', eta'')`` at ``x``."""
    x = np.asarray(x, dtype=float)
    a, a1, a2 = _s_derivs(x - 1.0)
    b, b1, b2 = _s_derivs(2.0 - x)
    b1 = -b1
    S = a + b
    eta = a / S
    num1 = a1 * b - a * b1
    d1 = num1 / S**2
    d2 = ((a2 * b - a * b2) * S - 2.0 * num1 * (a1 + b1)) / S**3
    return eta, d1, d2


def plateau_window(t):
    """Reflected window: 1 for t < 0, 0 for t > 1 (``1 - eta(t+1)``)."""
    return 1.0 - eta_window(np.asarray(t, dtype=float) + 1.0)


# --- catalog -------------------------------------------------------------

def slow_growth_fn(kappa: float, k0: float, sign: int = 1) -> TestFunction:
    """``x -> eta(sign*x) exp(i k0 x) |x|^kappa``."""
    if not 0.0 <= kappa < 1.0:
        raise ValueError("kappa must lie in [0, 1)")
    sign = 1 if sign > 0 else -1

    def h_derivs(y):
        eta, e1, e2 = eta_window_derivs(y)
        live = y > 1.0
        yp = np.where(live, y, 2.0)
        p0 = yp**kappa
        p1 = kappa * yp ** (kappa - 1.0)
        p2 = kappa * (kappa - 1.0) * yp ** (kappa - 2.0)
        h0 = np.where(live, eta * p0, 0.0)
        h1 = np.where(live, e1 * p0 + eta * p1, 0.0)
        h2 = np.where(live, e2 * p0 + 2 * e1 * p1 + eta * p2, 0.0)
        return h0, h1, h2

    def f0(x):
        h0, _, _ = h_derivs(sign * x)
        return np.exp(1j * k0 * x) * h0

    def f1(x):
        h0, h1, _ = h_derivs(sign * x)
        return np.exp(1j * k0 * x) * (1j * k0 * h0 + sign * h1)

    def f2(x):
        h0, h1, h2 = h_derivs(sign * x)
        return np.exp(1j * k0 * x) * (-(k0**2) * h0 + 2j * k0 * sign * h1 + h2)

    side = "right" if sign > 0 else "left"
    tails = {side: [(k0, lambda x: (sign * x) ** kappa)]}
    support = (1.0, math.inf) if sign > 0 else (-math.inf, -1.0)
    return TestFunction(f0, SlowGrowth(kappa, k0, sign), f"slow_growth({kappa},{k0},{'+' if sign > 0 else '-'})",
                        (f1, f2), support, tails, abs(k0))


def gaussian(center: float = 0.0, width: float = 1.0) -> TestFunction:
    """``exp(-((x-center)/width)^2)``."""
    c, w = float(center), float(width)

    def f0(x):
        return np.exp(-(((x - c) / w) ** 2)) + 0j

    def f1(x):
        s = (x - c) / w
        return -2 * s / w * np.exp(-s * s) + 0j

    def f2(x):
        s = (x - c) / w
        return (4 * s * s - 2) / w**2 * np.exp(-s * s) + 0j

    return TestFunction(f0, WeightedL2(math.inf), f"gaussian({c},{w})", (f1, f2), (c - 9 * w, c + 9 * w), {}, 1.0 / w)


def bump(center: float = 0.0, radius: float = 1.0) -> TestFunction:
    """``exp(1 - 1/(1-s^2))`` for ``|s| < 1`` with ``s = (x-center)/radius``; peak value 1."""
    c, r = float(center), float(radius)

    def parts(x):
        s = (x - c) / r
        inside = np.abs(s) < 1
        q = np.where(inside, 1 - s * s, 1.0)
        f = np.where(inside, np.exp(1 - 1 / q), 0.0)
        return s, q, f

    def f0(x):
        return parts(x)[2] + 0j

    def f1(x):
        s, q, f = parts(x)
        return f * (-2 * s / (r * q * q)) + 0j

    def f2(x):
        s, q, f = parts(x)
        return f * (4 * s * s / (r * r * q**4) - 2 / (r * r * q * q) - 8 * s * s / (r * r * q**3)) + 0j

    return TestFunction(f0, WeightedL2(math.inf), f"bump({c},{r})", (f1, f2), (c - r, c + r), {}, 2.0 / r)


def inverse_square(z: complex = 1j) -> TestFunction:
    """``(x - z)^(-2)``; needs ``Im z != 0``."""
    z = complex(z)
    if z.imag == 0:
        raise ValueError("inverse_square needs Im z != 0")
    return TestFunction(
        lambda x: (x - z) ** -2.0,
        WeightedL2(3.0),
        f"inverse_square({z})",
        (lambda x: -2.0 * (x - z) ** -3.0, lambda x: 6.0 * (x - z) ** -4.0),
        None,
        {"right": [(0.0, lambda x: (x - z) ** -2.0)], "left": [(0.0, lambda x: (x - z) ** -2.0)]},
    )


def constant(c: complex = 1.0) -> TestFunction:
    c = complex(c)
    zero = lambda x: np.zeros(np.shape(x), dtype=complex)
    return TestFunction(
        lambda x: np.full(np.shape(x), c, dtype=complex),
        WeightedL2(-1.0),
        f"constant({c})",
        (zero, zero),
        None,
        {"right": [(0.0, lambda x: c + 0 * x)], "left": [(0.0, lambda x: c + 0 * x)]},
    )


def cos_over_linear(k0: float = 1.0, z: complex = 1j) -> TestFunction:
    """``cos(k0 x) / (x - z)``; square integrable against weights with gamma < 1."""
    z = complex(z)
    k0 = float(k0)
    half = lambda x: 0.5 / (x - z)
    return TestFunction(
        lambda x: np.cos(k0 * x) / (x - z),
        WeightedL2(1.0),
        f"cos_over_linear({k0},{z})",
        (
            lambda x: -k0 * np.sin(k0 * x) / (x - z) - np.cos(k0 * x) / (x - z) ** 2,
            lambda x: -(k0**2) * np.cos(k0 * x) / (x - z) + 2 * k0 * np.sin(k0 * x) / (x - z) ** 2
            + 2 * np.cos(k0 * x) / (x - z) ** 3,
        ),
        None,
        {side: [(k0, half), (-k0, half)] for side in ("right", "left")},
        abs(k0),
    )


def cutoff_split(f: TestFunction, R: float) -> tuple[TestFunction, TestFunction]:
    """Split ``f = near + far`` with ``near = w(|x|-R) f`` and the reflected window ``w``.

    ``near`` vanishes for ``|x| > R+1`` and ``far`` vanishes for ``|x| < R``.
    """
    if R <= 0:
        raise ValueError("R must be positive")

    def window(x):
        # far window eta(|x|-R+1) and its x-derivatives
        ax = np.abs(x)
        e0, e1, e2 = eta_window_derivs(ax - R + 1.0)
        sg = np.sign(x)
        return e0, e1 * sg, e2

    f_d1, f_d2 = f.deriv(1), f.deriv(2)

    def far0(x):
        return window(x)[0] * f(x)

    def far1(x):
        w0, w1, _ = window(x)
        return w1 * f(x) + w0 * f_d1(x)

    def far2(x):
        w0, w1, w2 = window(x)
        return w2 * f(x) + 2 * w1 * f_d1(x) + w0 * f_d2(x)

    def near0(x):
        return (1.0 - window(x)[0]) * f(x)

    def near1(x):
        w0, w1, _ = window(x)
        return -w1 * f(x) + (1.0 - w0) * f_d1(x)

    def near2(x):
        w0, w1, w2 = window(x)
        return -w2 * f(x) - 2 * w1 * f_d1(x) + (1.0 - w0) * f_d2(x)

    near_support = (-R - 1.0, R + 1.0)
    if f.support is not None:
        near_support = (max(near_support[0], f.support[0]), min(near_support[1], f.support[1]))
    near = TestFunction(near0, WeightedL2(math.inf), f"near[{R}]({f.label})", (near1, near2), near_support, {}, f.freq)
    far = TestFunction(far0, f.growth, f"far[{R}]({f.label})", (far1, far2), f.support, dict(f.tails), f.freq,
                       max(f.tail_start, R + 1.0))
    return near, far


CATALOG = {
    "gaussian": gaussian,
    "bump": bump,
    "slow_growth": slow_growth_fn,
    "inverse_square": inverse_square,
    "constant": constant,
    "cos_over_linear": cos_over_linear,
}

_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def parse_call(text: str) -> tuple[str, tuple]:
    """Split ``"name(a, b, ...)"`` into the name and literal arguments."""
    m = _CALL.match(text)
    if not m:
        raise ValueError(f"cannot parse {text!r}")
    name, args = m.group(1), m.group(2)
    if not args or not args.strip():
        return name, ()
    args = args.strip()
    signs = {"+": 1, "-": -1}
    parts = []
    for piece in args.split(","):
        piece = piece.strip()
        if piece in signs:
            parts.append(signs[piece])
        else:
            parts.append(ast.literal_eval(piece))
    return name, tuple(parts)


def parse_test_function(text: str) -> TestFunction:
    """Build a catalog test function from ``"gaussian(0,1)"``-style text.

    ``inverse_square`` and ``cos_over_linear`` accept ``z`` either as one
    complex literal (``1j``) or as trailing ``z_re, z_im``.
    """
    name, args = parse_call(text)
    if name not in CATALOG:
        raise KeyError(f"unknown test function {name!r}; known: {sorted(CATALOG)}")
    if name == "inverse_square" and len(args) == 2:
        args = (complex(args[0], args[1]),)
    if name == "cos_over_linear" and len(args) == 3:
        args = (args[0], complex(args[1], args[2]))
    return CATALOG[name](*args)
