"""Deformed integration paths in the complex k-plane.

Three families are supported: the segment ``[-A, A]`` with a semicircular
detour around ``k = 0`` (edge model), the same segment with two detours
around ``k = +-alpha`` (inner model), and small semicircles around a real
point. Integration is adaptive Gauss-Kronrod per segment; arcs are
parametrized by angle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .quadrature import QuadratureError, gauss_kronrod

__all__ = [
    "Line",
    "Arc",
    "Contour",
    "DeformationSpec",
    "InvalidDeformation",
    "ContourIntegral",
    "edge_contour",
    "inner_contour",
    "epsilon_arc",
    "default_edge_radius",
    "default_inner_radius",
    "integrate",
]


class InvalidDeformation(ValueError):
    """Deformation radius or direction incompatible with the host segment."""


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    @property
    def start(self) -> complex:
        return complex(self.a)

    @property
    def end(self) -> complex:
        return complex(self.b)

    def reversed(self) -> "Line":
        return Line(self.b, self.a)

    def point(self, t):
        return self.a + (self.b - self.a) * np.asarray(t)


@dataclass(frozen=True)
class Arc:
    """``k = center + radius * exp(i theta)`` for theta from ``theta_start`` to ``theta_end``."""

    center: complex
    radius: float
    theta_start: float
    theta_end: float

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidDeformation("arc radius must be positive")

    @property
    def start(self) -> complex:
        return complex(self.center + self.radius * np.exp(1j * self.theta_start))

    @property
    def end(self) -> complex:
        return complex(self.center + self.radius * np.exp(1j * self.theta_end))

    def reversed(self) -> "Arc":
        return Arc(self.center, self.radius, self.theta_end, self.theta_start)

    def point(self, theta):
        return self.center + self.radius * np.exp(1j * np.asarray(theta))


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class Contour:
    """Oriented chain of segments; ``meta`` records how it was built."""

    segments: tuple
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for s1, s2 in zip(segs[:-1], segs[1:]):
            gap = abs(s1.end - s2.start)
            if gap > 1e-14 * max(1.0, abs(s1.end)):
                raise InvalidDeformation(f"segments do not join: gap {gap:.3e} at {s1.end}")

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    def reversed(self) -> "Contour":
        meta = dict(self.meta)
        meta["reversed"] = not meta.get("reversed", False)
        return Contour(tuple(s.reversed() for s in reversed(self.segments)), meta)

    def descriptor(self) -> dict:
        return dict(self.meta)

    def to_json(self) -> str:
        return json.dumps(self.descriptor(), sort_keys=True)

    def counts(self) -> tuple[int, int]:
        """Number of ``(lines, arcs)``."""
        n_arc = sum(isinstance(s, Arc) for s in self.segments)
        return len(self.segments) - n_arc, n_arc


@dataclass(frozen=True)
class DeformationSpec:
    r: float
    direction: str = "up"

    def __post_init__(self):
        if not self.r > 0:
            raise InvalidDeformation("deformation radius must be positive")
        if self.direction not in ("up", "down"):
            raise InvalidDeformation(f"direction must be 'up' or 'down', got {self.direction!r}")

    def flipped(self) -> "DeformationSpec":
        return DeformationSpec(self.r, "down" if self.direction == "up" else "up")


def _detour(center: float, r: float, direction: str) -> Arc:
    # from center - r to center + r, over (up) or under (down) the pole
    end = 0.0 if direction == "up" else 2 * math.pi
    return Arc(complex(center), r, math.pi, end)


def default_edge_radius(A: float) -> float:
    return min(0.5, A / 4)


def default_inner_radius(A: float, alpha: float) -> float:
    return min(0.3, alpha / 2, (A - alpha) / 2)


def edge_contour(A: float, spec: DeformationSpec | None = None) -> Contour:
    """``-A -> -r``, semicircle around ``k = 0``, ``r -> A``."""
    if not A > 0:
        raise InvalidDeformation("A must be positive")
    spec = spec or DeformationSpec(default_edge_radius(A))
    r = spec.r
    if r >= A:
        raise InvalidDeformation(f"radius {r} must be below A = {A}")
    segs = (Line(-A + 0j, -r + 0j), _detour(0.0, r, spec.direction), Line(r + 0j, A + 0j))
    return Contour(segs, {"type": "edge", "A": A, "r": r, "dir": spec.direction})


def inner_contour(A: float, alpha: float, spec: DeformationSpec | None = None) -> Contour:
    """``[-A, A]`` with same-direction detours around ``k = -alpha`` and ``k = +alpha``."""
    if not 0 < alpha < A:
        raise InvalidDeformation(f"need 0 < alpha < A, got alpha={alpha}, A={A}")
    spec = spec or DeformationSpec(default_inner_radius(A, alpha))
    r = spec.r
    if not r < min(alpha, A - alpha):
        raise InvalidDeformation(f"radius {r} must be below min(alpha, A - alpha) = {min(alpha, A - alpha)}")
    segs = (
        Line(-A + 0j, -alpha - r + 0j),
        _detour(-alpha, r, spec.direction),
        Line(-alpha + r + 0j, alpha - r + 0j),
        _detour(alpha, r, spec.direction),
        Line(alpha + r + 0j, A + 0j),
    )
    return Contour(segs, {"type": "inner", "A": A, "alpha": alpha, "r": r, "dir": spec.direction})


def epsilon_arc(k0: float, eps: float, sign: int = 1) -> Contour:
    """Semicircle ``k0 + eps [cos(pi - t) +- i sin(pi - t)]``, t from 0 to pi."""
    if not eps > 0:
        raise InvalidDeformation("eps must be positive")
    # upper sign: angle pi -> 0 through +i; lower sign: angle -pi -> 0 through -i
    start = math.pi if sign > 0 else -math.pi
    seg = Arc(complex(k0), eps, start, 0.0)
    return Contour((seg,), {"type": "eps_arc", "k0": k0, "eps": eps, "sign": "+" if sign > 0 else "-"})


@dataclass(frozen=True)
class ContourIntegral:
    value: complex
    error: float
    n_evals: int
    worst_segment: int
    segment_errors: tuple


def _segment_integral(seg: Segment, f, tol, period_hint):
    if isinstance(seg, Line):
        a, b = complex(seg.a), complex(seg.b)
        dk = b - a
        n_init = 1
        if period_hint:
            # one panel per oscillation period of exp(i k u)
            n_init = int(min(4000, max(1, math.ceil(abs(dk) * abs(period_hint) / (2 * math.pi)))))

        def g(t):
            return f(a + dk * t) * dk

        return gauss_kronrod(g, 0.0, 1.0, abs_tol=tol, rel_tol=tol, n_init=n_init)
    c, r = complex(seg.center), seg.radius

    def g(th):
        e = np.exp(1j * th)
        return f(c + r * e) * (1j * r * e)

    return gauss_kronrod(g, seg.theta_start, seg.theta_end, abs_tol=tol, rel_tol=tol, n_init=2)


def integrate(
    c: Contour,
    f: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-12,
    *,
    period_hint: float | None = None,
    full_output: bool = False,
):
    """Integrate a vectorized analytic ``f`` along ``c``.

    Args:
        c: path to integrate over.
        f: maps an array of complex ``k`` to values of the same shape.
        tol: absolute and relative tolerance per segment, in ``[1e-13, 1e-6]``.
        period_hint: frequency ``u`` of a dominant ``exp(i k u)`` factor; long
            lines are pre-split at its periods.
        full_output: also return a :class:`ContourIntegral` record.

    Raises:
        QuadratureError: a segment failed to converge; ``worst_interval`` holds
            the segment index.
    """
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    total = 0j
    errs = []
    n_evals = 0
    for i, seg in enumerate(c.segments):
        try:
            res = _segment_integral(seg, f, tol, period_hint)
        except QuadratureError as exc:
            raise QuadratureError(f"segment {i} ({seg!r}): {exc}", worst_interval=i, error=exc.error) from exc
        total += res.value
        errs.append(res.error)
        n_evals += res.n_evals
    worst = int(np.argmax(errs)) if errs else 0
    if not full_output:
        return complex(total)
    return complex(total), ContourIntegral(complex(total), float(sum(errs)), n_evals, worst, tuple(errs))
