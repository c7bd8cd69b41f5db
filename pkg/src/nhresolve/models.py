"""Eigenfunctions of the two model Hamiltonians.

Edge model: an exceptional point of multiplicity ``n`` at the bottom of
the continuous spectrum, with continuum eigenfunctions

    psi_n(x; k) = exp(i k x) / sqrt(2 pi) * sum_j c_j / (k (x - z))^j .

Inner model: an exceptional point at ``E = alpha^2`` inside the continuum,
with eigenfunction ``psi0`` and associated function ``psi1``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
import sympy as sp

__all__ = [
    "EdgeModel",
    "InnerModel",
    "RationalPlaneWave",
    "edge_coefficients",
    "psi_edge",
    "psi_edge_amplitude",
    "psi_edge_krec",
    "potential_edge",
    "psi0_inner",
    "psi1_inner",
    "potential_inner",
    "inner_denominator",
    "schrodinger_residual",
    "parse_model",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


class PoleError(ZeroDivisionError):
    """Evaluation requested at a pole of the eigenfunction in ``k``."""


@dataclass(frozen=True)
class EdgeModel:
    n: int
    z: complex

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise ValueError("n must be a nonnegative integer")
        if complex(self.z).imag == 0:
            raise ValueError("edge model needs Im z != 0")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "z", complex(self.z))

    def descriptor(self) -> str:
        return f"edge({self.n},{self.z.real!r},{self.z.imag!r})"


@dataclass(frozen=True)
class InnerModel:
    alpha: float
    z: complex

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if complex(self.z).imag == 0:
            raise ValueError("inner model needs Im z != 0")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "z", complex(self.z))

    def descriptor(self) -> str:
        return f"inner({self.alpha!r},{self.z.real!r},{self.z.imag!r})"


@dataclass(frozen=True)
class RationalPlaneWave:
    """Coefficients ``c_0..c_n`` of ``psi_n`` in powers of ``1/(k (x - z))``."""

    coeffs: tuple

    def __call__(self, w):
        # Horner in w = 1/(k (x - z))
        out = np.zeros(np.shape(w), dtype=complex)
        for c in reversed(self.coeffs):
            out = out * w + c
        return out


@functools.lru_cache(maxsize=None)
def edge_coefficients(n: int) -> RationalPlaneWave:
    """Run the x-space raising recursion on coefficient lists.

    With ``k^m psi_m = i(-d/dx + m/(x-z)) [k^(m-1) psi_(m-1)]`` the
    coefficients update as ``c_j <- c_j + i (m + j - 1) c_(j-1)``.
    Exact integer (Gaussian) arithmetic; no differentiation per call.
    """
    c = [1 + 0j]
    for m in range(1, n + 1):
        new = c + [0j]
        for j in range(1, m + 1):
            new[j] = (c[j] if j < len(c) else 0) + 1j * (m + j - 1) * c[j - 1]
        c = new
    return RationalPlaneWave(tuple(complex(v) for v in c))


def _check_k(k):
    if np.any(np.asarray(k) == 0):
        raise PoleError("k = 0 is a pole of order n of psi_n")


def psi_edge_amplitude(model: EdgeModel, x, k, n: int | None = None):
    """``psi_n(x;k) * sqrt(2 pi) * exp(-i k x)``; ``x`` may be complex."""
    n = model.n if n is None else n
    _check_k(k)
    w = 1.0 / (np.asarray(k) * (np.asarray(x) - model.z))
    return edge_coefficients(n)(w)


def psi_edge(model: EdgeModel, x, k, n: int | None = None):
    """Continuum eigenfunction ``psi_n(x; k)`` (``n`` defaults to the model's)."""
    x = np.asarray(x)
    k = np.asarray(k)
    return np.exp(1j * k * x) / SQRT_2PI * psi_edge_amplitude(model, x, k, n)


@functools.lru_cache(maxsize=None)
def _krec_lambda(n: int):
    x, k, z = sp.symbols("x k z")
    psi = sp.exp(sp.I * k * x) / sp.sqrt(2 * sp.pi)
    for m in range(1, n + 1):
        inner = sp.diff(sp.exp(-sp.I * k * z) * psi, k) - m / k * sp.exp(-sp.I * k * z) * psi
        psi = sp.simplify(sp.exp(sp.I * k * z) / (sp.I * (x - z)) * inner)
    amp = sp.expand(sp.simplify(psi * sp.exp(-sp.I * k * x) * sp.sqrt(2 * sp.pi)))
    w = sp.symbols("w")
    amp = sp.expand(amp.subs(x, z + 1 / (k * w)))
    # re-expressed in w = 1/(k (x - z)): cancellation-free evaluation
    amp_fn = sp.lambdify((w,), amp, "numpy")
    return lambda xv, kv, zv: np.exp(1j * kv * xv) / SQRT_2PI * amp_fn(1.0 / (kv * (xv - zv)))


def psi_edge_krec(model: EdgeModel, x, k, n: int | None = None):
    """``psi_n`` built symbolically from the k-space lowering recursion.

    ``psi_m = exp(ikz)/(i(x-z)) (d/dk - m/k)(exp(-ikz) psi_(m-1))``; an
    independent route to the same functions as :func:`psi_edge`.
    """
    n = model.n if n is None else n
    _check_k(k)
    fn = _krec_lambda(n)
    x = np.asarray(x, dtype=complex)
    k = np.asarray(k, dtype=complex)
    return np.broadcast_to(fn(x, k, model.z), np.broadcast(x, k).shape).astype(complex)


def potential_edge(model: EdgeModel, x):
    """``n(n+1)/(x-z)^2``, the potential the ``psi_n`` solve at energy ``k^2``."""
    n = model.n
    return n * (n + 1) / (np.asarray(x) - model.z) ** 2


def inner_denominator(model: InnerModel, x):
    """``sin(2 alpha x) + 2 alpha (x - z)``; never zero on the real line."""
    a = model.alpha
    x = np.asarray(x)
    return np.sin(2 * a * x) + 2 * a * (x - model.z)


def psi0_inner(model: InnerModel, x):
    """Bound-state-like eigenfunction at ``E = alpha^2``."""
    a = model.alpha
    x = np.asarray(x)
    return 2 * a * math.sqrt(2 * a) * np.cos(a * x) / inner_denominator(model, x)


def psi1_inner(model: InnerModel, x):
    """Associated function: ``(h - alpha^2) psi1 = psi0``."""
    a = model.alpha
    x = np.asarray(x)
    num = 2 * a * (x - model.z) * np.sin(a * x) + np.cos(a * x)
    return num / (math.sqrt(2 * a) * inner_denominator(model, x))


def potential_inner(model: InnerModel, x):
    """``8 a^2 sin(2ax)/d + 32 a^2 cos^4(ax)/d^2`` with ``d`` the inner denominator."""
    a = model.alpha
    x = np.asarray(x)
    d = inner_denominator(model, x)
    return 8 * a * a * np.sin(2 * a * x) / d + 32 * a * a * np.cos(a * x) ** 4 / d**2


def schrodinger_residual(V, f, E, x, h: float = 1e-3):
    """``(-f'' + V f - E f)(x)`` with the five-point second difference."""
    if not 1e-6 < h < 1e-2:
        raise ValueError("step h must lie in (1e-6, 1e-2)")
    x = np.asarray(x, dtype=float)
    d2 = (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) - f(x - 2 * h)) / (12 * h * h)
    return -d2 + V(x) * f(x) - E * f(x)


def parse_model(text: str):
    """``"edge(n, z_re, z_im)"`` or ``"inner(alpha, z_re, z_im)"``."""
    from .testspace import parse_call

    name, args = parse_call(text)
    if name == "edge":
        n, zr, zi = args
        return EdgeModel(int(n), complex(zr, zi))
    if name == "inner":
        a, zr, zi = args
        return InnerModel(float(a), complex(zr, zi))
    raise KeyError(f"unknown model {name!r}; expected edge(...) or inner(...)")
