import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhresolve.contours import (
    Arc,
    Contour,
    DeformationSpec,
    InvalidDeformation,
    Line,
    edge_contour,
    epsilon_arc,
    inner_contour,
    integrate,
)
from nhresolve.quadrature import QuadratureError, fourier_tail, gauss_kronrod, ibp_tail_estimate


class TestGeometry:
    @pytest.mark.parametrize("direction", ["up", "down"])
    def test_edge_contour_shape(self, direction):
        c = edge_contour(10.0, DeformationSpec(0.5, direction))
        assert c.start == -10 and c.end == 10
        assert c.counts() == (2, 1)
        mid = c.segments[1].point(math.pi / 2 if direction == "up" else 3 * math.pi / 2)
        assert (mid.imag > 0) == (direction == "up")

    def test_inner_contour_shape(self):
        c = inner_contour(5.0, 1.0, DeformationSpec(0.3))
        assert c.counts() == (3, 2)
        assert c.descriptor()["alpha"] == 1.0

    @pytest.mark.parametrize("A,alpha,r", [(5.0, 1.0, 1.0), (1.5, 1.0, 0.6), (0.5, 1.0, 0.1)])
    def test_inner_radius_guard(self, A, alpha, r):
        with pytest.raises(InvalidDeformation):
            inner_contour(A, alpha, DeformationSpec(r))

    def test_spec_validation(self):
        with pytest.raises(InvalidDeformation):
            DeformationSpec(0.0)
        with pytest.raises(InvalidDeformation):
            DeformationSpec(0.1, "left")
        assert DeformationSpec(0.1, "up").flipped().direction == "down"

    def test_segments_must_join(self):
        with pytest.raises(InvalidDeformation):
            Contour((Line(0j, 1 + 0j), Line(2 + 0j, 3 + 0j)))

    def test_reverse_swaps_ends(self):
        c = edge_contour(3.0)
        r = c.reversed()
        assert r.start == c.end and r.end == c.start
        assert r.descriptor()["reversed"] is True

    @pytest.mark.parametrize("sign", [1, -1])
    def test_epsilon_arc_endpoints(self, sign):
        c = epsilon_arc(1.0, 0.2, sign)
        assert abs(c.start - 0.8) < 1e-15 and abs(c.end - 1.2) < 1e-15
        assert (c.segments[0].point(sign * math.pi / 2).imag > 0) == (sign > 0)


class TestIntegrate:
    def test_residue_of_simple_pole(self):
        circle = Contour((Arc(0.3 + 0j, 0.5, 0.0, 2 * math.pi),))
        assert integrate(circle, lambda k: np.exp(k) / (k - 0.3)) == pytest.approx(2j * math.pi * math.exp(0.3))

    def test_up_minus_down_around_pole(self):
        f = lambda k: 1.0 / k
        up = integrate(edge_contour(2.0, DeformationSpec(0.5, "up")), f)
        down = integrate(edge_contour(2.0, DeformationSpec(0.5, "down")), f)
        assert up - down == pytest.approx(-2j * math.pi, abs=1e-12)

    @given(st.floats(0.5, 20.0), st.floats(0.05, 0.2))
    @settings(max_examples=20, deadline=None)
    def test_entire_integrand_is_path_independent(self, A, frac):
        c = edge_contour(A, DeformationSpec(frac * A))
        assert integrate(c, lambda k: k * k + 1) == pytest.approx(2 * A**3 / 3 + 2 * A, rel=1e-12)

    def test_full_output(self):
        val, info = integrate(edge_contour(4.0), lambda k: np.cos(k), full_output=True)
        assert val == pytest.approx(2 * math.sin(4.0))
        assert len(info.segment_errors) == 3

    def test_tolerance_guard(self):
        with pytest.raises(ValueError):
            integrate(edge_contour(1.0), lambda k: k, 1e-3)


class TestGaussKronrod:
    def test_exponential(self):
        r = gauss_kronrod(np.exp, 0.0, 1.0)
        assert r.value == pytest.approx(math.e - 1, rel=1e-14)
        assert r.error < 1e-12

    def test_reversed_bounds(self):
        assert gauss_kronrod(np.exp, 1.0, 0.0).value == pytest.approx(1 - math.e, rel=1e-14)

    def test_kink_with_breakpoint(self):
        r = gauss_kronrod(lambda x: np.abs(x - 0.3), -1.0, 1.0, breakpoints=[0.3])
        assert r.value == pytest.approx(0.5 * 1.3**2 + 0.5 * 0.7**2, rel=1e-14)

    def test_budget_exhaustion(self):
        with pytest.raises(QuadratureError) as info:
            gauss_kronrod(lambda x: np.sin(1e4 * x) * np.exp(x), 0.0, 10.0, abs_tol=1e-14, rel_tol=1e-14,
                          max_panels=20)
        assert info.value.worst_interval is not None

    def test_non_finite_integrand(self):
        with pytest.raises(FloatingPointError):
            gauss_kronrod(lambda x: np.where(x > 0.5, np.inf, 1.0), 0.0, 1.0)


def _tail_oracle(omega, L, z):
    # int_L^inf exp(i omega x)/(x - z) dx = exp(i omega z) E1(-i omega (L - z))
    mp.mp.dps = 30
    return complex(mp.exp(1j * omega * z) * mp.e1(-1j * omega * (L - z)))


class TestFourierTail:
    @pytest.mark.parametrize("method", ["ray", "qawf"])
    @pytest.mark.parametrize("omega,L", [(1.0, 5.0), (-2.5, 3.0), (7.0, 40.0)])
    def test_against_exponential_integral(self, method, omega, L):
        z = 0.5 + 1j
        got = fourier_tail(lambda x: 1.0 / (x - z), omega, L, method=method)
        assert got == pytest.approx(_tail_oracle(omega, L, z), abs=1e-10)

    def test_left_side_by_reflection(self):
        z = 1j
        g = lambda x: 1.0 / (x - z)
        left = fourier_tail(g, 2.0, 6.0, "left")
        # substitute x -> -x: int_6^inf exp(-2ix)/(-x - z) dx
        right = fourier_tail(lambda y: -1.0 / (y + z), -2.0, 6.0)
        assert left == pytest.approx(right, abs=1e-13)

    def test_zero_frequency_rejected(self):
        with pytest.raises(ValueError):
            fourier_tail(lambda x: 1 / x, 0.0, 1.0)

    def test_ibp_estimate_dominates(self):
        g = lambda x: 1.0 / (x - 1j) ** 2
        est = ibp_tail_estimate(g, 3.0, 20.0)
        assert abs(fourier_tail(g, 3.0, 20.0)) <= 1.5 * est
