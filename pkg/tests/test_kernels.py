import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhresolve.contours import DeformationSpec
from nhresolve.kernels import (
    ExpSum,
    _inv_d_expsum,
    _psi0_expsum,
    _psi1_expsum,
    biortho_induction_check,
    biortho_partial_closed,
    biortho_partial_quadrature,
    cosine_band,
    cosine_band_expsum,
    edge_induction_check,
    edge_kernel_closed,
    edge_kernel_direct,
    edge_kernel_slice,
    est_bound,
    est_constants,
    exp1_scaled,
    inner_eps_kernel_closed,
    inner_eps_kernel_direct,
    inner_kernel_closed,
    inner_kernel_direct,
    inner_kernel_slice,
    inner_product_integrand,
    inner_residues,
    shape_constant,
    sinc_kernel,
)
from nhresolve.models import EdgeModel, InnerModel, PoleError, psi0_inner, psi1_inner

# e^w E1(w), 30-digit mpmath values
EXP1_SCALED = [
    (0.5, 0.9229106324837305 + 0j),
    (3 + 4j, 0.12221459566956695 - 0.1284850018092138j),
    (-2 + 0.5j, -0.474820732992845 - 0.4648611599521524j),
    (25 - 10j, 0.0335256386551001 + 0.012925004957156254j),
    (1 + 100j, 0.00019984032463975725 - 0.009995006480538627j),
    (40j, 0.0006226848102655585 - 0.02496898012626847j),
    (-30 + 5j, -0.03352387923361902 - 0.00579496900669803j),
]

# 2 sup |(1 + xi) sin(xi)/xi|, maximiser xi = 1.2150499016517...
SHAPE_C = 3.41773368546945761954


class TestEdgeKernel:
    def test_sinc_value(self):
        kv = edge_kernel_closed(EdgeModel(0, 1j), 10.0, 0.4, -0.7)
        assert kv.total == pytest.approx(math.sin(11.0) / (1.1 * math.pi), abs=1e-15)
        assert kv["boundary"] == 0

    def test_sinc_diagonal_limit(self):
        assert sinc_kernel(7.0, 0.0) == pytest.approx(7.0 / math.pi)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("direction", ["up", "down"])
    def test_closed_against_contour(self, n, direction):
        m = EdgeModel(n, 1j)
        rng = np.random.default_rng(n)
        for x, xp in rng.uniform(-3, 3, (3, 2)):
            closed = complex(edge_kernel_closed(m, 10.0, x, xp).total)
            direct = edge_kernel_direct(m, 10.0, DeformationSpec(0.5, direction), x, xp)
            assert abs(closed - direct) <= 1e-8 * max(1.0, abs(closed))

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_induction_step(self, n):
        assert edge_induction_check(EdgeModel(n, 1j), 5.0, None, 0.8, -1.3)["residual"] < 1e-9

    def test_induction_needs_positive_n(self):
        with pytest.raises(ValueError):
            edge_induction_check(EdgeModel(0, 1j), 5.0, None, 0.8, -1.3)

    def test_rejects_nonpositive_cutoff(self):
        with pytest.raises(ValueError):
            edge_kernel_closed(EdgeModel(1, 1j), 0.0, 0.1, 0.2)


class TestBiorthogonality:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("k,kp", [(0.7, 1.9), (-2.2, 0.4), (3.0, -4.5)])
    def test_closed_against_quadrature(self, n, k, kp):
        m = EdgeModel(n, 1j)
        closed = complex(biortho_partial_closed(m, 5.0, k, kp).total)
        quad = biortho_partial_quadrature(m, 5.0, k, kp)
        assert abs(closed - quad) <= 1e-8 * max(1.0, abs(closed))

    def test_diagonal(self):
        kv = biortho_partial_closed(EdgeModel(1, 1j), 3.0, 1.2, 1.2)
        assert kv["sinc"] == pytest.approx(1.2**2 * 3.0 / math.pi)

    def test_x_space_induction(self):
        assert biortho_induction_check(EdgeModel(2, 1j), 5.0, 0.9, 1.7)["residual"] < 1e-10


class TestInnerKernel:
    m = InnerModel(1.0, 1j)

    @pytest.mark.parametrize("A", [2.0, 5.0])
    @pytest.mark.parametrize("x,xp", [(0.3, -0.4), (2.1, 1.0), (-2.7, 0.9)])
    def test_closed_against_contour_both_ways(self, A, x, xp):
        closed = complex(inner_kernel_closed(self.m, A, x, xp).total)
        up = inner_kernel_direct(self.m, A, DeformationSpec(0.3, "up"), x, xp)
        down = inner_kernel_direct(self.m, A, DeformationSpec(0.3, "down"), x, xp)
        assert abs(closed - up) <= 1e-8 * max(1, abs(closed))
        assert abs(up - down) <= 1e-10 * max(1, abs(up))

    @pytest.mark.parametrize("eps", [0.2, 0.5])
    @pytest.mark.parametrize("sign", [1, -1])
    def test_eps_kernel(self, eps, sign):
        closed = complex(inner_eps_kernel_closed(self.m, eps, 0.7, -0.2).total)
        assert inner_eps_kernel_direct(self.m, eps, 0.7, -0.2, sign) == pytest.approx(closed, abs=1e-9)

    @given(st.floats(-4, 4), st.floats(-4, 4))
    @settings(max_examples=10, deadline=None)
    def test_residues_cancel(self, x, xp):
        r_minus, r_plus = inner_residues(self.m, x, xp)
        assert abs(r_minus + r_plus) < 1e-10

    def test_pole_guard(self):
        with pytest.raises(PoleError):
            inner_product_integrand(self.m, 0.1, 0.2, 1.0)

    def test_cutoff_guard(self):
        with pytest.raises(ValueError):
            inner_kernel_closed(self.m, 0.5, 0.0, 0.1)
        with pytest.raises(ValueError):
            inner_eps_kernel_closed(self.m, 1.5, 0.0, 0.1)


class TestSpecialFunctions:
    @pytest.mark.parametrize("w,expected", EXP1_SCALED)
    def test_exp1_scaled(self, w, expected):
        assert complex(exp1_scaled(w)) == pytest.approx(expected, rel=1e-13)

    def test_exp1_branches_meet(self):
        w = 20.0 * np.exp(1j * np.linspace(-3.0, 3.0, 13))
        inside = exp1_scaled(w * (1 - 1e-9))
        outside = exp1_scaled(w * (1 + 1e-9))
        np.testing.assert_allclose(inside, outside, rtol=1e-8)

    @pytest.mark.parametrize("a,b,u,expected", [
        (2.0, 5.0, 0.7, -0.494135133607158321735766668448),
        (0.5, 6.0, 3.0, -0.513831420194900891458523301445),
    ])
    def test_cosine_band_reference(self, a, b, u, expected):
        assert cosine_band(a, b, u) == pytest.approx(expected, rel=1e-13)

    @given(st.floats(0.1, 5.0), st.floats(0.01, 5.0))
    @settings(max_examples=40, deadline=None)
    def test_cosine_band_series_meets_ci(self, a, width):
        b = a + width
        u = 1.0 / b
        lo, hi = cosine_band(a, b, u * (1 - 1e-14)), cosine_band(a, b, u * (1 + 1e-14))
        assert lo == pytest.approx(hi, abs=1e-11)

    def test_cosine_band_at_zero_is_log(self):
        assert cosine_band(1.0, 3.0, 0.0) == pytest.approx(math.log(3.0))

    def test_cosine_band_guard(self):
        with pytest.raises(ValueError):
            cosine_band(2.0, 1.0, 0.3)


class TestEstimate:
    def test_shape_constant(self):
        assert shape_constant() == pytest.approx(SHAPE_C, rel=1e-12)

    def test_constant_composition(self):
        c = est_constants(InnerModel(1.0, 1j))
        assert c["D"] == pytest.approx(2 * c["C"] * c["sup_psi0"] * c["sup_psi1"])

    @given(st.floats(-200, 200))
    @settings(max_examples=50, deadline=None)
    def test_sups_bound_samples(self, x):
        m = InnerModel(1.0, 1j)
        c = est_constants(m)
        assert abs(psi0_inner(m, x)) <= c["sup_psi0"] * (1 + 1e-9)
        assert abs(psi1_inner(m, x)) <= c["sup_psi1"] * (1 + 1e-9)

    def test_bound_decays_in_separation(self):
        m = InnerModel(1.0, 1j)
        b = est_bound(m, 10.0, np.array([0.0, 1.0, 10.0]))
        assert np.all(np.diff(b) < 0)


def _far(side, L):
    x = np.linspace(L, 3 * L, 40)
    return x if side == "right" else -x


class TestTailForms:
    @pytest.mark.parametrize("side", ["right", "left"])
    def test_inverse_denominator_series(self, side):
        m = InnerModel(1.0, 1j)
        x = _far(side, 10.0)
        d = np.sin(2 * x) + 2 * (x - 1j)
        np.testing.assert_allclose(_inv_d_expsum(m, 10.0)(x), 1 / d, rtol=1e-13)

    def test_series_needs_room(self):
        with pytest.raises(ValueError):
            _inv_d_expsum(InnerModel(1.0, 1j), 2.0)

    @pytest.mark.parametrize("L", [None, 12.0])
    def test_psi_expansions(self, L):
        m = InnerModel(1.0, 1j)
        x = _far("right", 12.0)
        np.testing.assert_allclose(_psi0_expsum(m, L)(x), psi0_inner(m, x), rtol=1e-12)
        np.testing.assert_allclose(_psi1_expsum(m, L)(x), psi1_inner(m, x), rtol=1e-12)

    @pytest.mark.parametrize("side", ["right", "left"])
    def test_cosine_band_expansion(self, side):
        xp = 0.4
        x = _far(side, 5.0)
        np.testing.assert_allclose(cosine_band_expsum(4.0, 6.0, xp, side)(x), cosine_band(4.0, 6.0, x - xp),
                                   rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_edge_slice_tails(self, n):
        k = edge_kernel_slice(EdgeModel(n, 1j), 25.0, 0.3)
        for side in ("right", "left"):
            x = _far(side, max(k.tail_start, 2.0))
            np.testing.assert_allclose(k.tails[side](x), k(x), rtol=1e-10, atol=1e-15)

    def test_inner_slice_tails(self):
        k = inner_kernel_slice(InnerModel(1.0, 1j), 25.0, 0.3)
        for side in ("right", "left"):
            x = _far(side, max(k.tail_start, 2.0))
            np.testing.assert_allclose(k.tails[side](x), k(x), rtol=1e-9, atol=1e-14)

    def test_expsum_algebra(self):
        a = ExpSum.wave(1.0, 2.0) + ExpSum.wave(-1.0, 3.0)
        b = (a * ExpSum.wave(1.0)).grouped()
        x = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(b(x), a(x) * np.exp(1j * x))
        assert sorted(t.omega for t in b.terms) == [0.0, 2.0]
