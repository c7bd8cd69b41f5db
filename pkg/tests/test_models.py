import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nhresolve.models import (
    EdgeModel,
    InnerModel,
    PoleError,
    edge_coefficients,
    inner_denominator,
    parse_model,
    potential_edge,
    potential_inner,
    psi0_inner,
    psi1_inner,
    psi_edge,
    psi_edge_krec,
    schrodinger_residual,
)

ks = st.floats(0.2, 5.0).flatmap(lambda a: st.sampled_from([a, -a]))
xs = st.floats(-6.0, 6.0)


class TestEdgeModel:
    def test_low_order_coefficients(self):
        # psi_1 = exp(ikx)/sqrt(2pi) (1 + i/(k(x-z)))
        assert edge_coefficients(0).coeffs == (1 + 0j,)
        assert edge_coefficients(1).coeffs == (1 + 0j, 1j)
        assert edge_coefficients(2).coeffs == (1 + 0j, 3j, -3 + 0j)

    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
    @given(x=xs, k=ks)
    @settings(max_examples=25, deadline=None)
    def test_two_recursions_agree(self, n, x, k):
        m = EdgeModel(n, 0.3 + 1j)
        a = psi_edge(m, x, k)
        b = psi_edge_krec(m, x, k)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("k", [0.7, -1.9, 3.3])
    def test_solves_schrodinger(self, n, k):
        m = EdgeModel(n, 1j)
        x = np.linspace(-4, 4, 9)
        res = schrodinger_residual(lambda y: potential_edge(m, y), lambda y: psi_edge(m, y, k), k * k, x)
        assert np.max(np.abs(res)) < 1e-6

    def test_pole_at_zero(self):
        with pytest.raises(PoleError):
            psi_edge(EdgeModel(1, 1j), 0.0, 0.0)

    @pytest.mark.parametrize("bad", [dict(n=-1, z=1j), dict(n=1.5, z=1j), dict(n=1, z=2.0)])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            EdgeModel(**bad)

    @given(xs, ks)
    @settings(max_examples=30, deadline=None)
    def test_plane_wave_asymptotics(self, x, k):
        # psi_n -> exp(ikx)/sqrt(2 pi) far from z
        m = EdgeModel(2, 1j)
        far = 1e7 + x
        assert psi_edge(m, far, k) == pytest.approx(np.exp(1j * k * far) / math.sqrt(2 * math.pi), abs=1e-6)


class TestInnerModel:
    @pytest.mark.parametrize("alpha,z", [(1.0, 1j), (0.5, 0.3 + 2j), (2.0, -1 + 0.5j)])
    def test_jordan_chain(self, alpha, z):
        m = InnerModel(alpha, z)
        V = lambda y: potential_inner(m, y)
        x = np.linspace(-5, 5, 21)
        E = alpha**2
        r0 = schrodinger_residual(V, lambda y: psi0_inner(m, y), E, x)
        r1 = schrodinger_residual(V, lambda y: psi1_inner(m, y), E, x)
        scale = np.max(np.abs(psi0_inner(m, x)))
        assert np.max(np.abs(r0)) < 1e-5 * scale
        np.testing.assert_allclose(r1, psi0_inner(m, x), atol=1e-5 * scale)

    @given(st.floats(-1e3, 1e3), st.floats(0.1, 4.0), st.floats(0.05, 3.0))
    @settings(max_examples=50, deadline=None)
    def test_denominator_never_vanishes(self, x, alpha, zi):
        m = InnerModel(alpha, complex(0.2, zi))
        # |Im d| = 2 alpha Im z on the real line
        assert abs(inner_denominator(m, x)) >= 2 * alpha * zi * (1 - 1e-12)

    def test_psi0_decays_like_inverse_x(self):
        # x psi0 -> sqrt(2 alpha) cos(alpha x)
        m = InnerModel(1.0, 1j)
        x = np.array([1e3, 1e4, 1e5])
        np.testing.assert_allclose(np.abs(psi0_inner(m, x) * x), np.abs(math.sqrt(2) * np.cos(x)), rtol=2e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            InnerModel(0.0, 1j)
        with pytest.raises(ValueError):
            InnerModel(1.0, 0.5)


class TestParsing:
    @pytest.mark.parametrize("text,model", [
        ("edge(2,0,1)", EdgeModel(2, 1j)),
        ("inner(1.5, -0.5, 2)", InnerModel(1.5, -0.5 + 2j)),
    ])
    def test_round_trip(self, text, model):
        parsed = parse_model(text)
        assert parsed == model
        assert parse_model(parsed.descriptor()) == model

    def test_unknown(self):
        with pytest.raises(KeyError):
            parse_model("bulk(1,0,1)")

    def test_residual_step_guard(self):
        with pytest.raises(ValueError):
            schrodinger_residual(lambda x: 0 * x, np.sin, 1.0, 0.0, h=0.5)
