import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twogroup_sis import (
    AbsoluteState,
    DomainError,
    Matrix2,
    ModelParams,
    ParameterError,
    PlanarState,
    ProportionState,
    jacobian_planar,
    planar_to_simplex,
    r0,
    simplex_to_planar,
    total_population_rate,
    vf_absolute,
    vf_planar,
    vf_proportions,
)
from twogroup_sis.model import _f_proportions

from helpers import rel_gap, sample_params


class TestModelParams:
    def test_derived_quantities(self, pset_a):
        assert pset_a.b2 == pytest.approx(0.2)
        assert pset_a.q == pytest.approx(0.1)

    @pytest.mark.parametrize("field,value", [
        ("b", 0.0), ("b", -1.0), ("lambda2", 0.0), ("gamma1", -0.1),
        ("epsilon", float("nan")), ("p", 1.5), ("p", -0.1),
    ])
    def test_rejects_bad_values(self, field, value):
        data = dict(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=1.0, lambda2=5.0,
                    gamma1=0.3, gamma2=0.1, p=0.9)
        data[field] = value
        with pytest.raises(ParameterError):
            ModelParams(**data)

    def test_rejects_b1_above_b(self):
        with pytest.raises(ParameterError):
            ModelParams(b=0.3, b1=0.5, d=0.1, epsilon=0.2, lambda1=1.0,
                        lambda2=5.0, gamma1=0.3, gamma2=0.1, p=0.9)

    def test_boundary_p_accepted(self):
        for p in (0.0, 1.0):
            params = ModelParams(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=1.0,
                                 lambda2=5.0, gamma1=0.3, gamma2=0.1, p=p)
            assert params.q == 1.0 - p

    def test_dict_round_trip(self, pset_a):
        assert ModelParams.from_dict(pset_a.to_dict()) == pset_a

    def test_from_dict_strict(self, pset_a):
        data = pset_a.to_dict()
        data["extra"] = 1.0
        with pytest.raises(ParameterError, match="unknown"):
            ModelParams.from_dict(data)
        data = pset_a.to_dict()
        del data["b"]
        with pytest.raises(ParameterError, match="missing"):
            ModelParams.from_dict(data)


class TestStates:
    def test_absolute_requires_positive_population(self):
        with pytest.raises(DomainError):
            AbsoluteState(0.0, 0.0, 0.0)

    def test_proportions_simplex_tolerance(self):
        ProportionState(0.5, 0.3, 0.2)
        with pytest.raises(DomainError):
            ProportionState(0.5, 0.3, 0.3)

    def test_planar_triangle(self):
        PlanarState(0.4, 0.6)
        with pytest.raises(DomainError):
            PlanarState(0.7, 0.4)
        with pytest.raises(DomainError):
            PlanarState(-0.1, 0.4)

    def test_normalization(self):
        state = AbsoluteState(60.0, 30.0, 10.0)
        frac = state.to_proportions()
        assert (frac.s, frac.i1, frac.i2) == (0.6, 0.3, 0.1)


class TestR0:
    def test_pset_a_value(self, pset_a):
        # hand evaluation: 0.9*1.0/1.0 + 0.1*5.0/0.8
        assert r0(pset_a) == pytest.approx(1.525, rel=1e-14)

    def test_pset_b_value(self, pset_b):
        # hand evaluation: 0.5*0.5/1.0 + 0.5*0.8/0.8
        assert r0(pset_b) == pytest.approx(0.75, rel=1e-14)

    def test_p_one_single_group(self, pset_a):
        params = pset_a.replace(p=1.0)
        expected = params.lambda1 / (params.b + params.epsilon + params.gamma1)
        assert r0(params) == pytest.approx(expected, rel=1e-15)

    def test_positive(self, rng):
        for _ in range(50):
            assert r0(sample_params(rng)) > 0.0


class TestAbsoluteField:
    def test_disease_free_state(self, pset_a):
        n = 137.0
        dS, dI1, dI2 = vf_absolute(pset_a, AbsoluteState(n, 0.0, 0.0))
        assert dS == pytest.approx((pset_a.b - pset_a.d) * n, rel=1e-14)
        assert dI1 == 0.0 and dI2 == 0.0

    def test_pset_a_term_by_term_oracle(self, pset_a):
        # independent spreadsheet-style evaluation, one displayed term at a time
        S, I1, I2 = 80.0, 15.0, 5.0
        N = S + I1 + I2
        p = pset_a
        dS = (p.b1 * N + (p.b2 - p.d) * S + p.gamma1 * I1 + p.gamma2 * I2
              - p.lambda1 * I1 * S / N - p.lambda2 * I2 * S / N)
        dI1 = p.p * (p.lambda1 * I1 * S / N + p.lambda2 * I2 * S / N) \
            - (p.d + p.epsilon + p.gamma1) * I1
        dI2 = p.q * (p.lambda1 * I1 * S / N + p.lambda2 * I2 * S / N) \
            - (p.d + p.epsilon + p.gamma2) * I2
        got = vf_absolute(pset_a, AbsoluteState(S, I1, I2))
        assert got == pytest.approx((dS, dI1, dI2), rel=1e-12)
        assert got == pytest.approx((11.0, 19.8, 1.2), rel=1e-12)

    def test_component_sum_equals_population_rate(self, pset_a, rng):
        for _ in range(50):
            state = AbsoluteState(*rng.uniform(0.5, 200.0, size=3))
            total = sum(vf_absolute(pset_a, state))
            assert rel_gap(total, total_population_rate(pset_a, state)) <= 1e-12

    def test_population_rate_closed_forms(self, pset_a):
        n = 50.0
        assert total_population_rate(pset_a, AbsoluteState(n, 0.0, 0.0)) == \
            pytest.approx((pset_a.b - pset_a.d) * n, rel=1e-14)
        assert total_population_rate(pset_a, AbsoluteState(0.0, 30.0, 20.0)) == \
            pytest.approx((pset_a.b1 - pset_a.d - pset_a.epsilon) * n, rel=1e-14)


class TestProportionsField:
    def test_disease_free_corner_is_exact_zero(self, pset_a):
        assert vf_proportions(pset_a, ProportionState(1.0, 0.0, 0.0)) == (0.0, 0.0, 0.0)

    def test_edge_i1_zero(self, pset_a, rng):
        # on the face i1 = 0 the inflow into group 1 is p*lambda2*s*i2
        for _ in range(20):
            s = rng.uniform(0.0, 1.0)
            state = ProportionState(s, 0.0, 1.0 - s)
            _, di1, _ = vf_proportions(pset_a, state)
            assert di1 == pytest.approx(pset_a.p * pset_a.lambda2 * s * state.i2,
                                        rel=1e-13)

    def test_quotient_rule_oracle(self, pset_a):
        counts = (60.0, 30.0, 10.0)
        state = AbsoluteState(*counts)
        n = state.N
        d_abs = vf_absolute(pset_a, state)
        dn = total_population_rate(pset_a, state)
        expected = tuple((dx * n - x * dn) / (n * n) for x, dx in zip(counts, d_abs))
        got = vf_proportions(pset_a, ProportionState(0.6, 0.3, 0.1))
        assert got == pytest.approx(expected, rel=1e-10)

    def test_sum_dynamics_off_simplex(self, rng):
        # s' + i1' + i2' == (1 - sigma)(b1 + b2 s - eps i1 - eps i2), any sigma
        for _ in range(25):
            params = sample_params(rng)
            s, i1, i2 = rng.uniform(0.05, 0.8, size=3)
            ds, di1, di2 = _f_proportions(params, s, i1, i2)
            sigma = s + i1 + i2
            want = (1.0 - sigma) * (params.b1 + params.b2 * s
                                    - params.epsilon * (i1 + i2))
            assert rel_gap(ds + di1 + di2, want) <= 1e-12

    def test_boundary_inflow(self, rng):
        for _ in range(10):
            params = sample_params(rng)
            for tau in np.linspace(0.0, 1.0, 30):
                ds, _, _ = vf_proportions(params, ProportionState(0.0, tau, 1.0 - tau))
                _, di1, _ = vf_proportions(params, ProportionState(1.0 - tau, 0.0, tau))
                _, _, di2 = vf_proportions(params, ProportionState(1.0 - tau, tau, 0.0))
                assert min(ds, di1, di2) >= -1e-14


class TestPlanarField:
    def test_origin_is_rest_point(self, pset_a):
        assert vf_planar(pset_a, PlanarState(0.0, 0.0)) == (0.0, 0.0)

    def test_pset_a_term_by_term_oracle(self, pset_a):
        p = pset_a
        i1, i2 = 0.3, 0.1
        d1 = ((p.p * p.lambda1 - p.b - p.epsilon - p.gamma1) * i1
              + p.p * p.lambda2 * i2
              + (i1 + i2) * ((p.b2 + p.epsilon - p.p * p.lambda1) * i1
                             - p.p * p.lambda2 * i2))
        d2 = (p.q * p.lambda1 * i1
              + (p.q * p.lambda2 - p.b - p.epsilon - p.gamma2) * i2
              + (i1 + i2) * ((p.b2 + p.epsilon - p.q * p.lambda2) * i2
                             - p.q * p.lambda1 * i1))
        got = vf_planar(pset_a, PlanarState(i1, i2))
        assert got == pytest.approx((d1, d2), rel=1e-13)
        assert got == pytest.approx((0.18, -0.016), rel=1e-12)

    def test_matches_proportions_reduction(self, rng):
        for _ in range(30):
            params = sample_params(rng)
            i1 = rng.uniform(0.0, 1.0)
            i2 = rng.uniform(0.0, 1.0 - i1)
            _, p2, p3 = vf_proportions(params, ProportionState(1.0 - i1 - i2, i1, i2))
            f1, f2 = vf_planar(params, PlanarState(i1, i2))
            assert rel_gap(f1, p2) <= 1e-12
            assert rel_gap(f2, p3) <= 1e-12


class TestJacobian:
    def test_origin_matches_linearization_entries(self, pset_a):
        jac = jacobian_planar(pset_a, PlanarState(0.0, 0.0))
        p = pset_a
        assert jac.a11 == pytest.approx(p.p * p.lambda1 - p.b - p.epsilon - p.gamma1)
        assert jac.a12 == pytest.approx(p.p * p.lambda2)
        assert jac.a21 == pytest.approx(p.q * p.lambda1)
        assert jac.a22 == pytest.approx(p.q * p.lambda2 - p.b - p.epsilon - p.gamma2)

    def test_against_central_differences(self, rng):
        h = 1e-6
        for _ in range(5):
            params = sample_params(rng)
            for _ in range(20):
                i1 = rng.uniform(1e-3, 0.95)
                i2 = rng.uniform(1e-3, 1.0 - i1 - 1e-3)
                jac = jacobian_planar(params, PlanarState(i1, i2))
                analytic = np.array([[jac.a11, jac.a12], [jac.a21, jac.a22]])
                fd = np.empty((2, 2))
                for col, (dx, dy) in enumerate(((h, 0.0), (0.0, h))):
                    fp = vf_planar(params, PlanarState(i1 + dx, i2 + dy))
                    fm = vf_planar(params, PlanarState(i1 - dx, i2 - dy))
                    fd[0, col] = (fp[0] - fm[0]) / (2 * h)
                    fd[1, col] = (fp[1] - fm[1]) / (2 * h)
                scale = max(1.0, np.linalg.norm(analytic))
                assert np.linalg.norm(fd - analytic) / scale <= 1e-5

    def test_symmetric_parameters_commute_with_swap(self):
        params = ModelParams(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=2.0,
                             lambda2=2.0, gamma1=0.25, gamma2=0.25, p=0.5)
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        for i in (0.1, 0.25, 0.4):
            jac = jacobian_planar(params, PlanarState(i, i))
            m = np.array([[jac.a11, jac.a12], [jac.a21, jac.a22]])
            assert np.allclose(swap @ m, m @ swap, rtol=0.0, atol=1e-15)


class TestProjections:
    def test_planar_to_simplex_values(self):
        assert planar_to_simplex(PlanarState(0.0, 0.0)) == ProportionState(1.0, 0.0, 0.0)
        lifted = planar_to_simplex(PlanarState(0.3, 0.1))
        assert (lifted.s, lifted.i1, lifted.i2) == (0.6, 0.3, 0.1)

    def test_round_trip(self, rng):
        for _ in range(20):
            i1 = rng.uniform(0.0, 1.0)
            i2 = rng.uniform(0.0, 1.0 - i1)
            state = PlanarState(i1, i2)
            assert simplex_to_planar(planar_to_simplex(state)) == state


finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


class TestMatrix2:
    @given(finite, finite, finite, finite)
    @settings(max_examples=200, deadline=None)
    def test_eigenvalues_match_trace_and_det(self, a, b, c, d):
        m = Matrix2(a, b, c, d)
        e1, e2 = m.eigenvalues()
        scale = max(1.0, abs(m.trace), abs(m.det))
        assert abs((e1 + e2) - m.trace) <= 1e-12 * scale
        assert abs((e1 * e2) - m.det) <= 1e-12 * scale

    def test_complex_pair(self):
        e1, e2 = Matrix2(0.0, -1.0, 1.0, 0.0).eigenvalues()
        assert e1 == complex(0.0, -1.0) and e2 == complex(0.0, 1.0)

    def test_real_ordering(self):
        e1, e2 = Matrix2(3.0, 0.0, 0.0, -2.0).eigenvalues()
        assert (e1.real, e2.real) == (-2.0, 3.0)
        assert e1.imag == 0.0 and e2.imag == 0.0
