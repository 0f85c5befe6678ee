import math

import numpy as np
import pytest

from twogroup_sis import (
    IntegratorConfig,
    ModelParams,
    ParameterError,
    PlanarState,
    StabilityClass,
    all_rest_points,
    classify_origin,
    endemic_equilibrium,
    equilibrium_quadratic,
    equilibrium_ray,
    integrate,
    jacobian_planar,
    origin_matrix,
    r0,
    vf_planar,
)
from twogroup_sis.equilibria import _elimination_value

from helpers import r0_one_lambda1, rel_gap, sample_params, sample_params_r0

SYMMETRIC = dict(b=0.5, b1=0.3, d=0.1, epsilon=0.2, lambda1=2.0, lambda2=2.0,
                 gamma1=0.25, gamma2=0.25, p=0.5)


class TestOriginMatrix:
    def test_p_one_triangular(self, pset_a):
        params = pset_a.replace(p=1.0)
        c = origin_matrix(params)
        assert c.a21 == 0.0
        e1, e2 = c.eigenvalues()
        assert sorted([e1.real, e2.real]) == sorted([c.a11, c.a22])

    def test_pset_a_det_negative(self, pset_a):
        assert origin_matrix(pset_a).det < 0.0

    def test_pset_b_det_positive_trace_negative(self, pset_b):
        c = origin_matrix(pset_b)
        assert c.det > 0.0 and c.trace < 0.0

    def test_matches_jacobian_at_origin(self, rng):
        for _ in range(20):
            params = sample_params(rng)
            c = origin_matrix(params)
            j = jacobian_planar(params, PlanarState(0.0, 0.0))
            for a, b in zip((c.a11, c.a12, c.a21, c.a22),
                            (j.a11, j.a12, j.a21, j.a22)):
                assert rel_gap(a, b) <= 1e-12

    def test_det_sign_tracks_threshold(self, rng):
        # the determinant factors through (1 - R0); check the sign only,
        # computed from the entries
        for _ in range(100):
            params = sample_params(rng)
            det = origin_matrix(params).det
            gap = 1.0 - r0(params)
            if abs(gap) > 1e-10:
                assert (det > 0.0) == (gap > 0.0)


class TestClassifyOrigin:
    def test_pset_b_sink(self, pset_b):
        assert classify_origin(pset_b) is StabilityClass.SINK

    def test_pset_a_saddle(self, pset_a):
        assert classify_origin(pset_a) is StabilityClass.SADDLE

    def test_threshold_tuned_non_hyperbolic(self, pset_a):
        params = pset_a.replace(lambda1=r0_one_lambda1(pset_a))
        assert abs(r0(params) - 1.0) < 1e-12
        assert classify_origin(params) is StabilityClass.NON_HYPERBOLIC


class TestQuadraticForm:
    def test_outer_coefficients_by_evaluation(self, rng):
        for _ in range(20):
            params = sample_params(rng)
            form = equilibrium_quadratic(params)
            assert rel_gap(form(1.0, 0.0), form.a) <= 1e-12
            assert rel_gap(form(0.0, 1.0), form.c) <= 1e-12

    def test_pset_a_closed_forms(self, pset_a):
        form = equilibrium_quadratic(pset_a)
        # hand evaluation: a = 0.1*1.0*(0.3+0.3), c = -0.9*5.0*(0.3+0.1)
        assert form.a == pytest.approx(0.06, rel=1e-13)
        assert form.c == pytest.approx(-1.8, rel=1e-13)

    def test_symmetric_parameters_antisymmetric(self):
        form = equilibrium_quadratic(ModelParams(**SYMMETRIC))
        assert form.a == pytest.approx(-form.c, rel=1e-13)
        assert form.b == pytest.approx(0.0, abs=1e-15)

    def test_matches_elimination_at_random_points(self, rng):
        for _ in range(10):
            params = sample_params(rng)
            form = equilibrium_quadratic(params)
            for _ in range(200):
                x, y = rng.uniform(-1.0, 1.0, size=2)
                assert rel_gap(form(x, y), _elimination_value(params, x, y)) <= 1e-10

    def test_sign_structure(self, rng):
        for _ in range(50):
            params = sample_params(rng)
            form = equilibrium_quadratic(params)
            assert form.a > 0.0 and form.c < 0.0


class TestEquilibriumRay:
    def test_symmetric_parameters_diagonal(self):
        assert equilibrium_ray(ModelParams(**SYMMETRIC)) == pytest.approx(1.0, rel=1e-12)

    def test_root_of_form(self, rng):
        for _ in range(50):
            params = sample_params(rng)
            m = equilibrium_ray(params)
            form = equilibrium_quadratic(params)
            assert m >= 0.0
            assert abs(form(1.0, m)) <= 1e-10 * max(1.0, abs(form.a), abs(form.c))

    def test_pset_a_vieta_sign_split(self, pset_a):
        form = equilibrium_quadratic(pset_a)
        m = equilibrium_ray(pset_a)
        assert m > 0.0
        assert form.a / form.c < 0.0  # roots of c m^2 + b m + a have opposite signs
        other = (form.a / form.c) / m
        assert other < 0.0

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_rejects_degenerate_routing(self, pset_a, p):
        with pytest.raises(ParameterError):
            equilibrium_ray(pset_a.replace(p=p))


class TestEndemicEquilibrium:
    def test_pset_b_none(self, pset_b):
        assert endemic_equilibrium(pset_b) is None

    def test_threshold_boundary_none(self, pset_a):
        params = pset_a.replace(lambda1=r0_one_lambda1(pset_a))
        assert endemic_equilibrium(params) is None

    def test_pset_a_matches_long_integration(self, pset_a):
        # independent oracle: relax the flow from (0.4, 0.4) to t = 1e3
        point = endemic_equilibrium(pset_a)
        assert point is not None
        cfg = IntegratorConfig(t_end=1.0e3, record_every=10.0)
        run = integrate("planar", pset_a, (0.4, 0.4), cfg, rest_points=[])
        gap = math.hypot(run.final_state[0] - point.location.i1,
                         run.final_state[1] - point.location.i2)
        assert gap <= 1e-6

    def test_interior_sink_with_negative_trace(self, rng):
        for _ in range(40):
            params = sample_params_r0(rng, above=True)
            point = endemic_equilibrium(params)
            assert point is not None
            loc = point.location
            assert loc.i1 > 0.0 and loc.i2 > 0.0 and loc.i1 + loc.i2 < 1.0
            assert point.stability is StabilityClass.SINK
            assert point.jacobian.trace < 0.0
            assert point.residual <= 1e-10

    def test_ray_membership(self, rng):
        for _ in range(40):
            params = sample_params_r0(rng, above=True)
            point = endemic_equilibrium(params)
            m = equilibrium_ray(params)
            assert rel_gap(point.location.i2, m * point.location.i1) <= 1e-10

    def test_hyperbolic_margin(self, rng):
        for _ in range(40):
            params = sample_params_r0(rng, above=True)
            point = endemic_equilibrium(params)
            scale = max(abs(e) for e in point.eigenvalues)
            assert all(abs(e.real) > 1e-8 * scale for e in point.eigenvalues)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_axis_equilibrium_for_degenerate_routing(self, pset_a, p):
        params = pset_a.replace(p=p, lambda1=4.0, lambda2=4.0)
        assert r0(params) > 1.0
        point = endemic_equilibrium(params)
        assert point is not None
        on_axis = point.location.i2 if p == 1.0 else point.location.i1
        active = point.location.i1 if p == 1.0 else point.location.i2
        assert on_axis == 0.0
        assert 0.0 < active < 1.0
        assert point.stability is StabilityClass.SINK
        f = vf_planar(params, point.location)
        assert math.hypot(*f) <= 1e-10


class TestAllRestPoints:
    def test_pset_b_only_origin(self, pset_b):
        points = all_rest_points(pset_b)
        assert len(points) == 1
        assert points[0].is_origin
        assert points[0].stability is StabilityClass.SINK

    def test_pset_a_origin_and_endemic(self, pset_a):
        points = all_rest_points(pset_a)
        assert [rp.stability for rp in points] == [StabilityClass.SADDLE,
                                                   StabilityClass.SINK]
        assert points[0].is_origin and not points[1].is_origin

    def test_grid_scan_confirms_uniqueness(self, rng):
        # brute-force conic-intersection certificate on random sets
        for _ in range(10):
            params = sample_params(rng)
            all_rest_points(params, scan_n=200)

    def test_threshold_dichotomy(self, rng):
        for _ in range(60):
            params = sample_params(rng)
            points = all_rest_points(params, scan_n=0)
            if abs(r0(params) - 1.0) > 1e-8:
                assert (len(points) == 2) == (r0(params) > 1.0)

    def test_no_interior_source(self, rng):
        for _ in range(40):
            params = sample_params(rng)
            for rp in all_rest_points(params, scan_n=0):
                if not rp.is_origin:
                    assert rp.stability is not StabilityClass.SOURCE

    def test_serialization_shape(self, pset_a):
        payload = all_rest_points(pset_a)[1].to_dict()
        assert set(payload) == {"i1", "i2", "s", "eigenvalues", "class", "residual"}
        assert payload["s"] == pytest.approx(1.0 - payload["i1"] - payload["i2"])
        assert [set(e) for e in payload["eigenvalues"]] == [{"re", "im"}, {"re", "im"}]
