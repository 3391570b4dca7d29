"""Unit tests for the exact piecewise antiderivative models."""

import json

import numpy as np
import pytest

import slcrit as sl
from slcrit import potential, quadrature, sampling
from slcrit.errors import (DomainError, UnsupportedInputError, ValidationError)


def test_eval_identity_piece():
    s = sl.from_poly((0.0, 1.0), 1.0)
    assert s(0.25) == pytest.approx(0.25)


def test_eval_right_continuous_at_jump():
    s = sl.delta_sum([0.5], [1.0], 1.0)
    assert s(0.5) == pytest.approx(1.0)
    assert s(0.4999) == pytest.approx(0.0)
    assert s.left_limit(0.5) == pytest.approx(0.0)
    # left limit differs from the value by exactly the jump offset
    assert s(0.5) - s.left_limit(0.5) == pytest.approx(1.0)


def test_eval_reciprocal_piece():
    # 1/x on [0.1, 0.5]: direct arithmetic 1/0.2 = 5
    s = sl.Antiderivative(0.5, (0.0, 0.1, 0.5), ((), (sl.RecipTerm(1.0, 0.0),)))
    assert s(0.2) == pytest.approx(5.0)


def test_eval_outside_domain_raises():
    s = sl.zero(1.0)
    with pytest.raises(DomainError):
        s(1.5)
    with pytest.raises(DomainError):
        s(-0.1)


def test_pole_inside_subinterval_rejected():
    with pytest.raises(ValidationError):
        sl.Antiderivative(1.0, (0.0, 1.0), ((sl.RecipTerm(1.0, 0.5),),))


def test_jump_must_sit_on_breakpoint():
    with pytest.raises(ValidationError):
        sl.Antiderivative(1.0, (0.0, 1.0), ((),), ((0.5, 1.0),))


def test_moments_linear_closed_form():
    # s(xi) = xi on [0,1]: int = 1/2, int |s|^2 = int s^2 = 1/3
    s = sl.from_poly((0.0, 1.0), 1.0)
    m = sl.moments(s, sl.Interval(0.0, 1.0))
    assert m.m0 == pytest.approx(0.5, abs=1e-12)
    assert m.q2 == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert m.m2 == pytest.approx(1.0 / 3.0, abs=1e-12)


def test_moments_step_closed_form():
    s = sl.delta_sum([0.5], [1.0], 1.0)
    m = sl.moments(s, sl.Interval(0.0, 1.0))
    assert m.m0 == pytest.approx(0.5, abs=1e-12)
    assert m.q2 == pytest.approx(0.5, abs=1e-12)


def test_moments_zero():
    m = sl.moments(sl.zero(2.0), sl.Interval(0.0, 2.0))
    assert m.m0 == 0 and m.q2 == 0 and m.m2 == 0


def test_moment_additivity_randomized():
    rng = np.random.default_rng(42)
    for _ in range(25):
        s = sampling.random_antiderivative(rng)
        win = sampling.random_window(rng, s)
        cut = rng.uniform(win.a + 0.05, win.b - 0.05)
        whole = sl.moments(s, win)
        left = sl.moments(s, sl.Interval(win.a, cut))
        right = sl.moments(s, sl.Interval(cut, win.b))
        scale = max(1.0, abs(whole.m0), whole.q2)
        assert abs(whole.m0 - left.m0 - right.m0) <= 1e-9 * scale
        assert abs(whole.q2 - left.q2 - right.q2) <= 1e-9 * scale
        assert abs(whole.m2 - left.m2 - right.m2) <= 1e-9 * scale


def test_delta_sum_examples():
    s = sl.delta_sum([1.0, 2.0], [1.0, -1.0], 3.0)
    assert s(1.5) == pytest.approx(1.0)
    assert s(2.5) == pytest.approx(0.0)
    s2 = sl.delta_sum([0.5], [2.0 + 1.0j], 1.0)
    assert s2(0.75) == pytest.approx(2.0 + 1.0j)


def test_delta_sum_validation():
    with pytest.raises(ValidationError):
        sl.delta_sum([0.5, 0.5], [1.0, 1.0], 1.0)
    with pytest.raises(ValidationError):
        sl.delta_sum([0.8, 0.2], [1.0, 1.0], 1.0)


def test_miura_constant_gamma():
    # gamma == 1, b = 0: int 1^2 dt = x, so s = 1 + x
    s = sl.miura(sl.from_poly((1.0,), 2.0), 0.0)
    xs = np.linspace(0.0, 2.0, 9)
    assert np.allclose(s.values(xs), 1.0 + xs)


def test_miura_reciprocal_collapses_to_constant():
    # gamma = 1/(x+1): 1/(x+1) + (1 - 1/(x+1)) = 1
    gamma = sl.Antiderivative(1.0, (0.0, 1.0), ((sl.RecipTerm(1.0, -1.0),),))
    s = sl.miura(gamma, 0.0)
    assert len(s.pieces) == 1 and len(s.pieces[0]) == 1
    assert np.allclose(s.values(np.linspace(0, 1, 7)), 1.0)


def test_miura_pure_slope():
    s = sl.miura(sl.zero(3.0), 1.0)
    assert s(2.0) == pytest.approx(2.0)


def test_miura_rejects_mixed_terms():
    gamma = sl.Antiderivative(1.0, (0.0, 1.0),
                              ((sl.PolyTerm((1.0,)), sl.RecipTerm(1.0, -1.0)),))
    with pytest.raises(UnsupportedInputError):
        sl.miura(gamma, 0.0)


def test_miura_rejects_high_degree_and_complex():
    quad = sl.from_poly((0.0, 0.0, 1.0), 1.0)
    with pytest.raises(UnsupportedInputError):
        sl.miura(quad, 0.0)
    cplx = sl.from_poly((1.0j,), 1.0)
    with pytest.raises(ValidationError):
        sl.miura(cplx, 0.0)


def test_miura_integral_part_monotone():
    rng = np.random.default_rng(3)
    for _ in range(10):
        gamma = sampling.random_gamma(rng)
        s = sl.miura(gamma, 0.0)
        rest = sl.subtract(s, gamma)  # the running integral of gamma^2
        xs = np.linspace(0.0, gamma.domain_end, 129)
        vals = rest.values(xs).real
        assert vals[0] == pytest.approx(0.0, abs=1e-12)
        assert np.all(np.diff(vals) >= -1e-10)


def test_vh_profile_values():
    v, gamma = sl.vh_profile(10.0)
    # substitute x = 1/2: 0.47 + 10 = 10.47
    assert v.values(0.5) == pytest.approx(10.47)
    assert gamma(0.05) == pytest.approx(10.0)
    # spike slope energy (h/delta)^2 * delta = h^4/3
    slope = (v.values(0.5) - v.values(0.47)) / 0.03
    assert slope ** 2 * 0.03 == pytest.approx(1e4 / 3.0, rel=1e-12)


def test_vh_profile_symmetry_and_oddness():
    v, gamma = sl.vh_profile(7.0)
    xs = np.linspace(0.01, 0.49, 41)
    assert np.allclose(v.values(xs), v.values(1.0 - xs))
    assert v.values(0.0) == 0.0 and v.values(1.0) == 0.0
    # odd about 1/2 away from the breakpoints
    assert np.allclose(gamma.values(xs), -gamma.values(1.0 - xs), atol=1e-10)


def test_vh_profile_parameter_error():
    with pytest.raises(ValidationError):
        sl.vh_profile(3.6)  # below 1 + sqrt(7)


def test_counterexample_s1_prefix():
    s = sl.build_counterexample("s1", blocks=1)
    xs = np.linspace(0.0, 4.0, 17)
    assert np.allclose(s.values(xs), xs ** 2 / 2.0)
    assert s.domain_end == pytest.approx(7.0)


def test_counterexample_s2_scaling_factor():
    # 1/(1-theta)^{1/3} at theta = 0.5
    assert 1.0 / (1.0 - 0.5) ** (1.0 / 3.0) == pytest.approx(1.259921049894873)


def test_counterexample_s2_empty_schedule_staircase():
    s = sl.build_counterexample("s2", theta=0.5, schedule=[], domain_end=5.0)
    # S'(x) = l-1 on (l-1, l): S(1.5) = 0 + 1*0.5, S(3.25) = 0+1+2 + 3*0.25
    assert s(1.5) == pytest.approx(0.5)
    assert s(3.25) == pytest.approx(3.75)


def test_counterexample_s2_validation():
    with pytest.raises(ValidationError):
        sl.build_counterexample("s2", theta=0.5, schedule=[(5, 10.0, 7.0)])
    with pytest.raises(ValidationError):
        sl.build_counterexample("s2", theta=0.5,
                                schedule=[(5, 10.0, 4.5), (7, 10.0, 6.5)])
    with pytest.raises(ValidationError):
        sl.build_counterexample("s2", theta=1.5, schedule=[])


def test_json_round_trip_preserves_values():
    rng = np.random.default_rng(11)
    s = sampling.random_antiderivative(rng, jumps=3)
    doc = json.loads(json.dumps(potential.to_dict(s)))
    back = potential.from_dict(doc)
    xs = np.linspace(0.0, s.domain_end, 301)
    assert np.array_equal(s.values(xs), back.values(xs))
    assert back.breakpoints == s.breakpoints


def test_scale_add_offset():
    s = sl.from_poly((0.0, 1.0), 2.0)
    t = sl.add(sl.scale(s, 2.0), sl.offset(sl.zero(2.0), 1.0))
    xs = np.linspace(0, 2, 9)
    assert np.allclose(t.values(xs), 2.0 * xs + 1.0)
    d = sl.subtract(t, t)
    assert np.allclose(d.values(xs), 0.0)


def test_restrict():
    s = sl.delta_sum([0.5, 1.5], [1.0, 1.0], 2.0)
    r = sl.restrict(s, 1.0)
    assert r.domain_end == 1.0
    assert len(r.jumps) == 1
    assert r(0.75) == pytest.approx(1.0)


def test_adaptive_quadrature_near_pole():
    # sharp reciprocal: int_{0.1}^{1} x^-2 dx = 9
    val = quadrature.integrate(lambda x: x ** -2.0, 0.1, 1.0)
    assert val.real == pytest.approx(9.0, rel=1e-10)
