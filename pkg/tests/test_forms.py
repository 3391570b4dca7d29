"""Unit tests for the FEM window forms, range estimates, and scans."""

import math

import numpy as np
import pytest
import scipy.linalg

import slcrit as sl
from slcrit import forms, potential, quadrature, sampling
from slcrit.errors import ValidationError

PI2 = math.pi ** 2


def ground_eigenvalue(w):
    return float(scipy.linalg.eigh(w.A, w.M, subset_by_index=[0, 0],
                                   eigvals_only=True)[0])


def test_fem_baseline_dirichlet_laplacian():
    w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 512)
    lam = ground_eigenvalue(w)
    assert lam == pytest.approx(PI2, rel=1e-3)


def test_delta_potential_form_value():
    # jump adds alpha |y(1/2)|^2 = 2 alpha at the sine interpolant
    for alpha in (-1.0, 1.0, 5.0):
        s = sl.delta_sum([0.5], [alpha], 1.0)
        w = forms.assemble(s, sl.Interval(0.0, 1.0), 512)
        c = w.interpolate(lambda x: math.sqrt(2.0) * np.sin(math.pi * x))
        val = forms.form_value(w, c)
        assert val.real == pytest.approx(PI2 + 2.0 * alpha, abs=1e-2)
        assert val.imag == pytest.approx(0.0, abs=1e-10)


def test_gauge_off_matches_plain():
    s = sl.from_poly((0.0, 1.0), 1.0)
    plain = forms.assemble(s, sl.Interval(0.0, 1.0), 64)
    gauged = forms.assemble(s, sl.Interval(0.0, 1.0), 64,
                            gauge=(sl.zero(1.0), 0.0, 0.0))
    assert np.allclose(plain.B, gauged.B)
    assert np.allclose(plain.P, gauged.P)


def test_matrix_structure_invariants():
    rng = np.random.default_rng(8)
    s = sampling.random_antiderivative(rng, domain_end=2.0, jumps=2)
    w = forms.assemble(s, sl.Interval(0.25, 1.75), 48)
    for mat in (w.A, w.M):
        assert np.allclose(mat, mat.T)
        assert np.all(np.linalg.eigvalsh(mat) > 0)
    assert np.allclose(w.P, w.P.T)  # complex symmetric, not Hermitian
    band = np.triu(np.abs(w.P), 2)
    assert np.max(band) == 0.0  # hat overlap keeps bandwidth <= 1
    assert np.allclose(w.B, w.A - w.P)


def test_form_value_zero_vector_and_dimension():
    w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 32)
    assert forms.form_value(w, np.zeros(w.dim)) == 0
    with pytest.raises(ValidationError):
        forms.form_value(w, np.zeros(w.dim + 1))


def test_form_value_imaginary_slope_identity():
    # for s = i x and zero-boundary y: int x d|y|^2 = -||y||^2, so
    # form = int |y'|^2 + i ||y||^2
    s = sl.from_poly((0.0, 1.0j), 1.0)
    w = forms.assemble(s, sl.Interval(0.0, 1.0), 256)
    rng = np.random.default_rng(1)
    c = rng.normal(size=w.dim) + 1j * rng.normal(size=w.dim)
    norm = complex(c.conj() @ (w.M @ c)).real
    c = c / math.sqrt(norm)
    val = forms.form_value(w, c)
    kinetic = complex(c.conj() @ (w.A @ c)).real
    assert val.real == pytest.approx(kinetic, rel=1e-10)
    assert val.imag == pytest.approx(1.0, abs=1e-10)


def test_range_boundary_free_potential():
    w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 256)
    est = forms.range_boundary(w, angles=64)
    assert est.sector is not None
    assert est.sector.opening == pytest.approx(0.0)
    assert est.inf_modulus_lower >= PI2 - 1e-2
    assert est.inf_modulus_lower <= est.inf_modulus_upper


def test_range_boundary_imaginary_slope():
    s = sl.from_poly((0.0, 1.0j), 1.0)
    w = forms.assemble(s, sl.Interval(0.0, 1.0), 512)
    est = forms.range_boundary(w, angles=64)
    target = math.sqrt(PI2 ** 2 + 1.0)
    assert est.inf_modulus_lower <= target <= est.inf_modulus_upper
    assert est.inf_modulus_upper - est.inf_modulus_lower <= 1e-2
    assert np.allclose(est.boundary.imag, 1.0, atol=1e-8)


def test_range_boundary_rotated_ray():
    # potential matrix built from s = (1+i) x: range on the ray arg = pi/4
    # after subtracting the kinetic part; check the fitted sector of B - A
    s = sl.from_poly((0.0, 1.0 + 1.0j), 1.0)
    w = forms.assemble(s, sl.Interval(0.0, 1.0), 128)
    rng = np.random.default_rng(2)
    pts = []
    for _ in range(40):
        c = rng.normal(size=w.dim) + 1j * rng.normal(size=w.dim)
        c /= math.sqrt(complex(c.conj() @ (w.M @ c)).real)
        pts.append(complex(c.conj() @ ((-w.P) @ c)))
    from slcrit import sectors
    sec = sectors.fit_sector(np.asarray(pts), translate_vertex=False)
    assert sec is not None
    assert sec.alpha == pytest.approx(math.pi / 4.0, abs=1e-6)
    assert sec.beta == pytest.approx(math.pi / 4.0, abs=1e-6)


def test_inf_modulus_constant_shift_invariance():
    w0 = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 128)
    wc = forms.assemble(sl.offset(sl.zero(1.0), 17.5), sl.Interval(0.0, 1.0), 128)
    assert np.allclose(w0.B, wc.B, atol=1e-10)
    lo0, hi0 = forms.inf_modulus(w0, angles=16)
    loc, hic = forms.inf_modulus(wc, angles=16)
    assert lo0 == pytest.approx(loc, abs=1e-9)
    assert hi0 == pytest.approx(hic, abs=1e-9)
    assert lo0 == pytest.approx(PI2, rel=1e-3)
    assert hi0 == pytest.approx(PI2, rel=1e-3)


def test_constant_shift_leaves_form_values():
    rng = np.random.default_rng(4)
    s = sampling.random_antiderivative(rng, domain_end=2.0)
    w1 = forms.assemble(s, sl.Interval(0.5, 1.5), 64)
    w2 = forms.assemble(sl.offset(s, 3.0 - 2.0j), sl.Interval(0.5, 1.5), 64)
    c = rng.normal(size=w1.dim) + 1j * rng.normal(size=w1.dim)
    v1 = forms.form_value(w1, c)
    v2 = forms.form_value(w2, c)
    assert abs(v1 - v2) <= 1e-10 * max(1.0, abs(v1))


def test_mesh_convergence_rate():
    errs = []
    for n in (64, 128, 256, 512):
        w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), n)
        errs.append(abs(ground_eigenvalue(w) - PI2))
    rates = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    for r in rates:
        assert 1.8 <= r <= 2.2


def test_localization_scan_free_potential():
    scan = forms.localization_scan(sl.zero(3.0), n=64, angles=16)
    for row in scan.rows:
        assert row.inf_lower == pytest.approx(PI2, rel=1e-3)
        assert row.sector is not None
        assert row.sector.opening == pytest.approx(0.0)
    assert scan.lower_bounds_monotone
    assert scan.common_sector is not None


def test_localization_scan_quadratic_trend():
    s = sl.from_poly((0.0, 0.0, 0.5), 6.0)
    scan = forms.localization_scan(s, n=96, angles=16)
    unit_rows = [r for r in scan.rows
                 if r.window.a == int(r.window.a) and r.window.b >= 2]
    for r in unit_rows:
        k = int(r.window.b)
        assert PI2 + k - 1 - 1e-2 <= r.inf_lower <= PI2 + k + 1e-2


def test_localization_scan_miura_semibounded():
    gamma = sampling.random_gamma(np.random.default_rng(17))
    s = sl.miura(gamma, 0.0)
    scan = forms.localization_scan(s, n=48, angles=16)
    for r in scan.rows:
        assert r.herm_lambda_min >= -1e-6


def test_gauge_consistency_decomposition():
    # form((1+eps) s2) = (1+eps) * S-part + m-part on a block window
    theta = 0.5
    ope = 1.0 / (1.0 - theta) ** (1.0 / 3.0)
    amp = (1.0 - theta) ** (1.0 / 3.0)
    s2 = sl.build_counterexample("s2", theta=theta, schedule=[(5, 10.0, 4.5)],
                                 domain_end=8.0)
    _v, gam = sl.vh_profile(10.0)
    g = potential._stitch_blocks([gam], [5.0], [amp], 8.0)
    s_only = sl.subtract(s2, sl.miura(g, 0.0))
    win = sl.Interval(5.0, 6.0)
    extra = tuple(set(s2.breakpoints) | set(g.breakpoints))
    w_full = forms.assemble(sl.scale(s2, ope), win, 64, extra_breakpoints=extra)
    w_gauge = forms.assemble(sl.zero(8.0), win, 64,
                             gauge=(g, ope, ope ** 2 - ope),
                             extra_breakpoints=extra)
    w_s = forms.assemble(s_only, win, 64, extra_breakpoints=extra)
    lhs = w_full.B
    rhs = ope * (-w_s.P) + w_gauge.B
    assert np.max(np.abs(lhs - rhs)) <= 1e-6 * np.max(np.abs(lhs))


def test_inf_modulus_zero_crossing_witnessed():
    # a strongly indefinite real form: the range straddles 0, so the inf of
    # |form| is 0 and the mixing witness must attain it
    theta, h = 0.5, 10.0
    alpha = 1.0 - (1.0 - theta) ** (1.0 / 3.0)
    _v, gam = sl.vh_profile(h)
    w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 128,
                       gauge=(gam, 1.0, alpha))
    lo, hi = forms.inf_modulus(w, angles=16)
    assert lo == 0.0
    assert hi <= 1e-8


def test_mform_blowup_bound():
    theta, h = 0.5, 10.0
    alpha = 1.0 - (1.0 - theta) ** (1.0 / 3.0)
    v, gam = sl.vh_profile(h)
    w = forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 512,
                       gauge=(gam, 1.0, alpha))
    val = forms.form_value(w, w.interpolate(v.values))
    assert val.real <= 2.0 / (3.0 * h) - (2.0 * alpha / 3.0) * h ** 4 + 1e-3


def test_profile_norm_constants():
    # measured limits of ||v_h||^2: 25/12 + ~3/h on [0,1], 25/24 + ~1.5/h on
    # the half interval; pins the implementation against closed forms
    for h in (10.0, 40.0, 160.0):
        v, _g = sl.vh_profile(h)
        delta = 3.0 / h ** 2
        left = 0.5 - delta
        exact_half = (left ** 3 / 3.0 + left ** 2 * delta
                      + left * h * delta + h ** 2 * delta / 3.0)
        full = float(np.real(quadrature.integrate(
            lambda x: v.values(x) ** 2, 0.0, 1.0, v.nodes)))
        assert full == pytest.approx(2.0 * exact_half, rel=1e-10)
        assert abs(full - 25.0 / 12.0) <= 3.2 / h


def test_partition_identity_polynomial_bump():
    # y = x^2 (3-x)^2 on [0,3]
    y = forms.PiecewisePoly((0.0, 3.0), ((0.0, 0.0, 9.0, -6.0, 1.0),))
    rep0 = forms.partition_identity_check(sl.zero(5.0), y)
    assert rep0.residual <= 1e-6
    rep1 = forms.partition_identity_check(sl.from_poly((0.0, 1.0), 5.0), y)
    assert rep1.residual <= 1e-6
    assert rep1.correction <= 2.0 * math.pi ** 2 * rep1.norm_sq + 1e-6


def test_partition_identity_overlap_cell_degeneration():
    # cubic bump (x-1.6)^2 (1.9-x) inside the overlap of exactly two windows:
    # all but two window terms and one cross term vanish, identity still holds
    y = forms.PiecewisePoly((1.6, 1.9), ((4.864, -8.64, 5.1, -1.0),))
    assert np.allclose(y.values(np.asarray([1.6, 1.9])), 0.0, atol=1e-12)
    rep = forms.partition_identity_check(sl.zero(4.0), y)
    assert rep.residual <= 1e-6


def test_partition_identity_single_window_structure():
    # a lone window has no neighbours: no cross terms, zero correction, and
    # the window sum collapses to the single weighted form value
    y = forms.PiecewisePoly((1.6, 1.9), ((4.864, -8.64, 5.1, -1.0),))
    s = sl.zero(4.0)
    rep = forms.partition_identity_check(s, y, offsets=[1.5])
    assert rep.correction == pytest.approx(0.0, abs=1e-12)
    phi = lambda x: np.sin(math.pi * (np.asarray(x) - 1.5))
    dphi = lambda x: math.pi * np.cos(math.pi * (np.asarray(x) - 1.5))
    yk = lambda x: phi(x) ** 2 * y.values(x)
    dyk = lambda x: (2.0 * phi(x) * dphi(x) * y.values(x)
                     + phi(x) ** 2 * y.deriv_values(x))
    lone = forms.dirichlet_form_quadrature(s, yk, dyk, 1.5, 2.5,
                                           extra_breaks=y.breakpoints)
    assert rep.rhs == pytest.approx(lone, rel=1e-9)


def test_assemble_validates_mesh_and_n():
    with pytest.raises(ValidationError):
        forms.assemble(sl.zero(1.0), sl.Interval(0.0, 1.0), 4)


def test_piecewise_poly_eval_and_deriv():
    y = forms.PiecewisePoly((0.0, 1.0, 2.0),
                            ((0.0, 1.0), (2.0, -1.0)))
    xs = np.asarray([0.25, 0.75, 1.5])
    assert np.allclose(y.values(xs), [0.25, 0.75, 0.5])
    assert np.allclose(y.deriv_values(xs), [1.0, 1.0, -1.0])
    assert np.allclose(y.values(np.asarray([-1.0, 3.0])), 0.0)
