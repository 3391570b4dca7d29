"""Discretized windowed quadratic forms and their numerical-range estimates.

The window form on I = [a, b] with zero boundary values is

    l_I[y] = int_I |y'|^2 dx - int_I s d|y|^2,      d|y|^2 = (y conj(y))' dx.

It is discretized with real hat functions on a mesh that carries every
breakpoint and jump of s as a node, so delta contributions enter the
potential matrix exactly instead of being smeared.  For a coefficient vector
c the discrete form value is c^H (A - P) c; an optional gauge turns the form
into  int |y' - k1 g y|^2 - k2 int g^2 |y|^2 - int s d|y|^2, the shape used
by the scaled counterexample decomposition.

Certified bounds on inf |l_I[y]| over the discrete unit sphere come from
rotated Hermitian eigenproblems: |q| >= Re(e^{-i theta} q) makes every
rotation's smallest eigenvalue a lower bound, while each eigenvector is an
attained Rayleigh value and hence an upper-bound witness.  Discretization
restricts to a subspace, so the continuum infimum can only be smaller than
the discrete one; both bounds are reported.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import quadrature, sectors
from .errors import AssemblyError, NumericError, ValidationError
from .potential import Antiderivative, Interval
from .sectors import Sector


@dataclass(frozen=True, eq=False)
class PiecewisePoly:
    """Compactly supported piecewise polynomial (any degree); zero outside."""

    breakpoints: tuple
    coeffs: tuple  # per piece, ascending complex coefficients

    def __post_init__(self):
        bp = tuple(float(t) for t in self.breakpoints)
        if len(bp) < 2 or any(b1 <= b0 for b0, b1 in zip(bp, bp[1:])):
            raise ValidationError("breakpoints must be strictly increasing")
        cf = tuple(tuple(complex(c) for c in row) for row in self.coeffs)
        if len(cf) != len(bp) - 1:
            raise ValidationError("one coefficient row per piece required")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "coeffs", cf)
        object.__setattr__(self, "_bp_arr", np.asarray(bp))

    @property
    def support(self) -> tuple:
        return self.breakpoints[0], self.breakpoints[-1]

    def _eval(self, x, derivative: bool) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros(flat.size, dtype=complex)
        inside = (flat >= self.breakpoints[0]) & (flat <= self.breakpoints[-1])
        idx = np.searchsorted(self._bp_arr, flat, side="right") - 1
        idx = np.clip(idx, 0, len(self.coeffs) - 1)
        for k in np.unique(idx[inside]):
            sel = inside & (idx == k)
            xs = flat[sel]
            row = self.coeffs[k]
            if derivative:
                row = tuple(c * (i + 1) for i, c in enumerate(row[1:]))
                if not row:
                    row = (0j,)
            acc = np.full(xs.size, row[-1], dtype=complex)
            for c in row[-2::-1]:
                acc = acc * xs + c
            out[sel] = acc
        return out.reshape(x.shape)

    def values(self, x) -> np.ndarray:
        return self._eval(x, derivative=False)

    def deriv_values(self, x) -> np.ndarray:
        return self._eval(x, derivative=True)


@dataclass(frozen=True, eq=False)
class WindowForm:
    """Assembled matrices of the window form on a zero-boundary hat basis."""

    interval: Interval
    n: int
    nodes: np.ndarray          # full mesh including the two boundary nodes
    A: np.ndarray              # stiffness, real symmetric
    P: np.ndarray              # potential matrix int s (phi_i phi_j)', complex symmetric
    M: np.ndarray              # mass, real symmetric
    B: np.ndarray              # form matrix: c^H B c is the form value
    gauge: tuple = None

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def interior_nodes(self) -> np.ndarray:
        return self.nodes[1:-1]

    def interpolate(self, fn) -> np.ndarray:
        """Coefficient vector of the hat interpolant of a callable."""
        return np.asarray(fn(self.interior_nodes()), dtype=complex)


def _window_mesh(interval: Interval, n: int, breaks) -> np.ndarray:
    lo, hi = interval.a, interval.b
    base = np.linspace(lo, hi, n + 1)
    inner = [t for t in breaks if lo < t < hi]
    nodes = np.concatenate([base, np.asarray(inner, dtype=float)])
    nodes = np.unique(nodes)
    # collapse mesh nodes that crowd a breakpoint; keep the breakpoint itself
    floor = (hi - lo) / n * 1e-6
    keep = [nodes[0]]
    inner_set = set(float(t) for t in inner)
    for t in nodes[1:]:
        if t - keep[-1] < floor:
            if float(t) in inner_set and float(keep[-1]) not in inner_set:
                keep[-1] = t
            continue
        keep.append(t)
    keep[-1] = hi
    mesh = np.asarray(keep)
    for t in inner:
        if not np.any(np.abs(mesh - t) == 0.0):
            raise AssemblyError(f"breakpoint {t} missing from the mesh")
    return mesh


def _tridiag(diag: np.ndarray, off: np.ndarray, dtype) -> np.ndarray:
    m = np.zeros((diag.size, diag.size), dtype=dtype)
    np.fill_diagonal(m, diag)
    if diag.size > 1:
        idx = np.arange(diag.size - 1)
        m[idx, idx + 1] = off
        m[idx + 1, idx] = off
    return m


def _weighted_tridiags(fn, nodes: np.ndarray, rtol: float):
    """Per-element integrals (I0, I1) = (int fn, int fn*x) over mesh elements."""
    i0 = quadrature.integrate_many(fn, nodes, rtol=rtol)
    i1 = quadrature.integrate_many(lambda x: fn(x) * x, nodes, rtol=rtol)
    return i0, i1


def assemble(s: Antiderivative, interval: Interval, n: int,
             gauge: tuple = None, extra_breakpoints=(),
             rtol: float = quadrature.DEFAULT_RTOL) -> WindowForm:
    """Assemble stiffness/potential/mass (and gauge) matrices on [a, b].

    gauge, when given, is a triple (g, kappa1, kappa2) with real-valued g:
    the discrete form becomes
        int |y' - kappa1 g y|^2 - kappa2 int g^2 |y|^2 - int s d|y|^2 .
    ``extra_breakpoints`` forces additional mesh nodes so that forms built
    from different potentials can share one mesh.
    """
    if n < 8:
        raise ValidationError("mesh resolution n must be >= 8")
    s.check_interval(interval)
    breaks = list(s.breakpoints) + list(extra_breakpoints)
    g = None
    if gauge is not None:
        g, kappa1, kappa2 = gauge
        if not g.is_real(tol=0.0):
            raise ValidationError("gauge profile g must be real-valued")
        breaks += list(g.breakpoints)
    nodes = _window_mesh(interval, n, breaks)
    h = np.diff(nodes)
    xl, xr = nodes[:-1], nodes[1:]
    dim = nodes.size - 2
    if dim < 1:
        raise AssemblyError("mesh leaves no interior node")

    inv_h = 1.0 / h
    A = _tridiag(inv_h[:-1] + inv_h[1:], -inv_h[1:-1], float)
    M = _tridiag((h[:-1] + h[1:]) / 3.0, h[1:-1] / 6.0, float)

    i0, i1 = _weighted_tridiags(s.values, nodes, rtol)
    d_left = (-2.0 / h ** 2) * (xr * i0 - i1)       # int s (phi_l^2)'
    d_right = (2.0 / h ** 2) * (i1 - xl * i0)       # int s (phi_r^2)'
    o_mid = (1.0 / h ** 2) * ((xl + xr) * i0 - 2.0 * i1)
    P = _tridiag(d_right[:-1] + d_left[1:], o_mid[1:-1], complex)

    B = A.astype(complex) - P
    gauge_meta = None
    if gauge is not None:
        q0, q1 = _weighted_tridiags(g.values, nodes, rtol)
        ql = (-2.0 / h ** 2) * (xr * q0 - q1)
        qr = (2.0 / h ** 2) * (q1 - xl * q0)
        qo = (1.0 / h ** 2) * ((xl + xr) * q0 - 2.0 * q1)
        Q = _tridiag((qr[:-1] + ql[1:]).real, qo[1:-1].real, float)

        g2 = lambda x: np.abs(g.values(x)) ** 2
        j0 = quadrature.integrate_many(g2, nodes, rtol=rtol).real
        j1 = quadrature.integrate_many(lambda x: g2(x) * x, nodes, rtol=rtol).real
        j2 = quadrature.integrate_many(lambda x: g2(x) * x * x, nodes, rtol=rtol).real
        r_ll = (xr ** 2 * j0 - 2.0 * xr * j1 + j2) / h ** 2
        r_rr = (xl ** 2 * j0 - 2.0 * xl * j1 + j2) / h ** 2
        r_lr = (-xl * xr * j0 + (xl + xr) * j1 - j2) / h ** 2
        R = _tridiag(r_rr[:-1] + r_ll[1:], r_lr[1:-1], float)

        B = B - kappa1 * Q + (kappa1 ** 2 - kappa2) * R
        gauge_meta = (g, float(kappa1), float(kappa2))

    return WindowForm(interval=interval, n=n, nodes=nodes,
                      A=A, P=P, M=M, B=B, gauge=gauge_meta)


def form_value(w: WindowForm, c: np.ndarray) -> complex:
    """c^H B c, the discrete form value at the coefficient vector c."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (w.dim,):
        raise ValidationError(f"coefficient vector must have shape ({w.dim},)")
    return complex(c.conj() @ (w.B @ c))


def _herm_parts(B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian parts H1 = Herm(B), H2 = Herm(-iB) of the form matrix.

    The form matrices here are complex symmetric (B^T = B), which makes both
    parts real symmetric: H1 = Re B, H2 = Im B, and
    Herm(e^{-i theta} B) = cos(theta) H1 + sin(theta) H2 for every rotation.
    """
    asym = float(np.max(np.abs(B - B.T))) if B.size else 0.0
    if asym <= 1e-10 * max(1.0, float(np.max(np.abs(B)))):
        return np.ascontiguousarray(B.real), np.ascontiguousarray(B.imag)
    return 0.5 * (B + B.conj().T), -0.5j * (B - B.conj().T)


def _eigh_extreme(H: np.ndarray, M: np.ndarray, which: str = "min"):
    idx = 0 if which == "min" else H.shape[0] - 1
    try:
        vals, vecs = scipy.linalg.eigh(H, M, subset_by_index=[idx, idx])
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise NumericError(
            f"generalized eigensolver failed (cond(M) ~ {np.linalg.cond(M):.3e})"
        ) from exc
    return float(vals[0]), vecs[:, 0]


def herm_lambda_min(w: WindowForm) -> float:
    """Smallest eigenvalue of (Herm(B), M): the semi-boundedness margin."""
    H1, _H2 = _herm_parts(w.B)
    val, _vec = _eigh_extreme(H1, w.M)
    return val


@dataclass(frozen=True)
class RangeEstimate:
    """Numerical-range boundary samples and certified inf-modulus bounds."""

    boundary: np.ndarray             # attained Rayleigh values, one per rotation
    sector: Sector | None
    inf_modulus_lower: float
    inf_modulus_upper: float
    rotations: np.ndarray
    lambda_mins: np.ndarray


def range_boundary(w: WindowForm, angles: int = 64) -> RangeEstimate:
    """Boundary sweep of the pencil (B, M) via rotated Hermitian eigenproblems.

    For each rotation theta the smallest eigenvalue of Herm(e^{-i theta} B)
    against M bounds Re(e^{-i theta} q) from below over the range, and its
    eigenvector attains a boundary point.  The fitted sector is the minimal
    one over the attained samples (vertex translated to a support point);
    None when the samples span >= pi.

    A real form matrix makes the numerical range the exact interval between
    the extreme pencil eigenvalues, so that case is resolved by a single
    eigendecomposition instead of one per rotation.
    """
    if angles < 16:
        raise ValidationError("rotation count must be >= 16")
    thetas = np.arange(angles) * (2.0 * math.pi / angles)
    H1, H2 = _herm_parts(w.B)

    if float(np.max(np.abs(H2))) <= 1e-14 * max(1.0, float(np.max(np.abs(H1)))):
        lam_lo, v_lo = _eigh_extreme(H1, w.M, "min")
        lam_hi, v_hi = _eigh_extreme(H1, w.M, "max")
        lows = np.where(np.cos(thetas) >= 0.0, np.cos(thetas) * lam_lo,
                        np.cos(thetas) * lam_hi)
        samples = np.where(np.cos(thetas) >= 0.0, lam_lo, lam_hi).astype(complex)
        lower = max(0.0, float(lows.max()))
        if lam_lo < 0.0 < lam_hi:
            # the real range is the whole interval, so 0 is attained; build
            # the explicit witness by mixing the M-orthogonal extreme vectors
            t = math.atan(math.sqrt(-lam_lo / lam_hi))
            mix = math.cos(t) * v_lo + math.sin(t) * v_hi
            norm = float(np.real(mix.conj() @ (w.M @ mix)))
            upper = abs(complex(mix.conj() @ (w.B @ mix)) / norm)
        else:
            upper = min(abs(lam_lo), abs(lam_hi))
        sector = sectors.fit_sector(np.asarray([lam_lo, lam_hi], dtype=complex),
                                    require_strict_args=False,
                                    translate_vertex=True)
        return RangeEstimate(boundary=samples, sector=sector,
                             inf_modulus_lower=lower, inf_modulus_upper=upper,
                             rotations=thetas, lambda_mins=lows)

    lows = np.empty(angles)
    samples = np.empty(angles, dtype=complex)
    for j, theta in enumerate(thetas):
        H = math.cos(theta) * H1 + math.sin(theta) * H2
        val, vec = _eigh_extreme(H, w.M)
        lows[j] = val
        norm = float(np.real(vec.conj() @ (w.M @ vec)))
        samples[j] = complex(vec.conj() @ (w.B @ vec)) / norm
    lower = max(0.0, float(lows.max()))
    upper = float(np.abs(samples).min())
    sector = sectors.fit_sector(samples, require_strict_args=False,
                                translate_vertex=True)
    return RangeEstimate(boundary=samples, sector=sector,
                         inf_modulus_lower=lower, inf_modulus_upper=upper,
                         rotations=thetas, lambda_mins=lows)


def inf_modulus(w: WindowForm, angles: int = 64) -> tuple[float, float]:
    """Two-sided bounds on inf |form| over the discrete unit sphere."""
    est = range_boundary(w, angles=angles)
    return est.inf_modulus_lower, est.inf_modulus_upper


# -- localization scan --------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    window: Interval
    sector: Sector | None
    herm_lambda_min: float
    inf_lower: float
    inf_upper: float
    boundary: np.ndarray


@dataclass(frozen=True)
class ScanResult:
    rows: tuple
    common_sector: Sector | None
    lower_bounds_monotone: bool

    def lower_bounds(self) -> np.ndarray:
        return np.asarray([r.inf_lower for r in self.rows])


def scan_windows(domain_end: float) -> list[Interval]:
    """Both localization families inside [0, X]: [k-1, k] and [k-1/2, k+1/2]."""
    windows = []
    k = 1
    while k <= domain_end + 1e-12:
        windows.append(Interval(float(k - 1), float(k)))
        if k + 0.5 <= domain_end + 1e-12:
            windows.append(Interval(k - 0.5, k + 0.5))
        k += 1
    windows.sort(key=lambda w: w.a)
    return windows


def localization_scan(s: Antiderivative, n: int = 128, angles: int = 64) -> ScanResult:
    """Per-window sector and inf-modulus table over both window families.

    The summary re-fits one vertex for the hull of the per-window angles over
    all boundary samples and flags whether the inf-modulus lower bounds are
    non-decreasing along the window sequence.
    """
    if s.domain_end < 2.0:
        raise ValidationError("scan needs domain_end >= 2 for a full window pair")
    rows = []
    for win in scan_windows(s.domain_end):
        w = assemble(s, win, n)
        est = range_boundary(w, angles=angles)
        rows.append(ScanRow(window=win, sector=est.sector,
                            herm_lambda_min=herm_lambda_min(w),
                            inf_lower=est.inf_modulus_lower,
                            inf_upper=est.inf_modulus_upper,
                            boundary=est.boundary))
    angle_pairs = [(r.sector.alpha, r.sector.beta) for r in rows if r.sector]
    common = None
    if angle_pairs and len(angle_pairs) == len(rows):
        mids = []
        for alpha, beta in angle_pairs:
            mids.extend([alpha, beta])
        lo, span = sectors.minimal_arc(np.asarray(mids))
        if span < math.pi - 1e-12:
            all_samples = np.concatenate([r.boundary for r in rows])
            vertex = sectors.refit_vertex(all_samples, lo, lo + span)
            common = Sector(vertex, lo, lo + span)
    lowers = np.asarray([r.inf_lower for r in rows])
    tol = 1e-6 * max(1.0, float(np.max(np.abs(lowers))) if lowers.size else 1.0)
    monotone = bool(np.all(np.diff(lowers) >= -tol)) if lowers.size > 1 else True
    return ScanResult(rows=tuple(rows), common_sector=common,
                      lower_bounds_monotone=monotone)


def scan_to_csv(result: ScanResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_lo", "window_hi", "alpha", "beta",
                         "vertex_re", "vertex_im", "herm_lambda_min",
                         "infmod_lower", "infmod_upper"])
        for r in result.rows:
            sec = r.sector
            writer.writerow([
                repr(r.window.a), repr(r.window.b),
                repr(sec.alpha) if sec else "",
                repr(sec.beta) if sec else "",
                repr(sec.vertex.real) if sec else "",
                repr(sec.vertex.imag) if sec else "",
                repr(r.herm_lambda_min), repr(r.inf_lower), repr(r.inf_upper),
            ])


# -- quadrature evaluation of the form on explicit functions ------------------


def dirichlet_form_quadrature(s: Antiderivative, fn, dfn, lo: float, hi: float,
                              extra_breaks=(), rtol: float = 1e-11) -> complex:
    """l[y] = int |y'|^2 - int s (y conj(y))' dx for an explicit y on [lo, hi]."""
    breaks = list(s.breakpoints) + list(extra_breaks)
    kinetic = quadrature.integrate(lambda x: np.abs(dfn(x)) ** 2,
                                   lo, hi, breaks, rtol=rtol)
    pot = quadrature.integrate(
        lambda x: s.values(x) * 2.0 * np.real(dfn(x) * np.conj(fn(x))),
        lo, hi, breaks, rtol=rtol)
    return complex(kinetic - pot)


@dataclass(frozen=True)
class PartitionReport:
    lhs: complex
    rhs: complex
    correction: float
    residual: float
    norm_sq: float

    @property
    def correction_ratio(self) -> float:
        return self.correction / self.norm_sq if self.norm_sq else 0.0


def partition_identity_check(s: Antiderivative, y: PiecewisePoly,
                             offsets=None) -> PartitionReport:
    """Check the overlapping-window energy identity for sine-squared weights.

    Windows [a_k, a_k + 1] carry phi_k(x) = sin(pi (x - a_k)); with
    y_k = phi_k^2 y and u_k = phi_k phi_{k+1} y the identity

        l[y] = sum l[y_k] + 2 sum l[u_k] - 2 sum int (phi_k' phi_{k+1}
                - phi_k phi_{k+1}')^2 |y|^2

    holds, and the correction term never exceeds 2 pi^2 ||y||^2.  Offsets
    default to the half-shifted lattice -1/2, 0, 1/2, ... clipped to [0, X],
    whose squared weights sum to one on the whole support.
    """
    X = s.domain_end
    lo_y, hi_y = y.support
    if hi_y > X - 1.0 + 1e-9:
        raise ValidationError("y must vanish outside [0, domain_end - 1]")
    if abs(complex(y.values(np.asarray([max(lo_y, 0.0)]))[0])) > 1e-12:
        raise ValidationError("y must vanish at the left end of its support")
    if offsets is None:
        offsets = []
        a = -0.5
        while a <= hi_y + 1e-9:
            if a + 1.0 > lo_y - 1e-9:
                offsets.append(a)
            a += 0.5
    offsets = sorted(float(a) for a in offsets)
    breaks = list(y.breakpoints) + [a + 0.5 * k for a in offsets for k in (0, 1)]

    def window_form(fn, dfn, w_lo, w_hi):
        w_lo, w_hi = max(w_lo, 0.0), min(w_hi, X)
        if w_hi <= w_lo:
            return 0j
        return dirichlet_form_quadrature(s, fn, dfn, w_lo, w_hi, breaks)

    lhs = window_form(y.values, y.deriv_values, max(lo_y, 0.0), min(hi_y, X))

    rhs_sum = 0j
    correction = 0.0
    norm_sq = float(np.real(quadrature.integrate(
        lambda x: np.abs(y.values(x)) ** 2, max(lo_y, 0.0), min(hi_y, X),
        y.breakpoints)))

    def phi(a):
        return (lambda x: np.sin(np.pi * (np.asarray(x) - a)),
                lambda x: np.pi * np.cos(np.pi * (np.asarray(x) - a)))

    for i, a in enumerate(offsets):
        pa, dpa = phi(a)
        yk = lambda x, pa=pa: pa(x) ** 2 * y.values(x)
        dyk = lambda x, pa=pa, dpa=dpa: (2.0 * pa(x) * dpa(x) * y.values(x)
                                         + pa(x) ** 2 * y.deriv_values(x))
        rhs_sum += window_form(yk, dyk, a, a + 1.0)
        if i + 1 < len(offsets) and offsets[i + 1] - a < 1.0 - 1e-9:
            b = offsets[i + 1]
            pb, dpb = phi(b)
            uk = lambda x, pa=pa, pb=pb: pa(x) * pb(x) * y.values(x)
            duk = lambda x, pa=pa, pb=pb, dpa=dpa, dpb=dpb: (
                (dpa(x) * pb(x) + pa(x) * dpb(x)) * y.values(x)
                + pa(x) * pb(x) * y.deriv_values(x))
            rhs_sum += 2.0 * window_form(uk, duk, b, a + 1.0)
            w_lo, w_hi = max(b, 0.0), min(a + 1.0, X)
            if w_hi > w_lo:
                wronsk = lambda x, pa=pa, pb=pb, dpa=dpa, dpb=dpb: (
                    (dpa(x) * pb(x) - pa(x) * dpb(x)) ** 2
                    * np.abs(y.values(x)) ** 2)
                correction += 2.0 * float(np.real(quadrature.integrate(
                    wronsk, w_lo, w_hi, breaks)))

    rhs = rhs_sum - correction
    residual = abs(lhs - rhs) / max(1.0, abs(lhs), abs(rhs))
    return PartitionReport(lhs=lhs, rhs=rhs, correction=correction,
                           residual=residual, norm_sq=norm_sq)
