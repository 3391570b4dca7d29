"""Computable resolvent-compactness and sectoriality criteria.

Every criterion is a functional of the antiderivative s evaluated on finite
windows of [0, X]:

* ``window_deviation`` / ``dbl_bruteforce`` -- the double integral
  of |s(xi) - s(eta)|^2 over a window square and its variance identity;
* ``scan_necessary``   -- divergence scan of that double integral (a bounded
  scan refutes the necessary condition for compact resolvents);
* ``brinck``           -- difference sector s(x) - s(t) for 0 <= x - t <= d
  plus the growth series |s(x+a) - s(x)| (criterion under a verified sector);
* ``ismagilov_measure``-- measure of near-equal pairs in a window square;
* ``sector_fit``       -- angular hull of arg(s(x)+f(x)-s(t)-g(t));
* ``brasche_check``    -- unit-window increment of the negative variation;
* ``decompose_unif``   -- bounded-deviation decompositions s = sigma1 + step
  and s = sigma2 + int tau;
* ``classify``         -- rule aggregation into a Verdict.

The half-line limits of the theory become windowed trend tests over [0, X];
thresholds are explicit, configurable, and reported in the evidence instead
of being hidden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import potential, quadrature, sectors
from .errors import DomainError, UnsupportedInputError, ValidationError
from .potential import Antiderivative, Interval
from .sectors import Sector

OUTCOME_COMPACT = "CompactResolvent"
OUTCOME_NOT_COMPACT = "NotCompact"
OUTCOME_INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Thresholds:
    """Finite-window proxies for the theory's limit statements."""

    growth_factor: float = 1.05     # last-quarter vs first-quarter max ratio
    dbl_bound: float = 10.0         # absolute ceiling for a "bounded" dbl scan
    growth_bound: float = 10.0      # absolute ceiling for a bounded growth series
    deviation_bound: float = 1.0    # ceiling for a bounded window-deviation scan


@dataclass(frozen=True)
class WindowSeries:
    """Sampled window functional: value[i] taken at window origin origins[i]."""

    a: float
    origins: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        origins = np.asarray(self.origins, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if origins.size != values.size:
            raise ValidationError("origins and values must align")
        if origins.size > 1 and np.any(np.diff(origins) <= 0):
            raise ValidationError("origins must increase")
        if values.size and not np.all(np.isfinite(values)):
            raise ValidationError("series values must be finite")
        object.__setattr__(self, "origins", origins)
        object.__setattr__(self, "values", values)

    def rows(self):
        return zip(self.origins.tolist(), self.values.tolist())


def bounded_trend(values: np.ndarray, factor: float, ceiling: float) -> bool:
    """True when the series looks bounded over the window.

    Bounded means: max over the last quarter <= factor * max over the first
    quarter, AND the overall max stays below the absolute ceiling.
    """
    v = np.abs(np.asarray(values, dtype=float))
    if v.size == 0:
        return True
    q = max(1, v.size // 4)
    first = float(v[:q].max())
    last = float(v[-q:].max())
    return last <= factor * first + 1e-30 and float(v.max()) <= ceiling


@dataclass(frozen=True)
class Evidence:
    """One fired rule with its numeric witness, JSON-ready."""

    rule: str
    theorem: str
    values: dict


@dataclass(frozen=True)
class Verdict:
    outcome: str
    evidence: tuple

    def to_dict(self) -> dict:
        return {"verdict": self.outcome,
                "evidence": [{"rule": e.rule, "theorem": e.theorem,
                              "values": e.values} for e in self.evidence]}


# -- window functionals ------------------------------------------------------


def window_deviation(s: Antiderivative, x: float, a: float):
    """(c_min, dev, dbl) on the window [x, x+a] from exact variance identities.

    c_min = (int s)/a minimises int |s - c|^2; dev is that minimum; dbl is the
    double integral of |s(xi)-s(eta)|^2 over the window square, equal to
    2*(a * int|s|^2 - |int s|^2).  The two-sided bound
    a*dev <= dbl <= 4*a*dev holds by construction.
    """
    if a <= 0:
        raise DomainError("window length must be positive")
    win = s.check_interval(Interval(x, x + a))
    m = potential.moments(s, win)
    c_min = m.m0 / a
    dev = max(m.q2 - abs(m.m0) ** 2 / a, 0.0)
    # same identity, clipped consistently with dev so the two-sided bound
    # a*dev <= dbl <= 4a*dev cannot be broken by roundoff at zero deviation
    dbl = 2.0 * a * dev
    return c_min, dev, dbl


def dbl_bruteforce(s: Antiderivative, x: float, a: float, n: int = 16) -> float:
    """Tensor Gauss-Legendre oracle for the window-square double integral.

    Kept deliberately independent of ``window_deviation``: the integrand
    |s(xi) - s(eta)|^2 is summed over an explicit 2-D tensor grid whose
    1-D panels split at every breakpoint of s.
    """
    if n < 8:
        raise ValidationError("tensor order n must be >= 8")
    s.check_interval(Interval(x, x + a))
    nodes, weights = quadrature.fixed_nodes(x, x + a, s.breakpoints, order=n)
    vals = s.values(nodes)
    diff2 = np.abs(vals[:, None] - vals[None, :]) ** 2
    return float(weights @ diff2 @ weights)


def scan_necessary(s: Antiderivative, a: float,
                   thresholds: Thresholds = Thresholds()):
    """dbl over origins i*a/2 up to X-a; refuted=True when the scan is bounded.

    A bounded scan refutes the divergence that compact resolvents require.
    Returns (series, refuted).
    """
    if not (0.0 < a <= s.domain_end):
        raise DomainError(f"window length {a} must lie in (0, {s.domain_end}]")
    origins = []
    t = 0.0
    while t <= s.domain_end - a + 1e-12:
        origins.append(min(t, s.domain_end - a))
        t += a / 2.0
    values = [window_deviation(s, x, a)[2] for x in origins]
    series = WindowSeries(a, np.asarray(origins), np.asarray(values))
    refuted = bounded_trend(series.values, thresholds.growth_factor,
                            thresholds.dbl_bound)
    return series, refuted


def _difference_cloud(s: Antiderivative, d: float, extra: Antiderivative = None,
                      extra_t: Antiderivative = None, step: float = None):
    """Sampled differences v(x) - w(t) over 0 <= x - t <= d on a panel grid.

    v = s + extra (at the later point), w = s + extra_t (at the earlier one).
    Midpoint samples on cells split at breakpoints keep the cloud inside the
    essential range of the pieces.
    """
    step = step if step is not None else d / 64.0
    breaks = set(s.breakpoints)
    for other in (extra, extra_t):
        if other is not None:
            breaks.update(other.breakpoints)
    n_cells = max(8, int(math.ceil(s.domain_end / step)))
    grid, _w = quadrature.midpoint_cells(0.0, s.domain_end, sorted(breaks), n_cells)
    v_late = s.values(grid) + (extra.values(grid) if extra is not None else 0.0)
    v_early = s.values(grid) + (extra_t.values(grid) if extra_t is not None else 0.0)
    max_lag = int(math.floor(d / step)) + 2
    diffs = [v_late - v_early]
    for lag in range(1, max_lag + 1):
        if lag >= grid.size:
            break
        gaps = grid[lag:] - grid[:-lag]
        inside = gaps <= d + 1e-12
        if not np.any(inside):
            break
        diffs.append((v_late[lag:] - v_early[:-lag])[inside])
    return np.concatenate(diffs) if diffs else np.asarray([], dtype=complex)


def brinck(s: Antiderivative, d: float = 1.0, a: float = 1.0,
           thresholds: Thresholds = Thresholds()):
    """Difference-sector check plus the window growth series.

    Returns (diff_sector or None, growth series, verdict hint).  The sector is
    the smallest one (after translating the vertex to a support point of the
    sampled difference hull) containing all s(x) - s(t) with 0 <= x - t <= d;
    the hint applies the criterion: verified strict sector + unbounded growth
    of |s(x+a) - s(x)| points at compact resolvents, bounded growth refutes
    them, no sector stays silent.
    """
    if not (0.0 < d <= 1.0):
        raise DomainError("difference depth d must lie in (0, 1]")
    cloud = _difference_cloud(s, d)
    sector = sectors.fit_sector(cloud, require_strict_args=True,
                                translate_vertex=True)
    origins = []
    t = 0.0
    while t <= s.domain_end - a + 1e-12:
        origins.append(min(t, s.domain_end - a))
        t += a / 4.0
    origins = np.asarray(origins)
    growth = np.abs(s.values(origins + a) - s.values(origins))
    series = WindowSeries(a, origins, growth)
    hint = None
    if sector is not None:
        bounded = bounded_trend(series.values, thresholds.growth_factor,
                                thresholds.growth_bound)
        hint = OUTCOME_NOT_COMPACT if bounded else OUTCOME_COMPACT
    return sector, series, hint


def ismagilov_measure(s: Antiderivative, window: Interval, A: float,
                      n: int = 64) -> float:
    """Measure of {(x, t) in window^2 : |s(x) - s(t)| < A} on a midpoint grid.

    Cells split at breakpoints; the weighted fraction converges to the
    Lebesgue measure for piecewise-continuous s as n grows.
    """
    if n < 32:
        raise ValidationError("grid order n must be >= 32")
    s.check_interval(window)
    mids, widths = quadrature.midpoint_cells(window.a, window.b,
                                             s.breakpoints, n)
    vals = s.values(mids)
    near = (np.abs(vals[:, None] - vals[None, :]) < A).astype(float)
    return float(widths @ near @ widths)


def sector_fit(s: Antiderivative, d: float = 1.0,
               f: Antiderivative = None, g: Antiderivative = None,
               step: float = None) -> Sector | None:
    """Angular hull of arg(s(x) + f(x) - s(t) - g(t)) over 0 <= x - t <= d.

    Vertex stays at 0 (the criterion constrains the argument itself); None
    when the hull spans >= pi or cannot avoid the negative real axis.
    """
    if not (0.0 < d <= 1.0):
        raise DomainError("difference depth d must lie in (0, 1]")
    cloud = _difference_cloud(s, d, extra=f, extra_t=g, step=step)
    return sectors.fit_sector(cloud, require_strict_args=True,
                              translate_vertex=False)


def brasche_check(s: Antiderivative, window: float = 1.0) -> float:
    """Largest unit-window increment of the negative-variation part of s.

    For jump-only s this is the largest sum of |negative jumps| inside any
    half-open window (x, x+window]; smooth negative variation is accumulated
    on a fine breakpoint-respecting grid.
    """
    if not s.is_real(tol=0.0):
        raise UnsupportedInputError("negative-variation check needs real-valued s")
    X = s.domain_end
    win = min(window, X)
    # cumulative negative variation N(t) over (0, t], right-continuous
    grid_pts, _w = quadrature.midpoint_cells(0.0, X, s.breakpoints,
                                             max(512, 64 * int(math.ceil(X))))
    ts = np.unique(np.concatenate([[0.0], grid_pts, np.asarray(s.breakpoints), [X]]))
    vals = s.values(ts).real
    inc = np.diff(vals)
    neg = np.where(inc < 0.0, -inc, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(neg)])  # N at each ts
    candidates = set([0.0, X - win])
    for at, _off in s.jumps:
        candidates.add(min(max(at - win, 0.0), X - win))
        candidates.add(min(at, X - win))
    for t in s.breakpoints:
        c = min(max(t - win, 0.0), X - win)
        candidates.add(c)
    best = 0.0
    for x0 in sorted(candidates):
        n_lo = float(np.interp(x0, ts, cum))
        n_hi = float(np.interp(x0 + win, ts, cum))
        best = max(best, n_hi - n_lo)
    return best


@dataclass(frozen=True)
class UnifDecomposition:
    """s split against its unit-cell means: s = sigma1 + step = sigma2 + int tau."""

    step_values: np.ndarray          # C_l = int_{l-1}^{l} s
    sigma1_sup_sq: float             # sup_l int_{l-1}^{l} |sigma1|^2
    step_jump_sup: float             # sup_l |C_{l+1} - C_l|
    beta_nodes: np.ndarray           # integer nodes of the broken line
    beta_values: np.ndarray          # beta(l-1) = C_l, linear in between
    tau_values: np.ndarray           # tau = beta' per unit cell
    source: Antiderivative = field(repr=False)

    def gamma_step(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.floor(x).astype(int), 0, len(self.step_values) - 1)
        return self.step_values[idx]

    def beta(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        re = np.interp(x, self.beta_nodes, self.beta_values.real)
        im = np.interp(x, self.beta_nodes, self.beta_values.imag)
        return re + 1j * im

    def sigma1(self, x) -> np.ndarray:
        return self.source.values(x) - self.gamma_step(x)

    def sigma2(self, x) -> np.ndarray:
        return self.source.values(x) - self.beta(x)


def decompose_unif(s: Antiderivative) -> UnifDecomposition:
    """Unit-cell mean decomposition with its boundedness diagnostics."""
    cells = int(math.floor(s.domain_end + 1e-12))
    if cells < 2:
        raise DomainError("decomposition needs domain_end >= 2")
    C = np.zeros(cells, dtype=complex)
    sig = np.zeros(cells)
    for l in range(cells):
        m = potential.moments(s, Interval(float(l), float(l + 1)))
        C[l] = m.m0
        sig[l] = max(m.q2 - abs(m.m0) ** 2, 0.0)
    nodes = np.arange(cells, dtype=float)           # beta(l-1) = C_l
    tau = np.diff(C)
    jump_sup = float(np.max(np.abs(tau))) if tau.size else 0.0
    return UnifDecomposition(step_values=C,
                             sigma1_sup_sq=float(sig.max()),
                             step_jump_sup=jump_sup,
                             beta_nodes=nodes,
                             beta_values=C.copy(),
                             tau_values=tau,
                             source=s)


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class ClassifyConfig:
    a: float = 1.0
    d: float = 1.0
    thresholds: Thresholds = Thresholds()
    base: tuple = None        # optional (s0, eps): perturbation rule inputs
    f: Antiderivative = None  # optional pair functions for the sector fit
    g: Antiderivative = None


def _sector_dict(sector: Sector | None) -> dict:
    if sector is None:
        return {"found": False}
    return {"found": True, "alpha": sector.alpha, "beta": sector.beta,
            "vertex_re": sector.vertex.real, "vertex_im": sector.vertex.imag,
            "strict": sector.is_strict()}


def classify(s: Antiderivative, config: ClassifyConfig = ClassifyConfig()) -> Verdict:
    """Combine the criteria into a verdict; every fired rule leaves evidence.

    Rule order: (i) a bounded necessary-condition scan refutes compactness;
    (ii) a verified strict difference sector turns the growth series into a
    criterion; (iii) a pair-function sector plus a diverging scan is
    sufficient; (iv) a supplied base potential with scaling margin whose
    perturbation has bounded window deviation passes its verdict on.
    """
    th = config.thresholds
    evidence = []

    series, refuted = scan_necessary(s, config.a, th)
    growing = not bounded_trend(series.values, th.growth_factor, th.dbl_bound)
    q = max(1, series.values.size // 4)
    evidence.append(Evidence(
        "scan_necessary", "necessary-condition",
        {"a": config.a, "refuted": refuted, "growing": growing,
         "first_quarter_max": float(np.max(series.values[:q])),
         "last_quarter_max": float(np.max(series.values[-q:])),
         "ceiling": th.dbl_bound, "factor": th.growth_factor}))

    diff_sector, growth, hint = brinck(s, config.d, config.a, th)
    growth_bounded = bounded_trend(growth.values, th.growth_factor,
                                   th.growth_bound)
    ev = {"d": config.d, "a": config.a, "sector": _sector_dict(diff_sector),
          "growth_bounded": growth_bounded,
          "growth_max": float(np.max(growth.values)) if growth.values.size else 0.0,
          "hint": hint}
    evidence.append(Evidence("brinck", "difference-sector", ev))

    pair_sector = sector_fit(s, config.d, f=config.f, g=config.g)
    evidence.append(Evidence("sector_fit", "sector-pair",
                             {"d": config.d, "sector": _sector_dict(pair_sector)}))

    inherit = None
    if config.base is not None:
        s0, eps = config.base
        sigma = potential.subtract(s, s0)
        dev_values = []
        t = 0.0
        while t <= s.domain_end - 1.0 + 1e-12:
            dev_values.append(window_deviation(sigma, t, 1.0)[1])
            t += 0.5
        sigma_bounded = bounded_trend(np.asarray(dev_values), th.growth_factor,
                                      th.deviation_bound)
        scaled_sector, _g, _h = brinck(potential.scale(s0, 1.0 + eps),
                                       config.d, config.a, th)
        base_cfg = ClassifyConfig(a=config.a, d=config.d, thresholds=th)
        base_verdict = classify(s0, base_cfg)
        fired = sigma_bounded and scaled_sector is not None
        if fired:
            inherit = base_verdict.outcome
        evidence.append(Evidence(
            "perturbation", "uniform-perturbation",
            {"eps": eps, "sigma_deviation_bounded": sigma_bounded,
             "scaled_base_sector": _sector_dict(scaled_sector),
             "base_outcome": base_verdict.outcome, "fired": fired}))

    if refuted:
        outcome = OUTCOME_NOT_COMPACT
    elif diff_sector is not None and not growth_bounded:
        outcome = OUTCOME_COMPACT
    elif pair_sector is not None and growing:
        outcome = OUTCOME_COMPACT
    elif inherit is not None:
        outcome = inherit
    else:
        outcome = OUTCOME_INCONCLUSIVE
    return Verdict(outcome, tuple(evidence))
