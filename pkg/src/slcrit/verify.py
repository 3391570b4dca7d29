"""Seeded property suites behind the ``verify`` CLI command.

Each suite replays one of the package's certified invariants on a random
corpus and reports the worst case it saw.  A fixed seed makes the whole run
bit-reproducible.  The optional ``corrupt`` argument names a suite whose
measured value gets sabotaged before comparison; it exists purely so the
harness itself can be tested for its ability to fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import criteria, forms, potential, regsolve, sampling
from .errors import NumericError
from .potential import Interval


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    cases: int
    worst: float
    tolerance: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        msg = f"[{status}] {self.name}: {self.cases} cases, worst={self.worst:.3e} (tol {self.tolerance:.1e})"
        if self.detail and not self.passed:
            msg += f" -- {self.detail}"
        return msg


def _corrupt_bias(corrupt: str | None, name: str) -> float:
    return 1e3 if corrupt == name else 0.0


def variance_identity_suite(seed: int, cases: int = 50, corrupt: str | None = None) -> SuiteResult:
    """window_deviation.dbl vs the brute-force tensor double integral."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    detail = ""
    for k in range(cases):
        s = sampling.random_antiderivative(rng)
        win = sampling.random_window(rng, s)
        _c, _dev, dbl = criteria.window_deviation(s, win.a, win.length)
        brute = criteria.dbl_bruteforce(s, win.a, win.length, n=16)
        # relative at O(1) scale and above, absolute 1e-8 below it
        rel = abs(dbl - brute) / max(abs(brute), 1.0)
        rel += _corrupt_bias(corrupt, "variance_identity")
        if rel > worst:
            worst = rel
            detail = f"case {k}: dbl={dbl!r} brute={brute!r}"
    return SuiteResult("variance_identity", worst <= 1e-8, cases, worst, 1e-8, detail)


def two_sided_suite(seed: int, cases: int = 50, corrupt: str | None = None) -> SuiteResult:
    """a*dev <= dbl <= 4*a*dev with slack >= -1e-9 relative."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    detail = ""
    for k in range(cases):
        s = sampling.random_antiderivative(rng)
        win = sampling.random_window(rng, s)
        a = win.length
        _c, dev, dbl = criteria.window_deviation(s, win.a, a)
        scale = max(dbl, a * dev, 1.0)
        slack = max(a * dev - dbl, dbl - 4.0 * a * dev) / scale
        slack += _corrupt_bias(corrupt, "two_sided")
        if slack > worst:
            worst = slack
            detail = f"case {k}: a*dev={a * dev!r} dbl={dbl!r}"
    return SuiteResult("two_sided", worst <= 1e-9, cases, worst, 1e-9, detail)


def partition_identity_suite(seed: int, bumps: int = 10, potentials: int = 5,
                             corrupt: str | None = None) -> SuiteResult:
    """Overlapping-window identity: residual and correction ceiling."""
    rng = np.random.default_rng(seed)
    X = 4.0
    pots = [potential.zero(X),
            potential.from_poly((0.0, 1.0), X),
            potential.delta_sum([0.8, 1.9, 2.7], [1.0, -2.0, 0.5], X),
            sampling.random_antiderivative(rng, domain_end=X, jumps=0),
            sampling.random_antiderivative(rng, domain_end=X, jumps=3)]
    pots = pots[:potentials]
    worst = 0.0
    detail = ""
    count = 0
    for b in range(bumps):
        y = sampling.random_compact_bump(rng, X)
        for i, s in enumerate(pots):
            rep = forms.partition_identity_check(s, y)
            excess = max(rep.residual,
                         (rep.correction - 2.0 * math.pi ** 2 * rep.norm_sq)
                         / max(rep.norm_sq, 1e-12))
            excess += _corrupt_bias(corrupt, "partition_identity")
            count += 1
            if excess > worst:
                worst = excess
                detail = f"bump {b} on potential {i}: residual={rep.residual:.3e}"
    return SuiteResult("partition_identity", worst <= 1e-6, count, worst, 1e-6, detail)


def growth_bound_suite(seed: int, cases: int = 100, corrupt: str | None = None) -> SuiteResult:
    """Fundamental-pair sup bound M <= 2 on qualifying short windows."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    detail = ""
    used = 0
    for k in range(cases):
        s, win = sampling.random_growth_case(rng)
        try:
            res = regsolve.growth_bound_check(s, win)
        except NumericError as exc:
            return SuiteResult("growth_bound", False, k + 1, math.inf, 2.0 + 1e-6,
                               str(exc))
        if not res.applicable:
            continue
        used += 1
        value = res.M + _corrupt_bias(corrupt, "growth_bound")
        if value > worst:
            worst = value
            detail = f"case {k}: M={res.M:.6f} dev={res.deviation:.4f} len={res.interval_length:.4f}"
    return SuiteResult("growth_bound", worst <= 2.0 + 1e-6, used, worst, 2.0 + 1e-6, detail)


def miura_positivity_suite(seed: int, cases: int = 20, corrupt: str | None = None) -> SuiteResult:
    """Every unit-window Hermitian-part lambda_min >= -1e-6 for miura potentials."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    detail = ""
    for k in range(cases):
        gamma = sampling.random_gamma(rng)
        s = potential.miura(gamma, 0.0)
        scan = forms.localization_scan(s, n=48, angles=16)
        low = min(r.herm_lambda_min for r in scan.rows)
        low -= _corrupt_bias(corrupt, "miura_positivity")
        if -low > worst:
            worst = -low
            detail = f"case {k}: lambda_min={low:.3e}"
    return SuiteResult("miura_positivity", worst <= 1e-6, cases, worst, 1e-6, detail)


def solver_consistency_suite(seed: int, cases: int = 20, corrupt: str | None = None) -> SuiteResult:
    """cauchy_apply vs propagate-with-forcing, plus the Wronskian invariant."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    detail = ""
    for k in range(cases):
        # mostly the exactness class (piecewise-constant s), plus smooth
        # coefficients where agreement needs the convergence of both routes
        if k % 4 == 3:
            s = sampling.random_antiderivative(rng, domain_end=1.0, pieces=2,
                                               jumps=0, amplitude=1.0)
            panels = 1024
        else:
            s = sampling.random_step_potential(rng)
            panels = 64
        f = sampling.random_forcing(rng, s.domain_end)
        win = Interval(0.0, s.domain_end)
        direct = regsolve.propagate(s, win, regsolve.State(0.0, 0.0),
                                    forcing=f, panels=panels)
        kernel = regsolve.cauchy_apply(s, win, f, panels=panels)
        scale = max(1.0, float(np.abs(direct.states).max()))
        diff = float(np.abs(direct.states - kernel.states).max()) / scale
        phi, psi = regsolve.fundamental_pair(s, win, panels=panels)
        diff = max(diff, regsolve.wronskian_defect(phi, psi))
        diff += _corrupt_bias(corrupt, "solver_consistency")
        if diff > worst:
            worst = diff
            detail = f"case {k}"
    return SuiteResult("solver_consistency", worst <= 1e-8, cases, worst, 1e-8, detail)


ALL_SUITES = (
    variance_identity_suite,
    two_sided_suite,
    partition_identity_suite,
    growth_bound_suite,
    miura_positivity_suite,
    solver_consistency_suite,
)


def run_all(seed: int, corrupt: str | None = None) -> list[SuiteResult]:
    return [suite(seed, corrupt=corrupt) for suite in ALL_SUITES]
