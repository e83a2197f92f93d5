"""Experiment drivers: order studies, growth fits, error profiles, timing.

Everything here consumes the scheme runners and produces small, JSON-able
report objects.  Fits are plain least squares with no randomized pieces, so
reports are deterministic for identical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import median
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from .errors import FitError, ParameterError, RootConvergenceError
from .pde import PdeProblem, PdeRunResult, run_pde
from .scalar import RunResult, ScalarDelayProblem, SchemeConfig, run


@dataclass
class ConvergenceReport:
    """Log-log order measurement of the gap between two scheme variants."""

    h_values: np.ndarray
    errors: np.ndarray
    slope: float
    intercept: float
    degenerate: bool = False

    def to_json(self) -> dict:
        return {
            "h": [float(v) for v in self.h_values],
            "error": [float(v) for v in self.errors],
            "slope": self.slope,
            "intercept": self.intercept,
            "degenerate": self.degenerate,
        }


@dataclass
class GrowthFit:
    """Line fit of log|u(t)| over a trailing window [t_start, T]."""

    logM: float
    omega: float
    window: Tuple[float, float]

    def to_json(self) -> dict:
        return {"logM": self.logM, "omega": self.omega,
                "window": [self.window[0], self.window[1]]}


@dataclass
class RuntimeReport:
    """Median wall-clock seconds per scheme and their ratio."""

    seconds: Dict[str, float]
    ratio: float
    repetitions: int

    def to_json(self) -> dict:
        out = {k: v for k, v in self.seconds.items()}
        out["ratio"] = self.ratio
        return out


def _parse_variant(tag: str) -> Tuple[str, str]:
    """Split a scheme tag like "ie" or "lt-kernel" into (scheme, mode)."""
    parts = tag.split("-")
    scheme = parts[0]
    mode = parts[1] if len(parts) > 1 else "grid"
    if scheme not in ("ie", "lt") or mode not in ("grid", "kernel"):
        raise ParameterError(f"unknown scheme variant {tag!r}")
    return scheme, mode


def convergence_study(problem: ScalarDelayProblem,
                      scheme_pair: Tuple[str, str],
                      h_list: Sequence[float],
                      T: float) -> ConvergenceReport:
    """Measure how fast two scheme variants approach each other as h shrinks.

    For each h both variants are run to the shared horizon T and compared in
    sup norm on the coarsest grid (every finer step must subdivide the
    coarsest one).  The fitted log-log slope estimates the order of the gap;
    identically-zero gaps are reported as a degenerate fit instead of a
    meaningless line.
    """
    hs = np.asarray(list(h_list), dtype=float)
    if hs.size < 3:
        raise ParameterError("need at least 3 step sizes for a slope")
    if np.any(np.diff(hs) >= 0):
        raise ParameterError("step sizes must be strictly decreasing")
    h0 = hs[0]
    errors = np.empty(hs.size)
    for i, h in enumerate(hs):
        stride_f = h0 / h
        stride = int(round(stride_f))
        if abs(stride_f - stride) > 1e-9 * stride_f:
            raise ParameterError(f"h={h} does not subdivide the coarsest h={h0}")
        runs = []
        for tag in scheme_pair:
            scheme, mode = _parse_variant(tag)
            cfg = SchemeConfig(h=float(h), T=T, scheme=scheme, delay_mode=mode)
            runs.append(run(problem, cfg))
        n_coarse = int(round(T / h0))
        idx = stride * np.arange(n_coarse + 1)
        errors[i] = float(np.max(np.abs(runs[0].values[idx] - runs[1].values[idx])))
    if np.any(errors <= 0.0):
        return ConvergenceReport(h_values=hs, errors=errors,
                                 slope=math.nan, intercept=math.nan,
                                 degenerate=True)
    slope, intercept = np.polyfit(np.log(hs), np.log(errors), 1)
    return ConvergenceReport(h_values=hs, errors=errors,
                             slope=float(slope), intercept=float(intercept))


def exp_growth_fit(series: RunResult, t_start: float) -> GrowthFit:
    """Fit log|u(t)| = logM + omega t over the window t >= t_start.

    Samples with |u| <= 1e-300 are dropped to keep the logarithm finite;
    fewer than 3 usable samples is an error rather than a junk fit.
    """
    t = series.times
    u = np.abs(series.values)
    mask = (t >= t_start) & (u > 1e-300)
    if int(mask.sum()) < 3:
        raise FitError(f"only {int(mask.sum())} usable samples at t >= {t_start}")
    omega, logM = np.polyfit(t[mask], np.log(u[mask]), 1)
    return GrowthFit(logM=float(logM), omega=float(omega),
                     window=(float(t_start), float(t[-1])))


def char_root_rightmost(a: float, b: float, tau: float,
                        re_range: Tuple[float, float] = (-1.0, 1.0),
                        im_max: float = 20.0) -> complex:
    """Rightmost root of lambda = a + b exp(lambda tau) in a search box.

    Newton iterations seeded from a grid over the box; converged roots are
    deduplicated and the one with the largest real part wins.  Conjugate
    roots are equivalent for growth rates, so only Im >= 0 is scanned.
    """
    if tau >= 0:
        raise ParameterError(f"delay must be negative, got {tau}")

    def f(lam: complex) -> complex:
        return lam - a - b * np.exp(lam * tau)

    def fp(lam: complex) -> complex:
        return 1.0 - b * tau * np.exp(lam * tau)

    roots = []
    for re0 in np.linspace(re_range[0], re_range[1], 9):
        for im0 in np.linspace(0.0, im_max, 81):
            lam = complex(re0, im0)
            for _ in range(60):
                val = f(lam)
                if abs(val) < 1e-13:
                    break
                dval = fp(lam)
                if dval == 0:
                    break
                step = val / dval
                lam = lam - step
                if abs(lam) > 1e6:
                    break
            else:
                continue
            if abs(f(lam)) < 1e-13:
                roots.append(complex(lam.real, abs(lam.imag)))
    if not roots:
        raise RootConvergenceError("no characteristic root converged in the box",
                                   residual=math.inf)
    dedup = []
    for r in sorted(roots, key=lambda z: -z.real):
        if all(abs(r - q) > 1e-6 for q in dedup):
            dedup.append(r)
    return dedup[0]


def error_profile(s1: Union[RunResult, PdeRunResult],
                  s2: Union[RunResult, PdeRunResult]) -> np.ndarray:
    """Pointwise absolute difference of two runs on identical time grids."""
    if s1.times.shape != s2.times.shape or not np.array_equal(s1.times, s2.times):
        raise ParameterError("time grids differ; profiles need identical grids")
    a = s1.values if isinstance(s1, RunResult) else s1.center
    b = s2.values if isinstance(s2, RunResult) else s2.center
    return np.abs(a - b)


def compare_runtime(problem: Union[ScalarDelayProblem, PdeProblem],
                    config_pair: Tuple[SchemeConfig, SchemeConfig],
                    repetitions: int = 3) -> RuntimeReport:
    """Median wall-clock comparison of two configurations on one problem.

    One warm-up run per configuration is discarded (imports, caches), then
    ``repetitions`` timed runs feed a median.  Only the ratio is meaningful
    across machines; absolute seconds are reported for context.
    """
    if repetitions < 3:
        raise ParameterError(f"need >= 3 repetitions for a median, got {repetitions}")
    runner = run_pde if isinstance(problem, PdeProblem) else run
    seconds: Dict[str, float] = {}
    labels = []
    for cfg in config_pair:
        label = cfg.scheme
        labels.append(label)
        runner(problem, cfg)
        times = [runner(problem, cfg).wall_clock for _ in range(repetitions)]
        seconds[label] = float(median(times))
    ratio = seconds[labels[0]] / seconds[labels[1]]
    return RuntimeReport(seconds=seconds, ratio=float(ratio),
                         repetitions=repetitions)
