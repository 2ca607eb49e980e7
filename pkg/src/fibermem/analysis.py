"""Statistical extraction: lifetime fits, efficiency ratios, SNR, fidelity.

Conventions: the ring-down lifetime comes from a weighted linear regression
of log counts vs round-trip bin (weights = counts, the inverse variance of
the log under Poisson statistics) with zero-count bins excluded.  The read
efficiency uses the summed-tail ratio from the read bin onward, since
read-out removes photons from all subsequent leakage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from .bsfwm import BsfwmCoupling, delay_profile
from .errors import (
    DomainError,
    FitFailureError,
    InsufficientDataError,
    NonDecayingError,
)
from .montecarlo import MonteCarloResult, TimeTagHistogram
from .spectral import SpectralIntensity

Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class LifetimeFit:
    lifetime: float  # 1/e lifetime in round trips
    ci95_low: float
    ci95_high: float
    r_squared: float


def fit_ring_down(hist: TimeTagHistogram, bin_range: tuple | None = None) -> LifetimeFit:
    """Weighted log-linear fit of the ring-down histogram."""
    counts = hist.counts_array().astype(float)
    t = np.arange(counts.size, dtype=float)
    if bin_range is not None:
        start, end = bin_range
        sel = (t >= start) & (t < end)
        counts, t = counts[sel], t[sel]
    keep = counts > 0
    counts, t = counts[keep], t[keep]
    if counts.size < 3:
        raise InsufficientDataError(
            f"need >= 3 bins with counts, got {counts.size}"
        )
    y = np.log(counts)
    w = counts
    wsum = w.sum()
    tbar = (w * t).sum() / wsum
    ybar = (w * y).sum() / wsum
    sxx = (w * (t - tbar) ** 2).sum()
    if sxx == 0:
        raise InsufficientDataError("all usable bins share one round-trip index")
    slope = (w * (t - tbar) * (y - ybar)).sum() / sxx
    if slope >= 0:
        raise NonDecayingError(f"fitted slope {slope:.3g} is not negative")
    intercept = ybar - slope * tbar
    resid = y - (intercept + slope * t)
    ss_res = (w * resid**2).sum()
    ss_tot = (w * (y - ybar) ** 2).sum()
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    # Poisson log-variance is 1/counts, so the weighted normal equations give
    # var(slope) = 1/sxx directly (no residual-variance rescaling).
    se_slope = 1.0 / math.sqrt(sxx)
    lifetime = -1.0 / slope
    se_lifetime = se_slope / slope**2
    return LifetimeFit(
        lifetime=lifetime,
        ci95_low=lifetime - Z95 * se_lifetime,
        ci95_high=lifetime + Z95 * se_lifetime,
        r_squared=max(0.0, min(1.0, r2)),
    )


@dataclass(frozen=True)
class EfficiencyReport:
    eta_w: float
    eta_w_err: float
    eta_r: float
    eta_r_err: float
    eta_tot: float
    eta_tot_err: float
    snr: float | None = None
    mu1: float | None = None
    n_noise: float | None = None

    def to_dict(self) -> dict:
        return {
            "eta_w": self.eta_w,
            "eta_w_err": self.eta_w_err,
            "eta_r": self.eta_r,
            "eta_r_err": self.eta_r_err,
            "eta_tot": self.eta_tot,
            "eta_tot_err": self.eta_tot_err,
            "snr": self.snr,
            "mu1": self.mu1,
            "n_noise": self.n_noise,
        }


def _ratio_err(a: float, b: float) -> float:
    # Poisson counts a, b: relative errors add in quadrature.
    return (a / b) * math.sqrt(1.0 / max(a, 1.0) + 1.0 / max(b, 1.0))


def extract_efficiencies(
    result_off: MonteCarloResult,
    result_write: MonteCarloResult,
    result_all: MonteCarloResult,
    t_read: int,
    result_noise: MonteCarloResult | None = None,
) -> EfficiencyReport:
    """Memory efficiencies from the three standard histogram runs.

    eta_w compares the transmitted input at bin 0 with write controls on
    vs off; eta_r compares the slow-axis leakage tail from the read bin
    onward with and without the read; eta_tot compares the retrieved fast
    count at the read bin with the input reference.  When a blocked-input
    noise run is supplied its read-bin rate is subtracted from the
    retrieved signal before forming eta_tot.
    """
    fast_off = result_off.fast
    fast_write = result_write.fast
    fast_all = result_all.fast
    slow_write = result_write.slow
    slow_all = result_all.slow
    scale_off = fast_off.n_trials
    ref0 = fast_off.counts[0] / scale_off
    if fast_off.counts[0] == 0:
        raise DomainError("reference run has zero counts at bin 0; cannot normalize")
    w0 = fast_write.counts[0] / fast_write.n_trials
    eta_w = 1.0 - w0 / ref0
    eta_w_err = _ratio_err(fast_write.counts[0], fast_off.counts[0]) if w0 > 0 else 0.0

    tail_write = sum(slow_write.counts[t_read:]) / slow_write.n_trials
    tail_all = sum(slow_all.counts[t_read:]) / slow_all.n_trials
    if tail_write == 0:
        raise DomainError("write-only run has an empty slow-axis tail; cannot form eta_r")
    eta_r = 1.0 - tail_all / tail_write
    eta_r_err = _ratio_err(
        max(sum(slow_all.counts[t_read:]), 1), sum(slow_write.counts[t_read:])
    )

    sig = fast_all.counts[t_read] / fast_all.n_trials
    noise_rate = 0.0
    if result_noise is not None:
        noise_rate = result_noise.fast.counts[t_read] / result_noise.fast.n_trials
    eta_tot = (sig - noise_rate) / ref0
    eta_tot_err = _ratio_err(max(fast_all.counts[t_read], 1), fast_off.counts[0])
    return EfficiencyReport(eta_w, eta_w_err, eta_r, eta_r_err, eta_tot, eta_tot_err)


def spl_report(
    result_off: MonteCarloResult,
    result_write: MonteCarloResult,
    result_all: MonteCarloResult,
    result_noise: MonteCarloResult,
    t_read: int,
    eta_det: float,
) -> EfficiencyReport:
    """Efficiency report for a single-photon-level run, with SNR, mu1, and
    the noise level in photons/pulse (detected rates referred inside the
    fiber by the detection efficiency)."""
    from dataclasses import replace as _replace

    from .detection import mu1_benchmark, snr as _snr

    report = extract_efficiencies(result_off, result_write, result_all, t_read, result_noise)
    noise_rate = result_noise.fast.rate(t_read)
    signal_rate = result_all.fast.rate(t_read) - noise_rate
    if eta_det <= 0:
        raise DomainError("detection efficiency must be positive")
    n_noise = noise_rate / eta_det
    signal_pp = signal_rate / eta_det
    return _replace(
        report,
        snr=_snr(max(signal_pp, 0.0), n_noise),
        mu1=mu1_benchmark(n_noise, report.eta_tot),
        n_noise=n_noise,
    )


def spectral_fidelity(i_in: SpectralIntensity, i_out: SpectralIntensity) -> float:
    """Normalized overlap of square-root spectral intensities.

    Scale-invariant in each argument; equals 1 only for proportional
    spectra (Cauchy-Schwarz).  Spectra on different grids are resampled
    onto the overlap of the two grids by linear interpolation.
    """
    g1 = np.asarray(i_in.grid_nm)
    g2 = np.asarray(i_out.grid_nm)
    v1 = np.asarray(i_in.values)
    v2 = np.asarray(i_out.values)
    if g1.size == g2.size and np.array_equal(g1, g2):
        grid, a, b = g1, v1, v2
    else:
        lo, hi = max(g1[0], g2[0]), min(g1[-1], g2[-1])
        if lo >= hi:
            raise DomainError("spectral grids do not overlap")
        grid = np.unique(np.concatenate([g1, g2]))
        grid = grid[(grid >= lo) & (grid <= hi)]
        a = np.interp(grid, g1, v1)
        b = np.interp(grid, g2, v2)
    int_a = np.trapz(a, grid)
    int_b = np.trapz(b, grid)
    if int_a <= 0 or int_b <= 0:
        raise DomainError("spectral fidelity needs spectra with positive integral")
    num = np.trapz(np.sqrt(a * b), grid)
    return float(num / math.sqrt(int_a * int_b))


@dataclass(frozen=True)
class PowerScanFit:
    xi: float
    amplitude: float
    r_squared_signal: float
    noise_slope: float
    noise_intercept: float
    r_squared_noise: float


def _r_squared(y, model, w=None) -> float:
    y = np.asarray(y, dtype=float)
    model = np.asarray(model, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    ybar = (w * y).sum() / w.sum()
    ss_res = (w * (y - model) ** 2).sum()
    ss_tot = (w * (y - ybar) ** 2).sum()
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def fit_power_scan(rows) -> PowerScanFit:
    """Fit the control-energy scan: cos^2 signal model plus linear noise."""
    rows = list(rows)
    if len(rows) < 5:
        raise InsufficientDataError(f"need >= 5 energy points, got {len(rows)}")
    x = np.array([r[0] for r in rows], dtype=float)
    noise = np.array([r[2] for r in rows], dtype=float)
    corrected = np.array([r[3] for r in rows], dtype=float)

    def model(xv, amp, xi):
        return amp * np.cos(xi * xv) ** 2

    amp0 = corrected.max()
    span = x.max() - x.min()
    xi0 = math.pi / (2.0 * span) if span > 0 else 1.0
    best = None
    for scale in (1.0, 0.5, 2.0, 4.0):
        try:
            popt, _ = curve_fit(model, x, corrected, p0=[amp0, xi0 * scale], maxfev=20000)
        except RuntimeError:
            continue
        r2 = _r_squared(corrected, model(x, *popt))
        if best is None or r2 > best[1]:
            best = (popt, r2)
    if best is None:
        raise FitFailureError("cos^2 signal fit did not converge")
    (amp, xi), r2_sig = best
    xi = abs(xi)

    # weighted linear regression of the noise, Poisson-like weights
    w = 1.0 / np.maximum(noise, noise[noise > 0].min() if np.any(noise > 0) else 1.0)
    wsum = w.sum()
    xbar = (w * x).sum() / wsum
    nbar = (w * noise).sum() / wsum
    sxx = (w * (x - xbar) ** 2).sum()
    if sxx == 0:
        raise FitFailureError("noise fit needs more than one distinct energy")
    slope = (w * (x - xbar) * (noise - nbar)).sum() / sxx
    intercept = nbar - slope * xbar
    r2_noise = _r_squared(noise, intercept + slope * x, w)
    return PowerScanFit(xi, amp, r2_sig, slope, intercept, r2_noise)


@dataclass(frozen=True)
class DelayScanFit:
    walkoff_ps: float
    center_ps: float
    amplitude: float
    residuals: tuple


def fit_delay_scan(rows, coupling: BsfwmCoupling, theta_max: float) -> DelayScanFit:
    """Fit the walk-off from a delay scan's corrected-signal profile.

    Pulse durations are held at their configured values; the free
    parameters are amplitude, center, and walk-off.
    """
    rows = list(rows)
    if len(rows) < 7:
        raise InsufficientDataError(f"need >= 7 delay points, got {len(rows)}")
    tau = np.array([r[0] for r in rows], dtype=float)
    corrected = np.array([r[3] for r in rows], dtype=float)
    if np.allclose(corrected, corrected[0]):
        raise FitFailureError("delay scan shows no profile; nothing to fit")

    from dataclasses import replace as _replace

    def model(t, amp, center, walkoff):
        c = _replace(coupling, walkoff_ps=abs(walkoff))
        kappa = delay_profile(c, t - center)
        return amp * np.sin(theta_max * kappa) ** 2

    amp0 = corrected.max() / max(math.sin(theta_max) ** 2, 1e-9)
    center0 = float(tau[np.argmax(corrected)])
    half = corrected.max() / 2.0
    above = tau[corrected > half]
    width0 = float(above.max() - above.min()) if above.size >= 2 else coupling.walkoff_ps
    try:
        popt, _ = curve_fit(
            model, tau, corrected, p0=[amp0, center0, max(width0, 1e-3)], maxfev=20000
        )
    except RuntimeError as exc:
        raise FitFailureError(f"delay-profile fit did not converge: {exc}") from exc
    amp, center, walkoff = popt
    resid = corrected - model(tau, *popt)
    return DelayScanFit(abs(float(walkoff)), float(center), float(amp), tuple(resid))
