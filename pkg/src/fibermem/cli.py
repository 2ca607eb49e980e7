"""Command-line front end.

Every subcommand reads one JSON config (defaults when omitted), applies
flag overrides, runs the requested experiment, and writes a CSV table plus
a JSON summary next to the --out base path.  Exit codes: 0 success,
1 usage/config error, 2 runtime/fit error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace

import click
import numpy as np

from . import analysis, multiplex as mpx
from .config import Config
from .detection import detection_efficiency
from .errors import ConfigError, FibermemError
from .montecarlo import delay_scan, power_scan, run_scenario, standard_runs
from .spectral import SpectralIntensity, gaussian_spectrum


def _load_config(path) -> Config:
    return Config.load(path) if path else Config()


def _write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write_json(path, obj):
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _apply_overrides(cfg: Config, seed, trials) -> Config:
    if seed is not None:
        cfg = cfg.override("scenario", "rng_seed", int(seed))
    if trials is not None:
        cfg = cfg.override("scenario", "n_trials", int(trials))
    return cfg


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.option("--seed", type=int, default=None, help="Override the RNG seed.")
@click.option("--out", "out_base", type=click.Path(), default="result", help="Output base path.")
@click.option("--trials", type=int, default=None, help="Override the trial count.")
@click.pass_context
def main(ctx, config_path, seed, out_base, trials):
    """Fiber-cavity photon memory simulator."""
    ctx.ensure_object(dict)
    try:
        cfg = _apply_overrides(_load_config(config_path), seed, trials)
    except ConfigError as exc:
        _fail(str(exc), 1)
    ctx.obj["cfg"] = cfg
    ctx.obj["out"] = out_base


def _run(ctx, fn):
    try:
        fn(ctx.obj["cfg"], ctx.obj["out"])
    except ConfigError as exc:
        _fail(str(exc), 1)
    except FibermemError as exc:
        _fail(str(exc), 2)


@main.command()
@click.pass_context
def ringdown(ctx):
    """Write-only storage run: histogram CSV plus a lifetime-fit JSON."""

    def go(cfg: Config, out):
        scenario = cfg.build_scenario().write_only()
        result = run_scenario(scenario)
        fast = result.fast.counts_array()
        slow = result.slow.counts_array()
        _write_csv(
            f"{out}.csv",
            ["bin", "counts_fast", "counts_slow"],
            [(i, fast[i], slow[i]) for i in range(len(fast))],
        )
        fit = analysis.fit_ring_down(result.slow)
        _write_json(
            f"{out}.json",
            {
                "lifetime": fit.lifetime,
                "ci95": [fit.ci95_low, fit.ci95_high],
                "r_squared": fit.r_squared,
            },
        )

    _run(ctx, go)


def _scan_options(fn):
    fn = click.option("--from", "start", type=float, required=True)(fn)
    fn = click.option("--to", "stop", type=float, required=True)(fn)
    fn = click.option("--steps", type=int, default=25, show_default=True)(fn)
    return fn


@main.command("delay-scan")
@_scan_options
@click.option(
    "--stage",
    type=click.Choice(["signal_vs_write", "read_vs_write"]),
    default="read_vs_write",
    show_default=True,
)
@click.pass_context
def delay_scan_cmd(ctx, start, stop, steps, stage):
    """Scan a stage delay (ps) and fit the walk-off from the profile."""

    def go(cfg: Config, out):
        scenario = cfg.build_scenario()
        delays = np.linspace(start, stop, steps)
        rows = delay_scan(scenario, delays, stage)
        _write_csv(
            f"{out}.csv",
            ["delay_ps", "signal_rate", "noise_rate", "corrected_rate"],
            rows,
        )
        role = "write" if stage == "signal_vs_write" else "read"
        coupling = scenario.coupling_write if role == "write" else scenario.coupling_read
        pair = scenario.write_pair if role == "write" else scenario.read_pair
        from .bsfwm import conversion_angle

        fit = analysis.fit_delay_scan(rows, coupling, conversion_angle(coupling, pair))
        _write_json(
            f"{out}.json",
            {"walkoff_ps": fit.walkoff_ps, "center_ps": fit.center_ps, "stage": stage},
        )

    _run(ctx, go)


@main.command("power-scan")
@_scan_options
@click.pass_context
def power_scan_cmd(ctx, start, stop, steps):
    """Scan the write control energy (nJ per control) and fit the models."""

    def go(cfg: Config, out):
        scenario = cfg.build_scenario()
        energies = np.linspace(start, stop, steps)
        rows = power_scan(scenario, energies)
        _write_csv(
            f"{out}.csv",
            ["sqrt_wq_wp_nj", "signal_rate", "noise_rate", "corrected_rate"],
            rows,
        )
        fit = analysis.fit_power_scan(rows)
        _write_json(
            f"{out}.json",
            {
                "xi_rad_per_nj": fit.xi,
                "r_squared_signal": fit.r_squared_signal,
                "noise_slope": fit.noise_slope,
                "r_squared_noise": fit.r_squared_noise,
            },
        )

    _run(ctx, go)


@main.command()
@click.pass_context
def spl(ctx):
    """Single-photon-level run: efficiencies, SNR, mu1, noise level."""

    def go(cfg: Config, out):
        scenario = cfg.build_scenario()
        runs = standard_runs(scenario)
        t_read = scenario.read_bin()
        report = analysis.spl_report(
            runs["off"],
            runs["write"],
            runs["all"],
            runs["noise"],
            t_read,
            detection_efficiency(scenario.chain),
        )
        fast = runs["all"].fast.counts_array()
        slow = runs["all"].slow.counts_array()
        _write_csv(
            f"{out}.csv",
            ["bin", "counts_fast", "counts_slow"],
            [(i, fast[i], slow[i]) for i in range(len(fast))],
        )
        _write_json(f"{out}.json", report.to_dict())

    _run(ctx, go)


@main.command("multiplex")
@click.option("--n-max", type=int, default=None, help="Sweep bin counts 1..n_max.")
@click.pass_context
def multiplex_cmd(ctx, n_max):
    """Temporal-multiplexing sweep: output probability vs bin count."""

    def go(cfg: Config, out):
        base = cfg.build_multiplex()
        top = n_max if n_max is not None else base.n_bins
        rows = []
        for n in range(1, top + 1):
            rows.append((n, mpx.output_photon_probability(replace(base, n_bins=n))))
        _write_csv(f"{out}.csv", ["n_bins", "p_out"], rows)
        best = mpx.optimal_bin_count(base, top)
        _write_json(
            f"{out}.json",
            {
                "optimal_n_bins": best,
                "p_out_at_optimum": mpx.output_photon_probability(replace(base, n_bins=best)),
                "p_out_single_bin": mpx.output_photon_probability(replace(base, n_bins=1)),
            },
        )

    _run(ctx, go)


def _read_spectrum_csv(path) -> SpectralIntensity:
    grid, vals = [], []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["wavelength_nm", "intensity"]:
            raise ConfigError(f"spectrum CSV {path} must start with 'wavelength_nm,intensity'")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            a, b = line.split(",")[:2]
            grid.append(float(a))
            vals.append(float(b))
    return SpectralIntensity(tuple(grid), tuple(vals))


@main.command()
@click.option("--input-spectrum", type=click.Path(), default=None, help="CSV spectrum.")
@click.option("--output-spectrum", type=click.Path(), default=None, help="CSV spectrum.")
@click.pass_context
def fidelity(ctx, input_spectrum, output_spectrum):
    """Classical spectral fidelity between input and retrieved spectra.

    Without file arguments, evaluates the configured signal against the
    simulated memory output at optimal delay (the interaction leaves the
    spectrum undistorted there, so this reports the quadrature baseline).
    """

    def go(cfg: Config, out):
        if input_spectrum:
            s_in = _read_spectrum_csv(input_spectrum)
        else:
            sig = cfg["signal"]
            center, fwhm = sig["wavelength_nm"], sig["bandwidth_fwhm_nm"]
            grid = np.linspace(center - 5 * fwhm, center + 5 * fwhm, 501)
            s_in = gaussian_spectrum(center, fwhm, grid)
        s_out = _read_spectrum_csv(output_spectrum) if output_spectrum else s_in
        f = analysis.spectral_fidelity(s_in, s_out)
        _write_csv(
            f"{out}.csv",
            ["wavelength_nm", "intensity_in", "intensity_out"],
            list(zip(s_in.grid_nm, s_in.values, s_out.values))
            if len(s_in.grid_nm) == len(s_out.grid_nm)
            else [],
        )
        _write_json(f"{out}.json", {"fidelity": f, "one_minus_fidelity": 1.0 - f})

    _run(ctx, go)


if __name__ == "__main__":
    main()
