"""Command-line entry point.

    exnarrow validate CONFIG
    exnarrow monomer-analytic CONFIG
    exnarrow aggregate CONFIG
    exnarrow markovian CONFIG
    exnarrow narrowing CONFIG
    exnarrow strong-coupling CONFIG

Exit codes: 0 success, 2 configuration error, 3 convergence error,
4 resource error.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .analysis import monomer_fwhm, narrowing_sweep, peak_stats, strong_coupling_compare
from .analytic import MonomerSeriesParams, analytic_monomer_correlation, analytic_monomer_spectrum
from .config import RunConfig, load_config
from .errors import ConfigurationError, ConvergenceError, ExnarrowError, ResourceError
from .model import AggregateSpec, LorentzianBath, MarkovianBath
from .pipeline import aggregate_spectrum, bath_record
from .propagate import CorrelationTrace
from .spectra import Spectrum, frequency_grid, transform

log = logging.getLogger("exnarrow")

EXIT_OK, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_RESOURCE = 0, 2, 3, 4


def bath_tag(bath) -> str:
    if isinstance(bath, MarkovianBath):
        return f"markovian_GammaM{io.tag(bath.rate)}"
    return f"lorentzian_X{io.tag(bath.huang_rhys)}_gamma{io.tag(bath.width)}_Omega{io.tag(bath.center_frequency)}"


def point_tag(agg: AggregateSpec, bath) -> str:
    return f"{bath_tag(bath)}_N{agg.n_monomers}_V{io.tag(agg.coupling)}_eps{io.tag(agg.site_energy)}"


def _aggregates(cfg: RunConfig):
    boundary = None if cfg.boundary == "auto" else cfg.boundary
    for n, v in itertools.product(cfg.n_monomers, cfg.couplings):
        yield AggregateSpec(n, cfg.site_energy, v, boundary)


def _stats_row(agg: AggregateSpec, st) -> tuple:
    n = agg.n_monomers
    return (n, agg.coupling, st.fwhm, st.fwhm * n, st.mean, st.variance, st.area, st.peak_position, st.peak_height)


def _stats_dict(st) -> dict:
    return dict(peak_position=st.peak_position, peak_height=st.peak_height, fwhm=st.fwhm, mean=st.mean,
                variance=st.variance, std_dev=st.std_dev, area=st.area)


def _write_spectrum(cfg: RunConfig, stem: str, spec: Spectrum, record: dict, config: dict) -> list[Path]:
    out = Path(cfg.directory)
    written = []
    if "csv" in cfg.formats:
        written.append(io.write_csv(out / f"{stem}.csv", io.SPECTRUM_COLUMNS,
                                    zip(spec.frequencies, spec.values), config))
    if "json" in cfg.formats:
        written.append(io.write_json(out / f"{stem}.json",
                                     dict(record, provenance=spec.provenance), config))
    return written


def _write_trace(cfg: RunConfig, stem: str, trace: CorrelationTrace, config: dict) -> Path:
    c = trace.samples
    return io.write_csv(Path(cfg.directory) / f"{stem}.csv", io.TRACE_COLUMNS,
                        zip(trace.times, c.real, c.imag), config)


def run_monomer_analytic(cfg: RunConfig) -> list[Path]:
    """Analytic monomer spectra for every configured (X, gamma) pair."""
    if cfg.bath_kind != "lorentzian":
        raise ConfigurationError("monomer-analytic needs bath = lorentzian")
    config = cfg.resolved()
    written = []
    eps = cfg.site_energy
    half = cfg.numerics.nu_halfwidth
    for x, g in itertools.product(cfg.huang_rhys, cfg.widths):
        bath = LorentzianBath(x, g, cfg.center_frequency)
        stem = f"monomer_analytic_{bath_tag(bath)}_eps{io.tag(eps)}"
        if x == 0:
            # no coupling: a delta line at eps, shown as the transform of a
            # pure phase truncated at t_max (width ~ 1/t_max)
            t_max = cfg.numerics.t_max or 200.0 / cfg.center_frequency
            dt = 0.01 / cfg.center_frequency
            t = dt * np.arange(int(round(t_max / dt)) + 1)
            trace = CorrelationTrace(dt, analytic_monomer_correlation(bath, eps, t), False, {"t_end": t[-1]})
            spec = transform(trace, eps - half, eps + half, cfg.numerics.dnu or 0.01, allow_truncated=True)
            record = {"kind": "delta-line limit", "t_max": float(t[-1])}
        else:
            p = MonomerSeriesParams.from_bath(bath)
            dnu = cfg.numerics.dnu or p.gamma_tilde / 20
            nu = frequency_grid(eps - half, eps + half, dnu)
            values = analytic_monomer_spectrum(bath, eps, nu, cfg.series_tol)
            spec = Spectrum(nu, values, {"bath": bath_record(bath), "site_energy": eps, "dnu": dnu,
                                         "series_tol": cfg.series_tol})
            record = {"kind": "analytic series", "gamma_tilde": p.gamma_tilde, "omega_tilde": p.omega_tilde,
                      "theta": p.theta, "phase": p.phase}
        record["stats"] = _stats_dict(peak_stats(spec))
        written += _write_spectrum(cfg, stem, spec, record, config)
    return written


def _aggregate_job(args):
    agg, bath, opts = args
    spec, trace = aggregate_spectrum(agg, bath, opts)
    return spec, trace


def _map(cfg: RunConfig, fn, jobs):
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def run_aggregate(cfg: RunConfig) -> list[Path]:
    """Full pipeline for every (N, V): spectra, traces (optional) and one stats table."""
    config = cfg.resolved()
    bath = cfg.bath()
    aggs = list(_aggregates(cfg))
    results = _map(cfg, _aggregate_job, [(a, bath, cfg.numerics) for a in aggs])
    written, rows = [], []
    for agg, (spec, trace) in zip(aggs, results):
        st = peak_stats(spec)
        rows.append(_stats_row(agg, st))
        stem = point_tag(agg, bath)
        written += _write_spectrum(cfg, f"spectrum_{stem}", spec, {"stats": _stats_dict(st)}, config)
        if cfg.dump_traces:
            written.append(_write_trace(cfg, f"trace_{stem}", trace, config))
    if "csv" in cfg.formats:
        written.append(io.write_csv(Path(cfg.directory) / f"stats_{bath_tag(bath)}_eps{io.tag(cfg.site_energy)}.csv",
                                    io.STATS_COLUMNS, rows, config))
    return written


def run_markovian(cfg: RunConfig) -> list[Path]:
    if cfg.bath_kind != "markovian":
        raise ConfigurationError("the markovian command needs bath = markovian and markovian_rate")
    return run_aggregate(cfg)


def run_narrowing(cfg: RunConfig) -> list[Path]:
    """FWHM-versus-V curves for every N, plus FWHM*N in monomer units."""
    config = cfg.resolved()
    bath = cfg.bath()
    curves = narrowing_sweep(cfg.n_monomers, cfg.couplings, bath, cfg.numerics, cfg.site_energy, cfg.workers)
    rows, record = [], {"monomer_fwhm": None, "curves": []}
    for n, curve in curves.items():
        record["monomer_fwhm"] = curve.monomer_fwhm
        for p in curve.points:
            rows.append((n, p.coupling, p.fwhm, p.fwhm_times_n, p.mean, p.variance, p.area,
                         p.peak_position, p.peak_height))
        record["curves"].append({
            "N": n,
            "V": curve.couplings,
            "fwhm": curve.fwhms,
            "fwhm_times_N_over_monomer": curve.saturation_ratio(),
            "max_quanta": [p.max_quanta for p in curve.points],
        })
    stem = f"narrowing_{bath_tag(bath)}_eps{io.tag(cfg.site_energy)}"
    written = []
    if "csv" in cfg.formats:
        written.append(io.write_csv(Path(cfg.directory) / f"{stem}.csv", io.STATS_COLUMNS, rows, config))
    if "json" in cfg.formats:
        written.append(io.write_json(Path(cfg.directory) / f"{stem}.json", record, config))
    return written


def run_strong_coupling(cfg: RunConfig) -> list[Path]:
    """Exact N-mer spectra against the shifted monomer line with X -> X/N."""
    if cfg.bath_kind != "lorentzian":
        raise ConfigurationError("strong-coupling needs bath = lorentzian")
    config = cfg.resolved()
    bath = cfg.bath()
    written, rows, reports = [], [], []
    for agg in _aggregates(cfg):
        rep = strong_coupling_compare(agg.n_monomers, agg.coupling, bath, cfg.numerics,
                                      cfg.site_energy, cfg.series_tol)
        rows.append((agg.n_monomers, agg.coupling, rep.deviation, rep.peak_height))
        reports.append({"N": agg.n_monomers, "V": agg.coupling, "deviation": rep.deviation,
                        "peak_height": rep.peak_height})
        if "csv" in cfg.formats:
            written.append(io.write_csv(
                Path(cfg.directory) / f"strong_coupling_spectrum_{point_tag(agg, bath)}.csv",
                ("nu", "A", "A_reference"), zip(rep.numeric.frequencies, rep.numeric.values, rep.reference), config))
    stem = f"strong_coupling_{bath_tag(bath)}_eps{io.tag(cfg.site_energy)}"
    if "csv" in cfg.formats:
        written.append(io.write_csv(Path(cfg.directory) / f"{stem}.csv", ("N", "V", "deviation", "peak_height"),
                                    rows, config))
    if "json" in cfg.formats:
        written.append(io.write_json(Path(cfg.directory) / f"{stem}.json", {"reports": reports}, config))
    return written


COMMANDS = {
    "monomer-analytic": run_monomer_analytic,
    "aggregate": run_aggregate,
    "markovian": run_markovian,
    "narrowing": run_narrowing,
    "strong-coupling": run_strong_coupling,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exnarrow", description="Exchange narrowing of exciton absorption spectra.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ["validate", *COMMANDS]:
        p = sub.add_parser(name)
        p.add_argument("config", help="INI-style run configuration")
        p.add_argument("--out", help="override [output] directory")
        p.add_argument("--workers", type=int, help="override [numerical] workers")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        if args.out:
            cfg = replace(cfg, directory=args.out)
        if args.workers:
            cfg = replace(cfg, workers=args.workers)
        if args.command == "validate":
            sys.stdout.write(io.dumps(cfg.resolved()))
            return EXIT_OK
        for path in COMMANDS[args.command](cfg):
            print(path)
        return EXIT_OK
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ExnarrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
