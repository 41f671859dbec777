"""``spectral-gap-lab`` command-line entry point."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (CONVENTIONS, constants_row, ese_sum_upper, flm_quotient_bounds,
                     gap_bounds, lb_bounds, melas_lower, robin_bounds, ubnbc_upper)
from .config import (ProblemConfig, load_config, oracle_spectrum, prepare, solve_levels,
                     study_from_levels)
from .errors import ConfigError, NotApplicable, SpectralLabError
from .verify import run_checks, weyl_ratio_table, write_csv, write_report

log = logging.getLogger("spectral_gap_lab")

COMMANDS = ("spectrum", "bounds", "verify", "converge", "weyl")
EXIT_OK, EXIT_STRICT, EXIT_ERROR = 0, 1, 2


def _spectrum_rows(spectrum) -> list[dict]:
    lam = np.asarray(spectrum.eigenvalues)
    res = np.asarray(spectrum.residual_norms)
    conv = getattr(spectrum, "converged", np.ones(len(lam), dtype=bool))
    clusters = getattr(spectrum, "cluster_ids", np.arange(len(lam)))
    return [{"index": i + 1, "eigenvalue": float(lam[i]), "residual": float(res[i]),
             "cluster": int(clusters[i]), "converged": bool(conv[i])} for i in range(len(lam))]


def cmd_spectrum(cfg: ProblemConfig, out: Path) -> list[Path]:
    setup = prepare(cfg)
    if cfg.mode == "oracle":
        return [write_csv(out / "spectrum_oracle.csv", _spectrum_rows(oracle_spectrum(cfg)))]
    levels = solve_levels(setup)
    paths = [write_csv(out / f"spectrum_n{lv.n}.csv", _spectrum_rows(lv.spectrum))
             for lv in levels]
    study = study_from_levels(levels)
    if study is not None:
        rows = [{"index": r["index"], "eigenvalue": r["limit"], "uncertainty": r["uncertainty"],
                 "order": r["order"]} for r in study.rows()]
        paths.append(write_csv(out / "spectrum_extrapolated.csv", rows))
    return paths


def _catalog_rows(setup, k_max, conventions) -> list[dict]:
    ctx = setup.context()
    rows = []
    for conv in conventions:
        for k in range(1, k_max + 1):
            inp = setup.bound_inputs(k, conv)
            values = [ubnbc_upper(inp), ese_sum_upper(inp), *lb_bounds(inp), melas_lower(inp)]
            values += gap_bounds(inp, robin=ctx.robin_family == "robin+")
            if ctx.constant_field:
                values += gap_bounds(inp, constant_field=True,
                                     robin=ctx.robin_family == "robin+")
            if ctx.bc == "robin":
                try:
                    values += robin_bounds(inp, ctx.sigma_sign)
                except NotApplicable:
                    pass
            for bv in values:
                rows.append({"identifier": bv.identifier, "convention": conv, "k": k,
                             "side": bv.side, "value": bv.value})
            if inp.d >= 2:
                b1, b2 = flm_quotient_bounds(inp)
                for name, v in (("eq:FLM1", b1), ("eq:FLM2", b2)):
                    rows.append({"identifier": name, "convention": conv, "k": k,
                                 "side": "upper-for-quotient", "value": v})
    rows.sort(key=lambda r: (r["identifier"], CONVENTIONS.index(r["convention"]), r["k"]))
    return rows


def cmd_bounds(cfg: ProblemConfig, out: Path) -> list[Path]:
    setup = prepare(cfg)
    const_rows = [constants_row(setup.bound_inputs(k, conv))
                  for conv in cfg.conventions for k in range(1, cfg.k_max + 1)]
    return [write_csv(out / "bounds_constants.csv", const_rows),
            write_csv(out / "bounds_catalog.csv",
                      _catalog_rows(setup, cfg.k_max, cfg.conventions))]


def _spectrum_and_study(cfg, setup):
    if cfg.mode == "oracle":
        return oracle_spectrum(cfg), None
    levels = solve_levels(setup)
    return levels[-1].spectrum, study_from_levels(levels)


def cmd_verify(cfg: ProblemConfig, out: Path):
    setup = prepare(cfg)
    spectrum, study = _spectrum_and_study(cfg, setup)
    report = run_checks(spectrum, setup.bound_inputs(), cfg.k_max, setup.context(),
                        study=study, conventions=cfg.conventions, force=cfg.force_bounds,
                        tolerance=cfg.solver.tolerance, problem=setup.describe())
    return list(write_report(report, out)), report


def cmd_converge(cfg: ProblemConfig, out: Path) -> list[Path]:
    if len(cfg.grid_sizes) < 3:
        raise ConfigError("grid_sizes", "a convergence study needs at least three grid sizes")
    setup = prepare(cfg)
    study = study_from_levels(solve_levels(setup))
    return [write_csv(out / "convergence.csv", study.rows())]


def cmd_weyl(cfg: ProblemConfig, out: Path) -> list[Path]:
    setup = prepare(cfg)
    spectrum, study = _spectrum_and_study(cfg, setup)
    lam = study.limits if study is not None else spectrum.eigenvalues
    rows = []
    for conv in cfg.conventions:
        rows += weyl_ratio_table(lam, setup.bound_inputs(1, conv), cfg.k_max)
    return [write_csv(out / "weyl_ratios.csv", rows)]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spectral-gap-lab",
                                description="Eigenvalue bounds laboratory for magnetic "
                                            "Schrodinger operators on bounded domains.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="YAML problem file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 when an assertion-grade check fails")
    p.add_argument("--convention", choices=("surface", "ball", "both"),
                   help="override the sphere convention selection")
    p.add_argument("--oracle", action="store_true",
                   help="use the analytic spectrum instead of solving")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.convention:
            cfg = replace(cfg, conventions=CONVENTIONS if args.convention == "both"
                          else (args.convention,))
        if args.oracle:
            cfg = replace(cfg, mode="oracle")
        out = Path(args.out) if args.out else cfg.output_dir
        status = EXIT_OK
        if args.command == "verify":
            paths, report = cmd_verify(cfg, out)
            summary = report.summary
            print(f"checks: {summary['total']}  " + "  ".join(
                f"{k}: {v}" for k, v in summary["counts"].items()))
            for key, k in summary["first_failing_k"].items():
                print(f"first failure {key} at k={k}")
            if args.strict and summary["assertion_grade_failures"]:
                status = EXIT_STRICT
        else:
            paths = {"spectrum": cmd_spectrum, "bounds": cmd_bounds,
                     "converge": cmd_converge, "weyl": cmd_weyl}[args.command](cfg, out)
        for path in paths:
            print(f"wrote {path}")
        return status
    except (SpectralLabError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
