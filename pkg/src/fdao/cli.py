"""``fdao`` command line: fit, simulate, ingest.

Exit codes: 0 ok, 2 input error, 3 domain error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import config as cfg
from . import ingest
from .analysis import DEFAULT_ALPHA, FdaoReport, analyze
from .models import Dataset, DomainError, get_model
from .montecarlo import ExperimentRow, plan_from_kv, run_experiment
from .prng import SeedSource, derive_seed
from .simplex import SimplexConfig
from .stats import StatsError

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN = 0, 2, 3

REPORT_COLUMNS = ("param", "median", "ci_lo", "ci_hi", "range_lo", "range_hi",
                  "Sk", "Kr", "upsilon", "m_kept", "dropped")
EXPERIMENT_COLUMNS = ("plan", "param", "simulated", "predicted", "ci_lo", "ci_hi",
                      "range_lo", "range_hi", "loops", "Sk", "Kr")


class InputError(ValueError):
    pass


def fmt(v) -> str:
    """6 significant digits; NA for missing or non-finite values."""
    if v is None:
        return "NA"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    return f"{v:.6g}" if math.isfinite(v) else "NA"


def full(v) -> str:
    v = float(v)
    return repr(v) if math.isfinite(v) else "NA"


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    family: str
    data_path: Path | None
    theta_init: tuple[float, ...]
    delta_init: float
    epsilon_stop: float
    loop_cap: int
    alpha: float
    seed: int
    out: Path
    config_hash: str

    def simplex(self) -> SimplexConfig:
        spec = get_model(self.family)
        return SimplexConfig(spec.params(self.theta_init), self.delta_init,
                             self.epsilon_stop, self.loop_cap)


def load_fit_config(args) -> RunConfig:
    kv = cfg.read_kv(args.config) if args.config else {}
    family = kv.get("family") or kv.get("model")
    if family is None:
        raise cfg.ConfigError("missing required key 'family'")
    try:
        spec = get_model(family)
    except ValueError as exc:
        raise cfg.ConfigError(str(exc)) from None
    data = args.data or kv.get("data")
    if data is None:
        raise cfg.ConfigError("no data file: pass --data or set key 'data'")
    seed_opt = args.seed if args.seed is not None else (
        cfg.get_int(kv, "seed") if "seed" in kv else None)
    alpha = args.alpha if args.alpha is not None else cfg.get_float(kv, "alpha", DEFAULT_ALPHA)
    rc = RunConfig(
        "fit", family, Path(data), cfg.get_params(kv, "theta_init", spec.names),
        cfg.get_float(kv, "delta_init", 0.1), cfg.get_float(kv, "epsilon_stop", 1e-8),
        cfg.get_int(kv, "loop_cap", 1_024_000), alpha,
        SeedSource.from_option(seed_opt).resolve(), Path(args.out), cfg.config_hash(kv),
    )
    try:
        rc.simplex()
    except ValueError as exc:
        raise cfg.ConfigError(str(exc)) from None
    if not 0 < rc.alpha < 1:
        raise cfg.ConfigError(f"alpha must be in (0, 1), got {rc.alpha}")
    return rc


def read_dataset(path) -> Dataset:
    """CSV with header ``x,y``; errors name the offending row (header is row 1)."""
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header[:2]] != ["x", "y"]:
            raise InputError(f"{path}: row 1: header must be 'x,y'")
        xs, ys = [], []
        for row_no, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise InputError(f"{path}: row {row_no}: expected 2 fields, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise InputError(f"{path}: row {row_no}: non-numeric value in {row}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InputError(f"{path}: row {row_no}: non-finite value in {row}")
            xs.append(x)
            ys.append(y)
    if not xs:
        raise InputError(f"{path}: no data rows")
    return Dataset(np.array(xs), np.array(ys))


def _header(fh, subcommand: str, chash: str, seeds) -> None:
    fh.write(f"# subcommand: {subcommand}\n# config_hash: {chash}\n")
    for label, seed in seeds:
        fh.write(f"# seed{label}: {seed}\n")


def write_report(path: Path, report: FdaoReport, rc: RunConfig) -> None:
    with path.open("w") as fh:
        _header(fh, "fit", rc.config_hash, [("", rc.seed)])
        fh.write(f"# family: {report.family}\n# stop_reason: {report.stop_reason}\n")
        fh.write(f"# loops: {report.loops}\n# sr: {fmt(report.sr)}\n")
        fh.write("\t".join(REPORT_COLUMNS) + "\n")
        for p in report.params:
            cells = (p.name, p.median, *p.ci95, *p.range, p.sk, p.kr, p.upsilon, p.m_kept, p.dropped)
            fh.write("\t".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n")


def write_gamma_dumps(out: Path, report: FdaoReport, data: Dataset) -> None:
    delta = report.fit.residuals
    for g in report.gamma:
        with (out / f"dgamma_{g.name}.csv").open("w") as fh:
            fh.write("i,x_i,delta_i,omega_ji,dgamma_ji,kept_flag\n")
            for i in range(data.m):
                fh.write(f"{i + 1},{full(data.x[i])},{full(delta[i])},{full(g.omega[i])},"
                         f"{full(g.dgamma[i])},{int(g.kept_mask[i])}\n")


def write_summary(path: Path, report: FdaoReport, rc: RunConfig) -> None:
    def num(v):
        return v if v is not None and math.isfinite(v) else None

    doc = {
        "subcommand": "fit", "config_hash": rc.config_hash, "seed": rc.seed,
        "family": report.family, "stop_reason": report.stop_reason, "loops": report.loops,
        "sr": report.sr, "alpha": report.alpha, "flagged": report.flagged,
        "params": [{
            "name": p.name, "theta_opt": p.theta_opt, "median": p.median,
            "hl_point": p.hl_point, "ci95": list(p.ci95), "ci95_dgamma": list(p.ci95_dgamma),
            "range": list(p.range), "sk": num(p.sk), "kr": num(p.kr), "upsilon": p.upsilon,
            "m_kept": p.m_kept, "dropped": p.dropped, "hl_method": p.hl_method,
        } for p in report.params],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")


def cmd_fit(args) -> int:
    rc = load_fit_config(args)
    data = read_dataset(rc.data_path)
    spec = get_model(rc.family)
    report = analyze(spec, data, rc.simplex(), alpha=rc.alpha, seed=rc.seed)
    rc.out.mkdir(parents=True, exist_ok=True)
    write_report(rc.out / "report.tsv", report, rc)
    write_gamma_dumps(rc.out, report, data)
    write_summary(rc.out / "summary.json", report, rc)
    print(f"seed={rc.seed} stop_reason={report.stop_reason} loops={report.loops}")
    if report.flagged:
        print(f"upsilon above alpha={rc.alpha} for: {', '.join(report.flagged)}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    plans, hashes = [], []
    for path in args.plan:
        kv = cfg.read_kv(path)
        plans.append(plan_from_kv(kv))
        hashes.append(cfg.config_hash(kv))
    base = SeedSource.from_option(args.seed).resolve() if args.seed is not None else None
    resolved = []
    for i, plan in enumerate(plans):
        if base is not None:
            seed = base if len(plans) == 1 else derive_seed(base, i + 1)
        elif plan.seed is not None:
            seed = plan.seed
        else:
            seed = SeedSource.from_option(None).resolve()
        if args.alpha is not None:
            plan = replace(plan, alpha=args.alpha)
        resolved.append(replace(plan, seed=seed))
    with ThreadPoolExecutor() as pool:
        rows: list[ExperimentRow] = list(pool.map(run_experiment, resolved))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    chash = hashes[0] if len(hashes) == 1 else cfg.config_hash(dict(enumerate(hashes)))
    with (out / "experiment.tsv").open("w") as fh:
        _header(fh, "simulate", chash,
                [("" if len(rows) == 1 else f"[{i + 1}]", row.seed) for i, row in enumerate(rows)])
        for i, row in enumerate(rows, 1):
            fh.write(f"# plan {i}: {args.plan[i - 1]} family={row.family} noise={row.noise} "
                     f"r={row.replicates} stop_reason={row.stop_reason}\n")
        fh.write("\t".join(EXPERIMENT_COLUMNS) + "\n")
        for i, row in enumerate(rows, 1):
            for p in row.params:
                cells = (i, p.name, p.simulated, p.predicted, *p.ci95, *p.range, row.loops, p.sk, p.kr)
                fh.write("\t".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n")
    for i, row in enumerate(rows, 1):
        print(f"plan {i}: seed={row.seed} stop_reason={row.stop_reason} loops={row.loops}")
    return EXIT_OK


def _conc_label(c: float) -> str:
    return f"{c:g}"


def cmd_ingest(args) -> int:
    if not args.blanks or not args.live:
        raise InputError("ingest needs --blanks and --live")
    treated_files: dict[float, Path] = {}
    if args.manifest:
        treated_files.update(ingest.read_manifest(args.manifest))
    for spec in args.treated or []:
        c, f = ingest.parse_treated(spec)
        treated_files[c] = f
    if not treated_files:
        raise InputError("ingest needs --treated conc=file or --manifest")
    sets = ingest.AbsorbanceSets(
        ingest.read_absorbance(args.blanks), ingest.read_absorbance(args.live),
        {c: ingest.read_absorbance(f) for c, f in treated_files.items()},
    )
    samples = ingest.process(sets)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def dump(path: Path, rows) -> None:
        with path.open("w") as fh:
            fh.write("x,y\n")
            for c, ys in rows:
                for y in ys:
                    fh.write(f"{full(c)},{full(y)}\n")

    dump(out / "dataset.csv", [(s.concentration, s.y_values) for s in samples])
    for s in samples:
        dump(out / f"dataset_{_conc_label(s.concentration)}.csv", [(s.concentration, s.y_values)])
    with (out / "counts.tsv").open("w") as fh:
        fh.write("# subcommand: ingest\n")
        fh.write(f"# nb: {sets.blanks.size}\n# nd: {sets.live.size}\n")
        fh.write("concentration\tnf\traw\tkept\tdropped\n")
        for s in samples:
            fh.write(f"{fmt(s.concentration)}\t{sets.treated[s.concentration].size}\t"
                     f"{s.raw}\t{s.kept}\t{s.dropped_nonfinite}\n")
    for s in samples:
        print(f"conc={_conc_label(s.concentration)} raw={s.raw} kept={s.kept} dropped={s.dropped_nonfinite}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdao", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    f = sub.add_parser("fit", help="fit a dataset and report per-parameter uncertainty")
    f.add_argument("--config", required=True, help="key = value run config")
    f.add_argument("--data", help="CSV with header x,y (overrides config key 'data')")
    f.add_argument("--seed", type=int, help="seed for Walsh subsampling; OS entropy if absent")
    f.add_argument("--alpha", type=float, help="upsilon flag threshold")
    f.add_argument("--out", default=".", help="output directory")
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("simulate", help="run synthetic experiment plans")
    s.add_argument("--plan", action="append", required=True, help="plan file; repeatable")
    s.add_argument("--seed", type=int, help="overrides plan seeds (derived per plan if several)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--out", default=".")
    s.add_argument("--config", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_simulate)

    g = sub.add_parser("ingest", help="absorbance CSVs -> percent-death dataset")
    g.add_argument("--blanks")
    g.add_argument("--live")
    g.add_argument("--treated", action="append", metavar="CONC=FILE")
    g.add_argument("--manifest", help="CSV of concentration,file")
    g.add_argument("--out", default=".")
    g.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, StatsError) as exc:
        print(f"fdao {args.subcommand}: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"fdao {args.subcommand}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
