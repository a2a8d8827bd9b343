"""Run the synthetic table experiments and write one TSV per table.

    python scripts/reproduce_tables.py --out tables/ [--seed 42] [--quick]

Entries are statistical reproductions: the noise stream differs from any
other implementation, so compare within tolerances, not digit by digit.
"""
import argparse
import time
from pathlib import Path

from fdao.cli import fmt
from fdao.models import BOLTZMANN2, HILL4
from fdao.montecarlo import BOLTZMANN_GRID, HILL_GRID, ExperimentPlan, Noise, run_experiment
from fdao.prng import derive_seed
from fdao.simplex import SimplexConfig

TABLES = {
    "hill_cauchy": (HILL4, (-5.0, 100.0, 0.1, 2.0), (-10.0, 100.0, 0.1, 2.0), 0.1, Noise("cauchy", 1 / 50), HILL_GRID),
    "hill_cauchy_steep": (HILL4, (5.0, 100.0, 0.01, 15.0), (10.0, 100.0, 0.1, 2.0), 0.1, Noise("cauchy", 1 / 50), HILL_GRID),
    "hill_gauss": (HILL4, (-5.0, 100.0, 0.1, 2.0), (-10.0, 100.0, 0.1, 2.0), 0.1, Noise("gaussian", 0.05), HILL_GRID),
    "boltzmann_gauss": (BOLTZMANN2, (-40.0, 10.0), (-20.0, 1.0), 0.5, Noise("gaussian", 0.05), BOLTZMANN_GRID),
    "boltzmann_cauchy": (BOLTZMANN2, (-40.0, 10.0), (-60.0, 20.0), 0.5, Noise("cauchy", 2 / 50), BOLTZMANN_GRID),
}
COLUMNS = ("r", "param", "simulated", "predicted", "ci_lo", "ci_hi", "range_lo", "range_hi", "loops", "Sk", "Kr", "upsilon")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="tables")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--quick", action="store_true", help="r in {10, 100} only")
    args = ap.parse_args()
    reps = (10, 100) if args.quick else (10, 100, 1000, 2000)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for t, (name, (spec, true, init, delta, noise, grid)) in enumerate(TABLES.items()):
        lines = ["\t".join(COLUMNS)]
        for r in reps:
            seed = derive_seed(args.seed, 100 * t + r)
            plan = ExperimentPlan(spec.family, spec.params(true), noise, grid, r,
                                  SimplexConfig(spec.params(init), delta_init=delta), seed)
            t0 = time.perf_counter()
            row = run_experiment(plan)
            for p in row.params:
                cells = (r, p.name, p.simulated, p.predicted, *p.ci95, *p.range, row.loops, p.sk, p.kr, p.upsilon)
                lines.append("\t".join(c if isinstance(c, str) else fmt(c) for c in cells))
            print(f"{name} r={r} seed={seed} {row.stop_reason} loops={row.loops} "
                  f"{time.perf_counter() - t0:.1f}s")
        (out / f"{name}.tsv").write_text(f"# seed: {args.seed}\n" + "\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
