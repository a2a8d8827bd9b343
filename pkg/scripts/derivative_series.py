"""Print the model partials along the dose or potential axis as TSV.

    python scripts/derivative_series.py hill4 > hill_partials.tsv
    python scripts/derivative_series.py boltzmann2 --theta -40 10
"""
import argparse
import sys

import numpy as np

from fdao.cli import fmt
from fdao.models import get_model

DEFAULTS = {"hill4": (0.0, 100.0, 0.1, 2.0), "boltzmann2": (-40.0, 10.0)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("family", choices=sorted(DEFAULTS))
    ap.add_argument("--theta", type=float, nargs="+")
    ap.add_argument("--points", type=int, default=41)
    args = ap.parse_args()
    spec = get_model(args.family)
    theta = np.array(args.theta or DEFAULTS[args.family])
    if theta.size != spec.arity:
        sys.exit(f"{args.family} takes {spec.arity} parameters {spec.names}")
    if args.family == "hill4":
        x = np.logspace(-4, 1, args.points)
    else:
        x = np.linspace(-100, 100, args.points)
    jac = spec.jacobian(x, theta)
    y = spec.curve(x, theta)
    print("\t".join((spec.x_label, "f", *(f"d_{n}" for n in spec.names))))
    for i in range(x.size):
        print("\t".join(fmt(v) for v in (x[i], y[i], *jac[:, i])))


if __name__ == "__main__":
    main()
