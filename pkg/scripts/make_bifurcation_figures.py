#!/usr/bin/env python3
"""Trace the classical figure set and render it as SVG.

Produces a bifurcation diagram for a family of eta values (the eta = 0
branch dashed), plus entropy / potential / free-energy diagrams, into
the figures/ directory.  Heavier ranges can be requested with --wide.
"""

import argparse
from pathlib import Path

from gravistat.branch import trace_branch
from gravistat.diagrams import DiagramStyle, emit_diagram
from gravistat.models import make_model
from gravistat.shooting import IntegratorConfig


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--out-dir", type=Path, default=Path("figures"))
    parser.add_argument("--points", type=int, default=400)
    parser.add_argument("--wide", action="store_true",
                        help="sweep rho0 up to 1e8 instead of 1e5")
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    rho0_max = 1e8 if args.wide else 1e5
    cfg = IntegratorConfig(dense_samples=800)
    etas = [0.0, 0.05, 0.03, 0.01, 0.002, 0.001, 0.0005]
    branches = []
    for eta in etas:
        model = make_model("mb") if eta == 0.0 else make_model("sfd", eta)
        print(f"tracing {model.label()} ...")
        branches.append(trace_branch(model, 1e-3, rho0_max, args.points, cfg))

    figures = [
        ("bifurcation.svg", DiagramStyle(quantity="sup_density")),
        ("entropy.svg", DiagramStyle(quantity="entropy", log100_ordinate=True)),
        ("potential.svg", DiagramStyle(quantity="potential", log100_ordinate=True)),
        ("free_energy.svg", DiagramStyle(quantity="free_energy")),
    ]
    for name, style in figures:
        path = args.out_dir / name
        path.write_text(emit_diagram(branches, style))
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
