"""Command line entry point: ``nlpi <subcommand>``.

Exit codes: 0 success, 1 certificate infeasible, 2 run error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

from .config import list_presets, load_config, scenario_from_config
from .experiments import certificate_for, reproduce, run_config, sweep
from .gains import nussbaum_scan, parse_gain

log = logging.getLogger("nlpi")

EXIT_OK, EXIT_INFEASIBLE, EXIT_ERROR = 0, 1, 2


def _kv(d: dict, prefix: str = "") -> list[str]:
    lines = []
    for k, v in d.items():
        if isinstance(v, dict):
            lines.extend(_kv(v, f"{prefix}{k}."))
        elif isinstance(v, float):
            lines.append(f"{prefix}{k}={v:.17g}")
        else:
            lines.append(f"{prefix}{k}={v}")
    return lines


def _manifest_lines(m) -> list[str]:
    o = m.outcome
    return [
        f"scenario={m.scenario}",
        f"config_hash={m.config_hash}",
        f"verdict={o['verdict']}",
        f"reason={o['reason']}",
        f"tail_max={o['tail_max']}",
        f"sup_abs_y={o['sup_abs_y']:.17g}",
        f"accepted={m.accepted}",
        f"dt_used={m.dt_used}",
        f"backend={m.backend}",
        f"csv={m.csv}",
    ] + ([f"svg={m.svg}"] if m.svg else [])


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    m, _ = run_config(cfg, args.out_dir, svg=args.svg, dt=args.dt, t_end=args.t_end)
    print("\n".join(_manifest_lines(m)))
    return EXIT_OK


def cmd_certify(args) -> int:
    s = scenario_from_config(load_config(args.config))
    report = certificate_for(s)
    if report is None:
        print("error=certificate needs a nonlinear PI controller on a perturbed plant", file=sys.stderr)
        return EXIT_ERROR
    print(f"scenario={s.name}")
    print("\n".join(_kv(report.as_dict())))
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_reproduce(args) -> int:
    manifests, _ = reproduce(args.figure, args.out_dir, svg=args.svg, dt=args.dt, t_end=args.t_end)
    for m in manifests:
        print("\n".join(_manifest_lines(m)))
        if m.certificate:
            for key in ("cond_i", "cond_ii", "cond_ii_slack", "cond_iii", "c_selected", "feasible"):
                print(f"certificate.{key}={m.certificate.get(key)}")
        print()
    return EXIT_OK


def cmd_sweep(args) -> int:
    grid_cfg = load_config(args.grid_config)
    rows = sweep(grid_cfg, args.out_dir, seed=args.seed, workers=args.workers, dt=args.dt, t_end=args.t_end)
    errors = sum(1 for r in rows if r["error"])
    certified = [r for r in rows if r["certified"] is True]
    bad = [r for r in certified if r["verdict"] not in ("", "converged")]
    print(f"cells={len(rows)}")
    print(f"certified={len(certified)}")
    print(f"certified_not_converged={len(bad)}")
    print(f"cell_errors={errors}")
    return EXIT_OK


def cmd_scan(args) -> int:
    g = parse_gain(args.gain)
    r = nussbaum_scan(g, args.zmax, args.samples, threshold=args.threshold, bound=args.bound)
    for key in ("z_max", "samples", "sup_avg", "inf_avg", "sup_int", "inf_int", "relaxed_property", "verdict"):
        v = getattr(r, key)
        print(f"{key}={v:.17g}" if isinstance(v, float) else f"{key}={v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nlpi", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def run_flags(sp, svg_default=False):
        sp.add_argument("--out-dir", default="out")
        sp.add_argument("--svg", action=argparse.BooleanOptionalAction, default=svg_default)
        sp.add_argument("--dt", type=float)
        sp.add_argument("--t-end", type=float)

    sp = sub.add_parser("simulate", help="run one scenario file or preset")
    sp.add_argument("config", help=f"path or preset ({', '.join(list_presets())})")
    run_flags(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("certify", help="check the sufficient conditions for a scenario")
    sp.add_argument("config")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("reproduce", help="rerun the fig1 / fig2 scenario groups")
    sp.add_argument("figure", choices=("fig1", "fig2"))
    run_flags(sp, svg_default=True)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("sweep", help="grid over epsilon / lambda / gain")
    sp.add_argument("grid_config")
    sp.add_argument("--out-dir", default="out")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--t-end", type=float)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("nussbaum-scan", help="finite-horizon Nussbaum property scan")
    sp.add_argument("gain", help="built-in id or poly:c0,c1,...:cos|sin")
    sp.add_argument("--zmax", type=float, default=200 * math.pi)
    sp.add_argument("--samples", type=int, default=20000)
    sp.add_argument("--threshold", type=float, default=10.0)
    sp.add_argument("--bound", type=float, default=5.0)
    sp.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, TypeError, KeyError, ArithmeticError) as exc:
        log.debug("run failed", exc_info=True)
        print(f"error={type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
