"""Scenario runs with manifests, figure reproduction and parameter sweeps."""

from __future__ import annotations

import copy
import csv
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .certify import CertificateReport, certify
from .config import config_hash, load_config, scenario_from_config
from .control import z_dot_bound_check
from .gains import nussbaum_scan
from .sim import Outcome, Scenario, detect_outcome, simulate, write_csv
from .svg import write_chart

__all__ = [
    "FIGURES",
    "RunManifest",
    "certificate_for",
    "reproduce",
    "run_config",
    "sweep",
]

FIGURES = {
    "fig1": (
        "fig1_pint_ng", "fig1_pint_npi", "fig1_pint_npin",
        "fig1_pls_ng", "fig1_pls_npi", "fig1_pls_npin",
    ),
    "fig2": ("fig2_sector",),
}

SWEEP_FIELDS = (
    "cell", "epsilon", "lambda", "gain", "cond_i", "cond_ii", "cond_ii_slack",
    "cond_iii", "certified", "verdict", "reason", "tail_max", "sup_abs_y", "error",
)


@dataclass
class RunManifest:
    scenario: str
    config_hash: str
    csv: str | None
    svg: str | None
    certificate: dict | None
    outcome: dict
    backend: str
    dt_used: float
    halving_error: float | None
    accepted: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(type(o).__name__)


def _apply_overrides(cfg: dict, dt=None, t_end=None) -> dict:
    cfg = copy.deepcopy(cfg)
    run = cfg.setdefault("run", {})
    if dt is not None:
        run["dt"] = float(dt)
    if t_end is not None:
        run["t_end"] = float(t_end)
    return cfg


_SCANS: dict = {}


def _scan(gain):
    # per-process cache; custom gains need one quadrature per scan point
    if gain.id not in _SCANS:
        _SCANS[gain.id] = nussbaum_scan(gain, 200 * math.pi, 20000)
    return _SCANS[gain.id]


def certificate_for(s: Scenario) -> CertificateReport | None:
    """Certificate for a nonlinear PI loop on a perturbed plant, else None."""
    if not (s.is_npi and s.plant.perturbed):
        return None
    f = s.plant.f
    return certify(
        s.plant.epsilon, s.controller.lam, f.alpha1, f.alpha2, s.controller.gain,
        s.epsilon0, scan=_scan(s.controller.gain),
    )


def _outcome_dict(o: Outcome) -> dict:
    d = asdict(o)
    if not math.isfinite(d["tail_max"]):
        d["tail_max"] = None
    return d


def run_config(cfg: dict, out_dir=None, svg: bool = False, dt=None, t_end=None, plot=None):
    """Simulate one scenario config; write CSV, manifest and optionally SVG.

    Returns ``(manifest, trajectory)``.
    """
    cfg = _apply_overrides(cfg, dt, t_end)
    s = scenario_from_config(cfg)
    tr = simulate(s)
    outcome = detect_outcome(tr)
    cert = certificate_for(s)
    cert_d = cert.as_dict() if cert is not None else None
    if "z_bound_monitor" in s.monitors:
        ok, checked = z_dot_bound_check(tr, s.controller, s.plant)
        cert_d = dict(cert_d or {}, z_dot_bound_ok=ok, z_dot_bound_crossings=len(checked))
    csv_path = svg_path = None
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / f"{s.name}.csv"
        write_csv(tr, csv_path)
        if svg:
            svg_path = out / f"{s.name}.svg"
            names = plot or (("x", "y", "u") if s.plant.perturbed else ("y", "u"))
            write_chart(
                svg_path,
                [(n, tr.t, getattr(tr, n)) for n in names],
                title=s.name,
                ylabel="value",
            )
    manifest = RunManifest(
        scenario=s.name,
        config_hash=config_hash(cfg),
        csv=str(csv_path) if csv_path else None,
        svg=str(svg_path) if svg_path else None,
        certificate=cert_d,
        outcome=_outcome_dict(outcome),
        backend=_backend.BACKEND,
        dt_used=tr.dt_used,
        halving_error=tr.halving_error,
        accepted=tr.accepted,
    )
    if out_dir is not None:
        (Path(out_dir) / f"{s.name}.manifest.json").write_text(manifest.to_json() + "\n")
    return manifest, tr


def reproduce(figure: str, out_dir="out", svg: bool = True, dt=None, t_end=None):
    """Run the preset group for ``fig1`` or ``fig2``; returns (manifests, trajectories)."""
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES)}")
    manifests, trajs = [], []
    for name in FIGURES[figure]:
        m, tr = run_config(load_config(name), out_dir, svg=False, dt=dt, t_end=t_end)
        manifests.append(m)
        trajs.append(tr)
    if svg and out_dir is not None:
        out = Path(out_dir)
        if figure == "fig1":
            for plant in ("pint", "pls"):
                series = [
                    (tr.scenario.name.split("_")[-1].upper(), tr.t, tr.y)
                    for tr in trajs
                    if f"_{plant}_" in tr.scenario.name
                ]
                path = out / f"fig1_{plant}_y.svg"
                write_chart(path, series, title=f"{plant.upper()}: y(t)", ylabel="y", ylim=(-20.0, 20.0))
                for m in manifests:
                    if f"_{plant}_" in m.scenario:
                        m.svg = str(path)
        else:
            tr = trajs[0]
            path = out / "fig2_sector.svg"
            write_chart(path, [("x", tr.t, tr.x), ("y", tr.t, tr.y), ("u", tr.t, tr.u)],
                        title="sector plant: x, y, u", ylabel="value")
            manifests[0].svg = str(path)
        for m in manifests:
            (out / f"{m.scenario}.manifest.json").write_text(m.to_json() + "\n")
    return manifests, trajs


def _grid_cells(grid_cfg: dict, base: dict, seed=None):
    grid = grid_cfg.get("grid", {})
    ctrl = base.get("controller", {})
    eps_vals = grid.get("epsilon", [base["plant"].get("epsilon", 1.0)])
    lam_vals = grid.get("lambda", [ctrl.get("lambda", 1.0)])
    gain_vals = grid.get("gain", [ctrl.get("gain")])
    if not grid and "random" not in grid_cfg:
        return []
    cells = list(itertools.product(eps_vals, lam_vals, gain_vals)) if grid else []
    rnd = grid_cfg.get("random")
    if rnd:
        rng = np.random.default_rng(seed if seed is not None else rnd.get("seed", 0))
        n = int(rnd.get("n", 0))
        lo_e, hi_e = rnd.get("epsilon", [eps_vals[0], eps_vals[0]])
        lo_l, hi_l = rnd.get("lambda", [lam_vals[0], lam_vals[0]])
        gains = rnd.get("gain", gain_vals)
        for _ in range(n):
            cells.append((
                float(rng.uniform(lo_e, hi_e)),
                float(rng.uniform(lo_l, hi_l)),
                gains[int(rng.integers(len(gains)))],
            ))
    return cells


def _sweep_cell(args):
    idx, base, eps, lam, gain, do_sim, dt, t_end = args
    row = {k: "" for k in SWEEP_FIELDS}
    row.update(cell=idx, epsilon=eps, **{"lambda": lam},
               gain=gain if isinstance(gain, str) else json.dumps(gain, sort_keys=True))
    try:
        cfg = _apply_overrides(base, dt, t_end)
        cfg["plant"]["epsilon"] = eps
        cfg["controller"]["lambda"] = lam
        cfg["controller"]["gain"] = gain
        cfg["run"]["monitors"] = []
        s = scenario_from_config(cfg)
        cert = certificate_for(s)
        if cert is not None:
            row.update(cond_i=cert.cond_i, cond_ii=cert.cond_ii, cond_ii_slack=cert.cond_ii_slack,
                       cond_iii=cert.cond_iii, certified=cert.feasible)
        if do_sim:
            o = detect_outcome(simulate(s))
            row.update(verdict=o.verdict, reason=o.reason or "", tail_max=o.tail_max, sup_abs_y=o.sup_abs_y)
    except Exception as exc:  # recorded per cell, never aborts the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep(grid_cfg: dict, out_dir=None, seed=None, workers=None, dt=None, t_end=None):
    """Run every grid cell; rows come back in grid order regardless of worker timing."""
    base = load_config(grid_cfg["base"]) if isinstance(grid_cfg.get("base"), str) else grid_cfg["base"]
    base = copy.deepcopy(base)
    base.setdefault("run", {})
    opts = grid_cfg.get("sweep", {})
    max_cells = int(opts.get("max_cells", 10_000))
    do_sim = bool(opts.get("simulate", True))
    workers = int(workers if workers is not None else opts.get("workers", 1))
    cells = _grid_cells(grid_cfg, base, seed)
    if len(cells) > max_cells:
        raise ValueError(f"grid has {len(cells)} cells, limit is {max_cells}")
    jobs = [(i, base, e, lam, g, do_sim, dt, t_end) for i, (e, lam, g) in enumerate(cells)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_cell, jobs))
    else:
        rows = [_sweep_cell(j) for j in jobs]
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{grid_cfg.get('name', 'sweep')}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=SWEEP_FIELDS, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _cell_str(v) for k, v in r.items()})
    return rows


def _cell_str(v):
    if isinstance(v, float):
        return "%.17g" % v
    return v
