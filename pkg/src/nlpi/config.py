"""Scenario files (TOML) and the shipped presets.

A scenario file looks like::

    name = "fig2_sector"

    [plant]
    kind = "perturbed"          # or "unperturbed"
    f = "sector_sin2"           # "zero", {id="linear", alpha=1}, {id="sin2", a=3, c=3}
    b = 1.0
    epsilon = 0.1

    [controller]
    kind = "nonlinear_pi"       # or "nussbaum_gain"
    lambda = 2.5
    gain = "z2_sin_z"           # or {poly=[0, 0, 1], trig="sin"}

    [run]
    x0 = 4.0
    y0 = 4.0
    t_end = 20.0
    dt = 1e-3
    stride = 10
    monitors = ["s_monitor"]
"""

from __future__ import annotations

import copy
import hashlib
import json
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .control import ControllerConfig
from .gains import get_gain
from .plant import PlantConfig, get_nonlinearity
from .sim import Scenario

__all__ = [
    "config_hash",
    "list_presets",
    "load_config",
    "scenario_from_config",
]

RUN_KEYS = ("x0", "y0", "t_end", "dt", "stride", "guard", "monitors", "epsilon0")


def list_presets() -> list[str]:
    root = resources.files("nlpi") / "presets"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_config(ref) -> dict:
    """Read a scenario from a path, or from a preset when ``ref`` names one."""
    if isinstance(ref, dict):
        return copy.deepcopy(ref)
    path = Path(ref)
    if path.is_file():
        text = path.read_text()
    else:
        res = resources.files("nlpi") / "presets" / f"{ref}.toml"
        if not res.is_file():
            raise FileNotFoundError(f"no scenario file or preset named {ref!r}")
        text = res.read_text()
    return tomllib.loads(text)


def config_hash(cfg: dict) -> str:
    canonical = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def scenario_from_config(cfg: dict) -> Scenario:
    try:
        pc = cfg["plant"]
        cc = cfg["controller"]
    except KeyError as exc:
        raise ValueError(f"scenario is missing the [{exc.args[0]}] section") from None
    plant = PlantConfig(
        kind=pc.get("kind", "perturbed"),
        f=get_nonlinearity(pc.get("f", "zero")),
        b=float(pc["b"]),
        epsilon=float(pc.get("epsilon", 1.0)),
    )
    kind = cc["kind"]
    if kind == "nonlinear_pi":
        ctrl = ControllerConfig(kind, lam=float(cc["lambda"]), gain=get_gain(cc["gain"]))
    else:
        ctrl = ControllerConfig(kind, zeta0=float(cc.get("zeta0", 0.0)))
    run = cfg.get("run", {})
    unknown = set(run) - set(RUN_KEYS)
    if unknown:
        raise ValueError(f"unknown [run] keys: {sorted(unknown)}")
    kw = {k: run[k] for k in RUN_KEYS if k in run}
    if "monitors" in kw:
        kw["monitors"] = tuple(kw["monitors"])
    for k in ("x0", "y0", "t_end", "dt", "guard", "epsilon0"):
        if k in kw:
            kw[k] = float(kw[k])
    if "stride" in kw:
        kw["stride"] = int(kw["stride"])
    return Scenario(plant=plant, controller=ctrl, name=cfg.get("name", "scenario"), **kw)
