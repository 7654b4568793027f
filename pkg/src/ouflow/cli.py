"""Command-line interface.

Commands: sample-ou, transform, kernel, cov, field, ergodic, verify.
Options resolve in three layers: documented defaults, then a flat
key=value config file (--config), then explicit flags (flags win).
Unknown config keys are rejected.  Every run writes a JSON sidecar
``<out>.meta.json`` echoing the fully resolved configuration, including
the seed (which may come from the OUFLOW_SEED environment variable).
Outputs are deterministic given (config, seed): identical runs produce
identical bytes.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import csvio
from .covariance import cov_table
from .ergodic import Observable, flow_average, time_average
from .gaussian import RngStream, sample_field, sample_ou, sample_ou_circle
from .kernel import apply_fractional_kernel, decompose, phi_eval
from .paths import OuPath, TimeGrid
from .flow import FlowPlan, apply_flow
from .verify import DEFAULT_SEED, run_all

_ENV_SEED = "OUFLOW_SEED"


def _env_seed(fallback: int) -> int:
    raw = os.environ.get(_ENV_SEED)
    if raw is None:
        return fallback
    return int(raw)


def _read_config(path: str | None) -> dict:
    if path is None:
        return {}
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected KEY=VALUE")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _resolve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> dict:
    """Merge defaults, config file and explicit flags; flags win."""
    config = _read_config(getattr(args, "config", None))
    known = {a.dest for a in parser._actions if a.dest not in ("help",)}
    unknown = set(config) - known
    if unknown:
        raise SystemExit(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    explicit = getattr(args, "_explicit", set())
    for action in parser._actions:
        dest = action.dest
        if dest in ("help", "config"):
            continue
        if dest in explicit:
            resolved[dest] = getattr(args, dest)
        elif dest in config:
            typ = action.type or str
            resolved[dest] = typ(config[dest])
        else:
            resolved[dest] = getattr(args, dest)
    return resolved


class _TrackingParser(argparse.ArgumentParser):
    """Records which destinations were set explicitly on the command line."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def parse_args(self, argv=None, namespace=None):
        ns = super().parse_args(argv, namespace)
        explicit = set()
        argv = list(sys.argv[1:] if argv is None else argv)
        for action in self._actions:
            for opt in action.option_strings:
                if any(a == opt or a.startswith(opt + "=") for a in argv):
                    explicit.add(action.dest)
        ns._explicit = explicit
        return ns


def _add_common(p):
    p.add_argument("--config", help="flat KEY=VALUE config file; flags win")


def cmd_sample_ou(argv) -> int:
    p = _TrackingParser(prog="ouflow sample-ou",
                        description="Draw one exact stationary path to CSV.")
    _add_common(p)
    p.add_argument("--t-start", type=float, default=-50.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--n", type=int, default=2001)
    p.add_argument("--seed", type=int, default=_env_seed(DEFAULT_SEED))
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--out", required=True)
    cfg = _resolve(p.parse_args(argv), p)
    grid = TimeGrid(cfg["t_start"], cfg["dt"], cfg["n"])
    path = sample_ou(grid, RngStream(cfg["seed"], cfg["stream"]))
    csvio.write_ou_path(path, cfg["out"])
    csvio.write_sidecar(cfg["out"], {"command": "sample-ou", **cfg})
    return 0


def cmd_transform(argv) -> int:
    p = _TrackingParser(prog="ouflow transform",
                        description="Apply the flow to a stored path.")
    _add_common(p)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--method", choices=["spectral", "kernel"], default="spectral")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--eps-target", type=float, default=1e-8,
                   help="tail tolerance steering the margin policy")
    cfg = _resolve(p.parse_args(argv), p)
    w = csvio.read_ou_path(cfg["in_path"])
    sup = float(np.max(np.abs(w.values)))
    if cfg["method"] == "spectral":
        plan = FlowPlan.for_grid(w.grid)
        out = apply_flow(w, cfg["u"], plan)
        bounds = {"edge_effect_bound_at_distance_d": f"{sup:.6g} * exp(-d/2)"}
    else:
        out = apply_fractional_kernel(w, cfg["u"], eps_target=cfg["eps_target"])
        bounds = {}
    csvio.write_ou_path(out, cfg["out"])
    csvio.write_sidecar(cfg["out"], {
        "command": "transform", **cfg,
        "window": [out.grid.t_start, out.grid.t_end],
        **bounds,
        **(out.meta or {}),
    })
    return 0


def cmd_kernel(argv) -> int:
    p = _TrackingParser(prog="ouflow kernel",
                        description="Tabulate the kernel decomposition to CSV.")
    _add_common(p)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--x-min", type=float, default=-20.0)
    p.add_argument("--x-max", type=float, default=20.0)
    p.add_argument("--x-step", type=float, default=0.01)
    p.add_argument("--out", required=True)
    cfg = _resolve(p.parse_args(argv), p)
    if cfg["x_step"] <= 0 or cfg["x_max"] <= cfg["x_min"]:
        raise SystemExit("invalid x range")
    xs = np.arange(cfg["x_min"], cfg["x_max"] + cfg["x_step"] / 2, cfg["x_step"])
    xs = xs[xs != 0.0]
    dec = decompose(cfg["u"])
    csvio.write_kernel_table(cfg["out"], xs, dec.atom_coeff, dec.pv_coeff,
                             phi_eval(cfg["u"], xs))
    csvio.write_sidecar(cfg["out"], {"command": "kernel", **cfg,
                                     "atom_coeff": dec.atom_coeff,
                                     "pv_coeff": dec.pv_coeff})
    return 0


def cmd_cov(argv) -> int:
    p = _TrackingParser(prog="ouflow cov",
                        description="Tabulate the field covariance to CSV.")
    _add_common(p)
    p.add_argument("--dt-min", type=float, default=0.0)
    p.add_argument("--dt-max", type=float, default=2.0)
    p.add_argument("--dt-step", type=float, default=0.1)
    p.add_argument("--du-min", type=float, default=-2.0)
    p.add_argument("--du-max", type=float, default=2.0)
    p.add_argument("--du-step", type=float, default=0.1)
    p.add_argument("--abs-err", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    cfg = _resolve(p.parse_args(argv), p)
    if cfg["dt_step"] <= 0 or cfg["du_step"] <= 0:
        raise SystemExit("invalid step")
    if cfg["dt_max"] < cfg["dt_min"] or cfg["du_max"] < cfg["du_min"]:
        raise SystemExit("invalid range")
    dts = np.arange(cfg["dt_min"], cfg["dt_max"] + cfg["dt_step"] / 2, cfg["dt_step"])
    dus = np.arange(cfg["du_min"], cfg["du_max"] + cfg["du_step"] / 2, cfg["du_step"])
    tab = cov_table(dts, dus, abs_err=cfg["abs_err"])
    csvio.write_cov_table(cfg["out"], tab.d_t_grid, tab.d_u_grid, tab.values)
    csvio.write_sidecar(cfg["out"], {"command": "cov", **cfg})
    return 0


def cmd_field(argv) -> int:
    p = _TrackingParser(prog="ouflow field",
                        description="Draw one two-parameter field sample to CSV.")
    _add_common(p)
    p.add_argument("--u-grid", default="0,0.5,1", help="comma-separated parameters")
    p.add_argument("--t-start", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=0.25)
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--seed", type=int, default=_env_seed(DEFAULT_SEED))
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--jitter", type=float, default=1e-10)
    p.add_argument("--out", required=True)
    cfg = _resolve(p.parse_args(argv), p)
    u_grid = [float(x) for x in str(cfg["u_grid"]).split(",") if x.strip()]
    grid = TimeGrid(cfg["t_start"], cfg["dt"], cfg["n"])
    sample = sample_field(u_grid, grid, RngStream(cfg["seed"], cfg["stream"]),
                          jitter=cfg["jitter"])
    csvio.write_field_table(cfg["out"], sample)
    csvio.write_sidecar(cfg["out"], {"command": "field", **cfg})
    return 0


_OBSERVABLES = {
    "value_at_0": Observable.value_at_zero,
    "value_square_at_0": Observable.square_at_zero,
    "product_lag_1": lambda: Observable.product_lag(1.0),
}


def cmd_ergodic(argv) -> int:
    p = _TrackingParser(prog="ouflow ergodic",
                        description="Iterate or translation averages to JSON.")
    _add_common(p)
    p.add_argument("--u", type=float, default=0.7,
                   help="flow parameter; 0 selects translation averaging")
    p.add_argument("--n", type=int, default=4096,
                   help="iterate count (flow) or T_max (translation)")
    p.add_argument("--obs", choices=sorted(_OBSERVABLES), default="value_square_at_0")
    p.add_argument("--seed", type=int, default=_env_seed(DEFAULT_SEED))
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--dt", type=float, default=0.25)
    p.add_argument("--out", required=True)
    cfg = _resolve(p.parse_args(argv), p)
    obs = _OBSERVABLES[cfg["obs"]]()
    rng = RngStream(cfg["seed"], cfg["stream"])
    if cfg["u"] == 0.0:
        t_max = float(cfg["n"])
        reach = 2.0
        g = TimeGrid(0.0, cfg["dt"], int((t_max + reach) / cfg["dt"]) + 2)
        rep = time_average(sample_ou(g, rng), obs, t_max, cfg["dt"])
    else:
        n_nodes = 16384
        g = TimeGrid(-(n_nodes // 2) * cfg["dt"], cfg["dt"], n_nodes)
        w = OuPath(g, sample_ou_circle(n_nodes, cfg["dt"], rng))
        rep = flow_average(w, obs, cfg["u"], cfg["n"])
    dyadic = [int(2**k) - 1 for k in range(0, int(math.log2(len(rep.partial_averages))) + 1)]
    payload = {
        "params": {**rep.params, "seed": cfg["seed"], "stream": cfg["stream"],
                   "dt": cfg["dt"]},
        "partial_averages": {str(i + 1): rep.partial_averages[i] for i in dyadic},
        "final": rep.final,
        "std_err_estimate": rep.std_err_estimate,
    }
    Path(cfg["out"]).write_text(json.dumps(csvio._jsonable(payload), indent=2,
                                           sort_keys=True) + "\n")
    csvio.write_sidecar(cfg["out"], {"command": "ergodic", **cfg})
    return 0


def cmd_verify(argv) -> int:
    p = _TrackingParser(prog="ouflow verify",
                        description="Run every acceptance check; exit 0 iff all pass.")
    _add_common(p)
    p.add_argument("--seed", type=int, default=_env_seed(DEFAULT_SEED))
    p.add_argument("--tolerance-scale", type=float, default=1.0,
                   help="rescales every tolerance (0 forces failures)")
    p.add_argument("--out", default=None, help="write the JSON report here")
    cfg = _resolve(p.parse_args(argv), p)
    results, report = run_all(seed=cfg["seed"], tol_scale=cfg["tolerance_scale"],
                              log=print)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg["out"]:
        Path(cfg["out"]).write_text(text)
        csvio.write_sidecar(cfg["out"], {"command": "verify", **cfg})
    else:
        sys.stdout.write(text)
    return 0 if report["all_pass"] else 1


_COMMANDS = {
    "sample-ou": cmd_sample_ou,
    "transform": cmd_transform,
    "kernel": cmd_kernel,
    "cov": cmd_cov,
    "field": cmd_field,
    "ergodic": cmd_ergodic,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        names = ", ".join(sorted(_COMMANDS))
        print(f"usage: ouflow COMMAND [options]\ncommands: {names}")
        return 0 if argv else 2
    cmd = argv[0]
    if cmd not in _COMMANDS:
        print(f"unknown command {cmd!r}; choose from {sorted(_COMMANDS)}",
              file=sys.stderr)
        return 2
    return _COMMANDS[cmd](argv[1:])


if __name__ == "__main__":
    sys.exit(main())
