"""Command-line front end.

Subcommands: exact, approx, bounds, stability, simulate, compare, sweep.

Parameters come either from ``--gamma/--alpha/--beta`` or from a JSON
config holding exactly one of

    {"nondimensional": {"gamma": .., "alpha": .., "beta": ..}}
    {"dimensional": {"m_kg": .., "R_m": .., "r_m": .., "k_N_m_s": ..,
                     "a_m": .., "b_m": .., "omega_rad_s": ..}}

plus optional run settings (``initial``, ``seed_branch``, ``tau_end``,
``step``, ``stride``, ``window``, ``out``, ``report``, ``axis1``, ``axis2``,
``workers``). Run-setting flags override config values; giving
parameter flags together with a config is an error.

Exit status: 0 on success, 2 on invalid input, 1 when the analysis itself
fails (for instance when no rotating solution exists).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import exact, perturb, sim, stability
from .errors import HulaHoopError, InvalidParameter
from .formats import params_dict, to_jsonable, write_json, write_regime_csv, write_trajectory_csv
from .model import DimensionalParams, Params, State, nondimensionalize

DIMENSIONAL_FIELDS = {
    "m_kg": "m",
    "R_m": "R",
    "r_m": "r",
    "k_N_m_s": "k",
    "a_m": "a",
    "b_m": "b",
    "omega_rad_s": "omega",
}
NONDIMENSIONAL_FIELDS = ("gamma", "alpha", "beta")
RUN_FIELDS = {
    "initial", "seed_branch", "tau_end", "step", "stride", "window", "out", "report",
    "axis1", "axis2", "workers", "tolerance",
}


class ConfigError(InvalidParameter):
    pass


# ------------------------------------------------------------------ config


def _number(block, key, where):
    if key not in block:
        raise ConfigError(f"{where}.{key}", "missing")
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}.{key}", "must be finite")
    return float(value)


def _check_keys(block, allowed, where):
    extra = sorted(set(block) - set(allowed))
    if extra:
        raise ConfigError(f"{where}.{extra[0]}", "unknown field")


def params_from_config(cfg: dict) -> Params:
    has_dim = "dimensional" in cfg
    has_nondim = "nondimensional" in cfg
    if has_dim == has_nondim:
        raise ConfigError("config", "give exactly one of 'dimensional' or 'nondimensional'")
    if has_nondim:
        block = cfg["nondimensional"]
        if not isinstance(block, dict):
            raise ConfigError("nondimensional", "must be an object")
        _check_keys(block, NONDIMENSIONAL_FIELDS, "nondimensional")
        return Params(*(_number(block, k, "nondimensional") for k in NONDIMENSIONAL_FIELDS))
    block = cfg["dimensional"]
    if not isinstance(block, dict):
        raise ConfigError("dimensional", "must be an object")
    _check_keys(block, DIMENSIONAL_FIELDS, "dimensional")
    values = {attr: _number(block, key, "dimensional") for key, attr in DIMENSIONAL_FIELDS.items()}
    try:
        return nondimensionalize(DimensionalParams(**values))
    except InvalidParameter as exc:
        key = next(k for k, a in DIMENSIONAL_FIELDS.items() if a == exc.field)
        raise ConfigError(f"dimensional.{key}", str(exc).split(": ", 1)[1]) from exc


def load_config(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON in {path}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be an object")
    _check_keys(cfg, RUN_FIELDS | {"dimensional", "nondimensional"}, "config")
    return cfg


def _writable(path, field):
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigError(field, f"cannot write to {path}")
    return Path(path)


class Settings:
    """Merged view of flags and config for one invocation."""

    def __init__(self, args):
        self.args = args
        self.cfg = load_config(args.config) if getattr(args, "config", None) else {}
        flags = [getattr(args, k, None) for k in NONDIMENSIONAL_FIELDS]
        if self.cfg:
            if any(v is not None for v in flags):
                raise ConfigError("config", "use either --config or --gamma/--alpha/--beta, not both")
            self.params = params_from_config(self.cfg)
        else:
            self.params = self._params_from_flags(args)

    def _params_from_flags(self, args):
        gamma = args.gamma
        alpha = args.alpha
        beta = args.beta
        if gamma is None:
            raise ConfigError("gamma", "required (or pass --config)")
        if alpha is None:
            raise ConfigError("alpha", "required (or pass --config)")
        if beta is None:
            if args.command != "exact":
                raise ConfigError("beta", "required (or pass --config)")
            beta = alpha
        for name, v in (("gamma", gamma), ("alpha", alpha), ("beta", beta)):
            if not math.isfinite(v):
                raise ConfigError(name, "must be finite")
        return Params(gamma, alpha, beta)

    def get(self, name, default=None):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return flag
        return self.cfg.get(name, default)

    def number(self, name, default, positive=True):
        value = self.get(name, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(name, f"expected a finite number, got {value!r}")
        if positive and value <= 0:
            raise ConfigError(name, "must be positive")
        return value

    def integer(self, name, default):
        value = self.get(name, default)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(name, f"expected a positive integer, got {value!r}")
        return value

    def path(self, name):
        value = self.get(name)
        return None if value is None else _writable(value, name)


# ------------------------------------------------------------------ commands


def _branch_record(b: exact.ExactBranch, gamma, alpha):
    spectrum = exact.exact_stability(gamma, alpha, b.psi)
    contact = exact.exact_contact_ok(alpha, b.psi)
    return {
        "psi": b.psi,
        "eigenvalues": list(spectrum.eigenvalues),
        "verdict": spectrum.verdict,
        "contact_margin": contact.margin,
        "contact_ok": contact.ok,
    }


def cmd_exact(s: Settings):
    p = s.params
    phases = exact.exact_phases(p.gamma, p.alpha)
    out = {
        "gamma": p.gamma,
        "alpha": p.alpha,
        "stable": _branch_record(phases.stable, p.gamma, p.alpha),
        "unstable": _branch_record(phases.unstable, p.gamma, p.alpha),
    }
    if p.beta != p.alpha:
        out["note"] = "excitation is not circular; exact rotations use alpha only"
    return out


def cmd_approx(s: Settings):
    p = s.params
    sol = perturb.first_order_solution(p.gamma, p.eps, p.mu)
    return {
        **params_dict(p),
        "phi0": sol.phi0,
        "C": sol.C,
        "D": sol.D,
        "eps_max_stability": perturb.stability_bound_eps(p.gamma, p.mu),
        "eps_max_contact": perturb.contact_bound_eps(p.gamma, p.mu),
    }


def _small_amp_record(rho, p):
    try:
        sol = perturb.small_amp_solution(rho, p.gamma, p.eps, p.mu)
    except HulaHoopError as exc:
        return {"exists": False, "reason": str(exc)}
    check = perturb.small_amp_contact_bound(rho, p.gamma, p.eps, p.mu)
    return {"exists": True, "phi0": sol.phi0, "bound": check.bound, "value": check.value, "contact_ok": check.ok}


def cmd_bounds(s: Settings):
    p = s.params
    out = {**params_dict(p)}
    try:
        stab = perturb.stability_bound_eps(p.gamma, p.mu)
        cont = perturb.contact_bound_eps(p.gamma, p.mu)
        out["moderate"] = {
            "eps_max_stability": stab,
            "stability_ok": p.eps < stab,
            "eps_max_contact": cont,
            "contact_ok": p.eps < cont,
        }
    except HulaHoopError as exc:
        out["moderate"] = {"exists": False, "reason": str(exc)}
    out["small_cw"] = _small_amp_record(1, p)
    out["small_ccw"] = _small_amp_record(-1, p)
    moderate = out["moderate"]
    out["can_twirl_cw"] = bool(moderate.get("stability_ok") and moderate.get("contact_ok"))
    out["can_twirl_ccw"] = bool(out["small_ccw"].get("exists") and out["small_ccw"].get("contact_ok"))
    return out


def cmd_stability(s: Settings):
    p = s.params
    step = s.number("step", stability.DEFAULT_STEP)
    hill = stability.assemble_hill(p.gamma, p.mu, p.eps)
    report = stability.floquet_classify(stability.monodromy(hill, step), p.gamma)
    out = {
        **params_dict(p),
        "p": hill.p,
        "multipliers": list(report.multipliers),
        "determinant": report.determinant,
        "liouville": math.exp(-p.gamma * stability.PERIOD),
        "verdict": report.verdict,
        "eps_max_analytic": perturb.stability_bound_eps(p.gamma, p.mu),
    }
    if s.args.critical:
        tol = s.number("tolerance", 1e-3)
        out["eps_critical_numeric"] = stability.numeric_eps_critical(
            p.gamma, p.mu, tol, step, upper=s.args.upper
        )
    return out


def _initial_state(s: Settings, p: Params) -> State:
    phi0 = s.args.phi0
    phi_dot = s.args.phi_dot
    initial = s.cfg.get("initial")
    if initial is not None:
        if not isinstance(initial, dict):
            raise ConfigError("initial", "must be an object")
        _check_keys(initial, ("phi_rad", "phi_dot"), "initial")
        if phi0 is None:
            phi0 = _number(initial, "phi_rad", "initial")
        if phi_dot is None:
            phi_dot = _number(initial, "phi_dot", "initial")
    if phi0 is not None or phi_dot is not None:
        if phi0 is None or phi_dot is None:
            raise ConfigError("initial", "give both the angle and its rate")
        return State(phi0, phi_dot)
    cw, ccw = sim.seed_states(p)
    return ccw if _seed_branch(s) == "ccw" else cw


def _seed_branch(s: Settings):
    branch = s.get("seed_branch", "cw")
    if branch not in ("cw", "ccw"):
        raise ConfigError("seed_branch", f"expected 'cw' or 'ccw', got {branch!r}")
    return branch


def _run(s: Settings, p: Params, s0: State):
    tau_end = s.number("tau_end", 1000.0)
    step = s.number("step", sim.DEFAULT_STEP)
    stride = s.integer("stride", 10)
    return sim.integrate(p, s0, tau_end, step, stride)


def cmd_simulate(s: Settings):
    p = s.params
    out_path = s.path("out")
    report_path = s.path("report")
    if report_path is None and out_path is not None:
        report_path = _writable(out_path.with_suffix(".capture.json"), "report")
    window = s.number("window", sim.DEFAULT_WINDOW)
    traj = _run(s, p, _initial_state(s, p))
    report = sim.detect_capture(traj, window).to_dict()
    if out_path is not None:
        write_trajectory_csv(traj, out_path)
    if report_path is not None:
        write_json(report, report_path)
    return report


def _analytic_branch(s: Settings, p: Params):
    kind = s.args.model
    direction = _seed_branch(s)
    if direction == "ccw":
        if kind not in ("auto", "small-amp"):
            raise ConfigError("model", "counter-rotation only has the small-amplitude form")
        return perturb.small_amp_solution(-1, p.gamma, p.eps, p.mu)
    if kind == "auto":
        kind = "exact" if p.eps == 0 else "first-order"
    if kind == "exact":
        return exact.exact_phases(p.gamma, p.alpha).stable
    if kind == "first-order":
        return perturb.first_order_solution(p.gamma, p.eps, p.mu)
    return perturb.small_amp_solution(1, p.gamma, p.eps, p.mu)


def cmd_compare(s: Settings):
    p = s.params
    out_path = s.path("out")
    window = s.number("window", sim.DEFAULT_WINDOW)
    branch = _analytic_branch(s, p)
    if s.args.phi0 is not None or s.args.phi_dot is not None or "initial" in s.cfg:
        s0 = _initial_state(s, p)
    else:
        start = sim.analytic_state(branch, 0.0)
        s0 = State(float(start.phi), float(start.phi_dot))
    traj = _run(s, p, s0)
    if out_path is not None:
        write_trajectory_csv(traj, out_path)
    metrics = sim.compare_to_analytic(traj, branch, window=window)
    return {
        **params_dict(p),
        "branch": type(branch).__name__,
        "rho": branch.rho,
        "phi0": getattr(branch, "phi0", getattr(branch, "psi", None)),
        **metrics.to_dict(),
    }


def _axis(s: Settings, name, required):
    text = s.get(name)
    if text is None:
        if required:
            raise ConfigError(name, "required, as name:start:stop:count")
        return None
    try:
        return sim.Axis.parse(text)
    except InvalidParameter as exc:
        raise ConfigError(name, str(exc).split(": ", 1)[1]) from exc


def cmd_sweep(s: Settings):
    axis1 = _axis(s, "axis1", True)
    axis2 = _axis(s, "axis2", False)
    protocol = sim.SweepProtocol(
        tau_end=s.number("tau_end", sim.SweepProtocol.tau_end),
        step=s.number("step", sim.DEFAULT_STEP),
        stride=s.integer("stride", sim.SweepProtocol.stride),
        window=s.number("window", sim.DEFAULT_WINDOW),
        workers=s.integer("workers", 1),
    )
    out_path = s.path("out")
    regime = sim.sweep(s.params, axis1, axis2, protocol)
    if out_path is not None:
        write_regime_csv(regime, out_path)
    return {
        "axis1": axis1.name,
        "axis2": axis2.name if axis2 else None,
        "cells": [
            {"axis1": v1, "axis2": v2, "verdict": c.verdict, "psi_cw": c.psi_cw,
             "psi_ccw": c.psi_ccw, "contact_loss_tau": c.contact_loss_tau, "error": c.error}
            for v1, v2, c in regime.rows()
        ],
    }


COMMANDS = {
    "exact": cmd_exact,
    "approx": cmd_approx,
    "bounds": cmd_bounds,
    "stability": cmd_stability,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
    "sweep": cmd_sweep,
}


# ------------------------------------------------------------------ output


def _flatten(data, prefix=""):
    if isinstance(data, dict):
        for k, v in data.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else k)
    elif isinstance(data, list):
        for i, v in enumerate(data):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, data


def format_human(data) -> str:
    """One ``key: value`` line per leaf, floats to six decimals."""
    lines = []
    for key, value in _flatten(to_jsonable(data)):
        if isinstance(value, float):
            text = f"{value:.6f}"
        elif value is None:
            text = "-"
        else:
            text = str(value)
        lines.append(f"{key}: {text}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hulahoop", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--gamma", type=float)
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--config", help="JSON parameter/run file")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        return sp

    add("exact", "uniform rotations under circular excitation")
    add("approx", "first-order rotation for an elliptic path")
    add("bounds", "stability and contact limits on the ellipticity")
    sp = add("stability", "Floquet classification of the rotation")
    sp.add_argument("--step", type=float)
    sp.add_argument("--critical", action="store_true", help="also bisect for the critical eps")
    sp.add_argument("--tolerance", type=float)
    sp.add_argument("--upper", type=float, help="upper end of the bisection bracket")

    for name, help_text in (("simulate", "integrate one trajectory"),
                            ("compare", "simulate and score an analytic rotation")):
        sp = add(name, help_text)
        sp.add_argument("--tau-end", dest="tau_end", type=float)
        sp.add_argument("--step", type=float)
        sp.add_argument("--stride", type=int)
        sp.add_argument("--window", type=float)
        sp.add_argument("--phi0", type=float)
        sp.add_argument("--phi-dot", dest="phi_dot", type=float)
        sp.add_argument("--seed-branch", dest="seed_branch", choices=("cw", "ccw"))
        sp.add_argument("--out", help="trajectory CSV")
        if name == "simulate":
            sp.add_argument("--report", help="capture report JSON")
        else:
            sp.add_argument("--model", choices=("auto", "exact", "first-order", "small-amp"),
                            default="auto")

    sp = add("sweep", "regime map over one or two parameters")
    sp.add_argument("--axis1", help="name:start:stop:count")
    sp.add_argument("--axis2", help="name:start:stop:count")
    sp.add_argument("--tau-end", dest="tau_end", type=float)
    sp.add_argument("--step", type=float)
    sp.add_argument("--stride", type=int)
    sp.add_argument("--window", type=float)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--out", help="regime map CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = Settings(args)
        result = COMMANDS[args.command](settings)
    except InvalidParameter as exc:
        print(f"hulahoop {args.command}: error: invalid {exc}", file=sys.stderr)
        return 2
    except (HulaHoopError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(to_jsonable(result), indent=2))
    else:
        print(format_human(result))
    return 0


if __name__ == "__main__":
    sys.exit(main())
