"""Command-line front end.

Every subcommand writes JSON (or CSV/markdown where asked) to stdout. Errors
become a JSON object {"error": {"type", "message"}} on stdout, a one-line
diagnostic on stderr, and one of the exit codes in EXIT_CODES.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .errors import DegenerateError, PolyroofError, RangeError, RankError, RayError, StructureError
from .geometry import LEAD_TOL, ROOT_TOL, bloch_of_density, bloch_of_omega, is_inf, root_profile
from .io import StateFormatError, as_density, dumps, read_state, state_to_dict
from .measures import eval_measure, get_measure
from .quantum import PureState, spectral_decompose_rank2

EXIT_CODES = {
    "input": 2,
    RankError: 3,
    StructureError: 4,
    DegenerateError: 5,
    RangeError: 6,
    RayError: 7,
    PolyroofError: 8,
}


@dataclass
class CommandConfig:
    subcommand: str
    inputs: list = field(default_factory=list)
    measure: Optional[str] = None
    options: dict = field(default_factory=dict)
    output: str = "json"


# ----------------------------------------------------------------- helpers

def _float_list(v) -> list:
    return [float(x) for x in np.asarray(v).ravel()]


def _omega_json(w):
    return "inf" if is_inf(w) else [float(w.real), float(w.imag)]


def _witness_json(members) -> list:
    return [{"weight": float(w), "state": state_to_dict(s)["amplitudes"]} for w, s in members]


def _load_density(path):
    return as_density(read_state(path))


def _scan(spec: str):
    try:
        a, b, n = spec.split(":")
        a, b, n = float(a), float(b), int(n)
    except ValueError:
        raise StateFormatError(f"--scan expects start:stop:count, got {spec!r}") from None
    if n < 1:
        raise StateFormatError("--scan count must be positive")
    return np.linspace(a, b, n)


# ----------------------------------------------------------------- subcommands

def cmd_roots(cfg: CommandConfig):
    m = get_measure(cfg.measure)
    rho = _load_density(cfg.inputs[0])
    profile = root_profile(
        m, spectral_decompose_rank2(rho), root_tol=cfg.options["root_tol"], lead_tol=cfg.options["lead_tol"]
    )
    return {
        "structure": profile.structure.value,
        "N": profile.normalization_N,
        "roots": [
            {"omega": _omega_json(w), "multiplicity": k, "bloch": _float_list(bloch_of_omega(w))}
            for w, k in profile.roots
        ],
    }


def cmd_entangle(cfg: CommandConfig):
    m = get_measure(cfg.measure)
    state = read_state(cfg.inputs[0])
    if not isinstance(state, PureState):
        if state.rank() != 1:
            raise RankError("entangle evaluates pure states; use 'roof' for mixed input")
        _, v = np.linalg.eigh(state.matrix)
        state = PureState.from_vector(v[:, -1])
    return {"measure": m.name, "value": eval_measure(m, state)}


def _oracle_kw(cfg):
    o = cfg.options
    return {"ensemble_size": o["ensemble_size"], "restarts": o["restarts"], "seed": o["seed"], "threads": o["threads"]}


def cmd_roof(cfg: CommandConfig):
    from .dispatch import roof_dispatch

    m = get_measure(cfg.measure)
    rho = _load_density(cfg.inputs[0])
    res = roof_dispatch(m, rho, method=cfg.options["method"], oracle_kw=_oracle_kw(cfg))
    out = {
        "measure": m.name,
        "method": res.method.value,
        "value": res.value,
        "exact": res.exact,
        "geometry": res.geometry.as_dict(),
    }
    if cfg.options.get("witness") and res.witness:
        out["witness"] = _witness_json(res.witness)
    return out


def cmd_oracle(cfg: CommandConfig):
    from .oracle import brute_force_roof

    m = get_measure(cfg.measure)
    rho = _load_density(cfg.inputs[0])
    value, ensemble, nfev = brute_force_roof(m, rho, **_oracle_kw(cfg))
    return {"measure": m.name, "value": value, "evaluations": nfev, "ensemble": _witness_json(ensemble.members)}


def cmd_classify(cfg: CommandConfig):
    from .atlas import reproduce_table, table_markdown

    reports, ok = reproduce_table(cfg.options["samples"], cfg.options["seed"], threads=cfg.options["threads"])
    if cfg.output == "markdown":
        return table_markdown(reports)
    return {
        "pass": ok,
        "cells": [
            {
                "family": r.family,
                "subclass": r.label,
                "traced_qubit": r.traced_qubit,
                "expected": r.expected,
                "observed": r.observed,
                "variants": r.votes,
            }
            for r in reports
        ],
    }


def cmd_ghzw(cfg: CommandConfig):
    from .ghzw import X_O, axis_envelope, ghzw_flat_f, ghzw_normalization, hull_tangent_point, x_of_p

    grid = cfg.options["grid"]
    N = ghzw_normalization()
    env = axis_envelope(N, X_O, grid)
    ps = _scan(cfg.options["scan"]) if cfg.options.get("scan") else np.array([cfg.options["p"]])
    if np.any(ps < 0) or np.any(ps > 1):
        raise StateFormatError("mixing probabilities must lie in [0, 1]")
    rows = []
    for p in ps:
        x = float(x_of_p(p))
        flat = float(N * ghzw_flat_f(x)) if x > 0 else 0.0
        rows.append((float(p), x, flat, env(x)))
    meta = {"x_of_p": "x = 2 p - 1 + x_O", "x_O": X_O, "N": N, "tangent_x": hull_tangent_point(grid), "grid": grid}
    if cfg.output == "csv":
        lines = [f"# polyroof {__version__}; x = 2p - 1 + x_O; x_O = {X_O:.17g}; N = {N:.17g}"]
        lines.append("p,x,flat_f,tangle_envelope")
        lines += [",".join(format(v, ".17g") for v in row) for row in rows]
        return "\n".join(lines)
    return {"metadata": meta, "rows": [dict(zip(("p", "x", "flat_f", "tangle_envelope"), r)) for r in rows]}


def cmd_iso_curves(cfg: CommandConfig):
    from .roof import iso_curve_sample

    m = get_measure(cfg.measure)
    rho = _load_density(cfg.inputs[0])
    profile = root_profile(m, spectral_decompose_rank2(rho))
    level = cfg.options["level"]
    if level is None:
        from .dispatch import roof_dispatch

        level = roof_dispatch(m, rho, profile=profile).value
    pts = iso_curve_sample(profile, m, level, cfg.options["count"])
    if cfg.output == "csv":
        return "\n".join(["x,y,z"] + [",".join(format(float(v), ".17g") for v in p) for p in pts])
    return {"level": level, "state_bloch": _float_list(bloch_of_density(profile.sphere, rho)), "points": [_float_list(p) for p in pts]}


COMMANDS = {
    "roots": cmd_roots,
    "entangle": cmd_entangle,
    "roof": cmd_roof,
    "oracle": cmd_oracle,
    "classify": cmd_classify,
    "ghzw": cmd_ghzw,
    "iso-curves": cmd_iso_curves,
}


# ----------------------------------------------------------------- argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyroof", description="Convex roofs of polynomial entanglement measures.")
    parser.add_argument("--version", action="version", version=f"polyroof {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, state=True, measure=True):
        if measure:
            p.add_argument("--measure", default="tangle", help="concurrence | tangle | sqrt-tangle (default tangle)")
        if state:
            p.add_argument("--state", required=True, help="state JSON file")
        p.add_argument("--json", action="store_true", help="JSON output (the default)")

    def oracle_opts(p):
        p.add_argument("--ensemble-size", type=int, default=4, help="decomposition size, 2..8 (default 4)")
        p.add_argument("--restarts", type=int, default=64, help="simplex restarts (default 64)")
        p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
        p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")

    p = sub.add_parser("roots", help="roots of the measure on the state's Bloch sphere")
    common(p)
    p.add_argument("--root-tol", type=float, default=ROOT_TOL, help=f"root merging tolerance (default {ROOT_TOL})")
    p.add_argument("--lead-tol", type=float, default=LEAD_TOL, help=f"snap-to-infinity tolerance (default {LEAD_TOL})")

    p = sub.add_parser("entangle", help="measure of a pure state")
    common(p)

    p = sub.add_parser("roof", help="convex roof of a rank <= 2 state")
    common(p)
    p.add_argument("--method", default="auto", choices=["auto", "one-root", "two-root", "ray", "ghzw", "oracle"])
    p.add_argument("--witness", action="store_true", help="include the optimal decomposition")
    oracle_opts(p)

    p = sub.add_parser("oracle", help="brute-force convex roof by multistart simplex search")
    common(p)
    oracle_opts(p)

    p = sub.add_parser("classify", help="reproduce the four-qubit marginal root table")
    common(p, state=False, measure=False)
    p.add_argument("--samples", type=int, default=5, help="draws per cell (default 5)")
    p.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--markdown", action="store_true", help="markdown table with a diff section")

    p = sub.add_parser("ghzw", help="tangle of GHZ/W mixtures along the symmetry axis")
    common(p, state=False, measure=False)
    p.add_argument("--p", type=float, default=0.75, help="GHZ weight when not scanning (default 0.75)")
    p.add_argument("--scan", help="start:stop:count over the GHZ weight p")
    p.add_argument("--grid", type=int, default=2000, help="envelope grid size (default 2000)")
    p.add_argument("--csv", action="store_true", help="CSV rows p,x,flat_f,tangle_envelope")

    p = sub.add_parser("iso-curves", help="points of equal measure on the Bloch sphere")
    common(p)
    p.add_argument("--level", type=float, default=None, help="measure level (default: roof value of the state)")
    p.add_argument("--count", type=int, default=64, help="meridians to sample (default 64)")
    p.add_argument("--csv", action="store_true", help="CSV x,y,z output")
    return parser


def config_from_args(ns: argparse.Namespace) -> CommandConfig:
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "state", "measure", "json", "csv", "markdown")}
    output = "json"
    if getattr(ns, "csv", False):
        output = "csv"
    if getattr(ns, "markdown", False):
        output = "markdown"
    inputs = [ns.state] if getattr(ns, "state", None) else []
    if "ensemble_size" in opts and not 2 <= opts["ensemble_size"] <= 8:
        raise StateFormatError("--ensemble-size must lie in 2..8")
    if "seed" in opts and not 0 <= opts["seed"] < 2**64:
        raise StateFormatError("--seed must be a 64-bit unsigned integer")
    return CommandConfig(ns.subcommand, inputs, getattr(ns, "measure", None), opts, output)


def _error_code(exc: BaseException) -> int:
    if isinstance(exc, (StateFormatError, OSError, KeyError, ValueError)) and not isinstance(exc, PolyroofError):
        return EXIT_CODES["input"]
    for cls, code in EXIT_CODES.items():
        if cls != "input" and isinstance(exc, cls):
            return code
    return 1


def run(cfg: CommandConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        out = COMMANDS[cfg.subcommand](cfg)
    except Exception as exc:  # mapped to exit codes below
        code = _error_code(exc)
        if code == 1:
            raise
        msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
        stdout.write(dumps({"error": {"type": type(exc).__name__, "message": msg}}) + "\n")
        print(f"polyroof {cfg.subcommand}: {msg}", file=sys.stderr)
        return code
    stdout.write((out if isinstance(out, str) else dumps(out)) + "\n")
    return 0


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except StateFormatError as exc:
        sys.stdout.write(dumps({"error": {"type": "StateFormatError", "message": str(exc)}}) + "\n")
        print(f"polyroof: {exc}", file=sys.stderr)
        return EXIT_CODES["input"]
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
