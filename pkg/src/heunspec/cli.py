"""Command-line front end.

Commands
--------
spectrum       perturbative levels ``E_m(p)`` with series coefficients and decay fits
qes            invariant-space census, algebraic eigenvalues, optional bottom matching
validate       the cross-validation suite (exit 1 when a check fails)
map            Inozemtsev data to Heun parameters, or back with ``--heun``
eigenfunction  truncated eigenfunction values (and optionally the eigen-residual)

Output is JSON ``{meta, inputs, results}`` or CSV.  A ``key = value`` config
file (TOML) given with ``--config`` supplies defaults; flags win.  Keys in a
``[command]`` table apply to that command only.

Exit codes: 0 success, 1 failed validation, 2 configuration error,
3 engine precondition or convergence failure.

CSV columns
-----------
spectrum       m, order, p, energy_pi2, energy, decay_ratio
qes            space, dim, hilbert, sector, rank, eigenvalue, imag
validate       name, criterion, passed, seconds
map            key, value
eigenfunction  m, x, f, ftilde, residual
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from functools import partial
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from ._parallel import ENV_VAR, ordered_map, worker_count
from .couplings import as_couplings, parse_number
from .elliptic import DEFAULT_TERMS, EllipticContext
from .errors import ConfigError, HeunError
from .heun_map import HeunParams, from_heun, invert_lambda, p_symbol, to_heun
from .perturbation import (decay_diagnostics, eigenfunction_eval, energy_map, expand_a,
                           expand_p_direct)
from .qes import TRIG_E, algebraic_eigen, census, match_bottom
from .validation import CHECKS, fd_eigen_residual, run_suite

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_ENGINE = 0, 1, 2, 3
PI2 = math.pi ** 2


# -- parser -------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file of defaults (flags override it)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-o", "--output", help="write to this file instead of stdout")
    common.add_argument("--float", dest="float_mode", action="store_true",
                        help="use floating-point couplings instead of exact rationals")
    common.add_argument("--terms", type=int, default=DEFAULT_TERMS,
                        help="q-series terms N for e1, e2, e3 (default %(default)s)")
    return common


def _model(sub: argparse.ArgumentParser, order: bool = True) -> None:
    sub.add_argument("--l", help="couplings l0,l1,l2,l3 (rationals as n/d)")
    sub.add_argument("--p", help="nome p")
    sub.add_argument("--a", help="modular parameter a (converted to p)")
    if order:
        sub.add_argument("--order", type=int, default=8, help="truncation order K")
        sub.add_argument("--engine", choices=("p", "a"), default="p",
                         help="direct p-expansion or a-expansion composed with a(p)")


def build_parser() -> Tuple[argparse.ArgumentParser, dict]:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="heunspec", description="Spectra of the BC1 Inozemtsev model and the Heun equation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    cmds = {}

    sp = subs.add_parser("spectrum", parents=[common], help="perturbative levels")
    _model(sp)
    sp.add_argument("--levels", type=int, default=4, help="number of levels m = 0..n-1")
    sp.add_argument("--C", dest="decay_C", type=float, help="constant C > 1 for the decay bound")
    cmds["spectrum"] = sp

    sp = subs.add_parser("qes", parents=[common], help="invariant spaces and algebraic eigenvalues")
    _model(sp)
    sp.add_argument("--trig", action="store_true", help="exact trigonometric limit (p = 0)")
    sp.add_argument("--match-bottom", action="store_true",
                    help="pair algebraic eigenvalues with perturbative levels")
    cmds["qes"] = sp

    sp = subs.add_parser("validate", parents=[common], help="run the cross-validation suite")
    sp.add_argument("--only", help=f"comma-separated subset of: {','.join(CHECKS)}")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--random-l", type=int, default=20,
                    help="random coupling sets for the engine check")
    cmds["validate"] = sp

    sp = subs.add_parser("map", parents=[common], help="Heun parameters and back")
    _model(sp, order=False)
    sp.add_argument("--energy", type=float, help="energy E (pi^2 included)")
    sp.add_argument("--heun", help="a,q,alpha,beta,gamma,delta,epsilon for the inverse map")
    cmds["map"] = sp

    sp = subs.add_parser("eigenfunction", parents=[common], help="truncated eigenfunction values")
    _model(sp)
    sp.add_argument("--m", type=int, default=0, help="level index")
    sp.add_argument("--x", default="0.27", help="comma-separated points in (0, 1/2)")
    sp.add_argument("--residual", action="store_true",
                    help="also report the finite-difference eigen-residual")
    cmds["eigenfunction"] = sp
    return parser, cmds


# -- config -------------------------------------------------------------------

def _config_value(v):
    if isinstance(v, bool):
        return v
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    return str(v)


def load_config(path: str, command: str, sub: argparse.ArgumentParser) -> dict:
    """Flat keys plus the ``[command]`` table, checked against the command's options."""
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from exc
    merged = {k: v for k, v in data.items() if not isinstance(v, dict)}
    merged.update(data.get(command, {}))
    dests = {a.dest: a for a in sub._actions}
    out = {}
    for key, value in merged.items():
        dest = key.replace("-", "_")
        if dest in ("config", "help") or dest not in dests:
            raise ConfigError(f"unknown config key {key!r} for command {command!r}")
        out[dest] = _config_value(value)
    return out


def parse(argv: Optional[List[str]] = None) -> argparse.Namespace:
    parser, cmds = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = load_config(args.config, args.command, cmds[args.command])
        cmds[args.command].set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


# -- shared plumbing ----------------------------------------------------------

def _couplings(args, nonnegative: bool = True):
    if not args.l:
        raise ConfigError("couplings --l l0,l1,l2,l3 are required")
    l = as_couplings(args.l, exact=not args.float_mode)
    if nonnegative and any(v < 0 for v in l.values):
        raise ConfigError(f"couplings must be non-negative for this command, got {args.l}")
    return l


def _nome(args, required: bool = True):
    """``(p, a_input)`` from exactly one of ``--p`` / ``--a``."""
    if args.p is not None and args.a is not None:
        raise ConfigError("give exactly one of --p and --a, not both")
    if args.p is None and args.a is None:
        if required:
            raise ConfigError("one of --p or --a is required")
        return None, None
    if args.p is not None:
        p = parse_number(args.p)
        if abs(p) >= 1:
            raise ConfigError("the nome must satisfy |p| < 1")
        return p, None
    a = float(parse_number(args.a))
    return (Fraction(0) if a == 0 else invert_lambda(a)), a


def _num(v):
    """Exact values as strings, floats as floats."""
    if isinstance(v, Fraction):
        return str(v)
    return v


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (tuple, set)):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _finite(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _inputs(args) -> dict:
    skip = {"config", "output", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# -- commands -----------------------------------------------------------------

def _level_series(m: int, l, K: int, engine: str):
    if engine == "a":
        return m, expand_a(m, l, K), None
    return m, None, expand_p_direct(m, l, K)


def cmd_spectrum(args):
    l = _couplings(args)
    p, a_in = _nome(args)
    if args.levels < 1 or args.order < 0:
        raise ConfigError("--levels must be >= 1 and --order >= 0")
    rows = ordered_map(partial(_level_series, l=l, K=args.order, engine=args.engine),
                       range(args.levels))
    levels, table = [], []
    for m, esa, esp in rows:
        es = energy_map(esa) if esa is not None else esp
        value = es(p)
        if esa is not None:
            q = float(a_in) if a_in is not None else float(EllipticContext(float(p), args.terms).a)
            decay = decay_diagnostics(esa, q, args.decay_C)
        else:
            decay = decay_diagnostics(es, float(p), args.decay_C)
        entry = {
            "m": m,
            "trig_eigenvalue_pi2": _num(es.trig_eigenvalue),
            "coefficients_pi2": [_num(c) for c in es.evals],
            "energy_pi2": float(value),
            "energy": float(value) * PI2,
            "decay": decay.as_dict(),
        }
        if isinstance(value, Fraction):
            entry["energy_pi2_exact"] = str(value)
        levels.append(entry)
        table.append([m, args.order, float(p), float(value), float(value) * PI2, decay.ratio])
    results = {"p": _num(p), "a": a_in, "engine": args.engine, "order": args.order,
               "pi2_units": True, "levels": levels}
    header = ["m", "order", "p", "energy_pi2", "energy", "decay_ratio"]
    return results, (header, table), EXIT_OK


def _space_eigen(space, e):
    return algebraic_eigen(space, e)


def cmd_qes(args):
    l = _couplings(args)
    if args.trig:
        if args.a is not None or (args.p is not None and parse_number(args.p) != 0):
            raise ConfigError("--trig fixes p = 0; drop --p/--a or set --p 0")
        p, e = Fraction(0), TRIG_E
    else:
        p, _ = _nome(args)
        e = EllipticContext(float(p), args.terms)
    spaces = census(l)
    eigs = ordered_map(partial(_space_eigen, e=e), spaces)
    out, table = [], []
    for space, pairs in zip(spaces, eigs):
        vals = []
        for r, pair in enumerate(pairs):
            if isinstance(pair.value, Fraction):
                vals.append({"value_pi2": str(pair.value), "value": float(pair.value) * PI2})
                table.append([space.alpha.label, space.dim, space.hilbert, space.sector, r,
                              float(pair.value) * PI2, 0.0])
            else:
                v = complex(pair.value)
                vals.append({"value": v.real, "imag": v.imag, "complex_pair": pair.complex_pair})
                table.append([space.alpha.label, space.dim, space.hilbert, space.sector, r,
                              v.real, v.imag])
        d = space.as_dict()
        d.update({"label": space.alpha.label, "sector": space.sector, "eigenvalues": vals})
        out.append(d)
    results = {"p": _num(p), "trig": bool(args.trig), "pi2_units": bool(args.trig),
               "spaces": out}
    if args.match_bottom:
        if args.trig or p == 0:
            raise ConfigError("--match-bottom needs p != 0")
        results["match_bottom"] = match_bottom(
            l, EllipticContext(float(p), args.terms), args.order, args.engine).as_dict()
    header = ["space", "dim", "hilbert", "sector", "rank", "eigenvalue", "imag"]
    return results, (header, table), EXIT_OK


def cmd_validate(args):
    only = [s for s in (args.only or "").split(",") if s]
    unknown = [s for s in only if s not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; available: {','.join(CHECKS)}")
    if args.random_l < 1:
        raise ConfigError("--random-l must be >= 1")
    checks = run_suite(only or None, seed=args.seed, random_l=args.random_l)
    passed = all(c.passed for c in checks)
    results = {"passed": passed, "checks": [c.as_dict() for c in checks]}
    table = [[c.name, c.criterion, c.passed, round(c.seconds, 4)] for c in checks]
    return results, (["name", "criterion", "passed", "seconds"], table), (
        EXIT_OK if passed else EXIT_FAILED)


def cmd_map(args):
    if args.heun:
        parts = [v for v in args.heun.split(",") if v.strip()]
        if len(parts) != 7:
            raise ConfigError("--heun needs a,q,alpha,beta,gamma,delta,epsilon")
        a, q = float(parse_number(parts[0])), float(parse_number(parts[1]))
        rest = [parse_number(v, exact=not args.float_mode) for v in parts[2:]]
        h = HeunParams(a, q, *rest)
        l, p, E = from_heun(h, args.terms)
        results = {"direction": "from_heun", "heun": h.as_dict(),
                   "couplings": [_num(v) for v in l.values], "p": p, "energy": E}
        table = [["l" + str(i), _num(v)] for i, v in enumerate(l.values)]
        table += [["p", p], ["energy", E]]
        return results, (["key", "value"], table), EXIT_OK
    l = _couplings(args, nonnegative=False)
    p, _ = _nome(args)
    if args.energy is None:
        raise ConfigError("--energy is required for the forward map")
    h = to_heun(l, EllipticContext(float(p), args.terms), args.energy)
    sym = {k: [_num(x) for x in v] for k, v in p_symbol(l).items()}
    results = {"direction": "to_heun", "heun": h.as_dict(),
               "fuchs_residual": _num(h.fuchs_residual), "p_symbol": sym}
    table = [[k, v] for k, v in h.as_dict().items()]
    return results, (["key", "value"], table), EXIT_OK


def cmd_eigenfunction(args):
    l = _couplings(args)
    p, _ = _nome(args)
    if p == 0:
        raise ConfigError("eigenfunctions are evaluated at p != 0 (use p small instead)")
    ctx = EllipticContext(float(p), args.terms)
    xs = [float(parse_number(v)) for v in args.x.split(",") if v.strip()]
    if args.engine == "a":
        es = expand_a(args.m, l, args.order)
        energy = float(energy_map(es)(float(p))) * PI2
    else:
        es = expand_p_direct(args.m, l, args.order)
        energy = float(es(float(p))) * PI2
    points, table = [], []
    for x in xs:
        ft, f = eigenfunction_eval(es, x, ctx)
        entry = {"x": x, "f": f, "ftilde": ft}
        if args.residual:
            entry["residual"] = fd_eigen_residual(es, energy, ctx, x)
        points.append(entry)
        table.append([args.m, x, f, ft, entry.get("residual")])
    results = {"m": args.m, "p": _num(p), "engine": args.engine, "order": args.order,
               "energy": energy, "points": points}
    return results, (["m", "x", "f", "ftilde", "residual"], table), EXIT_OK


COMMANDS = {"spectrum": cmd_spectrum, "qes": cmd_qes, "validate": cmd_validate,
            "map": cmd_map, "eigenfunction": cmd_eigenfunction}


# -- output -------------------------------------------------------------------

def render(args, results, table) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        header, rows = table
        writer.writerow(header)
        for row in rows:
            writer.writerow(["" if v is None else _num(v) for v in row])
        return buf.getvalue()
    doc = {
        "meta": {"schema_version": SCHEMA_VERSION, "program": "heunspec",
                 "version": __version__, "command": args.command,
                 "threads": worker_count()},
        "inputs": _inputs(args),
        "results": results,
    }
    return json.dumps(_finite(json.loads(json.dumps(doc, default=_jsonable))), indent=2) + "\n"


def _fail(msg: str, code: int) -> int:
    print(f"heunspec: error: {msg}", file=sys.stderr)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse(argv)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except SystemExit as exc:      # argparse usage errors exit with 2 already
        return int(exc.code or 0)
    try:
        worker_count()
        results, table, code = COMMANDS[args.command](args)
        text = render(args, results, table)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except (HeunError, ValueError, ZeroDivisionError, OverflowError) as exc:
        return _fail(str(exc), EXIT_ENGINE)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
