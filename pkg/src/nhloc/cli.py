"""Command-line entry point: ``nhloc <subcommand> [options]``.

A JSON config file (``--config``) supplies defaults; any flag given on the
command line overrides the matching config key. Exit codes: 0 success,
2 configuration error, 3 eigensolver non-convergence, 4 I/O error.
"""

import argparse
import json
import logging
import math
import re
import sys

import numpy as np

from . import exp, obs, toy
from .exp.emit import to_csv_text
from .errors import ConfigError, EmitError, NonConvergenceError, ParameterError
from .ham import Hopping
from .lattice import (FIBONACCI_LADDER, INFINITY, AAFParams, AlternatingParams, Boundary,
                      ChainSpec, FibonacciWordParams, RandomDisorderParams)
from .table import Table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGENCE = 3
EXIT_IO = 4

CONFIG_KEYS = ("model", "lambda", "v", "beta", "T", "theta", "sizes", "boundary", "seeds",
               "output")
MODELS = ("aaf", "fibonacci", "alternating", "random")

log = logging.getLogger("nhloc")

_PI_EXPR = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_theta(text):
    """Angle from a number or a multiple of pi: "0.3", "pi/2", "17pi/36", "-pi"."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower()
    m = _PI_EXPR.match(s)
    if m:
        coef = m.group(1)
        if coef in ("", "+"):
            c = 1.0
        elif coef == "-":
            c = -1.0
        else:
            c = float(coef)
        den = float(m.group(2)) if m.group(2) else 1.0
        if den == 0:
            raise ConfigError(f"zero denominator in angle {text!r}")
        return c * math.pi / den
    try:
        return float(s)
    except ValueError:
        raise ConfigError(f"cannot parse angle {text!r}") from None


def _as_list(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def merge(cfg, args):
    """Flags override config keys; returns a plain dict of resolved settings."""
    out = dict(cfg)
    flag_map = {"model": "model", "lam": "lambda", "v": "v", "beta": "beta", "T": "T",
                "theta": "theta", "sizes": "sizes", "boundary": "boundary", "output": "output"}
    for attr, key in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            out[key] = val
    if getattr(args, "seed", None) is not None:
        out["seeds"] = [args.seed]
    return out


def _float(value, name):
    try:
        if isinstance(value, str) and value.lower() in ("inf", "infinity"):
            return INFINITY
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number, got {value!r}") from None


def chain_template(settings, default_model="fibonacci", n_sites=987):
    model = settings.get("model", default_model)
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    try:
        if model == "aaf":
            params = AAFParams(lam=_float(settings.get("lambda", 1.0), "lambda"),
                               beta=_float(settings.get("beta", 0.0), "beta"))
        elif model == "fibonacci":
            v = _float(settings.get("v", 1.0), "v")
            params = FibonacciWordParams(v_a=v, v_b=-v)
        elif model == "alternating":
            v = _float(settings.get("v", 1.0), "v")
            params = AlternatingParams(v_a=-v, v_b=v)
        else:
            seeds = _as_list(settings.get("seeds"))
            if not seeds:
                raise ConfigError("random model needs a seed (--seed or config 'seeds')")
            v = _float(settings.get("v", 1.0), "v")
            params = RandomDisorderParams(center=-v, halfwidth=0.5 * v, seed=int(seeds[0]))
        boundary = Boundary(settings.get("boundary", "open"))
        return ChainSpec(params, n_sites, boundary)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _thetas(settings, args, default):
    if getattr(args, "theta_steps", None):
        return tuple(np.linspace(0.0, math.pi / 2, args.theta_steps).tolist())
    raw = _as_list(settings.get("theta"))
    if raw is None:
        return default
    return tuple(parse_theta(x) for x in raw)


def _magnitudes(settings, default):
    raw = _as_list(settings.get("T"))
    if raw is None:
        return default
    return tuple(_float(x, "T") for x in raw)


def _sizes(settings, default):
    raw = _as_list(settings.get("sizes"))
    if raw is None:
        return default
    try:
        return tuple(int(x) for x in raw)
    except (TypeError, ValueError):
        raise ConfigError(f"sizes must be integers, got {raw!r}") from None


def _write(table, settings, args, meta):
    path = settings.get("output")
    if path is None:
        sys.stdout.write(to_csv_text(table.drop(exp.VOLATILE_COLUMNS)))
        return
    exp.emit(table, path, args.format, metadata=meta)
    log.info("wrote %d rows to %s", len(table), path)


def cmd_spectrum(settings, args):
    n = _sizes(settings, (987,))[0]
    chain = chain_template(settings).with_size(n)
    t = _magnitudes(settings, (1.0,))[0]
    th = _thetas(settings, args, (0.0,))[0]
    table = exp.run_complex_plane(chain, Hopping(t, th))
    _write(table, settings, args, {"N": n, "T": t, "theta": th, "model": repr(chain.model)})


def _grid(settings, args, default_model, sizes, thetas, magnitudes, replicas=1):
    template = chain_template(settings, default_model)
    seeds = None
    if isinstance(template.model, RandomDisorderParams):
        listed = _as_list(settings.get("seeds"))
        if getattr(args, "seed", None) is None and listed and len(listed) > 1:
            seeds = tuple(int(s) for s in listed)
    try:
        return exp.SweepGrid(template, thetas, magnitudes, sizes, replicas, seeds)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_sweep(settings, args):
    grid = _grid(settings, args, "fibonacci", _sizes(settings, (987,)),
                 _thetas(settings, args, exp.default_thetas()),
                 _magnitudes(settings, (0.2, 1.0, 5.0, 13.0)), args.replicas)
    table = exp.run_theta_sweep(grid, args.workers)
    _write(table, settings, args, grid.describe())


def cmd_disorder(settings, args):
    settings = dict(settings)
    settings["model"] = "random"
    if args.seed is None and not _as_list(settings.get("seeds")):
        raise ConfigError("disorder runs require --seed")
    grid = _grid(settings, args, "random", _sizes(settings, (233,)),
                 _thetas(settings, args, exp.default_thetas()),
                 _magnitudes(settings, (4.0,)), args.replicas)
    table = exp.run_theta_sweep(grid, args.workers)
    _write(table, settings, args, grid.describe())


def cmd_landscape(settings, args):
    grid = _grid(settings, args, "fibonacci", _sizes(settings, FIBONACCI_LADDER),
                 _thetas(settings, args, exp.default_thetas()),
                 _magnitudes(settings, (13.0,)))
    table = exp.run_landscape(grid, args.mode, args.quantity, args.workers)
    meta = grid.describe()
    meta.update(mode=args.mode, quantity=args.quantity)
    _write(table, settings, args, meta)


D2_COLUMNS = ("N", "ipr", "log_N", "log_ipr", "T", "theta", "mode", "d2", "fit_residual")


def cmd_d2(settings, args):
    sizes = tuple(sorted(_sizes(settings, FIBONACCI_LADDER)))
    chain = chain_template(settings)
    t = _magnitudes(settings, (13.0,))[0]
    th = _thetas(settings, args, (0.0,))[0]
    fit = exp.scaling_fit(chain, Hopping(t, th), sizes, args.mode)
    table = Table(D2_COLUMNS)
    for n, v in zip(fit.sizes, fit.iprs):
        table.append((n, v, math.log(n), math.log(v), t, th, args.mode, fit.d2,
                      fit.fit_residual))
    _write(table, settings, args, {"sizes": list(sizes), "T": t, "theta": th,
                                   "model": repr(chain.model), "mode": args.mode})


def cmd_loclen(settings, args):
    n = _sizes(settings, (987,))[0]
    chain = chain_template(settings).with_size(n)
    ts = _magnitudes(settings, (3.0,))
    ths = _thetas(settings, args, exp.default_thetas())
    table, prof = exp.run_localization_length(chain, ts, ths, profiles=args.profiles is not None)
    _write(table, settings, args, {"N": n, "T": list(ts), "theta": list(ths),
                                   "model": repr(chain.model)})
    if prof is not None:
        exp.emit(prof, args.profiles, args.format, metadata={"N": n, "T": list(ts)})


def cmd_toy(settings, args):
    v = _float(settings.get("v", 1.0), "v")
    try:
        params = toy.ToyParams(v_a=-v, v_b=v)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    th = _thetas(settings, args, (math.pi / 2,))[0]
    ks, ts = toy.default_grid(params, args.steps)
    raw_t = _as_list(settings.get("T"))
    if raw_t is not None:
        ts = np.asarray([_float(x, "T") for x in raw_t])
    table = toy.order_parameter_grid(params, ks, ts, th)
    _write(table, settings, args, {"v_a": -v, "v_b": v, "theta": th, "steps": args.steps})


def build_parser():
    p = argparse.ArgumentParser(prog="nhloc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--lambda", dest="lam", help="AAF potential strength")
    common.add_argument("--v", help="potential scale V")
    common.add_argument("--beta", help="AAF sharpness (number or inf)")
    common.add_argument("--T", nargs="+", help="hopping magnitude(s)")
    common.add_argument("--theta", nargs="+", help="hopping phase(s), e.g. 0 pi/2 17pi/36")
    common.add_argument("--theta-steps", type=int, help="use N equally spaced angles on [0, pi/2]")
    common.add_argument("--sizes", nargs="+", help="chain length(s)")
    common.add_argument("--boundary", choices=[b.value for b in Boundary])
    common.add_argument("--seed", type=int, help="disorder seed")
    common.add_argument("--output", "-o", help="output path (default: CSV on stdout)")
    common.add_argument("--format", choices=[f.value for f in exp.Format], default="csv")
    common.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("spectrum", parents=[common], help="per-state table for one chain")
    sp.set_defaults(func=cmd_spectrum)

    sw = sub.add_parser("sweep", parents=[common], help="MIPR over theta and T grids")
    sw.add_argument("--replicas", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    ls = sub.add_parser("landscape", parents=[common], help="D2 / log IPR / rigidity grids")
    ls.add_argument("--mode", choices=[m.value for m in obs.Extreme], default="max_ipr")
    ls.add_argument("--quantity", choices=[q.value for q in exp.Quantity], default="d2")
    ls.set_defaults(func=cmd_landscape)

    ty = sub.add_parser("toy", parents=[common], help="two-band order-parameter map")
    ty.add_argument("--steps", type=int, default=201)
    ty.set_defaults(func=cmd_toy)

    d2 = sub.add_parser("d2", parents=[common], help="single finite-size scaling fit")
    d2.add_argument("--mode", choices=[m.value for m in obs.Extreme], default="max_ipr")
    d2.set_defaults(func=cmd_d2)

    dis = sub.add_parser("disorder", parents=[common], help="replica-averaged random chains")
    dis.add_argument("--replicas", type=int, default=exp.grid.DEFAULT_REPLICAS)
    dis.set_defaults(func=cmd_disorder)

    ll = sub.add_parser("loclen", parents=[common], help="localization length of the max-IPR state")
    ll.add_argument("--profiles", help="also write |psi|^2 profiles to this path")
    ll.set_defaults(func=cmd_loclen)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        settings = merge(load_config(args.config), args)
        args.func(settings, args)
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergenceError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (EmitError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
