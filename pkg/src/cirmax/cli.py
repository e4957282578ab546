"""Command-line front end.

    cirmax <command> [--config FILE] [--set dotted.key=value ...] [--format csv|json] [--output PATH]

Commands: price, yield-price, lt, invert-check, bond, hit, sens, mc, table2.

The config is a flat JSON object with the model keys phi, lambda, alpha,
beta, r0 and the optional option keys tau, K, T, k.  Optional sections
``numerics`` (``quad`` and ``inversion``), ``mc`` and ``output`` carry
settings.  Exit status is 0 on success, 2 for invalid input and 3 when a
numerical routine cannot reach its accuracy target.
"""

import argparse
import csv
import json
import math
import sys
from dataclasses import fields

import jsonschema
import numpy as np

from . import bond, hitting, mc_oracle, pricing, replication
from .errors import AccuracyError, CirmaxError, DomainError, ValidationError
from .model import AffineParams, load_config
from .numerics import InversionConfig, QuadConfig, laplace_invert

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_ACCURACY = 3

_NUMBER = {"type": "number"}
_QUAD_PROPS = {
    "n": {"type": "integer", "minimum": 2},
    "m": {"type": "integer", "minimum": 2},
    "scheme": {"enum": ["gauss_legendre", "trapezoid"]},
    "tol": {"type": "number", "exclusiveMinimum": 0},
    "panel_order": {"type": "integer", "minimum": 2},
    "v_max": {"type": ["number", "null"]},
    "t_max": {"type": ["number", "null"]},
    "rule": {"enum": ["full", "paper"]},
}
_INV_PROPS = {
    "method": {"enum": ["euler", "gaver_stehfest"]},
    "terms": {"type": "integer"},
    "bromwich_shift": {"type": "number", "exclusiveMinimum": 0},
    "precision_digits": {"type": "integer", "minimum": 15},
    "cross_check": {"type": "boolean"},
}
_MC_PROPS = {
    "paths": {"type": "integer", "minimum": 1000},
    "steps": {"type": "integer", "minimum": 100},
    "seed": {"type": "integer"},
    "scheme": {"enum": ["exact_ncchi2", "euler_full_truncation"]},
    "antithetic": {"type": "boolean"},
    "block_size": {"type": "integer", "minimum": 2},
    "max_correction": {"enum": ["bridge", "none"]},
}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "phi": _NUMBER,
        "lambda": _NUMBER,
        "alpha": _NUMBER,
        "beta": _NUMBER,
        "r0": _NUMBER,
        "tau": _NUMBER,
        "K": _NUMBER,
        "T": _NUMBER,
        "k": _NUMBER,
        "numerics": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "quad": {"type": "object", "additionalProperties": False, "properties": _QUAD_PROPS},
                "inversion": {"type": "object", "additionalProperties": False, "properties": _INV_PROPS},
            },
        },
        "mc": {"type": "object", "additionalProperties": False, "properties": _MC_PROPS},
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"format": {"enum": ["csv", "json"]}, "path": {"type": ["string", "null"]}},
        },
    },
}

# Every emitted record is an object of scalars.
RECORD_SCHEMA = {
    "type": "object",
    "minProperties": 1,
    "additionalProperties": {"type": ["number", "string", "boolean", "null"]},
}

DEFAULT_CONFIG = {"phi": 0.02, "lambda": 0.2, "alpha": 0.02, "beta": 0.002, "r0": 0.1, "T": 1.0, "k": 0.1}


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(config, assignments):
    """Apply ``dotted.key=value`` assignments; values are parsed as JSON when possible."""
    out = json.loads(json.dumps(config))
    for item in assignments or ():
        if "=" not in item:
            raise ValidationError(f"override {item!r} is not of the form key=value")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        node = out
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ValidationError(f"override {key!r} descends into a non-object")
        node[parts[-1]] = _parse_value(raw)
    return out


def validate_config(config):
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config {where}: {exc.message}") from None
    return config


def _build(cls, section):
    known = {f.name for f in fields(cls)}
    try:
        return cls(**{key: value for key, value in (section or {}).items() if key in known})
    except TypeError as exc:
        raise ValidationError(str(exc)) from None


class Context:
    """Validated config plus the objects built from it."""

    def __init__(self, config):
        self.config = validate_config(config)
        numerics = config.get("numerics", {})
        self.quad = _build(QuadConfig, numerics.get("quad"))
        self.inv = _build(InversionConfig, numerics.get("inversion"))
        self.mc = _build(mc_oracle.McConfig, config.get("mc"))
        self._params = None

    @property
    def params(self):
        if self._params is None:
            self._params = AffineParams.from_mapping(self.config)
        return self._params

    def need(self, *keys):
        missing = [key for key in keys if key not in self.config]
        if missing:
            raise ValidationError(f"config is missing {', '.join(missing)}")
        return [self.config[key] for key in keys]


# ------------------------------------------------------------------ output


def _format_number(value):
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.10g}"
    return str(value)


def _clean(record):
    out = {}
    for key, value in record.items():
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            value = None
        out[key] = value
    jsonschema.validate(out, RECORD_SCHEMA)
    return out


def emit(records, fmt, stream):
    records = [_clean(r) for r in records]
    if fmt == "json":
        for record in records:
            stream.write(json.dumps(record) + "\n")
        return
    columns = []
    for record in records:
        columns.extend(key for key in record if key not in columns)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([_format_number(record.get(col)) for col in columns])


# ---------------------------------------------------------------- commands


def _floats(text):
    return [float(part) for part in str(text).split(",") if part.strip()]


def cmd_price(ctx, args):
    T, k = ctx.need("T", "k")
    res = pricing.price(ctx.params, pricing.OptionSpec(T=T, k=k), ctx.quad, ctx.inv)
    return [{"command": "price", "T": T, "k": k, **res.as_record()}]


def cmd_yield_price(ctx, args):
    T, tau, K = ctx.need("T", "tau", "K")
    y = pricing.yield_spec(ctx.params, tau, K)
    res = pricing.yield_option_price(ctx.params, y, T, ctx.quad, ctx.inv)
    return [{"command": "yield-price", "T": T, "tau": tau, "K": K, **res.as_record()}]


def cmd_lt(ctx, args):
    (k,) = ctx.need("k")
    rows = []
    for a in _floats(args.a):
        rows.append(
            {
                "a_tilde": a,
                "U_joint": pricing.option_lt(ctx.params, k, a, ctx.quad, form="joint"),
                "U_outer": pricing.option_lt(ctx.params, k, a, ctx.quad, form="outer"),
            }
        )
    return rows


KNOWN_PAIRS = (
    ("1/s", lambda s: 1 / s, 1.0, 1.0),
    ("1/(s+1)", lambda s: 1 / (s + 1), 1.0, math.exp(-1.0)),
    ("1/s^2", lambda s: 1 / s**2, 1.0, 1.0),
)


def cmd_invert_check(ctx, args):
    rows = []
    gs = InversionConfig(method="gaver_stehfest", terms=16, precision_digits=40)
    for name, F, t, exact in KNOWN_PAIRS:
        euler = laplace_invert(F, t, ctx.inv if ctx.inv.method == "euler" else InversionConfig()).value
        stehfest = laplace_invert(F, t, gs).value
        rows.append({"transform": name, "t": t, "exact": exact, "euler": euler, "gaver_stehfest": stehfest})
    if args.option:
        T, k = ctx.need("T", "k")
        params = ctx.params
        spec = pricing.OptionSpec(T=T, k=k)
        euler = pricing.price(params, spec, ctx.quad, InversionConfig()).value
        stehfest = pricing.price(params, spec, ctx.quad, gs).value
        rows.append({"transform": "option", "t": T, "exact": None, "euler": euler, "gaver_stehfest": stehfest})
    return rows


def cmd_bond(ctx, args):
    maturities = _floats(args.maturities) if args.maturities else [ctx.config.get("T", 1.0)]
    v = ctx.config.get("r0") if args.v is None else args.v
    rows = []
    for T in maturities:
        c = bond.bond_coeffs(ctx.params, T)
        rows.append({"T": T, "A(T)": c.A_T, "b(T)": c.b_T, "B_v(0,T)": bond.bond_price(ctx.params, v, T)})
    return rows


def cmd_hit(ctx, args):
    rows = []
    for level in _floats(args.level):
        for gamma in _floats(args.gamma):
            rows.append({"gamma": gamma, "a": level, "value": hitting.hit_lt_q(ctx.params, gamma, level)})
    return rows


def cmd_sens(ctx, args):
    T, k = ctx.need("T", "k")
    rows = [{"quantity": "dC/dk", "T": T, "strike": k, "value": pricing.dprice_dk(ctx.params, k, T, ctx.quad)}]
    if "tau" in ctx.config and "K" in ctx.config:
        y = pricing.yield_spec(ctx.params, ctx.config["tau"], ctx.config["K"])
        for path in ("composition", "expanded"):
            value = pricing.dprice_dK_yield(ctx.params, y, T, ctx.quad, path=path)
            rows.append({"quantity": f"dC/dK ({path})", "T": T, "strike": y.K, "value": value})
    return rows


def cmd_mc(ctx, args):
    T = ctx.need("T")[0]
    if args.functional == "bond":
        v = ctx.config["r0"] if args.v is None else args.v
        est = mc_oracle.mc_bond(ctx.params, v, T, ctx.mc)
    else:
        (k,) = ctx.need("k")
        est = mc_oracle.mc_price(ctx.params, T, k, ctx.mc)
    return [{"functional": args.functional, **est.as_record()}]


def cmd_table2(ctx, args):
    cases = [int(c) for c in _floats(args.cases)] if args.cases else list(replication.TABLE1)
    grids = [int(n) for n in _floats(args.grids)] if args.grids else list(replication.GRIDS)
    rows = replication.table2(
        cases,
        grids,
        p=args.p,
        variant=args.bond_variant,
        rule="paper" if args.paper_faithful else "full",
        inversion=args.inversion,
    )
    return [r.as_record() for r in rows]


COMMANDS = {
    "price": (cmd_price, "price a call on the running maximum of the rate"),
    "yield-price": (cmd_yield_price, "price a call on the running maximum of the tau-yield"),
    "lt": (cmd_lt, "tabulate the option transform U(a~) in both forms"),
    "invert-check": (cmd_invert_check, "invert known transform pairs with both methods"),
    "bond": (cmd_bond, "discount curve: T, A(T), b(T), B_v(0,T)"),
    "hit": (cmd_hit, "first-passage transforms under Q"),
    "sens": (cmd_sens, "strike sensitivities"),
    "mc": (cmd_mc, "Monte Carlo estimate with standard error"),
    "table2": (cmd_table2, "replicate the eight-case price table"),
}

DEFAULT_FORMAT = {"price": "json", "yield-price": "json", "mc": "json", "sens": "csv", "table2": "csv"}


def build_parser():
    parser = argparse.ArgumentParser(prog="cirmax", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file (defaults to the first table case)")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="dotted config override")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--output", help="write here instead of stdout")
        if name == "lt":
            p.add_argument("--a", default="0.5,1,2", help="comma-separated real a~ values")
        if name == "invert-check":
            p.add_argument("--option", action="store_true", help="also compare both methods on the option price")
        if name in ("bond", "mc"):
            p.add_argument("--v", type=float, help="start rate of the bond (defaults to r0)")
        if name == "bond":
            p.add_argument("--maturities", help="comma-separated maturities")
        if name == "hit":
            p.add_argument("--gamma", default="0.25,0.5,1")
            p.add_argument("--level", default="0.12,0.15")
        if name == "mc":
            p.add_argument("--functional", choices=["price", "bond"], default="price")
        if name == "table2":
            p.add_argument("--paper-faithful", action="store_true", help="loops start at the second grid index")
            p.add_argument("--bond-variant", choices=["appendix", "program"], default="appendix")
            p.add_argument("--inversion", choices=["residue", "euler"], default="residue")
            p.add_argument("--p", type=int, default=10, help="Kummer series terms")
            p.add_argument("--cases")
            p.add_argument("--grids")
    return parser


def run(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    try:
        config = load_config(args.config) if args.config else dict(DEFAULT_CONFIG)
        config = apply_overrides(config, args.set)
        ctx = Context(config)
        records = COMMANDS[args.command][0](ctx, args)
        output = config.get("output", {})
        fmt = args.format or output.get("format") or DEFAULT_FORMAT.get(args.command, "csv")
        path = args.output or output.get("path")
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                emit(records, fmt, fh)
        else:
            emit(records, fmt, stdout)
    except (ValidationError, DomainError) as exc:
        stderr.write(f"cirmax {args.command}: invalid input: {exc}\n")
        return EXIT_INVALID
    except AccuracyError as exc:
        stderr.write(f"cirmax {args.command}: accuracy failure: {exc}\n")
        return EXIT_ACCURACY
    except CirmaxError as exc:
        stderr.write(f"cirmax {args.command}: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        stderr.write(f"cirmax {args.command}: {exc}\n")
        return EXIT_INVALID
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))
