"""``medimax`` command line: gen | run | char | verify | report.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import samples, verify
from .grid import CubeFamily, DomainError, DyadicGridSpec, Universe, frac_str
from .maximal import (
    HL,
    MEDIAN,
    brute_maximal,
    domination_bound,
    dyadic_maximal,
    median_mollify,
    rn_maximal,
    tau_kind,
)
from .stepfn import StepFunction, Weight
from .weights import (
    a1_characteristic,
    ainf_exp_characteristic,
    ainf_fujii_characteristic,
    ap_characteristic,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- parsing helpers --------------------------------------------------------------


def parse_rational(text: str, where: str = "value") -> Fraction:
    """Parse ``"p/q"``, an integer or a terminating decimal; errors name the flag and character position."""
    s = str(text).strip()
    allowed = set("0123456789+-/.")
    for i, ch in enumerate(s):
        if ch not in allowed:
            raise UsageError(f"{where}: cannot parse {text!r} as a rational (bad character {ch!r} at position {i})")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{where}: cannot parse {text!r} as a rational ({exc})") from None


def parse_list(text: str, where: str) -> list[Fraction]:
    return [parse_rational(part, f"{where}[{i}]") for i, part in enumerate(str(text).split(","))]


def parse_universe(text: str, cell: Fraction) -> Universe:
    """``"lo:hi"`` or ``"lo:hi,lo:hi"``."""
    bounds = []
    for i, part in enumerate(str(text).split(",")):
        if part.count(":") != 1:
            raise UsageError(f"--universe: axis {i} must look like lo:hi, got {part!r}")
        lo, hi = part.split(":")
        bounds.append((parse_rational(lo, f"--universe axis {i} lo"), parse_rational(hi, f"--universe axis {i} hi")))
    return Universe.box(bounds, cell)


def _shift(text, dim: int):
    if text is None:
        return None
    vals = parse_list(text, "--grid-shift")
    if len(vals) != dim:
        raise DomainError(f"--grid-shift has {len(vals)} components for a {dim}-dimensional universe")
    return tuple(vals)


def _write(path: str | None, text: str) -> None:
    """Atomic write (temp file + rename); ``None`` or ``-`` means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".medimax-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from None


def _emit_function(f: StepFunction, args) -> None:
    _write(args.out, f.to_csv() if args.format == "csv" else f.dumps())


# -- run config -------------------------------------------------------------------


@dataclass
class RunConfig:
    """A fully serialisable record of one invocation; ``--config`` replays it."""

    subcommand: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("command", "func", "config", "save_config")}
        return cls(ns.command, opts)

    @classmethod
    def from_json(cls, obj: dict) -> "RunConfig":
        if "subcommand" not in obj:
            raise UsageError("config file lacks a 'subcommand' entry")
        return cls(obj["subcommand"], dict(obj.get("options", {})))


# -- gen --------------------------------------------------------------------------


def cmd_gen(args) -> int:
    cell = parse_rational(args.cell, "--cell")
    if args.kind == "w_t":
        t = parse_rational(args.t, "--t")
        if args.universe:
            w = samples.w_t_on(parse_universe(args.universe, cell), t)
        else:
            w = samples.w_t(t, parse_rational(args.radius, "--radius"), cell)
        w.meta = {"generator": "w_t", "t": frac_str(t)}
        _emit_function(w, args)
        return EXIT_OK
    u = parse_universe(args.universe or "-10:10", cell)
    rng = np.random.default_rng(args.seed)
    if args.kind == "indicator":
        lo, hi = parse_rational(args.lo, "--from"), parse_rational(args.hi, "--to")
        f = samples.indicator(u, lo, hi)
        meta = {"generator": "indicator", "from": frac_str(lo), "to": frac_str(hi)}
    elif args.kind == "ramp":
        f, meta = samples.ramp(u), {"generator": "ramp"}
    elif args.kind == "step":
        at = parse_rational(args.at, "--at")
        left, right = parse_rational(args.left, "--left"), parse_rational(args.right, "--right")
        f = samples.step(u, at, left, right)
        meta = {"generator": "step", "at": frac_str(at), "left": frac_str(left), "right": frac_str(right)}
    elif args.kind == "constant":
        c = parse_rational(args.value, "--value")
        f, meta = StepFunction.constant(u, c), {"generator": "constant", "value": frac_str(c)}
    elif args.kind == "random":
        f, meta = samples.random_function(u, rng), {"generator": "random", "seed": args.seed}
    elif args.kind == "random-weight":
        f, meta = samples.random_weight(u, rng), {"generator": "random-weight", "seed": args.seed}
    else:  # argparse restricts choices
        raise UsageError(f"unknown generator {args.kind}")
    f.meta = meta
    _emit_function(f, args)
    return EXIT_OK


# -- run --------------------------------------------------------------------------

OPS = ("median-max", "tau-max", "hl", "dyadic-median-max", "dyadic-tau-max", "dyadic-hl", "domination", "mollify")


def _load_function(path: str) -> StepFunction:
    try:
        return StepFunction.from_json(_read_json(path))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: not a step-function file ({exc})") from None


def _kind_for(op: str, args):
    base = op.removeprefix("dyadic-")
    if base == "median-max":
        return MEDIAN
    if base == "hl":
        return HL
    if args.tau is None:
        raise UsageError(f"--op {op} needs --tau")
    return tau_kind(parse_rational(args.tau, "--tau"))


def cmd_run(args) -> int:
    f = _load_function(args.input)
    u = f.universe
    op = args.op
    if op == "mollify":
        if args.r is None:
            raise UsageError("--op mollify needs --r")
        out = median_mollify(f, parse_rational(args.r, "--r"))
    elif op == "domination":
        if args.tau is None:
            raise UsageError("--op domination needs --tau")
        out = domination_bound(f, parse_rational(args.tau, "--tau"))
    elif op.startswith("dyadic-"):
        grid = DyadicGridSpec.fitting(u, _shift(args.grid_shift, u.dim))
        out = dyadic_maximal(f, grid, _kind_for(op, args))
    else:
        kind = _kind_for(op, args)
        if args.family == "rn":
            out = rn_maximal(f, kind)
        elif args.family == "dyadic":
            fam = CubeFamily.dyadic(u, DyadicGridSpec.fitting(u, _shift(args.grid_shift, u.dim)))
            out = brute_maximal(f, fam, kind)
        else:
            out = brute_maximal(f, CubeFamily.all_cubes(u, args.max_side), kind)
    out.meta["input"] = os.path.basename(args.input)
    _emit_function(out, args)
    return EXIT_OK


# -- char -------------------------------------------------------------------------

CHARS = ("a1", "ap", "aexp", "fujii")


def _family(u: Universe, kind: str, max_side, shift) -> CubeFamily:
    if kind == "dyadic":
        return CubeFamily.dyadic(u, DyadicGridSpec.fitting(u, _shift(shift, u.dim)))
    if kind != "all":
        raise UsageError(f"--family must be 'all' or 'dyadic' for char, got {kind!r}")
    return CubeFamily.all_cubes(u, max_side)


def _characteristic(name: str, w: Weight, fam: CubeFamily, p, fujii_fam, inner_fam):
    if name == "a1":
        return a1_characteristic(w, fam)
    if name == "ap":
        return ap_characteristic(w, p, fam)
    if name == "aexp":
        return ainf_exp_characteristic(w, fam)
    return ainf_fujii_characteristic(w, fujii_fam, inner_fam)


def cmd_char(args) -> int:
    f = _load_function(args.input)
    w = Weight(f.universe, f.values)
    u = w.universe
    p = parse_rational(args.p, "--p")
    fam = _family(u, args.family, args.max_side, args.grid_shift)
    fujii_fam = _family(u, args.family, args.fujii_max_side, args.grid_shift)
    inner_fam = CubeFamily.all_cubes(u, args.inner_max_side)
    which = CHARS if args.which == "all" else tuple(args.which.split(","))
    out = []
    for name in which:
        if name not in CHARS:
            raise UsageError(f"--which: unknown characteristic {name!r} (choose from {', '.join(CHARS)})")
        ch = _characteristic(name, w, fam, p, fujii_fam, inner_fam)
        rec = ch.to_json()
        if name == "ap":
            rec["p"] = frac_str(p)
        if args.replay_witness and ch.witness is not None and not ch.infinite:
            single = CubeFamily.explicit(u, [ch.witness])
            again = _characteristic(name, w, single, p, single, inner_fam)
            rec["replay_ok"] = again.value == ch.value if ch.exact else abs(again.value - ch.value) <= 1e-10 * ch.value
        out.append(rec)
    _write(args.out, json.dumps(out, indent=1) + "\n")
    return EXIT_OK


# -- verify -----------------------------------------------------------------------

SUITES = ("comparison", "a1-bound", "weak-type", "sharpness", "lp-lower", "expansion", "fujii",
          "covering-domination", "dyadic-oracle", "stopping", "truncation", "alpha-beta")


def _suite(name: str, args) -> list[verify.VerificationReport]:
    seed = args.seed
    count = args.count
    if name == "comparison":
        return [verify.comparison_suite(seed, count or 1000)]
    if name == "a1-bound":
        return [verify.a1_suite(seed, count or 50)]
    if name == "weak-type":
        return [verify.weak_type_suite(seed, count or 50)]
    if name == "sharpness":
        return [verify.check_sharpness(parse_list(args.t, "--t"), seed=seed)]
    if name == "lp-lower":
        return [verify.check_lp_lower(parse_list(args.t, "--t"), parse_list(args.p, "--p"), seed=seed)]
    if name == "expansion":
        etas = parse_list(args.eta, "--eta")
        if args.n == 1 or args.cells ** args.n <= 12:
            return [verify.check_expansion_exhaustive(args.n, args.cells, etas, seed, grid_only_probe=args.n == 1)]
        return [verify.check_expansion_sampled(args.n, args.cells, e, count or 10_000, seed) for e in etas]
    if name == "fujii":
        return [verify.fujii_suite(seed)]
    if name == "covering-domination":
        return [verify.covering_domination_suite(seed, count or 100)]
    if name == "dyadic-oracle":
        return [verify.dyadic_oracle_suite(seed, count or 200)]
    if name == "stopping":
        return [verify.stopping_suite(seed, count or 500)]
    if name == "truncation":
        return [verify.truncation_suite(seed, count or 50)]
    return [verify.alpha_beta_suite(seed, count or 20)]


def cmd_verify(args) -> int:
    if args.replay:
        reports = []
        with open(args.replay) as fh:
            for line in fh:
                if line.strip():
                    rec = json.loads(line)
                    if rec.get("witness"):
                        reports.append(verify.replay(rec))
    else:
        names = SUITES if args.suite == "all" else (args.suite,)
        if args.suite != "all" and args.suite not in SUITES:
            raise UsageError(f"unknown suite {args.suite!r} (choose from {', '.join(SUITES)}, all)")
        reports = []
        for name in names:
            if name == "expansion" and args.suite == "all":
                # the full run covers both the 1-D exhaustive case and the sampled 2-D case
                reports.append(verify.check_expansion_exhaustive(1, 12, seed=args.seed, grid_only_probe=True))
                reports.append(verify.check_expansion_sampled(2, 4, Fraction(1, 2), 10_000, args.seed))
                continue
            reports += _suite(name, args)
    _write(args.out, "".join(r.dumps() + "\n" for r in reports))
    for r in reports:
        print(r.summary(), file=sys.stderr)
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAIL


# -- report -----------------------------------------------------------------------


def cmd_report(args) -> int:
    rows = []
    for path in args.inputs:
        with open(path) as fh:
            for n, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rows.append(verify.VerificationReport.from_json(json.loads(line)))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise UsageError(f"{path}:{n}: not a verification record ({exc})") from None
    if args.format == "csv":
        lines = ["claim,status,instances,worst,runtime,seed"]
        for r in rows:
            worst = "" if r.worst is None else verify._num_json(r.worst)
            lines.append(f"{r.claim},{r.status},{r.instances},{worst},{r.runtime},{r.seed}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps([{"claim": r.claim, "status": r.status, "instances": r.instances,
                            "worst": verify._num_json(r.worst), "runtime": r.runtime, "seed": r.seed}
                           for r in rows], indent=1) + "\n"
    _write(args.out, text)
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAIL


# -- argument parser --------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="medimax", description="Median maximal functions and weight characteristics on step functions.")
    ap.add_argument("--config", help="replay a saved run configuration (JSON)")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, universe=True):
        if universe:
            p.add_argument("--universe", help="lo:hi per axis, comma separated (default -10:10)")
            p.add_argument("--cell", default="1/10", help="cell side as p/q (default 1/10)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output path (stdout if omitted)")
        p.add_argument("--save-config", help="also write the run configuration to this path")

    g = sub.add_parser("gen", help="write a named step function or weight")
    g.add_argument("kind", choices=("indicator", "ramp", "step", "constant", "random", "random-weight", "w_t"))
    common(g)
    g.add_argument("--from", dest="lo", default="-1")
    g.add_argument("--to", dest="hi", default="1")
    g.add_argument("--at", default="0")
    g.add_argument("--left", default="0")
    g.add_argument("--right", default="1")
    g.add_argument("--value", default="1")
    g.add_argument("--t", default="1/2")
    g.add_argument("--radius", default="10", help="w_t universe is [-radius, radius) unless --universe is given")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="apply an operator to a step-function file")
    r.add_argument("input")
    r.add_argument("--op", choices=OPS, required=True)
    r.add_argument("--tau")
    r.add_argument("--r", help="mollification radius")
    r.add_argument("--family", choices=("all", "dyadic", "rn"), default="all",
                   help="cube family for the brute operators; rn = all cubes of R^n via the truncation radius")
    r.add_argument("--max-side", type=int)
    r.add_argument("--grid-shift", help="comma separated shift components, each 0 or 1/3")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    common(r, universe=False)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("char", help="weight characteristics with witnesses")
    c.add_argument("input")
    c.add_argument("--p", default="2")
    c.add_argument("--family", choices=("all", "dyadic"), default="all")
    c.add_argument("--max-side", type=int)
    c.add_argument("--grid-shift")
    c.add_argument("--fujii-max-side", type=int, default=8, help="outer family side cap for the Fujii-Wilson form")
    c.add_argument("--inner-max-side", type=int, default=16, help="side cap of the inner maximal operator")
    c.add_argument("--which", default="all", help="comma separated subset of a1,ap,aexp,fujii")
    c.add_argument("--replay-witness", action="store_true", help="re-evaluate each witness cube and report agreement")
    common(c, universe=False)
    c.set_defaults(func=cmd_char)

    v = sub.add_parser("verify", help="run property suites, emit JSON lines")
    v.add_argument("suite", nargs="?", default="all", help=f"one of {', '.join(SUITES)} or all")
    v.add_argument("--count", type=int)
    v.add_argument("--t", default="1/2,1/4,1/8")
    v.add_argument("--p", default="1,2,4")
    v.add_argument("--n", type=int, default=1)
    v.add_argument("--cells", type=int, default=12, help="cells per side of the expansion cube")
    v.add_argument("--eta", default="1/4,1/2,3/4")
    v.add_argument("--replay", help="replay the witnesses of a JSON-lines report")
    common(v, universe=False)
    v.set_defaults(func=cmd_verify)

    rp = sub.add_parser("report", help="summarise JSON-lines verification reports")
    rp.add_argument("inputs", nargs="+")
    rp.add_argument("--format", choices=("json", "csv"), default="json")
    rp.add_argument("--out")
    rp.set_defaults(func=cmd_report, save_config=None)
    return ap


def _dispatch(ns: argparse.Namespace) -> int:
    if getattr(ns, "save_config", None):
        _write(ns.save_config, json.dumps(RunConfig.from_namespace(ns).to_json(), indent=1, sort_keys=True) + "\n")
    return ns.func(ns)


def namespace_from_config(cfg: RunConfig) -> argparse.Namespace:
    parser = build_parser()
    base = parser.parse_args([cfg.subcommand] + _required_positionals(cfg))
    for k, v in cfg.options.items():
        setattr(base, k, v)
    base.save_config = None
    return base


def _required_positionals(cfg: RunConfig) -> list[str]:
    o = cfg.options
    need = {"gen": ["kind"], "run": ["input", "op"], "char": ["input"], "report": ["inputs"]}.get(cfg.subcommand, [])
    missing = [k for k in need if k not in o]
    if missing:
        raise UsageError(f"config for {cfg.subcommand!r} lacks {', '.join(missing)}")
    if cfg.subcommand == "gen":
        return [o["kind"]]
    if cfg.subcommand == "run":
        return [o["input"], "--op", o["op"]]
    if cfg.subcommand == "char":
        return [o["input"]]
    if cfg.subcommand == "report":
        return list(o["inputs"])
    return []


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.config:
            cfg = RunConfig.from_json(_read_json(ns.config))
            ns = namespace_from_config(cfg)
        elif ns.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return _dispatch(ns)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, DomainError) as exc:
        print(f"medimax: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - anything else is a bug in the library
        print(f"medimax: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
