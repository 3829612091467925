"""Command-line front end: ``zlab <command> [flags]``.

Exit codes: 0 pass or informational, 1 fail verdict, 2 usage or domain
error, 3 numeric error.  Errors are written to stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import experiments as ex
from ._parallel import set_default_threads
from .errors import DomainError, UsageError, ZlabError
from .quadrature import QuadratureConfig, short_interval_mean
from .records import ExperimentRecord, output_paths, write_record
from .special import hardy_z_array, riemann_siegel_theta, zeta
from .targets import LineSegment, parse_target, parse_weight
from .zeros import scan_zero_ordinates, write_zeros_csv

COMMANDS = ("eval", "theta", "z", "zeros", "mean", "lemma2", "bound", "convexity", "growth",
            "search", "density", "explore-z", "report")

# flags a command cannot run without (checked after the config file is merged)
REQUIRED = {
    "eval": ("sigma", "t"),
    "mean": ("sigma", "T"),
    "lemma2": ("T",),
    "bound": ("grid_min", "grid_max"),
    "convexity": ("sigma", "T"),
    "growth": ("sigma",),
    "search": ("sigma", "grid_min", "grid_max"),
    "density": ("sigma", "eps", "T_max"),
    "explore-z": ("grid_min", "grid_max"),
    "zeros": ("t_to",),
    "report": ("inputs",),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    format: str = "json"

    def to_dict(self):
        """Flag-named JSON form, loadable again with ``--config``."""
        d = {"command": self.command}
        for k, v in self.parameters.items():
            if v is not None:
                d[_DEST_TO_FLAG.get(k, k)] = v
        if self.output_path is not None:
            d["out"] = self.output_path
        d["format"] = self.format
        return d


def _common(p):
    g = p.add_argument_group("common")
    g.add_argument("--tol", type=float, dest="tol", help="absolute quadrature tolerance (1e-8)")
    g.add_argument("--rule", choices=("gauss-legendre-7/15", "composite-simpson"), dest="rule")
    g.add_argument("--panels", type=int, dest="panels", help="base panel count")
    g.add_argument("--out", dest="out", help="output file or directory")
    g.add_argument("--format", choices=("json", "csv", "both"), dest="format")
    g.add_argument("--config", dest="config", help="JSON file of flag values")
    g.add_argument("--save-config", dest="save_config", help="write the merged RunConfig as JSON")
    g.add_argument("--threads", type=int, dest="threads")


def _grid(p, step_help="shift spacing (default: pi/log(T_max/2pi))"):
    p.add_argument("--grid-min", type=float, dest="grid_min")
    p.add_argument("--grid-max", type=float, dest="grid_max")
    p.add_argument("--grid-step", type=float, dest="grid_step", help=step_help)


def _range(p):
    p.add_argument("--t", type=float, nargs="+", dest="t")
    p.add_argument("--from", type=float, dest="t_from")
    p.add_argument("--to", type=float, dest="t_to")
    p.add_argument("--step", type=float, dest="step")


def build_parser():
    parser = _Parser(prog="zlab", description="Zeta translates on vertical lines.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("eval", help="zeta(sigma + it)")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--t", type=float, dest="t")
    _common(p)

    for name, text in (("theta", "Riemann-Siegel theta"), ("z", "Hardy Z")):
        p = sub.add_parser(name, help=text)
        _range(p)
        _common(p)

    p = sub.add_parser("zeros", help="zeros of Z by sign changes")
    p.add_argument("--from", type=float, dest="t_from")
    p.add_argument("--to", type=float, dest="t_to")
    p.add_argument("--grid-step", type=float, dest="grid_step")
    _common(p)

    p = sub.add_parser("mean", help="integral of |zeta(sigma+it)| over [T, T+delta]")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--T", type=float, dest="T")
    p.add_argument("--delta", type=float, dest="delta")
    _common(p)

    p = sub.add_parser("lemma2", help="integral of |sin(theta(t+T)+C)| over [A, B]")
    p.add_argument("--T", type=float, nargs="+", dest="T")
    p.add_argument("--A", type=float, dest="A")
    p.add_argument("--B", type=float, dest="B")
    p.add_argument("--C", type=float, nargs="+", dest="C")
    _common(p)

    p = sub.add_parser("bound", help="min L1 distance to G zeta translates on sigma = 1/2")
    p.add_argument("--target", dest="target")
    p.add_argument("--weight", dest="weight")
    p.add_argument("--H", type=float, dest="H")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--slack", type=float, dest="slack")
    _grid(p)
    _common(p)

    p = sub.add_parser("convexity", help="three-line convexity inequality for zeta")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--delta", type=float, dest="delta")
    p.add_argument("--T", type=float, dest="T", help="centre height t0")
    p.add_argument("--A", type=float, dest="A")
    p.add_argument("--M", type=float, dest="M", help="modulus bound (default: certified)")
    _common(p)

    p = sub.add_parser("growth", help="log-log slope of short-interval means")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--delta", type=float, dest="delta")
    p.add_argument("--T", type=float, nargs="+", dest="T")
    p.add_argument("--block", type=int, dest="block")
    _common(p)

    p = sub.add_parser("search", help="distance distribution over a shift grid")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--target", dest="target")
    p.add_argument("--H", type=float, dest="H")
    p.add_argument("--norm", choices=("L1", "sup"), dest="norm")
    _grid(p)
    _common(p)

    p = sub.add_parser("density", help="fraction of shifts with sup distance below eps")
    p.add_argument("--sigma", type=float, dest="sigma")
    p.add_argument("--target", dest="target")
    p.add_argument("--H", type=float, dest="H")
    p.add_argument("--eps", type=float, dest="eps")
    p.add_argument("--T-max", type=float, dest="T_max")
    p.add_argument("--grid-step", type=float, dest="grid_step", help="sample step (default H)")
    p.add_argument("--scaled", action="store_const", const=True, dest="scaled")
    _common(p)

    p = sub.add_parser("explore-z", help="distance from f to Z, |zeta| or normalised |zeta|")
    p.add_argument("--target", dest="target")
    p.add_argument("--H", type=float, dest="H")
    p.add_argument("--mode", choices=ex.Z_MODES, dest="mode")
    _grid(p)
    _common(p)

    p = sub.add_parser("report", help="summarise record files into one table")
    p.add_argument("inputs", nargs="*", help="record JSON files or directories")
    _common(p)
    return parser


def _flag_map(parser):
    """dest -> flag name (without dashes) over every subcommand."""
    out = {}
    for action in parser._subparsers._group_actions[0].choices.values():
        for a in action._actions:
            if a.option_strings:
                out.setdefault(a.dest, a.option_strings[0].lstrip("-"))
    return out


_PARSER = build_parser()
_DEST_TO_FLAG = _flag_map(_PARSER)


def _subparser(command):
    return _PARSER._subparsers._group_actions[0].choices[command]


def _config_defaults(command, doc):
    """Translate a config document's flag-named keys to parser defaults."""
    sp = _subparser(command)
    by_name = {}
    for a in sp._actions:
        for o in a.option_strings:
            by_name[o.lstrip("-")] = a
        if not a.option_strings:
            by_name[a.dest] = a
    out = {}
    for key, value in doc.items():
        if key in ("command", "config"):
            continue
        k = key.lstrip("-")
        a = by_name.get(k) or by_name.get(k.replace("_", "-"))
        if a is None:
            raise UsageError(f"unknown key {key!r} in config for {command}", flag=key)
        if isinstance(value, str) and a.type is not None:
            try:
                value = a.type(value)
            except ValueError as exc:
                raise UsageError(f"bad value {value!r} for {key}", flag=key) from exc
        if a.nargs in ("+", "*") and not isinstance(value, list):
            value = [value]
        out[a.dest] = value
    return out


def parse_args(argv):
    """argv -> RunConfig.  ``--config`` values are defaults that flags override."""
    argv = list(argv)
    doc = {}
    if "--config" in argv:
        i = argv.index("--config")
        if i + 1 >= len(argv):
            raise UsageError("--config needs a file", flag="--config")
        try:
            doc = json.loads(Path(argv[i + 1]).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {argv[i + 1]!r}: {exc}", flag="--config") from exc
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object", flag="--config")
    if not argv or argv[0] not in COMMANDS:
        if doc.get("command") in COMMANDS:
            argv = [doc["command"]] + argv
        elif not argv or argv[0].startswith("-"):
            raise UsageError(f"missing command (one of {', '.join(COMMANDS)})")
    command = argv[0]
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    sp = _subparser(command)
    saved = {a.dest: a.default for a in sp._actions}
    try:
        sp.set_defaults(**_config_defaults(command, doc))
        ns = _PARSER.parse_args(argv)
    finally:
        sp.set_defaults(**saved)
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "format", "config")}
    for dest in REQUIRED.get(command, ()):
        if params.get(dest) in (None, []):
            flag = _DEST_TO_FLAG.get(dest, dest)
            raise UsageError(f"{command} needs --{flag}", flag=f"--{flag}")
    return RunConfig(command, params, ns.out, ns.format or "json")


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _cfg(p):
    kw = {}
    if p.get("tol") is not None:
        kw["abs_tol"] = p["tol"]
    if p.get("rule"):
        kw["rule"] = p["rule"]
    if p.get("panels") is not None:
        kw["base_panels"] = p["panels"]
    try:
        return QuadratureConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc), flag="--tol") from exc


def _get(p, key, default):
    v = p.get(key)
    return default if v is None else v


def _grid_of(p):
    step = p.get("grid_step")
    return ex.ShiftGrid(p["grid_min"], p["grid_max"], step, "phase-locked")


def _heights(p):
    if p.get("t"):
        return np.asarray(p["t"], dtype=float)
    if p.get("t_from") is None or p.get("t_to") is None:
        raise UsageError("give --t values or --from/--to", flag="--t")
    step = _get(p, "step", 0.1)
    if not step > 0:
        raise UsageError("--step must be > 0", flag="--step")
    n = int(math.floor((p["t_to"] - p["t_from"]) / step + 1e-9))
    return p["t_from"] + step * np.arange(n + 1)


def _table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{x:.15g}" if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def _emit_table(cfg, name, header, rows):
    text = _table(header, rows)
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    for path in output_paths(cfg.output_path, name, cfg.format):
        if path.suffix == ".json":
            path.write_text(json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n")
        else:
            path.write_text(text)


def _emit_record(cfg, rec):
    if cfg.output_path is None:
        sys.stdout.write(rec.to_json())
    else:
        write_record(rec, cfg.output_path, cfg.format)
    return {"pass": 0, "informational": 0, "fail": 1}[rec.verdict]


def _run_eval(cfg, p):
    z = zeta(complex(p["sigma"], p["t"]), _cfg(p).accuracy())
    if cfg.output_path is None:
        print(f"{z.real:.15g} {z.imag:.15g}")
    else:
        _emit_table(cfg, "eval", ["sigma", "t", "re", "im"], [[p["sigma"], p["t"], z.real, z.imag]])
    return 0


def _run_theta(cfg, p):
    t = _heights(p)
    th = np.atleast_1d(riemann_siegel_theta(t))
    _emit_table(cfg, "theta", ["t", "theta"], [[float(a), float(b)] for a, b in zip(t, th)])
    return 0


def _run_z(cfg, p):
    t = _heights(p)
    z, im = hardy_z_array(t, _cfg(p).accuracy())
    _emit_table(cfg, "z", ["t", "Z", "residual_imag"],
                [[float(a), float(b), float(c)] for a, b, c in zip(t, z, im)])
    return 0


def _run_zeros(cfg, p):
    zs = scan_zero_ordinates(_get(p, "t_from", 0.0), p["t_to"], p.get("grid_step"))
    if cfg.output_path is None:
        write_zeros_csv(sys.stdout, zs)
    else:
        for path in output_paths(cfg.output_path, "zeros", "csv" if cfg.format != "json" else "json"):
            if path.suffix == ".json":
                path.write_text(json.dumps([{"ordinate": z.ordinate, "bracket_width": z.bracket_width}
                                            for z in zs], indent=2) + "\n")
            else:
                write_zeros_csv(path, zs)
    return 0


def _run_mean(cfg, p):
    seg = LineSegment(p["sigma"], p["T"], _get(p, "delta", 1.0))
    v = short_interval_mean(seg, _cfg(p))
    if cfg.output_path is None:
        print(f"{v:.15g}")
    else:
        _emit_table(cfg, "mean", ["sigma", "T", "delta", "value"],
                    [[seg.sigma, seg.t_start, seg.length, v]])
    return 0


def _run_lemma2(cfg, p):
    Ts = p["T"]
    Cs = _get(p, "C", [0.0])
    A, B = _get(p, "A", 0.0), _get(p, "B", 1.0)
    if len(Ts) == 1 and len(Cs) == 1:
        rec = ex.sine_phase_average(A, B, Cs[0], Ts[0], _cfg(p))
    else:
        rec = ex.sine_phase_sweep(A, B, Cs, Ts, _cfg(p))
    return _emit_record(cfg, rec)


def _run_bound(cfg, p):
    H = _get(p, "H", 1.0)
    f = parse_target(_get(p, "target", "const:1"), H)
    G = parse_weight(_get(p, "weight", "unit"))
    seg = LineSegment(_get(p, "sigma", 0.5), p["grid_min"], f.domain_length)
    rec = ex.nonuniversality_bound_run(f, G, seg, _grid_of(p), _cfg(p),
                                       slack=_get(p, "slack", ex.DEFAULT_SLACK))
    return _emit_record(cfg, rec)


def _run_convexity(cfg, p):
    sigma, delta, A = p["sigma"], _get(p, "delta", 1.0), _get(p, "A", 1.0)
    M = p.get("M")
    if M is None:
        M = ex.certified_M(ex.lemma1_parameters(sigma, delta, math.e, A, t0=p["T"]))
    params = ex.lemma1_parameters(sigma, delta, M, A, t0=p["T"])
    return _emit_record(cfg, ex.convexity_check(params, _cfg(p)))


def _run_growth(cfg, p):
    rec = ex.growth_exponent_fit(p["sigma"], _get(p, "delta", 1.0), _get(p, "T", [1e2, 1e3, 1e4]),
                                 _cfg(p), block=_get(p, "block", 64))
    return _emit_record(cfg, rec)


def _run_search(cfg, p):
    H = _get(p, "H", 1.0)
    f = parse_target(_get(p, "target", "const:0"), H)
    seg = LineSegment(p["sigma"], p["grid_min"], f.domain_length)
    return _emit_record(cfg, ex.translate_search(f, seg, _grid_of(p), _get(p, "norm", "L1"), _cfg(p)))


def _run_density(cfg, p):
    H = _get(p, "H", 0.25)
    f = parse_target(_get(p, "target", "const:1"), H)
    seg = LineSegment(p["sigma"], 0.0, f.domain_length)
    rec = ex.density_measure(f, seg, p["eps"], p["T_max"], _get(p, "grid_step", H), _cfg(p),
                             scaled=bool(p.get("scaled")))
    return _emit_record(cfg, rec)


def _run_explore(cfg, p):
    H = _get(p, "H", 1.0)
    f = parse_target(_get(p, "target", "const:0"), H)
    rec = ex.z_universality_search(f, f.domain_length, _grid_of(p), _get(p, "mode", "Z"), _cfg(p))
    return _emit_record(cfg, rec)


def _run_report(cfg, p):
    files = []
    for item in p["inputs"]:
        path = Path(item)
        files += sorted(path.glob("*.json")) if path.is_dir() else [path]
    rows, worst = [], 0
    for path in files:
        try:
            rec = ExperimentRecord.from_dict(json.loads(path.read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise UsageError(f"{path} is not an experiment record: {exc}", flag="inputs") from exc
        rows.append([str(path), rec.name, rec.verdict, float(rec.runtime_seconds)])
        worst = max(worst, 1 if rec.verdict == "fail" else 0)
    _emit_table(cfg, "report", ["file", "name", "verdict", "runtime_seconds"], rows)
    return worst


_DISPATCH = {"eval": _run_eval, "theta": _run_theta, "z": _run_z, "zeros": _run_zeros,
             "mean": _run_mean, "lemma2": _run_lemma2, "bound": _run_bound,
             "convexity": _run_convexity, "growth": _run_growth, "search": _run_search,
             "density": _run_density, "explore-z": _run_explore, "report": _run_report}


def run(cfg: RunConfig):
    p = cfg.parameters
    if p.get("threads") is not None:
        set_default_threads(p["threads"])
    if p.get("save_config"):
        d = cfg.to_dict()
        d.pop("save-config", None)
        Path(p["save_config"]).write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
    return _DISPATCH[cfg.command](cfg, p)


def _fail(kind, exc, code, flag=None):
    obj = {"error": kind, "type": type(exc).__name__, "message": str(exc)}
    if flag:
        obj["flag"] = flag
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                code = run(parse_args(argv))
            finally:
                for w in caught:
                    sys.stderr.write(json.dumps({"warning": w.category.__name__,
                                                 "message": str(w.message)}) + "\n")
        return code
    except UsageError as exc:
        return _fail("usage", exc, 2, exc.flag)
    except DomainError as exc:
        return _fail("domain", exc, 2)
    except (ZlabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        return _fail("numeric", exc, 3)
    except OSError as exc:
        return _fail("io", exc, 3)


if __name__ == "__main__":
    sys.exit(main())
