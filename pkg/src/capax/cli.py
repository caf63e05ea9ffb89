"""Command-line entry point.

    capax ech --weights 1,2 --count 50 --format csv
    capax embed --src 1,2 --dst 1,1 --jmax 200
    capax icheck --family family.json
    capax shell --r 21/20 --k 2 --n 2 --a0 1/40 --samples 5 --check all
    capax order --instance inst.json --table caps.json --check generate --target t.json
    capax kink --a0 2 --grid auto --h 1/100 --jmax 200
    capax selftest

Rationals are read and written as "p/q" strings ("inf" for +infinity).
Exit codes: 0 success, 1 domain error, 2 resource limit, 64 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import contextlib
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

from capax import __version__
from capax.acceptance import DEFAULT_SEED, run_all
from capax.ech import MAX_PREFIX, ech_prefix
from capax.ellipsoid import DEFAULT_TRUNCATION, embedding_factor, parse_weights
from capax.errors import CapaxError, ResourceLimitError
from capax.exact import as_rat, format_ext, format_rat, parse_ext
from capax.kink import auto_grid, capacity_curve, kink_certificate
from capax.order import (
    CapacityTable,
    ScalableInstance,
    almost_order_recognizing,
    can_monotonely_generate,
)
from capax.partitions import check_prop_hypotheses, is_I_collection, normalize_family
from capax.shells import (
    ShellSpec,
    build_family,
    check_normalized_hypotheses,
    separation_bound,
)

EX_OK, EX_DOMAIN, EX_RESOURCE, EX_USAGE = 0, 1, 2, 64


@dataclass(frozen=True)
class RunConfig:
    default_truncation_j: int = DEFAULT_TRUNCATION
    max_prefix: int = MAX_PREFIX
    output_format: str = "json"
    seed: int = DEFAULT_SEED
    threads: int = 1

    def __post_init__(self):
        for name in ("default_truncation_j", "max_prefix", "threads"):
            if getattr(self, name) < 1:
                raise CapaxError(f"config value {name} must be positive")
        if self.output_format not in ("json", "csv"):
            raise CapaxError("output_format must be json or csv")


def load_config(path: str | None, env=os.environ) -> RunConfig:
    """Defaults, then the ``key = value`` file, then CAPAX_THREADS if the file left threads unset."""
    values: dict = {}
    if path:
        parser = configparser.ConfigParser()
        try:
            parser.read_string("[capax]\n" + Path(path).read_text())
        except (OSError, configparser.Error) as exc:
            raise CapaxError(f"cannot read config {path}: {exc}") from None
        values = dict(parser["capax"])
    if "threads" not in values and env.get("CAPAX_THREADS"):
        values["threads"] = env["CAPAX_THREADS"]
    kwargs = {}
    for key, raw in values.items():
        if key not in RunConfig.__dataclass_fields__:
            raise CapaxError(f"unknown config key {key!r}")
        kwargs[key] = raw if key == "output_format" else _int(raw, key)
    return RunConfig(**kwargs)


def _int(raw: str, what: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise CapaxError(f"{what} must be an integer, got {raw!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting flags given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key = value file with defaults")
    common.add_argument("--format", choices=["json", "csv"], dest="fmt")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int)

    p = _Parser(prog="capax", description=__doc__.split("\n")[0], parents=[common])
    p.add_argument("--version", action="version", version=f"capax {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ech", parents=[common], help="prefix of the ECH capacity sequence")
    s.add_argument("--weights", required=True)
    s.add_argument("--count", type=int, required=True)

    s = sub.add_parser("embed", parents=[common], help="ECH bound on the ellipsoid embedding factor")
    s.add_argument("--src", required=True)
    s.add_argument("--dst", required=True)
    s.add_argument("--jmax", type=int)

    s = sub.add_parser("icheck", parents=[common], help="decide I-collection status of a family")
    s.add_argument("--family", required=True)
    s.add_argument("--ell", type=int, help="also check the sufficient conditions with this ell")

    s = sub.add_parser("shell", parents=[common], help="shell family, hypotheses, separation bound")
    s.add_argument("--r", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--a0", required=True)
    s.add_argument("--samples", type=int, default=5)
    s.add_argument("--check", choices=["all", "family", "hypotheses", "normalized", "separation"], default="all")
    s.add_argument("--unchecked", action="store_true", help="allow inadmissible r, a0")

    s = sub.add_parser("order", parents=[common], help="order-recognition / monotone generation")
    s.add_argument("--instance", required=True)
    s.add_argument("--table", required=True)
    s.add_argument("--check", choices=["recognize", "generate"], default="recognize")
    s.add_argument("--target")

    s = sub.add_parser("kink", parents=[common], help="capacity curve of nested ellipsoids and its kink")
    s.add_argument("--a0", required=True)
    s.add_argument("--grid", default="auto", help="'auto' or comma-separated rationals")
    s.add_argument("--h", default="1/100")
    s.add_argument("--jmax", type=int, default=200)
    s.add_argument("--curve-csv", help="also write the curve as CSV to this path")

    sub.add_parser("selftest", parents=[common], help="run the acceptance criteria")
    return p


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CapaxError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CapaxError(f"{path} is not valid JSON: {exc}") from None


def _load_family(path: str):
    raw = _read_json(path)
    if not isinstance(raw, list):
        raise CapaxError("family file must be a JSON list of {a, values}")
    try:
        return normalize_family(
            (as_rat(m["a"]), {k: as_rat(v) for k, v in m["values"].items()}) for m in raw
        )
    except (KeyError, TypeError, AttributeError):
        raise CapaxError("family entries need 'a' and 'values' fields") from None


@contextlib.contextmanager
def _mapper(threads: int):
    if threads <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield pool.map


def cmd_ech(args, cfg):
    weights = [as_rat(w) for w in args.weights.split(",") if w.strip()]
    prefix = ech_prefix(weights, args.count, cfg.max_prefix)
    if cfg.output_format == "csv":
        rows = ["j,value,value_float"]
        rows += [f"{j},{format_rat(v)},{float(v):.12g}" for j, v in enumerate(prefix.values)]
        return "\n".join(rows) + "\n"
    return {
        "weights": [format_rat(w) for w in prefix.weights],
        "count": len(prefix),
        "values": [format_rat(v) for v in prefix.values],
    }


def cmd_embed(args, cfg):
    src, dst = parse_weights(args.src), parse_weights(args.dst)
    J = args.jmax or cfg.default_truncation_j
    v = embedding_factor(src, dst, J)
    return {
        "src": [format_rat(w) for w in src.weights],
        "dst": [format_rat(w) for w in dst.weights],
        "factor": format_rat(v.factor),
        "binding_index": v.binding_index,
        "truncation_j": v.truncation_j,
        "truncated": v.truncated,
        "volume_bound_pow": format_rat(v.volume_bound_pow),
        "volume_bound_sq": format_rat(v.volume_bound_pow) if v.dim == 2 else None,
        "volume_limited": v.volume_limited,
        "exact_in_limit": v.exact_in_limit,
        "units": "pi",
    }


def cmd_icheck(args, cfg):
    family = _load_family(args.family)
    with _mapper(cfg.threads) as mapper:
        rep = is_I_collection(family, mapper=mapper)
    out = rep.to_json()
    if args.ell is not None:
        out["hypotheses"] = check_prop_hypotheses(family, args.ell).to_json()
    return out


def cmd_shell(args, cfg):
    spec = ShellSpec(
        as_rat(args.r), args.k, args.n, as_rat(args.a0), args.samples, check_bounds=not args.unchecked
    )
    family = build_family(spec)
    out = {"spec": spec.to_json(), "admissible": spec.admissible}
    want = args.check
    if want in ("all", "family"):
        out["family"] = family.to_json()
    if want in ("all", "hypotheses"):
        out["hypotheses"] = check_prop_hypotheses(family, 2).to_json()
    if want in ("all", "normalized") and spec.k == 2:
        out["normalized"] = check_normalized_hypotheses(spec).to_json()
    if want in ("all", "separation"):
        with _mapper(cfg.threads) as mapper:
            out["separation"] = separation_bound(family, mapper=mapper).to_json()
    return out


def _load_instance(path: str) -> ScalableInstance:
    raw = _read_json(path)
    try:
        elems = [
            ([as_rat(x) for x in e["base"]], as_rat(e.get("scale", "1")))
            for e in raw["elements"]
        ]
        return ScalableInstance(raw["kind"], elems, int(raw.get("truncation_j", DEFAULT_TRUNCATION)))
    except (KeyError, TypeError, AttributeError):
        raise CapaxError("instance file needs 'kind' and 'elements' [{base, scale}]") from None


def _values(raw) -> list:
    return [parse_ext(str(v)) for v in raw]


def cmd_order(args, cfg):
    inst = _load_instance(args.instance)
    raw = _read_json(args.table)
    if not isinstance(raw, dict):
        raise CapaxError("table file must map capacity names to value lists")
    table = CapacityTable({k: _values(v) for k, v in raw.items()})
    problems = table.violations(inst)
    if args.check == "recognize":
        verdict = almost_order_recognizing(inst, table)
    else:
        if not args.target:
            raise CapaxError("--check generate needs --target")
        t = _read_json(args.target)
        verdict = can_monotonely_generate(inst, table, _values(t["values"] if isinstance(t, dict) else t))
    return {
        "check": args.check,
        "holds": verdict.holds,
        "witness": list(verdict.witness) if verdict.witness else None,
        "table_violations": problems,
    }


def cmd_kink(args, cfg):
    a0, h = as_rat(args.a0), as_rat(args.h)
    grid = auto_grid(a0, h) if args.grid == "auto" else [as_rat(x) for x in args.grid.split(",")]
    grid = sorted(set(grid) | {a0 - h, a0, a0 + h})
    curve = capacity_curve(a0, grid, args.jmax)
    if args.curve_csv:
        Path(args.curve_csv).write_text(curve.to_csv())
    if cfg.output_format == "csv":
        return curve.to_csv()
    return {
        "certificate": kink_certificate(curve, h).to_json(),
        "truncation_j": curve.truncation_j,
        "curve": [{"a": format_rat(a), "value": format_rat(v)} for a, v in curve.points],
        "curve_violations": curve.violations(),
        "values_are": "ECH upper bounds",
    }


def cmd_selftest(args, cfg):
    results = run_all(echo=lambda line: print(line, file=sys.stderr))
    return {
        "passed": all(r.passed for r in results),
        "criteria": [{"number": r.number, "name": r.name, "pass": r.passed, "detail": r.detail} for r in results],
    }


COMMANDS = {
    "ech": cmd_ech,
    "embed": cmd_embed,
    "icheck": cmd_icheck,
    "shell": cmd_shell,
    "order": cmd_order,
    "kink": cmd_kink,
    "selftest": cmd_selftest,
}


def _emit(result, cfg: RunConfig, out) -> None:
    if isinstance(result, str):
        out.write(f"# seed={cfg.seed}\n" + result)
        return
    result = {**result, "seed": cfg.seed}
    out.write(json.dumps(result, indent=2) + "\n")


def run(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(getattr(args, "config", None))
        overrides = {}
        for flag, key in (("fmt", "output_format"), ("seed", "seed"), ("threads", "threads")):
            if hasattr(args, flag):
                overrides[key] = getattr(args, flag)
        cfg = replace(cfg, **overrides)
        result = COMMANDS[args.command](args, cfg)
        _emit(result, cfg, out)
        if args.command == "selftest" and not result["passed"]:
            return EX_DOMAIN
        return EX_OK
    except ResourceLimitError as exc:
        _error(exc, "resource_limit")
        return EX_RESOURCE
    except CapaxError as exc:
        _error(exc, "domain")
        return EX_DOMAIN


def _error(exc: Exception, kind: str) -> None:
    print(json.dumps({"error": str(exc), "kind": kind}), file=sys.stderr)


def main() -> None:
    sys.exit(run())
