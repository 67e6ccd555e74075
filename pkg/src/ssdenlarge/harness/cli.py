"""Command line front end: ``verify``, ``gen`` and ``eval``.

Exit codes: 0 ok, 1 check mismatch, 2 config error, 3 internal or solver error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from importlib import resources
from pathlib import Path

from ..errors import ConfigError, SsdError
from ..generators import KINDS, gen_random_instances
from ..reports import encode_tree
from ..spaces import space_from_spec
from .config import SuiteConfig, as_point, fn_from_spec, load_config
from .suite import EXIT_CONFIG, EXIT_ERROR, EXIT_OK, run_suite


def default_suite_path() -> Path:
    return Path(str(resources.files("ssdenlarge.harness") / "default_suite.json"))


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_verify(args) -> int:
    cfg = load_config(args.config or default_suite_path())
    fmt = args.format or cfg.output.get("format", "json")
    out = args.out or cfg.output.get("path")
    result = run_suite(cfg, only=args.only, seed_override=args.seed_override)
    _write(result.to_json() if fmt == "json" else result.to_text(), out)
    if out is not None:
        # timing is kept out of the canonical report
        Path(str(out) + ".timing.json").write_text(
            json.dumps(result.timing, indent=2) + "\n", encoding="utf-8")
        if fmt == "json":
            sys.stderr.write(result.to_text())
    return result.exit_code


def cmd_gen(args) -> int:
    specs = gen_random_instances(args.kind, args.count, args.dim, args.seed,
                                 points=args.points, pieces=args.pieces)
    sys.stdout.write(json.dumps(specs, indent=2) + "\n")
    return EXIT_OK


def _fn_arg(text, space):
    p = Path(text)
    raw = json.loads(p.read_text(encoding="utf-8") if p.is_file() else text)
    cfg = SuiteConfig(seed=0)
    if space:
        cfg.spaces["space"] = space_from_spec(space)
    return fn_from_spec(raw, cfg)


def cmd_eval(args) -> int:
    try:
        f = _fn_arg(args.fn, args.space)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--fn is neither a file nor valid JSON: {exc}") from exc
    rows = []
    for at in args.at:
        b = as_point(at, f.dim)
        if args.conjugate:
            v = f.conjugate(b)
        else:
            v = f(b)
        rows.append((b.tolist(), v))
    if args.csv:
        w = csv.writer(sys.stdout)
        w.writerow([f"b{i}" for i in range(f.dim)] + ["value"])
        for b, v in rows:
            w.writerow(b + [repr(float(v))])
    else:
        for b, v in rows:
            sys.stdout.write(json.dumps(encode_tree({"point": b, "value": float(v)})) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssdenlarge",
                                 description="Verify enlargements of q-positive sets in SSD spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a check suite")
    v.add_argument("--config", help="suite JSON (default: the bundled default suite)")
    v.add_argument("--only", action="append", help="run only this check (repeatable)")
    v.add_argument("--seed-override", type=int, default=None)
    v.add_argument("--format", choices=("json", "text"), default=None)
    v.add_argument("--out", help="write the report here (timing goes to <out>.timing.json)")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="print seeded random set specs")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--points", type=int, default=5, help="size of finite sets")
    g.add_argument("--pieces", type=int, default=None, help="affine pieces of subdiff sets")
    g.set_defaults(func=cmd_gen)

    e = sub.add_parser("eval", help="evaluate a function spec at points")
    e.add_argument("--fn", required=True, help="function spec as JSON text or a JSON file")
    e.add_argument("--at", action="append", required=True, help="point, e.g. '1,2' (repeatable)")
    e.add_argument("--conjugate", action="store_true", help="evaluate f* instead of f")
    e.add_argument("--space", help="space preset for specs that need one (plus_q, quad_on_graph)")
    e.add_argument("--csv", action="store_true", help="emit CSV rows (point, value)")
    e.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except SsdError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR if args.command == "verify" else EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"I/O error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
