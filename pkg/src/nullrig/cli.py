"""Command-line front end.

Exit codes:
    0  every check passed (skips allowed)
    1  at least one check failed
    2  configuration error (bad flags, unknown example, unsupported class)
    3  numerical error where none was expected
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import catalog as cat
from .config import FORMATS, RIGGING_MODES, RunConfig, build_config, read_config
from .errors import ConfigurationError, NullRigError, NumericalError
from .submanifold import classify, numerical_rank, pullback
from .verifier import SUITES, prepare, run_suite

SCHEMA_VERSION = "1.0"
EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def load_schema() -> dict:
    text = importlib.resources.files("nullrig").joinpath("schema/report.schema.json").read_text("utf-8")
    return json.loads(text)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return _finite(obj)


def _run_one(example: str, cfg: RunConfig) -> dict:
    rep = run_suite(example, cfg.suite, tolerance=cfg.tolerance, samples=cfg.samples, seed=cfg.seed,
                    sign=cfg.sign_convention, rigging=cfg.rigging, overrides=cfg.tolerances,
                    margin=cfg.margin)
    return rep.to_dict()


def run(cfg: RunConfig) -> dict:
    """Run the configured suites and assemble one report dict."""
    examples = cat.ids(include_rejections=False) if cfg.example == "all" else [cfg.example]
    if cfg.jobs > 1 and len(examples) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_one, examples, [cfg] * len(examples)))
    else:
        results = [_run_one(ex, cfg) for ex in examples]
    status = "fail" if any(r["status"] == "fail" for r in results) else "pass"
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "nullrig", "version": __version__},
        "config": cfg.echo(),
        "status": status,
        "examples": results,
    }
    if cfg.timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return _clean(report)


def _fmt(x) -> str:
    return "-" if x is None else f"{x:.2e}"


def format_text(report: dict) -> str:
    lines = []
    for ex in report["examples"]:
        lines.append(f"== {ex['example']} [{ex['environment']['classification']}] {ex['status'].upper()}")
        width = max(len(c["id"]) for c in ex["checks"])
        for c in ex["checks"]:
            op = ">" if c["comparison"] == "above" else "<"
            tail = f"  ({c['skip_reason']})" if c["status"] == "skipped" else ""
            lines.append(f"  {c['id']:<{width}}  {c['status']:<7}  max {_fmt(c['max_residual']):>9}"
                         f"  mean {_fmt(c['mean_residual']):>9}  tol {op} {_fmt(c['tolerance'])}{tail}")
    lines.append(f"overall: {report['status'].upper()}")
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    return format_text(report)


def report_target(path: str | None, fmt: str) -> str | None:
    """Explicit path, else a default file in ``NULLRIG_REPORT_DIR`` if set."""
    base = os.environ.get("NULLRIG_REPORT_DIR")
    if path is None:
        if not base:
            return None
        return os.path.join(base, f"nullrig-report.{'json' if fmt == 'json' else 'txt'}")
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


# ---------------------------------------------------------------------------
# describe
# ---------------------------------------------------------------------------


def describe(example: str) -> dict:
    e = cat.entry(example)
    u0 = np.asarray(e.reference, dtype=float)
    pm = pullback(e.ambient, e.immersion, u0)
    r = e.n - numerical_rank(pm.matrix)
    out = {
        "id": e.id,
        "description": e.description,
        "ambient": e.ambient_spec,
        "immersion": e.immersion_text,
        "chart_box": [list(e.box[0]), list(e.box[1])],
        "dims": {"n": e.n, "k": e.k, "r": r, "ambient_index": e.ambient.index},
        "classification": classify(e.n, e.k, r),
        "closed": e.closed,
        "catalog_rigging": e.rigging_fn is not None,
        "expected": {k: {"tag": v.tag, "note": v.note} for k, v in e.expected.items()},
        "reference_point": list(e.reference),
    }
    if e.rejection_only:
        out["frame"] = None
        return _clean(out)
    ctx = prepare(example)
    b = ctx.bundle(u0, order=2)
    out["frame"] = {
        "xi_tangent": b.val("xi_tc").T,
        "screen_tangent": b.val("screen_tc").T,
        "screen_signs": b.screen_signs,
        "N": b.val("N").T,
        "screen_transversal": b.val("W").T,
        "rigged_metric": b.val("gt"),
    }
    return _clean(out)


def describe_ini(example: str) -> str:
    """The entry as key-value sections, in the format the config reader uses."""
    d = describe(example)
    lines = ["[entry]"]
    for key in ("id", "description", "immersion", "classification", "closed", "catalog_rigging"):
        lines.append(f"{key} = {d[key]}")
    lines.append(f"ambient = {json.dumps(d['ambient'])}")
    lines.append(f"chart_box = {json.dumps(d['chart_box'])}")
    lines.append(f"reference_point = {json.dumps(d['reference_point'])}")
    lines += ["", "[run]", f"example = {example}"]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _tolerance_pair(text: str):
    cid, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected CHECK_ID=VALUE")
    try:
        return cid.strip(), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad tolerance value {val!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nullrig", description="Verify rigged null submanifold identities.")
    p.add_argument("--version", action="version", version=f"nullrig {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list catalog ids and classifications")

    d = sub.add_parser("describe", help="show an entry, its frame and classification")
    d.add_argument("id")
    d.add_argument("--format", choices=("text", "json", "ini"), default="text")

    c = sub.add_parser("check", help="run identity suites")
    c.add_argument("--config", help="INI file with [run] and [tolerances] sections")
    c.add_argument("--example", help="catalog id or 'all'")
    c.add_argument("--suite", choices=SUITES)
    c.add_argument("--tolerance", type=float, help="replace every residual tolerance")
    c.add_argument("--tol", type=_tolerance_pair, action="append", metavar="ID=VALUE",
                   help="per-check tolerance override (repeatable)")
    c.add_argument("--samples", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--sign", type=int, choices=(1, -1), dest="sign_convention")
    c.add_argument("--rigging", choices=RIGGING_MODES)
    c.add_argument("--format", choices=FORMATS)
    c.add_argument("--report", dest="report_path", help="write the report to this file")
    c.add_argument("--jobs", type=int, help="examples run in parallel processes")
    c.add_argument("--margin", type=float, help="distance kept from chart edges")
    c.add_argument("--no-timestamp", action="store_true", help="omit the timestamp for byte-stable reports")
    return p


def _cmd_list(out) -> int:
    entries = cat.catalog()
    width = max(len(e.id) for e in entries)
    for e in entries:
        tag = "  (rejection test)" if e.rejection_only else ""
        out.write(f"{e.id:<{width}}  {e.classification}{tag}\n")
    return EXIT_PASS


def _cmd_describe(args, out) -> int:
    if args.format == "ini":
        out.write(describe_ini(args.id))
        return EXIT_PASS
    d = describe(args.id)
    if args.format == "json":
        out.write(json.dumps(d, indent=2) + "\n")
        return EXIT_PASS
    for k, v in d.items():
        if isinstance(v, dict):
            out.write(f"{k}:\n")
            for kk, vv in v.items():
                out.write(f"  {kk}: {vv}\n")
        else:
            out.write(f"{k}: {v}\n")
    return EXIT_PASS


def _cmd_check(args, out) -> int:
    file_values = read_config(args.config) if args.config else {}
    flags = {k: getattr(args, k) for k in ("example", "suite", "tolerance", "samples", "seed",
                                           "sign_convention", "rigging", "format", "report_path",
                                           "jobs", "margin")}
    if args.tol:
        flags["tolerances"] = dict(args.tol)
    if args.no_timestamp:
        flags["timestamp"] = False
    cfg = build_config(file_values, flags)
    report = run(cfg)
    text = render(report, cfg.format)
    out.write(text)
    target = report_target(cfg.report_path, cfg.format)
    if target:
        folder = os.path.dirname(target)
        if folder:
            os.makedirs(folder, exist_ok=True)
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_FAIL if report["status"] == "fail" else EXIT_PASS


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage to stderr
        return int(exc.code or 0) and EXIT_CONFIG
    try:
        if args.command == "list":
            return _cmd_list(out)
        if args.command == "describe":
            return _cmd_describe(args, out)
        return _cmd_check(args, out)
    except ConfigurationError as exc:
        print(f"nullrig: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"nullrig: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NullRigError as exc:
        print(f"nullrig: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
