"""Command-line front end: ``gaugekit run | validate | suite``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import CatalogError, GaugeKitError
from .scenario import ScenarioError, evaluate_thresholds, execute, load

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_PARSE = 2
EXIT_CATALOG = 3
EXIT_NUMERIC = 4

DEFAULT_OUT = "gaugekit_out"


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def atomic_write(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def out_dir(cli_value) -> Path:
    return Path(os.environ.get("GAUGEKIT_OUT") or cli_value or DEFAULT_OUT)


def read_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: scenario must be a JSON object")
    return data


def _apply_overrides(data, fd_step=None, steps=None, seed=None):
    data = dict(data)
    params = dict(data.get("params", {}))
    if fd_step is not None:
        params["fd_step"] = fd_step
    if steps is not None:
        params["steps"] = steps
    data["params"] = params
    if seed is not None:
        data["seed"] = seed
    return data


def run_file(path, out=None, fd_step=None, steps=None, seed=None):
    """Run one scenario; returns ``(exit_code, summary dict or None, message)``."""
    try:
        data = _apply_overrides(read_scenario(path), fd_step, steps, seed)
        sc = load(data)
    except CatalogError as exc:
        return EXIT_CATALOG, None, f"catalog: {exc.args[0] if exc.args else exc}"
    except ScenarioError as exc:
        return EXIT_PARSE, None, f"parse: {exc}"

    target = out_dir(out)
    files = []
    try:
        with np.errstate(over="raise", invalid="raise", divide="raise"):
            result = execute(sc)
    except CatalogError as exc:
        return EXIT_CATALOG, None, f"catalog: {exc.args[0] if exc.args else exc}"
    except ScenarioError as exc:
        return EXIT_PARSE, None, f"parse: {exc}"
    except (GaugeKitError, FloatingPointError, np.linalg.LinAlgError) as exc:
        summary = {"scenario": sc.name, "status": "error", "metrics": {"error": str(exc)}, "files": []}
        atomic_write(target / f"{sc.name}.summary.json", dumps(summary))
        return EXIT_NUMERIC, summary, f"numeric: {exc}"

    for name, text in sorted(result.artifacts.items()):
        fname = f"{sc.name}.{name}"
        atomic_write(target / fname, text)
        files.append(fname)
    passed, failures = evaluate_thresholds(sc.thresholds, result.metrics)
    summary = {
        "scenario": sc.name,
        "status": "pass" if passed else "fail",
        "metrics": result.metrics,
        "files": files,
    }
    atomic_write(target / f"{sc.name}.summary.json", dumps(summary))
    message = "" if passed else "; ".join(
        f"{k}: measured {_clean(v['measured'])} vs {'max' if 'max' in v else 'min'} {v.get('max', v.get('min'))}"
        for k, v in failures.items()
    )
    return (EXIT_OK if passed else EXIT_THRESHOLD), summary, message


def validate_file(path):
    """Schema and catalog check only; ``(exit_code, message)``."""
    try:
        load(read_scenario(path))
    except CatalogError as exc:
        return EXIT_CATALOG, f"catalog: {exc.args[0] if exc.args else exc}"
    except ScenarioError as exc:
        return EXIT_PARSE, f"parse: {exc}"
    return EXIT_OK, "ok"


def _suite_job(args):
    path, out = args
    code, summary, message = run_file(path, out)
    return {"file": Path(path).name, "exit_code": code, "summary": summary, "message": message}


def run_suite(directory, out=None, jobs=1):
    """Run every ``*.json`` in ``directory`` (sorted); returns ``(exit_code, report)``."""
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        return EXIT_PARSE, {"suite": str(directory), "status": "error", "message": "no scenarios", "scenarios": []}
    tasks = [(str(f), out) for f in files]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_suite_job, tasks))
    else:
        results = [_suite_job(t) for t in tasks]
    worst = max(r["exit_code"] for r in results)
    entries = []
    for r in results:
        s = r["summary"] or {}
        entries.append({
            "file": r["file"],
            "scenario": s.get("scenario"),
            "status": s.get("status", "error"),
            "exit_code": r["exit_code"],
            "message": r["message"],
        })
    report = {
        "suite": Path(directory).name,
        "status": "pass" if worst == EXIT_OK else "fail",
        "scenarios": entries,
    }
    atomic_write(out_dir(out) / "suite_summary.json", dumps(report))
    return worst, report


def build_parser():
    parser = argparse.ArgumentParser(prog="gaugekit", description="Run gauge-geometry scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario file")
    run.add_argument("file")
    run.add_argument("--out", default=None, help=f"output directory (default {DEFAULT_OUT}; GAUGEKIT_OUT wins)")
    run.add_argument("--fd-step", type=float, default=None)
    run.add_argument("--steps", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)

    val = sub.add_parser("validate", help="check a scenario file without running it")
    val.add_argument("file")

    suite = sub.add_parser("suite", help="run every scenario in a directory")
    suite.add_argument("directory")
    suite.add_argument("--jobs", type=int, default=1)
    suite.add_argument("--out", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        code, summary, message = run_file(args.file, args.out, args.fd_step, args.steps, args.seed)
        if summary is not None:
            print(f"{summary['scenario']}: {summary['status']}")
        if message:
            print(message, file=sys.stderr)
        return code
    if args.command == "validate":
        code, message = validate_file(args.file)
        print(message, file=sys.stderr if code else sys.stdout)
        return code
    code, report = run_suite(args.directory, args.out, max(1, args.jobs))
    if not report["scenarios"]:
        print(report["message"], file=sys.stderr)
        return code
    for e in report["scenarios"]:
        line = f"{e['status']:5s} {e['file']}"
        if e["message"]:
            line += f"  ({e['message']})"
        print(line)
    print(f"suite: {report['status']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
