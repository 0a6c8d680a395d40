"""Acceptance criteria, one test (and one printed PASS/FAIL line) per criterion.

The bundled scenario directory is run once through the ``gaugekit suite`` entry
point; each criterion then re-checks the relevant metrics against its own
tolerance.  Criteria with a runtime budget re-run their scenarios in-process
and time them.

Run directly (``python3 tests/test_acceptance.py``) to print only the report.
"""
import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import pytest

from gaugekit import cli

ROOT = Path(__file__).resolve().parents[1]
SUITE_DIR = ROOT / "acceptance"
SUITE_BUDGET = 300.0

LE, GE = "<=", ">="

# id -> (title, [(scenario, metric, op, bound)], runtime budget in seconds or None)
CRITERIA = {
    1: ("flat space sanity", [
        (sc, m, LE, b)
        for sc in ("flat_euclidean3", "flat_minkowski4")
        for m, b in (("christoffel_max", 1e-12), ("riemann_max", 1e-8), ("straight_line_deviation", 1e-10))
    ], 1.0),
    2: ("unit sphere suite", [
        ("sphere_scalar_curvature", "scalar_curvature_error", LE, 1e-5),
        ("sphere_octant_transport", "angle_error", LE, 1e-4),
        ("sphere_great_circle", "return_gap", LE, 1e-5),
    ], 5.0),
    3: ("Schwarzschild vacuum and circular orbit", [
        ("schwarzschild_vacuum", "ricci_max", LE, 1e-4),
        ("schwarzschild_vacuum", "einstein_residual_max", LE, 1e-3),
        ("schwarzschild_circular_orbit", "orbit_frequency_error", LE, 1e-4),
    ], 10.0),
    4: ("curvature from small holonomy loops", [
        (sc, m, op, b)
        for sc in ("structure_monopole", "structure_constant_su2", "structure_poly_su2")
        for m, op, b in (("extrapolation_error_max", LE, 1e-5), ("convergence_order_min", GE, 1.95))
    ], None),
    5: ("Bianchi identity", [
        ("bianchi_poly_su2", "bianchi_max", LE, 1e-5),
        ("bianchi_poly_su2", "bianchi_halving_ratio", GE, 3.5),
    ], None),
    6: ("gauge covariance", [
        ("gauge_covariance_poly_su2", "action_invariance_max", LE, 1e-7),
        ("gauge_covariance_poly_su2", "curvature_conjugation_max", LE, 1e-7),
    ], None),
    7: ("charged motion as bundle geodesics", [
        ("cyclotron_kk_vs_lorentz", "charge_drift", LE, 1e-7),
        ("cyclotron_kk_vs_lorentz", "lorentz_gap", LE, 1e-4),
        ("cyclotron_kk_vs_lorentz", "radius_error", LE, 1e-3),
        ("cyclotron_kk_vs_lorentz", "cpt_gap", LE, 1e-6),
    ], None),
    8: ("Maxwell solutions and stress-energy", [
        (sc, m, LE, b)
        for sc in ("maxwell_coulomb", "maxwell_plane_wave")
        for m, b in (("maxwell_dF_max", 1e-6), ("maxwell_deltaF_max", 1e-6),
                     ("stress_trace_max", 1e-10), ("stress_divergence_max", 1e-4))
    ], None),
    9: ("monopole charge quantisation", [
        *(("monopole_cocycles", f"cocycle_pass_k{k}", GE, 1) for k in (-2, -1, 0, 1, 2)),
        ("monopole_cocycles", "cocycle_fail_k0.5", GE, 1),
        ("monopole_cocycles", "cocycle_violation_integer_max", LE, 1e-12),
        ("monopole_cocycles", "overlap_residual_max", LE, 1e-10),
        *((sc, m, LE, 1e-5)
          for sc in ("monopole_equator_k1", "monopole_equator_k2")
          for m in ("stokes_error", "holonomy_magnitude_error")),
    ], None),
    10: ("bundle scalar curvature split", [
        ("scurv_u1_constant_B", "gap_max", LE, 1e-4),
        ("scurv_su2_constant", "gap_max", LE, 1e-3),
        ("scurv_su2_constant", "gap_order", GE, 1.5),
    ], 60.0),
    11: ("charge conservation", [
        ("charge_conservation_poly_su2", "charge_conservation_max", LE, 1e-4),
        ("charge_conservation_poly_su2", "charge_conservation_order", GE, 1.5),
    ], None),
    12: ("first variation along geodesics", [
        (sc, "first_variation_max", LE, 1e-6)
        for sc in ("flat_euclidean3", "flat_minkowski4", "sphere_great_circle", "schwarzschild_circular_orbit")
    ], None),
}


def run_full_suite(out):
    env = {**os.environ, "GAUGEKIT_OUT": str(out)}
    start = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "gaugekit.cli", "suite", str(SUITE_DIR)],
                          capture_output=True, text=True, env=env)
    elapsed = time.perf_counter() - start
    metrics = {}
    for path in Path(out).glob("*.summary.json"):
        s = json.loads(path.read_text())
        metrics[s["scenario"]] = s["metrics"]
    return proc.returncode, elapsed, metrics, proc.stdout + proc.stderr


def timed_rerun(names, out):
    start = time.perf_counter()
    metrics = {}
    for name in sorted(names):
        _, summary, _ = cli.run_file(SUITE_DIR / f"{name}.json", out)
        metrics[name] = summary["metrics"] if summary else {}
    return time.perf_counter() - start, metrics


def check_criterion(cid, metrics, out):
    """Returns ``(ok, detail)``."""
    title, checks, budget = CRITERIA[cid]
    elapsed = None
    if budget is not None:
        elapsed, metrics = timed_rerun({sc for sc, *_ in checks}, out)
    failures = []
    for sc, name, op, bound in checks:
        value = metrics.get(sc, {}).get(name)
        ok = value is not None and (value <= bound if op == LE else value >= bound)
        if not ok:
            failures.append(f"{sc}.{name}={value} (need {op} {bound})")
    if elapsed is not None and elapsed >= budget:
        failures.append(f"runtime {elapsed:.2f}s over {budget:g}s")
    detail = f"{len(checks)} checks"
    if elapsed is not None:
        detail += f", {elapsed:.2f}s of {budget:g}s"
    if failures:
        detail += "; " + "; ".join(failures)
    return not failures, f"criterion {cid:2d} {title}: {detail}"


def _line(ok, text):
    return f"{'PASS' if ok else 'FAIL'}  {text}"


@pytest.fixture(scope="module")
def suite_run():
    with tempfile.TemporaryDirectory() as tmp:
        code, elapsed, metrics, log = run_full_suite(Path(tmp) / "suite")
        yield {"code": code, "elapsed": elapsed, "metrics": metrics, "log": log, "tmp": Path(tmp)}


def _report(pytestconfig, line):
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)


@pytest.mark.parametrize("cid", sorted(CRITERIA))
def test_criterion(cid, suite_run, pytestconfig):
    ok, text = check_criterion(cid, suite_run["metrics"], suite_run["tmp"] / f"c{cid}")
    _report(pytestconfig, _line(ok, text))
    assert ok, text


def test_full_suite(suite_run, pytestconfig):
    ok = suite_run["code"] == 0 and suite_run["elapsed"] < SUITE_BUDGET
    text = (f"full suite: exit {suite_run['code']}, {len(suite_run['metrics'])} scenarios, "
            f"{suite_run['elapsed']:.1f}s of {SUITE_BUDGET:g}s")
    _report(pytestconfig, _line(ok, text))
    assert ok, suite_run["log"]


def main():
    with tempfile.TemporaryDirectory() as tmp:
        code, elapsed, metrics, _ = run_full_suite(Path(tmp) / "suite")
        all_ok = True
        for cid in sorted(CRITERIA):
            ok, text = check_criterion(cid, metrics, Path(tmp) / f"c{cid}")
            all_ok &= ok
            print(_line(ok, text))
        ok = code == 0 and elapsed < SUITE_BUDGET
        all_ok &= ok
        print(_line(ok, f"full suite: exit {code}, {len(metrics)} scenarios, {elapsed:.1f}s of {SUITE_BUDGET:g}s"))
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
