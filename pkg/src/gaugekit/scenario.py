"""Scenario files: schema, catalog resolution and task execution.

A scenario is a JSON object::

    {"schema": "gaugekit/1", "name": "...", "task": "geodesic",
     "metric": "sphere2", "connection": "constant_B_u1(1.0)",
     "params": {...}, "thresholds": {"metric_name": {"max": 1e-8}}, "seed": 0}

Catalog references are either strings such as ``"rect(0, 1, 0.5, 0.5)"``
(positional literal arguments) or objects ``{"name": ..., "params": {...}}``.
Each task returns a flat ``metrics`` dictionary and a set of text artifacts.
"""
from __future__ import annotations

import ast
import math
import re
from dataclasses import dataclass, field

import jsonschema
import numpy as np

from . import gauge as conn_mod
from . import dynamics, fields, geometry, transport
from .atlas import DEFAULT_SEED, build_monopole_bundle, monopole_cocycle, validate_cocycle
from .gauge import VolumeData
from .errors import CatalogError, GaugeKitError

SCHEMA_VERSION = "gaugekit/1"
TASKS = (
    "geodesic", "kk_geodesic", "lorentz", "transport", "holonomy",
    "validate_identities", "field_residuals", "scurv_check",
)


class ScenarioError(GaugeKitError, ValueError):
    """Malformed scenario (maps to the parse-error exit code)."""


_REF = {
    "oneOf": [
        {"type": "string", "minLength": 1},
        {
            "type": "object",
            "required": ["name"],
            "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "type": "object",
    "required": ["schema", "name", "task"],
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "pattern": r"^[A-Za-z0-9_.\-]+$"},
        "description": {"type": "string"},
        "task": {"enum": list(TASKS)},
        "metric": _REF,
        "connection": _REF,
        "params": {"type": "object"},
        "thresholds": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "properties": {"max": {"type": "number"}, "min": {"type": "number"}},
                "additionalProperties": False,
                "minProperties": 1,
            },
        },
        "seed": {"type": "integer", "minimum": 0},
    },
    "additionalProperties": False,
}

NEEDS = {
    "geodesic": ("metric",),
    "kk_geodesic": ("metric", "connection"),
    "lorentz": ("metric",),
    "transport": (),
    "holonomy": ("connection",),
    "validate_identities": (),
    "field_residuals": ("metric",),
    "scurv_check": ("metric", "connection"),
}

_CALL = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(\((.*)\))?\s*$", re.S)


def parse_ref(ref):
    """``(name, args, kwargs)`` from a catalog reference."""
    if isinstance(ref, dict):
        return ref["name"], (), dict(ref.get("params", {}))
    m = _CALL.match(ref)
    if not m:
        raise ScenarioError(f"cannot parse catalog reference {ref!r}")
    name, _, inner = m.groups()
    if not inner or not inner.strip():
        return name, (), {}
    try:
        args = ast.literal_eval(f"({inner},)")
    except (ValueError, SyntaxError) as exc:
        raise ScenarioError(f"bad arguments in {ref!r}: {exc}") from None
    return name, tuple(args), {}


def _build(catalog, kind, ref):
    name, args, kwargs = parse_ref(ref)
    if name not in catalog:
        raise CatalogError(f"unknown {kind} {name!r}")
    try:
        return catalog[name](*args, **kwargs)
    except TypeError as exc:
        raise ScenarioError(f"bad parameters for {kind} {name!r}: {exc}") from None


def build_metric(ref):
    return _build(geometry.METRICS, "metric", ref)


def build_connection(ref):
    return _build(conn_mod.CONNECTIONS, "connection", ref)


def build_loop(ref):
    return _build(transport.LOOPS, "loop", ref)


FIELDS = {"coulomb": fields.coulomb_field, "plane_wave": fields.plane_wave_field,
          "uniform": lambda E=(0.0, 0.0, 0.0), B=(0.0, 0.0, 0.0): fields.maxwell_F_from_EB(E, B)}


def build_field(ref):
    return _build(FIELDS, "field", ref)


@dataclass
class Scenario:
    data: dict
    metric: object = None
    connection: object = None

    @property
    def name(self):
        return self.data["name"]

    @property
    def task(self):
        return self.data["task"]

    @property
    def params(self):
        return self.data.setdefault("params", {})

    @property
    def thresholds(self):
        return self.data.get("thresholds", {})

    @property
    def seed(self):
        return int(self.data.get("seed", 0))


def check_schema(data) -> None:
    """Structural check; raises :class:`ScenarioError` naming the offending field."""
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "scenario"
        raise ScenarioError(f"{where}: {exc.message}") from None
    for key in NEEDS[data["task"]]:
        if key not in data:
            raise ScenarioError(f"task {data['task']!r} needs a {key!r} entry")


def _arity(params, key, dim, metric_desc):
    if key in params and len(params[key]) != dim:
        raise ScenarioError(
            f"{key} has {len(params[key])} components but {metric_desc} has dimension {dim}"
        )


def load(data) -> Scenario:
    """Schema check, catalog resolution and arity checks (no numerics)."""
    check_schema(data)
    sc = Scenario(dict(data))
    if "metric" in data:
        sc.metric = build_metric(data["metric"])
    if "connection" in data:
        sc.connection = build_connection(data["connection"])
    p = sc.params
    if sc.metric is not None:
        desc = f"metric {sc.metric.name!r}"
        for key in ("x0", "v0"):
            _arity(p, key, sc.metric.dim, desc)
    if sc.connection is not None and sc.metric is not None and sc.connection.dim != sc.metric.dim:
        raise ScenarioError(
            f"connection {sc.connection.name!r} has base dimension {sc.connection.dim} "
            f"but metric {sc.metric.name!r} has dimension {sc.metric.dim}"
        )
    if "loop" in p:
        build_loop(p["loop"])
    if "field" in p:
        build_field(p["field"])
    return sc


# ---------------------------------------------------------------------------
# helpers

def _points(sc: Scenario, cfg, dim, default_box=5.0):
    """Explicit ``points`` list or ``{"count", "lower", "upper"}`` uniform samples."""
    if isinstance(cfg, list):
        pts = np.asarray(cfg, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != dim:
            raise ScenarioError(f"sample points must have {dim} coordinates")
        return pts
    cfg = cfg or {}
    rng = np.random.default_rng(sc.seed if "seed" in sc.data else cfg.get("seed", 0))
    count = int(cfg.get("count", 10))
    lo = np.asarray(cfg.get("lower", [-default_box] * dim), dtype=float)
    hi = np.asarray(cfg.get("upper", [default_box] * dim), dtype=float)
    if lo.shape != (dim,) or hi.shape != (dim,):
        raise ScenarioError(f"sample box must have {dim} coordinates")
    return rng.uniform(lo, hi, size=(count, dim))


def _fd(sc, default):
    return float(sc.params.get("fd_step", default))


def _wrap(d, chart):
    d = np.array(d, dtype=float)
    for axis in range(d.size):
        P = chart.period(axis)
        if P:
            d[axis] = (d[axis] + P / 2) % P - P / 2
    return d


def _order(steps, errs):
    errs = np.asarray(errs, dtype=float)
    if np.any(errs <= 0):
        return None
    slopes = np.diff(np.log(errs)) / np.diff(np.log(np.asarray(steps, dtype=float)))
    return float(np.min(slopes))


@dataclass
class TaskOutput:
    metrics: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)


def _variations(rng, t, dim, count):
    T0, T1 = t[0], t[-1]
    s = (t - T0) / (T1 - T0)
    ks = np.arange(1, 4)
    for _ in range(count):
        A = rng.standard_normal((3, dim))
        r = np.sin(np.pi * np.outer(s, ks)) @ A
        dr = (np.cos(np.pi * np.outer(s, ks)) * (np.pi * ks / (T1 - T0))) @ A
        yield r, dr


def first_variation_max(g, traj, count, seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for r, dr in _variations(rng, traj.t, traj.x.shape[1], count):
        worst = max(worst, abs(geometry.first_variation(g, traj.t, traj.x, r, velocities=traj.v, dr=dr)))
    return worst


# ---------------------------------------------------------------------------
# tasks

def task_geodesic(sc: Scenario) -> TaskOutput:
    g = sc.metric
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    x0 = np.asarray(p["x0"], dtype=float)
    v0 = np.asarray(p["v0"], dtype=float)
    t_span = p.get("t_span", [0.0, 1.0])
    traj = dynamics.geodesic_integrate(g, x0, v0, t_span, int(p.get("steps", 1000)))
    out.artifacts["trajectory.csv"] = traj.to_csv()
    m = out.metrics
    m["energy_drift"] = float(traj.constraint_drift.max())
    m["exited"] = int(traj.exited)
    if checks.get("straight_line"):
        ref = x0 + np.outer(traj.t - traj.t[0], v0)
        m["straight_line_deviation"] = float(np.max(np.abs(traj.x - ref)))
    if checks.get("return_to_start"):
        m["return_gap"] = float(np.max(np.abs(_wrap(traj.x[-1] - x0, g.chart))))
    if "circular_orbit" in checks:
        M = float(checks["circular_orbit"].get("M", g.params.get("M", 1.0)))
        r = float(x0[1])
        omega = traj.x[-1, 3] / traj.x[-1, 0]
        m["orbit_frequency_error"] = abs(omega**2 / (M / r**3) - 1.0)
        m["orbit_radius_drift"] = float(np.max(np.abs(traj.x[:, 1] - r)))
    if "first_variation" in checks:
        cfg = checks["first_variation"]
        m["first_variation_max"] = first_variation_max(g, traj, int(cfg.get("count", 20)), sc.seed)
    _metric_checks(sc, g, checks, m)
    return out


def _metric_checks(sc, g, checks, m):
    h = _fd(sc, geometry.CURVATURE_STEP)
    if "christoffel_zero" in checks:
        pts = _points(sc, checks["christoffel_zero"].get("points"), g.dim)
        m["christoffel_max"] = max(
            float(np.max(np.abs(geometry.levi_civita_christoffel(g, x, analytic=False)))) for x in pts
        )
    if "riemann_zero" in checks:
        pts = _points(sc, checks["riemann_zero"].get("points"), g.dim)
        m["riemann_max"] = max(
            float(np.max(np.abs(geometry.riemann_curvature(g, x, h, analytic=False).riemann))) for x in pts
        )
    if "scalar_curvature" in checks:
        cfg = checks["scalar_curvature"]
        pts = _points(sc, cfg.get("points"), g.dim)
        expected = float(cfg["expected"])
        m["scalar_curvature_error"] = max(
            abs(geometry.riemann_curvature(g, x, h).scalar - expected) for x in pts
        )
    if "ricci" in checks:
        pts = _points(sc, checks["ricci"].get("points"), g.dim)
        m["ricci_max"] = max(float(np.max(np.abs(geometry.riemann_curvature(g, x, h).ricci))) for x in pts)
    if "einstein" in checks:
        pts = _points(sc, checks["einstein"].get("points"), g.dim)
        m["einstein_residual_max"] = max(
            float(np.linalg.norm(geometry.einstein_residual(g, x, fd_step=h))) for x in pts
        )


def task_kk_geodesic(sc: Scenario) -> TaskOutput:
    g, w = sc.metric, sc.connection
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    group = w.group
    x0 = np.asarray(p["x0"], dtype=float)
    v0 = np.asarray(p["v0"], dtype=float)
    Qc = np.asarray(p.get("charge", [0.0] * group.dim), dtype=float)
    if Qc.shape != (group.dim,):
        raise ScenarioError(f"charge needs {group.dim} components for group {group.name}")
    t_span = p.get("t_span", [0.0, 10.0])
    steps = int(p.get("steps", 2000))
    chart = p.get("chart", w.charts[0])
    state = dynamics.ParticleState.with_charge(w, chart, x0, v0, group.from_coords(Qc))
    m = out.metrics
    if checks.get("compare_lorentz"):
        if group.name != "U1":
            raise ScenarioError("compare_lorentz needs a U(1) connection")
        cmp = dynamics.compare_kk_lorentz(g, w, x0, v0, float(Qc[0]), t_span, steps)
        traj = cmp.kk
        m["lorentz_gap"] = cmp.max_gap
        out.artifacts["lorentz.csv"] = cmp.lorentz.to_csv()
    else:
        traj = dynamics.kk_geodesic(g, w, state, t_span, steps)
    out.artifacts["trajectory.csv"] = traj.to_csv()
    m["charge_drift"] = traj.charge_drift
    m["energy_drift"] = float(traj.constraint_drift.max())
    m["exited"] = int(traj.exited)
    if "expected_radius" in checks:
        R = float(checks["expected_radius"])
        m["radius_error"] = abs(dynamics.cyclotron_radius(traj) - R) / R
    if checks.get("uncharged_reference"):
        ref = dynamics.geodesic_integrate(g, x0, v0, t_span, steps)
        m["uncharged_gap"] = float(np.max(np.abs(ref.x - traj.x)))
    if checks.get("cpt"):
        _, _, gap = dynamics.cpt_retrace(g, w, state, t_span, steps)
        m["cpt_gap"] = gap
    return out


def task_lorentz(sc: Scenario) -> TaskOutput:
    g = sc.metric
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    if sc.connection is not None:
        F = dynamics.em_field_from_connection(sc.connection)
    elif "B" in p:
        F = dynamics.spatial_field_from_B(p["B"])
    elif "field" in p:
        F = build_field(p["field"]).F
    else:
        raise ScenarioError("lorentz task needs a connection, a 'B' vector or a 'field'")
    x0 = np.asarray(p["x0"], dtype=float)
    v0 = np.asarray(p["v0"], dtype=float)
    traj = dynamics.lorentz_force_integrate(
        g, F, float(p.get("q_over_m", 1.0)), x0, v0, p.get("t_span", [0.0, 1.0]), int(p.get("steps", 1000))
    )
    out.artifacts["trajectory.csv"] = traj.to_csv()
    m = out.metrics
    m["speed_drift"] = float(traj.constraint_drift.max())
    m["exited"] = int(traj.exited)
    if "expected_radius" in checks:
        R = float(checks["expected_radius"])
        axes = checks.get("plane", [0, 1])
        m["radius_error"] = abs(dynamics.cyclotron_radius(traj, axes) - R)
    if checks.get("return_to_start"):
        m["return_gap"] = float(np.max(np.abs(traj.x[-1] - x0)))
    return out


def task_transport(sc: Scenario) -> TaskOutput:
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    loop = build_loop(p["loop"])
    if sc.connection is not None:
        connection = sc.connection
    elif sc.metric is not None:
        connection = transport.LeviCivita(sc.metric)
    else:
        raise ScenarioError("transport needs a metric or a connection")
    v0 = np.asarray(p["v0"], dtype=complex if sc.connection is not None else float)
    steps = int(p.get("steps", transport.STEPS_PER_UNIT))
    res = transport.parallel_transport_vector(connection, loop, v0, steps, verify=bool(checks.get("verify", True)))
    m = out.metrics
    m["norm_drift"] = res.norm_drift
    if res.step_halving_change is not None:
        m["step_halving_change"] = res.step_halving_change
        m["flagged"] = int(res.flagged)
    if sc.metric is not None and sc.connection is None and sc.metric.dim == 2:
        angle = transport.tangent_rotation_angle(sc.metric, loop.start, np.real(v0), np.real(res.value))
        m["rotation_angle"] = angle
        if "expected_angle" in checks:
            m["angle_error"] = abs(abs(angle) - abs(float(checks["expected_angle"])))
    if checks.get("reverse"):
        back = transport.parallel_transport_vector(connection, loop.reversed(), res.value, steps)
        m["reverse_gap"] = float(np.max(np.abs(back.value - v0)))
    return out


def _stokes_flux_cap(w, chart):
    """Integral of the curvature over the cap ``theta < pi/2`` (quadrature of ``F_theta_phi``)."""
    from scipy.integrate import quad

    def f(th):
        return complex(conn_mod.curvature_form(w, chart, np.array([th, 0.0]))[0, 1, 0, 0]).imag

    val, _ = quad(f, 1e-9, np.pi / 2, epsabs=1e-13, epsrel=1e-13)
    return 2 * np.pi * val


def task_holonomy(sc: Scenario) -> TaskOutput:
    w = sc.connection
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    m = out.metrics
    if "loop" in p:
        loop = build_loop(p["loop"])
        H = transport.holonomy(w, loop, int(p.get("steps", transport.STEPS_PER_UNIT)))
        m["holonomy_distance_from_identity"] = float(np.linalg.norm(H - w.group.identity(), 2))
        if w.group.name == "U1":
            m["holonomy_angle"] = float(np.angle(H[0, 0]))
        if checks.get("stokes_cap"):
            flux = _stokes_flux_cap(w, loop.start_chart)
            expected = np.exp(-1j * flux)
            m["stokes_error"] = float(abs(H[0, 0] - expected))
            m["holonomy_magnitude_error"] = float(abs(abs(np.angle(H[0, 0])) - abs(np.angle(expected))))
        if "expected_phase" in checks:
            expected = np.exp(1j * float(checks["expected_phase"]))
            m["phase_error"] = float(abs(H[0, 0] - expected))
        if checks.get("reverse"):
            back = transport.holonomy(w, loop.reversed())
            m["reverse_identity_gap"] = float(np.max(np.abs(back @ H - w.group.identity())))
    if "curvature_holonomy" in checks:
        cfg = checks["curvature_holonomy"]
        sizes = tuple(cfg.get("sizes", (0.1, 0.05, 0.025)))
        chart = cfg.get("chart", w.charts[0])
        errs, orders = [], []
        for x in cfg["points"]:
            for i, j in cfg.get("axes", [[0, 1]]):
                c = transport.compare_curvature_holonomy(w, chart, np.asarray(x, dtype=float), i, j, sizes)
                errs.append(c.extrapolation_error)
                orders.append(c.order)
        m["extrapolation_error_max"] = float(max(errs))
        m["convergence_order_min"] = float(min(orders))
    if "ambrose_singer" in checks:
        cfg = checks["ambrose_singer"]
        chart = cfg.get("chart", w.charts[0])
        base = np.asarray(cfg["base"], dtype=float)
        loops = []
        for entry in cfg["loops"]:
            i, j, s, t = entry
            loops.append(transport.rectangle(chart, base, i, j, s, t))
        rep = transport.ambrose_singer_span_check(w, base, loops, [np.asarray(x, float) for x in cfg["samples"]], chart)
        m["span_included"] = int(rep.included)
        m["rank_holonomy"] = rep.rank_holonomy
        m["rank_curvature"] = rep.rank_curvature
    return out


def task_validate_identities(sc: Scenario) -> TaskOutput:
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    m = out.metrics
    if sc.metric is not None:
        _metric_checks(sc, sc.metric, checks, m)
    w = sc.connection
    if "cocycle" in checks:
        cfg = checks["cocycle"]
        samples = int(cfg.get("samples", 2000))
        worst_int = 0.0
        for k in cfg.get("integer_charges", []):
            rep = validate_cocycle(build_monopole_bundle(k), samples, DEFAULT_SEED)
            worst_int = max(worst_int, rep.identity_violation, rep.cocycle_violation, rep.periodicity_violation)
            m[f"cocycle_pass_k{k}"] = int(rep.passed)
        m["cocycle_violation_integer_max"] = worst_int
        for k in cfg.get("fractional_charges", []):
            rep = validate_cocycle(monopole_cocycle(k), samples, DEFAULT_SEED)
            m[f"cocycle_fail_k{k}"] = int(not rep.passed)
            m[f"cocycle_violation_k{k}"] = max(rep.cocycle_violation, rep.periodicity_violation)
    if "overlap_residual" in checks:
        cfg = checks["overlap_residual"]
        cover = w.cocycle.cover
        rng = np.random.default_rng(sc.seed)
        ids = cover.ids
        worst = 0.0
        for x in cover.sample(rng, int(cfg.get("count", 200)), ids):
            worst = max(worst, conn_mod.overlap_residual(w, ids[0], ids[1], x))
        m["overlap_residual_max"] = worst
    if "bianchi" in checks:
        cfg = checks["bianchi"]
        pts = _points(sc, cfg.get("points"), w.dim, 1.0)
        h = float(cfg.get("fd_step", _fd(sc, 1e-4)))
        chart = w.charts[0]
        r1 = max(conn_mod.bianchi_residual(w, chart, x, h) for x in pts)
        r2 = max(conn_mod.bianchi_residual(w, chart, x, h / 2) for x in pts)
        m["bianchi_max"] = r1
        m["bianchi_halving_ratio"] = r1 / r2 if r2 > 0 else None
    if "gauge_covariance" in checks:
        cfg = checks["gauge_covariance"]
        pts = _points(sc, cfg.get("points"), w.dim, 1.0)
        rng = np.random.default_rng(sc.seed)
        tau = conn_mod.smooth_gauge(w.cocycle, rng)
        wt = conn_mod.gauge_transform(w, tau)
        vol = VolumeData(sc.metric if sc.metric is not None else geometry.euclidean(w.dim))
        chart = w.charts[0]
        da, dF = 0.0, 0.0
        for x in pts:
            F = conn_mod.curvature_form(w, chart, x)
            Ft = conn_mod.curvature_form(wt, chart, x)
            t = tau.tau(chart, x)
            ti = np.linalg.inv(t)
            dF = max(dF, float(np.max(np.abs(Ft - np.einsum("ab,ijbc,cd->ijad", ti, F, t)))))
            da = max(da, abs(fields.ym_action_density(w, vol, x) - fields.ym_action_density(wt, vol, x)))
        m["action_invariance_max"] = da
        m["curvature_conjugation_max"] = dF
    return out


def task_field_residuals(sc: Scenario) -> TaskOutput:
    g = sc.metric
    p = sc.params
    checks = p.get("checks", {})
    out = TaskOutput()
    m = out.metrics
    vol = VolumeData(g)
    h = _fd(sc, 1e-4)
    pts = _points(sc, p.get("points"), g.dim)
    if "field" in p:
        em = build_field(p["field"])
        r = [fields.maxwell_residuals(em, vol, x, h) for x in pts]
        m["maxwell_dF_max"] = max(a for a, _ in r)
        m["maxwell_deltaF_max"] = max(b for _, b in r)
        m["stress_trace_max"] = max(abs(fields.stress_energy_trace(em, g, x)) for x in pts)
        m["stress_divergence_max"] = max(
            float(np.max(np.abs(fields.stress_energy_divergence(em, g, x, h)))) for x in pts
        )
        m["stress_symmetry_max"] = max(
            float(np.max(np.abs(T - T.T))) for T in (fields.em_stress_energy(em, g, x) for x in pts)
        )
    w = sc.connection
    if w is not None and checks.get("yang_mills", True):
        mode = checks.get("current", "zero")
        if mode == "zero":
            J = None
        elif mode == "brute_force":
            J = lambda y: fields.brute_force_yang_mills_current(w, g, y)
        else:
            raise ScenarioError(f"unknown current {mode!r}")
        m["yang_mills_residual_max"] = max(fields.yang_mills_residual(w, vol, J, x, fd_step=h) for x in pts)
        if w.group.name == "U1" and "field" not in p:
            F_em = dynamics.em_field_from_connection(w)
            em = fields.EMField(F_em)
            m["abelian_reduction_gap"] = max(
                abs(fields.yang_mills_residual(w, vol, None, x, fd_step=h) - fields.maxwell_residuals(em, vol, x, h)[1])
                for x in pts
            )
    if w is not None and "charge_conservation" in checks:
        steps = checks["charge_conservation"].get("fd_steps", [h, h / 2])
        vals = []
        for s in steps:
            J = fields.yang_mills_field(vol, w, fd_step=s)
            vals.append(max(fields.charge_conservation_residual(w, vol, J, x, fd_step=s) for x in pts))
        m["charge_conservation_max"] = float(vals[0])
        m["charge_conservation_order"] = _order(steps, vals)
    return out


def task_scurv_check(sc: Scenario) -> TaskOutput:
    g, w = sc.metric, sc.connection
    p = sc.params
    out = TaskOutput()
    m = out.metrics
    pts = _points(sc, p.get("points"), g.dim, 1.0)
    steps = p.get("fd_steps", [_fd(sc, 1e-3)])
    per_step = []
    last = None
    for s in steps:
        gaps = []
        for x in pts:
            last = fields.scalar_curvature_decomposition_check(g, w, x, fd_step=float(s))
            gaps.append(last.gap)
        per_step.append(max(gaps))
    m["gap_max"] = float(per_step[0])
    m["gap_finest"] = float(per_step[-1])
    for key, val in last.as_dict().items():
        if key != "gap":
            m[key] = val
    if len(steps) > 1:
        m["gap_order"] = _order(steps, per_step)
    return out


RUNNERS = {
    "geodesic": task_geodesic,
    "kk_geodesic": task_kk_geodesic,
    "lorentz": task_lorentz,
    "transport": task_transport,
    "holonomy": task_holonomy,
    "validate_identities": task_validate_identities,
    "field_residuals": task_field_residuals,
    "scurv_check": task_scurv_check,
}


def execute(sc: Scenario) -> TaskOutput:
    return RUNNERS[sc.task](sc)


def evaluate_thresholds(thresholds, metrics):
    """``(passed, failures)``; a missing or non-finite metric fails its threshold."""
    failures = {}
    for name, bound in sorted(thresholds.items()):
        val = metrics.get(name)
        if val is None or (isinstance(val, float) and not math.isfinite(val)):
            failures[name] = {"measured": val, **bound, "reason": "missing"}
            continue
        if "max" in bound and not val < bound["max"]:
            failures[name] = {"measured": val, **bound}
        elif "min" in bound and not val >= bound["min"]:
            failures[name] = {"measured": val, **bound}
    return not failures, failures
