"""Identity catalog and scenario runner.

Every identity evaluates a left and a right side for one parameter set and
returns them in an :class:`IdentityReport`. Parameters missing from a config
are filled from the identity's defaults, so the report always records the
complete parameter set that was run.
"""
from __future__ import annotations

import functools
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import heat_kernel_1d as hk
from .errors import DomainError, UnsupportedInput
from .metrized_complex import shift_grading, sqrt2_complex, torsion_acyclic
from .model_spaces import (
    AA, AR, BCPair, Circle, Cylinder, Interval, PointSet, betti, boundary_euler, circle_arcs,
    circle_overlap_triple, euler_chars, form_spectrum, interval_end_sequence,
)
from .sequences import random_braid_triple
from .torsion_engine import CalibrationRecord, Mode, calibrate, theorem23_sweep, torsion

LOG2 = math.log(2.0)
CLOSED_TOL = 1e-10
QUAD_TOL = 1e-6


@dataclass(frozen=True)
class ScenarioConfig:
    identity_id: str
    parameters: dict = field(default_factory=dict)
    tolerance: float | None = None
    mode: str = Mode.DIRECT_SPECTRAL.value

    def __post_init__(self):
        if self.identity_id not in REGISTRY:
            raise DomainError(f"unknown identity {self.identity_id!r}; known: {', '.join(REGISTRY)}")
        if self.tolerance is not None and not self.tolerance >= 0:
            raise DomainError(f"tolerance must be non-negative, got {self.tolerance!r}")
        if self.mode != "both":
            Mode.parse(self.mode)
        unknown = set(self.parameters) - set(REGISTRY[self.identity_id].defaults)
        if unknown:
            raise DomainError(f"{self.identity_id}: unknown parameters {sorted(unknown)}")

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if not isinstance(data, dict) or "identity_id" not in data:
            raise DomainError(f"scenario needs an identity_id: {data!r}")
        extra = set(data) - {"identity_id", "parameters", "tolerance", "mode"}
        if extra:
            raise DomainError(f"unknown scenario keys {sorted(extra)}")
        tol = data.get("tolerance")
        return cls(data["identity_id"], dict(data.get("parameters") or {}),
                   None if tol is None else float(tol), data.get("mode", Mode.DIRECT_SPECTRAL.value))


@dataclass
class IdentityReport:
    identity_id: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    passed: bool
    parameters: dict
    mode: str
    calibration: CalibrationRecord
    runtime_ms: float = 0.0
    extra: dict = field(default_factory=dict)

    def sort_key(self):
        return (self.identity_id, json.dumps(self.parameters, sort_keys=True), self.mode)

    def to_dict(self, timings: bool = True) -> dict:
        out = {
            "identity_id": self.identity_id,
            "parameters": self.parameters,
            "mode": self.mode,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "calibration": self.calibration.to_dict(),
        }
        if self.extra:
            out["extra"] = self.extra
        if timings:
            out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


@dataclass(frozen=True)
class Identity:
    evaluate: Callable  # (params, mode, calibration) -> (lhs, rhs, extra)
    defaults: dict
    tolerance: float
    description: str


# ---------------------------------------------------------------------------
# helpers


@functools.lru_cache(maxsize=None)
def _torsion(fiber, mode: Mode, cal: CalibrationRecord) -> float:
    return torsion(fiber, mode, cal).value


def _cross_section(p) -> PointSet | Circle:
    kind = p["cross_section"]
    rank = int(p.get("rank", 1))
    if kind == "point":
        return PointSet(1, rank)
    if kind == "circle":
        return Circle(float(p.get("circle_length", 2.0 * math.pi)), float(p.get("holonomy", 0.0)), rank)
    raise DomainError(f"cross_section must be 'point' or 'circle', got {kind!r}")


def _lengths(text) -> list[float]:
    if isinstance(text, str):
        return [float(x) for x in text.split(",") if x.strip()]
    return [float(x) for x in text]


# ---------------------------------------------------------------------------
# evaluators


def _lemma22(p, mode, cal):
    dd, dn = hk.lemma22_by_quadrature(cal.final_factor)
    if p["bc"] == "dd":
        return dd, -4.0 * LOG2, {}
    if p["bc"] == "dn":
        return dn, -2.0 * LOG2, {}
    raise DomainError(f"bc must be 'dd' or 'dn', got {p['bc']!r}")


def _mckean_singer(p, mode, cal):
    spec = hk.IntervalSpec(float(p["half_length"]))
    t = float(p["t"])
    return hk.heat_trace(spec, hk.NN, t) - hk.heat_trace(spec, hk.DD, t), 1.0, {}


def _mixed_betti(p, mode, cal):
    bc = BCPair.parse(p["bc"])
    if not bc.mixed:
        raise DomainError("P2.1 is about mixed conditions (a/r or r/a)")
    fiber = Cylinder(_cross_section(p), float(p["half_length"]), bc)
    # harmonic forms counted from the spectrum; the topological count rides along
    zero = sum(s.zero_modes for s in form_spectrum(fiber))
    return float(zero), 0.0, {"betti": list(betti(fiber))}


def _theorem23(p, mode, cal):
    cs = _cross_section(p)
    l = float(p["half_length"])
    bc = BCPair.parse(p["line"])
    if bc not in (AR, AA):
        raise DomainError("T2.3 lines are 'a/r' and 'a/a'")
    lhs = _torsion(Cylinder(cs, l, bc), mode, cal)
    chi_y = euler_chars(cs)[0]
    t_y = 0.0 if isinstance(cs, PointSet) else _torsion(cs, mode, cal)
    if bc == AR:
        rhs = -LOG2 * chi_y
    else:
        # the log l term is the length dependence measured by E2.32; it vanishes at 2l = 2
        rhs = t_y - 2.0 * LOG2 * chi_y - chi_y * math.log(l)
    return lhs, rhs, {}


def _sweep(p, mode, cal):
    rep = theorem23_sweep(_cross_section(p), _lengths(p["lengths"]), mode, cal)
    extra = {
        "ar_spread": rep.ar_spread,
        "fit_residual": rep.fit_residual,
        "slope": rep.slope,
        "predicted_slope": rep.predicted_slope,
        "slope_matches": rep.slope_matches,
    }
    return max(rep.ar_spread, rep.fit_residual), 0.0, extra


def _sqrt2(p, mode, cal):
    r = int(p["rank"])
    return torsion_acyclic(sqrt2_complex(r)), -0.5 * r * LOG2, {}


def _comparison(p, mode, cal):
    cs = _cross_section(p)
    length, s = float(p["length"]), float(p["boundary_scale"])
    h2 = interval_end_sequence(length, 1.0, cs).complex
    h1 = interval_end_sequence(length, s, cs).complex
    chi_y = 2 * euler_chars(cs)[0]
    return torsion_acyclic(h2) - torsion_acyclic(h1), -0.5 * math.log(s) * chi_y, {}


def _additivity(p, mode, cal):
    family = p["family"]
    if family == "random":
        rng = np.random.default_rng(int(p["seed"]))
        worst = 0.0
        for _ in range(int(p["count"])):
            tr = random_braid_triple(rng)
            lhs = torsion_acyclic(shift_grading(tr.h_dd, 1)) + torsion_acyclic(tr.h)
            worst = max(worst, abs(lhs - torsion_acyclic(shift_grading(tr.h_d, 1))))
        return worst, 0.0, {"triples": int(p["count"])}
    if family == "circle_overlap":
        tr = circle_overlap_triple(float(p["l1"]), float(p["l2"]), float(p["collar"]),
                                   float(p["holonomy"]), int(p["rank"]))
        lhs = torsion_acyclic(shift_grading(tr.h_dd, 1)) + torsion_acyclic(tr.h)
        return lhs, torsion_acyclic(shift_grading(tr.h_d, 1)), {}
    raise DomainError(f"family must be 'random' or 'circle_overlap', got {family!r}")


def _comparison_formula(p, mode, cal):
    cs = _cross_section(p)
    l = float(p["half_length"])
    t_r = _torsion(Cylinder(cs, l, BCPair.parse("r/r")), mode, cal)
    t_a = _torsion(Cylinder(cs, l, AA), mode, cal)
    # Y is both ends of the fiber
    t_y = 0.0 if isinstance(cs, PointSet) else 2.0 * _torsion(cs, mode, cal)
    t_h = cal.final_factor * torsion_acyclic(interval_end_sequence(2.0 * l, 1.0, cs).complex)
    chi_y = boundary_euler(Cylinder(cs, l, AA))
    return t_r - t_a + t_y + t_h, 1.5 * LOG2 * chi_y, {}


def _gluing(constant: float):
    def evaluate(p, mode, cal):
        l1, l2 = float(p["l1"]), float(p["l2"])
        h, theta, r = float(p["collar"]), float(p["holonomy"]), int(p["rank"])
        norm = p["normalization"]
        if norm not in ("calibrated", "ray_singer"):
            raise DomainError(f"normalization must be 'calibrated' or 'ray_singer', got {norm!r}")
        t_z = _torsion(Circle(l1 + l2, theta, r), mode, cal)
        t_1 = _torsion(Interval(0.5 * (l1 + 2 * h), BCPair.parse("r/r"), r), mode, cal)
        t_2 = _torsion(Interval(0.5 * (l2 + 2 * h), AA, r), mode, cal)
        t_h = torsion_acyclic(circle_arcs(l1, l2, h, theta, r))
        k = cal.final_factor
        lhs = t_z - t_1 - t_2
        if norm == "calibrated":
            rhs = k * t_h + constant * 2 * r
        else:
            lhs, rhs = lhs / k, t_h + constant * 2 * r
        return lhs, rhs, {"T_H": t_h}

    return evaluate


_GLUE = {"l1": 1.0, "l2": 1.0, "holonomy": 0.0, "rank": 1, "normalization": "calibrated"}

REGISTRY: dict[str, Identity] = {
    "L2.2": Identity(_lemma22, {"bc": "dd"}, QUAD_TOL, "corrected interval integrals by quadrature"),
    "MS": Identity(_mckean_singer, {"half_length": 1.0, "t": 1.0}, CLOSED_TOL, "Neumann minus Dirichlet heat trace"),
    "P2.1": Identity(_mixed_betti, {"cross_section": "point", "half_length": 1.0, "bc": "a/r", "rank": 1,
                                    "holonomy": 0.0, "circle_length": 2.0 * math.pi},
                     CLOSED_TOL, "harmonic forms under mixed conditions"),
    "T2.3": Identity(_theorem23, {"cross_section": "point", "half_length": 1.0, "line": "a/a", "rank": 1,
                                  "holonomy": 0.0, "circle_length": 2.0 * math.pi},
                     QUAD_TOL, "cylinder torsion closed forms"),
    "E2.32": Identity(_sweep, {"cross_section": "point", "lengths": "0.5,1,2", "rank": 1, "holonomy": 0.0,
                               "circle_length": 2.0 * math.pi},
                      1e-8, "length dependence of cylinder torsion"),
    "E2.35": Identity(_sqrt2, {"rank": 1}, CLOSED_TOL, "torsion of the sqrt 2 scaling"),
    "E2.36": Identity(_comparison, {"cross_section": "point", "length": 2.0, "boundary_scale": 2.0, "rank": 1,
                                    "holonomy": 0.0, "circle_length": 2.0 * math.pi},
                      1e-9, "boundary-metric change in the end sequence"),
    "L3.1": Identity(_additivity, {"family": "random", "seed": 7, "count": 100, "l1": 1.0, "l2": 1.0,
                                   "collar": 0.25, "holonomy": 0.0, "rank": 1},
                     1e-9, "additivity over braid triples"),
    "T2.4": Identity(_comparison_formula, {"cross_section": "point", "half_length": 1.0, "rank": 1,
                                           "holonomy": 0.0, "circle_length": 2.0 * math.pi},
                     QUAD_TOL, "relative minus absolute torsion"),
    "T3.2": Identity(_gluing(LOG2), {**_GLUE, "collar": 0.25}, QUAD_TOL, "gluing with collars"),
    "T0.2": Identity(_gluing(0.5 * LOG2), {**_GLUE, "collar": 0.0}, QUAD_TOL, "gluing without collars"),
}


def _normalize(config: ScenarioConfig) -> dict:
    params = dict(REGISTRY[config.identity_id].defaults)
    for key, value in config.parameters.items():
        default = params[key]
        if isinstance(default, bool) or not isinstance(default, (int, float)):
            params[key] = value
        else:
            try:
                params[key] = type(default)(value)
            except (TypeError, ValueError) as exc:
                raise DomainError(f"{config.identity_id}: parameter {key}={value!r} is not a number") from exc
    return params


def run_identity(config: ScenarioConfig, calibration: CalibrationRecord | None = None) -> list[IdentityReport]:
    """Evaluate one scenario; ``mode = "both"`` yields one report per mode."""
    cal = calibrate() if calibration is None else calibration
    ident = REGISTRY[config.identity_id]
    params = _normalize(config)
    tol = ident.tolerance if config.tolerance is None else config.tolerance
    modes = list(Mode) if config.mode == "both" else [Mode.parse(config.mode)]
    out = []
    for mode in modes:
        start = time.perf_counter()
        lhs, rhs, extra = ident.evaluate(params, mode, cal)
        elapsed = 1e3 * (time.perf_counter() - start)
        resid = abs(lhs - rhs)
        out.append(IdentityReport(config.identity_id, float(lhs), float(rhs), resid, tol, bool(resid <= tol),
                                  params, mode.value, cal, elapsed, extra))
    return out


def run_all(configs, calibration: CalibrationRecord | None = None) -> list[IdentityReport]:
    """Run every scenario and return the reports in canonical order."""
    cal = calibrate() if calibration is None else calibration
    reports = [r for c in configs for r in run_identity(c, cal)]
    return sorted(reports, key=IdentityReport.sort_key)


def parse_config(text: str) -> list[ScenarioConfig]:
    """Parse a JSON config: ``{"scenarios": [...]}`` or a bare list of scenarios."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"config is not valid JSON: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if isinstance(data, dict):
        data = data.get("scenarios")
    if not isinstance(data, list):
        raise DomainError("config must be a list of scenarios or an object with a 'scenarios' list")
    out = []
    for i, item in enumerate(data):
        try:
            out.append(ScenarioConfig.from_dict(item))
        except (DomainError, UnsupportedInput, TypeError, ValueError) as exc:
            raise DomainError(f"scenario {i}: {exc}") from exc
    return out


def report_payload(reports, timings: bool = True) -> str:
    rows = [r.to_dict(timings) for r in reports]
    cal = rows[0]["calibration"] if rows else None
    body = {"calibration": cal, "all_pass": all(r.passed for r in reports), "reports": rows}
    return json.dumps(body, indent=2, sort_keys=True) + "\n"
