import json
import math
import random

import pytest

from torsion_bench import DomainError
from torsion_bench import identities as ids
from torsion_bench.cli import default_config_text

LOG2 = math.log(2)


def run(identity_id, **kw):
    params = kw.pop("params", {})
    return ids.run_identity(ids.ScenarioConfig(identity_id, params, **kw))


def test_t23_point_aa_example():
    (rep,) = run("T2.3", params={"cross_section": "point", "half_length": 1.0, "line": "a/a"}, tolerance=1e-6)
    assert rep.passed
    assert rep.lhs == pytest.approx(-2 * LOG2, abs=1e-8)
    assert rep.rhs == pytest.approx(-2 * LOG2, abs=1e-15)


def test_ms_example():
    (rep,) = run("MS", params={"half_length": 1.0, "t": 1.0}, tolerance=1e-12)
    assert rep.passed and rep.rhs == 1.0


def test_l31_random_example():
    (rep,) = run("L3.1", params={"seed": 7, "count": 100}, tolerance=1e-9)
    assert rep.passed and rep.extra["triples"] == 100


@pytest.mark.parametrize("identity_id", sorted(ids.REGISTRY))
def test_every_identity_runs_with_defaults(identity_id):
    (rep,) = run(identity_id)
    assert math.isfinite(rep.residual)
    assert rep.passed == (rep.residual <= rep.tolerance)
    assert rep.calibration.kappa == 2.0


def test_comparison_formula_is_off_by_three_log_two():
    (rep,) = run("T2.4")
    assert not rep.passed
    assert rep.lhs == pytest.approx(0.0, abs=1e-8)
    assert rep.residual == pytest.approx(3 * LOG2, abs=1e-8)


@pytest.mark.parametrize("identity_id,good", [("T3.2", "calibrated"), ("T0.2", "ray_singer")])
@pytest.mark.parametrize("l2", [1.0, 2.0])
def test_gluing_rows(identity_id, good, l2):
    bad = {"calibrated": "ray_singer", "ray_singer": "calibrated"}[good]
    (ok,) = run(identity_id, params={"l2": l2, "normalization": good})
    (off,) = run(identity_id, params={"l2": l2, "normalization": bad})
    assert ok.passed
    # the other normalization is off by (log 2)/2 rank chi(Y), chi(Y) = 2
    assert off.residual == pytest.approx(LOG2, abs=1e-8)


def test_sweep_reports_slope_mismatch():
    (rep,) = run("E2.32")
    assert rep.passed
    assert rep.extra["slope"] == pytest.approx(-1.0, abs=1e-8)
    assert rep.extra["slope_matches"] is False


def test_mode_both_gives_two_rows():
    reps = run("T2.3", mode="both")
    assert [r.mode for r in reps] == ["PaperClosedForm", "DirectSpectral"]


def test_zero_tolerance_fails_nonzero_residuals():
    (rep,) = run("T2.3", params={"line": "a/r"}, tolerance=0.0, mode="DirectSpectral")
    assert rep.residual > 0 and not rep.passed


def test_config_validation():
    with pytest.raises(DomainError):
        ids.ScenarioConfig("T9.9")
    with pytest.raises(DomainError):
        ids.ScenarioConfig("MS", {"bogus": 1})
    with pytest.raises(DomainError):
        ids.ScenarioConfig("MS", tolerance=-1.0)
    with pytest.raises(DomainError):
        run("MS", params={"t": "abc"})
    with pytest.raises(DomainError, match="line 3"):
        ids.parse_config('{"scenarios": [\n{"identity_id": "MS"},\n oops]}')
    with pytest.raises(DomainError, match="scenario 1"):
        ids.parse_config('[{"identity_id": "MS"}, {"identity_id": "nope"}]')


def test_order_does_not_depend_on_input_order(cal):
    cfg = ids.parse_config(default_config_text())
    shuffled = list(cfg)
    random.Random(1).shuffle(shuffled)
    a = ids.report_payload(ids.run_all(cfg, cal), timings=False)
    b = ids.report_payload(ids.run_all(shuffled, cal), timings=False)
    assert a == b


def test_payload_schema(cal):
    body = json.loads(ids.report_payload(run("E2.35")))
    row = body["reports"][0]
    assert {"identity_id", "parameters", "tolerance", "mode", "lhs", "rhs", "residual", "pass", "calibration",
            "runtime_ms"} <= set(row)
    assert row["calibration"] == cal.to_dict() == body["calibration"]
