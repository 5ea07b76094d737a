"""Command-line entry point: ``torsion-bench <command>``.

Exit codes: 0 success, 1 identity failure, 2 usage error, 3 numerical or
calibration failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from . import identities as ids
from . import metrized_complex as mc
from . import special_zeta as sz
from .errors import (
    CalibrationFailure, DegenerateInput, DomainError, NumericalFailure, PreconditionError, UnsupportedInput,
)
from .model_spaces import fiber_from_dict
from .torsion_engine import Mode, calibrate, evaluate_candidates, torsion

OK, IDENTITY_FAILURE, USAGE, NUMERICAL = 0, 1, 2, 3


def default_config_text() -> str:
    return resources.files("torsion_bench").joinpath("data/default_config.json").read_text()


def _param(text: str):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _cmd_verify(args) -> int:
    cfg = ids.ScenarioConfig(args.identity_id, dict(args.param), args.tol, args.mode)
    reports = ids.run_identity(cfg)
    sys.stdout.write(ids.report_payload(reports))
    return OK if all(r.passed for r in reports) else IDENTITY_FAILURE


def _cmd_report(args) -> int:
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise DomainError(f"cannot read config: {exc}") from exc
    else:
        text = default_config_text()
    reports = ids.run_all(ids.parse_config(text))
    payload = ids.report_payload(reports)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    for r in reports:
        flag = "pass" if r.passed else "FAIL"
        print(f"{flag} {r.identity_id:6} residual {r.residual:.3e} tol {r.tolerance:g} {r.mode}", file=sys.stderr)
    return OK if all(r.passed for r in reports) else IDENTITY_FAILURE


def _cmd_complex(args) -> int:
    c = mc.load(args.file)
    diag = mc.validate(c)
    out = {"torsion": mc.torsion_acyclic(c), "max_dd_residual": diag.max_dd_residual,
           "gram_conditions": list(diag.gram_conditions)}
    print(json.dumps(out, indent=2))
    return OK


def _cmd_zeta(args) -> int:
    z = sz.zeta_DD_closed_at_0() if args.bc == "dd" else sz.zeta_DN_closed_at_0()
    print(json.dumps({"bc": args.bc, "value_at_0": z.value_at_0, "deriv_at_0": z.deriv_at_0}, indent=2))
    return OK


def _cmd_torsion(args) -> int:
    fiber = fiber_from_dict(json.loads(args.fiber))
    ts = torsion(fiber, Mode.parse(args.mode))
    print(json.dumps({"torsion": ts.value, "mode": ts.mode.value, "calibration": ts.calibration.to_dict()}, indent=2))
    return OK


def _cmd_calibrate(args) -> int:
    rows = [{"kappa": c.kappa, "applied_to": c.applied_to, "residuals": list(c.residuals), "ok": c.ok}
            for c in evaluate_candidates()]
    print(json.dumps({"candidates": rows}, indent=2))
    print(json.dumps({"selected": calibrate().to_dict()}, indent=2))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torsion-bench", description="Analytic torsion verification workbench.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one identity")
    v.add_argument("identity_id", choices=sorted(ids.REGISTRY))
    v.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE")
    v.add_argument("--tol", type=float, default=None)
    v.add_argument("--mode", default=Mode.DIRECT_SPECTRAL.value,
                   help="PaperClosedForm, DirectSpectral or both")
    v.set_defaults(func=_cmd_verify)

    r = sub.add_parser("report", help="run a scenario config and write a JSON report")
    r.add_argument("--config", help="config JSON (default: the packaged catalog)")
    r.add_argument("--out", help="report path (default: stdout)")
    r.set_defaults(func=_cmd_report)

    c = sub.add_parser("torsion-of-complex", help="torsion of an exact complex in the matrix file format")
    c.add_argument("--file", required=True)
    c.set_defaults(func=_cmd_complex)

    z = sub.add_parser("zeta", help="closed-form interval zeta data at s = 0")
    z.add_argument("--bc", choices=("dd", "dn"), required=True)
    z.set_defaults(func=_cmd_zeta)

    t = sub.add_parser("torsion", help="torsion of one fiber given as JSON")
    t.add_argument("--fiber", required=True, help='e.g. {"type": "interval", "half_length": 1, "bc": "a/r"}')
    t.add_argument("--mode", default=Mode.DIRECT_SPECTRAL.value)
    t.set_defaults(func=_cmd_torsion)

    k = sub.add_parser("calibrate", help="show every normalization candidate and the selected one")
    k.set_defaults(func=_cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, UnsupportedInput, PreconditionError, json.JSONDecodeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (NumericalFailure, CalibrationFailure, DegenerateInput) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
