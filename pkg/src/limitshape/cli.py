"""Command-line front end: constructions, experiments, verification suites.

Every command writes deterministic JSON/CSV reports (and static SVG
figures) into the output directory and prints a short summary.  Exit
codes: 0 success, 2 bad specification or configuration, 3 validation
failure, 4 tolerance exceeded, 5 sampler failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import duality, maxshape, partitions, plotting, wulff
from . import weights as weights_mod
from .constants import DEFAULT_RESOLUTION, MIN_RESOLUTION
from .errors import (
    BoxTooSmallError,
    DivergenceError,
    DomainError,
    LimitShapeError,
    SamplingError,
    WeightSpecError,
    WeightValidationError,
    WindowTooSmallError,
)
from .geometry import curve_to_csv, polygon_to_csv
from .maxshape import limit_curve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_TOLERANCE = 4
EXIT_SAMPLER = 5

OUTPUT_DIR_ENV = "LIMITSHAPE_OUTPUT_DIR"
FORMATS = ("json", "csv", "svg")


def _write_atomic(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj: dict) -> None:
    _write_atomic(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


class _Outputs:
    def __init__(self, args):
        self.dir = Path(args.output_dir)
        self.formats = args.formats

    def json(self, name: str, obj: dict) -> None:
        if "json" in self.formats:
            _write_json(self.dir / f"{name}.json", obj)

    def csv(self, name: str, text: str) -> None:
        if "csv" in self.formats:
            _write_atomic(self.dir / f"{name}.csv", text)

    def svg(self, name: str, fig) -> None:
        if "svg" in self.formats:
            self.dir.mkdir(parents=True, exist_ok=True)
            plotting.save_figure(fig, self.dir / f"{name}.svg")


def _parse_formats(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    for p in parts:
        if p not in FORMATS:
            raise argparse.ArgumentTypeError(f"unknown format {p!r}")
    return parts or FORMATS


def _parse_point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}")
    return (x, y)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="limitshape",
        description="Planar weighted-perimeter minimizers, monotone-curve "
                    "maximizers, and the random Young-diagram laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                       help="number of support normals (default 4096)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed recorded in every output (default 0)")
        p.add_argument("--output-dir",
                       default=os.environ.get(OUTPUT_DIR_ENV, "."),
                       help="output directory (env LIMITSHAPE_OUTPUT_DIR)")
        p.add_argument("--formats", type=_parse_formats,
                       default=FORMATS, metavar="json,csv,svg",
                       help="subset of output formats")

    p = sub.add_parser("wulff", help="build the minimizing body")
    p.add_argument("--tau", required=True,
                   help="constant:<c> | l1 | entropy | sqrt_product | file.csv")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float, default=None)
    group.add_argument("--volume", type=float, default=None)
    common(p)

    p = sub.add_parser("maxshape", help="build the maximizing curve")
    p.add_argument("--eta", required=True,
                   help="constant:<c> | l1 | entropy | sqrt_product | file.csv")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--lambda", dest="lam", type=float, default=None)
    group.add_argument("--volume", type=float, default=None)
    common(p)

    p = sub.add_parser("verify-corollary",
                       help="compare the entropy maximizer with the limit curve")
    common(p)

    p = sub.add_parser("limit-shape", help="random Young-diagram experiment")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=200)
    common(p)

    p = sub.add_parser("duality-check", help="verify the reflected-weight identity")
    p.add_argument("--eta", default="entropy")
    p.add_argument("--n-box", type=float, default=10.0)
    p.add_argument("--p1", type=_parse_point, default=(1.0, 5.0))
    p.add_argument("--p2", type=_parse_point, default=(5.0, 1.0))
    p.add_argument("--trials", type=int, default=100)
    common(p)

    return parser


def _check_resolution(args) -> None:
    if args.resolution < MIN_RESOLUTION:
        raise _ConfigError(
            f"resolution {args.resolution} below the minimum {MIN_RESOLUTION}")


class _ConfigError(ValueError):
    pass


def _config_dict(args, **extra) -> dict:
    out = {"command": args.command, "seed": args.seed,
           "resolution": args.resolution}
    out.update(extra)
    return out


def cmd_wulff(args) -> int:
    _check_resolution(args)
    tau = weights_mod.from_spec(args.tau, weights_mod.MINIMIZING)
    out = _Outputs(args)
    if args.lam is not None:
        lam = args.lam
        result = wulff.build_result(tau, lam, args.resolution)
    else:
        target = args.volume if args.volume is not None else 1.0
        lam, result = wulff.normalize_lambda(tau, target, args.resolution)
    report = result.to_json_dict()
    report["config"] = _config_dict(args, tau=args.tau)
    out.json("wulff_result", report)
    out.csv("wulff_polygon", polygon_to_csv(result.polygon))
    out.svg("wulff_polygon",
            plotting.polygon_figure(result.polygon,
                                    f"minimizing body ({args.tau})"))
    print(f"lambda = {result.lam:.6f}")
    print(f"area = {result.area:.6f}")
    print(f"functional value = {result.functional_value:.6f}")
    return EXIT_OK


def cmd_maxshape(args) -> int:
    _check_resolution(args)
    eta = weights_mod.from_spec(args.eta, weights_mod.MAXIMIZING)
    weights_mod.require_valid(eta, weights_mod.MAXIMIZING)
    out = _Outputs(args)
    verdict = maxshape.detect_divergence(eta)
    if verdict.is_divergent:
        witnesses = []
        for gamma in (0.1, 0.01):
            wit = maxshape.divergence_witness(eta, gamma)
            witnesses.append({
                "gamma": gamma, "value": wit.value, "bound": wit.bound,
                "volume": wit.volume, "log_box_size": wit.log_box_size,
            })
        report = {
            "status": "divergent",
            "verdict": verdict.to_json_dict(),
            "witnesses": witnesses,
            "config": _config_dict(args, eta=args.eta),
        }
        out.json("maxshape_result", report)
        print("status = divergent")
        for w in witnesses:
            print(f"witness gamma={w['gamma']:g}: value {w['value']:.4f} "
                  f"> bound {w['bound']:.4f}")
        return EXIT_OK
    if args.lam is not None:
        result = maxshape.build_result(eta, args.lam, args.resolution)
    else:
        target = args.volume if args.volume is not None else 1.0
        _, result = maxshape.normalize_lambda_max(eta, target, args.resolution)
    report = result.to_json_dict()
    report["status"] = "finite"
    report["config"] = _config_dict(args, eta=args.eta)
    out.json("maxshape_result", report)
    out.csv("maxshape_curve", curve_to_csv(result.curve))
    ref = None
    if args.eta == "entropy":
        xs = np.linspace(max(result.curve.points[0, 0], 1e-3),
                         result.curve.points[-1, 0], 512)
        ref = (xs, result.lam / maxshape.LAMBDA1_ENTROPY
               * limit_curve(xs * maxshape.LAMBDA1_ENTROPY / result.lam),
               "limit curve")
    out.svg("maxshape_curve",
            plotting.curve_figure([(result.curve, f"maximizer ({args.eta})")],
                                  f"maximizing curve ({args.eta})", ref))
    print(f"lambda = {result.lam:.6f}")
    print(f"volume = {result.volume:.6f}")
    print(f"functional value = {result.functional_value:.6f}")
    return EXIT_OK


def cmd_verify_corollary(args) -> int:
    _check_resolution(args)
    out = _Outputs(args)
    report = maxshape.verify_corollary(args.resolution)
    payload = report.to_json_dict()
    payload["config"] = _config_dict(args)
    out.json("corollary_report", payload)
    _, result = maxshape.normalize_lambda_max(weights_mod.entropy(), 1.0,
                                              args.resolution)
    out.csv("corollary_curve", curve_to_csv(result.curve))
    xs = np.linspace(*report.window, 512)
    out.svg("corollary_overlay",
            plotting.curve_figure(
                [(result.curve, "constructed maximizer")],
                "constructed maximizer vs limit curve",
                (xs, limit_curve(xs), "limit curve"), report.window))
    print(f"sup distance = {report.sup_distance:.3e}")
    print(f"lambda1 = {report.lambda1:.6f}")
    print(f"volume = {report.volume:.6f}")
    print(f"v_eta = {report.v_eta:.6f}")
    if report.sup_distance > 1e-3:
        print("tolerance exceeded (sup distance > 1e-3)", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def cmd_limit_shape(args) -> int:
    _check_resolution(args)
    if args.n < 100:
        raise _ConfigError("limit-shape experiment needs --n >= 100")
    if args.samples < 1:
        raise _ConfigError("limit-shape experiment needs --samples >= 1")
    out = _Outputs(args)
    report = partitions.limit_shape_experiment(args.n, args.samples, args.seed)
    payload = report.to_json_dict()
    payload["config"] = _config_dict(args, n=args.n, samples=args.samples)
    out.json("limit_shape_report", payload)
    grid = np.asarray(report.grid)
    mean_profile = np.asarray(report.mean_profile)
    rows = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in zip(grid, mean_profile)]
    out.csv("limit_shape_mean_profile", "\n".join(rows) + "\n")
    out.svg("limit_shape_overlay",
            plotting.profile_figure(grid, mean_profile, limit_curve(grid),
                                    report.distances,
                                    f"scaled diagrams, n={args.n}, "
                                    f"{args.samples} samples"))
    print(f"mean-profile sup distance = {report.mean_sup_distance:.4f}")
    print(f"fraction within 0.15 = {report.fraction_within(0.15):.3f}")
    return EXIT_OK


def cmd_duality_check(args) -> int:
    _check_resolution(args)
    if args.trials <= 0:
        raise _ConfigError("duality-check needs --trials >= 1")
    eta = weights_mod.from_spec(args.eta, weights_mod.MAXIMIZING)
    inst = duality.DualityInstance(eta, args.n_box, args.p1, args.p2)
    curves = duality.random_monotone_curves(args.p1, args.p2, args.trials,
                                            args.seed)
    report = duality.duality_identity_check(inst, curves)
    out = _Outputs(args)
    payload = report.to_json_dict()
    payload["config"] = _config_dict(args, eta=args.eta, trials=args.trials)
    out.json("duality_report", payload)
    out.svg("duality_staircases",
            plotting.staircase_family_figure(
                curves, report.sums, report.constant,
                f"monotone family, N={args.n_box:g}"))
    print(f"constant = {report.constant:.6f}")
    print(f"max relative deviation = {report.max_relative_deviation:.3e}")
    print(f"ordering disagreements = {report.disagreements}")
    if report.max_relative_deviation > 1e-9 or report.disagreements:
        print("tolerance exceeded", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


_HANDLERS = {
    "wulff": cmd_wulff,
    "maxshape": cmd_maxshape,
    "verify-corollary": cmd_verify_corollary,
    "limit-shape": cmd_limit_shape,
    "duality-check": cmd_duality_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (_ConfigError, WeightSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (WeightValidationError, BoxTooSmallError, DomainError,
            WindowTooSmallError, DivergenceError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SamplingError as exc:
        print(f"sampler error: {exc}", file=sys.stderr)
        return EXIT_SAMPLER
    except LimitShapeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
