"""Command line entry point.

Machine-readable JSON goes to stdout, a short human summary to stderr.
Exit codes: 0 success, 1 domain violation or failed property, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .ground import GroundSpace
from .kernels import IsotropicKernel, bound_curve, decay_class
from .mixing import MixingReport, beta_pq_r_sweep, mixing_report
from .process import DiscreteDPP, FiniteProcess, diagnose_kernel
from .verify import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    trials: int = 100
    kernel: Optional[str] = None
    law: Optional[str] = None
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if self.command in ("validate",) and not self.kernel:
            raise UsageError("--kernel is required")
        if self.command in ("beta", "sweep") and not (self.kernel or self.law):
            raise UsageError("one of --kernel or --law is required")


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")


def _say(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _indices(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}") from None


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_source(cfg: RunConfig):
    if cfg.kernel:
        data = _read_json(cfg.kernel)
        try:
            return DiscreteDPP.from_dict(data)
        except (KeyError, TypeError) as exc:
            raise UsageError(f"malformed kernel file: {exc}") from exc
    data = _read_json(cfg.law)
    try:
        return FiniteProcess.from_dict(data)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed law file: {exc}") from exc


def cmd_validate(cfg: RunConfig) -> int:
    data = _read_json(cfg.kernel)
    try:
        space = GroundSpace.from_dict(data["space"])
        matrix = np.array(data["matrix"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed kernel file: {exc}") from exc
    report = diagnose_kernel(space, matrix)
    _emit(report)
    if report["valid"]:
        _say("kernel valid" + "".join(f"; {n}" for n in report["notes"]))
        return EXIT_OK
    _say("kernel invalid: " + "; ".join(report["problems"]))
    return EXIT_VIOLATION


def cmd_verify(cfg: RunConfig) -> int:
    suite = cfg.extra["suite"]
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    result = run_suite(suite, cfg.trials, cfg.seed)
    _emit(result.to_dict())
    _say(
        f"{suite}: {result.passed}/{result.trials} passed, worst margin {result.worst_margin:.3e}"
        + (f", {result.logged} per-set exceptions logged" if result.logged else "")
    )
    return EXIT_OK if result.ok else EXIT_VIOLATION


def _write_report_csv(report: MixingReport, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(report.to_csv())


def cmd_beta(cfg: RunConfig) -> int:
    source = _load_source(cfg)
    a, b = cfg.extra["A"], cfg.extra["B"]
    if set(a) & set(b):
        _say("regions must be disjoint")
        return EXIT_VIOLATION
    report = mixing_report(source, a, b)
    _emit(report.to_dict())
    if cfg.out:
        _write_report_csv(report, cfg.out)
    _say(f"beta = {report.beta_exact:.6g}, intensity bound = {report.bound_theorem1:.6g}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    source = _load_source(cfg)
    report = beta_pq_r_sweep(source, cfg.extra["p"], cfg.extra["q"], cfg.extra["r"])
    _emit(report.to_dict())
    if cfg.out:
        _write_report_csv(report, cfg.out)
    _say(f"max beta = {report.beta_exact:.6g} at A={list(report.A)}, B={list(report.B)}")
    return EXIT_OK


def cmd_curve(cfg: RunConfig) -> int:
    x = cfg.extra
    try:
        kernel = IsotropicKernel.parse(x["family_spec"])
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad kernel spec {x['family_spec']!r}: {exc}") from exc
    if not x["r_min"] < x["r_max"] or x["steps"] < 2:
        raise UsageError("need r-min < r-max and steps >= 2")
    grid = np.linspace(x["r_min"], x["r_max"], x["steps"])
    rows = bound_curve(kernel, x["p"], x["q"], grid)
    handle = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["r", "omega", "bound_general", "bound_rank"])
        for r, om, general, rank in rows:
            writer.writerow([repr(r), repr(om), repr(general), "" if rank is None else repr(rank)])
    finally:
        if cfg.out:
            handle.close()
    cls = decay_class(kernel)
    if cfg.out:
        _emit({"family": kernel.family, "decay_class": cls, "rows": len(rows), "out": cfg.out})
    _say(f"decay class: {cls}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "verify": cmd_verify,
    "beta": cmd_beta,
    "sweep": cmd_sweep,
    "curve": cmd_curve,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="betamix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a kernel file")
    p.add_argument("--kernel", required=True)

    p = sub.add_parser("verify", help="run a randomized property suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    for name, help_ in (("beta", "mixing report for one region pair"), ("sweep", "maximize beta over region pairs")):
        p = sub.add_parser(name, help=help_)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--kernel")
        src.add_argument("--law")
        if name == "beta":
            p.add_argument("--A", type=_indices, default=[])
            p.add_argument("--B", type=_indices, default=[])
        else:
            p.add_argument("--p", type=float, required=True)
            p.add_argument("--q", type=float, required=True)
            p.add_argument("--r", type=float, required=True)
        p.add_argument("--out")

    p = sub.add_parser("curve", help="bound curve of a continuous kernel family")
    p.add_argument("--family-spec", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--r-min", type=float, default=0.0)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--out")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    common = {"command", "seed", "trials", "kernel", "law", "out"}
    extra = {k: v for k, v in vars(args).items() if k not in common}
    try:
        cfg = RunConfig(
            command=args.command,
            seed=getattr(args, "seed", 0),
            trials=getattr(args, "trials", 100),
            kernel=getattr(args, "kernel", None),
            law=getattr(args, "law", None),
            out=getattr(args, "out", None),
            extra=extra,
        )
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
