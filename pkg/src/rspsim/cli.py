"""Command-line front end: ``rspsim run | sweep | qasm``.

Exit codes: 0 on success, 2 for invalid arguments, 3 when an output path
cannot be written.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys

from . import __version__
from .circuit import build_cluster_circuit, export_qasm
from .noise import (
    FidelityConvention,
    NoiseKind,
    closed_form_fidelity,
    noisy_outputs,
)
from .protocol import ProtocolParams, make_targets, sample_outcome
from .qcore import fidelity_pure
from .sweep import PRESETS, Axis, SweepSpec, format_csv, run_sweep

EXIT_USAGE = 2
EXIT_IO = 3


def build_report(
    alpha2: float,
    gamma2: float,
    kind: NoiseKind | str,
    rate: float,
    seed: int | None = None,
    timestamp: bool = True,
) -> dict:
    """JSON-ready run report for one parameter point."""
    kind = NoiseKind(kind)
    p = ProtocolParams.from_probabilities(alpha2, gamma2)
    _, _, target = make_targets(p)
    paper_outs = noisy_outputs(p, kind, rate, FidelityConvention.PAPER_UNNORMALIZED)
    unit_outs = noisy_outputs(p, kind, rate, FidelityConvention.TRACE_NORMALIZED)

    outcomes = []
    for i, (rp, ru) in enumerate(zip(paper_outs, unit_outs), start=1):
        prob = ru.trace().real
        f_paper = fidelity_pure(target, rp)
        f_unit = fidelity_pure(target, ru) / prob if prob > 1e-15 else 0.0
        outcomes.append(
            {
                "outcome": i,
                "probability": prob,
                "fidelity_paper": f_paper,
                "fidelity_normalized": f_unit,
                "fidelity_closed_form": closed_form_fidelity(kind, p, rate) if i == 2 else None,
            }
        )
    probs = [o["probability"] for o in outcomes]
    report = {
        "tool": "rspsim",
        "version": __version__,
        "inputs": {"alpha2": alpha2, "gamma2": gamma2, "noise": kind.value, "rate": rate, "seed": seed},
        "params": {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma, "delta": p.delta},
        "outcomes": outcomes,
        # probability-weighted over outcomes
        "average_fidelity": sum(o["fidelity_normalized"] * o["probability"] for o in outcomes),
        "max_deviation": abs(outcomes[1]["fidelity_closed_form"] - outcomes[1]["fidelity_paper"]),
        "sampled_outcome": None,
    }
    if seed is not None:
        total = sum(probs)
        report["sampled_outcome"] = sample_outcome([q / total for q in probs], seed)
    if timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return report


def _unit_interval(name):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not 0.0 <= v <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} must be in [0, 1], got {v}")
        return v

    return conv


def _fixed_pair(text):
    name, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), _unit_interval(name)(val)


def _axis(text):
    try:
        return Axis.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rspsim",
        description="Simulate simultaneous remote state preparation over a five-qubit cluster state.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="single parameter point, JSON report on stdout")
    run.add_argument("--alpha2", type=_unit_interval("alpha2"), required=True, help="alpha^2 in [0, 1]")
    run.add_argument("--gamma2", type=_unit_interval("gamma2"), required=True, help="gamma^2 in [0, 1]")
    run.add_argument("--noise", choices=[k.value for k in NoiseKind], required=True)
    run.add_argument("--rate", type=_unit_interval("rate"), default=0.0, help="noise rate in [0, 1]")
    run.add_argument("--seed", type=int, default=None, help="also sample one measurement outcome")
    run.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    sw = sub.add_parser("sweep", help="fidelity grid as CSV")
    sw.add_argument("--preset", choices=sorted(PRESETS), help="figure preset (fig3a .. fig5d)")
    sw.add_argument("--noise", choices=[k.value for k in NoiseKind])
    sw.add_argument("--vary", type=_axis, action="append", default=[], metavar="NAME:MIN:MAX:STEPS")
    sw.add_argument("--fix", type=_fixed_pair, action="append", default=[], metavar="NAME=VALUE")
    sw.add_argument("--outcome", type=int, choices=[1, 2, 3, 4], default=2)
    sw.add_argument(
        "--convention",
        choices=[c.value for c in FidelityConvention],
        default=FidelityConvention.PAPER_UNNORMALIZED.value,
        help="numeric column compared against the closed form",
    )
    sw.add_argument("--jobs", type=int, default=1, help="worker processes")
    sw.add_argument("-o", "--out", help="CSV path (default: stdout)")

    q = sub.add_parser("qasm", help="export the cluster-state circuit as OpenQASM 2.0")
    q.add_argument("-o", "--out", default="cluster.qasm")
    q.add_argument("--stdout", action="store_true", help="write to stdout instead of a file")
    return parser


def _write(path: str | None, text: str) -> int:
    if path is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"rspsim: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


def cmd_run(args) -> int:
    report = build_report(
        args.alpha2, args.gamma2, args.noise, args.rate, seed=args.seed, timestamp=not args.no_timestamp
    )
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _spec_from_args(args, parser) -> tuple[SweepSpec, str | None]:
    if args.preset:
        if args.noise or args.vary or args.fix:
            parser.error("--preset cannot be combined with --noise/--vary/--fix")
        base = PRESETS[args.preset]
        spec = SweepSpec(base.kind, base.axes, dict(base.fixed), args.outcome, args.convention, base.notes)
        return spec, args.preset
    if not args.noise:
        parser.error("sweep needs --preset or --noise")
    try:
        spec = SweepSpec(args.noise, tuple(args.vary), dict(args.fix), args.outcome, args.convention)
    except ValueError as exc:
        parser.error(str(exc))
    return spec, None


def cmd_sweep(args, parser) -> int:
    spec, preset = _spec_from_args(args, parser)
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    rows = run_sweep(spec, jobs=args.jobs)
    return _write(args.out, format_csv(spec, rows, preset))


def cmd_qasm(args) -> int:
    text = export_qasm(build_cluster_circuit())
    return _write(None if args.stdout else args.out, text)


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    if args.command == "sweep":
        return cmd_sweep(args, parser)
    return cmd_qasm(args)


if __name__ == "__main__":
    sys.exit(main())
