"""Command-line front end.

Exit codes: 0 on success, 1 for a domain verdict (inadmissible triple,
campaign violation, undefined phase, inconsistent sequence data), 2 for
usage, parse or validation errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import io
from .campaign import CampaignConfig, ConfigError, run_campaign
from .errors import (
    AntipodalPair,
    DegenerateSpectrum,
    GenericityViolation,
    InconsistentData,
    NotAdmissible,
    OptimizerFailed,
    RankDeficient,
    TrifidError,
    ZeroFidelity,
)
from .fidelity import fidelity_bloch2d, fidelity_classical, fidelity_pure, fidelity_uhlmann
from .phase import OptimizerConfig, phase_bloch_cos, phase_mixed_variational, phase_pure
from .reconstruction import extract_invariants, max_invariant_deviation, reconstruct
from .states import bloch_angles, bloch_state_vector
from .triples import (
    FidelityTriple,
    classical_witness,
    classify_triple,
    quantum_witness,
    quantum_witness_fidelities,
)

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2
VERIFY_TOL = 1e-8

DOMAIN_ERRORS = (
    ZeroFidelity,
    NotAdmissible,
    GenericityViolation,
    InconsistentData,
    AntipodalPair,
    RankDeficient,
    DegenerateSpectrum,
    OptimizerFailed,
)

FIDELITY = {
    "classical": fidelity_classical,
    "pure": fidelity_pure,
    "mixed": fidelity_uhlmann,
    "bloch": fidelity_bloch2d,
}


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _emit(doc: dict, output: str | None = None) -> None:
    text = io.dumps(doc) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _triple(args) -> FidelityTriple:
    return FidelityTriple(args.f12, args.f13, args.f23)


def cmd_fidelity(args) -> int:
    a = io.read_state(args.first, args.kind)
    b = io.read_state(args.second, args.kind)
    try:
        value = FIDELITY[args.kind](a, b)
    except ValueError as exc:
        raise io.FormatError(str(exc), source=f"{args.first}, {args.second}") from exc
    if args.json:
        _emit({"kind": args.kind, "fidelity": io.num(value)})
    else:
        print(_fmt(value))
    return EXIT_OK


def cmd_check_triple(args) -> int:
    result = classify_triple(_triple(args), args.tol)
    verdict = result.verdict.value
    if args.json:
        _emit({"verdict": verdict, "slack": io.num(result.slack)})
    else:
        print(f"{verdict} {_fmt(result.slack)}")
    return EXIT_VERDICT if verdict == "Outside" else EXIT_OK


def cmd_witness(args) -> int:
    f = _triple(args)
    verdict = classify_triple(f, args.tol).verdict.value
    if args.kind == "classical":
        w = classical_witness(f, args.tol)
        doc = io.classical_witness_to_json(w, verdict)
    else:
        states = quantum_witness(f, args.tol)
        doc = io.quantum_witness_to_json(states, quantum_witness_fidelities(states), verdict)
    _emit(doc, args.output)
    return EXIT_OK


def _bloch_pure(v):
    theta, phi = bloch_angles(v)
    return bloch_state_vector(theta, phi)


def cmd_phase(args) -> int:
    if args.mixed:
        states = [io.read_state(p, "mixed") for p in args.files]
        config = OptimizerConfig()
        if args.config:
            try:
                config = OptimizerConfig.from_dict(io.load_json(args.config))
            except (TypeError, ValueError) as exc:
                if isinstance(exc, io.FormatError):
                    raise
                raise io.FormatError(str(exc), source=args.config) from exc
        warnings.warn("mixed-state phase is experimental; the value is an optimiser upper bound", stacklevel=1)
        result = phase_mixed_variational(*states, config)
        doc = {k: (io.num(v) if isinstance(v, float) else v) for k, v in result.to_dict().items()}
        value = result.phase
    elif args.bloch:
        vectors = [io.read_state(p, "bloch") for p in args.files]
        value = float(phase_pure(*(_bloch_pure(v) for v in vectors)))
        doc = {"phase": io.num(value), "cos_phase": io.num(phase_bloch_cos(*vectors))}
    else:
        states = [io.read_state(p, "pure") for p in args.files]
        try:
            value = float(phase_pure(*states))
        except ZeroFidelity:
            raise
        except ValueError as exc:
            raise io.FormatError(str(exc), source=", ".join(args.files)) from exc
        doc = {"phase": io.num(value)}
    if args.json:
        _emit(doc)
    else:
        print(_fmt(value))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    doc = io.load_json(args.input)
    try:
        inv = io.invariants_from_json(doc)
    except io.FormatError as exc:
        raise io.FormatError(str(exc), source=args.input) from exc
    seq = reconstruct(inv)
    _emit(io.sequence_to_json(seq), args.output)
    if args.verify:
        dev = max_invariant_deviation(inv, extract_invariants(seq.states()))
        print(f"max deviation {_fmt(dev)}", file=sys.stderr if not args.output else sys.stdout)
        return EXIT_OK if dev <= VERIFY_TOL else EXIT_VERDICT
    return EXIT_OK


def cmd_campaign(args) -> int:
    try:
        cfg = CampaignConfig.from_dict(io.load_json(args.config))
    except (ConfigError, TypeError) as exc:
        raise io.FormatError(str(exc), source=args.config) from exc

    def progress(dim, done):
        print(f"dim {dim}: {done}/{cfg.samples}", file=sys.stderr)

    report = run_campaign(cfg, jobs=args.jobs, progress=progress if args.verbose else None)
    _emit(report, args.output)
    if not args.quiet:
        print(
            f"{cfg.kind}: {report['samples']} samples, {report['violations']} violations, "
            f"{report['wall_time']:.3f} s",
            file=sys.stderr,
        )
    return EXIT_VERDICT if report["violations"] else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trifid", description="Fidelity triples, phases and sequence reconstruction.", allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="fidelity between two states", allow_abbrev=False)
    p.add_argument("--kind", required=True, choices=sorted(FIDELITY))
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--json", action="store_true", help="print a JSON document instead of the bare value")
    p.set_defaults(func=cmd_fidelity)

    def triple_flags(p):
        for name in ("--f12", "--f13", "--f23"):
            p.add_argument(name, type=float, required=True)
        p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("check-triple", help="classify a fidelity triple", allow_abbrev=False)
    triple_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_triple)

    p = sub.add_parser("witness", help="states realising an admissible triple", allow_abbrev=False)
    triple_flags(p)
    p.add_argument("--kind", choices=("classical", "quantum"), default="classical")
    p.add_argument("--output")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("phase", help="three-state phase invariant", allow_abbrev=False)
    p.add_argument("files", nargs=3)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--bloch", action="store_true", help="inputs are unit Bloch vectors")
    mode.add_argument("--mixed", action="store_true", help="inputs are density matrices (experimental)")
    p.add_argument("--config", help="optimizer config JSON for --mixed")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("reconstruct", help="rebuild a sequence from its invariants", allow_abbrev=False)
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("campaign", help="seeded Monte Carlo verification", allow_abbrev=False)
    p.add_argument("config")
    p.add_argument("--output")
    p.add_argument("--jobs", type=int, default=1)
    verbosity = p.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true")
    verbosity.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_campaign)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None) and args.command == "phase" and not args.mixed:
        parser.error("--config only applies with --mixed")
    if args.command == "campaign" and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VERDICT
    except (io.FormatError, TrifidError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
