"""Command-line front end.

Exit codes: 0 success, 1 ``compare`` found distributions further apart than the
tolerance, 2 validation error, 3 size cap exceeded, 64 unknown subcommand.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fileio
from .criteria import classify_set
from .discord import (
    dephase,
    dephase_circuit_final,
    is_zero_discord,
    pure_state_zero_discord,
)
from .errors import CapError, ValidationError
from .iqp import parse_iqp_instance, sample_iqp_batch, simulate_iqp
from .mbqc import dephased_program, run_mbqc_batch, run_mbqc_exact
from .shor import ShorInstance, run_shor_pipeline, shor_set, shor_zero_discord
from .statekit import TOL, PureState, to_bitstring, tvd

EXIT_MISMATCH = 1
EXIT_VALIDATION = 2
EXIT_CAP = 3
EXIT_USAGE = 64


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})", "in") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_dist(dist, args):
    if args.format == "json":
        _emit(fileio.dumps(fileio.dist_to_json(dist)), args.out)
    else:
        _emit(fileio.dist_to_tsv(dist), args.out)


def _circuit(args):
    return parse_iqp_instance(Path(args.input).read_text())


def _input_bits(circuit, args):
    return "0" * circuit.n if args.x is None else args.x


def cmd_iqp_dist(args):
    circuit = _circuit(args)
    _emit_dist(simulate_iqp(circuit, _input_bits(circuit, args)), args)


def cmd_iqp_sample(args):
    circuit = _circuit(args)
    draws = sample_iqp_batch(circuit, _input_bits(circuit, args), args.seed, args.samples)
    bits = [to_bitstring(int(i), circuit.nu) for i in draws]
    if args.format == "json":
        _emit(fileio.dumps({"seed": args.seed, "samples": bits}), args.out)
    else:
        _emit("".join(b + "\n" for b in bits), args.out)


def cmd_mbqc_compile(args):
    circuit = _circuit(args)
    _emit(fileio.dumps(fileio.compiled_program_json(circuit, args.plane)), args.out)


def cmd_mbqc_run(args):
    program = fileio.program_from_json(_read_json(args.input), Path(args.input).parent)
    if args.samples:
        runs = run_mbqc_batch(program, args.seed, args.samples)
        if args.format == "json":
            rows = [{"transcript": o.transcript_bits, "output": o.output_bits} for o in runs]
            _emit(fileio.dumps({"seed": args.seed, "samples": rows}), args.out)
        else:
            _emit("".join(f"{o.transcript_bits}\t{o.output_bits}\n" for o in runs), args.out)
        return
    transcripts, outputs = run_mbqc_exact(program)
    _emit_dist(transcripts if args.transcripts else outputs, args)


def cmd_dephase(args):
    doc = _read_json(args.input)
    if "gates" in doc:
        circuit = parse_iqp_instance(json.dumps(doc))
        if args.x is not None:
            zd = dephase_circuit_final(circuit, args.x)
        else:
            zd = dephased_program(circuit, args.plane).pre_state
    else:
        program = fileio.program_from_json(doc, Path(args.input).parent)
        zd = dephase(program.pre_state, program.schedule.fixed_basis())
    _emit(fileio.dumps(fileio.zds_to_json(zd)), args.out)


def cmd_discord_check(args):
    doc = _read_json(args.input)
    base = Path(args.input).parent
    state = fileio.pre_state_from_json(doc["pre_state"], base) if "pre_state" in doc else fileio.state_from_json(doc)
    if isinstance(state, PureState):
        verdict = pure_state_zero_discord(state, args.tolerance)
    elif hasattr(state, "densify"):
        verdict = is_zero_discord(state.densify(), args.tolerance)
    else:
        verdict = is_zero_discord(state, args.tolerance)
    _emit(fileio.dumps(fileio.verdict_to_json(verdict)), args.out)


def _report(verdict) -> str:
    lines = [f"status: {verdict.status}"]
    for key, value in fileio.verdict_to_json(verdict)["evidence"].items():
        lines.append(f"  {key}: {json.dumps(value)}")
    return "\n".join(lines) + "\n"


def cmd_criteria_check(args):
    s = fileio.set_from_json(_read_json(args.set), Path(args.set).parent)
    verdict = classify_set(s)
    if args.format == "table":
        _emit(_report(verdict), args.out)
    else:
        _emit(fileio.dumps(fileio.verdict_to_json(verdict)), args.out)


def cmd_shor_demo(args):
    inst = ShorInstance(args.modulus, args.base)
    zd = shor_zero_discord(inst)
    report = run_shor_pipeline(inst, args.seed, args.samples or 20, zd)
    doc = report.to_dict()
    doc["nu"], doc["n"] = inst.nu, inst.n
    if args.classify:
        doc["criteria"] = fileio.verdict_to_json(classify_set(shor_set(inst, zd)))["status"]
    if args.format == "json":
        _emit(fileio.dumps(doc), args.out)
    else:
        lines = [
            f"M={inst.M} a={inst.a} nu={inst.nu} n={inst.n} seed={args.seed}",
            f"samples drawn: {doc['samples_drawn']}",
        ]
        lines += [f"  c={c['c']} r={c['r']} verified={c['verified']}" for c in doc["candidates"]]
        lines.append(f"period: {doc['period']}")
        lines.append(f"factors: {doc['factors']}")
        if args.classify:
            lines.append(f"criteria: {doc['criteria']}")
        _emit("\n".join(lines) + "\n", args.out)


def cmd_compare(args):
    d = tvd(fileio.read_distribution(args.first), fileio.read_distribution(args.second))
    _emit(f"{d:.17g}\n", args.out)
    return 0 if d < args.tolerance else EXIT_MISMATCH


COMMANDS = {
    "iqp-dist": cmd_iqp_dist,
    "iqp-sample": cmd_iqp_sample,
    "mbqc-compile": cmd_mbqc_compile,
    "mbqc-run": cmd_mbqc_run,
    "dephase": cmd_dephase,
    "discord-check": cmd_discord_check,
    "criteria-check": cmd_criteria_check,
    "shor-demo": cmd_shor_demo,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mbqclab", description="IQP*/MBQC/zero-discord laboratory")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")

    def add(name, help_text, *, needs_in=False, fmt="table"):
        p = sub.add_parser(name, help=help_text)
        if needs_in:
            p.add_argument("--in", dest="input", required=True, help="input file")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=0)
        p.add_argument("--format", choices=("table", "json"), default=fmt)
        p.add_argument("--tolerance", type=float, default=TOL)
        return p

    for name in ("iqp-dist", "iqp-sample"):
        add(name, "exact distribution / samples of an IQP* instance", needs_in=True).add_argument(
            "--x", help="n-bit input string (default all zeros)"
        )
    add("mbqc-compile", "compile an IQP* instance to a graph-state program", needs_in=True).add_argument(
        "--plane", choices=("zx", "yz"), default="zx"
    )
    p = add("mbqc-run", "run a program exactly, or sample it with --samples", needs_in=True)
    p.add_argument("--transcripts", action="store_true", help="emit the transcript distribution")
    p = add("dephase", "dephase an instance's final state (--x) or compiled graph state", needs_in=True)
    p.add_argument("--x", help="dephase the circuit's final state for this input")
    p.add_argument("--plane", choices=("zx", "yz"), default="zx")
    add("discord-check", "zero-discord test of a state or a program's pre-state", needs_in=True)
    add("criteria-check", "classify a set of MBQCs", fmt="json").add_argument("--set", required=True)
    p = add("shor-demo", "period finding on the dephased final state")
    p.add_argument("--modulus", type=int, default=15)
    p.add_argument("--base", type=int, default=7)
    p.add_argument("--classify", action="store_true", help="also classify the readout set")
    p = add("compare", "total variation distance between two distribution files")
    p.add_argument("first")
    p.add_argument("second")
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    if not argv or (argv[0] not in COMMANDS and argv[0] not in ("-h", "--help")):
        sys.stderr.write(parser.format_usage())
        if argv:
            sys.stderr.write(f"mbqclab: unknown subcommand {argv[0]!r}\n")
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args) or 0
    except CapError as exc:
        sys.stderr.write(f"mbqclab: cap exceeded: {exc}\n")
        return EXIT_CAP
    except ValidationError as exc:
        where = f"{exc.field}: " if exc.field and not str(exc).startswith(exc.field) else ""
        sys.stderr.write(f"mbqclab: invalid input: {where}{exc}\n")
        return EXIT_VALIDATION
    except (OSError, KeyError) as exc:
        sys.stderr.write(f"mbqclab: invalid input: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
