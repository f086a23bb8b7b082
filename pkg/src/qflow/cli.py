"""Command-line interface.

Subcommands: transpile, simulate, analyze, convert, fidelity, devices,
gates. Data goes to standard output (or --out), diagnostics to standard
error with an ``error:`` prefix. Exit codes: 0 success, 1 circuit
parse/decode error, 2 device configuration error, 3 transpile error,
4 simulator rejection.

Every invocation is deterministic for fixed inputs, flags, and seed; the
wall-clock field is only included with --timing so default output is
byte-stable across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .binio import decode_binary, encode_binary
from .circuit import Circuit
from .density import dm_run
from .device import DeviceConfig, load_bundled_device, load_device
from .errors import (
    BinaryFormatError,
    DeviceConfigError,
    QasmError,
    QFlowError,
    SimulationError,
    TranspileError,
)
from .flatten import flatten
from .gates import gate_manifest
from .metrics import analyze
from .parser import parse_qasm
from .printer import print_qasm
from .statevector import sv_run
from .stabilizer import stab_run
from .transpile import transpile

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_DEVICE = 2
EXIT_TRANSPILE = 3
EXIT_BACKEND = 4


def _fail(code: int, message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _load_circuit(path: str) -> Circuit:
    if not os.path.exists(path):
        raise QasmError(f"input file not found: {path}")
    if path.endswith(".nwqb"):
        with open(path, "rb") as fh:
            return decode_binary(fh.read())
    if path.endswith(".qasm"):
        with open(path, "r", encoding="utf-8") as fh:
            return parse_qasm(fh.read(), source_name=os.path.basename(path))
    raise QasmError(f"unrecognized circuit extension (want .qasm or .nwqb): {path}")


def _write_circuit(circuit: Circuit, path: str):
    if path.endswith(".nwqb"):
        with open(path, "wb") as fh:
            fh.write(encode_binary(circuit))
    elif path.endswith(".qasm"):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(print_qasm(circuit))
    else:
        raise QasmError(f"unrecognized output extension (want .qasm or .nwqb): {path}")


def _load_device_arg(spec: str) -> DeviceConfig:
    if os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            return load_device(fh.read())
    if spec.endswith(".json"):
        raise DeviceConfigError(f"device file not found: {spec}")
    return load_bundled_device(spec)


def _histogram_text(counts: dict, shots: int, width: int = 40) -> str:
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    peak = ranked[0][1] if ranked else 1
    lines = []
    for bits, count in ranked:
        bar = "#" * max(1, round(width * count / peak))
        lines.append(f"{bits}  {bar:<{width}}  {count} ({100.0 * count / shots:.1f}%)")
    return "\n".join(lines) + "\n"


# -- subcommands ---------------------------------------------------------------

def _cmd_transpile(args) -> int:
    try:
        circuit = _load_circuit(args.input)
    except (QasmError, BinaryFormatError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        device = _load_device_arg(args.device)
    except DeviceConfigError as exc:
        return _fail(EXIT_DEVICE, str(exc))
    try:
        physical, report = transpile(circuit, device, seed=args.seed, opt_level=args.opt_level)
        _write_circuit(physical, args.out)
    except TranspileError as exc:
        return _fail(EXIT_TRANSPILE, str(exc))
    except QFlowError as exc:
        return _fail(EXIT_PARSE, str(exc))
    sys.stdout.write(_json_text(report.to_dict()))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    try:
        circuit = _load_circuit(args.input)
    except (QasmError, BinaryFormatError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    device = None
    if args.device:
        try:
            device = _load_device_arg(args.device)
        except DeviceConfigError as exc:
            return _fail(EXIT_DEVICE, str(exc))
    try:
        if args.backend == "sv":
            result = sv_run(circuit, seed=args.seed, shots=args.shots)
        elif args.backend == "dm":
            result = dm_run(circuit, device, seed=args.seed, shots=args.shots)
        else:
            result = stab_run(circuit, seed=args.seed, shots=args.shots)
    except (SimulationError, DeviceConfigError) as exc:
        # a device error raised mid-run (e.g. a gate with no duration entry
        # while noise is enabled) is a backend rejection of this circuit
        return _fail(EXIT_BACKEND, str(exc))
    except QFlowError as exc:
        return _fail(EXIT_PARSE, str(exc))
    payload = result.to_dict(
        include_timing=args.timing, include_amplitudes=args.amplitudes
    )
    _emit(_json_text(payload), args.out)
    if args.histogram:
        sys.stdout.write(_histogram_text(result.counts, result.shots))
    return EXIT_OK


def _cmd_convert(args) -> int:
    try:
        circuit = _load_circuit(args.input)
        _write_circuit(circuit, args.out)
    except (QasmError, BinaryFormatError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    in_size = os.path.getsize(args.input)
    out_size = os.path.getsize(args.out)
    delta = 100.0 * (out_size - in_size) / in_size if in_size else 0.0
    print(
        f"{args.input} ({in_size} bytes) -> {args.out} ({out_size} bytes), "
        f"{delta:+.1f}% size change"
    )
    return EXIT_OK


def _cmd_analyze(args) -> int:
    try:
        circuit = _load_circuit(args.input)
        report = analyze(flatten(circuit))
    except (QasmError, BinaryFormatError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    sys.stdout.write(_json_text(report.to_dict()))
    return EXIT_OK


def _cmd_fidelity(args) -> int:
    try:
        circuit = _load_circuit(args.input)
    except (QasmError, BinaryFormatError) as exc:
        return _fail(EXIT_PARSE, str(exc))
    try:
        device = _load_device_arg(args.device)
    except DeviceConfigError as exc:
        return _fail(EXIT_DEVICE, str(exc))
    try:
        result = dm_run(circuit, device, seed=args.seed, shots=args.shots,
                        compute_fidelity=True)
    except (SimulationError, DeviceConfigError) as exc:
        return _fail(EXIT_BACKEND, str(exc))
    sys.stdout.write(_json_text({"fidelity": result.fidelity}))
    return EXIT_OK


def _cmd_devices(args) -> int:
    try:
        device = _load_device_arg(args.device)
    except DeviceConfigError as exc:
        return _fail(EXIT_DEVICE, str(exc))
    topo = device.topology()
    undirected = sorted({(min(a, b), max(a, b)) for a, b in device.coupling_map})
    lines = [
        f"device:      {device.name}",
        f"qubits:      {device.num_qubits}",
        f"basis gates: {', '.join(device.basis_gates)}",
        f"cycle time:  {device.cycle_time_ns} ns",
        f"edges:       {' '.join(f'{a}-{b}' for a, b in undirected)}",
        "adjacency:",
    ]
    for q in range(device.num_qubits):
        neighbors = " ".join(str(v) for v in topo.adjacency[q])
        lines.append(f"  {q}: {neighbors}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_gates(_args) -> int:
    sys.stdout.write(_json_text(gate_manifest()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qflow",
        description="Quantum circuit toolchain: parse, transpile, simulate, analyze.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transpile", help="compile a circuit for a device")
    p.add_argument("input", help="input circuit (.qasm or .nwqb)")
    p.add_argument("--device", required=True, help="device JSON path or bundled name")
    p.add_argument("-o", "--out", required=True, help="output circuit (.qasm or .nwqb)")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--opt-level", type=int, choices=(0, 1), default=1)
    p.set_defaults(func=_cmd_transpile)

    p = sub.add_parser("simulate", help="run a circuit on a simulator backend")
    p.add_argument("backend", choices=("sv", "dm", "stab"))
    p.add_argument("input")
    p.add_argument("--device", help="device JSON (dm backend: enables noise + fidelity)")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="write the result JSON here instead of stdout")
    p.add_argument("--histogram", action="store_true",
                   help="print a text histogram ranked by frequency")
    p.add_argument("--amplitudes", action="store_true",
                   help="include final amplitudes in the JSON (sv, single pass)")
    p.add_argument("--timing", action="store_true",
                   help="include wall_time_ms (breaks byte-for-byte determinism)")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("convert", help="convert between .qasm and .nwqb")
    p.add_argument("input")
    p.add_argument("out")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("analyze", help="circuit statistics report")
    p.add_argument("input")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fidelity", help="noisy-vs-ideal state fidelity on a device")
    p.add_argument("input")
    p.add_argument("--device", required=True)
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_fidelity)

    p = sub.add_parser("devices", help="summarize a device configuration")
    p.add_argument("device", help="device JSON path or bundled name")
    p.set_defaults(func=_cmd_devices)

    p = sub.add_parser("gates", help="emit the builtin gate manifest")
    p.set_defaults(func=_cmd_gates)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QFlowError as exc:  # safety net: anything uncategorized
        return _fail(EXIT_PARSE, str(exc))


if __name__ == "__main__":
    sys.exit(main())
