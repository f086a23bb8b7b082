"""Macro expansion and register broadcast.

``flatten`` rewrites a circuit so that every instruction is a builtin gate
(or measure/barrier/reset/delay) acting on concrete wires: user gate macros
are inlined recursively with exact parameter substitution, and register-wide
statements like ``measure q -> c;`` or ``h q;`` are expanded per wire.
Flattened circuits carry no gate definitions or includes.
"""

from __future__ import annotations

from .circuit import Circuit, Instruction, eval_expr
from .errors import QasmError
from .gates import LIBRARY

__all__ = ["flatten", "MAX_EXPANSION_DEPTH"]

MAX_EXPANSION_DEPTH = 1000

_SPECIAL = frozenset({"measure", "barrier", "reset", "delay"})


def _broadcast(instr: Instruction, reg_sizes: dict[str, int]) -> list[Instruction]:
    wide_q = [i for i, (_, idx) in enumerate(instr.qubits) if idx is None]
    wide_c = [i for i, (_, idx) in enumerate(instr.clbits) if idx is None]
    if not wide_q and not wide_c:
        return [instr]

    if instr.opcode == "barrier":
        # a register-wide barrier synchronizes all of the register's wires
        # as a single instruction, not one barrier per wire
        ops = []
        for reg, idx in instr.qubits:
            if idx is None:
                ops.extend((reg, k) for k in range(reg_sizes[reg]))
            else:
                ops.append((reg, idx))
        return [Instruction("barrier", (), tuple(ops), (), instr.condition)]

    sizes = {reg_sizes[instr.qubits[i][0]] for i in wide_q}
    sizes |= {reg_sizes[instr.clbits[i][0]] for i in wide_c}
    if len(sizes) != 1:
        raise QasmError(
            f"register broadcast size mismatch in '{instr.opcode}' statement"
        )
    m = sizes.pop()
    out = []
    for k in range(m):
        qs = tuple((r, k if idx is None else idx) for r, idx in instr.qubits)
        cs = tuple((r, k if idx is None else idx) for r, idx in instr.clbits)
        out.append(Instruction(instr.opcode, instr.params, qs, cs, instr.condition))
    return out


def flatten(circuit: Circuit) -> Circuit:
    """Inline all gate macros and expand register-wide statements."""
    defs = {gd.name: gd for gd in circuit.gate_defs}
    reg_sizes = {r.name: r.size for r in circuit.registers}
    out: list[Instruction] = []

    def expand(root: Instruction):
        stack: list[tuple[Instruction, int]] = [(root, 0)]
        while stack:
            instr, depth = stack.pop()
            if depth > MAX_EXPANSION_DEPTH:
                raise QasmError(
                    f"gate expansion exceeded depth {MAX_EXPANSION_DEPTH} "
                    f"while inlining '{instr.opcode}'"
                )
            gd = defs.get(instr.opcode)
            if gd is None:
                if instr.opcode not in LIBRARY and instr.opcode not in _SPECIAL:
                    raise QasmError(f"undeclared gate '{instr.opcode}'")
                if instr.opcode in LIBRARY and len(set(instr.qubits)) != len(instr.qubits):
                    raise QasmError(f"duplicate qubit operand in '{instr.opcode}'")
                out.append(instr)
                continue
            if gd.opaque:
                raise QasmError(f"cannot expand opaque gate '{gd.name}' (no body)")
            env = dict(zip(gd.params, instr.params))
            for body in reversed(gd.body):
                stack.append(
                    (
                        Instruction(
                            body.opcode,
                            tuple(eval_expr(e, env) for e in body.params),
                            tuple(instr.qubits[i] for i in body.qubits),
                            (),
                            instr.condition,
                        ),
                        depth + 1,
                    )
                )

    for instr in circuit.instructions:
        for concrete in _broadcast(instr, reg_sizes):
            expand(concrete)

    return Circuit(
        registers=circuit.registers,
        instructions=tuple(out),
        gate_defs=(),
        includes=(),
        source_name=circuit.source_name,
    )
