"""Dense state-vector simulation.

The state is a complex array of length 2**n in little-endian wire order
(qubit 0 is the least significant bit of a basis index); memory is exactly
16 * 2**n bytes. Gate kernels update amplitude pairs in place over the first
array axis, so the same kernels drive the density-matrix backend.

Circuits whose measurements are all terminal (and that contain no reset or
classical conditions) run in a single pass with counts drawn from the final
probability vector; anything else runs shot-by-shot trajectories with seeded
measurement collapse.
"""

from __future__ import annotations

import os
import time

import numpy as np

from .circuit import Circuit, Instruction
from .errors import SimulationError
from .flatten import flatten
from .gates import LIBRARY, unitary_of
from .results import RunResult, sample_counts

__all__ = ["sv_run", "sv_statevector", "DEFAULT_SV_CAP"]

DEFAULT_SV_CAP = 26


def _sv_cap(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("QFLOW_QUBIT_CAP_SV")
    return int(env) if env else DEFAULT_SV_CAP


# -- kernels (operate on the first axis; state may be 1-D or 2-D) -------------

def apply_1q(state: np.ndarray, n: int, w: int, m) -> None:
    idx = np.arange(1 << n)
    i0 = idx[(idx >> w) & 1 == 0]
    i1 = i0 | (1 << w)
    a = state[i0]
    b = state[i1]
    state[i0] = m[0][0] * a + m[0][1] * b
    state[i1] = m[1][0] * a + m[1][1] * b


def apply_2q(state: np.ndarray, n: int, wa: int, wb: int, m) -> None:
    """m is local-ordered with the first operand (wa) as the high bit."""
    idx = np.arange(1 << n)
    base = idx[((idx >> wa) & 1 == 0) & ((idx >> wb) & 1 == 0)]
    i = (base, base | (1 << wb), base | (1 << wa), base | (1 << wa) | (1 << wb))
    v = [state[j] for j in i]
    for row in range(4):
        state[i[row]] = m[row][0] * v[0] + m[row][1] * v[1] + m[row][2] * v[2] + m[row][3] * v[3]


def apply_gate(state: np.ndarray, n: int, wires, m) -> None:
    if len(wires) == 1:
        apply_1q(state, n, wires[0], m)
    else:
        apply_2q(state, n, wires[0], wires[1], m)


# -- program preparation --------------------------------------------------------

class _Program:
    """Flattened circuit with wire-resolved instructions and run-mode facts."""

    def __init__(self, circuit: Circuit):
        flat = flatten(circuit)
        self.n = flat.n_qubits
        self.n_clbits = flat.n_clbits
        qoff = flat.qubit_offsets()
        coff = flat.clbit_offsets()
        self.clbit_offsets = coff
        self.creg_sizes = {r.name: r.size for r in flat.classical_registers()}
        self.ops: list[tuple] = []  # (instr, qwires, cwires)
        self.measure_map: list[tuple[int, int]] = []
        needs_trajectories = False
        measured: set[int] = set()
        for instr in flat.instructions:
            qw = tuple(qoff[r] + i for r, i in instr.qubits)
            cw = tuple(coff[r] + i for r, i in instr.clbits)
            self.ops.append((instr, qw, cw))
            if instr.condition is not None:
                needs_trajectories = True
            if instr.opcode == "reset":
                needs_trajectories = True
            if instr.opcode == "measure":
                if qw[0] in measured:
                    needs_trajectories = True
                measured.add(qw[0])
                self.measure_map.append((qw[0], cw[0]))
            elif instr.opcode not in ("barrier", "delay"):
                if any(w in measured for w in qw):
                    needs_trajectories = True
        self.needs_trajectories = needs_trajectories
        # counts are keyed over classical bits, or over all qubits when the
        # circuit never measures
        self.n_bits = self.n_clbits if self.measure_map else self.n

    def clbit_int_from_basis(self, basis_index: int) -> int:
        c = 0
        for qw, cw in self.measure_map:
            c |= ((basis_index >> qw) & 1) << cw
        return c


class _ClassicalState:
    def __init__(self, program: _Program):
        self.values = {name: 0 for name in program.creg_sizes}
        self.offsets = program.clbit_offsets

    def satisfied(self, condition) -> bool:
        if condition is None:
            return True
        creg, want = condition
        return self.values.get(creg, 0) == want

    def set_bit(self, creg: str, index: int, bit: int):
        old = self.values[creg]
        self.values[creg] = (old & ~(1 << index)) | (bit << index)

    def clbit_int(self) -> int:
        total = 0
        for creg, value in self.values.items():
            total |= value << self.offsets[creg]
        return total


def _measure_probability_one(state: np.ndarray, n: int, w: int) -> float:
    idx = np.arange(1 << n)
    sel = (idx >> w) & 1 == 1
    return float(np.sum(np.abs(state[sel]) ** 2))


def _collapse(state: np.ndarray, n: int, w: int, bit: int, prob: float) -> None:
    idx = np.arange(1 << n)
    kill = (idx >> w) & 1 != bit
    state[kill] = 0.0
    state /= np.sqrt(prob)


def _run_trajectory(program: _Program, rng: np.random.Generator) -> int:
    n = program.n
    state = np.zeros(1 << n, dtype=complex)
    state[0] = 1.0
    classical = _ClassicalState(program)
    for instr, qw, cw in program.ops:
        if not classical.satisfied(instr.condition):
            continue
        op = instr.opcode
        if op in ("barrier", "delay"):
            continue
        if op == "measure":
            p1 = _measure_probability_one(state, n, qw[0])
            bit = 1 if rng.random() < p1 else 0
            _collapse(state, n, qw[0], bit, p1 if bit else 1.0 - p1)
            reg, index = instr.clbits[0]
            classical.set_bit(reg, index, bit)
        elif op == "reset":
            p1 = _measure_probability_one(state, n, qw[0])
            bit = 1 if rng.random() < p1 else 0
            _collapse(state, n, qw[0], bit, p1 if bit else 1.0 - p1)
            if bit:
                apply_1q(state, n, qw[0], unitary_of("x"))
        else:
            apply_gate(state, n, qw, unitary_of(op, instr.params))
    if program.measure_map:
        return classical.clbit_int()
    probs = np.abs(state) ** 2
    probs /= probs.sum()
    return int(rng.choice(probs.size, p=probs))


def sv_statevector(circuit: Circuit, qubit_cap: int | None = None) -> np.ndarray:
    """Final amplitudes of the unitary part of a circuit (measurements are
    ignored; reset and classical conditions are rejected)."""
    program = _Program(circuit)
    cap = _sv_cap(qubit_cap)
    if program.n > cap:
        raise SimulationError(f"{program.n} qubits exceeds state-vector cap {cap}")
    state = np.zeros(1 << program.n, dtype=complex)
    state[0] = 1.0
    for instr, qw, cw in program.ops:
        if instr.condition is not None or instr.opcode == "reset":
            raise SimulationError(
                "sv_statevector requires a purely unitary circuit "
                f"(found '{instr.opcode}'{' with condition' if instr.condition else ''})"
            )
        if instr.opcode in ("measure", "barrier", "delay"):
            continue
        apply_gate(state, program.n, qw, unitary_of(instr.opcode, instr.params))
    return state


def sv_run(
    circuit: Circuit,
    seed: int = 42,
    shots: int = 1024,
    qubit_cap: int | None = None,
) -> RunResult:
    """Ideal state-vector run: evolve, then sample `shots` outcomes.

    Delay is an identity here (no noise model); mid-circuit measurement,
    reset, and `if` conditions trigger per-shot trajectory execution with
    seeded collapse. Final amplitudes are attached for single-pass runs.
    """
    t0 = time.perf_counter()
    program = _Program(circuit)
    cap = _sv_cap(qubit_cap)
    if program.n > cap:
        raise SimulationError(f"{program.n} qubits exceeds state-vector cap {cap}")
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    n = program.n
    mem = 16 * (1 << n)

    if not program.needs_trajectories:
        state = np.zeros(1 << n, dtype=complex)
        state[0] = 1.0
        for instr, qw, cw in program.ops:
            if instr.opcode in ("measure", "barrier", "delay"):
                continue
            apply_gate(state, n, qw, unitary_of(instr.opcode, instr.params))
        probs = np.abs(state) ** 2
        probs /= probs.sum()
        draws = rng.multinomial(shots, probs)
        counts: dict[str, int] = {}
        for i in np.nonzero(draws)[0]:
            basis = int(i)
            key_val = program.clbit_int_from_basis(basis) if program.measure_map else basis
            key = format(key_val, f"0{max(program.n_bits, 1)}b")
            counts[key] = counts.get(key, 0) + int(draws[i])
        amplitudes = state
    else:
        counts = {}
        for _ in range(shots):
            value = _run_trajectory(program, rng)
            key = format(value, f"0{max(program.n_bits, 1)}b")
            counts[key] = counts.get(key, 0) + 1
        amplitudes = None

    wall = (time.perf_counter() - t0) * 1000.0
    return RunResult(
        backend="sv",
        n_qubits=n,
        shots=shots,
        seed=seed,
        counts=dict(sorted(counts.items())),
        wall_time_ms=wall,
        mem_bytes_estimate=mem,
        amplitudes=amplitudes,
    )
