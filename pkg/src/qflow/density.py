"""Density-matrix simulation with device noise.

rho is a dense 2**n x 2**n complex matrix (16 * 4**n bytes). Unitaries act
by the shared pair-update kernels on the ket side and conjugated on the bra
side; Kraus channels sum the conjugated updates per operator.

Per gate, with a device attached: unitary, then a depolarizing channel with
the gate's error probability on its operands (joint two-qubit channel for
two-qubit gates), then thermal relaxation on each operand for the gate's
duration. A delay applies relaxation only, for cycles * cycle_time_ns.
Measurement probabilities pass through each qubit's readout confusion.

The reported fidelity is <psi|rho|psi> against the ideal state-vector run of
the same circuit with noise disabled; it is computed for circuits without
classical conditions (trajectory mode has no single final rho mixed over
branches worth comparing, so the field is omitted there).
"""

from __future__ import annotations

import math
import os
import time

import numpy as np

from .circuit import Circuit
from .device import DeviceConfig
from .errors import SimulationError
from .flatten import flatten
from .gates import unitary_of
from .noise import depolarizing_kraus, readout_matrix, thermal_relaxation_kraus
from .results import RunResult, sample_counts
from .schedule import instruction_duration_ns
from .statevector import _Program, _ClassicalState, apply_gate, sv_statevector

__all__ = ["dm_run", "dm_evolve", "fidelity", "DEFAULT_DM_CAP"]

DEFAULT_DM_CAP = 13

_RESET_KRAUS = (
    np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex),  # keep |0>
    np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),  # |1> -> |0>
)


def _dm_cap(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("QFLOW_QUBIT_CAP_DM")
    return int(env) if env else DEFAULT_DM_CAP


class _DensityState:
    def __init__(self, n: int):
        self.n = n
        self.rho = np.zeros((1 << n, 1 << n), dtype=complex)
        self.rho[0, 0] = 1.0

    def apply_unitary(self, wires, m):
        apply_gate(self.rho, self.n, wires, m)            # ket side (rows)
        apply_gate(self.rho.T, self.n, wires, np.conj(m))  # bra side

    def apply_kraus(self, ops, wires):
        acc = np.zeros_like(self.rho)
        for k in ops:
            term = self.rho.copy()
            apply_gate(term, self.n, wires, k)
            apply_gate(term.T, self.n, wires, np.conj(k))
            acc += term
        self.rho = acc

    def depolarize(self, wires, p: float):
        """rho -> (1-p) rho + p * (I/2**k (x) tr_wires rho), done in place via
        the partial trace rather than 4**k Kraus terms."""
        if p <= 0.0:
            return
        n = self.n
        t = self.rho.reshape((2,) * (2 * n))
        if len(wires) == 1:
            ka, ba = n - 1 - wires[0], 2 * n - 1 - wires[0]
            tr = np.trace(t, axis1=ka, axis2=ba)
            mixed = np.zeros_like(t)
            view = np.moveaxis(mixed, (ka, ba), (0, 1))
            view[0, 0] = tr / 2.0
            view[1, 1] = tr / 2.0
        else:
            wa, wb = wires
            ka, kb = n - 1 - wa, n - 1 - wb
            baa, bab = 2 * n - 1 - wa, 2 * n - 1 - wb
            labels = list(range(2 * n))
            labels[baa] = labels[ka]
            labels[bab] = labels[kb]
            out_labels = [l for i, l in enumerate(labels) if i not in (ka, kb, baa, bab)]
            tr = np.einsum(t, labels, out_labels)
            mixed = np.zeros_like(t)
            view = np.moveaxis(mixed, (ka, kb, baa, bab), (0, 1, 2, 3))
            for i in (0, 1):
                for j in (0, 1):
                    view[i, j, i, j] = tr / 4.0
        self.rho = ((1.0 - p) * self.rho + p * mixed.reshape(self.rho.shape))

    def thermal(self, wire: int, t_ns: float, t1_ns: float, t2_ns: float):
        if t_ns <= 0.0 or (math.isinf(t1_ns) and math.isinf(t2_ns)):
            return
        self.apply_kraus(thermal_relaxation_kraus(t_ns, t1_ns, t2_ns), (wire,))

    def probabilities(self) -> np.ndarray:
        p = np.real(np.diag(self.rho)).copy()
        p[p < 0.0] = 0.0
        return p / p.sum()

    def measure(self, wire: int, rng) -> int:
        idx = np.arange(1 << self.n)
        one = (idx >> wire) & 1 == 1
        probs = np.real(np.diag(self.rho))
        p1 = float(probs[one].sum())
        p1 = min(max(p1, 0.0), 1.0)
        bit = 1 if rng.random() < p1 else 0
        keep = one if bit else ~one
        mask = np.zeros(1 << self.n, dtype=float)
        mask[keep] = 1.0
        self.rho = self.rho * np.outer(mask, mask)
        norm = max(p1 if bit else 1.0 - p1, 1e-300)
        self.rho /= norm
        return bit


def _gate_noise(state: _DensityState, device: DeviceConfig, instr, wires):
    p = device.error_of(instr.opcode, wires)
    if p > 0.0:
        state.depolarize(wires, p)
    dur = instruction_duration_ns(instr, wires, device)
    if dur > 0.0:
        for w in wires:
            state.thermal(w, dur, device.t1_us[w] * 1000.0, device.t2_us[w] * 1000.0)


def _evolve_single_pass(program: _Program, device: DeviceConfig | None) -> _DensityState:
    state = _DensityState(program.n)
    for instr, qw, cw in program.ops:
        op = instr.opcode
        if op == "barrier" or op == "measure":
            continue  # measurement handled by readout on the final diagonal
        if op == "delay":
            if device is not None:
                _gate_noise(state, device, instr, qw)
            continue
        if op == "reset":
            state.apply_kraus(_RESET_KRAUS, qw)
            if device is not None:
                _gate_noise(state, device, instr, qw)
            continue
        state.apply_unitary(qw, unitary_of(op, instr.params))
        if device is not None:
            _gate_noise(state, device, instr, qw)
    return state


def _confused_clbit_distribution(
    program: _Program, probs: np.ndarray, device: DeviceConfig | None
) -> np.ndarray:
    """Aggregate the qubit-basis distribution onto classical bits and push it
    through per-qubit readout confusion."""
    n_bits = program.n_bits
    if program.measure_map:
        idx = np.arange(probs.size)
        c_int = np.zeros_like(idx)
        for qw, cw in program.measure_map:
            c_int |= ((idx >> qw) & 1) << cw
        dist = np.bincount(c_int, weights=probs, minlength=1 << n_bits)
        if device is not None:
            t = dist.reshape((2,) * n_bits)
            for qw, cw in program.measure_map:
                m = readout_matrix(*device.readout[qw])
                axis = n_bits - 1 - cw
                t = np.tensordot(m, t, axes=([1], [axis]))
                t = np.moveaxis(t, 0, axis)
            dist = t.reshape(-1)
        return dist
    return probs


def _run_dm_trajectory(program: _Program, device: DeviceConfig | None, rng) -> int:
    state = _DensityState(program.n)
    classical = _ClassicalState(program)
    for instr, qw, cw in program.ops:
        if not classical.satisfied(instr.condition):
            continue
        op = instr.opcode
        if op == "barrier":
            continue
        if op == "delay":
            if device is not None:
                _gate_noise(state, device, instr, qw)
            continue
        if op == "measure":
            bit = state.measure(qw[0], rng)
            if device is not None:
                p00, p11 = device.readout[qw[0]]
                flip = rng.random() >= (p11 if bit else p00)
                if flip:
                    bit ^= 1
            reg, index = instr.clbits[0]
            classical.set_bit(reg, index, bit)
            continue
        if op == "reset":
            state.apply_kraus(_RESET_KRAUS, qw)
            if device is not None:
                _gate_noise(state, device, instr, qw)
            continue
        state.apply_unitary(qw, unitary_of(op, instr.params))
        if device is not None:
            _gate_noise(state, device, instr, qw)
    if program.measure_map:
        return classical.clbit_int()
    return int(rng.choice(1 << program.n, p=state.probabilities()))


def dm_evolve(circuit: Circuit, device: DeviceConfig | None = None,
              qubit_cap: int | None = None) -> np.ndarray:
    """Final density matrix of a condition-free circuit (measurements are
    not collapsed). Useful for analytic noise checks."""
    program = _Program(circuit)
    cap = _dm_cap(qubit_cap)
    if program.n > cap:
        raise SimulationError(f"{program.n} qubits exceeds density-matrix cap {cap}")
    if any(i.condition is not None for i, _, _ in program.ops):
        raise SimulationError("dm_evolve does not evaluate classical conditions")
    return _evolve_single_pass(program, device).rho


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """State fidelity <psi|rho|psi>, clamped into [0, 1]."""
    rho = np.asarray(rho)
    psi = np.asarray(psi).reshape(-1)
    if rho.shape != (psi.size, psi.size):
        raise SimulationError(
            f"dimension mismatch: rho is {rho.shape}, psi has length {psi.size}"
        )
    value = float(np.real(np.vdot(psi, rho @ psi)))
    if value < -1e-10 or value > 1.0 + 1e-10:
        raise SimulationError(f"fidelity {value} outside [0, 1] tolerance")
    return min(max(value, 0.0), 1.0)


def dm_run(
    circuit: Circuit,
    device: DeviceConfig | None = None,
    seed: int = 42,
    shots: int = 1024,
    compute_fidelity: bool | None = None,
    qubit_cap: int | None = None,
) -> RunResult:
    """Noisy (or noiseless) density-matrix run.

    With a device, gate errors, T1/T2 relaxation, delay decoherence, and
    readout confusion all apply. compute_fidelity defaults to "device given
    and circuit has no classical conditions"."""
    t0 = time.perf_counter()
    program = _Program(circuit)
    cap = _dm_cap(qubit_cap)
    if program.n > cap:
        raise SimulationError(f"{program.n} qubits exceeds density-matrix cap {cap}")
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    rng = np.random.default_rng(seed)
    n = program.n
    mem = 16 * (1 << (2 * n))

    trajectories = not _dm_single_pass_ok(program)

    fid = None
    if not trajectories:
        state = _evolve_single_pass(program, device)
        dist = _confused_clbit_distribution(program, state.probabilities(), device)
        counts = sample_counts(dist, shots, seed, n_bits=program.n_bits)
        want_fidelity = compute_fidelity
        if want_fidelity is None:
            want_fidelity = device is not None
        if want_fidelity:
            psi = sv_statevector(circuit, qubit_cap=max(cap, n))
            fid = fidelity(state.rho, psi)
    else:
        counts = {}
        for _ in range(shots):
            value = _run_dm_trajectory(program, device, rng)
            key = format(value, f"0{max(program.n_bits, 1)}b")
            counts[key] = counts.get(key, 0) + 1
        counts = dict(sorted(counts.items()))
        if compute_fidelity:
            raise SimulationError(
                "fidelity is unavailable for circuits needing per-shot trajectories"
            )

    wall = (time.perf_counter() - t0) * 1000.0
    return RunResult(
        backend="dm",
        n_qubits=n,
        shots=shots,
        seed=seed,
        counts=counts,
        fidelity=fid,
        wall_time_ms=wall,
        mem_bytes_estimate=mem,
    )


def _dm_single_pass_ok(program: _Program) -> bool:
    """Reset is representable in a single density-matrix pass; measurement
    followed by further operations on the same qubit is not (outcome
    correlations would be lost)."""
    measured: set[int] = set()
    for instr, qw, cw in program.ops:
        if instr.condition is not None:
            return False
        if instr.opcode == "measure":
            if qw[0] in measured:
                return False
            measured.add(qw[0])
        elif instr.opcode not in ("barrier", "delay"):
            if any(w in measured for w in qw):
                return False
    return True
