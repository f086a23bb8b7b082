"""Circuit characterization statistics.

``analyze`` works on flattened circuits and reports the structural metrics
shown after transpilation: gate counts, unit-duration ASAP depth, gate
density, retention lifespan, entanglement variance, and measurement density.

Definitions (documented here because several are convention choices):

    depth                  number of ASAP layers with every instruction
                           counted as duration 1; barriers synchronize their
                           wires but occupy no layer
    gate_density           n_gates / (depth * n_qubits)
    retention_lifespan     max over active qubits of
                           (last_layer - first_layer + 1) / depth
    entanglement_variance  population variance over all qubits of the
                           per-qubit count of two-qubit-gate incidences
    measurement_density    n_measure / n_qubits

Barriers are synchronization only: they are excluded from n_gates and the
histogram. Delay and reset count as instructions (the "other" bucket), not
as 1q gates. Qubits with no operations contribute zero entanglement
incidences and are excluded from the retention maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .errors import QFlowError
from .gates import LIBRARY

__all__ = ["MetricsReport", "analyze", "circuit_depth"]


@dataclass(frozen=True)
class MetricsReport:
    n_qubits: int
    n_gates: int
    n_1q: int
    n_2q: int
    n_measure: int
    depth: int
    gate_density: float
    retention_lifespan: float
    entanglement_variance: float
    measurement_density: float
    basis_histogram: dict

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_gates": self.n_gates,
            "n_1q": self.n_1q,
            "n_2q": self.n_2q,
            "n_measure": self.n_measure,
            "depth": self.depth,
            "gate_density": self.gate_density,
            "retention_lifespan": self.retention_lifespan,
            "entanglement_variance": self.entanglement_variance,
            "measurement_density": self.measurement_density,
            "basis_histogram": dict(sorted(self.basis_histogram.items())),
        }


def _layering(circuit: Circuit):
    """Per-instruction ASAP layer (unit durations), plus per-wire first/last.

    Returns (depth, first_layer, last_layer) with wire dicts keyed by global
    qubit index. Barrier entries get layer 0 and do not advance levels.
    """
    offsets = circuit.qubit_offsets()
    level: dict[int, int] = {}
    first: dict[int, int] = {}
    last: dict[int, int] = {}
    depth = 0
    for instr in circuit.instructions:
        wires = []
        for reg, idx in instr.qubits:
            if idx is None:
                raise QFlowError("metrics require a flattened circuit")
            wires.append(offsets[reg] + idx)
        if instr.opcode == "barrier":
            sync = max((level.get(w, 0) for w in wires), default=0)
            for w in wires:
                level[w] = sync
            continue
        layer = max((level.get(w, 0) for w in wires), default=0) + 1
        for w in wires:
            level[w] = layer
            if w not in first:
                first[w] = layer
            last[w] = layer
        depth = max(depth, layer)
    return depth, first, last


def circuit_depth(circuit: Circuit) -> int:
    """Unit-duration ASAP layer count (barriers synchronize, zero duration)."""
    depth, _, _ = _layering(circuit)
    return depth


def analyze(circuit: Circuit) -> MetricsReport:
    """Compute the metrics report for a flattened circuit."""
    n_qubits = circuit.n_qubits
    offsets = circuit.qubit_offsets()
    depth, first, last = _layering(circuit)

    histogram: dict[str, int] = {}
    n_1q = n_2q = n_measure = 0
    incidence = [0] * n_qubits
    for instr in circuit.instructions:
        if instr.opcode == "barrier":
            continue
        histogram[instr.opcode] = histogram.get(instr.opcode, 0) + 1
        if instr.opcode == "measure":
            n_measure += 1
        else:
            spec = LIBRARY.get(instr.opcode)
            if spec is not None:
                if spec.arity == 1:
                    n_1q += 1
                else:
                    n_2q += 1
                    for reg, idx in instr.qubits:
                        incidence[offsets[reg] + idx] += 1

    n_gates = sum(histogram.values())
    cells = depth * n_qubits
    gate_density = n_gates / cells if cells else 0.0
    if depth and first:
        retention = max((last[w] - first[w] + 1) / depth for w in first)
    else:
        retention = 0.0
    if n_qubits:
        mean = sum(incidence) / n_qubits
        variance = sum((c - mean) ** 2 for c in incidence) / n_qubits
        meas_density = n_measure / n_qubits
    else:
        variance = 0.0
        meas_density = 0.0

    return MetricsReport(
        n_qubits=n_qubits,
        n_gates=n_gates,
        n_1q=n_1q,
        n_2q=n_2q,
        n_measure=n_measure,
        depth=depth,
        gate_density=gate_density,
        retention_lifespan=retention,
        entanglement_variance=variance,
        measurement_density=meas_density,
        basis_histogram=histogram,
    )
