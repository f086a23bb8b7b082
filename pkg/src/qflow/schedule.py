"""ASAP list scheduling over device gate durations.

Each instruction starts as early as its operand qubits allow. Delay occupies
cycles * cycle_time_ns, barrier synchronizes its wires at zero duration, and
everything else takes its duration-table entry (with per-operand overrides).
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit
from .device import DeviceConfig
from .errors import TranspileError

__all__ = ["Schedule", "schedule_asap"]


@dataclass(frozen=True)
class Schedule:
    """Per-instruction (start_ns, duration_ns), aligned with the circuit's
    instruction tuple, plus the total makespan."""

    entries: tuple
    makespan_ns: float

    def start(self, i: int) -> float:
        return self.entries[i][0]

    def duration(self, i: int) -> float:
        return self.entries[i][1]


def instruction_duration_ns(instr, wires, device: DeviceConfig) -> float:
    if instr.opcode == "barrier":
        return 0.0
    if instr.opcode == "delay":
        return float(instr.params[0]) * device.cycle_time_ns
    return device.duration_of(instr.opcode, wires)


def schedule_asap(circuit: Circuit, device: DeviceConfig) -> Schedule:
    """Schedule a physical circuit; raises if a gate has no duration entry."""
    offsets = circuit.qubit_offsets()
    avail: dict[int, float] = {}
    entries = []
    makespan = 0.0
    for instr in circuit.instructions:
        wires = []
        for reg, idx in instr.qubits:
            if idx is None:
                raise TranspileError("scheduling requires a flattened circuit")
            wires.append(offsets[reg] + idx)
        start = max((avail.get(w, 0.0) for w in wires), default=0.0)
        if instr.opcode == "barrier":
            for w in wires:
                avail[w] = start
            entries.append((start, 0.0))
            continue
        dur = instruction_duration_ns(instr, wires, device)
        end = start + dur
        for w in wires:
            avail[w] = end
        entries.append((start, dur))
        makespan = max(makespan, end)
    return Schedule(tuple(entries), makespan)
