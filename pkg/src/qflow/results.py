"""Run results and measurement sampling.

Bitstring convention: classical bit (n-1) down to bit 0, left to right, so
the leftmost character is the highest-numbered bit. Circuits without any
measure instruction are sampled over all qubits in the same order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SimulationError

__all__ = ["RunResult", "sample_counts", "bitstring"]


def bitstring(value: int, n_bits: int) -> str:
    return format(value, f"0{max(n_bits, 1)}b")


def sample_counts(probabilities, shots: int, seed: int, n_bits: int | None = None) -> dict:
    """Seeded multinomial draw over a probability vector indexed by bitstring
    value. Deterministic per seed; counts sum to shots."""
    p = np.asarray(probabilities, dtype=float).reshape(-1)
    if shots < 1:
        raise SimulationError(f"shots must be >= 1, got {shots}")
    if p.size == 0:
        raise SimulationError("empty probability vector")
    lo = float(p.min())
    if lo < -1e-9:
        raise SimulationError(f"negative probability {lo}")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise SimulationError(f"probabilities sum to {total}, expected 1")
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    if n_bits is None:
        n_bits = max(1, int(p.size - 1).bit_length())
    nz = np.nonzero(draws)[0]
    return {bitstring(int(i), n_bits): int(draws[i]) for i in nz}


@dataclass
class RunResult:
    """Outcome of one simulator run."""

    backend: str
    n_qubits: int
    shots: int
    seed: int
    counts: dict
    fidelity: float | None = None
    wall_time_ms: float = 0.0
    mem_bytes_estimate: int = 0
    amplitudes: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self, include_timing: bool = False, include_amplitudes: bool = False) -> dict:
        out = {
            "backend": self.backend,
            "n_qubits": self.n_qubits,
            "shots": self.shots,
            "seed": self.seed,
            "counts": {k: self.counts[k] for k in sorted(self.counts)},
        }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        if include_timing:
            out["wall_time_ms"] = self.wall_time_ms
        out["mem_bytes_estimate"] = self.mem_bytes_estimate
        if include_amplitudes and self.amplitudes is not None:
            out["amplitudes"] = [[float(a.real), float(a.imag)] for a in self.amplitudes]
        return out
