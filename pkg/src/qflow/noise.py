"""Noise channel library: depolarizing, thermal relaxation, readout.

Conventions (these fix how device gate_errors values are interpreted):

  * Depolarizing with probability p mixes fully at p = 1:
    one qubit    rho -> (1-p) rho + p I/2
    two qubits   rho -> (1-p) rho + p I/4 (applied jointly on the pair)
  * Thermal relaxation over time t multiplies the excited population by
    e^(-t/T1) and the off-diagonal coherence by e^(-t/T2). It is the
    composition of amplitude damping with gamma = 1 - e^(-t/T1) and pure
    dephasing making up the remaining coherence loss; T2 <= 2 T1 keeps the
    dephasing parameter a probability. The channel is a semigroup in t.
  * Readout confusion is classical: a pair (P(read 0|0), P(read 1|1)) turning
    into the column-stochastic matrix [[p00, 1-p11], [1-p00, p11]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SimulationError

__all__ = [
    "depolarizing_kraus",
    "thermal_relaxation_kraus",
    "readout_matrix",
    "NoiseChannel",
]

_PAULIS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def depolarizing_kraus(p: float, n_qubits: int = 1) -> list[np.ndarray]:
    """Kraus operators of the n-qubit depolarizing channel (n in {1, 2}).

    Uses the Pauli-twirl form: surviving identity weight 1 - p (4**n - 1)/4**n
    and p/4**n on every non-identity Pauli tensor.
    """
    if not 0.0 <= p <= 1.0:
        raise SimulationError(f"depolarizing probability {p} outside [0, 1]")
    if n_qubits not in (1, 2):
        raise SimulationError("depolarizing channel supports 1 or 2 qubits")
    dim = 4 ** n_qubits
    names = ["I", "X", "Y", "Z"]
    ops = []
    if n_qubits == 1:
        labels = names
        mats = [_PAULIS[a] for a in names]
    else:
        labels = [a + b for a in names for b in names]
        mats = [np.kron(_PAULIS[l[0]], _PAULIS[l[1]]) for l in labels]
    for label, mat in zip(labels, mats):
        weight = 1.0 - p * (dim - 1) / dim if label.strip("I") == "" else p / dim
        if weight > 0.0:
            ops.append(math.sqrt(weight) * mat)
    return ops


def thermal_relaxation_kraus(t_ns: float, t1_ns: float, t2_ns: float) -> list[np.ndarray]:
    """Kraus set for relaxation over t_ns with constants T1, T2 (same units).

    Zero operators are dropped, so t = 0 (or infinite T1 and T2) returns a
    single identity operator. Infinite time constants are accepted and mean
    no decay of that kind.
    """
    if t_ns < 0:
        raise SimulationError(f"negative duration {t_ns}")
    if t2_ns > 2.0 * t1_ns:
        raise SimulationError(f"T2 = {t2_ns} exceeds 2*T1 = {2.0 * t1_ns}")
    relax_rate = 0.0 if math.isinf(t1_ns) else 1.0 / t1_ns
    dephase_rate = (0.0 if math.isinf(t2_ns) else 1.0 / t2_ns) - 0.5 * relax_rate
    if dephase_rate < 0.0:  # float dust when T2 == 2 T1
        dephase_rate = 0.0
    if math.isinf(t_ns):
        gamma = 0.0 if relax_rate == 0.0 else 1.0
        lam = 0.0 if dephase_rate == 0.0 else 1.0
    else:
        gamma = 1.0 - math.exp(-t_ns * relax_rate)
        lam = 1.0 - math.exp(-t_ns * dephase_rate)

    a0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    a1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    p0 = math.sqrt(1.0 - lam) * np.eye(2, dtype=complex)
    p1 = math.sqrt(lam) * np.diag([1.0, 0.0]).astype(complex)
    p2 = math.sqrt(lam) * np.diag([0.0, 1.0]).astype(complex)

    ops = []
    for phase_op in (p0, p1, p2):
        for amp_op in (a0, a1):
            k = phase_op @ amp_op
            if np.max(np.abs(k)) > 1e-15:
                ops.append(k)
    return ops


def readout_matrix(p00: float, p11: float) -> np.ndarray:
    """Column-stochastic confusion matrix M[read, true]."""
    if not (0.0 <= p00 <= 1.0 and 0.0 <= p11 <= 1.0):
        raise SimulationError("readout fidelities must lie in [0, 1]")
    return np.array([[p00, 1.0 - p11], [1.0 - p00, p11]], dtype=float)


@dataclass(frozen=True)
class NoiseChannel:
    """Tagged channel: depolarizing (p,) or (p, n_qubits); thermal_relaxation
    (t_ns, T1_ns, T2_ns); readout (p00, p11)."""

    kind: str
    params: tuple

    def kraus_ops(self) -> list[np.ndarray]:
        if self.kind == "depolarizing":
            p = self.params[0]
            n = int(self.params[1]) if len(self.params) > 1 else 1
            return depolarizing_kraus(p, n)
        if self.kind == "thermal_relaxation":
            return thermal_relaxation_kraus(*self.params)
        if self.kind == "readout":
            raise SimulationError("readout confusion is classical, not a Kraus channel")
        raise SimulationError(f"unknown noise channel kind '{self.kind}'")
