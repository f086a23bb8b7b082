"""Swap routing with a front-layer + lookahead heuristic.

Instructions execute as soon as their per-qubit (and per-classical-register)
dependencies are met: one-qubit gates, measure, reset, delay, and barrier
immediately, two-qubit gates once their operands sit on coupled physical
qubits. When every ready two-qubit gate is blocked, the router inserts the
swap minimizing

    H = sum over blocked front gates of dist(operands after swap)
      + 0.5 * sum over the next 20 two-qubit gates (program order)
      + 0.001 * (recent swap count on each swapped qubit)

with candidate swaps drawn from coupling edges incident to blocked-gate
qubits and ties broken by lexicographic edge order. The decay counters reset
whenever a gate executes.

Two cycle guards keep the search live: within a no-progress stretch the
router never re-enters a layout it has already visited (tracked by an
incremental Zobrist hash, so oscillating swap pairs are excluded outright),
and num_qubits**2 consecutive swaps without executing a gate abort routing.

Swaps appear in the routed circuit as literal ``swap`` gates; the transpile
pipeline expands them into three cx.
"""

from __future__ import annotations

import heapq

import numpy as np

from .circuit import Circuit, Instruction, Register
from .device import Topology
from .errors import RoutingError, TranspileError
from .gates import LIBRARY
from .layout import Layout

__all__ = ["route", "physical_register_name"]

LOOKAHEAD_GATES = 20
LOOKAHEAD_WEIGHT = 0.5
DECAY_STEP = 0.001


def physical_register_name(circuit: Circuit) -> str:
    """Name for the output physical register, avoiding classical collisions."""
    taken = {r.name for r in circuit.registers if r.kind == "c"}
    name = "q"
    while name in taken:
        name = "_" + name
    return name


def _resolve(circuit: Circuit):
    """Precompute per-instruction global wires and dependency edges."""
    offsets = circuit.qubit_offsets()
    instrs = circuit.instructions
    wires_of = []
    for instr in instrs:
        ws = []
        for reg, idx in instr.qubits:
            if idx is None:
                raise TranspileError("routing requires a flattened circuit")
            ws.append(offsets[reg] + idx)
        wires_of.append(tuple(ws))

    n = len(instrs)
    succs: list[list[int]] = [[] for _ in range(n)]
    in_deg = [0] * n
    last_on_wire: dict[int, int] = {}
    last_creg_event: dict[str, int] = {}

    def add_edge(src: int, dst: int):
        succs[src].append(dst)
        in_deg[dst] += 1

    for i, instr in enumerate(instrs):
        for w in wires_of[i]:
            prev = last_on_wire.get(w)
            if prev is not None:
                add_edge(prev, i)
            last_on_wire[w] = i
        # serialize everything touching a classical register: measures that
        # write it and conditionals that read it must keep program order
        touched = set()
        if instr.opcode == "measure":
            touched.add(instr.clbits[0][0])
        if instr.condition is not None:
            touched.add(instr.condition[0])
        for creg in touched:
            prev = last_creg_event.get(creg)
            if prev is not None and prev != i:
                add_edge(prev, i)
            last_creg_event[creg] = i
    return instrs, wires_of, succs, in_deg


def route(
    circuit: Circuit, layout: Layout, topology: Topology, seed: int = 0
) -> tuple[Circuit, Layout]:
    """Route a decomposed circuit onto the topology.

    Returns the physical circuit (single quantum register over all physical
    qubits, classical registers preserved) and the final layout. The seed is
    accepted for interface stability; routing is fully deterministic.
    """
    n_phys = topology.n
    instrs, wires_of, succs, in_deg = _resolve(circuit)
    dist = topology.dist

    l2p = list(layout.logical_to_physical[: layout.n_logical])
    p2l = [-1] * n_phys
    for logical, phys in enumerate(l2p):
        p2l[phys] = logical

    qreg_name = physical_register_name(circuit)
    out: list[Instruction] = []

    # Zobrist table over (physical qubit, occupant) for layout-revisit checks;
    # occupant index 0 means "unused", 1 + logical otherwise
    zobrist = np.random.default_rng(0x5AB4E).integers(
        1, 1 << 63, size=(n_phys, layout.n_logical + 1), dtype=np.uint64
    )
    layout_hash = np.uint64(0)
    for phys in range(n_phys):
        layout_hash ^= zobrist[phys][p2l[phys] + 1]

    def emit(instr: Instruction, wires):
        qubits = tuple((qreg_name, l2p[w]) for w in wires)
        out.append(Instruction(instr.opcode, instr.params, qubits, instr.clbits, instr.condition))

    # lookahead scan pointer over two-qubit gate indices in program order
    two_q_indices = [
        i
        for i, ins in enumerate(instrs)
        if len(wires_of[i]) == 2 and ins.opcode in LIBRARY
    ]
    done = [False] * len(instrs)

    heap = [i for i in range(len(instrs)) if in_deg[i] == 0]
    heapq.heapify(heap)
    blocked: dict[int, None] = {}
    decay: dict[int, float] = {}
    episode_layouts: set[int] = set()
    swaps_since_progress = 0
    guard = max(n_phys * n_phys, 16)

    def mark_done(i: int):
        done[i] = True
        for s in succs[i]:
            in_deg[s] -= 1
            if in_deg[s] == 0:
                heapq.heappush(heap, s)

    def executable(i: int) -> bool:
        ws = wires_of[i]
        if len(ws) != 2 or instrs[i].opcode not in LIBRARY:
            return True
        return dist[l2p[ws[0]]][l2p[ws[1]]] == 1

    def lookahead() -> list[tuple[int, int]]:
        pairs = []
        for i in two_q_indices:
            if done[i] or i in blocked:
                continue
            pairs.append((l2p[wires_of[i][0]], l2p[wires_of[i][1]]))
            if len(pairs) >= LOOKAHEAD_GATES:
                break
        return pairs

    while heap or blocked:
        progressed = False
        while heap:
            i = heapq.heappop(heap)
            if executable(i):
                emit(instrs[i], wires_of[i])
                mark_done(i)
                progressed = True
            else:
                blocked[i] = None
        if progressed:
            swaps_since_progress = 0
            decay.clear()
            episode_layouts.clear()
        if not blocked:
            continue
        episode_layouts.add(int(layout_hash))

        # front layer = blocked two-qubit gates, in program order
        front = [(l2p[wires_of[i][0]], l2p[wires_of[i][1]]) for i in sorted(blocked)]
        for pa, pb in front:
            if dist[pa][pb] < 0:
                raise TranspileError(
                    f"no path between physical qubits {pa} and {pb}: disconnected topology"
                )

        candidates = set()
        for pa, pb in front:
            for p in (pa, pb):
                for nb in topology.adjacency[p]:
                    candidates.add((p, nb) if p < nb else (nb, p))

        future = lookahead()

        def score(edge: tuple[int, int]) -> float:
            a, b = edge

            def moved(p: int) -> int:
                return b if p == a else a if p == b else p

            total = 0.0
            for pa, pb in front:
                total += dist[moved(pa)][moved(pb)]
            for pa, pb in future:
                total += LOOKAHEAD_WEIGHT * dist[moved(pa)][moved(pb)]
            return total + decay.get(a, 0.0) + decay.get(b, 0.0)

        def hash_after(a: int, b: int) -> np.uint64:
            la, lb = p2l[a], p2l[b]
            return (
                layout_hash
                ^ zobrist[a][la + 1]
                ^ zobrist[a][lb + 1]
                ^ zobrist[b][lb + 1]
                ^ zobrist[b][la + 1]
            )

        best_edge = None
        best_score = None
        best_hash = None
        for edge in sorted(candidates):
            s = score(edge)
            if best_score is not None and s >= best_score:
                continue
            h = hash_after(*edge)
            if int(h) in episode_layouts:
                continue  # would revisit a layout seen since the last progress
            best_edge, best_score, best_hash = edge, s, h
        if best_edge is None:
            raise RoutingError(
                "routing is stuck: every candidate swap revisits an explored layout"
            )

        a, b = best_edge
        out.append(Instruction("swap", (), ((qreg_name, a), (qreg_name, b))))
        la, lb = p2l[a], p2l[b]
        p2l[a], p2l[b] = lb, la
        if la >= 0:
            l2p[la] = b
        if lb >= 0:
            l2p[lb] = a
        layout_hash = best_hash
        decay[a] = decay.get(a, 0.0) + DECAY_STEP
        decay[b] = decay.get(b, 0.0) + DECAY_STEP
        swaps_since_progress += 1
        if swaps_since_progress > guard:
            raise RoutingError(
                f"no routing progress after {swaps_since_progress} swaps"
            )

        for i in sorted(blocked):
            if executable(i):
                del blocked[i]
                heapq.heappush(heap, i)

    registers = [Register(qreg_name, "q", n_phys)]
    registers.extend(r for r in circuit.registers if r.kind == "c")
    routed = Circuit(
        registers=tuple(registers),
        instructions=tuple(out),
        source_name=circuit.source_name,
    )
    final = Layout(tuple(l2p) + (-1,) * (n_phys - len(l2p)), layout.n_logical)
    return routed, final
