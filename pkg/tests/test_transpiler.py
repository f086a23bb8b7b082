"""Mapping, routing, scheduling, peephole, and the full pipeline."""

import json
import math

import numpy as np
import pytest

from qflow.circuit import Instruction
from qflow.device import Topology, load_device
from qflow.decompose import decompose_to_u_cx
from qflow.errors import TranspileError
from qflow.flatten import flatten
from qflow.gates import LIBRARY
from qflow.layout import Layout, initial_mapping
from qflow.parser import parse_qasm
from qflow.printer import print_qasm
from qflow.routing import route
from qflow.schedule import schedule_asap
from qflow.transpile import peephole_1q, transpile

from conftest import noiseless_device_json, random_general_qasm
from oracles import check_transpiled, circuit_unitary, phase_distance


def _decomposed(circ):
    flat = flatten(circ)
    out = []
    for instr in flat.instructions:
        if instr.opcode in LIBRARY:
            out.extend(decompose_to_u_cx(instr))
        else:
            out.append(instr)
    return flat.with_instructions(out)


class TestInitialMapping:
    def test_no_two_qubit_gates_identity(self):
        c = _decomposed(parse_qasm("OPENQASM 2.0; qreg q[3]; h q[0]; h q[2];"))
        topo = Topology.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])
        layout = initial_mapping(c, topo)
        assert layout.logical_to_physical[:3] == (0, 1, 2)

    def test_star_interaction_on_star_topology(self):
        src = "OPENQASM 2.0; qreg q[5];" + "".join(
            f" cx q[0],q[{k}];" for k in range(1, 5)
        )
        c = _decomposed(parse_qasm(src))
        topo = Topology.from_edges(5, [(2, 0), (2, 1), (2, 3), (2, 4)])  # hub = 2
        layout = initial_mapping(c, topo)
        assert layout.physical_of(0) == 2
        # spokes land adjacent to the hub
        for logical in range(1, 5):
            assert topo.distance(layout.physical_of(logical), 2) == 1

    def test_injective(self, corpus, devices):
        topo = devices["grid9"].topology()
        for name, circ in corpus:
            if flatten(circ).n_qubits > 9:
                continue
            layout = initial_mapping(_decomposed(circ), topo)
            used = layout.logical_to_physical[: layout.n_logical]
            assert len(set(used)) == len(used), name

    def test_too_many_qubits(self):
        c = _decomposed(parse_qasm("OPENQASM 2.0; qreg q[3]; h q[0];"))
        with pytest.raises(TranspileError):
            initial_mapping(c, Topology.from_edges(2, [(0, 1)]))


class TestRoute:
    def _line3(self):
        return Topology.from_edges(3, [(0, 1), (1, 2)])

    def test_compliant_circuit_unchanged(self):
        c = _decomposed(parse_qasm("OPENQASM 2.0; qreg q[3]; cx q[0],q[1]; cx q[1],q[2];"))
        layout = Layout((0, 1, 2), 3)
        routed, final = route(c, layout, self._line3())
        assert sum(1 for i in routed.instructions if i.opcode == "swap") == 0
        assert final.logical_to_physical == (0, 1, 2)
        assert [i.opcode for i in routed.instructions] == ["cx", "cx"]

    def test_distant_cx_inserts_one_swap(self):
        c = _decomposed(parse_qasm("OPENQASM 2.0; qreg q[3]; cx q[0],q[2];"))
        routed, final = route(c, Layout((0, 1, 2), 3), self._line3())
        ops = [i.opcode for i in routed.instructions]
        assert ops.count("swap") == 1
        assert ops.count("cx") == 1

    def test_measure_remapped_to_final_position(self):
        c = _decomposed(
            parse_qasm(
                "OPENQASM 2.0; qreg q[3]; creg c[1]; cx q[0],q[2]; measure q[0] -> c[0];"
            )
        )
        routed, final = route(c, Layout((0, 1, 2), 3), self._line3())
        measure = [i for i in routed.instructions if i.opcode == "measure"][0]
        assert measure.qubits[0][1] == final.physical_of(0)
        assert measure.clbits == (("c", 0),)

    def test_classical_order_preserved(self):
        src = (
            "OPENQASM 2.0; qreg q[2]; creg c[1]; "
            "h q[0]; measure q[0] -> c[0]; if(c==1) x q[1];"
        )
        c = _decomposed(parse_qasm(src))
        routed, _ = route(c, Layout((0, 1), 2), Topology.from_edges(2, [(0, 1)]))
        kinds = [
            ("measure" if i.opcode == "measure" else "cond" if i.condition else "gate")
            for i in routed.instructions
        ]
        assert kinds.index("measure") < kinds.index("cond")

    def test_random_circuits_compliant_and_sound(self, devices):
        topo = devices["heavyhex7"].topology()
        for seed in range(50):
            circ = parse_qasm(random_general_qasm(6, 18, seed=3000 + seed))
            dec = _decomposed(circ)
            layout = initial_mapping(dec, topo)
            routed, final = route(dec, layout, topo)
            # compliance at the u3/cx/swap level
            for instr in routed.instructions:
                spec = LIBRARY.get(instr.opcode)
                if spec is not None and spec.arity == 2:
                    a, b = instr.qubits[0][1], instr.qubits[1][1]
                    assert topo.distance(a, b) == 1, (seed, instr)
            # unitary equivalence through the layout embedding
            u_in = circuit_unitary(circ)
            u_out = circuit_unitary(routed)
            k = dec.n_qubits
            li = layout.logical_to_physical[:k]
            lf = final.logical_to_physical[:k]

            def emb(x, lay):
                y = 0
                for i in range(k):
                    if (x >> i) & 1:
                        y |= 1 << lay[i]
                return y

            rows = [emb(y, lf) for y in range(1 << k)]
            m = np.zeros((1 << k, 1 << k), complex)
            for x in range(1 << k):
                m[:, x] = u_out[rows, emb(x, li)]
            assert phase_distance(u_in, m) < 1e-8, seed

    def test_disconnected_topology_fails(self):
        c = _decomposed(parse_qasm("OPENQASM 2.0; qreg q[2]; cx q[0],q[1];"))
        topo = Topology.from_edges(2, [])
        with pytest.raises(TranspileError, match="disconnected"):
            route(c, Layout((0, 1), 2), topo)


class TestSchedule:
    DEV = json.dumps(
        {
            "name": "sched",
            "num_qubits": 3,
            "basis_gates": ["rz", "sx", "x", "cx"],
            "coupling_map": [[0, 1], [1, 0], [1, 2], [2, 1]],
            "gate_durations_ns": {"rz": 0.0, "sx": 35.0, "x": 35.0, "cx": 300.0},
            "cycle_time_ns": 2.0,
        }
    )

    def test_sequential_sum(self):
        dev = load_device(self.DEV)
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; sx q[0]; x q[0]; sx q[0];")
        sched = schedule_asap(c, dev)
        assert sched.makespan_ns == 105.0
        assert [e[0] for e in sched.entries] == [0.0, 35.0, 70.0]

    def test_disjoint_qubits_parallel(self):
        dev = load_device(self.DEV)
        c = parse_qasm("OPENQASM 2.0; qreg q[2]; x q[0]; x q[1];")
        sched = schedule_asap(c, dev)
        assert sched.entries[0][0] == 0.0 and sched.entries[1][0] == 0.0
        assert sched.makespan_ns == 35.0

    def test_delay_occupies_cycles_times_cycle_time(self):
        dev = load_device(self.DEV)
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; delay q[0], 100; x q[0];")
        sched = schedule_asap(c, dev)
        assert sched.entries[0][1] == 200.0
        assert sched.entries[1][0] == 200.0

    def test_barrier_synchronizes(self):
        dev = load_device(self.DEV)
        c = parse_qasm(
            "OPENQASM 2.0; qreg q[2]; x q[0]; barrier q[0],q[1]; x q[1];"
        )
        sched = schedule_asap(c, dev)
        assert sched.entries[2][0] == 35.0  # x q[1] waits for the barrier

    def test_missing_duration(self):
        dev = load_device(self.DEV)
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; h q[0];")
        from qflow.errors import DeviceConfigError

        with pytest.raises(DeviceConfigError, match="no duration entry"):
            schedule_asap(c, dev)


class TestPeephole:
    def test_rz_merge(self):
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; rz(0.3) q[0]; rz(0.4) q[0];")
        out = peephole_1q(c, "zsx")
        assert [i.opcode for i in out.instructions] == ["rz"]
        assert out.instructions[0].params[0] == pytest.approx(0.7, abs=1e-12)

    def test_double_x_cancels(self):
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; x q[0]; x q[0];")
        assert peephole_1q(c, "zsx").instructions == ()

    def test_random_strings_collapse(self):
        rng = np.random.default_rng(8)
        names = ["h", "s", "sdg", "x", "z", "t", "tdg", "sx", "rz", "rx", "ry"]
        for trial in range(60):
            lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', "qreg q[1];"]
            for _ in range(10):
                g = names[int(rng.integers(len(names)))]
                if g in ("rz", "rx", "ry"):
                    lines.append(f"{g}({rng.uniform(-3, 3)}) q[0];")
                else:
                    lines.append(f"{g} q[0];")
            c = parse_qasm("\n".join(lines))
            family = ("zsx", "zxz", "zyz", "u3")[trial % 4]
            out = peephole_1q(c, family)
            assert len(out.instructions) <= 5
            d = phase_distance(circuit_unitary(c), circuit_unitary(out))
            assert d < 1e-9, (trial, d)

    def test_runs_interrupted_by_measure_and_condition(self):
        src = (
            "OPENQASM 2.0; qreg q[1]; creg c[1]; "
            "x q[0]; measure q[0] -> c[0]; if(c==1) x q[0]; x q[0];"
        )
        out = peephole_1q(parse_qasm(src), "zsx")
        ops = [(i.opcode, i.condition) for i in out.instructions]
        assert ops == [("x", None), ("measure", None), ("x", ("c", 1)), ("x", None)]


class TestTranspile:
    def test_bell_on_line5(self, bell, devices):
        phys, report = transpile(bell, devices["line5"])
        assert report.n_swap == 0
        check_transpiled(bell, phys, report, devices["line5"])
        allowed = set(devices["line5"].basis_gates)
        for instr in phys.instructions:
            if instr.opcode in LIBRARY:
                assert instr.opcode in allowed

    def test_far_cx_needs_swap_equivalent(self):
        dev = load_device(noiseless_device_json(
            3, edges=[[0, 1], [1, 0], [1, 2], [2, 1]]
        ))
        c = parse_qasm("OPENQASM 2.0; qreg q[3]; cx q[0],q[2]; cx q[0],q[1]; cx q[1],q[2];")
        phys, report = transpile(c, dev)
        check_transpiled(c, phys, report, dev)

    def test_single_qubit_circuit(self, devices):
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; h q[0];")
        for dev in devices.values():
            phys, report = transpile(c, dev)
            assert report.n_swap == 0
            check_transpiled(c, phys, report, dev)

    def test_deterministic_output(self, devices):
        c = parse_qasm(random_general_qasm(5, 30, seed=77))
        a1, r1 = transpile(c, devices["heavyhex7"], seed=11)
        a2, r2 = transpile(c, devices["heavyhex7"], seed=11)
        assert print_qasm(a1) == print_qasm(a2)
        assert r1 == r2

    def test_monotone_opt_levels(self, corpus, devices):
        for name, circ in corpus:
            if flatten(circ).n_qubits > 7:
                continue
            _, r0 = transpile(circ, devices["heavyhex7"], opt_level=0)
            _, r1 = transpile(circ, devices["heavyhex7"], opt_level=1)
            assert r1.n_1q <= r0.n_1q, name
            assert r1.n_2q <= r0.n_2q, name

    def test_report_counts_consistent(self, bell, devices):
        phys, report = transpile(bell, devices["grid9"])
        hist = {}
        for i in phys.instructions:
            if i.opcode != "barrier":
                hist[i.opcode] = hist.get(i.opcode, 0) + 1
        assert hist == report.basis_histogram
        from qflow.metrics import circuit_depth

        assert report.depth_out == circuit_depth(phys)

    def test_conditions_survive(self, devices):
        src = (
            "OPENQASM 2.0; qreg q[2]; creg c[1]; h q[0]; measure q[0] -> c[0]; "
            "if(c==1) x q[1];"
        )
        phys, _ = transpile(parse_qasm(src), devices["line5"])
        conded = [i for i in phys.instructions if i.condition is not None]
        assert conded and all(i.condition == ("c", 1) for i in conded)

    def test_too_many_qubits(self, devices):
        c = parse_qasm("OPENQASM 2.0; qreg q[9]; h q[0];")
        with pytest.raises(TranspileError, match="too many qubits"):
            transpile(c, devices["heavyhex7"])

    def test_delay_passes_through(self, devices):
        c = parse_qasm("OPENQASM 2.0; qreg q[1]; x q[0]; delay q[0], 64; x q[0];")
        phys, report = transpile(c, devices["line5"])
        delays = [i for i in phys.instructions if i.opcode == "delay"]
        assert len(delays) == 1 and delays[0].params == (64,)
        # delay contributes cycles * cycle_time to the makespan
        assert report.makespan_ns >= 64 * devices["line5"].cycle_time_ns

    def test_makespan_matches_schedule(self, bell, devices):
        phys, report = transpile(bell, devices["line5"])
        assert report.makespan_ns == schedule_asap(phys, devices["line5"]).makespan_ns
