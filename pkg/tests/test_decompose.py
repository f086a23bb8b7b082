"""Decomposition to {u3, cx} and retargeting to device basis families."""

import math

import numpy as np
import pytest

from qflow.circuit import Instruction
from qflow.decompose import decompose_to_u_cx, resolve_1q_family, retarget_1q, retarget_2q
from qflow.errors import QFlowError, UnsupportedBasisError
from qflow.euler import lattice_power, normalize_angle, snap_angle, zyz_angles
from qflow.gates import LIBRARY, BasisSet, u3_matrix, unitary_of

from oracles import apply_to_columns, phase_distance

PI = math.pi


def _compose_1q(seq) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for name, params in seq:
        u = unitary_of(name, params) @ u
    return u


def _compose_instrs(instrs, n) -> np.ndarray:
    wire = {("q", k): k for k in range(n)}
    u = np.eye(1 << n, dtype=complex)
    for ins in instrs:
        u = apply_to_columns(u, unitary_of(ins.opcode, ins.params), [wire[q] for q in ins.qubits], n)
    return u


class TestDecomposeToUCx:
    def test_h_is_single_u3(self):
        out = decompose_to_u_cx(Instruction("h", (), (("q", 0),)))
        assert len(out) == 1 and out[0].opcode == "u3"
        assert out[0].params == (PI / 2, 0.0, PI)

    def test_swap_is_three_cx(self):
        out = decompose_to_u_cx(Instruction("swap", (), (("q", 0), ("q", 1))))
        assert [i.opcode for i in out] == ["cx", "cx", "cx"]
        assert out[1].qubits == (("q", 1), ("q", 0))
        got = _compose_instrs(out, 2)
        want = apply_to_columns(np.eye(4, dtype=complex), unitary_of("swap"), [0, 1], 2)
        assert phase_distance(want, got) < 1e-12

    def test_rz_matches_u3_form(self):
        out = decompose_to_u_cx(Instruction("rz", (0.7,), (("q", 0),)))
        assert phase_distance(unitary_of("rz", (0.7,)), _compose_1q(
            [(i.opcode, i.params) for i in out]
        )) < 1e-12

    def test_every_builtin_sound(self):
        rng = np.random.default_rng(77)
        for name, spec in LIBRARY.items():
            for _ in range(100 if spec.param_count else 3):
                params = tuple(rng.uniform(-2 * PI, 2 * PI, spec.param_count))
                qubits = tuple(("q", k) for k in range(spec.arity))
                out = decompose_to_u_cx(Instruction(name, params, qubits))
                assert all(i.opcode in ("u3", "cx") for i in out)
                got = _compose_instrs(out, spec.arity)
                want = apply_to_columns(
                    np.eye(1 << spec.arity, dtype=complex),
                    unitary_of(name, params),
                    list(range(spec.arity)),
                    spec.arity,
                )
                dist = phase_distance(want, got)
                assert dist < 1e-10, f"{name}{params}: {dist}"

    def test_condition_carried(self):
        out = decompose_to_u_cx(Instruction("cz", (), (("q", 0), ("q", 1)), (), ("c", 1)))
        assert all(i.condition == ("c", 1) for i in out)

    def test_non_gate_rejected(self):
        with pytest.raises(QFlowError, match="not a builtin gate"):
            decompose_to_u_cx(Instruction("measure", (), (("q", 0),), (("c", 0),)))


class TestRetarget1q:
    FAMILIES = ("zsx", "zxz", "zyz", "u3")

    @pytest.mark.parametrize("family", FAMILIES)
    def test_random_angles_sound(self, family):
        rng = np.random.default_rng(hash(family) % 2**32)
        for trial in range(400):
            t, p, l = rng.uniform(-2 * PI, 2 * PI, 3)
            if trial % 4 == 0:
                t = float(rng.choice([0.0, PI / 2, -PI / 2, PI, -PI, 2 * PI, 3 * PI / 2]))
            seq = retarget_1q((t, p, l), family)
            dist = phase_distance(u3_matrix(t, p, l), _compose_1q(seq))
            assert dist < 1e-9, f"{family} U3({t},{p},{l}) -> {seq}: {dist}"

    def test_zsx_collapses(self):
        # theta = 0: single rz
        assert retarget_1q((0.0, 0.3, 0.4), "zsx") == [("rz", (0.7,))]
        # phase-only gate: rz alone
        seq = retarget_1q((0.0, 0.0, 1.1), "zsx")
        assert [s[0] for s in seq] == ["rz"]
        # theta = pi/2: exactly one sx
        seq = retarget_1q((PI / 2, 0.4, -0.2), "zsx")
        assert [s[0] for s in seq].count("sx") == 1
        # Hadamard: rz sx rz
        seq = retarget_1q((PI / 2, 0.0, PI), "zsx")
        assert [s[0] for s in seq] == ["rz", "sx", "rz"]
        # X gate: single x after canonicalization
        theta, phi, lam = zyz_angles(unitary_of("x"))
        assert retarget_1q((theta, phi, lam), "zsx") == [("x", ())]
        # identity: empty
        assert retarget_1q((0.0, 0.0, 0.0), "zsx") == []
        assert retarget_1q((0.0, PI, PI), "zsx") == []

    def test_u3_family_identity(self):
        assert retarget_1q((1.0, 0.5, -0.5), "u3") == [("u3", (1.0, 0.5, -0.5))]

    def test_snapping_to_lattice(self):
        eps = 1e-12
        seq = retarget_1q((0.0, 0.0, PI / 2 + eps), "zsx")
        assert seq == [("rz", (PI / 2,))]

    def test_family_resolution(self):
        assert resolve_1q_family(BasisSet.from_names(["u3", "cx"])) == "u3"
        assert resolve_1q_family(BasisSet.from_names(["rz", "sx", "x", "cx"])) == "zsx"
        assert resolve_1q_family(BasisSet.from_names(["rz", "rx", "cz"])) == "zxz"
        assert resolve_1q_family(BasisSet.from_names(["rz", "ry", "cx"])) == "zyz"
        with pytest.raises(UnsupportedBasisError):
            resolve_1q_family(BasisSet.from_names(["h", "t", "cx"]))


class TestRetarget2q:
    def test_native_cx(self):
        tpl = retarget_2q(BasisSet.from_names(["rz", "sx", "x", "cx"]))
        assert tpl["target"] == "cx" and tpl["pre"] == [] and tpl["post"] == []

    def test_cz_template_sound(self):
        basis = BasisSet.from_names(["rz", "sx", "x", "cz"])
        tpl = retarget_2q(basis)
        assert tpl["target"] == "cz"
        instrs = [Instruction(name, params, (("q", 1),)) for name, params in tpl["pre"]]
        instrs.append(Instruction("cz", (), (("q", 0), ("q", 1))))
        instrs += [Instruction(name, params, (("q", 1),)) for name, params in tpl["post"]]
        got = _compose_instrs(instrs, 2)
        want = apply_to_columns(np.eye(4, dtype=complex), unitary_of("cx"), [0, 1], 2)
        assert phase_distance(want, got) < 1e-10

    def test_unsupported_two_qubit_basis(self):
        with pytest.raises(UnsupportedBasisError, match="cx or cz"):
            retarget_2q(BasisSet.from_names(["rz", "sx", "x", "rzz"]))


class TestEulerUtilities:
    def test_zyz_total_including_degenerate(self):
        rng = np.random.default_rng(9)
        specials = [
            unitary_of("x"), unitary_of("z"), unitary_of("h"), np.eye(2, dtype=complex),
            u3_matrix(1e-13, 0.3, 0.4), u3_matrix(PI - 1e-13, 0.3, 0.4),
        ]
        mats = specials + [u3_matrix(*rng.uniform(-2 * PI, 2 * PI, 3)) for _ in range(500)]
        for u in mats:
            t, p, l = zyz_angles(u)
            assert phase_distance(u, u3_matrix(t, p, l)) < 1e-9

    def test_degenerate_branch_convention(self):
        t, p, l = zyz_angles(unitary_of("s"))
        assert t == 0.0 and l == 0.0 and abs(p - PI / 2) < 1e-12

    def test_normalize_angle(self):
        assert normalize_angle(3 * PI) == pytest.approx(PI)
        assert normalize_angle(-PI) == pytest.approx(PI)
        assert normalize_angle(PI) == PI
        assert normalize_angle(0.5) == 0.5

    def test_snap_angle(self):
        assert snap_angle(PI / 2 + 5e-10) == PI / 2
        assert snap_angle(PI / 2 + 5e-8) != PI / 2
        assert snap_angle(-1e-12) == 0.0
        assert snap_angle(-PI + 1e-12) == PI

    def test_lattice_power(self):
        assert lattice_power(0.0) == 0
        assert lattice_power(PI / 2) == 1
        assert lattice_power(PI) == 2
        assert lattice_power(-PI / 2) == 3
        assert lattice_power(2 * PI) == 0
        assert lattice_power(PI / 4) is None
