"""Text round-trip: parse(print(c)) must equal c structurally."""

import pytest

from qflow.circuit import Circuit, Instruction, Register
from qflow.parser import parse_qasm
from qflow.printer import print_qasm


def test_single_h_line():
    c = Circuit(registers=(Register("q", "q", 1),), instructions=(Instruction("h", (), (("q", 0),)),))
    text = print_qasm(c)
    lines = [ln for ln in text.splitlines() if ln]
    assert lines[0] == "OPENQASM 2.0;"
    assert lines.count("h q[0];") == 1


def test_delay_line_format():
    c = Circuit(
        registers=(Register("q", "q", 1),),
        instructions=(Instruction("delay", (100,), (("q", 0),)),),
    )
    assert "delay q[0], 100;" in print_qasm(c).splitlines()


def test_roundtrip_corpus(corpus):
    for name, circ in corpus:
        again = parse_qasm(print_qasm(circ))
        assert again == circ, f"text round-trip failed for {name}"


def test_roundtrip_gate_defs_and_conditions():
    src = (
        "OPENQASM 2.0;\n"
        'include "qelib1.inc";\n'
        "gate rot(a) x0 { rz(a/2) x0; ry(-a) x0; barrier x0; }\n"
        "qreg q[2];\n"
        "creg c[2];\n"
        "rot(0.7853981633974483) q[0];\n"
        "ccx.. placeholder"
    )
    src = src.replace("ccx.. placeholder", "if(c==2) rot(1.5) q[1];\nmeasure q -> c;")
    c = parse_qasm(src)
    assert parse_qasm(print_qasm(c)) == c


def test_roundtrip_without_include():
    c = parse_qasm("OPENQASM 2.0;\nqreg q[1];\nh q[0];\n")
    text = print_qasm(c)
    assert "include" not in text
    assert parse_qasm(text) == c


def test_params_bit_exact():
    src = "OPENQASM 2.0;\nqreg q[1];\nu3(0.1,2.0000000000000004,-0.0) q[0];\n"
    c = parse_qasm(src)
    c2 = parse_qasm(print_qasm(c))
    for a, b in zip(c.instructions[0].params, c2.instructions[0].params):
        assert a == b and str(a) == str(b)


def test_print_parse_print_fixpoint(corpus):
    for name, circ in corpus:
        once = print_qasm(circ)
        twice = print_qasm(parse_qasm(once))
        assert once == twice, f"printer not a fixpoint for {name}"
