"""Synthesized S-box netlist: exhaustive oracle, area band, structure."""

import pytest

from sboxsim.gf import (DEFAULT_PARAMS, FieldParams, InvalidParamsError,
                        derive_field_params, sbox_reference)
from sboxsim.netlist import area_ge, critical_path_delay, logic_depth
from sboxsim.synth import NetlistBuilder, build_linear_block, synth_sbox


@pytest.fixture(scope="module")
def sbox_netlist():
    return synth_sbox(DEFAULT_PARAMS)


def test_sbox_netlist_known_bytes(sbox_netlist):
    assert sbox_netlist.evaluate_byte(0x00) == 0x63
    assert sbox_netlist.evaluate_byte(0x53) == 0xED


def test_sbox_netlist_matches_table_exhaustively(sbox_netlist):
    for x in range(256):
        assert sbox_netlist.evaluate_byte(x) == sbox_reference(x), f"{x:#x}"


def test_sbox_netlist_validates(sbox_netlist):
    sbox_netlist.validate()


def test_area_in_expected_band(sbox_netlist):
    # Desk-scale tolerance around the published figure for this circuit
    # family; the absolute number depends on the cell library.
    ge = area_ge(sbox_netlist)
    assert 150.0 <= ge <= 280.0, f"area {ge:.2f} GE out of band"


def test_corrupted_params_raise(sbox_netlist):
    rows = list(DEFAULT_PARAMS.delta)
    rows[0] ^= 0x02
    bad = FieldParams(lam=DEFAULT_PARAMS.lam, phi=DEFAULT_PARAMS.phi,
                      delta=tuple(rows), delta_inv=DEFAULT_PARAMS.delta_inv)
    with pytest.raises(InvalidParamsError):
        synth_sbox(bad)


def test_alternate_params_synthesize_correctly():
    alt = derive_field_params(lam=0xC, phi=0x2, root_rank=0)
    nl = synth_sbox(alt)
    for x in range(0, 256, 3):
        assert nl.evaluate_byte(x) == sbox_reference(x)


def test_depth_supports_five_stages(sbox_netlist):
    assert logic_depth(sbox_netlist) >= 5
    assert critical_path_delay(sbox_netlist) > 0


def test_builder_hash_consing():
    b = NetlistBuilder(2)
    g1 = b.xor(0, 1)
    g2 = b.xor(1, 0)
    assert g1 == g2
    g3 = b.and_(0, 1)
    assert g3 != g1
    assert len(b.kinds) == 2


def test_linear_block_simple_identity_and_parity():
    b = NetlistBuilder(3)
    outs = build_linear_block(b, [0b001, 0b111], b.inputs)
    nl = b.build(outs)
    for x in range(8):
        bits = [(x >> i) & 1 for i in range(3)]
        got = nl.evaluate(bits)
        assert got[0] == bits[0]
        assert got[1] == bits[0] ^ bits[1] ^ bits[2]


def test_linear_block_shares_common_pairs():
    b = NetlistBuilder(4)
    build_linear_block(b, [0b0011, 0b0111, 0b1011], b.inputs)
    # The pair (0,1) occurs in all three rows and must be built once.
    xor_count = sum(1 for k in b.kinds if k == "XOR2")
    assert xor_count == 3


def test_linear_block_inversion_mask():
    b = NetlistBuilder(2)
    outs = build_linear_block(b, [0b11, 0b01], b.inputs, invert_mask=0b11)
    nl = b.build(outs)
    for x in range(4):
        bits = [(x >> i) & 1 for i in range(2)]
        got = nl.evaluate(bits)
        assert got[0] == 1 ^ bits[0] ^ bits[1]
        assert got[1] == 1 ^ bits[0]


def test_linear_block_rejects_zero_row():
    b = NetlistBuilder(2)
    with pytest.raises(ValueError):
        build_linear_block(b, [0b00], b.inputs)


def test_synthesis_is_deterministic():
    a = synth_sbox(DEFAULT_PARAMS)
    b = synth_sbox(DEFAULT_PARAMS)
    assert a == b
