# src/logic.py
"""Bit-parallel evaluation kernels.

A "word" is a Python integer whose bit ``k`` is the signal value in vector
(or lane) ``k``; ``mask`` has one bit set per live vector.
"""
from functools import reduce
from typing import Sequence

from models import Kind


def mux_word(sel: int, a: int, b: int) -> int:
    """``b`` where ``sel`` is 1, ``a`` elsewhere."""
    return a ^ ((a ^ b) & sel)


def table_word(bits: Sequence[int], inputs: Sequence[int], mask: int) -> int:
    """LSB-first truth table evaluated by a Shannon mux tree (input 0 at the leaves)."""
    if len(bits) != 1 << len(inputs):
        raise ValueError(f"{len(bits)} table bits for {len(inputs)} inputs")
    level = [mask if b else 0 for b in bits]
    for x in inputs:
        level = [mux_word(x, lo, hi) for lo, hi in zip(level[0::2], level[1::2])]
    return level[0]


def gate_word(kind: Kind, inputs: Sequence[int], mask: int) -> int:
    if kind == Kind.CONST0:
        return 0
    if kind == Kind.CONST1:
        return mask
    if kind == Kind.BUF:
        return inputs[0]
    if kind == Kind.NOT:
        return ~inputs[0] & mask
    if kind == Kind.AND:
        return reduce(lambda a, b: a & b, inputs)
    if kind == Kind.NAND:
        return ~reduce(lambda a, b: a & b, inputs) & mask
    if kind == Kind.OR:
        return reduce(lambda a, b: a | b, inputs)
    if kind == Kind.NOR:
        return ~reduce(lambda a, b: a | b, inputs) & mask
    if kind == Kind.XOR:
        return inputs[0] ^ inputs[1]
    if kind == Kind.XNOR:
        return ~(inputs[0] ^ inputs[1]) & mask
    if kind == Kind.MUX2:
        return mux_word(inputs[0], inputs[1], inputs[2])
    raise ValueError(f"{kind} is not a library gate")


def bits_to_int(bits: Sequence[int]) -> int:
    """Packs an LSB-first bit sequence into an integer."""
    value = 0
    for i, b in enumerate(bits):
        if b:
            value |= 1 << i
    return value


def int_to_bits(value: int, length: int) -> tuple:
    return tuple((value >> i) & 1 for i in range(length))


def select_index(select_bits: Sequence[int]) -> int:
    return bits_to_int(select_bits)


def select_width(n_inputs: int) -> int:
    """ceil(log2 n) select bits for an n-input interconnect."""
    return max(0, (n_inputs - 1).bit_length())
