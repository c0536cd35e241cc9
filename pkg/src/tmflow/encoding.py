"""Exact integer arithmetic of the configuration encoding: base-k word
codes, the dovetailing pairing I(x,y) = ((x+y)² + 3x + y)/2 with its k-fold
composition and exact inverses, and the encoded one-step map psi on ℕ.

Everything here is exact big-integer work; reals only enter at the robust
extension boundary in :mod:`tmflow.robustmap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .tm import Configuration, TuringMachine, step

__all__ = [
    "DecodeError",
    "pair2",
    "unpair2",
    "pair_k",
    "unpair_k",
    "EncodedConfig",
    "encode_config",
    "decode_config",
    "encode_word",
    "decode_word",
    "psi",
    "psi3",
]


class DecodeError(ValueError):
    pass


def pair2(x: int, y: int) -> int:
    """Dovetailing pairing bijection ℕ² → ℕ."""
    if x < 0 or y < 0:
        raise ValueError("pair2 needs naturals")
    return ((x + y) * (x + y) + 3 * x + y) // 2


def unpair2(z: int) -> tuple[int, int]:
    """Inverse of pair2: locate the diagonal by integer square root."""
    if z < 0:
        raise ValueError("unpair2 needs a natural")
    d = (math.isqrt(8 * z + 1) - 1) // 2
    x = z - d * (d + 1) // 2
    return x, d - x


def pair_k(xs) -> int:
    """I_k via I_{k+1}(x₁,...,x_{k+1}) = I₂(I_k(x₁,...,x_k), x_{k+1})."""
    xs = list(xs)
    if len(xs) < 2:
        raise ValueError("pair_k needs k >= 2")
    acc = pair2(xs[0], xs[1])
    for x in xs[2:]:
        acc = pair2(acc, x)
    return acc


def unpair_k(z: int, k: int) -> tuple[int, ...]:
    if k < 2:
        raise ValueError("unpair_k needs k >= 2")
    if k == 2:
        return unpair2(z)
    rest, last = unpair2(z)
    return unpair_k(rest, k - 1) + (last,)


def encode_word(machine: TuringMachine, word) -> int:
    """Base-k value of a word, first symbol as the lowest digit."""
    value = 0
    for sym in reversed(tuple(word)):
        value = value * machine.k + machine.gamma(sym)
    return value


def decode_word(machine: TuringMachine, value: int) -> tuple:
    if value < 0:
        raise DecodeError("word code must be a natural")
    out = []
    while value:
        value, digit = divmod(value, machine.k)
        out.append(machine.symbol_of(digit))
    return tuple(out)


@dataclass(frozen=True)
class EncodedConfig:
    """The triple (y1, y2, q) and its collapsed code c = I₃(y1, y2, q)."""

    y1: int
    y2: int
    q: int
    k: int
    c: int

    @classmethod
    def from_triple(cls, machine: TuringMachine, y1: int, y2: int, q: int) -> "EncodedConfig":
        if y1 < 0 or y2 < 0:
            raise DecodeError("word codes must be naturals")
        if not 1 <= q <= machine.m:
            raise DecodeError(f"state index {q} out of range 1..{machine.m}")
        return cls(y1=y1, y2=y2, q=q, k=machine.k, c=pair_k((y1, y2, q)))


def encode_config(machine: TuringMachine, config: Configuration) -> EncodedConfig:
    return EncodedConfig.from_triple(
        machine,
        encode_word(machine, config.u),
        encode_word(machine, config.v),
        config.q,
    )


def decode_config(machine: TuringMachine, code) -> Configuration:
    """Inverse of encode_config; accepts an EncodedConfig or a bare c ∈ ℕ."""
    if isinstance(code, EncodedConfig):
        y1, y2, q = code.y1, code.y2, code.q
    else:
        y1, y2, q = unpair_k(int(code), 3)
    if not 1 <= q <= machine.m:
        raise DecodeError(f"state index {q} out of range 1..{machine.m}")
    return Configuration(
        u=decode_word(machine, y1),
        v=decode_word(machine, y2),
        q=q,
    )


def psi3(machine: TuringMachine, triple: tuple[int, int, int]) -> tuple[int, int, int]:
    """One encoded step on ℕ³; triples that do not decode map to themselves.

    The junk fixed point makes the map total, which the growth probe and the
    reference robust extension both rely on.
    """
    y1, y2, q = triple
    if not (1 <= q <= machine.m) or y1 < 0 or y2 < 0:
        return triple
    config = Configuration(
        u=decode_word(machine, y1),
        v=decode_word(machine, y2),
        q=q,
    )
    nxt = step(machine, config)
    enc = encode_config(machine, nxt)
    return (enc.y1, enc.y2, enc.q)


def psi(machine: TuringMachine, c: int) -> int:
    """Encoded transition ℕ → ℕ: unpair, step, pair."""
    config = decode_config(machine, c)
    return encode_config(machine, step(machine, config)).c
