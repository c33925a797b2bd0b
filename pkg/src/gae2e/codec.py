"""Fixed-point binary encoding of parameter vectors.

Each coordinate is quantized to ``bits_per_param`` bits, written
most-significant bit first, and the segments are concatenated in space order.
The GA operators never touch this form; it exists for compact logging and for
tools that expect a bitstring chromosome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadBitWidth, LengthMismatch, OutOfBounds
from .space import ParamSpace, _frozen, as_vector

DEFAULT_BITS = 16


@dataclass(frozen=True)
class BinaryChromosome:
    bits: str
    bits_per_param: int
    space: ParamSpace

    def __post_init__(self):
        _check_width(self.bits_per_param)
        if len(self.bits) != self.space.dimension * self.bits_per_param:
            raise LengthMismatch(
                f"{len(self.bits)} bits, expected {self.space.dimension} x {self.bits_per_param}"
            )
        if set(self.bits) - {"0", "1"}:
            raise ValueError("bitstring may only contain '0' and '1'")

    def segments(self) -> list[str]:
        k = self.bits_per_param
        return [self.bits[i : i + k] for i in range(0, len(self.bits), k)]

    def to_hex(self) -> str:
        """Hex form, left-padded with zero bits to a whole number of nibbles."""
        n_hex = math.ceil(len(self.bits) / 4)
        return format(int(self.bits, 2), f"0{n_hex}x")

    @classmethod
    def from_hex(cls, text: str, space: ParamSpace, bits_per_param: int = DEFAULT_BITS):
        n_bits = space.dimension * bits_per_param
        value = int(text, 16)
        if value >> n_bits:
            raise LengthMismatch(f"hex string {text!r} has more than {n_bits} significant bits")
        return cls(format(value, f"0{n_bits}b"), bits_per_param, space)


def _check_width(bits: int) -> None:
    if not isinstance(bits, (int, np.integer)) or not 1 <= bits <= 32:
        raise BadBitWidth(f"bits_per_param must be an integer in [1, 32], got {bits!r}")


def quantize(v: Sequence[float], space: ParamSpace, bits_per_param: int = DEFAULT_BITS) -> list[int]:
    """Integer level of each coordinate, rounding half up."""
    _check_width(bits_per_param)
    v = as_vector(v, space)
    if np.any(v < space.lower) or np.any(v > space.upper):
        raise OutOfBounds(f"vector {v.tolist()} lies outside the space bounds")
    top = (1 << bits_per_param) - 1
    frac = (v - space.lower) / (space.upper - space.lower)
    return [min(top, int(math.floor(f * top + 0.5))) for f in frac]


def encode(v: Sequence[float], space: ParamSpace, bits_per_param: int = DEFAULT_BITS) -> BinaryChromosome:
    levels = quantize(v, space, bits_per_param)
    bits = "".join(format(k, f"0{bits_per_param}b") for k in levels)
    return BinaryChromosome(bits, bits_per_param, space)


def decode(c: BinaryChromosome, space: ParamSpace | None = None) -> np.ndarray:
    space = c.space if space is None else space
    if len(c.bits) != space.dimension * c.bits_per_param:
        raise LengthMismatch(
            f"{len(c.bits)} bits do not fit {space.dimension} parameters of {c.bits_per_param} bits"
        )
    top = (1 << c.bits_per_param) - 1
    k = c.bits_per_param
    levels = np.array([int(c.bits[i : i + k], 2) for i in range(0, len(c.bits), k)], dtype=np.float64)
    return _frozen(space.lower + levels / top * (space.upper - space.lower))


def to_hex(v: Sequence[float], space: ParamSpace, bits_per_param: int = DEFAULT_BITS) -> str:
    return encode(v, space, bits_per_param).to_hex()
