"""Delay-insensitive code words: dual-rail and 1-of-4.

Rails are plain ints (0 or 1).  Serialized rail order is always ``(w1, w0)``
for dual-rail and ``(f0, f1, f2, f3)`` for 1-of-4.
"""
from __future__ import annotations

import enum
from typing import NamedTuple, Sequence, Tuple, Union

from .errors import StructuralError

Level = int  # 0 or 1; there are no X/Z states


class CodeClass(enum.Enum):
    VALID = "valid"
    SPACER = "spacer"
    INVALID = "invalid"

    def __str__(self):
        return self.value


def classify(rails: Sequence[Level]) -> CodeClass:
    """Classify a one-hot rail group: one rail high is VALID, none is SPACER."""
    if len(rails) == 0:
        raise StructuralError("cannot classify an empty rail group")
    high = 0
    for r in rails:
        if r not in (0, 1):
            raise StructuralError(f"rail level must be 0 or 1, got {r!r}")
        high += r
    if high == 0:
        return CodeClass.SPACER
    if high == 1:
        return CodeClass.VALID
    return CodeClass.INVALID


class DualRail(NamedTuple):
    w1: Level
    w0: Level

    @property
    def code_class(self) -> CodeClass:
        return classify(self)


class OneOfFour(NamedTuple):
    f0: Level
    f1: Level
    f2: Level
    f3: Level

    @property
    def code_class(self) -> CodeClass:
        return classify(self)


SPACER_DUAL_RAIL = DualRail(0, 0)
SPACER_ONE_OF_FOUR = OneOfFour(0, 0, 0, 0)


def _check_bit(bit, name="bit"):
    if bit not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {bit!r}")


def encode_dual_rail(bit: int) -> DualRail:
    _check_bit(bit)
    return DualRail(w1=bit, w0=1 - bit)


def decode_dual_rail(d: Sequence[Level]) -> Union[int, CodeClass]:
    """Return the bit carried by a VALID word, else its SPACER/INVALID tag."""
    w1, w0 = d
    cls = classify((w1, w0))
    if cls is CodeClass.VALID:
        return w1
    return cls


def encode_one_of_four(x: int, y: int) -> OneOfFour:
    """(x, y) selects rail ``2*x + y``: (0,0)->f0, (0,1)->f1, (1,0)->f2, (1,1)->f3."""
    _check_bit(x, "x")
    _check_bit(y, "y")
    rails = [0, 0, 0, 0]
    rails[2 * x + y] = 1
    return OneOfFour(*rails)


def decode_one_of_four(q: Sequence[Level]) -> Union[Tuple[int, int], CodeClass]:
    cls = classify(q)
    if cls is not CodeClass.VALID:
        return cls
    index = list(q).index(1)
    return index >> 1, index & 1
