"""Subwords, hull samples and block partitions of Fibonacci factors."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Literal

from .words import PotentialWindow, check_word, window

__all__ = [
    "MOTIF",
    "BlockParse",
    "NotAFibonacciFactor",
    "SubwordSet",
    "central_motif_locate",
    "enumerate_subwords",
    "hull_sample",
    "parse_left",
    "parse_right",
    "subword_complexity",
]

RIGHT_BLOCKS = ("101", "01")
LEFT_BLOCKS = ("101", "10")

# 101 101 01 101 101: two blocks on each side of a central "01"
MOTIF = "10110101101101"


class NotAFibonacciFactor(ValueError):
    """The word contains 00 or 111 and so cannot occur in the Fibonacci word."""


@dataclass(frozen=True)
class SubwordSet:
    length: int
    words: frozenset[str]

    def __post_init__(self) -> None:
        if any(len(w) != self.length for w in self.words):
            raise ValueError("subwords of mixed length")

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, w: object) -> bool:
        return w in self.words

    def to_dict(self) -> dict:
        return {"length": self.length, "count": len(self.words), "words": sorted(self.words)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _distinct_factors(text: str, length: int) -> set[str]:
    return {text[i : i + length] for i in range(len(text) - length + 1)}


def enumerate_subwords(length: int) -> SubwordSet:
    """All length-``length`` subwords of the two-sided Fibonacci word.

    Slides over ``v_1 .. v_W`` and accepts the result once doubling ``W``
    leaves the set unchanged.  Any two occurrences of a factor are a bounded
    distance apart, so a large enough window sees every factor.
    """
    if length < 1:
        raise ValueError(f"subword length must be >= 1, got {length}")
    width = 20 * length + 100
    found = _distinct_factors(window(1, width).letters, length)
    doubled = _distinct_factors(window(1, 2 * width).letters, length)
    if found != doubled:
        raise RuntimeError(f"subword set of length {length} did not stabilize at W={width}")
    return SubwordSet(length, frozenset(found))


def subword_complexity(max_length: int) -> tuple[int, ...]:
    """Counts ``(sub(1), ..., sub(max_length))``."""
    if max_length < 1:
        raise ValueError(f"max_length must be >= 1, got {max_length}")
    return tuple(len(enumerate_subwords(n)) for n in range(1, max_length + 1))


def hull_sample(shift: int, half_width: int) -> PotentialWindow:
    """Window of ``v`` around ``shift``, re-indexed so ``shift`` sits at 0.

    Every finite window of every shift limit of ``v`` occurs somewhere in
    ``v`` (the Fibonacci subshift is minimal), so shifted windows stand in
    for hull elements in any finite computation.
    """
    if half_width < 1:
        raise ValueError(f"half_width must be >= 1, got {half_width}")
    w = window(shift - half_width, shift + half_width)
    return w.recentered(-half_width)


@dataclass(frozen=True)
class BlockParse:
    """Decomposition ``prefix | blocks | tail`` of a word, read in ``direction``.

    ``prefix`` is the edge letter where parsing starts (left edge for
    rightward, right edge for leftward) and ``tail`` the incomplete block
    left over at the far edge.  ``blocks`` are listed in parse order, so a
    leftward parse lists the rightmost block first.
    """

    direction: Literal["rightward", "leftward"]
    prefix: str
    blocks: tuple[str, ...]
    tail: str

    def text(self) -> str:
        """The parsed word, reassembled."""
        if self.direction == "rightward":
            return self.prefix + "".join(self.blocks) + self.tail
        return self.tail + "".join(reversed(self.blocks)) + self.prefix

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "prefix": self.prefix,
            "blocks": list(self.blocks),
            "tail": self.tail,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _require_factor(w: str) -> None:
    check_word(w)
    if "00" in w or "111" in w:
        raise NotAFibonacciFactor(f"word contains 00 or 111: {w[:40]!r}")


def parse_right(w: str) -> BlockParse:
    """Split ``w`` into ``p w_1 w_2 ...`` with ``p`` in {"", "1"}, ``w_i`` in {101, 01}.

    The prefix is ``"1"`` exactly when ``w`` starts with ``11``; otherwise
    each block is fixed by its first letter (``0`` opens ``01``, ``1`` opens
    ``101``).  A trailing incomplete block is returned as ``tail``.
    """
    _require_factor(w)
    prefix = "1" if w.startswith("11") else ""
    i = len(prefix)
    blocks = []
    n = len(w)
    while i < n:
        block = "01" if w[i] == "0" else "101"
        if i + len(block) > n:
            break
        if w[i : i + len(block)] != block:
            # unreachable for factors free of 00 and 111
            raise NotAFibonacciFactor(f"no block fits at offset {i}: {w[i:i + 3]!r}")
        blocks.append(block)
        i += len(block)
    tail = w[i:]
    return BlockParse("rightward", prefix, tuple(blocks), tail)


def parse_left(w: str) -> BlockParse:
    """Mirror of :func:`parse_right`: blocks in {101, 10}, read right to left.

    The edge letter is ``"1"`` exactly when ``w`` ends with ``11``; the
    incomplete leftmost piece is returned as ``tail``.
    """
    _require_factor(w)
    mirrored = parse_right(w[::-1])
    # reflection turns 01 into 10 and fixes 101
    blocks = tuple(b[::-1] for b in mirrored.blocks)
    return BlockParse("leftward", mirrored.prefix, blocks, mirrored.tail[::-1])


def central_motif_locate() -> int:
    """Start index of the occurrence of ``101 101 01 101 101`` used as a seed.

    Returns the first occurrence at a positive index, ``v_1 .. v_14``.
    """
    start = 1
    found = window(start, start + len(MOTIF) - 1).letters
    if found != MOTIF:
        raise AssertionError(f"motif check failed: v_{start}.. = {found}")
    return start
