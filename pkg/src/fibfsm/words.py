"""Finite, one-sided and two-sided Fibonacci words.

Words are plain ``str`` objects over the alphabet ``"01"``.  The two-sided
Fibonacci word is evaluated exactly from the rotation formula

    v_n = 1  iff  frac(n * alpha) in [1 - alpha, 1),    alpha = (sqrt(5) - 1) / 2.

Since ``0 <= frac(n alpha) < 1`` and ``0 < alpha < 1`` we have
``frac(n alpha) >= 1 - alpha``  iff  ``frac(n alpha) + alpha >= 1``  iff
``floor((n + 1) alpha) = floor(n alpha) + 1``, so

    v_n = floor((n + 1) alpha) - floor(n alpha),

and the floors are computed with integer square roots only.  This keeps the
two boundary indices n = -1 and n = 0 (where ``frac(n alpha)`` lands exactly
on an interval endpoint) correct, which floating point does not.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

__all__ = [
    "ALPHABET",
    "PotentialWindow",
    "check_word",
    "fibonacci_number",
    "finite_fibonacci",
    "floor_alpha",
    "reverse",
    "substitute",
    "v_at",
    "window",
]

ALPHABET = frozenset("01")

_SUBSTITUTION = {"0": "1", "1": "10"}

# |m| below this keeps 5 m^2 comfortably inside int64
_INT64_SAFE = 10**9


def check_word(w: str) -> str:
    """Return ``w`` unchanged, raising ``ValueError`` if it is not a 0/1 word."""
    if not isinstance(w, str):
        raise TypeError(f"binary word must be a str, got {type(w).__name__}")
    if not set(w) <= ALPHABET:
        raise ValueError(f"not a binary word: {w!r}")
    return w


def reverse(w: str) -> str:
    return check_word(w)[::-1]


def substitute(w: str) -> str:
    """Apply the Fibonacci substitution 0 -> 1, 1 -> 10 letter by letter."""
    return "".join(_SUBSTITUTION[c] for c in check_word(w))


def fibonacci_number(k: int) -> int:
    """Length of the k-th finite Fibonacci word (F_1 = 1, F_2 = 2, F_3 = 3, ...)."""
    if k < 1:
        raise ValueError(f"Fibonacci index must be >= 1, got {k}")
    a, b = 1, 2
    for _ in range(k - 1):
        a, b = b, a + b
    return a


def finite_fibonacci(k: int) -> str:
    """The k-th finite Fibonacci word, f_1 = "1", f_2 = "10", f_{k+1} = f_k f_{k-1}.

    For ``k <= 12`` the result is cross-checked against ``k - 1`` iterated
    substitutions of ``"1"``.
    """
    if k < 1:
        raise ValueError(f"finite Fibonacci words start at k = 1, got {k}")
    prev, cur = "1", "10"
    if k == 1:
        cur = prev
    else:
        for _ in range(k - 2):
            prev, cur = cur, cur + prev
    if k <= 12:
        w = "1"
        for _ in range(k - 1):
            w = substitute(w)
        if w != cur:
            raise AssertionError(f"recursion and substitution disagree at k={k}")
    return cur


def floor_alpha(m: int) -> int:
    """Exact ``floor(m * alpha)`` for any integer ``m``."""
    if m >= 0:
        # m alpha = (sqrt(5 m^2) - m) / 2 and sqrt(5 m^2) is irrational for m > 0
        return (isqrt(5 * m * m) - m) // 2
    k = -m
    # m alpha is irrational, so floor(-k alpha) = -floor(k alpha) - 1
    return -((isqrt(5 * k * k) - k) // 2) - 1


def v_at(n: int) -> int:
    """Letter v_n of the two-sided Fibonacci word, as the integer 0 or 1."""
    n = int(n)
    return floor_alpha(n + 1) - floor_alpha(n)


def _floor_alpha_array(m: np.ndarray) -> np.ndarray:
    """Vectorized ``floor_alpha`` for int64 arrays with ``|m| < _INT64_SAFE``."""
    k = np.abs(m)
    sq = 5 * k * k
    s = np.floor(np.sqrt(sq.astype(np.float64))).astype(np.int64)
    # repair the float estimate into the exact integer square root
    s -= (s * s > sq).astype(np.int64)
    s += ((s + 1) * (s + 1) <= sq).astype(np.int64)
    s -= (s * s > sq).astype(np.int64)
    pos = (s - k) // 2
    return np.where(m >= 0, pos, -pos - 1)


@dataclass(frozen=True)
class PotentialWindow:
    """Contiguous slice ``v_start .. v_{start + len - 1}`` of the Fibonacci word."""

    start: int
    letters: str

    def __post_init__(self) -> None:
        check_word(self.letters)

    @property
    def stop(self) -> int:
        """Index of the last letter (inclusive)."""
        return self.start + len(self.letters) - 1

    def __len__(self) -> int:
        return len(self.letters)

    def __getitem__(self, n: int) -> int:
        """Letter at absolute index ``n``."""
        if not self.start <= n <= self.stop:
            raise IndexError(f"index {n} outside [{self.start}, {self.stop}]")
        return int(self.letters[n - self.start])

    def slice(self, lo: int, hi: int) -> str:
        """Letters at absolute indices ``lo .. hi`` inclusive."""
        if lo < self.start or hi > self.stop or lo > hi + 1:
            raise IndexError(f"[{lo}, {hi}] not inside [{self.start}, {self.stop}]")
        return self.letters[lo - self.start : hi - self.start + 1]

    def recentered(self, start: int) -> PotentialWindow:
        return PotentialWindow(start, self.letters)

    def as_array(self) -> np.ndarray:
        return np.frombuffer(self.letters.encode("ascii"), dtype=np.uint8) - ord("0")


def window(l: int, r: int) -> PotentialWindow:
    """Exact window ``v_l .. v_r`` of the two-sided Fibonacci word."""
    l, r = int(l), int(r)
    if l > r:
        raise ValueError(f"empty window: l={l} > r={r}")
    if max(abs(l), abs(r) + 1) < _INT64_SAFE:
        floors = _floor_alpha_array(np.arange(l, r + 2, dtype=np.int64))
        diffs = np.diff(floors).astype(np.uint8)
        letters = (diffs + ord("0")).tobytes().decode("ascii")
    else:
        floors = [floor_alpha(m) for m in range(l, r + 2)]
        letters = "".join(str(b - a) for a, b in zip(floors, floors[1:]))
    return PotentialWindow(l, letters)
