"""Exact transfer-matrix certificates for unbounded homogeneous solutions.

A solution of ``x_{n-1} + b_n x_n + x_{n+1} = 0`` is propagated as pairs
``(x_{n-1}, x_n)`` by ``T_b = [[0, 1], [-1, -b]]``.  For a word ``w_1 .. w_k``
read in time order the propagator is ``T_{w_k} ... T_{w_1}``.

Two sign/modulus patterns drive the growth arguments:

* property C: ``y1 * y2 < 0`` and ``|y1| < |y2|``, preserved by T_101, T_01;
* property F: ``y1 * y2 < 0`` and ``|y1| > |y2|``, preserved by the inverses
  of T_101 and T_10.

Every quantity here is a :class:`fractions.Fraction`; nothing is rounded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

from .subshift import MOTIF, central_motif_locate, parse_left, parse_right
from .words import PotentialWindow

__all__ = [
    "WORKED_TABLE_DIAGONAL",
    "WORKED_TABLE_X",
    "CertificateViolation",
    "GrowthCertificate",
    "InsufficientWord",
    "StepReport",
    "TransferMatrix",
    "TransferVec",
    "TwoSidedSeed",
    "block_matrix",
    "certify_one_sided",
    "certify_two_sided",
    "has_property_C",
    "has_property_F",
    "propagate",
    "replay_paper_table",
    "single_matrix",
    "step_check_left",
    "step_check_right",
    "two_sided_seed",
]

SCHEMA_VERSION = 1
DEFAULT_BOUND = Fraction(10**6)
# trajectories are not kept for certificates longer than this
TRAJECTORY_LIMIT = 10**4

WORKED_TABLE_DIAGONAL = (1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 0, 1, 1)
WORKED_TABLE_X = (1, -1, -1, 2, -1, -2, 3, 2, -5, 3, 5, -8, 3, 8, -11, -8, 19)


class CertificateViolation(AssertionError):
    """A growth inequality failed in exact arithmetic."""


class InsufficientWord(ValueError):
    """The block sequence ran out before the certificate could finish."""


@dataclass(frozen=True)
class TransferVec:
    y1: Fraction
    y2: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "y1", Fraction(self.y1))
        object.__setattr__(self, "y2", Fraction(self.y2))

    def __iter__(self):
        return iter((self.y1, self.y2))

    def __neg__(self) -> TransferVec:
        return TransferVec(-self.y1, -self.y2)

    def to_list(self) -> list[str]:
        return [str(self.y1), str(self.y2)]


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 matrix ``[[a, b], [c, d]]`` with exact rational entries."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    @classmethod
    def identity(cls) -> TransferMatrix:
        return cls(1, 0, 0, 1)

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix):
            return TransferMatrix(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        if isinstance(other, TransferVec):
            return TransferVec(self.a * other.y1 + self.b * other.y2, self.c * other.y1 + self.d * other.y2)
        return NotImplemented

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def inverse(self) -> TransferMatrix:
        det = self.det()
        if det == 0:
            raise ZeroDivisionError("singular transfer matrix")
        return TransferMatrix(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def rows(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))


def single_matrix(letter) -> TransferMatrix:
    """``T_b = [[0, 1], [-1, -b]]`` for a letter ``b`` in {0, 1}."""
    b = str(letter)
    if b not in ("0", "1"):
        raise ValueError(f"letter must be 0 or 1, got {letter!r}")
    return TransferMatrix(0, 1, -1, -int(b))


def propagate(word: str) -> TransferMatrix:
    """Propagator of an arbitrary 0/1 word in time order."""
    m = TransferMatrix.identity()
    for c in word:
        m = single_matrix(c) @ m
    return m


_BLOCK_MATRICES = {w: propagate(w) for w in ("101", "01", "10")}
_BLOCK_INVERSES = {w: m.inverse() for w, m in _BLOCK_MATRICES.items()}


def block_matrix(block: str) -> TransferMatrix:
    """Propagator of one of the blocks ``101``, ``01`` or ``10``."""
    try:
        return _BLOCK_MATRICES[block]
    except KeyError:
        raise ValueError(f"not a block: {block!r}") from None


def has_property_C(v: TransferVec) -> bool:
    y1, y2 = v
    return y1 * y2 < 0 and abs(y1) < abs(y2)


def has_property_F(v: TransferVec) -> bool:
    y1, y2 = v
    return y1 * y2 < 0 and abs(y1) > abs(y2)


@dataclass(frozen=True)
class StepReport:
    """Growth of the tracked component over one block, and its guaranteed minimum."""

    gain: Fraction
    required: Fraction


def step_check_right(v: TransferVec, block: str) -> tuple[TransferVec, StepReport]:
    """Apply ``T_block`` (block in {101, 01}) to a property-C vector and check A, B, C."""
    if block not in ("101", "01"):
        raise ValueError(f"rightward block must be 101 or 01, got {block!r}")
    if not has_property_C(v):
        raise ValueError(f"vector {v} does not have property C")
    y1, y2 = v
    z = block_matrix(block) @ v
    z1, z2 = z
    required = min(abs(y1 + y2), abs(y1))
    gain = abs(z2) - abs(y2)
    if not (required > 0 and gain >= required):
        raise CertificateViolation(f"property A fails: {v} -> {z} via {block}")
    if not (abs(z1 + z2) >= abs(y1 + y2) and abs(z1) >= abs(y1)):
        raise CertificateViolation(f"property B fails: {v} -> {z} via {block}")
    if not has_property_C(z):
        raise CertificateViolation(f"property C lost: {v} -> {z} via {block}")
    return z, StepReport(gain, required)


def step_check_left(v: TransferVec, block: str) -> tuple[TransferVec, StepReport]:
    """Apply ``T_block^{-1}`` (block in {101, 10}) to a property-F vector and check D, E, F."""
    if block not in ("101", "10"):
        raise ValueError(f"leftward block must be 101 or 10, got {block!r}")
    if not has_property_F(v):
        raise ValueError(f"vector {v} does not have property F")
    y1, y2 = v
    z = _BLOCK_INVERSES[block] @ v
    z1, z2 = z
    required = min(abs(y1 + y2), abs(y2))
    gain = abs(z1) - abs(y1)
    if not (required > 0 and gain >= required):
        raise CertificateViolation(f"property D fails: {v} -> {z} via {block}")
    if not (abs(z1 + z2) >= abs(y1 + y2) and abs(z2) >= abs(y2)):
        raise CertificateViolation(f"property E fails: {v} -> {z} via {block}")
    if not has_property_F(z):
        raise CertificateViolation(f"property F lost: {v} -> {z} via {block}")
    return z, StepReport(gain, required)


@dataclass
class GrowthCertificate:
    achieved_property: Literal["C", "F"]
    achieved_at_step: int
    gap: Fraction
    steps_to_bound: int
    bound: Fraction
    direction: Literal["rightward", "leftward"] = "rightward"
    case: str = ""
    final: TransferVec | None = None
    trajectory: list[TransferVec] | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "case": self.case,
            "direction": self.direction,
            "achieved_property": self.achieved_property,
            "achieved_at_step": self.achieved_at_step,
            "gap": str(self.gap),
            "steps_to_bound": self.steps_to_bound,
            "bound": str(self.bound),
            "final": self.final.to_list() if self.final is not None else None,
        }
        if self.trajectory is not None:
            d["trajectory"] = [v.to_list() for v in self.trajectory]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _grow(
    v: TransferVec,
    blocks: Iterable[str],
    bound: Fraction,
    direction: str,
    trajectory: list[TransferVec] | None,
) -> tuple[TransferVec, Fraction, int, list[TransferVec] | None]:
    """Iterate the checked steps from ``v`` until the tracked entry exceeds ``bound``.

    Returns the final vector, the gap at the start, the number of blocks used
    and the (possibly dropped) trajectory.
    """
    if direction == "rightward":
        step, tracked = step_check_right, (lambda u: abs(u.y2))
        gap = min(abs(v.y1 + v.y2), abs(v.y1))
    else:
        step, tracked = step_check_left, (lambda u: abs(u.y1))
        gap = min(abs(v.y1 + v.y2), abs(v.y2))
    start = tracked(v)
    k = 0
    it = iter(blocks)
    while tracked(v) <= bound:
        block = next(it, None)
        if block is None:
            raise InsufficientWord(f"blocks exhausted after {k} steps at |y| = {tracked(v)}")
        v, report = step(v, block)
        k += 1
        if report.gain < gap:
            raise CertificateViolation(f"step {k} grew by {report.gain} < gap {gap}")
        if tracked(v) < start + k * gap:
            raise CertificateViolation(f"linear growth bound fails at step {k}")
        if trajectory is not None:
            trajectory.append(v)
            if len(trajectory) > TRAJECTORY_LIMIT:
                trajectory = None
    return v, gap, k, trajectory


def certify_one_sided(
    blocks: Sequence[str],
    prefix: str = "",
    bound=DEFAULT_BOUND,
    record: bool = False,
) -> GrowthCertificate:
    """Certify growth of the solution with ``x_0 = 1`` on the diagonal ``prefix + blocks``.

    With ``prefix == ""`` the start is ``(x_{-1}, x_0) = (0, 1)``: T_01 only
    flips its sign until the first 101 produces ``+-(-1, 2)``.  With
    ``prefix == "1"`` the start is ``(x_0, x_1) = (1, -1)``: T_101 fixes it
    until the first 01 produces ``(-1, 2)``.  From there each block is a
    checked step.
    """
    bound = Fraction(bound)
    if bound <= 0:
        raise ValueError("bound must be positive")
    if prefix == "":
        v, trigger, idle = TransferVec(0, 1), "101", "01"
    elif prefix == "1":
        v, trigger, idle = TransferVec(1, -1), "01", "101"
    else:
        raise ValueError(f"prefix must be '' or '1', got {prefix!r}")
    start = v
    trajectory = [v] if record else None
    blocks = list(blocks)
    k = 0
    while not has_property_C(v):
        if k == len(blocks):
            raise InsufficientWord(f"no {trigger} block among {k} blocks")
        block = blocks[k]
        if block not in (trigger, idle):
            raise ValueError(f"not a rightward block: {block!r}")
        v = block_matrix(block) @ v
        k += 1
        if trajectory is not None:
            trajectory.append(v)
        expected = (TransferVec(-1, 2), TransferVec(1, -2)) if block == trigger else (start, -start)
        if v not in expected:
            raise CertificateViolation(f"start-up case analysis broken at block {k}: {v}")
    achieved = k
    v, gap, used, trajectory = _grow(v, blocks[k:], bound, "rightward", trajectory)
    return GrowthCertificate(
        "C", achieved, gap, achieved + used, bound, "rightward",
        case=f"one_sided:prefix={prefix or 'eps'}", final=v, trajectory=trajectory,
    )


@dataclass(frozen=True)
class TwoSidedSeed:
    """Case decision for the solution with ``x_0 = alpha``, ``x_1 = beta``.

    Indices are relative to the ``0`` of the central ``01`` block.  ``pair``
    is the index of ``y1`` in the starting pair ``(x_pair, x_{pair+1})``.
    """

    case: str
    direction: Literal["rightward", "leftward"] | None
    pair: int | None
    start: TransferVec | None
    template: tuple[Fraction, ...]


def _template(alpha: Fraction, beta: Fraction) -> tuple[Fraction, ...]:
    # x_{-4} .. x_5 around the central 01 of 101 101 01 101 101
    a, b = alpha, beta
    return (a - 2 * b, b, -a + b, -b, a, b, -a - b, a, a + b, -2 * a - b)


def two_sided_seed(alpha, beta) -> TwoSidedSeed:
    alpha, beta = Fraction(alpha), Fraction(beta)
    x = dict(zip(range(-4, 6), _template(alpha, beta)))
    tpl = tuple(x[i] for i in range(-4, 6))
    if alpha == 0 and beta == 0:
        return TwoSidedSeed("1:zero", None, None, None, tpl)
    if alpha == 0:
        case, direction, pair = "2", "leftward", -4
    elif beta == 0:
        case, direction, pair = "3", "rightward", 4
    elif alpha * beta > 0:
        case, direction, pair = "4a", "rightward", 1
    else:
        case, direction, pair = "4b", "leftward", -4
    start = TransferVec(x[pair], x[pair + 1])
    check = has_property_C if direction == "rightward" else has_property_F
    if not check(start):
        raise CertificateViolation(f"case {case}: {start} lacks the expected property")
    return TwoSidedSeed(case, direction, pair, start, tpl)


def _motif_center(win: PotentialWindow) -> int:
    """Absolute index of the central ``0`` of a motif occurrence inside ``win``."""
    m = central_motif_locate()
    if not (win.start <= m and m + len(MOTIF) - 1 <= win.stop and win.slice(m, m + len(MOTIF) - 1) == MOTIF):
        offset = win.letters.find(MOTIF)
        if offset < 0:
            raise InsufficientWord("window does not contain 101 101 01 101 101")
        m = win.start + offset
    return m + 6


def certify_two_sided(
    win: PotentialWindow,
    alpha,
    beta,
    bound=DEFAULT_BOUND,
    record: bool = False,
) -> GrowthCertificate:
    """Certify that the solution through ``(alpha, beta)`` at the motif is unbounded.

    Depending on the case, growth is certified rightward (property C) or
    leftward (property F) from the seed pair; the window must extend far
    enough in that direction for the entries to pass ``bound``.
    """
    bound = Fraction(bound)
    seed = two_sided_seed(alpha, beta)
    if seed.start is None:
        raise ValueError("alpha = beta = 0 gives the zero solution")
    c = _motif_center(win)
    if seed.direction == "rightward":
        first = c + seed.pair + 1
        if first > win.stop:
            raise InsufficientWord("window ends at the seed")
        blocks = parse_right(win.slice(first, win.stop)).blocks
    else:
        last = c + seed.pair
        if last < win.start:
            raise InsufficientWord("window starts at the seed")
        blocks = parse_left(win.slice(win.start, last)).blocks
    trajectory = [seed.start] if record else None
    v, gap, used, trajectory = _grow(seed.start, blocks, bound, seed.direction, trajectory)
    prop = "C" if seed.direction == "rightward" else "F"
    return GrowthCertificate(
        prop, 0, gap, used, bound, seed.direction,
        case=f"two_sided:{seed.case}", final=v, trajectory=trajectory,
    )


def replay_paper_table() -> tuple[int, ...]:
    """Recompute the worked example ``x_0 .. x_16`` from ``x_{-1} = 0``, ``x_0 = 1``."""
    prev, cur = 0, 1
    xs = [cur]
    for b in WORKED_TABLE_DIAGONAL[:-1]:
        prev, cur = cur, -b * cur - prev
        xs.append(cur)
    if tuple(xs) != WORKED_TABLE_X:
        raise AssertionError(f"worked example mismatch: {xs}")
    return tuple(xs)
