"""Finite sections of the Fibonacci Hamiltonian and finite-section diagnostics.

A section ``A[l:r]`` is the symmetric tridiagonal matrix with diagonal
``v_l .. v_r`` and unit off-diagonals.  Floating-point work is done with
LAPACK's tridiagonal LU (``?gttrf``/``?gttrs``) and a Sturm-sequence
bisection kernel; an exact rational elimination is available for
cross-checks on small sections.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterator, Literal, Sequence

import numpy as np
from numba import njit
from scipy.linalg import lapack

from .words import fibonacci_number, window

__all__ = [
    "CSV_COLUMNS",
    "ConvergenceTable",
    "CutoffSchedule",
    "ExactlySingular",
    "NearSingular",
    "SectionRecord",
    "StabilityReport",
    "TriSection",
    "assemble",
    "fsm_convergence",
    "homogeneous_replay",
    "inverse_norm",
    "min_abs_eigenvalue",
    "parse_rhs",
    "solve",
    "stability_sweep",
    "sturm_count",
]

SCHEMA_VERSION = 1
COND_LIMIT = 1e12
EXACT_MAX_DIM = 500
# p in {1, inf} needs n solves per section; refuse beyond F_19 unless asked
INF_NORM_MAX_DIM = 4181
EIG_TOL = 1e-10
# relative increase that counts as a new running maximum
NEW_MAX_RTOL = 1e-9
DOUBLING_RTOL = 0.01
# sections this small may be singular without contradicting stability
SMALL_N0 = 10

CSV_COLUMNS = ("n", "l_n", "r_n", "dim", "sigma_min", "norm_p1", "norm_p2", "norm_pinf", "invertible")

Norm = Literal[1, 2, "inf"]


class ExactlySingular(ArithmeticError):
    """A pivot vanished: the section is singular."""


class NearSingular(ArithmeticError):
    """Estimated condition number above ``COND_LIMIT``."""


def _norm_key(p) -> Norm:
    if p in (1, "1"):
        return 1
    if p in (2, "2"):
        return 2
    if p in ("inf", "Inf", "INF", math.inf, "oo"):
        return "inf"
    raise ValueError(f"p must be 1, 2 or inf, got {p!r}")


# -- cutoff schedules -------------------------------------------------------


@dataclass(frozen=True)
class CutoffSchedule:
    """Generator of truncation pairs ``(l_n, r_n)``, ``n = 1, 2, ...``.

    kinds:
      symmetric   (-n, n)
      fibonacci   (-F_n, F_n) with F_1 = 1, F_2 = 2
      one_sided   (1, n)
      random      both ends move outward by seeded random steps of 0..3
      explicit    the given ``pairs``, verbatim
    """

    kind: str = "symmetric"
    seed: int = 0
    pairs: tuple[tuple[int, int], ...] = ()

    KINDS = ("symmetric", "fibonacci", "one_sided", "random", "explicit")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "explicit":
            if not self.pairs:
                raise ValueError("explicit schedule needs pairs")
            for l, r in self.pairs:
                if l > r:
                    raise ValueError(f"cutoff pair ({l}, {r}) has l > r")

    def __iter__(self) -> Iterator[tuple[int, int]]:
        if self.kind == "symmetric":
            n = 1
            while True:
                yield -n, n
                n += 1
        elif self.kind == "fibonacci":
            k = 1
            while True:
                f = fibonacci_number(k)
                yield -f, f
                k += 1
        elif self.kind == "one_sided":
            n = 1
            while True:
                yield 1, n
                n += 1
        elif self.kind == "random":
            rng = np.random.default_rng(self.seed)
            l, r = -int(rng.integers(0, 8)), int(rng.integers(0, 8))
            while True:
                yield l, r
                dl, dr = (int(s) for s in rng.integers(0, 4, size=2))
                if dl == 0 and dr == 0:
                    dr = 1
                l, r = l - dl, r + dr
        else:
            yield from self.pairs

    def take(self, count: int) -> list[tuple[int, int]]:
        out = []
        for pair in self:
            if len(out) == count:
                break
            out.append(pair)
        if len(out) < count:
            raise ValueError(f"schedule has only {len(out)} pairs, {count} requested")
        return out

    def describe(self) -> dict:
        d = {"kind": self.kind, "seed": self.seed}
        if self.kind == "explicit":
            d["pairs"] = [list(p) for p in self.pairs]
        return d

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> CutoffSchedule:
        """``symmetric``, ``one_sided``, ``fibonacci``, ``random`` or ``explicit:l,r;l,r;...``."""
        kind, _, rest = text.partition(":")
        if kind == "explicit":
            pairs = tuple(tuple(int(x) for x in item.split(",")) for item in rest.split(";") if item)
            return cls("explicit", seed, pairs)
        return cls(kind, seed)


# -- sections ---------------------------------------------------------------


@dataclass(frozen=True)
class TriSection:
    """Section ``(a_ij)_{i,j=lo..hi}`` of the Fibonacci Hamiltonian."""

    lo: int
    hi: int
    diag: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.hi - self.lo + 1

    def dense(self) -> np.ndarray:
        n = self.dim
        return np.diag(self.diag.astype(float)) + np.eye(n, k=1) + np.eye(n, k=-1)

    def exact_rows(self) -> list[list[Fraction]]:
        n = self.dim
        rows = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            rows[i][i] = Fraction(int(self.diag[i]))
            if i + 1 < n:
                rows[i][i + 1] = rows[i + 1][i] = Fraction(1)
        return rows


def assemble(l: int, r: int) -> TriSection:
    if l > r:
        raise ValueError(f"empty section: l={l} > r={r}")
    diag = window(l, r).as_array().astype(np.int8)
    diag.setflags(write=False)
    return TriSection(l, r, diag)


# -- solving ----------------------------------------------------------------


class _Factor:
    """LU factorization of a section, with ``solve`` for a block of right-hand sides."""

    def __init__(self, section: TriSection):
        n = section.dim
        self.section = section
        d = section.diag.astype(np.float64)
        anorm = float(np.max(np.abs(d)) + min(n - 1, 2))
        if n < 3:
            # the ?gttrf wrappers reject n < 3
            a = section.dense()
            det = float(np.linalg.det(a))
            if det == 0.0:
                raise ExactlySingular(f"singular section [{section.lo}, {section.hi}]")
            self._inv = np.linalg.inv(a)
            rcond = 1.0 / (anorm * np.abs(self._inv).sum(axis=0).max())
        else:
            off = np.ones(n - 1)
            dl, d, du, du2, ipiv, info = lapack.dgttrf(off, d, off.copy())
            if info > 0:
                raise ExactlySingular(f"zero pivot at row {info} of section [{section.lo}, {section.hi}]")
            self._lu = (dl, d, du, du2, ipiv)
            rcond, info = lapack.dgtcon(dl, d, du, du2, ipiv, anorm, norm="1")
        if rcond < 1.0 / COND_LIMIT:
            raise NearSingular(
                f"condition estimate {1 / rcond if rcond else math.inf:.3g} for [{section.lo}, {section.hi}]"
            )

    def solve(self, b: np.ndarray) -> np.ndarray:
        if self.section.dim < 3:
            return self._inv @ b
        x, info = lapack.dgttrs(*self._lu, b, overwrite_b=1)
        return x


def _exact_solve(section: TriSection, rhs: Sequence) -> list[Fraction]:
    """Tridiagonal Gaussian elimination with partial pivoting in rationals."""
    n = section.dim
    if n > EXACT_MAX_DIM:
        raise ValueError(f"exact mode is limited to dimension {EXACT_MAX_DIM}")
    d = [Fraction(int(x)) for x in section.diag]
    dl = [Fraction(1)] * (n - 1)
    du = [Fraction(1)] * (n - 1)
    du2 = [Fraction(0)] * max(n - 2, 0)
    b = [Fraction(x) for x in rhs]
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0:
                raise ExactlySingular(f"zero pivot at row {i + 1}")
            fact = dl[i] / d[i]
            d[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            temp = d[i + 1]
            d[i + 1] = du[i] - fact * temp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du2[i]
            du[i] = temp
            b[i], b[i + 1] = b[i + 1], b[i] - fact * b[i + 1]
    if d[n - 1] == 0:
        raise ExactlySingular(f"zero pivot at row {n}")
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = b[i]
        if i + 1 < n:
            s -= du[i] * x[i + 1]
        if i + 2 < n:
            s -= du2[i] * x[i + 2]
        x[i] = s / d[i]
    return x


def solve(section: TriSection, rhs, exact: bool = False):
    """Solve ``A x = rhs`` on a section.

    ``exact=True`` runs rational elimination (dimension <= 500) and returns a
    list of :class:`~fractions.Fraction`; otherwise LAPACK in float64.
    """
    if len(rhs) != section.dim:
        raise ValueError(f"rhs has length {len(rhs)}, section has dimension {section.dim}")
    if exact:
        return _exact_solve(section, rhs)
    b = np.array(rhs, dtype=np.float64).reshape(-1, 1)
    return _Factor(section).solve(b)[:, 0]


# -- spectrum ---------------------------------------------------------------


@njit(cache=True)
def _sturm_count(diag, t):
    # number of eigenvalues < t; unit off-diagonals
    pivmin = 1e-300
    count = 0
    q = diag[0] - t
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, diag.shape[0]):
        q = (diag[i] - t) - 1.0 / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def _bisect_eigenvalue(diag, j, lo, hi, tol):
    # j-th smallest eigenvalue (1-based) known to lie in [lo, hi]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _sturm_count(diag, mid) >= j:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _min_abs_eig(diag, tol):
    n = diag.shape[0]
    k = _sturm_count(diag, 0.0)
    best = 3.0
    if k < n:
        best = min(best, _bisect_eigenvalue(diag, k + 1, 0.0, 3.0, tol))
    if k > 0:
        best = min(best, -_bisect_eigenvalue(diag, k, -3.0, 0.0, tol))
    return max(best, 0.0)


def sturm_count(section: TriSection, t: float) -> int:
    """Number of eigenvalues of the section strictly below ``t``."""
    return int(_sturm_count(section.diag.astype(np.float64), float(t)))


def min_abs_eigenvalue(section: TriSection, tol: float = EIG_TOL) -> float:
    """Smallest ``|lambda|`` over the spectrum, to absolute accuracy ``tol``.

    The spectrum lies in ``[-2 + min v, 2 + max v]``, inside ``[-3, 3]``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(_min_abs_eig(section.diag.astype(np.float64), tol))


@njit(cache=True)
def _gt_inverse_abs_sums(dl, d, du, du2, ipiv):
    # columns of the inverse are ?gttrs solves of unit vectors, done 16 at a
    # time; rows above the first unit entry (minus one) stay zero in the
    # forward sweep
    n = d.shape[0]
    k = 16
    col = np.zeros(n)
    row = np.zeros(n)
    rd = 1.0 / d
    b = np.zeros((n, k))
    for j0 in range(0, n, k):
        m = min(k, n - j0)
        b[:, :] = 0.0
        for c in range(m):
            b[j0 + c, c] = 1.0
        for i in range(max(j0 - 1, 0), n - 1):
            if ipiv[i] == i + 1:
                for c in range(m):
                    b[i + 1, c] -= dl[i] * b[i, c]
            else:
                for c in range(m):
                    temp = b[i, c]
                    b[i, c] = b[i + 1, c]
                    b[i + 1, c] = temp - dl[i] * b[i, c]
        for c in range(m):
            b[n - 1, c] *= rd[n - 1]
            b[n - 2, c] = (b[n - 2, c] - du[n - 2] * b[n - 1, c]) * rd[n - 2]
        for i in range(n - 3, -1, -1):
            for c in range(m):
                b[i, c] = (b[i, c] - du[i] * b[i + 1, c] - du2[i] * b[i + 2, c]) * rd[i]
        for i in range(n):
            for c in range(m):
                a = abs(b[i, c])
                row[i] += a
                col[j0 + c] += a
    return col.max(), row.max()


def _inverse_abs_sums(section: TriSection) -> tuple[float, float]:
    """Max column and max row absolute sums of the inverse, by unit-vector solves."""
    lu = _Factor(section)
    if section.dim < 3:
        ax = np.abs(lu.solve(np.eye(section.dim)))
        return float(ax.sum(axis=0).max()), float(ax.sum(axis=1).max())
    c, r = _gt_inverse_abs_sums(*lu._lu)
    return float(c), float(r)


def inverse_norm(section: TriSection, p=2, tol: float = EIG_TOL) -> float:
    """``||A^{-1}||_p`` for ``p`` in {1, 2, inf}.

    ``p = 2`` uses ``1 / min |lambda|`` (the section is symmetric); ``p = 1``
    and ``p = inf`` take column and row sums of the inverse computed with
    ``dim`` tridiagonal solves.
    """
    p = _norm_key(p)
    if p == 2:
        lam = min_abs_eigenvalue(section, tol)
        if lam <= 10 * tol or 3.0 / lam > COND_LIMIT:
            raise NearSingular(f"min |lambda| = {lam:.3g} at resolution {tol:g}")
        return 1.0 / lam
    if section.dim > INF_NORM_MAX_DIM:
        raise ValueError(f"p={p} norms are capped at dimension {INF_NORM_MAX_DIM}")
    p1, pinf = _inverse_abs_sums(section)
    return p1 if p == 1 else pinf


# -- stability sweeps --------------------------------------------------------


@dataclass
class SectionRecord:
    n: int
    l_n: int
    r_n: int
    dim: int
    sigma_min: float | None
    norm_p1: float | None
    norm_p2: float | None
    norm_pinf: float | None
    invertible: bool


def _section_record(n: int, l: int, r: int, p: Norm, tol: float) -> SectionRecord:
    sec = assemble(l, r)
    lam = min_abs_eigenvalue(sec, tol)
    rec = SectionRecord(n, l, r, sec.dim, lam, None, None, None, True)
    try:
        if lam <= 10 * tol or 3.0 / lam > COND_LIMIT:
            raise NearSingular("min |lambda| below resolution")
        rec.norm_p2 = 1.0 / lam
        if p != 2:
            rec.norm_p1, rec.norm_pinf = _inverse_abs_sums(sec)
    except (ExactlySingular, NearSingular):
        rec.invertible = False
        rec.norm_p1 = rec.norm_p2 = rec.norm_pinf = None
    return rec


def _norm_of(rec: SectionRecord, p: Norm) -> float | None:
    return {1: rec.norm_p1, 2: rec.norm_p2, "inf": rec.norm_pinf}[p]


@dataclass
class StabilityReport:
    schedule: dict
    p: str
    count: int
    records: list[SectionRecord]
    running_max: list[float | None]
    last_new_max: int | None
    n0: int
    doubled_max: float | None
    supported: bool

    @property
    def max_norm(self) -> float | None:
        return self.running_max[-1] if self.running_max else None

    @property
    def singular(self) -> list[SectionRecord]:
        return [r for r in self.records if not r.invertible]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in self.records:
            w.writerow([_csv_cell(getattr(rec, c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "schedule": self.schedule,
            "seed": self.schedule.get("seed", 0),
            "p": self.p,
            "count": self.count,
            "max_norm": self.max_norm,
            "last_new_max": self.last_new_max,
            "n0": self.n0,
            "doubled_max": self.doubled_max,
            "supported": self.supported,
            "records": [asdict(r) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _csv_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _running_max(records: list[SectionRecord], p: Norm) -> tuple[list[float | None], int | None]:
    best, last, out = None, None, []
    for rec in records:
        val = _norm_of(rec, p)
        if val is not None and (best is None or val > best * (1 + NEW_MAX_RTOL)):
            best, last = val, rec.n
        elif val is not None and val > best:
            best = val
        out.append(best)
    return out, last


def stability_sweep(
    schedule: CutoffSchedule,
    count: int,
    p=2,
    tol: float = EIG_TOL,
    doubling: bool = True,
) -> StabilityReport:
    """Inverse norms of the first ``count`` sections of ``schedule``.

    The sweep supports stability when singular sections are confined to
    dimension <= ``SMALL_N0``, the running maximum of ``||A_n^{-1}||`` last
    increased in the first half of the sweep, and (with ``doubling``)
    sweeping ``2 * count`` sections raises the maximum by at most 1%.
    Singular sections are recorded, never fatal.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    p = _norm_key(p)
    total = 2 * count if doubling else count
    records = [_section_record(n, l, r, p, tol) for n, (l, r) in enumerate(schedule.take(total), start=1)]
    head = records[:count]
    running, last = _running_max(head, p)
    n0 = max((r.dim for r in records if not r.invertible), default=0)
    doubled_max = None
    if doubling:
        full, _ = _running_max(records, p)
        doubled_max = full[-1]
    mx = running[-1]
    supported = (
        n0 <= SMALL_N0
        and mx is not None
        and last is not None
        and last <= count / 2
        and (doubled_max is None or doubled_max <= mx * (1 + DOUBLING_RTOL))
    )
    return StabilityReport(
        schedule.describe(), str(p), count, head, running, last, n0, doubled_max, supported
    )


# -- finite section convergence ------------------------------------------------


def parse_rhs(spec: str):
    """Right-hand side as a function of the index: ``e<k>`` or ``geom:<q>`` (``q^|n|``)."""
    spec = spec.strip()
    if spec == "zero":
        return lambda idx: np.zeros(len(idx))
    if spec.startswith("e"):
        k = int(spec[1:])
        return lambda idx: (np.asarray(idx) == k).astype(float)
    if spec.startswith("geom:"):
        q = float(spec[5:])
        if not 0 <= q < 1:
            raise ValueError("geometric rhs needs 0 <= q < 1")
        return lambda idx: q ** np.abs(np.asarray(idx, dtype=float))
    raise ValueError(f"unknown rhs {spec!r}")


@dataclass
class ConvergenceTable:
    schedule: dict
    rhs: str
    window: tuple[int, int]
    rows: list[dict]
    limit: list[float]
    converged: bool
    monotone_tail: bool

    def distances(self) -> list[float]:
        return [row["d_n"] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("n", "l_n", "r_n", "dim", "d_n"))
        for row in self.rows:
            w.writerow([row["n"], row["l_n"], row["r_n"], row["dim"], repr(row["d_n"])])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "schedule": self.schedule,
            "seed": self.schedule.get("seed", 0),
            "rhs": self.rhs,
            "window": list(self.window),
            "converged": self.converged,
            "monotone_tail": self.monotone_tail,
            "limit": self.limit,
            "rows": self.rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# distances below this are rounding noise and exempt from the monotonicity check
CONVERGENCE_FLOOR = 1e-13


def fsm_convergence(
    schedule: CutoffSchedule,
    rhs: str,
    win: tuple[int, int],
    count: int,
    target: float = 1e-8,
) -> ConvergenceTable:
    """Self-convergence of truncated solutions ``A_n^{-1} b`` on a fixed window.

    Each solution is zero-extended outside ``[l_n, r_n]`` and compared on
    ``win`` with the solution of the largest (last) truncation.
    """
    if count < 2:
        raise ValueError("count must be >= 2")
    a, b = win
    if a > b:
        raise ValueError("window has a > b")
    f = parse_rhs(rhs)
    idx = np.arange(a, b + 1)
    sols = []
    pairs = schedule.take(count)
    for l, r in pairs:
        sec = assemble(l, r)
        x = solve(sec, f(np.arange(l, r + 1)))
        on_win = np.zeros(len(idx))
        inside = (idx >= l) & (idx <= r)
        on_win[inside] = x[idx[inside] - l]
        sols.append(on_win)
    ref = sols[-1]
    rows = []
    for n, ((l, r), s) in enumerate(zip(pairs, sols), start=1):
        rows.append({"n": n, "l_n": l, "r_n": r, "dim": r - l + 1, "d_n": float(np.max(np.abs(s - ref)))})
    d = [row["d_n"] for row in rows[:-1]]
    tail = d[len(d) // 2 :]
    monotone = all(y <= x or y <= CONVERGENCE_FLOOR for x, y in zip(tail, tail[1:]))
    converged = bool(d) and d[-1] <= target
    return ConvergenceTable(schedule.describe(), rhs, (a, b), rows, [float(v) for v in ref], converged, monotone)


def homogeneous_replay(section: TriSection, x0, x1) -> list[Fraction]:
    """Propagate ``x_{n+1} = -v_n x_n - x_{n-1}`` across the section's diagonal.

    ``(x0, x1)`` are ``(x_{lo-1}, x_lo)``; the result is
    ``[x_{lo-1}, x_lo, ..., x_{hi+1}]`` in exact rationals.
    """
    xs = [Fraction(x0), Fraction(x1)]
    for b in section.diag:
        xs.append(-int(b) * xs[-1] - xs[-2])
    return xs
