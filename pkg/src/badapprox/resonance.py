"""Resonance structure of a rational matrix: approximation records and
lacunary thinning.

For a rational matrix theta (m rows, n columns) the dual quality of a nonzero
integer vector y in Z^n is max_i ||row_i . y|| where ||.|| is distance to the
nearest integer.  Records of this quality, enumerated in order of increasing
Euclidean length, are the resonance vectors; thinning them to a lacunary
family (consecutive size ratios pinned inside [M, M^2]) produces the input
the avoidance strategy consumes.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

from .exact import rat, rat_str
from .geometry import nearest_int_dist

#: F_30 / F_31 — the classic golden-section convergent used throughout the
#: worked examples and the command-line built-in ``--theta golden``.
GOLDEN_CONVERGENT = Fraction(832040, 1346269)


class EmptySequence(Exception):
    """Raised when a resonance computation is handed nothing to work with."""


@dataclass(frozen=True)
class ThetaMatrix:
    """m x n rational matrix, stored row-major.

    Row i against an integer vector x in Z^m contributes theta[i][j]*x_i to
    form j; the dual quality pairs rows with y in Z^n.  An optional
    continued-fraction expansion may ride along for the 1x1 case.
    """

    rows: tuple[tuple[Fraction, ...], ...]
    cf: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        rows = tuple(tuple(rat(x) for x in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows or not rows[0]:
            raise ValueError("theta must be a nonempty matrix")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged theta matrix")
        if self.cf is not None:
            object.__setattr__(self, "cf", tuple(int(a) for a in self.cf))
            if self.shape != (1, 1):
                raise ValueError("continued-fraction data only makes sense for a 1x1 theta")

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def dual_quality(self, y: Sequence[int]) -> Fraction:
        """max_i || row_i · y ||, exact."""
        best = Fraction(0)
        for row in self.rows:
            s = sum((c * yy for c, yy in zip(row, y)), Fraction(0))
            d = nearest_int_dist(s)
            if d > best:
                best = d
        return best

    def to_jsonable(self) -> dict:
        obj = {
            "m": self.m,
            "n": self.n,
            "entries": [[rat_str(x) for x in row] for row in self.rows],
        }
        if self.cf is not None:
            obj["cf"] = list(self.cf)
        return obj

    @classmethod
    def from_jsonable(cls, obj: dict) -> "ThetaMatrix":
        rows = tuple(tuple(rat(x) for x in row) for row in obj["entries"])
        if len(rows) != obj["m"] or any(len(r) != obj["n"] for r in rows):
            raise ValueError("entries do not match declared shape")
        cf = tuple(obj["cf"]) if "cf" in obj else None
        return cls(rows, cf)

    @classmethod
    def scalar(cls, value, cf: Optional[Sequence[int]] = None) -> "ThetaMatrix":
        return cls(((rat(value),),), tuple(cf) if cf is not None else None)


def golden_theta() -> ThetaMatrix:
    # 832040/1346269 = [0; 1, 1, 1, ...] truncated at 30 terms
    return ThetaMatrix.scalar(GOLDEN_CONVERGENT, cf=(0,) + (1,) * 30)


def psi_theta(theta: ThetaMatrix, t: int) -> Fraction:
    """min over nonzero y in Z^n with max|y_j| <= t of the dual quality."""
    if t < 1:
        raise ValueError("t must be >= 1")
    n = theta.n
    best: Optional[Fraction] = None
    for y in itertools.product(range(-t, t + 1), repeat=n):
        if all(c == 0 for c in y):
            continue
        q = theta.dual_quality(y)
        if best is None or q < best:
            best = q
            if best == 0:
                break
    assert best is not None
    return best


def _canonical_sign(y: tuple[int, ...]) -> bool:
    """True iff the first nonzero entry is positive (one vector per ±pair)."""
    for c in y:
        if c != 0:
            return c > 0
    return False


@dataclass(frozen=True)
class ApproximationRecord:
    vector: tuple[int, ...]
    norm_sq: int
    quality: Fraction


def best_approximations(theta: ThetaMatrix, t_max: int) -> list[ApproximationRecord]:
    """Strict records of dual quality, by increasing Euclidean length.

    Candidates are grouped into shells of equal |y|^2 and scanned in
    (|y|^2, lex) order; a shell's minimum becomes a record iff it is strictly
    below every earlier quality.  Only the canonical representative of each
    ±pair is considered (quality is sign-symmetric).  Enumeration stops once
    a record of quality zero appears (nothing can beat it).
    """
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    n = theta.n
    shells: dict[int, list[tuple[int, ...]]] = {}
    for y in itertools.product(range(-t_max, t_max + 1), repeat=n):
        if not _canonical_sign(y):
            continue
        nsq = sum(c * c for c in y)
        shells.setdefault(nsq, []).append(y)

    records: list[ApproximationRecord] = []
    best: Optional[Fraction] = None
    for nsq in sorted(shells):
        shell_best: Optional[tuple[Fraction, tuple[int, ...]]] = None
        for y in sorted(shells[nsq]):
            q = theta.dual_quality(y)
            if shell_best is None or (q, y) < shell_best:
                shell_best = (q, y)
        assert shell_best is not None
        q, y = shell_best
        if best is None or q < best:
            records.append(ApproximationRecord(y, nsq, q))
            best = q
            if q == 0:
                break
    if not records:
        raise EmptySequence("no approximation records found")
    return records


def convergents(cf: Sequence[int]) -> Iterator[tuple[int, int]]:
    """Yield (p, q) convergents of a continued fraction [a0; a1, a2, ...]."""
    p_prev, p_cur = 1, cf[0]
    q_prev, q_cur = 0, 1
    yield p_cur, q_cur
    for a in cf[1:]:
        p_prev, p_cur = p_cur, a * p_cur + p_prev
        q_prev, q_cur = q_cur, a * q_cur + q_prev
        yield p_cur, q_cur


def best_approximations_cf(theta: ThetaMatrix, t_max: int) -> list[ApproximationRecord]:
    """Records for a 1x1 theta via its continued-fraction convergents.

    For a single rational angle the strict quality records at integer sizes
    are exactly the convergent denominators; this route never enumerates and
    is cross-checked against best_approximations in the test-suite.
    """
    if theta.cf is None:
        raise ValueError("theta carries no continued-fraction expansion")
    value = theta.rows[0][0]
    records: list[ApproximationRecord] = []
    best: Optional[Fraction] = None
    for _, q in convergents(theta.cf):
        if q > t_max:
            break
        if q < 1:
            continue
        qual = nearest_int_dist(value * q)
        if best is None or qual < best:
            records.append(ApproximationRecord((q,), q * q, qual))
            best = qual
            if qual == 0:
                break
    if not records:
        raise EmptySequence("no records within t_max")
    return records


# -- lacunary thinning -------------------------------------------------------


@dataclass(frozen=True)
class ResonanceEntry:
    vector: tuple[int, ...]
    norm_sq: int
    quality: Optional[Fraction]  # None for padding entries

    def to_jsonable(self) -> dict:
        return {
            "u": list(self.vector),
            "t_sq": self.norm_sq,
            "quality": rat_str(self.quality) if self.quality is not None else None,
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "ResonanceEntry":
        q = obj.get("quality")
        return cls(tuple(obj["u"]), int(obj["t_sq"]), rat(q) if q is not None else None)


@dataclass(frozen=True)
class ResonanceSequence:
    """A finite family u_1, u_2, ... with lacunary sizes t_r = |u_r|.

    Invariant (checked): M^2 <= t_{r+1}^2 / t_r^2 <= M^4 for consecutive
    entries — i.e. the size ratio lies in [M, M^2], all verified on squares.
    """

    entries: tuple[ResonanceEntry, ...]
    lacunarity: Fraction  # M

    def __post_init__(self):
        object.__setattr__(self, "lacunarity", rat(self.lacunarity))
        object.__setattr__(self, "entries", tuple(self.entries))
        if self.lacunarity <= 1:
            raise ValueError("lacunarity must exceed 1")
        self.check_lacunary()

    def check_lacunary(self) -> None:
        if not self.entries:
            raise EmptySequence("resonance sequence is empty")
        m2 = self.lacunarity**2
        m4 = m2 * m2
        dims = {len(e.vector) for e in self.entries}
        if len(dims) != 1:
            raise ValueError("mixed dimensions in resonance sequence")
        for e in self.entries:
            if e.norm_sq != sum(c * c for c in e.vector):
                raise ValueError(f"stored norm_sq wrong for {e.vector}")
        for prev, cur in zip(self.entries, self.entries[1:]):
            ratio_sq = Fraction(cur.norm_sq, prev.norm_sq)
            if not m2 <= ratio_sq <= m4:
                raise ValueError(
                    f"size ratio^2 {ratio_sq} outside [M^2, M^4] between "
                    f"{prev.vector} and {cur.vector}"
                )

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def dimension(self) -> int:
        return len(self.entries[0].vector)

    def vector(self, r: int) -> tuple[int, ...]:
        """1-based access, matching the block-schedule indexing."""
        return self.entries[r - 1].vector

    def norm_sq_of(self, r: int) -> int:
        return self.entries[r - 1].norm_sq

    def to_jsonable(self) -> dict:
        return {
            "M": rat_str(self.lacunarity),
            "entries": [e.to_jsonable() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, sort_keys=True)

    @classmethod
    def from_jsonable(cls, obj: dict) -> "ResonanceSequence":
        return cls(
            tuple(ResonanceEntry.from_jsonable(e) for e in obj["entries"]),
            rat(obj["M"]),
        )

    @classmethod
    def loads(cls, text: str) -> "ResonanceSequence":
        return cls.from_jsonable(json.loads(text))


def lacunary_normalize(
    records: Iterable[ApproximationRecord], lacunarity
) -> ResonanceSequence:
    """Thin (and where needed pad) size records into a lacunary family.

    Greedy left-to-right: keep the first record; a later record whose size
    ratio to the last kept entry is below M is dropped, one inside [M, M^2]
    is kept, and one beyond M^2 forces padding — an axis-aligned filler of
    the smallest integer size s with s^2 >= M^2 * t_kept^2 is inserted, then
    the same record is reconsidered.  Ratio tests compare squares against
    [M^2, M^4]; no roots are taken.  Records with quality zero never enter
    (they mark exact resonances, not usable sizes).
    """
    m = rat(lacunarity)
    if m <= 1:
        raise ValueError("lacunarity must exceed 1")
    m2 = m * m
    m4 = m2 * m2
    pending = [r for r in records if r.quality != 0]
    if not pending:
        raise EmptySequence("no usable records (all exact resonances?)")
    dim = len(pending[0].vector)

    out: list[ResonanceEntry] = [
        ResonanceEntry(pending[0].vector, pending[0].norm_sq, pending[0].quality)
    ]
    for rec in pending[1:]:
        while True:
            last_sq = out[-1].norm_sq
            ratio_sq = Fraction(rec.norm_sq, last_sq)
            if ratio_sq < m2:
                break  # too close to the last kept size: drop
            if ratio_sq <= m4:
                out.append(ResonanceEntry(rec.vector, rec.norm_sq, rec.quality))
                break
            # gap too wide: pad with the smallest admissible integer size
            target = m2 * last_sq
            s = math.isqrt(math.ceil(target))
            while s * s < target:
                s += 1
            filler = (s,) + (0,) * (dim - 1)
            out.append(ResonanceEntry(filler, s * s, None))
    return ResonanceSequence(tuple(out), m)


# -- decay-profile comparison ------------------------------------------------


def verify_decay_bound(
    theta: ThetaMatrix,
    profile,  # callable int -> Fraction (claimed upper bound on psi at t)
    t_max: int,
) -> dict:
    """Check psi_theta(t) <= profile(t) for every integer t in [1, t_max].

    psi_theta is a non-increasing step function; we walk its steps by
    scanning sup-norm shells once and keeping the running minimum, and
    evaluate the claimed profile at the end of each constant
    segment (for a non-increasing profile that endpoint is the tight spot).
    Returns a small report dict; report["ok"] is the verdict.
    """
    n = theta.n
    running: Optional[Fraction] = None
    steps: list[tuple[int, Fraction]] = []  # (t at which value takes effect, value)
    for t in range(1, t_max + 1):
        shell_min: Optional[Fraction] = None
        for y in itertools.product(range(-t, t + 1), repeat=n):
            if max(abs(c) for c in y) != t or not _canonical_sign(y):
                continue
            q = theta.dual_quality(y)
            if shell_min is None or q < shell_min:
                shell_min = q
        if shell_min is not None and (running is None or shell_min < running):
            running = shell_min
            steps.append((t, running))
    assert running is not None

    failures = []
    for idx, (t_start, value) in enumerate(steps):
        t_end = steps[idx + 1][0] - 1 if idx + 1 < len(steps) else t_max
        for t_probe in {t_start, t_end}:
            bound = rat(profile(t_probe))
            if value > bound:
                failures.append({"t": t_probe, "psi": rat_str(value), "bound": rat_str(bound)})
    return {
        "ok": not failures,
        "t_max": t_max,
        "steps": [(t, rat_str(v)) for t, v in steps],
        "failures": failures,
    }
