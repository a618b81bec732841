"""Independent certification of badly-approximable shifts.

Everything here recomputes from raw inputs (theta, eta, a size bound) by
exhaustive enumeration over integer vectors — deliberately sharing nothing
with the game/strategy machinery beyond the exact-arithmetic helpers, so a
passing report is evidence, not circularity.  All minima are exact rationals
with deterministic (value, then lexicographic argmin) tie-breaking.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import rat, rat_str
from .geometry import nearest_int_dist
from .resonance import EmptySequence, ResonanceSequence, ThetaMatrix


class TableRangeExceeded(Exception):
    """A table-backed decay profile was asked outside its covered range."""


@dataclass(frozen=True)
class PowerLaw:
    """psi(t) = (c*t)^(-sigma) with sigma kept as the literal pair p/q.

    The pair is *not* reduced: comparisons use the normal form
    r^p * (c*s)^q, which is the badness functional raised to the p-th power —
    keeping p and q as given makes reports with sigma = n/m literally match
    the product functional r^n s^m.
    """

    c: Fraction
    sigma_num: int
    sigma_den: int

    def __post_init__(self):
        object.__setattr__(self, "c", rat(self.c))
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.sigma_num <= 0 or self.sigma_den <= 0:
            raise ValueError("sigma must be a positive rational")

    def to_jsonable(self) -> dict:
        return {
            "kind": "power",
            "c": rat_str(self.c),
            "sigma": f"{self.sigma_num}/{self.sigma_den}",
        }


@dataclass(frozen=True)
class DecayTable:
    """Tabulated decay profile: pairs (t_i, psi_i), sizes increasing and
    psi strictly decreasing.  rho(s) = largest t_i with 1/psi_i <= s.

    The table only speaks for sizes s in [ceil(1/psi_1), floor(1/psi_last)]
    — below that no entry qualifies, above it the true rho outgrows the
    table.  Lookups inside that window are exact; the decay-weighted
    functional skips sizes below the window and refuses limits beyond it.
    """

    sizes: tuple[int, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(rat(v) for v in self.values))
        if len(self.sizes) != len(self.values) or not self.sizes:
            raise ValueError("table must be nonempty and aligned")
        for a, b in zip(self.sizes, self.sizes[1:]):
            if b <= a:
                raise ValueError("table sizes must increase")
        for a, b in zip(self.values, self.values[1:]):
            if b >= a:
                raise ValueError("table values must strictly decrease")
        if any(v <= 0 for v in self.values):
            raise ValueError("table values must be positive")

    @property
    def s_min(self) -> int:
        v = 1 / self.values[0]
        return -((-v.numerator) // v.denominator)  # ceil

    @property
    def s_max(self) -> int:
        v = 1 / self.values[-1]
        return v.numerator // v.denominator  # floor

    def rho(self, s: int) -> int:
        if s < self.s_min or s > self.s_max:
            raise TableRangeExceeded(
                f"s={s} outside table coverage [{self.s_min}, {self.s_max}]"
            )
        best: Optional[int] = None
        for t, v in zip(self.sizes, self.values):
            if v * s >= 1:  # 1/psi <= s
                best = t
            else:
                break
        assert best is not None
        return best

    def to_jsonable(self) -> dict:
        return {
            "kind": "table",
            "sizes": list(self.sizes),
            "values": [rat_str(v) for v in self.values],
        }


def parse_power_spec(text: str) -> PowerLaw:
    """Parse "power:c=1,sigma=1" (sigma may be "p/q", kept unreduced)."""
    body = text.split(":", 1)
    if body[0].strip() != "power" or len(body) != 2:
        raise ValueError(f"not a power spec: {text!r}")
    c = Fraction(1)
    num, den = 1, 1
    for part in body[1].split(","):
        key, _, val = part.partition("=")
        key = key.strip()
        val = val.strip()
        if key == "c":
            c = rat(val)
        elif key == "sigma":
            if "/" in val:
                a, b = val.split("/")
                num, den = int(a), int(b)
            else:
                num, den = int(val), 1
        else:
            raise ValueError(f"unknown power-spec key {key!r}")
    return PowerLaw(c, num, den)


@dataclass
class BadnessReport:
    functional: str
    value: Fraction
    argmin: tuple[int, ...]
    limit: int
    extras: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_jsonable(self) -> dict:
        return {
            "functional": self.functional,
            "value": rat_str(self.value),
            "argmin": list(self.argmin),
            "limit": self.limit,
            "extras": self.extras,
            "warnings": self.warnings,
        }


def _surrogate_warnings(theta: ThetaMatrix, limit: int) -> list[str]:
    den = 1
    for row in theta.rows:
        for x in row:
            den = max(den, x.denominator)
    n_max = math.isqrt(den)
    if limit > n_max:
        return [
            f"size bound {limit} exceeds sqrt(denominator) = {n_max}; beyond it a "
            "rational surrogate no longer mirrors an irrational target's behavior"
        ]
    return []


def _scan_min(
    theta: ThetaMatrix,
    eta: Sequence[Fraction],
    limit: int,
    value_fn: Callable[[Fraction, int], Optional[Fraction]],
) -> tuple[Fraction, tuple[int, ...]]:
    """Exact min of value_fn(r(x), max|x_i|) over 0 < max|x_i| <= limit.

    r(x) = max_j || sum_i theta[i][j] x_i  -  eta[j] ||.  The innermost
    coordinate is accumulated incrementally (one vector add per step).
    A value_fn returning None excludes that point from the minimum.
    """
    m, n = theta.shape
    if len(eta) != n:
        raise ValueError(f"eta has dimension {len(eta)}, expected {n}")
    rows = theta.rows
    last_row = rows[m - 1]
    best: Optional[tuple[Fraction, tuple[int, ...]]] = None
    for head in itertools.product(range(-limit, limit + 1), repeat=m - 1):
        base = [
            sum((rows[i][j] * head[i] for i in range(m - 1)), Fraction(0)) - eta[j]
            for j in range(n)
        ]
        cur = [base[j] + last_row[j] * (-limit) for j in range(n)]
        for xm in range(-limit, limit + 1):
            if xm != -limit:
                cur = [c + d for c, d in zip(cur, last_row)]
            if xm == 0 and all(h == 0 for h in head):
                continue
            s = max(abs(xm), max((abs(h) for h in head), default=0))
            r = max(nearest_int_dist(c) for c in cur)
            v = value_fn(r, s)
            if v is None:
                continue
            x = head + (xm,)
            if best is None or v < best[0] or (v == best[0] and x < best[1]):
                best = (v, x)
    assert best is not None
    return best


def theorem1_constant(
    theta: ThetaMatrix, eta: Sequence, limit: int
) -> BadnessReport:
    """min over 0 < max|x| <= limit of (max_j ||L_j(x) - eta_j||)^n (max|x_i|)^m.

    A positive value is finite-range evidence that eta is a badly
    approximable shift for the system theta; zero pinpoints an exact hit.
    """
    eta_v = tuple(rat(e) for e in eta)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    m, n = theta.shape
    value, argmin = _scan_min(
        theta, eta_v, limit, lambda r, s: r**n * Fraction(s) ** m
    )
    return BadnessReport(
        functional="product",
        value=value,
        argmin=argmin,
        limit=limit,
        extras={"shape": [m, n]},
        warnings=_surrogate_warnings(theta, limit),
    )


def jarnik_constant(
    theta: ThetaMatrix, eta: Sequence, psi, limit: int
) -> BadnessReport:
    """min of the decay-weighted badness functional r(x) * rho(max|x_i|).

    For a PowerLaw psi the comparison runs in the exact normal form
    r^p * (c*s)^q; for a DecayTable, rho is the table lookup, the value is
    the plain rational product, and sizes below the table's coverage window
    are excluded (the table certifies nothing there).  Raises
    TableRangeExceeded when the limit itself falls outside coverage.
    """
    eta_v = tuple(rat(e) for e in eta)
    if limit < 1:
        raise ValueError("limit must be >= 1")
    if isinstance(psi, PowerLaw):
        p, q, c = psi.sigma_num, psi.sigma_den, psi.c
        value, argmin = _scan_min(
            theta, eta_v, limit, lambda r, s: r**p * (c * s) ** q
        )
        extras = {"psi": psi.to_jsonable(), "normal_form_power": p}
    elif isinstance(psi, DecayTable):
        if limit < psi.s_min or limit > psi.s_max:
            raise TableRangeExceeded(
                f"limit {limit} outside table coverage "
                f"[{psi.s_min}, {psi.s_max}]"
            )
        rho_cache = {s: psi.rho(s) for s in range(psi.s_min, limit + 1)}
        value, argmin = _scan_min(
            theta,
            eta_v,
            limit,
            lambda r, s: r * rho_cache[s] if s in rho_cache else None,
        )
        extras = {
            "psi": psi.to_jsonable(),
            "coverage": [psi.s_min, min(psi.s_max, limit)],
        }
    else:
        raise TypeError(f"unsupported psi spec: {type(psi).__name__}")
    return BadnessReport(
        functional="decay-weighted",
        value=value,
        argmin=argmin,
        limit=limit,
        extras=extras,
        warnings=_surrogate_warnings(theta, limit),
    )


def resonance_margin(
    seq: ResonanceSequence, eta: Sequence, r_max: Optional[int] = None
) -> BadnessReport:
    """min over families r <= r_max of ||u_r · eta||, with the realizing r."""
    eta_v = tuple(rat(e) for e in eta)
    hi = len(seq) if r_max is None else min(r_max, len(seq))
    if hi < 1:
        raise EmptySequence("no families to measure against")
    best: Optional[tuple[Fraction, int]] = None
    for r in range(1, hi + 1):
        d = nearest_int_dist(sum(
            (Fraction(c) * e for c, e in zip(seq.vector(r), eta_v)), Fraction(0)
        ))
        if best is None or d < best[0]:
            best = (d, r)
    assert best is not None
    return BadnessReport(
        functional="resonance-margin",
        value=best[0],
        argmin=(best[1],),
        limit=hi,
        extras={"norm_sq": seq.norm_sq_of(best[1])},
    )
