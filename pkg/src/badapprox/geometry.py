"""Exact geometric primitives: balls, integer-normal hyperplanes, halfspaces.

Containment predicates are exact (no epsilon anywhere on the legality path).
The spherical-cap measure helpers at the bottom are the one place floats are
allowed: they feed derived constants (rounded conservatively before use) and
cross-validation oracles, never in-game decisions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import Rat, ge_sqrt, rat, rat_str, rat_vec

Vec = tuple[Fraction, ...]


def vec(*coords) -> Vec:
    return rat_vec(coords)


def dot(a: Sequence[Rat], b: Sequence[Rat]) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(a: Sequence[Rat], c: Rat) -> Vec:
    cc = Fraction(c)
    return tuple(Fraction(x) * cc for x in a)


def norm_sq(a: Sequence[Rat]) -> Fraction:
    return dot(a, a)


def nearest_int_dist(x: Rat) -> Fraction:
    """Distance from x to the nearest integer, exact."""
    f = Fraction(x)
    frac = f - (f.numerator // f.denominator)
    return min(frac, 1 - frac)


def lex_sign(v: Sequence[Rat]) -> int:
    """+1 if the first nonzero entry is positive, -1 if negative, 0 if zero."""
    for x in v:
        if x > 0:
            return 1
        if x < 0:
            return -1
    return 0


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball with exact rational center and radius."""

    center: Vec
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", rat_vec(self.center))
        object.__setattr__(self, "radius", rat(self.radius))
        if self.radius <= 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    @property
    def dimension(self) -> int:
        return len(self.center)

    def contains_ball(self, inner: "Ball") -> bool:
        """Exact test: inner ⊆ self.  ||c_i - c_o|| <= R - r, via squares."""
        slack = self.radius - inner.radius
        if slack < 0:
            return False
        return norm_sq(sub(inner.center, self.center)) <= slack * slack

    def contains_point(self, p: Vec) -> bool:
        return norm_sq(sub(p, self.center)) <= self.radius * self.radius

    def to_jsonable(self) -> dict:
        return {"center": [rat_str(c) for c in self.center], "radius": rat_str(self.radius)}

    @classmethod
    def from_jsonable(cls, obj: dict) -> "Ball":
        return cls(tuple(rat(c) for c in obj["center"]), rat(obj["radius"]))


@dataclass(frozen=True)
class Hyperplane:
    """Affine hyperplane {y : u·y = a} with integer normal u and offset a."""

    normal: tuple[int, ...]
    offset: int

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple(int(c) for c in self.normal))
        object.__setattr__(self, "offset", int(self.offset))
        if all(c == 0 for c in self.normal):
            raise ValueError("hyperplane normal must be nonzero")

    @property
    def norm_sq(self) -> int:
        return sum(c * c for c in self.normal)

    def residual(self, p: Sequence[Rat]) -> Fraction:
        """Signed u·p - a (NOT normalized; divide by |u| for distance)."""
        return dot(self.normal, p) - self.offset

    def dist_sq_times_norm_sq(self, p: Sequence[Rat]) -> Fraction:
        r = self.residual(p)
        return r * r

    def to_jsonable(self) -> dict:
        return {"u": list(self.normal), "a": self.offset}


@dataclass(frozen=True)
class Halfspace:
    """{y : direction · (y - anchor) >= threshold} with exact unit direction."""

    direction: Vec
    threshold: Fraction
    anchor: Vec

    def __post_init__(self):
        object.__setattr__(self, "direction", rat_vec(self.direction))
        object.__setattr__(self, "threshold", rat(self.threshold))
        object.__setattr__(self, "anchor", rat_vec(self.anchor))
        if norm_sq(self.direction) != 1:
            raise ValueError("halfspace direction must be an exact unit vector")

    def height(self, p: Vec) -> Fraction:
        return dot(self.direction, sub(p, self.anchor))

    def contains_ball(self, ball: Ball) -> bool:
        """Exact: height of the center clears threshold + radius."""
        return self.height(ball.center) - self.threshold >= ball.radius

    def contains_point(self, p: Vec) -> bool:
        return self.height(p) >= self.threshold


# -- rationalizing directions ------------------------------------------------


def rational_unit_direction(v: Sequence[Rat], tol: Fraction = Fraction(1, 2**30)) -> Vec:
    """An exact unit vector (sum of squares == 1) within tol of v/|v|.

    Inverse stereographic projection from a rational point: any w in Q^{n-1}
    maps to d with d_axis = s(1-|w|^2)/(1+|w|^2) and d_j = 2 w_j/(1+|w|^2),
    which satisfies |d| = 1 identically.  We project from the axis of largest
    |component| (sign-adjusted) so the chart is well-conditioned, and refine w
    until the float distance to v/|v| is below tol.
    """
    v = rat_vec(v)
    n = len(v)
    if all(x == 0 for x in v):
        raise ValueError("cannot normalize the zero vector")
    if tol <= 0:
        raise ValueError("tol must be positive")

    nonzero = [i for i, x in enumerate(v) if x != 0]
    if len(nonzero) == 1:
        # axis-aligned: exact unit vector, no approximation needed
        i = nonzero[0]
        out = [Fraction(0)] * n
        out[i] = Fraction(1 if v[i] > 0 else -1)
        return tuple(out)

    fv = [float(x) for x in v]
    fnorm = math.sqrt(math.fsum(x * x for x in fv))
    target = [x / fnorm for x in fv]

    axis = max(range(n), key=lambda i: abs(target[i]))
    s = 1 if target[axis] > 0 else -1
    rest = [i for i in range(n) if i != axis]
    denom = 1.0 + s * target[axis]
    w_ideal = [target[i] / denom for i in rest]

    tol_f = float(tol)
    max_den = 1 << 20
    for _ in range(8):
        w = [Fraction(x).limit_denominator(max_den) for x in w_ideal]
        wsq = sum((x * x for x in w), Fraction(0))
        lift = 1 + wsq
        d = [Fraction(0)] * n
        d[axis] = Fraction(s) * (1 - wsq) / lift
        for j, i in enumerate(rest):
            d[i] = 2 * w[j] / lift
        assert sum((x * x for x in d), Fraction(0)) == 1
        err = math.sqrt(math.fsum((float(d[i]) - target[i]) ** 2 for i in range(n)))
        if err < tol_f:
            return tuple(d)
        max_den <<= 14
    raise ValueError("direction refinement failed to reach tolerance")


# -- spherical caps (float territory) ----------------------------------------


def cap_fraction_angular(radius: float, n: int) -> float:
    """Normalized (n-1)-sphere measure of a cap of angular radius `radius`.

    n = 1: the 0-sphere is two points; any positive radius captures one of
    them, fraction 1/2.  n = 2: arc fraction radius/pi.  n >= 3: the standard
    sin^(n-2) integral ratio, evaluated with mpmath.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if not 0 < radius <= math.pi:
        raise ValueError(f"angular radius out of range: {radius}")
    if n == 1:
        return 0.5 if radius < math.pi else 1.0
    if n == 2:
        return radius / math.pi
    import mpmath

    with mpmath.workdps(40):
        num = mpmath.quad(lambda t: mpmath.sin(t) ** (n - 2), [0, radius])
        den = mpmath.quad(lambda t: mpmath.sin(t) ** (n - 2), [0, mpmath.pi])
        return float(num / den)


def cap_fraction(gamma: Rat, n: int) -> float:
    """Fraction of the unit sphere within angle arcsin(gamma/2) of a point."""
    g = float(Fraction(gamma))
    if not 0 < g < 2:
        raise ValueError("gamma must lie in (0, 2)")
    return cap_fraction_angular(math.asin(g / 2), n)


def cap_fraction_montecarlo(
    gamma: Rat, n: int, samples: int = 1_000_000, seed: int = 0, grid: int = 1200
) -> float:
    """Definitional Monte-Carlo estimate of the same cap fraction.

    Works from the defining property rather than the closed form: a unit
    y lies in the cap around x̂ of angular radius arcsin(γ/2) iff y has
    nonnegative inner product with every point of the closed dual cap of
    angular radius arccos(γ/2) around x̂.  We grid that dual cap densely and
    test min_z z·y >= 0 against uniform random directions.  Independent of
    cap_fraction (different formula, different code path) on purpose.
    """
    import numpy as np

    g = float(Fraction(gamma))
    if not 0 < g < 2:
        raise ValueError("gamma must lie in (0, 2)")
    if n == 1:
        # 0-sphere: the cap around +1 is {+1}; uniform on {±1}.
        rng = np.random.default_rng(seed)
        draws = rng.integers(0, 2, size=samples)
        return float(np.mean(draws == 1))

    theta_c = math.acos(g / 2.0)  # dual cap radius
    if n == 2:
        phis = np.linspace(-theta_c, theta_c, grid)
        zs = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    elif n == 3:
        n_rings = max(8, int(round(math.sqrt(grid / 4))))
        n_az = max(16, grid // n_rings)
        polar = np.linspace(0.0, theta_c, n_rings)
        az = np.linspace(0.0, 2 * math.pi, n_az, endpoint=False)
        pp, aa = np.meshgrid(polar, az, indexing="ij")
        zs = np.stack(
            [np.cos(pp).ravel(), (np.sin(pp) * np.cos(aa)).ravel(), (np.sin(pp) * np.sin(aa)).ravel()],
            axis=1,
        )
    else:
        raise NotImplementedError("Monte-Carlo oracle implemented for n <= 3")

    rng = np.random.default_rng(seed)
    hits = 0
    chunk = 50_000
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        y = rng.standard_normal((m, n))
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        mins = (y @ zs.T).min(axis=1)
        hits += int(np.count_nonzero(mins >= 0.0))
        done += m
    return hits / samples
