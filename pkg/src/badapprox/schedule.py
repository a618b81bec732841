"""Derived constants and the block schedule of the avoidance strategy.

All scheduling decisions are exact-rational: powers of alpha*beta and of the
lacunarity M are computed as Fractions, ceilings of logarithms are found by
exact power comparisons, and thresholds are compared on squares.  The one
float ingredient — the spherical-cap measure for dimension >= 2 — enters only
as a conservative dyadic *lower* bound (rounded down at 2^-40 granularity),
so every downstream guarantee still holds exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .exact import ceil_frac, rat, rat_str
from .geometry import Ball, Hyperplane, cap_fraction_angular, dot
from .resonance import ResonanceSequence


class ScheduleInfeasible(Exception):
    """The requested schedule cannot be certified with the given inputs."""


@dataclass(frozen=True)
class StrategyParams:
    """Everything the avoidance strategy needs, all exactly represented.

    gamma           1 + alpha*beta - 2*alpha (> 0): the per-round worst-case
                    escape drift as a multiple of the current ball radius.
    escape_rounds   rounds of one escape drive (smallest t with
                    (alpha*beta)^t < gamma/2, strictly).
    cap_measure_lb  dyadic lower bound on the normalized measure of the
                    direction cap that guarantees an absorbing escape.
    plane_budget    k: per-block capacity governing the schedule inequality
                    (1/(alpha*beta))^tau_k < M^(k-2).
    avoidance_rounds tau_k = escape_rounds * (number of escape sub-blocks
                    needed to clear k-1 planes).
    margin          epsilon = gamma / (4 M^(k+2)): the certified clearance,
                    in resonance-residual units, that the final point keeps
                    from every handled hyperplane's integer offsets.
    """

    alpha: Fraction
    beta: Fraction
    dimension: int
    lacunarity: Fraction
    gamma: Fraction
    escape_rounds: int
    cap_measure_lb: Fraction
    plane_budget: int
    avoidance_rounds: int
    margin: Fraction

    @property
    def shrink(self) -> Fraction:
        """alpha*beta: the per-round radius contraction."""
        return self.alpha * self.beta

    def to_jsonable(self) -> dict:
        return {
            "alpha": rat_str(self.alpha),
            "beta": rat_str(self.beta),
            "dimension": self.dimension,
            "lacunarity": rat_str(self.lacunarity),
            "gamma": rat_str(self.gamma),
            "escape_rounds": self.escape_rounds,
            "cap_measure_lb": rat_str(self.cap_measure_lb),
            "plane_budget": self.plane_budget,
            "avoidance_rounds": self.avoidance_rounds,
            "margin": rat_str(self.margin),
        }


_DYADIC_BITS = 40


def _cap_measure_lower_bound(gamma: Fraction, shrink_t: Fraction, n: int) -> Fraction:
    """Dyadic lower bound on the measure of the *reduced* escape cap.

    The full cap has angular radius arcsin(gamma/2); escapes that remain
    clear after the drive need directions within the reduced radius
    arcsin(gamma/2) - arcsin(gamma * (alpha*beta)^t), which is positive
    exactly when the escape-round condition holds.  For n = 1 both caps have
    measure exactly 1/2.  For n >= 2 we evaluate in floats and round *down*
    with a two-ulp guard band; the result only ever understates the truth.
    """
    if n == 1:
        return Fraction(1, 2)
    g = float(gamma)
    reduced = math.asin(g / 2) - math.asin(g * float(shrink_t))
    if reduced <= 0:
        raise ScheduleInfeasible("escape margin leaves no usable direction cap")
    w = cap_fraction_angular(reduced, n)
    scaled = math.floor(w * (1 << _DYADIC_BITS)) - 2
    return Fraction(max(1, scaled), 1 << _DYADIC_BITS)


def derive_params(alpha, beta, lacunarity, dimension: int) -> StrategyParams:
    """Derive the full parameter set from (alpha, beta, M, n).

    Raises ScheduleInfeasible when no plane budget can satisfy the schedule
    inequality (does not happen for valid inputs, but the scan is capped).
    """
    a, b, m = rat(alpha), rat(beta), rat(lacunarity)
    if not 0 < a < Fraction(1, 2):
        raise ValueError(f"alpha must lie in (0, 1/2), got {a}")
    if not 0 < b < 1:
        raise ValueError(f"beta must lie in (0, 1), got {b}")
    if m <= 1:
        raise ValueError(f"lacunarity must exceed 1, got {m}")
    if dimension < 1:
        raise ValueError("dimension must be >= 1")

    gamma = 1 + a * b - 2 * a
    assert gamma > 0
    p = a * b

    # escape_rounds: smallest t >= 1 with p^t < gamma/2 (strict)
    t = 1
    pt = p
    while not 2 * pt < gamma:
        t += 1
        pt *= p

    omega = _cap_measure_lower_bound(gamma, pt, dimension)

    # plane-budget scan.  sub_blocks(k) = smallest c with k*(1-omega)^c <= 1,
    # i.e. ceil(log k / log(1/(1-omega))); it is nondecreasing in k, so the
    # power (1-omega)^c is maintained incrementally across the scan.
    one_minus = 1 - omega
    c = 0
    pow_c = Fraction(1)
    inv_p = 1 / p
    k_found: Optional[tuple[int, int]] = None
    for k in range(1, 100_001):
        while k * pow_c > 1:
            c += 1
            pow_c *= one_minus
        tau = t * c
        if inv_p**tau < m ** (k - 2):
            k_found = (k, tau)
            break
    if k_found is None:
        raise ScheduleInfeasible("no plane budget satisfies the schedule inequality")
    k, tau = k_found

    eps = gamma / (4 * m ** (k + 2))
    return StrategyParams(
        alpha=a,
        beta=b,
        dimension=dimension,
        lacunarity=m,
        gamma=gamma,
        escape_rounds=t,
        cap_measure_lb=omega,
        plane_budget=k,
        avoidance_rounds=tau,
        margin=eps,
    )


@dataclass(frozen=True)
class BlockSchedule:
    """Which resonance indices each block of tau_k rounds must retire.

    Block b (0-based, b < blocks) starts at ball index b*tau_k and handles
    resonance indices r in (cut[b], cut[b+1]] where cut = (0, r_1, ..., r_J)
    with r_1 = 1.  For b >= 1 the upper cut is the largest r whose size t_r
    stays below 1/(2*rho0*(alpha*beta)^(b*tau_k)); the schedule also verifies
    that the *next* family size has crossed that threshold, which is what
    certifies that no family is ever handled too late.
    """

    params: StrategyParams
    rho0: Fraction
    blocks: int
    cuts: tuple[int, ...]  # length blocks+1, starting at 0, then r_1=1, ...

    @property
    def gaps(self) -> tuple[int, ...]:
        return tuple(hi - lo for lo, hi in zip(self.cuts, self.cuts[1:]))

    def handled_range(self, block: int) -> tuple[int, int]:
        """(lo, hi], 1-based resonance indices handled by `block`."""
        return self.cuts[block], self.cuts[block + 1]

    def to_jsonable(self) -> dict:
        return {
            "rho0": rat_str(self.rho0),
            "blocks": self.blocks,
            "cuts": list(self.cuts),
        }


def block_schedule(
    params: StrategyParams, seq: ResonanceSequence, rho0, blocks: int
) -> BlockSchedule:
    """Build and certify the block schedule.

    Raises ScheduleInfeasible when the initial radius is too large for the
    first family, when a block would have to handle >= plane_budget families,
    or when the resonance family runs out before a cut can be certified.
    """
    r0 = rat(rho0)
    if r0 <= 0:
        raise ValueError("rho0 must be positive")
    if blocks < 0:
        raise ValueError("blocks must be >= 0")
    if seq.dimension != params.dimension:
        raise ScheduleInfeasible(
            f"resonance vectors live in dimension {seq.dimension}, "
            f"strategy in {params.dimension}"
        )
    if blocks == 0:
        return BlockSchedule(params, r0, 0, (0,))

    # block 0 handles the single smallest family; its gather is well defined
    # only if the nearest resonance offset is unique at scale rho0:
    if 4 * r0 * r0 * seq.norm_sq_of(1) > 1:
        raise ScheduleInfeasible(
            "initial radius too large: 2*rho0*t_1 must not exceed 1"
        )

    p = params.shrink
    tau = params.avoidance_rounds
    cuts = [0, 1]
    shrink_pow = p**tau  # (alpha*beta)^(b*tau) at b = 1
    for b in range(1, blocks):
        # threshold T = 1/(2*rho0*p^(b*tau)); family r is due iff t_r < T,
        # compared on squares: t_r^2 * (2*rho0*p^(b*tau))^2 < 1.
        scale = 2 * r0 * shrink_pow
        scale_sq = scale * scale
        r_hi = cuts[-1]
        while r_hi + 1 <= len(seq) and seq.norm_sq_of(r_hi + 1) * scale_sq < 1:
            r_hi += 1
        if r_hi == len(seq):
            raise ScheduleInfeasible(
                f"resonance family exhausted at block {b}: cannot certify that "
                f"the next size has crossed the threshold (need >= {ceil_frac(1/scale)})"
            )
        if r_hi - cuts[-1] >= params.plane_budget:
            raise ScheduleInfeasible(
                f"block {b} would need {r_hi - cuts[-1]} families, "
                f"budget allows at most {params.plane_budget - 1}"
            )
        cuts.append(r_hi)
        shrink_pow *= p**tau
    return BlockSchedule(params, r0, blocks, tuple(cuts))


def dangerous_hyperplanes(
    ball: Ball, seq: ResonanceSequence, r_lo: int, r_hi: int
) -> list[tuple[int, Hyperplane]]:
    """The nearest integer-offset hyperplane of each family in (r_lo, r_hi].

    For family r with vector u, the hyperplanes are {y : u·y = a}, a in Z;
    at scales where 2*radius*|u| <= 1 at most one offset can meet the ball,
    and the nearest one is a = round(u·center) (ties to even, exactly as
    Fraction rounding does).
    """
    out = []
    for r in range(r_lo + 1, r_hi + 1):
        u = seq.vector(r)
        if 4 * ball.radius * ball.radius * seq.norm_sq_of(r) > 1:
            raise ValueError(
                f"family {r} has multiple reachable offsets at radius {ball.radius}; "
                "schedule should have prevented this"
            )
        s = dot(u, ball.center)
        a = round(s)
        out.append((r, Hyperplane(u, a)))
    return out
