"""The constructing player: block schedule execution and its certificate.

One block = avoidance_rounds full rounds.  At each block start the strategy
gathers, for every resonance family the schedule assigns to that block, the
integer-offset hyperplane(s) currently reachable by the ball, then runs the
avoidance drive to retire them all.  The certificate is recomputed from the
finished trace alone (gather points are read off the recorded balls), so a
trace produced by any policy whatsoever can be checked — a do-nothing player
fails it honestly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .exact import floor_frac, rat, rat_str, sqrt_upper
from .engine import GameParams, GameTrace, limit_enclosure, run_game
from .geometry import Ball, Hyperplane, Vec, dot
from .escape import AvoidanceDrive, EscapeAssertionFailed
from .resonance import ResonanceSequence
from .schedule import (
    BlockSchedule,
    ScheduleInfeasible,
    StrategyParams,
    block_schedule,
    dangerous_hyperplanes,
    derive_params,
)


class CertificateFailed(Exception):
    def __init__(self, violations: list[dict]):
        self.violations = violations
        super().__init__(
            "certificate check failed for "
            + ", ".join(f"family {v['r']}" for v in violations)
        )


@dataclass(frozen=True)
class HandledPlane:
    r: int
    plane: Hyperplane
    block: int


def gather_block_planes(
    ball: Ball, seq: ResonanceSequence, sched: BlockSchedule, block: int
) -> list[HandledPlane]:
    """Reachable hyperplanes of the block's families, at the block-start ball.

    Each family contributes its nearest integer offset; when the *second*
    nearest offset is close enough that end-of-game clearance could not be
    certified from this radius (margin <= |u| * radius, tested on squares),
    that offset's plane is gathered as well.  The total must stay strictly
    below the plane budget, or the schedule was infeasible after all.
    """
    params = sched.params
    lo, hi = sched.handled_range(block)
    out: list[HandledPlane] = []
    for r, plane in dangerous_hyperplanes(ball, seq, lo, hi):
        out.append(HandledPlane(r, plane, block))
        s = dot(plane.normal, ball.center)
        lean = s - plane.offset  # in [-1/2, 1/2] by nearest rounding
        margin = 1 - abs(lean) - params.margin
        if margin <= 0:
            raise ScheduleInfeasible(
                f"family {r}: margin to the second offset is non-positive"
            )
        if margin * margin <= plane.norm_sq * ball.radius * ball.radius:
            a2 = plane.offset + (1 if lean >= 0 else -1)
            out.append(HandledPlane(r, Hyperplane(plane.normal, a2), block))
    if len(out) > params.plane_budget - 1:
        raise ScheduleInfeasible(
            f"block {block} gathered {len(out)} planes; the avoidance "
            f"guarantee needs at most {params.plane_budget - 1}"
        )
    return out


def _family_clear(
    center: Vec, radius: Fraction, norm_sq: int, s: Fraction, margin: Fraction
) -> bool:
    """Exact: every integer offset of the family stays > margin beyond the
    ball's reach.  With f = s - floor(s), requires both f - margin and
    1 - f - margin to be positive and to exceed |u|*radius (on squares)."""
    f = s - floor_frac(s)
    reach_sq = norm_sq * radius * radius
    a1 = f - margin
    a2 = 1 - f - margin
    if a1 <= 0 or a2 <= 0:
        return False
    return a1 * a1 > reach_sq and a2 * a2 > reach_sq


class WhiteStrategy:
    """Play the full block schedule; exposes the gathered planes it handled."""

    def __init__(
        self,
        seq: ResonanceSequence,
        sched: BlockSchedule,
        *,
        seed: int = 0,
    ):
        self.seq = seq
        self.sched = sched
        self.params = sched.params
        self.seed = seed
        self.handled: list[HandledPlane] = []
        self.moves = 0
        self.sub: Optional[AvoidanceDrive] = None
        self.last_note: Optional[str] = None

    def _check_handled_clear(self, ball: Ball) -> None:
        for h in self.handled:
            s = dot(h.plane.normal, ball.center)
            if not _family_clear(
                ball.center, ball.radius, h.plane.norm_sq, s, self.params.margin
            ):
                raise EscapeAssertionFailed(
                    f"family {h.r} (handled in block {h.block}) lost its "
                    f"clearance at move {self.moves}"
                )

    def __call__(self, state) -> Vec:
        tau = self.params.avoidance_rounds
        block = self.moves // tau if tau else self.sched.blocks
        if block >= self.sched.blocks:
            self.moves += 1
            self.last_note = "schedule complete"
            return state.ball.center
        if self.moves % tau == 0:
            self._check_handled_clear(state.ball)
            gathered = gather_block_planes(state.ball, self.seq, self.sched, block)
            self.handled.extend(gathered)
            self.sub = AvoidanceDrive(
                [h.plane for h in gathered],
                self.params,
                seed=self.seed + 7919 * block,
                note_prefix=f"block {block} ",
            )
        assert self.sub is not None
        center = self.sub(state)
        self.last_note = self.sub.last_note
        self.moves += 1
        return center


def build_strategy(
    seq: ResonanceSequence,
    alpha,
    beta,
    lacunarity,
    rho0,
    blocks: int,
    *,
    seed: int = 0,
) -> tuple[WhiteStrategy, BlockSchedule]:
    params = derive_params(alpha, beta, lacunarity, seq.dimension)
    sched = block_schedule(params, seq, rho0, blocks)
    return WhiteStrategy(seq, sched, seed=seed), sched


# -- certification from the trace alone --------------------------------------


@dataclass(frozen=True)
class CertificateEntry:
    r: int
    normal: tuple[int, ...]
    offset: int
    block: int
    residual_lb: Fraction  # rational lower bound on |u·eta - a|, reporting

    def to_jsonable(self) -> dict:
        return {
            "r": self.r,
            "u": list(self.normal),
            "a": self.offset,
            "block": self.block,
            "residual_lb": rat_str(self.residual_lb),
        }


@dataclass
class Certificate:
    params: StrategyParams
    rho0: Fraction
    blocks: int
    covered_through: int
    eta_center: Vec
    eta_radius: Fraction
    entries: list[CertificateEntry]

    def to_jsonable(self) -> dict:
        return {
            "params": self.params.to_jsonable(),
            "rho0": rat_str(self.rho0),
            "blocks": self.blocks,
            "covered_through": self.covered_through,
            "eta_center": [rat_str(c) for c in self.eta_center],
            "eta_radius": rat_str(self.eta_radius),
            "epsilon": rat_str(self.params.margin),
            "handled": [e.to_jsonable() for e in self.entries],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, sort_keys=True)


def block_start_ball(trace: GameTrace, sched: BlockSchedule, block: int) -> Ball:
    """The ball the given block opened with, read off the recorded trace."""
    tau = sched.params.avoidance_rounds
    idx = 2 * block * tau
    if idx == 0:
        return trace.initial
    if idx - 1 >= len(trace.moves):
        raise ValueError(f"trace too short for block {block}")
    return trace.moves[idx - 1].ball


def certificate(
    trace: GameTrace, seq: ResonanceSequence, sched: BlockSchedule
) -> Certificate:
    """Check that the trace's limit ball clears every scheduled family.

    The gather points are recomputed from the trace itself, so this accepts
    traces from any source; it raises CertificateFailed when any family's
    integer offsets come within margin of the final ball.  Every comparison
    is exact; the per-entry residual_lb is a rational lower bound for
    human consumption only.
    """
    params = sched.params
    if 2 * sched.blocks * params.avoidance_rounds > len(trace.moves):
        raise ValueError("trace does not cover the full schedule")
    handled: list[HandledPlane] = []
    for b in range(sched.blocks):
        handled.extend(
            gather_block_planes(block_start_ball(trace, sched, b), seq, sched, b)
        )
    final = limit_enclosure(trace)
    violations: list[dict] = []
    entries: list[CertificateEntry] = []
    reach_ub_cache: dict[int, Fraction] = {}
    for h in handled:
        s = dot(h.plane.normal, final.center)
        if not _family_clear(
            final.center, final.radius, h.plane.norm_sq, s, params.margin
        ):
            violations.append(
                {
                    "r": h.r,
                    "block": h.block,
                    "offset": h.plane.offset,
                    "residual": rat_str(abs(s - round(s))),
                }
            )
            continue
        nsq = h.plane.norm_sq
        if nsq not in reach_ub_cache:
            reach_ub_cache[nsq] = sqrt_upper(nsq * final.radius * final.radius)
        lb = abs(s - h.plane.offset) - reach_ub_cache[nsq]
        # floor to a compact dyadic for the report; still a valid lower bound
        compact = Fraction(floor_frac(lb * (1 << 30)), 1 << 30)
        entries.append(
            CertificateEntry(
                h.r, h.plane.normal, h.plane.offset, h.block,
                compact if compact > 0 else lb,
            )
        )
    if violations:
        raise CertificateFailed(violations)
    return Certificate(
        params=params,
        rho0=sched.rho0,
        blocks=sched.blocks,
        covered_through=sched.cuts[-1],
        eta_center=final.center,
        eta_radius=final.radius,
        entries=entries,
    )


def run_constructed_game(
    seq: ResonanceSequence,
    alpha,
    beta,
    lacunarity,
    rho0,
    blocks: int,
    black,
    *,
    center: Optional[Sequence] = None,
    seed: int = 0,
) -> tuple[GameTrace, Certificate, WhiteStrategy, BlockSchedule]:
    """Derive, schedule, play and certify in one call."""
    white, sched = build_strategy(
        seq, alpha, beta, lacunarity, rho0, blocks, seed=seed
    )
    n = seq.dimension
    c0 = tuple(rat(c) for c in center) if center is not None else (Fraction(0),) * n
    initial = Ball(c0, rat(rho0))
    game_params = GameParams(rat(alpha), rat(beta), n)
    trace = run_game(
        game_params, initial, white, black,
        rounds=sched.blocks * sched.params.avoidance_rounds,
    )
    cert = certificate(trace, seq, sched)
    return trace, cert, white, sched
