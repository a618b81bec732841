"""Escape drives and direction-cap selection.

The core maneuver: from a ball threatened by an affine hyperplane with
integer normal u, pick a unit direction x̂ inside a spherical cap around the
outward normal and push the center by (1-alpha)*rho along x̂ every round.
Against *any* legal opponent this drives the whole ball into the halfspace
{x̂·(y - start) >= (gamma/2)*rho_start} within `escape_rounds` rounds, and for
directions in a slightly smaller cap ("strong" hits) it leaves the final ball
at distance > gamma*rho from the plane — a state that nested play can never
undo.  Every membership test below is decided in exact rational arithmetic
(at most two squarings); floats appear only inside candidate *generation*,
never in acceptance of a candidate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from .exact import ceil_frac, gt_sqrt, gt_sum_two_sqrt, rat
from .geometry import (
    Ball,
    Halfspace,
    Hyperplane,
    Vec,
    add,
    dot,
    lex_sign,
    rational_unit_direction,
    scale,
)
from .schedule import StrategyParams


class EscapeAssertionFailed(Exception):
    """A structurally-guaranteed invariant of the escape machinery failed.

    Reaching this means a bug (or a tampered policy), not bad luck: the
    drives are chosen so the guarded conditions hold against every legal
    opponent.
    """


class SelectionExhausted(Exception):
    """No sampled direction met the strong-hit quota within the budget."""

    def __init__(self, quota: int, best_strong: int, tried: int):
        self.quota = quota
        self.best_strong = best_strong
        self.tried = tried
        super().__init__(
            f"direction search exhausted: quota {quota}, best strong count "
            f"{best_strong} after {tried} candidates"
        )


def plane_sign(ball: Ball, plane: Hyperplane) -> int:
    """Which side of the plane the escape pushes toward: the sign of the
    center residual, falling back to the lexicographic sign of the normal
    when the plane passes exactly through the center."""
    s0 = plane.residual(ball.center)
    if s0 > 0:
        return 1
    if s0 < 0:
        return -1
    return lex_sign(plane.normal)


def escort_point(ball: Ball, plane: Hyperplane, tol: Fraction = Fraction(1, 2**30)) -> Vec:
    """The boundary point of the ball farthest from the plane (on the side
    the sign convention picks), with an exactly-unit rationalized direction."""
    sgn = plane_sign(ball, plane)
    direction = rational_unit_direction(scale(plane.normal, sgn), tol)
    return add(ball.center, scale(direction, ball.radius))


def absorbed(ball: Ball, plane: Hyperplane, gamma: Fraction) -> bool:
    """Exact: dist(ball, plane) > gamma * radius.

    The state is monotone under play: later balls are nested (distance can
    only grow) while gamma*radius shrinks, so once absorbed, always absorbed.
    """
    r = plane.residual(ball.center)
    bound = plane.norm_sq * ball.radius * ball.radius * (1 + gamma) ** 2
    return r * r > bound


def is_threat(ball: Ball, plane: Hyperplane, gamma: Fraction) -> bool:
    return not absorbed(ball, plane, gamma)


# -- exact cap membership ----------------------------------------------------


def cap_member(plane: Hyperplane, sgn: int, direction: Vec, gamma: Fraction) -> bool:
    """Is the unit direction within angle arcsin(gamma/2) of the outward
    normal?  Decided on squares: with A = sgn*(u · x̂),
        A > 0  and  A^2 >= |u|^2 (1 - gamma^2/4).
    """
    a = sgn * dot(plane.normal, direction)
    if a <= 0:
        return False
    return a * a >= plane.norm_sq * (1 - gamma * gamma / 4)


def strong_cap_member(
    plane: Hyperplane, sgn: int, direction: Vec, gamma: Fraction, shrink_t: Fraction
) -> bool:
    """Membership in the reduced cap that makes the escape absorbing.

    Requires  A*(gamma/2) > sqrt(U_perp^2 (1-gamma^2/4)) + sqrt(|u|^2 m^2)
    with U_perp^2 = |u|^2 - A^2 and m = gamma*shrink_t (shrink_t =
    (alpha*beta)^escape_rounds).  Equivalent to the angle being below
    arcsin(gamma/2) - arcsin(gamma*shrink_t).  Decided by double squaring.
    """
    a = sgn * dot(plane.normal, direction)
    if a <= 0:
        return False
    u_perp_sq = plane.norm_sq - a * a
    if u_perp_sq < 0:
        raise EscapeAssertionFailed("direction is not a unit vector")
    g2 = gamma * gamma
    return gt_sum_two_sqrt(
        a * gamma / 2,
        u_perp_sq * (1 - g2 / 4),
        plane.norm_sq * g2 * shrink_t * shrink_t,
    )


def verified_miss(
    ball: Ball, plane: Hyperplane, sgn: int, direction: Vec, gamma: Fraction
) -> bool:
    """Exact check that the whole guaranteed end-region avoids the plane.

    Every point reachable after the drive lies in
      D = {center + d : x̂·d >= (gamma/2) rho, |d| <= rho};
    along D the signed residual is minimized at height (gamma/2) rho, giving
      min >= |s0| + rho*(A*(gamma/2) - sqrt(U_perp^2 (1-gamma^2/4))).
    Positivity of that bound is decided by one squaring.
    """
    a = sgn * dot(plane.normal, direction)
    if a <= 0:
        return False
    s_abs = abs(plane.residual(ball.center))
    u_perp_sq = plane.norm_sq - a * a
    lhs = s_abs / ball.radius + a * gamma / 2
    return gt_sqrt(lhs, u_perp_sq * (1 - gamma * gamma / 4))


# -- candidate generation (floats allowed, outputs exact) --------------------


def _stereo_unit(w: Sequence[Fraction], n: int, axis: int, sign: int) -> Vec:
    """Exact unit vector from a rational chart point w in Q^(n-1)."""
    wsq = sum((x * x for x in w), Fraction(0))
    lift = 1 + wsq
    d = [Fraction(0)] * n
    d[axis] = Fraction(sign) * (1 - wsq) / lift
    rest = [i for i in range(n) if i != axis]
    for j, i in enumerate(rest):
        d[i] = 2 * w[j] / lift
    return tuple(d)


_LDS_STEPS = [math.sqrt(p) % 1.0 for p in (2, 3, 5, 7, 11, 13, 17, 19)]
_CHART_DENOM = 1 << 12


def _grid_direction(idx: int, n: int) -> Vec:
    """Deterministic low-discrepancy direction, exactly unit by construction."""
    axis = idx % n
    sign = 1 if (idx // n) % 2 == 0 else -1
    base = idx // (2 * n) + 1
    w = []
    for j in range(n - 1):
        val = (0.5 + base * _LDS_STEPS[j % len(_LDS_STEPS)]) % 1.0
        w.append(Fraction(round((2 * val - 1) * 2 * _CHART_DENOM), _CHART_DENOM))
    return _stereo_unit(tuple(w), n, axis, sign)


def _random_direction(rng: Random, n: int) -> Vec:
    v = [rng.gauss(0.0, 1.0) for _ in range(n)]
    norm = math.sqrt(math.fsum(x * x for x in v))
    if norm == 0.0:
        return _stereo_unit((), n, 0, 1) if n == 1 else _grid_direction(0, n)
    u = [x / norm for x in v]
    axis = max(range(n), key=lambda i: abs(u[i]))
    sign = 1 if u[axis] > 0 else -1
    denom = 1.0 + abs(u[axis])
    w = tuple(
        Fraction(round(u[i] / denom * _CHART_DENOM), _CHART_DENOM)
        for i in range(n)
        if i != axis
    )
    return _stereo_unit(w, n, axis, sign)


# -- direction selection -----------------------------------------------------


@dataclass(frozen=True)
class CapSelection:
    direction: Vec
    escaped: tuple[int, ...]  # cap members whose end-region miss is verified
    strong: tuple[int, ...]  # subset guaranteed to be absorbed after the drive
    count: int
    candidates_tried: int


def select_cap(
    ball: Ball,
    planes: Sequence[Hyperplane],
    params: StrategyParams,
    *,
    seed: int = 0,
    initial_budget: int = 32,
    max_doublings: int = 20,
) -> CapSelection:
    """Pick a drive direction clearing at least ceil(cap_measure_lb * k')
    of the k' given planes, with every claimed clearance verified exactly.

    Candidates come from the planes' own escort directions, then a
    deterministic low-discrepancy grid, then seeded random directions; the
    budget doubles until the strong-hit quota is met.  The mean number of
    strong hits over the sphere is >= cap_measure_lb * k', so a qualifying
    direction always exists; SelectionExhausted signals a search-budget
    failure, not a mathematical one.
    """
    kprime = len(planes)
    if kprime == 0:
        raise ValueError("select_cap needs at least one plane")
    n = params.dimension
    if ball.dimension != n:
        raise ValueError("ball dimension does not match params")
    gamma = params.gamma
    shrink_t = params.shrink**params.escape_rounds
    quota = ceil_frac(params.cap_measure_lb * kprime)
    signs = [plane_sign(ball, p) for p in planes]

    def evaluate(direction: Vec) -> tuple[tuple[int, ...], tuple[int, ...]]:
        strong = []
        esc = []
        for j, (p, sgn) in enumerate(zip(planes, signs)):
            st = strong_cap_member(p, sgn, direction, gamma, shrink_t)
            if st:
                strong.append(j)
            if cap_member(p, sgn, direction, gamma) and verified_miss(
                ball, p, sgn, direction, gamma
            ):
                esc.append(j)
            elif st:
                raise EscapeAssertionFailed("strong hit without verified miss")
        return tuple(strong), tuple(esc)

    best: Optional[tuple[int, int, Vec, tuple, tuple]] = None
    seen: set[Vec] = set()
    tried = 0

    def consider(direction: Vec):
        nonlocal best, tried
        if direction in seen:
            return
        seen.add(direction)
        tried += 1
        strong, esc = evaluate(direction)
        key = (len(strong), len(esc))
        if (
            best is None
            or key > (best[0], best[1])
            or (key == (best[0], best[1]) and direction < best[2])
        ):
            best = (len(strong), len(esc), direction, strong, esc)

    if n == 1:
        consider((Fraction(1),))
        consider((Fraction(-1),))
    else:
        for p, sgn in zip(planes, signs):
            consider(rational_unit_direction(scale(p.normal, sgn)))
        rng = Random(seed)
        grid_cursor = 0
        budget = initial_budget
        for _ in range(max_doublings + 1):
            while grid_cursor < budget:
                consider(_grid_direction(grid_cursor, n))
                grid_cursor += 1
            for _ in range(budget // 2):
                consider(_random_direction(rng, n))
            if best is not None and best[0] >= quota:
                break
            budget *= 2

    assert best is not None
    if best[0] < quota:
        raise SelectionExhausted(quota, best[0], tried)
    return CapSelection(
        direction=best[2],
        escaped=best[4],
        strong=best[3],
        count=len(best[4]),
        candidates_tried=tried,
    )


# -- policies ----------------------------------------------------------------


def drive_halfspace(start: Ball, direction: Vec, gamma: Fraction) -> Halfspace:
    """The halfspace the escape drive certifies: height >= (gamma/2)*rho_start
    above the start center, along the drive direction."""
    return Halfspace(direction, gamma * start.radius / 2, start.center)


class EscapeDrive:
    """Step (1-alpha)*rho along a fixed unit direction for a fixed number of
    White moves, then hold the center."""

    def __init__(self, direction: Vec, rounds: int, note_prefix: str = ""):
        self.direction = direction
        self.rounds = rounds
        self.moves = 0
        self.note_prefix = note_prefix
        self.last_note: Optional[str] = None

    def __call__(self, state) -> Vec:
        if self.moves < self.rounds:
            step = (1 - state.params.alpha) * state.ball.radius
            center = add(state.ball.center, scale(self.direction, step))
            self.last_note = f"{self.note_prefix}drive {self.moves + 1}/{self.rounds}"
        else:
            center = state.ball.center
            self.last_note = f"{self.note_prefix}hold"
        self.moves += 1
        return center


def escape_policy(direction: Vec, rounds: int) -> EscapeDrive:
    return EscapeDrive(direction, rounds)


class AvoidanceDrive:
    """Clear a set of hyperplanes over `avoidance_rounds` White moves.

    Play proceeds in sub-blocks of `escape_rounds` moves.  At each sub-block
    start the still-threatening planes are re-measured exactly; if any
    remain, a direction meeting the strong-hit quota is selected and driven.
    Strong hits are absorbed by the end of the sub-block — verified at the
    next boundary, where failure raises EscapeAssertionFailed (a bug
    detector: legal play cannot get there).
    """

    def __init__(
        self,
        planes: Sequence[Hyperplane],
        params: StrategyParams,
        *,
        seed: int = 0,
        note_prefix: str = "",
    ):
        self.planes = list(planes)
        self.params = params
        self.seed = seed
        self.note_prefix = note_prefix
        self.remaining = list(range(len(self.planes)))
        self.pos = 0
        self.direction: Optional[Vec] = None
        self.pending: Optional[tuple[Halfspace, tuple[int, ...]]] = None
        self.last_note: Optional[str] = None

    def _boundary(self, ball: Ball) -> None:
        gamma = self.params.gamma
        if self.pending is not None:
            halfspace, strong = self.pending
            if not halfspace.contains_ball(ball):
                raise EscapeAssertionFailed(
                    "escape drive failed to reach its certified halfspace"
                )
            for j in strong:
                if is_threat(ball, self.planes[j], gamma):
                    raise EscapeAssertionFailed(
                        f"plane {j} was strongly hit but is still a threat"
                    )
            self.pending = None
        self.remaining = [
            j for j in self.remaining if is_threat(ball, self.planes[j], gamma)
        ]
        sub_index = self.pos // self.params.escape_rounds
        if self.remaining:
            sel = select_cap(
                ball,
                [self.planes[j] for j in self.remaining],
                self.params,
                seed=self.seed + sub_index,
            )
            self.direction = sel.direction
            strong_global = tuple(self.remaining[j] for j in sel.strong)
            self.pending = (drive_halfspace(ball, sel.direction, gamma), strong_global)
        else:
            self.direction = None

    def __call__(self, state) -> Vec:
        t = self.params.escape_rounds
        if self.pos < self.params.avoidance_rounds and self.pos % t == 0:
            self._boundary(state.ball)
        sub = self.pos // t
        if self.pos >= self.params.avoidance_rounds or self.direction is None:
            center = state.ball.center
            self.last_note = f"{self.note_prefix}sub {sub} hold"
        else:
            step = (1 - state.params.alpha) * state.ball.radius
            center = add(state.ball.center, scale(self.direction, step))
            self.last_note = (
                f"{self.note_prefix}sub {sub} drive {self.pos % t + 1}/{t} "
                f"({len(self.remaining)} live)"
            )
        self.pos += 1
        return center


def avoid_hyperplanes(
    planes: Sequence[Hyperplane],
    params: StrategyParams,
    *,
    seed: int = 0,
) -> AvoidanceDrive:
    return AvoidanceDrive(planes, params, seed=seed)
