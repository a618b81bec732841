"""Opponent policies: random legal play, resonance-seeking play, replay.

All of them propose exact rational centers; the random one samples on an
integer sub-lattice of the legal disk so that runs are reproducible from the
seed alone, with no float in the resulting trace.
"""
from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Optional, Sequence

from .exact import rat
from .geometry import Vec, add, dot, rational_unit_direction, scale
from .resonance import ResonanceSequence


class RandomBlack:
    """Uniform-ish legal reply: center displaced by (grid point)/K * max step.

    Rejection-samples an integer vector k with |k| <= K and moves by
    ((1-beta)*rho / K) * k — always legal, exactly representable.
    """

    def __init__(self, seed: int = 0, grid: int = 512):
        self.rng = Random(seed)
        self.grid = grid
        self.last_note: Optional[str] = None

    def __call__(self, state) -> Vec:
        n = state.ball.dimension
        k = self.grid
        while True:
            pt = [self.rng.randint(-k, k) for _ in range(n)]
            if sum(c * c for c in pt) <= k * k:
                break
        step = (1 - state.params.beta) * state.ball.radius
        return add(state.ball.center, tuple(Fraction(c * step, k) for c in pt))


def random_black(seed: int = 0, grid: int = 512) -> RandomBlack:
    return RandomBlack(seed, grid)


class GreedyBlack:
    """Chase the nearest resonance hyperplane at full legal speed.

    Finds the family minimizing |residual| / |u| (compared exactly via
    cross-multiplied squares; ties to the smallest index), then steps the
    whole (1-beta)*rho toward it along a rationalized unit direction.  With
    `reach` set, planes farther than reach * rho are ignored and the reply
    is concentric instead.
    """

    def __init__(
        self,
        seq: ResonanceSequence,
        reach: Optional[Fraction] = None,
        tol: Fraction = Fraction(1, 2**30),
    ):
        self.seq = seq
        self.reach = rat(reach) if reach is not None else None
        self.tol = tol
        self.last_note: Optional[str] = None

    def _nearest(self, center: Vec) -> tuple[int, Fraction]:
        best_r = None
        best_res = None
        # dist_r^2 = res_r^2 / nsq_r; compare a/b vs c/d via a*d vs c*b
        for r in range(1, len(self.seq) + 1):
            u = self.seq.vector(r)
            res = dot(u, center) - round(dot(u, center))
            if best_r is None or (
                res * res * self.seq.norm_sq_of(best_r)
                < best_res * best_res * self.seq.norm_sq_of(r)
            ):
                best_r, best_res = r, res
        return best_r, best_res

    def __call__(self, state) -> Vec:
        r, res = self._nearest(state.ball.center)
        u = self.seq.vector(r)
        nsq = self.seq.norm_sq_of(r)
        rho = state.ball.radius
        if self.reach is not None:
            # ignore the plane if dist = |res|/|u| > reach * rho (on squares)
            bound = self.reach * rho
            if res * res > nsq * bound * bound:
                self.last_note = "concentric (nothing in reach)"
                return state.ball.center
        if res == 0:
            self.last_note = f"on family {r}"
            return state.ball.center
        # step toward the plane: against the residual's sign
        direction = rational_unit_direction(
            scale(u, -1 if res > 0 else 1), self.tol
        )
        step = (1 - state.params.beta) * rho
        self.last_note = f"chasing family {r}"
        return add(state.ball.center, scale(direction, step))


def greedy_black(
    seq: ResonanceSequence,
    reach: Optional[Fraction] = None,
    tol: Fraction = Fraction(1, 2**30),
) -> GreedyBlack:
    return GreedyBlack(seq, reach, tol)


class Scripted:
    """Replay a fixed list of centers (then hold).  Notes ride along so a
    recorded trace can be reproduced byte-for-byte."""

    def __init__(self, centers: Sequence[Sequence], notes: Optional[Sequence[Optional[str]]] = None):
        self.centers = [tuple(rat(c) for c in ctr) for ctr in centers]
        self.notes = list(notes) if notes is not None else None
        self.cursor = 0
        self.last_note: Optional[str] = None

    def __call__(self, state) -> Vec:
        if self.cursor < len(self.centers):
            center = self.centers[self.cursor]
            if self.notes is not None and self.cursor < len(self.notes):
                self.last_note = self.notes[self.cursor]
            self.cursor += 1
            return center
        self.cursor += 1
        return state.ball.center


def scripted(centers: Sequence[Sequence], notes=None) -> Scripted:
    return Scripted(centers, notes)
