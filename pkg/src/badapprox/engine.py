"""Two-player nested-ball game engine.

Black owns the outer ball; White replies inside it with radius alpha*rho,
Black replies inside that with radius beta*rho_white, and so on.  The engine
owns the radii entirely — policies propose centers only — and every
containment check is exact rational arithmetic.  A policy is any callable
``state -> center``; if it exposes a ``last_note`` attribute after the call,
the note is recorded on the move.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .exact import rat, rat_str
from .geometry import Ball, Vec, rat_vec


class IllegalMove(Exception):
    """A policy proposed a center whose forced ball leaves the current ball."""

    def __init__(self, player: str, move_index: int, center: Vec, reason: str):
        self.player = player
        self.move_index = move_index
        self.center = center
        self.reason = reason
        super().__init__(f"illegal move by {player} at move {move_index}: {reason}")


@dataclass(frozen=True)
class GameParams:
    alpha: Fraction
    beta: Fraction
    dimension: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", rat(self.alpha))
        object.__setattr__(self, "beta", rat(self.beta))
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0,1), got {self.alpha}")
        if not 0 < self.beta < 1:
            raise ValueError(f"beta must lie in (0,1), got {self.beta}")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def to_jsonable(self) -> dict:
        return {
            "alpha": rat_str(self.alpha),
            "beta": rat_str(self.beta),
            "dimension": self.dimension,
        }

    @classmethod
    def from_jsonable(cls, obj: dict) -> "GameParams":
        return cls(rat(obj["alpha"]), rat(obj["beta"]), int(obj["dimension"]))


@dataclass(frozen=True)
class GameState:
    """What a policy sees: the ball it must reply inside, and whose turn it is."""

    params: GameParams
    ball: Ball
    move_index: int  # 0-based, counts half-moves (W, B, W, B, ...)
    turn: str  # "W" or "B"


@dataclass(frozen=True)
class MoveRecord:
    player: str
    ball: Ball
    note: Optional[str] = None

    def to_jsonable(self) -> dict:
        obj = {"player": self.player}
        obj.update(self.ball.to_jsonable())
        obj["note"] = self.note
        return obj

    @classmethod
    def from_jsonable(cls, obj: dict) -> "MoveRecord":
        return cls(obj["player"], Ball.from_jsonable(obj), obj.get("note"))


@dataclass
class GameTrace:
    params: GameParams
    initial: Ball
    moves: list[MoveRecord] = field(default_factory=list)

    @property
    def final_ball(self) -> Ball:
        return self.moves[-1].ball if self.moves else self.initial

    def to_jsonable(self) -> dict:
        return {
            "params": self.params.to_jsonable(),
            "initial": self.initial.to_jsonable(),
            "moves": [m.to_jsonable() for m in self.moves],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, sort_keys=True)

    @classmethod
    def from_jsonable(cls, obj: dict) -> "GameTrace":
        return cls(
            GameParams.from_jsonable(obj["params"]),
            Ball.from_jsonable(obj["initial"]),
            [MoveRecord.from_jsonable(m) for m in obj["moves"]],
        )

    @classmethod
    def loads(cls, text: str) -> "GameTrace":
        return cls.from_jsonable(json.loads(text))


def limit_enclosure(trace: GameTrace) -> Ball:
    """The last (hence smallest) ball of the trace; every later point of the
    alternation, and the limit point, lies inside it."""
    return trace.final_ball


def forced_radius(params: GameParams, current: Ball, turn: str) -> Fraction:
    return (params.alpha if turn == "W" else params.beta) * current.radius


def legal_reply(params: GameParams, current: Ball, turn: str, center: Sequence) -> Ball:
    """Build the forced-radius reply ball, or raise IllegalMove via caller."""
    c = rat_vec(center)
    if len(c) != current.dimension:
        raise ValueError(f"center has dimension {len(c)}, expected {current.dimension}")
    return Ball(c, forced_radius(params, current, turn))


Policy = Callable[[GameState], Sequence]


def _take_note(policy: Policy) -> Optional[str]:
    note = getattr(policy, "last_note", None)
    if note is not None:
        try:
            policy.last_note = None  # type: ignore[attr-defined]
        except AttributeError:
            pass
    return note


def run_game(
    params: GameParams,
    initial: Ball,
    white: Policy,
    black: Policy,
    rounds: int,
) -> GameTrace:
    """Play `rounds` full rounds (White then Black) from the initial ball.

    Raises IllegalMove as soon as a policy proposes a center whose forced
    ball is not contained in the current ball.  Nothing is clamped.
    """
    if initial.dimension != params.dimension:
        raise ValueError("initial ball dimension does not match params")
    trace = GameTrace(params, initial)
    current = initial
    move_index = 0
    for _ in range(rounds):
        for turn, policy in (("W", white), ("B", black)):
            state = GameState(params, current, move_index, turn)
            center = policy(state)
            reply = legal_reply(params, current, turn, center)
            if not current.contains_ball(reply):
                raise IllegalMove(turn, move_index, reply.center, "reply ball leaves current ball")
            trace.moves.append(MoveRecord(turn, reply, _take_note(policy)))
            current = reply
            move_index += 1
    return trace


def concentric(state: GameState) -> Vec:
    """The lazy policy: keep the current center."""
    return state.ball.center


def replay(trace: GameTrace) -> GameTrace:
    """Re-run a trace through the engine, re-checking every containment.

    Returns a freshly constructed trace (equal to the input iff the input is
    legal and internally consistent, including the radius law).
    """
    params = trace.params
    current = trace.initial
    out = GameTrace(params, trace.initial)
    expected_turn = "W"
    for i, mv in enumerate(trace.moves):
        if mv.player != expected_turn:
            raise IllegalMove(mv.player, i, mv.ball.center, "out-of-turn move")
        rebuilt = legal_reply(params, current, mv.player, mv.ball.center)
        if rebuilt.radius != mv.ball.radius:
            raise IllegalMove(mv.player, i, mv.ball.center, "radius law violated")
        if not current.contains_ball(rebuilt):
            raise IllegalMove(mv.player, i, mv.ball.center, "reply ball leaves current ball")
        out.moves.append(MoveRecord(mv.player, rebuilt, mv.note))
        current = rebuilt
        expected_turn = "B" if expected_turn == "W" else "W"
    return out
