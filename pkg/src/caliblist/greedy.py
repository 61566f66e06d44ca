"""Greedy list construction.

Two variants: a generic sequence greedy that repeatedly appends the element
with the largest marginal objective gain (1/2-approximate for
ordered-submodular objectives), and a specialized discrete-genre greedy that
packs position weight into genre bins using closed-form square-root gains
(2/3-approximate under the squared-Hellinger overlap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .core import (
    Instance,
    OverlapMeasure,
    PositionWeights,
    Sequence,
    ValidationError,
    seq_objective,
)

__all__ = [
    "GreedyStep",
    "GreedyTrace",
    "GenreLoad",
    "greedy_sequence",
    "discrete_greedy",
    "discrete_objective",
    "best_length_solve",
    "sequence_objective_fn",
]


@dataclass(frozen=True)
class GreedyStep:
    position: int
    chosen: str
    gain: float
    runner_up: str | None
    runner_up_gain: float


@dataclass
class GreedyTrace:
    steps: list[GreedyStep] = field(default_factory=list)

    def record(self, step: GreedyStep) -> None:
        if not math.isfinite(step.gain):
            raise ValidationError("non-finite greedy gain")
        if step.runner_up is not None and step.gain < step.runner_up_gain:
            raise ValidationError("chosen gain below runner-up gain")
        self.steps.append(step)

    @property
    def gains(self) -> list[float]:
        return [s.gain for s in self.steps]


@dataclass
class GenreLoad:
    """Accumulated position weight assigned to each genre so far."""

    alpha: dict[str, float] = field(default_factory=dict)

    def get(self, genre: str) -> float:
        return self.alpha.get(genre, 0.0)

    def add(self, genre: str, weight: float) -> None:
        self.alpha[genre] = self.alpha.get(genre, 0.0) + weight

    def total(self) -> float:
        return sum(self.alpha.values())


def sequence_objective_fn(G: OverlapMeasure, inst: Instance) -> Callable[[Sequence], float]:
    """Wrap ``seq_objective`` as a single-argument objective."""
    return lambda seq: seq_objective(G, seq, inst)


def greedy_sequence(
    objective: Callable[[Sequence], float],
    universe: list[str],
    k: int,
    allow_repeats: bool = False,
) -> tuple[Sequence, GreedyTrace]:
    """Build a length-k sequence by repeated best-marginal-gain appends.

    Ties break toward the lexicographically smallest element. Raises
    :class:`ValidationError` if the universe runs out before k picks when
    repeats are disallowed.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    if not universe:
        raise ValidationError("empty universe")
    elements = sorted(universe)
    seq = Sequence()
    trace = GreedyTrace()
    current = objective(seq)
    for pos in range(1, k + 1):
        candidates = elements if allow_repeats else [
            e for e in elements if e not in seq.entries]
        if not candidates:
            raise ValidationError(f"universe exhausted at position {pos}")
        best = runner = None
        best_val = runner_val = -math.inf
        for e in candidates:
            val = objective(seq.append(e))
            if val > best_val:
                runner, runner_val = best, best_val
                best, best_val = e, val
            elif val > runner_val:
                runner, runner_val = e, val
        # Objectives may use -inf as an "undefined on this prefix" sentinel
        # (e.g. log-of-mixture scores on the empty list); gains are then
        # reported relative to zero.
        base = current if math.isfinite(current) else 0.0
        trace.record(GreedyStep(pos, best, best_val - base,
                                runner, runner_val - base if runner else -math.inf))
        seq = seq.append(best)
        current = best_val
    return seq, trace


def discrete_objective(inst: Instance) -> Callable[[Sequence], float]:
    """Squared-Hellinger objective on genre sequences in closed form.

    The value depends only on the total position weight packed into each
    genre: sum over genres of sqrt(p(g)) * sqrt(assigned weight).
    """
    p = inst.target

    def value(seq: Sequence) -> float:
        load: dict[str, float] = {}
        for j, g in enumerate(seq, start=1):
            load[g] = load.get(g, 0.0) + inst.weights[j]
        return sum(math.sqrt(p.get(g) * a) for g, a in load.items())

    return value


def discrete_greedy(inst: Instance) -> tuple[Sequence, GreedyTrace]:
    """Slot-by-slot genre assignment with closed-form marginal gains.

    At slot i the gain of genre g is sqrt(p(g)) * (sqrt(alpha(g) + w_i) -
    sqrt(alpha(g))); ties break toward the smaller genre id. Items are
    assumed available in unlimited supply per genre.
    """
    if inst.mode != "discrete":
        raise ValidationError("discrete_greedy requires a discrete-mode instance")
    genres = sorted(inst.genres)
    if not genres:
        raise ValidationError("empty genre set")
    p = inst.target
    load = GenreLoad()
    seq = Sequence()
    trace = GreedyTrace()
    for pos in range(1, inst.k + 1):
        w = inst.weights[pos]
        best = runner = None
        best_gain = runner_gain = -math.inf
        for g in genres:
            a = load.get(g)
            gain = math.sqrt(p.get(g)) * (math.sqrt(a + w) - math.sqrt(a))
            if gain > best_gain:
                runner, runner_gain = best, best_gain
                best, best_gain = g, gain
            elif gain > runner_gain:
                runner, runner_gain = g, gain
        trace.record(GreedyStep(pos, best, best_gain, runner, runner_gain))
        load.add(best, w)
        seq = seq.append(best)
    return seq, trace


def truncate_instance(inst: Instance, length: int) -> Instance:
    """Restrict to the first ``length`` positions, renormalizing the weights."""
    if not 1 <= length <= inst.k:
        raise ValidationError(f"length {length} outside [1, {inst.k}]")
    w = inst.weights.w[:length]
    total = sum(w)
    return Instance(
        genres=inst.genres,
        target=inst.target,
        items=inst.items,
        weights=PositionWeights(tuple(v / total for v in w)),
        mode=inst.mode,
    )


def best_length_solve(
    inst: Instance,
    solver: Callable[[Instance], tuple[Sequence, float]],
) -> tuple[int, Sequence, float]:
    """Solve at every candidate length 1..k and keep the best result.

    For each length the leading weights are renormalized to sum to 1.
    Ties prefer the smallest length.
    """
    best: tuple[int, Sequence, float] | None = None
    for length in range(1, inst.k + 1):
        seq, value = solver(truncate_instance(inst, length))
        if best is None or value > best[2]:
            best = (length, seq, value)
    return best
