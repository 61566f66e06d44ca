"""Matroid machinery for the distributional (1 - 1/e) pipeline.

The ground set is all (item, position) pairs. The partition matroid allows
at most one item per position (lists with repeats); the laminar matroid
caps every position prefix at its length (lists without repeats, after the
set-to-sequence conversion). Optimization runs continuous greedy on a
Monte-Carlo multilinear estimate and rounds the fractional point to a basis
with mean-preserving pairwise swaps, which lose nothing in expectation for
submodular objectives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    Instance,
    ItemPositionSet,
    OverlapMeasure,
    Sequence,
    Subdistribution,
    ValidationError,
    eval_overlap,
    seq_objective,
)

__all__ = [
    "PartitionMatroid",
    "LaminarMatroid",
    "FractionalPoint",
    "is_independent",
    "max_weight_basis",
    "multilinear_estimate",
    "continuous_greedy",
    "pipage_round",
    "set_to_sequence",
    "solve_distributional",
    "solve_with_repeats",
    "fg_function",
    "hatfg_function",
]

Pair = tuple[str, int]
SetFunction = Callable[[frozenset], float]


@dataclass(frozen=True)
class PartitionMatroid:
    """One item per position: |R ∩ {(·, ℓ)}| <= 1 for every ℓ."""

    item_ids: tuple[str, ...]
    k: int

    def ground_set(self) -> list[Pair]:
        return [(i, j) for j in range(1, self.k + 1) for i in sorted(self.item_ids)]

    def basis_size(self) -> int:
        return self.k

    def independent(self, pairs) -> bool:
        counts = [0] * (self.k + 1)
        for i, j in pairs:
            if j < 1 or j > self.k or i not in self.item_ids:
                raise ValidationError(f"pair {(i, j)} outside ground set")
            counts[j] += 1
            if counts[j] > 1:
                return False
        return True


@dataclass(frozen=True)
class LaminarMatroid:
    """Prefix-capacity matroid: |R ∩ {(·, j) : j <= ℓ}| <= ℓ for every ℓ."""

    item_ids: tuple[str, ...]
    k: int

    def ground_set(self) -> list[Pair]:
        return [(i, j) for j in range(1, self.k + 1) for i in sorted(self.item_ids)]

    def basis_size(self) -> int:
        return self.k

    def independent(self, pairs) -> bool:
        counts = [0] * (self.k + 1)
        for i, j in pairs:
            if j < 1 or j > self.k or i not in self.item_ids:
                raise ValidationError(f"pair {(i, j)} outside ground set")
            counts[j] += 1
        running = 0
        for ell in range(1, self.k + 1):
            running += counts[ell]
            if running > ell:
                return False
        return True


Matroid = PartitionMatroid | LaminarMatroid


def is_independent(m: Matroid, R: ItemPositionSet) -> bool:
    return m.independent(R.pairs)


def max_weight_basis(m: Matroid, weights: dict[Pair, float]) -> frozenset:
    """Matroid greedy: scan pairs by decreasing weight, keep what fits."""
    chosen: set[Pair] = set()
    for e in sorted(m.ground_set(), key=lambda e: (-weights.get(e, 0.0), e)):
        if m.independent(chosen | {e}):
            chosen.add(e)
            if len(chosen) == m.basis_size():
                break
    return frozenset(chosen)


@dataclass(frozen=True)
class FractionalPoint:
    """Coordinates in [0,1] per (item, position) pair."""

    x: dict[Pair, float]

    def __post_init__(self):
        for e, v in self.x.items():
            if v < -1e-9 or v > 1 + 1e-9:
                raise ValidationError(f"coordinate {e} = {v} outside [0,1]")

    def in_polytope(self, m: Matroid, tol: float = 1e-9) -> bool:
        if isinstance(m, PartitionMatroid):
            sums = [0.0] * (m.k + 1)
            for (i, j), v in self.x.items():
                sums[j] += v
            return all(s <= 1 + tol for s in sums[1:])
        sums = [0.0] * (m.k + 1)
        for (i, j), v in self.x.items():
            sums[j] += v
        running = 0.0
        for ell in range(1, m.k + 1):
            running += sums[ell]
            if running > ell + tol:
                return False
        return True


def _sample_set(rng: np.random.Generator, pairs: list[Pair], probs: np.ndarray) -> frozenset:
    mask = rng.random(len(pairs)) < probs
    return frozenset(e for e, m_ in zip(pairs, mask) if m_)


def multilinear_estimate(F: SetFunction, x: FractionalPoint, samples: int, seed: int) -> float:
    """Monte-Carlo estimate of E[F(R(x))] with independent pair inclusion."""
    if samples < 1:
        raise ValidationError("samples must be >= 1")
    pairs = sorted(x.x)
    probs = np.array([x.x[e] for e in pairs])
    rng = np.random.default_rng(seed)
    total = 0.0
    for _ in range(samples):
        total += F(_sample_set(rng, pairs, probs))
    return total / samples


def continuous_greedy(
    F: SetFunction,
    m: Matroid,
    steps: int = 100,
    samples: int = 200,
    seed: int = 42,
) -> FractionalPoint:
    """Fractional ascent: T steps of size 1/T toward the best-response basis.

    Per-pair marginal weights are sampled at the current point; the result
    is an average of T bases and therefore lies in the matroid polytope.
    """
    if steps < 1 or samples < 1:
        raise ValidationError("steps and samples must be >= 1")
    rng = np.random.default_rng(seed)
    ground = m.ground_set()
    x = {e: 0.0 for e in ground}
    for _ in range(steps):
        probs = np.array([x[e] for e in ground])
        gains = {e: 0.0 for e in ground}
        for _ in range(samples):
            S = _sample_set(rng, ground, probs)
            base = F(S)
            for e in ground:
                if e in S:
                    continue
                gains[e] += F(S | {e}) - base
        weights = {e: g / samples for e, g in gains.items()}
        basis = max_weight_basis(m, weights)
        for e in basis:
            x[e] += 1.0 / steps
    return FractionalPoint({e: min(v, 1.0) for e, v in x.items()})


def _snap(x: dict[Pair, float], tol: float = 1e-12) -> None:
    for e, v in x.items():
        if abs(v) < tol:
            x[e] = 0.0
        elif abs(v - 1.0) < tol:
            x[e] = 1.0


def _swap_step(x: dict[Pair, float], a: Pair, b: Pair, cap_up: float,
               rng: np.random.Generator) -> None:
    """Mean-preserving random shift between coordinates a and b."""
    up = min(1.0 - x[a], x[b], cap_up)
    down = min(x[a], 1.0 - x[b])
    if up + down <= 0:
        return
    if rng.random() < down / (up + down):
        x[a] += up
        x[b] -= up
    else:
        x[a] -= down
        x[b] += down


def pipage_round(m: Matroid, x: FractionalPoint, F: SetFunction | None,
                 seed: int) -> ItemPositionSet:
    """Round a polytope point to an independent set, lossless in expectation.

    Works by mean-preserving pairwise swaps; the multilinear extension is
    convex along every two-coordinate direction, so expected value never
    decreases for submodular F. The objective is not consulted. Integral
    inputs pass through as their support.
    """
    if not x.in_polytope(m, tol=1e-6):
        raise ValidationError("point outside the matroid polytope")
    vals = {e: min(max(v, 0.0), 1.0) for e, v in x.x.items()}
    _snap(vals)
    rng = np.random.default_rng(seed)
    frac = lambda: [e for e, v in sorted(vals.items()) if 0.0 < v < 1.0]

    # Consolidate within each position column; column sums are unchanged.
    changed = True
    while changed:
        changed = False
        by_col: dict[int, list[Pair]] = {}
        for e in frac():
            by_col.setdefault(e[1], []).append(e)
        for col in sorted(by_col):
            entries = by_col[col]
            if len(entries) >= 2:
                _swap_step(vals, entries[0], entries[1], math.inf, rng)
                _snap(vals)
                changed = True

    if isinstance(m, PartitionMatroid):
        # At most one fractional entry per part; Bernoulli-round each.
        for e in frac():
            vals[e] = 1.0 if rng.random() < vals[e] else 0.0
    else:
        # Chain constraints: pair the two leftmost fractional columns,
        # capping upward moves by the slack of the prefixes in between.
        while True:
            entries = frac()
            if len(entries) < 2:
                break
            a, b = entries[0], entries[1]
            col_sums = [0.0] * (m.k + 1)
            for (i, j), v in vals.items():
                col_sums[j] += v
            prefix = np.cumsum(col_sums)
            cap = min(
                (ell - prefix[ell] for ell in range(a[1], b[1])),
                default=math.inf,
            )
            _swap_step(vals, a, b, cap, rng)
            _snap(vals)
        for e in frac():  # leftover single fractional coordinate
            vals[e] = 1.0 if rng.random() < vals[e] else 0.0
            if vals[e] == 1.0 and not m.independent(
                    {p for p, v in vals.items() if v == 1.0}):
                vals[e] = 0.0

    support = frozenset(e for e, v in vals.items() if v == 1.0)
    if not m.independent(support):
        raise ValidationError("rounded set is not independent")
    return ItemPositionSet(support)


def set_to_sequence(R: ItemPositionSet, inst: Instance,
                    G: OverlapMeasure) -> Sequence:
    """Order a laminar basis into a list at least as good as its set value.

    Items are sorted by their earliest position in R (ties by id); if fewer
    than k distinct items occur, the lexicographically smallest unused items
    pad the tail. Requires an SMDR measure for the value guarantee.
    """
    m = LaminarMatroid(inst.item_ids, inst.k)
    if len(R) != inst.k or not is_independent(m, R):
        raise ValidationError("R is not a basis of the laminar matroid")
    first = R.earliest_positions()
    ordered = sorted(first, key=lambda i: (first[i], i))
    unused = [i for i in sorted(inst.item_ids) if i not in first]
    entries = (ordered + unused)[:inst.k]
    if len(entries) < inst.k:
        raise ValidationError("not enough items to fill the list")
    return Sequence(tuple(entries))


# ---------------------------------------------------------------------------
# Fast set-function closures and end-to-end solvers
# ---------------------------------------------------------------------------


class _ArrayInstance:
    """Numpy view of an instance for tight set-function loops."""

    def __init__(self, inst: Instance, G: OverlapMeasure):
        self.inst = inst
        self.G = G
        self.genres = sorted(inst.genres)
        gidx = {g: n for n, g in enumerate(self.genres)}
        self.p = np.zeros(len(self.genres))
        for g, v in inst.target.items():
            self.p[gidx[g]] = v
        self.items = sorted(inst.item_ids)
        self.iidx = {i: n for n, i in enumerate(self.items)}
        self.q = np.zeros((len(self.items), len(self.genres)))
        for i, d in inst.items:
            for g, v in d.items():
                self.q[self.iidx[i], gidx[g]] = v
        self.w = np.array(inst.weights.w)

    def fg(self, pairs) -> float:
        first: dict[str, int] = {}
        for i, j in pairs:
            if i not in first or j < first[i]:
                first[i] = j
        mix = np.zeros(len(self.p))
        for i, j in first.items():
            mix += self.w[j - 1] * self.q[self.iidx[i]]
        return self.G.value(self.p, mix)

    def hatfg(self, pairs) -> float:
        mix = np.zeros(len(self.p))
        for i, j in pairs:
            mix += self.w[j - 1] * self.q[self.iidx[i]]
        return self.G.value(self.p, mix)


def fg_function(G: OverlapMeasure, inst: Instance) -> SetFunction:
    """Earliest-occurrence set extension as a fast frozenset closure."""
    return _ArrayInstance(inst, G).fg


def hatfg_function(G: OverlapMeasure, inst: Instance) -> SetFunction:
    """Every-occurrence set extension as a fast frozenset closure."""
    return _ArrayInstance(inst, G).hatfg


def solve_distributional(
    inst: Instance,
    G: OverlapMeasure,
    steps: int = 100,
    samples: int = 200,
    seed: int = 42,
) -> tuple[Sequence, float]:
    """Continuous greedy + rounding on the laminar matroid, then sequencing.

    (1 - 1/e)-approximate in expectation for SMDR measures; the returned
    list has no repeated items.
    """
    if inst.mode != "distributional":
        raise ValidationError("solve_distributional requires distributional mode")
    if len(inst.items) < inst.k:
        raise ValidationError("need at least k items for a repeat-free list")
    m = LaminarMatroid(inst.item_ids, inst.k)
    F = fg_function(G, inst)
    x = continuous_greedy(F, m, steps=steps, samples=samples, seed=seed)
    R = pipage_round(m, x, F, seed=seed + 1)
    seq = set_to_sequence(R, inst, G)
    return seq, seq_objective(G, seq, inst)


def solve_with_repeats(
    inst: Instance,
    G: OverlapMeasure,
    steps: int = 100,
    samples: int = 200,
    seed: int = 42,
) -> tuple[Sequence, float]:
    """Continuous greedy + rounding on the partition matroid (repeats allowed)."""
    m = PartitionMatroid(inst.item_ids, inst.k)
    F = hatfg_function(G, inst)
    x = continuous_greedy(F, m, steps=steps, samples=samples, seed=seed)
    R = pipage_round(m, x, F, seed=seed + 1)
    by_pos = {j: i for i, j in R}
    filler = sorted(inst.item_ids)[0]
    seq = Sequence(tuple(by_pos.get(j, filler) for j in range(1, inst.k + 1)))
    return seq, seq_objective(G, seq, inst)
