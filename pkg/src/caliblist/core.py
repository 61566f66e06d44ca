"""Domain types and overlap measures for calibrated list recommendation.

The central objects are genre (sub)distributions, position-weighted item
catalogs, and overlap measures: nonnegative similarity functions on
(distribution, subdistribution) pairs that are uniquely maximized when the
two agree. Lists induce a weighted genre mixture, and the overlap between
that mixture and the user's target distribution is the objective every
algorithm in this package maximizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

TOL = 1e-9

__all__ = [
    "TOL",
    "ValidationError",
    "Subdistribution",
    "PositionWeights",
    "Instance",
    "Sequence",
    "ItemPositionSet",
    "OverlapMeasure",
    "HellingerSquared",
    "PowerOverlap",
    "FDivergenceOverlap",
    "ConcaveOverlap",
    "CustomMeasure",
    "hellinger_squared",
    "power",
    "f_divergence",
    "concave",
    "validate_instance",
    "induced_distribution",
    "eval_overlap",
    "seq_objective",
    "fg_set",
    "hatfg_set",
]


class ValidationError(ValueError):
    """An instance or argument violates a structural invariant."""


@dataclass(frozen=True)
class Subdistribution:
    """Sparse nonnegative genre-weight vector with total mass at most 1.

    Only nonzero entries are stored; an absent genre has weight 0.
    """

    weights: Mapping[str, float]

    def __post_init__(self):
        clean = {}
        for g, v in self.weights.items():
            v = float(v)
            if v < 0:
                raise ValidationError(f"negative mass {v} for genre {g!r}")
            if v > 0:
                clean[g] = v
        total = sum(clean.values())
        if total > 1 + TOL:
            raise ValidationError(f"mass {total} exceeds 1")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def zero(cls) -> "Subdistribution":
        return cls({})

    def get(self, genre: str) -> float:
        return self.weights.get(genre, 0.0)

    def total(self) -> float:
        return sum(self.weights.values())

    def is_full(self) -> bool:
        return abs(self.total() - 1.0) <= TOL

    def support(self) -> frozenset[str]:
        return frozenset(self.weights)

    def items(self):
        return self.weights.items()


@dataclass(frozen=True)
class PositionWeights:
    """Attention weights w_1 >= w_2 >= ... >= w_k >= 0 summing to 1."""

    w: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if not w:
            raise ValidationError("weights must be nonempty")
        if any(v < 0 for v in w):
            raise ValidationError("weights must be nonnegative")
        for a, b in zip(w, w[1:]):
            if a < b - TOL:
                raise ValidationError("weights not weakly decreasing")
        total = sum(w)
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(f"weights sum to {total}, expected 1")
        if abs(total - 1.0) > TOL:
            w = tuple(v / total for v in w)
        object.__setattr__(self, "w", w)

    @property
    def k(self) -> int:
        return len(self.w)

    def __getitem__(self, position: int) -> float:
        """Weight at 1-based position; 0 beyond the list length."""
        if position < 1:
            raise IndexError(position)
        return self.w[position - 1] if position <= len(self.w) else 0.0


@dataclass(frozen=True)
class Instance:
    """An item catalog, target genre distribution, and position weights.

    In ``discrete`` mode each item is a point mass on one genre and the
    optimization universe is the genre set itself; in ``distributional``
    mode items carry arbitrary genre mixtures and the universe is the
    item catalog.
    """

    genres: tuple[str, ...]
    target: Subdistribution
    items: tuple[tuple[str, Subdistribution], ...]
    weights: PositionWeights
    mode: str = "distributional"

    @property
    def k(self) -> int:
        return self.weights.k

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(i for i, _ in self.items)

    def item_dist(self, item_id: str) -> Subdistribution:
        for i, d in self.items:
            if i == item_id:
                return d
        raise KeyError(item_id)

    def universe(self) -> tuple[str, ...]:
        """Sorted element universe: genres in discrete mode, items otherwise."""
        if self.mode == "discrete":
            return tuple(sorted(self.genres))
        return tuple(sorted(self.item_ids))


@dataclass(frozen=True)
class Sequence:
    """An ordered recommendation list of item ids (or genre ids)."""

    entries: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, idx):
        return self.entries[idx]

    def append(self, element: str) -> "Sequence":
        return Sequence(self.entries + (element,))


@dataclass(frozen=True)
class ItemPositionSet:
    """A subset of (item-id, position) pairs, positions 1-based."""

    pairs: frozenset[tuple[str, int]]

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        for _, j in self.pairs:
            if not isinstance(j, int) or j < 1:
                raise ValidationError(f"bad position {j}")

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def add(self, pair: tuple[str, int]) -> "ItemPositionSet":
        return ItemPositionSet(self.pairs | {pair})

    def earliest_positions(self) -> dict[str, int]:
        """Earliest position of each item appearing in the set."""
        first: dict[str, int] = {}
        for i, j in self.pairs:
            if i not in first or j < first[i]:
                first[i] = j
        return first


# ---------------------------------------------------------------------------
# Overlap measures
# ---------------------------------------------------------------------------


class OverlapMeasure:
    """A similarity on (distribution p, subdistribution q) pairs.

    Subclasses implement :meth:`value` on aligned numpy arrays; evaluation
    runs over the union of the two supports.
    """

    name: str = "overlap"

    def value(self, p: np.ndarray, q: np.ndarray) -> float:
        raise NotImplementedError

    def value_batch(self, p: np.ndarray, Q: np.ndarray) -> np.ndarray:
        """Evaluate against each row of ``Q``. Default is a python loop."""
        return np.array([self.value(p, q) for q in Q])

    def evaluate(self, p: Subdistribution, q: Subdistribution) -> float:
        genres = sorted(p.support() | q.support())
        pa = np.array([p.get(g) for g in genres])
        qa = np.array([q.get(g) for g in genres])
        return float(self.value(pa, qa))

    def params(self) -> dict:
        return {}

    def describe(self) -> str:
        ps = self.params()
        if not ps:
            return self.name
        return self.name + ":" + ",".join(f"{v}" for v in ps.values())


class HellingerSquared(OverlapMeasure):
    """Sum of sqrt(p(x) q(x)); maximum value 1, attained only at q = p."""

    name = "hellinger"

    def value(self, p, q):
        return float(np.sum(np.sqrt(p * q)))

    def value_batch(self, p, Q):
        return np.sqrt(np.clip(Q, 0.0, None)) @ np.sqrt(p)


class PowerOverlap(OverlapMeasure):
    """Sum of p(x)^(1-beta) q(x)^beta for beta in (0, 1)."""

    name = "power"

    def __init__(self, beta: float):
        if not 0 < beta < 1:
            raise ValidationError(f"beta must lie in (0,1), got {beta}")
        self.beta = float(beta)

    def value(self, p, q):
        b = self.beta
        return float(np.sum(p ** (1 - b) * np.clip(q, 0.0, None) ** b))

    def value_batch(self, p, Q):
        b = self.beta
        return np.clip(Q, 0.0, None) ** b @ p ** (1 - b)

    def params(self):
        return {"beta": self.beta}


class FDivergenceOverlap(OverlapMeasure):
    """d* minus the f-divergence sum f(p(x)/q(x)) q(x).

    The q(x) -> 0+ termwise limit is p(x) * lim f(t)/t; generators whose
    limit diverges produce an unbounded divergence and are rejected.
    """

    name = "f-divergence"

    def __init__(self, f: Callable[[float], float], d_star: float):
        self.f = f
        self.d_star = float(d_star)
        s1 = f(1e8) / 1e8
        s2 = f(1e14) / 1e14
        if not (math.isfinite(s2) and abs(s2 - s1) <= 1e-4 * (1 + abs(s2))):
            raise ValidationError("f(t)/t diverges; divergence is unbounded")
        self._slope = s2

    def value(self, p, q):
        total = 0.0
        for pi, qi in zip(p, q):
            if qi > 0:
                total += self.f(pi / qi) * qi
            elif pi > 0:
                total += pi * self._slope
        return self.d_star - total

    def params(self):
        return {"d_star": self.d_star}


class ConcaveOverlap(OverlapMeasure):
    """Sum of h(q(x)) / h'(p(x)) for a nonnegative non-decreasing concave h."""

    name = "concave"

    def __init__(self, h: Callable[[float], float], h_prime: Callable[[float], float]):
        for x in (0.25, 0.5, 1.0):
            if h(x) < 0:
                raise ValidationError("h must be nonnegative")
            if h_prime(x) <= 0:
                raise ValidationError("h' must be positive on (0,1]")
        self.h = h
        self.h_prime = h_prime

    def value(self, p, q):
        total = 0.0
        for pi, qi in zip(p, q):
            hp = self.h_prime(pi) if pi > 0 else math.inf
            if math.isinf(hp):
                continue
            total += self.h(max(qi, 0.0)) / hp
        return total


class CustomMeasure(OverlapMeasure):
    """Arbitrary array-valued similarity; used for demos and negative tests."""

    def __init__(self, name: str, fn: Callable[[np.ndarray, np.ndarray], float]):
        self.name = name
        self._fn = fn

    def value(self, p, q):
        return float(self._fn(p, q))


def hellinger_squared() -> HellingerSquared:
    return HellingerSquared()


def power(beta: float) -> PowerOverlap:
    return PowerOverlap(beta)


def f_divergence(f: Callable[[float], float], d_star: float) -> FDivergenceOverlap:
    return FDivergenceOverlap(f, d_star)


def concave(h: Callable[[float], float], h_prime: Callable[[float], float]) -> ConcaveOverlap:
    return ConcaveOverlap(h, h_prime)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def validate_instance(inst: Instance) -> Instance:
    """Check all structural invariants, returning the instance unchanged.

    Raises :class:`ValidationError` describing the first violation found.
    """
    genre_set = set(inst.genres)
    if len(genre_set) != len(inst.genres):
        raise ValidationError("duplicate genre ids")
    if not inst.target.is_full():
        raise ValidationError(f"target mass {inst.target.total()} != 1")
    if not inst.target.support() <= genre_set:
        raise ValidationError("target uses undeclared genres")
    seen = set()
    for item_id, dist in inst.items:
        if item_id in seen:
            raise ValidationError(f"duplicate item id {item_id!r}")
        seen.add(item_id)
        if not dist.support() <= genre_set:
            raise ValidationError(f"item {item_id!r} uses undeclared genres")
        if not dist.is_full():
            raise ValidationError(
                f"item {item_id!r} mass {dist.total()} != 1")
        if inst.mode == "discrete":
            if len(dist.weights) != 1 or abs(dist.total() - 1.0) > TOL:
                raise ValidationError(
                    f"item {item_id!r} is not a point mass in discrete mode")
    if inst.mode not in ("distributional", "discrete"):
        raise ValidationError(f"unknown mode {inst.mode!r}")
    return inst


def induced_distribution(seq: Sequence, inst: Instance) -> Subdistribution:
    """Weighted genre mixture of a (possibly partial) list.

    Position j contributes w_j times the distribution of the element at j.
    Genre-id entries (discrete mode) count as point masses.
    """
    if len(seq) > inst.k:
        raise ValidationError(f"sequence longer than k={inst.k}")
    genre_set = set(inst.genres)
    out: dict[str, float] = {}
    for j, elem in enumerate(seq, start=1):
        wj = inst.weights[j]
        if elem in genre_set and inst.mode == "discrete":
            out[elem] = out.get(elem, 0.0) + wj
            continue
        dist = inst.item_dist(elem)
        for g, v in dist.items():
            out[g] = out.get(g, 0.0) + wj * v
    return Subdistribution(out)


def eval_overlap(G: OverlapMeasure, p: Subdistribution, q: Subdistribution) -> float:
    return G.evaluate(p, q)


def seq_objective(G: OverlapMeasure, seq: Sequence, inst: Instance) -> float:
    """Overlap between the target and the list's induced distribution."""
    return eval_overlap(G, inst.target, induced_distribution(seq, inst))


def _mixture(inst: Instance, contributions: Iterable[tuple[str, float]]) -> dict[str, float]:
    out: dict[str, float] = {}
    for item_id, weight in contributions:
        if weight == 0.0:
            continue
        for g, v in inst.item_dist(item_id).items():
            out[g] = out.get(g, 0.0) + weight * v
    return out


def _eval_raw(G: OverlapMeasure, p: Subdistribution, q: Mapping[str, float]) -> float:
    """Evaluate a measure against a raw nonnegative vector.

    Set extensions can accumulate total mass above 1 (several items may
    share an early position), so no subdistribution cap applies here.
    """
    genres = sorted(p.support() | set(q))
    pa = np.array([p.get(g) for g in genres])
    qa = np.array([q.get(g, 0.0) for g in genres])
    return float(G.value(pa, qa))


def fg_set(G: OverlapMeasure, R: ItemPositionSet, inst: Instance) -> float:
    """Set extension where each item contributes at its earliest position only."""
    _check_pairs(R, inst)
    first = R.earliest_positions()
    q = _mixture(inst, ((i, inst.weights[j]) for i, j in first.items()))
    return _eval_raw(G, inst.target, q)


def hatfg_set(G: OverlapMeasure, R: ItemPositionSet, inst: Instance) -> float:
    """Set extension where every (item, position) occurrence contributes."""
    _check_pairs(R, inst)
    q = _mixture(inst, ((i, inst.weights[j]) for i, j in R))
    return _eval_raw(G, inst.target, q)


def _check_pairs(R: ItemPositionSet, inst: Instance) -> None:
    ids = set(inst.item_ids)
    for i, j in R:
        if i not in ids:
            raise ValidationError(f"unknown item {i!r}")
        if j > inst.k:
            raise ValidationError(f"position {j} exceeds k={inst.k}")
