"""Ground-truth enumeration and numerical property checkers.

Everything here is an independent oracle: exhaustive search over all
candidate lists, and randomized checkers that probe the defining
inequalities of overlap measures (nonnegativity, unique maximization,
monotone diminishing returns, ordered submodularity) on sampled inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    Instance,
    ItemPositionSet,
    OverlapMeasure,
    Sequence,
    Subdistribution,
    ValidationError,
    _eval_raw,
    eval_overlap,
    fg_set,
    seq_objective,
)

__all__ = [
    "SEARCH_LIMIT",
    "CheckResult",
    "MdrResult",
    "RatioReport",
    "exhaustive_opt",
    "check_overlap_axioms",
    "check_mdr",
    "check_ordered_submodular",
    "ratio_report",
]

SEARCH_LIMIT = 10_000_000
_VIOLATION_TOL = 1e-9


def _candidate_count(n: int, k: int, allow_repeats: bool) -> int:
    if allow_repeats:
        return n ** k
    count = 1
    for r in range(k):
        count *= max(n - r, 0)
    return count


def _element_matrix(inst: Instance, universe: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Rows of genre distributions per universe element, plus the target."""
    genres = sorted(inst.genres)
    gidx = {g: n for n, g in enumerate(genres)}
    M = np.zeros((len(universe), len(genres)))
    for r, elem in enumerate(universe):
        if inst.mode == "discrete" and elem in gidx:
            M[r, gidx[elem]] = 1.0
        else:
            for g, v in inst.item_dist(elem).items():
                M[r, gidx[g]] = v
    p = np.zeros(len(genres))
    for g, v in inst.target.items():
        p[gidx[g]] = v
    return M, p


def exhaustive_opt(
    inst: Instance,
    measure: OverlapMeasure | None = None,
    objective: Callable[[Sequence], float] | None = None,
    allow_repeats: bool | None = None,
) -> tuple[Sequence, float]:
    """Enumerate every candidate list and return the exact maximizer.

    The universe is the genre set in discrete mode (repeats allowed by
    default) and the item catalog otherwise (repeats disallowed by
    default). Ties go to the lexicographically smallest sequence. Raises
    :class:`ValidationError` when the search space exceeds 10^7 lists.
    """
    if (measure is None) == (objective is None):
        raise ValidationError("pass exactly one of measure or objective")
    universe = list(inst.universe())
    k = inst.k
    if allow_repeats is None:
        allow_repeats = inst.mode == "discrete"
    n = len(universe)
    if _candidate_count(n, k, allow_repeats) > SEARCH_LIMIT:
        raise ValidationError("search space too large for exhaustive_opt")
    if not allow_repeats and n < k:
        raise ValidationError("fewer elements than positions without repeats")

    gen = (itertools.product(range(n), repeat=k) if allow_repeats
           else itertools.permutations(range(n), k))

    if objective is None and hasattr(measure, "value_batch"):
        idx = np.fromiter(
            (i for tup in gen for i in tup), dtype=np.int64
        ).reshape(-1, k)
        M, p = _element_matrix(inst, universe)
        w = np.array(inst.weights.w)
        Q = np.zeros((idx.shape[0], M.shape[1]))
        for j in range(k):
            Q += w[j] * M[idx[:, j]]
        vals = measure.value_batch(p, Q)
        best = int(np.argmax(vals))  # first max = lexicographically smallest
        seq = Sequence(tuple(universe[i] for i in idx[best]))
        return seq, float(vals[best])

    fn = objective if objective is not None else (
        lambda s: seq_objective(measure, s, inst))
    best_seq, best_val = None, -math.inf
    for tup in gen:
        seq = Sequence(tuple(universe[i] for i in tup))
        val = fn(seq)
        if val > best_val:
            best_seq, best_val = seq, val
    return best_seq, best_val


@dataclass
class CheckResult:
    passed: bool
    trials: int
    violations: int = 0
    counterexample: dict | None = None

    def __bool__(self) -> bool:
        return self.passed


def _random_subdistribution(rng: np.random.Generator, genres: list[str],
                            full: bool = False, positive: bool = False) -> Subdistribution:
    raw = rng.uniform(0.05 if positive else 0.0, 1.0, size=len(genres))
    raw = raw / raw.sum()
    if not full:
        raw = raw * rng.uniform(0.1, 1.0)
    return Subdistribution(dict(zip(genres, raw)))


def check_overlap_axioms(G: OverlapMeasure, trials: int, seed: int) -> CheckResult:
    """Sample (p, q) pairs; flag negativity or non-unique maximization at p."""
    rng = np.random.default_rng(seed)
    violations = 0
    counterexample = None
    for _ in range(trials):
        genres = [f"g{n + 1}" for n in range(int(rng.integers(2, 7)))]
        p = _random_subdistribution(rng, genres, full=True)
        q = _random_subdistribution(rng, genres)
        self_val = eval_overlap(G, p, p)
        val = eval_overlap(G, p, q)
        if val < 0 or not val < self_val - 1e-12:
            violations += 1
            if counterexample is None:
                counterexample = {
                    "p": dict(p.items()), "q": dict(q.items()),
                    "value": val, "value_at_p": self_val,
                }
    return CheckResult(violations == 0, trials, violations, counterexample)


@dataclass(frozen=True)
class InstanceShape:
    max_genres: int = 4
    max_items: int = 5
    max_k: int = 4
    mode: str = "distributional"


@dataclass
class MdrResult:
    mdr: CheckResult
    smdr: CheckResult

    @property
    def passed(self) -> bool:
        return self.mdr.passed and self.smdr.passed

    def __bool__(self) -> bool:
        return self.passed


def _random_nested_sets(rng: np.random.Generator, ground: list) -> tuple[set, set, tuple]:
    """R ⊆ T and an element e ∉ T, drawn uniformly at random."""
    perm = list(ground)
    rng.shuffle(perm)
    e = perm.pop()
    t_size = int(rng.integers(0, len(perm) + 1))
    T = set(perm[:t_size])
    r_size = int(rng.integers(0, t_size + 1))
    R = set(rng.choice(len(T), size=r_size, replace=False)) if T else set()
    R = {perm[i] for i in R}
    return R, T, e


def check_mdr(G: OverlapMeasure, shape: InstanceShape | None = None,
              trials: int = 1000, seed: int = 42) -> MdrResult:
    """Probe monotonicity and submodularity of the set extension of G.

    The SMDR half additionally finite-difference checks that G itself is
    coordinatewise non-decreasing in q.
    """
    from .repro import GenParams, generate_instances

    shape = shape or InstanceShape()
    rng = np.random.default_rng(seed)
    params = GenParams(max_genres=shape.max_genres, max_items=shape.max_items,
                       max_k=shape.max_k)
    insts = generate_instances(params, shape.mode, seed=seed + 1, n=trials)

    mdr_viol = 0
    mdr_ce = None
    for t in range(trials):
        inst = insts[t]
        ground = [(i, j) for i in inst.item_ids for j in range(1, inst.k + 1)]
        R, T, e = _random_nested_sets(rng, ground)
        fR = fg_set(G, ItemPositionSet(frozenset(R)), inst)
        fT = fg_set(G, ItemPositionSet(frozenset(T)), inst)
        fRe = fg_set(G, ItemPositionSet(frozenset(R | {e})), inst)
        fTe = fg_set(G, ItemPositionSet(frozenset(T | {e})), inst)
        mono_ok = fT >= fR - _VIOLATION_TOL
        sub_ok = (fRe - fR) >= (fTe - fT) - _VIOLATION_TOL
        if not (mono_ok and sub_ok):
            mdr_viol += 1
            if mdr_ce is None:
                mdr_ce = {"R": sorted(R), "T": sorted(T), "e": e,
                          "F(R)": fR, "F(T)": fT,
                          "F(R+e)": fRe, "F(T+e)": fTe}

    smdr_viol = 0
    smdr_ce = None
    delta = 1e-6
    for _ in range(trials):
        genres = [f"g{n + 1}" for n in range(int(rng.integers(2, 7)))]
        p = _random_subdistribution(rng, genres, full=True)
        q = _random_subdistribution(rng, genres)
        g = genres[int(rng.integers(0, len(genres)))]
        bumped = dict(q.items())
        bumped[g] = bumped.get(g, 0.0) + delta
        hi = _eval_raw(G, p, bumped)
        lo = eval_overlap(G, p, q)
        if hi < lo - _VIOLATION_TOL:
            smdr_viol += 1
            if smdr_ce is None:
                smdr_ce = {"p": dict(p.items()), "q": dict(q.items()),
                           "genre": g, "before": lo, "after": hi}

    return MdrResult(
        mdr=CheckResult(mdr_viol == 0, trials, mdr_viol, mdr_ce),
        smdr=CheckResult(smdr_viol == 0, trials, smdr_viol, smdr_ce),
    )


def check_ordered_submodular(
    f: Callable[[Sequence], float],
    universe: list[str],
    k: int,
    trials: int = 1000,
    seed: int = 42,
) -> CheckResult:
    """Probe the sequence inequality on random prefixes and substitutions."""
    rng = np.random.default_rng(seed)
    elems = sorted(universe)
    violations = 0
    counterexample = None
    for _ in range(trials):
        s = [elems[int(r)] for r in rng.integers(0, len(elems), size=k)]
        i = int(rng.integers(1, k + 1))
        s_bar = elems[int(rng.integers(0, len(elems)))]
        prefix = Sequence(tuple(s[:i - 1]))
        lhs = f(Sequence(tuple(s[:i]))) - f(prefix)
        substituted = s[:i - 1] + [s_bar] + s[i:]
        rhs = f(Sequence(tuple(s))) - f(Sequence(tuple(substituted)))
        if lhs < rhs - _VIOLATION_TOL:
            violations += 1
            if counterexample is None:
                counterexample = {"sequence": s, "index": i,
                                  "substitute": s_bar, "lhs": lhs, "rhs": rhs}
    return CheckResult(violations == 0, trials, violations, counterexample)


@dataclass
class RatioReport:
    instances: int
    min_ratio: float
    median_ratio: float
    mean_ratio: float
    worst_instance: dict | None = None

    def as_dict(self) -> dict:
        return {
            "instances": self.instances,
            "min_ratio": self.min_ratio,
            "median_ratio": self.median_ratio,
            "mean_ratio": self.mean_ratio,
            "worst_instance": self.worst_instance,
        }


def ratio_report(
    algorithm: Callable[[Instance], tuple[Sequence, float]],
    measure: OverlapMeasure,
    generator: Callable[[int, int], list[Instance]],
    n: int,
    seed: int = 42,
    allow_repeats: bool | None = None,
) -> RatioReport:
    """Run an algorithm against exhaustive optimum over generated instances.

    ``generator(seed, n)`` must yield validated instances small enough for
    exhaustive search.
    """
    from .io import instance_to_dict

    ratios = []
    worst = None
    for inst in generator(seed, n):
        seq, val = algorithm(inst)
        opt_seq, opt_val = exhaustive_opt(inst, measure=measure,
                                          allow_repeats=allow_repeats)
        ratio = val / opt_val if opt_val > 0 else 1.0
        ratios.append(ratio)
        if worst is None or ratio < worst[0]:
            worst = (ratio, inst, seq, opt_seq)
    arr = np.array(ratios)
    worst_info = {
        "ratio": worst[0],
        "instance": instance_to_dict(worst[1]),
        "algorithm_sequence": list(worst[2].entries),
        "optimal_sequence": list(worst[3].entries),
    }
    return RatioReport(
        instances=n,
        min_ratio=float(arr.min()),
        median_ratio=float(np.median(arr)),
        mean_ratio=float(arr.mean()),
        worst_instance=worst_info,
    )
