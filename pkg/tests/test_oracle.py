"""Unit tests for exhaustive search and the randomized property checkers."""

import math

import pytest

from caliblist.core import (
    Sequence,
    ValidationError,
    hellinger_squared,
    power,
    seq_objective,
)
from caliblist.greedy import sequence_objective_fn
from caliblist.oracle import (
    check_mdr,
    check_ordered_submodular,
    check_overlap_axioms,
    exhaustive_opt,
    ratio_report,
)
from caliblist.repro import GenParams, generate_instances, kl_pseudo_measure

from test_core import make_instance
from test_greedy import discrete_instance


class TestExhaustiveOpt:
    def test_vectorized_path_matches_generic_path(self):
        # The fast measure path and the plain python objective path are
        # independent implementations; they must agree exactly.
        G = hellinger_squared()
        insts = generate_instances(GenParams(max_items=4, max_k=3),
                                   "distributional", seed=37, n=25)
        for inst in insts:
            fast_seq, fast_val = exhaustive_opt(inst, measure=G)
            slow_seq, slow_val = exhaustive_opt(
                inst, objective=lambda s: seq_objective(G, s, inst))
            assert fast_seq.entries == slow_seq.entries
            assert fast_val == pytest.approx(slow_val, abs=1e-12)

    def test_discrete_mode_searches_genres_with_repeats(self):
        inst = discrete_instance({"g1": 0.5, "g2": 0.5}, (0.5, 0.3, 0.2))
        seq, val = exhaustive_opt(inst, measure=hellinger_squared())
        assert set(seq.entries) <= {"g1", "g2"}
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_lexicographic_tie_break(self):
        inst = discrete_instance({"g1": 0.5, "g2": 0.5}, (1.0,))
        seq, _ = exhaustive_opt(inst, measure=hellinger_squared())
        assert seq.entries == ("g1",)

    def test_requires_exactly_one_objective(self):
        inst = make_instance()
        with pytest.raises(ValidationError):
            exhaustive_opt(inst)
        with pytest.raises(ValidationError):
            exhaustive_opt(inst, measure=hellinger_squared(),
                           objective=lambda s: 0.0)

    def test_search_limit_enforced(self):
        inst = discrete_instance(
            {f"g{n}": 1 / 30 for n in range(30)},
            tuple([0.2] * 5),
        )
        with pytest.raises(ValidationError, match="too large"):
            exhaustive_opt(inst, measure=hellinger_squared())

    def test_too_few_items_without_repeats(self):
        inst = make_instance()
        small = type(inst)(
            genres=inst.genres, target=inst.target, items=inst.items[:2],
            weights=inst.weights, mode=inst.mode)
        with pytest.raises(ValidationError):
            exhaustive_opt(small, measure=hellinger_squared())

    def test_optimum_dominates_greedy(self):
        G = hellinger_squared()
        insts = generate_instances(GenParams(max_items=5, max_k=3),
                                   "distributional", seed=41, n=25)
        from caliblist.greedy import greedy_sequence
        for inst in insts:
            obj = sequence_objective_fn(G, inst)
            seq, _ = greedy_sequence(obj, list(inst.universe()), inst.k)
            _, opt = exhaustive_opt(inst, measure=G)
            assert opt >= obj(seq) - 1e-12


class TestAxiomChecker:
    def test_genuine_measures_pass(self):
        for G in (hellinger_squared(), power(0.25), power(0.75)):
            assert check_overlap_axioms(G, trials=300, seed=0).passed

    def test_log_heuristic_fails(self):
        # The log-of-mixture heuristic takes negative values, violating
        # nonnegativity on most sampled pairs.
        res = check_overlap_axioms(kl_pseudo_measure(), trials=300, seed=0)
        assert not res.passed
        assert res.counterexample is not None

    def test_result_is_deterministic(self):
        a = check_overlap_axioms(hellinger_squared(), trials=100, seed=5)
        b = check_overlap_axioms(hellinger_squared(), trials=100, seed=5)
        assert (a.passed, a.violations) == (b.passed, b.violations)


class TestMdrChecker:
    def test_hellinger_and_power_pass(self):
        for G in (hellinger_squared(), power(0.3)):
            res = check_mdr(G, trials=200, seed=1)
            assert res.passed
            assert res.mdr.violations == 0
            assert res.smdr.violations == 0

    def test_decreasing_measure_fails_smdr(self):
        from caliblist.core import CustomMeasure
        import numpy as np
        # A measure strictly decreasing in q must trip the coordinatewise
        # monotonicity probe.
        G = CustomMeasure("anti", lambda p, q: float(-np.sum(q)))
        res = check_mdr(G, trials=200, seed=2)
        assert not res.smdr.passed
        assert res.smdr.counterexample is not None


class TestOrderedSubmodularChecker:
    def test_hellinger_objective_passes(self):
        inst = make_instance()
        f = sequence_objective_fn(hellinger_squared(), inst)
        res = check_ordered_submodular(f, list(inst.universe()), inst.k,
                                       trials=300, seed=3)
        assert res.passed

    def test_adjacent_pair_bonus_fails(self):
        # Counting adjacent equal entries is not ordered submodular:
        # substituting the middle of (a, a, a) destroys two pairs while the
        # prefix gain of that slot was only one.
        def f(seq):
            return float(sum(x == y for x, y in zip(seq, seq[1:])))

        res = check_ordered_submodular(f, ["a", "b"], k=3, trials=200, seed=4)
        assert not res.passed
        assert res.counterexample is not None


class TestRatioReport:
    def test_report_statistics_are_consistent(self):
        from caliblist.greedy import greedy_sequence

        G = hellinger_squared()

        def alg(inst):
            obj = sequence_objective_fn(G, inst)
            seq, _ = greedy_sequence(obj, list(inst.universe()), inst.k)
            return seq, obj(seq)

        gen = lambda seed, n: generate_instances(
            GenParams(max_items=5, max_k=3), "distributional", seed, n)
        report = ratio_report(alg, G, gen, n=50, seed=6)
        assert report.instances == 50
        assert report.min_ratio <= report.median_ratio <= 1 + 1e-12
        assert report.min_ratio <= report.mean_ratio
        assert report.worst_instance is not None
        assert report.worst_instance["ratio"] == pytest.approx(
            report.min_ratio, abs=1e-15)
