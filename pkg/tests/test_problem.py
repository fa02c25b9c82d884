import numpy as np
import pytest

from algcon.graph import GraphError, WeightedGraph, build_graph
from algcon.problem import CheegerMode, ProblemSpec, Variant

from conftest import complete_graph


def path(n):
    return build_graph(n, [(k, k + 1, 1.0) for k in range(n - 1)])


class TestCheegerMode:
    @pytest.mark.parametrize("text, kind, alpha", [
        ("off", "off", 1.0), ("safe", "safe", 1.0), ("scaled=0.5", "scaled", 0.5),
        ("scaled", "scaled", 1.0),
    ])
    def test_parse(self, text, kind, alpha):
        mode = CheegerMode.parse(text)
        assert (mode.kind, mode.alpha) == (kind, alpha)
        assert CheegerMode.parse(str(mode)) == mode

    def test_flags(self):
        assert not CheegerMode("off").enabled
        assert CheegerMode("safe").enabled and not CheegerMode("safe").aggressive
        assert CheegerMode("scaled", 0.3).aggressive

    @pytest.mark.parametrize("text", ["on", "scaled=0", "scaled=1.5"])
    def test_rejects(self, text):
        with pytest.raises(ValueError):
            CheegerMode.parse(text)


class TestSpanningTree:
    def test_budget_is_n_minus_1(self):
        spec = ProblemSpec.spanning_tree(complete_graph(5))
        assert spec.budget == 4 and spec.is_tree
        assert spec.union is spec.candidates

    def test_wrong_budget(self):
        with pytest.raises(ValueError, match="n-1"):
            ProblemSpec(complete_graph(4), Variant.SPANNING_TREE, budget=2)

    def test_feasibility(self):
        spec = ProblemSpec.spanning_tree(complete_graph(4))
        # pairs: 01 02 03 12 13 23
        assert spec.is_feasible([1, 1, 1, 0, 0, 0])
        assert not spec.is_feasible([1, 1, 0, 1, 0, 0])  # triangle 0-1-2
        assert not spec.is_feasible([1, 1, 0, 0, 0, 0])
        with pytest.raises(GraphError, match="infeasible"):
            spec.check_feasible([1, 1, 1, 1, 0, 0])

    def test_lambda2_of_star(self):
        spec = ProblemSpec.spanning_tree(complete_graph(5))
        x = np.array([1.0 if i == 0 else 0.0 for i, _, _ in spec.candidates.edges])
        assert spec.lambda2(x) == pytest.approx(1.0)

    def test_rejects_base(self):
        with pytest.raises(ValueError, match="no base"):
            ProblemSpec(complete_graph(3), Variant.SPANNING_TREE, base=path(3))

    def test_bad_eps(self):
        with pytest.raises(ValueError):
            ProblemSpec.spanning_tree(complete_graph(3), eps_opt=0)


class TestAugmentation:
    def spec(self, q=1):
        cand = build_graph(4, [(0, 2, 1.0), (0, 3, 2.0), (1, 3, 1.0)])
        return ProblemSpec.augmentation(path(4), cand, q)

    def test_union(self):
        spec = self.spec()
        assert spec.union.m == 6
        assert list(spec.base_mask) == [True, False, False, True, False, True]
        assert spec.selected_pairs([0, 1, 0]) == [(0, 3)]

    def test_union_round_trip(self):
        spec = self.spec()
        x = np.array([1.0, 0.0, 1.0])
        y = spec.to_union(x)
        assert y.sum() == 5
        assert np.array_equal(spec.from_union(y), x)

    def test_cycle_lambda2(self):
        # path plus (0,3) weight 2 vs the path alone
        spec = self.spec()
        assert spec.lambda2([0, 0, 0]) == pytest.approx(2 - np.sqrt(2))
        assert spec.lambda2([0, 1, 0]) > spec.lambda2([0, 0, 0])

    def test_budget(self):
        spec = self.spec(q=1)
        assert spec.is_feasible([1, 0, 0])
        assert not spec.is_feasible([1, 1, 0])

    def test_default_budget_is_all(self):
        cand = build_graph(4, [(0, 2, 1.0)])
        assert ProblemSpec.augmentation(path(4), cand, None).budget == 1

    def test_zero_budget_only_without_candidates(self):
        spec = ProblemSpec.augmentation(path(3), WeightedGraph(3), 0)
        assert spec.budget == 0
        with pytest.raises(ValueError, match=">= 1"):
            ProblemSpec.augmentation(path(3), build_graph(3, [(0, 2, 1.0)]), 0)

    def test_overlap(self):
        with pytest.raises(ValueError, match="overlap"):
            ProblemSpec.augmentation(path(3), build_graph(3, [(0, 1, 1.0)]), 1)

    def test_disconnected_base(self):
        base = build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(ValueError, match="connected base"):
            ProblemSpec.augmentation(base, build_graph(4, [(1, 2, 1.0)]), 1)

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="vertices"):
            ProblemSpec.augmentation(path(3), build_graph(4, [(0, 3, 1.0)]), 1)

    def test_describe(self):
        d = self.spec(2).describe()
        assert d == {"variant": "augmentation", "n": 4, "candidates": 3, "base_edges": 3,
                     "budget": 2, "cheeger_mode": "off", "eps_opt": 1e-4, "max_iter": 10_000,
                     "time_limit": float("inf")}
