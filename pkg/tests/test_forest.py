import numpy as np
import pytest

from dendrofit import ScoredEdge, build_forest_suzuki, build_tree_chow_liu
from dendrofit.errors import EmptyEdgeList
from dendrofit.forest import UnionFind, kruskal_decisions
from dendrofit.oracle import brute_force_best_forest, brute_force_best_total

from conftest import complete_random_edges, edges_from_weights

# the worked four-variable instance: descending mutual informations
# 12, 10, 8, 6, 4, 2 on pairs (0,1), (0,2), (1,2), (0,3), (1,3), (2,3)
TABLE1 = {(0, 1): 12.0, (0, 2): 10.0, (1, 2): 8.0, (0, 3): 6.0, (1, 3): 4.0, (2, 3): 2.0}
# the same mutual informations after the d_n = 2 penalties of the
# (5, 2, 3, 4)-cardinality schema
TABLE2_J = {(0, 1): 8.0, (0, 2): 2.0, (1, 2): 6.0, (0, 3): -6.0, (1, 3): 1.0, (2, 3): -4.0}


def table2_edges() -> list[ScoredEdge]:
    return [
        ScoredEdge(i, j, mi=TABLE1[(i, j)], penalty=TABLE1[(i, j)] - J, score=J)
        for (i, j), J in sorted(TABLE2_J.items())
    ]


class TestUnionFind:
    def test_components_merge_once(self):
        uf = UnionFind(4)
        assert uf.union(0, 1)
        assert not uf.union(1, 0)
        assert uf.union(2, 3)
        assert uf.union(0, 3)
        assert not uf.union(1, 2)

    def test_find_idempotent(self):
        uf = UnionFind(5)
        uf.union(0, 1)
        uf.union(1, 2)
        root = uf.find(2)
        assert uf.find(2) == root == uf.find(0)


class TestChowLiu:
    def test_table1_structure(self):
        tree = build_tree_chow_liu(edges_from_weights(TABLE1))
        assert tree.sorted_edges == ((0, 1), (0, 2), (0, 3))

    def test_table1_rejects_the_loop_closer(self):
        decisions = kruskal_decisions(edges_from_weights(TABLE1), penalized=False)
        by_pair = {(d.edge.i, d.edge.j): d for d in decisions}
        assert by_pair[(1, 2)].accepted is False
        assert by_pair[(1, 2)].reason == "loop"
        assert [
            (d.edge.i, d.edge.j) for d in decisions if d.accepted
        ] == [(0, 1), (0, 2), (0, 3)]

    def test_two_vertices(self):
        tree = build_tree_chow_liu(edges_from_weights({(0, 1): 1.0}))
        assert tree.sorted_edges == ((0, 1),)

    def test_empty_edges(self):
        with pytest.raises(EmptyEdgeList):
            build_tree_chow_liu([])

    def test_ties_break_lexicographically(self):
        tree = build_tree_chow_liu(
            edges_from_weights({(i, j): 5.0 for i in range(4) for j in range(i + 1, 4)})
        )
        assert tree.sorted_edges == ((0, 1), (0, 2), (0, 3))

    def test_infinite_weight_sorts_first(self):
        weights = {(0, 1): 1.0, (0, 2): 2.0, (1, 2): float("inf")}
        tree = build_tree_chow_liu(edges_from_weights(weights))
        assert (1, 2) in tree.edges

    def test_matches_exhaustive_spanning_optimum(self):
        rng = np.random.default_rng(12)
        for _ in range(60):
            n = int(rng.integers(3, 7))
            edges = complete_random_edges(rng, n)
            greedy = build_tree_chow_liu(edges)
            total = sum(
                next(e.mi for e in edges if (e.i, e.j) == pair)
                for pair in greedy.sorted_edges
            )
            best = brute_force_best_total(edges, require_spanning_tree=True)
            assert total == pytest.approx(best, rel=1e-12)


class TestSuzuki:
    def test_table2_structure(self):
        forest = build_forest_suzuki(table2_edges())
        assert forest.sorted_edges == ((0, 1), (1, 2), (1, 3))

    def test_table2_decision_reasons(self):
        decisions = kruskal_decisions(table2_edges(), penalized=True)
        by_pair = {(d.edge.i, d.edge.j): d for d in decisions}
        assert by_pair[(0, 2)].reason == "loop"
        assert by_pair[(0, 3)].reason == "negative"
        assert by_pair[(2, 3)].reason == "negative"
        assert [p for p, d in sorted(by_pair.items()) if d.accepted] == [
            (0, 1),
            (1, 2),
            (1, 3),
        ]

    def test_all_negative_scores_give_empty_forest(self):
        edges = [ScoredEdge(0, 1, 1.0, 5.0, -4.0), ScoredEdge(0, 2, 2.0, 9.0, -7.0)]
        forest = build_forest_suzuki(edges)
        assert forest.edges == frozenset()

    def test_zero_score_admitted(self):
        edges = [ScoredEdge(0, 1, 2.0, 2.0, 0.0)]
        forest = build_forest_suzuki(edges)
        assert forest.sorted_edges == ((0, 1),)

    def test_equals_chow_liu_when_unpenalized(self):
        rng = np.random.default_rng(21)
        for _ in range(40):
            n = int(rng.integers(3, 7))
            edges = complete_random_edges(rng, n, lo=0.01)
            assert build_forest_suzuki(edges) == build_tree_chow_liu(edges)

    def test_matches_exhaustive_forest_optimum(self):
        rng = np.random.default_rng(22)
        for _ in range(60):
            n = int(rng.integers(3, 7))
            edges = complete_random_edges(rng, n, lo=0.0, hi=10.0, penalty_hi=12.0)
            greedy = build_forest_suzuki(edges)
            total = sum(
                next(e.score for e in edges if (e.i, e.j) == pair)
                for pair in greedy.sorted_edges
            )
            best = brute_force_best_total(edges)
            assert total == pytest.approx(best, rel=1e-12, abs=1e-12)

    def test_forest_is_subgraph_of_best_spanning_tree(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            n = int(rng.integers(3, 7))
            edges = complete_random_edges(rng, n, lo=0.0, hi=10.0, penalty_hi=12.0)
            forest = build_forest_suzuki(edges)
            tree = brute_force_best_forest(edges, require_spanning_tree=True)
            assert forest.edges <= tree.edges

    def test_deterministic_under_input_shuffling(self):
        rng = np.random.default_rng(24)
        edges = complete_random_edges(rng, 6, penalty_hi=8.0)
        reference = build_forest_suzuki(edges)
        for _ in range(5):
            shuffled = list(edges)
            rng.shuffle(shuffled)
            assert build_forest_suzuki(shuffled) == reference
