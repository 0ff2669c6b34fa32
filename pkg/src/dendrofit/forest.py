"""Maximum-weight forest construction: Kruskal's greedy with union-find.

Two admission rules: plain maximum weight spanning (every loop-free edge
is taken, heaviest first) and the penalized variant that additionally
requires a nonnegative net score and so may stop early with a
disconnected forest.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .core import Forest, ScoredEdge
from .errors import EmptyEdgeList


class UnionFind:
    """Disjoint sets over n vertices with path compression and union by
    rank."""

    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


@dataclass(frozen=True)
class EdgeDecision:
    """One greedy step: the edge considered, whether it was admitted, and
    if not, why ("loop" or "negative")."""

    edge: ScoredEdge
    accepted: bool
    reason: Optional[str] = None


def _infer_n_vertices(edges: Sequence[ScoredEdge], n_vertices: Optional[int]) -> int:
    if n_vertices is not None:
        return n_vertices
    return max(e.j for e in edges) + 1


def _greedy_order(edges: Sequence[ScoredEdge], weight: Callable[[ScoredEdge], float]):
    # descending weight, ties broken (i, j) lexicographic ascending;
    # +inf weights sort first
    return sorted(edges, key=lambda e: (-weight(e), e.i, e.j))


def kruskal_decisions(
    edges: Sequence[ScoredEdge],
    penalized: bool,
    n_vertices: Optional[int] = None,
) -> list[EdgeDecision]:
    """Run the greedy admission loop and report every edge's fate.

    With ``penalized`` the net score is the weight and negative-score
    edges are rejected; otherwise the raw mutual information is the
    weight and only loop-closing edges are rejected.
    """
    if not edges:
        raise EmptyEdgeList("no candidate edges supplied")
    n = _infer_n_vertices(edges, n_vertices)
    weight = (lambda e: e.score) if penalized else (lambda e: e.mi)
    uf = UnionFind(n)
    decisions = []
    for edge in _greedy_order(edges, weight):
        if penalized and edge.score < 0.0:
            decisions.append(EdgeDecision(edge, accepted=False, reason="negative"))
        elif uf.union(edge.i, edge.j):
            decisions.append(EdgeDecision(edge, accepted=True))
        else:
            decisions.append(EdgeDecision(edge, accepted=False, reason="loop"))
    return decisions


def build_tree_chow_liu(
    edges: Sequence[ScoredEdge], n_vertices: Optional[int] = None
) -> Forest:
    """Maximum-mutual-information spanning structure.

    Greedy by descending mi; an edge is admitted iff it joins two distinct
    components. With all pairs present the result is a spanning tree.
    """
    if not edges:
        raise EmptyEdgeList("no candidate edges supplied")
    n = _infer_n_vertices(edges, n_vertices)
    uf = UnionFind(n)
    chosen = []
    for edge in _greedy_order(edges, lambda e: e.mi):
        if uf.union(edge.i, edge.j):
            chosen.append((edge.i, edge.j))
            if len(chosen) == n - 1:
                break
    return Forest.from_edges(n, chosen)


def build_forest_suzuki(
    edges: Sequence[ScoredEdge], n_vertices: Optional[int] = None
) -> Forest:
    """Maximum net-score forest.

    Greedy by descending score; an edge is admitted iff its score is >= 0
    and it joins two distinct components. Stops once the best remaining
    score is negative (identical to rejecting each in turn, since
    admission never raises later scores), so the output may be
    disconnected.
    """
    if not edges:
        raise EmptyEdgeList("no candidate edges supplied")
    n = _infer_n_vertices(edges, n_vertices)
    uf = UnionFind(n)
    chosen = []
    for edge in _greedy_order(edges, lambda e: e.score):
        if edge.score < 0.0:
            break
        if uf.union(edge.i, edge.j):
            chosen.append((edge.i, edge.j))
    return Forest.from_edges(n, chosen)
