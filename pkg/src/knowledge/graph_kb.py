"""
Clique and independent-set knowledge bases

Abduction is exact: branch-and-bound over the nodes compatible with the fixed
set, pruned by a greedy-coloring upper bound. MIS runs the same search on the
complement graph.
"""

from itertools import combinations
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple
from src.config.constants import NODE_OUT, SET_BONUS_PER_NODE
from src.config.train_config import ConsistencyModeEnum, TaskEnum
from src.data.models import Graph
from src.knowledge.base import Assignment, ConsistencyScore, KnowledgeBase, KnowledgeError

Adjacency = Sequence[FrozenSet[int]]


def _node_list(g: Graph, nodes: Iterable[int], label: str) -> List[int]:
    s = [int(v) for v in nodes]
    if len(set(s)) != len(s):
        raise KnowledgeError(f"{label} contains duplicate nodes")
    bad = [v for v in s if not 0 <= v < g.node_count]
    if bad:
        raise KnowledgeError(f"{label} nodes {bad} outside 0..{g.node_count - 1}")
    return s


def _pair_score(g: Graph, s: Sequence[int], connected: bool) -> ConsistencyScore:
    s = _node_list(g, s, "node set")
    good = sum(1 for u, v in combinations(s, 2) if g.has_edge(u, v) == connected)
    total = len(s) * (len(s) - 1) // 2
    ok = good == total
    return ConsistencyScore(good + (SET_BONUS_PER_NODE * len(s) if ok else 0), ok)


def con_clique(g: Graph, s: Sequence[int]) -> ConsistencyScore:
    """One point per connected selected pair; 10 per node bonus iff s is a clique"""
    return _pair_score(g, s, connected=True)


def con_mis(g: Graph, s: Sequence[int]) -> ConsistencyScore:
    """One point per non-adjacent selected pair; 10 per node bonus iff s is independent"""
    return _pair_score(g, s, connected=False)


def _color_sort(candidates: List[int], adj: Adjacency) -> Tuple[List[int], List[int]]:
    """Greedy coloring; vertices ordered by color class with their color numbers"""
    classes: List[List[int]] = []
    for v in candidates:
        for cls in classes:
            if not any(u in adj[v] for u in cls):
                cls.append(v)
                break
        else:
            classes.append([v])
    order, colors = [], []
    for k, cls in enumerate(classes, start=1):
        order.extend(cls)
        colors.extend([k] * len(cls))
    return order, colors


def max_clique_within(adj: Adjacency, candidates: Iterable[int]) -> List[int]:
    """
    Maximum clique of the subgraph induced by candidates

    Args:
        adj: Neighbor sets of the whole graph
        candidates: Nodes allowed in the clique

    Returns:
        Sorted node ids of one maximum clique (empty when there are no candidates)
    """
    cand = set(candidates)
    start = sorted(cand, key=lambda v: (-len(adj[v] & cand), v))
    best: List[int] = []

    def expand(chosen: List[int], pool: List[int]) -> None:
        nonlocal best
        order, colors = _color_sort(pool, adj)
        remaining = set(pool)
        for v, bound in zip(reversed(order), reversed(colors)):
            if len(chosen) + bound <= len(best):
                return
            grown = chosen + [v]
            nxt = [u for u in order if u in remaining and u in adj[v]]
            if nxt:
                expand(grown, nxt)
            elif len(grown) > len(best):
                best = grown
            remaining.discard(v)

    if start:
        expand([], start)
    return sorted(best)


def complement_adjacency(g: Graph) -> List[FrozenSet[int]]:
    everyone = frozenset(range(g.node_count))
    return [everyone - g.adjacency[v] - {v} for v in range(g.node_count)]


def _abduce_set(
    g: Graph, adj: Adjacency, fixed_in: Iterable[int], fixed_out: Iterable[int]
) -> Optional[List[int]]:
    fin = _node_list(g, fixed_in, "fixed_in")
    fout = _node_list(g, fixed_out, "fixed_out")
    overlap = set(fin) & set(fout)
    if overlap:
        raise KnowledgeError(f"nodes {sorted(overlap)} are both fixed in and fixed out")
    if any(v not in adj[u] for u, v in combinations(fin, 2)):
        return None
    blocked = set(fin) | set(fout)
    free = [
        v for v in range(g.node_count)
        if v not in blocked and all(v in adj[u] for u in fin)
    ]
    return sorted(fin + max_clique_within(adj, free))


def abduce_clique(g: Graph, fixed_in: Iterable[int], fixed_out: Iterable[int]) -> Optional[List[int]]:
    """
    Maximum clique containing fixed_in and avoiding fixed_out

    Returns:
        Sorted node ids, or None when fixed_in is not a clique
    """
    return _abduce_set(g, g.adjacency, fixed_in, fixed_out)


def abduce_mis(g: Graph, fixed_in: Iterable[int], fixed_out: Iterable[int]) -> Optional[List[int]]:
    """Maximum independent set containing fixed_in and avoiding fixed_out, or None"""
    return _abduce_set(g, complement_adjacency(g), fixed_in, fixed_out)


class GraphKB(KnowledgeBase):
    """
    Node-membership knowledge base for one graph

    Positions are nodes; NODE_IN selects a node, NODE_OUT excludes it and BLANK
    leaves membership open. Scoring looks only at NODE_IN positions.
    """

    def __init__(self, graph: Graph, task: TaskEnum, mode: ConsistencyModeEnum = ConsistencyModeEnum.GRADED):
        super().__init__(n_symbols=2, mode=mode)
        task = TaskEnum(task)
        if task == TaskEnum.SUDOKU:
            raise KnowledgeError("GraphKB handles clique and mis only")
        self.graph = graph
        self.task = task
        self._complement = complement_adjacency(graph) if task == TaskEnum.MIS else None

    @property
    def n_positions(self) -> int:
        return self.graph.node_count

    def measure(self, a: Assignment) -> ConsistencyScore:
        selected = a.node_set()
        if self.task == TaskEnum.CLIQUE:
            return con_clique(self.graph, selected)
        return con_mis(self.graph, selected)

    def abduce(self, a: Assignment) -> Optional[Assignment]:
        self.check(a)
        fixed_in = a.node_set()
        fixed_out = [int(i) for i, v in enumerate(a.values) if v == NODE_OUT]
        adj = self.graph.adjacency if self.task == TaskEnum.CLIQUE else self._complement
        chosen = _abduce_set(self.graph, adj, fixed_in, fixed_out)
        if chosen is None:
            self.logger.debug("abduction_unsat", task=self.task.value, fixed_in=len(fixed_in))
            return None
        return Assignment(Assignment.from_node_set(self.graph.node_count, chosen).values, a.clue_mask)

    def optimum_size(self) -> int:
        """Size of the unconstrained optimum"""
        return len(self.abduce(Assignment([0] * self.n_positions)).node_set())
