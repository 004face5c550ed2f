"""Directed graphs with the combinatorics used by every analysis layer.

Graphs are immutable: vertices form an ordered list (the *canonical order*
used everywhere for assignments and tables), edges are a set of ordered
label pairs.  Cycles and self-loops are allowed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator


from .errors import GraphError

KINSHIP_KINDS = ("parents", "children", "descendants", "ancestors")


@dataclass(frozen=True)
class VertexId:
    """Position in the graph's canonical vertex order plus its unique label."""

    index: int
    label: str


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[VertexId, ...]
    edges: frozenset[tuple[str, str]]
    _index: dict = field(default_factory=dict, repr=False, compare=False)
    _parents: dict = field(default_factory=dict, repr=False, compare=False)
    _children: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {v.label: v.index for v in self.vertices}
        parents: dict[str, set[str]] = {v.label: set() for v in self.vertices}
        children: dict[str, set[str]] = {v.label: set() for v in self.vertices}
        for tail, head in self.edges:
            children[tail].add(head)
            parents[head].add(tail)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_parents", parents)
        object.__setattr__(self, "_children", children)
        object.__setattr__(self, "_reach_cache", {})

    # -- basic queries ---------------------------------------------------

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.vertices)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index_of(self, label: str) -> int:
        self._require(label)
        return self._index[label]

    def _require(self, label: str):
        if label not in self._index:
            raise GraphError(f"unknown vertex {label!r}")

    def sort_labels(self, labels: Iterable[str]) -> tuple[str, ...]:
        """Labels sorted into canonical vertex order."""
        return tuple(sorted(labels, key=self.index_of))

    def parents(self, label: str) -> tuple[str, ...]:
        self._require(label)
        return self.sort_labels(self._parents[label])

    def children(self, label: str) -> tuple[str, ...]:
        self._require(label)
        return self.sort_labels(self._children[label])

    def _reach(self, label: str, adjacency: dict, key: str) -> frozenset:
        cached = self._reach_cache.get((key, label))
        if cached is None:
            seen: set[str] = set()
            stack = list(adjacency[label])
            while stack:
                w = stack.pop()
                if w in seen:
                    continue
                seen.add(w)
                stack.extend(adjacency[w] - seen)
            cached = frozenset(seen)
            self._reach_cache[(key, label)] = cached
        return cached

    def descendants(self, label: str) -> tuple[str, ...]:
        """Vertices reachable from ``label`` by a non-empty directed walk.

        The vertex itself is included exactly when it lies on a cycle.
        """
        self._require(label)
        return self.sort_labels(self._reach(label, self._children, "down"))

    def ancestors(self, label: str) -> tuple[str, ...]:
        self._require(label)
        return self.sort_labels(self._reach(label, self._parents, "up"))

    def exogenous(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.vertices if not self._parents[v.label])

    def endogenous(self) -> tuple[str, ...]:
        return tuple(v.label for v in self.vertices if self._parents[v.label])


def build_graph(labels: Iterable[str], edges: Iterable[tuple[str, str]]) -> DirectedGraph:
    """Build a graph with vertex order equal to the input label order.

    Raises :class:`GraphError` on duplicate labels or on an edge endpoint
    that is not a declared vertex.  Repeated edge pairs collapse into the
    edge set.
    """
    labels = list(labels)
    if not labels:
        raise GraphError("graph needs at least one vertex")
    if len(set(labels)) != len(labels):
        dup = next(l for l in labels if labels.count(l) > 1)
        raise GraphError(f"duplicate vertex label {dup!r}")
    known = set(labels)
    edge_set = set()
    for tail, head in edges:
        if tail not in known:
            raise GraphError(f"edge endpoint {tail!r} is not a declared vertex")
        if head not in known:
            raise GraphError(f"edge endpoint {head!r} is not a declared vertex")
        edge_set.add((tail, head))
    vertices = tuple(VertexId(i, l) for i, l in enumerate(labels))
    return DirectedGraph(vertices, frozenset(edge_set))


def kinship(g: DirectedGraph, label: str, kind: str) -> tuple[str, ...]:
    """Dispatch to parents / children / descendants / ancestors by name."""
    if kind not in KINSHIP_KINDS:
        raise GraphError(f"unknown kinship kind {kind!r}")
    return getattr(g, kind)(label)


def is_acyclic(g: DirectedGraph) -> bool:
    """True iff the graph has no directed cycle.  A self-loop is a cycle."""
    return len(topological_order(g)) == len(g.vertices)


def topological_order(g: DirectedGraph) -> tuple[str, ...]:
    """Kahn's algorithm; returns only the acyclic prefix if cycles remain."""
    indeg = {v.label: len(g._parents[v.label]) for v in g.vertices}
    ready = [l for l in g.labels if indeg[l] == 0]
    order: list[str] = []
    while ready:
        # pop smallest index for determinism
        ready.sort(key=g.index_of)
        label = ready.pop(0)
        order.append(label)
        for child in g._children[label]:
            indeg[child] -= 1
            if indeg[child] == 0:
                ready.append(child)
    return tuple(order)


def remove_out_edges(g: DirectedGraph, split: Iterable[str]) -> DirectedGraph:
    """Same vertices, minus every out-edge of every vertex in ``split``."""
    split = set(split)
    for label in split:
        g._require(label)
    kept = frozenset(e for e in g.edges if e[0] not in split)
    return DirectedGraph(g.vertices, kept)


def is_valid_split_set(g: DirectedGraph, split: Iterable[str]) -> bool:
    return is_acyclic(remove_out_edges(g, split))


def enumerate_split_sets(g: DirectedGraph) -> Iterator[tuple[str, ...]]:
    """Yield every subset whose out-edge removal leaves the graph acyclic.

    Order: increasing cardinality, then lexicographically by vertex index.
    The full vertex set is always valid, so the stream is never empty.
    Exhaustive over all 2^|V| subsets; the artifact is desk-scale.
    """
    labels = g.labels
    for size in range(len(labels) + 1):
        for combo in combinations(range(len(labels)), size):
            candidate = tuple(labels[i] for i in combo)
            if is_valid_split_set(g, candidate):
                yield candidate


def to_dot(
    g: DirectedGraph,
    name: str = "G",
    pre: Iterable[str] = (),
    post: Iterable[str] = (),
) -> str:
    """Graphviz rendering.  Pre-selection vertices get the ``invhouse``
    shape and post-selection vertices the ``diamond`` shape, mirroring the
    marked vertex styles of teleportation graphs; everything else is a box.
    """
    pre, post = set(pre), set(post)
    lines = [f"digraph {name} {{"]
    for v in g.vertices:
        if v.label in pre:
            shape = "invhouse"
        elif v.label in post:
            shape = "diamond"
        else:
            shape = "box"
        lines.append(f'  "{v.label}" [shape={shape}];')
    for tail, head in sorted(g.edges, key=lambda e: (g.index_of(e[0]), g.index_of(e[1]))):
        lines.append(f'  "{tail}" -> "{head}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
