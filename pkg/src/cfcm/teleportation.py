"""Classical post-selected teleportation: protocols, graphs, models.

A protocol is a triple ``(post_fn, prior_B, prior_C)`` whose acceptance
event copies a value across a cut wire: summing ``post_fn`` against the
priors must produce ``tau * delta(a, c)`` for some success probability
``tau`` in (0, 1].  Splitting a vertex of a cyclic graph replaces it with a
pre-selection stand-in feeding its children and a post-selection check
vertex; post-selecting every check on 1 recovers the cyclic model's
distribution on the original vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .errors import GraphError, InconsistentModel, ModelStructureError
from .graph import (
    DirectedGraph,
    VertexId,
    is_acyclic,
    is_valid_split_set,
    remove_out_edges,
    to_dot,
    topological_order,
)
from .inference import JointDistribution
from .model import (
    Alphabet,
    ErrorVariable,
    FunctionalCausalModel,
    Mechanism,
    Symbol,
    scaled_error_weights,
)

PostFn = Mapping[tuple[Symbol, Symbol, Symbol], int]


@dataclass
class TeleportationProtocol:
    """A validated post-selected teleportation protocol.

    ``post_fn`` maps ``(a, b, c)`` to 0/1 where ``a`` ranges over the
    target alphabet (the split vertex's value), ``b`` over the side
    alphabet (the check vertex's error variable) and ``c`` again over the
    target alphabet (the pre-selection value).
    """

    target: Alphabet
    side: Alphabet
    post_fn: dict[tuple[Symbol, Symbol, Symbol], int]
    prior_b: dict[Symbol, Fraction]
    prior_c: dict[Symbol, Fraction]
    tau: Fraction


@dataclass
class ProtocolCheck:
    tau: Fraction | None
    reason: str | None = None
    violation: tuple[Symbol, Symbol] | None = None

    @property
    def ok(self) -> bool:
        return self.tau is not None


def _compile_post_fn(post_fn, target: Alphabet, side: Alphabet) -> dict:
    if callable(post_fn):
        compiled = {}
        for a, b, c in product(target.symbols, side.symbols, target.symbols):
            compiled[(a, b, c)] = 1 if post_fn(a, b, c) else 0
        return compiled
    return {k: (1 if v else 0) for k, v in post_fn.items()}


def validate_protocol(
    post_fn,
    prior_b: Mapping[Symbol, Fraction],
    prior_c: Mapping[Symbol, Fraction],
    target: Alphabet,
    side: Alphabet,
) -> ProtocolCheck:
    """Check the copy property exactly.

    Computes ``M(a, c) = sum_b [post_fn(a,b,c) = 1] prior_b(b) prior_c(c)``
    and accepts iff ``M`` equals ``tau`` times the identity with
    ``tau > 0``, reporting the first violating ``(a, c)`` pair otherwise.
    """
    for name, prior, alpha in (("prior_B", prior_b, side), ("prior_C", prior_c, target)):
        if set(prior) != set(alpha.symbols):
            return ProtocolCheck(None, f"{name} keys do not match its alphabet")
        if any(p < 0 for p in prior.values()):
            return ProtocolCheck(None, f"{name} has a negative entry")
        if sum(prior.values(), Fraction(0)) != 1:
            return ProtocolCheck(None, f"{name} is not normalized")
    fn = _compile_post_fn(post_fn, target, side)
    missing = [
        key
        for key in product(target.symbols, side.symbols, target.symbols)
        if key not in fn
    ]
    if missing:
        return ProtocolCheck(None, f"post_fn is not total, missing {missing[0]}")

    tau: Fraction | None = None
    for a in target:
        for c in target:
            m_ac = sum(
                (prior_b[b] * prior_c[c] for b in side if fn[(a, b, c)] == 1),
                Fraction(0),
            )
            if a != c:
                if m_ac != 0:
                    return ProtocolCheck(
                        None, f"M({a},{c}) = {m_ac} != 0 off the diagonal", (a, c)
                    )
            elif tau is None:
                tau = m_ac
            elif m_ac != tau:
                return ProtocolCheck(
                    None, f"M({a},{c}) = {m_ac} != {tau} breaks the constant diagonal", (a, c)
                )
    if tau is None or tau <= 0:
        return ProtocolCheck(None, "diagonal acceptance probability is not positive")
    return ProtocolCheck(tau)


def make_protocol(
    post_fn,
    prior_b: Mapping[Symbol, Fraction],
    prior_c: Mapping[Symbol, Fraction],
    target: Alphabet,
    side: Alphabet,
) -> TeleportationProtocol:
    """Validate and package a protocol; raises on an invalid triple."""
    check = validate_protocol(post_fn, prior_b, prior_c, target, side)
    if not check.ok:
        raise ModelStructureError(f"invalid teleportation protocol: {check.reason}")
    return TeleportationProtocol(
        target,
        side,
        _compile_post_fn(post_fn, target, side),
        dict(prior_b),
        dict(prior_c),
        check.tau,
    )


def uniform_prior_protocol(alphabet: Alphabet) -> TeleportationProtocol:
    """The canonical protocol: accept iff a = c, uniform pre-selection prior.

    The acceptance function ignores the side variable, so the side alphabet
    collapses to a singleton.  tau = 1/|alphabet|.
    """
    side = Alphabet.singleton()
    n = len(alphabet)
    post_fn = {
        (a, b, c): 1 if a == c else 0
        for a, b, c in product(alphabet.symbols, side.symbols, alphabet.symbols)
    }
    prior_c = {s: Fraction(1, n) for s in alphabet}
    prior_b = {side.symbols[0]: Fraction(1)}
    return TeleportationProtocol(alphabet, side, post_fn, prior_b, prior_c, Fraction(1, n))


def skewed_prior_protocol(alphabet: Alphabet) -> TeleportationProtocol:
    """A second valid implementation, used to exercise protocol independence.

    The pre-selection prior puts double weight on the first symbol; the
    acceptance function compensates by flipping a fair side coin there.
    tau = 1/(|alphabet| + 1).
    """
    n = len(alphabet)
    side = Alphabet.of_size(2)
    first = alphabet.symbols[0]
    prior_c = {s: Fraction(2 if s == first else 1, n + 1) for s in alphabet}
    prior_b = {s: Fraction(1, 2) for s in side}

    def fn(a, b, c):
        if a != c:
            return 0
        return 1 if (c != first or b == "0") else 0

    return make_protocol(fn, prior_b, prior_c, alphabet, side)


# -- teleportation graphs -------------------------------------------------


@dataclass
class TeleportationGraph:
    """One member of the acyclic family of a base graph.

    ``pre`` and ``post`` map each split vertex to its pre-selection and
    post-selection vertex labels in the built graph.
    """

    base: DirectedGraph
    split: tuple[str, ...]
    graph: DirectedGraph
    pre: dict[str, str]
    post: dict[str, str]

    def to_dot(self, name: str = "Gsplit") -> str:
        return to_dot(self.graph, name=name, pre=self.pre.values(), post=self.post.values())


def build_teleportation_graph(g: DirectedGraph, split: Iterable[str]) -> TeleportationGraph:
    """Split the given vertices and attach their pre/post-selection gadgets.

    The split set must leave the graph acyclic after dropping the split
    vertices' out-edges.  Children of a split vertex are re-parented onto
    the new pre-selection vertex; the post-selection vertex observes both
    sides of the cut.
    """
    split = tuple(g.sort_labels(set(split)))
    if not is_valid_split_set(g, split):
        raise GraphError(f"invalid split set {split}: out-edge removal leaves a cycle")
    pre = {v: f"R_{v}" for v in split}
    post = {v: f"T_{v}" for v in split}
    taken = set(g.labels)
    for fresh in list(pre.values()) + list(post.values()):
        if fresh in taken:
            raise GraphError(f"vertex label {fresh!r} collides with a split gadget label")
    labels = list(g.labels) + [pre[v] for v in split] + [post[v] for v in split]
    edges = set(remove_out_edges(g, split).edges)
    for v in split:
        edges.add((v, post[v]))
        edges.add((pre[v], post[v]))
        for child in g.children(v):
            edges.add((pre[v], child))
    vertices = tuple(VertexId(i, l) for i, l in enumerate(labels))
    built = DirectedGraph(vertices, frozenset(edges))
    return TeleportationGraph(g, split, built, pre, post)


@dataclass
class TeleportationModel:
    tg: TeleportationGraph
    base: FunctionalCausalModel
    protocols: dict[str, TeleportationProtocol]
    model: FunctionalCausalModel
    _accepted: tuple | None = field(default=None, repr=False, compare=False)


def build_teleportation_model(
    m: FunctionalCausalModel,
    tg: TeleportationGraph,
    protocols: Mapping[str, TeleportationProtocol] | None = None,
) -> TeleportationModel:
    """Induce the acyclic model on a teleportation graph.

    Every surviving vertex keeps its alphabet, error variable and
    mechanism, with pre-selection vertices standing in for split parents.
    Each pre-selection vertex is exogenous with the protocol's prior_C;
    each post-selection vertex is binary with the protocol's acceptance
    function as mechanism and prior_B as error distribution.
    """
    chosen: dict[str, TeleportationProtocol] = {}
    for v in tg.split:
        proto = (protocols or {}).get(v) or uniform_prior_protocol(m.alphabets[v])
        if proto.target.symbols != m.alphabets[v].symbols:
            raise ModelStructureError(
                f"protocol for {v} targets alphabet {proto.target.symbols}, "
                f"vertex has {m.alphabets[v].symbols}"
            )
        chosen[v] = proto

    built = tg.graph
    splitset = set(tg.split)
    alphabets: dict[str, Alphabet] = {}
    errors: dict[str, ErrorVariable] = {}
    mechanisms: dict[str, Mechanism] = {}

    for w in m.graph.labels:
        alphabets[w] = m.alphabets[w]
        errors[w] = m.errors[w]
        old = m.mechanisms[w]
        rename = {p: (tg.pre[p] if p in splitset else p) for p in old.parent_order}
        new_order = built.parents(w)
        if set(new_order) != set(rename.values()):
            raise ModelStructureError(f"parent mismatch rebuilding {w}")  # pragma: no cover
        position = {rename[p]: i for i, p in enumerate(old.parent_order)}
        perm = tuple(position[p] for p in new_order)
        table = {
            (tuple(psyms[i] for i in perm), u): out
            for (psyms, u), out in old.table.items()
        }
        mechanisms[w] = Mechanism(new_order, table)

    for v in tg.split:
        proto = chosen[v]
        r, t = tg.pre[v], tg.post[v]
        alphabets[r] = m.alphabets[v]
        errors[r] = ErrorVariable(m.alphabets[v], dict(proto.prior_c))
        mechanisms[r] = Mechanism((), {((), s): s for s in m.alphabets[v]})

        alphabets[t] = Alphabet.of_size(2)
        errors[t] = ErrorVariable(proto.side, dict(proto.prior_b))
        order = built.parents(t)  # (v, R_v) in canonical order
        table = {}
        for a in m.alphabets[v]:
            for c in m.alphabets[v]:
                psyms = {v: a, r: c}
                key = tuple(psyms[p] for p in order)
                for b in proto.side:
                    table[(key, b)] = "1" if proto.post_fn[(a, b, c)] == 1 else "0"
        mechanisms[t] = Mechanism(order, table)

    model = FunctionalCausalModel(built, alphabets, errors, mechanisms)
    return TeleportationModel(tg, m, chosen, model)


# -- acyclic evaluation ----------------------------------------------------


def _forward_weights(m: FunctionalCausalModel, required: Mapping[str, Symbol] | None = None):
    """Accumulate the acyclic probability rule by enumerating error space.

    For an acyclic model every error assignment has exactly one consistent
    outcome assignment, so summing the indicator products over outcomes
    reduces to forward evaluation in topological order; the recursion over
    topological positions shares every common error-prefix between
    branches.  ``required`` pins vertices to fixed values: branches
    producing any other value there are dropped (used for post-selection).

    Returns ``(weights, denom)`` where ``weights`` maps full outcome
    tuples (in vertex order) to integer masses over the common
    denominator ``denom``.
    """
    order = topological_order(m.graph)
    labels = m.graph.labels
    if len(order) != len(labels):
        raise GraphError("forward evaluation needs an acyclic model")
    pos = {l: i for i, l in enumerate(labels)}
    weights, denom = scaled_error_weights(m)

    plan = []
    for l in order:
        by_parents: dict[tuple[Symbol, ...], dict[Symbol, Symbol]] = {}
        for (psyms, u), out in m.mechanisms[l].table.items():
            by_parents.setdefault(psyms, {})[u] = out
        wlist = [
            (u, weights[l][u])
            for u in m.errors[l].alphabet.symbols
            if weights[l][u] != 0
        ]
        parent_pos = tuple(pos[p] for p in m.mechanisms[l].parent_order)
        plan.append((pos[l], parent_pos, by_parents, wlist, (required or {}).get(l)))

    n = len(plan)
    values: list[Symbol | None] = [None] * len(labels)
    acc: dict[tuple[Symbol, ...], int] = {}

    def descend(i: int, w: int):
        if i == n:
            key = tuple(values)
            acc[key] = acc.get(key, 0) + w
            return
        slot, parent_pos, by_parents, wlist, pinned = plan[i]
        column = by_parents[tuple(values[j] for j in parent_pos)]
        for u, wu in wlist:
            val = column[u]
            if pinned is not None and val != pinned:
                continue
            values[slot] = val
            descend(i + 1, w * wu)

    descend(0, 1)
    return acc, denom


def acyclic_joint(m: FunctionalCausalModel) -> JointDistribution:
    """Exact joint distribution of an acyclic model (dense table)."""
    acc, denom = _forward_weights(m)
    labels = m.graph.labels
    table = {
        x: Fraction(acc.get(x, 0), denom)
        for x in product(*(m.alphabets[l].symbols for l in labels))
    }
    return JointDistribution(labels, table)


def _accepted_weights(tm: TeleportationModel):
    """Forward masses of runs where every check vertex outputs 1.

    Returns ``(per_base, total, denom)``: integer masses per base-vertex
    assignment, their total, and the common denominator.  Pre-selection
    values are marginalized by the projection.
    """
    if tm._accepted is None:
        m = tm.model
        required = {t: "1" for t in tm.tg.post.values()}
        acc, denom = _forward_weights(m, required)
        base_slots = [m.graph.index_of(l) for l in tm.base.graph.labels]
        per_base: dict[tuple[Symbol, ...], int] = {}
        total = 0
        for full, w in acc.items():
            key = tuple(full[j] for j in base_slots)
            per_base[key] = per_base.get(key, 0) + w
            total += w
        tm._accepted = (per_base, total, denom)
    return tm._accepted


def success_probability(tm: TeleportationModel) -> Fraction:
    """Probability that every post-selection vertex outputs 1."""
    _, total, denom = _accepted_weights(tm)
    return Fraction(total, denom)


def postselected_distribution(tm: TeleportationModel) -> JointDistribution:
    """Distribution over the base vertices conditioned on all checks passing.

    Pre-selection vertices are marginalized out.  Raises
    :class:`InconsistentModel` when the success probability is zero.
    """
    per_base, total, _ = _accepted_weights(tm)
    if total == 0:
        raise InconsistentModel("post-selection never succeeds: model is inconsistent")
    base = tm.base.graph
    table = {
        x: Fraction(per_base.get(x, 0), total)
        for x in product(*(tm.base.alphabets[l].symbols for l in base.labels))
    }
    return JointDistribution(base.labels, table)


__all__ = [
    "ProtocolCheck",
    "TeleportationGraph",
    "TeleportationModel",
    "TeleportationProtocol",
    "acyclic_joint",
    "build_teleportation_graph",
    "build_teleportation_model",
    "make_protocol",
    "postselected_distribution",
    "skewed_prior_protocol",
    "success_probability",
    "uniform_prior_protocol",
    "validate_protocol",
]
