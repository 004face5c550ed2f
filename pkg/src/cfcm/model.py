"""Functional causal models over finite alphabets.

A model attaches to every vertex of a directed graph an outcome alphabet,
an error variable with an exactly rational distribution, and a total
mechanism table mapping (parent assignment, error symbol) to an outcome.
Deterministic mechanisms are represented uniformly with a singleton error
alphabet.  All probabilities are :class:`fractions.Fraction`; the library
never touches floating point.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Iterator, Mapping

from .errors import GraphError, ModelStructureError
from .graph import DirectedGraph, build_graph

Symbol = str
Assignment = dict[str, Symbol]

SINGLETON_SYMBOL = "0"


@dataclass(frozen=True)
class Alphabet:
    """Ordered, duplicate-free list of value tokens."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ModelStructureError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise ModelStructureError(f"alphabet has duplicate symbols: {self.symbols}")

    @classmethod
    def of_size(cls, n: int) -> "Alphabet":
        """Canonical numeric alphabet 0..n-1."""
        return cls(tuple(str(i) for i in range(n)))

    @classmethod
    def singleton(cls) -> "Alphabet":
        return cls((SINGLETON_SYMBOL,))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, symbol: Symbol) -> bool:
        return symbol in self.symbols

    @property
    def is_numeric(self) -> bool:
        try:
            [int(s) for s in self.symbols]
        except ValueError:
            return False
        return True


@dataclass
class ErrorVariable:
    """Finite error variable with an exactly normalized distribution."""

    alphabet: Alphabet
    dist: dict[Symbol, Fraction]

    @classmethod
    def uniform(cls, alphabet: Alphabet) -> "ErrorVariable":
        p = Fraction(1, len(alphabet))
        return cls(alphabet, {s: p for s in alphabet})

    @classmethod
    def trivial(cls) -> "ErrorVariable":
        """The singleton error of a deterministic mechanism."""
        return cls(Alphabet.singleton(), {SINGLETON_SYMBOL: Fraction(1)})

    def scaled_weights(self) -> tuple[dict[Symbol, int], int]:
        """Distribution as integer weights over a common denominator."""
        denom = lcm(*(p.denominator for p in self.dist.values()))
        return {s: int(p * denom) for s, p in self.dist.items()}, denom


@dataclass
class Mechanism:
    """Dense total table for one vertex's function.

    Keys are ``(parent_symbols, error_symbol)`` with parent symbols given
    in ``parent_order`` (the graph's canonical order restricted to the
    parents).
    """

    parent_order: tuple[str, ...]
    table: dict[tuple[tuple[Symbol, ...], Symbol], Symbol]

    def eval(self, parent_symbols: tuple[Symbol, ...], error_symbol: Symbol) -> Symbol:
        return self.table[(parent_symbols, error_symbol)]


@dataclass
class FunctionalCausalModel:
    graph: DirectedGraph
    alphabets: dict[str, Alphabet]
    errors: dict[str, ErrorVariable]
    mechanisms: dict[str, Mechanism]

    def alphabet(self, label: str) -> Alphabet:
        return self.alphabets[label]


def validate_model(m: FunctionalCausalModel) -> list[str]:
    """Check every structural invariant; returns diagnostics, empty if ok."""
    issues: list[str] = []
    for label in m.graph.labels:
        for part, store in (("alphabet", m.alphabets), ("error", m.errors), ("mechanism", m.mechanisms)):
            if label not in store:
                issues.append(f"{label}: missing {part}")
    for extra in set(m.alphabets) | set(m.errors) | set(m.mechanisms):
        if extra not in m.graph:
            issues.append(f"{extra}: not a graph vertex")
    if issues:
        return issues

    for label in m.graph.labels:
        err = m.errors[label]
        if set(err.dist) != set(err.alphabet.symbols):
            issues.append(f"{label}: error distribution keys do not match its alphabet")
            continue
        total = sum(err.dist.values(), Fraction(0))
        if any(p < 0 for p in err.dist.values()):
            issues.append(f"{label}: error distribution has a negative entry")
        if total != 1:
            issues.append(f"{label}: error distribution not normalized (sums to {total})")

    for label in m.graph.labels:
        mech = m.mechanisms[label]
        expected_parents = m.graph.parents(label)
        if mech.parent_order != expected_parents:
            issues.append(
                f"{label}: mechanism parent order {mech.parent_order} "
                f"!= graph parents {expected_parents}"
            )
            continue
        out_alpha = m.alphabets[label]
        domain = set(
            product(
                product(*(m.alphabets[p].symbols for p in expected_parents)),
                m.errors[label].alphabet.symbols,
            )
        )
        keys = set(mech.table)
        for missing in sorted(domain - keys):
            issues.append(f"{label}: mechanism not total, missing entry {missing}")
        for spurious in sorted(keys - domain):
            issues.append(f"{label}: mechanism entry {spurious} outside its domain")
        for key in sorted(domain & keys):
            if mech.table[key] not in out_alpha:
                issues.append(f"{label}: mechanism output {mech.table[key]!r} at {key} outside alphabet")
    return issues


def require_valid(m: FunctionalCausalModel):
    issues = validate_model(m)
    if issues:
        raise ModelStructureError("; ".join(issues))


def mechanism_eval(m: FunctionalCausalModel, label: str, parent_assignment: Mapping[str, Symbol], error_symbol: Symbol) -> Symbol:
    """Evaluate one mechanism: a table lookup with strict argument checking."""
    if label not in m.graph:
        raise GraphError(f"unknown vertex {label!r}")
    mech = m.mechanisms[label]
    if set(parent_assignment) != set(mech.parent_order):
        raise ModelStructureError(
            f"{label}: parent assignment covers {sorted(parent_assignment)}, "
            f"expected exactly {sorted(mech.parent_order)}"
        )
    for p in mech.parent_order:
        if parent_assignment[p] not in m.alphabets[p]:
            raise ModelStructureError(f"{label}: symbol {parent_assignment[p]!r} outside alphabet of {p}")
    if error_symbol not in m.errors[label].alphabet:
        raise ModelStructureError(f"{label}: error symbol {error_symbol!r} outside its alphabet")
    return mech.eval(tuple(parent_assignment[p] for p in mech.parent_order), error_symbol)


def enumerate_joint_assignments(m: FunctionalCausalModel, subset: Iterable[str]) -> Iterator[Assignment]:
    """All assignments over ``subset``, lexicographic in vertex order then
    symbol order.  The empty subset yields the single empty assignment.
    """
    labels = m.graph.sort_labels(set(subset))
    for combo in product(*(m.alphabets[l].symbols for l in labels)):
        yield dict(zip(labels, combo))


def error_space(m: FunctionalCausalModel) -> tuple[tuple[str, ...], Iterator[tuple[Symbol, ...]]]:
    """Vertex order and iterator over all full error assignments."""
    labels = m.graph.labels
    return labels, product(*(m.errors[l].alphabet.symbols for l in labels))


def scaled_error_weights(m: FunctionalCausalModel) -> tuple[dict[str, dict[Symbol, int]], int]:
    """Per-vertex integer error weights and the global denominator.

    Summing ``prod(weights[v][u_v])`` over any event and dividing by the
    denominator reproduces the exact rational probability.
    """
    weights: dict[str, dict[Symbol, int]] = {}
    denom = 1
    for label in m.graph.labels:
        w, d = m.errors[label].scaled_weights()
        weights[label] = w
        denom *= d
    return weights, denom


# -- generators ----------------------------------------------------------


def xor_witness_model(g: DirectedGraph) -> FunctionalCausalModel:
    """Binary model: exogenous vertices are uniform coins, every endogenous
    vertex is the parity of its parents.  This is the generic witness used
    by the separation completeness arguments.
    """
    bits = Alphabet.of_size(2)
    alphabets = {l: bits for l in g.labels}
    errors: dict[str, ErrorVariable] = {}
    mechanisms: dict[str, Mechanism] = {}
    for label in g.labels:
        parents = g.parents(label)
        if not parents:
            errors[label] = ErrorVariable.uniform(bits)
            mechanisms[label] = Mechanism((), {((), s): s for s in bits})
        else:
            errors[label] = ErrorVariable.trivial()
            table = {}
            for combo in product(bits.symbols, repeat=len(parents)):
                parity = sum(int(s) for s in combo) % 2
                table[(combo, SINGLETON_SYMBOL)] = str(parity)
            mechanisms[label] = Mechanism(parents, table)
    return FunctionalCausalModel(g, alphabets, errors, mechanisms)


def random_model(
    g: DirectedGraph,
    max_alphabet: int = 3,
    max_error: int = 2,
    seed: int = 0,
) -> FunctionalCausalModel:
    """Deterministic-in-seed random model for property tests.

    Exogenous vertices follow the identity convention (error alphabet equal
    to the outcome alphabet, mechanism u -> u); endogenous vertices get an
    error alphabet of size <= ``max_error`` and a uniformly random table.
    Error distributions are rationals with denominator <= 64.
    """
    if max_alphabet < 1 or max_error < 1:
        raise ModelStructureError("alphabet bounds must be >= 1")
    rng = _random.Random(seed)
    alphabets = {l: Alphabet.of_size(rng.randint(1, max_alphabet)) for l in g.labels}
    errors: dict[str, ErrorVariable] = {}
    mechanisms: dict[str, Mechanism] = {}

    def random_dist(alpha: Alphabet) -> dict[Symbol, Fraction]:
        denom = rng.randint(1, 64)
        cuts = sorted(rng.randint(0, denom) for _ in range(len(alpha) - 1))
        weights = [b - a for a, b in zip([0] + cuts, cuts + [denom])]
        return {s: Fraction(w, denom) for s, w in zip(alpha.symbols, weights)}

    for label in g.labels:
        parents = g.parents(label)
        out_alpha = alphabets[label]
        if not parents:
            errors[label] = ErrorVariable(out_alpha, random_dist(out_alpha))
            mechanisms[label] = Mechanism((), {((), s): s for s in out_alpha})
            continue
        err_alpha = Alphabet.of_size(rng.randint(1, max_error))
        errors[label] = ErrorVariable(err_alpha, random_dist(err_alpha))
        table = {}
        for combo in product(*(alphabets[p].symbols for p in parents)):
            for u in err_alpha:
                table[(combo, u)] = rng.choice(out_alpha.symbols)
        mechanisms[label] = Mechanism(parents, table)
    return FunctionalCausalModel(g, alphabets, errors, mechanisms)


def table_from_function(
    m_alphabets: Mapping[str, Alphabet],
    parents: tuple[str, ...],
    error_alphabet: Alphabet,
    fn,
) -> dict[tuple[tuple[Symbol, ...], Symbol], Symbol]:
    """Compile ``fn(parent_assignment, error_symbol) -> symbol`` to a table."""
    table = {}
    for combo in product(*(m_alphabets[p].symbols for p in parents)):
        assignment = dict(zip(parents, combo))
        for u in error_alphabet:
            table[(combo, u)] = fn(assignment, u)
    return table


def models_equal(a: FunctionalCausalModel, b: FunctionalCausalModel) -> bool:
    """Pointwise structural equality (graphs, alphabets, distributions, tables)."""
    return (
        a.graph.labels == b.graph.labels
        and a.graph.edges == b.graph.edges
        and all(a.alphabets[l].symbols == b.alphabets[l].symbols for l in a.graph.labels)
        and all(
            a.errors[l].alphabet.symbols == b.errors[l].alphabet.symbols
            and a.errors[l].dist == b.errors[l].dist
            for l in a.graph.labels
        )
        and all(
            a.mechanisms[l].parent_order == b.mechanisms[l].parent_order
            and a.mechanisms[l].table == b.mechanisms[l].table
            for l in a.graph.labels
        )
    )


__all__ = [
    "Alphabet",
    "Assignment",
    "ErrorVariable",
    "FunctionalCausalModel",
    "Mechanism",
    "Symbol",
    "build_graph",
    "enumerate_joint_assignments",
    "error_space",
    "mechanism_eval",
    "models_equal",
    "random_model",
    "require_valid",
    "scaled_error_weights",
    "table_from_function",
    "validate_model",
    "xor_witness_model",
]
