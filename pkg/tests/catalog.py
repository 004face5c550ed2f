"""Named example models and graphs used across the test suite.

Everything here is built by hand from first principles (explicit tables,
exact fractions) so the suite exercises the library against independent
constructions rather than its own parsers or generators.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

from cfcm.graph import DirectedGraph, build_graph
from cfcm.model import (
    Alphabet,
    ErrorVariable,
    FunctionalCausalModel,
    Mechanism,
    table_from_function,
)
from cfcm.separation import SeparationQuery


def det(alphabets, parents, fn) -> Mechanism:
    """Deterministic mechanism computed from integer-valued parent symbols."""
    table = table_from_function(
        alphabets, parents, Alphabet.singleton(), lambda pa, _u: str(fn(**{k: int(v) for k, v in pa.items()}))
    )
    return Mechanism(parents, table)


def identity_exogenous(alphabet: Alphabet, dist=None) -> tuple[ErrorVariable, Mechanism]:
    err = ErrorVariable(alphabet, dist) if dist else ErrorVariable.uniform(alphabet)
    return err, Mechanism((), {((), s): s for s in alphabet})


def copy_loop(n: int = 2) -> FunctionalCausalModel:
    """Two-vertex cycle where each vertex copies the other, alphabet size n."""
    g = build_graph(["A", "B"], [("A", "B"), ("B", "A")])
    alpha = Alphabet.of_size(n)
    return FunctionalCausalModel(
        g,
        {"A": alpha, "B": alpha},
        {"A": ErrorVariable.trivial(), "B": ErrorVariable.trivial()},
        {
            "A": det({"A": alpha, "B": alpha}, ("B",), lambda B: B),
            "B": det({"A": alpha, "B": alpha}, ("A",), lambda A: A),
        },
    )


def not_loop() -> FunctionalCausalModel:
    """A copies NOT B while B copies A: no solutions at all."""
    g = build_graph(["A", "B"], [("A", "B"), ("B", "A")])
    alpha = Alphabet.of_size(2)
    alphabets = {"A": alpha, "B": alpha}
    return FunctionalCausalModel(
        g,
        alphabets,
        {"A": ErrorVariable.trivial(), "B": ErrorVariable.trivial()},
        {
            "A": det(alphabets, ("B",), lambda B: B ^ 1),
            "B": det(alphabets, ("A",), lambda A: A),
        },
    )


def dsep_cycle_graph() -> DirectedGraph:
    """Two exogenous vertices feeding a two-vertex loop."""
    return build_graph(
        ["v1", "v2", "v3", "v4"],
        [("v1", "v2"), ("v2", "v1"), ("v3", "v1"), ("v4", "v2")],
    )


def xor_loop(p3: dict | None = None, p4: dict | None = None) -> FunctionalCausalModel:
    """The four-vertex loop with v1 = v2 xor v3 and v2 = v1 xor v4."""
    g = dsep_cycle_graph()
    alpha = Alphabet.of_size(2)
    alphabets = {l: alpha for l in g.labels}
    dist3 = {k: Fraction(v) for k, v in (p3 or {"0": Fraction(1, 2), "1": Fraction(1, 2)}).items()}
    dist4 = {k: Fraction(v) for k, v in (p4 or {"0": Fraction(1, 2), "1": Fraction(1, 2)}).items()}
    err3, mech3 = identity_exogenous(alpha, dist3)
    err4, mech4 = identity_exogenous(alpha, dist4)
    return FunctionalCausalModel(
        g,
        alphabets,
        {
            "v1": ErrorVariable.trivial(),
            "v2": ErrorVariable.trivial(),
            "v3": err3,
            "v4": err4,
        },
        {
            "v1": det(alphabets, ("v2", "v3"), lambda v2, v3: v2 ^ v3),
            "v2": det(alphabets, ("v1", "v4"), lambda v1, v4: v1 ^ v4),
            "v3": mech3,
            "v4": mech4,
        },
    )


def vilasini_colbeck(p0: Fraction = Fraction(1, 2)) -> FunctionalCausalModel:
    """Binary model on A, B, C, L with a = l, b = a xor c, c = l xor b."""
    g = build_graph(
        ["A", "B", "C", "L"],
        [("L", "A"), ("L", "C"), ("A", "B"), ("C", "B"), ("B", "C")],
    )
    alpha = Alphabet.of_size(2)
    alphabets = {l: alpha for l in g.labels}
    errL, mechL = identity_exogenous(alpha, {"0": p0, "1": 1 - p0})
    return FunctionalCausalModel(
        g,
        alphabets,
        {
            "A": ErrorVariable.trivial(),
            "B": ErrorVariable.trivial(),
            "C": ErrorVariable.trivial(),
            "L": errL,
        },
        {
            "A": det(alphabets, ("L",), lambda L: L),
            "B": det(alphabets, ("A", "C"), lambda A, C: A ^ C),
            "C": det(alphabets, ("B", "L"), lambda B, L: L ^ B),
            "L": mechL,
        },
    )


def neal_graph() -> DirectedGraph:
    return build_graph(
        ["v1", "v2", "v3", "v4", "v5", "v6", "v7"],
        [
            ("v3", "v2"), ("v2", "v3"),
            ("v7", "v6"), ("v6", "v7"),
            ("v1", "v3"), ("v1", "v2"),
            ("v2", "v6"), ("v2", "v7"),
            ("v4", "v6"), ("v4", "v7"),
            ("v5", "v6"), ("v5", "v7"),
        ],
    )


def neal_model() -> FunctionalCausalModel:
    """Uniquely solvable cyclic model where d-separation soundness fails."""
    g = neal_graph()
    alpha = Alphabet.of_size(2)
    alphabets = {l: alpha for l in g.labels}
    errors = {}
    mechanisms = {}
    for exo in ("v1", "v4", "v5"):
        errors[exo], mechanisms[exo] = identity_exogenous(alpha)
    for endo, parents, fn in (
        ("v2", ("v1", "v3"), lambda v1, v3: v1 ^ v3),
        ("v3", ("v1", "v2"), lambda v1, v2: v1 ^ v2),
        ("v6", ("v2", "v4", "v5", "v7"), lambda v2, v4, v5, v7: (v2 ^ v4 ^ v5) * (v7 ^ 1)),
        ("v7", ("v2", "v4", "v5", "v6"), lambda v2, v4, v5, v6: (v2 ^ v4 ^ v5) * v6),
    ):
        errors[endo] = ErrorVariable.trivial()
        mechanisms[endo] = det(alphabets, parents, fn)
    return FunctionalCausalModel(g, alphabets, errors, mechanisms)


def mod3_loop() -> FunctionalCausalModel:
    """Ternary 2-cycle with a = 2b mod 3 and b = a; only a=b=0 solves it."""
    g = build_graph(["A", "B"], [("A", "B"), ("B", "A")])
    alpha = Alphabet.of_size(3)
    alphabets = {"A": alpha, "B": alpha}
    return FunctionalCausalModel(
        g,
        alphabets,
        {"A": ErrorVariable.trivial(), "B": ErrorVariable.trivial()},
        {
            "A": det(alphabets, ("B",), lambda B: (2 * B) % 3),
            "B": det(alphabets, ("A",), lambda A: A),
        },
    )


def avg_solvable_loop() -> FunctionalCausalModel:
    """Binary 2-cycle, x1 = x2 and x2 = x1 xor u2 with u2 a fair coin."""
    g = build_graph(["X1", "X2"], [("X1", "X2"), ("X2", "X1")])
    alpha = Alphabet.of_size(2)
    alphabets = {"X1": alpha, "X2": alpha}
    table2 = table_from_function(
        alphabets, ("X1",), alpha, lambda pa, u: str(int(pa["X1"]) ^ int(u))
    )
    return FunctionalCausalModel(
        g,
        alphabets,
        {"X1": ErrorVariable.trivial(), "X2": ErrorVariable.uniform(alpha)},
        {
            "X1": det(alphabets, ("X2",), lambda X2: X2),
            "X2": Mechanism(("X1",), table2),
        },
    )


def acyclic_xyz() -> FunctionalCausalModel:
    """Three-vertex acyclic model: X stochastic, Y and Z deterministic."""
    g = build_graph(["X", "Y", "Z"], [("X", "Y"), ("X", "Z"), ("Y", "Z")])
    alpha = Alphabet.of_size(2)
    alphabets = {l: alpha for l in g.labels}
    errX, mechX = identity_exogenous(alpha, {"0": Fraction(1, 3), "1": Fraction(2, 3)})
    return FunctionalCausalModel(
        g,
        alphabets,
        {"X": errX, "Y": ErrorVariable.trivial(), "Z": ErrorVariable.trivial()},
        {
            "X": mechX,
            "Y": det(alphabets, ("X",), lambda X: X ^ 1),
            "Z": det(alphabets, ("X", "Y"), lambda X, Y: X & Y),
        },
    )


def four_cycle_graph() -> DirectedGraph:
    return build_graph(
        ["v1", "v2", "v3", "v4"],
        [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v4", "v1")],
    )


def four_cycle_model() -> FunctionalCausalModel:
    """Copy ring on the directed 4-cycle (two solutions, all-0 and all-1)."""
    g = four_cycle_graph()
    alpha = Alphabet.of_size(2)
    alphabets = {l: alpha for l in g.labels}
    errors = {l: ErrorVariable.trivial() for l in g.labels}
    mechanisms = {
        l: det(alphabets, g.parents(l), lambda **pa: next(iter(pa.values())))
        for l in g.labels
    }
    return FunctionalCausalModel(g, alphabets, errors, mechanisms)


def chain_graph() -> DirectedGraph:
    return build_graph(["A", "C", "B"], [("A", "C"), ("C", "B")])


def collider_graph() -> DirectedGraph:
    return build_graph(["A", "C", "B"], [("A", "C"), ("B", "C")])


def collider_descendant_graph() -> DirectedGraph:
    return build_graph(["A", "C", "B", "D"], [("A", "C"), ("B", "C"), ("C", "D")])


def appendix_witness_graph() -> DirectedGraph:
    """Two check vertices sharing pre-selection causes through a collider C."""
    return build_graph(
        ["v1", "v2", "R", "Rp", "C", "T", "Tp"],
        [("v1", "T"), ("R", "T"), ("R", "C"), ("Rp", "C"), ("Rp", "Tp"), ("v2", "Tp")],
    )


# -- random fuel -------------------------------------------------------------


def random_digraph(rng: random.Random, n: int, p: float = 0.35, prefix: str = "w") -> DirectedGraph:
    labels = [f"{prefix}{i}" for i in range(n)]
    edges = [(a, b) for a in labels for b in labels if rng.random() < p]
    return build_graph(labels, edges)


def random_dag(rng: random.Random, n: int, p: float = 0.4, prefix: str = "w") -> DirectedGraph:
    labels = [f"{prefix}{i}" for i in range(n)]
    edges = [
        (labels[i], labels[j])
        for i in range(n)
        for j in range(i + 1, n)
        if rng.random() < p
    ]
    return build_graph(labels, edges)


def disjoint_triples(labels):
    """Every (V1, V2, V3) with V1, V2 non-empty over the given vertices."""
    for assign in product(range(4), repeat=len(labels)):
        v1 = frozenset(l for l, a in zip(labels, assign) if a == 1)
        v2 = frozenset(l for l, a in zip(labels, assign) if a == 2)
        v3 = frozenset(l for l, a in zip(labels, assign) if a == 3)
        if v1 and v2:
            yield SeparationQuery(v1, v2, v3)
