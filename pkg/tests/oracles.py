"""Independent brute-force oracles.

Each function recomputes a quantity straight from its defining formula,
deliberately sharing no code with the production paths it checks.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from cfcm.inference import JointDistribution
from cfcm.model import FunctionalCausalModel


def literal_acyclic_joint(m: FunctionalCausalModel) -> JointDistribution:
    """The acyclic probability rule as written: for every outcome
    assignment, sum the product of error priors and mechanism indicators
    over the full error space.
    """
    labels = m.graph.labels
    table = {}
    for x in product(*(m.alphabets[l].symbols for l in labels)):
        xmap = dict(zip(labels, x))
        total = Fraction(0)
        for u in product(*(m.errors[l].alphabet.symbols for l in labels)):
            term = Fraction(1)
            for l, ul in zip(labels, u):
                mech = m.mechanisms[l]
                pa = tuple(xmap[p] for p in mech.parent_order)
                if mech.table[(pa, ul)] != xmap[l]:
                    term = Fraction(0)
                    break
                term *= m.errors[l].dist[ul]
            total += term
        table[x] = total
    return JointDistribution(labels, table)


def reachable_from(g, label) -> frozenset:
    """Descendant oracle: repeated edge relaxation until a fixed point."""
    reached = set()
    frontier = {head for tail, head in g.edges if tail == label}
    while frontier:
        reached |= frontier
        frontier = {
            head for tail, head in g.edges if tail in reached
        } - reached
    return frozenset(reached)


def acyclic_by_permutation(g) -> bool:
    """A graph is acyclic iff some vertex order makes every edge forward."""
    from itertools import permutations

    labels = g.labels
    for perm in permutations(labels):
        rank = {l: i for i, l in enumerate(perm)}
        if all(rank[a] < rank[b] for a, b in g.edges):
            return True
    return False


def ci_by_division(d: JointDistribution, v1, v2, v3) -> bool:
    """Conditional independence checked with explicit division:
    P(x1, x2 | x3) == P(x1 | x3) * P(x2 | x3) on every supported x3."""
    order = d.variables
    i1 = [i for i, v in enumerate(order) if v in v1]
    i2 = [i for i, v in enumerate(order) if v in v2]
    i3 = [i for i, v in enumerate(order) if v in v3]

    def collect(indices):
        out: dict = {}
        for key, p in d.table.items():
            sub = tuple(key[i] for i in indices)
            out[sub] = out.get(sub, Fraction(0)) + p
        return out

    p123 = collect(i1 + i2 + i3)
    p13 = collect(i1 + i3)
    p23 = collect(i2 + i3)
    p3 = collect(i3)
    for key in p123:
        k1 = key[: len(i1)]
        k2 = key[len(i1): len(i1) + len(i2)]
        k3 = key[len(i1) + len(i2):]
        if p3[k3] == 0:
            continue
        lhs = p123[key] / p3[k3]
        rhs = (p13[k1 + k3] / p3[k3]) * (p23[k2 + k3] / p3[k3])
        if lhs != rhs:
            return False
    return True


def count_solutions(m: FunctionalCausalModel, u: dict) -> int:
    """Solution counting straight from the defining sum of indicators."""
    labels = m.graph.labels
    count = 0
    for x in product(*(m.alphabets[l].symbols for l in labels)):
        xmap = dict(zip(labels, x))
        ok = True
        for l in labels:
            mech = m.mechanisms[l]
            pa = tuple(xmap[p] for p in mech.parent_order)
            if mech.table[(pa, u[l])] != xmap[l]:
                ok = False
                break
        if ok:
            count += 1
    return count
