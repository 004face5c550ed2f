"""The probability rule for cyclic models and exact distribution algebra.

``joint_distribution`` implements the direct formula

    P(x) = [sum_u prod_v p_v(u_v) [x_v = f_v(x_pa, u_v)]]  /  (same, summed over all x)

with exact rationals.  For acyclic models the denominator is 1 and the
rule coincides with the classical one.  A zero denominator means the model
is inconsistent and has no distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .errors import GraphError, InconsistentModel, ZeroProbabilityCondition
from .model import FunctionalCausalModel, Symbol, scaled_error_weights


@dataclass
class JointDistribution:
    """Exact probability table over an ordered tuple of variables.

    The table is dense: every assignment (as a symbol tuple following
    ``variables``) is present, including zero-probability ones, and the
    entries sum to exactly 1.
    """

    variables: tuple[str, ...]
    table: dict[tuple[Symbol, ...], Fraction]

    def prob(self, assignment: Mapping[str, Symbol]) -> Fraction:
        if set(assignment) != set(self.variables):
            raise GraphError(f"assignment must cover exactly {self.variables}")
        return self.table[tuple(assignment[v] for v in self.variables)]

    def to_json_dict(self) -> dict:
        return {
            "variables": list(self.variables),
            "table": {
                ",".join(key): f"{p.numerator}/{p.denominator}"
                for key, p in sorted(self.table.items())
            },
        }


def unnormalized_weights(m: FunctionalCausalModel) -> tuple[dict[tuple[Symbol, ...], int], int]:
    """Numerators of the probability rule as integers over a common denominator.

    Iterates outcome assignments in the outer loop and full error
    assignments in the inner loop, accumulating the product of priors and
    mechanism indicator functions.
    """
    labels = m.graph.labels
    weights, denom = scaled_error_weights(m)
    parent_idx = {
        l: tuple(labels.index(p) for p in m.mechanisms[l].parent_order) for l in labels
    }
    mech = {l: m.mechanisms[l].table for l in labels}
    err_symbols = [m.errors[l].alphabet.symbols for l in labels]
    out: dict[tuple[Symbol, ...], int] = {}
    for x in product(*(m.alphabets[l].symbols for l in labels)):
        acc = 0
        for u in product(*err_symbols):
            term = 1
            for i, l in enumerate(labels):
                pa = tuple(x[j] for j in parent_idx[l])
                if mech[l][(pa, u[i])] != x[i]:
                    term = 0
                    break
                term *= weights[l][u[i]]
            acc += term
        out[x] = acc
    return out, denom


def joint_distribution(m: FunctionalCausalModel) -> JointDistribution:
    """Exact joint distribution of the model over all its vertices.

    Raises :class:`InconsistentModel` when the normalization constant is
    zero (the model admits no solutions on average).
    """
    numerators, _ = unnormalized_weights(m)
    total = sum(numerators.values())
    if total == 0:
        raise InconsistentModel("model admits no solution: distribution undefined")
    table = {x: Fraction(n, total) for x, n in numerators.items()}
    return JointDistribution(m.graph.labels, table)


def is_inconsistent(m: FunctionalCausalModel) -> bool:
    numerators, _ = unnormalized_weights(m)
    return sum(numerators.values()) == 0


def normalization_constant(m: FunctionalCausalModel) -> Fraction:
    """The probability rule's denominator as an exact rational.

    Equals the average number of solutions of the model.
    """
    numerators, denom = unnormalized_weights(m)
    return Fraction(sum(numerators.values()), denom)


def marginal(d: JointDistribution, keep: Iterable[str]) -> JointDistribution:
    """Sum out every variable not in ``keep``; order follows ``d.variables``."""
    keep = set(keep)
    unknown = keep - set(d.variables)
    if unknown:
        raise GraphError(f"unknown variables in marginal: {sorted(unknown)}")
    if not keep:
        raise GraphError("marginal needs a non-empty variable set")
    kept_idx = [i for i, v in enumerate(d.variables) if v in keep]
    variables = tuple(d.variables[i] for i in kept_idx)
    table: dict[tuple[Symbol, ...], Fraction] = {}
    for key, p in d.table.items():
        short = tuple(key[i] for i in kept_idx)
        table[short] = table.get(short, Fraction(0)) + p
    return JointDistribution(variables, table)


def conditional(
    d: JointDistribution,
    targets: Iterable[str],
    given: Mapping[str, Symbol],
) -> JointDistribution:
    """Exact P(targets | given).

    Raises :class:`ZeroProbabilityCondition` when the conditioning event
    has probability zero.
    """
    targets = set(targets)
    if targets & set(given):
        raise GraphError("targets must be disjoint from the conditioning variables")
    unknown = (targets | set(given)) - set(d.variables)
    if unknown:
        raise GraphError(f"unknown variables in conditional: {sorted(unknown)}")
    if not targets:
        raise GraphError("conditional needs a non-empty target set")

    given_idx = [(d.variables.index(v), s) for v, s in given.items()]
    target_idx = [i for i, v in enumerate(d.variables) if v in targets]
    variables = tuple(d.variables[i] for i in target_idx)

    table: dict[tuple[Symbol, ...], Fraction] = {}
    mass = Fraction(0)
    for key, p in d.table.items():
        if any(key[i] != s for i, s in given_idx):
            continue
        short = tuple(key[i] for i in target_idx)
        table[short] = table.get(short, Fraction(0)) + p
        mass += p
    if mass == 0:
        raise ZeroProbabilityCondition(f"conditioning event {dict(given)} has probability 0")
    return JointDistribution(variables, {k: p / mass for k, p in table.items()})


__all__ = [
    "JointDistribution",
    "conditional",
    "is_inconsistent",
    "joint_distribution",
    "marginal",
    "normalization_constant",
    "unnormalized_weights",
]
