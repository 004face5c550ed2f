"""Solution counting, solvability classification, Markov factorization."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Mapping

from .errors import ModelStructureError
from .model import FunctionalCausalModel, Symbol, scaled_error_weights
from .inference import joint_distribution

INCONSISTENT = "inconsistent"
UNIQUELY_SOLVABLE = "uniquely_solvable"
AVERAGELY_UNIQUELY_SOLVABLE = "averagely_uniquely_solvable"
GENERAL_CONSISTENT = "general_consistent"


@dataclass
class SolvabilityReport:
    """Solution counts per error assignment plus the derived classification.

    ``counts`` is keyed by full error assignments (symbol tuples in vertex
    order).  ``markov`` holds exactly when the average number of solutions
    is 1, which characterizes the models whose distribution factorizes.
    """

    variables: tuple[str, ...]
    counts: dict[tuple[Symbol, ...], int]
    average: Fraction
    classification: str
    markov: bool

    def to_json_dict(self) -> dict:
        return {
            "counts": {
                ",".join(f"{v}={s}" for v, s in zip(self.variables, key)): n
                for key, n in sorted(self.counts.items())
            },
            "average": f"{self.average.numerator}/{self.average.denominator}",
            "class": self.classification,
            "markov": self.markov,
        }


def _count_solutions(m: FunctionalCausalModel, u: tuple[Symbol, ...]) -> int:
    labels = m.graph.labels
    parent_idx = {
        l: tuple(labels.index(p) for p in m.mechanisms[l].parent_order) for l in labels
    }
    count = 0
    for x in product(*(m.alphabets[l].symbols for l in labels)):
        for i, l in enumerate(labels):
            pa = tuple(x[j] for j in parent_idx[l])
            if m.mechanisms[l].table[(pa, u[i])] != x[i]:
                break
        else:
            count += 1
    return count


def num_solutions(m: FunctionalCausalModel, u: Mapping[str, Symbol]) -> int:
    """Number of outcome assignments satisfying every mechanism under ``u``.

    ``u`` must assign a symbol from each vertex's error alphabet.
    """
    labels = m.graph.labels
    if set(u) != set(labels):
        raise ModelStructureError(
            f"error assignment covers {sorted(u)}, expected all of {sorted(labels)}"
        )
    for l in labels:
        if u[l] not in m.errors[l].alphabet:
            raise ModelStructureError(f"{l}: error symbol {u[l]!r} outside its alphabet")
    return _count_solutions(m, tuple(u[l] for l in labels))


def solution_counts(m: FunctionalCausalModel) -> dict[tuple[Symbol, ...], int]:
    """Counts for every full error assignment, keyed in vertex order."""
    labels = m.graph.labels
    return {
        u: _count_solutions(m, u)
        for u in product(*(m.errors[l].alphabet.symbols for l in labels))
    }


def average_num_solutions(m: FunctionalCausalModel) -> Fraction:
    """Expected number of solutions under the error priors, exact."""
    labels = m.graph.labels
    weights, denom = scaled_error_weights(m)
    total = 0
    for u, n in solution_counts(m).items():
        if n == 0:
            continue
        w = 1
        for l, s in zip(labels, u):
            w *= weights[l][s]
        total += n * w
    return Fraction(total, denom)


def classify(m: FunctionalCausalModel) -> SolvabilityReport:
    """Full report: counts, average, class, Markov flag.

    Class precedence: inconsistent (average 0), then uniquely solvable
    (every count is 1), then averagely uniquely solvable (average 1),
    then the remaining consistent bucket.
    """
    labels = m.graph.labels
    counts = solution_counts(m)
    weights, denom = scaled_error_weights(m)
    total = 0
    for u, n in counts.items():
        w = 1
        for l, s in zip(labels, u):
            w *= weights[l][s]
        total += n * w
    average = Fraction(total, denom)
    if average == 0:
        classification = INCONSISTENT
    elif all(n == 1 for n in counts.values()):
        classification = UNIQUELY_SOLVABLE
    elif average == 1:
        classification = AVERAGELY_UNIQUELY_SOLVABLE
    else:
        classification = GENERAL_CONSISTENT
    return SolvabilityReport(labels, counts, average, classification, average == 1)


def mechanism_conditional(m: FunctionalCausalModel, label: str) -> dict[tuple[Symbol, ...], dict[Symbol, Fraction]]:
    """P(x_v | parent assignment) = sum_u p(u) [f(pa, u) = x_v].

    Keys are parent symbol tuples in the mechanism's parent order; each
    column sums to exactly 1.
    """
    mech = m.mechanisms[label]
    err = m.errors[label]
    out: dict[tuple[Symbol, ...], dict[Symbol, Fraction]] = {}
    for pa in product(*(m.alphabets[p].symbols for p in mech.parent_order)):
        column = {s: Fraction(0) for s in m.alphabets[label]}
        for u in err.alphabet:
            column[mech.table[(pa, u)]] += err.dist[u]
        out[pa] = column
    return out


def is_markov(m: FunctionalCausalModel) -> bool:
    """True iff the joint distribution equals the product of the per-vertex
    mechanism conditionals, exactly.  Raises on inconsistent models, whose
    distribution is undefined.
    """
    d = joint_distribution(m)
    labels = m.graph.labels
    conditionals = {l: mechanism_conditional(m, l) for l in labels}
    parent_idx = {
        l: tuple(labels.index(p) for p in m.mechanisms[l].parent_order) for l in labels
    }
    for x, p in d.table.items():
        factored = Fraction(1)
        for i, l in enumerate(labels):
            pa = tuple(x[j] for j in parent_idx[l])
            factored *= conditionals[l][pa][x[i]]
            if factored == 0:
                break
        if p != factored:
            return False
    return True


__all__ = [
    "AVERAGELY_UNIQUELY_SOLVABLE",
    "GENERAL_CONSISTENT",
    "INCONSISTENT",
    "UNIQUELY_SOLVABLE",
    "SolvabilityReport",
    "average_num_solutions",
    "classify",
    "is_markov",
    "mechanism_conditional",
    "num_solutions",
    "solution_counts",
]
