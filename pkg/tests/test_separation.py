import random

import pytest

from cfcm.errors import GraphError
from cfcm.graph import build_graph, is_acyclic
from cfcm.inference import joint_distribution, marginal
from cfcm.model import random_model, xor_witness_model
from cfcm.separation import (
    PSeparationWitness,
    SeparationQuery,
    ci_holds,
    d_separated,
    p_separated,
    path_enumeration_connected,
    _walk_connected,
)

from catalog import (
    chain_graph,
    collider_descendant_graph,
    collider_graph,
    disjoint_triples,
    dsep_cycle_graph,
    four_cycle_graph,
    neal_graph,
    neal_model,
    random_dag,
    random_digraph,
    xor_loop,
)
from oracles import ci_by_division


def q(x, y, z=()):
    return SeparationQuery.of(x, y, z)


def test_chain_separations():
    g = chain_graph()
    assert d_separated(g, q(["A"], ["B"], ["C"]))
    assert not d_separated(g, q(["A"], ["B"]))


def test_collider_separations():
    g = collider_graph()
    assert d_separated(g, q(["A"], ["B"]))
    assert not d_separated(g, q(["A"], ["B"], ["C"]))


def test_collider_descendant_unblocks():
    g = collider_descendant_graph()
    assert not d_separated(g, q(["A"], ["B"], ["D"]))
    assert d_separated(g, q(["A"], ["B"]))


def test_fork_separations():
    g = build_graph(["A", "C", "B"], [("C", "A"), ("C", "B")])
    assert not d_separated(g, q(["A"], ["B"]))
    assert d_separated(g, q(["A"], ["B"], ["C"]))


def test_neal_d_separation_holds():
    assert d_separated(neal_graph(), q(["v4"], ["v5"], ["v2"]))


def test_neal_local_markov_collider_effect():
    # conditioning on the loop partner v1 d-connects v2 and v3's neighbours
    g = dsep_cycle_graph()
    assert not d_separated(g, q(["v2"], ["v3"], ["v1", "v4"]))


def test_malformed_queries_raise():
    g = chain_graph()
    with pytest.raises(GraphError):
        d_separated(g, SeparationQuery(frozenset(), frozenset({"B"}), frozenset()))
    with pytest.raises(GraphError):
        d_separated(g, q(["A"], ["A"]))
    with pytest.raises(GraphError):
        d_separated(g, q(["A"], ["Z"]))


def test_p_separation_dsep_cycle_examples():
    g = dsep_cycle_graph()
    assert p_separated(g, q(["v3"], ["v4"])) == PSeparationWitness(False, None)
    got = p_separated(g, q(["v3"], ["v4"], ["v1", "v2"]))
    assert got.separated and got.witness == ("v1",)


def test_p_separation_four_cycle():
    g = four_cycle_graph()
    assert p_separated(g, q(["v1"], ["v3"], ["v2", "v4"])).separated
    assert p_separated(g, q(["v2"], ["v4"], ["v1", "v3"])).separated


def test_p_separation_neal_connected():
    assert not p_separated(neal_graph(), q(["v4"], ["v5"], ["v2"])).separated


def test_p_witness_satisfies_the_definition():
    g = dsep_cycle_graph()
    query = q(["v3"], ["v4"], ["v1", "v2"])
    witness = p_separated(g, query)
    from cfcm.teleportation import build_teleportation_graph

    tg = build_teleportation_graph(g, witness.witness)
    augmented = SeparationQuery(
        query.v1, query.v2, query.v3 | frozenset(tg.post.values())
    )
    assert d_separated(tg.graph, augmented)


def test_d_implies_p_on_dags_and_conversely():
    rng = random.Random(2)
    for _ in range(12):
        g = random_dag(rng, rng.randint(1, 4))
        for query in disjoint_triples(g.labels):
            assert p_separated(g, query).separated == d_separated(g, query)


def test_ci_xor_loop_marginal_dependent():
    d = joint_distribution(xor_loop())
    m34 = marginal(d, {"v3", "v4"})
    assert not ci_holds(m34, q(["v3"], ["v4"]))
    assert not ci_holds(d, q(["v3"], ["v4"]))


def test_ci_xor_loop_conditioned_on_loop():
    d = joint_distribution(xor_loop())
    assert ci_holds(d, q(["v3"], ["v4"], ["v1", "v2"]))


def test_ci_independent_bits():
    g = build_graph(["A", "B"], [])
    d = joint_distribution(xor_witness_model(g))
    assert ci_holds(d, q(["A"], ["B"]))


def test_ci_neal_fails_given_v2():
    d = joint_distribution(neal_model())
    assert not ci_holds(d, q(["v4"], ["v5"], ["v2"]))


def test_ci_matches_division_oracle():
    rng = random.Random(41)
    done = 0
    seed = 0
    while done < 20:
        seed += 1
        g = random_digraph(rng, 3, p=0.5)
        m = random_model(g, 2, 2, seed=600 + seed)
        try:
            d = joint_distribution(m)
        except Exception:
            continue
        done += 1
        for query in disjoint_triples(g.labels):
            assert ci_holds(d, query) == ci_by_division(d, query.v1, query.v2, query.v3)


def test_walk_decider_matches_path_enumerator_exhaustively():
    # complete corpus: every labelled 3-vertex digraph (cycles, self-loops)
    labels = ("a", "b", "c")
    pairs = [(x, y) for x in labels for y in labels]
    for mask in range(2 ** len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        g = build_graph(labels, edges)
        for query in disjoint_triples(labels):
            assert _walk_connected(g, query.v1, query.v2, query.v3) == \
                path_enumeration_connected(g, query.v1, query.v2, query.v3)


@pytest.mark.parametrize("n,trials", [(4, 40), (5, 25), (6, 10)])
def test_walk_decider_matches_path_enumerator_random(n, trials):
    rng = random.Random(n)
    for _ in range(trials):
        g = random_digraph(rng, n, p=0.3)
        for query in disjoint_triples(g.labels):
            assert _walk_connected(g, query.v1, query.v2, query.v3) == \
                path_enumeration_connected(g, query.v1, query.v2, query.v3)


def test_no_path_pairs_stay_separated_under_any_conditioning():
    g = build_graph(["A", "B", "C"], [("A", "C")])  # B isolated
    for z in ([], ["C"]):
        assert d_separated(g, q(["A"], ["B"], z))
        assert p_separated(g, q(["A"], ["B"], z)).separated


def test_soundness_on_random_cyclic_models_small():
    rng = random.Random(43)
    done = 0
    seed = 0
    while done < 15:
        seed += 1
        g = random_digraph(rng, 3, p=0.5)
        if is_acyclic(g):
            continue
        m = random_model(g, 2, 2, seed=700 + seed)
        try:
            d = joint_distribution(m)
        except Exception:
            continue
        done += 1
        for query in disjoint_triples(g.labels):
            if p_separated(g, query).separated:
                assert ci_holds(d, query)
