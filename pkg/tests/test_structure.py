"""Structural search: strong connectivity, circuits, P-components, and the
token-forwarding machinery for marked graphs, cross-checked against naive
path oracles."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lucent import (
    Marking,
    Net,
    elementary_circuits,
    is_covered_by_p_components,
    is_strongly_connected,
    max_path_token_count,
    p_components,
    token_free_feed,
)
from lucent.errors import CapExceededError, NotTNetError, NoWitnessError, UnknownNodeError
from lucent.structure import enabled_feeds

from .oracles import (
    all_elementary_circuits,
    feed_witness_set,
    max_token_count_over_paths,
    p_component_place_sets_by_subsets,
)
from .test_net_core import ring


# -- strong connectivity ------------------------------------------------------


def test_choice1_strongly_connected(choice1):
    net, _ = choice1
    assert is_strongly_connected(net)


def test_branch_subnet_not_strongly_connected(choice1):
    net, _ = choice1
    assert not is_strongly_connected(net.span(["ta", "p1", "tc"]))


def test_singleton_strongly_connected(choice1):
    net, _ = choice1
    assert is_strongly_connected(net.span(["p0"]))


# -- elementary circuits ---------------------------------------------------------


def test_ring2_single_circuit(ring2):
    net, _ = ring2
    circuits = elementary_circuits(net)
    assert len(circuits) == 1
    assert [x.name for x in circuits[0].nodes] == ["p1", "t1", "p2", "t2"]


def test_choice1_two_circuits(choice1):
    net, _ = choice1
    circuits = elementary_circuits(net)
    assert len(circuits) == 2
    names = {tuple(x.name for x in c.nodes) for c in circuits}
    assert names == {("p0", "ta", "p1", "tc"), ("p0", "tb", "p2", "td")}


def test_acyclic_subnet_has_no_circuits(choice1):
    net, _ = choice1
    assert elementary_circuits(net.span(["ta", "p1", "tc"])) == ()


def test_circuit_cap_exceeded(fig1):
    net, _ = fig1
    with pytest.raises(CapExceededError):
        elementary_circuits(net, cap=1)


def test_circuits_match_oracle(fig1, choice1):
    for net, _ in (fig1, choice1):
        mine = {c.nodes for c in elementary_circuits(net)}
        assert mine == all_elementary_circuits(net)


def test_circuits_deterministic(fig1):
    net, _ = fig1
    assert elementary_circuits(net) == elementary_circuits(net)


# -- P-components --------------------------------------------------------------------


def test_choice1_p_components(choice1):
    # the whole net is a strongly connected P-net closed over its places;
    # no proper place subset satisfies closure (checked by subset search)
    net, _ = choice1
    comps = p_components(net)
    assert len(comps) == 1
    assert comps[0].nodes == net.node_set
    assert is_covered_by_p_components(net)


def test_t_net_p_components_are_circuits(ring2):
    net, _ = ring2
    comps = p_components(net)
    circuit_node_sets = {frozenset(c.nodes) for c in elementary_circuits(net)}
    assert {frozenset(c.nodes) for c in comps} == circuit_node_sets


def test_fig1_p_components(fig1):
    net, _ = fig1
    comps = p_components(net)
    sets = {tuple(sorted(x.name for x in c.nodes)) for c in comps}
    assert sets == {
        tuple(sorted(["start", "p1", "p4", "p5", "end", "t0", "t1", "t2", "t4", "t5", "t8", "t*"])),
        tuple(sorted(["start", "p2", "p4", "p5", "end", "t0", "t1", "t2", "t4", "t5", "t8", "t*"])),
    }
    assert is_covered_by_p_components(net)


def test_join_transition_needs_closure():
    # two places feed one joint transition; a component with only one of them
    # would give the join a dangling pre-side, so no proper component exists
    net = Net.build(
        "join",
        ["a", "b", "c"],
        ["t", "u"],
        [("a", "t"), ("b", "t"), ("t", "c"), ("c", "u"), ("u", "a"), ("u", "b")],
    )
    comps = p_components(net)
    assert all(len(c.places) != 1 or c.places[0].name == "c" for c in comps)


def test_component_search_cap():
    net = ring(9, "big")
    with pytest.raises(CapExceededError):
        p_components(net, cap=2)


def test_p_components_match_subset_oracle(fig1, choice1, ring2, ring2x3):
    for net, _ in (fig1, choice1, ring2, ring2x3):
        mine = {frozenset(c.places) for c in p_components(net)}
        assert mine == p_component_place_sets_by_subsets(net)


@given(st.integers(min_value=2, max_value=6))
@settings(max_examples=10, deadline=None)
def test_every_circuit_lies_in_a_component(n):
    net = ring(n)
    comps = [frozenset(c.nodes) for c in p_components(net)]
    for circuit in elementary_circuits(net):
        assert any(set(circuit.nodes) <= comp for comp in comps)


# -- token-free feeding paths ----------------------------------------------------------


def test_ring2_feed(ring2):
    net, _ = ring2
    m = Marking.over(net, {"p2": 1})
    witness = token_free_feed(net, m, "t1", "p1")
    assert witness.tau.name == "t2"
    assert [x.name for x in witness.delta.nodes] == ["t2", "p1", "t1"]


def test_four_ring_feed():
    net = ring(4)
    m = Marking.over(net, {"p1": 1})
    witness = token_free_feed(net, m, "t3", "p3")
    assert witness.tau.name == "t1"
    assert [x.name for x in witness.delta.nodes] == ["t1", "p2", "t2", "p3", "t3"]


def test_feed_split_iteration_through_stuck_join():
    # two branches join at tu before the queried place; the branch that sorts
    # first carries a stuck token, so the search must split at the join and
    # restart from its empty pre-place, returning the clean branch's path
    net = Net.build(
        "split",
        ["pz", "pa", "pb", "py", "pc"],
        ["ta", "tb", "tu", "tc"],
        [
            ("pz", "ta"), ("ta", "pa"), ("pa", "tu"),
            ("py", "tb"), ("tb", "pb"), ("pb", "tu"),
            ("tu", "pc"), ("pc", "tc"), ("tc", "pz"), ("tc", "py"),
        ],
    )
    assert net.is_t_net()
    m = Marking.over(net, {"pz": 1, "pa": 1, "py": 1})
    witness = token_free_feed(net, m, "tc", "pc")
    assert witness.tau.name == "tb"
    assert [x.name for x in witness.delta.nodes] == ["tb", "pb", "tu", "pc", "tc"]
    oracle = feed_witness_set(net, m, net.node("tc"), net.node("pc"))
    assert witness.delta.nodes in {p.nodes for p in oracle}


def test_feed_double_split_across_two_joins():
    # a second stuck join upstream forces the iteration to split twice
    net = Net.build(
        "split2",
        ["pz", "pa", "pb", "py", "pc", "pw", "pv"],
        ["ta", "tb", "tu", "tc", "tw"],
        [
            ("pz", "ta"), ("ta", "pa"), ("pa", "tu"),
            ("py", "tb"), ("tb", "pb"), ("pb", "tu"),
            ("pv", "tb"),
            ("tu", "pc"), ("pc", "tc"), ("tc", "pz"), ("tc", "py"),
            ("tc", "pw"), ("pw", "tw"), ("tw", "pv"),
        ],
    )
    assert net.is_t_net()
    m = Marking.over(net, {"pz": 1, "pa": 1, "py": 1, "pw": 1})
    witness = token_free_feed(net, m, "tc", "pc")
    witness.check(net, m, net.node("tc"), net.node("pc"))
    oracle = feed_witness_set(net, m, net.node("tc"), net.node("pc"))
    assert witness.delta.nodes in {p.nodes for p in oracle}


def test_feed_split_lands_after_the_last_marked_place():
    # the branch picked first carries two stuck tokens (both joins on it wait
    # for their empty side), so the split must land right after the second
    # token; an earlier split would smuggle a marked tail into the result
    net = Net.build(
        "split3",
        ["pz", "pa1", "pa2", "px", "pw", "pb1", "pb2", "py", "pc"],
        ["ta", "tm", "tm2", "tu", "tb", "tx", "tc"],
        [
            ("pz", "ta"), ("ta", "pa1"), ("pa1", "tm"), ("px", "tm"), ("tm", "pa2"),
            ("pa2", "tu"), ("pb2", "tu"), ("tu", "pc"), ("pc", "tc"),
            ("tc", "pz"), ("tc", "py"), ("tc", "pw"),
            ("pw", "tx"), ("tx", "px"),
            ("py", "tb"), ("tb", "pb1"), ("pb1", "tm2"), ("tm2", "pb2"),
        ],
    )
    assert net.is_t_net()
    m = Marking.over(net, {"pz": 1, "pa1": 1, "pa2": 1, "py": 1, "pw": 1})
    witness = token_free_feed(net, m, "tc", "pc")
    assert witness.tau.name == "tb"
    assert [x.name for x in witness.delta.nodes] == [
        "tb", "pb1", "tm2", "pb2", "tu", "pc", "tc",
    ]
    oracle = feed_witness_set(net, m, net.node("tc"), net.node("pc"))
    assert witness.delta.nodes in {p.nodes for p in oracle}


def test_feed_rejects_marked_pre_place(ring2):
    net, _ = ring2
    with pytest.raises(NoWitnessError):
        token_free_feed(net, Marking.over(net, {"p1": 1}), "t1", "p1")


def test_feed_rejects_non_t_net(choice1):
    net, _ = choice1
    with pytest.raises(NotTNetError):
        token_free_feed(net, Marking.over(net, {"p0": 1}), "tc", "p1")


def test_feed_rejects_non_pre_place(ring2):
    net, _ = ring2
    with pytest.raises(UnknownNodeError):
        token_free_feed(net, Marking.over(net, {"p1": 1}), "t1", "p2")


def test_feed_dead_t_net_has_no_witness(ring2):
    net, _ = ring2
    with pytest.raises(NoWitnessError):
        token_free_feed(net, Marking.over(net, {}), "t1", "p1")


def _t_net_corpus():
    """Small live marked graphs, some with joins, for oracle agreement."""
    nets = [(ring(n), {"p1": 1}) for n in (2, 3, 4, 5)]
    fork = Net.build(
        "fork",
        ["p1", "p2", "p3", "p4"],
        ["t1", "t2", "t3"],
        [
            ("p1", "t1"),
            ("t1", "p2"),
            ("t1", "p3"),
            ("p2", "t2"),
            ("p3", "t3"),
            ("t2", "p4"),
            ("p4", "t3"),
            ("t3", "p1"),
        ],
    )
    nets.append((fork, {"p1": 1}))
    return nets


def test_feed_agrees_with_oracle_on_small_t_nets():
    from lucent import explore

    checked = 0
    for net, tokens in _t_net_corpus():
        assert net.is_t_net()
        rg = explore(net, Marking.over(net, tokens), 10_000)
        for m in rg.states:
            for t in net.transitions:
                for q in net.preset(t):
                    if m.get(q) != 0:
                        continue
                    oracle = feed_witness_set(net, m, t, q)
                    witness = token_free_feed(net, m, t, q)
                    assert oracle, f"oracle empty but algorithm found {witness}"
                    assert witness.delta.nodes in {p.nodes for p in oracle}
                    checked += 1
    assert checked > 20


def test_feed_iteration_bounded_by_node_count():
    # indirectly: the witness path is elementary, so its length is bounded
    for net, tokens in _t_net_corpus():
        m = Marking.over(net, tokens)
        for t in net.transitions:
            for q in net.preset(t):
                if m.get(q) == 0:
                    w = token_free_feed(net, m, t, q)
                    assert len(w.delta.nodes) <= len(net.nodes)


def test_enabled_feeds_sorted_shortest_first(ring2):
    net, _ = ring2
    m = Marking.over(net, {"p2": 1})
    feeds = enabled_feeds(net, m, net.node("p1"))
    lengths = [len(w.delta.nodes) for w in feeds]
    assert lengths == sorted(lengths)


# -- path token bounds --------------------------------------------------------------------


def test_max_path_count_ring2(ring2):
    net, _ = ring2
    m = Marking.over(net, {"p1": 1})
    assert max_path_token_count(net, m, avoid="t1") == 1
    assert max_path_token_count(net, Marking.over(net, {})) == 0


def test_max_path_count_matches_oracle():
    for net, tokens in _t_net_corpus():
        m = Marking.over(net, tokens)
        for avoid in (None, net.transitions[0]):
            assert max_path_token_count(net, m, avoid) == max_token_count_over_paths(
                net, m, avoid
            )


def test_max_path_cap(ring2):
    net, _ = ring2
    with pytest.raises(CapExceededError):
        max_path_token_count(net, Marking.over(net, {"p1": 1}), cap=2)


def test_perpetual_t_system_bound_away_from_cluster(ring2):
    # with the cluster transition excluded, no path carries more than one token
    from lucent import explore, regeneration_clusters

    net, m0 = ring2
    rg = explore(net, m0, 100)
    for cl in regeneration_clusters(rg):
        t_cl = cl.transitions[0]
        for m in rg.states:
            assert max_path_token_count(net, m, avoid=t_cl) <= 1
