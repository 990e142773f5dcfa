import math

import pytest

from mallnets.engine import candidate_bindings, expand
from mallnets.errors import FormulaSyntaxError
from mallnets.proofnet import (
    POS, TOP, HyperLink, Link, Place, ProofStructure, check_trip,
    find_singularity_free_loop, first_counterexample, has_switching_cycle, is_mll_net,
    Trip, TripStep, is_proof_net, net_to_text, parse_net, slice_for, slices, to_dot, validate_bps,
)

from conftest import read


def positive_rules(s):
    p = s.structure
    return sorted(p.links[l].rule for l in s.links if p.links[l].positive)


def test_example_net_is_a_bps(example_net):
    assert validate_bps(example_net).ok


def test_untoggled_pair_is_untoggled(example_net):
    text = "\n".join(l for l in net_to_text(example_net).splitlines()
                     if not l.startswith("jumpedge n1@"))
    report = validate_bps(parse_net(text))
    assert "toggled" in report.conditions()


def test_shared_jump_place_is_rejected():
    p = ProofStructure(
        [Place("g0", "a"), Place("g1", "b"), Place("j")],
        [Link("x", POS, (), ("g0", "j"), "j"), Link("y", POS, (), ("g1", "j"), "j")],
        [HyperLink("X", POS, ("x",)), HyperLink("Y", POS, ("y",))], (), ["g0", "g1"])
    assert "jump-place" in validate_bps(p).conditions()


def test_adjacent_same_polarity_is_rejected():
    p = ProofStructure(
        [Place("g0", "a"), Place("m", "b")],
        [Link("x", POS, ("m",), ("g0",)), Link("y", POS, (), ("m",))],
        [HyperLink("X", POS, ("x",)), HyperLink("Y", POS, ("y",))], (), ["g0"])
    assert "polarity" in validate_bps(p).conditions()


def test_example_has_four_slices(example_net):
    assert len(list(slices(example_net))) == 4


def test_multiplicative_structure_has_one_slice(tangle_base):
    assert len(list(slices(tangle_base))) == 1


def test_slice_a_d_erases_b_and_e_variants(example_net):
    p = example_net

    def branch(s):
        return {p.label(q) for q in p.typed(p.links[s.chosen["n0@c5110a.m1-"]].top)}

    (ad,) = [s for s in slices(p) if {"a", "d"} <= branch(s)]
    assert positive_rules(ad) == ["n0#1", "n1#1", "n2#1"]
    assert slice_for(example_net, ad.chosen) == ad


def test_slice_count_bounded_by_product(corpus):
    for p in corpus[:600]:
        bound = math.prod(len(h.links) for h in p.negative_hyperlinks())
        n = 0
        for s in slices(p):
            n += 1
            for h in p.negative_hyperlinks():
                assert len(set(h.links) & s.links) <= 1
        assert 1 <= n <= bound


def test_elementary_structure_has_no_loop(example_program):
    p = ProofStructure.empty(["n0"])
    p = expand(p, candidate_bindings(p, example_program[0])[0])
    assert all(find_singularity_free_loop(s) is None for s in slices(p))


def test_example_slices_have_no_loop(example_net):
    assert all(find_singularity_free_loop(s) is None for s in slices(example_net))
    assert is_proof_net(example_net)


def test_tangle_candidate_has_checked_loop(tangle_base, tangle_candidate):
    bad = expand(tangle_base, tangle_candidate)
    found = first_counterexample(bad)
    assert found is not None
    s, trip = found
    assert len(trip) > 2
    assert check_trip(s, trip) == []
    assert not is_proof_net(bad)


def test_empty_structure_is_a_net():
    assert is_proof_net(ProofStructure.empty(["a", "b"]))
    assert is_proof_net(ProofStructure())


def test_check_trip_flags_tampering(tangle_base, tangle_candidate):
    s, trip = first_counterexample(expand(tangle_base, tangle_candidate))
    g_neg = {l for l in s.links if not s.structure.links[l].positive}
    i = next(i for i, st in enumerate(trip.steps) if st.link in g_neg)
    steps = list(trip.steps)
    steps[i] = TripStep(steps[i].link, TOP, TOP)
    assert any("singularity" in m for m in check_trip(s, Trip(tuple(steps), trip.connectors)))
    short = Trip(trip.steps[:2], trip.connectors[:2])
    assert check_trip(s, short)


def test_trip_search_agrees_with_switching_oracle(exhaustive, randoms):
    for p in exhaustive + randoms[:200]:
        for s in slices(p):
            assert (find_singularity_free_loop(s) is None) == (not has_switching_cycle(s)), \
                net_to_text(p)


def test_single_slice_matches_direct_check(corpus):
    checked = 0
    for p in corpus:
        if all(len(h.links) == 1 for h in p.negative_hyperlinks()):
            assert is_mll_net(p) == is_proof_net(p)
            checked += 1
    assert checked > 50


def test_direct_check_refuses_additives(example_net):
    with pytest.raises(ValueError):
        is_mll_net(example_net)


def test_text_roundtrip(example_net, corpus):
    for p in [example_net] + corpus[::25]:
        assert parse_net(net_to_text(p)) == p


def test_file_is_the_serialization(tangle_base):
    assert net_to_text(tangle_base) == read("tangle-base.net")


@pytest.mark.parametrize("text", ["frob x", "place", "link x ? top= bottom=",
                                  "hyper h + nolinks", "link x + top= bottom= shiny"])
def test_bad_net_text(text):
    with pytest.raises(FormulaSyntaxError):
        parse_net(text)


def test_comments_do_not_eat_rule_labels(example_net):
    text = "# header\n" + net_to_text(example_net).replace("\n", "  # note\n", 1)
    assert parse_net(text) == example_net


def test_dot_export(example_net):
    dot = to_dot(example_net, highlight=["n0@c5110a+1"])
    assert dot.startswith('digraph "net"')
    assert "shape=triangle" in dot and "shape=circle" in dot
    assert "style=dashed" in dot and "fillcolor=grey" in dot
    assert dot.count("->") >= len(example_net.jump_edges)
