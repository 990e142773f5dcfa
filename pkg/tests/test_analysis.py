import pytest

from mallnets.analysis import (
    above, domination_forest, domination_forest_bruteforce, forest_violations,
    immediate_dominator, is_proof_net_fast, isolation_region, joint_dominator,
    maximal_jump_edges, maximal_switching, roots, trips_between,
)
from mallnets.engine import expand
from mallnets.proofnet import (
    NEG, POS, HyperLink, Link, Place, ProofStructure, find_singularity_free_loop,
    is_proof_net, slices,
)

R, M1, M2, X, S2 = "r@9c197e.m1-1", "s@56e88c.m1-1", "s@56e88c.m2-1", "x@f8c7bf.m1-1", "r@9c197e.m2-1"


def only_slice(p):
    (s,) = slices(p)
    return s


def tower(jumps):
    """x below n below z; y a separate negative link.  ``jumps`` from x/z to y."""
    places = [Place("g0", "a"), Place("q", "b"), Place("r", "c"), Place("t", "d"),
              Place("g1", "e"), Place("x*"), Place("z*"), Place("y*")]
    links = [
        Link("x", POS, ("q",), ("g0", "x*"), "x*"),
        Link("n", NEG, ("r",), ("q",)),
        Link("z", POS, (), ("r", "z*"), "z*"),
        Link("y", NEG, ("t", "y*"), ("g1",), "y*"),
        Link("u", POS, (), ("t",)),
    ]
    hypers = [HyperLink(l.id.upper(), l.polarity, (l.id,)) for l in links]
    return ProofStructure(places, links, hypers, jumps, ["g0", "g1"])


def test_above_follows_places_only():
    s = only_slice(tower([("x", "y"), ("z", "y")]))
    assert above(s, "x") == {"n", "z"}
    assert above(s, "z") == set()


def test_higher_competitor_wins():
    s = only_slice(tower([("x", "y"), ("z", "y")]))
    assert maximal_jump_edges(s) == {("z", "y")}


def test_single_jump_kept():
    s = only_slice(tower([("x", "y")]))
    assert maximal_jump_edges(s) == {("x", "y")}


def test_incomparable_sources_both_kept(example_net):
    for s in slices(example_net):
        kept = maximal_jump_edges(s)
        targets = [y for _, y in kept]
        assert len(targets) == len(set(targets))
        assert kept <= s.jump_edges


def test_fast_check_golden(example_net, tangle_base, tangle_candidate):
    assert is_proof_net_fast(example_net) and is_proof_net(example_net)
    bad = expand(tangle_base, tangle_candidate)
    assert not is_proof_net_fast(bad) and not is_proof_net(bad)


def test_fast_check_agrees_on_random_structures(randoms):
    for p in randoms[:200]:
        assert is_proof_net_fast(p) == is_proof_net(p)


def test_tangle_forest(tangle_base):
    s = maximal_switching(only_slice(tangle_base))
    f = domination_forest(s)
    assert f.roots == ("r@9c197e+1",)
    assert f.to_text() == f"{R}\n  {M1}\n    {X}\n  {M2}\n{S2}\n"
    assert f.lt(R, X) and not f.leq(M1, M2) and not f.leq(M2, M1)
    assert f.dominators == domination_forest_bruteforce(s).dominators


def test_example_chain(example_net):
    for s in slices(example_net):
        f = domination_forest(maximal_switching(s))
        top, dummy = sorted(f.elements)
        assert f.lt(top, dummy)
        assert immediate_dominator(f, dummy) == top
        assert immediate_dominator(f, top) is None


def test_elementary_negative_link_is_minimal(tangle_program):
    from mallnets.engine import candidate_bindings
    p = ProofStructure.empty(["x"])
    p = expand(p, candidate_bindings(p, tangle_program["x"])[0])
    f = domination_forest(maximal_switching(only_slice(p)))
    (only,) = f.elements
    assert not p.links[only].positive
    assert immediate_dominator(f, only) is None and f.unreached == frozenset()


def test_parallel_branches_incomparable(tangle_base):
    f = domination_forest(maximal_switching(only_slice(tangle_base)))
    assert not f.leq(R, S2) and not f.leq(S2, R)


def test_joint_dominator(tangle_base):
    f = domination_forest(maximal_switching(only_slice(tangle_base)))
    assert joint_dominator(f, [M1]) == M1
    assert joint_dominator(f, [R, X]) == R
    assert joint_dominator(f, [M1, M2]) == R
    assert joint_dominator(f, [X, S2]) is None
    with pytest.raises(ValueError):
        joint_dominator(f, [])


def test_isolation_regions(tangle_base):
    s = maximal_switching(only_slice(tangle_base))
    assert isolation_region(s, M1, M2) == {M1, M2, X}
    assert isolation_region(s, R, R) == {M1, M2, X}
    assert isolation_region(s, X, S2) == {R, M1, M2, X, S2}


def test_trips_between(tangle_base):
    s = maximal_switching(only_slice(tangle_base))
    trips = list(trips_between(s, M1, M2))
    assert trips
    for steps in trips:
        assert {l for l, _, _ in steps} - {M1} <= {"s@56e88c+1"}


def _correct_slices(structures):
    for p in structures:
        for s in slices(p):
            sm = maximal_switching(s)
            if find_singularity_free_loop(sm) is None:
                yield sm


def test_production_matches_brute_force_on_correct_slices(exhaustive, randoms):
    n = 0
    for sm in _correct_slices(exhaustive + randoms[:300]):
        assert domination_forest(sm).dominators == domination_forest_bruteforce(sm).dominators
        n += 1
    assert n > 500


def test_forest_laws_sample(randoms):
    for p in randoms[:150]:
        for s in slices(p):
            assert forest_violations(domination_forest(maximal_switching(s))) == []


def test_forest_violations_detects_bad_order(tangle_base):
    f = domination_forest(maximal_switching(only_slice(tangle_base)))
    f.dominators = {**f.dominators, X: frozenset({X, M1, M2})}
    assert any("forest" in v for v in forest_violations(f))


def test_roots(example_net):
    for s in slices(example_net):
        assert roots(s) == ["n0@c5110a+1"]
