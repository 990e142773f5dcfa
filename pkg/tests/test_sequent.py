import random

import pytest

from mallnets.bipolarizer import Bipole, inference_schemes
from mallnets.errors import FormulaSyntaxError, TriggerMismatch
from mallnets.formulas import parse_formula
from mallnets.sequent import (
    ProofTree, Sequent, apply_scheme, check_proof, parse_proof, proof_to_text,
    schemes_by_label,
)

from conftest import read


@pytest.fixture(scope="module")
def rules(example_program):
    return schemes_by_label(example_program)


def test_leaf_closes(rules):
    assert apply_scheme(Sequent.of("n1", "a", "c"), rules["n1#1"]) == []


def test_one_premise(rules):
    assert apply_scheme(Sequent.of("n1", "n2", "a", "d"), rules["n2#1"]) == \
        [Sequent.of("n1", "a", "c")]


def test_root_premises(rules):
    assert apply_scheme(Sequent.of("n0"), rules["n0#1"]) == [
        Sequent.of("n1", "n2", "a", "d"), Sequent.of("n1", "n2", "a", "e"),
        Sequent.of("n1", "n2", "b", "d"), Sequent.of("n1", "n2", "b", "e")]


def test_trigger_must_be_present(rules):
    with pytest.raises(TriggerMismatch):
        apply_scheme(Sequent.of("n1", "b", "c"), rules["n1#1"])


def test_closing_rule_rejects_leftover_context(rules):
    with pytest.raises(TriggerMismatch):
        apply_scheme(Sequent.of("n1", "a", "c", "d"), rules["n1#1"])


def test_context_split_between_monopoles():
    (s,) = inference_schemes(Bipole("w", parse_formula("a^ * b^ * (c | d) * e")))
    out = apply_scheme(Sequent.of("a", "b", "x", "y"), s, split=[["x"], ["y"]])
    assert out == [Sequent.of("x", "c", "d"), Sequent.of("y", "e")]
    with pytest.raises(TriggerMismatch):
        apply_scheme(Sequent.of("a", "b", "x", "y"), s, split=[["x"], []])


def test_example_proof_checks(example_proof, example_program):
    assert check_proof(example_proof, example_program)
    assert example_proof.size() == 9
    assert example_proof.conclusion == Sequent.of("n0")
    assert len(example_proof.children) == 4
    assert all(len(c.children) == 1 and not c.children[0].children
               for c in example_proof.children)


def test_swapped_leaf_fails(example_proof, example_program, rules):
    branch = example_proof.children[0]
    leaf = branch.children[0]
    bad_leaf = ProofTree(leaf.conclusion, rules["n1#2"], ())
    bad = ProofTree(example_proof.conclusion, example_proof.rule,
                    (ProofTree(branch.conclusion, branch.rule, (bad_leaf,)),)
                    + example_proof.children[1:])
    report = check_proof(bad, example_program)
    assert not report and report.errors


def test_single_leaf_proof(example_program, rules):
    leaf = ProofTree(Sequent.of("c", "a", "n1"), rules["n1#1"], ())
    assert check_proof(leaf, example_program)


def test_unknown_rule_is_reported(example_program):
    foreign = inference_schemes(Bipole("z", parse_formula("z^ * a")))[0]
    tree = ProofTree(Sequent.of("z"), foreign, (ProofTree(Sequent.of("a"), foreign, ()),))
    assert not check_proof(tree, example_program)


def test_multiset_order_does_not_matter(example_program):
    text = read("example.bsp")
    rng = random.Random(7)
    lines = []
    for line in text.splitlines():
        head, _, atoms = line.partition("⊢ ")
        parts = atoms.split(", ")
        rng.shuffle(parts)
        lines.append(head + "⊢ " + ", ".join(parts))
    shuffled = parse_proof("\n".join(lines), example_program)
    assert check_proof(shuffled, example_program)


def test_text_roundtrip(example_proof, example_program):
    text = proof_to_text(example_proof)
    assert text == read("example.bsp")
    assert parse_proof(text, example_program) == example_proof
    ascii_text = text.replace("⊢", "|-")
    assert parse_proof(ascii_text, example_program) == example_proof


@pytest.mark.parametrize("text", ["", "n0#1 n0", "n9#1 ⊢ n0", " n0#1 ⊢ n0", "n1#1 ⊢ a\nn1#1 ⊢ a"])
def test_bad_proof_text(text, example_program):
    with pytest.raises(FormulaSyntaxError):
        parse_proof(text, example_program)
