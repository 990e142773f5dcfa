import sys
from pathlib import Path

import pytest

from mallnets.bipolarizer import parse_program
from mallnets.engine import candidate_bindings
from mallnets.formulas import parse_formula
from mallnets.proofnet import ProofStructure, parse_net
from mallnets.sequent import parse_proof

DATA = Path(__file__).parent / "data"

F_TEXT = "(a & b) | ((a^ + b^) * c^) | (c * (d^ + e^)) | (d & e)"


def read(name: str) -> str:
    return (DATA / name).read_text(encoding="utf-8")


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def formula_f():
    return parse_formula(F_TEXT)


@pytest.fixture(scope="session")
def example_program():
    return parse_program(read("example.bpl"))


@pytest.fixture(scope="session")
def example_proof(example_program):
    return parse_proof(read("example.bsp"), example_program)


@pytest.fixture(scope="session")
def tangle_program():
    return {b.head: b for b in parse_program(read("tangle.bpl"))}


@pytest.fixture(scope="session")
def tangle_base():
    """r, s and x expanded from the goal r; a proof net."""
    return parse_net(read("tangle-base.net"))


@pytest.fixture(scope="session")
def tangle_candidate(tangle_base, tangle_program):
    """The binding of k on the a and b places of the base structure."""
    (bind,) = candidate_bindings(tangle_base, tangle_program["k"])
    return bind


@pytest.fixture(scope="session")
def example_net(example_proof, example_program):
    from mallnets.engine import desequentialize
    return desequentialize(example_proof, example_program)


def empty(*atoms):
    return ProofStructure.empty(list(atoms))


@pytest.fixture(scope="session")
def exhaustive():
    from mallnets.corpus import exhaustive_corpus
    return exhaustive_corpus()


@pytest.fixture(scope="session")
def randoms():
    from mallnets.corpus import random_corpus
    return random_corpus(1000, seed=0)


@pytest.fixture(scope="session")
def corpus(exhaustive, randoms):
    return exhaustive + randoms


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
