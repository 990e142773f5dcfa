"""An expansion that would close a loop, and how the engine refuses it.

Three bipoles build a small tensor tree.  A fourth, ``k := a^ * b^``, can
fire on the ``a`` and ``b`` places at two different leaves of that tree.  The
result would contain a loop with no singularity, so the transaction is
validated inside its lock region, rejected, and the structure stays as it
was.

    python demos/tangle_rejection.py
"""
from mallnets.analysis import domination_forest, isolation_region, maximal_switching
from mallnets.bipolarizer import parse_program
from mallnets.engine import candidate_bindings, expand, lock_region, try_transaction
from mallnets.proofnet import ProofStructure, check_trip, is_proof_net, slices

PROGRAM = """\
r := r^ * (s | t) * (g | h)
s := s^ * (a | x) * (b | y)
x := x^ * (u | v)
k := a^ * b^
"""


def main():
    program = {b.head: b for b in parse_program(PROGRAM)}
    p = ProofStructure.empty(["r"])
    for head in ("r", "s", "x"):
        (bind,) = candidate_bindings(p, program[head])
        p = expand(p, bind)
    print(f"base: {len(p.links)} links, proof net: {is_proof_net(p)}")

    (s,) = slices(p)
    forest = domination_forest(maximal_switching(s))
    print("\ndomination forest of the negative links:")
    print(forest.to_text(), end="")

    (k,) = candidate_bindings(p, program["k"])
    region = lock_region(p, k)
    print(f"\ncandidate {k}")
    print("locks:", ", ".join(sorted(region.links)))
    m1, m2 = sorted(l for l in region.links if l.startswith("s@"))
    print("isolation region of", m1, "and", m2, "=",
          sorted(isolation_region(maximal_switching(s), m1, m2)))

    before = p.to_text()
    tx, after = try_transaction(p, k)
    print(f"\ntransaction {tx.state}: {type(tx.error).__name__}")
    print("loop:", tx.trip)
    print("singularities on the loop:", check_trip(tx.slice, tx.trip) or "none")
    print("structure unchanged:", after.to_text() == before)


if __name__ == "__main__":
    main()
