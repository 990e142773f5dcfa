"""From a formula to a proof net and back.

Bipolarizes the running example formula, prints the program and its
inference schemes, checks the focusing proof of the head atom, turns it into
a proof net and reads a proof back out of that net.

    python demos/example_pipeline.py
"""
from mallnets.bipolarizer import EXAMPLE_ALIASES, alias, inference_schemes, universal_program
from mallnets.engine import desequentialize, sequentialize
from mallnets.formulas import parse_formula
from mallnets.proofnet import is_proof_net, slices
from mallnets.sequent import check_proof, parse_proof, proof_to_text

F = "(a & b) | ((a^ + b^) * c^) | (c * (d^ + e^)) | (d & e)"

PROOF = """\
n0#1 ⊢ n0
  n2#1 ⊢ a, d, n1, n2
    n1#1 ⊢ a, c, n1
  n2#2 ⊢ a, e, n1, n2
    n1#1 ⊢ a, c, n1
  n2#1 ⊢ b, d, n1, n2
    n1#2 ⊢ b, c, n1
  n2#2 ⊢ b, e, n1, n2
    n1#2 ⊢ b, c, n1
"""


def main():
    program = universal_program(parse_formula(F))
    print("program:")
    for b in program:
        print("  " + alias(str(b), EXAMPLE_ALIASES))
        for s in inference_schemes(b):
            print("    " + alias(str(s), EXAMPLE_ALIASES))

    proof = parse_proof(PROOF, program)
    print(f"\nproof of {proof.conclusion}: {proof.size()} inferences,",
          "checks" if check_proof(proof, program) else "does not check")

    net = desequentialize(proof, program)
    print("\nproof net:")
    for h in sorted(net.hyperlinks.values(), key=lambda h: h.id):
        print(f"  {h.id} ({h.polarity.value}) {len(h.links)} link(s)")
    print(f"  {len(list(slices(net)))} slices, proof net: {is_proof_net(net)}")

    back = sequentialize(net, program)
    print("\nread back:")
    print(proof_to_text(back), end="")
    print("same proof" if proof_to_text(back) == PROOF else "different proof")


if __name__ == "__main__":
    main()
