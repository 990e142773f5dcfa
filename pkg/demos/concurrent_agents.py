"""Several agents building one proof net at the same time.

Each bipole of the running example program is an agent.  With two copies of
the head atom in the goal, agents compete for overlapping regions: some
transactions hit a lock conflict, back off and retry.  The trace is fully
determined by the seed.

    python demos/concurrent_agents.py [seed]
"""
import sys
from collections import Counter

from mallnets.bipolarizer import parse_program
from mallnets.engine import Schedule, simulate
from mallnets.proofnet import is_proof_net

PROGRAM = """\
n0 := n0^ * ((a & b) | n1 | n2 | (d & e))
n1 := n1^ * ((a^ + b^) * c^)
n2 := n2^ * (c * (d^ + e^))
"""


def main(seed: int = 3):
    program = parse_program(PROGRAM)
    t = simulate(program, ["n0", "n0"], Schedule(seed, "random"), validate="both")
    for e in t.events:
        extra = f"  ({e.reason})" if e.reason else ""
        print(f"{e.step:3d} {e.agent} {e.tx:>3} {e.action:<6} {len(e.locks):2d} locks{extra}")
    print()
    print(f"outcome {t.outcome} after {t.steps} steps")
    print("actions:", dict(Counter(e.action for e in t.events)))
    print("every committed version is a proof net:",
          all(is_proof_net(p) for p in t.committed_versions()))
    print("aborts left the structure untouched:", all(a.before == a.after for a in t.aborts))
    again = simulate(program, ["n0", "n0"], Schedule(seed, "random"), validate="both")
    print("same seed, same trace:", again.to_text() == t.to_text())


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 3)
