"""Random-walk ideation and the breadth measure.

A single agent ideates by running a length-T unbiased random walk from a
prompt concept; breadth is the count of distinct concepts visited. Modular
graphs trap the walker inside a community, so breadth falls as Q rises.
"""

from semsim import SubstrateSpec, agent_modularity, expected_breadth, generate_substrate, random_walk, rewire
from semsim.streams import derive_stream

substrate = generate_substrate(SubstrateSpec(100, 4))

print("one walk, step by step:")
trace = random_walk(substrate, s=0, T=12, rng=derive_stream(7, ["demo2", "walk"]))
print(f"  sequence: {' -> '.join(str(v) for v in trace.sequence)}")
print(f"  breadth:  {len(trace.visited)} distinct concepts")
print()

print("expected breadth (S=20 prompts, R=30 replicates, T=20) against Q:")
print(f"{'p':>6} {'Q':>8} {'B_hat':>8} {'95% CI':>18}")
for p in (0.05, 0.15, 0.3, 0.5):
    g = rewire(substrate, p, derive_stream(7, ["demo2", "agent", p]))
    q = agent_modularity(g)
    est = expected_breadth(g, T=20, S=20, R=30, rng=derive_stream(7, ["demo2", "breadth", p]))
    print(f"{p:>6.2f} {q:>8.4f} {est.mean:>8.2f}   [{est.ci_low:6.2f}, {est.ci_high:6.2f}]")

print()
print("higher rewiring -> lower Q -> broader search from the same walk budget.")
