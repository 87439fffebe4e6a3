"""Probabilistic machines whose acceptance gap encodes det(I - D~ (x) D~)
and its cofactors, and the combiner that turns them into a cut-point test.

The generators have 13-15 heads and take on the order of 10^5 steps even on
the empty input, so values come from the edge-level evaluator; the DET
generator with a shortened counter is also run step by step for comparison.

    python demos/gap_simulation.py
"""

import time
from decimal import Decimal

from qfasim import zoo
from qfasim.classical import DET, GeneratorMachine, assemble_gap_pair, cutpoint_combine, evaluate, pfa_run_exact

for name in ("accept", "reject", "coin"):
    pair = assemble_gap_pair(zoo.get(name).spec)
    c = pair.verify("")
    print(f"{name}: det T = {c.det}, p_acc = {c.p_acc}")
    print(f"  gap(N1)/f1 = {c.gap_n1 / c.f1}   gap(N2)/gap(N1') = "
          f"{c.gap_n2 / c.gap_n1_scaled if c.gap_n1_scaled else 'n/a'}")
    pa, pr = cutpoint_combine(pair).evaluate("")
    print(f"  combiner leans {'accept' if pa > pr else 'reject'} (gap {Decimal((pa - pr).numerator) / Decimal((pa - pr).denominator):.3e})"
          f"  identities {'hold' if c.ok else 'FAIL'}")

print("\nstep-level run of the DET generator (counter shortened to one block)")
gm = GeneratorMachine(zoo.get("accept").spec, DET, block=1)
t = time.time()
run = pfa_run_exact(gm, "", t_max=10 ** 7)
print(f"  {run.steps} steps, peak support {run.max_support}, {time.time() - t:.0f}s")
print(f"  step-level p_acc == evaluator p_acc: {run.p_acc == evaluate(gm, '').p_acc}")
