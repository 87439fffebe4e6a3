"""Walk through one machine from three angles: step simulation, the kernel
chain that bounds its running time, and the closed-form acceptance value.

    python demos/halting_and_acceptance.py
"""

from qfasim import halting, resolvent, zoo
from qfasim.evolution import Criterion, classify, step_simulate

a3 = zoo.get("a3").spec
print(f"A3 recognizer: {len(a3.states)} states, {a3.heads} heads")

for n in (3, 9, 27, 81):
    x = "a" * n
    rep = halting.analyze_halting(a3, x)
    tr = step_simulate(a3, x, t_max=rep.worst_case_steps)
    verdict = classify(a3, x, Criterion.parse("BOUNDED(1/3)")).verdict
    print(f"  n={n:3d}  run halts after {len(tr.steps):4d} steps; every configuration within"
          f" {rep.worst_case_steps:4d} (linear bound {rep.bound:5d})  -> {verdict}")

# A machine with a 3/5, 4/5 split: the first step decides everything.
coin = zoo.get("coin").spec
print("\ncoin machine on 'aa'")
print("  simulation :", step_simulate(coin, "aa").p_acc)
print("  resolvent  :", resolvent.acceptance_resolvent(coin, "aa").p_acc)
cof = resolvent.cofactor_resolvent(coin, "aa", use_clows=True)
print(f"  clows      : {cof.numerator_acc} / {cof.det} = {cof.p_acc}")

# Random rational machines rarely halt absolutely; the resolvent still gives
# the exact limit while simulation only approaches it.
from qfasim import corpus  # noqa: E402

spec = corpus.random_machine(11)
exact = resolvent.acceptance_resolvent(spec, "a").p_acc
print(f"\nrandom machine 11 on 'a': exact limit {exact} = {float(exact):.12f}")
for t in (10, 100, 1000):
    print(f"  t={t:5d}  p_acc so far {float(step_simulate(spec, 'a', t_max=t).p_acc):.12f}")
