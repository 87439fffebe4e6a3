"""Build the certified constructions on the coin machine and check each
relation by simulation.

    python demos/transforms_tour.py
"""

from fractions import Fraction

from qfasim import transforms, zoo
from qfasim.evolution import step_simulate

coin = zoo.get("coin").spec
accept = zoo.get("accept").spec
p = step_simulate(coin, "a").p_acc
print(f"coin: p_acc = {p}")

jobs = [
    ("complement", [coin], {}),
    ("damp", [coin], {"alpha": Fraction(9, 25)}),
    ("half_split", [coin], {}),
    ("product", [coin, coin], {}),
    ("square_pair", [coin], {}),
    ("affine_combine", [coin, accept], {"alpha": Fraction(9, 25), "beta": Fraction(16, 25)}),
]
for name, ins, params in jobs:
    out, cert = transforms.certify(name, ins, **params)
    chk = transforms.check_relation(cert, ins, out, "a")
    print(f"  {name:15s} {len(out.states):3d} states  p_acc = {chk.observed[0]!s:10s}"
          f" relation: {cert.relation}  [{'ok' if chk.ok else 'MISMATCH'}]")
