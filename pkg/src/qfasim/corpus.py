"""Seeded machine corpora for property checks.

Random machines are unidirectional: for each scanned symbol a rational
orthogonal matrix V_σ acts on the state span, and the head move is fixed by the
target state.  That makes U unitary on every input length.  The initial state
is entered only from one halting "recycler" state, so the transforms that
split amplitude off the initial state accept these machines.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from . import transforms, zoo
from .evolution import step_simulate
from .linalg import Matrix, invert
from .model import QFA, MachineSpec, make_spec


def cayley_orthogonal(rng: random.Random, n: int, spread: int = 3) -> list:
    """(I - S)(I + S)^-1 for a random skew-symmetric rational S, with random row signs."""
    if n == 1:
        return [[Fraction(rng.choice((-1, 1)))]]
    s = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(rng.randint(-spread, spread), rng.randint(1, 2))
            s[i][j], s[j][i] = v, -v
    ident = Matrix.identity(n)
    sm = Matrix.exact(s)
    o = (ident - sm) @ invert(ident + sm)
    signs = [rng.choice((-1, 1)) for _ in range(n)]
    return [[o[i, j] * signs[i] for j in range(n)] for i in range(n)]


def random_machine(seed: int, n_states: int = 4, alphabet: Sequence[str] = ("a",), heads: int = 1,
                   n_accepting: int = 1) -> MachineSpec:
    """Random rational unidirectional QFA with ``n_states`` >= 3 states.

    States: q0, s1.., acc.., and the rejecting recycler "rej" whose only
    column is rej -> q0.  The remaining columns form a Cayley orthogonal block
    mapping {q0, s_i, acc} onto {s_i, acc, rej}.
    """
    if n_states < 3:
        raise ValueError("need at least 3 states")
    rng = random.Random(seed)
    n_inner = n_states - 2 - n_accepting
    if n_inner < 0:
        raise ValueError("too many accepting states")
    inner = [f"s{i + 1}" for i in range(n_inner)]
    accs = ["acc"] if n_accepting == 1 else [f"acc{i + 1}" for i in range(n_accepting)]
    states = ["q0"] + inner + accs + ["rej"]
    sources = ["q0"] + inner + accs
    targets = inner + accs + ["rej"]
    moves = [-1, 0, 1]
    direction = {q: tuple(rng.choice(moves) for _ in range(heads)) for q in states}
    symbols = ("<",) + tuple(alphabet) + (">",)
    import itertools
    trans = []
    for scan in itertools.product(symbols, repeat=heads):
        o = cayley_orthogonal(rng, len(sources))
        for j, src in enumerate(sources):
            for i, dst in enumerate(targets):
                if o[i][j] != 0:
                    trans.append((src, scan, dst, direction[dst], o[i][j]))
        trans.append(("rej", scan, "q0", direction["q0"], 1))
    return make_spec(QFA, heads, states, "q0", accs, ["rej"], alphabet, trans, name=f"random{seed}")


def completely_halting(spec: MachineSpec, inputs: Sequence[str], t_max: int = 10_000, tol: float = 1e-12) -> bool:
    for x in inputs:
        tr = step_simulate(spec, x, t_max=t_max, backend="FLOAT")
        if tr.residual > tol:
            return False
    return True


def random_corpus(count: int, seed: int = 0, n_states: int = 4, n_max: int = 4,
                  require_halting: bool = False) -> list:
    """``count`` random machines; with ``require_halting`` only completely halting ones on all x up to n_max."""
    out = []
    k = seed
    while len(out) < count:
        spec = random_machine(k, n_states=n_states)
        k += 1
        if require_halting and not completely_halting(spec, ["a" * n for n in range(n_max + 1)]):
            continue
        out.append(spec)
    return out


def coin_corpus() -> list:
    """Small rational fixtures on the unary alphabet."""
    return [zoo.get(name).spec for name in ("coin", "accept", "reject")]


def transform_corpus() -> list:
    """(label, output, cert, inputs) for every transform applied to the coin corpus."""
    coin, acc, rej = coin_corpus()
    jobs = [
        ("complement", [coin], {}),
        ("complement", [acc], {}),
        ("complex_to_real", [coin], {}),
        ("damp", [coin], {"alpha": Fraction(9, 25)}),
        ("damp", [acc], {"alpha": Fraction(9, 25)}),
        ("half_split", [coin], {}),
        ("half_split", [acc], {}),
        ("affine_combine", [coin, coin], {"alpha": Fraction(9, 25), "beta": Fraction(9, 25)}),
        ("affine_combine", [coin, acc], {"alpha": Fraction(1, 4), "beta": Fraction(1, 2)}),
        ("product", [coin, coin], {}),
        ("product", [acc, rej], {}),
        ("square_pair", [coin], {}),
        ("square_pair", [acc], {}),
    ]
    out = []
    for name, ins, params in jobs:
        spec, cert = transforms.certify(name, ins, **params)
        label = f"{name}({','.join(s.name for s in ins)})"
        out.append((label, spec, cert, ins))
    return out
