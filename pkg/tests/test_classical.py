from fractions import Fraction

import pytest

from qfasim import corpus, zoo
from qfasim.classical import (DET, SCALED, GeneratorMachine, assemble_gap_pair, build_copy, build_det_generator,
                              build_offset, build_zero, combined_gap, counter_certificate, cutpoint_combine,
                              equiprob_kernel, evaluate, generation_probability, pfa_run_exact, run_kernel,
                              step_bound, tape_of)
from qfasim.classical.generator import kernels
from qfasim.classical.oracle import det_t, pair_system, signed_cofactor_sum, sparse_det
from qfasim.classical.subroutines import parse_offset_exit
from qfasim.linalg import Matrix, determinant, minor_determinant
from qfasim.model import MachineError
from qfasim.resolvent import acceptance_resolvent, conf_star_order


# subroutines -------------------------------------------------------------

def test_counter_certificate():
    cert = counter_certificate(1, range(4))
    assert cert.ok and all(r["deterministic"] for r in cert.rows)


@pytest.mark.parametrize("n", [0, 2, 3])
def test_copy_moves_heads_to_source(n):
    spec = build_copy(2)
    out, _ = run_kernel(spec, tape_of("a" * n), spec.initial, (n, 0, 0))
    assert out == {("done", (n, n, 0)): 1}


def test_zero_resets_every_head():
    spec = build_zero(3)
    out, worst = run_kernel(spec, tape_of("aaa"), spec.initial, (2, 4, 1))
    assert out == {("done", (0, 0, 0)): 1}
    assert worst == 2 + 4 + 1 + 3


def test_offset_exits():
    spec = build_offset()
    n = 3
    width = n + 2
    for a in range(width):
        for b in range(width):
            out, _ = run_kernel(spec, tape_of("a" * n), spec.initial, (a, b, 0, 0, 0))
            ((q, pos), m), = out.items()
            want = {d for d in (-1, 0, 1) if (b + d - a) % width == 0}
            assert parse_offset_exit(q) == want and pos == (a, b, 0, 0, 0) and m == 1


def test_equiprob_uniform():
    gen, fail, _ = equiprob_kernel(1, 1)
    g = generation_probability(1, 1)
    assert len(gen) == 4 * 9 and set(gen.values()) == {g}
    assert fail + len(gen) * g == 1


def test_pfa_run_refuses_quantum_machine():
    with pytest.raises(MachineError):
        pfa_run_exact(zoo.get("coin").spec, "a")


# oracle -------------------------------------------------------------------

def test_sparse_det_matches_bareiss():
    rows = [{0: Fraction(2), 1: Fraction(1)}, {0: Fraction(1), 2: Fraction(3)}, {1: Fraction(-1), 2: Fraction(1)}]
    dense = Matrix.exact([[r.get(j, 0) for j in range(3)] for r in rows])
    assert sparse_det(rows) == determinant(dense)


@pytest.mark.parametrize("spec, x", [(zoo.get("coin").spec, "a"), (corpus.random_machine(6, n_states=3), "a")])
def test_cofactor_ratio_is_acceptance(spec, x):
    ps = pair_system(spec, x)
    d = det_t(ps)
    assert signed_cofactor_sum(ps, d) / d == acceptance_resolvent(spec, x).p_acc


# generators ---------------------------------------------------------------

def test_head_counts():
    spec = zoo.get("coin").spec
    pair = assemble_gap_pair(spec)
    assert (pair.n1.heads, pair.n1_scaled.heads, pair.n2.heads) == (13, 15, 15)
    assert build_det_generator(spec, minor=(0, 1, 1, 0)).heads == 14


def test_det_generator_step_level_cross_check():
    """Edge-level evaluation equals step-by-step exact propagation (shortened counter)."""
    gm = GeneratorMachine(zoo.get("accept").spec, DET, block=1)
    v = evaluate(gm, "")
    run = pfa_run_exact(gm, "", t_max=10 ** 7)
    assert run.residual == 0
    assert run.p_acc == v.p_acc and run.p_rej == v.p_rej
    assert run.steps <= step_bound(gm, "")


def test_fixed_target_minor():
    spec = corpus.random_machine(6, n_states=3)
    ps = pair_system(spec, "")
    t = Matrix.exact([[r.get(j, 0) for j in range(ps.size)] for r in ps.t_rows()])
    order = conf_star_order(spec, 0)
    q = sorted(spec.accepting, key=spec.states.index)[0]
    seen = set()
    for s1 in (1, -1):
        for s2 in (1, -1):
            gm = build_det_generator(spec, minor=(0, s1, s2, 1))
            k = kernels(gm, "")
            gap = evaluate(gm, "").gap / k.g ** (2 * k.length - 1)
            tix = order.index((q, q, 1, 1, s1, s2))
            cof = (-1) ** (ps.i0 + tix) * minor_determinant(t, ps.i0, tix)
            assert gap == s1 * s2 * cof
            seen.add(gap)
    assert seen - {0}


def test_fixed_target_past_right_end_is_fair_exit():
    gm = build_det_generator(zoo.get("accept").spec, minor=(0, 1, 1, 5))
    v = evaluate(gm, "")
    assert v.p_acc == v.p_rej == Fraction(1, 2)


def test_gap_examples_accept_and_reject():
    acc = assemble_gap_pair(zoo.get("accept").spec).verify("")
    assert acc.ok and acc.gap_n2 == acc.gap_n1_scaled != 0
    rej = assemble_gap_pair(zoo.get("reject").spec).verify("")
    assert rej.ok and rej.gap_n2 == 0 and rej.combiner_gap < 0


def test_scaled_gap_is_f2_det():
    pair = assemble_gap_pair(zoo.get("coin").spec)
    c = pair.verify("")
    assert c.gap_n1_scaled == pair.f2(0) * c.det
    assert c.gap_n2 == c.gap_n1_scaled * Fraction(9, 25)


def test_combiner_sign_and_mass():
    pair = assemble_gap_pair(zoo.get("coin").spec)
    m = cutpoint_combine(pair)
    p_acc, p_rej = m.evaluate("")
    assert p_acc + p_rej == 1
    c = pair.verify("")
    assert p_acc - p_rej == combined_gap(c.gap_n1_scaled, c.gap_n2) == c.combiner_gap
    # coin accepts with 9/25 < 1/2, so the combiner must lean to rejection
    assert p_acc < p_rej
    top = m.lookup(m.initial, ("<",) * m.heads)
    assert sum(w for _, _, w in top) == 1


def test_step_bound_grows_with_input():
    gm = GeneratorMachine(zoo.get("coin").spec, SCALED)
    assert step_bound(gm, "a") > step_bound(gm, "")
