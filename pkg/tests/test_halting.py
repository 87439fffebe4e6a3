from qfasim import corpus, zoo
from qfasim.evolution import build_evolution, step_simulate
from qfasim.halting import (absolute_halting_steps, analyze_halting, dimension_chain, linear_bound,
                            verify_linear_bound)
from qfasim.linalg import Matrix


def test_permutation_fast_path_matches_dense_chain():
    spec = zoo.get("a3").spec
    for n in (0, 1):
        x = "a" * n
        fast = analyze_halting(spec, x)
        u, _, _, pi_non = build_evolution(spec, x)
        slow = dimension_chain(u, pi_non, fast_initial(spec, x), fast=False)
        assert fast.halts_absolutely == slow.halts_absolutely
        assert fast.worst_case_steps == slow.worst_case_steps


def fast_initial(spec, x):
    from qfasim.evolution import ConfigurationSpace
    return ConfigurationSpace.of(spec, x).initial_index()


def test_chain_recursion_on_random_machine():
    spec = corpus.random_machine(7, n_states=3)
    rep = analyze_halting(spec, "aa", check_recursion=True)
    assert rep.recursion_check
    assert rep.dims == sorted(rep.dims)


def test_worst_case_steps_within_linear_bound():
    spec = zoo.get("a3").spec
    for n in range(6):
        rep = analyze_halting(spec, "a" * n)
        assert rep.halts_absolutely and rep.worst_case_steps <= linear_bound(spec, n)


def test_absolute_halting_steps_matches_simulation():
    spec = zoo.get("a3").spec
    x = "a" * 4
    k = absolute_halting_steps(spec, x)
    tr = step_simulate(spec, x, t_max=k)
    assert tr.residual == 0
    assert step_simulate(spec, x, t_max=k - 1).residual != 0


def test_nilpotent_toy_chain():
    # 0 -> 1 -> 2 (halting): kernel dimensions grow by one per power
    u = Matrix.exact([[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    pi = Matrix.exact([[1, 0, 0], [0, 1, 0], [0, 0, 0]])
    rep = dimension_chain(u, pi, 0, fast=False, check_recursion=True)
    assert rep.halts_absolutely and rep.worst_case_steps == rep.d + 1
    assert rep.recursion_check


def test_verify_linear_bound_report():
    rep = verify_linear_bound(zoo.get("coin").spec, range(3))
    assert rep.ok and not rep.violations()
