"""Cut separation: toggle contracts, violation, and brute-force validity."""
from __future__ import annotations

import numpy as np
import pytest

from mipseries.lp import LpProblem, LpStatus, solve_lp
from mipseries.model import Sense
from mipseries.solver import SolverConfig, generate_cuts, slack_integrality

from conftest import enumerate_integer_points, make_instance, random_feasible_mip


def _fractional_instance():
    # LP optimum (0, 1.125, 1.625) is fractional in two integer variables
    return make_instance("frak", [-3.0, -5.0, -4.0],
                         [([2.0, 3.0, 1.0], Sense.LE, 5.0),
                          ([4.0, 1.0, 3.0], Sense.LE, 6.0)],
                         [0, 0, 0], [10, 10, 10], ints=(0, 1, 2))


def test_classic_half_integral_vertex_cut():
    # min -x-y s.t. 2x+2y <= 3 over binaries: the derived cut is x+y <= 1
    inst = make_instance("half", [-1.0, -1.0], [([2.0, 2.0], Sense.LE, 3.0)],
                         [0, 0], [1, 1], ints=(0, 1))
    cfg = SolverConfig()
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    cuts = generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t")
    assert len(cuts) == 1
    (j0, w0), (j1, w1) = cuts[0].coefs
    assert w0 == pytest.approx(w1)
    assert cuts[0].rhs / w0 == pytest.approx(1.0)   # scaled x + y <= 1


def _cut_inputs(inst, cfg):
    problem = LpProblem(inst)
    res = solve_lp(problem, want_snapshot=True)
    assert res.status is LpStatus.OPTIMAL
    mat = inst.dense_matrix()
    rhs = inst.rhs_array()
    slack_int = slack_integrality(mat, rhs, inst.senses(), inst.is_integer())
    return res, mat, rhs, slack_int


def test_toggle_off_returns_empty():
    inst = _fractional_instance()
    cfg = SolverConfig(use_cuts_root=False)
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    assert generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t") == []
    cfg2 = SolverConfig(use_cuts_tree=False)
    assert generate_cuts(res, False, cfg2, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t") == []


def test_integral_point_yields_no_cuts():
    inst = make_instance("int", [-1.0], [([1.0], Sense.LE, 2.0)], [0], [5], ints=(0,))
    cfg = SolverConfig()
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    assert generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t") == []


def test_cuts_are_violated_by_lp_point():
    inst = _fractional_instance()
    cfg = SolverConfig()
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    cuts = generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t")
    assert cuts, "expected at least one cut at a fractional vertex"
    for cut in cuts:
        act = sum(c * res.primal[j] for j, c in cut.coefs)
        assert act < cut.rhs - 1e-6


def _assert_cuts_valid(inst, cuts):
    points = enumerate_integer_points(inst)
    assert len(points), "test instance must have integer-feasible points"
    for cut in cuts:
        w = np.zeros(inst.num_vars)
        for j, c in cut.coefs:
            w[j] = c
        acts = points @ w
        assert np.all(acts >= cut.rhs - 1e-7), \
            f"cut {cut.name} violated by an integer-feasible point"


def test_cut_validity_small_fixture():
    inst = _fractional_instance()
    cfg = SolverConfig()
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    cuts = generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t")
    _assert_cuts_valid(inst, cuts)


def test_cut_validity_random_instances():
    rng = np.random.default_rng(21)
    produced = 0
    for _ in range(40):
        inst = random_feasible_mip(rng, max_vars=6, max_rows=5)
        cfg = SolverConfig()
        problem = LpProblem(inst)
        res = solve_lp(problem, want_snapshot=True)
        if res.status is not LpStatus.OPTIMAL:
            continue
        mat = inst.dense_matrix()
        rhs = inst.rhs_array()
        slack_int = slack_integrality(mat, rhs, inst.senses(), inst.is_integer())
        cuts = generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs,
                             slack_int, inst.var_names, "t")
        if cuts:
            produced += 1
            _assert_cuts_valid(inst, cuts)
    assert produced >= 5


def test_cut_validity_with_continuous_variables():
    # mixed instance: continuous variable in the row forces the mixed-integer
    # form; the cut must hold at every (integer, best-continuous) point
    inst = make_instance("mix", [-2.0, -3.0, 1.0],
                         [([3.0, 4.0, -1.0], Sense.LE, 6.0),
                          ([1.0, 3.0, 1.0], Sense.LE, 4.0)],
                         [0, 0, 0], [4, 4, 10], ints=(0, 1))
    cfg = SolverConfig()
    res, mat, rhs, slack_int = _cut_inputs(inst, cfg)
    cuts = generate_cuts(res, True, cfg, inst.is_integer(), mat, rhs, slack_int,
                         inst.var_names, "t")
    # validity over a grid of integer assignments x continuous samples
    for x0 in range(5):
        for x1 in range(5):
            for x2 in np.linspace(0, 10, 21):
                point = np.array([x0, x1, x2], dtype=float)
                acts = mat @ point
                if np.any(acts > rhs + 1e-9):
                    continue
                for cut in cuts:
                    w = np.zeros(3)
                    for j, c in cut.coefs:
                        w[j] = c
                    assert float(w @ point) >= cut.rhs - 1e-7
