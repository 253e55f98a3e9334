import itertools
from fractions import Fraction
import random

import pytest
from hypothesis import given, settings, strategies as st

from deltaip.dpengine import solve_problem2
from deltaip.exactmat import ExactMatrix, max_abs_subdet
from deltaip.generate import random_p1, random_pok
from deltaip.ipcore import InstanceError, Problem1Instance, Status, check_feasible_p2, lp_solve
from deltaip.reduction import (GuessIterator, PokInstance, UnsupportedInstance, check_feasible_p1, pok_brute_force,
                               pok_delta, pok_to_ip, presolve_box, recenter, solve_pok, solve_problem1,
                               split_and_guess)
from oracles import connected_weight_max, p1_box_brute, pok_oracle


def p1(A, B, C, D, b, c, delta=1, k=1):
    n1 = len(A[0]) if A else (len(C[0]) if C else 0)
    n2 = len(B[0]) if B else (len(D[0]) if D else 0)
    return Problem1Instance(ExactMatrix(A, cols=n1), ExactMatrix(B, cols=n2), ExactMatrix(C, cols=n1),
                            ExactMatrix(D, cols=n2), b, c, delta, k)


def box_rows(n, lo, hi):
    rows, rhs = [], []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        rows += [e, [-v for v in e]]
        rhs += [hi[j], -lo[j]]
    return rows, rhs


def test_recenter_fractional_point():
    P = p1([[2]], [[]], [], [], [3], [-1], k=0)
    rec = recenter(P, [Fraction(3, 2)], f=2)
    assert rec.offset == (1,)
    assert rec.problem.b == (1,)
    assert rec.objective_shift == -1
    assert rec.lo == (-2,) and rec.hi == (2,)


def test_recenter_integral_point_keeps_zero_feasible():
    rows, rhs = box_rows(2, [0, 0], [3, 3])
    P = p1(rows, [[]] * 4, [], [], rhs, [1, 1], k=0)
    rec = recenter(P, [1, 2])
    assert rec.offset == (1, 2)
    assert check_feasible_p1(rec.problem, (0, 0))


def test_recenter_round_trip():
    rng = random.Random(4)
    for _ in range(20):
        P = random_p1(rng, 3, 1, 2, 1)
        lp = lp_solve(P.M, P.b, P.c)
        if lp.status != Status.OPTIMAL:
            continue
        rec = recenter(P, lp.x)
        sol = solve_problem1(P)
        y = tuple(a - o for a, o in zip(sol.x, rec.offset))
        assert check_feasible_p1(rec.problem, y)
        assert sum(c * v for c, v in zip(P.c, y)) + rec.objective_shift == sol.objective


def test_guess_iterator_counts():
    g = GuessIterator([3], [-2], [2])
    assert len(g) == 5
    assert list(g) == [(-2,), (-1,), (0,), (1,), (2,)]
    assert len(GuessIterator([0, 1], [0, 1], [1, 0])) == 0


def test_split_without_extra_blocks_is_single_instance():
    P = p1([[1, -1], [0, 1]], [[], []], [], [], [0, 2], [-1, 0], k=0)
    out = list(split_and_guess(recenter(P, [0, 0], f=3)))
    assert len(out) == 1 and out[0].guess == ()
    assert out[0].p2.A.tolist() == [[1, -1]]
    assert out[0].p2.u == (3, 2)


def test_split_five_guesses():
    P = p1([[1]], [[0]], [], [], [5], [0, 1], k=1)
    out = list(split_and_guess(recenter(P, [0, 0], f=2)))
    assert [g.guess for g in out] == [(-2,), (-1,), (0,), (1,), (2,)]


def test_c_row_becomes_slack_equation():
    rows, rhs = box_rows(2, [0, 0], [2, 2])
    P = p1(rows, [[]] * 4, [[1, 1]], [[]], rhs + [3], [0, 0], k=1)
    (gi,) = split_and_guess(recenter(P, [0, 0], f=2))
    assert gi.p2.W.tolist() == [[1, 1, 1]]
    assert gi.p2.d == (3,)
    assert (gi.p2.l[2], gi.p2.u[2]) == (0, 3)


def test_unsupported_row_is_rejected():
    P = p1([[2, 3]], [[]], [], [], [4], [0, 0], k=0)
    with pytest.raises(UnsupportedInstance):
        list(split_and_guess(recenter(P, [0, 0], f=2)))


def test_gcd_collapsible_row_is_normalized():
    P = p1([[2, -2]], [[]], [], [], [3], [0, 0], k=0)
    (gi,) = split_and_guess(recenter(P, [0, 0], f=2))
    assert gi.p2.A.tolist() == [[1, -1]] and gi.p2.b == (1,)


def test_presolve_box():
    lo, hi = presolve_box(ExactMatrix([[2, 0], [0, -3], [1, 1]], cols=2), [5, 4, 0], [-9, -9], [9, 9])
    assert (lo, hi) == ([-9, -1], [2, 9])


def test_pure_two_nonzero_equals_problem2():
    rows, rhs = box_rows(3, [-2] * 3, [2] * 3)
    A = [[1, -1, 0], [0, 1, 1]] + rows
    P = p1(A, [[]] * len(A), [], [], [0, 1] + rhs, [-1, 0, -1], k=0)
    sol = solve_problem1(P)
    assert sol.objective == p1_box_brute(P.M.tolist(), P.b, P.c, [-2] * 3, [2] * 3)
    (gi,) = split_and_guess(recenter(P, [0, 0, 0], f=2))
    assert solve_problem2(gi.p2).objective == sol.objective


def test_infeasible_by_parity_in_extra_row():
    # x0 - x1 <= 0, x1 - x0 <= 0 force x0 = x1; 2 x0 <= 3 and -2 x0 <= -3 have no integer solution
    rows, rhs = box_rows(2, [-3, -3], [3, 3])
    A = [[1, -1], [-1, 1]] + rows
    P = p1(A, [[]] * len(A), [[1, 1], [-1, -1]], [[], []], [0, 0] + rhs + [3, -3], [0, 0], k=2)
    assert p1_box_brute(P.M.tolist(), P.b, P.c, [-3, -3], [3, 3]) is None
    assert solve_problem1(P).status == Status.INFEASIBLE


def test_unbounded_lp_is_reported():
    P = p1([[1, -1]], [[]], [], [], [0], [-1, 0], k=0)
    assert solve_problem1(P).status == Status.UNBOUNDED


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_problem1_matches_brute_force(seed):
    rng = random.Random(seed)
    n1, n2 = rng.randint(1, 4), rng.randint(0, 2)
    P = random_p1(rng, n1, n2, rng.randint(0, 4), rng.randint(0, 2), feasible=rng.random() < 0.85)
    lo, hi = presolve_box(P.M, P.b, [-50] * P.n, [50] * P.n)
    want = p1_box_brute(P.M.tolist(), P.b, P.c, lo, hi)
    sol = solve_problem1(P)
    if want is None:
        assert sol.status == Status.INFEASIBLE
    else:
        assert sol.objective == want
        assert check_feasible_p1(P, sol.x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_guess_completeness(seed):
    rng = random.Random(seed)
    P = random_p1(rng, 2, 1, 2, 1, bound=1)
    rec = recenter(P, [0] * P.n, f=2)
    Q = rec.problem
    by_guess = {gi.guess: gi for gi in split_and_guess(rec)}
    for y in itertools.product(range(-2, 3), repeat=P.n):
        if not check_feasible_p1(Q, y):
            continue
        gi = by_guess[y[P.n1:]]
        assert gi.p2 is not None
        slack = [r - v for r, v in zip(gi.p2.d, Q.C.matvec(y[:P.n1]))]
        assert check_feasible_p2(gi.p2, tuple(y[:P.n1]) + tuple(slack))


def test_slack_columns_preserve_delta():
    rng = random.Random(8)
    for _ in range(40):
        M = ExactMatrix([[rng.randint(-2, 2) for _ in range(4)] for _ in range(3)], cols=4)
        ext = ExactMatrix([list(r) + [int(i == 0)] for i, r in enumerate(M)], cols=5)
        assert max_abs_subdet(ext) == max_abs_subdet(M)


def test_pok_chain_rows():
    K = PokInstance(3, ((0, 1), (1, 2)), (1, 1, 1), ((1, 1, 1),), (3,))
    P = pok_to_ip(K)
    assert P.A.tolist()[:2] == [[-1, 1, 0], [0, -1, 1]]
    assert P.b[:2] == (0, 0)
    assert P.C.tolist() == [[1, 1, 1]] and P.b[-1] == 3
    assert P.c == (-1, -1, -1)


def test_pok_empty_precedence_is_knapsack():
    K = PokInstance(3, (), (4, 5, 6), ((2, 3, 4),), (5,))
    P = pok_to_ip(K)
    assert P.m2 == 1 and P.n2 == 0
    assert solve_pok(K).profit == 9 == pok_oracle(3, (), (4, 5, 6), ((2, 3, 4),), (5,))


def test_pok_cycle_rejected():
    with pytest.raises(InstanceError):
        PokInstance(2, ((0, 1), (1, 0)), (1, 1), (), ())


def test_pok_delta_examples():
    assert pok_delta(PokInstance(2, (), (0, 0), ((0, 0),), (0,))) == 0
    assert pok_delta(PokInstance(2, (), (0, 0), ((3, 4),), (0,))) == 4
    assert pok_delta(PokInstance(2, ((0, 1),), (0, 0), ((2, 3),), (0,))) == 5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_pok_delta_matches_enumeration(seed):
    rng = random.Random(seed)
    K = random_pok(rng, rng.randint(1, 9), rng.randint(1, 2))
    ws = tuple(tuple(rng.randint(-4, 4) for _ in range(K.n)) for _ in range(K.k))
    K = PokInstance(K.n, K.covers, K.profit, ws, K.budgets)
    assert pok_delta(K) == connected_weight_max(K.n, K.covers, K.weights)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_pok_pipeline_matches_oracle(seed):
    rng = random.Random(seed)
    K = random_pok(rng, rng.randint(1, 9), rng.randint(1, 2))
    res = solve_pok(K)
    want = pok_oracle(K.n, K.covers, K.profit, K.weights, K.budgets)
    assert res.profit == want == pok_brute_force(K)[0]
    assert K.is_down_closed(res.chosen)
    P = pok_to_ip(K)
    assert max_abs_subdet(P.A) == 1
