from fractions import Fraction as F

import pytest

from torsionlab.errors import NotSquarefree, OddDegree, PellUnsolvable, RhoOnCurveBranch
from torsionlab.exactalg import FieldPoly, number_field
from torsionlab.pell import (
    cf_expand,
    pell_fundamental,
    pell_power,
    pell_square_factor,
    squared_factor_solution,
)

x = FieldPoly.x()
ONE = FieldPoly([1])


def test_cf_x2_plus_1():
    cf = cf_expand(x**2 + 1, 10)
    assert cf.periodic and cf.period_length == 1
    assert cf.partial_quotients[0] == x
    assert cf.pq_track[1][1].is_constant()


def test_cf_invariants():
    D = x**4 + x
    cf = cf_expand(D, 50)
    assert cf.periodic
    assert cf.pq_track[0] == (FieldPoly([]), ONE)
    for P, Q in cf.pq_track:
        assert (D - P * P) % Q == FieldPoly([])
        assert P.degree <= 2
    assert all(a.degree >= 1 for a in cf.partial_quotients[1:])


def test_cf_quarter_is_inconclusive():
    cf = cf_expand(x**4 + x + F(1, 4), 200)
    assert not cf.periodic
    assert cf.steps_used == 200
    assert cf.certificate["rigorous"]


def test_cf_errors():
    with pytest.raises(OddDegree):
        cf_expand(x**3 + 1, 5)
    with pytest.raises(NotSquarefree):
        cf_expand((x**2 + 1) ** 2, 5)


def test_fundamental_examples():
    assert pell_fundamental(x**2 + 1) is not None
    sol = pell_fundamental(x**2 + 1)
    assert (sol.X, sol.Y) == (2 * x**2 + 1, 2 * x)
    s4 = pell_fundamental(x**4 + x)
    assert s4.check(x**4 + x)
    assert pell_fundamental(x**4 + x + F(1, 4), 200) is None


def test_fundamental_with_constant_rescale():
    # Q_1 = 4, a square, for D = x^2 + 4
    D = x**2 + 4
    sol = pell_fundamental(D)
    assert sol.check(D)
    assert sol.Y.degree == 1


def test_power_examples():
    D = x**2 + 1
    sol = pell_fundamental(D)
    assert pell_power(sol, D, 1) == sol
    s2 = pell_power(sol, D, 2)
    assert s2.X == 8 * x**4 + 8 * x**2 + 1
    assert s2.Y == 2 * sol.X * sol.Y
    assert pell_power(sol, D, 3).Y.degree == 5


def test_power_homomorphism():
    D = x**4 + x
    sol = pell_fundamental(D)
    assert pell_power(pell_power(sol, D, 2), D, 3) == pell_power(sol, D, 6)
    inv = pell_power(sol, D, -1)
    prod = pell_power(sol, D, 1)
    assert (prod.X * inv.X + D * prod.Y * inv.Y) == ONE


def test_translation_invariance():
    for D in (x**4 + x, x**4 + x + F(1, 4)):
        a = cf_expand(D, 60).periodic
        b = cf_expand(D.translate(F(3, 2)), 60).periodic
        assert a == b


def test_square_factor_examples():
    assert pell_square_factor(0, x**2 + 1, 5) == 1
    Q = x**4 + x
    sol = pell_fundamental(Q)
    got = pell_square_factor(1, Q, 10)
    brute = next((n for n in range(1, 11) if not pell_power(sol, Q, n).Y(F(1))), None)
    assert got == brute
    with pytest.raises(PellUnsolvable):
        pell_square_factor(0, x**4 + x + F(1, 4), 5, max_steps=100)
    with pytest.raises(RhoOnCurveBranch):
        pell_square_factor(0, x**4 + x, 5)


def test_squared_factor_solution():
    sol = pell_fundamental(x**2 + 1)
    out = squared_factor_solution(0, x**2 + 1, 1, sol)
    assert out.check(x**2 * (x**2 + 1))


def test_number_field_discriminant():
    K = number_field((F(-2), F(0), F(1)))  # sqrt 2
    s = K.gen()
    D = FieldPoly([s, 0, 1], K)
    sol = pell_fundamental(D, 20)
    assert sol is not None and sol.check(D)


def test_trace_is_json_friendly():
    import json

    json.dumps(cf_expand(x**4 + x, 20).trace())
