import random
from fractions import Fraction

import pytest

from odelump import (NonPolynomialDrift, OdeSystem, Polynomial, Reaction,
                     ReactionNetwork, multiset, ode_to_rn, parse_polynomial,
                     rn_to_ode)
from conftest import cascade, random_poly_system

NAMES = ("x1", "x2", "x3")


def test_mass_action_cascade_drift():
    rn = ReactionNetwork.make(
        ("x1", "x2"),
        (Reaction(multiset({0: 1}), multiset({0: 1, 1: 1}), Fraction(2)),
         Reaction(multiset({1: 1}), (), Fraction(1))),
        (1, 0))
    ode = rn_to_ode(rn)
    assert ode.drifts[1] == parse_polynomial("2*x1 - x2", ("x1", "x2"))
    assert ode.drifts[0].is_zero()  # x1 is catalytic in the first reaction


def test_empty_reaction_list_gives_zero_drifts():
    rn = ReactionNetwork.make(("a", "b"), (), (1, 1))
    assert all(d.is_zero() for d in rn_to_ode(rn).drifts)


def test_no_net_change_gives_zero_drifts():
    r = Reaction(multiset({0: 1, 1: 1}), multiset({0: 1, 1: 1}), Fraction(5))
    rn = ReactionNetwork.make(("a", "b"), (r,), (1, 1))
    assert all(d.is_zero() for d in rn_to_ode(rn).drifts)


def test_second_order_mass_action():
    # a + 2b -> c at rate 3: drift(c) = 3*a*b^2, drift(b) = -6*a*b^2
    r = Reaction(multiset({0: 1, 1: 2}), multiset({2: 1}), Fraction(3))
    ode = rn_to_ode(ReactionNetwork.make(("a", "b", "c"), (r,), (1, 1, 0)))
    assert ode.drifts[2] == parse_polynomial("3*a*b*b", ("a", "b", "c"))
    assert ode.drifts[1] == parse_polynomial("-6*a*b*b", ("a", "b", "c"))


def test_cascade_emits_five_reactions_in_canonical_order():
    rn = ode_to_rn(cascade(k1=1, k2=1))
    expected = (
        Reaction(((0, 1),), ((0, 2),), Fraction(-1)),          # -x1
        Reaction(((0, 1),), ((0, 1), (1, 1)), Fraction(1)),    # k1*x1 feeds x2
        Reaction(((1, 1),), ((1, 2),), Fraction(-1)),          # -x2
        Reaction(((0, 1),), ((0, 1), (2, 1)), Fraction(1)),    # k2*x1 feeds x3
        Reaction(((2, 1),), ((2, 2),), Fraction(-1)),          # -x3
    )
    assert rn.reactions == expected


def test_zero_system_emits_no_reactions():
    system = OdeSystem.make(("a",), (Polynomial.zero(),), (1,))
    assert ode_to_rn(system).reactions == ()


def test_constant_drift_emits_source_reaction():
    system = OdeSystem.make(("a",), (Polynomial.constant(3),), (0,))
    rn = ode_to_rn(system)
    assert rn.reactions == (Reaction((), ((0, 1),), Fraction(3)),)


def test_reaction_count_equals_monomial_count():
    rng = random.Random(5)
    for _ in range(50):
        system = random_poly_system(rng, rng.randint(1, 5), max_degree=3)
        assert len(ode_to_rn(system).reactions) == system.monomial_count()


def test_round_trip_on_random_systems():
    rng = random.Random(9)
    for _ in range(200):
        system = random_poly_system(rng, rng.randint(1, 5), max_degree=3)
        assert rn_to_ode(ode_to_rn(system)) == system


def test_rn_to_ode_linear_in_reactions():
    rng = random.Random(13)
    for _ in range(30):
        a = random_poly_system(rng, 4, max_degree=2)
        b = random_poly_system(rng, 4, max_degree=2)
        ra, rb = ode_to_rn(a), ode_to_rn(b)
        joined = ReactionNetwork(a.names, ra.reactions + rb.reactions, a.init)
        summed = rn_to_ode(joined)
        for i in range(4):
            assert summed.drifts[i] == a.drifts[i] + b.drifts[i]


def test_ode_to_rn_rejects_expression_drifts():
    from odelump.parsing import parse_model
    doc = parse_model("begin model begin init x=1 y=1 end init "
                      "begin ode d(x) = min(x, y) end ode end model")
    with pytest.raises(NonPolynomialDrift):
        ode_to_rn(doc.system)


def test_zero_rate_rejected():
    with pytest.raises(ValueError):
        Reaction(multiset({0: 1}), (), Fraction(0))


def test_high_degree_monomials_accepted():
    system = OdeSystem.make(("a", "b"),
                            (parse_polynomial("a*a*a*b", ("a", "b")),
                             Polynomial.zero()), (1, 1))
    rn = ode_to_rn(system)
    assert rn.reactions[0].reagents == ((0, 3), (1, 1))
    assert rn_to_ode(rn) == system
