import random
from fractions import Fraction

import pytest

from odelump import (InitMismatchWarning, NonPolynomialDrift, NotABde,
                     NotAnFde, OdeSystem, Partition, PartitionMismatch,
                     Polynomial, TooLarge, brute_force_coarsest, check_bde,
                     check_fde, coarsest_bde, coarsest_fde,
                     coarsest_with_trace, monomial, parse_polynomial,
                     partition_refines, poly_normalize,
                     prepartition_from_inits, reduce_backward, reduce_forward)
from conftest import (cascade, permute_partition, permute_system,
                      random_poly_system)

H_SPLIT = Partition([[0], [1, 2]])
H_ONE = Partition.one_block(3)
NAMES = ("x1", "x2", "x3")


# -- backward check -----------------------------------------------------------


def test_bde_holds_with_equal_rates():
    assert check_bde(cascade(k1=1, k2=1), H_SPLIT).ok


def test_bde_fails_with_unequal_rates():
    result = check_bde(cascade(k1=1, k2=2), H_SPLIT)
    assert not result.ok
    assert result.verdict == "counterexample"
    assert result.pair == (1, 2)
    assert result.block_index == 1
    assert result.witness_polynomial == parse_polynomial("-x1", NAMES)
    # the witness assignment really separates the drifts
    system = cascade(k1=1, k2=2)
    point = result.witness_assignment
    assert system.drift_value(1, point) != system.drift_value(2, point)


def test_bde_singleton_partition_trivially_ok():
    assert check_bde(cascade(k1=3, k2=7), Partition.singletons(3)).ok


# -- forward check ----------------------------------------------------------------


def test_fde_holds_for_any_rates():
    assert check_fde(cascade(k1=1, k2=1), H_SPLIT).ok
    assert check_fde(cascade(k1=2, k2=3), H_SPLIT).ok
    assert check_fde(cascade(k1=-1, k2=5), H_SPLIT).ok


def test_fde_fails_on_one_block():
    result = check_fde(cascade(k1=1, k2=1), H_ONE)
    assert not result.ok
    assert result.pair == (0, 1)
    # gradient gap of F = (k1+k2-1)x1 - x2 - x3 between x1 and x2 is 1-(-1) = 2
    assert result.witness_polynomial == Polynomial.constant(2)


def test_fde_singleton_partition_trivially_ok():
    assert check_fde(cascade(k1=4, k2=9), Partition.singletons(3)).ok


# -- coarsest by refinement ----------------------------------------------------------


def test_coarsest_bde_from_one_block():
    assert coarsest_bde(cascade(k1=1, k2=1), H_ONE) == H_SPLIT


def test_coarsest_bde_unequal_rates_fully_splits():
    assert coarsest_bde(cascade(k1=1, k2=2), H_ONE) == Partition.singletons(3)


def test_coarsest_from_singletons_is_identity():
    seed = Partition.singletons(3)
    assert coarsest_bde(cascade(), seed) == seed
    assert coarsest_fde(cascade(), seed) == seed


def test_coarsest_fde_from_one_block():
    assert coarsest_fde(cascade(k1=1, k2=1), H_ONE) == H_SPLIT


def test_coarsest_fde_fixpoint_unchanged():
    assert coarsest_fde(cascade(k1=2, k2=3), H_SPLIT) == H_SPLIT


def test_all_zero_drifts_keep_one_block():
    system = OdeSystem.make(NAMES, tuple(Polynomial.zero() for _ in NAMES), (0, 0, 0))
    assert coarsest_bde(system, H_ONE) == H_ONE
    assert coarsest_fde(system, H_ONE) == H_ONE


def test_refinement_trace_is_strictly_monotone():
    rng = random.Random(21)
    for _ in range(40):
        system = random_poly_system(rng, rng.randint(2, 6))
        for mode in ("bde", "fde"):
            part, trace = coarsest_with_trace(system, Partition.one_block(system.n), mode)
            assert all(b < a for b, a in zip(trace, trace[1:]))
            assert len(trace) <= system.n
            assert trace[-1] == part.block_count


def test_coarsest_results_are_sound_and_refine_seed():
    rng = random.Random(33)
    for _ in range(40):
        system = random_poly_system(rng, rng.randint(2, 6))
        seed = Partition.one_block(system.n)
        bde = coarsest_bde(system, seed)
        fde = coarsest_fde(system, seed)
        assert check_bde(system, bde).ok
        assert check_fde(system, fde).ok
        assert partition_refines(bde, seed)
        assert partition_refines(fde, seed)


def test_oracle_agreement_sample():
    rng = random.Random(101)
    for _ in range(25):
        system = random_poly_system(rng, rng.randint(2, 5))
        seed = Partition.one_block(system.n)
        assert coarsest_bde(system, seed) == brute_force_coarsest(system, seed, "bde")
        assert coarsest_fde(system, seed) == brute_force_coarsest(system, seed, "fde")


def test_permutation_equivariance():
    rng = random.Random(55)
    for _ in range(25):
        system = random_poly_system(rng, rng.randint(2, 6))
        perm = list(range(system.n))
        rng.shuffle(perm)
        shuffled = permute_system(system, perm)
        seed = Partition.one_block(system.n)
        for coarsest in (coarsest_bde, coarsest_fde):
            assert coarsest(shuffled, seed) == \
                permute_partition(coarsest(system, seed), perm)


def test_normalization_invariance():
    # same drifts written with split and reordered monomials
    plain = cascade(k1=2, k2=3)
    messy_drift = poly_normalize([
        monomial(1, {0: 1}), monomial(-1, {1: 1}), monomial(1, {0: 1}),
    ])
    messy = OdeSystem.make(NAMES, (plain.drifts[0], messy_drift, plain.drifts[2]),
                           plain.init)
    rebuilt = cascade(k1=2, k2=3)
    assert messy == rebuilt
    assert check_fde(messy, H_SPLIT).ok == check_fde(rebuilt, H_SPLIT).ok
    assert coarsest_bde(messy, H_ONE) == coarsest_bde(rebuilt, H_ONE)


# -- reductions --------------------------------------------------------------------------


def test_reduce_forward_cascade():
    system = cascade(k1=2, k2=3, init=(1, Fraction(1, 2), Fraction(1, 2)))
    reduced = reduce_forward(system, H_SPLIT)
    assert reduced.names == ("x1", "x2_x3")
    assert reduced.drifts[0] == parse_polynomial("-x1", reduced.names)
    assert reduced.drifts[1] == parse_polynomial("5*x1 - x2_x3", reduced.names)
    assert reduced.init == (Fraction(1), Fraction(1))


def test_reduce_forward_singletons_is_isomorphic():
    system = cascade(k1=2, k2=3)
    reduced = reduce_forward(system, Partition.singletons(3))
    assert reduced.names == system.names
    assert reduced.drifts == system.drifts
    assert reduced.init == system.init


def test_reduce_forward_requires_fde():
    with pytest.raises(NotAnFde) as err:
        reduce_forward(cascade(k1=1, k2=1), H_ONE)
    assert not err.value.counterexample.ok


def test_reduce_forward_observables_map_to_blocks():
    system = cascade(k1=1, k2=1, observables={2})
    reduced = reduce_forward(system, H_SPLIT)
    assert reduced.observables == frozenset({1})


def test_reduce_backward_cascade():
    system = cascade(k1=1, k2=1, init=(1, Fraction(1, 2), Fraction(1, 2)))
    reduced = reduce_backward(system, H_SPLIT)
    assert reduced.names == ("x1", "x2")
    assert reduced.drifts[1] == parse_polynomial("x1 - x2", ("x1", "x2"))
    assert reduced.init == (Fraction(1), Fraction(1, 2))


def test_reduce_backward_singletons_unchanged():
    system = cascade(k1=5, k2=2)
    reduced = reduce_backward(system, Partition.singletons(3))
    assert reduced == system


def test_reduce_backward_warns_on_unequal_inits():
    system = cascade(k1=1, k2=1, init=(1, 0, 5))
    with pytest.warns(InitMismatchWarning, match="x2, x3"):
        reduced = reduce_backward(system, H_SPLIT)
    assert reduced.names == ("x1", "x2")


def test_reduce_backward_requires_bde():
    with pytest.raises(NotABde):
        reduce_backward(cascade(k1=1, k2=2), H_SPLIT)


# -- initial partitions ---------------------------------------------------------------------


def test_prepartition_groups_by_value():
    system = cascade(init=(1, 0, 0))
    assert prepartition_from_inits(system, H_ONE) == H_SPLIT


def test_prepartition_equal_inits_keep_seed():
    system = cascade(init=(2, 2, 2))
    assert prepartition_from_inits(system, H_ONE) == H_ONE


def test_prepartition_isolates_observables():
    system = cascade(init=(0, 0, 0), observables={1})
    assert prepartition_from_inits(system, H_ONE) == Partition([[1], [0, 2]])


def test_prepartition_respects_seed_blocks():
    system = cascade(init=(1, 1, 1))
    assert prepartition_from_inits(system, H_SPLIT) == H_SPLIT


# -- brute force oracle ------------------------------------------------------------------------


def test_brute_force_cascade_bde():
    assert brute_force_coarsest(cascade(k1=1, k2=1), H_ONE, "bde") == H_SPLIT


def test_brute_force_single_variable():
    system = OdeSystem.make(("x",), (Polynomial.variable(0),), (1,))
    assert brute_force_coarsest(system, Partition.one_block(1), "bde") == \
        Partition.one_block(1)


def test_brute_force_guard():
    n = 11
    system = OdeSystem.make(tuple(f"x{i}" for i in range(n)),
                            tuple(Polynomial.zero() for _ in range(n)),
                            (0,) * n)
    with pytest.raises(TooLarge):
        brute_force_coarsest(system, Partition.one_block(n), "bde")


def test_brute_force_respects_seed():
    system = cascade(k1=1, k2=1)
    seed = Partition([[0, 1], [2]])  # pins x3 apart even though {x2,x3} would merge
    result = brute_force_coarsest(system, seed, "bde")
    assert partition_refines(result, seed)
    assert result == Partition.singletons(3)


# -- error paths -----------------------------------------------------------------------------


def test_partition_mismatch():
    with pytest.raises(PartitionMismatch):
        check_bde(cascade(), Partition.singletons(2))
    with pytest.raises(PartitionMismatch):
        coarsest_fde(cascade(), Partition.one_block(4))


def test_expression_drifts_rejected_by_syntactic_path():
    from odelump.parsing import parse_model
    doc = parse_model("begin model begin init x=1 y=1 end init "
                      "begin ode d(x) = min(x, y) d(y) = min(y, x) end ode end model")
    with pytest.raises(NonPolynomialDrift):
        check_bde(doc.system, Partition.one_block(2))


def test_mode_validated():
    with pytest.raises(ValueError):
        brute_force_coarsest(cascade(), H_ONE, "sideways")
