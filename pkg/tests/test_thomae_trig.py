import numpy as np
import pytest

from thetalab.algebra import INF, IndexSet
from thetalab.thomae import (TrigPartition, alpha_ratio, char_from_partition_trig,
                             derived_partitions_for_matrix, enumerate_partitions_trig,
                             estimate_alpha, simple_zero_check,
                             verify_matrix_form_trig, verify_quotient_trig,
                             verify_thomae_deriv_trig_t1, verify_thomae_deriv_trig_t2)


def test_partition_counts_q2():
    assert len(enumerate_partitions_trig(2, "constant")) == 30
    assert len(enumerate_partitions_trig(2, "deriv1")) == 20
    assert len(enumerate_partitions_trig(2, "deriv2", infinity_in=1)) == 10
    assert len(enumerate_partitions_trig(2, "deriv2", infinity_in=0)) == 10


def test_partition_counts_q1():
    assert len(enumerate_partitions_trig(1, "constant")) == 2
    assert len(enumerate_partitions_trig(1, "deriv1")) == 1
    assert len(enumerate_partitions_trig(1, "deriv2", infinity_in=1)) == 0


def test_partition_shape_validation():
    # wrong cardinality pattern is rejected at type level (this is also how a
    # multiplicity >= 3 divisor would have to be encoded, which cannot exist)
    with pytest.raises(ValueError):
        TrigPartition("deriv1", IndexSet.of([1, 2, INF]), IndexSet.of([3]),
                      IndexSet.of([4, 5])).validate(2)
    with pytest.raises(ValueError):
        TrigPartition("constant", IndexSet.of([1]), IndexSet.of([2]),
                      IndexSet.of([3, INF])).validate(2)


def test_characteristics_are_sixth_periods(trig_q2):
    c, pd = trig_q2
    for p in enumerate_partitions_trig(2, "constant")[:6]:
        ch = char_from_partition_trig(p, pd)
        assert all(x.denominator in (1, 2, 3, 6) for x in ch.eps + ch.delta)


def test_alpha_estimate_single_curve(trig_q2):
    c, pd = trig_q2
    est = estimate_alpha([(c, pd)], tol=1e-6)
    assert est.spread < 1e-6
    assert len(est.phases) == 30
    assert all(t.ok and t.order == 12 for t in est.phases)


def test_alpha_across_curves(trig_q2_batch):
    est = estimate_alpha(trig_q2_batch, tol=1e-6)
    assert est.spread < 1e-6
    mods = [p["modulus"] for p in est.per_partition]
    assert (max(mods) - min(mods)) / est.modulus < 1e-6


def test_alpha_modulus_matches_q1_scalefree(trig_q1):
    # q=1 also produces a consistent estimate (2 partitions)
    c, pd = trig_q1
    est = estimate_alpha([(c, pd)], tol=1e-6)
    assert est.spread < 1e-6
    assert len(est.phases) == 2


def test_deriv_t1_all(trig_q2):
    c, pd = trig_q2
    aref = estimate_alpha([(c, pd)]).reference_for(0)
    parts = enumerate_partitions_trig(2, "deriv1")
    assert len(parts) == 20
    for p in parts:
        rep = verify_thomae_deriv_trig_t1(c, pd, aref, p, tol=1e-5)
        assert rep.passed, (p.label(), rep.spread, rep.tag)
        assert rep.tag.order == 36


def test_deriv_t1_q1_degenerate(trig_q1):
    c, pd = trig_q1
    aref = estimate_alpha([(c, pd)]).reference_for(0)
    (p,) = enumerate_partitions_trig(1, "deriv1")
    rep = verify_thomae_deriv_trig_t1(c, pd, aref, p, tol=1e-6)
    assert rep.passed


def test_deriv_t2_both_infinity_placements(trig_q2):
    c, pd = trig_q2
    aref = estimate_alpha([(c, pd)]).reference_for(0)
    for loc in (1, 0):
        parts = enumerate_partitions_trig(2, "deriv2", infinity_in=loc)
        assert len(parts) == 10
        for p in parts:
            rep = verify_thomae_deriv_trig_t2(c, pd, aref, p, tol=1e-5)
            assert rep.passed, (p.label(), rep.spread, rep.tag)
            # Lambda2 empty at q=2: single l = g term with sigma_0 = 1
            assert rep.details["zeros_ok"]


def test_deriv_rhs_uses_correct_rows(trig_q2):
    # type-1 involves only rows l <= 2q-1 of C, type-2 only l >= 2q
    from thetalab.thomae import _trig_deriv_rhs
    c, pd = trig_q2
    q = c.q
    p1 = enumerate_partitions_trig(2, "deriv1")[0]
    p2 = enumerate_partitions_trig(2, "deriv2", infinity_in=1)[0]
    base1 = _trig_deriv_rhs(c, pd, p1, 1.0)
    base2 = _trig_deriv_rhs(c, pd, p2, 1.0)
    pd2 = __import__("copy").copy(pd)
    Cmod = pd.C.copy()
    Cmod[2 * q - 1:, :] *= 7.0     # scale the second-family rows
    pd2.C = Cmod
    detfac = 7.0 ** ((q - 1) / 2.0)   # only through the sqrt(det C) prefactor
    assert np.allclose(_trig_deriv_rhs(c, pd2, p1, 1.0), detfac * base1)
    assert np.allclose(_trig_deriv_rhs(c, pd2, p2, 1.0), 7.0 * detfac * base2)


def test_quotient_trig_all_k(trig_q2):
    c, pd = trig_q2
    for k in range(1, 6):
        rep = verify_quotient_trig(c, pd, k, seed=23, tol=1e-6)
        assert rep.passed, (k, rep.tag)
        assert rep.tag.order == 12
        assert rep.spread < 1e-6


def test_matrix_form_trig(trig_q2):
    c, pd = trig_q2
    aref = estimate_alpha([(c, pd)]).reference_for(0)
    p = enumerate_partitions_trig(2, "constant")[0]
    derived = derived_partitions_for_matrix(p, 2)
    assert len(derived) == 4
    assert [d.kind for d in derived] == ["deriv1", "deriv1", "deriv2", "deriv2"]
    rep = verify_matrix_form_trig(c, pd, aref, p, tol=1e-5)
    assert rep.passed, rep.details
    assert rep.details["zero_block_err"] < 1e-10
    assert rep.details["entrywise_rel_err"] < 1e-5


def test_simple_zeros(trig_q2):
    c, pd = trig_q2
    deriv = (enumerate_partitions_trig(2, "deriv1")
             + enumerate_partitions_trig(2, "deriv2", infinity_in=1))
    assert len(deriv) == 30
    for p in deriv:
        rep = simple_zero_check(pd, p)
        assert rep.passed and rep.details["is_zero"] and rep.details["grad_ok"]
    for p in enumerate_partitions_trig(2, "constant")[:8]:
        rep = simple_zero_check(pd, p)
        assert rep.passed and not rep.details["is_zero"]
