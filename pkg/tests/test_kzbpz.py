"""Residual engines and the charge-shift recursion."""
from fractions import Fraction

import pytest

from conftest import assert_close, rel_err
from ghostcft import correlators as co
from ghostcft import kzbpz as kz
from ghostcft.blocks import BlockSum, PowerSum, exact_series
from ghostcft.errors import ChargeError, DivisionByZeroCharge, MissingCompanion

half = Fraction(1, 2)


# ----------------------------------------------------------------------
# Ward residuals
# ----------------------------------------------------------------------


def _ward_case(n, rng, ell=2):
    """Charge-conserving N-point data plus a WardForm with a random H."""
    if n == 1:
        return [0.0], [0.0], co.WardForm([0.0], [0.0])
    charges = [rng.uniform(-1, 1) for _ in range(n - 1)]
    if n == 4:
        j4 = ell - sum(charges)
        cs, ws = co.standard_frame_data(*charges, j4, ell)
        h_block = BlockSum.power(rng.uniform(0.5, 1.5), rng.uniform(-0.7, 0.7),
                                 rng.uniform(-0.7, 0.7))
        return cs, ws, co.WardForm(cs, ws, h_block)
    if n == 3:
        j3 = ell - sum(charges)
        cs = [charges[0], charges[1], j3 - ell]
        ws = [0.0, 0.0, j3 * ell - ell * (ell + 1) / 2]
        return cs, ws, co.WardForm(cs, ws)
    j2 = 1 - charges[0]
    cs = [charges[0], j2 - 1]
    ws = [0.0, j2 - 1]
    return cs, ws, co.WardForm(cs, ws)


def test_ward_residuals_n1_to_n4(rng):
    for n in (1, 2, 3, 4):
        for _ in range(5):
            cs, ws, form = _ward_case(n, rng)
            res = kz.ward_max_residual(form, cs, ws, kz.sample_insertions(max(n, 1)))
            assert res < 1e-9, (n, res)


def test_ward_translation_two_point_tight():
    cs, ws = [0.37, 1 - 0.37 - 1], [0.0, 1 - 0.37 - 1]
    form = co.WardForm(cs, ws)
    reports = kz.ward_residuals(form, cs, ws, kz.sample_insertions(2))
    assert reports["L-1"].max_abs < 1e-12


def test_ward_detector_flags_wrong_exponent():
    # perturbing one exponent must blow past 1e-3
    j1, j2, j3 = 0.3, 0.45, 0.27
    j4 = 1 - j1 - j2 - j3
    cs, ws = co.standard_frame_data(j1, j2, j3, j4, 1)
    exps = co.ward_exponents(cs, ws)
    exps[(1, 2)] = exps[(1, 2)] + 0.05
    form = co.WardForm(cs, ws, exponents=exps)
    res = kz.ward_max_residual(form, cs, ws, kz.sample_insertions(4))
    assert res > 1e-3


def test_ward_residuals_from_plain_callable():
    # numeric-derivative path: the 2-point closed form as a bare function
    j1 = 0.37
    fn = lambda w1, w2: (w1 - w2) ** j1
    cs = [j1, -j1]
    ws = [0.0, 0.0 + (1 - j1) * 1 - 1]
    res = kz.ward_residuals(fn, cs, [0.0, j1 * 0 + (1 - j1) - 1], kz.sample_insertions(2))
    assert res["L-1"].max_abs < 1e-9


# ----------------------------------------------------------------------
# charge-shift (KZ) residuals
# ----------------------------------------------------------------------


def test_kz_m2_two_point(rng):
    for _ in range(5):
        j1 = rng.uniform(-1.2, 1.2)
        rep = kz.kz_residual_m2(kz.TwoPointFamily(), (j1, 1 - j1))
        assert rep.max_abs < 1e-12


def test_kz_m2_three_point(rng):
    for ell in (1, 2):
        for _ in range(5):
            j1 = rng.uniform(-1.2, 1.2)
            j2 = rng.uniform(0.1, 1.2)
            j3 = ell - j1 - j2
            rep = kz.kz_residual_m2(kz.ThreePointFamily(ell), (j1, j2, j3))
            assert rep.max_abs < 1e-10, (ell, rep.max_abs)


def test_kz_m2_four_point_flow_one(rng):
    for _ in range(5):
        j1, j2, j3 = (rng.uniform(-0.8, 0.8) for _ in range(3))
        j4 = 1 - j1 - j2 - j3
        rep = kz.kz_residual_m2(kz.FourPointL1Family(), (j1, j2, j3, j4))
        assert rep.max_abs < 1e-10


def test_kz_m1_four_point_flow_one(rng):
    j1, j2, j3 = 0.3, 0.45, 0.27
    j4 = 1 - j1 - j2 - j3
    rep = kz.kz_residual_m1_l1(kz.FourPointL1Family(), (j1, j2, j3, j4))
    assert rep.max_abs < 1e-10


def test_kz_m1_m2_ward_consistency():
    """Summing the per-field first-order identities and the last-field one
    telescopes to translation invariance; all three residual families agree
    to 1e-9 on the flow-1 4-point solution."""
    j1, j2, j3 = 0.3, 0.45, 0.27
    j4 = 1 - j1 - j2 - j3
    fam = kz.FourPointL1Family()
    charges = (j1, j2, j3, j4)
    points = kz.sample_insertions(4)
    m1 = kz.kz_residual_m1_l1(fam, charges, points).max_abs
    m2 = kz.kz_residual_m2(fam, charges, points).max_abs
    form = fam.base(charges)
    trans = kz.ward_residuals(form, form.charges, form.weights, points)["L-1"].max_abs
    assert max(m1, m2, trans) < 1e-9


def test_missing_companion_surfaces():
    fam = kz.ThreePointFamily(2)
    with pytest.raises(MissingCompanion):
        fam.companion(3, (0.3, 0.45, 1.25))


def test_specialized_flow_one_identities():
    j3 = Fraction(27, 100)
    blk = PowerSum.single(Fraction(1), j3)
    shifted = PowerSum.single(Fraction(1), j3 + 1)
    assert kz.kz_specialized_j0_residual(blk, shifted).max_abs < 1e-13
    assert kz.kz_specialized_m1_residual(blk, shifted, j3).max_abs < 1e-12
    assert kz.kz_decoupled_residual(blk, j3).max_abs < 1e-13


def test_fourpoint_constant_relations_exact():
    charges = (Fraction(3, 10), Fraction(2, 5), Fraction(27, 100),
               1 - Fraction(97, 100))
    assert kz.kz_fourpoint_constant_relations(charges)


# ----------------------------------------------------------------------
# BPZ residuals
# ----------------------------------------------------------------------


def test_bpz_two_point():
    F = kz.TwoPointFamily().base((0.5, 0.5))
    rep = kz.bpz_residual(F, 0, F.charges, F.weights)
    assert rep.max_abs < 1e-12


def test_bpz_requires_probe_charge():
    F = kz.TwoPointFamily().base((0.3, 0.7))
    with pytest.raises(ChargeError):
        kz.bpz_residual(F, 0, F.charges, F.weights)


def test_bpz_three_point_flows(rng):
    for ell in (1, 2):
        j2 = rng.uniform(0.2, 1.2)
        j3 = ell - 0.5 - j2
        fam = kz.ThreePointFamily(ell)
        F = fam.base((0.5, j2, j3))
        rep = kz.bpz_residual(
            F, 0, F.charges, F.weights, rhs=kz.threept_bpz_rhs(j2, ell)
        )
        assert rep.max_abs < 1e-10, (ell, rep.max_abs)


def test_bpz_three_point_flow_three_rhs_nonzero():
    # the ell=3 right side is genuinely non-zero: using it the residual is
    # tiny, dropping it the residual is large (the vanishing mechanism)
    j2 = 0.8
    j3 = 3 - 0.5 - j2
    q = [0.5, j2, j3 - 3]
    h = [0.0, 0.0, j3 * 3 - 6]
    e12, e13, e23 = co.three_point_exponents(0.5, j2, j3, 3)
    form = co.WardForm(q, h, exponents={(1, 2): e12, (1, 3): e13, (2, 3): e23})
    with_rhs = kz.bpz_residual(form, 0, q, h, rhs=kz.threept_bpz_rhs(j2, 3))
    without = kz.bpz_residual(form, 0, q, h)
    assert with_rhs.max_abs < 1e-10
    assert without.max_abs > 1e-4


def test_bpz_four_point_blocks_all_flows(rng):
    for _ in range(3):
        j1 = rng.uniform(0.1, 0.8)
        j2 = rng.uniform(0.1, 0.8)
        for ell in (1, 2, 3):
            j4 = ell - j1 - j2 - 0.5
            if ell == 2 and abs(2 * j4 - round(2 * j4)) < 0.05:
                continue
            if ell == 1:
                blocks = [
                    BlockSum.power(1, 0.5, 0),
                    BlockSum.incomplete_beta(1, 0.5, 0, -j4 + 0.5, -j2 + 0.5),
                ]
            elif ell == 2:
                blocks = list(co.blocks_l2_blocksums(j1, j2, j4))
            else:
                blocks = [
                    BlockSum.power(1, -j4 + 2, -j2 + 0.5),
                    BlockSum.incomplete_beta(1, -j4 + 2, -j2 + 0.5, j4 - 0.5, j2 - 0.5),
                ]
            for blk in blocks:
                F = co.unspecialize_block(blk, j1, j2, 0.5, j4, ell)
                rep = kz.bpz_residual(F, 2, F.charges, F.weights)
                assert rep.max_abs < 1e-8, (ell, rep.max_abs)


# ----------------------------------------------------------------------
# 3-point constraint verdicts
# ----------------------------------------------------------------------


def test_threept_constraint_relations_hold():
    for ell in (1, 2):
        j1, j2 = Fraction(3, 10), Fraction(2, 5)
        j3 = ell - j1 - j2
        v = kz.threept_constraint_check(j1, j2, j3, ell)
        assert v.kind == "relations-hold"


def test_threept_constraint_must_vanish_with_monomial():
    j1, j2 = Fraction(3, 10), Fraction(2, 5)
    for ell in (3, 4):
        v = kz.threept_constraint_check(j1, j2, ell - j1 - j2, ell)
        assert v.kind == "must-vanish"
        a, b = v.violating_monomial
        assert a >= 1 and b >= 1 and a + b == ell


def test_threept_shifted_constants_flow_two():
    j1, j2 = Fraction(3, 10), Fraction(2, 5)
    j3 = 2 - j1 - j2
    c1, c2 = kz.threept_shifted_constants(j1, j2, j3, 2)
    assert c1 == (j3 - 1) / j1
    assert c2 == -(j3 - 1) / j2
    # flow 1: all constants equal
    c1, c2 = kz.threept_shifted_constants(j1, j2, 1 - j1 - j2, 1)
    assert c1 == 1 and c2 == 1


# ----------------------------------------------------------------------
# the charge-shift recursion
# ----------------------------------------------------------------------


def test_recursion_flow_one_exact_power():
    j1, j2 = Fraction(3, 10), Fraction(2, 5)
    j4 = 1 - j1 - j2 - half
    out = kz.recursion_step(PowerSum.single(Fraction(1), half), (j1, j2, half, j4), 1)
    assert out.equals(PowerSum.single(Fraction(1), Fraction(3, 2)))
    out5 = kz.recursion_iterate(
        PowerSum.single(Fraction(1), half), (j1, j2, half, j4), 1, 5
    )
    assert out5.equals(PowerSum.single(Fraction(1), half + 5))


def test_recursion_flow_three_exact_polynomials():
    j1, j2 = Fraction(3, 10), Fraction(2, 5)
    j4 = 3 - j1 - j2 - half
    cur = co.block_l3_powersum(j1, j2, j4)
    for k in (1, 2, 3):
        cur = kz.recursion_step(cur, (j1, j2, half + (k - 1), j4 - (k - 1)), 3)
        want = co.poly_Pk_polysum(k, j1, j4).mul_power(-j4 + 3 * k + 2, -j2 + half)
        assert cur.equals(want), k


def test_recursion_flow_three_backward_lattice_exact():
    # the j3 = -1/2 member returns the probe-charge block exactly
    for j1t in (Fraction(3, 2), Fraction(5, 2)):
        j2t = Fraction(2, 5)
        j4m = 3 - j1t - j2t + half
        c_low = -j4m + 2
        # terminating 2F1(-j1+3/2, 1; c_low; eta) as an exact PowerSum
        a = -j1t + Fraction(3, 2)
        coeffs = {}
        term = Fraction(1)
        n = 0
        while True:
            coeffs[(Fraction(n), Fraction(0))] = term
            if a + n == 0:
                break
            term = term * (a + n) * (1 + n) / ((c_low + n) * (n + 1))
            n += 1
        blkm = (
            PowerSum(coeffs)
            .scale(Fraction(1, 2) / (j4m - 1))
            .mul_power(-j4m, -j2t + half)
        )
        out = kz.recursion_step(blkm, (j1t, j2t, -half, j4m), 3)
        assert out.equals(co.block_l3_powersum(j1t, j2t, j4m - 1))


def test_recursion_flow_three_backward_generic_series():
    # generic rational charges: exact rational series agreement to order 60
    j1, j2 = Fraction(3, 10), Fraction(2, 5)
    j4m = 3 - j1 - j2 + half
    blkm = BlockSum.hyp2f1(
        Fraction(1, 2) / (j4m - 1), -j4m, -j2 + half,
        -j1 + Fraction(3, 2), Fraction(1), -j4m + 2,
    )
    out = kz.recursion_step(blkm, (j1, j2, -half, j4m), 3)
    assert out.is_exact()
    want = co.block_l3_powersum(j1, j2, j4m - 1).to_blocksum()
    p0g, cg = exact_series(out, 60)
    p0w, cw = exact_series(want, 60, base_p=p0g)
    assert p0g == p0w and cg == cw


def test_recursion_flow_two_matches_conjecture(rng):
    j1, j2 = 0.35, 0.8
    j4 = 1.5 - j1 - j2
    blk1, blk2 = co.blocks_l2_blocksums(j1, j2, j4)
    eta = 0.33
    import warnings

    for k in (0, 1, 2, 3):
        got1 = kz.recursion_iterate(blk1, (j1, j2, 0.5, j4), 2, k).value(eta)
        got2 = kz.recursion_iterate(blk2, (j1, j2, 0.5, j4), 2, k).value(eta)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", co.ConjecturalChargeWarning)
            c1, c2 = co.conj_blocks_l2(j1, j2, 0.5 + k, j4 - k, eta)
        assert rel_err(got1, c1) < 1e-10
        assert rel_err(got2, c2) < 1e-10


def test_recursion_flow_three_matches_conjecture(rng):
    import warnings

    for _ in range(3):
        j1 = rng.uniform(0.1, 0.6)
        j2 = rng.uniform(0.1, 0.9)
        j4 = 3 - j1 - j2 - 0.5
        blk = BlockSum.power(1.0, -j4 + 2, -j2 + 0.5)
        eta = rng.uniform(0.1, 0.6)
        for k in (0, 1, 2, 3, 4):
            got = kz.recursion_iterate(blk, (j1, j2, 0.5, j4), 3, k).value(eta)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", co.ConjecturalChargeWarning)
                want = co.conj_block_l3(j1, j2, 0.5 + k, j4 - k, eta)
            assert rel_err(got, want) < 1e-10


def test_recursion_linearity_and_modes_agree():
    j1, j2 = Fraction(7, 20), Fraction(4, 5)
    j4 = 3 - j1 - j2 - half
    blk = co.block_l3_powersum(j1, j2, j4)
    scaled = kz.recursion_step(blk.scale(Fraction(5, 3)), (j1, j2, half, j4), 3)
    plain = kz.recursion_step(blk, (j1, j2, half, j4), 3)
    assert scaled.equals(plain.scale(Fraction(5, 3)))
    # exact vs numeric arithmetic
    blk_n = BlockSum.power(1.0, -float(j4) + 2, -float(j2) + 0.5)
    out_n = kz.recursion_step(blk_n, (float(j1), float(j2), 0.5, float(j4)), 3)
    assert abs(complex(plain.eval(0.37)) - out_n.value(0.37)) < 1e-11


def test_recursion_guards():
    blk = PowerSum.single(Fraction(1), half)
    with pytest.raises(DivisionByZeroCharge):
        kz.recursion_step(blk, (half, half, 0, half), 1)
    with pytest.raises(MissingCompanion):
        kz.recursion_step(blk, (half, half, half, half), 1, companion=None)
    explicit = kz.recursion_step(
        blk, (Fraction(3, 10), Fraction(2, 5), half, 1 - Fraction(3, 10) - Fraction(2, 5) - half),
        1, companion=blk,
    )
    assert explicit.equals(PowerSum.single(Fraction(1), Fraction(3, 2)))


def test_report_json_schema():
    rep = kz.kz_residual_m2(kz.TwoPointFamily(), (0.37, 0.63), tolerance=1e-10)
    import json

    payload = json.loads(rep.to_json())
    assert set(payload) == {"operator", "tolerance", "max_residual", "pass", "samples"}
    assert payload["pass"] is True
