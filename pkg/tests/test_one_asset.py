import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covbond.errors import NotEquivalent
from covbond.numerics import std_normal_inv_cdf
from covbond.one_asset import (
    OneAssetParams,
    adjust_encumbrance,
    adjusted_one_asset,
    calibrate_issuer_one,
    cover_shortfall,
    encumbrance_from_balance,
    expected_losses_one,
    min_matchable_el,
    two_asset_to_one_asset,
)
from covbond.oracle import McConfig, mc_one_asset
from covbond.scenarios import STUDY_DEBT, STUDY_RISK, TABLE2_EL_COVER, table2_debt
from covbond.two_assets import DebtStructure, RiskInputs, TwoAssetParams, expected_losses, margins_calibrate
from golden import TABLE2, TABLE_TOL_PP


def study_one(C):
    debt = table2_debt(C)
    params, adj = adjusted_one_asset(debt, STUDY_RISK, TABLE2_EL_COVER)
    return debt, params, adj


def test_issuer_threshold_identity():
    kappa, psi = calibrate_issuer_one(STUDY_DEBT, STUDY_RISK)
    assert math.exp(kappa + psi * std_normal_inv_cdf(0.01)) == pytest.approx(1.0, rel=1e-13)


@pytest.mark.parametrize("col,C", list(enumerate(TABLE2["header"])))
def test_table_two_column(col, C):
    debt, params, adj = study_one(C)
    report = expected_losses_one(params, debt)
    assert 100 * params.epsilon == pytest.approx(TABLE2["Adjusted encumbrance ratio"][col], abs=0.05)
    assert not adj.capped
    for label, attr in (("Covered bonds EL", "el_covered"), ("Senior unsecured EL", "el_senior"),
                        ("Junior EL", "el_junior")):
        expected = TABLE2[label][col]
        got = getattr(report, attr)
        if expected is None:
            assert got is None
        else:
            assert 100 * got == pytest.approx(expected, abs=TABLE_TOL_PP)


def test_homogeneous_encumbrance():
    # cover EL equal to issuer EL gives eps = (1+v) C / D
    for C in (0.1, 0.3, 0.7):
        _, params, _ = study_one(C)
        assert params.epsilon == pytest.approx(1.2 * C, rel=1e-10)


def test_junior_independent_of_cover():
    juniors = [expected_losses_one(p, d).el_junior for d, p, _ in map(study_one, (0.0, 0.2, 0.5, 0.8))]
    assert max(juniors) - min(juniors) < 1e-14


def test_losses_conserve_issuer_shortfall():
    debt, params, _ = study_one(0.4)
    r = expected_losses_one(params, debt)
    total = debt.C * r.el_covered + debt.S * r.el_senior + debt.U * r.el_junior
    assert total == pytest.approx(STUDY_RISK.el * debt.total, rel=1e-10)
    assert r.issuer_pd == pytest.approx(STUDY_RISK.pd, rel=1e-12)


class TestEncumbrance:
    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.05, 0.9), st.floats(0.0, 0.5), st.floats(1e-4, 0.02))
    def test_shortfall_matches_target(self, C, v, el):
        kappa, psi = calibrate_issuer_one(STUDY_DEBT, STUDY_RISK)
        adj = adjust_encumbrance(kappa, psi, C, v, el)
        K = (1 + v) * C
        assert cover_shortfall(adj.theta, psi, K) / K == pytest.approx(el, rel=1e-9)
        assert adj.epsilon == min(1.0, adj.epsilon_raw)

    def test_monotone_in_target(self):
        kappa, psi = calibrate_issuer_one(STUDY_DEBT, STUDY_RISK)
        thetas = [adjust_encumbrance(kappa, psi, 0.3, 0.2, el).theta for el in np.geomspace(1e-4, 0.5, 15)]
        assert all(b < a for a, b in zip(thetas, thetas[1:]))

    def test_vanishing_cover_el_limit(self):
        kappa, psi = calibrate_issuer_one(STUDY_DEBT, STUDY_RISK)
        adj = adjust_encumbrance(kappa, psi, 0.3, 0.2, 1 - 1e-9)
        assert adj.epsilon < 1e-3

    def test_min_matchable_fixed_point(self):
        kappa, psi = calibrate_issuer_one(STUDY_DEBT, STUDY_RISK)
        floor = min_matchable_el(kappa, psi, 0.3, 0.2)
        adj = adjust_encumbrance(kappa, psi, 0.3, 0.2, floor)
        assert adj.epsilon_raw == pytest.approx(1.0, rel=1e-9)

    def test_min_matchable_degenerate(self):
        assert min_matchable_el(0.0, 1e-3, 0.3, 0.2) == pytest.approx(0.0, abs=1e-300)

    def test_capped_for_risky_issuer(self):
        debt = STUDY_DEBT
        kappa, psi = calibrate_issuer_one(debt, RiskInputs(0.2, 0.6))
        floor = min_matchable_el(kappa, psi, debt.C, debt.v)
        adj = adjust_encumbrance(kappa, psi, debt.C, debt.v, floor / 10)
        assert adj.capped and adj.epsilon == 1.0 and adj.epsilon_raw > 1

    def test_full_encumbrance_losses(self):
        # no residual pool: every senior loss beyond the cover shortfall is total
        params = OneAssetParams(-0.5, 0.6, 1.0)
        r = expected_losses_one(params, STUDY_DEBT)
        mc = mc_one_asset(params, STUDY_DEBT, McConfig(n_samples=1_000_000, seed=9))
        assert all(mc.compare(r, k=4.0).values())
        assert r.p_event2 > 0 and r.p_event3 > 0

    def test_balance_formula(self):
        assert encumbrance_from_balance(0.3, 0.2, 1.2) == pytest.approx(0.30, rel=1e-15)
        assert encumbrance_from_balance(0.3, 0.2, 1.0) == pytest.approx(0.36, rel=1e-15)
        with pytest.raises(ValueError):
            encumbrance_from_balance(0.3, 0.2, 0.36)
        with pytest.raises(ValueError):
            encumbrance_from_balance(0.3, 0.2, 0.0)


class TestEquivalence:
    def test_symmetric(self):
        p = two_asset_to_one_asset(TwoAssetParams(0.1, 0.3, 0.1, 0.3, 1.0))
        assert p.epsilon == pytest.approx(0.5, rel=1e-15)

    def test_study_model(self):
        two = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 1.0)
        one = two_asset_to_one_asset(two)
        assert one.epsilon == pytest.approx(0.36, rel=1e-12)
        r1, r2 = expected_losses_one(one, STUDY_DEBT), expected_losses(two, STUDY_DEBT)
        for attr in ("p_event1", "p_event2", "p_event3", "el_covered", "el_senior", "el_junior"):
            assert getattr(r1, attr) == pytest.approx(getattr(r2, attr), abs=1e-12)

    @pytest.mark.parametrize("params", [
        TwoAssetParams(0.1, 0.3, 0.1, 0.31, 1.0),
        TwoAssetParams(0.1, 0.3, 0.1, 0.3, 0.9),
    ])
    def test_not_equivalent(self, params):
        with pytest.raises(NotEquivalent):
            two_asset_to_one_asset(params)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(-2, 1), st.floats(-2, 1), st.floats(0.05, 1.5))
    def test_losses_agree(self, mu, nu, sigma):
        two = TwoAssetParams(mu, sigma, nu, sigma, 1.0)
        one = two_asset_to_one_asset(two)
        debt = DebtStructure(0.3, 0.6, 0.1)
        r1, r2 = expected_losses_one(one, debt), expected_losses(two, debt)
        for attr in ("el_covered", "el_senior", "el_junior", "el_portfolio"):
            assert getattr(r1, attr) == pytest.approx(getattr(r2, attr), abs=1e-10)


def test_no_covered_bonds():
    debt, params, adj = study_one(0.0)
    assert params.epsilon == 0.0 and adj.theta == -math.inf
    r = expected_losses_one(params, debt)
    assert r.el_covered is None and r.p_event3 == 0.0
