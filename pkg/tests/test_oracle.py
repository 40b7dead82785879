import math

import numpy as np
import pytest

from covbond.oracle import QUANTITIES, McConfig, McEstimate, _chunk_stats, _combine, mc_loss_report, mc_one_asset
from covbond.one_asset import OneAssetParams, two_asset_to_one_asset
from covbond.scenarios import STUDY_DEBT, STUDY_RISK
from covbond.two_assets import DebtStructure, TwoAssetParams, expected_losses, margins_calibrate

SMALL = McConfig(n_samples=200_000, seed=42, chunk=50_000)


def test_same_seed_bit_identical():
    p = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 0.3)
    a = mc_loss_report(p, STUDY_DEBT, SMALL).to_dict()
    b = mc_loss_report(p, STUDY_DEBT, SMALL).to_dict()
    assert a == b
    c = mc_loss_report(p, STUDY_DEBT, McConfig(n_samples=200_000, seed=43, chunk=50_000)).to_dict()
    assert a != c


def test_workers_do_not_change_results():
    p = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 0.6)
    serial = mc_loss_report(p, STUDY_DEBT, SMALL).to_dict()
    threaded = mc_loss_report(p, STUDY_DEBT, McConfig(200_000, 42, 50_000, workers=3)).to_dict()
    assert serial == threaded


def test_chunked_statistics_match_one_pass():
    rng = np.random.default_rng(0)
    x, y = np.exp(rng.normal(-1.2, 0.8, 30_001)), np.exp(rng.normal(-0.6, 0.5, 30_001))
    whole = _chunk_stats(x, y, STUDY_DEBT)
    parts = [_chunk_stats(x[i:i + 7_000], y[i:i + 7_000], STUDY_DEBT) for i in range(0, x.size, 7_000)]
    assert np.allclose(_combine(parts), whole, rtol=1e-10, atol=1e-15)


def test_degenerate_no_default():
    p = TwoAssetParams(math.log(0.6), 1e-8, math.log(0.6), 1e-8, 0.5)
    mc = mc_loss_report(p, STUDY_DEBT, SMALL)
    for name in QUANTITIES:
        est = getattr(mc, name)
        assert est.mean == 0.0 and est.std_error == 0.0


def test_comonotonic_draw_matches_one_asset():
    two = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 1.0)
    one = two_asset_to_one_asset(two)
    a = mc_loss_report(two, STUDY_DEBT, SMALL)
    b = mc_one_asset(one, STUDY_DEBT, SMALL)
    for name in QUANTITIES:
        assert getattr(a, name).mean == pytest.approx(getattr(b, name).mean, rel=1e-9, abs=1e-15)


def test_standard_error_scaling():
    p = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 0.9)
    se_small = mc_loss_report(p, STUDY_DEBT, McConfig(100_000, 1, 100_000)).el_portfolio.std_error
    se_large = mc_loss_report(p, STUDY_DEBT, McConfig(1_600_000, 1, 400_000)).el_portfolio.std_error
    assert se_small / se_large == pytest.approx(4.0, rel=0.1)


def test_absent_classes_are_nan():
    p = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 0.0)
    mc = mc_loss_report(p, DebtStructure(0.3, 0.7, 0.0, 0.2), SMALL)
    assert math.isnan(mc.el_junior.mean)
    closed = expected_losses(p, DebtStructure(0.3, 0.7, 0.0, 0.2))
    assert mc.compare(closed)["el_junior"]


def test_covered_bond_el_rho_zero():
    p = margins_calibrate(STUDY_DEBT, STUDY_RISK, STUDY_RISK, 0.0)
    mc = mc_loss_report(p, STUDY_DEBT, McConfig(n_samples=2_000_000, seed=42))
    assert abs(mc.el_covered.mean - 0.00002) < 3 * mc.el_covered.std_error + 5e-6


def test_one_asset_full_encumbrance_branch():
    mc = mc_one_asset(OneAssetParams(-0.3, 0.5, 1.0), STUDY_DEBT, SMALL)
    assert mc.p_event2.mean > 0 and mc.p_event3.mean > 0


def test_estimate_within():
    est = McEstimate(1.0, 0.1, 100)
    assert est.within(1.29) and not est.within(1.31)
    assert McEstimate(math.nan, math.nan, 10).within(None)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(n_samples=0)
    with pytest.raises(ValueError):
        McConfig(seed=-1)
