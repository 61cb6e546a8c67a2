import itertools
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from spinepr.errors import DegenerateError, DomainError
from spinepr.gaussian import (
    SqueezeLossParams,
    collective_variance,
    compose_collective_variance,
    compose_inferred_variance,
    entanglement_threshold_curve,
    epr_threshold_at_sbar,
    epr_threshold_curve,
    epr_threshold_nb_closed,
    epr_threshold_quadratic,
    inferred_variance_gaussian,
    macroscopic_entanglement_check,
    macroscopic_epr_check,
    spin_moments,
    spin_moments_mp,
)

R_GRID = [0.1, 0.5, 1.0, 2.0, 3.5, 5.0]
ETA_GRID = [0.05, 0.2, 1 / 3, 0.5, 0.8, 1.0]


@pytest.mark.parametrize("r,eta", list(itertools.product([0.1, 0.7, 1.5], [0.05, 0.4, 1.0])))
@pytest.mark.parametrize("axis", "xyz")
def test_moments_match_wick_oracle(r, eta, axis):
    ref = oracles.gaussian_moments_oracle(r, eta, axis)
    m = spin_moments(r, eta)
    assert ref["mean_a"] == pytest.approx(0.0, abs=1e-12)
    assert m.jz2_local == pytest.approx(ref["jz2_local"], rel=1e-12)
    assert m.jz2_local == pytest.approx(ref["jz2_local_b"], rel=1e-12)
    assert m.jz_cross == pytest.approx(ref["jz_cross"], rel=1e-12)
    assert m.n_a == pytest.approx(ref["n_a"], rel=1e-12)
    assert m.n_b == pytest.approx(ref["n_b"], rel=1e-12)


def test_vacuum_and_total_loss():
    for m in (spin_moments(0.0, 0.7), spin_moments(1.2, 0.0)):
        assert m.jz2_local == m.jz_cross == m.n_total == m.collective_var == 0.0


def test_lossless_is_perfectly_correlated():
    for r in R_GRID:
        assert collective_variance(r, 1.0) == 0.0
        assert inferred_variance_gaussian(r, 1.0).variance == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("r,eta", list(itertools.product(R_GRID, ETA_GRID)))
def test_composition_extended_precision(r, eta):
    with mpmath.workdps(40):
        mp = spin_moments_mp(r, eta)
        coll, inf = compose_collective_variance(mp), compose_inferred_variance(mp)
    assert abs(float(coll) - collective_variance(r, eta)) <= 1e-12
    assert abs(float(inf) - inferred_variance_gaussian(r, eta).variance) <= 1e-12


@pytest.mark.parametrize("r,eta", list(itertools.product(R_GRID, ETA_GRID)))
def test_composition_double_precision(r, eta):
    # float64 composition loses digits to cancellation; it still tracks at ~1e-9 relative
    m = spin_moments(r, eta)
    scale = m.jz2_local
    assert abs(compose_collective_variance(m) - collective_variance(r, eta)) <= 1e-9 * scale + 1e-15
    assert abs(compose_inferred_variance(m) - inferred_variance_gaussian(r, eta).variance) <= 1e-9 * scale + 1e-15


@settings(max_examples=50, deadline=None)
@given(r=st.floats(0.05, 5.0), eta=st.floats(0.01, 1.0))
def test_loss_contracts_correlations(r, eta):
    m = spin_moments(r, eta)
    assert m.jz_cross <= 0
    assert m.jz_cross**2 <= m.jz2_local**2 * (1 + 1e-12)
    assert 0 <= collective_variance(r, eta)
    assert 0 <= inferred_variance_gaussian(r, eta).variance <= m.jz2_local * (1 + 1e-12)


def test_gain_is_regression_slope():
    inf = inferred_variance_gaussian(1.0, 0.6)
    m = spin_moments(1.0, 0.6)
    assert inf.gain == pytest.approx(m.jz_cross / m.jz2_local)
    assert inf.gain < 0
    gs = np.linspace(inf.gain - 0.5, inf.gain + 0.5, 101)
    vals = m.jz2_local - 2 * gs * m.jz_cross + gs**2 * m.jz2_local
    assert vals.min() >= inf.variance - 1e-12


@pytest.mark.parametrize("r", R_GRID)
def test_entanglement_boundary_one_third(r):
    rep = macroscopic_entanglement_check(r, 1 / 3)
    assert abs(rep.margin) <= 1e-12 * max(1.0, rep.rhs)
    assert macroscopic_entanglement_check(r, 0.34).satisfied
    assert not macroscopic_entanglement_check(r, 0.33).satisfied


def test_entanglement_at_zero_squeezing():
    rep = macroscopic_entanglement_check(0.0, 0.8)
    assert rep.margin == 0.0 and not rep.satisfied


@pytest.mark.parametrize("sbar", [0.01, 0.5, 1.0, 10.0, 1e4])
def test_epr_threshold_quadratic(sbar):
    assert epr_threshold_at_sbar(sbar) == pytest.approx(epr_threshold_quadratic(sbar), abs=1e-9)


def test_epr_threshold_at_sbar_one():
    assert epr_threshold_quadratic(1.0) == pytest.approx((2 + math.sqrt(13)) / 9, abs=1e-15)


def test_epr_threshold_limits():
    assert epr_threshold_quadratic(1e-9) == pytest.approx(1 / math.sqrt(3), abs=1e-6)
    assert epr_threshold_quadratic(1e9) == pytest.approx(2 / 3, abs=1e-6)


def test_epr_check_sides():
    rep = macroscopic_epr_check(1.0, 0.9)
    assert rep.satisfied and rep.rhs == pytest.approx(spin_moments(1.0, 0.9).n_b / 2)
    assert not macroscopic_epr_check(1.0, 0.5).satisfied


@pytest.mark.parametrize("nb", [1e-4, 1e-2, 1.0, 10.0, 1e3, 1e6])
def test_curve_matches_closed_root(nb):
    ((_, eta),) = epr_threshold_curve([nb])
    assert eta == pytest.approx(epr_threshold_nb_closed(nb), abs=1e-9)


def test_curves_monotone_and_flat_entanglement():
    nbs = list(np.geomspace(1e-4, 1e6, 41))
    epr = [e for _, e in epr_threshold_curve(nbs)]
    ent = [e for _, e in entanglement_threshold_curve(nbs)]
    assert all(b >= a - 1e-12 for a, b in zip(epr, epr[1:]))
    assert np.allclose(ent, 1 / 3, atol=1e-9)
    assert all(e > x for e, x in zip(epr, ent))


def test_params_validation_and_degenerate():
    with pytest.raises(DomainError):
        SqueezeLossParams(-0.1, 0.5)
    with pytest.raises(DomainError):
        SqueezeLossParams(1.0, 1.5)
    with pytest.raises(DomainError):
        epr_threshold_curve([0.0])
    with pytest.raises(DegenerateError):
        macroscopic_epr_check(0.0, 0.5)
    with pytest.raises(DegenerateError):
        inferred_variance_gaussian(1.0, 0.0)
    p = SqueezeLossParams.from_sbar(2.5, 0.3)
    assert p.sbar == pytest.approx(2.5)
