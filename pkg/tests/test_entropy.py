import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qchancoh.entropy import (
    AlphaZ,
    Regime,
    classify,
    d_alpha_z,
    d_alpha_z_channels,
    f_alpha_z,
    relative_entropy,
)
from qchancoh.errors import DimensionMismatch
from qchancoh.quantum import _apply_raw, choi_state, dephasing_channel, random_channel, random_state
from qchancoh.zoo import make

PLUS = np.full((2, 2), 0.5)
CERTIFIED = [AlphaZ(0.7, 0.7), AlphaZ(0.4, 0.8), AlphaZ(0.5, 1.0), AlphaZ(1.5, 1.0),
             AlphaZ(1.8, 0.9), AlphaZ(1.5, 1.5), AlphaZ(3.0, 3.0)]
seeds = st.integers(0, 2**32 - 1)


@pytest.mark.parametrize("a, z, regime", [
    (0.5, 1.0, Regime.REGIME_1),
    (0.3, 0.7, Regime.REGIME_1),
    (0.3, 0.69, Regime.OUTSIDE),
    (1.5, 1.0, Regime.REGIME_2),
    (1.5, 0.75, Regime.REGIME_2),
    (2.0, 1.0, Regime.REGIME_2),
    (1.5, 1.5, Regime.REGIME_3),
    (3.0, 3.0, Regime.REGIME_3),
    (3.0, 1.0, Regime.OUTSIDE),
    (1.5, 0.9, Regime.OUTSIDE),
    (1.0, 0.3, Regime.LIMIT),
])
def test_classify(a, z, regime):
    assert classify(a, z) is regime


def test_alphaz_validation():
    with pytest.raises(ValueError):
        AlphaZ(0.0)
    with pytest.raises(ValueError):
        AlphaZ(0.5, 0.0)
    assert AlphaZ(1).is_limit


def test_hand_values():
    sigma = np.eye(2) / 2
    p = AlphaZ(0.5, 1.0)
    assert f_alpha_z(PLUS, sigma, p) == pytest.approx(1 / math.sqrt(2), abs=1e-14)
    assert d_alpha_z(PLUS, sigma, p).value == pytest.approx(1.0, abs=1e-13)


def test_commuting_pair_independent_of_z():
    rho, sigma = np.diag([0.3, 0.7]), np.diag([0.5, 0.5])
    want = math.sqrt(0.15) + math.sqrt(0.35)
    for z in (0.5, 0.7, 1.0):
        assert f_alpha_z(rho, sigma, AlphaZ(0.5, z)) == pytest.approx(want, abs=1e-14)


def test_support_violation_flag():
    rho, sigma = np.eye(2) / 2, np.diag([1.0, 0.0])
    f, dom = f_alpha_z(rho, sigma, AlphaZ(1.5, 1.5), with_flag=True)
    assert not dom and f == math.inf
    v = d_alpha_z(rho, sigma, AlphaZ(1.5, 1.0))
    assert v.value == math.inf and not v.support_dominated
    # alpha < 1 stays finite
    v = d_alpha_z(rho, sigma, AlphaZ(0.5, 1.0))
    assert math.isfinite(v.value) and not v.support_dominated
    assert relative_entropy(rho, sigma) == math.inf


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        d_alpha_z(np.eye(2) / 2, np.eye(3) / 3, AlphaZ(0.5))


def test_limit_branch_is_relative_entropy(rng):
    r, s = random_state(3, rng), random_state(3, rng)
    lr = np.linalg.eigvalsh(r.mat)
    from scipy.linalg import logm
    want = float(np.real(np.trace(r.mat @ (logm(r.mat) - logm(s.mat)))))
    assert relative_entropy(r, s) == pytest.approx(want, abs=1e-10)
    for z in (0.5, 1.0, 2.0):
        assert d_alpha_z(r, s, AlphaZ(1.0, z)).value == pytest.approx(want, abs=1e-10)
    assert np.all(lr > 0)
    for eps in (1e-3, 1e-4, 1e-5):
        assert abs(d_alpha_z(r, s, AlphaZ(1 + eps)).value - want) < 20 * eps
        assert abs(d_alpha_z(r, s, AlphaZ(1 - eps)).value - want) < 20 * eps


@given(seeds, st.sampled_from(CERTIFIED), st.integers(2, 4))
def test_nonnegative_and_faithful(seed, p, d):
    rng = np.random.default_rng(seed)
    r, s = random_state(d, rng), random_state(d, rng)
    assert d_alpha_z(r, s, p).value >= -1e-10
    assert abs(d_alpha_z(r, r, p).value) < 1e-9


@given(seeds, st.sampled_from(CERTIFIED), st.integers(2, 3))
def test_data_processing(seed, p, d):
    rng = np.random.default_rng(seed)
    r, s = random_state(d, rng), random_state(d, rng)
    K = random_channel(d, rng, n_kraus=2).stacked
    before = d_alpha_z(r, s, p).value
    after = d_alpha_z(_apply_raw(K, r.mat), _apply_raw(K, s.mat), p).value
    assert after <= before + 1e-8


@given(seeds, st.sampled_from(CERTIFIED), st.floats(0, 1))
def test_joint_convexity(seed, p, lam):
    rng = np.random.default_rng(seed)
    r1, r2, s1, s2 = (random_state(2, rng).mat for _ in range(4))
    lhs = d_alpha_z(lam * r1 + (1 - lam) * r2, lam * s1 + (1 - lam) * s2, p).value
    rhs = lam * d_alpha_z(r1, s1, p).value + (1 - lam) * d_alpha_z(r2, s2, p).value
    assert lhs <= rhs + 1e-8


def test_unitary_invariance(rng):
    r, s = random_state(3, rng), random_state(3, rng)
    U = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
    for p in CERTIFIED:
        a = d_alpha_z(r, s, p).value
        b = d_alpha_z(U @ r.mat @ U.conj().T, U @ s.mat @ U.conj().T, p).value
        assert a == pytest.approx(b, abs=1e-10)


def test_channel_divergence():
    pf0 = make("phase-flip", 0.0).channel
    D = dephasing_channel(2)
    p = AlphaZ(0.5, 1.0)
    assert d_alpha_z_channels(pf0, pf0, p).value == pytest.approx(0, abs=1e-12)
    # pure Choi state |v><v| against diag(1/2, 0, 0, 1/2): f = 1/sqrt 2
    assert d_alpha_z_channels(pf0, D, p).value == pytest.approx(1.0, abs=1e-12)
    h = d_alpha_z_channels(make("hadamard").channel, D, p).value
    direct = d_alpha_z(choi_state(make("hadamard").channel).mat, choi_state(D).mat, p).value
    assert h > 0 and h == pytest.approx(direct, abs=1e-14)
