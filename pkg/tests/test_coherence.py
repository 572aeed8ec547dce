import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qchancoh.coherence import (
    Method,
    OptimizerOptions,
    check_additivity,
    coherence_channel,
    coherence_channel_z1,
    coherence_commutativity,
    coherence_state,
    coherence_z1,
    is_detection_creation_incoherent,
    oracle_min_diag,
    oracle_sup_pure,
    reevaluate,
)
from qchancoh.entropy import AlphaZ
from qchancoh.errors import DimensionTooLarge, InvalidAlpha, InvalidRegime
from qchancoh.quantum import choi_state, dephasing_channel, random_channel
from qchancoh.zoo import make, reference_value

HALF = AlphaZ(0.5, 1.0)


def test_phase_flip_extremes():
    pf = lambda p: make("phase-flip", p).channel  # noqa: E731
    assert coherence_channel_z1(pf(0.0), 0.5).value == pytest.approx(1.0, abs=1e-12)
    assert coherence_channel_z1(pf(0.5), 0.5).value == pytest.approx(0.0, abs=1e-12)
    assert coherence_channel_z1(pf(0.25), 0.5).value == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-12)
    assert coherence_channel_z1(pf(0.0), 1.0).value == pytest.approx(math.log(2), abs=1e-12)


def test_hadamard_half():
    assert coherence_channel_z1(make("hadamard").channel, 0.5).value == pytest.approx(1.5, abs=1e-12)


def test_closed_form_alpha_guard():
    M = choi_state(make("hadamard").channel).matrix
    with pytest.raises(InvalidAlpha):
        coherence_z1(M, 3.0)
    assert math.isfinite(coherence_z1(M, 3.0, allow_outside_regime=True).value)


def test_closed_form_certificate_attains_value():
    ch = make("amplitude-damping", 0.4).channel
    for a in (0.3, 0.5, 1.0, 1.5, 2.0):
        res = coherence_channel_z1(ch, a)
        assert abs(res.certificate.sum() - 1) < 1e-14
        assert reevaluate(res, ch) == pytest.approx(res.value, abs=1e-10)


def test_simplex_phase_flip():
    res = coherence_channel(make("phase-flip", 0.3).channel, HALF)
    assert res.method is Method.SIMPLEX_OPTIMIZED and res.converged
    assert res.value == pytest.approx(1 - 2 * math.sqrt(0.21), abs=1e-6)


def test_simplex_matches_oracle_regime3():
    ch = make("depolarizing", 0.5).channel
    p = AlphaZ(1.5, 1.5)
    opt = coherence_channel(ch, p)
    orc = oracle_min_diag(ch, p)
    assert opt.value == pytest.approx(orc.value, abs=1e-6)
    assert reevaluate(opt, ch) == pytest.approx(opt.value, abs=1e-12)


def test_simplex_rejects_outside_regime():
    with pytest.raises(InvalidRegime):
        coherence_channel(make("phase-flip", 0.3).channel, AlphaZ(0.3, 0.5))
    res = coherence_channel(make("phase-flip", 0.3).channel, AlphaZ(0.3, 0.5), allow_outside_regime=True)
    assert math.isfinite(res.value)


def test_simplex_deterministic():
    ch = random_channel(2, np.random.default_rng(5), n_kraus=2)
    p = AlphaZ(0.7, 0.7)
    a, b = coherence_channel(ch, p), coherence_channel(ch, p)
    assert a.value == b.value
    np.testing.assert_array_equal(a.certificate, b.certificate)


def test_oracle_phase_flip_grid_then_refine():
    ch = make("phase-flip", 0.3).channel
    want = 1 - 2 * math.sqrt(0.21)
    res = oracle_min_diag(ch, HALF, grid_n=400)
    assert abs(res.info["grid_value"] - want) < 1e-4
    assert abs(res.value - want) < 1e-7


def test_oracle_amplitude_damping():
    ch = make("amplitude-damping", 0.5).channel
    res = oracle_min_diag(ch, AlphaZ(0.75, 1.0))
    assert res.value == pytest.approx(reference_value("amplitude-damping", 0.5, 0.75), abs=1e-6)


def test_oracle_dephasing_vertex():
    res = oracle_min_diag(dephasing_channel(2), AlphaZ(0.7, 0.7))
    assert abs(res.value) < 1e-12


def test_oracle_size_cap():
    with pytest.raises(DimensionTooLarge):
        oracle_min_diag(make("ss").channel, HALF, grid_n=200)


@settings(max_examples=15)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.3, 0.5, 0.9, 1.0, 1.5, 2.0]))
def test_three_way_agreement_z1(seed, a):
    ch = random_channel(2, np.random.default_rng(seed), n_kraus=2)
    p = AlphaZ(a, 1.0)
    ref = coherence_channel_z1(ch, a).value
    assert coherence_channel(ch, p).value == pytest.approx(ref, abs=1e-6)
    assert oracle_min_diag(ch, p, grid_n=100).value == pytest.approx(ref, abs=1e-6)


def test_faithfulness():
    assert coherence_channel_z1(dephasing_channel(2), 0.5).value == pytest.approx(0, abs=1e-14)
    assert coherence_channel(dephasing_channel(2), AlphaZ(1.5, 1.5)).value == pytest.approx(0, abs=1e-10)
    assert coherence_channel_z1(make("s-gate").channel, 0.5).value > 0.5


@pytest.mark.parametrize("p", [HALF, AlphaZ(1.5, 1.0), AlphaZ(0.7, 0.7)])
def test_additivity_fixture(p):
    rep = check_additivity(make("phase-flip", 0.2).channel, make("amplitude-damping", 0.7).channel, 0.3, p)
    assert rep.gap < 1e-7


def test_additivity_degenerate_and_random():
    ch = make("depolarizing", 0.3).channel
    assert check_additivity(ch, make("hadamard").channel, 1.0, HALF).gap < 1e-12
    rng = np.random.default_rng(11)
    rep = check_additivity(random_channel(2, rng), random_channel(2, rng), 0.3, AlphaZ(0.7, 0.7))
    assert rep.gap < 1e-6


def test_ctilde_isotropic_hadamard():
    ch = make("isotropic-hadamard", 0.6).channel
    res = coherence_commutativity(ch, HALF)
    assert res.value == pytest.approx(0.2, abs=1e-9)
    amp = np.abs(res.certificate.amplitudes)
    assert min(amp[0], amp[1]) < 1e-3  # attained at a classical basis state
    res = coherence_commutativity(make("isotropic-hadamard", 0.8).channel, HALF)
    assert res.value == pytest.approx(0.4, abs=1e-9)


def test_ctilde_hadamard_and_zero_cases():
    assert coherence_commutativity(make("hadamard").channel, HALF).value == pytest.approx(1.0, abs=1e-9)
    for name, par in (("phase-flip", 0.3), ("depolarizing", 0.7), ("s-gate", None), ("t-gate", None)):
        assert abs(coherence_commutativity(make(name, par).channel, AlphaZ(0.7, 0.7)).value) < 1e-9


def test_ctilde_two_qubit_gates():
    for name in ("ss", "tt"):
        res = coherence_commutativity(make(name).channel, AlphaZ(1.5, 1.5))
        assert abs(res.value) < 1e-9
        assert abs(oracle_sup_pure(make(name).channel, HALF, grid_n=4, refine=False).value) < 1e-9


def test_ctilde_support_violation_is_infinite():
    # Hadamard maps |+> to |0>: Delta(phi(psi)) = |0><0| misses the support of phi(Delta psi)
    res = coherence_commutativity(make("hadamard").channel, AlphaZ(1.5, 1.0))
    assert res.value == math.inf and res.info["support_violation"]


def test_ctilde_certificate_reevaluates():
    ch = random_channel(2, np.random.default_rng(2), n_kraus=3)
    res = coherence_commutativity(ch, AlphaZ(0.7, 0.7))
    assert reevaluate(res, ch) == pytest.approx(res.value, abs=1e-12)
    assert res.value == pytest.approx(oracle_sup_pure(ch, AlphaZ(0.7, 0.7)).value, abs=1e-7)


def test_conjecture_counterexample_is_genuine():
    # seed (42, 500), channel #186 of the conjecture report; both sides by oracle
    rng = np.random.default_rng([42, 500])
    for _ in range(186):
        random_channel(2, rng, n_kraus=int(rng.integers(1, 5)))
    ch = random_channel(2, rng, n_kraus=int(rng.integers(1, 5)))
    c = oracle_min_diag(ch, HALF).value
    ct = oracle_sup_pure(ch, HALF).value
    assert c == pytest.approx(coherence_channel_z1(ch, 0.5).value, abs=1e-9)
    assert c - ct == pytest.approx(-0.2071742824931928, abs=1e-8)


def test_coherence_state_accepts_plain_matrix():
    M = choi_state(make("phase-flip", 0.1).channel).matrix
    assert coherence_state(M, HALF, OptimizerOptions(restarts=2)).value == pytest.approx(
        coherence_z1(M, 0.5).value, abs=1e-7)


def test_detection_creation_incoherent():
    for name, par in (("phase-flip", 0.3), ("depolarizing", 0.5), ("amplitude-damping", 0.4),
                      ("s-gate", None), ("t-gate", None), ("ss", None), ("tt", None), ("dephasing", None)):
        assert is_detection_creation_incoherent(make(name, par).channel), name
    assert not is_detection_creation_incoherent(make("hadamard").channel)
    assert not is_detection_creation_incoherent(make("isotropic-hadamard", 0.5).channel)
    # S has Ctilde = 0 but a non-diagonal Choi state
    assert coherence_channel_z1(make("s-gate").channel, 0.5).value == pytest.approx(1.0)
