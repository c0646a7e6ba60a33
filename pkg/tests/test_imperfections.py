import numpy as np
import pytest

from epr_ifo import (
    EprSource,
    LossBudget,
    PhaseJitter,
    apply_io_losses,
    cavity_loss_noise,
    channel_spectra,
    condition_gaussian,
    conditional_strain_spectrum,
    epr_joint_spectrum,
    first_order_loss_correction,
    kimble_coupling,
    make_grid,
    phase_jitter_spectrum,
    strain_sql,
)
from epr_ifo.imperfections import (
    effective_idler_cavity_loss,
    effective_signal_cavity_loss,
    jitter_averaged_readout,
    jitter_moments,
    two_channel_loss_map,
)
from epr_ifo.twophoton import min_eigenvalue


def test_loss_budget_validation():
    LossBudget(eps_in=0.49)
    with pytest.raises(ValueError):
        LossBudget(eps_in=0.5)
    with pytest.raises(ValueError):
        LossBudget(eps_arm=-1e-6)


def test_zero_loss_is_identity():
    s = epr_joint_spectrum(EprSource(1.3))
    out = apply_io_losses(s, LossBudget(), "input")
    assert np.array_equal(out, s)


def test_full_loss_gives_vacuum():
    # boundary map, exercised directly (budgets cap at 0.5)
    s = epr_joint_spectrum(EprSource(1.3))
    out = two_channel_loss_map(s, 1.0, 1.0)
    assert np.allclose(out, np.eye(4), atol=1e-14)


def test_stage_argument(table1):
    s = epr_joint_spectrum(EprSource(1.0))
    with pytest.raises(ValueError):
        apply_io_losses(s, LossBudget(), "somewhere")


def test_loss_map_preserves_physicality():
    rng = np.random.default_rng(17)
    for _ in range(200):
        s = epr_joint_spectrum(EprSource(rng.uniform(0, 2.2)))
        out = two_channel_loss_map(s, rng.uniform(0, 0.5), rng.uniform(0, 0.5))
        assert min_eigenvalue(out) >= -1e-10
        assert np.max(np.abs(out - out.conj().T)) < 1e-12


def test_input_loss_matches_first_order_on_bare_source():
    # matched-angle conditioning of the lossy source vs the analytic
    # first-order input-loss factor (2 cosh^2 - cosh - 1)/cosh
    r = 1.727
    eps = 0.05
    c2 = np.cosh(2 * r)
    s = two_channel_loss_map(epr_joint_spectrum(EprSource(r)), eps, eps)
    _, s_cond = condition_gaussian(s, 0.0, 0.0)
    delta_exact = s_cond - 1.0 / c2
    delta_formula = (1.0 / c2) * (2 * c2**2 - c2 - 1) / c2 * eps
    assert abs(delta_exact / delta_formula - 1.0) < 0.15


def test_exact_pipeline_vs_first_order_formulas(table1, src15):
    # exact loss pipeline minus lossless vs the analytic first-order sum;
    # the residual is pure second order and is measured relative to the
    # spectrum the formula approximates
    om = make_grid(10, 10e3, 120)
    base = conditional_strain_spectrum(table1, src15, om, rotation_override=True)
    for eps in (0.01, 0.05, 0.10):
        lb = LossBudget(eps_in=eps, eps_read=eps)
        lossy = conditional_strain_spectrum(
            table1, src15, om, losses=lb, rotation_override=True
        )
        formula = first_order_loss_correction(table1, src15, lb, om)
        resid = np.abs((lossy.s_hh - base.s_hh) - formula.delta_s_total) / lossy.s_hh
        assert np.max(resid) < 3 * eps


def test_first_order_formulas_are_true_derivatives(table1, src15):
    # at tiny eps the formulas match the numeric derivative with no linear gap
    om = make_grid(10, 10e3, 40)
    base = conditional_strain_spectrum(table1, src15, om, rotation_override=True)
    eps = 1e-5
    for lb in (LossBudget(eps_in=eps), LossBudget(eps_read=eps)):
        lossy = conditional_strain_spectrum(
            table1, src15, om, losses=lb, rotation_override=True
        )
        formula = first_order_loss_correction(table1, src15, lb, om)
        num = lossy.s_hh - base.s_hh
        assert np.max(np.abs(num / formula.delta_s_total - 1.0)) < 1e-3


def test_readout_loss_frequency_asymmetry(table1, src15):
    om = make_grid(10, 10e3, 200)
    lb = LossBudget(eps_read=0.05)
    base = conditional_strain_spectrum(table1, src15, om, rotation_override=True)
    lossy = conditional_strain_spectrum(
        table1, src15, om, losses=lb, rotation_override=True
    )
    deg = base.improvement_db - lossy.improvement_db
    i20 = np.argmin(np.abs(om - 2 * np.pi * 20))
    i5k = np.argmin(np.abs(om - 2 * np.pi * 5000))
    assert deg[i5k] > deg[i20]
    # limits of the relative correction: tanh^2 at low f, 1 + tanh^2 at high f
    t2 = np.tanh(2 * src15.r) ** 2
    formula = first_order_loss_correction(table1, src15, lb, om)
    rel = formula.delta_s_readout / (
        strain_sql(table1, om) / (2 * np.cosh(2 * src15.r))
        * (kimble_coupling(table1, om) + 1 / kimble_coupling(table1, om))
    )
    assert rel[0] == pytest.approx(t2 * 0.05 * np.cosh(2 * src15.r), rel=0.01)
    assert rel[-1] == pytest.approx((1 + t2) * 0.05 * np.cosh(2 * src15.r), rel=0.01)


def test_conditioned_loss_is_double_traditional(table1, src15):
    om = np.array([2 * np.pi * 10e3])  # shot-noise regime, K << 1
    lb = LossBudget(eps_in=0.01, eps_read=0.01)
    f = first_order_loss_correction(table1, src15, lb, om)
    ratio = f.delta_s_total[0] / f.delta_s_traditional[0]
    assert ratio == pytest.approx(2.0, rel=0.05)


def test_effective_cavity_losses(table1):
    lb = LossBudget(eps_arm=100e-6, eps_src=2000e-6)
    eff_sig = effective_signal_cavity_loss(table1, lb)
    # 100 ppm of round-trip loss is worth ~0.3% input-referred
    arm_only = effective_signal_cavity_loss(table1, LossBudget(eps_arm=100e-6))
    assert arm_only == pytest.approx(0.00306, abs=1e-4)
    assert eff_sig == pytest.approx(arm_only + 2000e-6, rel=1e-12)
    assert effective_idler_cavity_loss(table1, lb) == pytest.approx(2100e-6)


def test_cavity_loss_noise_shape(table1):
    lb = LossBudget(eps_arm=100e-6, eps_src=2000e-6)
    om = make_grid(10, 10e3, 100)
    noise = cavity_loss_noise(table1, lb, om)
    # signal-channel loss vacuum rides the ponderomotive transfer: strong
    # low-frequency rise in the phase quadrature, none in the idler port
    s22 = noise.signal_noise[:, 1, 1]
    assert s22[0] / s22[-1] > 100.0
    assert np.isscalar(noise.idler_noise) or noise.idler_noise.ndim == 0
    zero = cavity_loss_noise(table1, LossBudget(), om)
    assert np.all(zero.signal_noise == 0.0)
    assert zero.idler_noise == 0.0


def test_cavity_losses_small_effect(solved_ifo, src15):
    om = make_grid(10, 10e3, 300)
    lb = LossBudget(eps_arm=100e-6, eps_src=2000e-6)
    clean = conditional_strain_spectrum(solved_ifo, src15, om)
    lossy = conditional_strain_spectrum(solved_ifo, src15, om, losses=lb)
    assert np.max(clean.improvement_db - lossy.improvement_db) < 0.5


def test_jitter_moments_match_gaussian_identities():
    for x in (1e-6, 1e-4, 1e-2):
        s2, c2, cm = jitter_moments(x)
        assert s2 == pytest.approx(np.exp(-x) * np.sinh(x), rel=1e-12)
        assert c2 == pytest.approx(np.exp(-x) * np.cosh(x), rel=1e-12)
        assert cm == pytest.approx(np.exp(-x / 2), rel=1e-12)
        assert s2 + c2 == pytest.approx(1.0, rel=1e-12)


def test_zero_jitter_is_identity(solved_ifo, src15):
    om = make_grid(20, 5e3, 50)
    base = conditional_strain_spectrum(solved_ifo, src15, om)
    jit = phase_jitter_spectrum(solved_ifo, src15, PhaseJitter(), om)
    assert np.allclose(jit.s_hh, base.s_hh, rtol=1e-12)


def test_jitter_warns_above_expansion_range():
    with pytest.warns(UserWarning):
        PhaseJitter(xi_vs=0.2)


def test_milliradian_jitter_small_correction(solved_ifo, src15):
    om = make_grid(10, 10e3, 200)
    base = conditional_strain_spectrum(solved_ifo, src15, om)
    jit = phase_jitter_spectrum(
        solved_ifo, src15, PhaseJitter(xi_vs=1e-3, xi_vi=1e-3), om
    )
    rel = (jit.s_hh - base.s_hh) / base.s_hh
    # sub-percent: (x + y) sinh^2(2r) ~ 5e-4 at its largest
    assert 1e-4 < np.max(rel) < 1e-2
    assert np.max(rel) == pytest.approx(2e-6 * np.sinh(2 * src15.r) ** 2, rel=0.05)


def test_jitter_analytic_matches_monte_carlo(solved_ifo, src15):
    # ensemble-averaged measured spectra: analytic Gaussian moments vs
    # a seeded per-draw average of the rotated quadrature forms
    pj = PhaseJitter(xi_vs=1e-3, xi_vi=1e-3)
    om = 2 * np.pi * np.array([20.0, 62.0, 150.0, 1000.0, 8000.0])
    pair = channel_spectra(solved_ifo, src15, om)
    s_am, s_bm, s_ab = jitter_averaged_readout(pair.joint, pj)

    rng = np.random.default_rng(20260809)
    n_draws, n_batches = 100_000, 20
    # antithetic pairs (xi, -xi): unbiased for the even moments under test and
    # they cancel the odd sin*cos cross terms instead of leaving them as
    # correlated noise shared by every frequency bin
    half_s = rng.normal(0.0, pj.xi_vs, n_draws // 2)
    half_i = rng.normal(0.0, pj.xi_vi, n_draws // 2)
    xs = np.stack([half_s, -half_s], axis=1).ravel()
    xi = np.stack([half_i, -half_i], axis=1).ravel()
    j = pair.joint

    def batch_stats(values):
        batches = values.reshape(n_batches, -1, values.shape[-1])
        means = batches.mean(axis=1)
        return means.mean(axis=0), means.std(axis=0, ddof=1) / np.sqrt(n_batches)

    sin_s, cos_s = np.sin(xs)[:, None], np.cos(xs)[:, None]
    sin_i, cos_i = np.sin(xi)[:, None], np.cos(xi)[:, None]
    am_draws = (
        sin_s**2 * j[None, :, 0, 0].real
        + cos_s**2 * j[None, :, 1, 1].real
        - 2 * sin_s * cos_s * j[None, :, 0, 1].real
    )
    bm_draws = (
        sin_i**2 * j[None, :, 2, 2].real
        + cos_i**2 * j[None, :, 3, 3].real
        - 2 * sin_i * cos_i * j[None, :, 2, 3].real
    )
    ab_draws = (
        sin_s * sin_i * j[None, :, 0, 2]
        - sin_s * cos_i * j[None, :, 0, 3]
        - cos_s * sin_i * j[None, :, 1, 2]
        + cos_s * cos_i * j[None, :, 1, 3]
    )
    for analytic, draws in ((s_am, am_draws), (s_bm, bm_draws)):
        mc, sigma = batch_stats(draws)
        assert np.all(np.abs(analytic - mc) <= 3 * sigma + 1e-12)
    mc_re, sig_re = batch_stats(ab_draws.real)
    mc_im, sig_im = batch_stats(ab_draws.imag)
    assert np.all(np.abs(s_ab.real - mc_re) <= 3 * sig_re + 1e-12)
    assert np.all(np.abs(s_ab.imag - mc_im) <= 3 * sig_im + 1e-12)
