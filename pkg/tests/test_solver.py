import numpy as np
import pytest
from scipy.constants import c

from epr_ifo import (
    IfoParams,
    NoSolutionInRange,
    UnreachableBandwidth,
    bandwidth_from_phi,
    derived_bandwidth,
    idler_response,
    make_grid,
    required_rotation,
    solve,
    solve_detuning,
    solve_lengths,
    src_effective_mirror,
    target_filter_params,
)
from epr_ifo.interferometer import _wrap_pi
from epr_ifo.solver import SolverTarget, effective_bandwidth


def test_target_filter_params(table1):
    t = target_filter_params(table1)
    assert t.gamma_f == pytest.approx(280.16, abs=0.05)
    assert t.gamma_f / (2 * np.pi) == pytest.approx(44.59, abs=0.05)
    assert t.delta_f == -t.gamma_f


def test_target_warns_when_coupling_is_large(table1):
    strong = IfoParams(i_c=table1.i_c * 3e3)
    with pytest.warns(UserWarning):
        t = target_filter_params(strong)
    assert t.gamma_f == pytest.approx(np.sqrt(strong.theta**3 / strong.gamma), rel=1e-12)


def test_doubling_power_scales_bandwidth(table1):
    t1 = target_filter_params(table1)
    t2 = target_filter_params(IfoParams(i_c=2 * table1.i_c))
    assert t2.gamma_f / t1.gamma_f == pytest.approx(np.sqrt(2.0), rel=1e-12)


def test_bandwidth_from_phi_limits(table1):
    # degenerate idler (phi = 0) sees the extraction-broadened signal
    # bandwidth; a quarter-wave offset gives the narrowband minimum
    assert bandwidth_from_phi(table1, 0.0) == pytest.approx(
        derived_bandwidth(table1), rel=1e-12
    )
    rs = np.sqrt(table1.r_srm)
    narrow = table1.t_srm * table1.gamma_itm / (1 + rs) ** 2
    assert bandwidth_from_phi(table1, np.pi / 2) == pytest.approx(narrow, rel=1e-12)
    # approximate formula tracks the exact compound-mirror bandwidth
    for phi in (0.2, -0.3046, 1.0):
        assert effective_bandwidth(table1, phi) == pytest.approx(
            bandwidth_from_phi(table1, phi), rel=0.01
        )


def test_bandwidth_inversion_has_solution_in_first_quadrant(table1):
    t = target_filter_params(table1)
    cands = solve_detuning(table1, t, n_window=0, delta_seed=2 * np.pi * 1e6)
    phi0 = abs(cands[0].phi_total % np.pi)
    phi0 = min(phi0, np.pi - phi0)
    assert 0.0 < phi0 < np.pi / 2
    assert bandwidth_from_phi(table1, phi0) == pytest.approx(t.gamma_f, rel=1e-9)


def test_fsr(table1):
    assert table1.fsr_src == pytest.approx(2.998e6, abs=1e3)


def test_candidate_spacing_is_one_fsr(table1):
    t = target_filter_params(table1)
    cands = solve_detuning(table1, t, n_window=4)
    by_n = {(cd.sign, cd.n): cd.delta for cd in cands}
    for (sign, n), delta in by_n.items():
        if (sign, n + 1) in by_n:
            step = by_n[(sign, n + 1)] - delta
            assert step == pytest.approx(np.pi * c / table1.l_src_total, rel=1e-12)


def test_unreachable_bandwidth(table1):
    with pytest.raises(UnreachableBandwidth):
        solve_detuning(table1, SolverTarget(gamma_f=1e6, delta_f=-1e6))


def test_empty_candidates(table1):
    t = target_filter_params(table1)
    with pytest.raises(NoSolutionInRange):
        solve_lengths(table1, t, [])


def test_solution_reproduces_design_point(solved):
    assert solved.delta / (2 * np.pi) == pytest.approx(-15.3e6, abs=0.1e6)
    # detuning decomposes into ~ -300 kHz minus five recycling-cavity FSRs
    assert solved.n == -5
    offset_khz = (solved.delta / (2 * np.pi) + 5 * 2.998e6) / 1e3
    assert -350.0 < offset_khz < -250.0
    assert solved.phi_c == pytest.approx(-1.25, abs=0.05)
    assert solved.max_angle_err_50_300 <= 0.04
    assert abs(solved.resonance_residual) < 1e-3


def test_solution_revalidates_through_idler_path(table1, solved):
    ifo = solved.apply(table1)
    m = src_effective_mirror(ifo)
    res = _wrap_pi(
        2 * (solved.achieved_delta_f + solved.delta) * ifo.l_arm_total / c
        + np.angle(m.rho_tilde)
    )
    assert abs(res) < 1e-3
    gf_exact = (1 - abs(m.rho_tilde)) * c / (2 * ifo.l_arm_total)
    assert solved.achieved_gamma_f == pytest.approx(gf_exact, rel=1e-9)
    assert gf_exact == pytest.approx(
        bandwidth_from_phi(ifo, m.phi_src), rel=0.01
    )
    om = make_grid(50, 300, 80)
    err = idler_response(ifo, om).phi_rot_achieved - required_rotation(ifo, om)
    assert np.max(np.abs(err)) <= solved.max_angle_err_50_300 + 1e-3


def test_solver_determinism(table1, solved):
    again = solve(table1)
    assert again == solved


def test_quoted_search_window_contains_good_solution(table1):
    # a solution with angle error <= 0.04 rad exists within |q| <= 1e5,
    # |p| <= 1e3 even though the design-point branch needs a larger p
    t = target_filter_params(table1)
    cands = solve_detuning(table1, t)
    sol = solve_lengths(table1, t, cands, q_max=100_000, p_max=1000)
    assert sol.max_angle_err_50_300 <= 0.04
    assert abs(sol.q) <= 100_000 and abs(sol.p) <= 1000


def test_mirror_symmetry(table1, solved):
    t = target_filter_params(table1)
    mirror_target = SolverTarget(gamma_f=t.gamma_f, delta_f=+t.gamma_f)
    seed = -table1.delta
    cands = solve_detuning(table1, mirror_target, delta_seed=seed)
    sol = solve_lengths(table1, mirror_target, cands, delta_seed=seed)
    assert sol.delta == pytest.approx(-solved.delta, rel=1e-6)
    assert sol.achieved_delta_f == pytest.approx(-solved.achieved_delta_f, rel=1e-6)
    assert sol.max_angle_err_50_300 == pytest.approx(
        solved.max_angle_err_50_300, abs=1e-6
    )
    assert sol.phi_c == pytest.approx(-solved.phi_c, abs=1e-6)


def test_solution_serialization(solved):
    d = solved.as_dict()
    assert d["dl_arm_half_wavelengths"] == solved.q
    assert d["dl_src_wavelengths"] == solved.p / 2.0
    assert d["delta_hz"] == pytest.approx(solved.delta / (2 * np.pi), rel=1e-12)


def test_length_tunings_are_sane(table1, solved):
    # micrometres on the arm, centimetres on the recycling cavity
    assert abs(solved.dl_arm) < 1e-3
    assert abs(solved.dl_src) < 0.1
    ifo = solved.apply(table1)
    assert ifo.q_arm == solved.q and ifo.p_src == solved.p
