import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from photoncorr import correlations as corr
from photoncorr.chain import (ChainParams, assemble_chain_two_photon, branch_chain_emission,
                              chain_matrices, integrate_chain, jump_matrix,
                              propagate_chain_after_emission, solve_chain)
from photoncorr.drive import DriveEnvelope
from photoncorr.dynamics import SystemParams, solve
from photoncorr.grid import TimeGrid


def transfer_matrix_transmission(n, spacing_phase, beta):
    """|t|^2 of n resonant emitters with beta_r = beta_l = beta via 2x2 transfer matrices."""
    r = -2.0 * beta
    t = 1.0 + r
    m = np.array([[t * t - r * r, r], [-r, 1.0]], dtype=complex) / t
    prop = np.diag([np.exp(1j * spacing_phase), np.exp(-1j * spacing_phase)])
    total = m
    for _ in range(n - 1):
        total = m @ prop @ total
    return abs(1.0 / total[1, 1]) ** 2


@pytest.mark.parametrize("n,phase,beta", [(1, 0.0, 0.3), (2, np.pi, 0.45), (5, np.pi, 0.45),
                                          (5, np.pi / 4, 0.15), (3, 1.1, 0.25)])
def test_weak_drive_transmission_matches_transfer_matrix(n, phase, beta):
    p = ChainParams.regular(n, phase, beta, beta)
    E = 1e-4
    sol = solve_chain(p, DriveEnvelope.cw(E), TimeGrid(0.0, 60.0, 1200), pairs=())
    f = sol.fields["R"]
    g1 = np.abs(f.phi_g[-1] + E) ** 2
    assert g1 / E ** 2 == pytest.approx(transfer_matrix_transmission(n, phase, beta), rel=5e-3)


params_draw = st.tuples(st.floats(0.05, 1.0), st.floats(0, 1), st.floats(-1.5, 1.5))


@settings(max_examples=20)
@given(b=params_draw, amp=st.floats(0.001, 0.5), pulsed=st.booleans())
def test_single_emitter_reduction(b, amp, pulsed):
    br = b[0]
    bl = (1 - br) * b[1]
    single = SystemParams(br, bl, 1 - br - bl, b[2])
    chain = ChainParams((0.0,), br, bl, 1 - br - bl, b[2])
    if pulsed:
        drive = DriveEnvelope.gaussian(0.05 + amp)
        grid = drive.suggested_grid(150, tail=6.0)
    else:
        drive = DriveEnvelope.cw(amp)
        grid = TimeGrid(0.0, 12.0, 150)
    pairs = [("R", "R"), ("L", "R"), ("R", "L"), ("S", "R"), ("R", "S")]
    cpairs = [tuple("S1" if x == "S" else x for x in key) for key in pairs]
    a = solve(single, drive, grid, channels="RLS", pairs=pairs)
    c = solve_chain(chain, drive, grid, channels=("R", "L", "S1"), pairs=cpairs)
    np.testing.assert_allclose(c.trajectory.c_g, a.trajectory.c_g, atol=1e-12)
    np.testing.assert_allclose(c.trajectory.c_e[:, 0], a.trajectory.c_e, atol=1e-12)
    for ch, cch in (("R", "R"), ("L", "L"), ("S", "S1")):
        np.testing.assert_allclose(c.fields[cch].phi_g, a.fields[ch].phi_g, atol=1e-12)
        np.testing.assert_allclose(c.fields[cch].phi_e, a.fields[ch].phi_e, atol=1e-12)
    for key, ckey in zip(pairs, cpairs):
        np.testing.assert_allclose(c.pair(*ckey).table, a.pair(*key).table, atol=1e-12)
    if pulsed:
        assert corr.pulsed_g2(c) == pytest.approx(corr.pulsed_g2(a), abs=1e-12)
    else:
        np.testing.assert_allclose(corr.g1_leading(c, True), corr.g1_leading(a, True), atol=1e-12)


@given(n=st.integers(1, 4), spacing=st.floats(0, 2 * np.pi), br=st.floats(0, 1), bl=st.floats(0, 1))
def test_jump_operators_balance_decay(n, spacing, br, bl):
    bl = (1 - br) * bl
    p = ChainParams.regular(n, spacing, br, bl)
    K, _ = chain_matrices(p)
    lhs = sum(jump_matrix(p, ch).conj().T @ jump_matrix(p, ch) for ch in p.channels)
    # the jumps map into the sector below; compare on the states that decay
    d1 = 1 + n
    np.testing.assert_allclose(lhs[1:, 1:], -(K + K.conj().T)[1:, 1:], atol=1e-12)
    assert d1 == jump_matrix(p, "R").shape[0]


def test_norm_conserved_with_all_sectors():
    p = ChainParams.regular(2, 0.7, 0.3, 0.3)
    drive = DriveEnvelope.gaussian(0.3, geometry="side")
    chs = p.channels
    pairs = [(a, b) for a in chs for b in chs]
    defs = [abs(1 - solve_chain(p, drive, drive.suggested_grid(n), channels=chs, pairs=pairs).norm())
            for n in (300, 600)]
    assert defs[1] < 3e-5
    assert defs[0] / defs[1] > 3.5


def test_rows_and_tables_match_single_propagation():
    p = ChainParams.regular(3, 0.9, 0.35, 0.35)
    drive = DriveEnvelope.cw(0.2)
    g = TimeGrid(0.0, 5.0, 120)
    sol = solve_chain(p, drive, g, channels=("R", "L"), pairs=[("R", "R"), ("L", "R")],
                      store_panes=True)
    for k in (0, 40, 120):
        g0, e0 = branch_chain_emission(sol.trajectory, p, "R", g.nodes[k])
        sl = propagate_chain_after_emission(p, drive, g, g.nodes[k], (g0, e0), "R")
        assert sl.phi_g[-1] == pytest.approx(sol.fields["R"].phi_g[k], rel=1e-12, abs=1e-16)
        np.testing.assert_allclose(sl.phi_e[-1], sol.fields["R"].phi_e[k], rtol=1e-12, atol=1e-16)
    for ch2 in ("R", "L"):
        built = assemble_chain_two_photon(sol.fields["R"], p, ch2)
        np.testing.assert_allclose(built.table, sol.pair(ch2, "R").table, atol=1e-15)


def test_equal_time_pairs_follow_double_excitation():
    p = ChainParams.regular(4, 1.3, 0.4, 0.3, delta=0.2)
    sol = solve_chain(p, DriveEnvelope.cw(0.3), TimeGrid(0.0, 4.0, 100))
    traj = sol.trajectory
    q = np.sqrt(p.beta_r) * np.exp(-1j * np.asarray(p.phases))
    pair_sum = sum(traj.c_ee[:, k] * q[a] * q[b] for k, (a, b) in enumerate(traj.pairs))
    expected = -np.exp(2j * p.delta * traj.grid.nodes) * 2.0 * pair_sum
    np.testing.assert_allclose(np.diagonal(sol.pair().table), expected, atol=1e-14)


def test_chain_photon_number_needs_cross_channel_pairs():
    p = ChainParams.regular(2, 0.5, 0.6, 0.4)
    drive = DriveEnvelope.gaussian(0.3, geometry="side")
    g = drive.suggested_grid(200)
    with pytest.raises(KeyError):
        corr.mean_photons(solve_chain(p, drive, g))
    chs = ("R", "L")
    full = solve_chain(p, drive, g, channels=chs, pairs=[(a, b) for a in chs for b in chs])
    assert corr.mean_photons(full) > 0


@pytest.mark.parametrize("kwargs", [
    dict(phases=()), dict(phases=(0.0, np.nan)), dict(phases=(1.0, 0.0)),
    dict(phases=(0.0,), beta_r=0.7, beta_l=0.7), dict(phases=(0.0,), beta_r=-0.1, beta_l=1.1),
    dict(phases=(0.0,), delta=np.inf),
])
def test_invalid_chain_params(kwargs):
    with pytest.raises(ValueError):
        ChainParams(**kwargs)


def test_chain_channels_and_jump_errors():
    p = ChainParams.regular(3, 0.5, 0.3, 0.3)
    assert p.channels == ("R", "L", "S1", "S2", "S3")
    assert p.pairs == [(0, 1), (0, 2), (1, 2)]
    assert p.beta_s == pytest.approx(0.4)
    for bad in ("S0", "S4", "X", "S"):
        with pytest.raises(ValueError):
            jump_matrix(p, bad)
    traj = integrate_chain(p, DriveEnvelope.cw(0.1), TimeGrid(0.0, 2.0, 20))
    assert traj.c_ee.shape == (21, 3)
