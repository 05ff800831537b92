"""Model-building helpers and the three driving scenarios."""

import numpy as np
import pytest
from scipy.special import j0

from cosetflow import apps, engine
from cosetflow.algebra import assemble_su3_hamiltonian
from cosetflow.errors import OutOfRange

KANCHEVA = apps.KanchevaParams(delta=12.0, v1=2.0, v2=1.0)


def hermitian(h):
    return np.abs(h - h.conj().T).max() < 1e-14


# ---------------------------------------------------------------------------
# Hamiltonian structure


def test_stirap_pulses_and_detuning():
    p = apps.StirapParams()
    for t in (-8.0, 0.0, 2.5, 11.0):
        h = apps.stirap_hamiltonian(t, p)
        assert hermitian(h)
        assert h[0, 2] == 0.0
        assert h[1, 1] == pytest.approx(2.0 * p.delta)
        assert h[0, 0] == h[2, 2] == 0.0
    # each pulse peaks at its own centre with the full amplitude
    assert abs(apps.stirap_hamiltonian(p.t1, p)[0, 1]) == pytest.approx(p.amplitude)
    assert abs(apps.stirap_hamiltonian(p.t2, p)[1, 2]) == pytest.approx(p.amplitude)
    off = apps.stirap_hamiltonian(p.t1 + 1.5 * p.tau, p)
    assert abs(off[0, 1]) < p.amplitude
    # counterintuitive ordering: the 2-3 pulse comes first
    assert p.t2 < p.t1


def test_trapping_modulated_energies_and_constant_couplings():
    p = apps.TrappingParams(m1=7.0, m2=7.0)
    for t in (0.0, 0.7, 3.9, 26.0):
        h = apps.trapping_hamiltonian(t, p)
        assert hermitian(h)
        assert h[0, 2] == 0.0
        assert h[1, 1] == 0.0
        assert h[0, 1] == pytest.approx(p.g1)
        assert h[1, 2] == pytest.approx(p.g2)
        e1 = p.delta1 - p.m1 * p.omega1 * np.cos(p.omega1 * t + p.theta)
        e3 = -p.delta2 + p.m2 * p.omega2 * np.cos(p.omega2 * t)
        assert h[0, 0] == pytest.approx(e1)
        assert h[2, 2] == pytest.approx(e3)


def test_trapping_averaged_model_dresses_the_couplings():
    p = apps.TrappingParams(m1=7.0, m2=30.6346)
    h = apps.trapping_averaged_hamiltonian(0.0, p)
    assert np.abs(h - apps.trapping_averaged_hamiltonian(17.3, p)).max() == 0.0
    assert h[0, 1] == pytest.approx(p.g1 * j0(p.m1))
    assert h[1, 2] == pytest.approx(p.g2 * j0(p.m2))
    assert np.diag(h).real == pytest.approx([p.delta1, 0.0, -p.delta2])
    assert h[0, 2] == 0.0


def test_kancheva_chirped_couplings():
    for t in (0.0, 0.4, 1.9):
        h = apps.kancheva_hamiltonian(t, KANCHEVA)
        assert hermitian(h)
        assert h[0, 1] == 0.0
        assert np.abs(np.diag(h)).max() == 0.0
        phase = np.exp(-1j * KANCHEVA.delta * t)
        assert h[0, 2] == pytest.approx(-KANCHEVA.v1 * phase)
        assert h[1, 2] == pytest.approx(-KANCHEVA.v2 * phase)
        assert abs(h[0, 2]) == pytest.approx(KANCHEVA.v1)


# ---------------------------------------------------------------------------
# Schedule adapters


def test_schedules_rebuild_the_matrix():
    matrix = lambda t: apps.stirap_hamiltonian(t, apps.StirapParams())
    blocks = apps.block_schedule(matrix)(1.3)
    assert np.abs(blocks.assemble() - matrix(1.3)).max() < 1e-14
    coeff = apps.coefficient_schedule(matrix)(1.3)
    assert np.abs(assemble_su3_hamiltonian(coeff) - matrix(1.3)).max() < 1e-14
    assert coeff.trace_part == pytest.approx(np.trace(matrix(1.3)).real)


def test_named_schedules_agree_with_the_generic_adapter():
    sp = apps.StirapParams(amplitude=1.1)
    tp = apps.TrappingParams(m1=3.0, m2=4.0)
    pairs = [
        (apps.stirap_schedule(sp), lambda t: apps.stirap_hamiltonian(t, sp)),
        (apps.trapping_schedule(tp), lambda t: apps.trapping_hamiltonian(t, tp)),
        (apps.kancheva_schedule(KANCHEVA), lambda t: apps.kancheva_hamiltonian(t, KANCHEVA)),
    ]
    for schedule, matrix in pairs:
        for t in (0.0, 0.9, 4.2):
            assert np.abs(schedule(t).assemble() - matrix(t)).max() < 1e-14


# ---------------------------------------------------------------------------
# Closed-form coset trajectory for the chirped model


def test_exact_chirped_coordinate_matches_both_integrators():
    schedule = apps.kancheva_schedule(KANCHEVA)
    for pipeline in ("z", "m"):
        traj = engine.evolve(schedule, 0.0, 20.0, samples=401, tol=1e-11, pipeline=pipeline)
        worst = 0.0
        for i, t in enumerate(traj.times):
            exact = apps.kancheva_exact_z(t, KANCHEVA)
            worst = max(worst, np.abs(traj.z[i].ravel() - exact.ravel()).max())
        assert worst < 1e-7


def test_exact_chirped_coordinate_starts_at_the_origin():
    assert np.abs(apps.kancheva_exact_z(0.0, KANCHEVA)).max() < 1e-14


# ---------------------------------------------------------------------------
# Scenario regressions (coarse grids; the acceptance module runs the full ones)


def test_stirap_transfers_the_population():
    traj = engine.evolve(
        apps.stirap_schedule(apps.StirapParams()),
        *apps.STIRAP_WINDOW,
        samples=201,
        tol=1e-8,
        pipeline="m",
    )
    pops = apps.populations(traj, initial=0)
    assert np.abs(pops.sum(axis=1) - 1.0).max() < 1e-8
    assert pops[0] == pytest.approx([1.0, 0.0, 0.0], abs=1e-12)
    assert pops[-1, 2] == pytest.approx(0.996415, abs=1e-4)


def test_chirped_model_keeps_the_direct_transfer_small():
    traj = engine.evolve(
        apps.kancheva_schedule(KANCHEVA),
        *apps.KANCHEVA_WINDOW,
        samples=401,
        tol=1e-9,
        pipeline="m",
    )
    p13 = apps.populations(traj, initial=0)[:, 2]
    assert p13.max() < 0.1
    assert p13.max() > 0.05  # the drive is not trivially off


def test_averaged_trapping_contrast_between_bessel_zero_and_generic_index():
    # Constant Hamiltonians, so the oracle is cheap.  The dressed coupling
    # vanishes at a j0 zero and the initial state freezes; at m = 7 the
    # two-photon resonance empties it.
    minima = {}
    for m in (7.0, 30.6346):
        p = apps.TrappingParams(m1=m, m2=m)
        matrix = lambda t: apps.trapping_averaged_hamiltonian(t, p)
        times, u = engine.oracle_evolve(matrix, 0.0, 50.0, tol=1e-10, samples=501)
        minima[m] = np.abs(u[:, 0, 0]) ** 2
        assert times.size == 501
    assert minima[30.6346].min() > 0.999
    assert minima[7.0].min() < 0.01


# ---------------------------------------------------------------------------
# Bessel root finder


def test_bessel_zero_values_and_ordering():
    assert apps.bessel_j0_zero(1) == pytest.approx(2.404825557695773, abs=1e-10)
    assert apps.bessel_j0_zero(10) == pytest.approx(30.63460646843201, abs=1e-10)
    zeros = [apps.bessel_j0_zero(k) for k in range(1, 8)]
    assert all(b - a > 2.9 for a, b in zip(zeros, zeros[1:]))
    assert max(abs(j0(x)) for x in zeros) < 1e-10
    # consecutive zeros approach spacing pi from above
    assert zeros[-1] - zeros[-2] == pytest.approx(np.pi, abs=0.02)


def test_bessel_zero_rejects_bad_indices():
    for bad in (0, -3, 21, 2.0, "4"):
        with pytest.raises(OutOfRange):
            apps.bessel_j0_zero(bad)
