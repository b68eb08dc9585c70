"""Master-equation builders: couplings, Hamiltonian terms, Liouvillian."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperrad.model import (
    SystemParams,
    atom_couplings,
    build_h0,
    build_hamiltonian,
    build_hi,
    build_hl,
    build_liouvillian,
    collapse_operators,
    collective_G_H,
    dicke_couplings,
    hilbert_dims,
)
from hyperrad.operators import basis_ket, unvec, vec
from hyperrad.steady import evolve, steady_state

TWO_PI = 2 * math.pi

rates = st.floats(0.0, 10.0, allow_nan=False)
angles = st.floats(0.0, TWO_PI, exclude_max=True, allow_nan=False)
detunings = st.floats(-10.0, 10.0, allow_nan=False)


def two_atom(cutoff=2, **kw):
    base = dict(g=1.0, gamma=1.0, eta=0.5, fock_cutoff=cutoff)
    base.update(kw)
    return SystemParams(**base)


def flat(dims, *indices):
    return int(np.ravel_multi_index(indices, dims))


class TestSystemParams:
    def test_rejects_bad_values_listing_all(self):
        with pytest.raises(ValueError) as err:
            SystemParams(g=-1, gamma=-2, eta=0.1, n_atoms=3, fock_cutoff=0)
        msg = str(err.value)
        for fragment in ("g must be", "gamma must be", "n_atoms", "fock_cutoff"):
            assert fragment in msg

    def test_phi_z_is_reduced_mod_two_pi(self):
        p = SystemParams(g=1, gamma=1, eta=0.1, phi_z=6.2832)
        assert 0 <= p.phi_z < TWO_PI
        assert p.phi_z == pytest.approx(6.2832 - TWO_PI)

    def test_negative_angle_wraps(self):
        p = SystemParams(g=1, gamma=1, eta=0.1, phi_z=-math.pi / 2)
        assert p.phi_z == pytest.approx(3 * math.pi / 2)

    def test_hilbert_dims(self):
        assert hilbert_dims(two_atom(cutoff=3)) == (2, 2, 4)
        assert hilbert_dims(two_atom(cutoff=3, n_atoms=1)) == (2, 4)


class TestCouplings:
    def test_both_at_antinodes(self):
        c = atom_couplings(two_atom(phi_z=0.0, g=2.0))
        assert (c.g1, c.g2) == (2.0, 2.0)

    def test_quarter_wavelength_decouples_second_atom(self):
        c = atom_couplings(two_atom(phi_z=math.pi / 2, g=2.0))
        assert c.g1 == 2.0
        assert abs(c.g2) < 1e-15

    def test_out_of_phase_flips_sign(self):
        c = atom_couplings(two_atom(phi_z=math.pi, g=2.0))
        assert c.g2 == pytest.approx(-2.0)

    @given(angles)
    def test_second_coupling_bounded(self, phi):
        c = atom_couplings(two_atom(phi_z=phi, g=3.0))
        assert abs(c.g2) <= 3.0 + 1e-12

    def test_dicke_in_phase_dark_antisymmetric(self):
        gp, gm = dicke_couplings(two_atom(phi_z=0.0, g=2.0))
        assert gm == 0.0
        assert gp == pytest.approx(2.0 * math.sqrt(2))

    def test_dicke_out_of_phase_dark_symmetric(self):
        gp, gm = dicke_couplings(two_atom(phi_z=math.pi, g=2.0))
        assert gp == pytest.approx(0.0, abs=1e-15)
        assert gm == pytest.approx(2.0 * math.sqrt(2))

    def test_dicke_balanced_at_quarter_wavelength(self):
        gp, gm = dicke_couplings(two_atom(phi_z=math.pi / 2, g=2.0))
        assert gp == pytest.approx(2.0 / math.sqrt(2))
        assert gm == pytest.approx(2.0 / math.sqrt(2))

    def test_dicke_requires_two_atoms(self):
        with pytest.raises(ValueError):
            dicke_couplings(two_atom(n_atoms=1))

    @pytest.mark.parametrize(
        "phi, expected",
        [(math.pi, (0.0, 1.0)), (0.0, (1.0, 1.0)), (math.pi / 2, (0.5, 0.5))],
    )
    def test_collective_factors(self, phi, expected):
        g_fac, h_fac = collective_G_H(two_atom(phi_z=phi))
        assert g_fac == pytest.approx(expected[0], abs=1e-15)
        assert h_fac == pytest.approx(expected[1], abs=1e-15)

    def test_collective_factors_single_atom(self):
        assert collective_G_H(two_atom(n_atoms=1, phi_z=2.0)) == (1.0, 1.0)


class TestHamiltonianTerms:
    def test_h0_vanishes_on_resonance(self):
        h = build_h0(two_atom(delta_a=0.0, delta_c=0.0))
        assert np.all(h.data == 0)

    def test_h0_diagonal_readout(self):
        p = two_atom(delta_a=0.7, delta_c=0.3, cutoff=2)
        h = build_h0(p)
        dims = hilbert_dims(p)
        assert np.count_nonzero(h.data - np.diag(np.diag(h.data))) == 0
        k = flat(dims, 0, 0, 1)  # |gg,1>
        assert h.data[k, k] == pytest.approx(-0.7 + 0.3)
        k = flat(dims, 1, 1, 0)  # |ee,0>
        assert h.data[k, k] == pytest.approx(0.7)

    def test_hi_single_quantum_exchange_element(self):
        p = two_atom(g=2.5, phi_z=0.8, cutoff=2)
        h = build_hi(p)
        dims = hilbert_dims(p)
        assert h.data[flat(dims, 1, 0, 0), flat(dims, 0, 0, 1)] == pytest.approx(2.5)

    def test_hi_decoupled_atom_never_flips(self):
        p = two_atom(g=2.0, phi_z=math.pi / 2, cutoff=2)
        h = build_hi(p).data
        dims = hilbert_dims(p)
        idx = np.arange(h.shape[0])
        s2 = np.unravel_index(idx, dims)[1]
        flips_atom2 = s2[:, None] != s2[None, :]
        assert np.max(np.abs(h[flips_atom2])) < 1e-14

    def test_hl_direct_element_and_no_drive(self):
        p = two_atom(eta=0.4, cutoff=2)
        h = build_hl(p)
        dims = hilbert_dims(p)
        assert h.data[flat(dims, 1, 0, 0), flat(dims, 0, 0, 0)] == pytest.approx(0.4)
        assert np.all(build_hl(two_atom(eta=0.0)).data == 0)

    @given(rates, rates, rates, angles, detunings, detunings)
    def test_all_terms_hermitian(self, g, gamma, eta, phi, da, dc):
        p = SystemParams(
            g=g, gamma=gamma, eta=eta, phi_z=phi, delta_a=da, delta_c=dc, fock_cutoff=2
        )
        for build in (build_h0, build_hi, build_hl):
            h = build(p).data
            assert np.max(np.abs(h - h.conj().T)) < 1e-14

    def test_drive_is_identity_on_cavity(self):
        p = two_atom(eta=0.4, cutoff=3)
        h = build_hl(p).data
        dims = hilbert_dims(p)
        idx = np.arange(h.shape[0])
        n_phot = np.unravel_index(idx, dims)[2]
        changes_photon = n_phot[:, None] != n_phot[None, :]
        assert np.max(np.abs(h[changes_photon])) == 0

    def test_excitation_conservation_of_h0_plus_hi(self):
        p = two_atom(g=1.7, phi_z=2.1, delta_a=0.5, delta_c=1.5, cutoff=3)
        dims = hilbert_dims(p)
        idx = np.arange(np.prod(dims))
        s1, s2, n = np.unravel_index(idx, dims)
        n_exc = np.diag((s1 + s2 + n).astype(complex))
        h = (build_h0(p) + build_hi(p)).data
        assert np.max(np.abs(h @ n_exc - n_exc @ h)) < 1e-12
        # the drive is the only excitation-non-conserving term
        hl = build_hl(p).data
        assert np.max(np.abs(hl @ n_exc - n_exc @ hl)) > 0.1


def dicke_rotation(n_fock):
    """Product-basis -> {gg, +, -, ee} (x) Fock rotation, built independently."""
    s = 1 / math.sqrt(2)
    w = np.zeros((4, 4), dtype=complex)
    w[:, 0] = [1, 0, 0, 0]            # |gg>
    w[:, 1] = [0, s, s, 0]            # |+> = (|eg> + |ge>)/sqrt(2); |eg> sits at s1=1,s2=0
    w[:, 2] = [0, -s, s, 0]           # |-> = (|eg> - |ge>)/sqrt(2)
    w[:, 3] = [0, 0, 0, 1]            # |ee>
    return np.kron(w, np.eye(n_fock))


class TestDickeStructure:
    def test_interaction_decomposes_into_collective_channels(self):
        p = two_atom(g=1.3, phi_z=2.4, cutoff=3)
        nf = p.fock_cutoff + 1
        w = dicke_rotation(nf)
        h_rot = w.conj().T @ build_hi(p).data @ w
        gp, gm = dicke_couplings(p)
        a_f = np.diag(np.sqrt(np.arange(1, nf)), k=1).astype(complex)
        dp = np.zeros((4, 4), complex)
        dp[1, 0] = dp[3, 1] = 1.0     # collective raising through |+>
        dm = np.zeros((4, 4), complex)
        dm[2, 0] = 1.0                # collective raising through |->
        dm[3, 2] = -1.0
        expected = gp * np.kron(dp, a_f) + gm * np.kron(dm, a_f)
        expected = expected + expected.conj().T
        np.testing.assert_allclose(h_rot, expected, atol=1e-12)

    def test_antisymmetric_channel_matrix_element(self):
        p = two_atom(g=1.3, phi_z=2.4, cutoff=3)
        nf = p.fock_cutoff + 1
        w = dicke_rotation(nf)
        h_rot = w.conj().T @ build_hi(p).data @ w
        _, gm = dicke_couplings(p)
        row = 2 * nf + 1              # |-SIGN, 1> in the rotated ordering
        col = 0 * nf + 2              # |gg, 2>
        assert h_rot[row, col] == pytest.approx(gm * math.sqrt(2), abs=1e-12)

    def test_drive_pumps_only_symmetric_ladder(self):
        p = two_atom(eta=0.7, cutoff=2)
        nf = p.fock_cutoff + 1
        w = dicke_rotation(nf)
        h_rot = w.conj().T @ build_hl(p).data @ w
        dp = np.zeros((4, 4), complex)
        dp[1, 0] = dp[3, 1] = 1.0
        expected = math.sqrt(2) * 0.7 * np.kron(dp + dp.conj().T, np.eye(nf))
        np.testing.assert_allclose(h_rot, expected, atol=1e-12)
        for n in range(nf):
            assert abs(h_rot[2 * nf + n, 0 * nf + n]) < 1e-15


class TestLiouvillian:
    def test_collapse_operators_carry_rates(self):
        p = two_atom(gamma=4.0, cutoff=2)
        ops = collapse_operators(p)
        assert len(ops) == 3
        np.testing.assert_allclose(
            (ops[0].dag() @ ops[0]).data.trace(), 4.0 * 2 * 3, atol=1e-12
        )  # gamma * tr(S+S-) on 2x2x3

    @given(st.integers(0, 2**32 - 1))
    def test_matches_direct_master_equation_rhs(self, seed):
        # Independent route: assemble -i[H, rho] + sum_C (C rho Cd - {CdC, rho}/2)
        # densely and compare with the vectorized generator on a random state.
        rng = np.random.default_rng(seed)
        p = two_atom(
            g=rng.uniform(0, 3), gamma=rng.uniform(0, 2), eta=rng.uniform(0, 2),
            phi_z=rng.uniform(0, TWO_PI), delta_a=rng.uniform(-3, 3),
            delta_c=rng.uniform(-3, 3), cutoff=2,
        )
        d = 4 * (p.fock_cutoff + 1)
        m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        rho = m @ m.conj().T
        rho /= np.trace(rho)
        h = build_hamiltonian(p).data
        direct = -1j * (h @ rho - rho @ h)
        for c in collapse_operators(p):
            cd = c.data.conj().T
            cdc = cd @ c.data
            direct += c.data @ rho @ cd - 0.5 * (cdc @ rho + rho @ cdc)
        via_superop = unvec(build_liouvillian(p).data @ vec(rho), d)
        np.testing.assert_allclose(via_superop, direct, atol=1e-12)

    @given(angles)
    def test_reflection_symmetry_in_interatomic_phase(self, phi):
        p1 = two_atom(phi_z=phi, g=1.9, cutoff=2)
        p2 = two_atom(phi_z=(TWO_PI - phi) % TWO_PI, g=1.9, cutoff=2)
        diff = (build_liouvillian(p1).data - build_liouvillian(p2).data)
        assert abs(diff).max() < 1e-12

    def test_trace_preservation_on_random_states(self):
        p = two_atom(g=2.0, phi_z=1.0, delta_a=1.0, delta_c=0.5, cutoff=3)
        liouv = build_liouvillian(p)
        d = liouv.dim
        rng = np.random.default_rng(7)
        for _ in range(100):
            m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            rho = m + m.conj().T
            rho /= np.trace(rho)
            drho = unvec(liouv.data @ vec(rho), d)
            assert abs(np.trace(drho)) < 1e-10

    @pytest.mark.parametrize(
        "kw",
        [
            dict(g=2.0, gamma=1.0, eta=0.5, phi_z=1.0),
            dict(g=0.3, gamma=2.0, eta=1.5, phi_z=math.pi, delta_a=2.0, delta_c=2.0),
            dict(g=5.0, gamma=0.1, eta=0.0, phi_z=0.0),
        ],
    )
    def test_spectrum_in_left_half_plane(self, kw):
        liouv = build_liouvillian(two_atom(cutoff=2, **kw))
        eigs = np.linalg.eigvals(liouv.data.toarray())
        assert eigs.real.max() <= 1e-10

    def test_resonance_fluorescence_closed_form(self):
        # Optical Bloch steady state of a driven two-level atom:
        # <S+S-> = eta^2 / (gamma^2/4 + 2 eta^2); the cavity is decoupled.
        p = SystemParams(g=0.0, gamma=1.0, eta=0.1, n_atoms=1, fock_cutoff=2)
        expected = 0.1**2 / (1.0 / 4 + 2 * 0.1**2)
        liouv = build_liouvillian(p)
        result = steady_state(liouv, p)
        assert result.atomic_excitation == pytest.approx(expected, rel=1e-9)
        # independent time-evolution route from the ground state
        rho0 = basis_ket(hilbert_dims(p), (0, 0)).density().data
        rho_t = evolve(rho0, liouv, 80.0)
        sm_pop = np.real(np.trace(rho_t @ _excitation_projector(p)))
        assert sm_pop == pytest.approx(expected, abs=1e-7)


def _excitation_projector(params):
    dims = hilbert_dims(params)
    idx = np.arange(np.prod(dims))
    s1 = np.unravel_index(idx, dims)[0]
    return np.diag(s1.astype(complex))
