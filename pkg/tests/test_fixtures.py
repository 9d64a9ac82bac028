"""Synthetic instances: planted spectra, device pairs, circuit families."""
import numpy as np
import pytest

from spectrec.circuit import build_unitary
from spectrec.fixtures import (
    device_pair,
    haar_state,
    haar_unitary,
    involutive_family,
    planted_profile,
    thermo_levels,
    unitary_with_frequencies,
)
from spectrec.rng import stream
from spectrec.spectral import (
    circ_dist,
    decompose,
    group_basis,
    subspace_distances,
)


class TestHaar:
    def test_unitary(self):
        u = haar_unitary(8, stream(61, "haar"))
        np.testing.assert_allclose(u @ u.conj().T, np.eye(8), atol=1e-10)

    def test_state_normalized(self):
        v = haar_state(8, stream(61, "state"))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_phases_not_degenerate(self):
        u = haar_unitary(8, stream(61, "spread"))
        assert len(decompose(u).frequencies) == 8


class TestUnitaryWithFrequencies:
    def test_spectrum_planted_exactly(self):
        freqs = np.array([0.0, 0.25, 0.25, 0.5])
        u, basis = unitary_with_frequencies(freqs, stream(62, "freqs"))
        dec = decompose(u.matrix)
        np.testing.assert_allclose(dec.frequencies, [0.0, 0.25, 0.5], atol=1e-9)
        assert dec.dims.tolist() == [1, 2, 1]

    def test_basis_columns_are_eigenvectors(self):
        freqs = np.array([0.1, 0.4])
        u, basis = unitary_with_frequencies(freqs, stream(62, "basis"))
        for k, f in enumerate(freqs):
            np.testing.assert_allclose(
                u.matrix @ basis[:, k], np.exp(2j * np.pi * f) * basis[:, k], atol=1e-9
            )


class TestPlantedProfile:
    def test_anchor_gaps_at_least_two_cells(self):
        planted = planted_profile(8, 8, 128, (2, 2, 4), stream(63, "gaps"))
        anchors = sorted(planted.anchors)
        gaps = np.diff(anchors + [anchors[0] + 8])
        assert (gaps >= 2).all()

    def test_group_dims_recovered_by_decomposition(self):
        planted = planted_profile(8, 4, 64, (2, 6), stream(63, "dims"))
        dec = decompose(planted.unitary.matrix)
        assert sorted(dec.dims.tolist()) == [2, 6]

    def test_frequencies_sit_on_fine_grid(self):
        planted = planted_profile(8, 4, 64, (2, 6), stream(63, "grid"))
        dec = decompose(planted.unitary.matrix)
        offsets = np.abs(dec.frequencies * 64 - np.round(dec.frequencies * 64))
        assert offsets.max() <= 1e-9

    def test_jitter_moves_frequencies_off_grid(self):
        planted = planted_profile(8, 4, 64, (2, 6), stream(63, "jitter"), jitter_fine=0.3)
        dec = decompose(planted.unitary.matrix)
        offsets = np.abs(dec.frequencies * 64 - np.round(dec.frequencies * 64))
        assert 0 < offsets.max() <= 0.3 + 1e-9

    def test_rejects_mismatched_dims(self):
        with pytest.raises(ValueError):
            planted_profile(8, 4, 64, (2, 2), stream(63, "bad"))


class TestDevicePair:
    def test_equal_relation_gives_identical_matrices(self):
        pair = device_pair(8, 4, 64, "equal", stream(64, "equal"))
        np.testing.assert_allclose(pair.u.matrix, pair.v.matrix, atol=1e-12)

    def test_rotated_relation_realizes_planted_distance(self):
        pair = device_pair(8, 4, 64, "rotated", stream(64, "rot"), distance=0.5)
        dec_u = decompose(pair.u.matrix)
        dec_v = decompose(pair.v.matrix)
        b_u = group_basis(dec_u, pair.omega, window=2 / 64)
        b_v = group_basis(dec_v, pair.omega, window=2 / 64)
        dist = subspace_distances(b_u, b_v)
        assert max(dist.mu_u, dist.mu_v) == pytest.approx(0.5, abs=1e-9)

    def test_rotation_leaves_spectrum_fixed(self):
        pair = device_pair(8, 4, 64, "rotated", stream(64, "spec"), distance=0.5)
        np.testing.assert_allclose(
            decompose(pair.u.matrix).frequencies,
            decompose(pair.v.matrix).frequencies,
            atol=1e-9,
        )

    @pytest.mark.parametrize("relation,expect_u,expect_v", [
        ("dim_up", 2, 3),
        ("dim_down", 2, 1),
    ])
    def test_dimension_mismatch_relations(self, relation, expect_u, expect_v):
        pair = device_pair(8, 4, 64, relation, stream(64, relation), target_dim=2)
        dims = {}
        for tag, dev in (("u", pair.u), ("v", pair.v)):
            dec = decompose(dev.matrix)
            hit = [k for k, f in enumerate(dec.frequencies)
                   if circ_dist(float(f), pair.omega) <= 2 / 64]
            dims[tag] = int(dec.dims[hit[0]]) if hit else 0
        assert dims["u"] == expect_u
        assert dims["v"] == expect_v

    def test_empty_relation_removes_group_from_v(self):
        pair = device_pair(8, 4, 64, "empty", stream(64, "empty"))
        dec_v = decompose(pair.v.matrix)
        assert all(circ_dist(float(f), pair.omega) > 2 / 64 for f in dec_v.frequencies)

    def test_unknown_relation_rejected(self):
        with pytest.raises(ValueError):
            device_pair(8, 4, 64, "sideways", stream(64, "bad"))


class TestInvolutiveFamily:
    def test_members_share_half_spectrum(self):
        members = involutive_family(stream(65, "family"), count=4, n_qubits=2)
        for _, u in members:
            freqs = decompose(u.matrix).frequencies
            assert set(np.round(freqs * 2).astype(int) % 2).issubset({0, 1})
            np.testing.assert_allclose(u.matrix @ u.matrix, np.eye(4), atol=1e-9)

    def test_pairwise_eigenbasis_separation(self):
        members = involutive_family(stream(65, "apart"), count=4, n_qubits=2, min_distance=0.5)
        bases = []
        for _, u in members:
            dec = decompose(u.matrix)
            bases.append(group_basis(dec, 0.5, window=1 / 16))
        for i in range(len(bases)):
            for j in range(i + 1, len(bases)):
                dist = subspace_distances(bases[i], bases[j])
                assert max(dist.mu_u, dist.mu_v) >= 0.5 - 1e-9 or (
                    (dist.dim_u == 0) != (dist.dim_v == 0)
                )

    def test_codes_rebuild_members(self):
        from spectrec.circuit import GateSet

        members = involutive_family(stream(65, "codes"), count=4, n_qubits=2)
        gs = GateSet.involutive()
        for circ, u in members:
            np.testing.assert_allclose(
                build_unitary(circ, gs).matrix, u.matrix, atol=1e-12
            )


class TestThermoLevels:
    @pytest.mark.parametrize("preset", [0, 1, 2])
    def test_power_of_two_total_dimension(self, preset):
        levels = thermo_levels(preset)
        total = sum(d for _, d in levels["levels"])
        assert total & (total - 1) == 0

    @pytest.mark.parametrize("preset", [0, 1, 2])
    def test_levels_sit_on_coarse_anchors(self, preset):
        fixture = thermo_levels(preset)
        m_coarse = fixture["M"]
        scale = fixture["e_scale"]
        assert len(fixture["levels"]) == len(fixture["anchors"])
        for (energy, d), anchor in zip(fixture["levels"], fixture["anchors"]):
            assert d >= 1
            assert energy == pytest.approx(scale * (1.0 - 2.0 * np.pi * anchor / m_coarse))
            assert 0 < anchor < m_coarse

    def test_unknown_preset_rejected(self):
        with pytest.raises(ValueError):
            thermo_levels(3)
