"""Spectral oracle: eigendecomposition, subspace geometry, sparsity profiles."""
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectrec.rng import stream
from spectrec.spectral import (
    ProfileError,
    SparsityProfile,
    SpectralDecomposition,
    circ_dist,
    complement_within,
    decompose,
    group_basis,
    group_projector,
    intersection,
    is_d_distinguishable,
    orthonormal_basis,
    spectrum_from_json,
    spectrum_to_json,
    subspace_distances,
    subspace_sum,
)


def haar(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def diag_unitary(freqs):
    return np.diag(np.exp(2j * np.pi * np.asarray(freqs)))


class TestCircDist:
    def test_wraps_around_one(self):
        assert circ_dist(0.95, 0.05) == pytest.approx(0.1)

    def test_vectorized(self):
        np.testing.assert_allclose(
            circ_dist(np.array([0.0, 0.5, 0.9]), 0.0), [0.0, 0.5, 0.1]
        )

    @given(
        a=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
        b=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
    )
    @settings(max_examples=200, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        d = float(circ_dist(a, b))
        assert d == pytest.approx(float(circ_dist(b, a)))
        assert 0.0 <= d <= 0.5 + 1e-12


class TestDecompose:
    def test_identity_single_group(self):
        dec = decompose(np.eye(4))
        np.testing.assert_allclose(dec.frequencies, [0.0])
        assert dec.dims.tolist() == [4]

    def test_diagonal_two_groups(self):
        dec = decompose(diag_unitary([0.0, 0.25]))
        np.testing.assert_allclose(dec.frequencies, [0.0, 0.25], atol=1e-12)
        assert dec.dims.tolist() == [1, 1]

    def test_random_unitary_reconstruction(self):
        u = haar(8, stream(31, "spectral"))
        dec = decompose(u)
        assert np.max(np.abs(dec.reconstruct() - u)) <= 1e-7

    def test_degenerate_cluster_merged(self):
        dec = decompose(diag_unitary([0.25, 0.25, 0.75]))
        np.testing.assert_allclose(dec.frequencies, [0.25, 0.75], atol=1e-12)
        assert dec.dims.tolist() == [2, 1]

    def test_cluster_at_wrap_point_reports_zero(self):
        u = np.diag([np.exp(-2j * np.pi * 1e-12), 1j])
        dec = decompose(u)
        assert dec.frequencies[0] == 0.0
        np.testing.assert_allclose(dec.frequencies, [0.0, 0.25], atol=1e-9)

    def test_weights_sum_to_one(self):
        rng = stream(31, "weights")
        u = haar(8, rng)
        dec = decompose(u)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        v /= np.linalg.norm(v)
        assert dec.weights(v).sum() == pytest.approx(1.0, abs=1e-9)


class TestGroupProjector:
    def test_non_frequency_gives_zero(self):
        dec = decompose(diag_unitary([0.0, 0.5]))
        p = group_projector(dec, 0.25, window=0.05)
        np.testing.assert_allclose(p, np.zeros((2, 2)))

    def test_identity_at_zero_gives_identity(self):
        dec = decompose(np.eye(4))
        np.testing.assert_allclose(group_projector(dec, 0.0, window=0.05), np.eye(4))

    def test_rank_matches_planted_degeneracy(self):
        u = diag_unitary([0.0, 0.25, 0.25, 0.25, 0.5, 0.75])
        # 6 levels will not fit a 2-qubit register; use the matrix directly
        dec = decompose(u)
        p = group_projector(dec, 0.25, window=0.05)
        assert round(float(np.trace(p).real)) == 3

    def test_group_basis_spans_projector(self):
        dec = decompose(diag_unitary([0.0, 0.26, 0.27]))
        b = group_basis(dec, 0.265, window=0.02)
        assert b.shape == (3, 2)
        np.testing.assert_allclose(b @ b.conj().T, group_projector(dec, 0.265, window=0.02), atol=1e-12)


class TestSubspaceDistances:
    def test_coincident_gives_zero(self):
        b = np.eye(4)[:, :2]
        dist = subspace_distances(b, b)
        assert dist.mu_u == pytest.approx(0.0, abs=1e-9)
        assert dist.mu_v == pytest.approx(0.0, abs=1e-9)

    def test_orthogonal_lines_give_one(self):
        dist = subspace_distances(np.eye(4)[:, :1], np.eye(4)[:, 1:2])
        assert dist.mu_u == pytest.approx(1.0)
        assert dist.mu_v == pytest.approx(1.0)

    def test_principal_angle_oracle(self):
        theta = math.radians(30)
        u = np.eye(3)[:, :1].astype(complex)
        v = np.array([[math.cos(theta)], [math.sin(theta)], [0.0]], dtype=complex)
        dist = subspace_distances(u, v)
        assert dist.mu_u == pytest.approx(math.sin(theta), abs=1e-12)
        assert dist.mu_v == pytest.approx(math.sin(theta), abs=1e-12)

    def test_nested_subspaces_one_sided(self):
        big = np.eye(4)[:, :2].astype(complex)
        small = np.eye(4)[:, :1].astype(complex)
        dist = subspace_distances(big, small)
        # every vector of the line lies in the plane, not conversely
        assert dist.mu_v == pytest.approx(0.0, abs=1e-9)
        assert dist.mu_u == pytest.approx(1.0)
        assert (dist.dim_u, dist.dim_v) == (2, 1)

    def test_unitary_invariance(self):
        rng = stream(32, "invariance")
        q = haar(4, rng)
        b_u = orthonormal_basis(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        b_v = orthonormal_basis(rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
        d0 = subspace_distances(b_u, b_v)
        d1 = subspace_distances(q @ b_u, q @ b_v)
        assert d1.mu_u == pytest.approx(d0.mu_u, abs=1e-9)
        assert d1.mu_v == pytest.approx(d0.mu_v, abs=1e-9)


class TestDistinguishable:
    def test_coincident_false(self):
        b = np.eye(4)[:, :2]
        assert not is_d_distinguishable(subspace_distances(b, b), 0.5)

    def test_orthogonal_true(self):
        dist = subspace_distances(np.eye(4)[:, :1], np.eye(4)[:, 1:2])
        assert is_d_distinguishable(dist, 0.5)

    def test_single_empty_side_true(self):
        dist = subspace_distances(np.eye(4)[:, :1], np.zeros((4, 0)))
        assert is_d_distinguishable(dist, 0.9)

    def test_below_threshold_false(self):
        theta = math.asin(0.3)
        v = np.array([[math.cos(theta)], [math.sin(theta)], [0.0]], dtype=complex)
        dist = subspace_distances(np.eye(3)[:, :1].astype(complex), v)
        assert not is_d_distinguishable(dist, 0.5)


class TestSubspaceArithmetic:
    def test_orthonormal_basis_strips_dependence(self):
        vecs = np.array([[1.0, 2.0], [0.0, 0.0], [1.0, 2.0]], dtype=complex)
        b = orthonormal_basis(vecs)
        assert b.shape[1] == 1
        np.testing.assert_allclose(b.conj().T @ b, np.eye(1), atol=1e-12)

    def test_complement_within(self):
        whole = np.eye(3).astype(complex)
        part = np.eye(3)[:, :1].astype(complex)
        comp = complement_within(whole, part)
        assert comp.shape[1] == 2
        np.testing.assert_allclose(part.conj().T @ comp, 0, atol=1e-9)

    def test_intersection_of_planes(self):
        a = np.eye(3)[:, :2].astype(complex)  # span(e1, e2)
        b = np.eye(3)[:, 1:].astype(complex)  # span(e2, e3)
        inter = intersection(a, b)
        assert inter.shape[1] == 1
        overlap = np.abs(inter.conj().T @ np.eye(3)[:, 1:2])
        assert overlap[0, 0] == pytest.approx(1.0, abs=1e-9)

    def test_sum_of_lines(self):
        a = np.eye(3)[:, :1].astype(complex)
        b = np.eye(3)[:, 1:2].astype(complex)
        s = subspace_sum(a, b)
        assert s.shape[1] == 2


class TestSparsityProfile:
    def test_identity_accepts_only_zero_cell(self):
        profile = SparsityProfile.from_decomposition(decompose(np.eye(4)), 4, 64)
        assert profile.anchors == (0,)

    def test_two_group_anchors(self):
        dec = decompose(diag_unitary([0.0, 0.5]))
        profile = SparsityProfile.from_decomposition(dec, 4, 64)
        assert profile.anchors == (0, 2)

    def test_cell_without_frequency_rejected(self):
        dec = decompose(diag_unitary([0.0, 0.5]))
        profile = SparsityProfile.from_decomposition(dec, 4, 64)
        assert 1 not in profile.anchors

    def test_dense_spectrum_rejected(self):
        dec = decompose(diag_unitary([0.0, 0.125, 0.25, 0.375]))
        with pytest.raises(ProfileError):
            SparsityProfile.from_decomposition(dec, 4, 64)


class TestSerialization:
    def test_round_trip(self):
        u = haar(8, stream(33, "serde"))
        dec = decompose(u)
        freqs, dims = spectrum_from_json(spectrum_to_json(dec))
        np.testing.assert_allclose(freqs, dec.frequencies, atol=1e-12)
        np.testing.assert_array_equal(dims, dec.dims)

    def test_json_is_plain_data(self):
        payload = json.loads(spectrum_to_json(decompose(np.eye(2))))
        assert set(payload) >= {"frequencies", "dims"}
