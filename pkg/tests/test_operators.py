"""Unit tests for the dense Hermitian primitives."""

import numpy as np
import pytest

from sconv.operators import (
    HermitianOperator,
    StatePair,
    distinct_eigenvalue_count,
    eigenvalue_clusters,
    log_on_support,
    operator_from_json,
    operator_to_json,
    pinch,
    positive_part_trace,
    power_on_support,
    psd_dominates,
    rand_density,
    rand_hermitian,
    rand_test,
    spectral,
    supports_nested,
    tensor_power,
    tensor_product,
)
from sconv.operators import Test as BinaryTest


class TestHermitianOperator:
    def test_spectral_reconstruction(self, rng):
        op = rand_hermitian(6, rng)
        w, v = spectral(op)
        assert np.allclose((v * w) @ v.conj().T, op.entries, atol=1e-12)
        assert np.all(np.diff(w) >= 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            HermitianOperator([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            HermitianOperator(np.zeros((2, 3)))

    def test_from_spectral_round_trip(self, rng):
        op = rand_hermitian(5, rng)
        rebuilt = HermitianOperator.from_spectral(op.eigenvalues, op.eigenvectors)
        assert np.allclose(rebuilt.entries, op.entries, atol=1e-12)

    def test_scalar_summaries(self):
        op = HermitianOperator(np.diag([-1.0, 0.5, 2.0]))
        assert op.trace == pytest.approx(1.5)
        assert op.norm == pytest.approx(2.0)
        assert op.min_eigenvalue == pytest.approx(-1.0)
        assert op.max_eigenvalue == pytest.approx(2.0)

    def test_support_and_rank(self):
        op = HermitianOperator(np.diag([0.0, 0.0, 0.3, 0.7]))
        assert op.rank() == 2
        proj = op.support_projection()
        assert proj.trace == pytest.approx(2.0)
        assert np.allclose(proj.entries @ op.entries, op.entries, atol=1e-12)

    def test_map_eigenvalues(self, rng):
        op = rand_density(4, rng)
        sq = op.map_eigenvalues(lambda x: x**2)
        assert np.allclose(sq.entries, op.entries @ op.entries, atol=1e-12)


class TestMatrixFunctions:
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 3.0])
    def test_power_matches_dense(self, rng, t):
        op = rand_density(5, rng)
        w, v = spectral(op)
        expect = (v * w**t) @ v.conj().T
        assert np.allclose(power_on_support(op, t).entries, expect, atol=1e-12)

    def test_power_zero_is_support_projection(self):
        op = HermitianOperator(np.diag([0.0, 0.4, 0.6]))
        p0 = power_on_support(op, 0.0)
        assert np.allclose(p0.entries, np.diag([0.0, 1.0, 1.0]), atol=1e-12)

    def test_negative_power_is_pseudo_inverse(self):
        op = HermitianOperator(np.diag([0.0, 0.5, 2.0]))
        inv = power_on_support(op, -1.0)
        assert np.allclose(inv.entries, np.diag([0.0, 2.0, 0.5]), atol=1e-12)

    def test_power_rejects_indefinite(self):
        op = HermitianOperator(np.diag([-0.5, 1.5]))
        with pytest.raises(ValueError, match="positive semidefinite"):
            power_on_support(op, 0.5)

    def test_log_on_support(self):
        op = HermitianOperator(np.diag([0.0, 1.0, np.e]))
        lg = log_on_support(op)
        assert np.allclose(lg.entries, np.diag([0.0, 0.0, 1.0]), atol=1e-12)

    def test_positive_part_trace(self):
        op = HermitianOperator(np.diag([-0.3, 0.2, 0.8]))
        assert positive_part_trace(op) == pytest.approx(1.0)
        # also accepts a raw ndarray
        assert positive_part_trace(np.diag([-1.0, 2.0])) == pytest.approx(2.0)

    def test_positive_part_is_best_test_payoff(self, rng):
        op = rand_hermitian(4, rng)
        best = positive_part_trace(op)
        for _ in range(25):
            t = rand_test(4, rng)
            payoff = float(np.trace(op.entries @ t.op.entries).real)
            assert payoff <= best + 1e-10


class TestPinching:
    def test_pinch_preserves_trace_and_commutes(self, rng):
        x = rand_hermitian(5, rng)
        sigma = rand_density(5, rng)
        px = pinch(x, sigma)
        assert px.trace == pytest.approx(x.trace, abs=1e-12)
        comm = px.entries @ sigma.entries - sigma.entries @ px.entries
        assert np.abs(comm).max() < 1e-12

    def test_pinch_fixed_point(self, rng):
        sigma = rand_density(4, rng)
        f = sigma.map_eigenvalues(lambda x: x + x**2)
        assert np.allclose(pinch(f, sigma).entries, f.entries, atol=1e-12)

    def test_pinch_degenerate_blocks(self):
        # degenerate sigma keeps the whole block, not just the diagonal
        sigma = HermitianOperator(np.diag([0.25, 0.25, 0.5]))
        x = HermitianOperator(np.ones((3, 3)))
        px = pinch(x, sigma)
        expect = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1]], dtype=float)
        assert np.allclose(px.entries, expect, atol=1e-12)

    def test_pinch_dimension_mismatch(self, rng):
        with pytest.raises(ValueError, match="dimension"):
            pinch(rand_hermitian(3, rng), rand_density(4, rng))


class TestClustersAndTensors:
    def test_distinct_count_numeric(self):
        op = HermitianOperator(np.diag([0.2, 0.2 + 1e-13, 0.5, 0.9]))
        assert distinct_eigenvalue_count(op) == 3

    def test_tensor_power_symbolic_degeneracy(self, rng):
        # a qubit power has exactly n+1 distinct eigenvalues, recognized
        # symbolically even when products collide numerically
        sigma = rand_density(2, rng)
        for n in (2, 3, 4, 5):
            sn = tensor_power(sigma, n)
            assert distinct_eigenvalue_count(sn) == n + 1

    def test_tensor_power_matches_kron(self, rng):
        op = rand_density(2, rng)
        p3 = tensor_power(op, 3)
        expect = np.kron(np.kron(op.entries, op.entries), op.entries)
        assert np.allclose(p3.entries, expect, atol=1e-12)

    def test_tensor_power_dim_cap(self, rng):
        with pytest.raises(ValueError, match="cap"):
            tensor_power(rand_density(2, rng), 5, dim_cap=16)

    def test_tensor_product(self, rng):
        a, b = rand_density(2, rng), rand_density(3, rng)
        ab = tensor_product(a, b)
        assert ab.dim == 6
        assert np.allclose(ab.entries, np.kron(a.entries, b.entries), atol=1e-12)

    def test_cluster_sizes_sum_to_dim(self, rng):
        op = rand_hermitian(7, rng)
        clusters = eigenvalue_clusters(op)
        assert sum(len(c) for c in clusters) == 7


class TestOrderAndSupports:
    def test_psd_dominates(self):
        a = HermitianOperator(np.diag([2.0, 3.0]))
        b = HermitianOperator(np.diag([1.0, 3.0]))
        assert psd_dominates(a, b)
        assert not psd_dominates(b, a)

    def test_supports_nested(self):
        rho = HermitianOperator(np.diag([1.0, 0.0, 0.0]))
        sigma = HermitianOperator(np.diag([0.5, 0.5, 0.0]))
        ok, leak = supports_nested(rho, sigma)
        assert ok and leak < 1e-12
        ok, leak = supports_nested(sigma, rho)
        assert not ok and leak == pytest.approx(1.0)


class TestStatePairAndTest:
    def test_state_pair_valid(self, rng):
        pair = StatePair(rand_density(3, rng), rand_density(3, rng))
        assert pair.dim == 3
        assert not pair.support_marginal

    def test_state_pair_rejects_unnormalized(self, rng):
        bad = HermitianOperator(2.0 * rand_density(3, rng).entries)
        with pytest.raises(ValueError, match="normalized"):
            StatePair(bad, rand_density(3, rng))

    def test_state_pair_rejects_support_violation(self):
        rho = HermitianOperator(np.diag([0.5, 0.5, 0.0]))
        sigma = HermitianOperator(np.diag([1.0, 0.0, 0.0]))
        with pytest.raises(ValueError, match="support"):
            StatePair(rho, sigma)

    def test_test_validation_and_complement(self, rng):
        t = rand_test(4, rng)
        tc = t.complement()
        assert np.allclose(t.op.entries + tc.op.entries, np.eye(4), atol=1e-12)
        with pytest.raises(ValueError, match="outside"):
            BinaryTest(HermitianOperator(np.diag([1.5, 0.0, 0.0, 0.0])))

    def test_test_scale(self, rng):
        t = rand_test(3, rng)
        half = t.scale(0.5)
        assert np.allclose(half.op.entries, 0.5 * t.op.entries, atol=1e-12)
        with pytest.raises(ValueError, match="outside"):
            t.scale(1.5)


class TestSerialization:
    def test_json_round_trip(self, rng):
        op = rand_hermitian(4, rng)
        back = operator_from_json(operator_to_json(op))
        assert np.allclose(back.entries, op.entries, atol=1e-15)

    def test_json_real_only(self):
        data = {"dim": 2, "re": [1.0, 0.0, 0.0, 2.0], "im": None}
        op = operator_from_json(data)
        assert np.allclose(op.entries, np.diag([1.0, 2.0]), atol=1e-15)
