"""Outlier removal, similarity ordering and the sparsification sweeps."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdrkit import (
    BlockSpec,
    CorruptionSpec,
    SparsifyConfig,
    SymmetricGraph,
    apply_order,
    detect_type1,
    eig_smallest,
    gen_target_bd,
    inject_corruption,
    sbdo_order,
    sparsify,
)
from bdrkit.errors import AllOutliers, NoSparseCandidate


def two_block_graph():
    W = np.zeros((5, 5))
    W[np.ix_([0, 1, 2], [0, 1, 2])] = 0.9
    W[np.ix_([3, 4], [3, 4])] = 0.8
    np.fill_diagonal(W, 0.0)
    return SymmetricGraph(W)


def block_runs(order, labels):
    """True when every label's positions form one contiguous run of order."""
    seen = [labels[i] for i in order]
    changes = sum(1 for a, b in zip(seen[:-1], seen[1:]) if a != b)
    return changes == len(set(labels)) - 1


class TestDetectType1:
    def test_zero_row_removed(self):
        W = np.zeros((4, 4))
        W[0, 1] = W[1, 0] = 0.5
        W[0, 3] = W[3, 0] = 0.2
        report, reduced = detect_type1(SymmetricGraph(W))
        assert report.outlier_indices == (2,)
        assert report.kept_indices == (0, 1, 3)
        assert reduced.n == 3

    def test_fully_connected_untouched(self):
        g = gen_target_bd(BlockSpec(n=(4,), w=(0.5,)))
        report, reduced = detect_type1(g)
        assert report.outlier_indices == ()
        np.testing.assert_array_equal(reduced.W, g.W)

    def test_recovers_injected(self):
        spec = BlockSpec(n=(4, 5), w=(0.6, 0.8))
        inj = inject_corruption(gen_target_bd(spec), spec, CorruptionSpec(type1_count=3))
        report, reduced = detect_type1(inj.graph)
        assert report.outlier_indices == inj.type1_indices
        assert reduced.n == 9

    def test_all_outliers(self):
        with pytest.raises(AllOutliers):
            detect_type1(SymmetricGraph(np.zeros((3, 3))))

    @given(st.integers(0, 2**32 - 1), st.integers(0, 4))
    def test_random_injections_recovered(self, seed, n1):
        spec = BlockSpec(n=(3, 3), w=(0.5, 0.9))
        inj = inject_corruption(
            gen_target_bd(spec), spec, CorruptionSpec(type1_count=n1), seed=seed
        )
        report, _ = detect_type1(inj.graph)
        assert report.outlier_indices == inj.type1_indices


class TestSbdoOrder:
    def test_two_blocks_in_place(self):
        np.testing.assert_array_equal(sbdo_order(two_block_graph()), [0, 1, 2, 3, 4])

    def test_permuted_blocks_contiguous(self):
        g = two_block_graph()
        labels = np.array([1, 1, 1, 2, 2])
        rng = np.random.default_rng(8)
        for _ in range(20):
            perm = rng.permutation(5)
            gp = SymmetricGraph(g.W[np.ix_(perm, perm)])
            order = sbdo_order(gp)
            assert block_runs(order, labels[perm])

    def test_single_pair(self):
        W = np.array([[0.0, 0.4], [0.4, 0.0]])
        np.testing.assert_array_equal(sbdo_order(SymmetricGraph(W)), [0, 1])

    def test_deterministic(self):
        rng = np.random.default_rng(4)
        W = rng.uniform(0, 1, size=(8, 8))
        g = SymmetricGraph(0.5 * (W + W.T))
        np.testing.assert_array_equal(sbdo_order(g), sbdo_order(g))


class TestSparsify:
    def test_already_separated_accepted_immediately(self):
        g = gen_target_bd(BlockSpec(n=(4, 4), w=(0.8, 0.7)))
        cfg = SparsifyConfig(method="threshold", mode="generalized")
        sparse, info = sparsify(g, cfg)
        assert info.accepted and info.threshold == 0.5
        np.testing.assert_array_equal(sparse.W, g.W)

    def test_threshold_removes_group_similarity(self):
        spec = BlockSpec(n=(5, 5), w=(0.8, 0.7))
        inj = inject_corruption(
            gen_target_bd(spec), spec, CorruptionSpec(group_sim=((0, 0.2), (0.2, 0)))
        )
        sparse, info = sparsify(inj.graph, SparsifyConfig(method="threshold"))
        assert info.accepted
        spec2 = eig_smallest(sparse, "generalized", 3)
        assert spec2.eigenvalues[0] < 1e-3 and spec2.eigenvalues[1] < 1e-3
        assert spec2.eigenvalues[2] > 1e-3  # exactly two near-zero eigenvalues
        assert not sparse.W[:5, 5:].any()

    def test_clique_falls_back(self):
        g = gen_target_bd(BlockSpec(n=(5,), w=(0.5,)))
        sparse, info = sparsify(g, SparsifyConfig(method="threshold", mode="generalized"))
        assert not info.accepted  # fallback: nonnegative but lambda1 far from 0
        np.testing.assert_array_equal(sparse.W, g.W)

    def test_no_candidate_raises(self):
        g = gen_target_bd(BlockSpec(n=(5,), w=(0.5,)))
        cfg = SparsifyConfig(method="threshold", t_ini=0.9, mode="generalized")
        with pytest.raises(NoSparseCandidate):
            sparsify(g, cfg)

    def test_pnn_separates_blocks(self):
        spec = BlockSpec(n=(6, 5), w=(0.8, 0.7), jitter=0.005)
        inj = inject_corruption(
            gen_target_bd(spec, seed=5), spec, CorruptionSpec(group_sim=((0, 0.2), (0.2, 0)))
        )
        cfg = SparsifyConfig(method="pnn", n_min=2)
        sparse, info = sparsify(inj.graph, cfg)
        assert info.accepted
        spec2 = eig_smallest(sparse, "generalized", 2)
        assert spec2.eigenvalues[1] < 1e-3

    def test_none_passthrough(self):
        g = two_block_graph()
        sparse, info = sparsify(g, SparsifyConfig(method="none"))
        assert sparse is g and info.accepted

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25)
    def test_support_never_grows(self, seed):
        rng = np.random.default_rng(seed)
        W = rng.uniform(0, 1, size=(8, 8))
        g = SymmetricGraph(0.5 * (W + W.T))
        for cfg in (
            SparsifyConfig(method="threshold", t_ini=0.2, t_inc=0.05, mode="standard"),
            SparsifyConfig(method="pnn", n_min=2, mode="standard"),
        ):
            try:
                sparse, _ = sparsify(g, cfg)
            except NoSparseCandidate:
                continue
            assert not ((sparse.W != 0) & (g.W == 0)).any()

    def test_accepted_has_two_small_eigenvalues(self):
        spec = BlockSpec(n=(5, 4, 6), w=(0.7, 0.9, 0.8), jitter=0.01)
        g = gen_target_bd(spec, seed=2)
        cfg = SparsifyConfig(method="pnn", n_min=3)
        sparse, info = sparsify(g, cfg)
        assert info.accepted
        eigs = eig_smallest(sparse, "generalized", 2).eigenvalues
        assert eigs[0] < cfg.lambda1_tol and eigs[1] < cfg.lambda1_tol
        full = eig_smallest(sparse, "generalized", sparse.n).eigenvalues
        assert full.min() >= -1e-9


class TestApplyOrder:
    def test_round_trip(self):
        g = two_block_graph()
        order = np.array([3, 4, 0, 1, 2])
        g2 = apply_order(g, order)
        np.testing.assert_array_equal(g2.W[2:, 2:], g.W[:3, :3])
