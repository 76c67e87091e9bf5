"""特征还原单元测试

测试 KMeans、参考选取、傅里叶拟合、权重求解、曲线还原与参考集文件。
"""

import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from errors import (
    EmptyCluster,
    ModelFileError,
    OrderTooHigh,
    SingularReferenceMatrix,
    TooFewClusters,
    TooFewSamples,
)
from features import JointBand, LowerFeature, UpperFeature, extract_extrema, extract_features, train_band
from gait_data import PLANTED_MODES, GaitCycle, JointId, SynthParams, segment_cycles, synthesize_recording
from restoration import (
    ClusterModel,
    FourierSeries,
    RawReferences,
    ReferenceSet,
    RestorationWeights,
    build_reference_set,
    cluster_features,
    evaluate_curves,
    fit_reference_curve,
    kmeans,
    load_references,
    restore_curve,
    select_representative,
    solve_weights,
    write_references,
)
from tests.conftest import PUBLISHED_YBAR

GRID = np.arange(100) / 100
DENSE = np.linspace(0.0, 1.0, 200001)


def _hip_shape(phase):
    return np.sin(2 * np.pi * phase) + 0.2 * np.sin(4 * np.pi * phase)


def _knee_shape(phase):
    return -np.sin(2 * np.pi * phase) + 0.15 * np.sin(4 * np.pi * phase)


# 每个参考曲线的 (髋均值, 髋幅值, 膝均值, 膝幅值)
FAMILY = np.array([
    [18.0, 22.0, -55.0, 45.0],
    [20.0, 22.0, -55.0, 45.0],
    [18.0, 25.0, -55.0, 45.0],
    [18.0, 22.0, -51.0, 48.0],
])
# 拟合阶数之外的高频分量
HIGH_FREQ = 0.3 * np.sin(2 * np.pi * 11 * GRID)


def _family_raw() -> RawReferences:
    hip = np.array([c + s * _hip_shape(GRID) + HIGH_FREQ for c, s, _, _ in FAMILY])
    knee = np.array([c + s * _knee_shape(GRID) + HIGH_FREQ for _, _, c, s in FAMILY])
    h_min, h_max = _hip_shape(DENSE).min(), _hip_shape(DENSE).max()
    k_min, k_max = _knee_shape(DENSE).min(), _knee_shape(DENSE).max()
    vectors = np.array([
        [ch + sh * h_min, ch + sh * h_max, ck + sk * k_max, ck + sk * k_min]
        for ch, sh, ck, sk in FAMILY
    ])
    return RawReferences(vectors=vectors, hip=hip, knee=knee, cluster_ids=(0, 1, 2, 3), sizes=(1, 1, 1, 1))


def _constant_refs(vectors: np.ndarray) -> ReferenceSet:
    curves = tuple(FourierSeries([float(k)]) for k in range(4))
    return ReferenceSet(vectors, curves, curves)


def _lower_vector(curves) -> np.ndarray:
    """还原曲线的 (髋谷, 髋峰, 膝峰, 膝谷)"""
    band = JointBand(0.0, 1e9)
    hip = extract_extrema(curves.hip, band, 100.0)
    knee = extract_extrema(curves.knee, band, 100.0)
    return np.array([hip.trough, hip.peak, knee.peak, knee.trough])


class TestKMeans:
    """测试 KMeans"""

    @staticmethod
    def _modes_and_outliers():
        rng = np.random.default_rng(4)
        centers = np.array([
            [0.0] * 8,
            [10.0, 0, 0, 0, 0, 0, 0, 0],
            [0, 10.0, 0, 0, 0, 0, 0, 0],
            [0, 0, 10.0, 0, 0, 0, 0, 0],
        ])
        modes = [c + rng.normal(0.0, 0.05, size=(30, 8)) for c in centers]
        outliers = 1000.0 * np.eye(8)[:5] + 500.0
        return modes, np.vstack(modes + [outliers])

    def test_largest_clusters_are_modes(self):
        """4 个紧致模式 + 5 个远离点，k = 9：最大的 4 个簇即 4 个模式"""
        modes, points = self._modes_and_outliers()
        centroids, labels, _, _, _ = kmeans(points, 9, seed=0)
        sizes = np.bincount(labels, minlength=9)
        largest = np.argsort(-sizes, kind="stable")[:4]
        assert sorted(sizes[largest]) == [30, 30, 30, 30]
        mode_means = [m.mean(axis=0) for m in modes]
        for c in largest:
            assert min(np.linalg.norm(centroids[c] - mean) for mean in mode_means) < 1e-9

    def test_seeded_determinism(self):
        """同种子同结果"""
        _, points = self._modes_and_outliers()
        first = kmeans(points, 9, seed=3)
        second = kmeans(points, 9, seed=3)
        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])

    def test_inertia_non_increasing(self):
        """簇内平方和单调不增"""
        rng = np.random.default_rng(2)
        points = rng.normal(0.0, 1.0, size=(200, 4))
        _, _, history, n_iter, _ = kmeans(points, 5, seed=1)
        assert len(history) == n_iter
        assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))

    def test_single_cluster(self):
        """k = 1 时中心为均值"""
        points = np.ones((5, 3))
        centroids, labels, _, _, _ = kmeans(points, 1)
        assert np.allclose(centroids, 1.0)
        assert np.all(labels == 0)

    def test_too_few_points(self):
        """点数少于 k"""
        with pytest.raises(TooFewSamples):
            kmeans(np.zeros((3, 2)), 4)

    def test_persistent_empty_cluster(self):
        """重复点无法分成两簇"""
        with pytest.raises(EmptyCluster):
            kmeans(np.ones((6, 2)), 2, max_restarts=2)


def _features(m: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    uppers, lowers = [], []
    for i in range(m):
        group = i % 2
        x = np.array([-20.0, 20.0, 60.0, 85.0]) + 15.0 * group + rng.normal(0.0, 0.3, 4)
        y = PUBLISHED_YBAR[group * 3] + rng.normal(0.0, 0.3, 4)
        uppers.append(UpperFeature(x=x, cycle_index=i))
        lowers.append(LowerFeature(y=y, cycle_index=i))
    return uppers, lowers


class TestClusterFeatures:
    """测试特征聚类"""

    def test_paired_space(self):
        """paired：8 维点，每周期一个标签"""
        X, Y = _features(12)
        model = cluster_features(X, Y, k=2, seed=0, space="paired")
        assert model.centroids.shape == (2, 8)
        assert sorted(model.assignments) == list(range(12))
        assert sorted(model.sizes()) == [6, 6]
        assert model.space == "paired"
        # 两组交替出现
        assert model.assignments[0] != model.assignments[1]
        assert model.assignments[0] == model.assignments[2]

    def test_pooled_space(self):
        """pooled：4 维点，周期标签取其 y 点所在簇"""
        X, Y = _features(12)
        model = cluster_features(X, Y, k=3, seed=0, space="pooled")
        assert model.centroids.shape == (3, 4)
        assert sorted(model.assignments) == list(range(12))

    def test_members_sorted(self):
        """members 按周期号升序"""
        X, Y = _features(10)
        model = cluster_features(X, Y, k=2)
        for c in range(2):
            members = model.members(c)
            assert members == sorted(members)

    def test_fewer_cycles_than_k(self):
        """周期数少于 k"""
        X, Y = _features(5)
        with pytest.raises(TooFewSamples):
            cluster_features(X, Y, k=9)

    def test_unknown_space(self):
        """未知聚类空间"""
        X, Y = _features(6)
        with pytest.raises(ValueError):
            cluster_features(X, Y, k=2, space="joint")


def _cycle(index: int, level: float) -> GaitCycle:
    curve = np.full(100, level)
    return GaitCycle(
        index=index,
        start_sample=index * 110,
        end_sample=(index + 1) * 110,
        period=1.1,
        curves={JointId.HIP: curve, JointId.KNEE: -curve},
    )


class TestSelectRepresentative:
    """测试代表簇选取"""

    def test_largest_four_with_tie_break(self):
        """按簇大小降序，同样大小取簇号小者"""
        labels = [0, 0, 1, 1, 1, 2, 3, 3, 3, 4, 4]
        vector_of = {1: PUBLISHED_YBAR[0], 3: PUBLISHED_YBAR[1], 0: PUBLISHED_YBAR[2], 4: PUBLISHED_YBAR[3],
                     2: np.array([0.0, 1.0, 0.0, -1.0])}
        model = ClusterModel(
            k=5, centroids=np.zeros((5, 8)), assignments=dict(enumerate(labels)), seed=0,
        )
        Y = [LowerFeature(y=vector_of[c], cycle_index=i) for i, c in enumerate(labels)]
        cycles = [_cycle(i, float(c)) for i, c in enumerate(labels)]

        raw = select_representative(model, Y, cycles)
        assert raw.cluster_ids == (1, 3, 0, 4)
        assert raw.sizes == (3, 3, 2, 2)
        assert np.allclose(raw.vectors, PUBLISHED_YBAR)
        assert np.allclose(raw.hip[:, 0], [1.0, 3.0, 0.0, 4.0])
        assert np.allclose(raw.knee[:, 0], [-1.0, -3.0, 0.0, -4.0])

    def test_too_few_clusters(self):
        """非空簇少于 4 个"""
        labels = [0, 0, 1, 2, 2]
        model = ClusterModel(k=4, centroids=np.zeros((4, 8)), assignments=dict(enumerate(labels)), seed=0)
        Y = [LowerFeature(y=PUBLISHED_YBAR[c], cycle_index=i) for i, c in enumerate(labels)]
        cycles = [_cycle(i, 0.0) for i in range(len(labels))]
        with pytest.raises(TooFewClusters):
            select_representative(model, Y, cycles)

    def test_planted_modes_recovered(self):
        """植入 4 个运动模式、k = 9：4 个参考向量分别对应 4 个不同模式的真值均值"""
        synth = synthesize_recording(SynthParams(
            n_cycles=40,
            modes=PLANTED_MODES,
            amplitude_jitter=0.01,
            period_jitter=0.01,
            seed=5,
        ))
        cycles = segment_cycles(synth.recording)
        features = extract_features(cycles, train_band(cycles))
        model = cluster_features(features.upper, features.lower, k=9, seed=0)
        raw = select_representative(model, features.lower, cycles)

        mode_means = [
            np.mean([t.lower for t in synth.truths if t.mode == mode], axis=0)
            for mode in range(len(PLANTED_MODES))
        ]
        matched = [
            int(np.argmin([np.max(np.abs(vector - mean)) for mean in mode_means]))
            for vector in raw.vectors
        ]
        assert sorted(matched) == list(range(len(PLANTED_MODES)))
        for vector, mode in zip(raw.vectors, matched):
            assert np.max(np.abs(vector - mode_means[mode])) < 0.5


class TestFourierFit:
    """测试参考曲线的傅里叶拟合"""

    def test_exact_harmonics(self):
        """阶数内的谐波精确恢复"""
        raw = 3.0 + 2.0 * np.cos(2 * np.pi * GRID) - 5.0 * np.sin(4 * np.pi * GRID)
        series = fit_reference_curve(raw, fit_order=6)
        expected = np.zeros(13)
        expected[0], expected[1], expected[4] = 3.0, 2.0, -5.0
        assert np.allclose(series.coefficients, expected, atol=1e-9)
        assert series.rms < 1e-9
        assert series.order == 6

    def test_dropped_harmonic_rms(self):
        """高于阶数的谐波进入残差"""
        series = fit_reference_curve(10.0 + HIGH_FREQ, fit_order=6)
        assert series.rms == pytest.approx(0.3 / np.sqrt(2.0), abs=1e-9)
        assert np.allclose(series(GRID), 10.0, atol=1e-9)

    def test_periodic_seam(self):
        """f(0) = f(1)"""
        series = fit_reference_curve(_family_raw().hip[0])
        assert series(0.0) == pytest.approx(series(1.0), abs=1e-9)

    def test_order_too_high(self):
        """2·order + 1 > N"""
        with pytest.raises(OrderTooHigh):
            fit_reference_curve(np.zeros(12), fit_order=6)
        fit_reference_curve(np.zeros(13), fit_order=6)

    def test_coefficient_count(self):
        """系数个数必须为奇数"""
        with pytest.raises(ValueError):
            FourierSeries([1.0, 2.0])


class TestSolveWeights:
    """测试权重求解"""

    def test_reference_vectors_give_unit_weights(self):
        """y′ = ȳ_k 时 a = e_k"""
        refs = _constant_refs(PUBLISHED_YBAR)
        for k in range(4):
            weights = solve_weights(PUBLISHED_YBAR[k], refs)
            assert np.allclose(weights.a, np.eye(4)[k], atol=1e-9)
            assert not weights.ill_conditioned

    def test_midpoint(self):
        """0.5·ȳ₁ + 0.5·ȳ₄ → (0.5, 0, 0, 0.5)"""
        refs = _constant_refs(PUBLISHED_YBAR)
        weights = solve_weights(0.5 * PUBLISHED_YBAR[0] + 0.5 * PUBLISHED_YBAR[3], refs)
        assert np.allclose(weights.a, [0.5, 0.0, 0.0, 0.5], atol=1e-9)
        assert weights.residual < 1e-9

    def test_repeated_vector_is_singular(self):
        """重复的参考向量"""
        vectors = PUBLISHED_YBAR.copy()
        vectors[2] = vectors[1]
        with pytest.raises(SingularReferenceMatrix):
            _constant_refs(vectors)

    def test_ill_conditioned_flag(self):
        """条件数超过阈值时照常求解并标记"""
        refs = _constant_refs(PUBLISHED_YBAR)
        weights = solve_weights(PUBLISHED_YBAR[0], refs, cond_threshold=1.0)
        assert weights.ill_conditioned
        assert np.allclose(weights.a, [1.0, 0.0, 0.0, 0.0], atol=1e-9)


class TestRestoreCurve:
    """测试曲线还原"""

    def test_unit_weights_reproduce_reference(self):
        """a = e_k 时输出即第 k 条参考曲线"""
        refs = build_reference_set(_family_raw())
        for k in range(4):
            curves = restore_curve(RestorationWeights(a=np.eye(4)[k]), refs)
            assert np.allclose(curves.hip, refs.hip[k](GRID), atol=1e-12)
            assert np.allclose(curves.knee, refs.knee[k](GRID), atol=1e-12)

    def test_linear_in_weights(self):
        """权重加倍，输出加倍"""
        refs = build_reference_set(_family_raw())
        a = np.array([0.1, 0.2, 0.3, 0.4])
        single = restore_curve(RestorationWeights(a=a), refs)
        double = restore_curve(RestorationWeights(a=2 * a), refs)
        assert np.allclose(double.hip, 2 * single.hip)
        assert np.allclose(double.knee, 2 * single.knee)

    def test_grid_size(self):
        """任意点数与任意相位求值一致"""
        refs = build_reference_set(_family_raw())
        weights = RestorationWeights(a=np.array([0.25, 0.25, 0.25, 0.25]))
        curves = restore_curve(weights, refs, n=37)
        assert curves.hip.size == 37
        direct = evaluate_curves(weights, refs, np.arange(37) / 37)
        assert np.allclose(curves.knee, direct.knee)

    def test_convex_combinations_keep_extrema(self):
        """凸组合权重下，还原曲线的极值接近 y′（容差 2 × 拟合 RMS）"""
        raw = _family_raw()
        refs = build_reference_set(raw, fit_order=6)
        tolerance = 2.0 * refs.fit_rms
        rng = np.random.default_rng(17)
        for _ in range(100):
            a = rng.dirichlet(np.ones(4))
            y_prime = a @ raw.vectors
            weights = solve_weights(y_prime, refs)
            assert np.allclose(weights.a, a, atol=1e-8)
            restored = _lower_vector(restore_curve(weights, refs))
            assert np.all(np.abs(restored - y_prime) <= tolerance)

    def test_fit_order_recorded(self):
        """参考集记录拟合阶数与残差"""
        refs = build_reference_set(_family_raw(), fit_order=4)
        assert refs.fit_order == 4
        assert refs.fit_rms == pytest.approx(0.3 / np.sqrt(2.0), abs=1e-9)


class TestReferenceFile:
    """测试参考集文件"""

    def test_round_trip_exact(self, tmp_path):
        """全精度往返"""
        refs = build_reference_set(_family_raw())
        loaded = load_references(write_references(refs, tmp_path / "refs.txt"))
        assert np.array_equal(loaded.vectors, refs.vectors)
        for a, b in zip(loaded.hip + loaded.knee, refs.hip + refs.knee):
            assert np.array_equal(a.coefficients, b.coefficients)

    def test_fit_rms_survives_round_trip(self, tmp_path):
        """读回后拟合 RMS 不丢失"""
        refs = build_reference_set(_family_raw(), fit_order=4)
        loaded = load_references(write_references(refs, tmp_path / "refs.txt"))
        assert refs.fit_rms > 0.0
        assert loaded.fit_rms == refs.fit_rms
        for a, b in zip(loaded.hip + loaded.knee, refs.hip + refs.knee):
            assert a.rms == b.rms

    def test_layout(self, tmp_path):
        """4 块，每块 ybar / fourier_hip / fourier_knee / fit_rms"""
        path = write_references(build_reference_set(_family_raw(), fit_order=3), tmp_path / "refs.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 16
        assert [line.split()[0] for line in lines[:4]] == ["ybar", "fourier_hip", "fourier_knee", "fit_rms"]
        assert len(lines[1].split()) == 1 + 7
        assert len(lines[3].split()) == 1 + 2

    def test_negative_fit_rms(self, tmp_path):
        """拟合 RMS 为负"""
        path = write_references(build_reference_set(_family_raw()), tmp_path / "refs.txt")
        lines = path.read_text(encoding="utf-8").splitlines()
        lines[3] = "fit_rms -1.0 0.5"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_references(path)

    def test_wrong_line_count(self, tmp_path):
        """行数错误"""
        path = tmp_path / "refs.txt"
        path.write_text("ybar 1 2 3 4\n", encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_references(path)

    def test_wrong_keys(self, tmp_path):
        """块内标记错误"""
        path = write_references(build_reference_set(_family_raw()), tmp_path / "refs.txt")
        text = path.read_text(encoding="utf-8").replace("fourier_knee", "fourier_ankle", 1)
        path.write_text(text, encoding="utf-8")
        with pytest.raises(ModelFileError):
            load_references(path)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
