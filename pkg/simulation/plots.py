"""SVG 图：输出与原始曲线对比、上下肢对应关系、特征分布"""

import io
from pathlib import Path
from typing import Mapping, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from features import FeatureSet  # noqa: E402
from gait_data import GaitCycle, JointId, LOWER_JOINTS, atomic_write_text  # noqa: E402
from restoration import LowerCurves  # noqa: E402

PathLike = Union[str, Path]

# 固定 SVG 内部 id，使同一输入得到相同文件
_RC = {"svg.hashsalt": "gait-rehab", "svg.fonttype": "none"}


def _save_svg(fig, path: PathLike) -> Path:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    return atomic_write_text(path, buffer.getvalue())


def _axis(index: int, n: int) -> np.ndarray:
    return index + np.arange(n) / n


def plot_restoration(
    cycles: Sequence[GaitCycle],
    emitted: Mapping[int, LowerCurves],
    path: PathLike,
    title: str = "",
) -> Path:
    """输出曲线与向前平移一个周期的原始曲线（髋、膝）

    横轴为周期序号 + 相位。
    """
    by_index = {c.index: c for c in cycles}
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(len(LOWER_JOINTS), 1, figsize=(10, 6), sharex=True)
        for ax, joint in zip(axes, LOWER_JOINTS):
            for n, e in enumerate(sorted(emitted)):
                curve = emitted[e][joint]
                ax.plot(_axis(e, curve.size), curve, color="tab:red", lw=1.2,
                        label="output" if n == 0 else None)
                if e - 1 in by_index:
                    orig = by_index[e - 1].curve(joint)
                    ax.plot(_axis(e, orig.size), orig, color="tab:blue", lw=1.0, ls="--",
                            label="original (shifted one cycle)" if n == 0 else None)
            ax.set_ylabel(f"{joint.value} (deg)")
            ax.grid(True, alpha=0.3)
        axes[0].legend(loc="upper right", fontsize=8)
        axes[-1].set_xlabel("cycle")
        if title:
            axes[0].set_title(title)
        return _save_svg(fig, path)


def plot_coordination(
    cycles: Sequence[GaitCycle],
    emitted: Mapping[int, LowerCurves],
    path: PathLike,
    title: str = "",
) -> Path:
    """同一周期内肩曲线与输出髋曲线的对应关系

    左图为时间序列，右图为肩-髋角度图（原始与输出）。
    """
    by_index = {c.index: c for c in cycles}
    shared = [e for e in sorted(emitted) if e in by_index]
    with plt.rc_context(_RC):
        fig, (series, cyclogram) = plt.subplots(1, 2, figsize=(12, 4.5),
                                                gridspec_kw={"width_ratios": [2, 1]})
        for n, e in enumerate(shared):
            shoulder = by_index[e].curve(JointId.SHOULDER)
            hip = emitted[e].hip
            first = n == 0
            series.plot(_axis(e, shoulder.size), shoulder, color="tab:green", lw=1.0,
                        label="shoulder" if first else None)
            series.plot(_axis(e, hip.size), hip, color="tab:red", lw=1.0,
                        label="output hip" if first else None)
            cyclogram.plot(shoulder, by_index[e].curve(JointId.HIP), color="tab:blue",
                           lw=0.6, alpha=0.6, label="original" if first else None)
            cyclogram.plot(shoulder, hip, color="tab:red", lw=0.6, alpha=0.6,
                           label="output" if first else None)
        series.set_xlabel("cycle")
        series.set_ylabel("angle (deg)")
        series.grid(True, alpha=0.3)
        series.legend(loc="upper right", fontsize=8)
        cyclogram.set_xlabel("shoulder (deg)")
        cyclogram.set_ylabel("hip (deg)")
        cyclogram.grid(True, alpha=0.3)
        cyclogram.legend(loc="upper right", fontsize=8)
        if title:
            series.set_title(title)
        return _save_svg(fig, path)


_UPPER_LABELS = ("shoulder trough", "shoulder peak", "elbow trough", "elbow peak")
_LOWER_LABELS = ("hip trough", "hip peak", "knee peak", "knee trough")


def plot_feature_distribution(features: FeatureSet, path: PathLike, title: str = "") -> Path:
    """上肢 / 下肢特征向量分量的两两散点"""
    X, Y = features.X, features.Y
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(2, 2, figsize=(9, 8))
        panels = (
            (X, (0, 1), _UPPER_LABELS),
            (X, (2, 3), _UPPER_LABELS),
            (Y, (0, 1), _LOWER_LABELS),
            (Y, (3, 2), _LOWER_LABELS),
        )
        for ax, (data, (i, j), labels) in zip(axes.flat, panels):
            if len(data):
                ax.scatter(data[:, i], data[:, j], s=12, alpha=0.7)
            ax.set_xlabel(f"{labels[i]} (deg)")
            ax.set_ylabel(f"{labels[j]} (deg)")
            ax.grid(True, alpha=0.3)
        if title:
            fig.suptitle(title)
        return _save_svg(fig, path)
