#!/usr/bin/env python3
"""
Gait-Rehab 命令行
=================
上肢驱动下肢的自助康复训练流水线：合成记录 → 辨识模型 → 逐周期仿真
→ 误差分析 → 作图。

子命令:
  synth     生成合成记录（及真值伴随文件）
  identify  切分 → 提取特征 → 最小二乘辨识 → 聚类 → 拟合参考曲线
  simulate  按一周期滞后运行流水线，写出输出轨迹与运行清单
  analyze   由运行清单计算误差报告
  plot      由运行清单生成 SVG 图

使用方法:
  python gait_rehab.py synth --out data/rec.csv --seed 7 --experiments
  python gait_rehab.py identify --rec data/rec.csv --out-map models/map.txt \\
      --out-band models/band.txt --out-refs models/refs.txt
  python gait_rehab.py simulate --rec data/rec_exp1.csv --map models/map.txt \\
      --band models/band.txt --refs models/refs.txt --out-dir out
  python gait_rehab.py analyze --out-dir out
  python gait_rehab.py plot --out-dir out

退出码: 0 成功，1 用法错误，2 数据 / 模型错误。诊断信息只写到标准错误。
"""

import argparse
import dataclasses
import re
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import ValidationError

from config import ConfigLoader, RunConfig, apply_overrides
from errors import GaitRehabError, ModelFileError, UsageError
from features import extract_features, load_band, train_band, write_band
from gait_data import (
    PLANTED_MODES,
    GaitCycle,
    SynthParams,
    load_recording,
    segment_cycles,
    sidecar_path,
    synthesize_recording,
    write_recording,
    write_sidecar,
)
from log import get_logger, setup_logging
from mapping import identify, load_map, render_residual_table, residual_stats, split_holdout, write_map
from restoration import (
    LowerCurves,
    build_reference_set,
    cluster_features,
    load_references,
    select_representative,
    write_references,
)
from simulation import (
    MANIFEST_NAME,
    REPORT_NAME,
    ErrorReport,
    compare_emissions,
    load_manifest,
    load_trajectory,
    plot_coordination,
    plot_feature_distribution,
    plot_restoration,
    run_pipeline,
    write_manifest,
    write_trajectory,
)

logger = get_logger("gait_rehab")

PROG = "gait-rehab"
_FLAG = re.compile(r"--[\w-]+")


class _ArgumentParser(argparse.ArgumentParser):
    """用法错误抛出 UsageError（带出错参数名），而不是直接退出"""

    def error(self, message: str):
        match = _FLAG.search(message)
        raise UsageError(message, flag=match.group(0) if match else "")


def _require(value: Optional[Any], fallback: Optional[Any], flag: str) -> Any:
    """命令行值优先，其次配置文件 paths 节

    Raises:
        UsageError: 两者都没有
    """
    if value is not None:
        return value
    if fallback is not None:
        return fallback
    raise UsageError(f"{flag} is required", flag=flag)


# ==================== 子命令 ====================

def cmd_synth(args: argparse.Namespace, config: RunConfig) -> int:
    """生成合成记录；--experiments 额外按 experiment_seeds 生成实验记录"""
    out = Path(_require(args.out, config.paths.recording, "--out"))
    synth = config.synth
    params = SynthParams(
        n_cycles=synth.n_cycles,
        base_period=synth.base_period,
        sample_rate=synth.sample_rate,
        period_jitter=synth.period_jitter,
        amplitude_jitter=synth.amplitude_jitter,
        noise_std=synth.noise_std,
        spike_rate=synth.spike_rate,
        modes=PLANTED_MODES[:args.modes],
        upper_phase_lead=args.upper_phase_lead,
        seed=synth.seed,
    )

    targets: List[Tuple[Path, SynthParams]] = [(out, params)]
    if args.experiments:
        for i, seed in enumerate(synth.experiment_seeds, 1):
            path = out.with_name(f"{out.stem}_exp{i}{out.suffix}")
            targets.append((path, dataclasses.replace(params, seed=seed)))

    for path, p in targets:
        result = synthesize_recording(p)
        write_recording(result.recording, path)
        write_sidecar(result.truths, sidecar_path(path))
        logger.info("recording written", path=str(path), seed=p.seed, cycles=len(result.truths))
    return 0


def cmd_identify(args: argparse.Namespace, config: RunConfig) -> int:
    """辨识滤波器、线性映射与参考集并写出三个模型文件"""
    paths = config.paths
    rec = _require(args.rec, paths.recording, "--rec")
    out_map = _require(args.out_map, paths.map, "--out-map")
    out_band = _require(args.out_band, paths.band, "--out-band")
    out_refs = _require(args.out_refs, paths.refs, "--out-refs")

    recording = load_recording(rec)
    cycles = segment_cycles(recording, config.segmentation)
    band = train_band(cycles, config.features)
    features = extract_features(cycles, band, config.features)

    train_x, train_y, test_x, test_y = split_holdout(
        features.upper, features.lower, config.mapping.holdout, config.mapping.holdout_seed
    )
    linear_map, stats = identify(train_x, train_y, config.mapping.rank_threshold)
    print(render_residual_table(stats, "Training residual"), file=sys.stderr)
    if len(test_x) >= 2:
        held = residual_stats(linear_map, test_x, test_y)
        print(render_residual_table(held, "Holdout residual"), file=sys.stderr)
        logger.info("holdout evaluated", m=held.m, residual_std=[round(s, 4) for s in held.std])
    elif test_x:
        logger.warning("holdout too small for statistics", m=len(test_x))

    restoration = config.restoration
    model = cluster_features(
        features.upper,
        features.lower,
        k=restoration.k,
        seed=restoration.seed,
        space=restoration.cluster_space,
        max_iter=restoration.max_iter,
        max_restarts=restoration.max_restarts,
    )
    raw = select_representative(model, features.lower, features.cycles)
    refs = build_reference_set(raw, restoration.fit_order)

    write_band(band, out_band)
    write_map(linear_map, out_map)
    write_references(refs, out_refs)
    logger.info(
        "models written",
        cycles=len(cycles),
        featured=len(features),
        skipped=len(features.skipped),
        condition_number=round(refs.condition_number, 2),
    )
    return 0


def cmd_simulate(args: argparse.Namespace, config: RunConfig) -> int:
    """对每条记录（一次实验）运行流水线，写出轨迹与运行清单"""
    paths = config.paths
    recs = args.rec or ([paths.recording] if paths.recording else None)
    recs = _require(recs, None, "--rec")
    band_path = _require(args.band, paths.band, "--band")
    map_path = _require(args.map, paths.map, "--map")
    refs_path = _require(args.refs, paths.refs, "--refs")
    out_dir = Path(_require(args.out_dir, paths.out_dir, "--out-dir"))

    band = load_band(band_path)
    linear_map = load_map(map_path)
    refs = load_references(refs_path)

    experiments: List[Dict[str, Any]] = []
    for i, rec in enumerate(recs, 1):
        name = f"experiment{i}"
        output = run_pipeline(load_recording(rec), band, linear_map, refs, config)
        trajectory = write_trajectory(output, out_dir / f"trajectory_{name}.csv")
        experiments.append({
            "name": name,
            "recording": str(rec),
            "trajectory": trajectory.name,
            "cycles": len(output.cycles),
            "emitted": len(output.outputs),
            "skipped": list(output.skipped),
            "held": list(output.held),
        })

    write_manifest(out_dir / MANIFEST_NAME, {
        "band": str(band_path),
        "map": str(map_path),
        "refs": str(refs_path),
        "config": config.model_dump(mode="json"),
        "experiments": experiments,
    })
    logger.info("simulation written", out_dir=str(out_dir), experiments=len(experiments))
    return 0


def _run_config(manifest: Dict[str, Any], path: Path) -> RunConfig:
    try:
        return RunConfig(**manifest.get("config", {}))
    except ValidationError as e:
        raise ModelFileError(f"{path}: invalid config section: {e}") from e


def _experiments(out_dir: Path) -> Tuple[Dict[str, Any], RunConfig, List[Tuple[str, List[GaitCycle], Dict[int, LowerCurves], int]]]:
    """读取运行清单并重建每次实验的输入周期与输出曲线"""
    manifest_path = out_dir / MANIFEST_NAME
    manifest = load_manifest(manifest_path)
    config = _run_config(manifest, manifest_path)
    loaded = []
    for exp in manifest["experiments"]:
        cycles = segment_cycles(load_recording(exp["recording"]), config.segmentation)
        emitted = load_trajectory(out_dir / exp["trajectory"])
        loaded.append((exp["name"], cycles, emitted, len(exp.get("skipped", []))))
    return manifest, config, loaded


def cmd_analyze(args: argparse.Namespace, config: RunConfig) -> int:
    """计算误差报告（相位误差、幅值误差、协调相位差）"""
    out_dir = Path(_require(args.out_dir, config.paths.out_dir, "--out-dir"))
    _, _, loaded = _experiments(out_dir)
    report = ErrorReport([
        compare_emissions(name, cycles, emitted, skipped)
        for name, cycles, emitted, skipped in loaded
    ])
    report.to_csv(out_dir / REPORT_NAME)
    print(report.render(), file=sys.stderr)
    return 0


def cmd_plot(args: argparse.Namespace, config: RunConfig) -> int:
    """为每次实验生成输出对比图、协调图与特征分布图"""
    out_dir = Path(_require(args.out_dir, config.paths.out_dir, "--out-dir"))
    manifest, run_config, loaded = _experiments(out_dir)
    band = load_band(manifest["band"])
    written = []
    for name, cycles, emitted, _ in loaded:
        written.append(plot_restoration(cycles, emitted, out_dir / f"restoration_{name}.svg", title=name))
        written.append(plot_coordination(cycles, emitted, out_dir / f"coordination_{name}.svg", title=name))
        features = extract_features(cycles, band, run_config.features)
        written.append(plot_feature_distribution(features, out_dir / f"features_{name}.svg", title=name))
    logger.info("figures written", out_dir=str(out_dir), count=len(written))
    return 0


# ==================== 参数 ====================

def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog=PROG,
        description="上肢驱动下肢的自助康复训练流水线",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    common = _ArgumentParser(add_help=False)
    common.add_argument('--config', help='YAML 配置文件（命令行参数优先）')
    common.add_argument('--log-level', help='日志级别 (DEBUG/INFO/WARNING/ERROR)')
    common.add_argument('--log-format', choices=['console', 'json'], help='日志格式')

    sub = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=_ArgumentParser)
    sub.required = True

    p = sub.add_parser('synth', parents=[common], help='生成合成记录')
    p.add_argument('--out', help='输出记录 CSV')
    p.add_argument('--seed', type=int, help='随机种子')
    p.add_argument('--cycles', type=int, help='完整周期数')
    p.add_argument('--noise-std', type=float, help='加性噪声标准差（度）')
    p.add_argument('--spike-rate', type=float, help='每周期每关节尖峰数')
    p.add_argument('--period-jitter', type=float, help='周期相对标准差')
    p.add_argument('--amplitude-jitter', type=float, help='幅值相对标准差')
    p.add_argument('--modes', type=int, default=0, choices=range(len(PLANTED_MODES) + 1),
                   help='植入的下肢运动模式数 (默认: 0)')
    p.add_argument('--upper-phase-lead', type=float, default=0.0,
                   help='上肢超前下肢的相位，周期比例 (默认: 0)')
    p.add_argument('--experiments', action='store_true',
                   help='按 experiment_seeds 额外生成实验记录 <out>_exp<i>.csv')
    p.set_defaults(handler=cmd_synth, overrides=lambda a: {
        "synth.seed": a.seed,
        "synth.n_cycles": a.cycles,
        "synth.noise_std": a.noise_std,
        "synth.spike_rate": a.spike_rate,
        "synth.period_jitter": a.period_jitter,
        "synth.amplitude_jitter": a.amplitude_jitter,
    })

    p = sub.add_parser('identify', parents=[common], help='辨识模型')
    p.add_argument('--rec', help='训练记录 CSV')
    p.add_argument('--out-map', help='输出映射文件')
    p.add_argument('--out-band', help='输出滤波器文件')
    p.add_argument('--out-refs', help='输出参考集文件')
    p.add_argument('--holdout', type=float, help='留出集比例 [0, 1)')
    p.add_argument('--k', type=int, help='KMeans 簇数')
    p.add_argument('--seed', type=int, help='KMeans 种子')
    p.add_argument('--fit-order', type=int, help='傅里叶阶数')
    p.add_argument('--q-low', type=float, help='变化率下百分位')
    p.add_argument('--q-high', type=float, help='变化率上百分位')
    p.add_argument('--grid-size', type=int, help='相位网格点数 N')
    p.add_argument('--cluster-space', choices=['paired', 'pooled'], help='聚类空间')
    p.set_defaults(handler=cmd_identify, overrides=lambda a: {
        "holdout": a.holdout,
        "k": a.k,
        "seed": a.seed,
        "fit_order": a.fit_order,
        "q_low": a.q_low,
        "q_high": a.q_high,
        "grid_size": a.grid_size,
        "cluster_space": a.cluster_space,
    })

    p = sub.add_parser('simulate', parents=[common], help='运行流水线')
    p.add_argument('--rec', action='append', help='实验记录 CSV（可重复，每条一次实验）')
    p.add_argument('--map', help='映射文件')
    p.add_argument('--band', help='滤波器文件')
    p.add_argument('--refs', help='参考集文件')
    p.add_argument('--out-dir', help='输出目录')
    p.add_argument('--nominal-period', type=float, help='输出曲线的固定周期（秒）')
    p.add_argument('--grid-size', type=int, help='相位网格点数 N')
    p.set_defaults(handler=cmd_simulate, overrides=lambda a: {
        "nominal_period": a.nominal_period,
        "grid_size": a.grid_size,
    })

    p = sub.add_parser('analyze', parents=[common], help='计算误差报告')
    p.add_argument('--out-dir', help='simulate 的输出目录')
    p.set_defaults(handler=cmd_analyze, overrides=lambda a: {})

    p = sub.add_parser('plot', parents=[common], help='生成 SVG 图')
    p.add_argument('--out-dir', help='simulate 的输出目录')
    p.set_defaults(handler=cmd_plot, overrides=lambda a: {})

    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.config and not Path(args.config).exists():
        raise UsageError(f"config file not found: {args.config}", flag="--config")
    config = ConfigLoader(args.config).load()
    overrides = args.overrides(args)
    overrides["log_level"] = args.log_level
    overrides["log_format"] = args.log_format
    return apply_overrides(config, overrides)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """命令行入口

    Returns:
        退出码：0 成功，1 用法错误，2 数据 / 模型错误
    """
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return e.exit_code
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = _load_config(args)
        settings = config.global_settings
        setup_logging(level=settings.log_level, format=settings.log_format, log_file=settings.log_file)
    except UsageError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"{PROG}: error: {e} (--log-level)", file=sys.stderr)
        return 1

    try:
        return args.handler(args, config)
    except GaitRehabError as e:
        logger.error("command failed", command=args.command, error=type(e).__name__, detail=str(e))
        print(f"{PROG}: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error("command failed", command=args.command, error=type(e).__name__, detail=str(e))
        print(f"{PROG}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
