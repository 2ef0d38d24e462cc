"""
SVG 차트 생성
궤적 차트 (붕괴 단계는 별도 축소 패널) 와 누적분포 차트
"""
import io
import logging
from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from common.utils import atomic_write  # noqa: E402
from engine.models import ClassificationReport, StabilityReport, Trajectory  # noqa: E402

logger = logging.getLogger(__name__)

# 같은 입력이면 같은 SVG 를 내도록 고정
plt.rcParams["svg.hashsalt"] = "econopt"
plt.rcParams["svg.fonttype"] = "none"


def _save_svg(fig, path: Union[str, Path]) -> Path:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return atomic_write(path, buf.getvalue())


def plot_trajectory(trajectory: Trajectory, report: StabilityReport, path: Union[str, Path]) -> Path:
    """
    제품별 궤적 선 그래프

    붕괴가 있으면 마지막 단계 (T-1 -> T) 는 크기 차이가 커서 오른쪽 패널에 따로 그린다.
    """
    values = trajectory.as_float()
    d = values.shape[1]
    labels = trajectory.labels or [f"p{i + 1}" for i in range(d)]
    steps = list(range(values.shape[0]))
    T = report.collapse_time

    if T is not None and T >= 1:
        fig, (main, tail) = plt.subplots(1, 2, figsize=(10, 4), gridspec_kw={"width_ratios": [3, 1]})
    else:
        fig, main = plt.subplots(figsize=(8, 4))
        tail = None

    head = T if T is not None else len(steps)
    for k in range(d):
        main.plot(steps[:head], values[:head, k], marker="o", markersize=3, label=labels[k])
        if tail is not None:
            tail.plot(steps[T - 1:T + 1], values[T - 1:T + 1, k], marker="o", markersize=3)
    main.set_xlabel("step")
    main.set_ylabel("quantity")
    main.set_title(f"{trajectory.space.value} trajectory")
    main.legend(loc="upper left", fontsize="small")
    if report.crisis_window is not None:
        start, end = report.crisis_window
        main.axvspan(start - 0.5, end + 0.5, color="orange", alpha=0.15)
    if tail is not None:
        tail.axhline(0.0, color="grey", linewidth=0.8)
        tail.set_title(f"collapse T = {T}")
        tail.set_xticks([T - 1, T])
    fig.tight_layout()
    logger.debug(f"궤적 차트 저장: {path}")
    return _save_svg(fig, path)


def plot_cumulative(report: ClassificationReport, path: Union[str, Path]) -> Path:
    """누적분포 계단 그래프와 두 임계값 선"""
    positions = list(range(1, len(report.cumulative) + 1))
    theta_weak, theta_pillar = report.thresholds
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.step(positions, report.cumulative, where="post", marker="o", markersize=3)
    ax.axhline(theta_weak, color="tab:red", linestyle="--", linewidth=0.8, label=f"weak <= {theta_weak}")
    ax.axhline(theta_pillar, color="tab:green", linestyle="--", linewidth=0.8, label=f"pillar >= {theta_pillar}")
    if report.weak:
        ax.axvline(len(report.weak) + 0.5, color="tab:red", linewidth=0.8)
    if report.pillar:
        ax.axvline(len(positions) - len(report.pillar) + 0.5, color="tab:green", linewidth=0.8)
    ax.set_xticks(positions)
    ax.set_xticklabels([report.labels[i] for i in report.ascending_order], rotation=90, fontsize="small")
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("cumulative")
    ax.legend(loc="upper left", fontsize="small")
    fig.tight_layout()
    logger.debug(f"누적분포 차트 저장: {path}")
    return _save_svg(fig, path)
