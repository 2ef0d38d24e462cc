"""
제품 순위 및 분류 모듈
평형 mu 기준 순위, 누적분포 기준 취약/중간/기간 제품 분류
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from common.exceptions import ConfigurationError
from engine.models import ClassificationReport, RankingReport, TransitionChain

logger = logging.getLogger(__name__)

DEFAULT_THETA_WEAK = 0.05
DEFAULT_THETA_PILLAR = 0.50
DEFAULT_THETA_WEAK_CORE = 0.01
# 누적합 부동소수 오차 허용
CUMULATIVE_TOLERANCE = 1e-12


def _labels(chain: TransitionChain, labels: Optional[List[str]]) -> List[str]:
    if labels is None:
        return [f"p{i + 1}" for i in range(chain.dim)]
    if len(labels) != chain.dim:
        raise ConfigurationError(f"라벨 수 {len(labels)} 가 제품 수 {chain.dim} 과 다릅니다")
    return list(labels)


def rank_products(chain: TransitionChain, labels: Optional[List[str]] = None) -> RankingReport:
    """
    mu 내림차순 제품 순위 (동률은 인덱스 오름차순)

    equilibrium_multiples 는 mu_i / mean(mu) 이다.
    """
    mu = chain.mu
    order = sorted(range(chain.dim), key=lambda i: (-mu[i], i))
    multiples = mu / mu.mean()
    return RankingReport(order=order, values=mu.tolist(), equilibrium_multiples=multiples.tolist(),
                         labels=_labels(chain, labels))


def _check_thresholds(theta_weak: float, theta_pillar: float) -> None:
    if not 0 < theta_weak < theta_pillar <= 1:
        raise ConfigurationError(
            f"임계값은 0 < theta_weak < theta_pillar <= 1 이어야 합니다: ({theta_weak}, {theta_pillar})")


def classify(chain: TransitionChain, theta_weak: float = DEFAULT_THETA_WEAK,
             theta_pillar: float = DEFAULT_THETA_PILLAR,
             labels: Optional[List[str]] = None) -> ClassificationReport:
    """
    pi 누적분포로 제품 분류

    Args:
        chain: 전이행렬 (pi 사용)
        theta_weak: 누적합이 이 값 이하인 위치는 취약 제품
        theta_pillar: 누적합이 처음 이 값 이상이 되는 위치부터 기간 제품

    Returns:
        ClassificationReport: weak / intermediate / pillar 는 제품 인덱스를 오름차순 위치 순서로 담는다
    """
    _check_thresholds(theta_weak, theta_pillar)
    pi = chain.pi
    ascending = sorted(range(chain.dim), key=lambda i: (pi[i], i))
    cumulative = np.cumsum(pi[ascending])

    weak_positions = [p for p, c in enumerate(cumulative) if c <= theta_weak + CUMULATIVE_TOLERANCE]
    first_pillar = next((p for p, c in enumerate(cumulative) if c >= theta_pillar - CUMULATIVE_TOLERANCE),
                        chain.dim)
    weak = [ascending[p] for p in weak_positions]
    pillar = [ascending[p] for p in range(first_pillar, chain.dim)]
    assigned = set(weak) | set(pillar)
    intermediate = [i for i in ascending if i not in assigned]

    logger.info(f"제품 분류 완료: 취약 {len(weak)}, 중간 {len(intermediate)}, 기간 {len(pillar)}")
    return ClassificationReport(
        ascending_order=ascending,
        cumulative=cumulative.tolist(),
        weak=weak,
        intermediate=intermediate,
        pillar=pillar,
        thresholds=(theta_weak, theta_pillar),
        labels=_labels(chain, labels),
    )


def cumulative_curve(chain: TransitionChain) -> List[Tuple[int, float]]:
    """(순위 위치 1..d, 누적 확률) 목록"""
    ascending = np.sort(chain.pi, kind="stable")
    return [(position, float(mass)) for position, mass in enumerate(np.cumsum(ascending), start=1)]


def refine_weak(report: ClassificationReport, theta_core: float = DEFAULT_THETA_WEAK_CORE) -> List[int]:
    """누적합이 theta_core 이하인 핵심 취약 제품"""
    if not 0 < theta_core < report.thresholds[0]:
        raise ConfigurationError(f"theta_core 는 (0, theta_weak) 범위여야 합니다: {theta_core}")
    return [report.ascending_order[p] for p, c in enumerate(report.cumulative)
            if c <= theta_core + CUMULATIVE_TOLERANCE]
