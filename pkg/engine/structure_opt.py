"""
구조 최적화 모듈
목표 평형 u_tilde 를 갖는 최적 구조행렬 구성과 불변성 검증
"""
import logging
from typing import Optional

import numpy as np

from common.exceptions import DomainError
from common.models import NumericMode, Space
from common.numeric import to_float, to_mode
from engine.chen_transform import STOCHASTIC_TOLERANCE, chen_transform, dual_chain, triple_residual
from engine.matrix_core import MatrixLike, _entries
from engine.models import EigenTriple, OptimizationResult, StructureMatrix
from engine.stability import DEFAULT_DET_FLOOR, collapse_report, iterate

logger = logging.getLogger(__name__)

INVARIANCE_TOLERANCE = 1e-9


def transport(x, w, inverse: bool = False) -> np.ndarray:
    """
    행벡터 공간 이동 x_tilde = x (.) w (역방향은 x_tilde (.) w^-1)
    """
    vector, weights = to_float(x), to_float(w)
    if vector.shape != weights.shape:
        raise DomainError("x, w 의 길이가 다릅니다")
    if np.any(weights <= 0):
        raise DomainError("w 는 모든 성분이 양수여야 합니다")
    return vector / weights if inverse else vector * weights


def optimize_structure(A_alpha: MatrixLike, triple: EigenTriple, u_tilde) -> OptimizationResult:
    """
    목표 왼쪽 고유벡터 u_tilde 를 갖는 구조행렬

    w = u_tilde (.) u^-1 로 A_tilde = D_w^-1 A_alpha D_w 를 만든다.
    rho 는 보존되며 v_tilde = v (.) u (.) u_tilde^-1 이다.

    Args:
        A_alpha: 구조행렬 (소비 포함 가능)
        triple: A_alpha 의 고유 삼중쌍
        u_tilde: 목표 평형 (모든 성분 양수)
    """
    M = to_float(_entries(A_alpha))
    target = to_float(u_tilde)
    if target.shape != (triple.dim,):
        raise DomainError(f"u_tilde 의 길이가 {triple.dim} 이어야 합니다")
    if np.any(target <= 0):
        raise DomainError("u_tilde 는 모든 성분이 양수여야 합니다")
    if triple_residual(M, triple) > STOCHASTIC_TOLERANCE:
        raise DomainError("고유 삼중쌍이 A_alpha 와 일치하지 않습니다")

    w = target / triple.u
    A_tilde = M * w[None, :] / w[:, None]
    v_tilde = triple.v * triple.u / target
    labels = A_alpha.labels if isinstance(A_alpha, StructureMatrix) else [f"p{i + 1}" for i in range(triple.dim)]
    logger.info(f"최적 구조행렬 구성: w 범위 [{w.min():.6g}, {w.max():.6g}]")
    return OptimizationResult(A_tilde=StructureMatrix(entries=A_tilde, labels=labels),
                              u_tilde=target, v_tilde=v_tilde, w=w, rho=triple.rho)


def result_triple(result: OptimizationResult) -> EigenTriple:
    """최적 구조행렬의 정규화된 고유 삼중쌍 (sum(v) = d, u.v = 1)"""
    d = result.u_tilde.shape[0]
    v = result.v_tilde * (d / result.v_tilde.sum())
    u = result.u_tilde / float(result.u_tilde @ v)
    residual = triple_residual(result.A_tilde, EigenTriple(rho=result.rho, u=u, v=v))
    return EigenTriple(rho=result.rho, u=u, v=v, residual=residual)


def invariance_check(A_alpha: MatrixLike, result: OptimizationResult, triple: EigenTriple,
                     tolerance: float = INVARIANCE_TOLERANCE) -> bool:
    """최적 구조행렬의 전이행렬이 원래 전이행렬과 같은지 (P_tilde = P)"""
    original = chen_transform(A_alpha, triple)
    optimized = chen_transform(result.A_tilde, result_triple(result))
    gap = float(np.max(np.abs(original.P - optimized.P)))
    logger.debug(f"전이행렬 불변성 편차: {gap:.3e}")
    return gap <= tolerance


def dual_invariance_check(A_alpha: MatrixLike, result: OptimizationResult, triple: EigenTriple,
                          tolerance: float = INVARIANCE_TOLERANCE) -> bool:
    """최적 구조행렬의 쌍대 전이행렬이 원래 쌍대 전이행렬과 같은지 (Q_u_tilde = Q_u)"""
    original = dual_chain(A_alpha, triple)
    optimized = dual_chain(result.A_tilde, result_triple(result))
    gap = float(np.max(np.abs(original.Q - optimized.Q)))
    logger.debug(f"쌍대 전이행렬 불변성 편차: {gap:.3e}")
    return gap <= tolerance


def shared_stability_check(A_alpha: MatrixLike, result: OptimizationResult, triple: EigenTriple,
                           x0, n_max: int, mode: Optional[NumericMode] = None,
                           det_floor: float = DEFAULT_DET_FLOOR) -> bool:
    """
    A_alpha, A_tilde, P_alpha 세 수열의 붕괴 시각과 붕괴 제품이 모두 같은지 확인

    A_tilde 는 x0 (.) w 에서, P_alpha 는 x0 (.) v 에서 시작한다.
    """
    exact = isinstance(A_alpha, StructureMatrix) and A_alpha.is_exact
    mode = mode or (NumericMode.exact() if exact else NumericMode.floating())
    floating = NumericMode.floating()
    start = to_float(to_mode(x0, mode))

    report_a = collapse_report(iterate(A_alpha, x0, n_max, mode, det_floor), rho=triple.rho)
    report_tilde = collapse_report(
        iterate(result.A_tilde, transport(start, result.w), n_max, floating, det_floor), rho=result.rho)
    chain = chen_transform(A_alpha, triple)
    report_p = collapse_report(
        iterate(chain.P, start * triple.v, n_max, floating, det_floor, space=Space.P_SPACE), rho=1.0)

    indices = {(r.collapse_time, r.collapse_product) for r in (report_a, report_tilde, report_p)}
    if len(indices) != 1:
        logger.info(f"공유 안정성 불일치: {sorted(indices, key=str)}")
    return len(indices) == 1
