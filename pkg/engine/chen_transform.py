"""
Chen 변환 모듈
구조행렬 A 를 전이확률행렬 P (및 쌍대 Q) 로 바꾸고, 불변 행렬족과 복소 일반화 변환을 제공한다
"""
import logging
from typing import Union

import numpy as np

from common.exceptions import DomainError
from common.numeric import as_fraction, is_exact_array, to_float
from engine.matrix_core import MatrixLike, _entries
from engine.models import DualChain, EigenTriple, TransitionChain

logger = logging.getLogger(__name__)

# 확률행렬 판정 허용오차 (v 자체의 솔버 오차를 감안해 솔버 허용오차의 100배)
STOCHASTIC_TOLERANCE = 1e-10


def triple_residual(A: MatrixLike, triple: EigenTriple) -> float:
    """max(||uA - rho u||inf / (rho ||u||inf), ||Av - rho v||inf / (rho ||v||inf))"""
    M = to_float(_entries(A))
    rho, u, v = triple.rho, triple.u, triple.v
    left = np.max(np.abs(u @ M - rho * u)) / (rho * np.max(np.abs(u)))
    right = np.max(np.abs(M @ v - rho * v)) / (rho * np.max(np.abs(v)))
    return float(max(left, right))


def _check_triple(A: MatrixLike, triple: EigenTriple, tolerance: float) -> np.ndarray:
    M = to_float(_entries(A))
    if M.shape != (triple.dim, triple.dim):
        raise DomainError(f"고유 삼중쌍 차원 {triple.dim} 이 행렬 차원 {M.shape[0]} 과 다릅니다")
    residual = triple_residual(M, triple)
    if residual > tolerance:
        raise DomainError(f"고유 삼중쌍 잔차 {residual:.3e} 가 허용오차 {tolerance:.1e} 를 넘었습니다")
    return M


def _positive_weights(w, exact: bool) -> np.ndarray:
    if exact:
        weights = np.empty(len(w), dtype=object)
        weights[:] = [as_fraction(c) for c in w]
    else:
        weights = to_float(w)
    if not all(component > 0 for component in weights):
        raise DomainError("w 는 모든 성분이 양수여야 합니다")
    return weights


def chen_transform(A: MatrixLike, triple: EigenTriple,
                   tolerance: float = STOCHASTIC_TOLERANCE) -> TransitionChain:
    """
    Chen 변환 P = D_v^-1 (A / rho) D_v

    Args:
        A: 구조행렬
        triple: A 의 고유 삼중쌍
        tolerance: 삼중쌍 잔차 허용오차

    Returns:
        TransitionChain: P, mu = u (.) v, pi = mu / (u.v)
    """
    M = _check_triple(A, triple, tolerance)
    v = triple.v
    P = M * v[None, :] / (triple.rho * v[:, None])
    mu = triple.equilibrium
    pi = mu / float(triple.u @ triple.v)
    pi = pi / pi.sum()
    chain = TransitionChain(P=P, mu=mu, pi=pi, source_rho=triple.rho, source=triple)
    logger.info(f"Chen 변환 완료: d={chain.dim}, 최대 행합 편차={chain.max_row_deviation():.2e}")
    return chain


def similarity_transform(A: MatrixLike, rho, w) -> np.ndarray:
    """
    A_w = D_w^-1 (A / rho) D_w

    w 가 v 에 비례할 때에만 행 확률 행렬이 된다.
    """
    entries = _entries(A)
    exact = is_exact_array(entries) and not isinstance(rho, float)
    weights = _positive_weights(w, exact)
    scale = as_fraction(rho) if exact else float(rho)
    if scale <= 0:
        raise DomainError("rho 는 양수여야 합니다")
    base = entries if exact else to_float(entries)
    return base * weights[None, :] / (scale * weights[:, None])


def is_row_stochastic(M, tolerance: float = STOCHASTIC_TOLERANCE) -> bool:
    entries = np.asarray(M)
    if is_exact_array(entries):
        return all(sum(row) == 1 for row in entries) and all(x >= 0 for x in entries.ravel())
    values = to_float(entries)
    return bool(np.all(values >= 0) and np.max(np.abs(values.sum(axis=1) - 1.0)) <= tolerance)


def is_column_stochastic(M, tolerance: float = STOCHASTIC_TOLERANCE) -> bool:
    return is_row_stochastic(np.asarray(M).T, tolerance)


def dual_chain(A: MatrixLike, triple: EigenTriple,
               tolerance: float = STOCHASTIC_TOLERANCE) -> DualChain:
    """
    쌍대 전이행렬 Q = D_u (A / rho) D_u^-1 (열 확률 행렬, 오른쪽 평형 u (.) v)
    """
    M = _check_triple(A, triple, tolerance)
    u = triple.u
    Q = u[:, None] * M / (triple.rho * u[None, :])
    return DualChain(Q=Q, equilibrium=triple.equilibrium)


def inverse_chen(M, w, dual: bool = False, tolerance: float = STOCHASTIC_TOLERANCE) -> np.ndarray:
    """
    불변 행렬족의 원소 복원

    Args:
        M: 행 확률 행렬 P (dual 이면 열 확률 행렬 Q)
        w: 양의 d-벡터
        dual: True 면 A_w = D_w^-1 Q D_w, 아니면 A_w = D_w P D_w^-1

    Returns:
        rho(A_w) = 1 이고 w 가 최대 오른쪽(쌍대면 왼쪽) 고유벡터인 행렬
    """
    entries = np.asarray(M)
    stochastic = is_column_stochastic(entries, tolerance) if dual else is_row_stochastic(entries, tolerance)
    if not stochastic:
        kind = "열" if dual else "행"
        raise DomainError(f"inverse_chen: 입력이 {kind} 확률 행렬이 아닙니다")
    exact = is_exact_array(entries)
    weights = _positive_weights(w, exact)
    base = entries if exact else to_float(entries)
    if dual:
        return base * weights[None, :] / weights[:, None]
    return weights[:, None] * base / weights[None, :]


def generalized_transform(A, lam: complex, v) -> np.ndarray:
    """
    복소 일반화 변환 R_v = D_v^-1 (A / lambda) D_v

    (lambda, v) 가 A 의 오른쪽 고유쌍이면 R_v 의 모든 행합이 1 이다.
    """
    matrix = np.asarray(A, dtype=complex)
    vector = np.asarray(v, dtype=complex)
    if lam == 0:
        raise DomainError("lambda 는 0 이 아니어야 합니다")
    if vector.shape != (matrix.shape[0],):
        raise DomainError(f"v 의 길이가 {matrix.shape[0]} 이어야 합니다")
    if np.any(vector == 0):
        raise DomainError("v 의 모든 성분이 0 이 아니어야 합니다")
    return matrix * vector[None, :] / (complex(lam) * vector[:, None])


def wave_probability(v) -> np.ndarray:
    """pi_k = |v_k|^2 / ||v||^2"""
    vector = np.asarray(v, dtype=complex)
    density = np.abs(vector) ** 2
    total = density.sum()
    if total == 0:
        raise DomainError("영벡터에는 확률분포가 정의되지 않습니다")
    return density / total


def ergodic_gap(chain: TransitionChain, n: int) -> float:
    """max_ij |(P^n)_ij - pi_j|"""
    if n < 0:
        raise DomainError("n 은 0 이상이어야 합니다")
    power = np.linalg.matrix_power(chain.P, n)
    return float(np.max(np.abs(power - chain.pi[None, :])))


def stationary_residual(chain: TransitionChain, n: int) -> float:
    """max_{1<=k<=n} ||pi P^k - pi||inf"""
    row = chain.pi.copy()
    worst = 0.0
    for _ in range(n):
        row = row @ chain.P
        worst = max(worst, float(np.max(np.abs(row - chain.pi))))
    return worst


def scaled_equilibrium(values: Union[np.ndarray, list], index: int = -1, target: float = 20.0) -> np.ndarray:
    """성분 index 가 target 이 되도록 배율 조정 (보고용)"""
    vector = to_float(values)
    if vector[index] == 0:
        raise DomainError("기준 성분이 0 입니다")
    return vector * (target / vector[index])
