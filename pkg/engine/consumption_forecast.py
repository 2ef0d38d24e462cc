"""
소비 예측 모듈
소비를 포함한 모형 (Chen 모형, Hua 모형 세 가지), 성장률 <-> 소비 파라미터 변환, 소비 가능성 탐색
"""
import logging
import math
from typing import List, NamedTuple, Optional

import numpy as np

from common.exceptions import AbnormalEconomyError, ConvergenceError, DomainError
from common.models import NumericMode, SolverConfig
from common.numeric import as_fraction, identity, inverse, to_float, to_mode
from engine.eigensolver import eigentriple
from engine.matrix_core import MatrixLike, _entries
from engine.models import (ConsumptionPlan, EigenTriple, FeasibilityResult, ForecastStep,
                           StructureMatrix, TransitionChain)

logger = logging.getLogger(__name__)

BISECTION_TOLERANCE = 1e-12
BISECTION_MAX_STEPS = 200
# 열린 구간 (0, 1) 의 상단 탐색점
ALPHA_CEILING = 1.0 - 1e-9
IDENTITY_TOLERANCE = 1e-9


class HuaInverseModel(NamedTuple):
    B: np.ndarray
    growth_rate: float


def _require_normal(rho: float) -> None:
    if rho >= 1:
        raise AbnormalEconomyError(f"rho(A) = {rho} >= 1: 경제 시스템이 비정상입니다")


def _check_alpha(alpha) -> None:
    if not 0 <= alpha < 1:
        raise DomainError(f"alpha 는 [0, 1) 범위여야 합니다: {alpha}")


def _check_delta(delta: float, rho: float) -> None:
    _require_normal(rho)
    upper = min(1.0, 1.0 / rho - 1.0)
    if not 0 < delta < upper:
        raise DomainError(f"delta 는 (0, {upper:.6g}) 범위여야 합니다: {delta}")


def _rho_of(A: MatrixLike, rho: Optional[float]) -> float:
    if rho is not None:
        return float(rho)
    return eigentriple(A, SolverConfig()).rho


def _as_structure(A: MatrixLike) -> StructureMatrix:
    if isinstance(A, StructureMatrix):
        return A
    entries = np.asarray(A)
    return StructureMatrix(entries=entries, labels=[f"p{i + 1}" for i in range(entries.shape[0])])


def chen_alpha_matrix(A: MatrixLike, alpha) -> StructureMatrix:
    """
    Chen 모형 A_alpha = (1 - alpha) A + alpha I

    A_alpha 는 A 와 같은 최대 고유벡터를 갖고 rho(A_alpha) = (1 - alpha) rho(A) + alpha 이다.
    """
    _check_alpha(alpha)
    matrix = _as_structure(A)
    if matrix.is_exact:
        a = as_fraction(alpha)
        entries = (1 - a) * matrix.entries + a * identity(matrix.dim, exact=True)
    else:
        a = float(alpha)
        entries = (1 - a) * matrix.entries + a * np.eye(matrix.dim)
    return matrix.with_entries(entries)


def hua_gamma_matrix(A: MatrixLike, gamma) -> StructureMatrix:
    """Hua 모형 A_gamma = (A + gamma I) / (1 + gamma)"""
    if not gamma > 0:
        raise DomainError(f"gamma 는 양수여야 합니다: {gamma}")
    matrix = _as_structure(A)
    if matrix.is_exact:
        g = as_fraction(gamma)
        entries = (matrix.entries + g * identity(matrix.dim, exact=True)) / (1 + g)
    else:
        g = float(gamma)
        entries = (matrix.entries + g * np.eye(matrix.dim)) / (1 + g)
    return matrix.with_entries(entries)


def hua_gamma_growth_rate(rho: float, gamma: float) -> float:
    """
    A_gamma 의 성장률 (1 - rho) / (gamma + rho)

    gamma 가 1 에 가까워져도 (1 - rho) / (1 + rho) 위에 머문다.
    """
    _require_normal(rho)
    if not gamma > 0:
        raise DomainError(f"gamma 는 양수여야 합니다: {gamma}")
    return (1 - rho) / (gamma + rho)


def hua_inverse_growth_rate(rho: float, alpha: float) -> float:
    """(1 - alpha) / rho + alpha - 1"""
    _check_alpha(alpha)
    return (1 - alpha) / rho + alpha - 1


def hua_inverse_model(A: MatrixLike, alpha, rho: Optional[float] = None,
                      mode: Optional[NumericMode] = None, det_floor: float = 0.0) -> HuaInverseModel:
    """
    Hua 역행렬 모형 B = (1 - alpha) A^-1 + alpha I

    B 는 일반적으로 비음 행렬이 아니다.

    Raises:
        SingularMatrixError: A 가 가역이 아닌 경우
    """
    _check_alpha(alpha)
    matrix = _as_structure(A)
    mode = mode or (NumericMode.exact() if matrix.is_exact else NumericMode.floating())
    entries = to_mode(matrix.entries, mode)
    a = as_fraction(alpha) if mode.is_exact else float(alpha)
    B = (1 - a) * inverse(entries, mode, det_floor) + a * identity(matrix.dim, mode.is_exact)
    rate = hua_inverse_growth_rate(_rho_of(matrix, rho), float(alpha))
    return HuaInverseModel(B=B, growth_rate=rate)


def hua_inverse_iterate(A: MatrixLike, y0, alpha, n: int,
                        mode: Optional[NumericMode] = None) -> List[np.ndarray]:
    """y_k = y_{k-1} B, k = 1..n (y_0 포함 n + 1 개)"""
    if n < 0:
        raise DomainError("n 은 0 이상이어야 합니다")
    model = hua_inverse_model(A, alpha, mode=mode)
    exact = model.B.dtype == object
    y = to_mode(y0, NumericMode.exact() if exact else NumericMode.floating())
    steps = [y]
    for _ in range(n):
        y = y @ model.B
        steps.append(y)
    return steps


def transformed_alpha_chain(chain: TransitionChain, alpha: float, rho_A: float) -> TransitionChain:
    """
    P_alpha = (1 - beta) P + beta I, beta = alpha / rho(A_alpha)

    A_alpha 의 Chen 변환과 같으며 mu, pi 는 P 와 동일하다.
    """
    _check_alpha(alpha)
    rho_alpha = (1 - alpha) * rho_A + alpha
    beta = alpha / rho_alpha
    P_alpha = (1 - beta) * chain.P + beta * np.eye(chain.dim)
    source = None
    if chain.source is not None:
        source = EigenTriple(rho=rho_alpha, u=chain.source.u, v=chain.source.v,
                             residual=chain.source.residual)
    return TransitionChain(P=P_alpha, mu=chain.mu, pi=chain.pi, source_rho=rho_alpha, source=source)


def delta_from_alpha(alpha: float, rho: float) -> float:
    """delta(alpha) = 1 / ((1 - alpha) rho + alpha) - 1"""
    _require_normal(rho)
    _check_alpha(alpha)
    return 1.0 / ((1 - alpha) * rho + alpha) - 1.0


def alpha_from_delta(delta: float, rho: float) -> float:
    """alpha(delta) = ((1 + delta)^-1 - rho) / (1 - rho)"""
    _check_delta(delta, rho)
    return (1.0 / (1.0 + delta) - rho) / (1.0 - rho)


def gamma_from_delta(delta: float, rho: float) -> float:
    """gamma(delta) = ((1 + delta)^-1 - rho) / (1 - (1 + delta)^-1)"""
    _check_delta(delta, rho)
    shrink = 1.0 / (1.0 + delta)
    return (shrink - rho) / (1.0 - shrink)


def available_consumption(x_n, x_n1, delta: float, rho: float) -> np.ndarray:
    """
    가용 소비 xi_n = ((1 - (1 + delta) rho) / delta) (x_{n+1} - x_n)

    계수는 gamma(delta) 와 대수적으로 같으며 두 값이 일치하는지 확인한다.
    """
    _check_delta(delta, rho)
    coefficient = (1.0 - (1.0 + delta) * rho) / delta
    gamma = gamma_from_delta(delta, rho)
    if not math.isclose(coefficient, gamma, rel_tol=IDENTITY_TOLERANCE, abs_tol=IDENTITY_TOLERANCE):
        raise DomainError(f"소비 계수 불일치: {coefficient} != gamma(delta) = {gamma}")
    current, following = to_float(x_n), to_float(x_n1)
    if current.shape != following.shape:
        raise DomainError("x_n, x_{n+1} 의 길이가 다릅니다")
    return coefficient * (following - current)


def _next_step(A: np.ndarray, x_n: np.ndarray, alpha: float) -> np.ndarray:
    d = A.shape[0]
    A_alpha = (1 - alpha) * A + alpha * np.eye(d)
    return np.linalg.solve(A_alpha.T, x_n)


def consumption_at(A: MatrixLike, x_n, alpha: float) -> np.ndarray:
    """xi_n(alpha) = gamma (x_{n+1} - x_n), x_n = x_{n+1} A_alpha"""
    _check_alpha(alpha)
    M = to_float(_entries(A))
    current = to_float(x_n)
    following = _next_step(M, current, alpha)
    return (alpha / (1 - alpha)) * (following - current)


def forecast_step(A: MatrixLike, x_n, delta: float, rho: Optional[float] = None) -> ForecastStep:
    """
    성장률 우선 계획: delta -> alpha(delta) -> A_alpha -> x_{n+1} -> xi_n
    """
    rho = _rho_of(A, rho)
    alpha = alpha_from_delta(delta, rho)
    plan = ConsumptionPlan.from_alpha(alpha, rho)
    current = to_float(x_n)
    following = _next_step(to_float(_entries(A)), current, alpha)
    consumption = available_consumption(current, following, delta, rho)
    logger.info(f"소비 예측: delta={delta}, alpha={alpha:.10g}, rho_alpha={plan.rho_alpha:.10g}")
    return ForecastStep(plan=plan, x_next=following, consumption=consumption)


def max_feasible_alpha(planned, x_n, A: MatrixLike, rho: Optional[float] = None,
                       tolerance: float = BISECTION_TOLERANCE) -> FeasibilityResult:
    """
    계획 소비를 성분별로 충족하는 최소 소비 파라미터

    xi_n(alpha) 가 alpha 에 대해 증가한다는 성질로 (0, 1) 구간을 이분 탐색한다.
    매 단계 구간 양 끝의 단조성을 확인하고, 어긋나면 탐색을 중단한다.

    Returns:
        FeasibilityResult: 충족 불가능하면 feasible=False
    """
    rho = _rho_of(A, rho)
    _require_normal(rho)
    target = to_float(planned)
    if np.any(target < 0):
        raise DomainError("계획 소비는 모든 성분이 0 이상이어야 합니다")
    if np.all(target <= 0):
        return FeasibilityResult(feasible=True, alpha_bar=0.0, delta=1.0 / rho - 1.0, iterations=0,
                                 message="계획 소비가 0 입니다")

    def meets(alpha: float) -> np.ndarray:
        return consumption_at(A, x_n, alpha)

    lo, hi = 0.0, ALPHA_CEILING
    xi_lo, xi_hi = np.zeros_like(target), meets(hi)
    if not np.all(xi_hi >= target):
        logger.info("계획 소비를 충족하는 alpha < 1 이 없습니다")
        return FeasibilityResult(feasible=False, iterations=0,
                                 message="alpha 가 1 에 가까워져도 계획 소비를 충족하지 못합니다")

    steps = 0
    while hi - lo > tolerance and steps < BISECTION_MAX_STEPS:
        steps += 1
        mid = 0.5 * (lo + hi)
        xi_mid = meets(mid)
        slack = 1e-9 * max(1.0, float(np.max(np.abs(xi_hi))))
        if np.any(xi_mid < xi_lo - slack) or np.any(xi_mid > xi_hi + slack):
            logger.warning(f"이분 탐색 단조성 위반: alpha={mid}")
            raise ConvergenceError(f"xi_n(alpha) 가 alpha={mid} 근처에서 단조 증가하지 않습니다",
                                   interval=(lo, hi), iterations=steps)
        if np.all(xi_mid >= target):
            hi, xi_hi = mid, xi_mid
        else:
            lo, xi_lo = mid, xi_mid
        logger.debug(f"이분 탐색 {steps}: [{lo:.15g}, {hi:.15g}]")

    return FeasibilityResult(feasible=True, alpha_bar=hi, delta=delta_from_alpha(hi, rho),
                             iterations=steps, message="")
