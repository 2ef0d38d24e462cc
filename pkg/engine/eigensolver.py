"""
최대 고유쌍 계산 모듈
멱법 / 안전장치가 있는 역멱법, 준대칭화 및 고유벡터 평탄화 전처리

수렴 판정은 항상 Collatz-Wielandt 구간 폭으로 한다 (Rayleigh 몫 추정 미사용).
왼쪽 문제는 전치 후 오른쪽 루틴으로 푼다.
"""
import logging
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from common.exceptions import ConvergenceError, DomainError, SingularShiftError, StructuralError
from common.models import Preconditioning, Side, SolverConfig, SolverKind
from common.numeric import is_exact_array, to_float
from engine.matrix_core import MatrixLike, _entries, is_irreducible, period
from engine.models import EigenTriple

logger = logging.getLogger(__name__)

# 역멱법 shift 재시도 (1회 시도 + 3회 재시도, 재시도마다 여유 계수 x10)
SHIFT_RETRIES = 3
SHIFT_GROWTH = 10.0

# smooth-with-guess 에서 추정치를 만들 때 쓰는 느슨한 허용오차
GUESS_TOLERANCE = 1e-3

Interval = Tuple[float, float]


class Eigenpair(NamedTuple):
    rho: float
    vector: np.ndarray


class _Outcome(NamedTuple):
    rho: float
    vector: np.ndarray
    iterations: int
    interval: Interval


def _float_matrix(A: MatrixLike) -> np.ndarray:
    return to_float(_entries(A))


def _require_primitive(A: MatrixLike, operation: str) -> None:
    if not is_irreducible(A):
        raise StructuralError(f"{operation}: 기약 행렬이 아닙니다")
    if period(A) != 1:
        raise StructuralError(f"{operation}: 주기적 행렬입니다 (비주기 조건 필요)")


def _interval(M: np.ndarray, x: np.ndarray) -> Tuple[np.ndarray, Interval]:
    image = M @ x
    ratios = image / x
    return image, (float(ratios.min()), float(ratios.max()))


def _converged(interval: Interval, tolerance: float) -> bool:
    lower, upper = interval
    return upper - lower < tolerance * lower


def _power_right(M: np.ndarray, cfg: SolverConfig,
                 observer: Optional[Callable[[Interval], None]] = None) -> _Outcome:
    d = M.shape[0]
    x = np.ones(d)
    if d == 1:
        return _Outcome(float(M[0, 0]), x, 0, (float(M[0, 0]), float(M[0, 0])))
    interval = (0.0, np.inf)
    for iteration in range(1, cfg.max_iterations + 1):
        image, interval = _interval(M, x)
        if observer is not None:
            observer(interval)
        if _converged(interval, cfg.tolerance):
            logger.debug(f"멱법 수렴: {iteration}회, C-W 구간 {interval}")
            return _Outcome(0.5 * (interval[0] + interval[1]), x, iteration, interval)
        x = image / image.max()
    raise ConvergenceError(
        f"멱법이 {cfg.max_iterations}회 안에 수렴하지 않았습니다 (C-W 구간 {interval})",
        interval=interval, iterations=cfg.max_iterations,
    )


def _shifted_iteration(M: np.ndarray, cfg: SolverConfig, margin: float) -> _Outcome:
    d = M.shape[0]
    x = np.ones(d)
    eye = np.eye(d)
    interval = (0.0, np.inf)
    for iteration in range(1, cfg.max_iterations + 1):
        _, interval = _interval(M, x)
        lower, upper = interval
        if _converged(interval, cfg.tolerance):
            logger.debug(f"역멱법 수렴: {iteration}회, C-W 구간 {interval}")
            return _Outcome(0.5 * (lower + upper), x, iteration, interval)
        # shift 는 C-W 상한보다 엄격히 위에 둔다: rho 가 shift 에 가장 가까운 고유값
        shift = upper + margin * max(upper - lower, cfg.tolerance * upper)
        try:
            z = np.linalg.solve(shift * eye - M, x)
        except np.linalg.LinAlgError as e:
            raise SingularShiftError(f"shift {shift!r} 시스템이 특이합니다", interval=interval,
                                     iterations=iteration) from e
        if not np.all(np.isfinite(z)) or np.any(z <= 0):
            raise SingularShiftError(f"shift {shift!r} 시스템 해가 양수가 아닙니다", interval=interval,
                                     iterations=iteration)
        x = z / z.max()
    raise ConvergenceError(
        f"역멱법이 {cfg.max_iterations}회 안에 수렴하지 않았습니다 (C-W 구간 {interval})",
        interval=interval, iterations=cfg.max_iterations,
    )


def _inverse_power_right(M: np.ndarray, cfg: SolverConfig) -> _Outcome:
    d = M.shape[0]
    if d == 1:
        return _Outcome(float(M[0, 0]), np.ones(1), 0, (float(M[0, 0]), float(M[0, 0])))
    retrying = Retrying(
        stop=stop_after_attempt(SHIFT_RETRIES + 1),
        retry=retry_if_exception_type(SingularShiftError),
        reraise=True,
    )
    for attempt in retrying:
        with attempt:
            margin = cfg.shift_margin * SHIFT_GROWTH ** (attempt.retry_state.attempt_number - 1)
            if attempt.retry_state.attempt_number > 1:
                logger.debug(f"역멱법 shift 재시도: 여유 계수 {margin}")
            return _shifted_iteration(M, cfg, margin)
    raise AssertionError("unreachable")


def _solve_right(M: np.ndarray, cfg: SolverConfig, solver: SolverKind) -> _Outcome:
    if solver == SolverKind.INVERSE_POWER:
        return _inverse_power_right(M, cfg)
    return _power_right(M, cfg)


def _oriented(A: MatrixLike, side: Side) -> np.ndarray:
    M = _float_matrix(A)
    return M.T.copy() if side == Side.LEFT else M


def _normalized(vector: np.ndarray) -> np.ndarray:
    return vector * (vector.shape[0] / vector.sum())


def power_eigenpair(A: MatrixLike, side: Side, cfg: SolverConfig) -> Eigenpair:
    """
    멱법으로 최대 고유쌍 계산

    Args:
        A: 기약, 비주기 구조행렬
        side: LEFT (x <- xA) 또는 RIGHT (x <- Ax)
        cfg: 솔버 설정

    Returns:
        Eigenpair: (마지막 C-W 구간의 중점, 성분 합이 d 인 고유벡터)

    Raises:
        ConvergenceError: 최대 반복 초과 (마지막 C-W 구간 포함)
    """
    _require_primitive(A, "power_eigenpair")
    outcome = _power_right(_oriented(A, side), cfg)
    return Eigenpair(outcome.rho, _normalized(outcome.vector))


def inverse_power_eigenpair(A: MatrixLike, side: Side, cfg: SolverConfig) -> Eigenpair:
    """
    C-W 상한 위의 shift 를 쓰는 역멱법

    shift = upper + margin * (upper - lower) 를 매 단계 현재 반복값의 C-W 구간에서 다시 구한다.
    shift 시스템이 특이하면 여유 계수를 늘려 최대 3번 재시도한다.
    """
    _require_primitive(A, "inverse_power_eigenpair")
    outcome = _inverse_power_right(_oriented(A, side), cfg)
    return Eigenpair(outcome.rho, _normalized(outcome.vector))


def cw_interval_history(A: MatrixLike, side: Side, cfg: SolverConfig) -> List[Interval]:
    """멱법이 거친 C-W 구간 목록"""
    _require_primitive(A, "cw_interval_history")
    history: List[Interval] = []
    _power_right(_oriented(A, side), cfg, observer=history.append)
    return history


def quasi_symmetrize(A: MatrixLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    준대칭화

    Q = A - D_{A1} 에 대해 mu Q = 0, mu_1 = 1 인 양의 해를 구하고
    A_hat = D_{mu^1/2} A D_{mu^-1/2} 를 반환한다.

    Returns:
        (mu, A_hat)
    """
    if not is_irreducible(A):
        raise StructuralError("quasi_symmetrize: 기약 행렬이 아닙니다")
    M = _float_matrix(A)
    d = M.shape[0]
    if d == 1:
        return np.ones(1), M.copy()
    Q = M - np.diag(M.sum(axis=1))
    tail = np.linalg.solve(Q[1:, 1:].T, -Q[0, 1:])
    mu = np.concatenate(([1.0], tail))
    if np.any(mu <= 0):
        raise StructuralError("quasi_symmetrize: 양의 영공간 벡터를 찾지 못했습니다")
    root = np.sqrt(mu)
    A_hat = root[:, None] * M / root[None, :]
    return mu, A_hat


def is_symmetrizable(A: MatrixLike, mu, tolerance: float = 1e-12) -> bool:
    """mu_i a_ij = mu_j a_ji 가 모든 i, j 에 대해 성립하는지 (exact 모드는 등호 비교)"""
    entries = _entries(A)
    if not all(component > 0 for component in np.asarray(mu).ravel()):
        raise DomainError("mu 는 모든 성분이 양수여야 합니다")
    if is_exact_array(entries) and np.asarray(mu).dtype == object:
        weighted = np.asarray(mu, dtype=object)[:, None] * entries
        return bool(np.all(weighted == weighted.T))
    weights = to_float(mu)
    weighted = weights[:, None] * to_float(entries)
    scale = max(float(np.abs(weighted).max()), 1.0)
    return bool(np.all(np.abs(weighted - weighted.T) <= tolerance * scale))


def smooth_transform(A: MatrixLike, w) -> np.ndarray:
    """
    고유벡터 평탄화 변환 A_w = D_w^-1 A D_w = (w^-1 (x) w) (.) A

    A_w 의 최대 오른쪽 고유벡터는 w^-1 (.) v 이므로 w 가 v 에 가까울수록 상수에 가깝다.
    """
    entries = _entries(A)
    weights = np.asarray(w, dtype=object if is_exact_array(entries) else float)
    if not all(component > 0 for component in weights):
        raise DomainError("smooth_transform: w 는 모든 성분이 양수여야 합니다")
    return entries * weights[None, :] / weights[:, None]


def _preconditioned(A: MatrixLike, cfg: SolverConfig, guess) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    전처리된 행렬과 (왼쪽, 오른쪽) 복원 배율 반환

    원래 고유벡터는 u = u_M * left_scale, v = v_M * right_scale
    """
    M = _float_matrix(A)
    d = M.shape[0]
    if cfg.preconditioning == Preconditioning.QUASI_SYMMETRIZE:
        mu, A_hat = quasi_symmetrize(A)
        root = np.sqrt(mu)
        return A_hat, root, 1.0 / root
    if cfg.preconditioning == Preconditioning.SMOOTH_WITH_GUESS:
        if guess is None:
            rough = SolverConfig(tolerance=max(GUESS_TOLERANCE, cfg.tolerance),
                                 max_iterations=cfg.max_iterations)
            guess = _power_right(M, rough).vector
        w = to_float(guess)
        return smooth_transform(M, w), 1.0 / w, w
    return M, np.ones(d), np.ones(d)


def _relative_residual(M: np.ndarray, rho: float, vector: np.ndarray) -> float:
    return float(np.max(np.abs(M @ vector - rho * vector)) / (rho * np.max(np.abs(vector))))


def eigentriple(A: MatrixLike, cfg: SolverConfig, guess=None) -> EigenTriple:
    """
    세 가지 주요 특성 (rho, u, v) 계산

    Args:
        A: 기약, 비주기 구조행렬
        cfg: 솔버 설정 (전처리 방식 포함)
        guess: smooth-with-guess 전처리에 쓸 v 추정치 (선택)

    Returns:
        EigenTriple: sum(v) = d, u.v = 1 로 정규화된 삼중쌍
    """
    _require_primitive(A, "eigentriple")
    M, left_scale, right_scale = _preconditioned(A, cfg, guess)
    right = _solve_right(M, cfg, cfg.solver)
    left = _solve_right(M.T.copy(), cfg, cfg.solver)

    lower = max(right.interval[0], left.interval[0])
    upper = min(right.interval[1], left.interval[1])
    rho = 0.5 * (lower + upper) if lower <= upper else 0.5 * (right.rho + left.rho)

    v = right.vector * right_scale
    v = _normalized(v)
    u = left.vector * left_scale
    u = u / float(u @ v)

    original = _float_matrix(A)
    residual = max(_relative_residual(original.T, rho, u), _relative_residual(original, rho, v))
    if residual > cfg.tolerance:
        raise ConvergenceError(
            f"고유쌍 잔차 {residual:.3e} 가 허용오차 {cfg.tolerance:.1e} 를 넘었습니다",
            interval=(lower, upper), iterations=right.iterations + left.iterations,
        )
    logger.info(f"고유 삼중쌍 계산 완료: rho={rho:.12g}, 잔차={residual:.2e}")
    return EigenTriple(rho=rho, u=u, v=v, residual=residual,
                       iterations=right.iterations + left.iterations)


def dense_eigentriple(A: MatrixLike) -> EigenTriple:
    """
    numpy 고밀도 고유값 분해로 구한 삼중쌍 (교차검증용)
    """
    M = _float_matrix(A)
    values, right_vectors = np.linalg.eig(M)
    k = int(np.argmax(values.real))
    v = np.abs(right_vectors[:, k].real)
    values_left, left_vectors = np.linalg.eig(M.T)
    j = int(np.argmax(values_left.real))
    u = np.abs(left_vectors[:, j].real)
    v = _normalized(v)
    u = u / float(u @ v)
    rho = float(values[k].real)
    residual = max(_relative_residual(M.T, rho, u), _relative_residual(M, rho, v))
    return EigenTriple(rho=rho, u=u, v=v, residual=residual)
