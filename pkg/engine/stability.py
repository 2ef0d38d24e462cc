"""
안정성 모듈
투입산출 반복 x_{k+1} M = x_k, 붕괴 시각 검출, A 공간 / P 공간 변환 및 안정성 동치 검사
"""
import logging
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from common.exceptions import DomainError, EconomyError, NumericOverflowError
from common.models import Direction, NumericMode, SolverConfig, Space
from common.numeric import RowSolver, as_fraction, to_float, to_mode
from engine.chen_transform import chen_transform, is_row_stochastic, triple_residual
from engine.eigensolver import eigentriple
from engine.matrix_core import MatrixLike, _entries
from engine.models import EigenTriple, StabilityReport, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_HORIZON = 1000
DEFAULT_DET_FLOOR = 1e-12
DEFAULT_CRISIS_THRESHOLD = 0.10
CONVERSION_TOLERANCE = 1e-9


def _has_negative(step: np.ndarray) -> bool:
    return any(component < 0 for component in step)


def iterate(M: MatrixLike, x0, n_max: int, mode: NumericMode,
            det_floor: float = DEFAULT_DET_FLOOR, space: Space = Space.A_SPACE,
            labels: Optional[List[str]] = None) -> Trajectory:
    """
    x_{k+1} M = x_k 를 k = 0..n_max 까지 풀이

    M^T 를 한 번만 분해하고 매 단계 같은 분해로 푼다.
    음수 성분이 처음 나타난 단계에서 멈추고 그 단계까지 기록한다.

    Args:
        M: 반복 행렬 (가역)
        x0: 초기 행벡터
        n_max: 최대 단계 수
        mode: 수치 모드
        det_floor: float 모드 행렬식 하한

    Raises:
        SingularMatrixError: M 이 가역이 아닌 경우
        NumericOverflowError: float 모드에서 유한하지 않은 값이 나온 경우
    """
    if n_max < 0:
        raise DomainError("n_max 는 0 이상이어야 합니다")
    matrix = to_mode(_entries(M), mode)
    x = to_mode(x0, mode)
    if x.shape != (matrix.shape[0],):
        raise DomainError(f"x0 의 길이가 {matrix.shape[0]} 이어야 합니다")
    if not mode.is_exact and not np.all(np.isfinite(x)):
        raise DomainError("x0 는 유한해야 합니다")
    if _has_negative(x):
        raise DomainError("x0 에 음수 성분이 있습니다")

    solver = RowSolver(matrix, mode, det_floor)
    steps = [x]
    for k in range(1, n_max + 1):
        x = solver.solve(x)
        if not mode.is_exact and not np.all(np.isfinite(x)):
            partial = Trajectory(steps=steps, space=space, matrix=matrix, numeric_mode=mode,
                                 horizon=n_max, labels=labels)
            raise NumericOverflowError(f"{k} 단계에서 유한하지 않은 값이 나왔습니다", trajectory=partial)
        steps.append(x)
        if _has_negative(x):
            logger.info(f"붕괴 감지: {k} 단계에서 음수 성분 발생")
            break
    return Trajectory(steps=steps, space=space, matrix=matrix, numeric_mode=mode,
                      horizon=n_max, labels=labels)


def _spectral_radius(t: Trajectory, cfg: Optional[SolverConfig] = None) -> Optional[float]:
    try:
        return eigentriple(t.matrix, cfg or SolverConfig()).rho
    except EconomyError as e:
        logger.warning(f"반복 행렬의 rho 를 구하지 못해 위기 구간을 생략합니다: {e}")
        return None


def crisis_window(t: Trajectory, collapse_time: int, rho: float,
                  threshold: float = DEFAULT_CRISIS_THRESHOLD) -> Optional[Tuple[int, int]]:
    """
    T-1 에서 끝나는 위기 구간

    1 <= n < T 중 max_k |rho * x_n^(k) / x_{n-1}^(k) - 1| > threshold 인 단계들의
    마지막 연속 구간. T-1 이 조건을 만족하지 않으면 None.
    """
    values = t.as_float()

    def deviates(n: int) -> bool:
        previous, current = values[n - 1], values[n]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = rho * current / previous
        if not np.all(np.isfinite(ratios)):
            return True
        return bool(np.max(np.abs(ratios - 1.0)) > threshold)

    end = collapse_time - 1
    if end < 1 or not deviates(end):
        return None
    start = end
    while start - 1 >= 1 and deviates(start - 1):
        start -= 1
    return (start, end)


def collapse_report(t: Trajectory, rho: Optional[float] = None,
                    threshold: float = DEFAULT_CRISIS_THRESHOLD,
                    cfg: Optional[SolverConfig] = None) -> StabilityReport:
    """
    붕괴 시각 T, 붕괴 제품, 위기 구간, 마지막 단계 (최대, 최소)

    Args:
        t: 반복 수열
        rho: 반복 행렬의 rho (없으면 계산 시도)
        threshold: 위기 판정 성장비 편차
        cfg: rho 를 계산할 때 쓰는 솔버 설정 (없으면 기본값)
    """
    collapse_time = None
    collapse_product = None
    for n, step in enumerate(t.steps):
        negatives = [k for k, component in enumerate(step) if component < 0]
        if negatives:
            collapse_time, collapse_product = n, negatives[0]
            break

    window = None
    if collapse_time is not None:
        if rho is None:
            rho = _spectral_radius(t, cfg)
        if rho is not None:
            window = crisis_window(t, collapse_time, rho, threshold)

    last = to_float(t.steps[-1])
    label = None
    if collapse_product is not None and t.labels:
        label = t.labels[collapse_product]
    return StabilityReport(
        collapse_time=collapse_time,
        collapse_product=collapse_product,
        collapse_label=label,
        crisis_window=window,
        terminal_magnitudes=(float(last.max()), float(last.min())),
        steps_run=t.last_index,
        horizon=t.horizon,
        space=t.space,
    )


def convert(t: Trajectory, triple: EigenTriple, direction: Direction,
            tolerance: float = CONVERSION_TOLERANCE) -> Trajectory:
    """
    A 공간 <-> P 공간 변환

    A-to-P: mu_n = rho^n (x_n (.) v), P-to-A: x_n = rho^-n (mu_n (.) v^-1).
    결과는 float 모드 수열이다 (v 가 무리수이므로).
    """
    rho, v = triple.rho, triple.v
    matrix = to_float(t.matrix)
    if matrix.shape != (triple.dim, triple.dim):
        raise DomainError("수열 행렬과 고유 삼중쌍의 차원이 다릅니다")

    if direction == Direction.A_TO_P:
        if t.space != Space.A_SPACE:
            raise DomainError("A-to-P 변환에는 A 공간 수열이 필요합니다")
        if triple_residual(matrix, triple) > tolerance:
            raise DomainError("수열 행렬과 고유 삼중쌍이 일치하지 않습니다")
        steps = [(rho ** n) * to_float(step) * v for n, step in enumerate(t.steps)]
        target = matrix * v[None, :] / (rho * v[:, None])
        space = Space.P_SPACE
    else:
        if t.space != Space.P_SPACE:
            raise DomainError("P-to-A 변환에는 P 공간 수열이 필요합니다")
        mu = triple.equilibrium
        if not is_row_stochastic(matrix, tolerance) or np.max(np.abs(mu @ matrix - mu)) > tolerance * mu.max():
            raise DomainError("P 공간 수열 행렬이 고유 삼중쌍의 전이행렬이 아닙니다")
        steps = [(rho ** -n) * to_float(step) / v for n, step in enumerate(t.steps)]
        target = rho * v[:, None] * matrix / v[None, :]
        space = Space.A_SPACE

    return Trajectory(steps=steps, space=space, matrix=target, numeric_mode=NumericMode.floating(),
                      horizon=t.horizon, labels=t.labels)


def equivalence_check(A: MatrixLike, triple: EigenTriple, x0, n_max: int,
                      mode: Optional[NumericMode] = None,
                      det_floor: float = DEFAULT_DET_FLOOR) -> bool:
    """
    A 공간과 P 공간의 안정성 동치 검사

    A 를 x0 에서, P 를 mu_0 = x0 (.) v 에서 반복해 붕괴 시각과 붕괴 제품이 같은지 확인한다.
    """
    mode = mode or NumericMode.exact()
    report_a = collapse_report(iterate(A, x0, n_max, mode, det_floor), rho=triple.rho)
    chain = chen_transform(A, triple)
    mu0 = to_float(to_mode(x0, mode)) * triple.v
    report_p = collapse_report(
        iterate(chain.P, mu0, n_max, NumericMode.floating(), det_floor, space=Space.P_SPACE), rho=1.0)

    same = (report_a.collapse_time == report_p.collapse_time
            and report_a.collapse_product == report_p.collapse_product)
    if not same:
        if (report_a.collapse_time is not None and report_p.collapse_time is not None
                and abs(report_a.collapse_time - report_p.collapse_time) == 1):
            logger.warning(f"P 공간 붕괴 시각이 A 공간과 한 단계 어긋납니다: "
                           f"A={report_a.collapse_time}, P={report_p.collapse_time}")
        else:
            logger.info(f"안정성 불일치: A=({report_a.collapse_time}, {report_a.collapse_product}), "
                        f"P=({report_p.collapse_time}, {report_p.collapse_product})")
    return same


def development_rate(x0, x1) -> float:
    """
    한 단계 발전율 min_k x1^(k) / x0^(k)

    x0 = u 이면 최적 발전율 1/rho 와 같다.
    """
    before, after = to_float(x0), to_float(x1)
    if before.shape != after.shape:
        raise DomainError("x0, x1 의 길이가 다릅니다")
    if np.any(before <= 0):
        raise DomainError("x0 는 모든 성분이 양수여야 합니다")
    return float(np.min(after / before))


def round_half_up(value, decimals: int) -> Decimal:
    """소수점 decimals 자리 반올림 (0.5 는 올림)"""
    text = repr(float(value)) if isinstance(value, (float, np.floating)) else str(value)
    return Decimal(text).quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_UP)


def precision_sweep(A: MatrixLike, u: Sequence, decimals: Iterable[int], mode: NumericMode,
                    n_max: int = DEFAULT_HORIZON,
                    det_floor: float = DEFAULT_DET_FLOOR,
                    cfg: Optional[SolverConfig] = None) -> List[Tuple[int, Optional[int]]]:
    """
    평형 초기값 정밀도에 따른 붕괴 시각

    첫 성분만 k 자리로 반올림하고 나머지 성분은 그대로 둔다.

    Returns:
        [(k, T)] (T 는 구간 안에서 붕괴하지 않으면 None)
    """
    base = list(u)
    rho = eigentriple(A, cfg or SolverConfig()).rho
    rows = []
    for k in decimals:
        if k < 0:
            raise DomainError("소수 자리수는 0 이상이어야 합니다")
        first = as_fraction(str(round_half_up(base[0], k)))
        x0 = [first] + base[1:]
        report = collapse_report(iterate(A, x0, n_max, mode, det_floor), rho=rho)
        logger.debug(f"정밀도 {k} 자리: 초기값 {first}, T={report.collapse_time}")
        rows.append((int(k), report.collapse_time))
    return rows
