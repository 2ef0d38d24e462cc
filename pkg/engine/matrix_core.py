"""
구조행렬 구조 판정 모듈
기약성, 주기, 양성 지수, Collatz-Wielandt 상하한
"""
import logging
import math
from functools import reduce
from typing import Optional, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from common.exceptions import DomainError, StructuralError
from common.models import Side
from common.numeric import as_fraction, is_exact_array, to_float
from engine.models import CWBounds, StructureMatrix, StructureReport

logger = logging.getLogger(__name__)

MatrixLike = Union[StructureMatrix, np.ndarray]


def _entries(A: MatrixLike) -> np.ndarray:
    return A.entries if isinstance(A, StructureMatrix) else np.asarray(A)


def zero_pattern(A: MatrixLike) -> np.ndarray:
    """a_ij > 0 인 위치의 불리언 패턴 (크기는 보지 않음, epsilon 없음)"""
    return np.asarray(_entries(A) > 0, dtype=bool)


def is_irreducible(A: MatrixLike) -> bool:
    """
    a_ij > 0 일 때 i -> j 간선을 갖는 방향 그래프가 강연결인지 판정

    d = 1 이면 a_11 > 0 일 때만 기약으로 본다.
    """
    pattern = zero_pattern(A)
    d = pattern.shape[0]
    if d == 1:
        return bool(pattern[0, 0])
    n_components, _ = connected_components(csr_matrix(pattern.astype(np.int8)), directed=True,
                                           connection="strong")
    return n_components == 1


def _require_irreducible(A: MatrixLike, operation: str) -> np.ndarray:
    if not is_irreducible(A):
        raise StructuralError(f"{operation}: 기약(irreducible) 행렬이 아닙니다")
    return zero_pattern(A)


def period(A: MatrixLike) -> int:
    """
    기약 행렬의 주기

    BFS 레벨 차이 level(i) + 1 - level(j) 의 최대공약수를 모든 간선 i -> j 에 대해 구한다.
    """
    pattern = _require_irreducible(A, "period")
    d = pattern.shape[0]
    if d == 1:
        return 1
    graph = csr_matrix(pattern.astype(np.int8))
    order, predecessors = breadth_first_order(graph, 0, directed=True, return_predecessors=True)
    level = np.zeros(d, dtype=np.int64)
    for node in order[1:]:
        level[node] = level[predecessors[node]] + 1
    rows, cols = np.nonzero(pattern)
    differences = np.abs(level[rows] + 1 - level[cols])
    return int(reduce(math.gcd, differences.tolist(), 0))


def is_aperiodic(A: MatrixLike) -> bool:
    return is_irreducible(A) and period(A) == 1


def matrix_power_positive(A: MatrixLike, m: int) -> bool:
    """A^m 이 모든 원소 양수인지 (패턴 기반 불리언 거듭제곱)"""
    if m < 1:
        raise DomainError("m 은 1 이상이어야 합니다")
    pattern = zero_pattern(A).astype(np.int64)
    power = pattern.copy()
    for _ in range(m - 1):
        power = ((power @ pattern) > 0).astype(np.int64)
    return bool(np.all(power > 0))


def min_positivity_exponent(A: MatrixLike) -> int:
    """
    A^m 이 양행렬이 되는 최소 m (M_min)

    Returns:
        M_min, (d-1)^2 + 1 이하이며 대각이 모두 양수면 d-1 이하

    Raises:
        StructuralError: 가약이거나 주기적인 경우
    """
    pattern = _require_irreducible(A, "min_positivity_exponent")
    if period(A) != 1:
        raise StructuralError("min_positivity_exponent: 주기적 행렬에는 양성 지수가 없습니다")
    d = pattern.shape[0]
    bound = (d - 1) ** 2 + 1
    base = pattern.astype(np.int64)
    power = base.copy()
    m = 1
    while not np.all(power > 0):
        if m >= bound:
            raise StructuralError(f"양성 지수가 상한 {bound} 을 넘었습니다")
        power = ((power @ base) > 0).astype(np.int64)
        m += 1
    if np.all(np.diag(pattern)) and m > max(d - 1, 1):
        raise StructuralError(f"대각 양수 행렬의 양성 지수 {m} 이 d-1 = {d - 1} 을 넘었습니다")
    return m


def cw_ratios(M: np.ndarray, x: np.ndarray, side: Side = Side.LEFT) -> np.ndarray:
    """(xM)/x (left) 또는 (Mx)/x (right) 성분별 비율"""
    image = x @ M if side == Side.LEFT else M @ x
    return image / x


def cw_bounds(A: MatrixLike, x, side: Side = Side.LEFT) -> CWBounds:
    """
    Collatz-Wielandt 상하한

    Args:
        A: 구조행렬
        x: 모든 성분이 양수인 d-벡터
        side: LEFT 면 (xA)/x, RIGHT 면 (Ax)/x

    Returns:
        CWBounds: lower = min_k 비율, upper = max_k 비율
    """
    entries = _entries(A)
    exact = is_exact_array(entries)
    if exact:
        vector = np.empty(len(x), dtype=object)
        vector[:] = [as_fraction(c) for c in x]
    else:
        vector = np.asarray(x, dtype=float)
    if vector.shape != (entries.shape[0],):
        raise DomainError(f"x 의 길이가 {entries.shape[0]} 이어야 합니다")
    if not all(component > 0 for component in vector):
        raise DomainError("C-W 상하한에는 모든 성분이 양수인 x 가 필요합니다")
    ratios = cw_ratios(entries, vector, side)
    guaranteed = is_irreducible(A)
    if not guaranteed:
        logger.warning("가약 행렬에 대한 C-W 상하한: rho 를 감싼다는 보장이 없습니다")
    lower, upper = min(ratios), max(ratios)
    if not exact:
        lower, upper = float(lower), float(upper)
    return CWBounds(lower=lower, upper=upper, sandwich_guaranteed=guaranteed)


def amplitude(A: MatrixLike) -> float:
    """max_ij a_ij - min_ij a_ij"""
    entries = _entries(A)
    values = list(entries.ravel()) if is_exact_array(entries) else entries.ravel()
    return max(values) - min(values)


def structure_report(A: StructureMatrix) -> StructureReport:
    """
    inspect 명령용 구조 요약

    가약 행렬이면 period 와 양성 지수는 None 이다.
    """
    irreducible = is_irreducible(A)
    p: Optional[int] = period(A) if irreducible else None
    exponent = min_positivity_exponent(A) if p == 1 else None
    bounds = cw_bounds(A, np.ones(A.dim, dtype=object if A.is_exact else float))
    return StructureReport(
        dim=A.dim,
        nonnegative=bool(np.all(to_float(A.entries) >= 0)),
        irreducible=irreducible,
        period=p,
        aperiodic=p == 1,
        min_positivity_exponent=exponent,
        amplitude=float(amplitude(A)),
        cw_lower=float(bounds.lower),
        cw_upper=float(bounds.upper),
    )
