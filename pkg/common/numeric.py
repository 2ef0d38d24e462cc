"""
수치 모드 유틸리티
exact-rational 모드는 Fraction 객체 배열, binary-float 모드는 float64 배열을 사용한다
"""
import logging
from fractions import Fraction
from numbers import Rational
from typing import Any, Iterable, Union

import numpy as np
import scipy.linalg

from common.exceptions import DomainError, NumericOverflowError, SingularMatrixError
from common.models import NumericMode

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

FLOAT_MAX = Fraction(float(np.finfo(float).max))


def as_fraction(value: Any) -> Fraction:
    """
    값을 정확한 유리수로 변환

    문자열은 10진 표기 그대로 ("0.14" -> 7/50, "1/3" 허용),
    float 는 최단 10진 표기를 거쳐 변환한다.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        try:
            parsed = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise DomainError(f"유리수로 변환할 수 없는 값: {value!r}") from e
        if abs(parsed) > FLOAT_MAX:
            raise DomainError(f"float 범위를 벗어난 값: {value!r}")
        return parsed
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise DomainError(f"유한하지 않은 값: {value!r}")
        return Fraction(repr(float(value)))
    raise DomainError(f"지원하지 않는 수치 타입: {type(value).__name__}")


def is_exact_array(array: np.ndarray) -> bool:
    return array.dtype == object


def to_mode(values: Any, mode: NumericMode) -> np.ndarray:
    """
    배열을 수치 모드에 맞게 변환 (항상 새 배열 반환)

    Args:
        values: 중첩 리스트 또는 배열
        mode: 대상 수치 모드

    Returns:
        exact 모드면 Fraction 객체 배열, float 모드면 float64 배열
    """
    array = np.asarray(values, dtype=object if mode.is_exact else None)
    if mode.is_exact:
        flat = [as_fraction(v) for v in array.ravel()]
        out = np.empty(array.shape, dtype=object)
        out.ravel()[:] = flat
        return out
    if array.dtype.kind in "US":
        array = np.array([as_fraction(str(v)) for v in array.ravel()], dtype=object).reshape(array.shape)
    if array.dtype == object:
        array = _floats(array)
    return np.array(array, dtype=float)


def _floats(array: np.ndarray) -> np.ndarray:
    try:
        return np.array([float(v) for v in array.ravel()], dtype=float).reshape(array.shape)
    except OverflowError as e:
        raise NumericOverflowError(f"float 로 표현할 수 없는 값이 있습니다: {e}") from e


def to_float(values: Any) -> np.ndarray:
    """Fraction 배열을 포함한 모든 배열을 float64 로 변환"""
    array = np.asarray(values)
    if array.dtype == object:
        return _floats(array)
    return np.array(array, dtype=float)


def identity(d: int, exact: bool) -> np.ndarray:
    if not exact:
        return np.eye(d)
    out = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            out[i, j] = Fraction(int(i == j))
    return out


def frozen(array: np.ndarray) -> np.ndarray:
    """읽기 전용 복사본"""
    copy = np.array(array, copy=True)
    copy.setflags(write=False)
    return copy


class ExactLU:
    """
    Fraction 행렬의 LU 분해 (부분 피벗: 첫 번째 0 이 아닌 원소)

    한 번 분해한 후 solve 를 반복 호출해 같은 행렬로 여러 번 푼다.
    """

    def __init__(self, matrix: np.ndarray):
        lu = to_mode(matrix, NumericMode.exact())
        n = lu.shape[0]
        perm = list(range(n))
        sign = 1
        for k in range(n):
            pivot = next((i for i in range(k, n) if lu[i, k] != 0), None)
            if pivot is None:
                raise SingularMatrixError("행렬이 특이행렬(singular)입니다")
            if pivot != k:
                lu[[k, pivot]] = lu[[pivot, k]]
                perm[k], perm[pivot] = perm[pivot], perm[k]
                sign = -sign
            for i in range(k + 1, n):
                if lu[i, k] != 0:
                    factor = lu[i, k] / lu[k, k]
                    lu[i, k] = factor
                    lu[i, k + 1:] = lu[i, k + 1:] - factor * lu[k, k + 1:]
        self.lu = lu
        self.perm = perm
        self.sign = sign
        self.n = n

    def determinant(self) -> Fraction:
        det = Fraction(self.sign)
        for i in range(self.n):
            det *= self.lu[i, i]
        return det

    def solve(self, b: Iterable[Number]) -> np.ndarray:
        rhs = [as_fraction(v) for v in b]
        y = [rhs[p] for p in self.perm]
        for i in range(self.n):
            y[i] -= sum((self.lu[i, j] * y[j] for j in range(i)), Fraction(0))
        x = [Fraction(0)] * self.n
        for i in reversed(range(self.n)):
            acc = y[i] - sum((self.lu[i, j] * x[j] for j in range(i + 1, self.n)), Fraction(0))
            x[i] = acc / self.lu[i, i]
        out = np.empty(self.n, dtype=object)
        out[:] = x
        return out


class FloatLU:
    """scipy LU 분해 래퍼"""

    def __init__(self, matrix: np.ndarray, det_floor: float = 0.0):
        m = to_float(matrix)
        det = float(np.linalg.det(m))
        if not np.isfinite(det) or abs(det) <= det_floor:
            raise SingularMatrixError(f"행렬식 |det| = {abs(det):.3e} 이(가) 하한 {det_floor:.1e} 이하입니다")
        self._det = det
        self._factor = scipy.linalg.lu_factor(m)

    def determinant(self) -> float:
        return self._det

    def solve(self, b: Iterable[Number]) -> np.ndarray:
        return scipy.linalg.lu_solve(self._factor, to_float(np.asarray(list(b))))


def factorize(matrix: np.ndarray, mode: NumericMode, det_floor: float = 0.0):
    """
    열벡터 시스템 M y = b 를 위한 분해 객체 생성

    Args:
        matrix: 정방행렬 M
        mode: 수치 모드
        det_floor: float 모드 행렬식 하한

    Returns:
        solve(b) 메서드를 가진 분해 객체
    """
    if mode.is_exact:
        return ExactLU(matrix)
    return FloatLU(matrix, det_floor)


class RowSolver:
    """
    행벡터 시스템 x M = b 풀이기 (M^T 를 한 번만 분해)
    """

    def __init__(self, matrix: np.ndarray, mode: NumericMode, det_floor: float = 0.0):
        self.mode = mode
        self._lu = factorize(np.asarray(matrix).T, mode, det_floor)

    def determinant(self) -> Number:
        return self._lu.determinant()

    def solve(self, b: Iterable[Number]) -> np.ndarray:
        return self._lu.solve(b)


def inverse(matrix: np.ndarray, mode: NumericMode, det_floor: float = 0.0) -> np.ndarray:
    """역행렬 (열 단위로 풀이)"""
    d = np.asarray(matrix).shape[0]
    lu = factorize(matrix, mode, det_floor)
    eye = identity(d, mode.is_exact)
    columns = [lu.solve(eye[:, j]) for j in range(d)]
    return np.stack(columns, axis=1)
