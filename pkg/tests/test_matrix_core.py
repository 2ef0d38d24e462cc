import itertools
import os
import sys
import unittest
from fractions import Fraction

import numpy as np
import pytest

# 프로젝트 루트 경로를 sys.path에 추가
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from common.exceptions import DomainError, StructuralError
from common.models import NumericMode, Side, SolverConfig
from engine.eigensolver import eigentriple
from engine.matrix_core import (amplitude, cw_bounds, is_aperiodic, is_irreducible, matrix_power_positive,
                                min_positivity_exponent, period, structure_report)
from engine.models import StructureMatrix
from tests.samples import RHO_TWO_SECTOR, random_primitive, two_sector


def closure_irreducible(pattern: np.ndarray) -> bool:
    """Warshall 전이 폐포로 구한 기약성"""
    d = pattern.shape[0]
    if d == 1:
        return bool(pattern[0, 0])
    reach = pattern.astype(bool).copy()
    for k in range(d):
        reach = reach | (reach[:, [k]] & reach[[k], :])
    off_diagonal = ~np.eye(d, dtype=bool)
    return bool(np.all(reach[off_diagonal]))


class TestStructuralPredicates(unittest.TestCase):
    """기약성, 주기, 양성 지수에 대한 테스트"""

    def setUp(self):
        """각 테스트 전 설정"""
        self.A = two_sector()

    def test_two_sector_is_irreducible(self):
        """2부문 예제는 기약"""
        self.assertTrue(is_irreducible(self.A))

    def test_identity_is_reducible(self):
        """단위행렬은 교차 간선이 없어 가약"""
        self.assertFalse(is_irreducible(np.eye(2)))

    def test_no_path_back_is_reducible(self):
        """2 -> 1 경로가 없으면 가약"""
        self.assertFalse(is_irreducible(np.array([[0.0, 1.0], [0.0, 1.0]])))

    def test_single_product(self):
        """d = 1 은 a_11 > 0 일 때만 기약"""
        self.assertTrue(is_irreducible(np.array([[0.3]])))
        self.assertFalse(is_irreducible(np.array([[0.0]])))
        self.assertEqual(period(np.array([[0.3]])), 1)

    def test_periods(self):
        """순환 패턴의 주기"""
        self.assertEqual(period(np.array([[0.0, 1.0], [1.0, 0.0]])), 2)
        self.assertEqual(period(self.A), 1)
        cyclic = np.roll(np.eye(3), 1, axis=1)
        self.assertEqual(period(cyclic), 3)
        self.assertFalse(is_aperiodic(cyclic))

    def test_period_rejects_reducible(self):
        """가약 행렬의 주기는 구조 오류"""
        with self.assertRaises(StructuralError):
            period(np.eye(2))

    def test_min_positivity_exponent_examples(self):
        """양성 지수 예제"""
        self.assertEqual(min_positivity_exponent(self.A), 1)
        self.assertEqual(min_positivity_exponent(np.array([[0.0, 1.0], [1.0, 1.0]])), 2)

    def test_min_positivity_exponent_rejects_periodic(self):
        """주기적 행렬에는 양성 지수가 없다"""
        with self.assertRaises(StructuralError):
            min_positivity_exponent(np.array([[0.0, 1.0], [1.0, 0.0]]))

    def test_patterns_only(self):
        """크기가 아니라 0 패턴만 본다"""
        tiny = np.array([[1e-300, 1e-300], [1e-300, 0.0]])
        self.assertTrue(is_irreducible(tiny))
        self.assertEqual(period(tiny), 1)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_irreducible_matches_transitive_closure(d):
    """d <= 3 의 모든 0 패턴에서 전이 폐포 판정과 일치"""
    for bits in itertools.product([0.0, 1.0], repeat=d * d):
        pattern = np.array(bits).reshape(d, d)
        assert is_irreducible(pattern) == closure_irreducible(pattern > 0)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_positivity_exponent_bounds(rng, d):
    """무작위 기약, 비주기 행렬의 양성 지수는 (d-1)^2 + 1 이하이고 직접 거듭제곱과 일치"""
    checked = 0
    while checked < 20:
        pattern = (rng.uniform(size=(d, d)) < 0.4).astype(float)
        if not is_irreducible(pattern) or period(pattern) != 1:
            continue
        checked += 1
        m = min_positivity_exponent(pattern)
        assert m <= (d - 1) ** 2 + 1
        assert matrix_power_positive(pattern, m)
        if m > 1:
            assert not matrix_power_positive(pattern, m - 1)
        if np.all(np.diag(pattern) > 0):
            assert m <= max(d - 1, 1)


def test_positive_diagonal_means_aperiodic(rng):
    """대각 원소가 하나라도 양수면 주기 1"""
    for d in range(2, 7):
        M = np.roll(np.eye(d), 1, axis=1)
        k = int(rng.integers(d))
        M[k, k] = 0.5
        assert period(M) == 1


class TestCollatzWielandt(unittest.TestCase):
    """C-W 상하한에 대한 테스트"""

    def test_ones_vector_exact(self):
        """x = (1, 1) 이면 (0.26, 0.65)"""
        bounds = cw_bounds(two_sector(), [1, 1])
        self.assertEqual(bounds.lower, Fraction("0.26"))
        self.assertEqual(bounds.upper, Fraction("0.65"))
        self.assertTrue(bounds.sandwich_guaranteed)

    def test_left_eigenvector_collapses_interval(self):
        """x = u 이면 lower = upper = rho"""
        A = two_sector(NumericMode.floating())
        u = eigentriple(A, SolverConfig()).u
        bounds = cw_bounds(A, u)
        self.assertAlmostEqual(bounds.lower, RHO_TWO_SECTOR, places=11)
        self.assertAlmostEqual(bounds.upper, RHO_TWO_SECTOR, places=11)

    def test_column_stochastic(self):
        """열합이 1 이면 x = 1 에서 (1, 1)"""
        M = StructureMatrix.from_rows([["0.3", "0.6"], ["0.7", "0.4"]], mode=NumericMode.exact())
        bounds = cw_bounds(M, [1, 1])
        self.assertEqual((bounds.lower, bounds.upper), (1, 1))

    def test_non_positive_vector(self):
        """0 이나 음수 성분은 도메인 오류"""
        with self.assertRaises(DomainError):
            cw_bounds(two_sector(), [1, 0])
        with self.assertRaises(DomainError):
            cw_bounds(two_sector(), [1, -2])

    def test_reducible_is_flagged(self):
        """가약 행렬은 오류 대신 보장 없음 표시"""
        bounds = cw_bounds(np.eye(2), [1.0, 2.0])
        self.assertFalse(bounds.sandwich_guaranteed)

    def test_right_side(self):
        """RIGHT 는 (Ax)/x"""
        bounds = cw_bounds(two_sector(), [1, 1], side=Side.RIGHT)
        self.assertEqual(bounds.lower, Fraction("0.39"))
        self.assertEqual(bounds.upper, Fraction("0.52"))


@pytest.mark.parametrize("d", [2, 5, 20, 50])
def test_cw_sandwich_random(rng, d):
    """무작위 양의 x 에 대해 lower <= rho <= upper"""
    A = random_primitive(rng, d)
    rho = eigentriple(A, SolverConfig()).rho
    for _ in range(10):
        bounds = cw_bounds(A, rng.uniform(0.1, 5.0, size=d))
        assert bounds.lower <= bounds.upper
        assert bounds.lower <= rho * (1 + 1e-12)
        assert rho <= bounds.upper * (1 + 1e-12)


class TestAmplitude(unittest.TestCase):
    """진폭에 대한 테스트"""

    def test_examples(self):
        """상수 행렬 0, 2부문 0.28, 단위행렬 1"""
        self.assertEqual(amplitude(np.full((3, 3), 0.2)), 0)
        self.assertEqual(amplitude(two_sector()), Fraction("0.28"))
        self.assertEqual(amplitude(np.eye(2)), 1)


def test_structure_report_two_sector():
    """inspect 요약"""
    report = structure_report(two_sector())
    assert report.irreducible
    assert report.period == 1
    assert report.min_positivity_exponent == 1
    assert report.amplitude == pytest.approx(0.28)
    assert report.cw_lower == pytest.approx(0.26)
    assert report.cw_upper == pytest.approx(0.65)


def test_structure_report_reducible():
    """가약 행렬은 주기와 양성 지수가 없다"""
    report = structure_report(StructureMatrix.from_rows([[1.0, 0.0], [0.0, 1.0]]))
    assert not report.irreducible
    assert report.period is None
    assert report.min_positivity_exponent is None


@pytest.mark.parametrize("d", [2, 3, 4])
def test_positivity_exponent_exhaustive(d):
    """d <= 4 의 모든 기약, 비주기 0 패턴에서 양성 지수 상한 확인"""
    for bits in itertools.product([0.0, 1.0], repeat=d * d):
        pattern = np.array(bits).reshape(d, d)
        if not is_irreducible(pattern) or period(pattern) != 1:
            continue
        m = min_positivity_exponent(pattern)
        assert m <= (d - 1) ** 2 + 1
        if np.all(np.diag(pattern) > 0):
            assert m <= d - 1
