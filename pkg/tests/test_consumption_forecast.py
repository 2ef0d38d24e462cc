import os
import sys
import unittest
from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest

# 프로젝트 루트 경로를 sys.path에 추가
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from common.exceptions import AbnormalEconomyError, ConvergenceError, DomainError
from common.models import NumericMode, SolverConfig
from engine import consumption_forecast
from engine.chen_transform import chen_transform
from engine.consumption_forecast import (alpha_from_delta, available_consumption, chen_alpha_matrix,
                                         consumption_at, delta_from_alpha, forecast_step, gamma_from_delta,
                                         hua_gamma_growth_rate, hua_gamma_matrix, hua_inverse_growth_rate,
                                         hua_inverse_iterate, hua_inverse_model, max_feasible_alpha,
                                         transformed_alpha_chain)
from engine.eigensolver import eigentriple
from engine.models import ConsumptionPlan
from tests.samples import RHO_TWO_SECTOR, random_primitive, two_sector

ALPHA_AT_TEN_PERCENT = 0.840396173414
GAMMA_AT_TEN_PERCENT = 5.265513937802


class TestGrowthConversions(unittest.TestCase):
    """성장률과 소비 파라미터 변환에 대한 테스트"""

    def test_alpha_from_ten_percent_growth(self):
        """delta = 0.1 이면 alpha = 0.840396..."""
        self.assertAlmostEqual(alpha_from_delta(0.1, RHO_TWO_SECTOR), ALPHA_AT_TEN_PERCENT, places=10)
        self.assertAlmostEqual(gamma_from_delta(0.1, RHO_TWO_SECTOR), GAMMA_AT_TEN_PERCENT, places=9)

    def test_roundtrip(self):
        """delta(alpha(delta)) = delta, gamma = alpha / (1 - alpha)"""
        for delta in (0.01, 0.1, 0.5, 0.9):
            alpha = alpha_from_delta(delta, RHO_TWO_SECTOR)
            self.assertAlmostEqual(delta_from_alpha(alpha, RHO_TWO_SECTOR), delta, places=12)
            self.assertAlmostEqual(gamma_from_delta(delta, RHO_TWO_SECTOR), alpha / (1 - alpha), places=9)

    def test_no_consumption_gives_optimal_growth(self):
        """alpha = 0 이면 delta = 1 / rho - 1"""
        self.assertAlmostEqual(delta_from_alpha(0.0, RHO_TWO_SECTOR), 1 / RHO_TWO_SECTOR - 1)

    def test_abnormal_economy(self):
        """rho >= 1 이면 비정상 경제 오류"""
        with self.assertRaises(AbnormalEconomyError):
            alpha_from_delta(0.1, 1.0)
        with self.assertRaises(AbnormalEconomyError):
            delta_from_alpha(0.3, 1.2)

    def test_out_of_range(self):
        """delta, alpha 범위 밖은 도메인 오류"""
        with self.assertRaises(DomainError):
            alpha_from_delta(0.0, RHO_TWO_SECTOR)
        with self.assertRaises(DomainError):
            alpha_from_delta(1.0 / RHO_TWO_SECTOR, RHO_TWO_SECTOR)
        with self.assertRaises(DomainError):
            delta_from_alpha(1.0, RHO_TWO_SECTOR)

    def test_plan_identities(self):
        """ConsumptionPlan 은 세 항등식을 만족해야 생성된다"""
        plan = ConsumptionPlan.from_alpha(0.3, RHO_TWO_SECTOR)
        self.assertAlmostEqual(plan.gamma, 0.3 / 0.7)
        self.assertAlmostEqual(plan.delta, delta_from_alpha(0.3, RHO_TWO_SECTOR))
        with self.assertRaises(ValueError):
            ConsumptionPlan(alpha=0.3, gamma=1.0, delta=plan.delta, rho_A=plan.rho_A, rho_alpha=plan.rho_alpha)


class TestChenModel(unittest.TestCase):
    """Chen 모형 A_alpha 에 대한 테스트"""

    def setUp(self):
        """각 테스트 전 설정"""
        self.A = two_sector()
        self.cfg = SolverConfig()
        self.triple = eigentriple(self.A, self.cfg)

    def test_exact_entries(self):
        """exact 모드에서 (1 - alpha) A + alpha I 를 정확히 계산"""
        A_alpha = chen_alpha_matrix(self.A, Fraction(1, 2))
        self.assertTrue(A_alpha.is_exact)
        self.assertEqual(A_alpha.entries[0, 0], Fraction(5, 8))
        self.assertEqual(A_alpha.entries[0, 1], Fraction(7, 100))

    def test_same_eigenvectors(self):
        """A_alpha 의 고유벡터는 A 와 같고 rho 는 선형"""
        for alpha in (0.1, 0.5, 0.9):
            triple = eigentriple(chen_alpha_matrix(self.A, alpha), self.cfg)
            self.assertAlmostEqual(triple.rho, (1 - alpha) * self.triple.rho + alpha, places=11)
            np.testing.assert_allclose(triple.u, self.triple.u, rtol=1e-9)
            np.testing.assert_allclose(triple.v, self.triple.v, rtol=1e-9)

    def test_commuting_square(self):
        """A_alpha 의 Chen 변환 = P 에서 만든 P_alpha"""
        alpha = 0.3
        A_alpha = chen_alpha_matrix(self.A, alpha)
        direct = chen_transform(A_alpha, eigentriple(A_alpha, self.cfg))
        square = transformed_alpha_chain(chen_transform(self.A, self.triple), alpha, self.triple.rho)
        np.testing.assert_allclose(direct.P, square.P, atol=1e-10)
        np.testing.assert_allclose(direct.pi, square.pi, atol=1e-10)

    def test_rejects_alpha_one(self):
        """alpha = 1 은 도메인 오류"""
        with self.assertRaises(DomainError):
            chen_alpha_matrix(self.A, 1.0)


@pytest.mark.parametrize("alpha", [0.2, 0.7])
def test_commuting_square_random(rng, alpha):
    """무작위 행렬에서도 변환과 소비 모형이 교환된다"""
    A = random_primitive(rng, 6)
    cfg = SolverConfig()
    triple = eigentriple(A, cfg)
    A_alpha = chen_alpha_matrix(A, alpha)
    direct = chen_transform(A_alpha, eigentriple(A_alpha, cfg))
    square = transformed_alpha_chain(chen_transform(A, triple), alpha, triple.rho)
    np.testing.assert_allclose(direct.P, square.P, atol=1e-9)


class TestHuaModels(unittest.TestCase):
    """Hua 모형에 대한 테스트"""

    def test_gamma_growth_rate(self):
        """rho = 0.5, gamma = 1 이면 1/3"""
        self.assertAlmostEqual(hua_gamma_growth_rate(0.5, 1.0), 1 / 3)

    def test_gamma_matrix_rho(self):
        """rho(A_gamma) = (rho + gamma) / (1 + gamma)"""
        A_gamma = hua_gamma_matrix(two_sector(), 2.0)
        triple = eigentriple(A_gamma, SolverConfig())
        self.assertAlmostEqual(triple.rho, (RHO_TWO_SECTOR + 2.0) / 3.0, places=11)
        self.assertAlmostEqual(1 / triple.rho - 1, hua_gamma_growth_rate(RHO_TWO_SECTOR, 2.0), places=10)
        with self.assertRaises(DomainError):
            hua_gamma_matrix(two_sector(), 0.0)

    def test_inverse_model_exact(self):
        """alpha = 0 이면 B = A^-1 (정확한 유리수)"""
        A = two_sector()
        model = hua_inverse_model(A, 0, rho=RHO_TWO_SECTOR)
        product = model.B @ A.entries
        self.assertEqual(product[0, 0], 1)
        self.assertEqual(product[0, 1], 0)
        self.assertEqual(product[1, 1], 1)
        self.assertEqual(model.B[0, 0], Fraction("0.12") / Fraction("-0.026"))

    def test_inverse_model_growth(self):
        """u B = ((1 - alpha) / rho + alpha) u"""
        A = two_sector(NumericMode.floating())
        u = eigentriple(A, SolverConfig()).u
        alpha = 0.4
        model = hua_inverse_model(A, alpha)
        np.testing.assert_allclose(u @ model.B, (1 + model.growth_rate) * u, rtol=1e-10)
        self.assertAlmostEqual(model.growth_rate, hua_inverse_growth_rate(RHO_TWO_SECTOR, alpha))

    def test_inverse_model_negative_entry(self):
        """alpha = 0.5 이면 B 에 음수 원소가 생긴다"""
        model = hua_inverse_model(two_sector(), Fraction(1, 2), rho=RHO_TWO_SECTOR)
        self.assertTrue(any(x < 0 for x in model.B.ravel()))

    def test_inverse_model_without_consumption(self):
        """alpha = 0 의 성장률은 1 / rho - 1"""
        self.assertAlmostEqual(hua_inverse_growth_rate(RHO_TWO_SECTOR, 0.0), 1 / RHO_TWO_SECTOR - 1)

    def test_gamma_model_flaw(self):
        """gamma -> 1 에서 성장률이 (1 - rho) / (1 + rho) 로 양수에 머문다"""
        rate = hua_gamma_growth_rate(RHO_TWO_SECTOR, 1 - 1e-8)
        limit = (1 - RHO_TWO_SECTOR) / (1 + RHO_TWO_SECTOR)
        self.assertGreater(rate, limit)
        self.assertAlmostEqual(rate, limit, places=7)
        # Chen 재매개화에서는 alpha -> 1 이면 성장률 -> 0
        self.assertLess(delta_from_alpha(1 - 1e-8, RHO_TWO_SECTOR), 1e-7)

    def test_inverse_iterate(self):
        """y_0 포함 n + 1 개 단계"""
        steps = hua_inverse_iterate(two_sector(), [1, 1], 0.5, 3)
        self.assertEqual(len(steps), 4)
        self.assertTrue(all(isinstance(c, Fraction) for c in steps[-1]))


class TestForecast(unittest.TestCase):
    """소비 예측과 소비 가능성 탐색에 대한 테스트"""

    def setUp(self):
        """각 테스트 전 설정"""
        self.A = two_sector(NumericMode.floating())
        self.u = eigentriple(self.A, SolverConfig()).u

    def test_forecast_at_equilibrium(self):
        """x_n = u 이면 x_{n+1} = (1 + delta) u, 소비 = gamma delta u"""
        step = forecast_step(self.A, self.u, 0.1, RHO_TWO_SECTOR)
        np.testing.assert_allclose(step.x_next, 1.1 * self.u, rtol=1e-10)
        np.testing.assert_allclose(step.consumption, GAMMA_AT_TEN_PERCENT * 0.1 * self.u, rtol=1e-8)
        self.assertAlmostEqual(step.plan.alpha, ALPHA_AT_TEN_PERCENT, places=10)

    def test_available_consumption_formula(self):
        """((1 - (1 + delta) rho) / delta) (x_{n+1} - x_n)"""
        xi = available_consumption([1.0, 1.0], [2.0, 3.0], 0.1, RHO_TWO_SECTOR)
        coefficient = (1 - 1.1 * RHO_TWO_SECTOR) / 0.1
        np.testing.assert_allclose(xi, [coefficient, 2 * coefficient])

    def test_max_feasible_alpha_recovers_plan(self):
        """xi(0.5) 를 계획으로 주면 alpha_bar = 0.5"""
        planned = consumption_at(self.A, self.u, 0.5)
        result = max_feasible_alpha(planned, self.u, self.A, RHO_TWO_SECTOR)
        self.assertTrue(result.feasible)
        self.assertAlmostEqual(result.alpha_bar, 0.5, delta=1e-9)
        self.assertAlmostEqual(result.delta, delta_from_alpha(result.alpha_bar, RHO_TWO_SECTOR))

    def test_zero_plan(self):
        """계획 소비가 0 이면 alpha_bar = 0"""
        result = max_feasible_alpha([0.0, 0.0], self.u, self.A, RHO_TWO_SECTOR)
        self.assertTrue(result.feasible)
        self.assertEqual(result.alpha_bar, 0.0)

    def test_infeasible_plan(self):
        """(1 - rho) u 를 넘는 계획은 충족 불가"""
        result = max_feasible_alpha(2 * (1 - RHO_TWO_SECTOR) * self.u, self.u, self.A, RHO_TWO_SECTOR)
        self.assertFalse(result.feasible)
        self.assertIsNone(result.alpha_bar)

    def test_negative_plan(self):
        """음수 계획은 도메인 오류"""
        with self.assertRaises(DomainError):
            max_feasible_alpha([-1.0, 1.0], self.u, self.A, RHO_TWO_SECTOR)

    def test_monotonicity_violation(self):
        """xi(alpha) 가 단조 증가하지 않으면 수렴 오류"""
        def broken(A, x_n, alpha):
            return np.array([10.0, 10.0]) if alpha > 0.9 else np.array([-5.0, -5.0])

        with patch.object(consumption_forecast, "consumption_at", side_effect=broken):
            with self.assertRaises(ConvergenceError):
                max_feasible_alpha([1.0, 1.0], self.u, self.A, RHO_TWO_SECTOR)
