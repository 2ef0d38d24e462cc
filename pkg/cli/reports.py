"""
명령별 JSON 보고서 구성
"""
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from common.exceptions import SingularMatrixError
from common.models import Direction, NumericMode, Side, SolverConfig, SolverKind
from common.numeric import to_float
from engine.chen_transform import (STOCHASTIC_TOLERANCE, chen_transform, dual_chain, inverse_chen,
                                   is_row_stochastic, similarity_transform, stationary_residual)
from engine.consumption_forecast import chen_alpha_matrix, transformed_alpha_chain
from engine.eigensolver import cw_interval_history, dense_eigentriple, eigentriple
from engine.matrix_core import structure_report
from engine.models import (ClassificationReport, DualChain, EigenTriple, OptimizationResult,
                           RankingReport, StabilityReport, StructureMatrix, TransitionChain)
from engine.stability import convert, iterate
from engine.structure_opt import dual_invariance_check, invariance_check, optimize_structure

logger = logging.getLogger(__name__)

# 보고용 기준 배율: 마지막 성분을 이 값으로 맞춘다
REFERENCE_SCALE = 20.0
INVARIANT_SEED = 0
ALPHA_PROBE = 0.3


def matrix_payload(entries, labels: List[str]) -> Dict[str, Any]:
    """행 우선 행렬 + 라벨"""
    return {"labels": list(labels), "rows": to_float(entries).tolist()}


def reference_scaled(vector, scale: float = REFERENCE_SCALE) -> List[float]:
    values = to_float(vector)
    return (values * (scale / values[-1])).tolist()


def inspect_payload(matrix: StructureMatrix) -> Dict[str, Any]:
    report = structure_report(matrix)
    payload = report.model_dump()
    payload["labels"] = matrix.labels
    return payload


def eigen_payload(matrix: StructureMatrix, triple: EigenTriple,
                  scale: float = REFERENCE_SCALE) -> Dict[str, Any]:
    return {
        "labels": matrix.labels,
        "rho": triple.rho,
        "u": triple.u,
        "v": triple.v,
        "mu": triple.equilibrium,
        "u_scaled": reference_scaled(triple.u, scale),
        "mu_scaled": reference_scaled(triple.equilibrium, scale),
        "residual": triple.residual,
        "iterations": triple.iterations,
        "reference_scale": scale,
    }


def transform_payload(matrix: StructureMatrix, chain: TransitionChain, dual: DualChain) -> Dict[str, Any]:
    return {
        "P": matrix_payload(chain.P, matrix.labels),
        "pi": chain.pi,
        "mu": chain.mu,
        "source_rho": chain.source_rho,
        "max_row_deviation": chain.max_row_deviation(),
        "Q": matrix_payload(dual.Q, matrix.labels),
        "max_column_deviation": dual.max_column_deviation(),
    }


def stability_payload(report: StabilityReport, artifacts: Dict[str, str]) -> Dict[str, Any]:
    payload = report.model_dump()
    payload["artifacts"] = artifacts
    return payload


def ranking_payload(report: RankingReport) -> Dict[str, Any]:
    payload = report.model_dump()
    payload["ranked_labels"] = report.ranked_labels
    return payload


def classification_payload(report: ClassificationReport, core: List[int],
                           artifacts: Dict[str, str]) -> Dict[str, Any]:
    payload = report.model_dump()
    payload["weak_labels"] = report.labels_of(report.weak)
    payload["intermediate_labels"] = report.labels_of(report.intermediate)
    payload["pillar_labels"] = report.labels_of(report.pillar)
    payload["weak_core"] = core
    payload["weak_core_labels"] = report.labels_of(core)
    payload["artifacts"] = artifacts
    return payload


def optimize_payload(result: OptimizationResult, alpha: float, checks: Dict[str, Optional[bool]]) -> Dict[str, Any]:
    return {
        "alpha": alpha,
        "A_tilde": matrix_payload(result.A_tilde.entries, result.A_tilde.labels),
        "u_tilde": result.u_tilde,
        "v_tilde": result.v_tilde,
        "w": result.w,
        "rho": result.rho,
        "checks": checks,
    }


def sweep_payload(rows: List[Tuple[int, Optional[int]]], reference: List[float]) -> Dict[str, Any]:
    return {
        "reference_initial": reference,
        "rows": [{"decimals": k, "collapse_time": T} for k, T in rows],
    }


def _check(value: float, passed: bool) -> Dict[str, Any]:
    return {"value": float(value), "passed": bool(passed)}


def invariant_checks(matrix: StructureMatrix, cfg: SolverConfig,
                     det_floor: float = 1e-12) -> Dict[str, Any]:
    """
    주어진 구조행렬에 대한 성질 점검 모음

    고유쌍 교차검증, Chen 변환 성질, 소비 모형 불변량, 구조 최적화 불변성, 공간 변환 항등식을 확인한다.
    """
    rng = np.random.default_rng(INVARIANT_SEED)
    d = matrix.dim
    tol = cfg.tolerance
    checks: Dict[str, Any] = {}

    triple = eigentriple(matrix, cfg)
    rho = triple.rho

    history = cw_interval_history(matrix, Side.RIGHT, cfg)
    slack = 1e-12 * rho
    worst = max((max(lo - rho, rho - up) for lo, up in history), default=0.0)
    checks["cw_sandwich"] = _check(worst, worst <= slack)

    other_kind = SolverKind.INVERSE_POWER if cfg.solver == SolverKind.POWER else SolverKind.POWER
    other = eigentriple(matrix, cfg.model_copy(update={"solver": other_kind}))
    gap = abs(other.rho - rho) / rho
    checks["solver_agreement"] = _check(gap, gap <= 10 * tol)

    dense = dense_eigentriple(matrix)
    gap = abs(dense.rho - rho) / rho
    checks["dense_oracle"] = _check(gap, gap <= 1e-10)

    chain = chen_transform(matrix, triple)
    checks["row_stochastic"] = _check(chain.max_row_deviation(), chain.max_row_deviation() <= STOCHASTIC_TOLERANCE)
    drift = stationary_residual(chain, 100)
    checks["stationary_drift"] = _check(drift, drift <= d * STOCHASTIC_TOLERANCE)

    if d >= 2:
        perturbed = triple.v.copy()
        perturbed[0] *= 1.1
        checks["iff_perturbed_w"] = _check(0.0, not is_row_stochastic(similarity_transform(matrix, rho, perturbed)))

    dual = dual_chain(matrix, triple)
    checks["dual_column_stochastic"] = _check(dual.max_column_deviation(),
                                              dual.max_column_deviation() <= STOCHASTIC_TOLERANCE)

    w = rng.uniform(0.5, 2.0, size=d)
    A_w = inverse_chen(chain.P, w)
    recovered = chen_transform(A_w, eigentriple(A_w, cfg))
    gap = float(np.max(np.abs(recovered.P - chain.P)))
    checks["inverse_chen_roundtrip"] = _check(gap, gap <= 1e-9)

    A_alpha = chen_alpha_matrix(matrix, ALPHA_PROBE)
    triple_alpha = eigentriple(A_alpha, cfg)
    gap = float(max(np.max(np.abs(triple_alpha.u - triple.u) / triple.u),
                    np.max(np.abs(triple_alpha.v - triple.v) / triple.v)))
    checks["alpha_eigenvectors"] = _check(gap, gap <= 1e-8)
    expected = (1 - ALPHA_PROBE) * rho + ALPHA_PROBE
    gap = abs(triple_alpha.rho - expected)
    checks["alpha_rho_linear"] = _check(gap, gap <= 1e-10)
    square = transformed_alpha_chain(chain, ALPHA_PROBE, rho)
    gap = float(np.max(np.abs(chen_transform(A_alpha, triple_alpha).P - square.P)))
    checks["commuting_square"] = _check(gap, gap <= 1e-9)

    target = triple.u * rng.uniform(0.5, 2.0, size=d)
    result = optimize_structure(matrix, triple, target)
    checks["optimization_invariance"] = _check(0.0, invariance_check(matrix, result, triple))
    checks["optimization_dual_invariance"] = _check(0.0, dual_invariance_check(matrix, result, triple))

    try:
        x0 = triple.u * (1.0 + 0.01 * rng.uniform(size=d))
        trajectory = iterate(matrix, x0, 5, NumericMode.floating(), det_floor, labels=matrix.labels)
        converted = convert(trajectory, triple, Direction.A_TO_P)
        direct = iterate(chain.P, to_float(x0) * triple.v, trajectory.last_index, NumericMode.floating(), det_floor)
        gap = max(float(np.max(np.abs(a - b)) / np.max(np.abs(b)))
                  for a, b in zip(converted.as_float(), direct.as_float()))
        checks["conversion_identity"] = _check(gap, gap <= 1e-9)
    except SingularMatrixError as e:
        logger.warning(f"가역이 아닌 행렬이라 공간 변환 항등식 점검을 생략합니다: {e}")
        checks["conversion_identity"] = None

    passed = all(c["passed"] for c in checks.values() if c is not None)
    logger.info(f"성질 점검 {len(checks)} 건, 전체 통과={passed}")
    return {"checks": checks, "all_passed": passed, "rho": rho}

