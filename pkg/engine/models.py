"""
경제 최적화 엔진 도메인 모델
"""
from fractions import Fraction
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from common.models import NumericMode, Space
from common.numeric import frozen, is_exact_array, to_float, to_mode

Scalar = Union[Fraction, float]

# 구조 모델 공통 설정: numpy 배열 허용, 생성 후 불변
ARRAY_MODEL = ConfigDict(arbitrary_types_allowed=True, frozen=True)


def _as_array(value) -> np.ndarray:
    array = np.asarray(value)
    if array.dtype == object:
        return frozen(array)
    return frozen(np.asarray(value, dtype=float))


class StructureMatrix(BaseModel):
    """
    구조행렬 A (d x d 비음 소비계수 행렬)

    a_ij 는 제품 i 한 단위를 생산하는 데 소비되는 제품 j 의 양이다.
    exact 모드에서는 Fraction 객체 배열, float 모드에서는 float64 배열을 담는다.
    """
    model_config = ARRAY_MODEL

    entries: np.ndarray = Field(..., description="d x d 소비계수")
    labels: List[str] = Field(..., description="제품 이름 (d 개, 중복 불가)")

    @field_validator("entries", mode="before")
    @classmethod
    def _coerce_entries(cls, value):
        return _as_array(value)

    @model_validator(mode="after")
    def _check_shape(self) -> "StructureMatrix":
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise ValueError(f"구조행렬은 d x d 정방행렬이어야 합니다: shape={a.shape}")
        if len(self.labels) != a.shape[0]:
            raise ValueError(f"라벨 수 {len(self.labels)} 가 차원 {a.shape[0]} 과 다릅니다")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("제품 라벨이 중복되었습니다")
        values = to_float(a)
        if not np.all(np.isfinite(values)):
            raise ValueError("구조행렬 원소는 유한해야 합니다")
        if np.any(values < 0) or (is_exact_array(a) and any(x < 0 for x in a.ravel())):
            raise ValueError("구조행렬 원소는 모두 0 이상이어야 합니다")
        return self

    @classmethod
    def from_rows(cls, rows, labels: Optional[List[str]] = None,
                  mode: Optional[NumericMode] = None) -> "StructureMatrix":
        """
        중첩 리스트로부터 구조행렬 생성

        Args:
            rows: d x d 값
            labels: 제품 이름 (없으면 p1..pd)
            mode: 수치 모드 (없으면 float)
        """
        mode = mode or NumericMode.floating()
        entries = to_mode(rows, mode)
        d = entries.shape[0]
        return cls(entries=entries, labels=list(labels) if labels else [f"p{i + 1}" for i in range(d)])

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def is_exact(self) -> bool:
        return is_exact_array(self.entries)

    def as_float(self) -> np.ndarray:
        return to_float(self.entries)

    def with_entries(self, entries) -> "StructureMatrix":
        """같은 라벨로 새 구조행렬 생성"""
        return StructureMatrix(entries=entries, labels=self.labels)

    def in_mode(self, mode: NumericMode) -> "StructureMatrix":
        return StructureMatrix(entries=to_mode(self.entries, mode), labels=self.labels)


class CWBounds(BaseModel):
    """Collatz-Wielandt 하한/상한"""
    lower: Scalar
    upper: Scalar
    sandwich_guaranteed: bool = Field(True, description="기약 행렬일 때만 lower <= rho <= upper 보장")

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    @property
    def width(self) -> Scalar:
        return self.upper - self.lower


class StructureReport(BaseModel):
    """inspect 명령 요약"""
    dim: int
    nonnegative: bool
    irreducible: bool
    period: Optional[int] = None
    aperiodic: bool = False
    min_positivity_exponent: Optional[int] = None
    amplitude: float
    cw_lower: float
    cw_upper: float


class EigenTriple(BaseModel):
    """
    세 가지 주요 특성 (rho, u, v)

    정규화: sum(v) = d, u.v = 1
    """
    model_config = ARRAY_MODEL

    rho: float = Field(..., gt=0, description="최대 고유값")
    u: np.ndarray = Field(..., description="최대 왼쪽 고유벡터 (행)")
    v: np.ndarray = Field(..., description="최대 오른쪽 고유벡터 (열)")
    residual: float = Field(0.0, ge=0, description="상대 고유쌍 잔차")
    iterations: int = Field(0, ge=0)

    @field_validator("u", "v", mode="before")
    @classmethod
    def _coerce_vector(cls, value):
        return frozen(to_float(value))

    @model_validator(mode="after")
    def _check_normalization(self) -> "EigenTriple":
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ValueError("u, v 는 같은 길이의 1차원 벡터여야 합니다")
        if np.any(self.u <= 0) or np.any(self.v <= 0):
            raise ValueError("최대 고유벡터는 모든 성분이 양수여야 합니다")
        d = self.u.shape[0]
        if abs(self.v.sum() - d) > 1e-9 * d or abs(float(self.u @ self.v) - 1.0) > 1e-9:
            raise ValueError("정규화 조건 sum(v) = d, u.v = 1 위반")
        return self

    @property
    def dim(self) -> int:
        return int(self.u.shape[0])

    @property
    def equilibrium(self) -> np.ndarray:
        """mu = u (.) v"""
        return self.u * self.v


class TransitionChain(BaseModel):
    """
    Chen 변환으로 얻은 전이확률행렬 P 와 평형 mu, 정상분포 pi
    """
    model_config = ARRAY_MODEL

    P: np.ndarray = Field(..., description="행 확률 행렬")
    mu: np.ndarray = Field(..., description="평형 u (.) v")
    pi: np.ndarray = Field(..., description="정상분포")
    source_rho: float = Field(..., gt=0, description="변환에 사용한 rho(A)")
    source: Optional[EigenTriple] = Field(None, description="원 구조행렬의 고유 삼중쌍")

    @field_validator("P", "mu", "pi", mode="before")
    @classmethod
    def _coerce(cls, value):
        return frozen(to_float(value))

    @model_validator(mode="after")
    def _check(self) -> "TransitionChain":
        d = self.P.shape[0]
        if self.P.shape != (d, d) or self.mu.shape != (d,) or self.pi.shape != (d,):
            raise ValueError("전이행렬과 분포의 차원이 맞지 않습니다")
        if np.any(self.pi <= 0) or np.any(self.mu <= 0):
            raise ValueError("평형/정상분포는 양수여야 합니다")
        if abs(self.pi.sum() - 1.0) > 1e-9:
            raise ValueError("정상분포 합이 1 이 아닙니다")
        return self

    @property
    def dim(self) -> int:
        return int(self.P.shape[0])

    def max_row_deviation(self) -> float:
        return float(np.max(np.abs(self.P.sum(axis=1) - 1.0)))


class DualChain(BaseModel):
    """쌍대 전이행렬 Q_u (열 확률 행렬)"""
    model_config = ARRAY_MODEL

    Q: np.ndarray = Field(..., description="열 확률 행렬")
    equilibrium: np.ndarray = Field(..., description="오른쪽 평형 u (.) v")

    @field_validator("Q", "equilibrium", mode="before")
    @classmethod
    def _coerce(cls, value):
        return frozen(to_float(value))

    def max_column_deviation(self) -> float:
        return float(np.max(np.abs(self.Q.sum(axis=0) - 1.0)))


class Trajectory(BaseModel):
    """
    반복 수열 x_0 .. x_N (x_{k+1} M = x_k)
    """
    model_config = ARRAY_MODEL

    steps: List[np.ndarray] = Field(..., min_length=1, description="단계별 d-벡터")
    space: Space = Field(Space.A_SPACE, description="A 공간 또는 P 공간")
    matrix: np.ndarray = Field(..., description="반복에 사용한 행렬 M")
    numeric_mode: NumericMode = Field(default_factory=NumericMode.floating)
    horizon: int = Field(..., ge=0, description="요청한 최대 단계 수")
    labels: Optional[List[str]] = None

    @field_validator("steps", mode="before")
    @classmethod
    def _coerce_steps(cls, value):
        return [_as_array(step) for step in value]

    @field_validator("matrix", mode="before")
    @classmethod
    def _coerce_matrix(cls, value):
        return _as_array(value)

    @property
    def last_index(self) -> int:
        return len(self.steps) - 1

    def as_float(self) -> np.ndarray:
        """(N+1) x d float 배열"""
        return np.vstack([to_float(step) for step in self.steps])


class StabilityReport(BaseModel):
    """붕괴 시각, 붕괴 제품, 위기 구간"""
    collapse_time: Optional[int] = Field(None, description="첫 음수 성분이 나타난 단계 T")
    collapse_product: Optional[int] = Field(None, description="첫 음수 성분 제품 인덱스 (0부터)")
    collapse_label: Optional[str] = None
    crisis_window: Optional[Tuple[int, int]] = Field(None, description="T-1 에서 끝나는 위기 구간")
    terminal_magnitudes: Tuple[float, float] = Field(..., description="마지막 단계 (max, min)")
    steps_run: int = Field(..., ge=0)
    horizon: int = Field(..., ge=0)
    space: Space = Space.A_SPACE

    @model_validator(mode="after")
    def _window_ends_before_collapse(self) -> "StabilityReport":
        if self.crisis_window is not None:
            if self.collapse_time is None or self.crisis_window[1] != self.collapse_time - 1:
                raise ValueError("위기 구간은 collapse_time - 1 에서 끝나야 합니다")
        return self


class ConsumptionPlan(BaseModel):
    """
    소비 계획 (alpha, gamma, delta)

    gamma = alpha / (1 - alpha), delta = 1 / rho_alpha - 1,
    rho_alpha = (1 - alpha) rho_A + alpha
    """
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., ge=0, lt=1, description="소비 파라미터")
    gamma: float = Field(..., ge=0, description="소비 배수")
    delta: float = Field(..., description="성장률")
    rho_A: float = Field(..., gt=0, description="원 구조행렬의 rho")
    rho_alpha: float = Field(..., gt=0, description="rho(A_alpha)")

    @model_validator(mode="after")
    def _check_identities(self) -> "ConsumptionPlan":
        tol = 1e-12
        if abs(self.gamma - self.alpha / (1 - self.alpha)) > tol * max(1.0, self.gamma):
            raise ValueError("gamma = alpha / (1 - alpha) 위반")
        if abs(self.rho_alpha - ((1 - self.alpha) * self.rho_A + self.alpha)) > tol:
            raise ValueError("rho_alpha = (1 - alpha) rho + alpha 위반")
        if abs(self.delta - (1 / self.rho_alpha - 1)) > tol * max(1.0, abs(self.delta)):
            raise ValueError("delta = 1 / rho_alpha - 1 위반")
        return self

    @classmethod
    def from_alpha(cls, alpha: float, rho: float) -> "ConsumptionPlan":
        rho_alpha = (1 - alpha) * rho + alpha
        return cls(alpha=alpha, gamma=alpha / (1 - alpha), delta=1 / rho_alpha - 1,
                   rho_A=rho, rho_alpha=rho_alpha)


class ForecastStep(BaseModel):
    """성장률 -> 소비 파라미터 -> 가용 소비 계산 결과"""
    model_config = ARRAY_MODEL

    plan: ConsumptionPlan
    x_next: np.ndarray = Field(..., description="x_{n+1}")
    consumption: np.ndarray = Field(..., description="가용 소비 xi_n")


class FeasibilityResult(BaseModel):
    """계획 소비를 충족하는 최소 소비 파라미터 탐색 결과"""
    feasible: bool
    alpha_bar: Optional[float] = None
    delta: Optional[float] = None
    iterations: int = 0
    message: str = ""


class RankingReport(BaseModel):
    """평형 mu 기준 제품 순위"""
    order: List[int] = Field(..., description="mu 내림차순 제품 인덱스")
    values: List[float] = Field(..., description="제품별 mu")
    equilibrium_multiples: List[float] = Field(..., description="mu_i / mean(mu)")
    labels: List[str]

    @property
    def ranked_labels(self) -> List[str]:
        return [self.labels[i] for i in self.order]


class ClassificationReport(BaseModel):
    """누적분포 기반 취약/중간/기간 제품 분류"""
    ascending_order: List[int] = Field(..., description="pi 오름차순 제품 인덱스")
    cumulative: List[float] = Field(..., description="정렬된 pi 의 누적합")
    weak: List[int] = Field(default_factory=list)
    intermediate: List[int] = Field(default_factory=list)
    pillar: List[int] = Field(default_factory=list)
    thresholds: Tuple[float, float]
    labels: List[str]

    def labels_of(self, indices: List[int]) -> List[str]:
        return [self.labels[i] for i in indices]


class OptimizationResult(BaseModel):
    """목표 평형을 갖는 최적 구조행렬"""
    model_config = ARRAY_MODEL

    A_tilde: StructureMatrix
    u_tilde: np.ndarray = Field(..., description="목표 왼쪽 고유벡터")
    v_tilde: np.ndarray = Field(..., description="v (.) u (.) u_tilde^-1")
    w: np.ndarray = Field(..., description="변환 벡터 u_tilde (.) u^-1")
    rho: float = Field(..., gt=0, description="보존된 rho")

    @field_validator("u_tilde", "v_tilde", "w", mode="before")
    @classmethod
    def _coerce(cls, value):
        return frozen(to_float(value))
