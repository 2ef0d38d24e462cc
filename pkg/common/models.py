"""
공통 타입 정의 모듈
수치 모드, 솔버 설정 등 모든 패키지가 공유하는 값 타입과 열거형
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class NumericKind(str, Enum):
    """수치 연산 방식"""
    EXACT = "exact-rational"
    FLOAT = "binary-float"


class Side(str, Enum):
    """고유벡터 방향 (left: 행벡터, right: 열벡터)"""
    LEFT = "left"
    RIGHT = "right"


class Preconditioning(str, Enum):
    """고유값 계산 전처리 방식"""
    NONE = "none"
    QUASI_SYMMETRIZE = "quasi-symmetrize"
    SMOOTH_WITH_GUESS = "smooth-with-guess"


class SolverKind(str, Enum):
    """최대 고유쌍 계산 방법"""
    POWER = "power"
    INVERSE_POWER = "inverse-power"


class Space(str, Enum):
    """반복 수열이 속한 공간 (구조행렬 A 또는 전이확률행렬 P)"""
    A_SPACE = "A-space"
    P_SPACE = "P-space"


class Direction(str, Enum):
    """A 공간과 P 공간 사이 변환 방향"""
    A_TO_P = "A-to-P"
    P_TO_A = "P-to-A"


class NumericMode(BaseModel):
    """
    수치 모드

    exact-rational 모드는 Fraction 기반으로 허용오차가 정확히 0이고,
    binary-float 모드는 float64 와 양의 허용오차를 사용한다.
    """
    model_config = ConfigDict(frozen=True)

    kind: NumericKind = Field(NumericKind.FLOAT, description="수치 모드 태그")
    precision: Optional[int] = Field(53, description="부동소수점 가수 비트 수 (float 모드 전용)")
    tolerance: float = Field(1e-12, ge=0, description="근사 비교에 쓰이는 허용오차")

    @model_validator(mode="after")
    def _tolerance_matches_kind(self) -> "NumericMode":
        if self.kind == NumericKind.EXACT and self.tolerance != 0:
            raise ValueError("exact-rational 모드의 허용오차는 0 이어야 합니다")
        if self.kind == NumericKind.FLOAT and self.tolerance == 0:
            raise ValueError("binary-float 모드의 허용오차는 양수여야 합니다")
        return self

    @classmethod
    def exact(cls) -> "NumericMode":
        return cls(kind=NumericKind.EXACT, precision=None, tolerance=0)

    @classmethod
    def floating(cls, tolerance: float = 1e-12) -> "NumericMode":
        return cls(kind=NumericKind.FLOAT, precision=53, tolerance=tolerance)

    @property
    def is_exact(self) -> bool:
        return self.kind == NumericKind.EXACT


class SolverConfig(BaseModel):
    """고유쌍 솔버 설정"""
    model_config = ConfigDict(frozen=True)

    tolerance: float = Field(1e-12, gt=0, description="C-W 구간 상대 폭 수렴 기준")
    max_iterations: int = Field(10000, ge=1, description="최대 반복 횟수")
    preconditioning: Preconditioning = Field(Preconditioning.NONE, description="전처리 방식")
    shift_margin: float = Field(0.5, gt=0, description="역멱법 shift 여유 계수")
    solver: SolverKind = Field(SolverKind.POWER, description="eigentriple 이 사용할 솔버")
