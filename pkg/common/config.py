"""
설정 및 환경 변수 모듈
"""
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import dotenv_values, load_dotenv
from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from common.exceptions import ConfigurationError
from common.models import NumericKind, NumericMode, Preconditioning, SolverConfig, SolverKind

# 로깅 설정
logger = logging.getLogger(__name__)

# 프로젝트 루트 디렉토리 찾기
project_root = Path(__file__).parent.parent
env_path = project_root / ".env"

# .env 파일 로드
load_dotenv(env_path)

ENV_PREFIX = "ECONOPT_"


class EconomySettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix=ENV_PREFIX, extra="ignore")

    # 수치 모드
    NUMERIC_MODE: NumericKind = NumericKind.EXACT
    FLOAT_TOLERANCE: float = 1e-12

    # 솔버 설정
    SOLVER: SolverKind = SolverKind.POWER
    SOLVER_TOLERANCE: float = 1e-12
    MAX_ITERATIONS: int = Field(10000, ge=1)
    PRECONDITIONING: Preconditioning = Preconditioning.NONE
    SHIFT_MARGIN: float = 0.5

    # 시뮬레이션 설정
    HORIZON: int = Field(1000, ge=1)
    DET_FLOOR: float = 1e-12
    CRISIS_THRESHOLD: float = 0.10

    # 분류 임계값
    THETA_WEAK: float = 0.05
    THETA_PILLAR: float = 0.50
    THETA_WEAK_CORE: float = 0.01

    # 출력
    OUTPUT_DIR: Path = Path("output")
    LOG_LEVEL: str = "INFO"

    @model_validator(mode="after")
    def _check_ranges(self) -> "EconomySettings":
        if self.NUMERIC_MODE == NumericKind.FLOAT and self.FLOAT_TOLERANCE <= 0:
            raise ValueError("float 모드에서는 FLOAT_TOLERANCE 가 양수여야 합니다")
        if self.SOLVER_TOLERANCE <= 0 or self.SHIFT_MARGIN <= 0 or self.DET_FLOOR < 0:
            raise ValueError("솔버 허용오차와 shift 여유 계수는 양수여야 합니다")
        if not 0 < self.THETA_WEAK < self.THETA_PILLAR <= 1:
            raise ValueError("임계값 순서는 0 < THETA_WEAK < THETA_PILLAR <= 1 이어야 합니다")
        if not 0 < self.THETA_WEAK_CORE < self.THETA_WEAK:
            raise ValueError("THETA_WEAK_CORE 는 (0, THETA_WEAK) 범위여야 합니다")
        if self.CRISIS_THRESHOLD < 0:
            raise ValueError("CRISIS_THRESHOLD 는 음수일 수 없습니다")
        return self

    def numeric_mode(self) -> NumericMode:
        """설정된 수치 모드 반환"""
        if self.NUMERIC_MODE == NumericKind.EXACT:
            return NumericMode.exact()
        return NumericMode.floating(self.FLOAT_TOLERANCE)

    def solver_config(self) -> SolverConfig:
        """설정된 솔버 설정 반환"""
        return SolverConfig(
            tolerance=self.SOLVER_TOLERANCE,
            max_iterations=self.MAX_ITERATIONS,
            preconditioning=self.PRECONDITIONING,
            shift_margin=self.SHIFT_MARGIN,
            solver=self.SOLVER,
        )


def _normalize_key(key: str) -> str:
    key = key.strip().upper().replace("-", "_")
    if key.startswith(ENV_PREFIX):
        key = key[len(ENV_PREFIX):]
    return key


def read_config_file(path: Path) -> Dict[str, Any]:
    """
    key = value 형식 설정 파일 읽기

    Args:
        path: 설정 파일 경로

    Returns:
        필드 이름으로 정규화된 설정 딕셔너리
    """
    if not Path(path).is_file():
        raise ConfigurationError(f"설정 파일을 찾을 수 없습니다: {path}")
    values = dotenv_values(path)
    return {_normalize_key(k): v for k, v in values.items() if v is not None}


def load_settings(config_file: Optional[Path] = None, **overrides: Any) -> EconomySettings:
    """
    환경 변수 < 설정 파일 < 명시적 인자 순으로 설정 로드

    Args:
        config_file: key = value 설정 파일 (선택)
        **overrides: CLI 플래그 등 명시적 재정의 값 (None 은 무시)

    Returns:
        EconomySettings: 검증된 설정
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
        logger.debug(f"설정 파일 로드: {config_file}")
    values.update({_normalize_key(k): v for k, v in overrides.items() if v is not None})
    try:
        return EconomySettings(**values)
    except ValidationError as e:
        raise ConfigurationError(f"설정 검증 실패: {e}") from e
