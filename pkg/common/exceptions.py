"""
예외 계층 정의
각 예외는 CLI 종료 코드(exit_code)를 가진다
"""
from typing import Any, Optional, Tuple


class EconomyError(Exception):
    """모든 도메인 예외의 기본 클래스"""
    exit_code = 1
    label = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class ConfigurationError(EconomyError):
    """잘못된 설정값"""
    exit_code = 2
    label = "config"


class TableParseError(EconomyError):
    """
    구조행렬 CSV 파싱 오류

    Args:
        message: 오류 메시지
        kind: 오류 종류 (empty, dimension, negative, duplicate_label, malformed_number, header)
        row: 오류가 난 데이터 행 번호 (1부터, 헤더 제외)
        column: 오류가 난 열 번호 (1부터, 라벨 열 제외)
    """
    exit_code = 3

    def __init__(self, message: str, kind: str, row: Optional[int] = None, column: Optional[int] = None):
        location = ""
        if row is not None:
            location += f" (row {row}"
            location += f", column {column})" if column is not None else ")"
        super().__init__(message + location)
        self.kind = kind
        self.row = row
        self.column = column

    @property
    def label(self) -> str:
        return self.kind


class ModelError(EconomyError):
    """경제 모델 전제 조건 위반"""
    exit_code = 4
    label = "model"


class StructuralError(ModelError):
    """기약성/비주기성 등 구조 조건 위반"""
    label = "structure"


class AbnormalEconomyError(ModelError):
    """ρ(A) >= 1 인 비정상 경제 시스템"""
    label = "abnormal"


class SingularMatrixError(ModelError):
    """가역이 아닌 구조행렬"""
    label = "singular"


class DomainError(EconomyError):
    """인자 값 범위 오류"""
    exit_code = 5
    label = "domain"


class ConvergenceError(EconomyError):
    """
    반복 솔버 수렴 실패

    Args:
        message: 오류 메시지
        interval: 마지막 C-W 구간 (lower, upper)
        iterations: 수행한 반복 횟수
    """
    exit_code = 6
    label = "convergence"

    def __init__(self, message: str, interval: Optional[Tuple[float, float]] = None, iterations: int = 0):
        super().__init__(message)
        self.interval = interval
        self.iterations = iterations


class SingularShiftError(ConvergenceError):
    """역멱법 shift 시스템을 풀 수 없음"""
    label = "singular-shift"


class NumericOverflowError(EconomyError):
    """
    float 모드 반복 중 오버플로

    Args:
        message: 오류 메시지
        trajectory: 마지막으로 유효했던 단계까지의 궤적
    """
    exit_code = 7
    label = "overflow"

    def __init__(self, message: str, trajectory: Any = None):
        super().__init__(message)
        self.trajectory = trajectory
