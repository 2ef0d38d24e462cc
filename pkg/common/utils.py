"""
직렬화 및 파일 출력 유틸리티
"""
import json
import logging
import os
import tempfile
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import BaseModel

logger = logging.getLogger(__name__)

# JSON 실수 출력 유효자리수
FLOAT_DIGITS = 15


def _fixed(value: float) -> Union[float, str]:
    if not np.isfinite(value):
        return str(value)
    return float(format(value, f".{FLOAT_DIGITS}g"))


def to_jsonable(obj: Any) -> Any:
    """
    보고서 객체를 JSON 호환 값으로 변환

    pydantic 모델, numpy 배열, Fraction, Enum, 집합을 처리한다.
    집합은 정렬된 리스트로 바꿔 출력 순서를 고정한다.
    """
    if isinstance(obj, BaseModel):
        return to_jsonable(obj.model_dump())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        if obj.denominator == 1:
            return int(obj.numerator)
        return _fixed(float(obj))
    if isinstance(obj, (float, np.floating)):
        return _fixed(float(obj))
    if isinstance(obj, complex):
        return {"re": _fixed(obj.real), "im": _fixed(obj.imag)}
    if isinstance(obj, Path):
        return obj.as_posix()
    return obj


def dump_json(payload: Any) -> str:
    """정렬된 키, 고정 유효자리수로 결정적인 JSON 문자열 생성"""
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def atomic_write(path: Union[str, Path], text: str) -> Path:
    """
    같은 디렉토리의 임시 파일에 쓴 뒤 이름을 바꿔 원자적으로 저장

    Args:
        path: 대상 파일 경로
        text: 저장할 내용

    Returns:
        저장된 파일 경로
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    logger.debug(f"파일 저장 완료: {target}")
    return target
