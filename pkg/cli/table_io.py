"""
구조행렬 CSV 입출력
헤더 `product,<label_1>,...,<label_d>` 와 d 개 데이터 행 `label_i,a_i1,...,a_id` 형식
"""
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from common.exceptions import ConfigurationError, DomainError, TableParseError
from common.models import NumericMode
from common.numeric import as_fraction, to_float
from common.utils import atomic_write
from engine.models import StructureMatrix, Trajectory

logger = logging.getLogger(__name__)

HEADER_KEY = "product"
_RAGGED_LINE = re.compile(r"line (\d+), saw (\d+)")


def _read_cells(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                           skipinitialspace=True, skip_blank_lines=True)
    except pd.errors.EmptyDataError as e:
        raise TableParseError("빈 테이블 파일입니다", kind="empty") from e
    except pd.errors.ParserError as e:
        match = _RAGGED_LINE.search(str(e))
        row = int(match.group(1)) - 1 if match else None
        raise TableParseError(f"행의 열 수가 헤더와 다릅니다: {e}", kind="dimension", row=row) from e


def _is_missing(cell) -> bool:
    return cell is None or (isinstance(cell, float) and np.isnan(cell))


def _parse_entry(cell: str, row: int, column: int) -> Fraction:
    if _is_missing(cell):
        raise TableParseError("값이 비어 있습니다", kind="dimension", row=row, column=column)
    text = str(cell).strip()
    if not text:
        raise TableParseError("값이 비어 있습니다", kind="malformed_number", row=row, column=column)
    try:
        value = as_fraction(text)
    except DomainError as e:
        raise TableParseError(f"숫자로 읽을 수 없는 값 {text!r}", kind="malformed_number",
                              row=row, column=column) from e
    if value < 0:
        raise TableParseError(f"음수 계수 {text}", kind="negative", row=row, column=column)
    return value


def parse_table(path: Union[str, Path], mode: Optional[NumericMode] = None) -> Tuple[StructureMatrix, List[str]]:
    """
    구조행렬 CSV 읽기

    값은 10진 문자열 그대로 유리수로 읽은 뒤 수치 모드로 변환한다 ("0.14" -> 7/50).

    Args:
        path: CSV 파일 경로
        mode: 수치 모드 (없으면 exact-rational)

    Returns:
        (StructureMatrix, 라벨 목록)

    Raises:
        TableParseError: kind 가 empty / header / dimension / duplicate_label / malformed_number / negative
    """
    mode = mode or NumericMode.exact()
    source = Path(path)
    if not source.is_file():
        raise ConfigurationError(f"테이블 파일을 찾을 수 없습니다: {source}")

    cells = _read_cells(source)
    if cells.empty:
        raise TableParseError("빈 테이블 파일입니다", kind="empty")

    header = [str(c).strip() for c in cells.iloc[0].tolist()]
    if header[0].lower() != HEADER_KEY:
        raise TableParseError(f"첫 열 헤더는 '{HEADER_KEY}' 이어야 합니다: {header[0]!r}", kind="header")
    labels = header[1:]
    if not labels or any(not label for label in labels):
        raise TableParseError("헤더에 제품 라벨이 없습니다", kind="header")
    seen = set()
    for column, label in enumerate(labels, start=1):
        if label in seen:
            raise TableParseError(f"중복된 제품 라벨 {label!r}", kind="duplicate_label", column=column)
        seen.add(label)

    d = len(labels)
    body = cells.iloc[1:]
    if len(body) != d:
        row = min(len(body), d) + 1
        raise TableParseError(f"데이터 행 수 {len(body)} 가 라벨 수 {d} 와 다릅니다", kind="dimension", row=row)

    rows: List[List[Fraction]] = []
    row_labels: List[str] = []
    for row, record in enumerate(body.itertuples(index=False), start=1):
        values = list(record)
        name = "" if _is_missing(values[0]) else str(values[0]).strip()
        if name in row_labels:
            raise TableParseError(f"중복된 제품 라벨 {name!r}", kind="duplicate_label", row=row)
        if name != labels[row - 1]:
            raise TableParseError(f"행 라벨 {name!r} 이 헤더 라벨 {labels[row - 1]!r} 과 다릅니다",
                                  kind="header", row=row)
        row_labels.append(name)
        rows.append([_parse_entry(values[column], row, column) for column in range(1, d + 1)])

    matrix = StructureMatrix.from_rows(rows, labels=labels, mode=mode)
    logger.info(f"구조행렬 로드 완료: {source.name}, d={d}, 모드={mode.kind.value}")
    return matrix, labels


def fraction_text(value: Fraction) -> str:
    """유한소수로 표현되면 10진 표기, 아니면 p/q"""
    denominator = value.denominator
    twos = fives = 0
    rest = denominator
    while rest % 2 == 0:
        rest //= 2
        twos += 1
    while rest % 5 == 0:
        rest //= 5
        fives += 1
    if rest != 1:
        return f"{value.numerator}/{denominator}"
    places = max(twos, fives)
    scaled = value.numerator * (10 ** places // denominator)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled))
    if places == 0:
        return sign + digits
    digits = digits.rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _entry_text(value) -> str:
    if isinstance(value, Fraction):
        return fraction_text(value)
    return repr(float(value))


def write_table(path: Union[str, Path], matrix: StructureMatrix) -> Path:
    """parse_table 의 역연산 (원자적 저장)"""
    records = [[label] + [_entry_text(v) for v in row] for label, row in zip(matrix.labels, matrix.entries)]
    frame = pd.DataFrame(records, columns=[HEADER_KEY] + list(matrix.labels))
    return atomic_write(path, frame.to_csv(index=False, lineterminator="\n"))


def write_trajectory_csv(path: Union[str, Path], trajectory: Trajectory) -> Path:
    """궤적 CSV: `step,<label_1>,...,<label_d>` 한 단계당 한 행"""
    d = trajectory.as_float().shape[1]
    labels = trajectory.labels or [f"p{i + 1}" for i in range(d)]
    records = []
    for step, values in enumerate(trajectory.as_float()):
        records.append([step] + [repr(float(v)) for v in values])
    frame = pd.DataFrame(records, columns=["step"] + list(labels))
    return atomic_write(path, frame.to_csv(index=False, lineterminator="\n"))


def parse_vector(text: str, mode: NumericMode) -> np.ndarray:
    """쉼표로 구분된 벡터 인자 ("44.344,20")"""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ConfigurationError("빈 벡터 인자입니다")
    try:
        values = [as_fraction(p) for p in parts]
    except DomainError as e:
        raise ConfigurationError(f"벡터 인자를 읽을 수 없습니다: {text!r}") from e
    if mode.is_exact:
        out = np.empty(len(values), dtype=object)
        out[:] = values
        return out
    return to_float(np.array(values, dtype=object))
