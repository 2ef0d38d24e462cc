"""
공용 테스트 픽스처
"""
import os
import sys

import numpy as np
import pytest

# 프로젝트 루트 경로를 sys.path에 추가
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from common.models import NumericMode  # noqa: E402
from tests.samples import TABLE_PATH, two_sector  # noqa: E402


@pytest.fixture
def exact_matrix():
    return two_sector(NumericMode.exact())


@pytest.fixture
def float_matrix():
    return two_sector(NumericMode.floating())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def table_path() -> str:
    return TABLE_PATH


@pytest.fixture(autouse=True)
def _isolated_env(monkeypatch):
    """개발자 환경의 ECONOPT_ 변수가 테스트에 섞이지 않도록 제거"""
    for key in list(os.environ):
        if key.startswith("ECONOPT_"):
            monkeypatch.delenv(key, raising=False)
