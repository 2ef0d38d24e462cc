import json
import os
import sys
import unittest
from unittest.mock import patch

import pytest

# 프로젝트 루트 경로를 sys.path에 추가
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from cli.main import build_parser, run_command
from tests.samples import TABLE_PATH, U_SCALED_FIRST


@pytest.fixture(autouse=True)
def _quiet_logging():
    """run_command 가 pytest 로그 핸들러를 교체하지 않도록 basicConfig 를 막는다"""
    with patch("cli.main.logging.basicConfig"):
        yield


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    payload = json.loads(captured.out) if code in (0, 1) and captured.out else None
    return code, payload, captured.err


def write_csv(tmp_path, text: str) -> str:
    path = tmp_path / "table.csv"
    path.write_text(text, encoding="utf-8")
    return str(path)


class TestParser(unittest.TestCase):
    """명령행 파서에 대한 테스트"""

    def test_stability_requires_initial(self):
        """stability 는 --initial 이 필요"""
        with self.assertRaises(SystemExit):
            build_parser().parse_args(["stability", TABLE_PATH])

    def test_defaults(self):
        """sweep 기본 자리수 범위는 3-8"""
        args = build_parser().parse_args(["sweep", TABLE_PATH])
        self.assertEqual(args.decimals, "3-8")
        self.assertEqual(args.reference_scale, 20.0)


def test_eigen(tmp_path, capsys):
    """eigen: rho 와 배율 조정된 u"""
    code, payload, _ = run(capsys, "eigen", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["rho"] == pytest.approx(0.430407823836, abs=1e-12)
    assert payload["u_scaled"][0] == pytest.approx(U_SCALED_FIRST, abs=5e-9)
    assert payload["u_scaled"][1] == pytest.approx(20.0)
    assert (tmp_path / "eigen.json").is_file()


def test_output_is_deterministic(tmp_path, capsys):
    """같은 입력이면 같은 JSON"""
    run(capsys, "transform", TABLE_PATH, "--output-dir", str(tmp_path / "first"))
    run(capsys, "transform", TABLE_PATH, "--output-dir", str(tmp_path / "second"))
    first = (tmp_path / "first" / "transform.json").read_bytes()
    second = (tmp_path / "second" / "transform.json").read_bytes()
    assert first == second


def test_inspect(tmp_path, capsys):
    """inspect: 기약, 비주기, 양성 지수 1"""
    code, payload, _ = run(capsys, "inspect", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["irreducible"] is True
    assert payload["period"] == 1
    assert payload["min_positivity_exponent"] == 1
    assert payload["labels"] == ["Agriculture", "Manufacturing"]


def test_stability_a_space(tmp_path, capsys):
    """stability: (44.344, 20) 에서 8 단계에 붕괴하고 CSV, SVG 를 남긴다"""
    code, payload, _ = run(capsys, "stability", TABLE_PATH, "--initial", "44.344,20",
                           "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["collapse_time"] == 8
    assert payload["collapse_label"] == "Manufacturing"
    assert payload["crisis_window"] == [7, 7]
    assert (tmp_path / "trajectory.csv").is_file()
    svg = (tmp_path / "trajectory.svg").read_text(encoding="utf-8")
    assert svg.lstrip().startswith("<?xml")


def test_stability_fine_initial(tmp_path, capsys):
    """(44.34397483, 20) 은 13 단계에 붕괴"""
    code, payload, _ = run(capsys, "stability", TABLE_PATH, "--initial", "44.34397483,20",
                           "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["collapse_time"] == 13
    assert payload["crisis_window"] == [11, 12]


def test_stability_p_space(tmp_path, capsys):
    """P 공간 초기값 (34.41181135, 20) 은 8 단계에 붕괴"""
    code, payload, _ = run(capsys, "stability", TABLE_PATH, "--initial", "34.41181135,20",
                           "--space", "P-space", "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["collapse_time"] == 8
    assert payload["space"] == "P-space"
    assert (tmp_path / "trajectory_p.csv").is_file()


def test_svg_is_reproducible(tmp_path, capsys):
    """같은 입력이면 같은 SVG"""
    for name in ("first", "second"):
        run(capsys, "stability", TABLE_PATH, "--initial", "44.344,20", "--output-dir", str(tmp_path / name))
    assert (tmp_path / "first" / "trajectory.svg").read_bytes() == (tmp_path / "second" / "trajectory.svg").read_bytes()


def test_rank_and_classify(tmp_path, capsys):
    """rank 와 classify"""
    code, payload, _ = run(capsys, "rank", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["ranked_labels"] == ["Agriculture", "Manufacturing"]

    code, payload, _ = run(capsys, "classify", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["pillar_labels"] == ["Agriculture"]
    assert payload["intermediate_labels"] == ["Manufacturing"]
    assert payload["weak"] == []
    assert (tmp_path / "cumulative.svg").is_file()


def test_forecast(tmp_path, capsys):
    """forecast --delta 0.1 이면 alpha = 0.840396..."""
    code, payload, _ = run(capsys, "forecast", TABLE_PATH, "--delta", "0.1", "--alpha", "0.3",
                           "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["from_delta"]["alpha"] == pytest.approx(0.840396173414, abs=1e-10)
    assert payload["from_alpha"]["plan"]["gamma"] == pytest.approx(0.3 / 0.7)


def test_forecast_feasibility(tmp_path, capsys):
    """충족 불가능한 계획은 feasible = false"""
    code, payload, _ = run(capsys, "forecast", TABLE_PATH, "--planned", "1000,1000", "--x-n", "44.344,20",
                           "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["feasibility"]["feasible"] is False


def test_optimize(tmp_path, capsys):
    """optimize: 불변성과 공유 안정성"""
    code, payload, _ = run(capsys, "optimize", TABLE_PATH, "--target", "30,25", "--alpha", "0.2",
                           "--initial", "44.344,20", "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["checks"] == {"invariance": True, "dual_invariance": True, "shared_stability": True}


def test_check_invariants(tmp_path, capsys):
    """2부문 예제는 모든 성질 점검을 통과"""
    code, payload, _ = run(capsys, "check-invariants", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    assert payload["all_passed"] is True
    assert payload["checks"]["dense_oracle"]["passed"] is True


def test_sweep(tmp_path, capsys):
    """자리수 3..8 에서 붕괴 시각이 8 에서 13 으로 늘어난다"""
    code, payload, _ = run(capsys, "sweep", TABLE_PATH, "--output-dir", str(tmp_path))
    assert code == 0
    times = [row["collapse_time"] for row in payload["rows"]]
    assert [row["decimals"] for row in payload["rows"]] == [3, 4, 5, 6, 7, 8]
    assert times[0] == 8 and times[-1] == 13
    assert times == sorted(times)


@pytest.mark.parametrize("text,argv,code,label", [
    (None, ["eigen", "/nonexistent.csv"], 2, "config"),
    ("product,A,B\nA,0.1,0.2\nB,-0.3,0.4\n", ["eigen"], 3, "negative"),
    ("product,A,B\nA,0.5,0\nB,0,0.5\n", ["inspect"], 4, "structure"),
    ("product,A,B\nA,0.6,0.6\nB,0.6,0.6\n", ["forecast", "--delta", "0.1"], 4, "abnormal"),
    ("product,A,B\nA,0.25,0.14\nB,0.4,0.12\n", ["optimize", "--target", "1,-1"], 5, "domain"),
    ("product,A,B\nA,0.25,0.14\nB,0.4,0.12\n", ["forecast"], 2, "config"),
    ("product,A,B\nA,0.25,0.14\nB,0.4,0.12\n", ["eigen", "--mode", "float", "--horizon", "0"], 2, "config"),
])
def test_exit_codes(tmp_path, capsys, text, argv, code, label):
    """오류 종류별 종료 코드와 한 줄 stderr"""
    argv = list(argv)
    if text is not None:
        argv.insert(1, write_csv(tmp_path, text))
    argv += ["--output-dir", str(tmp_path / "out")]
    exit_code, _, err = run(capsys, *argv)
    assert exit_code == code
    assert f"error[{label}]:" in err
    assert "Traceback" not in err
