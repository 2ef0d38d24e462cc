"""
경제 구조 최적화 CLI
사용법: python -m cli.main <command> <table.csv> [옵션]
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from common.config import EconomySettings, load_settings
from common.exceptions import ConfigurationError, EconomyError, StructuralError
from common.models import NumericMode, Space
from common.numeric import to_float
from common.utils import atomic_write, dump_json
from cli import plots, reports
from cli.table_io import parse_table, parse_vector, write_trajectory_csv
from engine.chen_transform import chen_transform, dual_chain
from engine.consumption_forecast import (alpha_from_delta, chen_alpha_matrix, delta_from_alpha,
                                         forecast_step, gamma_from_delta, hua_gamma_growth_rate,
                                         max_feasible_alpha)
from engine.eigensolver import eigentriple
from engine.models import ConsumptionPlan
from engine.ranking import classify, rank_products, refine_weak
from engine.stability import collapse_report, iterate, precision_sweep
from engine.structure_opt import (dual_invariance_check, invariance_check, optimize_structure,
                                  shared_stability_check)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

MODE_ALIASES = {
    "exact-rational": "exact-rational",
    "rational": "exact-rational",
    "exact": "exact-rational",
    "binary-float": "binary-float",
    "float": "binary-float",
}


def _decimal_range(text: str) -> List[int]:
    """'3-8' 또는 '3,5,8'"""
    try:
        if "-" in text:
            start, end = (int(p) for p in text.split("-", 1))
            return list(range(start, end + 1))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError as e:
        raise ConfigurationError(f"자리수 범위를 읽을 수 없습니다: {text!r}") from e


class Context:
    """명령 실행에 필요한 설정과 입력 행렬"""

    def __init__(self, args: argparse.Namespace, settings: EconomySettings):
        self.args = args
        self.settings = settings
        self.mode = settings.numeric_mode()
        self.cfg = settings.solver_config()
        self.output_dir = Path(settings.OUTPUT_DIR)
        self.matrix, self.labels = parse_table(args.table, self.mode)

    def vector(self, text: str, mode: Optional[NumericMode] = None):
        values = parse_vector(text, mode or self.mode)
        if len(values) != self.matrix.dim:
            raise ConfigurationError(f"벡터 길이 {len(values)} 가 제품 수 {self.matrix.dim} 과 다릅니다")
        return values

    def artifact(self, name: str) -> Path:
        return self.output_dir / name


def cmd_inspect(ctx: Context) -> Dict[str, Any]:
    payload = reports.inspect_payload(ctx.matrix)
    if not payload["irreducible"]:
        raise StructuralError("구조행렬이 기약(irreducible)이 아닙니다")
    return payload


def cmd_eigen(ctx: Context) -> Dict[str, Any]:
    triple = eigentriple(ctx.matrix, ctx.cfg)
    return reports.eigen_payload(ctx.matrix, triple, ctx.args.reference_scale)


def cmd_transform(ctx: Context) -> Dict[str, Any]:
    triple = eigentriple(ctx.matrix, ctx.cfg)
    return reports.transform_payload(ctx.matrix, chen_transform(ctx.matrix, triple), dual_chain(ctx.matrix, triple))


def cmd_stability(ctx: Context) -> Dict[str, Any]:
    settings = ctx.settings
    space = Space(ctx.args.space)
    if space == Space.P_SPACE:
        triple = eigentriple(ctx.matrix, ctx.cfg)
        chain = chen_transform(ctx.matrix, triple)
        mode = NumericMode.floating(settings.FLOAT_TOLERANCE)
        if ctx.mode.is_exact:
            logger.info("P 공간 반복은 binary-float 모드로 수행합니다")
        trajectory = iterate(chain.P, ctx.vector(ctx.args.initial, mode), settings.HORIZON, mode,
                             settings.DET_FLOOR, space=space, labels=ctx.labels)
        report = collapse_report(trajectory, rho=1.0, threshold=settings.CRISIS_THRESHOLD)
    else:
        trajectory = iterate(ctx.matrix, ctx.vector(ctx.args.initial), settings.HORIZON, ctx.mode,
                             settings.DET_FLOOR, space=space, labels=ctx.labels)
        report = collapse_report(trajectory, threshold=settings.CRISIS_THRESHOLD, cfg=ctx.cfg)

    stem = "trajectory_p" if space == Space.P_SPACE else "trajectory"
    csv_path = write_trajectory_csv(ctx.artifact(f"{stem}.csv"), trajectory)
    svg_path = plots.plot_trajectory(trajectory, report, ctx.artifact(f"{stem}.svg"))
    return reports.stability_payload(report, {"csv": csv_path.name, "svg": svg_path.name})


def _chain(ctx: Context):
    return chen_transform(ctx.matrix, eigentriple(ctx.matrix, ctx.cfg))


def cmd_rank(ctx: Context) -> Dict[str, Any]:
    return reports.ranking_payload(rank_products(_chain(ctx), ctx.labels))


def cmd_classify(ctx: Context) -> Dict[str, Any]:
    settings = ctx.settings
    report = classify(_chain(ctx), settings.THETA_WEAK, settings.THETA_PILLAR, ctx.labels)
    core = refine_weak(report, settings.THETA_WEAK_CORE)
    svg_path = plots.plot_cumulative(report, ctx.artifact("cumulative.svg"))
    return reports.classification_payload(report, core, {"svg": svg_path.name})


def cmd_forecast(ctx: Context) -> Dict[str, Any]:
    args = ctx.args
    if args.delta is None and args.alpha is None and args.planned is None:
        raise ConfigurationError("--delta, --alpha, --planned 중 하나가 필요합니다")
    triple = eigentriple(ctx.matrix, ctx.cfg)
    rho = triple.rho
    floating = NumericMode.floating()
    x_n = ctx.vector(args.x_n, floating) if args.x_n else triple.u
    payload: Dict[str, Any] = {"rho": rho, "x_n": to_float(x_n)}

    if args.delta is not None:
        step = forecast_step(ctx.matrix, x_n, args.delta, rho)
        payload["from_delta"] = {
            "delta": args.delta,
            "alpha": alpha_from_delta(args.delta, rho),
            "gamma": gamma_from_delta(args.delta, rho),
            "plan": step.plan,
            "x_next": step.x_next,
            "consumption": step.consumption,
        }
    if args.alpha is not None:
        delta = delta_from_alpha(args.alpha, rho)
        plan = ConsumptionPlan.from_alpha(args.alpha, rho)
        payload["from_alpha"] = {
            "plan": plan,
            "delta": delta,
            "hua_gamma_growth_rate": hua_gamma_growth_rate(rho, plan.gamma) if plan.gamma > 0 else None,
        }
    if args.planned is not None:
        result = max_feasible_alpha(ctx.vector(args.planned, floating), x_n, ctx.matrix, rho)
        payload["feasibility"] = result
    return payload


def cmd_optimize(ctx: Context) -> Dict[str, Any]:
    args = ctx.args
    A_alpha = chen_alpha_matrix(ctx.matrix, args.alpha)
    triple = eigentriple(A_alpha, ctx.cfg)
    result = optimize_structure(A_alpha, triple, ctx.vector(args.target, NumericMode.floating()))
    checks: Dict[str, Optional[bool]] = {
        "invariance": invariance_check(A_alpha, result, triple),
        "dual_invariance": dual_invariance_check(A_alpha, result, triple),
        "shared_stability": None,
    }
    if args.initial:
        checks["shared_stability"] = shared_stability_check(
            A_alpha, result, triple, ctx.vector(args.initial), ctx.settings.HORIZON, ctx.mode,
            ctx.settings.DET_FLOOR)
    return reports.optimize_payload(result, args.alpha, checks)


def cmd_check_invariants(ctx: Context) -> Dict[str, Any]:
    payload = reports.invariant_checks(ctx.matrix, ctx.cfg, ctx.settings.DET_FLOOR)
    if not payload["all_passed"]:
        failed = sorted(name for name, c in payload["checks"].items() if c is not None and not c["passed"])
        logger.error(f"성질 점검 실패: {', '.join(failed)}")
    return payload


def cmd_sweep(ctx: Context) -> Dict[str, Any]:
    triple = eigentriple(ctx.matrix, ctx.cfg)
    reference = reports.reference_scaled(triple.u, ctx.args.reference_scale)
    rows = precision_sweep(ctx.matrix, reference, _decimal_range(ctx.args.decimals), ctx.mode,
                           ctx.settings.HORIZON, ctx.settings.DET_FLOOR, ctx.cfg)
    return reports.sweep_payload(rows, reference)


COMMANDS: Dict[str, Callable[[Context], Dict[str, Any]]] = {
    "inspect": cmd_inspect,
    "eigen": cmd_eigen,
    "transform": cmd_transform,
    "stability": cmd_stability,
    "rank": cmd_rank,
    "classify": cmd_classify,
    "forecast": cmd_forecast,
    "optimize": cmd_optimize,
    "check-invariants": cmd_check_invariants,
    "sweep": cmd_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("table", help="구조행렬 CSV 파일")
    common.add_argument("--config", type=Path, default=None, help="key = value 설정 파일")
    common.add_argument("--mode", choices=sorted(MODE_ALIASES), default=None, help="수치 모드")
    common.add_argument("--solver", choices=["power", "inverse-power"], default=None, help="고유쌍 솔버")
    common.add_argument("--tolerance", type=float, default=None, help="솔버 허용오차")
    common.add_argument("--preconditioning", choices=["none", "quasi-symmetrize", "smooth-with-guess"],
                        default=None, help="고유쌍 전처리")
    common.add_argument("--horizon", type=int, default=None, help="최대 반복 단계 수")
    common.add_argument("--output-dir", type=Path, default=None, help="산출물 디렉토리")
    common.add_argument("--log-level", default=None, help="로그 레벨")
    common.add_argument("--reference-scale", type=float, default=reports.REFERENCE_SCALE,
                        help="보고용 마지막 성분 배율 (기본값: 20)")

    parser = argparse.ArgumentParser(prog="econopt", description="구조행렬 기반 경제 최적화 도구")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("inspect", parents=[common], help="기약성, 주기, 양성 지수, C-W 상하한")
    sub.add_parser("eigen", parents=[common], help="고유 삼중쌍 (rho, u, v)")
    sub.add_parser("transform", parents=[common], help="Chen 변환 P, pi, 쌍대 Q")

    stability = sub.add_parser("stability", parents=[common], help="붕괴 시각 시뮬레이션")
    stability.add_argument("--initial", required=True, help="초기 벡터 (예: 44.344,20)")
    stability.add_argument("--space", choices=[s.value for s in Space], default=Space.A_SPACE.value)
    stability.add_argument("--crisis-threshold", type=float, default=None)

    sub.add_parser("rank", parents=[common], help="평형 mu 기준 제품 순위")
    classify_parser = sub.add_parser("classify", parents=[common], help="취약/중간/기간 제품 분류")
    classify_parser.add_argument("--theta-weak", type=float, default=None)
    classify_parser.add_argument("--theta-pillar", type=float, default=None)
    classify_parser.add_argument("--theta-weak-core", type=float, default=None)

    forecast = sub.add_parser("forecast", parents=[common], help="성장률/소비 변환과 소비 가능성 탐색")
    forecast.add_argument("--delta", type=float, default=None, help="목표 성장률")
    forecast.add_argument("--alpha", type=float, default=None, help="소비 파라미터")
    forecast.add_argument("--x-n", default=None, help="현재 생산 벡터 (기본값: u)")
    forecast.add_argument("--planned", default=None, help="계획 소비 벡터")

    optimize = sub.add_parser("optimize", parents=[common], help="목표 평형 구조행렬")
    optimize.add_argument("--target", required=True, help="목표 평형 u_tilde")
    optimize.add_argument("--alpha", type=float, default=0.0, help="소비 파라미터 (기본값: 0)")
    optimize.add_argument("--initial", default=None, help="공유 안정성 점검 초기 벡터")

    sub.add_parser("check-invariants", parents=[common], help="성질 점검 모음")

    sweep = sub.add_parser("sweep", parents=[common], help="평형 초기값 정밀도별 붕괴 시각")
    sweep.add_argument("--decimals", default="3-8", help="소수 자리수 범위 (기본값: 3-8)")
    return parser


def _settings_from(args: argparse.Namespace) -> EconomySettings:
    overrides = {
        "NUMERIC_MODE": MODE_ALIASES[args.mode] if args.mode else None,
        "SOLVER": args.solver,
        "SOLVER_TOLERANCE": args.tolerance,
        "PRECONDITIONING": args.preconditioning,
        "HORIZON": args.horizon,
        "OUTPUT_DIR": args.output_dir,
        "LOG_LEVEL": args.log_level,
        "CRISIS_THRESHOLD": getattr(args, "crisis_threshold", None),
        "THETA_WEAK": getattr(args, "theta_weak", None),
        "THETA_PILLAR": getattr(args, "theta_pillar", None),
        "THETA_WEAK_CORE": getattr(args, "theta_weak_core", None),
    }
    return load_settings(args.config, **overrides)


def run_command(argv: Optional[List[str]] = None) -> int:
    """
    명령 실행 후 종료 코드 반환

    EconomyError 는 `error[<종류>]: <메시지>` 한 줄로 stderr 에 출력하고 traceback 은 내지 않는다.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = _settings_from(args)
        logging.basicConfig(level=settings.LOG_LEVEL.upper(), format=LOG_FORMAT, force=True)
        ctx = Context(args, settings)
        payload = COMMANDS[args.command](ctx)
        text = dump_json(payload)
        atomic_write(ctx.artifact(f"{args.command}.json"), text)
        sys.stdout.write(text)
        if args.command == "check-invariants" and not payload["all_passed"]:
            return EconomyError.exit_code
        return 0
    except EconomyError as e:
        sys.stderr.write(f"error[{e.label}]: {e.message}\n")
        return e.exit_code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
