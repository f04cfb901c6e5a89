"""
Команды интерфейса командной строки: разбор аргументов, сборка RunConfig и обработчики cmd_*.

Коды завершения: 0 — успех, 1 — ошибка использования, 2 — ошибка ввода-вывода,
3 — проверка не пройдена (или решатель не сошелся).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from SteinerKit import fractal, solver, verifier
from SteinerKit.common import utils
from SteinerKit.common.enums import Command, OutputFormat
from SteinerKit.common.exceptions import (InvalidInputError, SolverFailureError, SteinerKitError,
                                          VerificationFailedError)
from SteinerKit.types import EmbeddedTree, LambdaSequence, SolveOptions

from ..backend import config
from .render import render_svg

logger = logging.getLogger("cli.commands")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_FAILED = 3

THEOREM_DEFAULT_DEPTH = 3


class RunConfig(BaseModel):
    """
    Параметры одного запуска. Приоритет: флаги командной строки, затем JSON-файл --config,
    затем значения из backend.config.
    """
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    command: Command
    lam: float = Field(config.DEFAULT_LAMBDA, alias="lambda", gt=0.0, lt=0.5)
    depth: int = Field(config.DEFAULT_DEPTH, ge=1)
    tolerance: float = Field(config.DEFAULT_TOLERANCE, gt=0.0)
    output_path: Optional[Path] = Field(None, alias="output")
    format: OutputFormat = OutputFormat.JSON
    jobs: int = Field(config.SOLVER_JOBS, ge=0)
    samples: int = Field(2, ge=1, le=3)
    input_path: Optional[Path] = Field(None, alias="input")
    points: Optional[str] = None
    terminals_path: Optional[Path] = Field(None, alias="terminals")
    axis: bool = False
    levels: int = Field(6, ge=2)

    def solve_options(self) -> SolveOptions:
        return SolveOptions(parallelism=self.jobs, chunk_size=config.SOLVER_CHUNK_SIZE)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser, у которого ошибка использования — InvalidInputError (код 1)."""

    def error(self, message):
        raise InvalidInputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", dest="config_file", type=Path, help="JSON-файл параметров")
    common.add_argument("--lambda", dest="lambda", type=float, help="коэффициент λ ∈ (0, 1/2)")
    common.add_argument("--depth", type=int, help="глубина Σ(λ)")
    common.add_argument("--tol", dest="tolerance", type=float, help="допуск положения терминалов")
    common.add_argument("--jobs", type=int, help="число процессов решателя (0 — все ядра)")
    common.add_argument("-o", "--output", type=Path, help="файл результата")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="формат результата")

    parser = _Parser(prog="steinerkit", description="Σ(λ), точные деревья Штейнера и проверка лемм.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser(Command.GENERATE.value, parents=[common], help="построить Σ(λ)")
    p.add_argument("--terminals", type=Path, help="CSV терминалов A_∞(λ)")

    p = sub.add_parser(Command.SOLVE.value, parents=[common], help="точное дерево Штейнера")
    p.add_argument("--input", type=Path, help="CSV или JSON с точками")
    p.add_argument("--points", help='точки строкой: "0,0 1,0 0.5,0.9"')

    p = sub.add_parser(Command.VERIFY.value, parents=[common], help="проверить леммы 0, 1, 2")
    p.add_argument("--samples", type=int, help="точек в шаре B_ε(B_1): 1, 2 или 3")

    sub.add_parser(Command.THEOREM.value, parents=[common], help="усечение Σ(λ) против точного решения")

    p = sub.add_parser(Command.DIMENSION.value, parents=[common], help="размерность подсчетом клеток")
    p.add_argument("--levels", type=int, help="масштабы λ¹…λ^levels")

    p = sub.add_parser(Command.RENDER.value, parents=[common], help="SVG-рисунок Σ(λ)")
    p.add_argument("--input", type=Path, help="JSON дерева (вместо --lambda/--depth)")
    p.add_argument("--axis", action="store_true", default=argparse.SUPPRESS, help="ось симметрии")

    sub.add_parser(Command.SERVE.value, help="HTTP API")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    :raises OSError: файл --config недоступен.
    :raises InvalidInputError: файл --config не является JSON-объектом.
    :raises ValidationError: недопустимые значения или неизвестные ключи.
    """
    values: dict[str, Any] = {}
    if args.command == Command.THEOREM.value:
        values["depth"] = THEOREM_DEFAULT_DEPTH
    flags = {key: value for key, value in vars(args).items() if value is not None}
    config_file = flags.pop("config_file", None)
    if config_file is not None:
        data = utils.read_json(config_file)
        if not isinstance(data, dict):
            raise InvalidInputError("Файл конфигурации должен содержать JSON-объект", "config", str(config_file))
        values.update(data)
    values.update(flags)
    return RunConfig.model_validate(values)


# ---------------------------------------------------------------------------
# Обработчики
# ---------------------------------------------------------------------------

def _emit(cfg: RunConfig, text: str):
    if cfg.output_path is None:
        sys.stdout.write(text)
        return
    cfg.output_path.parent.mkdir(parents=True, exist_ok=True)
    cfg.output_path.write_text(text, encoding="utf-8")
    logger.info(f"Результат записан в {cfg.output_path}")


def _json_text(data: Any) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def cmd_generate(cfg: RunConfig) -> int:
    """Строит Σ(λ), пишет JSON дерева (или CSV терминалов), печатает длину и ε."""
    seq = LambdaSequence.constant(cfg.lam)
    tree = fractal.build_sigma(seq, cfg.depth)
    report = fractal.validate_embedding(tree)

    if cfg.output_path is not None:
        if cfg.format is OutputFormat.CSV:
            terminals = fractal.terminal_set(seq, cfg.tolerance)
            utils.write_points_csv(cfg.output_path, (p.as_tuple() for p in terminals.points))
        elif cfg.format is OutputFormat.SVG:
            _emit(cfg, render_svg(tree, config.SVG_SCALE))
        else:
            utils.write_json(cfg.output_path, tree.to_dict())
    if cfg.terminals_path is not None:
        terminals = fractal.terminal_set(seq, cfg.tolerance)
        utils.write_points_csv(cfg.terminals_path, (p.as_tuple() for p in terminals.points))

    print(f"lambda {cfg.lam!r}")
    print(f"depth {cfg.depth}")
    print(f"vertices {len(tree.vertices)}")
    print(f"leaves {len(tree.leaves())}")
    print(f"total_length {fractal.total_length(seq, cfg.depth):.6f}")
    print(f"limit_length {fractal.total_length(seq, math.inf):.6f}")
    print(f"eps {fractal.epsilon_of(cfg.lam):.6e}")
    print(f"unresolved_edges {report.unresolved_edges}")
    if not report.valid:
        print(f"warning: embedding invalid, crossings {len(report.crossings)}", file=sys.stderr)
    return EXIT_OK


def cmd_solve(cfg: RunConfig) -> int:
    """Точное дерево Штейнера для точек из --input или --points."""
    if cfg.input_path is not None:
        points = utils.read_points(cfg.input_path)
    elif cfg.points:
        points = utils.parse_points_arg(cfg.points)
    else:
        raise InvalidInputError("Укажите --input или --points")
    solution = solver.solve_steiner(points, cfg.solve_options())
    _emit(cfg, _json_text(solution.to_dict()))
    logger.info(f"Длина {solution.length:.12f}, топология {solution.topology.canonical_id}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    """Пакет проверок лемм; код 3, если хоть одна не прошла."""
    bundle = verifier.run_verification(cfg.lam, cfg.samples, cfg.solve_options())
    _emit(cfg, _json_text(bundle))
    if not bundle["pass"]:
        raise VerificationFailedError(bundle["failed"], bundle)
    return EXIT_OK


def cmd_theorem(cfg: RunConfig) -> int:
    """Усечение Σ(λ) глубины ≤ 4 против точного решения."""
    if cfg.depth > verifier.MAX_THEOREM_DEPTH:
        raise InvalidInputError(f"Глубина {cfg.depth} требует перебора слишком многих топологий; "
                                f"допустимо не больше {verifier.MAX_THEOREM_DEPTH}", "depth", cfg.depth)
    report = verifier.check_theorem(cfg.lam, cfg.depth, cfg.solve_options())
    if cfg.output_path is not None:
        utils.write_json(cfg.output_path, report.to_report().to_dict())
    print(f"truncation_length {report.truncation_length:.15f}")
    print(f"oracle_length {report.oracle_length:.15f}")
    print(f"relative_gap {report.relative_gap:.3e}")
    print(f"vertex_deviation {report.vertex_deviation:.3e}")
    if not report.passed:
        raise VerificationFailedError(["theorem"], report.model_dump())
    return EXIT_OK


def cmd_dimension(cfg: RunConfig) -> int:
    """Оценка размерности A_∞(λ) на масштабах λ¹…λ^levels против −ln2/lnλ."""
    seq = LambdaSequence.constant(cfg.lam)
    terminals = fractal.terminal_set(seq, cfg.tolerance, includes_root=False)
    scales = [cfg.lam ** j for j in range(1, cfg.levels + 1)]
    estimate = verifier.estimate_dimension(terminals.points, scales)
    formula = fractal.hausdorff_dimension_formula(cfg.lam)
    result = {"lambda": cfg.lam, "level": terminals.level, "points": len(terminals),
              "estimate": estimate, "formula": formula}
    if cfg.output_path is not None:
        utils.write_json(cfg.output_path, result)
    print(f"estimate {estimate:.6f}")
    print(f"formula {formula:.6f}")
    return EXIT_OK


def cmd_render(cfg: RunConfig) -> int:
    """SVG дерева из --input или построенного по --lambda/--depth."""
    if cfg.input_path is not None:
        tree = EmbeddedTree.from_dict(utils.read_json(cfg.input_path))
    else:
        tree = fractal.build_sigma(LambdaSequence.constant(cfg.lam), cfg.depth)
    _emit(cfg, render_svg(tree, config.SVG_SCALE, cfg.axis))
    return EXIT_OK


def cmd_serve(cfg: RunConfig) -> int:
    import uvicorn

    from ..backend.routes import app

    logger.info("=" * 50)
    logger.info(f"SteinerKit API — запуск на {config.API_HOST}:{config.API_PORT}")
    logger.info("=" * 50)
    uvicorn.run(app, host=config.API_HOST, port=config.API_PORT, log_level=config.LOG_LEVEL.lower())
    return EXIT_OK


HANDLERS: dict[Command, Callable[[RunConfig], int]] = {
    Command.GENERATE: cmd_generate,
    Command.SOLVE: cmd_solve,
    Command.VERIFY: cmd_verify,
    Command.THEOREM: cmd_theorem,
    Command.DIMENSION: cmd_dimension,
    Command.RENDER: cmd_render,
    Command.SERVE: cmd_serve,
}


def run(argv: list[str] | None = None) -> int:
    """Разбирает аргументы, выполняет команду и возвращает код завершения."""
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        return HANDLERS[cfg.command](cfg)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_OK
    except ValidationError as e:
        details = "; ".join(f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors())
        print(f"usage error: {details}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidInputError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (VerificationFailedError, SolverFailureError) as e:
        print(f"failed: {e.short_str()}", file=sys.stderr)
        return EXIT_FAILED
    except SteinerKitError as e:
        logger.error(f"Непредвиденная ошибка: {e}", exc_info=True)
        return EXIT_FAILED
