"""
Командная строка negdep: подкоманды читают JSON-файлы, вызывают операции
пакета и печатают JSON-отчет.

Коды выхода: 0 - команда выполнена, 2 - отрицательный вердикт, 1 - ошибка.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .checkers.analyzer import DependenceAnalyzer
from .checkers.conditional import check_conditional_structure
from .config import DEFAULT_CAPS, RunConfig, NUM_MODE_ENV
from .core.distribution import UnivariateDiscrete, is_exchangeable, symmetrize
from .core.numeric import NumberMode, to_number
from .decomposition.binary_multinomial import binary_multinomial_decompose
from .decomposition.orbit_mixture import orbit_mixture_decompose
from .exceptions import NegDepError
from .models.elliptical import (
    DEFAULT_GRID, construct_ncd_elliptical, demo_bivariate_zero_corr_not_nod,
    entropy_experiment, sample, student_t_spec,
)
from .models.families import CovModel, Generator, GAUSSIAN, STUDENT_T
from .models.gaussian import construct_na_gaussian_cov, gaussian_negdep_verdict, jm_cov_n3
from .transport.coupling_lp import explore_ncd_minimizer, solve_jm_feasibility, solve_minimax
from .transport.objective import CostSpec
from .transport.uncertainty import parse_uncertainty
from .transport.verification import verify_exchangeable_optimality, verify_symmetrization_improvement
from .utils.logger import get_logger, set_level
from .utils.serialization import (
    build_report, dumps, frames_to_csv, load_distribution, load_json, load_marginals, load_model,
    save_json,
)

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NEGATIVE = 2

# Служебные аргументы, не попадающие в options конфигурации
_RESERVED = {"command", "handler", "mode", "output", "log_level", "seed", "max_grid", "max_lp_vars"}


class NegDepParser(argparse.ArgumentParser):
    """Разборщик аргументов: ошибки использования завершаются с кодом 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: ошибка: {message}\n")


def _parse_list(text, mode=None):
    """Разбор списка чисел через запятую ("4,4,9" или "1/2,1/3")"""
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError(f"Пустой список чисел: {text!r}")
    if mode is None:
        mode = NumberMode.RATIONAL if any("/" in item for item in items) else NumberMode.FLOAT
    return [to_number(item, mode) for item in items]


def _resolve_mode(args):
    """Режим из --mode, иначе из NEGDEP_NUM_MODE, иначе None (режим входного файла)"""
    if args.mode:
        return NumberMode.parse(args.mode)
    if os.environ.get(NUM_MODE_ENV):
        return NumberMode.parse(os.environ[NUM_MODE_ENV])
    return None


def _generator(args):
    if args.family == STUDENT_T:
        return Generator(tag=STUDENT_T, nu=args.nu)
    return Generator(tag=GAUSSIAN)


def cmd_check(args, mode, caps):
    data = load_json(args.input)
    if "cov" in data:
        verdict = gaussian_negdep_verdict(CovModel.from_dict(data))
        return not verdict.holds, {"gaussian": verdict.to_dict()}, None
    d = load_distribution(args.input, mode)
    analyzer = DependenceAnalyzer(d, caps=caps)
    chain = analyzer.analyze_all()
    result = chain.to_dict()
    if args.save_dir:
        result["saved_to"] = analyzer.save_results(args.save_dir)
    return chain.negative, result, d.mode


def cmd_conditional(args, mode, caps):
    d = load_distribution(args.input, mode)
    report = check_conditional_structure(d, cap=caps.upper_sets, cross_check=not args.no_cross_check)
    return not report.consistent, report.to_dict(), d.mode


def cmd_construct_gaussian(args, mode, caps):
    variances = _parse_list(args.variances, mode)
    if args.family == GAUSSIAN:
        trace = construct_na_gaussian_cov(variances, mode)
        return False, {"trace": trace.to_dict()}, trace.mode
    trace, spec = construct_ncd_elliptical(variances, _generator(args))
    return False, {"trace": trace.to_dict(), "model": spec.to_dict()}, trace.mode


def cmd_jm_cov3(args, mode, caps):
    variances = _parse_list(args.variances, mode)
    result = jm_cov_n3(variances, mode)
    return not result.valid, result.to_dict(), mode


def cmd_decompose(args, mode, caps):
    d = load_distribution(args.input, mode)
    decomposition = binary_multinomial_decompose(d)
    result = decomposition.to_dict()
    if args.csv_dir:
        result["csv"] = frames_to_csv(decomposition.to_frames(), args.csv_dir)
    return False, result, d.mode


def cmd_orbit_mixture(args, mode, caps):
    d = load_distribution(args.input, mode)
    return False, orbit_mixture_decompose(d).to_dict(), d.mode


def cmd_symmetrize(args, mode, caps):
    d = load_distribution(args.input, mode)
    result = {"distribution": symmetrize(d).to_dict(), "was_exchangeable": is_exchangeable(d)}
    negative = False
    if args.uncertainty:
        unc = parse_uncertainty(args.uncertainty, d.dim, d.mode)
        check = verify_symmetrization_improvement(d, unc, CostSpec.parse(args.cost))
        result["improvement"] = check.to_dict()
        negative = not check.improved
    return negative, result, d.mode


def cmd_jm_feasible(args, mode, caps):
    laws = load_marginals(args.input, mode)
    feasibility = solve_jm_feasibility(laws, caps=caps)
    return not feasibility.jointly_mixable, feasibility.to_dict(), laws[0].mode


def cmd_ot_solve(args, mode, caps):
    laws = load_marginals(args.marginals, mode)
    unc = parse_uncertainty(args.uncertainty, len(laws), laws[0].mode)
    cost = CostSpec.parse(args.cost)
    if args.explore_ncd:
        return False, explore_ncd_minimizer(laws, unc, cost=cost, caps=caps).to_dict(), laws[0].mode
    return False, solve_minimax(laws, unc, cost, caps=caps).to_dict(), laws[0].mode


def cmd_verify_optimality(args, mode, caps):
    if args.marginals:
        law = load_marginals(args.marginals, mode)[0]
    elif args.support:
        values = _parse_list(args.support, mode)
        law_mode = mode or (NumberMode.RATIONAL if all(v == int(v) for v in values) else NumberMode.FLOAT)
        if args.probs:
            law = UnivariateDiscrete.from_values(values, _parse_list(args.probs, law_mode), law_mode)
        else:
            law = UnivariateDiscrete.uniform(values, law_mode)
    else:
        raise ValueError("Нужно указать --marginals или --support")
    k_values = [int(k) for k in args.k.split(",")] if args.k else []
    report = verify_exchangeable_optimality(law, args.n, k_values, caps=caps)
    return not report.holds, report.to_dict(), law.mode


def cmd_sample(args, mode, caps):
    model = load_model(args.input)
    draws = sample(model, args.count, args.seed)
    result = {
        "count": args.count,
        "sample_mean": draws.mean(axis=0).tolist(),
        "sample_cov": np.cov(draws, rowvar=False).tolist(),
        "sum_std": float(np.std(draws.sum(axis=1))),
        "samples": draws.tolist(),
    }
    return False, result, None


def cmd_demo_t_nod(args, mode, caps):
    spec = student_t_spec(args.nu, np.eye(2))
    grid = DEFAULT_GRID if args.step is None else np.arange(-3.0, 3.0 + 1e-9, args.step)
    result = demo_bivariate_zero_corr_not_nod(spec, grid=grid, nodes=args.nodes)
    return False, result.to_dict(), None


def cmd_entropy_demo(args, mode, caps):
    estimate = entropy_experiment(nu=args.nu, m=args.m, count=args.count, seed=args.seed)
    return False, estimate.to_dict(), None


def build_parser():
    """
    Построение разборщика аргументов со всеми подкомандами.

    Returns:
        NegDepParser: Разборщик
    """
    parser = NegDepParser(prog="negdep", description="Отрицательно зависимые совместные смеси")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--mode", choices=[m.value for m in NumberMode], help="числовой режим")
    parser.add_argument("-o", "--output", help="путь для JSON-отчета (по умолчанию stdout)")
    parser.add_argument("--log-level", default=None, help="уровень логгирования")
    parser.add_argument("--max-grid", type=int, default=DEFAULT_CAPS.grid, help="предел размера сетки")
    parser.add_argument("--max-lp-vars", type=int, default=DEFAULT_CAPS.lp_variables, help="предел числа переменных ЛП")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="проверка всех понятий отрицательной зависимости")
    p.add_argument("input", help="JSON распределения или гауссовской модели")
    p.add_argument("--save-dir", help="директория для report.json и verdicts.csv")
    p.set_defaults(handler=cmd_check)

    p = sub.add_parser("conditional-na", aliases=["theorem1"], help="структурный признак NA для совместных смесей")
    p.add_argument("input")
    p.add_argument("--no-cross-check", action="store_true", help="не запускать прямую проверку NA")
    p.set_defaults(handler=cmd_conditional)

    p = sub.add_parser("construct-gaussian", help="ковариация NA гауссовской совместной смеси")
    p.add_argument("--variances", required=True, help="дисперсии через запятую")
    p.add_argument("--family", choices=[GAUSSIAN, STUDENT_T], default=GAUSSIAN)
    p.add_argument("--nu", type=float, default=3.0, help="степени свободы для student_t")
    p.set_defaults(handler=cmd_construct_gaussian)

    p = sub.add_parser("jm-cov3", help="ковариация совместной смеси при n = 3")
    p.add_argument("--variances", required=True)
    p.set_defaults(handler=cmd_jm_cov3)

    p = sub.add_parser("decompose", help="разложение на бинарные мультиномиальные векторы")
    p.add_argument("input")
    p.add_argument("--csv-dir", help="директория для CSV-таблиц компонент")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("orbit-mixture", help="разложение перестановочной совместной смеси по орбитам")
    p.add_argument("input")
    p.set_defaults(handler=cmd_orbit_mixture)

    p = sub.add_parser("symmetrize", help="симметризация распределения")
    p.add_argument("input")
    p.add_argument("--uncertainty", help="all, card:k или JSON-файл мер (проверка улучшения)")
    p.add_argument("--cost", default="quad", help="quad, var или harmonic")
    p.set_defaults(handler=cmd_symmetrize)

    p = sub.add_parser("jm-feasible", help="проверка совместной смешиваемости маргиналов")
    p.add_argument("input", help="JSON маргиналов")
    p.set_defaults(handler=cmd_jm_feasible)

    p = sub.add_parser("ot-solve", help="минимакс-задача транспорта")
    p.add_argument("--marginals", required=True)
    p.add_argument("--uncertainty", default="all")
    p.add_argument("--cost", default="quad", help="quad, var или harmonic")
    p.add_argument("--explore-ncd", action="store_true", help="сравнить с оптимумом среди NCD-сцеплений")
    p.set_defaults(handler=cmd_ot_solve)

    p = sub.add_parser("verify-optimality", aliases=["verify-thm-opt"], help="проверка оптимальности корреляции P*_n")
    p.add_argument("--marginals", help="JSON маргиналов (берется первый)")
    p.add_argument("--support", help="носитель маргинала через запятую (--support=-1,0,1)")
    p.add_argument("--probs", help="вероятности (по умолчанию равномерные)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", help="мощности через запятую")
    p.set_defaults(handler=cmd_verify_optimality)

    p = sub.add_parser("sample", help="выборка из эллиптической модели")
    p.add_argument("input", help="JSON модели")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(handler=cmd_sample)

    p = sub.add_parser("demo-t-nod", help="некоррелированное t-распределение не является NOD")
    p.add_argument("--nu", type=float, default=3.0)
    p.add_argument("--step", type=float, default=None, help="шаг сетки на [-3, 3]")
    p.add_argument("--nodes", type=int, default=2000, help="число узлов квадратуры")
    p.set_defaults(handler=cmd_demo_t_nod)

    p = sub.add_parser("entropy-demo", help="энтропия t-моделей, приближающих совместные смеси")
    p.add_argument("--nu", type=float, default=3.0)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--count", type=int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_entropy_demo)

    return parser


def _run_config(args, mode):
    inputs = tuple(
        value for key in ("input", "marginals") if (value := getattr(args, key, None))
    )
    options = tuple(sorted(
        (key, str(value)) for key, value in vars(args).items()
        if key not in _RESERVED and key not in ("input", "marginals") and value is not None
    ))
    caps = replace(DEFAULT_CAPS, grid=args.max_grid, lp_variables=args.max_lp_vars)
    return RunConfig.from_env(
        args.command,
        inputs=inputs,
        number_mode=mode or NumberMode.FLOAT,
        caps=caps,
        seed=getattr(args, "seed", None),
        output=args.output,
        options=options,
    )


def main(argv=None):
    """
    Точка входа CLI.

    Args:
        argv (list): Аргументы командной строки (по умолчанию sys.argv[1:])

    Returns:
        int: Код выхода
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.log_level:
        set_level(args.log_level.upper())

    try:
        mode = _resolve_mode(args)
        config = _run_config(args, mode)
        logger.info(f"Команда {args.command}")
        negative, result, used_mode = args.handler(args, mode, config.caps)
        if used_mode is not None:
            config = replace(config, number_mode=used_mode)
    except (NegDepError, OSError, ValueError, KeyError) as exc:
        logger.error(f"Команда {args.command} завершилась ошибкой: {exc}")
        print(f"negdep: ошибка ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_ERROR

    status = "negative" if negative else "ok"
    report = build_report(config, status, result)
    if args.output:
        save_json(report, args.output)
    else:
        sys.stdout.write(dumps(report) + "\n")
    return EXIT_NEGATIVE if negative else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
