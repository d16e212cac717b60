"""Command-line front end.

Subcommands: check, modulus, zeros, kernel, relax, creep, compare.  Curves
are emitted as small CSV files (or to stdout) with enough digits to
round-trip exactly; reruns with identical arguments produce byte-identical
output.  Exit codes: 0 success, 2 invalid parameters (the violated
inequality is named with both sides printed), 1 numerical failure.

The optional --plot flag on the curve subcommands renders a matplotlib
figure next to the CSV, with the same basename and a .png suffix.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .experiments import (
    ExperimentConfig,
    compare_methods,
    creep,
    stress_relaxation,
)
from .fracops import RealnessError
from .kelvin import (
    ContourError,
    ContourSpec,
    ZeroSearchError,
    build_kernel_table,
    char_function_deriv,
    find_zeros,
    winding_number,
)
from .numerics import NonFiniteError, QuadratureError
from .thermo import ModelParams, check_thermo

__all__ = ["main"]

_NUMERICAL_ERRORS = (
    QuadratureError,
    NonFiniteError,
    ContourError,
    ZeroSearchError,
    RealnessError,
    ArithmeticError,
)

_THERMO_RULE = (
    "a >= 2 b cosh(pi B / 2) sqrt(1 + ({trig}(pi alpha / 2) tanh(pi B / 2))^2)"
)
_STRONG_RULE = "a >= 2 b cosh(pi B) sqrt(1 + ({trig}(pi alpha) tanh(pi B))^2)"


def _positive_float(text: str) -> float:
    value = float(text)
    if not (math.isfinite(value) and value > 0.0):
        raise argparse.ArgumentTypeError(f"need a finite positive value, got {text}")
    return value


def _finite_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"need a finite value, got {text}")
    return value


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=_finite_float, default=0.8, help="order-alpha weight")
    p.add_argument("--b", type=_finite_float, default=0.1, help="complex-pair weight")
    p.add_argument("--alpha", type=_finite_float, default=0.4, help="real order part")
    p.add_argument("--B", type=_finite_float, default=0.4, help="imaginary order part")


def _add_output_flags(p: argparse.ArgumentParser, plot: bool = False) -> None:
    p.add_argument("--output", metavar="PATH", default=None, help="write here instead of stdout")
    p.add_argument(
        "--precision",
        type=int,
        default=17,
        metavar="P",
        help="significant digits in emitted values (default 17, round-trip exact)",
    )
    if plot:
        p.add_argument(
            "--plot",
            action="store_true",
            help="also render a figure next to the CSV (requires --output)",
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracvisco",
        description="Complex-order fractional Kelvin-Voigt model toolkit",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("check", help="thermodynamic admissibility of a parameter set")
    _add_model_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("modulus", help="storage and loss moduli over a frequency grid")
    _add_model_flags(p)
    p.add_argument("--omega-min", type=_positive_float, default=1e-2)
    p.add_argument("--omega-max", type=_positive_float, default=1e2)
    p.add_argument("--steps", type=int, default=200)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("zeros", help="winding numbers and zeros of the characteristic function")
    _add_model_flags(p)
    p.add_argument("--r-inner", type=_positive_float, default=1e-3)
    p.add_argument("--r-outer", type=_positive_float, default=1e3)
    p.add_argument("--samples", type=int, default=256)
    _add_output_flags(p)

    p = sub.add_parser("kernel", help="tabulate the creep kernel")
    _add_model_flags(p)
    p.add_argument("--t-max", type=_positive_float, default=10.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("relax", help="stress response to a regularized strain step")
    _add_model_flags(p)
    p.add_argument("--t-max", type=_positive_float, default=10.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--method", choices=("expansion", "direct"), default="expansion")
    p.add_argument("--k-reg", type=_positive_float, default=0.01)
    p.add_argument("--N", type=int, default=None, dest="n_expansion",
                   help="series terms (default 100)")
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("creep", help="strain response to a unit stress step")
    _add_model_flags(p)
    p.add_argument("--t-max", type=_positive_float, default=100.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument(
        "--method", choices=("expansion", "convolution", "post"), default="convolution"
    )
    p.add_argument("--k-reg", type=_positive_float, default=0.01)
    p.add_argument("--N", type=int, default=None, dest="n_expansion",
                   help="series terms (default 7)")
    p.add_argument("--post-n", type=int, default=25)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    _add_output_flags(p, plot=True)

    p = sub.add_parser("compare", help="worst relative deviation between two methods")
    _add_model_flags(p)
    p.add_argument("--experiment", choices=("relaxation", "creep"), required=True)
    p.add_argument("--method-a", required=True)
    p.add_argument("--method-b", required=True)
    p.add_argument("--t-max", type=_positive_float, default=100.0)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--k-reg", type=_positive_float, default=0.01)
    p.add_argument("--N", type=int, default=None, dest="n_expansion")
    p.add_argument("--post-n", type=int, default=25)
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.add_argument("--floor", type=_positive_float, default=0.05)
    p.add_argument("--t-min", type=_finite_float, default=0.0)
    _add_output_flags(p)

    return parser


def _emit(lines: list[str], output: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="\n") as fh:
            fh.write(text)


def _rows(header: str, columns, precision: int) -> list[str]:
    fmt = f"{{:.{precision}g}}"
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(fmt.format(v) for v in row))
    return lines


def _params_from(args) -> ModelParams:
    return ModelParams(a=args.a, b=args.b, alpha=args.alpha, B=args.B)


def _png_path(output: str) -> str:
    return str(Path(output).with_suffix(".png"))


def _check_plot_flag(args) -> None:
    if getattr(args, "plot", False) and args.output is None:
        raise ValueError("--plot requires --output: --plot given, --output missing")


def _cmd_check(args) -> int:
    params = _params_from(args)
    report = check_thermo(params)
    trig_t = "cot" if params.alpha <= 0.5 else "tan"
    trig_s = "tan" if (0.25 <= params.alpha <= 0.75 and params.alpha != 0.5) else "cot"
    lines = []
    if report.thermo_ok:
        lines.append(f"thermo: OK ({params.a:.4g} >= ~{report.thermo_threshold:.4g})")
    else:
        lines.append(f"thermo: FAIL ({params.a:.4g} < ~{report.thermo_threshold:.4g})")
        lines.append(
            "violated restriction: "
            + _THERMO_RULE.format(trig=trig_t)
            + f": a = {params.a:.17g}, threshold = {report.thermo_threshold:.17g}"
        )
    if report.strong_ok:
        lines.append(
            f"strong (no zeros): OK ({params.a:.4g} >= ~{report.strong_threshold:.4g})"
        )
    else:
        lines.append(
            f"strong (no zeros): not satisfied "
            f"({params.a:.4g} < ~{report.strong_threshold:.4g}); rule: "
            + _STRONG_RULE.format(trig=trig_s)
        )
    _emit(lines, args.output)
    return 0 if report.thermo_ok else 2


def _cmd_modulus(args) -> int:
    _check_plot_flag(args)
    params = _params_from(args)
    if args.steps < 1:
        raise ValueError(f"steps must be >= 1, got {args.steps}")
    if not args.omega_min < args.omega_max:
        raise ValueError(
            f"need omega-min < omega-max, got {args.omega_min} >= {args.omega_max}"
        )
    from .thermo import storage_loss

    grid = np.logspace(
        math.log10(args.omega_min), math.log10(args.omega_max), args.steps + 1
    )
    re, im = storage_loss(params, grid)
    _emit(_rows("omega,re_E,im_E", (grid, re, im), args.precision), args.output)
    if getattr(args, "plot", False):
        from .plotting import save_modulus

        save_modulus(grid, re, im, _png_path(args.output), title="complex modulus")
    return 0


def _cmd_zeros(args) -> int:
    params = _params_from(args)
    if args.samples < 8:
        raise ValueError(f"samples must be >= 8, got {args.samples}")
    spec_r = ContourSpec(args.r_inner, args.r_outer, "right", args.samples)
    spec_lu = ContourSpec(args.r_inner, args.r_outer, "left-upper", args.samples)
    w_right = winding_number(params, spec_r)
    w_upper = winding_number(params, spec_lu)
    zs = find_zeros(params, args.r_inner, args.r_outer, args.samples)
    fmt = f"{{:.{args.precision}g}}"
    lines = [
        f"# winding right: {w_right}",
        f"# winding left-upper: {w_upper}",
        f"# count verified: {'yes' if zs.count_verified else 'NO'}",
        "re,im,psi_prime_re,psi_prime_im",
    ]
    listed: list[complex] = []
    for z in zs.zeros:
        listed.extend((z, z.conjugate()))
    listed.extend(complex(x) for x in zs.real_zeros)
    for z in listed:
        d = char_function_deriv(params, z)
        lines.append(",".join(fmt.format(v) for v in (z.real, z.imag, d.real, d.imag)))
    _emit(lines, args.output)
    if not zs.count_verified:
        print("zero search could not verify the winding count", file=sys.stderr)
        return 1
    return 0


def _cmd_kernel(args) -> int:
    _check_plot_flag(args)
    params = _params_from(args)
    if args.steps < 2:
        raise ValueError(f"steps must be >= 2, got {args.steps}")
    table = build_kernel_table(
        params, args.t_max, args.steps, tol=min(args.tol, 1e-9)
    )
    _emit(_rows("t,value", (table.t, table.values), args.precision), args.output)
    if getattr(args, "plot", False):
        from .experiments import SampledSignal
        from .plotting import save_curve

        save_curve(
            SampledSignal(table.t, table.values),
            _png_path(args.output),
            ylabel="K(t)",
            title="creep kernel",
        )
    return 0


def _cmd_relax(args) -> int:
    _check_plot_flag(args)
    config = ExperimentConfig(
        params=_params_from(args),
        experiment="relaxation",
        method=args.method,
        t_max=args.t_max,
        steps=args.steps,
        k_reg=args.k_reg,
        n_expansion=args.n_expansion,
        tol=args.tol,
    )
    signal = stress_relaxation(config)
    _emit(_rows("t,sigma", (signal.t, signal.values), args.precision), args.output)
    if getattr(args, "plot", False):
        from .plotting import save_curve

        save_curve(
            signal, _png_path(args.output), ylabel="sigma(t)", title="stress relaxation"
        )
    return 0


def _cmd_creep(args) -> int:
    _check_plot_flag(args)
    config = ExperimentConfig(
        params=_params_from(args),
        experiment="creep",
        method=args.method,
        t_max=args.t_max,
        steps=args.steps,
        k_reg=args.k_reg,
        n_expansion=args.n_expansion,
        post_n=args.post_n,
        tol=args.tol,
    )
    signal = creep(config)
    _emit(_rows("t,epsilon", (signal.t, signal.values), args.precision), args.output)
    if getattr(args, "plot", False):
        from .plotting import save_curve

        save_curve(signal, _png_path(args.output), ylabel="epsilon(t)", title="creep")
    return 0


def _cmd_compare(args) -> int:
    common = dict(
        params=_params_from(args),
        experiment=args.experiment,
        t_max=args.t_max,
        steps=args.steps,
        k_reg=args.k_reg,
        n_expansion=args.n_expansion,
        post_n=args.post_n,
        tol=args.tol,
    )
    result = compare_methods(
        ExperimentConfig(method=args.method_a, **common),
        ExperimentConfig(method=args.method_b, **common),
        floor=args.floor,
        t_min=args.t_min,
    )
    fmt = f"{{:.{args.precision}g}}"
    _emit(
        [
            f"max relative deviation: {fmt.format(result.max_rel_diff)}"
            f" at t = {fmt.format(result.at_time)}"
        ],
        args.output,
    )
    return 0


_HANDLERS = {
    "check": _cmd_check,
    "modulus": _cmd_modulus,
    "zeros": _cmd_zeros,
    "kernel": _cmd_kernel,
    "relax": _cmd_relax,
    "creep": _cmd_creep,
    "compare": _cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.precision < 1 or args.precision > 17:
        print(
            f"invalid parameters: need 1 <= precision <= 17, got {args.precision}",
            file=sys.stderr,
        )
        return 2
    try:
        return _HANDLERS[args.subcommand](args)
    except ValueError as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return 2
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
