"""Command-line interface.

Subcommands: lambda, sums, hypothesis, constant, roots, fit, verify,
selfcheck.  CSV output uses a header row, comma separators, 17 significant
digits and LF line endings; JSON output uses a fixed key order.  Identical
arguments produce byte-identical output regardless of --threads.

Exit codes: 0 success, 2 domain error, 3 numeric error, 4 capacity error,
64 usage error.
"""

import argparse
import configparser
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .asymptotics import (
    DEFAULT_MARGIN,
    characteristic_roots,
    euler_product,
    fit_expansion,
    mean_value_constant,
    report_to_json_dict,
    theoretical_leading,
    verify_theorem,
)
from .errors import CapacityError, DomainError, NumericError
from .lambdaf import lambda_fh, lambda_table
from .mf import MultiplicativeFunction, function_from_config, get_function
from .sums import (
    build_grid,
    check_hypothesis,
    g_log_series,
    lambda_fh_over_n_series,
    logn_power_series,
    s_k_series,
)

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _emit(text: str, out_path: Optional[str]):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


@dataclass
class RunConfig:
    """Validated run parameters shared by the grid-based subcommands."""

    function: MultiplicativeFunction
    kappa: float
    h: int
    x_max: float
    q_min: float
    points: int
    ratio: Optional[float]
    out: Optional[str]
    fmt: Optional[str]
    threads: int
    margin: Optional[float]
    grid: np.ndarray = None

    def __post_init__(self):
        if self.threads < 1:
            raise DomainError("threads must be >= 1")
        if self.points < 8:
            raise DomainError("points must be >= 8")
        if not self.x_max >= self.q_min >= 2:
            raise DomainError("need X >= Q_min >= 2")
        if self.grid is None:
            self.grid = build_grid(self.q_min, self.points, self.x_max, self.ratio)


def _default_threads() -> int:
    env = os.environ.get("LF_THREADS", "").strip()
    if env:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"LF_THREADS must be an integer, got {env!r}")
    return 1


def _load_config(path: Optional[str]):
    if not path:
        return {}, {}
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise DomainError(f"cannot read config file {path!r}")
    function_block = dict(parser["function"]) if parser.has_section("function") else {}
    run_block = dict(parser["run"]) if parser.has_section("run") else {}
    return function_block, run_block


def _resolve_function(args) -> MultiplicativeFunction:
    fn_block, _ = _load_config(getattr(args, "config", None))
    name = getattr(args, "f", None)
    if fn_block:
        config_fn = function_from_config(fn_block)
        if name is None or name == config_fn.name:
            return config_fn
    if name is None:
        raise DomainError("no function given: pass --f or a config [function] block")
    return get_function(name)


def _resolve_kappa(args, f: MultiplicativeFunction) -> float:
    return f.kappa_claimed if args.kappa is None else float(args.kappa)


def _run_config(args, f: MultiplicativeFunction, threads: int) -> RunConfig:
    x_max = float(args.X) if args.X is not None else None
    grid = build_grid(args.q_min, args.points, x_max, args.ratio)
    return RunConfig(
        function=f,
        kappa=_resolve_kappa(args, f),
        h=int(args.h) if args.h is not None else int(f.h_claimed),
        x_max=float(grid[-1]),
        q_min=float(args.q_min),
        points=int(args.points),
        ratio=args.ratio,
        out=args.out,
        fmt=args.fmt,
        threads=threads,
        margin=getattr(args, "margin", None),
        grid=grid,
    )


def _add_common(p, grid=False):
    p.add_argument("--f", help="catalog function name or config function")
    p.add_argument("--config", help="INI file with [function] (and [run]) blocks")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--threads", type=int, default=None,
                   help="worker pool size (defaults to LF_THREADS or 1)")
    p.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    if grid:
        p.add_argument("--X", type=float, default=None, help="largest grid point")
        p.add_argument("--Q-min", dest="q_min", type=float, default=1000.0)
        p.add_argument("--points", type=int, default=64)
        p.add_argument("--ratio", type=float, default=None)


def _build_parser():
    parser = _Parser(prog="mangoldt", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("lambda", help="dump prime-power table or order-h sequence")
    _add_common(p)
    p.add_argument("--N", type=float, required=True, help="upper bound")

    p = sub.add_parser("sums", help="weighted partial sums along a grid")
    _add_common(p, grid=True)
    p.add_argument("--k", type=int, default=0, help="weight order")
    p.add_argument(
        "--weight",
        choices=("log_n", "log_X_over_n", "lambda_log_n", "lambda_fh_over_n"),
        default="log_n",
    )

    p = sub.add_parser("hypothesis", help="prime-sum hypothesis constants")
    _add_common(p, grid=True)

    p = sub.add_parser("constant", help="Euler product and predicted leading term")
    _add_common(p)
    p.add_argument("--P-max", dest="p_max", type=int, default=10**6)

    p = sub.add_parser("roots", help="characteristic roots")
    _add_common(p)

    p = sub.add_parser("fit", help="least-squares expansion fit")
    _add_common(p, grid=True)
    p.add_argument("--margin", type=float, default=None)

    p = sub.add_parser("verify", help="full verification report")
    _add_common(p, grid=True)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--P-max", dest="p_max", type=int, default=10**6)

    p = sub.add_parser("selfcheck", help="run the invariant suite")
    _add_common(p)

    return parser


# ---------------------------------------------------------------------------
# Subcommand bodies
# ---------------------------------------------------------------------------


def _cmd_lambda(args) -> int:
    f = _resolve_function(args)
    n_max = int(float(args.N))
    if args.h is None:
        table = lambda_table(f, n_max)
        rows = (
            (str(int(p)), str(int(m)), _fmt(v))
            for p, m, v in zip(table.p, table.m, table.values)
        )
        _emit(_csv(("p", "m", "value"), rows), args.out)
    else:
        seq = lambda_fh(f, int(args.h), n_max)
        rows = ((str(n), _fmt(seq.values[n])) for n in range(1, n_max + 1))
        _emit(_csv(("n", "value"), rows), args.out)
    return 0


def _cmd_sums(args) -> int:
    f = _resolve_function(args)
    cfg = _run_config(args, f, args.threads)
    k = int(args.k)
    if args.weight == "log_n":
        series = logn_power_series(f, k, cfg.grid)
    elif args.weight == "log_X_over_n":
        series = g_log_series(f, k, cfg.grid)
    elif args.weight == "lambda_log_n":
        series = s_k_series(f, k, cfg.grid)
    else:
        series = lambda_fh_over_n_series(f, cfg.h, cfg.grid)
    rows = ((str(int(q)), _fmt(v)) for q, v in zip(series.grid, series.sums))
    _emit(_csv(("X", "value"), rows), cfg.out)
    return 0


def _cmd_hypothesis(args) -> int:
    f = _resolve_function(args)
    cfg = _run_config(args, f, args.threads)
    rep = check_hypothesis(f, cfg.kappa, cfg.h, cfg.grid)
    if (args.fmt or "csv") == "json":
        payload = {
            "function": f.name,
            "kappa": float(rep.kappa),
            "h": int(rep.h),
            "eta0_hat": float(rep.eta0_hat),
            "A_hat": float(rep.A_hat),
            "eta_k_hat": [float(v) for v in rep.eta_k_hat],
            "max_scaled_residual": float(rep.max_scaled_residual),
            "grid_size": int(rep.grid_size),
        }
        _emit(_json_text(payload), args.out)
    else:
        rows = (
            (str(int(q)), _fmt(s), _fmt(r))
            for q, s, r in zip(rep.grid, rep.s0, rep.scaled_residuals)
        )
        _emit(_csv(("Q", "value", "scaled_residual"), rows), args.out)
    return 0


def _cmd_constant(args) -> int:
    f = _resolve_function(args)
    kappa = _resolve_kappa(args, f)
    h = args.h if args.h is not None else 0
    value, tail = euler_product(f, kappa, args.p_max)
    payload = {
        "function": f.name,
        "kappa": float(kappa),
        "h": int(h),
        "P_max": int(args.p_max),
        "euler_product": float(value),
        "tail_bound": float(tail),
        "C_mean_value": float(mean_value_constant(f, kappa, args.p_max)),
        "theoretical_leading": float(theoretical_leading(f, kappa, int(h), args.p_max)),
    }
    if (args.fmt or "json") == "json":
        _emit(_json_text(payload), args.out)
    else:
        rows = ((k, _fmt(v) if isinstance(v, float) else str(v)) for k, v in payload.items())
        _emit(_csv(("key", "value"), rows), args.out)
    return 0


def _cmd_roots(args) -> int:
    if args.h is None or args.kappa is None:
        raise DomainError("roots needs --h and --kappa")
    rs = characteristic_roots(int(args.h), float(args.kappa))
    fmt = args.fmt or "text"
    if fmt == "json":
        payload = {
            "h": rs.h,
            "kappa": float(rs.kappa),
            "roots": [[float(z.real), float(z.imag)] for z in rs.roots],
        }
        _emit(_json_text(payload), args.out)
    elif fmt == "csv":
        rows = ((_fmt(z.real), _fmt(z.imag)) for z in rs.roots)
        _emit(_csv(("re", "im"), rows), args.out)
    else:
        lines = []
        for z in rs.roots:
            if z.imag == 0.0:
                lines.append(_fmt(z.real))
            else:
                sign = "+" if z.imag >= 0 else "-"
                lines.append(f"{_fmt(z.real)} {sign} {_fmt(abs(z.imag))}i")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_fit(args) -> int:
    f = _resolve_function(args)
    cfg = _run_config(args, f, args.threads)
    series = logn_power_series(f, cfg.h + 1, cfg.grid)
    margin = cfg.margin if cfg.margin is not None else DEFAULT_MARGIN
    fit = fit_expansion(series, cfg.kappa, cfg.h, margin)
    if (cfg.fmt or "json") == "json":
        payload = {
            "function": f.name,
            "kappa": float(cfg.kappa),
            "h": cfg.h,
            "X_max": float(cfg.grid[-1]),
            "C_hat": float(fit.C_hat),
            "a_hat": [float(a) for a in fit.a_hat],
            "envelope_exponent": float(fit.envelope_exponent),
            "envelope_ok": bool(fit.envelope_ok),
            "margin": float(fit.margin),
            "max_abs_residual": float(np.max(np.abs(fit.residuals))),
        }
        _emit(_json_text(payload), cfg.out)
    else:
        rows = (
            (str(int(q)), _fmt(s), _fmt(fv), _fmt(r))
            for q, s, fv, r in zip(cfg.grid, series.sums, fit.fitted, fit.residuals)
        )
        _emit(_csv(("X", "measured", "fitted", "residual"), rows), cfg.out)
    return 0


def _cmd_verify(args) -> int:
    f = _resolve_function(args)
    if args.X is None:
        raise DomainError("verify needs --X")
    cfg = _run_config(args, f, args.threads)
    report = verify_theorem(
        f,
        cfg.kappa,
        cfg.h,
        cfg.x_max,
        q_min=cfg.q_min,
        points=cfg.points,
        ratio=cfg.ratio,
        margin=cfg.margin,
        p_max=args.p_max,
    )
    payload = report_to_json_dict(report)
    if (cfg.fmt or "json") == "json":
        _emit(_json_text(payload), cfg.out)
    else:
        rows = ((k, json.dumps(v)) for k, v in payload.items())
        _emit(_csv(("key", "value"), rows), cfg.out)
    return 0


def _cmd_selfcheck(args) -> int:
    from .selfcheck import run_selfcheck

    results = run_selfcheck()
    lines = []
    ok_all = True
    for name, ok, detail in results:
        if ok:
            lines.append(f"PASS {name}")
        else:
            ok_all = False
            lines.append(f"FAIL {name}: {detail}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if ok_all else NumericError.exit_code


_COMMANDS = {
    "lambda": _cmd_lambda,
    "sums": _cmd_sums,
    "hypothesis": _cmd_hypothesis,
    "constant": _cmd_constant,
    "roots": _cmd_roots,
    "fit": _cmd_fit,
    "verify": _cmd_verify,
    "selfcheck": _cmd_selfcheck,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_EXIT
    try:
        if getattr(args, "threads", None) is None:
            args.threads = _default_threads()
        else:
            args.threads = int(args.threads)
        if args.threads < 1:
            raise DomainError("threads must be >= 1")
        # All kernels are deterministic and sequential; the worker-pool size
        # is accepted (and validated) but never changes any result byte.
        return _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return DomainError.exit_code
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return NumericError.exit_code
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return CapacityError.exit_code


if __name__ == "__main__":
    sys.exit(main())
