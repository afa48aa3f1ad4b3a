"""Command line front end.

    fracmvt op rl-int --f "1" --alpha 0.5 --n 1025 --at 1
    fracmvt mvt differential --f "x^2" --alpha 0.5 --n 2049 --format json
    fracmvt nagumo scan --rhs counterexample --alpha 0.5 --ylo -1 --yhi 2
    fracmvt ivp eoc --rhs "-y" --y0 1 --alpha 0.5 --exact ml:-1

Exit codes: 0 success, 2 bad arguments or expression syntax, 3 numerical
failure, 4 violated precondition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import expr
from .errors import (
    DifferentiationError,
    ExprSyntaxError,
    FracError,
    NumericalError,
    PreconditionError,
)
from .ivp import (
    IvpProblem,
    eoc_study,
    mittag_leffler_exact,
    residual_check,
    solve_abm,
    uniqueness_experiment,
)
from .mvt import (
    DEFAULT_TOL,
    Witness,
    differential_mvt_witness,
    integral_mvt_witness,
    simple_integral_mvt_witness,
)
from .nagumo import CounterexampleRhs, ExprRhs, nagumo_scan
from .operators import (
    FracOrder,
    Mesh,
    caputo_definition,
    caputo_smooth,
    fundamental_residual,
    rl_integral,
    sample,
    taylor_poly,
    taylor_remainder_residual,
)

DEFAULT_N = 1025
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_PRECONDITION = 0, 2, 3, 4

EXPRESSION_HELP = """\
expressions: decimal literals (1, 0.5, 2.5e-3), pi, variables x and y,
operators + - * / ^ (^ is right associative and binds tighter than unary
minus), parentheses, and sin cos exp ln abs sqrt gamma (one argument) and
pow(a, b). Quote expressions containing spaces.
"""


# {{{ output


def fmt_float(value: float) -> str:
    """17 significant digits, lowercase scientific notation."""
    return f"{float(value):.16e}"


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    return str(value)


def _json_value(value, indent: int) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [pad + _json_value(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise NumericalError(f"non-finite value {value!r} in output")
        return fmt_float(value)
    return json.dumps(str(value))


def to_json(obj) -> str:
    return _json_value(obj, 0) + "\n"


@dataclass
class Output:
    command: str
    params: dict
    result: dict
    header: list
    rows: list
    summary: list = field(default_factory=list)

    def render(self, form: str) -> str:
        if form == "json":
            return to_json({"command": self.command, "params": self.params, "result": self.result})
        if form == "csv":
            lines = [",".join(self.header)]
            lines += [",".join(_csv_cell(v) for v in row) for row in self.rows]
            return "\n".join(lines) + "\n"
        lines = [self.command]
        lines += [f"  {k} = {v}" for k, v in self.params.items()]
        lines += self.summary or [f"{k}: {v}" for k, v in self.result.items()]
        return "\n".join(lines) + "\n"


def _sampled_output(command, params, x, values, at=None) -> Output:
    if at is not None:
        value = float(np.interp(at, x, values))
        return Output(command, params, {"x": float(at), "value": value},
                      ["x", "value"], [[float(at), value]],
                      [f"value at x = {at:g}: {value:.10f}"])
    rows = [[float(t), float(v)] for t, v in zip(x, values)]
    result = {"x": [float(t) for t in x], "value": [float(v) for v in values]}
    summary = [f"{len(rows)} nodes; value at x = {x[-1]:g}: {values[-1]:.10f}",
               "(use --format csv or json for every node)"]
    return Output(command, params, result, ["x", "value"], rows, summary)


def _witness_output(command, params, w: Witness) -> Output:
    result = {"xi": w.xi, "target": w.target, "residual": w.residual,
              "lo": w.bracket[0], "hi": w.bracket[1], "degenerate": w.degenerate}
    summary = [f"xi = {w.xi:.12f}", f"target = {w.target:.12g}",
               f"residual = {w.residual:.3e}", f"bracket = [{w.bracket[0]:.15g}, {w.bracket[1]:.15g}]"]
    if w.degenerate:
        summary.append("degenerate witness: the identity holds trivially")
    return Output(command, params, result,
                  ["xi", "target", "residual", "lo", "hi", "degenerate"],
                  [[w.xi, w.target, w.residual, w.bracket[0], w.bracket[1], w.degenerate]], summary)


def _scalar_output(command, params, name, value, extra=None) -> Output:
    result = {name: value}
    result.update(extra or {})
    return Output(command, params, result, list(result), [list(result.values())],
                  [f"{k} = {v:.6e}" if isinstance(v, float) else f"{k} = {v}" for k, v in result.items()])


# }}}


# {{{ argument helpers


def _rhs(args):
    if args.rhs.strip() == "counterexample":
        rhs = CounterexampleRhs(args.alpha)
    else:
        rhs = ExprRhs(args.rhs)
    if getattr(args, "scale", 1.0) != 1.0:
        rhs = rhs.scaled(args.scale)
    return rhs


def _problem(args) -> IvpProblem:
    return IvpProblem(FracOrder(args.alpha), args.b, args.y0, _rhs(args))


def _params(args) -> dict:
    skip = {"handler", "format", "out", "group", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# }}}


# {{{ handlers


def cmd_rl_int(args) -> Output:
    mesh = Mesh(args.a, args.b, args.n)
    out = rl_integral(sample(args.f, mesh), args.alpha)
    return _sampled_output("op rl-int", _params(args), mesh.nodes, out.values, args.at)


def cmd_caputo(args) -> Output:
    order = FracOrder(args.alpha)
    mesh = Mesh(args.a, args.b, args.n)
    if args.route == "smooth":
        out = caputo_smooth(args.f, order, mesh)
    else:
        out = caputo_definition(sample(args.f, mesh), order, taylor_poly(args.f, args.a, order.ceil_m - 1))
    return _sampled_output("op caputo", _params(args), mesh.nodes, out.values, args.at)


def cmd_fundamental(args) -> Output:
    r = fundamental_residual(args.f, FracOrder(args.alpha), Mesh(args.a, args.b, args.n))
    return _scalar_output("check fundamental", _params(args), "residual", r)


def cmd_taylor_remainder(args) -> Output:
    r = taylor_remainder_residual(args.f, FracOrder(args.alpha), Mesh(args.a, args.b, args.n))
    return _scalar_output("check taylor-remainder", _params(args), "residual", r)


def cmd_mvt_integral(args) -> Output:
    w = simple_integral_mvt_witness(args.f, FracOrder(args.alpha), args.a, args.b, args.n, args.tol)
    return _witness_output("mvt integral", _params(args), w)


def cmd_mvt_weighted(args) -> Output:
    w = integral_mvt_witness(args.f, args.g, FracOrder(args.alpha), args.a, args.b, args.n, args.tol)
    return _witness_output("mvt integral-weighted", _params(args), w)


def cmd_mvt_differential(args) -> Output:
    w = differential_mvt_witness(args.f, FracOrder(args.alpha), args.a, args.b, args.n, args.tol)
    return _witness_output("mvt differential", _params(args), w)


def cmd_nagumo_scan(args) -> Output:
    rep = nagumo_scan(_rhs(args), FracOrder(args.alpha), args.b, args.nx, args.ny, (args.ylo, args.yhi))
    x, y1, y2 = rep.argmax
    result = {"sup_ratio": rep.sup_ratio, "satisfied": rep.satisfied, "x": x, "y1": y1, "y2": y2,
              "samples_used": rep.samples_used}
    summary = [f"sup ratio = {rep.sup_ratio:.15g} ({rep.verdict})",
               f"attained at x = {x:.6g}, y1 = {y1:.6g}, y2 = {y2:.6g}",
               f"{rep.samples_used} sampled triples"]
    return Output("nagumo scan", _params(args), result, list(result), [list(result.values())], summary)


def cmd_nagumo_counterexample(args) -> Output:
    rhs = CounterexampleRhs(args.alpha)
    value = float(rhs(args.x, args.y))
    branch = "y > x^alpha" if args.y > args.x**args.alpha else ("0 < y <= x^alpha" if args.y > 0 else "y <= 0")
    result = {"x": args.x, "y": args.y, "value": value, "branch": branch}
    return Output("nagumo counterexample", _params(args), result, list(result), [list(result.values())],
                  [f"f({args.x:g}, {args.y:g}) = {value:.12g}  [{branch}]"])


def cmd_ivp_solve(args) -> Output:
    sol = solve_abm(_problem(args), args.steps, args.sweeps)
    out = _sampled_output("ivp solve", _params(args), sol.mesh.nodes, sol.y)
    out.result["max_correction"] = sol.max_correction
    return out


def cmd_ivp_residual(args) -> Output:
    r = residual_check(args.candidate, _problem(args), args.n)
    return _scalar_output("ivp residual", _params(args), "residual", r)


def cmd_ivp_eoc(args) -> Output:
    problem = _problem(args)
    if args.exact.startswith("ml:"):
        exact = mittag_leffler_exact(problem, float(args.exact[3:]))
    else:
        exact = expr.parse(args.exact)
    n_list = [int(s) for s in args.n_list.split(",")]
    rows = eoc_study(problem, exact, n_list, args.sweeps)
    table = [[r.n, r.error, r.order] for r in rows]
    result = {"rows": [{"n": r.n, "error": r.error, "order": r.order} for r in rows]}
    summary = [f"{'n':>8} {'error':>24} order"]
    for r in rows:
        order = "-" if r.order is None else (r.order if isinstance(r.order, str) else f"{r.order:.3f}")
        summary.append(f"{r.n:>8} {r.error:>24.6e} {order}")
    return Output("ivp eoc", _params(args), result, ["n", "error", "order"], table, summary)


def cmd_ivp_uniqueness(args) -> Output:
    report = uniqueness_experiment(_problem(args), args.eps or [1e-3, 1e-6], args.steps)
    result = {"gaps": [{"eps": e, "sup_gap": g} for e, g in report.gaps],
              "family_residuals": [{"c": c, "residual": r} for c, r in report.family_residuals.items()],
              "note": report.note}
    rows = [["gap", e, g] for e, g in report.gaps]
    rows += [["family", c, r] for c, r in report.family_residuals.items()]
    summary = [f"eps = {e:.3e}: sup w = {g:.6e}" for e, g in report.gaps]
    summary += [f"y = {c:g} x^alpha: residual = {r:.3e}" for c, r in report.family_residuals.items()]
    summary.append("note: " + report.note)
    return Output("ivp uniqueness", _params(args), result, ["kind", "parameter", "value"], rows, summary)


# }}}


# {{{ parser


def _common(p: argparse.ArgumentParser, *, interval=True, n=True, alpha_help="fractional order alpha > 0"):
    p.add_argument("--alpha", type=float, required=True, help=alpha_help)
    if interval:
        p.add_argument("--a", type=float, default=0.0, help="starting point a (default 0)")
        p.add_argument("--b", type=float, default=1.0, help="right end point b (default 1)")
    if n:
        p.add_argument("--n", type=int, default=DEFAULT_N, help=f"mesh nodes (default {DEFAULT_N})")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"tolerance (default {DEFAULT_TOL:g})")
    p.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
    p.add_argument("--out", default=None, help="write output here instead of standard output")


def _ivp_args(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, required=True, help="order, 0 < alpha <= 1")
    p.add_argument("--b", type=float, default=1.0, help="solve on [0, b] (default 1)")
    p.add_argument("--y0", type=float, default=0.0, help="initial value y(0) (default 0)")
    p.add_argument("--rhs", required=True,
                   help="f(x, y) as an expression, or the built-in name 'counterexample'")
    p.add_argument("--scale", type=float, default=1.0, help="multiply the right-hand side by this factor")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help=f"tolerance (default {DEFAULT_TOL:g})")
    p.add_argument("--format", choices=("pretty", "csv", "json"), default="pretty")
    p.add_argument("--out", default=None)


def _leaf(sub, name, handler, description):
    p = sub.add_parser(name, help=description.splitlines()[0], description=description,
                       epilog=EXPRESSION_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.set_defaults(handler=handler)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracmvt",
        description="Fractional integrals, Caputo derivatives, mean value witnesses, "
                    "Nagumo-type uniqueness checks and Caputo IVP solves.",
        epilog=EXPRESSION_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    groups = parser.add_subparsers(dest="group", required=True)

    op = groups.add_parser("op", help="fractional operators").add_subparsers(dest="command", required=True)
    p = _leaf(op, "rl-int", cmd_rl_int,
              "Riemann-Liouville integral J_a^alpha f by product trapezoidal quadrature.\n"
              "J_a^beta f(x) = 1/Gamma(beta) int_a^x (x-t)^(beta-1) f(t) dt, J^0 f = f.")
    p.add_argument("--f", required=True, help="integrand f(x)")
    p.add_argument("--at", type=float, default=None, help="report only the value at this x")
    _common(p, alpha_help="integral order beta >= 0")
    p = _leaf(op, "caputo", cmd_caputo,
              "Caputo derivative D_*a^alpha f.\n"
              "smooth route: J^(ceil(alpha)-alpha) applied to the symbolic D^ceil(alpha) f;\n"
              "definition route: d/dx J^(1-alpha) [f - f(a)] on the grid (0 < alpha <= 1).")
    p.add_argument("--f", required=True, help="function f(x)")
    p.add_argument("--route", choices=("smooth", "definition"), default="smooth")
    p.add_argument("--at", type=float, default=None, help="report only the value at this x")
    _common(p)

    check = groups.add_parser("check", help="identity residuals").add_subparsers(dest="command", required=True)
    p = _leaf(check, "fundamental", cmd_fundamental,
              "Fractional fundamental theorem D_*a^alpha J_a^alpha f = f (0 < alpha <= 1).\n"
              "Reports the sup of the defect, skipping x_0 and the first five interior nodes.")
    p.add_argument("--f", required=True)
    _common(p)
    p = _leaf(check, "taylor-remainder", cmd_taylor_remainder,
              "Fractional Taylor theorem f - T_{ceil(alpha)-1}[f;a] = J_a^alpha D_*a^alpha f.\n"
              "Reports the sup of the defect over the mesh.")
    p.add_argument("--f", required=True)
    _common(p)

    mvt = groups.add_parser("mvt", help="mean value witnesses").add_subparsers(dest="command", required=True)
    p = _leaf(mvt, "integral", cmd_mvt_integral,
              "Fractional mean value theorem of integral calculus with g = 1:\n"
              "J_a^alpha f(b) = (b-a)^alpha f(xi) / Gamma(alpha+1) for some xi in (a, b).")
    p.add_argument("--f", required=True)
    _common(p)
    p = _leaf(mvt, "integral-weighted", cmd_mvt_weighted,
              "Fractional mean value theorem of integral calculus with a weight g of one sign:\n"
              "J_a^alpha (f g)(b) = f(xi) J_a^alpha g(b) for some xi in (a, b). Exit 4 if g changes sign.")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True, help="weight g(x); must not change sign on [a, b]")
    _common(p)
    p = _leaf(mvt, "differential", cmd_mvt_differential,
              "Fractional mean value theorem of differential calculus:\n"
              "(f(b) - T_{ceil(alpha)-1}[f;a](b)) / (b-a)^alpha = D_*a^alpha f(xi) / Gamma(alpha+1).")
    p.add_argument("--f", required=True)
    _common(p)

    nag = groups.add_parser("nagumo", help="Nagumo condition").add_subparsers(dest="command", required=True)
    p = _leaf(nag, "scan", cmd_nagumo_scan,
              "Sampled check of the fractional Nagumo condition\n"
              "x^alpha |f(x,y1) - f(x,y2)| <= Gamma(alpha+1) |y1 - y2|, 0 < alpha < 1.")
    p.add_argument("--rhs", required=True, help="f(x, y) expression or 'counterexample'")
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--nx", type=int, default=101)
    p.add_argument("--ny", type=int, default=101)
    p.add_argument("--ylo", type=float, default=-1.0)
    p.add_argument("--yhi", type=float, default=2.0)
    p.add_argument("--b", type=float, default=1.0, help="scan x in (0, b] (default 1)")
    _common(p, interval=False, n=False)
    p = _leaf(nag, "counterexample", cmd_nagumo_counterexample,
              "The discontinuous right-hand side with infinitely many solutions from y(0) = 0:\n"
              "Gamma(alpha+1) for y > x^alpha, Gamma(alpha+1) x^-alpha y for 0 < y <= x^alpha, 0 for y <= 0.")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    _common(p, interval=False, n=False)

    ivp = groups.add_parser("ivp", help="Caputo initial value problems").add_subparsers(dest="command", required=True)
    p = _leaf(ivp, "solve", cmd_ivp_solve,
              "Solve D_*0^alpha y = f(x, y), y(0) = y0 with the fractional Adams predictor-corrector.")
    _ivp_args(p)
    p.add_argument("--steps", type=int, default=DEFAULT_N - 1)
    p.add_argument("--sweeps", type=int, default=1, help="corrector sweeps per step (1 = PECE)")
    p = _leaf(ivp, "residual", cmd_ivp_residual,
              "Residual sup |D_*0^alpha y - f(x, y)| of a candidate solution y(x).")
    _ivp_args(p)
    p.add_argument("--candidate", required=True, help="candidate y(x)")
    p.add_argument("--n", type=int, default=DEFAULT_N)
    p = _leaf(ivp, "eoc", cmd_ivp_eoc,
              "Empirical order of convergence at x = b against an exact solution.\n"
              "--exact takes an expression in x or ml:LAMBDA for y0 E_alpha(LAMBDA x^alpha).")
    _ivp_args(p)
    p.add_argument("--exact", required=True)
    p.add_argument("--n-list", default="64,128,256,512")
    p.add_argument("--sweeps", type=int, default=1)
    p = _leaf(ivp, "uniqueness", cmd_ivp_uniqueness,
              "Nagumo-type uniqueness experiment: gap w = x^-alpha |z - z~| between solves from\n"
              "y0 and y0 + eps; for the counterexample also the residuals of y = c x^alpha.")
    _ivp_args(p)
    p.add_argument("--eps", type=float, action="append", help="perturbation (repeatable)")
    p.add_argument("--steps", type=int, default=DEFAULT_N - 1)
    return parser


# }}}


def _syntax_message(err: ExprSyntaxError, args) -> str:
    lines = [f"error: {err}"]
    for key in ("f", "g", "rhs", "candidate", "exact"):
        source = getattr(args, key, None)
        if not isinstance(source, str):
            continue
        try:
            expr.parse(source)
        except ExprSyntaxError as e:
            if e.offset == err.offset:
                lines.append(f"  --{key} {source}")
                lines.append("  " + " " * (len(key) + 3 + len(source.encode()[: e.offset].decode(errors='ignore'))) + "^")
                break
    return "\n".join(lines)


EXPRESSION_FLAGS = ("--f", "--g", "--rhs", "--candidate", "--exact")


def _bind_expressions(argv: list[str]) -> list[str]:
    # "--rhs -y" would otherwise be read as an unknown option "-y"
    out = []
    it = iter(argv)
    for tok in it:
        if tok in EXPRESSION_FLAGS:
            value = next(it, None)
            out.append(tok if value is None else f"{tok}={value}")
        else:
            out.append(tok)
    return out


def run(argv=None) -> int:
    """Parse ``argv``, dispatch, and return the exit code."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_bind_expressions(argv))
    except SystemExit as e:
        return int(e.code or 0)

    try:
        output = args.handler(args)
        text = output.render(args.format)
    except ExprSyntaxError as e:
        print(_syntax_message(e, args), file=sys.stderr)
        return EXIT_USAGE
    except (PreconditionError, DifferentiationError) as e:
        print(f"error: precondition violated: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except NumericalError as e:
        print(f"error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except FracError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERIC

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
