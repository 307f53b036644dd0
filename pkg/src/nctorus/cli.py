"""Command line front end.

    nct eval | star | res | csum | trace | verify | zeta

Global flags: --config FILE, --seed N, --tol X, --out FILE,
--format {json,csv,text}.  Exit codes: 0 pass, 1 check failure,
2 usage/parse error, 3 numerical non-convergence.

JSON in, JSON/CSV out.  All reports are deterministic for a fixed
(config, seed); diagnostics go to stderr as one JSON object per error.
"""

from __future__ import annotations

import argparse
import json
import sys
from types import SimpleNamespace

from . import serialize, verify
from .extension import extend, get_profile
from .finitepart import FitConfig, Polytope, polytope_partial_sums
from .quantise import TraceNonConvergence, op_trace, star_asympt, star_exact
from .symbols import SymbolExpr, bar_tau, eval_lattice
from .traces import (
    _lattice_values_fn,
    canonical_sum_theta,
    cutoff_sum,
    res_theta,
    zeta_em,
)

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small parsers


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma separated integers, got {text!r}") from None


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma separated floats, got {text!r}") from None


def _window(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected a window A:B, got {text!r}") from None


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise UsageError(f"expected RE or RE,IM, got {text!r}")


def _load_symbol(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    return serialize.load_object(payload)


# ---------------------------------------------------------------------------
# output


def _weyl_payload(v) -> dict:
    return {
        "coeffs": [
            {"k": list(k), "re": c.real, "im": c.imag}
            for k, c in sorted(v.coeffs.items())
        ]
    }


def _flat_rows(payload: dict, prefix: str = "") -> list[list]:
    rows: list[list] = []
    for key in sorted(payload):
        val = payload[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            rows.extend(_flat_rows(val, name + "."))
        elif isinstance(val, list):
            rows.append([name, json.dumps(serialize._json_safe(val))])
        else:
            rows.append([name, val])
    return rows


def emit(payload: dict, fmt: str, out: str | None, text_fn=None) -> None:
    if fmt == "json":
        body = serialize.canonical_json(payload) + "\n"
    elif fmt == "csv":
        lines = []
        if "table" in payload:
            lines.append(",".join(payload.get("columns", [])))
            for row in payload["table"]:
                cells = [serialize._json_safe(v) for v in row]
                lines.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in cells))
        else:
            lines.append("key,value")
            for name, v in _flat_rows({k: v for k, v in payload.items() if k not in ("columns",)}):
                lines.append(f"{name},{v}")
        body = "\n".join(lines) + "\n"
    else:
        body = (text_fn(payload) if text_fn is not None else serialize.canonical_json(payload)) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)


def _diag(message: str, kind: str) -> None:
    sys.stderr.write(json.dumps({"error": message, "kind": kind}) + "\n")


# ---------------------------------------------------------------------------
# command bodies


def cmd_eval(args, cfg: verify.RunConfig) -> int:
    sigma = _load_symbol(args.symbol)
    if args.at is not None:
        k = _ints(args.at)
        value = eval_lattice(sigma, k)
        point, lattice = list(k), True
    else:
        xi = _floats(args.real)
        if hasattr(sigma, "eval_real"):
            value = sigma.eval_real(xi)
        else:
            ext = extend(sigma, profile=get_profile(cfg.profile_quality),
                         radius=cfg.extension_radius)
            value = ext.eval_real(xi)
        point, lattice = list(xi), False
    payload = {"kind": "eval", "point": point, "lattice": lattice,
               "value": _weyl_payload(value)}
    emit(payload, args.format, args.out, lambda p: str(value))
    return EXIT_OK


def cmd_star(args, cfg: verify.RunConfig) -> int:
    left = _load_symbol(args.left)
    right = _load_symbol(args.right)
    if args.krange is not None:
        if args.asympt is None:
            raise UsageError("--krange needs --asympt J to compare against")
        if not isinstance(left, SymbolExpr) or not isinstance(right, SymbolExpr):
            raise UsageError("asymptotic star product needs closed-form symbols")
        lo, hi = _window(args.krange)
        direction = _ints(args.dir) if args.dir else (1,) + (0,) * (left.dim - 1)
        appr = star_asympt(left, right, args.asympt)
        rows = []
        for t in range(lo, hi + 1):
            k = tuple(t * d for d in direction)
            defect = (star_exact(left, right, k) - appr.eval_lattice(k)).norm()
            rows.append([t, float(sum(x * x for x in k)) ** 0.5, defect])
        payload = {"kind": "star-defect-table", "order": args.asympt,
                   "direction": list(direction),
                   "columns": ["t", "norm_k", "defect"], "table": rows}
        emit(payload, args.format, args.out,
             lambda p: "\n".join(f"t={r[0]:4d}  |k|={r[1]:8.3f}  defect={r[2]:.6e}" for r in rows))
        return EXIT_OK
    if args.at is None:
        raise UsageError("star needs --at K or --krange A:B")
    k = _ints(args.at)
    value = star_exact(left, right, k)
    payload = {"kind": "star", "point": list(k), "value": _weyl_payload(value)}
    text = str(value)
    if args.asympt is not None:
        if not isinstance(left, SymbolExpr) or not isinstance(right, SymbolExpr):
            raise UsageError("asymptotic star product needs closed-form symbols")
        appr = star_asympt(left, right, args.asympt).eval_lattice(k)
        payload["asympt"] = _weyl_payload(appr)
        payload["defect"] = (value - appr).norm()
        text += f"\nasympt J={args.asympt}: {appr}\ndefect: {payload['defect']:.6e}"
    emit(payload, args.format, args.out, lambda p: text)
    return EXIT_OK


def cmd_res(args, cfg: verify.RunConfig) -> int:
    sigma = _load_symbol(args.symbol)
    value = res_theta(sigma)
    payload = {"kind": "residue", "value": {"re": value.real, "im": value.imag}}
    emit(payload, args.format, args.out, lambda p: f"res = {value}")
    return EXIT_OK


def _fit_config(args, cfg: verify.RunConfig) -> FitConfig:
    lo, hi = cfg.fit_window
    if getattr(args, "fit_window", None):
        lo, hi = _window(args.fit_window)
    kwargs = {"n_min": lo, "n_max": hi}
    if getattr(args, "include_log", False):
        kwargs["include_log"] = True
    if args.tol is not None:
        kwargs["value_tol"] = args.tol
        kwargs["direct_tol"] = args.tol
    if getattr(args, "direct_cap", None):
        kwargs["direct_cap"] = args.direct_cap
    return FitConfig(**kwargs)


def cmd_csum(args, cfg: verify.RunConfig) -> int:
    sigma = _load_symbol(args.symbol)
    order = _complex(args.order) if args.order else None
    fit_cfg = _fit_config(args, cfg)
    if args.polytope is not None:
        rep = cutoff_sum(sigma, order, Polytope(args.polytope), fit_cfg)
        payload = {"kind": "cutoff-sum", "polytope": args.polytope,
                   "report": serialize.report_to_dict(rep)}
        value, converged = rep.value, rep.converged
    else:
        rep = canonical_sum_theta(sigma, order, fit_cfg)
        payload = {"kind": "canonical-sum", "report": serialize.report_to_dict(rep)}
        value, converged = rep.value, rep.converged
    if args.table:
        poly = Polytope(args.polytope or "cube")
        s = bar_tau(sigma) if isinstance(sigma, SymbolExpr) else sigma
        n = s.theta.n if getattr(s, "theta", None) is not None else s.dim
        S = polytope_partial_sums(_lattice_values_fn(s), poly, n, fit_cfg.n_max)
        payload["columns"] = ["N", "re", "im"]
        payload["table"] = [[N, S[N].real, S[N].imag] for N in range(len(S))]

    def text(p):
        lines = [f"value = {value}", f"converged = {converged}"]
        if args.table:
            lines += [f"N={r[0]:4d}  S(N) = {r[1]:+.12e} {r[2]:+.12e}j" for r in p["table"]]
        return "\n".join(lines)

    emit(payload, args.format, args.out, text)
    return EXIT_OK if converged else EXIT_NONCONVERGENCE


def cmd_trace(args, cfg: verify.RunConfig) -> int:
    sigma = _load_symbol(args.symbol)
    rtol = args.tol if args.tol is not None else 1e-8
    value = op_trace(sigma, rtol=rtol)
    payload = {"kind": "operator-trace", "rtol": rtol,
               "value": {"re": value.real, "im": value.imag}}
    emit(payload, args.format, args.out, lambda p: f"trace = {value}")
    return EXIT_OK


def cmd_verify(args, cfg: verify.RunConfig) -> int:
    report = verify.run_suite(args.suite, cfg=cfg, mutate=args.mutate)

    def text(p):
        lines = []
        for c in p["checks"]:
            lines.append(
                f"{c['status'].upper():7s} {c['id']:42s} defect={c['defect']:.3e} tol={c['tol']:g}"
                + (f"  [{c['detail']}]" if c.get("detail") else "")
            )
        counts = p["counts"]
        lines.append(
            f"suite {p['suite']}: {counts['pass']} passed, "
            f"{counts['fail']} failed, {counts['flagged']} flagged (seed {p['seed']})"
        )
        return "\n".join(lines)

    emit(report, args.format, args.out, text)
    if report["counts"]["fail"] > 0:
        return EXIT_CHECK_FAILURE
    if report["counts"]["flagged"] > 0:
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_zeta(args, cfg: verify.RunConfig) -> int:
    s = _complex(args.s)
    value = zeta_em(s, M=args.terms)
    payload = {"kind": "zeta", "s": {"re": s.real, "im": s.imag},
               "terms": args.terms,
               "value": {"re": value.real, "im": value.imag}}
    emit(payload, args.format, args.out, lambda p: f"zeta({s}) = {value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# wiring


_GLOBAL_FLAGS = (
    (("--config",), {"metavar": "FILE", "help": "JSON run configuration"}),
    (("--seed",), {"type": int, "default": None, "help": "seed for randomized suites"}),
    (("--tol",), {"type": float, "default": None,
                  "help": "numerical tolerance override (csum fit/direct, trace rtol)"}),
    (("--out",), {"metavar": "FILE", "help": "write output here instead of stdout"}),
    (("--format",), {"choices": ("json", "csv", "text"), "default": "text"}),
    (("--profile-quality",), {"choices": ("fast", "accurate"), "default": None,
                              "help": "kernel profile preset for extension-backed evaluation"}),
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nct",
        description="Pseudodifferential symbol calculus on deformed tori: "
                    "evaluate, compose, and trace toroidal symbols.",
    )
    for flags, kwargs in _GLOBAL_FLAGS:
        p.add_argument(*flags, **kwargs)
    actions = p.add_subparsers(dest="cmd", required=True)

    def add_parser(name: str, **kw):
        # global flags are accepted after the subcommand too; SUPPRESS keeps
        # the subparser from clobbering a value given before it
        sp = actions.add_parser(name, **kw)
        for flags, kwargs in _GLOBAL_FLAGS:
            sp.add_argument(*flags, **{**kwargs, "default": argparse.SUPPRESS})
        return sp

    sub = SimpleNamespace(add_parser=add_parser)

    pe = sub.add_parser("eval", help="evaluate a symbol at a lattice or real point")
    pe.add_argument("--symbol", required=True, metavar="FILE")
    g = pe.add_mutually_exclusive_group(required=True)
    g.add_argument("--at", metavar="K", help="lattice point, e.g. 1,-2")
    g.add_argument("--real", metavar="XI", help="real point, e.g. 0.5,1.25")

    ps = sub.add_parser("star", help="star product of two symbols")
    ps.add_argument("--left", required=True, metavar="FILE")
    ps.add_argument("--right", required=True, metavar="FILE")
    ps.add_argument("--at", metavar="K", help="lattice point")
    ps.add_argument("--asympt", type=int, metavar="J",
                    help="also evaluate the order-J asymptotic product")
    ps.add_argument("--krange", metavar="A:B",
                    help="emit the exact-vs-asymptotic defect along t*dir, t in A..B")
    ps.add_argument("--dir", metavar="D", help="direction for --krange, e.g. 1,1")

    pr = sub.add_parser("res", help="noncommutative residue of a classical symbol")
    pr.add_argument("--symbol", required=True, metavar="FILE")

    pc = sub.add_parser("csum", help="regularized lattice sum of a symbol")
    pc.add_argument("--symbol", required=True, metavar="FILE")
    pc.add_argument("--order", metavar="RE[,IM]", help="override the declared order")
    pc.add_argument("--polytope", choices=("cube", "cross"),
                    help="pin one truncation shape; default cross-checks both")
    pc.add_argument("--fit-window", metavar="A:B", help="fit window for the ladder")
    pc.add_argument("--include-log", action="store_true",
                    help="model a log N term (integer orders)")
    pc.add_argument("--direct-cap", type=int, metavar="P",
                    help="point budget for directly convergent orders")
    pc.add_argument("--table", action="store_true",
                    help="emit the partial sums (N, S(N)) for plotting")

    pt = sub.add_parser("trace", help="operator trace of a trace-class symbol")
    pt.add_argument("--symbol", required=True, metavar="FILE")

    pv = sub.add_parser("verify", help="run an invariant suite")
    pv.add_argument("--suite", default="all", choices=verify.suites())
    pv.add_argument("--mutate", choices=("cocycle-sign",),
                    help="harness self-test: inject a defect and expect failures")

    pz = sub.add_parser("zeta", help="zeta function via Euler-Maclaurin")
    pz.add_argument("--s", required=True, metavar="RE[,IM]")
    pz.add_argument("--terms", type=int, default=50, metavar="M")
    return p


_COMMANDS = {
    "eval": cmd_eval,
    "star": cmd_star,
    "res": cmd_res,
    "csum": cmd_csum,
    "trace": cmd_trace,
    "verify": cmd_verify,
    "zeta": cmd_zeta,
}


def _resolve_config(args) -> verify.RunConfig:
    payload = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
        if not isinstance(payload, dict):
            raise verify.ConfigError("config file must hold a JSON object")
    if args.seed is not None:
        payload["seed"] = args.seed
    if args.profile_quality is not None:
        payload["profile_quality"] = args.profile_quality
    return verify.RunConfig.from_dict(payload)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.cmd](args, cfg)
    except (UsageError, verify.ConfigError) as exc:
        _diag(str(exc), "usage")
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        _diag(f"{exc.msg} at line {exc.lineno}, column {exc.colno}", "parse")
        return EXIT_USAGE
    except FileNotFoundError as exc:
        _diag(f"no such file: {exc.filename}", "usage")
        return EXIT_USAGE
    except TraceNonConvergence as exc:
        _diag(str(exc), "non-convergence")
        return EXIT_NONCONVERGENCE
    except (KeyError, TypeError, ValueError, OSError) as exc:
        _diag(str(exc), "usage")
        return EXIT_USAGE
    except RuntimeError as exc:
        _diag(str(exc), "non-convergence")
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    raise SystemExit(main())
