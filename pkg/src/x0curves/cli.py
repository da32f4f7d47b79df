"""Command-line front end: construct tower polynomials, run the verification
suite, print expansions and cusp tables, compute genera.

Exit codes: 0 all good, 1 a verification failed, 2 a check was inconclusive
(precision or resource cap), 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import modforms as mf
from . import verify as vf
from .curvepoly import (
    BiPoly,
    ResourceCapError,
    p_poly,
    render_latex,
    render_text,
)
from .qseries import QExp

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


@dataclass
class RunConfig:
    """Parsed invocation: which command, over which levels, with which
    output and resource knobs."""

    command: str
    ns: list[int]
    fmt: str = "text"
    out: str | None = None
    trunc: int | None = None
    margin: int = vf.DEFAULT_MARGIN
    cap: int = 16
    jobs: int = 1
    time_cap: float = vf.DEFAULT_TIME_CAP
    uv: bool = False
    which: str = ""
    terms: int = 10
    genus_args: tuple[str, ...] = ()


def _parse_range(ns: str) -> list[int]:
    if ".." in ns:
        lo, hi = ns.split("..", 1)
        out = list(range(int(lo), int(hi) + 1))
        if not out:
            raise UsageError(f"empty range {ns!r}")
        return out
    return [int(ns)]


def build_parser() -> _Parser:
    p = _Parser(prog="x0curves", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    eq = sub.add_parser("equation", help="emit the level-2^n tower polynomial")
    eq.add_argument("--n", type=int, required=True)
    eq.add_argument("--format", dest="fmt", choices=("text", "json", "latex"),
                    default="text")
    eq.add_argument("--uv", action="store_true",
                    help="latex only: abbreviate with u=(x-2)^8, v=x(x+2)^4(x^2+4)")
    eq.add_argument("--out", default=None)
    eq.add_argument("--cap", type=int, default=16)

    ve = sub.add_parser("verify", help="run the verification suite")
    g = ve.add_mutually_exclusive_group(required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--range", dest="nrange",
                   help="inclusive range lo..hi of level exponents")
    ve.add_argument("--trunc", type=int, default=None,
                    help="override the input window (q exponents); below the "
                         "rigor bound this downgrades pass to inconclusive")
    ve.add_argument("--margin", type=int, default=vf.DEFAULT_MARGIN)
    ve.add_argument("--jobs", type=int, default=1)
    ve.add_argument("--cap", type=int, default=16)
    ve.add_argument("--time-cap", type=float, default=vf.DEFAULT_TIME_CAP)
    ve.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    ve.add_argument("--out", default=None, help="also write the JSON report here")

    se = sub.add_parser("series", help="print a q-expansion")
    se.add_argument("which", choices=("x", "y", "eta", "theta2", "theta3", "theta4"))
    se.add_argument("--n", type=int, default=1,
                    help="level exponent for x/y, scale for eta/theta")
    se.add_argument("--terms", type=int, default=10)

    cu = sub.add_parser("cusps", help="cusp table of Gamma_0(2^n) with generator orders")
    cu.add_argument("--n", type=int, required=True)
    cu.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    cu.add_argument("--out", default=None)

    ge = sub.add_parser("genus", help="genus of X_0(N), or of a Fermat curve")
    ge.add_argument("args", nargs="+", metavar="N | fermat D")
    return p


def _config_from_args(a: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=a.command, ns=[])
    if a.command == "equation":
        cfg.ns = [a.n]
        cfg.fmt, cfg.uv, cfg.out, cfg.cap = a.fmt, a.uv, a.out, a.cap
    elif a.command == "verify":
        cfg.ns = _parse_range(a.nrange) if a.nrange else [a.n]
        cfg.trunc, cfg.margin, cfg.jobs = a.trunc, a.margin, a.jobs
        cfg.cap, cfg.time_cap, cfg.fmt, cfg.out = a.cap, a.time_cap, a.fmt, a.out
    elif a.command == "series":
        cfg.which, cfg.ns, cfg.terms = a.which, [a.n], a.terms
    elif a.command == "cusps":
        cfg.ns, cfg.fmt, cfg.out = [a.n], a.fmt, a.out
    elif a.command == "genus":
        cfg.genus_args = tuple(a.args)
    if any(n > cfg.cap for n in cfg.ns) and cfg.command in ("equation", "verify"):
        raise UsageError(
            f"level exponent beyond the resource cap {cfg.cap}; raise --cap explicitly"
        )
    return cfg


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# -- equation -----------------------------------------------------------------


def cmd_equation(cfg: RunConfig) -> int:
    n = cfg.ns[0]
    if n % 2:
        print(f"warning: n={n} is odd, this is not a defining equation "
              f"(the y generator is not modular on Gamma_0(2^{n}))",
              file=sys.stderr)
    P = p_poly(n, cap=cfg.cap)
    if cfg.fmt == "text":
        _emit(render_text(P), cfg.out)
    elif cfg.fmt == "latex":
        _emit(render_latex(P, uv=cfg.uv), cfg.out)
    else:
        _emit(json.dumps(P.to_json_dict(n=n), sort_keys=True), cfg.out)
    return EXIT_OK


# -- verify ---------------------------------------------------------------------


def _level_reports(args: tuple) -> list[vf.VerificationReport]:
    n, margin, trunc, time_cap, cap = args
    return vf.reports_for_level(n, margin=margin, trunc=trunc,
                                time_cap=time_cap, cap=cap)


def cmd_verify(cfg: RunConfig) -> int:
    reports = vf.global_reports()
    per_level = [(n, cfg.margin, cfg.trunc, cfg.time_cap, cfg.cap)
                 for n in sorted(cfg.ns)]
    if cfg.jobs > 1 and len(per_level) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for chunk in pool.map(_level_reports, per_level):
                reports.extend(chunk)
    else:
        for args in per_level:
            reports.extend(_level_reports(args))

    if cfg.fmt == "text":
        width = max(len(r.claim) for r in reports)
        for r in reports:
            level = f"n={r.n}" if r.n is not None else "-"
            print(f"{r.claim:<{width}}  {level:<5}  {r.outcome:<12}  {r.detail}")
    else:
        print(json.dumps([r.to_json_dict() for r in reports], sort_keys=True))
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            json.dump([r.to_json_dict() for r in reports], fh, sort_keys=True)
            fh.write("\n")

    outcomes = {r.outcome for r in reports}
    if "fail" in outcomes:
        return EXIT_FAIL
    if "inconclusive" in outcomes:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- series ----------------------------------------------------------------------


def _format_exponent(e: Fraction) -> str:
    if e.denominator == 1:
        return f"q^{e.numerator}" if e != 1 else "q"
    return f"q^({e})"


def format_series(f: QExp, max_terms: int) -> str:
    """First ``max_terms`` known nonzero terms, plus the window marker."""
    parts = []
    for e, c in f.nonzero_terms()[:max_terms]:
        if e == 0:
            body = str(c)
        elif c == 1:
            body = _format_exponent(e)
        elif c == -1:
            body = f"-{_format_exponent(e)}"
        else:
            body = f"{c}*{_format_exponent(e)}"
        if not parts:
            parts.append(body)
        else:
            parts.append(f"+ {body}" if not body.startswith("-") else f"- {body[1:]}")
    tail = f"O(q^({Fraction(f.trunc, f.denom)}))"
    parts.append(f"+ {tail}" if parts else tail)
    return " ".join(parts)


def cmd_series(cfg: RunConfig) -> int:
    n = cfg.ns[0]
    terms = cfg.terms
    if cfg.which in ("x", "y"):
        if n < 4:
            raise UsageError("generator series need --n >= 4")
        pole = (1 << (n - 4)) if cfg.which == "x" else (1 << (n - 4)) - 1
        # widen until the requested number of nonzero terms is certified
        width = max(8 * terms, 64)
        builder = mf.x_series if cfg.which == "x" else mf.y_series
        f = builder(n, width - pole)
        while len(f.coeffs) < terms and width < (1 << 24):
            width *= 4
            f = builder(n, width - pole)
        print(format_series(f, terms))
    elif cfg.which == "eta":
        f = mf.eta_series(n, n * (1 + 24 * max(4 * terms, 16)))
        while len(f.coeffs) < terms:
            f = mf.eta_series(n, 4 * f.trunc)
        print(format_series(f, terms))
    else:
        which = int(cfg.which[-1])
        f = mf.theta_series(which, n, n * 8 * max(2 * terms * terms, 16))
        while len(f.coeffs) < terms:
            f = mf.theta_series(which, n, 4 * f.trunc)
        print(format_series(f, terms))
    return EXIT_OK


# -- cusps ----------------------------------------------------------------------


def cmd_cusps(cfg: RunConfig) -> int:
    n = cfg.ns[0]
    if n < 4:
        raise UsageError("generator orders need --n >= 4")
    xq = mf.EtaQuotient.x_generator(n)
    yq = mf.EtaQuotient.y_generator(n)
    rows = []
    for c in mf.cusps_of(n):
        label = "infinity" if c.k == n else f"{c.a}/2^{c.k}"
        rows.append({
            "a": c.a, "k": c.k, "width": c.width, "cusp": label,
            "orders": {
                "x": str(mf.order_at_cusp(xq, c)),
                "y": str(mf.order_at_cusp(yq, c)),
            },
        })
    if cfg.fmt == "json":
        _emit(json.dumps(rows, sort_keys=True), cfg.out)
    else:
        lines = [f"{'cusp':<10} {'width':>6} {'ord x':>8} {'ord y':>8}"]
        for r in rows:
            lines.append(f"{r['cusp']:<10} {r['width']:>6} "
                         f"{r['orders']['x']:>8} {r['orders']['y']:>8}")
        _emit("\n".join(lines), cfg.out)
    return EXIT_OK


# -- genus ----------------------------------------------------------------------


def cmd_genus(cfg: RunConfig) -> int:
    args = cfg.genus_args
    if args[0] == "fermat":
        if len(args) != 2:
            raise UsageError("usage: genus fermat D")
        print(mf.genus_fermat(int(args[1])))
    else:
        if len(args) != 1:
            raise UsageError("usage: genus N | genus fermat D")
        print(mf.genus_X0(int(args[0])))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        cfg = _config_from_args(parser.parse_args(argv))
        handler = {
            "equation": cmd_equation,
            "verify": cmd_verify,
            "series": cmd_series,
            "cusps": cmd_cusps,
            "genus": cmd_genus,
        }[cfg.command]
        return handler(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ResourceCapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
