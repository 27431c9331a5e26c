"""Command-line front end: run identity checks, evaluate individual
functions, and manage coefficient caches.

    hyperforge verify --all --bits 128 --format json --output report.json
    hyperforge verify --filter 'PI_*'
    hyperforge eval G 0.05
    hyperforge eval pfq 0.25 --upper 1/2,1/2 --lower 1
    hyperforge cache build --n 1000000

Exit codes: 0 all required checks pass, 1 a check failed (or a cache failed
verification), 2 configuration error.  Conjectural entries and the built-in
negative controls never fail a run through their expected outcomes; a
negative control that unexpectedly PASSes does.
"""

from __future__ import annotations

import argparse
import fnmatch
import json
import os
import sys
import time
from fractions import Fraction as Fr
from pathlib import Path

from . import catalog, lseries, mahler, qseries
from .errors import CacheCorrupt, DomainError, HyperforgeError
from .hypergeom import HypergeometricSpec, pfq
from .precision import AppValue, PrecisionContext
from .result import BRANCH_ERROR, FAIL, PASS, SKIPPED

CACHE_ENV = "HYPERFORGE_CACHE_DIR"

_FORMS = {
    "g12": qseries.G12_CUSP,
    "f8": qseries.F8_CUSP,
    "f15": qseries.F15_CUSP,
}


def _default_cache_dir(args) -> Path:
    if getattr(args, "cache_dir", None):
        return Path(args.cache_dir)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "hyperforge"


def _decimal(ctx, x, extra=3) -> str:
    dps = int(ctx.working_bits * 0.30103) + extra
    return ctx.mp.nstr(x, dps)


def _appvalue_json(ctx, v: AppValue):
    if v is None:
        return None
    out = {"err": _decimal(ctx, v.err, 2), "rigor": v.rigor}
    if v.is_complex:
        out["re"] = _decimal(ctx, ctx.mp.re(v.value))
        out["im"] = _decimal(ctx, ctx.mp.im(v.value))
    else:
        out["value"] = _decimal(ctx, ctx.mp.re(v.value))
    return out


def _result_json(ctx, r):
    return {
        "id": r.id,
        "params": json.loads(json.dumps(r.params, default=str)),
        "lhs": _appvalue_json(ctx, r.lhs),
        "rhs": _appvalue_json(ctx, r.rhs),
        "abs_residual": _decimal(ctx, r.abs_residual, 2) if r.abs_residual is not None else None,
        "rel_residual": _decimal(ctx, r.rel_residual, 2) if r.rel_residual is not None else None,
        "verdict": r.verdict,
        "bits": r.precision_bits,
        "ms": round(r.elapsed_ms, 3),
        "note": r.note,
    }


def _result_text(ctx, r) -> str:
    res = _decimal(ctx, r.rel_residual, 2) if r.rel_residual is not None else "-"
    note = f"  ({r.note})" if r.note else ""
    return f"{r.id:26s} {r.verdict:17s} rel_residual={res}{note}"


def cmd_verify(args) -> int:
    if not args.all and not args.filter:
        print("verify: pass --all or --filter GLOB", file=sys.stderr)
        return 2
    try:
        ctx = PrecisionContext(args.bits)
    except ValueError as exc:
        print(f"verify: {exc}", file=sys.stderr)
        return 2
    pattern = args.filter if args.filter else None

    # thread the L-series overrides through entry params by monkey-free means:
    # run entries one by one so per-entry params can be customized
    entries = [e for e in catalog.list_checks()
               if pattern is None or fnmatch.fnmatchcase(e.id, pattern)]
    if not entries:
        print(f"verify: no checks matched {pattern!r}", file=sys.stderr)
        return 2

    cache_dir = _default_cache_dir(args)
    results = []
    t0 = time.monotonic()
    ids = []
    for e in entries:
        ids.append(e.id)

    def run_one(entry_id):
        entry = catalog.get_check(entry_id)
        needs_l = any("n_coeffs" in p for p in entry.default_params)
        if needs_l:
            pt = dict(entry.default_params[0])
            if args.lseries_n:
                pt["n_coeffs"] = args.lseries_n
            pt["cache_dir"] = str(cache_dir)
            return catalog.run_check(entry_id, params=pt, ctx=ctx)
        return catalog.run_check(entry_id, ctx=ctx)

    if args.threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(run_one, ids))
    else:
        results = [run_one(i) for i in ids]
    results.sort(key=lambda r: r.id)
    elapsed = time.monotonic() - t0

    by_id = {e.id: e for e in entries}
    hard_failures = []
    for r in results:
        entry = by_id[r.id]
        if entry.conjectural:
            continue
        if entry.perturbed_of:
            if r.verdict == PASS:
                hard_failures.append(f"{r.id}: negative control unexpectedly PASSed")
            continue
        if r.verdict == FAIL:
            hard_failures.append(f"{r.id}: FAIL")

    if args.format == "json":
        payload = {
            "bits": ctx.working_bits,
            "count": len(results),
            "elapsed_s": round(elapsed, 3),
            "results": [_result_json(ctx, r) for r in results],
        }
        text = json.dumps(payload, indent=2)
    else:
        lines = [_result_text(ctx, r) for r in results]
        counts = {}
        for r in results:
            counts[r.verdict] = counts.get(r.verdict, 0) + 1
        summary = ", ".join(f"{k}: {v}" for k, v in sorted(counts.items()))
        lines.append(f"-- {len(results)} checks in {elapsed:.1f}s ({summary})")
        text = "\n".join(lines)

    if args.output:
        Path(args.output).write_text(text + "\n")
    else:
        print(text)

    if hard_failures:
        for h in hard_failures:
            print(f"verify: {h}", file=sys.stderr)
        return 1
    return 0


def _parse_rational_list(s: str):
    return [Fr(tok) for tok in s.split(",") if tok]


def _print_appvalue(ctx, v: AppValue):
    if v.is_complex:
        print(f"{_decimal(ctx, ctx.mp.re(v.value))} + {_decimal(ctx, ctx.mp.im(v.value))}j"
              f"  +- {_decimal(ctx, v.err, 2)}  ({v.rigor})")
    else:
        print(f"{_decimal(ctx, ctx.mp.re(v.value))}  +- {_decimal(ctx, v.err, 2)}  ({v.rigor})")


def cmd_eval(args) -> int:
    try:
        ctx = PrecisionContext(args.bits)
    except ValueError as exc:
        print(f"eval: {exc}", file=sys.stderr)
        return 2
    name = args.function
    a = args.args
    try:
        if name == "pfq":
            if not args.upper or args.lower is None:
                print("eval pfq: need --upper and --lower", file=sys.stderr)
                return 2
            if len(a) != 1:
                print("eval pfq: exactly one argument x", file=sys.stderr)
                return 2
            spec = HypergeometricSpec(_parse_rational_list(args.upper),
                                      _parse_rational_list(args.lower),
                                      ctx.mpf(Fr(a[0])))
            _print_appvalue(ctx, pfq(spec, ctx))
        elif name == "G":
            _print_appvalue(ctx, qseries.eisenstein_G(ctx.mpf(Fr(a[0])), ctx))
        elif name == "M":
            _print_appvalue(ctx, qseries.eisenstein_M(ctx.mpf(Fr(a[0])), ctx))
        elif name == "nome":
            _print_appvalue(ctx, qseries.nome(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "s":
            _print_appvalue(ctx, qseries.s_func(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "t":
            _print_appvalue(ctx, qseries.t_func(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "v":
            _print_appvalue(ctx, qseries.v_func(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "f":
            _print_appvalue(ctx, mahler.f_series(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "g":
            _print_appvalue(ctx, mahler.g_series(int(a[0]), ctx.mpf(Fr(a[1])), ctx))
        elif name == "mahler":
            poly = _parse_poly(a[0])
            grid = args.grid or 64
            _print_appvalue(ctx, mahler.mahler_torus_integral(poly, grid, ctx))
        elif name == "domb":
            print(mahler.domb_a(int(a[0])))
        elif name == "bseq":
            print(mahler.seq_b(int(a[0])))
        elif name == "lvalue":
            form = a[0]
            s = int(a[1])
            if form not in _FORMS:
                print(f"eval lvalue: unknown form {form!r} (use g12/f8/f15)",
                      file=sys.stderr)
                return 2
            n = args.lseries_n or 10**6
            cs = lseries.cached_form(form, _FORMS[form], n,
                                     _default_cache_dir(args))
            _print_appvalue(ctx, lseries.lvalue_direct(cs, s, ctx))
        else:
            print(f"eval: unknown function {name!r}", file=sys.stderr)
            return 2
    except (HyperforgeError, ValueError, ZeroDivisionError, IndexError) as exc:
        print(f"eval {name}: {exc}", file=sys.stderr)
        return 2
    return 0


def _parse_poly(text: str) -> mahler.LaurentPolynomial:
    """Parse '2+x', '6+x+1/x+y+1/y+z+1/z', '3*x^-1*y^2 - 4' style input."""
    vars_ = "xyzw"
    text = text.replace(" ", "").replace("-", "+-")
    if text.startswith("+-"):
        text = text[1:]
    terms: dict = {}
    nvars = 1
    for raw in text.split("+"):
        if not raw:
            continue
        neg = raw.startswith("-")
        if neg:
            raw = raw[1:]
        coeff = 1.0
        exps = [0, 0, 0, 0]
        for factor in raw.split("*"):
            if not factor:
                continue
            if factor[0] in vars_:
                v = vars_.index(factor[0])
                nvars = max(nvars, v + 1)
                e = 1
                if len(factor) > 1:
                    if factor[1] != "^":
                        raise ValueError(f"cannot parse factor {factor!r}")
                    e = int(factor[2:])
                exps[v] += e
            elif "/" in factor and factor[0] == "1" and factor[1] == "/":
                # shorthand 1/x, 1/y for inverse variables
                v = vars_.index(factor[2])
                nvars = max(nvars, v + 1)
                exps[v] -= 1
            else:
                coeff *= float(Fr(factor))
        key = tuple(exps[:4])
        terms[key] = terms.get(key, 0) + (-coeff if neg else coeff)
    trimmed = {k[:nvars]: v for k, v in terms.items()}
    return mahler.LaurentPolynomial(nvars, trimmed)


def cmd_cache(args) -> int:
    cache_dir = _default_cache_dir(args)
    n = args.n or catalog.DEFAULT_LSERIES_N
    if args.action == "clear":
        if cache_dir.exists():
            removed = 0
            for f in cache_dir.glob("*.etacoef"):
                f.unlink()
                removed += 1
            print(f"removed {removed} cache file(s) from {cache_dir}")
        return 0
    if args.action == "build":
        cache_dir.mkdir(parents=True, exist_ok=True)
        for name, spec in _FORMS.items():
            path = cache_dir / f"{name}_{n}.etacoef"
            t0 = time.monotonic()
            cs = lseries.eta_coeffs(spec, n)
            lseries.write_cache(path, cs)
            print(f"built {path} ({cs.n_max} coefficients, {time.monotonic()-t0:.1f}s)")
        return 0
    if args.action == "verify":
        rc = 0
        found = 0
        for name, spec in _FORMS.items():
            for path in sorted(cache_dir.glob(f"{name}_*.etacoef")):
                found += 1
                try:
                    cs = lseries.verify_cache(path, spec)
                    print(f"{path}: OK ({cs.n_max} coefficients)")
                except CacheCorrupt as exc:
                    print(f"{path}: CORRUPT ({exc})", file=sys.stderr)
                    rc = 1
        if not found:
            print(f"cache verify: no cache files under {cache_dir}", file=sys.stderr)
            return 2
        return rc
    print(f"cache: unknown action {args.action!r}", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hyperforge",
        description="High-precision verification of a catalog of hypergeometric, "
                    "q-series, Mahler-measure and L-series identities.")
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run identity checks and emit a report")
    pv.add_argument("--all", action="store_true", help="run the whole catalog")
    pv.add_argument("--filter", help="glob over check ids, e.g. 'PI_*'")
    pv.add_argument("--bits", type=int, default=128, help="working precision in bits")
    pv.add_argument("--format", choices=("json", "text"), default="text")
    pv.add_argument("--output", help="write the report here instead of stdout")
    pv.add_argument("--threads", type=int, default=1)
    pv.add_argument("--lseries-n", type=int, dest="lseries_n",
                    help="override the L-series coefficient count")
    pv.add_argument("--cache-dir", dest="cache_dir",
                    help=f"coefficient cache directory (or ${CACHE_ENV})")
    pv.set_defaults(func=cmd_verify)

    pe = sub.add_parser("eval", help="evaluate a single function")
    pe.add_argument("function",
                    choices=("pfq", "G", "M", "nome", "s", "t", "v", "f", "g",
                             "mahler", "domb", "bseq", "lvalue"))
    pe.add_argument("args", nargs="*", help="positional arguments of the function")
    pe.add_argument("--bits", type=int, default=128)
    pe.add_argument("--upper", help="comma-separated rational upper parameters (pfq)")
    pe.add_argument("--lower", help="comma-separated rational lower parameters (pfq)")
    pe.add_argument("--grid", type=int, help="grid per dimension (mahler)")
    pe.add_argument("--lseries-n", type=int, dest="lseries_n",
                    help="coefficient count (lvalue)")
    pe.add_argument("--cache-dir", dest="cache_dir")
    pe.set_defaults(func=cmd_eval)

    pc = sub.add_parser("cache", help="build, verify or clear coefficient caches")
    pc.add_argument("action", choices=("build", "verify", "clear"))
    pc.add_argument("--n", type=int, help="coefficient count (default 10^7)")
    pc.add_argument("--cache-dir", dest="cache_dir")
    pc.set_defaults(func=cmd_cache)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
