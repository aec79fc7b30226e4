"""Command-line interface: ``maxcurves <command> [flags]``.

Exit status: 0 success, 1 usage error, 2 a verification failed,
3 internal inconsistency between two computations that must agree.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import multiprocessing
import os
import sys
from importlib import resources

from . import forms, groups, maximal, quotient, sziklai
from .forms import FormSyntaxError, TernaryForm
from .gf import FieldCtx, FieldError, field_of_order

EXIT_OK, EXIT_USAGE, EXIT_FAILED, EXIT_INCONSISTENT = 0, 1, 2, 3

NU_COLUMNS = ["q", "case", "nu_formula", "nu_direct"] + [f"fix{g}" for g in sziklai.S3]

log = logging.getLogger("maxcurves")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def report_schema() -> dict:
    text = resources.files("maxcurves").joinpath("schemas/reports.schema.json").read_text()
    return json.loads(text)


def parse_curve(text: str, ctx: FieldCtx | None, d: int | None = None) -> TernaryForm:
    """Curve from expression text (needs ``ctx``) or ``q=.. d=.. coeffs=[..]``."""
    return forms.parse_form(text, ctx, d)


def _ctx(q: int | None) -> FieldCtx | None:
    if q is None:
        return None
    try:
        return field_of_order(q)
    except FieldError as exc:
        raise UsageError(str(exc)) from None


def _curve(args, text: str) -> TernaryForm:
    try:
        return parse_curve(text, _ctx(args.q), args.degree)
    except FormSyntaxError as exc:
        raise UsageError(f"bad curve {text!r}: {exc}") from None


def _q_list(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --q-list {text!r}") from None


# -- subcommands -------------------------------------------------------------
# each returns (exit status, report); reports are dicts (JSON) or str (CSV)

def cmd_count_points(args):
    f = _curve(args, args.curve)
    n = forms.count_points(f)
    try:
        ap, sz = forms.bounds(f.d, f.ctx.q)
        b = {"aubry_perret": ap, "sziklai": sz}
    except ValueError:
        b = None
    return EXIT_OK, {"command": "count-points", "q": f.ctx.q, "curve": str(f), "degree": f.d,
                     "points": n, "bounds": b}


def cmd_spectrum(args):
    f = _curve(args, args.curve)
    spec = forms.line_spectrum(f)
    rep = {"command": "spectrum", "q": f.ctx.q, "curve": str(f), "points": forms.count_points(f),
           "spectrum": {str(k): v for k, v in sorted(spec.items())}}
    if f.d == 3:
        rep["mu"] = [spec.get(k, 0) for k in range(4)]
    return EXIT_OK, rep


def _nu_row(q):
    return sziklai.nu_table_rows([q])[0]


def cmd_nu_table(args):
    qs = _q_list(args.q_list)
    for q in qs:
        try:
            sziklai.case_label(q)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if args.jobs > 1 and len(qs) > 1:
        with multiprocessing.get_context("fork").Pool(min(args.jobs, len(qs))) as pool:
            rows = pool.map(_nu_row, qs)
    else:
        rows = [_nu_row(q) for q in qs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(NU_COLUMNS)
    ok = True
    for r in rows:
        w.writerow([r["q"], r["case"], r["nu_formula"], r["nu_direct"], *r["fix"]])
        ok &= r["nu_formula"] == r["nu_direct"] and r["fix"] == sziklai.expected_fixed_row(r["q"])
    return (EXIT_OK if ok else EXIT_FAILED), buf.getvalue()


def cmd_sziklai_classify(args):
    ctx = _ctx(args.q)
    check = args.check_pgl
    if check and ctx.q > 5:
        raise UsageError("--check-pgl supports q <= 5")
    reps = sziklai.classify(ctx, check_pgl=check)
    orbs = sziklai.orbits(ctx)
    classes = [{"representative": str(r), "size": len(o), "members": [str(t) for t in o]}
               for r, o in zip(reps, orbs)]
    return EXIT_OK, {"command": "sziklai-classify", "q": ctx.q,
                     "members": len(sziklai.family_members(ctx)), "classes": classes, "pgl_checked": check}


def cmd_search_maximal(args):
    if args.q != 4:
        raise UsageError("search-maximal is exhaustive only for q = 4")
    rep = maximal.classify_maximal(jobs=args.jobs).to_json()
    return EXIT_OK, {"command": "search-maximal", **rep}


def cmd_equiv(args):
    if args.q is None:
        raise UsageError("equiv needs --q")
    if args.q > groups.MAX_PGL_Q:
        raise UsageError(f"PGL(3, q) enumeration supports q <= {groups.MAX_PGL_Q}")
    f, g = _curve(args, args.curve_a), _curve(args, args.curve_b)
    ok, M = groups.are_equivalent(f, g)
    if ok and groups.act_on_form(M, f) != g:
        raise groups.BurnsideMismatch("witness does not map the first curve to the second")
    witness = None if M is None else [list(r) for r in (M.format()[0:3], M.format()[3:6], M.format()[6:9])]
    return EXIT_OK, {"command": "equiv", "q": args.q, "curve_a": str(f), "curve_b": str(g),
                     "equivalent": ok, "witness": witness}


def cmd_verify_identity(args):
    checks = quotient.identity_checks() + quotient.corollary_checks()
    items = [{"name": c.name, "ok": c.ok, **({} if c.ok else {"residue": str(c.residue)})} for c in checks]
    control = quotient.negative_control()
    items.append({"name": "negative control (v coefficient ω^2 -> ω) breaks the identity", "ok": control})
    ok = all(i["ok"] for i in items)
    return (EXIT_OK if ok else EXIT_FAILED), {"command": "verify-identity", "checks": items, "ok": ok}


def cmd_kernel_check(args):
    ctx = _ctx(args.q)
    if ctx is None:
        raise UsageError("kernel-check needs --q")
    basis, expected = forms.torus_kernel(ctx)
    ok = basis == expected
    return (EXIT_OK if ok else EXIT_FAILED), {
        "command": "kernel-check", "q": ctx.q, "dimension": len(basis),
        "basis": [forms.format_bivariate(ctx, b) for b in basis], "ok": ok}


# -- text rendering ----------------------------------------------------------

def render_text(rep: dict) -> str:
    cmd = rep["command"]
    lines = []
    if cmd == "count-points":
        lines.append(f"curve  {rep['curve']}  over F_{rep['q']}")
        lines.append(f"N      {rep['points']}")
        b = rep["bounds"]
        lines.append("bounds n/a (degree 1)" if b is None
                     else f"bounds aubry-perret {b['aubry_perret']}  sziklai {b['sziklai']}")
    elif cmd == "spectrum":
        lines.append(f"curve  {rep['curve']}  over F_{rep['q']}  N={rep['points']}")
        for k, v in rep["spectrum"].items():
            lines.append(f"  {k}-lines: {v}")
        if "mu" in rep:
            lines.append(f"mu     {tuple(rep['mu'])}")
    elif cmd == "sziklai-classify":
        lines.append(f"q={rep['q']}: {rep['members']} members, {len(rep['classes'])} classes")
        for c in rep["classes"]:
            lines.append(f"  {c['representative']}  size {c['size']}: {' '.join(c['members'])}")
    elif cmd == "search-maximal":
        lines.append(f"scanned {rep['total_forms']} cubics over F_4")
        lines.append("N histogram: " + " ".join(f"{k}:{v}" for k, v in rep["n_histogram"].items()))
        lines.append(f"N=9 without linear components: {rep['maximal_count']}")
        for c in rep["classes"]:
            tag = "hermitian" if c["hermitian"] else "sziklai" if c["sziklai"] else "other"
            lines.append(f"  [{tag}] {c['canonical_form']}  orbit {c['orbit_size']}  "
                         f"stabilizer {c['stabilizer_order']}  mu {tuple(c['mu'])}")
    elif cmd == "equiv":
        lines.append("equivalent" if rep["equivalent"] else "not equivalent")
        if rep["witness"]:
            for row in rep["witness"]:
                lines.append("  [" + " ".join(f"{x:>3}" for x in row) + " ]")
    elif cmd == "verify-identity":
        for c in rep["checks"]:
            lines.append(f"{'PASS' if c['ok'] else 'FAIL'}  {c['name']}")
            if not c["ok"] and "residue" in c:
                lines.append(f"      residue: {c['residue']}")
    elif cmd == "kernel-check":
        lines.append(f"q={rep['q']}: dimension {rep['dimension']}")
        for b in rep["basis"]:
            lines.append(f"  {b}")
        lines.append("PASS" if rep["ok"] else "FAIL")
    return "\n".join(lines) + "\n"


COMMANDS = {
    "count-points": cmd_count_points,
    "spectrum": cmd_spectrum,
    "nu-table": cmd_nu_table,
    "sziklai-classify": cmd_sziklai_classify,
    "search-maximal": cmd_search_maximal,
    "equiv": cmd_equiv,
    "verify-identity": cmd_verify_identity,
    "kernel-check": cmd_kernel_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="maxcurves", description="Maximal plane curves over small finite fields.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, q_required=False):
        sp.add_argument("--q", type=int, required=q_required, help="field order")
        sp.add_argument("--json", action="store_true", help="print the JSON report")
        sp.add_argument("--out", help="also write the report to this path")

    curve_help = 'e.g. "x0^3 + w*x1^3 + w2*x2^3" or "q=4 d=3 coeffs=[...]"'
    for name in ("count-points", "spectrum"):
        sp = sub.add_parser(name)
        common(sp)
        sp.add_argument("--curve", required=True, help=curve_help)
        sp.add_argument("--degree", type=int)
    sp = sub.add_parser(
        "nu-table",
        help="class counts of the Sziklai family (CSV)",
        description="CSV columns: " + ", ".join(NU_COLUMNS)
        + ". fix columns count fixed points of each permutation on the family.",
    )
    sp.add_argument("--q-list", required=True, help="comma-separated prime powers")
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp.add_argument("--out")
    sp = sub.add_parser("sziklai-classify")
    common(sp, q_required=True)
    sp.add_argument("--check-pgl", action="store_true", help="compare with PGL(3,q) equivalence")
    sp = sub.add_parser("search-maximal")
    common(sp)
    sp.set_defaults(q=4)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    sp = sub.add_parser("equiv")
    common(sp)
    sp.add_argument("--curve-a", required=True, help=curve_help)
    sp.add_argument("--curve-b", required=True, help=curve_help)
    sp.add_argument("--degree", type=int)
    sp = sub.add_parser("verify-identity")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--out")
    sp = sub.add_parser("kernel-check")
    common(sp, q_required=True)
    return p


def run(argv: list[str]) -> tuple[int, str]:
    """Run one command; returns (exit status, text written to stdout)."""
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        status, rep = COMMANDS[args.command](args)
    except UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    except (maximal.InconsistencyError, groups.BurnsideMismatch) as exc:
        return EXIT_INCONSISTENT, f"internal inconsistency: {exc}\n"
    if isinstance(rep, str):
        out = rep
    else:
        out = json.dumps(rep, indent=2) + "\n" if args.json else render_text(rep)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rep if isinstance(rep, str) else json.dumps(rep, indent=2) + "\n")
    return status, out


def main(argv: list[str] | None = None) -> int:
    status, out = run(sys.argv[1:] if argv is None else argv)
    (sys.stderr if status == EXIT_USAGE else sys.stdout).write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
