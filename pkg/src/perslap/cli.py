"""Command line front end: ``perslap {spectra,betti,audit,search}``.

CSV goes to stdout, everything meant for people goes to stderr.  Exit
codes: 0 ok, 2 bad input, 3 numerical failure, 4 a guaranteed identity
failed, 5 an informative flag was raised (e.g. full monotonicity fails).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis
from .errors import InputError, InvariantError, NumericalError
from .io import (ReportRow, dump_document, filtration_document, load_document,
                 render_report)
from .laplacians import (hodge_check, hodge_decomposition_check, persistent_betti,
                         persistent_laplacians, spectrum, splitting_check)
from .linalg import Tolerance

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_INVARIANT, EXIT_FLAG = 0, 2, 3, 4, 5


def _tol(args) -> Tolerance:
    return Tolerance(args.tol_rank, args.tol_eig)


def _say(msg: str):
    print(msg, file=sys.stderr)


def cmd_spectra(args) -> tuple[list[ReportRow], int]:
    doc = load_document(args.input)
    tol = _tol(args)
    pair = doc.persistent_pair(args.s, args.t)
    s, t = _thresholds(doc, args)
    laps = persistent_laplacians(pair, args.degree, tol)
    rows = []
    for kind in analysis.KINDS:
        spec = spectrum(getattr(laps, kind), tol)
        for q, lam in enumerate(spec.eigenvalues, start=1):
            rows.append(ReportRow("spectrum", args.degree, kind, q, s, t, float(lam)))
        _say(f"{kind:>4}: {len(spec)} eigenvalues, kernel {spec.kernel_dim}")
    return rows, EXIT_OK


def _thresholds(doc, args):
    if doc.complex is None or (doc.pair is not None and "subcomplexes" in doc.pair):
        return None, None
    if doc.pair is not None and args.s is None and args.t is None:
        return doc.pair["s"], doc.pair["t"]
    top = float(doc.filtration().critical_values()[-1])
    t = top if args.t is None else args.t
    return (t if args.s is None else args.s), t


def cmd_betti(args) -> tuple[list[ReportRow], int]:
    doc = load_document(args.input)
    tol = _tol(args)
    pair = doc.persistent_pair(args.s, args.t)
    s, t = _thresholds(doc, args)
    rep = hodge_check(pair, args.degree, tol)
    beta = persistent_betti(pair, args.degree, tol)
    agree = rep.details["kernel_dim"] == beta
    rows = [ReportRow("betti", args.degree, "kernel_dim", None, s, t, rep.details["kernel_dim"]),
            ReportRow("betti", args.degree, "betti", None, s, t, beta,
                      "pass" if agree else "fail", "agree" if agree else "kernel_betti_mismatch")]
    _say(f"beta = {beta}, dim ker = {rep.details['kernel_dim']}")
    return rows, EXIT_OK if agree else EXIT_INVARIANT


def _audit_monotonicity(doc, args, tol):
    triple = doc.filtration_triple(args.thresholds)
    rep = analysis.monotonicity_audit(triple, args.degree, args.qmax, tol)
    rows = []
    for r in rep.rows:
        if r.holds:
            status, reason = "pass", "ok"
        elif r.guaranteed:
            status, reason = "fail", "theorem_violation"
        else:
            status, reason = "flag", "full_monotonicity_fails"
        rows.append(ReportRow("audit", args.degree, r.relation, r.q, None, None, r.lhs, status, reason))
    if rep.violations:
        _say(f"guaranteed relations failed: {len(rep.violations)}")
        return rows, EXIT_INVARIANT
    if rep.full_flags:
        _say(f"full monotonicity fails at q = {rep.full_flags}")
        return rows, EXIT_FLAG
    return rows, EXIT_OK


def _audit_stability(doc, args, tol):
    if args.other is None:
        raise InputError("stability mode needs --other FILE")
    other = load_document(args.other)
    rep = analysis.stability_audit(doc.filtration(), other.filtration(), args.degree, args.qmax, tol)
    rows = [ReportRow("audit", args.degree, "filtration_distance", None, None, None, rep.filtration_distance)]
    for r in rep.rows:
        if r.holds:
            status, reason = "pass", "ok"
        elif r.kind == "full":
            status, reason = "flag", "full_not_stable"
        else:
            status, reason = "fail", "theorem_violation"
        rows.append(ReportRow("audit", args.degree, r.kind, r.q, None, None, r.spectral_distance, status, reason))
    if rep.violations:
        return rows, EXIT_INVARIANT
    if rep.full_exceedances:
        _say(f"full counting functions exceed the filtration distance {rep.filtration_distance}")
        return rows, EXIT_FLAG
    return rows, EXIT_OK


def _audit_pair_check(doc, args, tol):
    pair = doc.persistent_pair(args.s, args.t)
    if args.mode == "splitting":
        checks = {"splitting": splitting_check(pair, args.degree, tol)}
    else:
        checks = {"persistent_hodge": hodge_check(pair, args.degree, tol),
                  "decomposition": hodge_decomposition_check(pair.L, args.degree, tol)}
    rows = []
    for name, c in checks.items():
        rows.append(ReportRow("audit", args.degree, name, None, None, None, None,
                              "pass" if c.ok else "fail", "ok" if c.ok else "theorem_violation"))
        _say(f"{name}: {c.details}")
    return rows, EXIT_OK if all(c.ok for c in checks.values()) else EXIT_INVARIANT


def _audit_condition(doc, args, tol):
    triple = doc.filtration_triple(args.thresholds)
    cond = analysis.full_monotonicity_condition(triple, args.degree, tol)
    flags = analysis.monotonicity_audit(triple, args.degree, args.qmax, tol).full_flags
    rows = [ReportRow("audit", args.degree, "condition", None, None, None, int(cond),
                      "pass" if cond else "flag", "holds" if cond else "condition_fails")]
    if cond and flags:
        rows.append(ReportRow("audit", args.degree, "implied_monotonicity", None, None, None, None,
                              "fail", "theorem_violation"))
        return rows, EXIT_INVARIANT
    return rows, EXIT_OK if cond else EXIT_FLAG


def cmd_audit(args) -> tuple[list[ReportRow], int]:
    doc = load_document(args.input)
    tol = _tol(args)
    handler = {"monotonicity": _audit_monotonicity, "stability": _audit_stability,
               "splitting": _audit_pair_check, "hodge": _audit_pair_check,
               "condition": _audit_condition}[args.mode]
    return handler(doc, args, tol)


def cmd_search(args) -> tuple[list[ReportRow], int]:
    from .catalog import glued_triangles_filtration

    planted = [glued_triangles_filtration()] if args.planted else None
    res = analysis.counterexample_search(args.seed, args.budget, k=args.degree, planted=planted,
                                         tol=_tol(args), n_vertices=args.vertices)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, hit in enumerate(res.flagged):
        if out_dir is not None:
            path = out_dir / f"flagged_{i:04d}.json"
            path.write_text(dump_document(filtration_document(hit.filtration, hit.thresholds)), encoding="utf-8")
        for q in hit.report.full_flags:
            rows.append(ReportRow("search", hit.k, "full", q, None, None, i, "flag",
                                  "planted" if hit.planted else "random"))
    for hit in res.fatal:
        rows.append(ReportRow("search", hit.k, "fatal", None, None, None, None, "fail", "theorem_violation"))
    _say(f"{res.trials} triples audited, {len(res.flagged)} flagged, {len(res.fatal)} fatal")
    return rows, EXIT_INVARIANT if res.fatal else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="perslap", description="Persistent Laplacian spectra and audits.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", "-k", type=int, default=1)
    common.add_argument("--tol-rank", type=float, default=1e-10)
    common.add_argument("--tol-eig", type=float, default=1e-9)
    common.add_argument("--qmax", type=int, default=None)
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, help_ in (("spectra", cmd_spectra, "eigenvalues of the persistent Laplacians"),
                            ("betti", cmd_betti, "persistent Betti number against dim ker")):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("input")
        sp.add_argument("--s", type=float, default=None)
        sp.add_argument("--t", type=float, default=None)
        sp.set_defaults(func=fn)

    sp = sub.add_parser("audit", parents=[common], help="run a theorem check")
    sp.add_argument("input")
    sp.add_argument("--mode", required=True,
                    choices=["monotonicity", "stability", "splitting", "hodge", "condition"])
    sp.add_argument("--other", default=None, help="second filtration for stability")
    sp.add_argument("--thresholds", type=float, nargs=3, default=None)
    sp.add_argument("--s", type=float, default=None)
    sp.add_argument("--t", type=float, default=None)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("search", parents=[common], help="random search for full-monotonicity failures")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=100)
    sp.add_argument("--out-dir", default=None)
    sp.add_argument("--vertices", type=int, default=None)
    sp.add_argument("--planted", action="store_true", help="also audit the glued-triangles triple")
    sp.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows, code = args.func(args)
    except InputError as exc:
        _say(f"error: {exc}")
        return EXIT_INPUT
    except NumericalError as exc:
        _say(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except InvariantError as exc:
        _say(f"invariant violated: {exc}")
        return EXIT_INVARIANT
    sys.stdout.write(render_report(rows))
    return code


if __name__ == "__main__":
    sys.exit(main())
