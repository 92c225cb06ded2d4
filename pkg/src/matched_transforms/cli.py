"""Command-line front end.

Subcommands: kernel (emit a transform matrix), verify (end-to-end pipeline
checks), discover (symmetry search on a covariance file), project,
residual, alpha, match-library, synthesize.

Exit codes: 0 success / verification pass, 1 verification failure or
internal numeric error, 2 usage or input-validation error, 3 I/O failure.
Output is plain text (no ANSI color, so NO_COLOR needs no handling);
`--json` switches report-producing commands to JSON with the same values.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import diagnostics, discovery, groups, matrixio, numkernel, transforms
from .errors import (
    BasisError,
    DimensionError,
    InputError,
    ToolkitError,
    UnsupportedGroupError,
)

_GROUP_SPEC_FORMS = (
    "trivial:M cyclic:M dihedral:M dihedralM:M boolean:n dyadic-wreath:L "
    "wreath:K1c,K2s,... hybrid:W,K product:(spec,spec) perms:<path>"
)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _parse_group(spec: str) -> groups.GroupAction:
    try:
        return groups.parse_group_spec(spec)
    except InputError as exc:
        raise InputError(f"{exc}\nvalid forms: {_GROUP_SPEC_FORMS}") from exc


def _emit(doc: matrixio.ReportDocument, as_json: bool) -> None:
    sys.stdout.write(doc.to_json() if as_json else doc.to_text())


# ---------------------------------------------------------------------------
# kernel

_KERNEL_SIZES = {
    "dft": "points", "dct2": "points", "hartley": "points",
    "wht": "bits", "rm": "bits", "arith": "bits", "haar": "levels",
}


def _build_kernel(name: str, size: int | None, polarity: str | None):
    if name == "fprm":
        if polarity is None:
            raise InputError("fprm requires --polarity (a bit string such as 101)")
        if size is not None:
            raise InputError("fprm takes its size from --polarity")
        bits = [c for c in polarity.strip()]
        if not bits or any(c not in "01" for c in bits):
            raise InputError(f"bad polarity string {polarity!r}")
        return transforms.fp_rm_matrix(tuple(int(c) for c in bits)).matrix
    if polarity is not None:
        raise InputError("--polarity only applies to fprm")
    if size is None:
        raise InputError(f"{name} requires --size ({_KERNEL_SIZES[name]})")
    builders = {
        "dft": transforms.dft_matrix,
        "dct2": transforms.dct2_matrix,
        "hartley": transforms.hartley_matrix,
        "wht": transforms.wht_matrix,
        "haar": transforms.haar_matrix,
        "rm": transforms.rm_matrix,
        "arith": transforms.arithmetic_matrix,
    }
    built = builders[name](size)
    return built.matrix


def cmd_kernel(args) -> int:
    matrix = _build_kernel(args.name, args.size, args.polarity)
    text = matrixio.render_matrix(np.asarray(matrix, dtype=np.complex128))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# verify

_VERIFY_CASES = ("dft", "wht", "dct", "haar", "circle64")


def _run_verify_case(case: str, seed: int):
    """Returns (group label, MatchReport)."""
    if case == "dft":
        r = diagnostics.sample_invariant_cov(groups.make_cyclic(16), seed)
        return "cyclic:16", diagnostics.subspace_match(r, transforms.dft_matrix(16))
    if case == "wht":
        r = diagnostics.sample_invariant_cov(groups.make_boolean(4), seed)
        return "boolean:4", diagnostics.subspace_match(r, transforms.wht_matrix(4))
    if case == "dct":
        r = diagnostics.dct_fold_cov(8, seed)
        return "dihedral:8", diagnostics.subspace_match(r, transforms.dct2_matrix(8))
    if case == "haar":
        r = diagnostics.sample_invariant_cov(groups.make_dyadic_wreath(5), seed)
        return "dyadic-wreath:5", diagnostics.subspace_match(r, transforms.haar_matrix(5))
    if case == "circle64":
        return "dihedral:32", diagnostics.circle_check(64, seed)
    raise InputError(f"unknown verify case {case!r}")


def cmd_verify(args) -> int:
    names = _VERIFY_CASES if args.case == "all" else (args.case,)
    rows = []
    all_pass = True
    for name in names:
        try:
            group, report = _run_verify_case(name, args.seed)
            ok = report.min_match >= 1.0 - 1e-6
            rows.append({
                "case": name,
                "group": group,
                "min_match": matrixio._round6(report.min_match),
                "pattern": [int(v) for v in report.degeneracy_pattern],
                "pass": ok,
            })
        except ToolkitError as exc:
            rows.append({
                "case": name, "group": "-", "min_match": None,
                "pattern": [], "pass": False, "error": str(exc),
            })
            ok = False
        all_pass = all_pass and ok
    if args.json:
        sys.stdout.write(json.dumps({"cases": rows, "pass": all_pass}, indent=2) + "\n")
    else:
        for row in rows:
            status = "pass" if row["pass"] else "FAIL"
            match_txt = "-" if row["min_match"] is None else f"{row['min_match']:.6f}"
            pattern_txt = " ".join(str(v) for v in row["pattern"])
            line = (
                f"case={row['case']} status={status} group={row['group']} "
                f"min_match={match_txt} pattern={pattern_txt}"
            )
            if "error" in row:
                line += f" error={row['error']}"
            print(line)
        if all_pass:
            print("verify: PASS")
        else:
            failing = " ".join(r["case"] for r in rows if not r["pass"])
            print(f"verify: FAIL (failing: {failing})")
    return 0 if all_pass else 1


# ---------------------------------------------------------------------------
# discover

def cmd_discover(args) -> int:
    r = matrixio.read_matrix_file(args.input)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        return _fail(f"discover needs a square matrix, got {r.shape}", 2)
    try:
        r = numkernel._check_hermitian(numkernel.as_cmatrix(r, square=True))
    except ToolkitError as exc:
        return _fail(f"input is not Hermitian within tolerance: {exc}", 2)
    if args.basis == "matrix-units":
        basis = discovery.CandidateBasis.matrix_units(r.shape[0])
    elif args.basis == "cyclic-shifts":
        basis = discovery.CandidateBasis.cyclic_shifts(r.shape[0])
    else:
        return _fail(f"unknown basis {args.basis!r} (matrix-units or cyclic-shifts)", 2)
    result = discovery.discover_sequential(
        r, tau=args.tau, basis=basis, enumeration_cap=args.cap
    )
    clusters = diagnostics.eigen_clusters(numkernel.herm_eig(r).values)
    n_clusters = len(clusters.clusters)

    doc = matrixio.ReportDocument()
    doc.add("input", args.input)
    doc.add("degree", r.shape[0])
    doc.add("spectrum_clusters", n_clusters)
    doc.add("degenerate_spectrum", bool(n_clusters < r.shape[0]))
    if result.generators:
        doc.add("generators", len(result.generators))
        for i, (gen, delta) in enumerate(zip(result.generators, result.residuals)):
            doc.add(f"generator_{i}", gen.cycle_string())
            doc.add(f"delta_{i}", float(delta))
    else:
        doc.add("generators", "none")
    if result.order_exceeded_cap:
        doc.add("order", f">{args.cap}")
    else:
        doc.add("order", int(result.group_order))
    doc.add("alpha", float(result.alpha))
    doc.add("iterations", result.iterations)
    doc.add("rejected", result.rejected_count)
    doc.add("stop", result.stop_reason)

    discovered = groups.from_generators(
        list(result.generators) or [groups.Permutation.identity(r.shape[0])],
        "discovered",
    )
    out_path = f"{args.input}.matched.mtx"
    probe_pair = (
        transforms._derived_seed(args.seed, 100),
        transforms._derived_seed(args.seed, 101),
    )
    if diagnostics.multiplicity_free_probe(discovered, probe_pair):
        basis = transforms.synthesize_matched(discovered, args.seed)
        matrixio.write_matrix_file(out_path, basis.transform.matrix)
        doc.add("matched_transform", out_path)
    else:
        doc.add("matched_transform", "-")
    _emit(doc, args.json)
    return 0


# ---------------------------------------------------------------------------
# misc wrappers

def cmd_project(args) -> int:
    action = _parse_group(args.group)
    r = matrixio.read_matrix_file(args.input)
    if r.shape[0] != r.shape[1] or r.shape[0] != action.degree:
        return _fail(
            f"matrix shape {r.shape} does not match group degree {action.degree}", 2
        )
    matrixio.write_matrix_file(args.out, groups.reynolds_project(r, action))
    return 0


def cmd_residual(args) -> int:
    r = matrixio.read_matrix_file(args.input)
    if r.shape[0] != r.shape[1]:
        return _fail(f"residual needs a square matrix, got {r.shape}", 2)
    perm = groups.parse_permutation(args.perm, degree=r.shape[0])
    delta = diagnostics.residual_delta(perm, r)
    _emit(matrixio.ReportDocument().add("delta", delta), args.json)
    return 0


def cmd_alpha(args) -> int:
    action = _parse_group(args.group)
    r = matrixio.read_matrix_file(args.input)
    if r.shape[0] != r.shape[1] or r.shape[0] != action.degree:
        return _fail(
            f"matrix shape {r.shape} does not match group degree {action.degree}", 2
        )
    value = diagnostics.coloring_alpha(action, r)
    _emit(matrixio.ReportDocument().add("alpha", value), args.json)
    return 0


def cmd_match_library(args) -> int:
    r = matrixio.read_matrix_file(args.input)
    if r.shape[0] != r.shape[1]:
        return _fail(f"match-library needs a square matrix, got {r.shape}", 2)
    specs = [s.strip() for s in groups._split_top_level(args.library) if s.strip()]
    if not specs:
        return _fail("empty --library", 2)
    actions = [_parse_group(s) for s in specs]
    report = discovery.match_library(r, actions, enumeration_cap=args.cap)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    entries = report.matches
    if args.json:
        payload = []
        for rank, e in enumerate(entries, start=1):
            payload.append({
                "rank": rank,
                "group": e.name,
                "score": matrixio._round6(e.score),
                "alpha": matrixio._round6(e.alpha),
                "order": f">{args.cap}" if e.order_exceeded_cap else int(e.group_order),
            })
        sys.stdout.write(json.dumps({"entries": payload}, indent=2) + "\n")
    else:
        for rank, e in enumerate(entries, start=1):
            order = f">{args.cap}" if e.order_exceeded_cap else str(int(e.group_order))
            print(
                f"rank={rank} group={e.name} score={matrixio._round6(e.score):.6f} "
                f"alpha={matrixio._round6(e.alpha):.6f} order={order}"
            )
    return 0


def cmd_synthesize(args) -> int:
    action = _parse_group(args.group)
    basis = transforms.synthesize_matched(action, args.seed)
    matrixio.write_matrix_file(args.out, basis.transform.matrix)
    doc = matrixio.ReportDocument()
    doc.add("group", action.name)
    doc.add("degree", action.degree)
    doc.add("pattern", list(basis.degeneracy_pattern))
    doc.add("data_dependent", bool(basis.data_dependent))
    doc.add("out", args.out)
    _emit(doc, args.json)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtf",
        description="Group-matched transform toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", help="emit a transform matrix")
    p.add_argument("name", choices=sorted(set(_KERNEL_SIZES) | {"fprm"}))
    p.add_argument("--size", type=int, default=None,
                   help="points (dft/dct2/hartley), bits (wht/rm/arith), or levels (haar)")
    p.add_argument("--polarity", default=None, help="fprm polarity bit string")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("verify", help="run the end-to-end pipeline checks")
    p.add_argument("--case", choices=_VERIFY_CASES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("discover", help="search for symmetries of a covariance file")
    p.add_argument("input", help="matrix file (Hermitian)")
    p.add_argument("--tau", type=float, default=1e-8)
    p.add_argument("--basis", choices=("matrix-units", "cyclic-shifts"),
                   default="matrix-units")
    p.add_argument("--cap", type=int, default=10**4)
    p.add_argument("--seed", type=int, default=1,
                   help="seed for the matched-transform synthesis")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("project", help="Reynolds-project a matrix onto invariants")
    p.add_argument("--group", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("residual", help="commutation residual of a permutation")
    p.add_argument("--perm", required=True,
                   help="cycle notation '(0 1)' or image list '1 0 2'")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_residual)

    p = sub.add_parser("alpha", help="invariant energy fraction under a group")
    p.add_argument("--group", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("match-library", help="rank candidate groups by residual")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--library", required=True, help="comma-separated group specs")
    p.add_argument("--cap", type=int, default=10**4)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_match_library)

    p = sub.add_parser("synthesize", help="matched basis from seeded invariant samples")
    p.add_argument("--group", required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_synthesize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DimensionError, UnsupportedGroupError, BasisError) as exc:
        return _fail(str(exc), 2)
    except OSError as exc:
        return _fail(f"I/O failure: {exc}", 3)
    except ToolkitError as exc:
        return _fail(str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
