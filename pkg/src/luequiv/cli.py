"""Command-line front end: check, realign, factor, gen.

Exit codes for ``check`` are the machine contract:
0 = EQUIVALENT, 2 = INEQUIVALENT_SPECTRUM, 3 = NOT_FOUND,
4 = DEGENERATE_UNSUPPORTED, 1 = usage/parse/validation error.
``factor`` exits 0 when factored, 2 when the input is not a tensor product.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .decompose import NotDecomposableError, factor_full, is_decomposable
from .equivalence import SearchConfig, Verdict, VerdictStatus, check_equivalence
from .matfile import MatrixFile, MatrixFileError, load_matrix, save_matrix
from .oracle import make_equivalent_pair, make_spectrum_mismatch_pair, paper_example
from .spectral import two_leading_singulars
from .tensor import DimProfile, realign

EXIT_CODES = {
    VerdictStatus.EQUIVALENT: 0,
    VerdictStatus.INEQUIVALENT_SPECTRUM: 2,
    VerdictStatus.NOT_FOUND: 3,
    VerdictStatus.DEGENERATE_UNSUPPORTED: 4,
}


class CliError(Exception):
    """User-facing error: message printed to stderr, exit code 1."""


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    env = os.environ.get("LU_EQUIV_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"LU_EQUIV_SEED={env!r} is not an integer") from None
    return 0


def _config_from(args) -> SearchConfig:
    return SearchConfig(
        seeds=args.seeds,
        sweeps=args.sweeps,
        restarts=args.restarts,
        rank_tol=args.tol_rank,
        spec_tol=args.tol_spec,
        degeneracy_tol=args.tol_degeneracy,
        max_block=args.max_block,
        seed=_resolve_seed(args),
        threads=args.threads,
    )


def _load_operator(path) -> MatrixFile:
    try:
        mf = load_matrix(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except MatrixFileError as exc:
        raise CliError(f"{path}: {exc}") from None
    return mf


def _dims_list(parts: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(p) for p in parts.replace(",", " ").split())
    except ValueError:
        raise CliError(f"cannot parse dims {parts!r}") from None
    if len(dims) < 2:
        raise CliError("need at least two local dimensions")
    return dims


def _verdict_json(verdict: Verdict) -> dict:
    doc = {
        "status": verdict.status.value,
        "phases": None if verdict.phases is None else [float(t) for t in verdict.phases],
        "cuts": None
        if verdict.cut_reports is None
        else [
            {
                "cut": r.cut,
                "sigma1": r.sigma1,
                "sigma2": r.sigma2,
                "ratio": r.ratio,
                "rank_one": r.is_rank_one,
            }
            for r in verdict.cut_reports
        ],
        "witness_residual": verdict.witness_residual,
        "best_objective": verdict.best_objective,
        "degenerate_fallback": verdict.used_degenerate_fallback,
        "seed": verdict.seed,
        "objective_history": [[i, f] for i, f in verdict.objective_history],
    }
    if verdict.witness is not None:
        doc["witness"] = {
            "factors": [
                {"shape": list(f.shape), "data": [[z.real, z.imag] for z in f.reshape(-1)]}
                for f in verdict.witness.factors
            ],
            "factorization_residual": verdict.witness.residual,
        }
    else:
        doc["witness"] = None
    return doc


def _print_matrix(m: np.ndarray, out) -> None:
    for row in m:
        print("  " + "  ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in row), file=out)


def _report_check(verdict: Verdict, out, nsites: int = 2) -> None:
    print(f"verdict: {verdict.status.value}", file=out)
    if verdict.used_degenerate_fallback:
        note = "note: degenerate spectrum; used the block-unitary search"
        if nsites > 2:
            note += " (the multipartite extension of the bipartite criterion is unproven)"
        print(note, file=out)
    if verdict.cut_reports:
        for r in verdict.cut_reports:
            print(
                f"cut {r.cut}: sigma1={r.sigma1:.6e} sigma2={r.sigma2:.6e} "
                f"ratio={r.ratio:.3e} rank_one={r.is_rank_one}",
                file=out,
            )
    if verdict.objective_history:
        best = min(f for _, f in verdict.objective_history)
        print(
            f"objective: best={best:.3e} over {len(verdict.objective_history)} recorded steps",
            file=out,
        )
    if verdict.status is VerdictStatus.EQUIVALENT and verdict.witness is not None:
        print(f"witness residual: {verdict.witness_residual:.3e}", file=out)
        for i, f in enumerate(verdict.witness.factors, start=1):
            print(f"witness factor U{i} ({f.shape[0]}x{f.shape[1]}):", file=out)
            _print_matrix(f, out)


def cmd_check(args) -> int:
    mf_a = _load_operator(args.file_a)
    mf_b = _load_operator(args.file_b)
    try:
        rho = mf_a.density()
        rho_prime = mf_b.density()
    except (MatrixFileError, ValueError) as exc:
        raise CliError(str(exc)) from None
    if rho.profile != rho_prime.profile:
        raise CliError(
            f"dimension profiles differ: {rho.profile.dims} vs {rho_prime.profile.dims}"
        )
    try:
        verdict = check_equivalence(rho, rho_prime, _config_from(args))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.json:
        json.dump(_verdict_json(verdict), sys.stdout)
        print()
    else:
        _report_check(verdict, sys.stdout, nsites=rho.profile.nsites)
    return EXIT_CODES[verdict.status]


def cmd_realign(args) -> int:
    mf = _load_operator(args.file)
    try:
        profile = mf.profile
        cr = realign(mf.matrix, profile, args.cut)
    except (MatrixFileError, ValueError) as exc:
        raise CliError(str(exc)) from None
    s1, s2 = two_leading_singulars(cr.matrix)
    out_path = args.out or f"{args.file}.cut{args.cut}.realigned.json"
    save_matrix(out_path, cr.matrix, dims=None, label=f"realigned cut {args.cut}")
    ratio = s2 / s1 if s1 > 0 else 0.0
    print(f"cut {args.cut}: shape {cr.shape[0]}x{cr.shape[1]} -> {out_path}")
    print(f"sigma1={s1:.12e} sigma2={s2:.12e} ratio={ratio:.3e}")
    return 0


def cmd_factor(args) -> int:
    mf = _load_operator(args.file)
    try:
        profile = mf.profile
    except MatrixFileError as exc:
        raise CliError(str(exc)) from None
    try:
        ok, reports = is_decomposable(mf.matrix, profile, args.tol_rank)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    for r in reports:
        print(
            f"cut {r.cut}: sigma1={r.sigma1:.6e} sigma2={r.sigma2:.6e} "
            f"ratio={r.ratio:.3e} rank_one={r.is_rank_one}"
        )
    if not ok:
        worst = max(reports, key=lambda r: r.ratio)
        print(f"not decomposable: cut {worst.cut} has ratio {worst.ratio:.3e}")
        return 2
    try:
        fs = factor_full(mf.matrix, profile, args.tol_rank)
    except NotDecomposableError as exc:
        print(f"not decomposable: {exc}")
        return 2
    prefix = args.out_prefix or f"{args.file}.factor"
    for i, (f, d) in enumerate(zip(fs.factors, profile.dims), start=1):
        path = f"{prefix}{i}.json"
        save_matrix(path, f, dims=(d,), label=f"factor {i}")
        print(f"factor U{i} ({d}x{d}) -> {path}")
    print(f"reconstruction residual: {fs.residual:.3e}")
    return 0


def cmd_gen(args) -> int:
    seed = _resolve_seed(args)
    prefix = args.out_prefix
    if args.kind == "paper-example":
        rho, rho_prime = paper_example(args.a, args.b, args.c)
        dims = rho.profile.dims
        save_matrix(f"{prefix}_a.json", rho.matrix, dims=dims, label="paper-example rho")
        save_matrix(
            f"{prefix}_b.json", rho_prime.matrix, dims=dims, label="paper-example rho_prime"
        )
        print(f"wrote {prefix}_a.json {prefix}_b.json (a={args.a} b={args.b} c={args.c})")
        return 0
    if args.dims is None:
        raise CliError(f"--dims is required for kind {args.kind}")
    profile = DimProfile(_dims_list(args.dims))
    if args.kind == "pair-equivalent":
        sample = make_equivalent_pair(profile, seed)
        save_matrix(
            f"{prefix}_a.json", sample.rho.matrix, dims=profile.dims,
            label="planted rho", seed=seed,
        )
        save_matrix(
            f"{prefix}_b.json", sample.rho_prime.matrix, dims=profile.dims,
            label="planted rho_prime", seed=seed,
        )
        written = [f"{prefix}_a.json", f"{prefix}_b.json"]
        for i, (u, d) in enumerate(zip(sample.planted, profile.dims), start=1):
            path = f"{prefix}_u{i}.json"
            save_matrix(path, u, dims=(d,), label=f"planted factor {i}", seed=seed)
            written.append(path)
        print("wrote " + " ".join(written))
        return 0
    if args.kind == "pair-spectrum-mismatch":
        sample = make_spectrum_mismatch_pair(profile, seed)
        save_matrix(
            f"{prefix}_a.json", sample.rho.matrix, dims=profile.dims,
            label="mismatch rho", seed=seed,
        )
        save_matrix(
            f"{prefix}_b.json", sample.rho_prime.matrix, dims=profile.dims,
            label="mismatch rho_prime", seed=seed,
        )
        print(f"wrote {prefix}_a.json {prefix}_b.json")
        return 0
    raise CliError(f"unknown kind {args.kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="luequiv",
        description="Local-unitary equivalence of multipartite density matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_search_flags(p):
        p.add_argument("--tol-rank", type=float, default=1e-7,
                       help="rank-one threshold on sigma2/sigma1 (default 1e-7)")
        p.add_argument("--tol-spec", type=float, default=1e-8,
                       help="eigenvalue matching tolerance (default 1e-8)")
        p.add_argument("--tol-degeneracy", type=float, default=1e-8,
                       help="degeneracy grouping tolerance, relative to spectral range")
        p.add_argument("--seeds", type=int, default=64, help="discrete seeds (default 64)")
        p.add_argument("--sweeps", type=int, default=200,
                       help="coordinate-descent sweeps per restart (default 200)")
        p.add_argument("--restarts", type=int, default=20,
                       help="multistart restarts (default 20)")
        p.add_argument("--max-block", type=int, default=2,
                       help="largest degenerate block the fallback searches (default 2)")
        p.add_argument("--threads", type=int, default=1,
                       help="concurrent restarts (default 1, reproducible)")
        p.add_argument("--seed", type=int, default=None,
                       help="search seed (default: $LU_EQUIV_SEED or 0)")

    p_check = sub.add_parser("check", help="decide LU equivalence of two states")
    p_check.add_argument("file_a")
    p_check.add_argument("file_b")
    p_check.add_argument("--json", action="store_true", help="emit the verdict as JSON")
    add_search_flags(p_check)
    p_check.set_defaults(func=cmd_check)

    p_re = sub.add_parser("realign", help="realign an operator across one cut")
    p_re.add_argument("file")
    p_re.add_argument("--cut", type=int, required=True, help="cut index k (1..M-1)")
    p_re.add_argument("-o", "--out", default=None, help="output path for the realigned matrix")
    p_re.set_defaults(func=cmd_realign)

    p_fac = sub.add_parser("factor", help="factor a unitary into local tensor factors")
    p_fac.add_argument("file")
    p_fac.add_argument("--tol-rank", type=float, default=1e-7)
    p_fac.add_argument("-o", "--out-prefix", default=None, help="prefix for factor files")
    p_fac.set_defaults(func=cmd_factor)

    p_gen = sub.add_parser("gen", help="generate fixture states")
    p_gen.add_argument(
        "kind", choices=["pair-equivalent", "pair-spectrum-mismatch", "paper-example"]
    )
    p_gen.add_argument("--dims", default=None, help="local dimensions, e.g. 2,2,2")
    p_gen.add_argument("--a", type=float, default=3.0)
    p_gen.add_argument("--b", type=float, default=5.0)
    p_gen.add_argument("--c", type=float, default=7.0)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("-o", "--out-prefix", default="luequiv_gen")
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
