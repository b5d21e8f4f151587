"""Command-line interface.

Subcommands: moments, matrix, generators, verify, hilbert, singular, defect,
eddeg, iddeg, sample, estimate.  Every randomized run takes a seed (default 0)
that is echoed in the output; with --no-timestamp the JSON output is
byte-reproducible for a fixed (argv, seed).

Exit codes: 0 success / verified, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .estimate import default_cache_dir, gmm_weight_matrix, mom_mixture, mom_single
from .homotopy import TrackerOptions
from .counting import ed_degree, monodromy_count
from .moments import Dist, cumulants, moments
from .poly import UsageError
from .sampling import MixtureModel, sample, sample_moments
from .varieties import (
    STRATA,
    Family,
    build_matrix,
    degree_formula,
    expected_singular,
    generators,
    groebner_degree_check,
    hilbert_closed_form,
    secant_jacobian_rank,
    singular_probe,
    verify_kernel,
    verify_vanishing,
)

_MOMENT_KINDS = {"ig", "gamma", "gaussian", "exp", "chi2"}


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default text)")
    parser.add_argument("--out", help="write output to a file instead of stdout")
    parser.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp for byte-stable output")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for path tracking")
    parser.add_argument("--cache-dir", default=None,
                        help="start-set cache directory (default MVT_CACHE_DIR or ~/.cache/mvt)")
    parser.add_argument("--tol-corrector", type=float, default=None,
                        help="corrector tolerance override (default 1e-10)")
    parser.add_argument("--tol-dedup", type=float, default=None,
                        help="solution dedup tolerance override (default 1e-8)")


def _tracker_options(args) -> TrackerOptions:
    kwargs = {}
    if args.tol_corrector is not None:
        kwargs["tol_corrector"] = args.tol_corrector
    if args.tol_dedup is not None:
        kwargs["tol_dedup"] = args.tol_dedup
    return TrackerOptions(**kwargs)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mvt",
        description="Moment-variety toolkit: exact determinantal checks, "
                    "homotopy solution counts, and mixture estimation.",
    )
    top.add_argument("--version", action="version", version=f"mvt {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", help="symbolic moment sequence of a distribution")
    p.add_argument("--family", required=True, choices=sorted(_MOMENT_KINDS))
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("matrix", help="the family's determinantal matrix")
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family])
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("generators", help="ideal generators (maximal minors)")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("verify", help="kernel and vanishing identities")
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("hilbert", help="degree and Hilbert series, with the "
                                       "independent monomial-ideal cross-check")
    p.add_argument("--family", required=True,
                   choices=["ig", "gamma", "cum-ig", "cum-gamma"])
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("singular", help="exact Jacobian-rank probes of the singular strata")
    p.add_argument("--family", required=True, choices=["ig", "gamma"])
    p.add_argument("--d", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("defect", help="secant nondefectiveness sweep by exact rank")
    p.add_argument("--family", required=True, choices=["ig", "gamma", "gaussian"])
    p.add_argument("--dmax", type=int, default=20)
    p.add_argument("--kmax", type=int, default=6)
    _add_common(p)

    p = sub.add_parser("eddeg", help="Euclidean distance degree of the d=3 hypersurface")
    p.add_argument("--family", required=True, choices=["ig", "gamma", "gaussian"])
    _add_common(p)

    p = sub.add_parser("iddeg", help="identifiability degree of k-mixtures by monodromy")
    p.add_argument("--family", required=True, choices=["ig", "gamma", "gaussian"])
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--stall-loops", type=int, default=10,
                   help="stop after this many loops with no new solutions (default 10)")
    _add_common(p)

    p = sub.add_parser("sample", help="draw from a distribution or mixture")
    p.add_argument("--family", required=True, choices=sorted(_MOMENT_KINDS))
    p.add_argument("--params", required=True,
                   help="component parameters, e.g. '1,5;2,20' (natural parameterization)")
    p.add_argument("--weights", default=None, help="mixture weights, e.g. '0.4,0.6'")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("estimate", help="method-of-moments estimation from data")
    p.add_argument("--family", required=True, choices=["ig", "gamma", "gaussian", "exp", "chi2"])
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--d", type=int, default=None,
                   help="moment order (default 3k-1 for mixtures, 2 for single)")
    p.add_argument("--input", default=None,
                   help="one observation per line; default standard input")
    p.add_argument("--gmm", action="store_true",
                   help="weight the refinement by the inverse sample-moment covariance")
    _add_common(p)

    return top


def _emit(args, payload: dict, text_lines: list) -> None:
    if args.format == "json":
        envelope = {"schema": 1, "command": args.command, "seed": args.seed}
        if not args.no_timestamp:
            envelope["timestamp"] = datetime.now(timezone.utc).isoformat()
        envelope.update(payload)
        out = json.dumps(envelope, sort_keys=True)
    else:
        out = "\n".join(text_lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)


def _cmd_moments(args) -> int:
    seq = moments(Dist(args.family), args.d)
    strs = [e.to_str() for e in seq.entries]
    payload = {"kind": args.family, "d": args.d, "moments": strs}
    lines = [f"m{i} = {s}" for i, s in enumerate(strs)]
    if args.family in ("ig", "gamma"):
        cums = cumulants(Dist(args.family), max(args.d, 1))
        payload["cumulants"] = [e.to_str() for e in cums.entries]
        lines += [f"k{i+1} = {e.to_str()}" for i, e in enumerate(cums.entries)]
    _emit(args, payload, lines)
    return 0


def _cmd_matrix(args) -> int:
    m = build_matrix(Family(args.family), args.d)
    rows = [[m.entry(i, j).to_str() for j in range(m.cols)] for i in range(m.rows)]
    _emit(args, {"family": args.family, "d": args.d, "rows": rows},
          [" | ".join(r) for r in rows])
    return 0


def _cmd_generators(args) -> int:
    gens = generators(Family(args.family), args.d)
    strs = [g.to_str() for g in gens]
    _emit(args, {"family": args.family, "d": args.d, "count": len(strs), "generators": strs}, strs)
    return 0


def _cmd_verify(args) -> int:
    fam = Family(args.family)
    reports = [verify_kernel(fam, args.d), verify_vanishing(fam, args.d)]
    if fam is Family.CHI2:
        reports.append(verify_vanishing(fam, args.d, chi2_naive=True))
    ok = all(r.ok for r in reports)
    _emit(args, {"family": args.family, "d": args.d, "pass": ok,
                 "checks": [r.to_json() for r in reports]},
          [f"{r.check}: {'pass' if r.ok else 'FAIL ' + str(r.detail)}" for r in reports])
    return 0 if ok else 1


def _cmd_hilbert(args) -> int:
    fam = Family(args.family)
    series = hilbert_closed_form(fam, args.d)
    payload = {
        "family": args.family,
        "d": args.d,
        "numerator": list(series.numerator),
        "denom_exp": series.denom_exp,
        "degree": series.degree(),
    }
    lines = [f"series = {series}", f"degree = {series.degree()}"]
    ok = series.degree() == degree_formula(fam, args.d)
    if fam in (Family.IG, Family.GAMMA):
        check = groebner_degree_check(fam, args.d)
        payload["groebner_check"] = check.to_json()
        ok = ok and check.ok
        lines.append(f"initial-ideal series check: {'pass' if check.ok else 'FAIL'}")
    payload["pass"] = ok
    _emit(args, payload, lines)
    return 0 if ok else 1


def _cmd_singular(args) -> int:
    fam = Family(args.family)
    results = []
    ok = True
    for stratum in STRATA:
        rep = singular_probe(fam, args.d, stratum, args.seed)
        want = expected_singular(fam, stratum)
        good = rep.singular == want
        ok = ok and good
        item = rep.to_json()
        item["expected_singular"] = want
        item["pass"] = good
        results.append(item)
    _emit(args, {"family": args.family, "d": args.d, "pass": ok, "strata": results},
          [f"{r['stratum']}: rank {r['rank']} / codim {r['codim']} "
           f"singular={r['singular']} expected={r['expected_singular']} "
           f"{'ok' if r['pass'] else 'MISMATCH'}" for r in results])
    return 0 if ok else 1


def _cmd_defect(args) -> int:
    fam = Family(args.family)
    rows = []
    ok = True
    for k in range(2, args.kmax + 1):
        for d in range(3, args.dmax + 1):
            rep = secant_jacobian_rank(fam, d, k, args.seed)
            ok = ok and rep.nondefective
            rows.append(rep.to_json())
    _emit(args, {"family": args.family, "dmax": args.dmax, "kmax": args.kmax,
                 "pass": ok, "cells": rows},
          [f"d={r['d']} k={r['k']} rank={r['rank']} expected={r['expected']} "
           f"{'ok' if r['nondefective'] else 'DEFECT?'}" for r in rows])
    return 0 if ok else 1


def _cmd_eddeg(args) -> int:
    rep = ed_degree(Family(args.family), seed=args.seed, opts=_tracker_options(args),
                    workers=args.threads)
    payload = rep.to_json()
    payload["options"] = rep.solve.options.to_json()
    _emit(args, payload,
          [f"family {rep.family}: {rep.count} critical points "
           f"({rep.solve.paths_tracked} paths, {rep.solve.at_infinity} at infinity, "
           f"{rep.solve.failed} failed)"])
    return 0


def _cmd_iddeg(args) -> int:
    opts = _tracker_options(args)
    rep = monodromy_count(Family(args.family), args.k, seed=args.seed,
                          opts=opts, stall_loops=args.stall_loops,
                          workers=args.threads)
    payload = rep.to_json()
    payload["options"] = opts.to_json()
    payload["stall_loops"] = args.stall_loops
    _emit(args, payload,
          [f"family {rep.family} k={rep.k}: >= {rep.class_count} classes "
           f"({rep.raw_count} raw solutions, {rep.loops} loops, "
           f"stalled={rep.stalled}, lost={rep.lost_paths})"])
    return 0


def _parse_model(args) -> MixtureModel:
    comps = []
    for chunk in args.params.split(";"):
        comps.append(tuple(float(v) for v in chunk.split(",") if v.strip()))
    if args.weights:
        weights = [float(v) for v in args.weights.split(",")]
    else:
        weights = [1.0 / len(comps)] * len(comps)
    return MixtureModel(Dist(args.family), comps, weights)


def _cmd_sample(args) -> int:
    model = _parse_model(args)
    data = sample(model, args.n, args.seed)
    payload = {"model": model.to_json(), "n": args.n,
               "values": [float(v) for v in data]}
    _emit(args, payload, [repr(float(v)) for v in data])
    return 0


def _read_data(args) -> np.ndarray:
    if args.input:
        with open(args.input) as fh:
            text = fh.read()
    else:
        text = sys.stdin.read()
    values = [float(tok) for tok in text.split() if tok.strip()]
    if not values:
        raise UsageError("no observations supplied")
    return np.asarray(values)


def _cmd_estimate(args) -> int:
    kind = Dist(args.family)
    data = _read_data(args)
    if args.k <= 1:
        d = args.d if args.d is not None else 2
        sm = sample_moments(data, max(d, 2 if kind in (Dist.IG, Dist.GAMMA, Dist.GAUSSIAN) else 1))
        params = mom_single(kind, sm)
        payload = {"kind": kind.value, "k": 1, "n": sm.n,
                   "estimate": list(params), "moments": sm.values}
        _emit(args, payload, [f"estimate: {params}"])
        return 0
    d = args.d if args.d is not None else 3 * args.k - 1
    sm = sample_moments(data, d)
    weight = gmm_weight_matrix(data, d) if args.gmm else None
    result = mom_mixture(kind, args.k, sm, cache_dir=args.cache_dir, seed=args.seed,
                         opts=_tracker_options(args), weight_matrix=weight,
                         workers=args.threads,
                         progress=lambda msg: print(msg, file=sys.stderr))
    payload = result.to_json()
    payload["n"] = sm.n
    lines = []
    for i, cand in enumerate(result.candidates):
        lines.append(f"#{i+1} components={cand.model.components} "
                     f"weights={[round(w, 6) for w in cand.model.weights]} "
                     f"residual={cand.residual:.3e}")
    if not lines:
        lines = ["no admissible candidates; see diagnostics with --format json"]
    _emit(args, payload, lines)
    return 0


_HANDLERS = {
    "moments": _cmd_moments,
    "matrix": _cmd_matrix,
    "generators": _cmd_generators,
    "verify": _cmd_verify,
    "hilbert": _cmd_hilbert,
    "singular": _cmd_singular,
    "defect": _cmd_defect,
    "eddeg": _cmd_eddeg,
    "iddeg": _cmd_iddeg,
    "sample": _cmd_sample,
    "estimate": _cmd_estimate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    if args.cache_dir is None:
        args.cache_dir = str(default_cache_dir())
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:  # pragma: no cover
        return 0


if __name__ == "__main__":
    sys.exit(main())
