"""``cicycert`` command line.

Subcommands: certify, lemmas, splitting, deform, profile.  Output files go
to ``--out`` (a file) or ``--out-dir``, which defaults to ``$CICYCERT_OUT``
and then the working directory.  Every file is written atomically.

Exit codes::

    0  every enabled check passed
    1  a check genuinely failed (the report is still written)
    2  usage error
    3  hypothesis violated or witness unavailable
    4  random resampling budget exhausted
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path

from . import __version__
from .algebra.fields import DEFAULT_PRIME, PrimeField
from .certificate import SCHEMA_VERSION, build_certificate, load, write_json
from .linalg.lemmas import LemmaHypothesisError, run_trials

OUT_ENV = "CICYCERT_OUT"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_HYPOTHESIS = 3
EXIT_RESAMPLING = 4

LEMMAS = ("A2", "A3", "A4", "A5", "A6")


def _exit_for(exc: BaseException) -> int:
    from .witnesses import ResamplingExhausted, WitnessError, WitnessUnavailable

    if isinstance(exc, ResamplingExhausted):
        return EXIT_RESAMPLING
    if isinstance(exc, (WitnessUnavailable, LemmaHypothesisError, WitnessError)):
        return EXIT_HYPOTHESIS
    raise exc


def _out_dir(args) -> Path:
    return Path(args.out_dir or os.environ.get(OUT_ENV) or ".")


def _target(args, stem: str, many: bool) -> Path:
    if args.out and not many:
        return Path(args.out)
    return _out_dir(args) / f"{stem}.json"


def _stem(kind: str, degs: str, d: int, mode: str, seed: int) -> str:
    return f"{kind}_{degs.replace(',', '-')}_d{d}_{mode}_s{seed}"


def _error_doc(kind: str, degs: str, d: int, mode: str, seed: int, exc: BaseException, code: int) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, "type": degs, "d": d, "mode": mode, "seed": str(seed),
            "passed": False, "error": {"class": type(exc).__name__, "message": str(exc), "exit_code": code}}


# --- job bodies (module level so they pickle for --jobs) --------------------


def _certify_job(job):
    degs, d, mode, seed, prime = job
    try:
        doc = build_certificate(degs, d, mode, seed, prime)
        return doc, EXIT_OK if doc["passed"] else EXIT_FAIL
    except Exception as exc:  # noqa: BLE001 - mapped to an exit code or re-raised
        code = _exit_for(exc)
        return _error_doc("certificate", degs, d, mode, seed, exc, code), code


def _splitting_job(job):
    degs, d, mode, seed, prime, level = job
    from .bundles import normal_bundle_type, splitting_report
    from .witnesses import package_for

    try:
        pkg = package_for(degs, d, mode, seed)
    except Exception as exc:  # noqa: BLE001
        code = _exit_for(exc)
        return _error_doc("splitting", degs, d, mode, seed, exc, code), code
    F = PrimeField(prime, check=False)
    levels = range(pkg.spec.r + 1) if level is None else [level]
    reports = [splitting_report(pkg, s, F) for s in levels]
    doc = {"schema_version": SCHEMA_VERSION, "kind": "splitting", "type": degs, "d": d, "mode": mode,
           "seed": str(seed), "field": str(prime), "levels": reports}
    ok = all(r["passed"] for r in reports)
    if level is None or level == pkg.spec.r:
        nb = normal_bundle_type(pkg, F)
        doc["normal_bundle"] = nb
        ok = ok and nb["passed"]
    doc["passed"] = ok
    return doc, EXIT_OK if ok else EXIT_FAIL


def _profile_job(job):
    degs, d, mode, seed, prime = job
    from .incidence import kernel_dimension_profile
    from .witnesses import package_for

    try:
        pkg = package_for(degs, d, mode, seed, certify=False) if mode == "paper" else package_for(degs, d, mode, seed)
    except Exception as exc:  # noqa: BLE001
        code = _exit_for(exc)
        return _error_doc("profile", degs, d, mode, seed, exc, code), code
    prof = kernel_dimension_profile(pkg, PrimeField(prime, check=False))
    doc = {"schema_version": SCHEMA_VERSION, "kind": "profile", "type": degs, "d": d, "mode": mode,
           "seed": str(seed), **prof}
    return doc, EXIT_OK if prof["passed"] else EXIT_FAIL


def _fan_out(fn, jobs, n_workers: int):
    if n_workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(fn, jobs))


def _summary(doc: dict, code: int) -> str:
    verdict = "PASS" if code == EXIT_OK else ("FAIL" if code == EXIT_FAIL else "ERROR")
    bits = [verdict, f"type=({doc.get('type')})", f"d={doc.get('d')}", f"mode={doc.get('mode')}", f"seed={doc.get('seed')}"]
    if "kernel_profile" in doc:
        bits.append("profile=" + ",".join(str(k) for k in doc["kernel_profile"]["kernel_dims"]))
    elif "kernel_dims" in doc:
        bits.append("profile=" + ",".join(str(k) for k in doc["kernel_dims"]))
    nb = doc.get("normal_bundle")
    if nb and nb.get("normal_splitting") is not None:
        bits.append("N={" + ",".join(str(a) for a in nb["normal_splitting"]) + "}")
    if "error" in doc:
        bits.append(doc["error"]["message"])
    return " ".join(bits)


def _grid_jobs(args, *extra):
    from .certificate import default_mode
    from .witnesses import parse_type

    return [(t, d, args.mode or default_mode(parse_type(t), d), s, args.prime, *extra)
            for t, d, s in product(args.type, args.degree, args.seed)]


def _run_grid(args, kind: str, fn, jobs) -> int:
    results = _fan_out(fn, jobs, args.jobs)
    many = len(jobs) > 1
    worst = EXIT_OK
    for job, (doc, code) in zip(jobs, results):
        path = _target(args, _stem(kind, job[0], job[1], job[2], job[3]), many)
        write_json(path, doc)
        print(f"{_summary(doc, code)} -> {path}")
        worst = max(worst, code)
    return worst


# --- subcommands -------------------------------------------------------------


def cmd_certify(args) -> int:
    return _run_grid(args, "cert", _certify_job, _grid_jobs(args))


def cmd_splitting(args) -> int:
    return _run_grid(args, "splitting", _splitting_job, _grid_jobs(args, args.level))


def cmd_profile(args) -> int:
    return _run_grid(args, "profile", _profile_job, _grid_jobs(args))


def cmd_lemmas(args) -> int:
    if args.witness:
        from .incidence import witness_gluing_report
        from .witnesses import build_witness, parse_type

        degs = parse_type(args.witness)
        try:
            pkg = build_witness(degs, args.degree[0], args.seed[0], certify=False)
        except Exception as exc:  # noqa: BLE001
            code = _exit_for(exc)
            print(f"ERROR {exc}", file=sys.stderr)
            return code
        rep = witness_gluing_report(pkg, PrimeField(args.prime, check=False))
        doc = {"schema_version": SCHEMA_VERSION, "kind": "lemma_witness", "type": args.witness, "d": args.degree[0],
               "seed": str(args.seed[0]), **rep}
        if not rep.get("applicable"):
            code = EXIT_HYPOTHESIS
        else:
            r = rep["report"]
            code = EXIT_OK if r["passed"] else (EXIT_HYPOTHESIS if not all(r["hypotheses"].values()) else EXIT_FAIL)
        doc["passed"] = code == EXIT_OK
        path = _target(args, f"lemma_{rep.get('layout')}_{args.witness.replace(',', '-')}_d{args.degree[0]}", False)
        write_json(path, doc)
        print(f"{'PASS' if code == EXIT_OK else 'FAIL'} layout={rep.get('layout')} applicable={rep.get('applicable')} -> {path}")
        return code
    if args.lemma is None:
        print("lemmas: give --lemma or --witness", file=sys.stderr)
        return EXIT_USAGE
    F = PrimeField(args.prime, check=False)
    jobs = [(args.lemma, args.trials, d, s, args.specialize, args.inject_singular) for d, s in product(args.degree, args.seed)]
    tallies = _fan_out(_lemma_job, [(j, F.p) for j in jobs], args.jobs)
    worst = EXIT_OK
    for (lemma, trials, d, s, *_), tally in zip(jobs, tallies):
        code = EXIT_OK if tally["conclusion_failures"] == 0 else EXIT_FAIL
        tally["schema_version"] = SCHEMA_VERSION
        tally["kind"] = "lemma_trials"
        tally["passed"] = code == EXIT_OK
        path = _target(args, f"lemma_{lemma}_d{d}_s{s}", len(jobs) > 1)
        write_json(path, tally)
        print(f"{'PASS' if code == EXIT_OK else 'FAIL'} {lemma} d={d} seed={s} passes={tally['passes']}/{trials} "
              f"hypothesis_failures={tally['hypothesis_failures']} conclusion_failures={tally['conclusion_failures']} "
              f"resamples={tally['resamples']} -> {path}")
        worst = max(worst, code)
    return worst


def _lemma_job(item):
    (lemma, trials, d, seed, specialize, inject), p = item
    return run_trials(lemma, trials, d, seed, PrimeField(p, check=False), specialize=specialize, inject_singular=inject)


def cmd_deform(args) -> int:
    from .continuation import ContinuationError, ContinuationJob, newton_deform
    from .witnesses import WitnessPackage

    try:
        cert = load(args.certificate)
    except (OSError, ValueError) as exc:
        print(f"deform: cannot read certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if "witness" not in cert:
        print("deform: certificate has no witness", file=sys.stderr)
        return EXIT_USAGE
    top = cert.get("rank", {}).get("levels", [])
    if not top or not top[-1].get("passed"):
        print("deform: the certificate's top Jacobian is not certified full rank", file=sys.stderr)
        return EXIT_HYPOTHESIS
    pkg = WitnessPackage.from_json(cert["witness"])
    try:
        job = ContinuationJob(pkg, epsilon=args.epsilon, tol=args.tol, precision=args.precision,
                              max_iterations=args.max_iterations, seed=args.seed)
    except (ValueError, ArithmeticError) as exc:
        print(f"deform: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        res = newton_deform(job)
    except ContinuationError as exc:
        res = dict(exc.result)
        res.setdefault("error", str(exc))
        res["passed"] = False
    cert["continuation"] = res
    ok = bool(res.get("passed"))
    cert.setdefault("checks", {})["continuation"] = ok
    cert["passed"] = all(cert["checks"].values())
    out = Path(args.out) if args.out else Path(args.certificate)
    write_json(out, cert)
    print(f"{'PASS' if ok else 'FAIL'} eps={args.epsilon} residual={res.get('residual')} "
          f"iterations={res.get('final_leg_iterations', res.get('iterations'))} legs={len(res.get('legs', []))} -> {out}")
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _type_arg(text: str) -> str:
    from .witnesses import CY_TYPES, parse_type, type_label

    try:
        degs = parse_type(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if degs not in CY_TYPES:
        raise argparse.ArgumentTypeError(f"unknown type {text!r}; expected one of " +
                                         ", ".join(type_label(t) for t in CY_TYPES))
    return type_label(degs)


def _common(p: argparse.ArgumentParser, grid: bool = True):
    p.add_argument("--out", help="output file (single job only)")
    p.add_argument("--out-dir", help=f"output directory (default ${OUT_ENV} or .)")
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME, help="primary prime (default 2^62-57)")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes for independent jobs")
    if grid:
        p.add_argument("--type", type=_type_arg, nargs="+", required=True, help="degrees, e.g. 3,3 (several allowed)")
        p.add_argument("--degree", type=_positive, nargs="+", required=True)
        p.add_argument("--mode", choices=("paper", "random"), default=None,
                       help="default: paper where a construction exists, random otherwise")
        p.add_argument("--seed", type=int, nargs="+", default=[0])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cicycert", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="build a witness and certify it")
    _common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("profile", help="kernel dimensions of J_0..J_r")
    _common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("splitting", help="splitting types of c*T_X at each level")
    _common(p)
    p.add_argument("--level", type=int, default=None, help="single level s (default: all)")
    p.set_defaults(func=cmd_splitting)

    p = sub.add_parser("lemmas", help="fuzz the Vandermonde-type lemmas")
    _common(p, grid=False)
    p.add_argument("--lemma", choices=LEMMAS)
    p.add_argument("--witness", type=_type_arg, help="apply the matching layout to a paper witness instead")
    p.add_argument("--trials", type=_positive, default=100)
    p.add_argument("--degree", type=_positive, nargs="+", default=[1])
    p.add_argument("--seed", type=int, nargs="+", default=[0])
    p.add_argument("--specialize", action="store_true", help="A2/A3: use the specialised point layout")
    p.add_argument("--inject-singular", action="store_true", help="A4-A6: force B23 singular")
    p.set_defaults(func=cmd_lemmas)

    p = sub.add_parser("deform", help="continue a certified witness to perturbed forms")
    p.add_argument("certificate")
    p.add_argument("--out", help="write here instead of updating the certificate in place")
    p.add_argument("--epsilon", default="1e-3")
    p.add_argument("--tol", default="1e-12")
    p.add_argument("--precision", type=int, default=128)
    p.add_argument("--max-iterations", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_deform)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    if getattr(args, "out", None) and args.command != "deform" and getattr(args, "out_dir", None):
        ap.print_usage(sys.stderr)
        print("cicycert: --out and --out-dir are exclusive", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
