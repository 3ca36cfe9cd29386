"""plexforge command line.

Every command prints one JSON document on stdout:
``{"command", "parameters", "result", "elapsed_ms"}``. Squares and entry
sets are written to files, never to stdout.

Exit codes: 0 success (including an Excluded certificate), 1 a paper-suite
criterion failed, 2 usage error, 3 data error, 10 Inconclusive certificate.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import analyze, construct, search, species, suite
from .core import LatinError, read_rectangle, read_square, write_entries, write_square

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INCONCLUSIVE = 10


class _Usage(Exception):
    pass


def _file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------- commands


def _variant(args):
    v = args.variant
    if v == "kk2":
        return construct.KK2(args.k, args.m)
    if v == "mod4":
        return construct.Mod4(args.n)
    if v == "mod10":
        return construct.Mod10of12(args.m)
    if v == "mod2":
        return construct.Mod2of12(args.m)
    if v == "special":
        return construct.SmallOrder(args.n)
    raise _Usage(f"unknown variant {v}")


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"{args.variant} needs {', '.join(missing)}")


def cmd_construct(args) -> tuple[dict, int]:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    if args.variant == "cyclic":
        _need(args, "n")
        sq = construct.build_cyclic(args.n)
        name, plex = f"B{args.n}", None
    else:
        _need(args, *{"kk2": ("k", "m"), "mod10": ("m",), "mod2": ("m",)}.get(args.variant, ("n",)))
        v = _variant(args)
        if args.variant == "special":
            sq = construct.build_special_square(v.n)
            plex = construct.build_special_triplex(v.n)
        else:
            sq = construct.build_modified_square(v)
            plex = construct.build_plex(v)
        name = f"{args.variant}_n{sq.order}"
    sq_path = out / f"{name}.square"
    write_square(sq, sq_path)
    files["square"] = {"path": str(sq_path), "sha256": _file_digest(sq_path)}
    result = {"order": sq.order, "square_digest": sq.digest(), "files": files}
    if plex is not None:
        plex_path = out / f"{name}.plex"
        write_entries(plex, plex_path)
        files["plex"] = {"path": str(plex_path), "sha256": _file_digest(plex_path)}
        result["plex_size"] = len(plex) // sq.order
    return result, EXIT_OK


def cmd_search(args) -> tuple[dict, int]:
    sq = read_square(args.square)
    budget = search.SearchBudget(args.node_limit, None, args.seed)
    if args.count:
        if args.k != 1:
            raise _Usage("--count is only available for k = 1")
        outcome = search.count_transversals(sq, budget, jobs=args.jobs)
    else:
        outcome = search.find_plex(sq, args.k, budget, prune_delta=args.prune_delta, jobs=args.jobs)
    result = {"square_digest": sq.digest(), "k": args.k, **outcome.to_dict()}
    result.pop("witness")
    if outcome.witness is not None and args.witness_out:
        write_entries(outcome.witness, args.witness_out)
        result["witness_path"] = args.witness_out
    elif outcome.witness is not None:
        result["witness"] = [list(e) for e in outcome.witness]
    return result, EXIT_OK


def cmd_certify(args) -> tuple[dict, int]:
    sq = read_square(args.square)
    if args.method == "steptype":
        cert = analyze.steptype_certificate(sq, args.k, args.m)
    elif args.method == "botrows":
        if args.r is None:
            raise _Usage("botrows needs --r")
        cert = analyze.botrows_certificate(sq, args.k, args.m, args.r)
    else:
        cert = analyze.matching_certificate(sq, args.k, args.m)
    return cert.to_dict(), EXIT_OK if cert.excluded else EXIT_INCONCLUSIVE


def cmd_enumerate(args) -> tuple[dict, int]:
    rect = read_rectangle(args.rectangle)
    squares = []
    sink = open(args.out, "w", newline="\n") if args.out else None
    try:
        for sq in search.enumerate_completions(rect):
            if sink is not None:
                if squares:
                    sink.write("\n")
                sink.write(sq.to_text())
            squares.append(sq)
    finally:
        if sink is not None:
            sink.close()
    result = {"rectangle_sha256": _file_digest(Path(args.rectangle)), "completions": len(squares)}
    if args.out:
        result["out"] = args.out
    counts = None
    if args.transversal_check:
        counts = [search.count_transversals(sq, jobs=args.jobs).count for sq in squares]
        result["transversal_counts"] = counts
        result["transversal_free"] = sum(1 for c in counts if c == 0)
    if args.classify:
        classes = species.classify(squares)
        class_counts = None
        if counts is not None:
            class_counts = [counts[c.members[0]] for c in classes]
        result["species"] = species.species_report(classes, class_counts)
        result["species_count"] = len(classes)
    return result, EXIT_OK


def cmd_bounds(args) -> tuple[dict, int]:
    if args.formula == "extension":
        if args.n is None or args.k is None:
            raise _Usage("extension needs --n and --k")
        b = analyze.extension_bound(args.n, args.k)
    elif args.formula == "stepcount":
        if args.a is None or args.m is None:
            raise _Usage("stepcount needs --a and --m")
        b = analyze.step_count_exact(args.a, args.m) if args.exact else analyze.step_count_bound(args.a, args.m)
    else:
        if args.n is None:
            raise _Usage("species-floor needs --n")
        b = analyze.species_floor(args.n, args.mode)
    return b.to_dict(), EXIT_OK


def cmd_paper_suite(args) -> tuple[dict, int]:
    results = suite.run_all(jobs=args.jobs, numbers=args.only)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    return {"passed": ok, "criteria": [r.to_dict() for r in results]}, EXIT_OK if ok else EXIT_SUITE_FAILED


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    jobs = search.default_jobs()
    p = argparse.ArgumentParser(prog="plexforge", description="Latin squares, plexes and nonexistence certificates.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("construct", help="build a square (and its plex) into files")
    c.add_argument("variant", choices=["cyclic", "kk2", "mod4", "mod10", "mod2", "special"])
    c.add_argument("--n", type=int)
    c.add_argument("--k", type=int)
    c.add_argument("--m", type=int)
    c.add_argument("--out", default=".", help="output directory")
    c.set_defaults(func=cmd_construct)

    s = sub.add_parser("search", help="look for a k-plex or count transversals")
    s.add_argument("square")
    s.add_argument("--k", type=int, default=1)
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true")
    mode.add_argument("--exists", action="store_true")
    s.add_argument("--jobs", type=int, default=jobs)
    s.add_argument("--seed", type=int)
    s.add_argument("--node-limit", type=int)
    s.add_argument("--prune-delta", action="store_true")
    s.add_argument("--witness-out")
    s.set_defaults(func=cmd_search)

    f = sub.add_parser("certify", help="emit a nonexistence certificate")
    f.add_argument("square")
    f.add_argument("--method", choices=["steptype", "botrows", "matching"], required=True)
    f.add_argument("--k", type=int, default=1)
    f.add_argument("--m", type=int, default=1)
    f.add_argument("--r", type=int)
    f.set_defaults(func=cmd_certify)

    e = sub.add_parser("enumerate", help="complete a latin rectangle in every way")
    e.add_argument("rectangle")
    e.add_argument("--classify", action="store_true")
    e.add_argument("--transversal-check", action="store_true")
    e.add_argument("--out", help="write completions here, blank-line separated")
    e.add_argument("--jobs", type=int, default=jobs)
    e.set_defaults(func=cmd_enumerate)

    b = sub.add_parser("bounds", help="evaluate a counting bound")
    b.add_argument("formula", choices=["extension", "stepcount", "species-floor"])
    b.add_argument("--n", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--a", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--mode", choices=["Quadratic", "ThreeHalves"], default="Quadratic")
    b.add_argument("--exact", action="store_true", help="stepcount: exact pre-asymptotic count")
    b.set_defaults(func=cmd_bounds)

    ps = sub.add_parser("paper-suite", help="run the reproduction matrix")
    ps.add_argument("--only", type=int, nargs="+")
    ps.add_argument("--jobs", type=int, default=jobs)
    ps.set_defaults(func=cmd_paper_suite)
    return p


def _parameters(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "command")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    report = {"command": args.command, "parameters": _parameters(args)}
    try:
        result, code = args.func(args)
    except _Usage as exc:
        parser.error(str(exc))  # exits with 2
    except (LatinError, ValueError, OSError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        report["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
        print(json.dumps(report))
        return EXIT_DATA
    report["result"] = result
    report["elapsed_ms"] = int((time.perf_counter() - start) * 1000)
    print(json.dumps(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
