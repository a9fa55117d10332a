"""Command line front end.

    krweb compute --name trefoil --n 2 --reduced --mark 1
    krweb compute --braid "s1 s1 s1" --n 2 --format json
    krweb selftest --level quick
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .krlink import kr_invariant, parse_link
from .selftest import run_selftest


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="krweb", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute a Khovanov-Rozansky invariant")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--name", help="built-in link name (e.g. trefoil, hopf_v1)")
    src.add_argument("--braid", help="braid word, e.g. 's1 s1 s1' or '1 1 1'")
    src.add_argument("--pd", help="PD code, e.g. 'X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]'")
    c.add_argument("--n", type=int, required=True, help="the sl(N) parameter, N >= 1")
    c.add_argument("--reduced", action="store_true", help="reduced invariant")
    c.add_argument("--mark", help="marked edge for the reduced invariant")
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.add_argument("--cache-dir", default=None)
    c.add_argument("--threads", type=int, default=1)
    c.add_argument("--timeout-secs", type=float, default=None)

    s = sub.add_parser("selftest", help="run the embedded acceptance checks")
    s.add_argument("--level", choices=("quick", "full"), default="quick")
    return p


def _compute(args) -> int:
    if args.n < 1:
        print("error: --n must be at least 1", file=sys.stderr)
        return 2
    if args.reduced and not args.mark:
        print("error: --reduced requires --mark", file=sys.stderr)
        return 2
    if args.mark and not args.reduced:
        print("error: --mark is only valid with --reduced", file=sys.stderr)
        return 2
    if args.name:
        spec, kind, label = args.name, "name", args.name
    elif args.braid:
        spec, kind, label = args.braid, "braid", f"braid {args.braid}"
    else:
        spec, kind, label = args.pd, "pd", "pd"

    def work():
        diagram = parse_link(spec, kind)
        return kr_invariant(
            diagram,
            args.n,
            reduced=args.reduced,
            mark=args.mark,
            threads=args.threads,
            cache_dir=args.cache_dir,
        )

    t0 = time.time()
    try:
        if args.timeout_secs:
            result = _with_timeout(work, args.timeout_secs)
        else:
            result = work()
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall_ms = int((time.time() - t0) * 1000)
    if args.format == "json":
        payload = {
            "link": label,
            "N": args.n,
            "reduced": args.reduced,
            "parity": result.parity,
            "terms": [
                {"t": t, "q": q, "dim": dim}
                for (t, q), dim in result.poincare.sorted_terms()
            ],
            "wall_time_ms": wall_ms,
        }
        print(json.dumps(payload))
    else:
        print(f"link: {label}  N={args.n}  reduced={args.reduced}  parity={result.parity}")
        print(f"poincare: {result.poincare}")
        print(f"wall_time: {wall_ms} ms")
    return 0


def _with_timeout(fn, seconds: float):
    """Run fn in a worker process and kill it cleanly on timeout."""
    import concurrent.futures
    import multiprocessing

    ctx = multiprocessing.get_context("fork")
    with concurrent.futures.ProcessPoolExecutor(max_workers=1, mp_context=ctx) as ex:
        fut = ex.submit(fn)
        try:
            return fut.result(timeout=seconds)
        except concurrent.futures.TimeoutError:
            for proc in ex._processes.values():  # noqa: SLF001 - kill workers
                proc.terminate()
            raise TimeoutError(f"computation exceeded {seconds} s") from None


def _selftest(args) -> int:
    results = run_selftest(args.level)
    failed = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"[{status}] {r.name}  ({r.seconds:.2f}s)  {r.detail}")
        if not r.ok:
            failed += 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "compute":
        return _compute(args)
    return _selftest(args)


if __name__ == "__main__":
    sys.exit(main())
