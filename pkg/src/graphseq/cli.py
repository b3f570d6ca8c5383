"""Command-line front end wiring the engine, oracle, walk lab and constants.

Subcommands: count, count-ondemand, oracle, walk, rho, constants, verify.
Exit codes: 0 success, 1 verification failure, 2 bad arguments (argparse),
3 memory budget reached (a checkpoint of the last complete layer was saved).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import engine, oracle, walklab, constants

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_ARGS = 2
EXIT_MEMORY_CHECKPOINT = 3

DEFAULT_EXTRAPOLATION_GRIDS = (1024, 2048, 4096)


# ---------------------------------------------------------------------------
# output formats and the results store


def bfile_lines(rows) -> list:
    """OEIS b-file: one ascii 'n value' pair per line, increasing n."""
    return [f"{n} {value}" for n, value in rows]


def parse_bfile(text: str) -> list:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        n, value = line.split()
        rows.append((int(n), int(value)))
    return rows


def csv_lines(rows) -> list:
    """CSV with header n,G,H,ratio; ratio is G(n)/G(n-1), blank at n = 1."""
    out = ["n,G,H,ratio"]
    prev_g = None
    for n, g, h in rows:
        ratio = "" if not prev_g else f"{g / prev_g:.6f}"
        out.append(f"{n},{g},{h},{ratio}")
        prev_g = g
    return out


def parse_csv_counts(text: str) -> list:
    rows = []
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        n, g, h, _ = line.split(",")
        rows.append((int(n), int(g), int(h)))
    return rows


class RunStore:
    """Plain-file results store: appended output files plus a manifest."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.root / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
        else:
            self.manifest = {"runs": []}

    def record(self, command: str, config: dict, outputs: list) -> None:
        self.manifest["runs"].append(
            {
                "command": command,
                "config": config,
                "outputs": outputs,
                "finished": time.strftime("%Y-%m-%dT%H:%M:%S"),
            }
        )
        self.manifest_path.write_text(json.dumps(self.manifest, indent=2) + "\n")

    def append(self, name: str, lines) -> str:
        path = self.root / name
        with open(path, "a") as fh:
            for line in lines:
                fh.write(line + "\n")
        return str(path)


def _emit(lines, store: RunStore | None, name: str, command: str, config: dict):
    for line in lines:
        print(line)
    if store is not None:
        path = store.append(name, lines)
        store.record(command, config, [path])


# ---------------------------------------------------------------------------
# subcommands


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _checkpoint_dir(args) -> Path:
    raw = args.checkpoint_dir or os.environ.get("GRAPHSEQ_CHECKPOINT_DIR") or "."
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _save_checkpoint(layer, directory: Path) -> Path:
    name = f"graphseq-{layer.parity.name.lower()}-depth{layer.depth:05d}.ckpt"
    path = directory / name
    engine.Checkpoint.of(layer).save(path)
    return path


def cmd_count(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    want_h = args.format == "csv"
    even = engine.stream_counts(
        args.max_n, engine.Parity.EVEN, workers=args.workers,
        memory_limit=args.memory_limit,
    )
    odd = (
        engine.stream_counts(args.max_n, engine.Parity.ODD, workers=args.workers,
                             memory_limit=args.memory_limit)
        if want_h
        else None
    )
    lines_out = []
    prev_g = None
    header_done = False
    try:
        for n, g, layer in even:
            if want_h:
                _, h, _ = next(odd)
                if not header_done:
                    lines_out.append("n,G,H,ratio")
                    print(lines_out[-1])
                    header_done = True
                ratio = "" if not prev_g else f"{g / prev_g:.6f}"
                line = f"{n},{g},{h},{ratio}"
                prev_g = g
            else:
                line = f"{n} {g}"
            lines_out.append(line)
            print(line, flush=True)
            if args.checkpoint_every and layer.depth and layer.depth % args.checkpoint_every == 0:
                _save_checkpoint(layer, _checkpoint_dir(args))
    except engine.MemoryBudgetExceeded as exc:
        path = _save_checkpoint(exc.layer, _checkpoint_dir(args))
        print(
            f"memory budget reached at depth {exc.depth}: "
            f"checkpointed depth {exc.layer.depth} to {path}",
            file=sys.stderr,
        )
        if store is not None:
            store.append("results." + args.format, lines_out)
            store.record("count", _config(args) | {"interrupted": True}, [str(path)])
        return EXIT_MEMORY_CHECKPOINT
    if store is not None:
        path = store.append("results." + args.format, lines_out)
        store.record("count", _config(args), [path])
    return EXIT_OK


def cmd_count_ondemand(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    ckpt = engine.Checkpoint.load(args.checkpoint)
    rows = engine.extend_counts(ckpt, args.target_n, memory_limit=args.memory_limit)
    lines = bfile_lines(rows)
    _emit(lines, store, "results.bfile", "count-ondemand",
          {"checkpoint": str(args.checkpoint), "target_n": args.target_n})
    return EXIT_OK


def cmd_oracle(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    lines = ["n,G,H,D"]
    failures = 0
    for n in range(1, args.max_n + 1):
        g, h, d = oracle.brute_counts(n)
        lines.append(f"{n},{g},{h},{d}")
        if args.cross_check:
            eg = engine.count_graphic(n, engine.Parity.EVEN)
            eh = engine.count_graphic(n, engine.Parity.ODD)
            if (eg, eh) != (g, h):
                failures += 1
                lines.append(f"# MISMATCH at n={n}: engine ({eg}, {eh})")
    if args.cross_check:
        lines.append(f"# engine cross-check: {'ok' if not failures else 'FAILED'}")
    if args.ballot:
        rng = np.random.default_rng(args.seed)
        for n in range(2, args.ballot + 1):
            target = oracle.double_factorial_odd(n)
            for _ in range(args.ballot_vectors):
                x = oracle.random_sum_distinct_vector(n, rng)
                if oracle.ballot_count(x) != target:
                    failures += 1
                    lines.append(f"# BALLOT MISMATCH n={n} at {x}")
            # exploratory: counts can only grow under ties; report, assert nothing
            max_tied = 0
            for _ in range(args.ballot_vectors):
                base = oracle.random_sum_distinct_vector(max(2, n - 1), rng)
                x = (base + base)[:n]
                max_tied = max(max_tied, oracle.ballot_count(x))
            all_equal = oracle.ballot_count(tuple([Fraction(1)] * n))
            lines.append(
                f"# ballot n={n}: sum-distinct={target}, "
                f"max over random ties={max_tied}, all-equal={all_equal}"
            )
    _emit(lines, store, "oracle.csv", "oracle", {"max_n": args.max_n})
    return EXIT_VERIFY_FAILED if failures else EXIT_OK


def cmd_walk(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    end = walklab.End.ZERO if args.end == "zero" else walklab.End.ZERO_OR_MINUS_ONE
    shards = len(walklab.mc_shard_layout(args.samples, args.batch))
    estimate, stderr = walklab.persistence_mc(
        args.n, args.samples, end=end, seed=args.seed,
        workers=args.workers, batch=args.batch,
    )
    scaled = estimate * args.n**0.25
    lines = [
        f"# seed={args.seed} samples={args.samples} shards={shards} "
        f"batch={args.batch} end={args.end}",
        "n,estimate,stderr,scaled",
        f"{args.n},{estimate:.9f},{stderr:.3e},{scaled:.6f}",
    ]
    if args.exact:
        if args.n <= walklab.EXACT_LIMIT:
            exact = walklab.persistence_exact(args.n, end)
            lines.append(f"# exact={exact} ({float(exact):.9f})")
        else:
            print(f"# exact mode needs n <= {walklab.EXACT_LIMIT}; skipped",
                  file=sys.stderr)
    _emit(lines, store, "walk.csv", "walk",
          {"n": args.n, "samples": args.samples, "seed": args.seed, "shards": shards})
    return EXIT_OK


def _pmf_for(kind: str, order: int, exact: bool) -> constants.AreaPmf:
    if exact:
        return constants.area_pmf(order, kind, "gf")
    return constants.area_pmf(order, kind, "dp", exact=False)


def cmd_rho(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    grids = args.grid or [2]
    extrapolate = (
        [int(v) for v in args.extrapolate.split(",")] if args.extrapolate else []
    )
    order = args.coeff_order or max(list(grids) + extrapolate)
    pmf = _pmf_for(args.kind, order, args.exact)
    lines = ["n,K,lower,upper,amalgamated,extrapolated"]
    human = []
    for n in grids:
        est = constants.rho_bounds(n, pmf)
        am = constants.rho_amalgamated(n, pmf)
        if args.exact and est.mode == "exact-rational":
            human.append(f"{est.lower} ≤ rho ≤ {est.upper}")
            human.append(f"amalgamated estimate {am.lower} (non-rigorous)")
            lines.append(f"{n},{order},{est.lower},{est.upper},{am.lower},")
        else:
            human.append(
                f"n={n}: {est.lower:.10f} ≤ rho ≤ {est.upper:.10f} "
                f"(amalgamated {am.lower:.10f}, non-rigorous)"
            )
            lines.append(f"{n},{order},{est.lower:.12f},{est.upper:.12f},{am.lower:.12f},")
    extrapolated = None
    if extrapolate:
        pts = [(n, constants.rho_amalgamated(n, pmf).lower) for n in extrapolate]
        extrapolated = constants.richardson(pts)
        human.append(f"richardson over {extrapolate}: {extrapolated:.12f} (non-rigorous)")
        lines.append(f"{extrapolate[-1]},{order},,,,{extrapolated:.12f}")
    for line in human:
        print(line)
    if store is not None:
        path = store.append("rho.csv", lines)
        store.record("rho", {"grids": list(grids), "K": order, "kind": args.kind}, [path])
    return EXIT_OK


def cmd_constants(args) -> int:
    store = RunStore(args.run_dir) if args.run_dir else None
    grids = [int(v) for v in args.grids.split(",")]
    order = args.coeff_order or max(grids)
    t0 = time.time()
    lines = []
    results = {}
    for kind, label in (("lazy", "rho"), ("simple", "rho_hat")):
        pmf = _pmf_for(kind, order, exact=False)
        pts = [(n, constants.rho_amalgamated(n, pmf).lower) for n in grids]
        extrapolated = constants.richardson(pts)
        bracket = constants.rho_bounds(grids[-1], pmf)
        results[label] = extrapolated
        lines.append(
            f"{label} = {extrapolated:.12f}  [richardson over amalgamated chain, "
            f"grids {grids}, K={order}; non-rigorous]"
        )
        lines.append(
            f"  rigorous bracket at n={grids[-1]}: "
            f"[{bracket.lower:.10f}, {bracket.upper:.10f}]"
        )
    c = constants.c_from_rho(results["rho"])
    lines.append(f"c = {c:.12f}  [Gamma(3/4) / (4 pi sqrt(2 (1 - rho))); from rho above]")
    lines.append(f"# elapsed {time.time() - t0:.1f}s")
    _emit(lines, store, "constants.txt", "constants", {"grids": grids, "K": order})
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = []

    def check(name, fn):
        try:
            fn()
            checks.append((name, None))
            print(f"ok - {name}")
        except Exception as exc:  # noqa: BLE001 - report and continue
            checks.append((name, exc))
            print(f"FAIL - {name}: {exc}")

    def eq(a, b, what=""):
        if a != b:
            raise AssertionError(f"{what}: {a} != {b}")

    max_n = args.max_n

    def engine_vs_oracle():
        for n in range(1, max_n + 1):
            g, h, d = oracle.brute_counts(n)
            eq(engine.count_graphic(n, engine.Parity.EVEN), g, f"G({n})")
            eq(engine.count_graphic(n, engine.Parity.ODD), h, f"H({n})")
            eq(g + h, d, f"D({n})")

    def growth():
        vals = [v for _, v, _ in engine.stream_counts(24)]
        odd = [v for _, v, _ in engine.stream_counts(24, engine.Parity.ODD)]
        for i in range(1, len(vals)):
            assert vals[i] >= vals[i - 1], f"G not monotone at {i + 1}"
            assert 2 * vals[i] >= vals[i - 1] + odd[i - 1], f"growth bound at {i + 1}"

    def caps():
        layer = engine.initial_layer(engine.Parity.EVEN)
        ckpt0 = engine.Checkpoint.of(layer)
        for depth in range(1, 9):
            layer = engine.advance(layer)
        for y in layer.heights():
            band = layer.bands[y]
            for a in range(band.cap, band.cap + 5):
                got = layer.value(y, a)
                want = _reference_count(8, y, a, engine.Parity.EVEN)
                eq(got, want, f"cap read ({y}, {a})")

    def determinism():
        layer = engine.initial_layer(engine.Parity.EVEN)
        for _ in range(7):
            layer = engine.advance(layer)
        eq(engine.advance(layer, workers=1), engine.advance(layer, workers=2),
           "worker count changes the layer")

    def checkpoints():
        layer = engine.initial_layer(engine.Parity.ODD)
        for _ in range(6):
            layer = engine.advance(layer)
        import tempfile

        path = tempfile.mktemp(suffix=".ckpt")
        engine.Checkpoint.of(layer).save(path)
        back = engine.Checkpoint.load(path)
        os.unlink(path)
        eq(back.layer, layer, "checkpoint roundtrip")
        eq(engine.extend_on_demand(back, 9),
           engine.count_graphic(10, engine.Parity.ODD), "on-demand extension")

    def difference():
        layer = engine.initial_layer(engine.Parity.EVEN)
        for _ in range(5):
            layer = engine.advance(layer)
        diff = engine.to_difference(layer)
        eq(engine.from_difference(diff), layer, "difference roundtrip")
        eq(diff.value(0, 0), layer.value(0, 0), "difference at area 0")

    def graphicality_tests_agree():
        for n in range(1, 8):
            for d in oracle.enumerate_sequences(n):
                dom, even = oracle.is_graphic(d)
                eq(dom and even, oracle.havel_hakimi(d), f"tests disagree on {d}")

    def walk_mapping():
        for n in range(1, 9):
            total = 0
            walks = {}
            for d in oracle.enumerate_sequences(n):
                dom, _ = oracle.is_graphic(d)
                w = oracle.to_walk(d)
                eq(dom, all(a >= 0 for a in w.areas()), f"walk area mismatch {d}")
                eq(sum(d) % 2, (w.areas()[-1] if w.steps else 0) % 2, f"parity {d}")
                walks[w.steps] = w.lazy_steps
                total += 1
            eq(total, sum(2**z for z in walks.values()), f"walk weights n={n}")

    def series():
        pmf = constants.area_pmf(9, "lazy", "gf")
        eq(pmf.p[1:4], [Fraction(1, 16), Fraction(1, 32), Fraction(1, 64)], "g(x,1)")
        dp = constants.area_pmf(30, "lazy", "dp")
        gf = constants.area_pmf(30, "lazy", "gf")
        eq(dp.p[1:], gf.p[1:], "lazy gf vs dp")
        dps = constants.area_pmf(30, "simple", "dp")
        gfs = constants.area_pmf(30, "simple", "gf")
        eq(dps.p[1:], gfs.p[1:], "simple gf vs dp")

    def chain():
        pmf = constants.area_pmf(2, "lazy", "gf")
        h = constants.chain_hitting_exact(2, pmf)
        eq(h["zero"][0], Fraction(1, 8), "h10")
        eq(h["star"][0], Fraction(1, 2), "h1*")
        est = constants.rho_bounds(2, pmf)
        eq((est.lower, est.upper), (Fraction(65, 128), Fraction(93, 128)), "n=2 bounds")
        pmf16 = constants.area_pmf(16, "lazy", "dp", exact=False)
        b16 = constants.rho_bounds(16, pmf16)
        a16 = constants.rho_amalgamated(16, pmf16)
        assert b16.lower <= a16.lower <= b16.upper, "amalgamated outside bracket"

    def persistence():
        eq(walklab.persistence_exact(2), Fraction(5, 6), "q(2)")
        est, se = walklab.persistence_mc(5, 100_000, seed=13)
        exact = float(walklab.persistence_exact(5))
        assert abs(est - exact) <= 3 * se, f"mc off: {est} vs {exact}"
        for n in range(1, 6):
            counts = walklab.bridge_return_counts(n)
            import math as _m

            for k in range(n + 1):
                eq(walklab.returns_tail(n, k),
                   Fraction(counts[k], _m.comb(2 * n, n)), f"returns({n},{k})")

    def llt():
        e16, e64 = walklab.llt_error(16), walklab.llt_error(64)
        assert e64 < e16 < 1, f"llt errors not shrinking: {e16}, {e64}"

    def ballot():
        eq(oracle.ballot_count((Fraction(1), Fraction(3, 5))), 3, "ballot n=2")
        rng = np.random.default_rng(2)
        for n in (2, 3, 4):
            x = oracle.random_sum_distinct_vector(n, rng)
            eq(oracle.ballot_count(x), oracle.double_factorial_odd(n), f"ballot n={n}")
            tied = oracle.ballot_count(tuple([Fraction(1)] * n))
            assert tied >= oracle.double_factorial_odd(n), "tied ballot below floor"

    def extrapolation():
        eq(constants.richardson([(8, Fraction(3) + Fraction(5, 8)),
                                 (16, Fraction(3) + Fraction(5, 16))]),
           Fraction(3), "linear model")

    def roundtrip_formats():
        rows = [(n, v) for n, v, _ in engine.stream_counts(6)]
        parsed = parse_bfile("\n".join(bfile_lines(rows)))
        eq(parsed, rows, "bfile roundtrip")
        triples = [(n, g, g - 1) for n, g in rows]
        eq(parse_csv_counts("\n".join(csv_lines(triples))), triples, "csv roundtrip")

    check("engine counts match the brute-force oracle", engine_vs_oracle)
    check("monotone growth and the (G+H)/2 bound", growth)
    check("cap reads agree with the cap-free reference", caps)
    check("advance is worker-count independent", determinism)
    check("checkpoint save/load/extend", checkpoints)
    check("difference transform", difference)
    check("conjugate test agrees with havel-hakimi", graphicality_tests_agree)
    check("sequence-to-walk mapping", walk_mapping)
    check("generating function vs first-passage dp", series)
    check("absorbing chain exact values", chain)
    check("persistence and return laws", persistence)
    check("local limit error shrinks", llt)
    check("ballot arrangement counts", ballot)
    check("richardson recovers linear models", extrapolation)
    check("output formats round-trip", roundtrip_formats)

    failed = [name for name, exc in checks if exc is not None]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _reference_count(depth: int, y: int, a: int, parity) -> int:
    """Cap-free recursion straight from the definition; for verification only."""
    memo = {}

    def rec(k, yy, aa):
        if aa < 0 or yy > k or yy < -k - 1:
            return 0
        if k == 0:
            return 1 if yy in (0, -1) and (aa & 1) == parity else 0
        key = (k, yy, aa)
        if key not in memo:
            memo[key] = (
                rec(k - 1, yy + 1, aa + yy + 1)
                + rec(k - 1, yy - 1, aa + yy - 1)
                + 2 * rec(k - 1, yy, aa + yy)
            )
        return memo[key]

    return rec(depth, y, a)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphseq",
        description="Exact graphic-sequence counts and their growth constants.",
    )
    parser.add_argument("--run-dir", help="directory for the plain-file results store")
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                        help="worker threads for layer advances and MC shards")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="stream exact counts while advancing layers")
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--format", choices=("bfile", "csv"), default="bfile")
    p.add_argument("--memory-limit", type=int, default=None,
                   help="byte ceiling; on breach checkpoint and exit 3")
    p.add_argument("--checkpoint-every", type=int, default=None, metavar="DEPTH")
    p.add_argument("--checkpoint-dir", default=None)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("count-ondemand", help="extend counts from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--target-n", type=int, required=True)
    p.add_argument("--memory-limit", type=int, default=None)
    p.set_defaults(func=cmd_count_ondemand)

    p = sub.add_parser("oracle", help="brute-force tables and cross-checks")
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--cross-check", action="store_true", default=True)
    p.add_argument("--no-cross-check", dest="cross_check", action="store_false")
    p.add_argument("--ballot", type=int, default=0, metavar="N",
                   help="also report ballot counts up to this n")
    p.add_argument("--ballot-vectors", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("walk", help="bridge persistence estimates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--end", choices=("zero", "either"), default="zero")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch", type=int, default=200_000)
    p.add_argument("--exact", action="store_true",
                   help="also print the exact value (small n only)")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("rho", help="absorbing-chain bounds and extrapolation")
    p.add_argument("--grid", type=int, action="append", metavar="N")
    p.add_argument("--coeff-order", type=int, default=None, metavar="K")
    p.add_argument("--kind", choices=("lazy", "simple"), default="lazy")
    p.add_argument("--exact", action="store_true",
                   help="exact rational solve (small grids)")
    p.add_argument("--extrapolate", default=None, metavar="N1,N2,...")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("constants", help="report rho, c and the simple-walk variant")
    p.add_argument("--grids", default=",".join(str(g) for g in DEFAULT_EXTRAPOLATION_GRIDS))
    p.add_argument("--coeff-order", type=int, default=None)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", help="run the cross-module property suite")
    p.add_argument("--max-n", type=int, default=10,
                   help="exhaustive oracle range for the engine comparison")
    p.set_defaults(func=cmd_verify)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
