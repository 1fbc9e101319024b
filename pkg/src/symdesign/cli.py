"""Command-line pipeline for classifying symmetric designs with an involution.

Each subcommand is one stage; stages communicate only through the files they
read and write.  Every command accepts --threads, --budget-seconds and --out,
writes a plain-text report to stdout plus a JSON manifest next to its output
files, and exits 0 only when the stage ran to completion.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from .canonical import (
    ALGORITHM_VERSION,
    DedupeStore,
    automorphism_group,
    canonical_form,
    is_self_dual_design,
)
from .designs import (
    dual,
    format_incidence_stream,
    involution_census,
    parse_incidence_stream,
    relabel,
    validate_symmetric_design,
)
from .gf3 import (
    BudgetExceededError,
    DEFAULT_DIMENSION_CAP,
    TernaryCode,
    a9_within_range,
    is_self_dual,
    near_extremal_profile,
    weight_distribution,
)
from .indexing import index_orbit_matrix_all
from .orbits import (
    EnumerationOptions,
    enumerate_orbit_matrices,
    format_orbit_matrix_stream,
    generate_row_types,
    orbit_structure,
    parse_orbit_matrix_stream,
)


def _write_manifest(out: Path, command: str, config: dict, counts: dict,
                    wall: float, complete: bool) -> None:
    manifest = {
        "command": command,
        "config": config,
        "counts": counts,
        "wall_seconds": round(wall, 3),
        "complete": complete,
    }
    (out / f"{command}_manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_rowtypes(args) -> int:
    start = time.monotonic()
    s = orbit_structure(args.v, args.k, args.lam, args.f)
    lines = [f"row types for 2-({s.v},{s.k},{s.lam}), {s.f} fixed points"]
    counts = {}
    for wlen in (1, 2):
        if wlen == 1 and s.f == 0:
            continue
        if wlen == 2 and s.n_pairs == 0:
            continue
        types = generate_row_types(s, wlen)
        counts[f"length_{wlen}_types"] = len(types)
        lines.append(f"block-orbit length {wlen}: {len(types)} type(s)")
        for t in types:
            fixed = " ".join(str(c) for c in t.fixed_part)
            pairs = " ".join(str(c) for c in t.orbit_part)
            lines.append(f"  fixed [{fixed}]  pairs [{pairs}]")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    out = _out_dir(args)
    (out / "rowtypes.txt").write_text(report)
    config = {"v": args.v, "k": args.k, "lam": args.lam, "f": args.f}
    _write_manifest(out, "rowtypes", config, counts, time.monotonic() - start, True)
    return 0


def cmd_enumerate(args) -> int:
    start = time.monotonic()
    s = orbit_structure(args.v, args.k, args.lam, args.f)
    opts = EnumerationOptions(
        budget_seconds=args.budget_seconds,
        threads=args.threads,
        max_matrices=args.max_matrices,
    )
    matrices, stats = enumerate_orbit_matrices(s, opts)
    out = _out_dir(args)
    (out / "orbit_matrices.txt").write_text(format_orbit_matrix_stream(matrices))
    wall = time.monotonic() - start
    print(f"orbit matrices: {len(matrices)}")
    print(f"raw completions: {stats.raw_completions}")
    print(f"max length-2 row depth: {stats.max_pair_depth}")
    print(f"search nodes: {stats.nodes}")
    print(f"complete: {stats.complete}")
    config = {
        "v": args.v, "k": args.k, "lam": args.lam, "f": args.f,
        "threads": args.threads, "budget_seconds": args.budget_seconds,
        "max_matrices": args.max_matrices,
    }
    counts = {
        "orbit_matrices": len(matrices),
        "raw_completions": stats.raw_completions,
        "max_pair_depth": stats.max_pair_depth,
        "nodes": stats.nodes,
    }
    _write_manifest(out, "enumerate", config, counts, wall, stats.complete)
    return 0 if stats.complete else 1


def cmd_index(args) -> int:
    start = time.monotonic()
    oms = parse_orbit_matrix_stream(Path(args.input).read_text())
    deadline = None if args.budget_seconds is None else start + args.budget_seconds
    designs = []
    per_matrix = []
    complete = True
    for om in oms:
        remaining = None if deadline is None else max(0.0, deadline - time.monotonic())
        if remaining is not None and remaining == 0.0:
            complete = False
            break
        ds, ok = index_orbit_matrix_all(om, threads=args.threads, budget_seconds=remaining)
        designs.extend(ds)
        per_matrix.append(len(ds))
        complete = complete and ok
        if not ok:
            break
    out = _out_dir(args)
    (out / "designs.txt").write_text(format_incidence_stream(designs))
    wall = time.monotonic() - start
    print(f"orbit matrices read: {len(oms)}")
    print(f"designs written: {len(designs)}")
    print(f"complete: {complete}")
    config = {"input": str(args.input), "threads": args.threads,
              "budget_seconds": args.budget_seconds}
    counts = {"orbit_matrices": len(oms), "designs": len(designs),
              "per_matrix": per_matrix}
    _write_manifest(out, "index", config, counts, wall, complete)
    return 0 if complete else 1


def cmd_dedupe(args) -> int:
    start = time.monotonic()
    deadline = None if args.budget_seconds is None else start + args.budget_seconds
    records = parse_incidence_stream(Path(args.input).read_text())
    store = DedupeStore()
    processed = 0
    complete = True
    for m in records:
        if deadline is not None and time.monotonic() > deadline:
            complete = False
            break
        store.add_matrix(m)
        processed += 1
    classes = store.classes()

    by_order: dict[int, list] = {}
    digest_of: dict[str, int] = {}
    self_dual_digests = set()
    for i, cls in enumerate(classes):
        g = automorphism_group(cls.representative)
        sd = is_self_dual_design(cls.representative)
        if sd:
            self_dual_digests.add(cls.digest)
        by_order.setdefault(g.order, []).append((cls, sd))
        digest_of[cls.digest] = i
    dual_pairs = 0
    for cls in classes:
        if cls.digest in self_dual_digests:
            continue
        dd = canonical_form(dual(cls.representative)).digest
        if dd in digest_of and dd > cls.digest:
            dual_pairs += 1

    n_self_dual = len(self_dual_digests)
    lines = [f"designs read: {processed}",
             f"isomorphism classes: {len(classes)}",
             f"self-dual classes: {n_self_dual}",
             f"dual pairs among the rest: {dual_pairs}",
             "",
             f"{'|Aut|':>8}  {'classes':>8}  {'self-dual':>9}"]
    for order in sorted(by_order):
        members = by_order[order]
        sd = sum(1 for _, s in members if s)
        lines.append(f"{order:>8}  {len(members):>8}  {sd:>9}")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)

    out = _out_dir(args)
    store.save(out / "classes.jsonl")
    (out / "representatives.txt").write_text(
        format_incidence_stream([cls.representative for cls in classes])
    )
    (out / "dedupe.txt").write_text(report)
    wall = time.monotonic() - start
    config = {"input": str(args.input), "threads": args.threads,
              "budget_seconds": args.budget_seconds,
              "algorithm_version": ALGORITHM_VERSION}
    counts = {"designs": processed, "classes": len(classes),
              "self_dual_classes": n_self_dual, "dual_pairs": dual_pairs}
    _write_manifest(out, "dedupe", config, counts, wall, complete)
    return 0 if complete else 1


def _code_row(m, idx: int, cap: int, threads: int) -> tuple[str, dict]:
    code = TernaryCode.from_incidence(m)
    entry: dict = {"index": idx, "n": code.n, "rank": code.k}
    if code.n != 2 * code.k or not is_self_dual(code):
        entry["self_dual"] = False
        line = f"{idx:>5}  {code.n:>4}  {code.k:>4}  {'no':>9}  {'-':>4}  {'-':>8}  {'-':>6}  {'-':>6}"
        return line, entry
    entry["self_dual"] = True
    try:
        dist = weight_distribution(code, dimension_cap=cap, threads=threads)
    except BudgetExceededError:
        entry["capped"] = True
        line = f"{idx:>5}  {code.n:>4}  {code.k:>4}  {'yes':>9}  {'?':>4}  {'?':>8}  {'?':>6}  capped"
        return line, entry
    d = next(w for w in range(1, code.n + 1) if dist.counts[w])
    alpha = near_extremal_profile(dist)
    entry.update({"d": d, "A_d": dist.counts[d],
                  "alpha": alpha,
                  "a9_within_range": None if alpha is None else a9_within_range(alpha)})
    fam = "-" if alpha is None else str(alpha)
    rng = "-" if alpha is None else ("yes" if a9_within_range(alpha) else "no")
    line = f"{idx:>5}  {code.n:>4}  {code.k:>4}  {'yes':>9}  {d:>4}  {dist.counts[d]:>8}  {fam:>6}  {rng:>6}"
    return line, entry


def cmd_code(args) -> int:
    start = time.monotonic()
    deadline = None if args.budget_seconds is None else start + args.budget_seconds
    records = parse_incidence_stream(Path(args.input).read_text())
    lines = [f"{'#':>5}  {'n':>4}  {'rank':>4}  {'self-dual':>9}  {'d':>4}  {'A_d':>8}  {'A_9':>6}  {'8β rng':>6}"]
    entries = []
    capped = 0
    complete = True
    for idx, m in enumerate(records):
        if deadline is not None and time.monotonic() > deadline:
            complete = False
            break
        line, entry = _code_row(m, idx, args.dimension_cap, args.threads)
        if entry.get("capped"):
            capped += 1
        lines.append(line)
        entries.append(entry)
    if capped:
        complete = False
        lines.append(f"{capped} record(s) exceeded the dimension cap "
                     f"({args.dimension_cap}); raise --dimension-cap to finish them")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    out = _out_dir(args)
    (out / "code.txt").write_text(report)
    wall = time.monotonic() - start
    config = {"input": str(args.input), "threads": args.threads,
              "budget_seconds": args.budget_seconds, "dimension_cap": args.dimension_cap}
    counts = {"records": len(records), "analyzed": len(entries),
              "capped": capped, "profiles": entries}
    _write_manifest(out, "code", config, counts, wall, complete)
    return 0 if complete else 1


def cmd_verify(args) -> int:
    start = time.monotonic()
    records = parse_incidence_stream(Path(args.input).read_text())
    if len(records) != 1:
        print(f"verify expects exactly one design, found {len(records)}", file=sys.stderr)
        return 1
    m = records[0]
    v, k, lam = validate_symmetric_design(m)
    lines = [f"symmetric 2-({v},{k},{lam}) design: valid"]
    census = involution_census(m)
    if census:
        terms = ", ".join(f"f={f}: {n}" for f, n in census.items())
        lines.append(f"involutions by fixed-point count: {terms}")
    else:
        lines.append("involutions by fixed-point count: none")
    g = automorphism_group(m)
    lines.append(f"automorphism group order: {g.order}")
    sd = is_self_dual_design(m)
    lines.append(f"self-dual as a design: {'yes' if sd else 'no'}")

    cf = canonical_form(m)
    rng = random.Random(args.seed)
    ok = True
    for _ in range(args.relabelings):
        pp = list(range(v)); rng.shuffle(pp)
        bp = list(range(m.b)); rng.shuffle(bp)
        if canonical_form(relabel(m, tuple(pp), tuple(bp))).digest != cf.digest:
            ok = False
            break
    lines.append(f"canonical form stable under {args.relabelings} random relabelings "
                 f"(seed {args.seed}): {'yes' if ok else 'NO'}")

    code = TernaryCode.from_incidence(m)
    lines.append(f"GF(3) row-space rank: {code.k} (length {code.n})")
    code_complete = True
    if code.n == 2 * code.k and is_self_dual(code):
        lines.append("GF(3) code self-dual: yes")
        try:
            dist = weight_distribution(code, dimension_cap=args.dimension_cap,
                                       threads=args.threads)
            d = next(w for w in range(1, code.n + 1) if dist.counts[w])
            lines.append(f"minimum weight: {d} (A_{d} = {dist.counts[d]})")
            alpha = near_extremal_profile(dist)
            if alpha is not None:
                lines.append(f"near-extremal family profile: A_9 = {alpha}, "
                             f"8β range check: {'yes' if a9_within_range(alpha) else 'no'}")
            else:
                lines.append("near-extremal family profile: not in family")
        except BudgetExceededError:
            lines.append(f"weight distribution skipped: dimension {code.k} exceeds "
                         f"cap {args.dimension_cap}")
            code_complete = False
    else:
        lines.append("GF(3) code self-dual: no")

    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    out = _out_dir(args)
    (out / "verify.txt").write_text(report)
    wall = time.monotonic() - start
    config = {"input": str(args.input), "seed": args.seed,
              "relabelings": args.relabelings, "threads": args.threads,
              "budget_seconds": args.budget_seconds,
              "dimension_cap": args.dimension_cap}
    counts = {"aut_order": g.order, "self_dual_design": sd,
              "involution_census": census, "relabel_stable": ok}
    complete = ok and code_complete
    _write_manifest(out, "verify", config, counts, wall, complete)
    return 0 if complete else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symdesign",
        description="classify symmetric designs admitting an order-two automorphism",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--budget-seconds", type=float, default=None)
        p.add_argument("--out", default=".", help="directory for output files (default: .)")

    p = sub.add_parser("rowtypes", help="print orbit-matrix row types per block-orbit length")
    p.add_argument("v", type=int)
    p.add_argument("k", type=int)
    p.add_argument("lam", type=int)
    p.add_argument("f", type=int)
    common(p)
    p.set_defaults(func=cmd_rowtypes)

    p = sub.add_parser("enumerate", help="enumerate orbit matrices for the parameters")
    p.add_argument("v", type=int)
    p.add_argument("k", type=int)
    p.add_argument("lam", type=int)
    p.add_argument("f", type=int)
    p.add_argument("--max-matrices", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("index", help="expand an orbit-matrix file to incidence matrices")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("dedupe", help="reduce an incidence file to isomorphism classes")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_dedupe)

    p = sub.add_parser("code", help="GF(3) code report for each design in a file")
    p.add_argument("input")
    p.add_argument("--dimension-cap", type=int, default=DEFAULT_DIMENSION_CAP)
    common(p)
    p.set_defaults(func=cmd_code)

    p = sub.add_parser("verify", help="full single-design report with self-tests")
    p.add_argument("input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--relabelings", type=int, default=20)
    p.add_argument("--dimension-cap", type=int, default=DEFAULT_DIMENSION_CAP)
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
