"""Command-line front end.

One engine per invocation; results land in --out-dir as delimited files
plus a meta.json, with matplotlib figures rendered alongside unless
--no-figures.  Output files are a pure function of the input edges, the
options, and the seed, so repeated runs are byte-identical -- except
timing.csv, which records wall-clock nanoseconds.  Exit codes: 0 ok,
1 failed verification or oversized exact instance, 2 usage or ingest
errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import figures
from .baselines import baseline_grid
from .graph import DensityValue, compare_density, density, to_bipartite
from .ingest import IngestError, StreamOrder, load_or_parse, order_stream
from .mpc import MpcParams, run_mpc
from .oracle import SizeCapExceeded, exact_densest
from .peel import GuessGrid, peel_grid
from .streaming import run_stream_grid
from .verify import SUITES, run_suite

__all__ = ["main", "build_parser"]

ENGINES = ("stream", "mpc", "baseline-stream", "baseline-mpc", "base-peel", "exact")
MPC_ENGINES = ("mpc", "baseline-mpc")
DENSITY_COLUMNS = ("z_squared", "density", "engine", "epsilon")
ROUNDS_COLUMNS = (
    "guess_D", "guess_z", "phase", "rounds",
    "s_size", "t_size", "f1", "f2", "early_return",
)
TIMING_COLUMNS = ("batch_index", "nanos_per_edge_max", "nanos_per_edge_mean")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dirdense",
        description="Approximate directed densest subgraph under streaming "
        "and round-limited models.",
    )
    p.add_argument("--engine", choices=ENGINES,
                   help="which solver to run (required unless --verify)")
    p.add_argument("--input", help="SNAP edge list (2 or 3 int columns) or .dgel cache")
    p.add_argument("--out-dir", help="directory for csv/json/figure output")
    p.add_argument("--epsilon", type=float, default=None,
                   help="approximation knob; defaults 0.2 (0.6 for mpc engines)")
    p.add_argument("--delta", type=float, default=None,
                   help="memory exponent in (0,1); required by mpc engines only")
    p.add_argument("--order", default="file",
                   help="edge arrival order: file | shuffle:SEED | time")
    p.add_argument("--batch-size", type=int, default=10000,
                   help="stream batch size (default 10000)")
    p.add_argument("--seed", type=int, default=0, help="seed for mpc sampling")
    p.add_argument("--dedupe", action="store_true",
                   help="drop repeated (u,v) edges, keeping the first")
    p.add_argument("--drop-self-loops", action="store_true")
    p.add_argument("--verify", choices=sorted(SUITES), metavar="SUITE",
                   help="run a built-in verification suite and print JSON")
    p.add_argument("--no-figures", action="store_true",
                   help="skip figure rendering")
    return p


def _write_csv(path: Path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        w.writerows(rows)


def _density_rows(engine: str, epsilon: float, entries):
    """entries: (z_squared, density) floats -> full csv rows."""
    return [(repr(float(z)), repr(float(d)), engine, repr(epsilon))
            for z, d in entries]


def _per_z_best(grid, cells):
    """Best recounted density per ratio column from per-cell stats."""
    best: dict[int, DensityValue] = {}
    for c in cells:
        d = DensityValue.from_counts(c.edge_count, c.s_size, c.t_size)
        cur = best.get(c.z_idx)
        if cur is None or compare_density(d, cur) > 0:
            best[c.z_idx] = d
    return [
        (float(grid.ratio_values[zi] ** 2), best[zi].value)
        for zi in sorted(best)
    ]


def _run_engine(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    order = StreamOrder.parse(args.order)
    eps = args.epsilon if args.epsilon is not None else (
        0.6 if args.engine in MPC_ENGINES else 0.2
    )

    loaded = load_or_parse(
        args.input, dedupe=args.dedupe, drop_self_loops=args.drop_self_loops
    )
    el = order_stream(loaded.edges, order)
    if loaded.stats is not None:
        s = loaded.stats
        print(f"parsed {args.input}: n={s.n_vertices} m={s.m_edges} "
              f"loops={s.self_loops_seen} dups={s.duplicates_seen}")
    else:
        print(f"loaded {args.input} (cache): n={el.n_vertices} m={el.m}")
    g = to_bipartite(el)

    meta = {
        "engine": args.engine,
        "input": Path(args.input).name,
        "n_vertices": el.n_vertices,
        "m_edges": el.m,
        "epsilon": eps,
        "delta": args.delta,
        "seed": args.seed,
        "order": args.order,
        "batch_size": args.batch_size,
        "dedupe": args.dedupe,
        "drop_self_loops": args.drop_self_loops,
    }
    density_entries = []
    rounds_rows = None
    timing_rows = None
    answer_pair = None

    if args.engine == "stream":
        res = run_stream_grid(el, eps, batch_size=args.batch_size, timing=True)
        answer_pair = res.pair
        for choice in res.per_z:
            if choice is not None:
                density_entries.append(
                    (float(res.grid.ratio_values[choice.z_idx] ** 2),
                     choice.density.value)
                )
        meta.update(
            selected_density_guess=(
                None if res.selected_density_guess is None
                else float(res.selected_density_guess)
            ),
            state_ints_per_cell=res.state_ints_per_cell,
            cells=res.cells_per_edge,
            slices=res.slices,
            level_cap=res.cap,
            edges_seen=res.edges_seen,
        )
        timing_rows = []
        if res.times_ns is not None and res.edges_seen:
            t = res.times_ns
            for bi, lo in enumerate(range(0, len(t), args.batch_size)):
                chunk = t[lo:lo + args.batch_size]
                timing_rows.append(
                    (bi, repr(float(chunk.max())), repr(float(chunk.mean())))
                )

    elif args.engine == "mpc":
        params = MpcParams(eps, args.delta, args.seed)
        res = run_mpc(g, params, keep_pairs=True)
        answer_pair = res.pair
        best = {}
        for di, zi, _phase, _pair, dens in res.potential_pairs:
            cur = best.get(zi)
            if cur is None or compare_density(dens, cur) > 0:
                best[zi] = dens
        density_entries = [
            (float(res.grid.ratio_values[zi] ** 2), best[zi].value)
            for zi in sorted(best)
        ]
        rounds_rows = [
            (repr(float(res.grid.density_values[r.d_idx])),
             repr(float(res.grid.ratio_values[r.z_idx])),
             r.phase, r.rounds, r.s_size, r.t_size, r.f1, r.f2,
             int(r.early_return))
            for r in res.rows
        ]
        meta.update(
            rounds_total=res.rounds_total,
            t_steps=res.t_steps,
            alpha=res.alpha,
            machine_words=res.machine_words,
        )

    elif args.engine in ("baseline-stream", "baseline-mpc"):
        res = baseline_grid(g, eps)
        answer_pair = res.best_pair
        density_entries = [(float(c.c), c.density.value) for c in res.cells]
        meta.update(passes=res.passes_or_rounds)
        if args.engine == "baseline-mpc":
            meta.update(rounds_total=res.rounds_total)
            rounds_rows = [
                ("0.0", repr(float(c.c)), c.passes, res.rounds_total,
                 c.s_size, c.t_size, 0, 0, 0)
                for c in res.cells
            ]

    elif args.engine == "base-peel":
        grid = GuessGrid.for_n(g.n, eps)
        res = peel_grid(g, eps, grid)
        answer_pair = res.pair
        density_entries = _per_z_best(grid, res.cells)
        meta.update(
            best_cell=list(res.best_cell),
            iterations_max=max((c.iterations for c in res.cells), default=0),
        )

    else:  # exact
        pair, dens = exact_densest(g)
        answer_pair = pair
        ratio = (pair.s_size / pair.t_size) if pair.t_size else 0.0
        density_entries = [(ratio, dens.value)]

    # the reported answer is always recounted against the original edges
    final = density(g, answer_pair)
    meta["answer"] = {
        "s_size": answer_pair.s_size,
        "t_size": answer_pair.t_size,
        "edge_count": final.edge_count,
        "density": final.value,
    }

    _write_csv(out_dir / "density.csv", DENSITY_COLUMNS,
               _density_rows(args.engine, eps, density_entries))
    wrote = ["density.csv"]
    if rounds_rows is not None:
        _write_csv(out_dir / "rounds.csv", ROUNDS_COLUMNS, rounds_rows)
        wrote.append("rounds.csv")
    if timing_rows is not None:
        _write_csv(out_dir / "timing.csv", TIMING_COLUMNS, timing_rows)
        wrote.append("timing.csv")
    with open(out_dir / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    wrote.append("meta.json")

    if not args.no_figures:
        figures.render_density_figure(
            density_entries, out_dir / "density.png",
            title=f"{args.engine}: density by ratio guess",
        )
        wrote.append("density.png")
        if rounds_rows is not None and args.engine == "mpc":
            figures.render_rounds_figure(
                [
                    {"guess_D": r[0], "guess_z": r[1],
                     "phase": r[2], "rounds": r[3]}
                    for r in rounds_rows
                ],
                out_dir / "rounds.png", title="mpc: cumulative rounds per cell",
            )
            wrote.append("rounds.png")
        if timing_rows:
            figures.render_timing_figure(
                [
                    {"batch_index": r[0],
                     "nanos_per_edge_max": float(r[1]),
                     "nanos_per_edge_mean": float(r[2])}
                    for r in timing_rows
                ],
                out_dir / "timing.png", title="stream: per-edge update time",
            )
            wrote.append("timing.png")

    print(f"answer: density={final.value} |S|={answer_pair.s_size} "
          f"|T|={answer_pair.t_size} edges={final.edge_count}")
    print(f"wrote {', '.join(wrote)} to {out_dir}")
    return 0


class _UsageError(Exception):
    pass


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verify:
        report = run_suite(args.verify)
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0 if report["ok"] else 1

    try:
        if not args.engine:
            raise _UsageError("--engine is required (or use --verify)")
        if not args.input or not args.out_dir:
            raise _UsageError("--input and --out-dir are required")
        if args.engine in MPC_ENGINES:
            if args.delta is None:
                raise _UsageError(f"--delta is required for --engine {args.engine}")
            if not (0.0 < args.delta < 1.0):
                raise _UsageError("--delta must lie strictly between 0 and 1")
        elif args.delta is not None:
            raise _UsageError("--delta only applies to the mpc engines")
        if args.epsilon is not None and args.epsilon <= 0:
            raise _UsageError("--epsilon must be positive")
        if args.batch_size <= 0:
            raise _UsageError("--batch-size must be positive")
        return _run_engine(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SizeCapExceeded as exc:
        print(f"error: exact engine: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
