"""Command-line front end: corpus generation, training, solving, sweeps.

Reports are line-delimited JSON, one record per puzzle plus one aggregate
record, written in puzzle-index order so identical flags and seed produce
byte-identical files at any thread count.  Timing goes to stderr only.

Exit codes: 0 success, 2 usage, 3 data/format, 4 selftest failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import assign, grid, puzzlegen, scorer, search
from .grid import GridShape
from .puzzlegen import FormatError, GenOptions, PuzzleInstance
from .scorer import LinearScorer, OracleScorer, TrainOptions
from .search import SolverOptions

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SELFTEST = 4


class UsageError(Exception):
    """Bad flag values detected after argparse (e.g. empty sweep lists)."""


def _default_threads() -> int:
    env = os.environ.get("JIGSOLVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _synth_kind(flag: str) -> str:
    kind = flag[len("synth-"):] if flag.startswith("synth-") else flag
    if kind not in puzzlegen.SYNTH_KINDS:
        raise FormatError(f"unknown synthetic kind {flag!r}")
    return kind


def _gen_options(args) -> GenOptions:
    return GenOptions(
        cell=args.cell,
        crop=args.crop,
        jitter=not args.no_jitter,
        mirror_p=args.mirror_p,
        mean_subtract=not args.no_mean_subtract,
        mean_scope=args.mean_scope,
        scramble=not args.no_scramble,
    )


def cmd_gen(args) -> int:
    shape = GridShape.parse(args.grid)
    kind = _synth_kind(args.volume_kind if shape.is_3d and args.volume_kind else args.kind)
    instances = puzzlegen.generate_corpus(kind, shape, args.count, args.seed, _gen_options(args))
    puzzlegen.save_corpus(args.out, instances)
    print(f"wrote {len(instances)} instances to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_train(args) -> int:
    corpus = puzzlegen.load_corpus(args.corpus)
    shape = corpus[0].shape
    if args.grid and GridShape.parse(args.grid) != shape:
        raise FormatError(f"corpus grid {shape} does not match --grid {args.grid}")
    opts = TrainOptions(
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        train_rounds=args.train_rounds,
        seed=args.seed,
        weight_init_scale=args.init_scale,
    )
    solver_opts = SolverOptions(radius=args.radius, use_binary=not args.no_binary)
    result = scorer.train_sgd(corpus, opts, solver_opts)
    scorer.save_model(result.model, args.out)
    log_lines = [
        f"epoch={e} mean_loss={loss:.6f} train_rounds={opts.train_rounds}"
        for e, loss in enumerate(result.epoch_losses, start=1)
    ]
    if args.log:
        Path(args.log).write_text("\n".join(log_lines) + "\n")
    for line in log_lines:
        print(line, file=sys.stderr)
    print(f"wrote model to {args.out}", file=sys.stderr)
    return EXIT_OK


def _make_provider(args, index: int, rng: np.random.Generator, model):
    if model is not None:
        return model
    return OracleScorer(
        noise=args.oracle,
        rng=rng,
        binary_noise=args.oracle_binary,
        jitter=args.oracle_jitter,
    )


def _solve_one(args, index, instance, shape, opts, model, seed):
    rng = np.random.default_rng([seed, index])
    if instance is None:
        instance = PuzzleInstance.scrambled(shape, rng)
    provider = _make_provider(args, index, rng, model)
    trace = search.solve_iterative(provider, instance, opts)
    final_ham = grid.hamming(trace.final_truth, np.arange(shape.n))
    per_round = []
    for r in range(1, opts.max_rounds + 1):
        if r <= trace.rounds_used:
            per_round.append(trace.rounds[r - 1].hamming_to_truth == 0)
        else:
            per_round.append(bool(trace.solved))
    return {
        "type": "puzzle",
        "index": index,
        "rounds_used": trace.rounds_used,
        "converged": trace.converged,
        "solved": bool(trace.solved),
        "final_hamming": final_ham,
        "binary_degraded": trace.binary_degraded,
    }, per_round


def _run_batch(args, shape, instances, count, opts, model, seed, threads):
    def work(i):
        return _solve_one(args, i, instances[i] if instances else None, shape, opts, model, seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, range(count)))
    else:
        results = [work(i) for i in range(count)]
    records = [r for r, _ in results]
    curves = np.array([c for _, c in results], dtype=bool)
    return records, curves


def _aggregate(records, curves, shape, seed, scorer_desc, opts, count) -> dict:
    hams = np.array([r["final_hamming"] for r in records])
    space = math.factorial(shape.n)
    agg = {
        "type": "aggregate",
        "grid": str(shape),
        "seed": seed,
        "scorer": scorer_desc,
        "radius": opts.radius,
        "max_rounds": opts.max_rounds,
        "use_binary": opts.use_binary,
        "n_puzzles": count,
        "exact_rate": float(np.mean(hams == 0)),
        "d_le_2_rate": float(np.mean(hams <= 2)),
        "mean_rounds": float(np.mean([r["rounds_used"] for r in records])),
        "config_space_size": space,
        "config_space_size_approx": float(space),
        "per_round_solved": [float(f) for f in curves.mean(axis=0)],
    }
    return agg


def _write_report(path, records) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _solver_options(args) -> SolverOptions:
    return SolverOptions(
        radius=args.radius,
        max_rounds=args.max_rounds,
        use_binary=not args.no_binary,
        candidate_cap=args.candidate_cap,
    )


def _load_solve_inputs(args):
    model = None
    if args.model:
        model = scorer.load_model(args.model)
    elif args.oracle is None:
        raise FormatError("need either --model or --oracle")
    if args.corpus:
        instances = puzzlegen.load_corpus(args.corpus)
        shape = instances[0].shape
        count = len(instances) if args.count is None else min(args.count, len(instances))
    else:
        if model is not None:
            raise FormatError("--model requires --corpus (pixel data)")
        if not args.grid:
            raise FormatError("need --corpus or --grid")
        instances = None
        shape = GridShape.parse(args.grid)
        count = args.count if args.count is not None else 100
    if model is not None and model.shape != shape:
        raise FormatError(f"model grid {model.shape} does not match corpus grid {shape}")
    return model, instances, shape, count


def cmd_solve(args) -> int:
    model, instances, shape, count = _load_solve_inputs(args)
    opts = _solver_options(args)
    desc = f"model:{args.model}" if model is not None else (
        f"oracle:eps={args.oracle}"
        + (f",binary_eps={args.oracle_binary}" if args.oracle_binary is not None else "")
    )
    t0 = time.perf_counter()
    records, curves = _run_batch(args, shape, instances, count, opts, model, args.seed, args.threads)
    wall = time.perf_counter() - t0
    agg = _aggregate(records, curves, shape, args.seed, desc, opts, count)
    _write_report(args.report, records + [agg])
    print(
        f"{count} puzzles in {wall:.2f}s: exact_rate={agg['exact_rate']:.4f} "
        f"d_le_2_rate={agg['d_le_2_rate']:.4f} mean_rounds={agg['mean_rounds']:.2f}",
        file=sys.stderr,
    )
    return EXIT_OK


def _parse_list(text, conv):
    items = [p for p in text.split(",") if p]
    if not items:
        raise UsageError(f"empty sweep list {text!r}")
    try:
        return [conv(p) for p in items]
    except ValueError:
        raise UsageError(f"bad sweep list {text!r}")


def cmd_bench(args) -> int:
    shape = GridShape.parse(args.grid)
    radii = _parse_list(args.radii, int)
    rounds_list = _parse_list(args.rounds, int)
    noises = _parse_list(args.noise, float)
    binary_opts = {"both": [True, False], "on": [True], "off": [False]}[args.binary]
    all_records = []
    summary = []
    for eps in noises:
        for radius in radii:
            for max_rounds in rounds_list:
                for use_binary in binary_opts:
                    opts = SolverOptions(radius=radius, max_rounds=max_rounds, use_binary=use_binary)
                    args.oracle = eps
                    t0 = time.perf_counter()
                    records, curves = _run_batch(
                        args, shape, None, args.count, opts, None, args.seed, args.threads
                    )
                    wall = time.perf_counter() - t0
                    desc = f"oracle:eps={eps}" + (
                        f",binary_eps={args.oracle_binary}" if args.oracle_binary is not None else ""
                    )
                    agg = _aggregate(records, curves, shape, args.seed, desc, opts, args.count)
                    all_records.append(agg)
                    summary.append((eps, radius, max_rounds, use_binary, agg, wall))
    _write_report(args.report, all_records)
    print("noise  radius  rounds  binary  exact    d<=2     mean_rounds", file=sys.stderr)
    for eps, radius, max_rounds, use_binary, agg, wall in summary:
        print(
            f"{eps:<6g} {radius:<7d} {max_rounds:<7d} {str(use_binary):<7s} "
            f"{agg['exact_rate']:<8.4f} {agg['d_le_2_rate']:<8.4f} "
            f"{agg['mean_rounds']:<6.2f} ({wall:.2f}s)",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = []
    rng = np.random.default_rng(20240817)

    def check(name, fn):
        try:
            fn()
            checks.append((name, True, ""))
        except AssertionError as exc:
            checks.append((name, False, str(exc)))

    def assignment_optimality():
        for _ in range(300):
            n = int(rng.integers(2, 6))
            m = rng.random((n, n))
            res = assign.min_cost_assignment(m)
            perms = grid.all_permutations(n).astype(np.intp)
            costs = m[np.arange(n), perms].sum(axis=1)
            best = costs.min()
            assert res.cost <= best + 1e-12, f"suboptimal: {res.cost} > {best}"
            lex = perms[int(np.argmin(costs))]
            assert (res.config == lex).all(), f"tie rule violated: {res.config} vs {lex}"

    def ball_cardinalities():
        for n in range(2, 7):
            center = grid.random_permutation(n, rng)
            perms = grid.all_permutations(n)
            for radius in range(n + 1):
                got = sum(1 for _ in grid.enumerate_hamming_ball(center, radius))
                want = grid.hamming_ball_size(n, radius)
                dists = (perms != center[None, :]).sum(axis=1)
                brute = int(np.count_nonzero(dists <= radius))
                assert got == want == brute, f"n={n} r={radius}: {got} vs {want} vs {brute}"

    def gradient_check():
        shape = GridShape((2, 2))
        F = rng.standard_normal((4, 7))
        model = LinearScorer.init_random(shape, 7, rng, scale=0.1)
        truth = grid.random_permutation(4, rng)
        _, grads = scorer.loss_and_grad(model, F, truth, shape)
        h = 1e-5
        for arr, g in ((model.unary_w, grads.unary_w), (model.binary_w, grads.binary_w)):
            idx = tuple(int(rng.integers(0, s)) for s in arr.shape)
            orig = arr[idx]
            arr[idx] = orig + h
            lp, _ = scorer.loss_and_grad(model, F, truth, shape)
            arr[idx] = orig - h
            lm, _ = scorer.loss_and_grad(model, F, truth, shape)
            arr[idx] = orig
            fd = (lp - lm) / (2 * h)
            rel = abs(fd - g[idx]) / max(1e-8, abs(fd), abs(g[idx]))
            assert rel < 1e-4, f"gradient mismatch: analytic {g[idx]} vs fd {fd}"

    def perfect_oracle():
        for spec in ("2x2", "3x3", "2x2x2"):
            shape = GridShape.parse(spec)
            inst = PuzzleInstance.scrambled(shape, rng)
            trace = search.solve_iterative(OracleScorer(0.0), inst, SolverOptions())
            assert trace.solved and trace.converged, f"eps=0 failed on {spec}"

    check("assignment optimality vs brute force (n<=5, tol 1e-12)", assignment_optimality)
    check("hamming ball cardinalities vs formula and S_n filter (exact)", ball_cardinalities)
    check("analytic gradients vs central differences (rel err < 1e-4)", gradient_check)
    check("perfect oracle solves scrambles (exact)", perfect_oracle)

    failed = [c for c in checks if not c[1]]
    for name, ok, msg in checks:
        print(("ok:   " if ok else "FAIL: ") + name + (f" -- {msg}" if msg else ""))
    return EXIT_SELFTEST if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jigsolve", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="base RNG seed (default 0)")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker threads (default $JIGSOLVE_THREADS or 1)")

    g = sub.add_parser("gen", help="generate a puzzle corpus")
    add_common(g)
    g.add_argument("--kind", default="synth-mixed",
                   help="synthetic source kind: synth-gradient|synth-blobs|synth-mixed")
    g.add_argument("--volume-kind", default=None, help="3D synthetic source kind")
    g.add_argument("--grid", required=True, help="WxH or WxHxZ")
    g.add_argument("--count", type=int, default=100, help="number of instances")
    g.add_argument("--out", required=True, help="corpus directory")
    g.add_argument("--cell", type=int, default=85, help="cell size in pixels")
    g.add_argument("--crop", type=int, default=64, help="patch crop size")
    g.add_argument("--no-jitter", action="store_true", help="center crops instead of jittering")
    g.add_argument("--mirror-p", type=float, default=0.5, help="per-patch flip probability")
    g.add_argument("--no-mean-subtract", action="store_true", help="keep raw intensities")
    g.add_argument("--mean-scope", default="patch", choices=("patch", "image"))
    g.add_argument("--no-scramble", action="store_true", help="emit solved instances")
    g.set_defaults(func=cmd_gen)

    t = sub.add_parser("train", help="train the linear scorer on a corpus")
    add_common(t)
    t.add_argument("--corpus", required=True)
    t.add_argument("--out", required=True, help="model file (JSW1)")
    t.add_argument("--log", default=None, help="epoch-loss log path")
    t.add_argument("--grid", default=None, help="expected corpus grid (checked)")
    t.add_argument("--lr", type=float, default=0.3)
    t.add_argument("--batch-size", type=int, default=32)
    t.add_argument("--epochs", type=int, default=10)
    t.add_argument("--train-rounds", type=int, default=5)
    t.add_argument("--init-scale", type=float, default=0.01)
    t.add_argument("--radius", type=int, default=3)
    t.add_argument("--no-binary", action="store_true")
    t.set_defaults(func=cmd_train)

    def add_solver_flags(p):
        p.add_argument("--radius", type=int, default=3, help="Hamming-ball radius")
        p.add_argument("--max-rounds", type=int, default=20)
        p.add_argument("--no-binary", action="store_true")
        p.add_argument("--candidate-cap", type=int, default=None)
        p.add_argument("--oracle-binary", type=float, default=None,
                       help="separate binary-table noise level")
        p.add_argument("--oracle-jitter", type=float, default=scorer.DEFAULT_ORACLE_JITTER)

    s = sub.add_parser("solve", help="solve a corpus (or fresh scrambles) and report")
    add_common(s)
    s.add_argument("--corpus", default=None)
    s.add_argument("--grid", default=None, help="grid for corpus-free oracle runs")
    s.add_argument("--count", type=int, default=None)
    s.add_argument("--model", default=None, help="JSW1 model file")
    s.add_argument("--oracle", type=float, default=None, help="oracle noise level")
    add_solver_flags(s)
    s.add_argument("--report", required=True, help="JSON-lines output path")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="sweep radius x rounds x binary x noise")
    add_common(b)
    b.add_argument("--grid", required=True)
    b.add_argument("--count", type=int, default=200)
    b.add_argument("--noise", default="0.2,0.5", help="comma list of oracle noise levels")
    b.add_argument("--radii", default="3", help="comma list of ball radii")
    b.add_argument("--rounds", default="1,5,10,20", help="comma list of round caps")
    b.add_argument("--binary", default="both", choices=("both", "on", "off"))
    b.add_argument("--oracle-binary", type=float, default=None)
    b.add_argument("--oracle-jitter", type=float, default=scorer.DEFAULT_ORACLE_JITTER)
    b.add_argument("--candidate-cap", type=int, default=None)
    b.add_argument("--report", required=True)
    b.set_defaults(func=cmd_bench)

    st = sub.add_parser("selftest", help="run the built-in oracle suites")
    add_common(st)
    st.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, FileNotFoundError, NotADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
