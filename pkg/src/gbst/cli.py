"""Command-line interface: verify, basis, learn, refine, sweep, gen-matrix, sample.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 data error.
All commands are deterministic given their flags and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import coding, estimation, trig
from .dataset import read_gbsr
from .errors import GBSTError
from .graph import GraphFamily, GraphParams, build_ggl
from .spectral import derive_gbt, gbt_dump
from .trig import TrigTransformKind

VERIFY_SIZES = (4, 8, 16, 32)
VERIFY_TOL = 1e-8


def _family(name: str) -> GraphFamily:
    return GraphFamily(name)


def _write(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as f:
            f.write(text)


def cmd_verify(args) -> int:
    kinds = [TrigTransformKind(args.kind)] if args.kind else list(trig.CORRESPONDENCE)
    sizes = [args.n] if args.n else list(VERIFY_SIZES)
    failed = False
    for kind in kinds:
        ratio, family = trig.CORRESPONDENCE[kind]
        family = family or GraphFamily.L1
        params = GraphParams(1.0, ratio, family)
        for n in sizes:
            dev = trig.oracle_check(kind, params, n)
            ok = dev <= VERIFY_TOL
            failed |= not ok
            print(f"{'PASS' if ok else 'FAIL'} {kind.value} N={n} dev={dev:.3e}")
    return 1 if failed else 0


def cmd_basis(args) -> int:
    params = GraphParams(args.w, args.v, _family(args.family))
    t = derive_gbt(build_ggl(params, args.n))
    _write(args.out, gbt_dump(t, build_ggl(params, args.n)))
    if args.plot_data:
        lines = []
        for k in range(t.size):
            lines.append(f"# k={k}")
            lines.extend(f"{n} {t.basis[n, k]:.17g}" for n in range(t.size))
        _write(args.plot_data, "\n".join(lines) + "\n")
    return 0


def cmd_learn(args) -> int:
    dataset = read_gbsr(args.data)
    row_cov, col_cov = estimation.residual_covariances(dataset)
    cov = row_cov if args.direction == "row" else col_cov
    sol = estimation.solve_ml(cov, _family(args.family))
    ref = estimation.refine(sol, dataset.block_size)
    record = {
        "direction": args.direction,
        "family": args.family,
        "n": dataset.block_size,
        "blocks": dataset.block_count,
        "w_star": sol.w_star,
        "v_star": sol.v_star,
        "ratio": sol.ratio,
        "alpha": ref.alpha,
        "objective": sol.objective,
        "converged": sol.converged,
        "iterations": sol.iterations,
        "boundary": sol.boundary,
    }
    if args.json:
        print(json.dumps(record))
    else:
        for key, value in record.items():
            print(f"{key}: {value}")
    return 0


def cmd_refine(args) -> int:
    sol = estimation.MLSolution(
        w_star=args.w, v_star=args.v, objective=0.0, converged=True, iterations=0, boundary=False
    )
    ref = estimation.refine(sol, args.n)
    if args.json:
        print(json.dumps({"ratio": args.v / args.w, "alpha": ref.alpha, "n": args.n}))
    else:
        print(f"alpha: {ref.alpha}")
    return 0


def _parse_alphas(spec: str, parser) -> list[float]:
    try:
        start, step, end = (float(x) for x in spec.split(":"))
    except ValueError:
        parser.error(f"--alphas must be start:step:end, got {spec!r}")
    if step <= 0 or round(step * 4) != step * 4:
        parser.error(f"--alphas step must be a positive multiple of 0.25, got {step}")
    count = int(round((end - start) / step))
    alphas = [start + i * step for i in range(count + 1) if start + i * step <= end + 1e-9]
    if not alphas:
        parser.error(f"--alphas range {spec!r} is empty")
    return alphas


def cmd_sweep(args, parser) -> int:
    alphas = _parse_alphas(args.alphas, parser)
    family = _family(args.family)
    if args.data:
        source = read_gbsr(args.data)
    else:
        if args.model_v is None:
            parser.error("sweep needs --data or --model-v")
        lap = build_ggl(GraphParams(1.0, args.model_v, family), args.n)
        source = coding.GMRFModel(precision=lap, seed=args.seed)
    rows = coding.alpha_sweep(source, args.n, family, alphas)
    _write(args.out, coding.sweep_csv(rows))
    return 0


def cmd_gen_matrix(args, parser) -> int:
    if args.kind:
        t = trig.trig_matrix(TrigTransformKind(args.kind), args.n)
    elif args.w is not None and args.v is not None:
        t = derive_gbt(build_ggl(GraphParams(args.w, args.v, _family(args.family)), args.n))
    else:
        parser.error("gen-matrix needs --kind or both --w and --v")
    m = coding.integerize(t)
    _write(args.out, coding.int_matrix_text(m))
    return 0


def cmd_sample(args) -> int:
    lap = build_ggl(GraphParams(args.w, args.v, _family(args.family)), args.n)
    model = coding.GMRFModel(precision=lap, seed=args.seed)
    x = coding.sample_gmrf(model, args.count)
    from .graph import matrix_text

    _write(args.out, matrix_text(x))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbst")
    parser.add_argument("--threads", type=int, default=1, help="evaluation parallelism (results identical)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check all graph/trig correspondences")
    p.add_argument("--kind", choices=[k.value for k in TrigTransformKind])
    p.add_argument("--n", type=int)

    p = sub.add_parser("basis", help="dump a transform basis")
    p.add_argument("--family", choices=["L1", "L2"], default="L1")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--plot-data", dest="plot_data")

    p = sub.add_parser("learn", help="fit graph parameters to a GBSR dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--family", choices=["L1", "L2"], default="L1")
    p.add_argument("--direction", choices=["row", "col"], default="row")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("refine", help="normalize and round a parameter pair")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="coding metrics across the alpha grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", choices=["L1", "L2"], default="L1")
    p.add_argument("--alphas", required=True, help="start:step:end, step a multiple of 0.25")
    p.add_argument("--model-v", dest="model_v", type=float)
    p.add_argument("--data")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("gen-matrix", help="8-bit integer transform table")
    p.add_argument("--kind", choices=[k.value for k in TrigTransformKind])
    p.add_argument("--family", choices=["L1", "L2"], default="L1")
    p.add_argument("--w", type=float)
    p.add_argument("--v", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("sample", help="draw reproducible GMRF vectors")
    p.add_argument("--family", choices=["L1", "L2"], default="L1")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "basis":
            return cmd_basis(args)
        if args.command == "learn":
            return cmd_learn(args)
        if args.command == "refine":
            return cmd_refine(args)
        if args.command == "sweep":
            return cmd_sweep(args, parser)
        if args.command == "gen-matrix":
            return cmd_gen_matrix(args, parser)
        if args.command == "sample":
            return cmd_sample(args)
    except GBSTError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    raise AssertionError(args.command)


if __name__ == "__main__":
    sys.exit(main())
