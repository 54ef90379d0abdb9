"""Command-line driver.

Exit codes: 0 success, 1 verdict false or a failed criterion, 2 bad input or
an unmet precondition.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import acceptance, certificates, serialization
from .errors import FreeInterpError
from .orlicz import build_orlicz_example
from .potential import AtomicMeasure, Measure, StepWeight, maximal_function, weak_l1_stats
from .sequences import (
    attach_partner_points,
    classify,
    gen_disjoint_tangent,
    gen_radial,
    gen_random_separated,
    gen_stolz,
    separation_constant,
)
from .serialization import ParseError

log = logging.getLogger("freeinterp")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
KINDS = ("radial", "stolz", "disjoint-tangent", "partnered", "orlicz-example", "random-separated")
CONSTRUCTIONS = ("propsep", "maximal", "cs", "staircase", "dirac", "custom-measure")


class UsageError(Exception):
    pass


def _emit(text: str, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _check_config(args):
    if getattr(args, "aperture", 2.0) <= 1:
        raise UsageError("--aperture must exceed 1")
    if getattr(args, "grid_size", 4096) < 16:
        raise UsageError("--grid-size must be at least 16")
    if getattr(args, "tolerance", 1e-9) <= 0:
        raise UsageError("--tolerance must be positive")


def _eps_values(name: str, n: int) -> np.ndarray:
    k = np.arange(1, n + 1, dtype=float)
    if name == "harmonic":
        return 1.0 / k
    if name == "square":
        return 1.0 / k ** 2
    if name.startswith("const:"):
        return np.full(n, float(name.split(":", 1)[1]))
    raise UsageError(f"unknown --eps profile {name!r} (harmonic, square, const:<value>)")


def _partnered(args):
    base = gen_disjoint_tangent(args.n)
    eps = _eps_values(args.eps, args.n)
    if args.eps_scale != "auto":
        scale = float(args.eps_scale)
        seq = attach_partner_points(base, scale * eps)
    else:
        # shrink by decades until every partner is representable in double precision
        for k in range(40):
            scale = 10.0 ** -k
            try:
                seq = attach_partner_points(base, scale * eps)
                break
            except FreeInterpError:
                continue
        else:
            raise UsageError("no eps scale down to 1e-39 gives representable partners")
    seq.generator_params.update({"kind": "partnered", "eps_profile": args.eps, "eps_scale": scale})
    seq.label = f"partnered {args.eps} n={args.n}"
    return seq


def cmd_generate(args):
    n = args.n
    if args.kind == "radial":
        seq = gen_radial(args.q, n, args.theta)
    elif args.kind == "stolz":
        seq = gen_stolz(args.q, n, args.theta)
    elif args.kind == "disjoint-tangent":
        seq = gen_disjoint_tangent(n)
    elif args.kind == "partnered":
        seq = _partnered(args)
    elif args.kind == "orlicz-example":
        seq = build_orlicz_example(args.p, N=n).seq
        seq.generator_params.update({"kind": "orlicz-example", "p": args.p, "n": n})
    else:
        seq = gen_random_separated(n, args.delta, args.seed)
    _emit(serialization.dump_sequence(seq), args.out)
    return EXIT_OK


def cmd_classify(args):
    seq = serialization.load_sequence(args.input)
    if len(seq) == 0:
        raise UsageError("sequence is empty")
    _emit(serialization.dumps(classify(seq).to_dict()), args.out)
    return EXIT_OK


def _custom_measure(args):
    if args.measure:
        try:
            return Measure.from_dict(json.loads(Path(args.measure).read_text()))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"{args.measure}: {exc!r}") from exc
    steps = StepWeight.constant(args.constant) if args.constant else StepWeight()
    atoms = AtomicMeasure([args.dirac_angle], [args.dirac_mass]) if args.dirac_mass else AtomicMeasure()
    return Measure(steps, atoms)


def cmd_certify(args):
    seq = serialization.load_sequence(args.input)
    c, tol = args.construction, args.tolerance
    if c == "propsep":
        thr = min(0.5, separation_constant(seq)) if args.threshold == "auto" else float(args.threshold)
        cert = certificates.certify_propsep(seq, thr, tol)
    elif c == "maximal":
        cert = certificates.certify_maximal(seq, args.grid_size, args.aperture, args.min_cells, tol)
    elif c == "cs":
        cert = certificates.certify_cs(seq, args.grid_size, args.aperture, tol)
    elif c == "staircase":
        cert = certificates.certify_staircase_radial(seq, tol)
    elif c == "dirac":
        cert = certificates.certify_dirac(seq, tol=tol)
    else:
        cert = certificates.verify_majorant(seq, _custom_measure(args), tol)
    _emit(serialization.dumps(cert.to_dict()), args.out)
    log.info("%s: verdict %s, min margin %.3g", c, cert.verdict, cert.min_margin)
    return EXIT_OK if cert.verdict else EXIT_FAIL


def cmd_maximal(args):
    seq = serialization.load_sequence(args.input)
    prof = maximal_function(seq, args.grid_size, args.aperture)
    _emit(serialization.profile_csv(prof), args.out)
    stats = weak_l1_stats(prof)
    stats.update({"grid_size": args.grid_size, "aperture": args.aperture})
    if args.stats:
        Path(args.stats).write_text(serialization.dumps(stats))
    elif args.out:
        sys.stdout.write(serialization.dumps(stats))
    return EXIT_OK


def cmd_orlicz(args):
    ex = build_orlicz_example(args.p, N=args.n, tol=args.tolerance)
    _emit(serialization.dumps(ex.to_dict()), args.out)
    return EXIT_OK if ex.certificate.verdict else EXIT_FAIL


def cmd_report(args):
    results = acceptance.run_all(quick=args.quick, seed=args.seed)
    for r in results:
        print(r.line())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "summary.md").write_text(acceptance.summary_markdown(results))
        (out / "results.json").write_text(serialization.dumps([r.to_dict() for r in results]))
        rows = ["criterion,name,passed,runtime,limit"]
        rows += [f"{r.number},{r.name},{int(r.ok)},{r.runtime!r},{'' if r.limit is None else r.limit}"
                 for r in results]
        (out / "criteria.csv").write_text("\n".join(rows) + "\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--grid-size", type=int, default=4096)
    common.add_argument("--aperture", type=float, default=2.0, help="Stolz aperture alpha > 1")
    common.add_argument("--tolerance", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="freeinterp", description="Harmonic-majorant certificates for sequences in the disk.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="write a sequence JSON file")
    g.add_argument("kind", choices=KINDS)
    g.add_argument("--n", "--truncation", dest="n", type=int, default=20)
    g.add_argument("--q", type=float, default=0.5)
    g.add_argument("--theta", type=float, default=0.0)
    g.add_argument("--delta", type=float, default=0.5)
    g.add_argument("--p", type=float, default=2.0)
    g.add_argument("--eps", default="harmonic", help="harmonic, square or const:<value>")
    g.add_argument("--eps-scale", default="auto", help="multiplier for eps, or 'auto'")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", parents=[common], help="CN/CNN/CS statistics of a sequence")
    c.add_argument("input")
    c.set_defaults(func=cmd_classify)

    ce = sub.add_parser("certify", parents=[common], help="build and check a majorant certificate")
    ce.add_argument("input")
    ce.add_argument("--construction", choices=CONSTRUCTIONS, required=True)
    ce.add_argument("--threshold", default="auto",
                    help="near-factor threshold; 'auto' uses min(1/2, separation constant)")
    ce.add_argument("--min-cells", type=int, default=0)
    ce.add_argument("--measure", help="measure JSON for custom-measure")
    ce.add_argument("--dirac-mass", type=float, default=0.0)
    ce.add_argument("--dirac-angle", type=float, default=0.0)
    ce.add_argument("--constant", type=float, default=0.0, help="constant density for custom-measure")
    ce.set_defaults(func=cmd_certify)

    m = sub.add_parser("maximal", parents=[common], help="maximal-function profile CSV and weak-L1 stats")
    m.add_argument("input")
    m.add_argument("--stats", help="stats JSON path")
    m.set_defaults(func=cmd_maximal)

    o = sub.add_parser("orlicz", parents=[common], help="non-Carleson Orlicz example report")
    o.add_argument("--n", "--truncation", dest="n", type=int, default=15)
    o.add_argument("--p", type=float, default=2.0)
    o.set_defaults(func=cmd_orlicz)

    r = sub.add_parser("report", parents=[common], help="run the acceptance suite")
    r.add_argument("--quick", action="store_true", help="halve sizes and grids")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        _check_config(args)
        return args.func(args)
    except (UsageError, ParseError, FreeInterpError, FileNotFoundError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
