"""Command-line front end.

Every command writes machine-readable CSV to stdout (or ``--out``) and
commentary to stderr.  Exit status: 0 success, 1 runtime or domain error,
2 usage error.
"""

import argparse
import csv
import math
import sys

import numpy as np

from . import __version__
from .bounds import Variant, alpha_for_prob, bound_for_alpha, bound_for_prob
from .ident import (
    aic_scan,
    degree_lower_bound,
    empirical_degree_lower_bound,
    nearest_rank_percentile,
    noise_norm_samples,
    simulate_lti,
)
from .noise import NoiseKind, NoiseModel, SeededGenerator
from .signals import (
    NmrParameters,
    add_noise,
    load_signal_csv,
    load_system_matrix_market,
    nmr_signal,
    random_modal_system,
    read_matrix_market,
    save_signal_csv,
    save_system_matrix_market,
    write_signal_csv,
)

DISTS = [k.value for k in NoiseKind]
VARIANTS = [v.value for v in Variant]


class UsageError(Exception):
    pass


def _fmt(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _emit(rows, header, out=None):
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if out:
            fh.close()


def _note(msg):
    print(msg, file=sys.stderr)


def _probability(text):
    p = float(text)
    if not 0 < p < 1:
        raise argparse.ArgumentTypeError(f"probability must lie in (0, 1), got {text}")
    return p


def _positive_float(text):
    x = float(text)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _positive_int(text):
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return x


def _percentile(text):
    x = float(text)
    if not 0 < x < 100:
        raise argparse.ArgumentTypeError(f"percentile must lie in (0, 100), got {text}")
    return x


def _int_list(text):
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text}")
    if not values or min(values) < 3:
        raise argparse.ArgumentTypeError("every n must be an integer >= 3")
    return values


def _add_dist(p, eps_required=False):
    p.add_argument("--dist", choices=DISTS, default="complex-iid",
                   help="noise distribution (default complex-iid)")
    p.add_argument("--sigma", metavar="MTX",
                   help="Matrix Market covariance file, required for *-cov")


def _model(args, eps=1.0):
    kind = NoiseKind(args.dist)
    if kind.has_covariance and not args.sigma:
        raise UsageError(f"--dist {args.dist} requires --sigma")
    if not kind.has_covariance and args.sigma:
        raise UsageError(f"--sigma only applies to covariance distributions")
    sigma = None
    if args.sigma:
        sigma = read_matrix_market(args.sigma)
        if kind is NoiseKind.REAL_COV:
            if np.any(sigma.imag != 0):
                raise ValueError(f"{args.sigma}: real-cov needs a real covariance")
            sigma = sigma.real
    return NoiseModel(kind, sigma, eps)


# ---------------------------------------------------------------------------


def cmd_bound(args):
    model = _model(args)
    if model.dim is not None and model.dim != args.n:
        raise ValueError(f"covariance is {model.dim}x{model.dim} but --n is {args.n}")
    variant = Variant(args.variant)
    if args.alpha is not None:
        b = bound_for_alpha(args.alpha, model, args.n, variant, args.eps)
    else:
        b = bound_for_prob(args.prob, model, args.n, variant, args.eps)
    header = ["n", "dist", "variant", "alpha", "probability", "alpha_sqrt_n"]
    row = [b.n, model.kind.value, variant.value, b.alpha, b.probability, b.norm_threshold]
    if args.eps is not None:
        header.append("hankel_threshold")
        row.append(b.hankel_threshold)
    _emit([row], header)


def cmd_estimate(args):
    y = load_signal_csv(args.input)
    model = _model(args)
    if args.empirical:
        est = empirical_degree_lower_bound(
            y, args.eps, model, gamma=args.gamma, trials=args.trials, m=args.m,
            root_seed=args.seed, seed=args.seed,
        )
    else:
        est = degree_lower_bound(y, args.eps, model, p_hat=args.prob, m=args.m,
                                 variant=Variant(args.variant), seed=args.seed)
    _note(f"{est.method.value}: {est.lower_bound} singular values >= {est.threshold:.6g}")
    _emit(
        [[est.lower_bound, est.threshold, est.method.value, est.certified,
          est.probability, est.n, est.m]],
        ["lower_bound", "threshold", "method", "certified", "probability", "n", "m"],
    )
    if args.svals_out:
        _emit(((k + 1, float(s)) for k, s in enumerate(est.spectrum.values)),
              ["k", "sigma"], args.svals_out)


def cmd_calibrate(args):
    model = _model(args)
    p = args.prob
    rows = []
    for n in args.n_list:
        if model.dim is not None and model.dim != n:
            raise ValueError(f"covariance is {model.dim}x{model.dim} but n={n} was requested")
        m = n // 2
        a_paper = alpha_for_prob(p, model, n, Variant.PAPER)
        if model.kind.has_covariance:
            a_exact = float("nan")
        else:
            a_exact = alpha_for_prob(p, model, n, Variant.EXACT_IID)
        t_paper = a_paper * math.sqrt(n)
        t_exact = a_exact * math.sqrt(n)
        norms = noise_norm_samples(model, n, m, args.trials, root_seed=args.seed + n)
        pct = nearest_rank_percentile(norms, 100 * p)
        coverage = float(np.mean(norms <= t_paper))
        _note(f"n={n}: paper threshold {t_paper:.4g}, empirical {pct:.4g}, "
              f"coverage {coverage:.4f}")
        rows.append([n, a_paper, a_exact, t_paper, t_exact, pct, coverage])
    _emit(rows, ["n", "alpha_paper", "alpha_exact", "thresh_paper", "thresh_exact",
                 "empirical_pctile", "coverage"], args.out)


def cmd_synth(args):
    if args.kind == "nmr":
        y = nmr_signal(NmrParameters(n=args.n or 256))
    elif args.kind == "modal":
        if args.q is None:
            raise UsageError("--kind modal requires --q")
        r = random_modal_system(args.q, args.radius, args.seed)
        if args.system_prefix:
            pre = args.system_prefix
            save_system_matrix_market(r, f"{pre}A.mtx", f"{pre}c.mtx", f"{pre}x0.mtx")
        y = simulate_lti(r, args.n or 200)
    else:
        if not (args.A and args.c and args.x0):
            raise UsageError("--kind system requires --A, --c and --x0")
        r = load_system_matrix_market(args.A, args.c, args.x0)
        y = simulate_lti(r, args.n or 256)
    if args.eps is not None:
        model = _model(args)
        y = add_noise(y, args.eps, model, SeededGenerator(args.seed))
    if args.out:
        save_signal_csv(args.out, y)
        _note(f"wrote {y.size} samples to {args.out}")
    else:
        write_signal_csv(sys.stdout, y)


def cmd_aic(args):
    y = load_signal_csv(args.input)
    model = _model(args, eps=args.eps)
    scan = aic_scan(y, model, args.qmax, args.m)
    nan = float("nan")
    rows = [[q, scan.scores.get(q, nan), scan.residuals.get(q, nan)]
            for q in range(1, args.qmax + 1)]
    for q, why in sorted(scan.failures.items()):
        _note(f"q={q}: fit failed ({why})")
    _emit(rows, ["q", "aic", "residual"], args.out)
    if args.out:
        _emit([[scan.argmin_q]], ["argmin_q"])
    else:
        _note(f"argmin_q={scan.argmin_q}")


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mcmillan",
        description="Random Hankel norm bounds and McMillan degree lower bounds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="probability/threshold for ||G||_2 <= alpha sqrt(n)")
    p.add_argument("--n", type=_positive_int, required=True)
    _add_dist(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=_positive_float)
    g.add_argument("--prob", type=_probability)
    p.add_argument("--variant", choices=VARIANTS, default="paper")
    p.add_argument("--eps", type=_positive_float, help="noise scale for alpha*eps*sqrt(n)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("estimate", help="McMillan degree lower bound from a signal CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=_positive_float, required=True)
    _add_dist(p)
    p.add_argument("--prob", type=_probability, default=0.99)
    p.add_argument("--variant", choices=VARIANTS, default="paper")
    p.add_argument("--empirical", action="store_true",
                   help="threshold at a Monte Carlo percentile instead of the bound")
    p.add_argument("--gamma", type=_percentile, default=99.0)
    p.add_argument("--trials", type=_positive_int, default=400)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--svals-out", metavar="CSV")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("calibrate", help="bound versus Monte Carlo ||G||_2 over n")
    _add_dist(p)
    p.add_argument("--n-list", type=_int_list, default=[64, 128, 256])
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--prob", type=_probability, default=0.99)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("synth", help="write a test signal CSV")
    p.add_argument("--kind", choices=["nmr", "modal", "system"], default="nmr")
    p.add_argument("--q", type=_positive_int)
    p.add_argument("--n", type=_positive_int)
    p.add_argument("--radius", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=_positive_float, help="add noise at this scale")
    _add_dist(p)
    p.add_argument("--A", metavar="MTX")
    p.add_argument("--c", metavar="MTX")
    p.add_argument("--x0", metavar="MTX")
    p.add_argument("--system-prefix", metavar="PREFIX",
                   help="also write the modal system as PREFIX{A,c,x0}.mtx")
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("aic", help="AIC scan over model orders 1..qmax")
    p.add_argument("--input", required=True)
    p.add_argument("--eps", type=_positive_float, required=True)
    _add_dist(p)
    p.add_argument("--qmax", type=_positive_int, required=True)
    p.add_argument("--m", type=_positive_int)
    p.add_argument("--out", metavar="CSV")
    p.set_defaults(func=cmd_aic)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, MemoryError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
