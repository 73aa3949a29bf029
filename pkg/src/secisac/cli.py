"""Command-line front end.

Examples::

    secisac check --example lemma1 --which degraded
    secisac region --example lemma1 --bound theorem3 --res 1001 --output joint.csv
    secisac figure2 --q 0.65 --alpha 0.21 --output fig2
    secisac simulate --example becbsc --p 0.4 --n 1000000 --seed 7
    secisac export --example becbsc --output becbsc.json

Exit status is 0 on success, 1 on invalid input or a rejected computation
and 2 on command-line usage errors.
"""

from __future__ import annotations

import argparse
import io
import sys
import warnings
from typing import Optional, Sequence

import numpy as np

from . import canonical, channel_model as cm, regions, simulate, specfile
from .estimation import expected_distortion, optimal_estimator
from .prob_core import mutual_information
from .regions import RegionPoint, SweepSpec, SweepTooLarge

CSV_HEADER = "p_or_params,R1,R2_or_R,D1,D2,provenance"
EXAMPLES = ("lemma1", "becbsc")
EXAMPLE_DEFAULTS = {
    "lemma1": {"q": 0.65, "alpha": 0.21},
    "becbsc": {"q": 0.65, "alpha": 0.5, "gamma": 0.3, "beta": 0.1},
}
CLOSED_FORM_BOUNDS = {"lemma1": "lemma1", "lemma3": "becbsc"}


class CliError(Exception):
    """Reported as ``error: ...`` with exit status 1."""


def fmt(value: Optional[float]) -> str:
    return "" if value is None else "%.12g" % value


# ---------------------------------------------------------------------------
# channel sources


def _example_params(args) -> dict:
    params = dict(EXAMPLE_DEFAULTS[args.example])
    for key in params:
        given = getattr(args, key, None)
        if given is not None:
            params[key] = given
    return params


def load_source(args):
    """Return ``(channel, metrics, description)`` from --example or --spec."""
    if (args.example is None) == (args.spec is None):
        raise CliError("give exactly one of --example or --spec")
    if args.spec is not None:
        try:
            spec = specfile.load(args.spec)
        except OSError as exc:
            raise CliError(f"cannot read {args.spec}: {exc.strerror}") from None
        except specfile.SpecError as exc:
            raise CliError(f"{args.spec}: {exc}") from None
        return spec.channel, spec.metrics, args.spec
    params = _example_params(args)
    try:
        if args.example == "lemma1":
            ch = canonical.bernoulli_noiseless_channel(params["q"], params["alpha"])
        else:
            ch = canonical.bec_bsc_channel(params["q"], params["alpha"], params["gamma"],
                                           params["beta"])
    except ValueError as exc:
        raise CliError(str(exc)) from None
    return ch, canonical.hamming_metrics(ch), args.example


# ---------------------------------------------------------------------------
# CSV output


def _flat_params(params) -> list:
    """(key, values) pairs of a point's parameters in a fixed order."""
    out = []
    for key in ("lambda", "px", "pv_given_x", "pu_given_v", "r1"):
        if key in params:
            out.append((key, np.ravel(np.asarray(params[key], dtype=float)).tolist()))
    return out


def first_column(point: RegionPoint) -> tuple:
    """Sort key and label for the ``p_or_params`` column.

    A binary input alone is reported as p = P(X = 1); anything richer is
    written as ``key=v1/v2/...`` pairs joined by ``;``.
    """
    pairs = _flat_params(point.parameters)
    if len(pairs) == 1 and pairs[0][0] == "px" and len(pairs[0][1]) == 2:
        p = pairs[0][1][1]
        return (p,), fmt(p)
    if len(pairs) == 1 and pairs[0][0] == "lambda":
        lam = pairs[0][1][0]
        return (lam,), fmt(lam)
    if pairs and pairs[0][0] == "px" and len(pairs[0][1]) == 2:
        # show p rather than the (1-p, p) pair
        pairs[0] = ("p", pairs[0][1][1:])
    key = tuple(v for _, vals in pairs for v in vals)
    label = ";".join(f"{k}=" + "/".join(fmt(v) for v in vals) for k, vals in pairs)
    return key, label


def region_csv(points: Sequence[RegionPoint], sort: bool = True) -> str:
    rows = [(first_column(p), p) for p in points]
    if sort:
        rows.sort(key=lambda item: item[0][0])
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for (_, label), p in rows:
        buf.write(",".join([label, fmt(p.r1), fmt(p.r), fmt(p.d1), fmt(p.d2), p.provenance]) + "\n")
    return buf.getvalue()


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _base(args):
    return np.e if args.nats else 2


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    channel, _, source = load_source(args)
    if args.which == "more-capable":
        v = cm.check_more_capable(channel, args.res, args.tol, _base(args))
        label = "more-capable"
        detail = (f"margin={fmt(v.margin)} argmin_px={'/'.join(fmt(x) for x in v.argmin_px)} "
                  f"grid_points={v.n_grid} resolution={v.resolution}")
    else:
        check = (cm.check_physically_degraded if args.which == "degraded"
                 else cm.check_reversely_degraded)
        v = check(channel, args.tol)
        label = "physically-degraded" if args.which == "degraded" else "reversely-degraded"
        detail = (f"max_violation={fmt(v.max_violation)} "
                  f"worst_px={'/'.join(fmt(x) for x in v.worst_px)} probes={v.n_probes}")
    verdict = "yes" if v.holds else "no"
    out = f"{label}: {verdict}\n"
    out += f"check={label} verdict={verdict} {detail} tol={fmt(v.tol)} source={source}\n"
    _write(out, args.output)
    return 0


def cmd_region(args) -> int:
    base = _base(args)
    if args.bound in CLOSED_FORM_BOUNDS:
        need = CLOSED_FORM_BOUNDS[args.bound]
        if args.spec is not None or (args.example or need) != need:
            raise CliError(f"--bound {args.bound} needs --example {need}")
        args.example = need
        params = _example_params(args)
        try:
            if need == "lemma1":
                points = canonical.lemma1_curve(params["q"], params["alpha"], args.res, base)
            else:
                points = canonical.lemma3_curve(params["q"], params["alpha"], params["gamma"],
                                                params["beta"], args.res, base)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        if args.pareto:
            points = regions.pareto_filter(points)
    else:
        channel, metrics, _ = load_source(args)
        try:
            spec = SweepSpec(args.bound, px_resolution=args.res, kernel_resolution=args.kernel_res,
                             r1_resolution=args.r1_res, base=base, card_v=args.card_v,
                             card_u=args.card_u, pareto=args.pareto,
                             max_evaluations=args.max_evals, threads=args.threads)
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                points = regions.sweep_region(channel, spec, metrics)
        except SweepTooLarge as exc:
            raise CliError(f"{exc}; raise --max-evals or lower the resolutions") from None
        except ValueError as exc:
            raise CliError(str(exc)) from None
        for w in {str(w.message) for w in caught}:
            print(f"warning: {w}", file=sys.stderr)
    _write(region_csv(points), args.output)
    return 0


def figure2_report(data: canonical.Figure2Data, q: float, alpha: float, unit: str = "bits") -> str:
    n = len(data.separation)
    k = int(round(data.dominated_fraction * n))
    return (f"figure2 q={fmt(q)} alpha={fmt(alpha)} separation_points={n} "
            f"dominated={k} dominated_fraction={fmt(data.dominated_fraction)} "
            f"best_gap={fmt(data.best_gap)} best_gap_lambda={fmt(data.best_gap_lambda)} "
            f"unit={unit}\n")


def cmd_figure2(args) -> int:
    try:
        data = canonical.figure2_data(args.q, args.alpha, args.res, args.lambdas, _base(args))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    report = figure2_report(data, args.q, args.alpha, "nats" if args.nats else "bits")
    joint = region_csv(data.joint)
    separation = region_csv(data.separation)
    # joint-region points at the separation distortions, keyed by lambda
    matched = [RegionPoint(None, m.r, m.d1, m.d2, "lemma1", {"lambda": s.parameters["lambda"]})
               for m, s in zip(data.matched, data.separation)]
    matched_csv = region_csv(matched)
    if args.output is None:
        sys.stdout.write("# joint boundary\n" + joint + "\n# separation baseline\n" + separation
                         + "\n# joint region at separation distortions\n" + matched_csv)
        sys.stderr.write(report)
    else:
        _write(joint, args.output + "_joint.csv")
        _write(separation, args.output + "_separation.csv")
        _write(matched_csv, args.output + "_matched.csv")
        sys.stdout.write(report)
    return 0


def cmd_simulate(args) -> int:
    channel, metrics, source = load_source(args)
    if len(channel.x) != 2 and args.px is None:
        raise CliError("non-binary input alphabet: give --px")
    px = np.array(args.px if args.px is not None else [1.0 - args.p, args.p], dtype=float)
    try:
        config = simulate.SimConfig(args.n, args.seed, tuple(px), args.reps, args.threads)
        joint = channel.joint(px)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    obs = {"all": ("X", "Y1", "Y2")}
    ests, analytic = [], []
    for j in (1, 2):
        o = obs.get(args.observe, ("X", f"Y{j}"))
        est = optimal_estimator(joint, j, metrics[j - 1], o)
        ests.append(est)
        analytic.append(expected_distortion(joint, est, metrics[j - 1], j))
    res = simulate.simulate_distortion(channel, ests, metrics, config)
    lines = [f"source={source} observe={args.observe} px={'/'.join(fmt(v) for v in px)}",
             f"d1={fmt(res.d1)} se1={fmt(res.se1)} analytic_d1={fmt(analytic[0])}",
             f"d2={fmt(res.d2)} se2={fmt(res.se2)} analytic_d2={fmt(analytic[1])}"]
    if args.mi:
        base = _base(args)
        est_mi = simulate.plugin_mutual_information(channel, px, config, base)
        lines.append(f"plugin_I_X_Y1_given_S1={fmt(est_mi)} "
                     f"analytic={fmt(mutual_information(joint, 'X', 'Y1', 'S1', base))}")
    lines.append(f"n={res.n_total} seed={res.seed} generator={res.generator}")
    _write("\n".join(lines) + "\n", args.output)
    return 0


def cmd_export(args) -> int:
    if args.spec is not None:
        raise CliError("export works on builtin examples; use --example")
    channel, metrics, _ = load_source(args)
    _write(specfile.dumps(channel, metrics), args.output)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("channel")
    g.add_argument("--example", choices=EXAMPLES, help="builtin channel")
    g.add_argument("--spec", metavar="PATH", help="JSON channel description file")
    g.add_argument("--q", type=float, help="P(S1 = 1) (default 0.65)")
    g.add_argument("--alpha", type=float, help="P(S2 = 1 | S1 = 1)")
    g.add_argument("--gamma", type=float, help="BEC erasure probability (becbsc)")
    g.add_argument("--beta", type=float, help="BSC crossover probability (becbsc)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secisac", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", "-o", metavar="PATH", help="output file (default stdout)")
    common.add_argument("--nats", action="store_true", help="report information in nats")

    p = sub.add_parser("check", parents=[common], help="degradedness / more-capable verdicts")
    _add_source(p)
    p.add_argument("--which", required=True,
                   choices=("degraded", "reverse-degraded", "more-capable"))
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--res", type=int, default=None,
                   help="more-capable grid resolution (default 1001 binary, 200 otherwise)")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("region", parents=[common], help="sweep a bound and write CSV")
    _add_source(p)
    p.add_argument("--bound", required=True, choices=sorted(regions.BOUNDS) + sorted(CLOSED_FORM_BOUNDS))
    p.add_argument("--res", type=int, default=1001, help="input-distribution grid resolution")
    p.add_argument("--kernel-res", type=int, default=None,
                   help="auxiliary kernel grid resolution (default: V = X)")
    p.add_argument("--r1-res", type=int, default=11, help="R1 samples for partial secrecy")
    p.add_argument("--card-v", type=int, default=None)
    p.add_argument("--card-u", type=int, default=None)
    p.add_argument("--pareto", action="store_true", help="drop dominated points")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-evals", type=int, default=2_000_000)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("figure2", parents=[common],
                       help="joint design vs separation on the noiseless channel")
    p.add_argument("--q", type=float, default=0.65)
    p.add_argument("--alpha", type=float, default=0.21)
    p.add_argument("--res", type=int, default=1001)
    p.add_argument("--lambdas", type=int, default=101, help="separation grid size")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo distortions")
    _add_source(p)
    p.add_argument("--p", type=float, default=0.5, help="P(X = 1) for binary inputs")
    p.add_argument("--px", type=float, nargs="+", default=None, help="full input pmf")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--observe", choices=("all", "own"), default="all",
                   help="estimators see (X,Y1,Y2) or only (X,Yj)")
    p.add_argument("--mi", action="store_true", help="also report plug-in I(X;Y1|S1)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export", parents=[common], help="write a builtin example as a spec file")
    _add_source(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
