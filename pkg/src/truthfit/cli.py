"""Command-line driver: single fits, IC verdicts, region sweeps, probes.

Four subcommands:

    estimate      closed-form penalized fit of two group means
    ic            incentive-compatibility verdict at a model or a prior
    region        (beta1, c0) sweep of exact margins and the closed-form
                  violation regions for bernoulli noise, to CSV/JSON
    asymptotics   finite-n convergence probe plus the large-n limit row

Output is deterministic byte-for-byte: floats are printed at 9
significant digits, sweeps are emitted in grid order, and the one
randomized facility (Monte Carlo cross-checks) is not exposed here.

Exit codes: 0 success (and IC holds, for `ic`); 2 usage errors; 3 an IC
violation was found by `ic`; 4 I/O failure; 5 parameter domain errors.

Options may also be supplied via --config FILE holding flat `key=value`
lines (keys match the long flag names); explicit flags win over the
file, the file wins over built-in defaults.
"""

import argparse
import sys

from .asymptotics import (
    ParameterDomainError,
    finite_n_probe,
    ic_statistic,
    limit_conditional_means,
)
from .estimator import ModelParams, PenaltyParams, Sample, fit
from .ic import (
    PriorOverBeta,
    bernoulli_paper_region,
    bernoulli_refined_region,
    ic_at_beta,
    ic_at_prior,
)
from .noise import Bernoulli, NoiseGrammarError, UnsupportedNoiseError, parse_noise

REQUIRED = object()

REGION_HEADER = "beta1,c0,margin_x1,margin_x0,violated,paper_region,refined_region"
ASYMPTOTICS_HEADER = "n,pivot_prob,cond_eps0,cond_eps1,ic_statistic,loss_gap"


def fmt9(x) -> str:
    """Floats at 9 significant digits, -0 normalized to 0."""
    v = float(x)
    if v == 0.0:
        return "0"
    return format(v, ".9g")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.cmd(args, parser)
    except NoiseGrammarError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ParameterDomainError, UnsupportedNoiseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 5
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 5


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="truthfit",
        description="Penalized two-point fits and the reporting incentives they create.",
    )
    sub = parser.add_subparsers(required=True, metavar="command")

    p = sub.add_parser("estimate", help="closed-form fit of two group means")
    p.add_argument("--ybar0", type=float)
    p.add_argument("--ybar1", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--c0", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--config")
    p.set_defaults(cmd=cmd_estimate)

    p = sub.add_parser("ic", help="incentive-compatibility verdict")
    p.add_argument("--noise", help="e.g. bernoulli:p=0.75, gaussian:sigma=1, degenerate")
    p.add_argument("--beta0", type=float)
    p.add_argument("--beta1", type=float)
    p.add_argument("--c0", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--prior", help="file of `beta0 beta1 weight` lines")
    p.add_argument("--config")
    p.set_defaults(cmd=cmd_ic)

    p = sub.add_parser("region", help="margin/region sweep over (beta1, c0)")
    p.add_argument("--noise", help="bernoulli:p=... (regions are specific to it)")
    p.add_argument("--beta1-start", type=float)
    p.add_argument("--beta1-stop", type=float)
    p.add_argument("--beta1-step", type=float)
    p.add_argument("--c0-start", type=float)
    p.add_argument("--c0-stop", type=float)
    p.add_argument("--c0-step", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--output")
    p.add_argument("--format", type=_format_choice)
    p.add_argument("--config")
    p.set_defaults(cmd=cmd_region)

    p = sub.add_parser("asymptotics", help="finite-n probe plus the limit row")
    p.add_argument("--p", type=float, help="probability of the -1 noise draw")
    p.add_argument("--beta1", type=float)
    p.add_argument("--c0", type=float)
    p.add_argument("--n-list", help="comma-separated group sizes, e.g. 1,25,100")
    p.add_argument("--output")
    p.add_argument("--format", type=_format_choice)
    p.add_argument("--config")
    p.set_defaults(cmd=cmd_asymptotics)

    return parser


def cmd_estimate(args, parser):
    v = _resolve(
        args,
        parser,
        (
            ("ybar0", float, REQUIRED),
            ("ybar1", float, REQUIRED),
            ("n", int, 1),
            ("c0", float, 0.0),
            ("c1", float, 0.0),
        ),
    )
    est = fit(
        Sample(ybar0=v["ybar0"], ybar1=v["ybar1"], n=v["n"]),
        PenaltyParams(c0=v["c0"], c1=v["c1"]),
    )
    print(f"b0={fmt9(est.b0)}")
    print(f"b1={fmt9(est.b1)}")
    print(f"included={_render_bool(est.included)}")
    return 0


def cmd_ic(args, parser):
    v = _resolve(
        args,
        parser,
        (
            ("noise", str, REQUIRED),
            ("beta0", float, 0.0),
            ("beta1", float, None),
            ("c0", float, 0.0),
            ("c1", float, 0.0),
            ("n", int, 1),
            ("prior", str, None),
        ),
    )
    spec = parse_noise(v["noise"])
    penalty = PenaltyParams(c0=v["c0"], c1=v["c1"])
    if v["prior"] is not None:
        report = ic_at_prior(_load_prior(v["prior"]), spec, penalty, v["n"])
    else:
        if v["beta1"] is None:
            parser.error("either --beta1 or --prior is required")
        model = ModelParams(beta0=v["beta0"], beta1=v["beta1"])
        report = ic_at_beta(model, spec, penalty, v["n"])
    for rec in report.deviations:
        print(
            f"deviation x={rec.x}->r={rec.r}: truth={fmt9(rec.loss_truth)}"
            f" deviation={fmt9(rec.loss_deviation)} margin={fmt9(rec.margin)}"
            f" violated={_render_bool(rec.violated)} trivial={_render_bool(rec.trivial)}"
        )
    verdict = "ic" if report.ic else "violated"
    print(f"verdict: {verdict} (tolerance {fmt9(report.tolerance)})")
    return 0 if report.ic else 3


def cmd_region(args, parser):
    v = _resolve(
        args,
        parser,
        (
            ("noise", str, REQUIRED),
            ("beta1_start", float, REQUIRED),
            ("beta1_stop", float, REQUIRED),
            ("beta1_step", float, REQUIRED),
            ("c0_start", float, REQUIRED),
            ("c0_stop", float, REQUIRED),
            ("c0_step", float, REQUIRED),
            ("c1", float, 0.0),
            ("n", int, 1),
            ("output", str, None),
            ("format", _format_choice, "csv"),
        ),
    )
    spec = parse_noise(v["noise"])
    if not isinstance(spec, Bernoulli):
        raise UnsupportedNoiseError(
            "region sweeps require bernoulli noise; the closed-form regions "
            "are specific to the skewed two-point law"
        )
    d = spec.d
    rows = []
    for beta1 in _grid(v["beta1_start"], v["beta1_stop"], v["beta1_step"], parser):
        model = ModelParams(beta0=0.0, beta1=beta1)
        for c0 in _grid(v["c0_start"], v["c0_stop"], v["c0_step"], parser):
            report = ic_at_beta(model, spec, PenaltyParams(c0=c0, c1=v["c1"]), v["n"])
            dev1, dev0 = report.deviations
            in_domain = beta1 > 0.0 and c0 > 0.0
            rows.append(
                (
                    ("beta1", beta1),
                    ("c0", c0),
                    ("margin_x1", dev1.margin),
                    ("margin_x0", dev0.margin),
                    ("violated", not report.ic),
                    ("paper_region", in_domain and bernoulli_paper_region(beta1, c0, d)),
                    (
                        "refined_region",
                        in_domain and bernoulli_refined_region(beta1, c0, d),
                    ),
                )
            )
    _emit(v["output"], v["format"], REGION_HEADER, rows)
    return 0


def cmd_asymptotics(args, parser):
    v = _resolve(
        args,
        parser,
        (
            ("p", float, REQUIRED),
            ("beta1", float, REQUIRED),
            ("c0", float, REQUIRED),
            ("n_list", str, REQUIRED),
            ("output", str, None),
            ("format", _format_choice, "csv"),
        ),
    )
    d = Bernoulli(v["p"]).d
    try:
        sizes = [int(tok) for tok in v["n_list"].split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--n-list must be comma-separated integers, got {v['n_list']!r}")
    eps0, eps1 = limit_conditional_means(v["beta1"], v["c0"], d)
    rows = []
    for r in finite_n_probe(v["beta1"], v["c0"], d, sizes):
        rows.append(
            (
                ("n", r.n),
                ("pivot_prob", r.pivot_prob),
                ("cond_eps0", r.cond_eps0),
                ("cond_eps1", r.cond_eps1),
                ("ic_statistic", r.ic_statistic),
                ("loss_gap", r.loss_gap),
            )
        )
    rows.append(
        (
            ("n", "limit"),
            ("pivot_prob", None),
            ("cond_eps0", eps0),
            ("cond_eps1", eps1),
            ("ic_statistic", ic_statistic(v["beta1"], eps0, eps1)),
            ("loss_gap", None),
        )
    )
    _emit(v["output"], v["format"], ASYMPTOTICS_HEADER, rows)
    return 0


def _resolve(args, parser, fields):
    """Merge flag values, config-file values, and defaults, in that order."""
    config = _load_config(args.config, parser) if args.config else {}
    values = {}
    for name, conv, default in fields:
        given = getattr(args, name)
        if given is not None:
            values[name] = given
        elif name in config:
            try:
                values[name] = conv(config[name])
            except ValueError:
                parser.error(f"bad config value {name}={config[name]!r}")
        elif default is REQUIRED:
            parser.error(f"missing required option --{name.replace('_', '-')}")
        else:
            values[name] = default
    return values


def _load_config(path, parser):
    config = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                parser.error(f"bad config line (expected key=value): {line!r}")
            config[key.strip().replace("-", "_")] = val.strip()
    return config


def _load_prior(path):
    atoms = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"bad prior line (expected beta0 beta1 weight): {line!r}")
            beta0, beta1, weight = (float(t) for t in parts)
            atoms.append((ModelParams(beta0=beta0, beta1=beta1), weight))
    return PriorOverBeta(atoms=tuple(atoms))


def _grid(start, stop, step, parser):
    if step <= 0.0:
        parser.error(f"grid step must be positive, got {step}")
    values = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9 * step:
            return values
        values.append(v)
        k += 1


def _format_choice(s):
    if s not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {s!r}")
    return s


def _render_bool(b):
    return "true" if b else "false"


def _render_csv(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return _render_bool(value)
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return fmt9(value)


def _render_json(value):
    if value is None:
        return "null"
    if isinstance(value, bool):
        return _render_bool(value)
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, int):
        return str(value)
    return fmt9(value)


def _emit(output, fmt, header, rows):
    if fmt == "csv":
        lines = [header]
        lines.extend(",".join(_render_csv(v) for _, v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        objs = [
            "  {" + ", ".join(f'"{k}": {_render_json(v)}' for k, v in row) + "}"
            for row in rows
        ]
        text = "[\n" + ",\n".join(objs) + "\n]\n" if objs else "[]\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


if __name__ == "__main__":
    sys.exit(main())
