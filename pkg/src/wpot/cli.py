"""Command-line front end: distances, potential grids, spectra, recovery, suites.

Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage or
input errors.  Identical invocations produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys

from . import fourier, ioutils, verify
from .errors import ValidationError
from .manifold import Torus, manifold_from_kind
from .measure import DiscreteMeasure, validate_measure
from .potential import (
    SampledPotential,
    recover_sphere_weights,
    recover_torus_marginals_p2,
    recover_torus_weights,
)
from .transport import solve_transport

USAGE_ERROR = 2


def _load_measure(path) -> DiscreteMeasure:
    data = ioutils.load_json(path)
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: expected a measure object")
    weights = data.get("weights")
    if isinstance(weights, list) and 0.0 in [float(w) for w in weights]:
        # zero atoms would register as spurious recovery sites; drop them here
        kept = [i for i, w in enumerate(weights) if float(w) != 0.0]
        dropped = [i for i in range(len(weights)) if i not in kept]
        print(f"warning: {path}: dropping zero-weight atoms at indices {dropped}",
              file=sys.stderr)
        data = dict(data)
        data["weights"] = [float(weights[i]) for i in kept]
        data["support"] = [data["support"][i] for i in kept]
    try:
        mu = DiscreteMeasure.from_json_dict(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc
    validate_measure(mu)
    return mu


def _cmd_dist(args) -> int:
    mu = _load_measure(args.measure_a)
    nu = _load_measure(args.measure_b)
    result = solve_transport(mu, nu, args.p)
    print(ioutils.format_float(result.distance))
    if args.out:
        ioutils.write_json(args.out, result.to_json_dict())
    return 0


def _cmd_potential(args) -> int:
    mu = _load_measure(args.measure)
    oracle = SampledPotential.from_measure(mu, args.p, args.grid)
    ioutils.write_potential_csv(args.out, oracle)
    print(f"wrote {args.grid}-per-axis potential grid to {args.out}")
    return 0


def _cmd_fourier(args) -> int:
    if args.closed_form:
        values = {}
        for j in range(-args.jmax, args.jmax + 1):
            values[j] = fourier.cost_coeff_closed(args.p, j)
        zeros = tuple(sorted(j for j, v in values.items() if abs(v) <= args.threshold))
        report = fourier.SpectrumReport(
            args.p, args.jmax, values, zeros, args.threshold, 0.0
        )
    else:
        report = fourier.nonvanishing_scan(args.p, args.jmax, args.threshold)
    for j in range(0, args.jmax + 1):
        marker = " zero" if j in report.zeros else ""
        print(f"j={j:<4d} {ioutils.format_float(report.values[j])}{marker}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_csv_text())
    if args.json_out:
        ioutils.write_json(args.json_out, report.to_json_dict())
    return 0


def _cmd_recover(args) -> int:
    oracle = ioutils.read_potential_csv(args.potential)
    if args.p is not None and abs(args.p - oracle.p) > 1e-12:
        raise ValidationError(
            f"--p {args.p} conflicts with the grid metadata p={oracle.p}"
        )
    if isinstance(oracle.manifold, Torus) and oracle.p == 2.0:
        marginals = recover_torus_marginals_p2(oracle, resolution=args.resolution)
        payload = {
            "method": "torus_p2_marginals",
            "marginals": [m.to_json_dict() for m in marginals],
        }
        ioutils.write_json(args.out, payload)
        print(f"recovered {len(marginals)} marginals -> {args.out}")
        return 0
    if not args.sites:
        raise ValidationError("weight recovery needs --sites")
    sites = ioutils.load_points_json(args.sites, oracle.manifold)
    if isinstance(oracle.manifold, Torus):
        result = recover_torus_weights(oracle, sites)
    else:
        result = recover_sphere_weights(oracle, sites)
    ioutils.write_json(args.out, result.to_json_dict())
    print(
        f"recovered {len(result.masses)} masses (residual "
        f"{ioutils.format_float(result.residual)}) -> {args.out}"
    )
    return 0


def _cmd_verify(args) -> int:
    manifold = manifold_from_kind(args.manifold, args.n)
    if args.suite == "all":
        configs = verify.default_configs(seed=args.seed, manifold=manifold)
        if args.trials is not None:
            configs = [
                verify.SuiteConfig(c.suite, c.manifold, c.p, args.trials, args.seed)
                for c in configs
            ]
    else:
        configs = [
            verify.SuiteConfig(
                args.suite,
                manifold,
                p=args.p,
                trials=args.trials if args.trials is not None else 20,
                seed=args.seed,
            )
        ]
    reports = [verify.run_suite(cfg) for cfg in configs]
    for report in reports:
        for line in report.format_lines():
            print(line)
    if args.out:
        ioutils.write_json(args.out, [r.to_json_dict() for r in reports])
    return 0 if all(r.passed for r in reports) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wpot",
        description=(
            "Exact optimal transport on the flat torus and the round sphere, "
            "with potential-based measure recovery"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_dist = sub.add_parser("dist", help="p-Wasserstein distance between two measures")
    p_dist.add_argument("measure_a")
    p_dist.add_argument("measure_b")
    p_dist.add_argument("--p", type=float, default=2.0)
    p_dist.add_argument("--out", help="write the optimal coupling as JSON")
    p_dist.set_defaults(func=_cmd_dist)

    p_pot = sub.add_parser("potential", help="export a potential grid as CSV")
    p_pot.add_argument("measure")
    p_pot.add_argument("--p", type=float, default=2.0)
    p_pot.add_argument("--grid", type=int, default=256)
    p_pot.add_argument("--out", required=True)
    p_pot.set_defaults(func=_cmd_potential)

    p_four = sub.add_parser("fourier", help="cost-coefficient spectrum report")
    p_four.add_argument("--p", type=float, required=True)
    p_four.add_argument("--jmax", type=int, default=16)
    p_four.add_argument("--threshold", type=float, default=fourier.ZERO_THRESHOLD)
    p_four.add_argument("--closed-form", action="store_true")
    p_four.add_argument("--out", help="CSV output path")
    p_four.add_argument("--json-out", help="JSON output path")
    p_four.set_defaults(func=_cmd_fourier)

    p_rec = sub.add_parser("recover", help="recover a measure from a potential grid")
    p_rec.add_argument("potential", help="potential grid CSV")
    p_rec.add_argument("--sites", help="candidate sites JSON (points or a measure)")
    p_rec.add_argument("--p", type=float, help="must match the grid metadata")
    p_rec.add_argument("--resolution", type=int, default=1024, help="p=2 marginal scan size")
    p_rec.add_argument("--out", required=True)
    p_rec.set_defaults(func=_cmd_recover)

    p_ver = sub.add_parser("verify", help="run rigidity property suites")
    p_ver.add_argument("--suite", default="all", choices=("all",) + verify.SUITE_NAMES)
    p_ver.add_argument("--seed", type=int, required=True)
    p_ver.add_argument("--trials", type=int)
    p_ver.add_argument("--p", type=float, default=2.0)
    p_ver.add_argument("--manifold", default="torus", choices=("torus", "sphere"))
    p_ver.add_argument("--n", type=int, default=2)
    p_ver.add_argument("--out", help="write suite reports as JSON")
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else USAGE_ERROR
    try:
        return args.func(args)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
