"""Command-line interface.

Subcommands map one-to-one onto the library surface:

    sieve         prime table summary (optionally write the primes)
    sample        build an assignment and write it as CSV
    ingest        validate an eigenvalue data file
    expand        Dirichlet coefficients of one tuple's local factor
    check-lemmas  randomized checks of the eigenvalue inequalities
    density       density profile of a residue-class subset
    verify        run a config-driven experiment (report + CSV series)
    report        validate and summarize an existing report.json
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
from jsonschema import ValidationError, validate as _schema_validate

from . import __version__
from .core import Branch, FactorKind, from_free_angles, mu, mu_expanded, local_factor
from .density import PrimeSubset, density_profile, sieve
from .series import coeff_bound, expand, expand_oracle
from .shell import (
    ConfigError,
    ExperimentConfig,
    IngestError,
    REPORT_SCHEMA,
    emit_assignment_csv,
    ingest,
    run_experiment,
)
from .sim import SamplerKind, SamplerSpec, build_assignment
from .verify import extremal_tuple, lemma_ineq_check


def _cmd_sieve(args) -> int:
    table = sieve(args.bound)
    print(f"pi({args.bound}) = {len(table)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("p\n")
            for p in table.primes:
                fh.write(f"{int(p)}\n")
        print(f"wrote {args.out}")
    return 0


def _cmd_sample(args) -> int:
    spec = SamplerSpec(
        kind=SamplerKind(args.kind),
        genus=args.genus,
        seed=args.seed,
        c=args.c,
        multipliers=tuple(args.multipliers) if args.multipliers else None,
    )
    table = sieve(args.bound)
    assignment = build_assignment(spec, table)
    emit_assignment_csv(assignment, args.out)
    print(f"wrote {len(table)} tuples to {args.out}")
    return 0


def _cmd_ingest(args) -> int:
    records = ingest(args.input, args.format)
    genera = {r.genus() for r in records if r.thetas is not None}
    n_bare = sum(1 for r in records if r.thetas is None)
    print(f"{args.input}: {len(records)} valid records")
    if genera:
        print(f"  genus: {genera.pop()}")
    if n_bare:
        print(f"  bare-mu records: {n_bare} (standard-side quantities unavailable)")
    return 0


def _cmd_expand(args) -> int:
    angles = [float(a) for a in args.angles.split(",")]
    t = from_free_angles(args.genus, angles, Branch(args.branch))
    kind = FactorKind(args.kind)
    series = expand(local_factor(t, kind), args.r_max)
    oracle = expand_oracle(local_factor(t, kind), args.r_max)
    print("r,coeff,oracle,bound")
    for r, (a, b) in enumerate(zip(series.coeffs, oracle.coeffs)):
        print(f"{r},{a!r},{b!r},{coeff_bound(kind, args.genus, r)}")
    print(f"mu = {mu(t)!r}")
    return 0


def _cmd_check_lemmas(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0
    for g in range(1, args.max_genus + 1):
        worst_mu_gap = 0.0
        worst_ineq = 0.0
        for _ in range(args.samples):
            t = from_free_angles(
                g,
                rng.uniform(0.0, 2.0 * np.pi, g),
                Branch.PLUS if rng.integers(0, 2) == 0 else Branch.MINUS,
            )
            worst_mu_gap = max(worst_mu_gap, abs(mu(t) - mu_expanded(t)))
            m = abs(mu(t))
            if m > 1e-12:
                c = float(rng.uniform(0.0, 1.0)) * m
                if c > 0:
                    res = lemma_ineq_check(t, c)
                    worst_ineq = max(worst_ineq, res.rhs - res.lhs)
        eq_gap = 0.0
        for c in np.geomspace(1e-4, 2.0**g, 32):
            res = lemma_ineq_check(extremal_tuple(g, float(c)), float(c))
            eq_gap = max(eq_gap, abs(res.lhs - res.rhs))
        ok = worst_mu_gap <= 1e-10 and worst_ineq <= 1e-9 and eq_gap <= 1e-9
        failures += not ok
        status = "PASS" if ok else "FAIL"
        print(
            f"genus {g}: {status} (mu forms gap {worst_mu_gap:.2e}, "
            f"worst inequality slack {worst_ineq:.2e}, extremal equality gap {eq_gap:.2e})"
        )
    return 1 if failures else 0


def _cmd_density(args) -> int:
    table = sieve(args.bound)
    residues = tuple(int(r) for r in args.residues.split(","))
    S = PrimeSubset.residue_class(table, args.modulus, residues)
    est = density_profile(S)
    print(f"subset: p = {args.residues} mod {args.modulus}, {S.count} of {len(table)} primes")
    print("s,dirichlet_ratio")
    for s, r in zip(est.s_grid, est.dirichlet_ratios):
        print(f"{s!r},{r!r}")
    print("x,natural_ratio")
    for x, r in zip(est.x_grid, est.natural_ratios):
        print(f"{x},{r!r}")
    return 0


def _cmd_verify(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        config = ExperimentConfig.from_dict({**config.to_dict(), "seed": args.seed})
    result = run_experiment(config, args.out, threads=args.threads)
    for entry in result["report"]["bounds"]:
        print(
            f"c={entry['c']}: bound={entry['bound']:.6f} "
            f"max_dirichlet={max(e['ratio'] for e in entry['estimates']['dirichlet']):.6f} "
            f"margin={entry['margin']:+.6f}"
        )
    print(f"report: {result['report_path']}")
    return 0


def _cmd_report(args) -> int:
    with open(args.input, encoding="utf-8") as fh:
        report = json.load(fh)
    try:
        _schema_validate(report, REPORT_SCHEMA)
    except ValidationError as exc:
        print(f"schema violation: {exc.message}", file=sys.stderr)
        return 1
    cfg = report["config"]
    print(
        f"experiment: genus {cfg['genus']}, X = {cfg['prime_bound']}, "
        f"mode {cfg['mode']}, seed {cfg.get('seed')}"
    )
    for entry in report["bounds"]:
        growth = entry["diagnostics"].get("monotone_growth")
        print(
            f"  c={entry['c']}: bound={entry['bound']:.6f} margin={entry['margin']:+.6f} "
            f"count={entry['estimates']['count']} linear_sum_growing={growth}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hecke-density",
        description="Satake local factors, eigenvalue inequalities, and prime-density experiments",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="prime table summary")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("sample", help="build an assignment, write CSV")
    p.add_argument("--kind", choices=[k.value for k in SamplerKind], required=True)
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--c", type=float, default=None, help="threshold for extremal_constant")
    p.add_argument("--multipliers", type=float, nargs="*", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("ingest", help="validate an eigenvalue data file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("expand", help="Dirichlet coefficients of one local factor")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--kind", choices=["spin", "std"], required=True)
    p.add_argument("--angles", required=True, help="comma-separated free angles theta_1..theta_g")
    p.add_argument("--branch", choices=["plus", "minus"], default="plus")
    p.add_argument("--r-max", type=int, default=10)
    p.set_defaults(func=_cmd_expand)

    p = sub.add_parser("check-lemmas", help="randomized inequality checks")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--max-genus", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_check_lemmas)

    p = sub.add_parser("density", help="density profile of a residue-class subset")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--residues", required=True, help="comma-separated residues")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("verify", help="run a config-driven experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--threads", type=int, default=1, help="speed only; never affects output")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="validate and summarize a report.json")
    p.add_argument("--input", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
