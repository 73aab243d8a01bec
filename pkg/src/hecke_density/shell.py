"""Experiment configuration, dataset ingestion, orchestration, and report
emission.

Configs are single JSON documents; the emitted report echoes the fully
resolved config (every default made explicit) so a run is reproducible
from its report alone.  Reports carry no timestamps or environment state:
identical configs produce byte-identical outputs, and the ``threads``
knob only sizes a worker pool over per-threshold work whose results are
assembled in a fixed order.

Assignment files are CSV with header ``p,theta0,...,thetaG`` (angles in
radians) or ``p,mu`` (bare eigenvalues), or JSON of the shape
``{"genus": g, "records": [{"p": 2, "thetas": [...]}, ...]}``.  Bare-mu
records support the exceedance-density paths only; standard-side
quantities are not recoverable from mu, and asking for them is a
validation error.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from jsonschema import validate as _schema_validate

from . import __version__
from .core import SatakeTuple, constraint_residual, mu as tuple_mu
from .density import (
    PrimeTable,
    default_s_grid,
    default_x_grid,
    sieve,
)
from .series import DEFAULT_R_CUT
from .sim import SamplerKind, SamplerSpec, build_assignment
from .verify import (
    BoundReport,
    FactorKind,
    Mode,
    SatakeAssignment,
    density_profile,
    exceptional_set_from_mu,
    log_L_decomposition,
    theorem1_bound,
    theorem2_bound,
    verify_theorem,
)

INGEST_CONSTRAINT_TOL = 1e-8
INGEST_AMBIGUITY_TOL = 1e-6

REPORT_FORMAT = 1

REPORT_SCHEMA = {
    "type": "object",
    "required": ["config", "bounds", "versions"],
    "properties": {
        "config": {"type": "object"},
        "bounds": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["c", "mode", "bound", "margin", "estimates", "diagnostics"],
                "properties": {
                    "c": {"type": "number"},
                    "mode": {"type": "string", "enum": ["abs", "signed"]},
                    "bound": {"type": "number"},
                    "margin": {"type": "number"},
                    "estimates": {
                        "type": "object",
                        "required": ["dirichlet", "natural", "count", "truncation"],
                        "properties": {
                            "dirichlet": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["s", "ratio"],
                                },
                            },
                            "natural": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "required": ["x", "ratio"],
                                },
                            },
                            "count": {"type": "integer"},
                            "truncation": {
                                "type": "object",
                                "required": ["bound", "s_min"],
                            },
                        },
                    },
                    "diagnostics": {"type": "object"},
                    "extrapolation": {"type": "boolean"},
                    "nontrivial_range": {"type": "array"},
                },
            },
        },
        "log_l": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind", "s", "log_l", "linear_term", "remainder", "remainder_cap"],
            },
        },
        "data": {"type": "object"},
        "versions": {
            "type": "object",
            "required": ["package", "report_format"],
        },
    },
}


class IngestError(ValueError):
    """Ingestion failure with a line/record-precise diagnostic."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class EigenvalueRecord:
    """One prime's data: either g+1 Satake angles, a bare mu value, or both
    (in which case they must agree)."""

    p: int
    thetas: tuple[float, ...] | None = None
    mu: float | None = None
    magnitudes: tuple[float, ...] | None = None

    def genus(self) -> int | None:
        return None if self.thetas is None else len(self.thetas) - 1

    def to_tuple(self) -> SatakeTuple:
        if self.thetas is None:
            raise IngestError(
                f"record for p={self.p} carries only mu; Satake angles required"
            )
        return SatakeTuple(len(self.thetas) - 1, self.thetas, self.magnitudes)


def _check_record(rec: EigenvalueRecord, table: PrimeTable, where: str) -> None:
    idx = np.searchsorted(table.primes, rec.p)
    if idx >= len(table) or table.primes[idx] != rec.p:
        raise IngestError(f"{where}: p={rec.p} is not prime")
    if rec.thetas is not None:
        resid = float(constraint_residual(np.asarray(rec.thetas)))
        if resid > INGEST_CONSTRAINT_TOL:
            raise IngestError(
                f"{where}: central-constraint residual {resid:.3e} exceeds "
                f"{INGEST_CONSTRAINT_TOL:.1e}"
            )
        if rec.mu is not None:
            implied = tuple_mu(rec.to_tuple(), tol_real=1e-6)
            if abs(implied - rec.mu) > INGEST_AMBIGUITY_TOL:
                raise IngestError(
                    f"{where}: mu={rec.mu!r} inconsistent with angles "
                    f"(implied {implied!r})"
                )


def ingest(path, fmt: str = "csv") -> list[EigenvalueRecord]:
    """Read and validate eigenvalue records from a CSV or JSON file."""
    path = Path(path)
    if fmt == "csv":
        records = _ingest_csv(path)
    elif fmt == "json":
        records = _ingest_json(path)
    else:
        raise IngestError(f"unknown format {fmt!r}; expected 'csv' or 'json'")
    if not records:
        raise IngestError(f"{path}: no records")
    table = sieve(max(r.p for r in records))
    seen: set[int] = set()
    for i, rec in enumerate(records):
        where = f"{path}: record {i + 1}"
        if rec.p in seen:
            raise IngestError(f"{where}: duplicate prime p={rec.p}")
        seen.add(rec.p)
        _check_record(rec, table, where)
    genera = {r.genus() for r in records if r.thetas is not None}
    if len(genera) > 1:
        raise IngestError(f"{path}: mixed genera {sorted(genera)}")
    return records


def _ingest_csv(path: Path) -> list[EigenvalueRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header == ["p", "mu"]:
            bare = True
        elif (
            len(header) >= 3
            and header[0] == "p"
            and header[1:] == [f"theta{i}" for i in range(len(header) - 1)]
        ):
            bare = False
        else:
            raise IngestError(
                f"{path}: line 1: header must be 'p,mu' or 'p,theta0,...,thetaG', "
                f"got {','.join(header)!r}"
            )
        records = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: line {line_no}: expected {len(header)} fields, got {len(row)}"
                )
            try:
                p = int(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise IngestError(f"{path}: line {line_no}: {exc}") from None
            if bare:
                records.append(EigenvalueRecord(p=p, mu=values[0]))
            else:
                records.append(EigenvalueRecord(p=p, thetas=tuple(values)))
        return records


def _ingest_json(path: Path) -> list[EigenvalueRecord]:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "records" not in doc:
        raise IngestError(f"{path}: expected an object with a 'records' array")
    genus = doc.get("genus")
    records = []
    for i, item in enumerate(doc["records"]):
        where = f"{path}: record {i + 1}"
        if "p" not in item:
            raise IngestError(f"{where}: missing field 'p'")
        thetas = item.get("thetas")
        mu_val = item.get("mu")
        mags = item.get("magnitudes")
        if thetas is None and mu_val is None:
            raise IngestError(f"{where}: needs 'thetas' or 'mu'")
        if thetas is not None and genus is not None and len(thetas) != genus + 1:
            raise IngestError(
                f"{where}: expected {genus + 1} angles for genus {genus}, "
                f"got {len(thetas)}"
            )
        records.append(
            EigenvalueRecord(
                p=int(item["p"]),
                thetas=None if thetas is None else tuple(float(t) for t in thetas),
                mu=None if mu_val is None else float(mu_val),
                magnitudes=None if mags is None else tuple(float(m) for m in mags),
            )
        )
    return records


def assignment_from_records(
    records: list[EigenvalueRecord], table: PrimeTable, genus: int
) -> SatakeAssignment:
    """Assemble a full assignment; every table prime must have an angle
    record (records beyond the table bound are ignored)."""
    by_p = {r.p: r for r in records}
    angles = np.empty((len(table), genus + 1))
    for i, p in enumerate(table.primes):
        rec = by_p.get(int(p))
        if rec is None:
            raise IngestError(f"no record for prime p={int(p)} <= bound {table.bound}")
        if rec.thetas is None:
            raise IngestError(
                f"record for p={int(p)} carries only mu; standard-side and "
                "log-L quantities require Satake angles"
            )
        if rec.genus() != genus:
            raise IngestError(
                f"record for p={int(p)} has genus {rec.genus()}, expected {genus}"
            )
        angles[i] = rec.thetas
    return SatakeAssignment(genus=genus, table=table, angles=angles)


def mu_values_from_records(
    records: list[EigenvalueRecord], table: PrimeTable
) -> np.ndarray:
    """Aligned mu array from records (angles used where mu is absent)."""
    by_p = {r.p: r for r in records}
    out = np.empty(len(table))
    for i, p in enumerate(table.primes):
        rec = by_p.get(int(p))
        if rec is None:
            raise IngestError(f"no record for prime p={int(p)} <= bound {table.bound}")
        out[i] = rec.mu if rec.mu is not None else tuple_mu(rec.to_tuple())
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    genus: int
    prime_bound: int
    c_values: tuple[float, ...]
    mode: Mode = Mode.ABS
    sampler: SamplerSpec | None = None
    input_path: str | None = None
    input_format: str = "csv"
    s_grid: tuple[float, ...] = field(default_factory=default_s_grid)
    x_grid: tuple[int, ...] | None = None
    seed: int | None = None
    r_cut: int = DEFAULT_R_CUT

    def __post_init__(self) -> None:
        if self.prime_bound < 2:
            raise ConfigError("prime_bound must be >= 2")
        if not self.c_values or any(c <= 0 for c in self.c_values):
            raise ConfigError("c_values must be non-empty and positive")
        if any(s <= 1 for s in self.s_grid):
            raise ConfigError("all s_grid values must be > 1")
        if (self.sampler is None) == (self.input_path is None):
            raise ConfigError("exactly one of sampler/input_path is required")
        if self.sampler is not None and self.sampler.genus != self.genus:
            raise ConfigError("sampler genus must match config genus")
        object.__setattr__(self, "c_values", tuple(float(c) for c in self.c_values))
        object.__setattr__(
            self, "s_grid", tuple(sorted((float(s) for s in self.s_grid), reverse=True))
        )
        if self.x_grid is not None:
            object.__setattr__(self, "x_grid", tuple(sorted(int(x) for x in self.x_grid)))

    def resolved_seed(self) -> int | None:
        if self.seed is not None:
            return self.seed
        return self.sampler.seed if self.sampler is not None else None

    def to_dict(self) -> dict:
        """Fully resolved echo: every default explicit."""
        d = {
            "genus": self.genus,
            "prime_bound": self.prime_bound,
            "c_values": list(self.c_values),
            "mode": self.mode.value,
            "s_grid": list(self.s_grid),
            "x_grid": list(self.x_grid) if self.x_grid is not None
            else list(default_x_grid(self.prime_bound)),
            "seed": self.resolved_seed(),
            "r_cut": self.r_cut,
        }
        if self.sampler is not None:
            d["sampler"] = {
                "kind": self.sampler.kind.value,
                "genus": self.sampler.genus,
                "seed": self.resolved_seed(),
                "c": self.sampler.c,
                "multipliers": list(self.sampler.multipliers)
                if self.sampler.multipliers is not None
                else None,
            }
        else:
            d["input"] = {"path": self.input_path, "format": self.input_format}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            sampler = None
            if "sampler" in d:
                s = d["sampler"]
                sampler = SamplerSpec(
                    kind=SamplerKind(s["kind"]),
                    genus=int(s.get("genus", d["genus"])),
                    seed=s.get("seed"),
                    c=s.get("c"),
                    multipliers=tuple(s["multipliers"]) if s.get("multipliers") else None,
                )
            inp = d.get("input") or {}
            return cls(
                genus=int(d["genus"]),
                prime_bound=int(d["prime_bound"]),
                c_values=tuple(d["c_values"]),
                mode=Mode(d.get("mode", "abs")),
                sampler=sampler,
                input_path=inp.get("path"),
                input_format=inp.get("format", "csv"),
                s_grid=tuple(d["s_grid"]) if d.get("s_grid") else default_s_grid(),
                x_grid=tuple(d["x_grid"]) if d.get("x_grid") else None,
                seed=d.get("seed"),
                r_cut=int(d.get("r_cut", DEFAULT_R_CUT)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad config: {exc}") from exc

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None


def _fmt(x) -> str:
    """Shortest round-trip decimal for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def emit_assignment_csv(A: SatakeAssignment, path) -> None:
    header = ["p"] + [f"theta{i}" for i in range(A.genus + 1)]
    rows = ([int(p), *A.angles[i]] for i, p in enumerate(A.table.primes))
    _write_csv(path, header, rows)


def emit_primes_csv(table: PrimeTable, mu_vals, memberships, path) -> None:
    """Per-prime series: p, mu, one member flag per threshold.

    ``memberships`` is a list of (c, indicator) pairs; flag columns are
    named member_c<repr(c)>.
    """
    header = ["p", "mu"] + [f"member_c{c!r}" for c, _ in memberships]
    rows = (
        [int(p), mu_vals[i], *(m[i] for _, m in memberships)]
        for i, p in enumerate(table.primes)
    )
    _write_csv(path, header, rows)


def emit_dirichlet_csv(entries, path) -> None:
    _write_csv(path, ["c", "s", "ratio"], entries)


def emit_natural_csv(entries, path) -> None:
    _write_csv(path, ["c", "x", "ratio"], entries)


def emit_members_csv(primes, mus, path) -> None:
    _write_csv(path, ["p", "mu"], zip((int(p) for p in primes), mus))


def emit_report(report: dict, path) -> None:
    _schema_validate(report, REPORT_SCHEMA)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(report, sort_keys=True, indent=2))
        fh.write("\n")


def _bound_entry(rep: BoundReport, count: int) -> dict:
    est = rep.estimate
    return {
        "c": rep.c,
        "mode": rep.mode.value,
        "bound": rep.bound,
        "margin": rep.margin,
        "estimates": {
            "dirichlet": [
                {"s": s, "ratio": r} for s, r in zip(est.s_grid, est.dirichlet_ratios)
            ],
            "natural": [
                {"x": int(x), "ratio": r} for x, r in zip(est.x_grid, est.natural_ratios)
            ],
            "count": count,
            "truncation": {"bound": est.bound, "s_min": est.s_min},
        },
        "diagnostics": rep.diagnostics,
        "extrapolation": rep.extrapolation,
        "nontrivial_range": list(rep.nontrivial_range),
    }


def _mu_only_report(
    table: PrimeTable, mu_vals: np.ndarray, c: float, mode: Mode,
    genus: int, s_grid, x_grid,
) -> tuple[BoundReport, np.ndarray]:
    """Bound report from bare mu values.  The standard-side divergence
    diagnostic needs angles, so abs mode reports it unavailable; signed mode
    uses T(s) = sum mu(p) p^-s, which bare mu does support."""
    S = exceptional_set_from_mu(table, mu_vals, c, mode)
    est = density_profile(S, s_grid, x_grid)
    if mode is Mode.ABS:
        bound = theorem1_bound(genus, c)
        diagnostics = {
            "available": False,
            "reason": "standard-side linear sum requires Satake angles; "
            "records carry bare mu",
        }
        nontrivial = ((2.0 - 1.0 / genus) ** (genus / 2.0), float(2**genus))
        extrapolation = False
    else:
        bound = theorem2_bound(c)
        pf = table.primes.astype(np.float64)
        sums = [math.fsum((mu_vals * pf**-s).tolist()) for s in est.s_grid]
        diagnostics = {
            "kind": "spin",
            "s": list(est.s_grid),
            "linear_sum": sums,
            "monotone_growth": bool(len(sums) > 1 and np.all(np.diff(sums) > 0)),
            "growth": float(sums[-1] - sums[0]) if len(sums) > 1 else 0.0,
        }
        nontrivial = (0.0, 12.0 / 5.0)
        extrapolation = genus != 2
    rep = BoundReport(
        c=float(c), mode=mode, bound=bound, margin=bound - est.max_dirichlet,
        estimate=est, diagnostics=diagnostics, extrapolation=extrapolation,
        nontrivial_range=nontrivial,
    )
    return rep, S.membership


def run_experiment(config: ExperimentConfig, out_dir, threads: int = 1) -> dict:
    """Run the full pipeline and emit report.json plus CSV series.

    Returns a summary dict with the report and all output paths.  Negative
    margins never fail the run; exceptions signal infrastructure errors
    (bad config, unreadable input, I/O).
    """
    if threads < 1:
        raise ConfigError("threads must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = sieve(config.prime_bound)

    assignment = None
    data_info: dict = {"n_primes": len(table)}
    if config.sampler is not None:
        spec = config.sampler
        if config.seed is not None and spec.seed != config.seed:
            spec = SamplerSpec(
                kind=spec.kind, genus=spec.genus, seed=config.seed,
                c=spec.c, multipliers=spec.multipliers,
            )
        assignment = build_assignment(spec, table)
        mu_vals = assignment.mu_values
        data_info["source"] = "sampler"
    else:
        records = ingest(config.input_path, config.input_format)
        data_info["source"] = "ingest"
        if all(r.thetas is not None for r in records):
            assignment = assignment_from_records(records, table, config.genus)
            mu_vals = assignment.mu_values
        else:
            mu_vals = mu_values_from_records(records, table)
            data_info["bare_mu"] = True
    if assignment is not None:
        data_info["max_constraint_residual"] = assignment.max_constraint_residual()

    x_grid = config.x_grid if config.x_grid is not None else default_x_grid(config.prime_bound)

    def one_c(c: float) -> tuple[BoundReport, np.ndarray]:
        if assignment is not None:
            rep = verify_theorem(assignment, c, config.mode, config.s_grid, x_grid)
            membership = exceptional_set_from_mu(table, mu_vals, c, config.mode).membership
            return rep, membership
        return _mu_only_report(
            table, mu_vals, c, config.mode, config.genus, config.s_grid, x_grid
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_c, config.c_values))
    else:
        results = [one_c(c) for c in config.c_values]

    log_l_entries = []
    if assignment is not None:
        for kind in (FactorKind.SPIN, FactorKind.STD):
            for s in config.s_grid:
                dec = log_L_decomposition(assignment, kind, s, config.r_cut)
                log_l_entries.append(
                    {
                        "kind": kind.value,
                        "s": s,
                        "log_l": dec.log_l,
                        "linear_term": dec.linear_term,
                        "remainder": dec.remainder,
                        "remainder_cap": dec.remainder_cap,
                    }
                )

    bounds = [
        _bound_entry(rep, int(membership.sum())) for rep, membership in results
    ]

    report = {
        "config": config.to_dict(),
        "bounds": bounds,
        "log_l": log_l_entries,
        "data": data_info,
        "versions": {"package": __version__, "report_format": REPORT_FORMAT},
    }

    report_path = out_dir / "report.json"
    emit_report(report, report_path)

    memberships = [(c, m) for c, (_, m) in zip(config.c_values, results)]
    primes_path = out_dir / "primes.csv"
    emit_primes_csv(table, mu_vals, memberships, primes_path)

    dirichlet_rows = []
    natural_rows = []
    member_paths = []
    for c, (rep, membership) in zip(config.c_values, results):
        est = rep.estimate
        dirichlet_rows.extend((c, s, r) for s, r in zip(est.s_grid, est.dirichlet_ratios))
        natural_rows.extend((c, x, r) for x, r in zip(est.x_grid, est.natural_ratios))
        mpath = out_dir / f"members_c{c!r}.csv"
        emit_members_csv(table.primes[membership], mu_vals[membership], mpath)
        member_paths.append(mpath)
    dirichlet_path = out_dir / "dirichlet.csv"
    natural_path = out_dir / "natural.csv"
    emit_dirichlet_csv(dirichlet_rows, dirichlet_path)
    emit_natural_csv(natural_rows, natural_path)

    return {
        "report": report,
        "report_path": report_path,
        "csv_paths": [primes_path, dirichlet_path, natural_path, *member_paths],
    }
