"""Command line driver: reference states, trial campaigns, theta sweeps, oracle tables.

Settings are resolved as flags > JSON config file (``--config``) > defaults.
The default worker count can be set through ``BONDISING_WORKERS``.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .csvio import CsvDocument, write_csv
from .errors import BondIsingError, InvalidInputError
from .fidelity import DEFAULT_EPS, cluster_fidelities, run_campaign
from .imps import (
    IMPS,
    load_state,
    normalize,
    random_product_state,
    random_state,
    save_state,
    state_to_dict,
)
from .itebd import Schedule
from .model import ModelParams, PhaseLabel, phase_of
from .oracle import brute_force_ground

__all__ = [
    "SweepConfig",
    "load_config",
    "theta_grid",
    "find_discontinuities",
    "cmd_make_reference",
    "cmd_campaign",
    "cmd_sweep",
    "cmd_oracle",
    "main",
]

log = logging.getLogger(__name__)

WORKERS_ENV = "BONDISING_WORKERS"

CAMPAIGN_COLUMNS = [
    "theta", "trial", "seed", "converged", "d", "energy_per_site",
    "m_afm", "m_fm", "m_even_pair", "m_odd_pair", "phase",
]
SWEEP_COLUMNS = [
    "theta_index", "theta", "boundary", "n_trials", "n_converged", "degeneracy",
    "cluster", "d", "count", "frequency",
    "m_afm", "m_fm", "m_even_pair", "m_odd_pair", "phase",
]
ORACLE_COLUMNS = ["theta", "L", "energy_per_site", "degeneracy"]


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidInputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None


@dataclass
class SweepConfig:
    """All run settings. Every field has a default; ``theta`` selects a single-point campaign."""

    theta: float | None = None
    theta_min: float = 0.0
    theta_max: float = 2 * math.pi
    theta_steps: int = 80
    n_trials: int = 30
    chi_max: int = 32
    master_seed: int = 0
    reference_path: str = "generate"
    reference_seed: int = 12345
    reference_chi: int = 1
    reference_period: int = 4
    schedule: dict = field(default_factory=dict)
    pin_strength: float | None = None
    output_path: str | None = None
    workers: int = field(default_factory=_default_workers)
    jump_threshold: float = 1e-3
    eps: float = DEFAULT_EPS
    include_boundaries: bool = False
    oracle_length: int = 12

    def __post_init__(self):
        if self.theta_min >= self.theta_max:
            raise InvalidInputError("theta_min must be smaller than theta_max")
        if self.theta_steps < 1 or self.n_trials < 1:
            raise InvalidInputError("theta_steps and n_trials must be >= 1")
        if self.chi_max < 1 or self.workers < 1:
            raise InvalidInputError("chi_max and workers must be >= 1")

    def build_schedule(self) -> Schedule:
        doc = dict(self.schedule)
        if self.pin_strength is not None:
            doc["pin_strength"] = self.pin_strength
        return Schedule.from_dict(doc)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        # paths and worker counts do not change results
        doc = self.to_dict()
        for k in ("output_path", "workers"):
            doc.pop(k)
        return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


def load_config(path=None, **overrides) -> SweepConfig:
    """Config from an optional JSON file, then ``overrides`` (``None`` values are ignored)."""
    doc = {}
    if path is not None:
        doc = json.loads(Path(path).read_text())
        known = {f.name for f in dataclasses.fields(SweepConfig)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidInputError(f"unknown config fields: {sorted(unknown)}")
    doc.update({k: v for k, v in overrides.items() if v is not None})
    return SweepConfig(**doc)


# ---------------------------------------------------------------------------
# reference state


def make_reference(seed: int, period: int = 4, chi: int = 1) -> IMPS:
    if chi == 1:
        return normalize(random_product_state(seed, period))
    return random_state(seed, period, chi)


def _reference_digest(state: IMPS) -> str:
    text = json.dumps(state_to_dict(state), indent=1) + "\n"
    return hashlib.sha256(text.encode()).hexdigest()


def resolve_reference(config: SweepConfig) -> IMPS:
    if config.reference_path == "generate":
        return make_reference(config.reference_seed, config.reference_period, config.reference_chi)
    path = Path(config.reference_path)
    if not path.exists():
        raise InvalidInputError(
            f"reference file {path} not found; create it with "
            f"`bondising make-reference --seed N --out {path}` or pass --reference generate"
        )
    return load_state(path)


def cmd_make_reference(seed: int, path, period: int = 4, chi: int = 1) -> str:
    """Generate, normalize and store a random reference state; returns its SHA-256."""
    return save_state(make_reference(seed, period, chi), path)


# ---------------------------------------------------------------------------
# campaigns and sweeps


def theta_grid(config: SweepConfig) -> list[float]:
    """``theta_steps`` equally spaced points in ``[theta_min, theta_max)``."""
    step = (config.theta_max - config.theta_min) / config.theta_steps
    return [config.theta_min + k * step for k in range(config.theta_steps)]


def _header(command: str, config: SweepConfig, reference: IMPS | None) -> dict:
    head = {
        "command": command,
        "version": __version__,
        "config_sha256": config.digest(),
    }
    if reference is not None:
        head["reference_sha256"] = _reference_digest(reference)
    head["config"] = config.to_dict() | {"output_path": None, "workers": None}
    return head


def _summary(report) -> list[dict]:
    return [
        {"representative_d": c.representative_d, "count": c.count, "frequency": c.frequency}
        for c in report.clusters
    ]


@dataclass
class CampaignResult:
    records: list
    report: object
    boundary: bool
    document: CsvDocument


def cmd_campaign(config: SweepConfig) -> CampaignResult:
    """Trials at the single angle ``config.theta``; writes a CSV when ``output_path`` is set."""
    if config.theta is None:
        raise InvalidInputError("campaign needs a single theta")
    params = ModelParams(config.theta)
    boundary = params.is_boundary()
    reference = resolve_reference(config)
    records = run_campaign(
        params, config.n_trials, config.master_seed, reference, config.build_schedule(),
        chi_max=config.chi_max, workers=config.workers,
    )
    rows = []
    for r in records:
        o = r.order
        phase = PhaseLabel.BOUNDARY if boundary else o.phase
        rows.append({
            "theta": params.theta, "trial": r.trial_index, "seed": r.seed,
            "converged": r.converged, "d": r.d, "energy_per_site": r.energy_per_site,
            "m_afm": o.m_afm, "m_fm": o.m_fm, "m_even_pair": o.m_even_pair,
            "m_odd_pair": o.m_odd_pair, "phase": str(phase),
        })
    report = cluster_fidelities(records, config.eps)
    trailer = {
        "degeneracy_estimate": report.degeneracy_estimate,
        "clusters": _summary(report),
        "n_nonconverged": report.n_excluded,
    }
    notes = list(report.warnings)
    if boundary:
        notes.append(
            f"theta={params.theta!r} lies on a phase boundary: the groundstate manifold is "
            "extensively degenerate, cluster counts are not meaningful"
        )
    if notes:
        trailer["warnings"] = notes
    doc = CsvDocument(CAMPAIGN_COLUMNS, rows, _header("campaign", config, reference), trailer)
    if config.output_path:
        write_csv(config.output_path, doc)
    return CampaignResult(records, report, boundary, doc)


def _covered(a, b, tol) -> bool:
    """Every value of ``a`` has a partner in ``b`` within ``tol``."""
    return all(any(abs(x - y) <= tol for y in b) for x in a)


def find_discontinuities(thetas, representatives, threshold=1e-3, periodic=False):
    """Grid intervals across which the cluster representatives jump.

    ``representatives[k]`` is the list of cluster-representative ``d`` values
    at ``thetas[k]``, or ``None`` for skipped (boundary) points, which are
    stepped over. Two neighbouring points are continuous when one point's
    representatives are all matched within ``threshold`` by the other's; a
    missing cluster (all trials landing in one groundstate) is therefore not
    a jump. With ``periodic`` the last point is compared with the first, the
    upper end of that bracket being shifted by ``2 pi``.

    Returns a list of ``(theta_lo, theta_hi, index_lo, index_hi)``.
    """
    live = [k for k, reps in enumerate(representatives) if reps]
    pairs = list(zip(live, live[1:]))
    if periodic and len(live) > 1:
        pairs.append((live[-1], live[0]))
    brackets = []
    for i, j in pairs:
        a, b = representatives[i], representatives[j]
        if _covered(a, b, threshold) or _covered(b, a, threshold):
            continue
        hi = thetas[j] + (2 * math.pi if j <= i else 0.0)
        brackets.append((thetas[i], hi, i, j))
    return brackets


@dataclass
class SweepResult:
    thetas: list
    reports: list
    orders: list
    discontinuities: list
    document: CsvDocument


def cmd_sweep(config: SweepConfig) -> SweepResult:
    """Campaign at every grid angle against one reference, plus discontinuity detection."""
    reference = resolve_reference(config)
    schedule = config.build_schedule()
    thetas = theta_grid(config)
    periodic = abs((config.theta_max - config.theta_min) - 2 * math.pi) < 1e-12
    rows, reports, orders, reps = [], [], [], []
    for k, theta in enumerate(thetas):
        boundary = phase_of(theta) is PhaseLabel.BOUNDARY
        if boundary and not config.include_boundaries:
            rows.append({c: None for c in SWEEP_COLUMNS} | {
                "theta_index": k, "theta": theta, "boundary": True, "phase": "BOUNDARY",
            })
            reports.append(None)
            orders.append(None)
            reps.append(None)
            continue
        params = ModelParams(theta)
        records = run_campaign(
            params, config.n_trials, config.master_seed, reference, schedule,
            chi_max=config.chi_max, workers=config.workers,
        )
        report = cluster_fidelities(records, config.eps)
        by_index = {r.trial_index: r for r in records}
        cluster_orders = []
        for ci, c in enumerate(report.clusters):
            o = by_index[c.members[0]].order
            cluster_orders.append(o)
            rows.append({
                "theta_index": k, "theta": theta, "boundary": boundary,
                "n_trials": len(records), "n_converged": len(records) - report.n_excluded,
                "degeneracy": report.degeneracy_estimate, "cluster": ci,
                "d": c.representative_d, "count": c.count, "frequency": c.frequency,
                "m_afm": o.m_afm, "m_fm": o.m_fm, "m_even_pair": o.m_even_pair,
                "m_odd_pair": o.m_odd_pair,
                "phase": "BOUNDARY" if boundary else str(o.phase),
            })
        reports.append(report)
        orders.append(cluster_orders)
        reps.append(None if boundary else report.representatives)

    brackets = find_discontinuities(thetas, reps, config.jump_threshold, periodic)
    trailer = {
        "discontinuities": [
            {"theta_lo": lo, "theta_hi": hi, "index_lo": i, "index_hi": j}
            for lo, hi, i, j in brackets
        ],
        "n_discontinuities": len(brackets),
    }
    doc = CsvDocument(SWEEP_COLUMNS, rows, _header("sweep", config, reference), trailer)
    if config.output_path:
        write_csv(config.output_path, doc)
    return SweepResult(thetas, reports, orders, brackets, doc)


def cmd_oracle(config: SweepConfig) -> CsvDocument:
    """Brute-force energy per site and degeneracy at a single angle or on the sweep grid."""
    thetas = [config.theta] if config.theta is not None else theta_grid(config)
    rows = []
    for theta in thetas:
        params = ModelParams(theta)
        gm = brute_force_ground(config.oracle_length, params)
        rows.append({
            "theta": params.theta, "L": gm.length,
            "energy_per_site": gm.energy_per_site, "degeneracy": gm.degeneracy,
        })
    doc = CsvDocument(ORACLE_COLUMNS, rows, _header("oracle", config, None), {})
    if config.output_path:
        write_csv(config.output_path, doc)
    return doc


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", dest="output_path", help="output CSV path")
    p.add_argument("--workers", type=int, help=f"parallel workers (default ${WORKERS_ENV} or 1)")


def _add_run(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", dest="n_trials", type=int, help="random initial states per angle")
    p.add_argument("--chi", dest="chi_max", type=int, help="maximal bond dimension")
    p.add_argument("--seed", dest="master_seed", type=int, help="master seed for trial seeds")
    p.add_argument("--reference", dest="reference_path",
                   help="reference state file, or 'generate'")
    p.add_argument("--reference-seed", type=int, help="seed used with --reference generate")
    p.add_argument("--pin-strength", type=float, help="symmetry-breaking bias field strength")
    p.add_argument("--eps", type=float, help="fidelity clustering threshold")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta-min", type=float)
    p.add_argument("--theta-max", type=float)
    p.add_argument("--theta-steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bondising",
        description="Groundstates and phases of the bond-alternating Ising chain via iTEBD.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-reference", help="generate and store a random reference state")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--period", type=int, default=4)
    p.add_argument("--reference-chi", type=int, default=1,
                   help="bond dimension; 1 gives a product state")

    p = sub.add_parser("campaign", help="random-trial campaign at one angle")
    p.add_argument("--theta", type=float)
    _add_common(p)
    _add_run(p)

    p = sub.add_parser("sweep", help="campaigns over a theta grid with discontinuity detection")
    _add_grid(p)
    _add_common(p)
    _add_run(p)
    p.add_argument("--jump-threshold", type=float)
    p.add_argument("--include-boundaries", action="store_true", default=None)

    p = sub.add_parser("oracle", help="brute-force finite-chain energies and degeneracies")
    p.add_argument("--theta", type=float)
    _add_grid(p)
    _add_common(p)
    p.add_argument("--length", dest="oracle_length", type=int, help="chain length L (even)")
    return parser


def _config_from_args(args) -> SweepConfig:
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("command", "config", "verbose")}
    return load_config(args.config, **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "make-reference":
            digest = cmd_make_reference(args.seed, args.out, args.period, args.reference_chi)
            print(f"wrote {args.out} (sha256 {digest})")
            return 0
        config = _config_from_args(args)
        if args.command == "campaign":
            res = cmd_campaign(config)
            rep = res.report
            print(f"theta={ModelParams(config.theta).theta:.10g}: {len(res.records)} trials, "
                  f"degeneracy estimate {rep.degeneracy_estimate}")
            for c in rep.clusters:
                print(f"  d={c.representative_d:.12f}  count={c.count}  freq={c.frequency:.3f}")
            for w in res.document.trailer.get("warnings", []):
                print(f"warning: {w}", file=sys.stderr)
        elif args.command == "sweep":
            res = cmd_sweep(config)
            print(f"{len(res.thetas)} grid points, {len(res.discontinuities)} discontinuities")
            for lo, hi, _, _ in res.discontinuities:
                print(f"  jump in ({lo:.6f}, {hi:.6f})")
        elif args.command == "oracle":
            doc = cmd_oracle(config)
            for row in doc.rows:
                print(f"theta={row['theta']:.10g} L={row['L']} "
                      f"e={row['energy_per_site']:.15f} degeneracy={row['degeneracy']}")
    except (BondIsingError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
