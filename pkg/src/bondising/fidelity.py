"""Fidelity per site and random-trial degeneracy campaigns.

For two normalized infinite states the overlap on ``L`` sites scales as
``d**L``; ``d`` is read off the dominant eigenvalue ``mu`` of the mixed
transfer operator over a common unit cell of ``p`` sites as
``d = |mu| ** (1 / p)``.

A campaign evolves many random product states to groundstates and records
each one's fidelity per site against a fixed reference. Distinct
groundstates show up as distinct values of ``d``; single-linkage clustering
of those values counts them.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .imps import IMPS, mixed_transfer_eigenvalue, random_product_state
from .itebd import Schedule, evolve
from .model import ModelParams
from .orderparams import OrderParameterSet, order_parameters

__all__ = [
    "FidelityRecord",
    "Cluster",
    "DegeneracyReport",
    "fidelity_per_site",
    "trial_seed",
    "run_trial",
    "run_campaign",
    "cluster_fidelities",
]

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-6


def fidelity_per_site(a: IMPS, b: IMPS) -> float:
    """``d(a, b)`` for normalized states; equals 1 for ``a == b`` and lies in ``[0, 1]``."""
    mu = mixed_transfer_eigenvalue(a, b)
    p = math.lcm(a.period, b.period)
    return float(abs(mu) ** (1.0 / p))


@dataclass(frozen=True)
class FidelityRecord:
    trial_index: int
    seed: int
    d: float
    energy_per_site: float
    theta: float
    converged: bool = True
    order: OrderParameterSet | None = None
    sweeps: int = 0


@dataclass(frozen=True)
class Cluster:
    representative_d: float
    count: int
    frequency: float
    members: tuple = ()


@dataclass
class DegeneracyReport:
    clusters: list
    degeneracy_estimate: int
    n_excluded: int = 0
    warnings: list = field(default_factory=list)

    @property
    def representatives(self) -> list[float]:
        return [c.representative_d for c in self.clusters]

    @property
    def frequencies(self) -> list[float]:
        return [c.frequency for c in self.clusters]


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Stable 64-bit seed for trial ``trial_index``, independent of execution order."""
    if master_seed < 0 or trial_index < 0:
        raise InvalidInputError("seeds and trial indices must be non-negative")
    ss = np.random.SeedSequence([master_seed, trial_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def run_trial(
    params: ModelParams,
    trial_index: int,
    master_seed: int,
    reference: IMPS,
    schedule: Schedule | None = None,
    chi_max: int = 32,
    period: int = 4,
) -> FidelityRecord:
    """One random initial state evolved to a groundstate and compared with ``reference``."""
    seed = trial_seed(master_seed, trial_index)
    initial = random_product_state(seed, period, chi_max)
    state, report = evolve(initial, params, schedule, seed=seed)
    return FidelityRecord(
        trial_index=trial_index,
        seed=seed,
        d=fidelity_per_site(state, reference),
        energy_per_site=report.final_energy_per_site,
        theta=params.theta,
        converged=report.converged,
        order=order_parameters(state),
        sweeps=report.sweeps_used,
    )


def _run_trial_args(args):
    return run_trial(*args)


def run_campaign(
    params: ModelParams,
    n_trials: int,
    master_seed: int,
    reference: IMPS,
    schedule: Schedule | None = None,
    *,
    chi_max: int = 32,
    workers: int = 1,
) -> list[FidelityRecord]:
    """``n_trials`` independent trials, returned in trial order.

    With ``workers > 1`` trials run in a process pool; results do not depend
    on the worker count.
    """
    if n_trials < 1:
        raise InvalidInputError(f"n_trials must be >= 1, got {n_trials}")
    args = [(params, n, master_seed, reference, schedule, chi_max) for n in range(n_trials)]
    if workers > 1 and n_trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_trial_args, args))
    else:
        records = [run_trial(*a) for a in args]
    for r in records:
        if not r.converged:
            log.warning("trial %d (seed %d) did not converge", r.trial_index, r.seed)
    return records


def cluster_fidelities(records, eps: float = DEFAULT_EPS) -> DegeneracyReport:
    """Single-linkage clustering of the ``d`` values of converged records.

    Sorted values closer than ``eps`` to a neighbour share a cluster. The
    representative is the cluster mean. Clusters are returned in ascending
    order of ``d``.

    Raises
    ------
    InvalidInputError
        If no converged record is left to cluster.
    """
    if eps <= 0:
        raise InvalidInputError(f"eps must be positive, got {eps}")
    records = list(records)
    usable = [r for r in records if r.converged]
    if not usable:
        raise InvalidInputError("no converged records to cluster")
    usable.sort(key=lambda r: r.d)

    groups = [[usable[0]]]
    for r in usable[1:]:
        if r.d - groups[-1][-1].d <= eps:
            groups[-1].append(r)
        else:
            groups.append([r])

    total = len(usable)
    clusters = [
        Cluster(
            representative_d=float(np.mean([r.d for r in g])),
            count=len(g),
            frequency=len(g) / total,
            members=tuple(sorted(r.trial_index for r in g)),
        )
        for g in groups
    ]
    report = DegeneracyReport(clusters, len(clusters), n_excluded=len(records) - total)
    reps = report.representatives
    if any(b - a < 10 * eps for a, b in zip(reps, reps[1:])):
        msg = (
            "cluster representatives lie within 10*eps of each other; the reference state "
            "may be nearly symmetric, consider a different reference seed"
        )
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        report.warnings.append(msg)
    return report
