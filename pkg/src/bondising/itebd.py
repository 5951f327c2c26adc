"""Imaginary-time evolving block decimation on a periodic iMPS."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import InvalidInputError
from .imps import IMPS, canonicalize, normalize
from .linalg import truncated_svd
from .model import ModelParams, bond_hamiltonian, bond_parity, energy_per_site

__all__ = [
    "Schedule",
    "EvolutionReport",
    "bond_gate",
    "apply_gate",
    "sweep",
    "pin_fields",
    "evolve",
]

log = logging.getLogger(__name__)

# 1/lambda is replaced by 0 for Schmidt values below this floor
INVERSE_FLOOR = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Annealing schedule for :func:`evolve`.

    Parameters
    ----------
    dtau_steps : tuple of (float, int)
        ``(dtau, max_sweeps)`` stages with strictly decreasing ``dtau``.
    energy_tol, lambda_tol : float
        A stage has converged once the energy per site and every Schmidt
        vector change by less than these between consecutive sweeps.
    pin_strength : float
        Largest magnitude of the random sigma^z bias fields added during the
        first ``pin_sweeps`` sweeps.
    pin_sweeps : int
        Number of biased sweeps.
    svd_cutoff : float
        Relative singular value cutoff used in every bond update.
    """

    # all bond terms commute, so a large leading step carries no Trotter error and
    # removes domain walls on weak bonds quickly near the phase boundaries
    dtau_steps: tuple = ((5.0, 2000), (0.5, 2000), (0.1, 2000), (0.01, 2000), (0.001, 2000))
    energy_tol: float = 1e-10
    lambda_tol: float = 1e-10
    pin_strength: float = 1e-3
    pin_sweeps: int = 50
    svd_cutoff: float = 1e-10

    def __post_init__(self):
        steps = tuple((float(dt), int(n)) for dt, n in self.dtau_steps)
        if not steps:
            raise InvalidInputError("schedule needs at least one stage")
        dts = [dt for dt, _ in steps]
        if any(dt <= 0 for dt in dts) or any(b >= a for a, b in zip(dts, dts[1:])):
            raise InvalidInputError(f"dtau values must be positive and strictly decreasing: {dts}")
        if any(n < 1 for _, n in steps):
            raise InvalidInputError("max_sweeps must be >= 1 in every stage")
        if self.energy_tol <= 0 or self.lambda_tol <= 0:
            raise InvalidInputError("tolerances must be positive")
        if self.pin_strength < 0 or self.pin_sweeps < 0:
            raise InvalidInputError("pin_strength and pin_sweeps must be non-negative")
        object.__setattr__(self, "dtau_steps", steps)

    @classmethod
    def from_dict(cls, doc: dict) -> "Schedule":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(doc) - known
        if unknown:
            raise InvalidInputError(f"unknown schedule fields: {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return {
            "dtau_steps": [list(s) for s in self.dtau_steps],
            "energy_tol": self.energy_tol,
            "lambda_tol": self.lambda_tol,
            "pin_strength": self.pin_strength,
            "pin_sweeps": self.pin_sweeps,
            "svd_cutoff": self.svd_cutoff,
        }


@dataclass
class EvolutionReport:
    converged: bool
    final_energy_per_site: float
    energy_history: list = field(default_factory=list)
    max_truncation_error: float = 0.0
    sweeps_used: int = 0
    regularized: bool = False


def bond_gate(h, dtau: float) -> np.ndarray:
    """``exp(-dtau h)``; elementwise on the diagonal when ``h`` is diagonal."""
    h = np.asarray(h)
    if dtau <= 0:
        raise InvalidInputError(f"dtau must be positive, got {dtau}")
    if not np.allclose(h, h.conj().T, atol=1e-12, rtol=0):
        raise InvalidInputError("bond Hamiltonian is not Hermitian")
    if np.count_nonzero(h - np.diag(np.diagonal(h))) == 0:
        return np.diag(np.exp(-dtau * np.diagonal(h)))
    return scipy.linalg.expm(-dtau * h)


def _inverse(lam: np.ndarray) -> tuple[np.ndarray, bool]:
    small = lam < INVERSE_FLOOR
    inv = np.where(small, 0.0, 1.0 / np.where(small, 1.0, lam))
    return inv, bool(np.any(small))


def apply_gate(state: IMPS, gate, bond: int, cutoff: float = 1e-10, *, report=None):
    """Vidal two-site update on ``bond`` (sites ``bond`` and ``bond + 1``).

    Returns the updated state and the relative truncation error. Schmidt
    values below ``INVERSE_FLOOR`` are pseudo-inverted to zero when restoring
    Gamma-lambda form; if ``report`` is given its ``regularized`` flag is set.
    """
    p = state.period
    if p < 2:
        raise InvalidInputError("two-site updates need a unit cell of at least 2 sites")
    if not 0 <= bond < p:
        raise InvalidInputError(f"bond {bond} outside [0, {p})")
    gate = np.asarray(gate, dtype=complex)
    if gate.shape != (4, 4):
        raise InvalidInputError(f"gate must be 4x4, got {gate.shape}")

    i, j = bond, (bond + 1) % p
    lam_l, lam_m, lam_r = state.lambdas[i - 1], state.lambdas[i], state.lambdas[j]
    g_i, g_j = state.gammas[i], state.gammas[j]
    chi_l, chi_r = g_i.shape[0], g_j.shape[2]

    left = lam_l[:, None, None] * g_i * lam_m[None, None, :]
    right = g_j * lam_r[None, None, :]
    theta = np.tensordot(left, right, axes=(2, 0)).reshape(chi_l, 4, chi_r)
    theta = np.einsum("us,asc->auc", gate, theta)
    res = truncated_svd(theta.reshape(chi_l * 2, 2 * chi_r), state.chi_max, cutoff)
    k = res.rank
    inv_l, reg_l = _inverse(lam_l)
    inv_r, reg_r = _inverse(lam_r)
    if (reg_l or reg_r):
        log.warning("Schmidt values below %g pseudo-inverted on bond %d", INVERSE_FLOOR, bond)
        if report is not None:
            report.regularized = True
    new_i = inv_l[:, None, None] * res.u.reshape(chi_l, 2, k)
    new_j = res.vh.reshape(k, 2, chi_r) * inv_r[None, None, :]
    new_lam = res.s / np.linalg.norm(res.s)

    gammas = list(state.gammas)
    lambdas = list(state.lambdas)
    gammas[i], gammas[j] = new_i, new_j
    lambdas[i] = new_lam
    return state.replace(gammas=tuple(gammas), lambdas=tuple(lambdas)), res.truncation_error


def pin_fields(seed: int, p: int, strength: float) -> np.ndarray:
    """Seeded random sigma^z bias fields, uniform in ``[-strength, strength]``."""
    rng = np.random.default_rng([seed, 0x5049])
    return strength * rng.uniform(-1.0, 1.0, p)


def _gates(params: ModelParams, p: int, dtau: float, fields=None):
    z_left = np.diag([1.0, 1.0, -1.0, -1.0])
    gates = []
    for b in range(p):
        h = bond_hamiltonian(params, bond_parity(b))
        if fields is not None:
            # site b's field rides on the bond it starts
            h = h + fields[b] * z_left
        gates.append(bond_gate(h, dtau))
    return gates


def sweep(state: IMPS, gates, cutoff: float = 1e-10, report=None) -> tuple[IMPS, float]:
    """Even bonds, then odd bonds. Returns the new state and the largest truncation error."""
    worst = 0.0
    p = state.period
    for b in list(range(0, p, 2)) + list(range(1, p, 2)):
        state, err = apply_gate(state, gates[b], b, cutoff, report=report)
        worst = max(worst, err)
    return state, worst


def _lambda_change(old: IMPS, new: IMPS) -> float:
    diff = 0.0
    for a, b in zip(old.lambdas, new.lambdas):
        n = max(len(a), len(b))
        pa = np.zeros(n)
        pb = np.zeros(n)
        pa[: len(a)] = a
        pb[: len(b)] = b
        diff = max(diff, float(np.max(np.abs(pa - pb))))
    return diff


def evolve(initial: IMPS, params: ModelParams, schedule: Schedule | None = None, seed: int = 0):
    """Drive ``initial`` towards a groundstate by imaginary-time evolution.

    Each stage of the schedule sweeps until the energy per site and the
    Schmidt spectra stop changing (within the schedule tolerances) or until
    its sweep budget runs out. The first ``pin_sweeps`` sweeps carry seeded
    random longitudinal bias fields which select one symmetry-broken
    groundstate; convergence is never declared while they are on.

    Returns
    -------
    state : IMPS
        Final state, normalized and in canonical form.
    report : EvolutionReport
    """
    schedule = schedule or Schedule()
    p = initial.period
    if p % 2:
        raise InvalidInputError(f"unit cell must have even length, got {p}")
    fields = None
    n_pin = 0
    if schedule.pin_strength > 0 and schedule.pin_sweeps > 0:
        fields = pin_fields(seed, p, schedule.pin_strength)
        n_pin = schedule.pin_sweeps

    report = EvolutionReport(converged=False, final_energy_per_site=float("nan"))
    state = normalize(initial)
    energy = energy_per_site(state, params)
    total = 0
    stage_converged = False
    for dtau, max_sweeps in schedule.dtau_steps:
        plain = _gates(params, p, dtau)
        pinned = _gates(params, p, dtau, fields) if fields is not None else plain
        stage_converged = False
        for _ in range(max_sweeps):
            pinning = total < n_pin
            new, err = sweep(state, pinned if pinning else plain, schedule.svd_cutoff, report)
            new = normalize(new)
            total += 1
            new_energy = energy_per_site(new, params)
            report.energy_history.append(new_energy)
            report.max_truncation_error = max(report.max_truncation_error, err)
            d_energy = abs(new_energy - energy)
            d_lambda = _lambda_change(state, new)
            state, energy = new, new_energy
            if (
                not pinning
                and total > n_pin
                and d_energy < schedule.energy_tol
                and d_lambda < schedule.lambda_tol
            ):
                stage_converged = True
                break
        log.debug("dtau=%g: %s after %d sweeps, E=%.15f", dtau,
                  "converged" if stage_converged else "not converged", total, energy)

    # imaginary-time updates can leave near-zero Schmidt values carrying a
    # decoupled non-dominant block; canonical form removes it
    state = canonicalize(state, schedule.svd_cutoff)
    report.converged = stage_converged
    report.final_energy_per_site = energy_per_site(state, params)
    report.sweeps_used = total
    return state, report
