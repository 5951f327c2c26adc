"""The spin-1/2 bond-alternating Ising chain.

    H = sum_i ( J' S^z_{2i-1} S^z_{2i} + J S^z_{2i} S^z_{2i+1} ),
    J = cos(theta),  J' = sin(theta).

Site 0 is an even site, so bond ``(0, 1)`` carries ``J`` ("even" bond) and
bond ``(1, 2)`` carries ``J'`` ("odd" bond). The Hamiltonian is written with
``S^z`` (eigenvalues +-1/2); observables elsewhere use ``sigma^z = 2 S^z``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryError, InvalidInputError
from .imps import IMPS, basis_state, bond_expectation

__all__ = [
    "BOUNDARY_TOL",
    "ModelParams",
    "PhaseLabel",
    "phase_of",
    "bond_hamiltonian",
    "bond_parity",
    "exact_patterns",
    "exact_ground_pair",
    "exact_energy_per_site",
    "energy_per_site",
]

BOUNDARY_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class PhaseLabel(str, enum.Enum):
    I_AFM = "I_AFM"
    II_ODD_AFM = "II_ODD_AFM"
    III_FM = "III_FM"
    IV_EVEN_AFM = "IV_EVEN_AFM"
    BOUNDARY = "BOUNDARY"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ModelParams:
    """Coupling angle; ``theta`` is reduced to ``[0, 2 pi)`` on construction."""

    theta: float

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise InvalidInputError(f"theta must be finite, got {self.theta}")
        t = math.fmod(self.theta, TWO_PI)
        if t < 0:
            t += TWO_PI
        if t >= TWO_PI:
            t = 0.0
        object.__setattr__(self, "theta", t)

    @property
    def j_even(self) -> float:
        """``J``, on bonds ``(2i, 2i+1)``."""
        return math.cos(self.theta)

    @property
    def j_odd(self) -> float:
        """``J'``, on bonds ``(2i-1, 2i)``."""
        return math.sin(self.theta)

    @property
    def phase(self) -> "PhaseLabel":
        return phase_of(self.theta)

    def is_boundary(self, tol: float = BOUNDARY_TOL) -> bool:
        return phase_of(self.theta, tol) is PhaseLabel.BOUNDARY


_QUADRANTS = (PhaseLabel.I_AFM, PhaseLabel.II_ODD_AFM, PhaseLabel.III_FM, PhaseLabel.IV_EVEN_AFM)


def phase_of(theta: float, tol: float = BOUNDARY_TOL) -> PhaseLabel:
    """Phase from the quadrant of ``theta``; ``BOUNDARY`` within ``tol`` of a multiple of pi/2."""
    t = ModelParams(theta).theta
    q = t / (math.pi / 2)
    nearest = round(q)
    if abs(t - nearest * math.pi / 2) < tol:
        return PhaseLabel.BOUNDARY
    return _QUADRANTS[int(math.floor(q)) % 4]


def bond_parity(bond: int) -> str:
    """``"even"`` for bonds starting on an even site, else ``"odd"``."""
    return "even" if bond % 2 == 0 else "odd"


def bond_hamiltonian(params: ModelParams, parity: str) -> np.ndarray:
    """``c S^z S^z`` on one bond, basis ``(uu, ud, du, dd)``; ``c`` is ``J`` or ``J'``."""
    if parity == "even":
        c = params.j_even
    elif parity == "odd":
        c = params.j_odd
    else:
        raise InvalidInputError(f"parity must be 'even' or 'odd', got {parity!r}")
    return np.diag([c / 4, -c / 4, -c / 4, c / 4]).astype(float)


# sigma^z patterns over the four-site cell, first member of each pair
_PATTERNS = {
    PhaseLabel.I_AFM: (1, -1, 1, -1),
    PhaseLabel.II_ODD_AFM: (1, 1, -1, -1),
    PhaseLabel.III_FM: (1, 1, 1, 1),
    PhaseLabel.IV_EVEN_AFM: (1, -1, -1, 1),
}


def exact_patterns(params: ModelParams) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """The two classical groundstate configurations on the four-site cell."""
    phase = params.phase
    if phase is PhaseLabel.BOUNDARY:
        raise BoundaryError(
            f"theta={params.theta!r} is a phase boundary; the groundstate is extensively degenerate"
        )
    first = _PATTERNS[phase]
    return first, tuple(-s for s in first)


def exact_ground_pair(params: ModelParams, chi_max: int = 32) -> tuple[IMPS, IMPS]:
    """The two symmetry-broken product groundstates as period-4 states.

    Raises
    ------
    BoundaryError
        If ``theta`` lies on a phase boundary.
    """
    a, b = exact_patterns(params)
    return basis_state(a, chi_max), basis_state(b, chi_max)


def exact_energy_per_site(params: ModelParams) -> float:
    """``-(|J| + |J'|) / 8``: every bond satisfied, one bond per site."""
    return -(abs(params.j_even) + abs(params.j_odd)) / 8.0


def energy_per_site(state: IMPS, params: ModelParams) -> float:
    """Average bond energy over the unit cell (one bond per site)."""
    p = state.period
    if p % 2:
        raise InvalidInputError(f"unit cell must have even length, got {p}")
    h = {par: bond_hamiltonian(params, par) for par in ("even", "odd")}
    return sum(bond_expectation(state, h[bond_parity(b)], b) for b in range(p)) / p
