"""Brute-force ground manifold of finite periodic chains.

The Hamiltonian is diagonal in the sigma^z basis, so every eigenstate is a
classical configuration and the ground manifold follows from enumerating
all ``2**L`` of them. Configurations are integers; bit ``k`` set means site
``k`` points down.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .model import ModelParams

__all__ = ["GroundManifold", "spins", "config_energy", "brute_force_ground", "oracle_observables"]

MAX_LENGTH = 24
_CHUNK = 1 << 20
_ENERGY_TOL = 1e-12


@dataclass(frozen=True)
class GroundManifold:
    length: int
    theta: float
    energy_per_site: float
    configurations: tuple = field(default_factory=tuple)

    @property
    def degeneracy(self) -> int:
        return len(self.configurations)


def spins(config: int, length: int) -> np.ndarray:
    """``+1`` / ``-1`` array for a configuration integer."""
    bits = (config >> np.arange(length)) & 1
    return 1 - 2 * bits


def _couplings(params: ModelParams, length: int) -> np.ndarray:
    # bond k joins sites k and k+1 (mod L); even k carries J, odd k carries J'
    return np.where(np.arange(length) % 2 == 0, params.j_even, params.j_odd)


def config_energy(config: int, length: int, params: ModelParams) -> float:
    """Total energy ``sum_k c_k s_k s_{k+1} / 4`` with periodic boundary."""
    s = spins(config, length)
    return float(np.sum(_couplings(params, length) * s * np.roll(s, -1)) / 4)


def brute_force_ground(length: int, params: ModelParams) -> GroundManifold:
    """Minimum energy per site and every minimizing configuration of a periodic chain.

    Raises
    ------
    InvalidInputError
        If ``length`` is odd, smaller than 2 or larger than 24.
    """
    if length % 2 or not 2 <= length <= MAX_LENGTH:
        raise InvalidInputError(f"length must be even and in [2, {MAX_LENGTH}], got {length}")
    c = _couplings(params, length)
    best = np.inf
    minimizers: list[np.ndarray] = []
    total = 1 << length
    for start in range(0, total, _CHUNK):
        configs = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        s = 1 - 2 * ((configs[:, None] >> np.arange(length)) & 1)
        e = (s * np.roll(s, -1, axis=1)) @ c / 4
        m = e.min()
        if m < best - _ENERGY_TOL:
            best = m
            minimizers = []
        if m <= best + _ENERGY_TOL:
            minimizers.append(configs[e <= best + _ENERGY_TOL])
            best = min(best, m)
    # a later chunk may have lowered best slightly within tolerance; re-filter
    confs = np.sort(np.concatenate(minimizers))
    energies = np.array([config_energy(int(x), length, params) for x in confs])
    emin = energies.min()
    confs = confs[energies <= emin + _ENERGY_TOL]
    return GroundManifold(length, params.theta, float(emin / length), tuple(int(x) for x in confs))


def oracle_observables(manifold: GroundManifold, config_index: int):
    """Correlations and order parameters of one ground configuration.

    Returns
    -------
    correlations : ndarray
        ``s_0 s_r`` for ``r = 0 .. L/2``.
    order_params : tuple of float
        ``(m_afm, m_fm, m_even_pair, m_odd_pair)`` with site 0 as the even anchor.
    """
    if not 0 <= config_index < manifold.degeneracy:
        raise InvalidInputError(
            f"config_index {config_index} outside [0, {manifold.degeneracy})"
        )
    n = manifold.length
    s = spins(manifold.configurations[config_index], n)
    corr = np.array([s[0] * s[r % n] for r in range(n // 2 + 1)], dtype=float)

    def mf(k):
        return (s[k % n] + s[(k + 1) % n]) / 2

    def maf(k):
        return (s[k % n] - s[(k + 1) % n]) / 2

    order = (
        (maf(0) + maf(2)) / 2,
        (mf(0) + mf(2)) / 2,
        (mf(0) - mf(2)) / 2,
        (mf(1) - mf(3)) / 2,
    )
    return corr, tuple(float(x) for x in order)
