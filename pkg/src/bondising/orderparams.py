"""Local magnetizations, the four four-site order parameters and phase classification.

With ``s_k = <sigma^z_k>`` and the cell anchored at the even site 0,

    M^F_k  = (s_k + s_{k+1}) / 2          M^AF_k = (s_k - s_{k+1}) / 2
    m_afm       = (M^AF_0 + M^AF_2) / 2
    m_fm        = (M^F_0  + M^F_2)  / 2
    m_even_pair = (M^F_0  - M^F_2)  / 2
    m_odd_pair  = (M^F_1  - M^F_3)  / 2

``m_even_pair`` compares aligned pairs that sit on even (``J``) bonds, which
is the ordering of phase II (ferromagnetic ``J < 0``, antiferromagnetic
``J' > 0``); ``m_odd_pair`` compares pairs on odd (``J'``) bonds, the
ordering of phase IV. Phase labels follow the Hamiltonian's bond parity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidInputError
from .imps import IMPS, SIGMA_Z, expectation
from .model import PhaseLabel

__all__ = [
    "OrderParameterSet",
    "ORDER_PHASES",
    "local_magnetizations",
    "order_parameters",
    "order_parameters_from_sz",
    "classify",
]

# phase signalled by each order parameter, in field order
ORDER_PHASES = (
    PhaseLabel.I_AFM,
    PhaseLabel.III_FM,
    PhaseLabel.II_ODD_AFM,
    PhaseLabel.IV_EVEN_AFM,
)


@dataclass(frozen=True)
class OrderParameterSet:
    m_afm: float
    m_fm: float
    m_even_pair: float
    m_odd_pair: float
    phase: PhaseLabel = PhaseLabel.BOUNDARY

    def values(self) -> tuple[float, float, float, float]:
        return (self.m_afm, self.m_fm, self.m_even_pair, self.m_odd_pair)


def local_magnetizations(state: IMPS, i: int = 0) -> tuple[list[float], list[float]]:
    """``M^F_k`` and ``M^AF_k`` for ``k = i .. i+3`` (unit-cell indices taken cyclically)."""
    if i % 2:
        raise InvalidInputError(f"anchor site must be even, got {i}")
    p = state.period
    sz = [expectation(state, SIGMA_Z, (i + k) % p) for k in range(5)]
    m_f = [(sz[k] + sz[k + 1]) / 2 for k in range(4)]
    m_af = [(sz[k] - sz[k + 1]) / 2 for k in range(4)]
    return m_f, m_af


def _combine(m_f, m_af) -> tuple[float, float, float, float]:
    return (
        (m_af[0] + m_af[2]) / 2,
        (m_f[0] + m_f[2]) / 2,
        (m_f[0] - m_f[2]) / 2,
        (m_f[1] - m_f[3]) / 2,
    )


def classify(values, threshold: float = 0.5) -> PhaseLabel:
    """Phase whose order parameter alone exceeds ``threshold`` in magnitude, else ``BOUNDARY``."""
    if not 0 < threshold < 1:
        raise InvalidInputError(f"threshold must lie in (0, 1), got {threshold}")
    values = tuple(values)
    if len(values) != 4:
        raise InvalidInputError(f"expected four order parameters, got {len(values)}")
    firing = [k for k, v in enumerate(values) if abs(v) > threshold]
    if len(firing) != 1:
        return PhaseLabel.BOUNDARY
    return ORDER_PHASES[firing[0]]


def order_parameters_from_sz(sz, threshold: float = 0.5) -> OrderParameterSet:
    """Order parameters from five consecutive ``<sigma^z>`` values starting at an even site."""
    sz = list(sz)
    if len(sz) != 5:
        raise InvalidInputError(f"need five magnetizations (sites 0..4), got {len(sz)}")
    m_f = [(sz[k] + sz[k + 1]) / 2 for k in range(4)]
    m_af = [(sz[k] - sz[k + 1]) / 2 for k in range(4)]
    vals = _combine(m_f, m_af)
    return OrderParameterSet(*vals, phase=classify(vals, threshold))


def order_parameters(state: IMPS, threshold: float = 0.5) -> OrderParameterSet:
    m_f, m_af = local_magnetizations(state, 0)
    vals = _combine(m_f, m_af)
    return OrderParameterSet(*vals, phase=classify(vals, threshold))
