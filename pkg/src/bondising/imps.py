"""Infinite matrix product states with a periodic unit cell.

States are stored in Vidal's Gamma-lambda form. For a unit cell of ``p``
sites, ``gammas[k]`` has legs ``(left bond, physical, right bond)`` and
``lambdas[k]`` holds the Schmidt coefficients of the bond to the *right* of
site ``k``; the bond to the left of site ``k`` is therefore bond ``k - 1``
(cyclically). Physical index 0 is spin up, index 1 is spin down.

Expectation values and overlaps never assume canonical form. They are built
from the dominant left/right fixed points of the unit-cell transfer operator,
so states coming out of approximate imaginary-time updates are handled
correctly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse.linalg

from .errors import ConvergenceError, DegenerateStateError, InvalidInputError
from .linalg import dense_dominant_eigenpair, dominant_eigenpair, truncated_svd

__all__ = [
    "SIGMA_Z",
    "SIGMA_X",
    "IDENTITY",
    "SPIN_FLIP",
    "IMPS",
    "product_state",
    "basis_state",
    "random_product_state",
    "random_state",
    "normalize",
    "canonicalize",
    "expectation",
    "correlation",
    "bond_expectation",
    "symmetry_transform",
    "mixed_transfer_eigenvalue",
    "state_to_dict",
    "state_from_dict",
    "save_state",
    "load_state",
]

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
SPIN_FLIP = SIGMA_X

# Transfer operators with at most this many entries per vector are diagonalized densely.
DENSE_LIMIT = 64

FORMAT_NAME = "bondising.imps"
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class IMPS:
    """Periodic infinite MPS in Gamma-lambda form.

    Instances are immutable: the constructor copies the arrays and marks them
    read-only. All operations return new states.
    """

    gammas: tuple
    lambdas: tuple
    chi_max: int = 32

    def __post_init__(self):
        gammas = tuple(np.array(g, dtype=complex) for g in self.gammas)
        lambdas = tuple(np.array(lam, dtype=float).reshape(-1) for lam in self.lambdas)
        p = len(gammas)
        if p < 1 or len(lambdas) != p:
            raise InvalidInputError(
                f"need equally many gammas and lambdas (>= 1), got {len(gammas)} and {len(lambdas)}"
            )
        for k, g in enumerate(gammas):
            left, right = len(lambdas[k - 1]), len(lambdas[k])
            if g.shape != (left, 2, right):
                raise InvalidInputError(
                    f"gamma {k} has shape {g.shape}, expected {(left, 2, right)}"
                )
            if not np.all(np.isfinite(g)):
                raise InvalidInputError(f"gamma {k} has non-finite entries")
        for k, lam in enumerate(lambdas):
            if np.any(lam < 0) or not np.all(np.isfinite(lam)):
                raise InvalidInputError(f"lambda {k} must be finite and non-negative")
        for arr in gammas + lambdas:
            arr.setflags(write=False)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def period(self) -> int:
        return len(self.gammas)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        return tuple(len(lam) for lam in self.lambdas)

    def site_tensor(self, k: int) -> np.ndarray:
        """``Gamma_k lambda_k``, the site tensor with its right bond weight absorbed."""
        k %= self.period
        return self.gammas[k] * self.lambdas[k][None, None, :]

    def replace(self, gammas=None, lambdas=None, chi_max=None) -> "IMPS":
        return IMPS(
            self.gammas if gammas is None else gammas,
            self.lambdas if lambdas is None else lambdas,
            self.chi_max if chi_max is None else chi_max,
        )

    def tiled(self, period: int) -> "IMPS":
        """The same state described with a unit cell of ``period`` sites."""
        if period % self.period:
            raise InvalidInputError(f"period {period} is not a multiple of {self.period}")
        reps = period // self.period
        return IMPS(self.gammas * reps, self.lambdas * reps, self.chi_max)

    @cached_property
    def _environments(self):
        return _environments(self)

    def __repr__(self):
        return f"IMPS(period={self.period}, bond_dims={self.bond_dims}, chi_max={self.chi_max})"


# ---------------------------------------------------------------------------
# construction


def product_state(amplitudes, chi_max: int = 32) -> IMPS:
    """Bond-dimension-one state from per-site ``(up, down)`` amplitudes, shape ``(p, 2)``."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.ndim != 2 or amps.shape[1] != 2 or amps.shape[0] < 1:
        raise InvalidInputError(f"amplitudes must have shape (p, 2), got {amps.shape}")
    norms = np.linalg.norm(amps, axis=1)
    if np.any(norms == 0):
        raise DegenerateStateError("a site has zero amplitude vector")
    amps = amps / norms[:, None]
    gammas = [a.reshape(1, 2, 1) for a in amps]
    lambdas = [np.ones(1) for _ in amps]
    return IMPS(tuple(gammas), tuple(lambdas), chi_max)


def basis_state(spins: Sequence[int], chi_max: int = 32) -> IMPS:
    """Classical configuration from a sequence of ``+1`` (up) / ``-1`` (down)."""
    amps = []
    for s in spins:
        if s not in (1, -1):
            raise InvalidInputError(f"spins must be +1 or -1, got {s!r}")
        amps.append([1.0, 0.0] if s == 1 else [0.0, 1.0])
    return product_state(amps, chi_max)


def random_product_state(seed: int, p: int = 4, chi_max: int = 32) -> IMPS:
    """Product state with independent real Gaussian amplitudes on each of ``p`` sites."""
    if p < 1:
        raise InvalidInputError(f"period must be >= 1, got {p}")
    rng = np.random.default_rng(seed)
    return product_state(rng.standard_normal((p, 2)), chi_max)


def random_state(seed: int, p: int = 4, chi: int = 2, chi_max: int = 32) -> IMPS:
    """Normalized entangled state with complex Gaussian tensors of bond dimension ``chi``."""
    if p < 1 or chi < 1:
        raise InvalidInputError("period and chi must be >= 1")
    rng = np.random.default_rng(seed)
    gammas = [rng.standard_normal((chi, 2, chi)) + 1j * rng.standard_normal((chi, 2, chi))
              for _ in range(p)]
    lambdas = []
    for _ in range(p):
        lam = np.sort(rng.uniform(0.1, 1.0, chi))[::-1]
        lambdas.append(lam / np.linalg.norm(lam))
    return normalize(IMPS(tuple(gammas), tuple(lambdas), max(chi_max, chi)))


# ---------------------------------------------------------------------------
# transfer operators


def _site_transfer(a_tensor, b_tensor, op=None) -> np.ndarray:
    """Single-site transfer matrix mapping right-bond vectors to left-bond vectors.

    The result has shape ``(la * lb, ra * rb)``. With ``op`` the physical legs
    are joined through ``<t| op |s>`` (ket from ``a``, bra from ``b``).
    """
    la, _, ra = a_tensor.shape
    lb, _, rb = b_tensor.shape
    if op is None:
        t = np.einsum("asb,csd->acbd", a_tensor, b_tensor.conj())
    else:
        t = np.einsum("ts,asb,ctd->acbd", op, a_tensor, b_tensor.conj())
    return t.reshape(la * lb, ra * rb)


def _cell_tensors(a: IMPS, b: IMPS):
    if a.period != b.period:
        p = math.lcm(a.period, b.period)
        a, b = a.tiled(p), b.tiled(p)
    return [a.site_tensor(k) for k in range(a.period)], [b.site_tensor(k) for k in range(b.period)]


def _right_apply(a_t, b_t, x):
    # x has shape (ra, rb); result (la, lb)
    t = np.tensordot(a_t, x, axes=(2, 0))
    return np.tensordot(t, b_t.conj(), axes=([1, 2], [1, 2]))


def _left_apply(a_t, b_t, y):
    # y has shape (la, lb); result (ra, rb)
    t = np.tensordot(y, a_t, axes=(0, 0))
    return np.tensordot(t, b_t.conj(), axes=([0, 1], [0, 1]))


def _with_op(op, a_t):
    """Site tensor with ``op`` applied to its physical leg."""
    return np.tensordot(op, a_t, axes=(1, 1)).transpose(1, 0, 2)


def _cell_fixed_points(a_ts, b_ts):
    """Dominant eigenvalue and left/right fixed points on the bond right of the last site.

    The right fixed point solves ``T_0 T_1 ... T_{p-1} r = mu r``; the left one
    solves ``l^T T_0 ... T_{p-1} = mu l^T``.
    """
    ra, rb = a_ts[-1].shape[2], b_ts[-1].shape[2]
    n = ra * rb
    if n <= DENSE_LIMIT:
        mats = [_site_transfer(x, y) for x, y in zip(a_ts, b_ts)]
        cell = reduce(np.matmul, mats)
        mu, r = dense_dominant_eigenpair(cell)
        if abs(mu) == 0.0:
            return 0j, np.zeros(n, complex), np.zeros(n, complex)
        _, l = dense_dominant_eigenpair(cell.T)
        return mu, l, r

    def right_map(v):
        x = v.reshape(ra, rb)
        for x_t, y_t in zip(reversed(a_ts), reversed(b_ts)):
            x = _right_apply(x_t, y_t, x)
        return x.reshape(-1)

    def left_map(v):
        y = v.reshape(ra, rb)
        for x_t, y_t in zip(a_ts, b_ts):
            y = _left_apply(x_t, y_t, y)
        return y.reshape(-1)

    try:
        mu, r = dominant_eigenpair(right_map, n, tol=1e-13, max_iter=20_000, seed=0)
        _, l = dominant_eigenpair(left_map, n, tol=1e-13, max_iter=20_000, seed=1)
    except ConvergenceError:
        # magnitude ties stall plain power iteration; Arnoldi resolves them
        op_r = scipy.sparse.linalg.LinearOperator((n, n), matvec=right_map, dtype=complex)
        op_l = scipy.sparse.linalg.LinearOperator((n, n), matvec=left_map, dtype=complex)
        vals, vecs = scipy.sparse.linalg.eigs(op_r, k=1, which="LM", tol=1e-13)
        mu, r = complex(vals[0]), vecs[:, 0]
        _, lvecs = scipy.sparse.linalg.eigs(op_l, k=1, which="LM", tol=1e-13)
        l = lvecs[:, 0]
    return mu, l, r


def mixed_transfer_eigenvalue(a: IMPS, b: IMPS) -> complex:
    """Dominant eigenvalue of the unit-cell transfer operator built from ``a`` and ``conj(b)``.

    For normalized states ``|mu|**(1/p)`` is the overlap per site, with ``p``
    the common unit cell (the least common multiple of both periods).
    """
    a_ts, b_ts = _cell_tensors(a, b)
    mu, _, _ = _cell_fixed_points(a_ts, b_ts)
    return mu


def _environments(state: IMPS):
    """Left and right fixed points of the self transfer operator on every bond.

    ``lefts[k]`` and ``rights[k]`` are ``(chi_k, chi_k)`` matrices living on
    bond ``k``. They are propagated from bond ``p - 1`` so all of them are
    mutually consistent up to scalar factors, which cancel in every ratio
    formed by :func:`_sandwich`.
    """
    ts = [state.site_tensor(k) for k in range(state.period)]
    mu, l_vec, r_vec = _cell_fixed_points(ts, ts)
    if abs(mu) == 0.0:
        raise DegenerateStateError("state has zero norm")
    p = state.period
    chi = state.bond_dims
    rights = [None] * p
    lefts = [None] * p
    rights[p - 1] = r_vec.reshape(chi[p - 1], chi[p - 1])
    lefts[p - 1] = l_vec.reshape(chi[p - 1], chi[p - 1])
    for k in range(p - 1, 0, -1):
        rights[k - 1] = _right_apply(ts[k], ts[k], rights[k])
    for k in range(0, p - 1):
        lefts[k] = _left_apply(ts[k], ts[k], lefts[k - 1])
    return mu, lefts, rights, ts


def _sandwich(state: IMPS, start: int, ops: Sequence) -> complex:
    """``<O_start O_start+1 ...>`` for a string of single-site operators (``None`` = identity)."""
    _, lefts, rights, ts = state._environments
    p = state.period
    y_num = lefts[(start - 1) % p]
    y_den = y_num
    for offset, op in enumerate(ops):
        t = ts[(start + offset) % p]
        if op is None:
            y_num = _left_apply(t, t, y_num)
        else:
            y_num = _left_apply(_with_op(op, t), t, y_num)
        y_den = _left_apply(t, t, y_den)
        # rescale both strings together to avoid under/overflow on long separations
        scale = np.abs(y_den).max()
        if scale > 0:
            y_num, y_den = y_num / scale, y_den / scale
    end = (start + len(ops) - 1) % p
    r = rights[end]
    num = np.sum(y_num * r)
    den = np.sum(y_den * r)
    if den == 0:
        raise DegenerateStateError("vanishing norm while evaluating an expectation value")
    return complex(num / den)


# ---------------------------------------------------------------------------
# state operations


def normalize(state: IMPS) -> IMPS:
    """Rescale so that the dominant eigenvalue of the self transfer operator is 1.

    Schmidt vectors are rescaled to unit 2-norm first, then every gamma is
    multiplied by ``|mu|**(-1/(2p))``. Expectation values are unchanged.

    Raises
    ------
    DegenerateStateError
        If the state has zero norm.
    """
    lambdas = []
    for k, lam in enumerate(state.lambdas):
        nrm = np.linalg.norm(lam)
        if nrm == 0:
            raise DegenerateStateError(f"Schmidt vector {k} vanishes")
        lambdas.append(lam / nrm)
    rescaled = state.replace(lambdas=tuple(lambdas))
    ts = [rescaled.site_tensor(k) for k in range(rescaled.period)]
    mu, _, _ = _cell_fixed_points(ts, ts)
    if not abs(mu) > 1e-300:
        raise DegenerateStateError("state has zero norm")
    factor = abs(mu) ** (-0.5 / state.period)
    return rescaled.replace(gammas=tuple(g * factor for g in rescaled.gammas))


def _gram_factor(fixed_point: np.ndarray, cutoff: float) -> np.ndarray:
    """``X`` with ``X @ X^dagger`` equal to the Hermitian PSD fixed point, null space dropped."""
    m = fixed_point
    tr = np.trace(m)
    if abs(tr) == 0:
        raise DegenerateStateError("fixed point has vanishing trace")
    m = m * (abs(tr) / tr)
    m = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(m)
    keep = w > cutoff * w.max()
    return v[:, keep] * np.sqrt(w[keep])


def _split_cell(theta: np.ndarray, p: int, chi_max: int, cutoff: float):
    """Vidal tensors of a cell block ``theta`` of shape ``(k, 2, ..., 2, k)``.

    ``theta`` carries the boundary Schmidt values on its left leg.
    """
    gammas, lambdas = [], []
    rest = theta
    for _ in range(p - 1):
        kl = rest.shape[0]
        mat = rest.reshape(kl * 2, -1)
        svd = truncated_svd(mat, chi_max, cutoff)
        s = svd.s / np.linalg.norm(svd.s)
        gammas.append(svd.u.reshape(kl, 2, -1))
        lambdas.append(s)
        rest = (s[:, None] * svd.vh).reshape((len(s),) + rest.shape[2:])
    gammas.append(rest)
    return gammas, lambdas


def canonicalize(state: IMPS, cutoff: float = 1e-10) -> IMPS:
    """Bring a state to Vidal canonical form and normalize it.

    The Gram matrices of the left and right half-chains are read off the
    dominant fixed points of the unit-cell transfer operator, so components
    that do not survive in the infinite chain (non-dominant blocks of a
    non-injective state) are removed. Schmidt values below ``cutoff``
    relative to the largest are discarded.

    Small Schmidt values are resolved only to about ``sqrt(machine eps)``
    because the fixed points hold their squares.
    """
    state = normalize(state)
    p = state.period
    ts = [state.site_tensor(k) for k in range(p)]
    chi = state.bond_dims[p - 1]
    _, l_vec, r_vec = _cell_fixed_points(ts, ts)
    eig_cut = max(cutoff**2, 1e-14)
    x = _gram_factor(r_vec.reshape(chi, chi), eig_cut)          # R = X X^dagger
    y = _gram_factor(l_vec.reshape(chi, chi), eig_cut).T        # L = Y^T conj(Y)
    bond = truncated_svd(y @ x, state.chi_max, cutoff)
    s = bond.s / np.linalg.norm(bond.s)

    # right-orthonormal cell block B = Vh X^+ A_0 ... A_{p-1} X Vh^dagger
    cell = np.tensordot(bond.vh @ np.linalg.pinv(x), ts[0], axes=(1, 0))
    for t in ts[1:]:
        cell = np.tensordot(cell, t, axes=(cell.ndim - 1, 0))
    cell = np.tensordot(cell, x @ bond.vh.conj().T, axes=(cell.ndim - 1, 0))

    gammas, lambdas = _split_cell(s.reshape((-1,) + (1,) * (p + 1)) * cell, p, state.chi_max, cutoff)
    gammas[0] = gammas[0] / s[:, None, None]
    for k in range(1, p):
        gammas[k] = gammas[k] / lambdas[k - 1][:, None, None]
    gammas[-1] = gammas[-1] / s[None, None, :]
    lambdas.append(s)
    return normalize(state.replace(gammas=tuple(gammas), lambdas=tuple(lambdas)))


def _check_observable(obs) -> np.ndarray:
    obs = np.asarray(obs, dtype=complex)
    if obs.shape != (2, 2):
        raise InvalidInputError(f"site observable must be 2x2, got {obs.shape}")
    if not np.allclose(obs, obs.conj().T, atol=1e-12, rtol=0):
        raise InvalidInputError("site observable is not Hermitian")
    return obs


def _check_site(state: IMPS, site: int) -> None:
    if not 0 <= site < state.period:
        raise InvalidInputError(f"site {site} outside unit cell [0, {state.period})")


def expectation(state: IMPS, obs=SIGMA_Z, site: int = 0) -> float:
    """``<O>`` at unit-cell site ``site``."""
    obs = _check_observable(obs)
    _check_site(state, site)
    return float(_sandwich(state, site, [obs]).real)


def correlation(state: IMPS, obs=SIGMA_Z, i: int = 0, r: int = 0) -> float:
    """Two-point function ``<O_i O_{i+r}>``.

    For ``r = 0`` this is ``<O_i^2>``; for Pauli operators that is exactly 1
    and 1 is returned without contraction.
    """
    obs = _check_observable(obs)
    _check_site(state, i)
    if r < 0:
        raise InvalidInputError(f"separation must be >= 0, got {r}")
    if r == 0:
        sq = obs @ obs
        if np.allclose(sq, IDENTITY, atol=1e-14, rtol=0):
            return 1.0
        return float(_sandwich(state, i, [sq]).real)
    ops = [obs] + [None] * (r - 1) + [obs]
    return float(_sandwich(state, i, ops).real)


def bond_expectation(state: IMPS, op, bond: int) -> float:
    """Expectation of a two-site operator on sites ``bond`` and ``bond + 1``.

    ``op`` is a 4x4 matrix in the basis ``(uu, ud, du, dd)``.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise InvalidInputError(f"bond operator must be 4x4, got {op.shape}")
    _check_site(state, bond)
    _, lefts, rights, ts = state._environments
    p = state.period
    y = lefts[(bond - 1) % p]
    r = rights[(bond + 1) % p]
    ket = np.tensordot(ts[bond], ts[(bond + 1) % p], axes=(2, 0))  # (l, s1, s2, r)
    l_dim, r_dim = ket.shape[0], ket.shape[3]
    ket = ket.transpose(0, 3, 1, 2).reshape(l_dim, r_dim, 4)
    acted = ket @ op.T  # (l, r, 4): sum_s op[t, s] ket[..., s]
    ket_y = np.tensordot(y, ket.conj(), axes=(1, 0))  # (a, r', t) with bra conjugated
    # num = sum y[a,c] acted[a,b,t] conj(ket[c,d,t]) r[b,d]
    num = np.einsum("abt,adt,bd->", acted, ket_y, r)
    den = np.einsum("abt,adt,bd->", ket, ket_y, r)
    if den == 0:
        raise DegenerateStateError("vanishing norm while evaluating an expectation value")
    return float((num / den).real)


def symmetry_transform(state: IMPS, kind: str, shift: int = 1) -> IMPS:
    """Apply a symmetry of the chain.

    ``kind="spin_flip"`` exchanges up and down on every site.
    ``kind="translate"`` relabels the unit cell so that site ``k`` of the
    result is site ``k + shift`` of the input.
    """
    if kind == "spin_flip":
        return state.replace(gammas=tuple(g[:, ::-1, :] for g in state.gammas))
    if kind == "translate":
        p = state.period
        if not 0 <= shift < p:
            raise InvalidInputError(f"shift must lie in [0, {p}), got {shift}")
        return state.replace(
            gammas=state.gammas[shift:] + state.gammas[:shift],
            lambdas=state.lambdas[shift:] + state.lambdas[:shift],
        )
    raise InvalidInputError(f"unknown symmetry {kind!r}; use 'spin_flip' or 'translate'")


# ---------------------------------------------------------------------------
# serialization
#
# JSON document, keys in this order:
#   format, version, period, chi_max, bond_dims,
#   lambdas: list of p lists of floats,
#   gammas: list of p objects {"shape": [l, 2, r], "real": [...], "imag": [...]}
# with real/imag flattened in C (row-major) order over (left, physical, right).


def state_to_dict(state: IMPS) -> dict:
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "period": state.period,
        "chi_max": state.chi_max,
        "bond_dims": list(state.bond_dims),
        "lambdas": [[float(x) for x in lam] for lam in state.lambdas],
        "gammas": [
            {
                "shape": list(g.shape),
                "real": [float(x) for x in g.real.ravel()],
                "imag": [float(x) for x in g.imag.ravel()],
            }
            for g in state.gammas
        ],
    }


def state_from_dict(doc: dict) -> IMPS:
    if doc.get("format") != FORMAT_NAME:
        raise InvalidInputError(f"not a serialized IMPS (format={doc.get('format')!r})")
    if doc.get("version") != FORMAT_VERSION:
        raise InvalidInputError(f"unsupported IMPS format version {doc.get('version')!r}")
    gammas = []
    for g in doc["gammas"]:
        shape = tuple(g["shape"])
        gammas.append((np.array(g["real"]) + 1j * np.array(g["imag"])).reshape(shape))
    state = IMPS(tuple(gammas), tuple(np.array(lam) for lam in doc["lambdas"]), doc["chi_max"])
    if state.period != doc["period"] or list(state.bond_dims) != doc["bond_dims"]:
        raise InvalidInputError("serialized IMPS header disagrees with its tensors")
    return state


def save_state(state: IMPS, path) -> str:
    """Write ``state`` as JSON; returns the SHA-256 of the bytes written."""
    text = json.dumps(state_to_dict(state), indent=1) + "\n"
    data = text.encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_state(path) -> IMPS:
    return state_from_dict(json.loads(Path(path).read_text()))
