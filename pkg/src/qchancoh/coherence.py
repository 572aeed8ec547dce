"""Channel coherence measures and their brute-force oracles.

Two quantities are computed for a channel ``phi``:

* ``C``  -- the minimum divergence from the Choi state ``M_phi`` to a
  diagonal (incoherent) state in the ``|i beta>`` basis.  For ``z = 1`` the
  minimiser is known in closed form: ``q_k ~ <k|M^a|k>^{1/a}``.
* ``Ct`` -- the supremum over pure inputs of the divergence between
  ``phi(Delta(psi))`` and ``Delta(phi(psi))``.

The minimisation domain for ``C`` is every diagonal density matrix; the
partial-trace constraint a genuine incoherent channel would add is not
imposed, which is what makes the ``z = 1`` closed form the exact optimum.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.optimize import minimize

from .entropy import AlphaZ, d_alpha_z, divergence_batch
from .errors import DimensionMismatch, DimensionTooLarge, InvalidAlpha, InvalidRegime
from .linalg import POWER_CUTOFF, _psd_power_unchecked, as_matrix, direct_sum
from .quantum import (
    KrausChannel,
    PureState,
    _as_array,
    _choi_matrix,
    pure_from_params,
)

__all__ = [
    "Method",
    "OptimizerOptions",
    "CoherenceResult",
    "AdditivityReport",
    "coherence_z1",
    "coherence_channel_z1",
    "coherence_state",
    "coherence_channel",
    "commutativity_divergence",
    "coherence_commutativity",
    "oracle_min_diag",
    "oracle_sup_pure",
    "check_additivity",
    "reevaluate",
    "is_detection_creation_incoherent",
]

ORACLE_MAX_POINTS = 20_000_000
_CHUNK = 100_000


class Method(enum.Enum):
    CLOSED_FORM_Z1 = "ClosedFormZ1"
    SIMPLEX_OPTIMIZED = "SimplexOptimized"
    GRID_ORACLE = "GridOracle"
    PURE_STATE_OPTIMIZED = "PureStateOptimized"


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 20
    max_iters: int = 5000
    tol: float = 1e-10
    seed: int = 42
    fd_step: float = 1e-6
    stall_iters: int = 50
    grid_n: int = 64
    refine_top: int = 5


@dataclass
class CoherenceResult:
    """Value plus the optimiser certificate that attains it.

    ``certificate`` is a probability vector over the ``|i beta>`` basis for
    ``C`` and a :class:`PureState` for ``Ct``.
    """

    value: float
    certificate: Union[np.ndarray, PureState]
    method: Method
    params: AlphaZ
    converged: bool = True
    info: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _choi(phi_or_state) -> np.ndarray:
    if isinstance(phi_or_state, KrausChannel):
        return _choi_matrix(phi_or_state.stacked)
    return _as_array(phi_or_state)


def _require_regime(p: AlphaZ, allow_outside: bool) -> None:
    if not allow_outside and not p.regime.certified:
        raise InvalidRegime(
            f"{p} lies outside the regimes where the measure is known to be well defined; "
            "pass allow_outside_regime=True to compute it anyway"
        )


# --- z = 1 closed form ----------------------------------------------------------

def _entropy(w: np.ndarray) -> float:
    w = w[w > POWER_CUTOFF]
    return float(-np.sum(w * np.log(w)))


def coherence_z1(M, alpha: float, allow_outside_regime: bool = False) -> CoherenceResult:
    """Closed-form ``C_{alpha,1}`` of a state (any Choi state included)."""
    A = as_matrix(M)
    p = AlphaZ(alpha, 1.0)
    if p.is_limit:
        w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
        q = np.clip(np.real(np.diag(A)), 0.0, None)
        value = _entropy(q) - _entropy(w)
        return CoherenceResult(value, q / q.sum(), Method.CLOSED_FORM_Z1, p)
    if not (0 < alpha < 1 or 1 < alpha <= 2) and not allow_outside_regime:
        raise InvalidAlpha(f"closed form needs alpha in (0,1) U (1,2], got {alpha}")
    m = np.clip(np.real(np.diag(_psd_power_unchecked(A, alpha))), 0.0, None)
    r = m ** (1.0 / alpha)
    s = r.sum()
    value = (s - 1.0) / (alpha - 1.0)
    return CoherenceResult(float(value), r / s, Method.CLOSED_FORM_Z1, p)


def coherence_channel_z1(phi: KrausChannel, alpha: float, **kw) -> CoherenceResult:
    return coherence_z1(_choi_matrix(phi.stacked), alpha, **kw)


# --- simplex minimisation over diagonal states ----------------------------------

class _DiagObjective:
    """``q -> D(rho, diag(q))`` with ``rho^{a/z}`` cached.

    ``q`` need not be normalised; ``f`` is homogeneous in sigma so the
    forward differences stay well defined.
    """

    def __init__(self, rho: np.ndarray, p: AlphaZ):
        self.p = p
        self.rho = rho
        self.rho_diag = np.real(np.diag(rho)).copy()
        if p.is_limit:
            w = np.linalg.eigvalsh(rho)
            self.neg_entropy = -_entropy(w)
        else:
            self.Rp = _psd_power_unchecked(rho, p.alpha / p.z)
        self.evals = 0

    def __call__(self, q: np.ndarray) -> np.ndarray:
        """Vectorised over leading axes of ``q``."""
        q = np.asarray(q, dtype=float)
        p = self.p
        self.evals += q.size // q.shape[-1]
        zero = q <= POWER_CUTOFF
        kernel = np.sum(np.where(zero, self.rho_diag, 0.0), axis=-1)
        dominated = kernel <= 1e-10
        if p.is_limit:
            logq = np.log(np.where(zero, 1.0, q))
            val = self.neg_entropy - np.sum(np.where(zero, 0.0, self.rho_diag * logq), axis=-1)
            return np.where(dominated, val, np.inf)
        a, z = p.alpha, p.z
        s = np.where(zero, 0.0, np.where(zero, 1.0, q) ** ((1 - a) / (2 * z)))
        if z == 1.0:
            f = np.sum(s * s * np.real(np.diag(self.Rp)), axis=-1)
        else:
            X = s[..., :, None] * self.Rp * s[..., None, :]
            w = np.linalg.eigvalsh(X)
            floor = 1e-14 * np.maximum(1.0, w[..., -1:])
            f = np.sum(np.where(w > floor, np.abs(w) ** z, 0.0), axis=-1)
        val = (np.maximum(f, 0.0) ** (1.0 / a) - 1.0) / (a - 1.0)
        if a > 1:
            val = np.where(dominated, val, np.inf)
        return val


def _fd_gradient(obj: _DiagObjective, q: np.ndarray, h: float) -> np.ndarray:
    """Central differences where ``q_k > h``, forward differences otherwise."""
    n = q.size
    E = np.eye(n) * h
    lo_ok = q > h
    probes = np.concatenate([q + E, np.where(lo_ok[:, None], q - E, q), q[None, :]])
    vals = obj(probes)
    up, lo = vals[:n], vals[n:2 * n]
    width = np.where(lo_ok, 2 * h, h)
    return (up - lo) / width


def _exponentiated_gradient(obj: _DiagObjective, q0: np.ndarray, opts: OptimizerOptions):
    """Mirror descent on the simplex with a backtracking step size."""
    q = np.asarray(q0, dtype=float)
    q = q / q.sum()
    F = float(obj(q))
    eta = 1.0
    history = [F]
    converged = False
    for it in range(opts.max_iters):
        g = _fd_gradient(obj, q, opts.fd_step)
        if not np.all(np.isfinite(g)):
            g = np.where(np.isfinite(g), g, np.nanmax(np.where(np.isfinite(g), g, -np.inf)) + 1.0)
        g = g - np.min(g)
        accepted = False
        while eta > 1e-14:
            step = np.minimum(eta * g, 700.0)
            y = q * np.exp(-step)
            y /= y.sum()
            Fy = float(obj(y))
            if Fy < F:
                q, F = y, Fy
                eta *= 2.0
                accepted = True
                break
            eta *= 0.5
        history.append(F)
        if not accepted:
            converged = True
            break
        if len(history) > opts.stall_iters and history[-opts.stall_iters - 1] - F < opts.tol:
            converged = True
            break
    return q, F, converged, it + 1


def _lexi_key(q: np.ndarray):
    return tuple(np.round(q, 12))


def coherence_state(
    M,
    p: AlphaZ,
    opts: OptimizerOptions | None = None,
    allow_outside_regime: bool = False,
) -> CoherenceResult:
    """Minimum of ``D(M, sigma)`` over diagonal states ``sigma``.

    Exponentiated-gradient descent from the ``z = 1`` closed-form
    certificate plus ``opts.restarts`` Dirichlet-random starts, each with a
    private generator seeded by ``(opts.seed, restart index)``.
    """
    opts = opts or OptimizerOptions()
    _require_regime(p, allow_outside_regime)
    rho = as_matrix(M)
    rho = 0.5 * (rho + rho.conj().T)
    n = rho.shape[0]
    obj = _DiagObjective(rho, p)

    starts = []
    warm_alpha = p.alpha if (0 < p.alpha <= 2) else 2.0
    warm = coherence_z1(rho, warm_alpha, allow_outside_regime=True).certificate
    starts.append(0.999 * warm + 0.001 / n)
    for k in range(opts.restarts):
        rng = np.random.default_rng([opts.seed, k])
        starts.append(rng.dirichlet(np.ones(n)))

    best = None
    all_converged = True
    total_iters = 0
    for q0 in starts:
        q, F, conv, iters = _exponentiated_gradient(obj, q0, opts)
        total_iters += iters
        all_converged &= conv
        if best is None or F < best[1] - 1e-14 or (
            abs(F - best[1]) <= 1e-14 and _lexi_key(q) < _lexi_key(best[0])
        ):
            best = (q, F)
    q, F = best
    return CoherenceResult(
        float(F),
        q,
        Method.SIMPLEX_OPTIMIZED,
        p,
        converged=all_converged,
        info={"iterations": total_iters, "evaluations": obj.evals, "starts": len(starts)},
    )


def coherence_channel(
    phi: KrausChannel,
    p: AlphaZ,
    opts: OptimizerOptions | None = None,
    allow_outside_regime: bool = False,
) -> CoherenceResult:
    return coherence_state(_choi_matrix(phi.stacked), p, opts, allow_outside_regime)


# --- commutativity measure --------------------------------------------------------

def _diag_part(R: np.ndarray) -> np.ndarray:
    d = np.einsum("...ii->...i", R)
    out = np.zeros_like(R)
    idx = np.arange(R.shape[-1])
    out[..., idx, idx] = d
    return out


def _commutator_pairs(kraus: np.ndarray, psis: np.ndarray):
    P = psis[:, :, None] * psis[:, None, :].conj()
    after = np.einsum("kab,nbc,kdc->nad", kraus, _diag_part(P), kraus.conj())
    before = _diag_part(np.einsum("kab,nbc,kdc->nad", kraus, P, kraus.conj()))
    return after, before


def commutativity_divergence(phi: KrausChannel, psis, p: AlphaZ) -> np.ndarray:
    """``D(phi(Delta(psi)), Delta(phi(psi)))`` for each row of ``psis``."""
    V = np.atleast_2d(np.asarray(psis, dtype=np.complex128))
    if V.shape[1] != phi.input_dim:
        raise DimensionMismatch("state dimension does not match the channel input")
    out = np.empty(V.shape[0])
    for s in range(0, V.shape[0], _CHUNK):
        R, S = _commutator_pairs(phi.stacked, V[s:s + _CHUNK])
        out[s:s + _CHUNK] = divergence_batch(R, S, p)[0]
    return out


def _amplitudes(params: np.ndarray) -> np.ndarray:
    """Batched version of :func:`pure_from_params` (no phase fixing)."""
    params = np.atleast_2d(params)
    m = params.shape[1] // 2
    if m == 1:
        th, ph = params[:, 0], params[:, 1]
        return np.stack([np.cos(th / 2) + 0j, np.exp(1j * ph) * np.sin(th / 2)], axis=1)
    thetas, phases = params[:, :m], params[:, m:]
    mod = np.empty((params.shape[0], m + 1))
    s = np.ones(params.shape[0])
    for k in range(m):
        mod[:, k] = s * np.cos(thetas[:, k])
        s = s * np.sin(thetas[:, k])
    mod[:, m] = s
    ph = np.concatenate([np.zeros((params.shape[0], 1)), phases], axis=1)
    return np.abs(mod) * np.exp(1j * ph)


def is_detection_creation_incoherent(phi: KrausChannel, tol: float = 1e-10) -> bool:
    """``phi o Delta == Delta o phi``, checked on every matrix unit ``|i><j|``.

    Exactly the channels with ``Ct = 0``.  Not the same as incoherent:
    the phase gate passes this test yet has ``C > 0``.
    """
    _square(phi)
    d = phi.input_dim
    units = np.zeros((d * d, d, d), dtype=np.complex128)
    units[np.arange(d * d), np.repeat(np.arange(d), d), np.tile(np.arange(d), d)] = 1.0
    K = phi.stacked
    lhs = np.einsum("kab,nbc,kdc->nad", K, _diag_part(units), K.conj())
    rhs = _diag_part(np.einsum("kab,nbc,kdc->nad", K, units, K.conj()))
    return bool(np.max(np.abs(lhs - rhs)) <= tol)


def _square(phi: KrausChannel) -> None:
    if phi.input_dim != phi.output_dim:
        raise DimensionMismatch("commutativity measure needs |A| = |B|")


def _refine_sup(phi, p, seeds, tol):
    """Nelder-Mead ascent from each seed; returns the best (value, params)."""
    best_v, best_x = -np.inf, None

    def neg(x):
        v = commutativity_divergence(phi, _amplitudes(x), p)[0]
        return -v if np.isfinite(v) else -1e300

    for x0 in seeds:
        f0 = neg(x0)
        if f0 <= -1e300:
            return np.inf, np.asarray(x0)
        res = minimize(
            neg, x0, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": tol, "maxiter": 4000, "maxfev": 8000},
        )
        # the ascent can walk onto a support violation, where D diverges
        if res.fun <= -1e300:
            return np.inf, np.asarray(res.x)
        for v, x in ((-f0, x0), (-res.fun, res.x)):
            if v > best_v:
                best_v, best_x = v, np.asarray(x)
    return best_v, best_x


def _grid_params(d: int, grid_n: int) -> np.ndarray:
    if d == 2:
        th = np.linspace(0.0, np.pi, grid_n)
        ph = np.linspace(0.0, 2 * np.pi, grid_n, endpoint=False)
        T, P = np.meshgrid(th, ph, indexing="ij")
        return np.stack([T.ravel(), P.ravel()], axis=1)
    m = d - 1
    th = np.linspace(0.0, np.pi / 2, grid_n)
    ph = np.linspace(0.0, 2 * np.pi, grid_n, endpoint=False)
    axes = [th] * m + [ph] * m
    return np.array(list(itertools.product(*axes)))


def _finish_sup(phi, p, grid, vals, opts, method, extra_seeds=()):
    if np.any(np.isinf(vals)):
        k = int(np.argmax(np.isinf(vals)))
        x = grid[k]
        return CoherenceResult(
            math.inf, pure_from_params(x), method, p, info={"params": x, "support_violation": True}
        )
    order = np.argsort(-vals, kind="stable")[: opts.refine_top]
    seeds = [grid[k] for k in order] + list(extra_seeds)
    v, x = _refine_sup(phi, p, seeds, opts.tol)
    info = {"params": x, "grid_points": len(grid)}
    if math.isinf(v):
        info["support_violation"] = True
    return CoherenceResult(float(v), pure_from_params(x), method, p, info=info)


def coherence_commutativity(
    phi: KrausChannel,
    p: AlphaZ,
    opts: OptimizerOptions | None = None,
    allow_outside_regime: bool = False,
) -> CoherenceResult:
    """Supremum over pure inputs of ``D(phi o Delta, Delta o phi)``.

    Qubits: an ``opts.grid_n`` square grid over ``(theta, phase)`` then
    Nelder-Mead from the best ``opts.refine_top`` cells.  Larger inputs
    replace the grid by ``200 * opts.restarts`` seeded random directions.
    """
    opts = opts or OptimizerOptions()
    _require_regime(p, allow_outside_regime)
    _square(phi)
    d = phi.input_dim
    if d == 2:
        grid = _grid_params(2, opts.grid_n)
    else:
        rng = np.random.default_rng([opts.seed, 7919])
        n = 200 * max(opts.restarts, 1)
        grid = np.concatenate(
            [rng.uniform(0, np.pi / 2, (n, d - 1)), rng.uniform(0, 2 * np.pi, (n, d - 1))], axis=1
        )
        # computational basis states are frequent maximisers
        basis = np.zeros((d, 2 * d - 2))
        for k in range(1, d):
            basis[k, : min(k, d - 1)] = np.pi / 2
        grid = np.concatenate([basis, grid])
    vals = commutativity_divergence(phi, _amplitudes(grid), p)
    return _finish_sup(phi, p, grid, vals, opts, Method.PURE_STATE_OPTIMIZED)


# --- oracles ---------------------------------------------------------------------

@functools.lru_cache(maxsize=4096)
def _compositions(k: int, total: int) -> np.ndarray:
    """Every length-``k`` vector of nonnegative integers summing to ``total``."""
    if k == 1:
        return np.array([[total]], dtype=np.int32)
    parts = []
    for a in range(total + 1):
        tail = _compositions(k - 1, total - a)
        parts.append(np.column_stack([np.full(len(tail), a, dtype=np.int32), tail]))
    out = np.concatenate(parts)
    out.setflags(write=False)
    return out


def _simplex_chunks(n: int, grid_n: int):
    """Stream the ``1/grid_n`` simplex grid one leading coordinate at a time."""
    if n == 1:
        yield np.ones((1, 1))
        return
    for a in range(grid_n + 1):
        tail = _compositions(n - 1, grid_n - a) if n > 2 else np.array([[grid_n - a]])
        Q = np.empty((len(tail), n))
        Q[:, 0] = a
        Q[:, 1:] = tail
        yield Q / grid_n


def _refine_min(obj: _DiagObjective, q0: np.ndarray, tol: float):
    """Nelder-Mead on ``q = x^2 / |x|^2`` (reaches the boundary smoothly)."""

    def f(x):
        w = x * x
        s = w.sum()
        if s <= 0:
            return np.inf
        v = float(obj(w / s))
        return v if np.isfinite(v) else 1e300

    x0 = np.sqrt(q0)
    best_x, best_f = x0, f(x0)
    for _ in range(6):
        res = minimize(
            f, best_x, method="Nelder-Mead",
            options={"xatol": 1e-12, "fatol": tol, "maxiter": 20000, "maxfev": 40000,
                     "adaptive": True},
        )
        if res.fun >= best_f - tol:
            if res.fun < best_f:
                best_x, best_f = res.x, res.fun
            break
        best_x, best_f = res.x, res.fun
    w = best_x * best_x
    return w / w.sum(), best_f


def oracle_min_diag(
    phi_or_state,
    p: AlphaZ,
    grid_n: int = 200,
    refine: bool = True,
    tol: float = 1e-12,
) -> CoherenceResult:
    """Exhaustive simplex grid for ``min_sigma D(M, sigma)``, then local polish.

    The grid holds every ``q`` whose entries are multiples of ``1/grid_n``;
    its size is ``C(grid_n + n - 1, n - 1)`` for an ``n``-dimensional Choi
    state and is capped at ``ORACLE_MAX_POINTS``.
    """
    rho = _choi(phi_or_state)
    rho = 0.5 * (rho + rho.conj().T)
    n = rho.shape[0]
    size = math.comb(grid_n + n - 1, n - 1)
    if size > ORACLE_MAX_POINTS:
        raise DimensionTooLarge(
            f"simplex grid would have {size} points (n={n}, grid_n={grid_n}); cap is {ORACLE_MAX_POINTS}"
        )
    obj = _DiagObjective(rho, p)
    best_q, best_v = None, np.inf
    for Q in _simplex_chunks(n, grid_n):
        vals = obj(Q)
        k = int(np.argmin(vals))
        if vals[k] < best_v:
            best_v, best_q = float(vals[k]), Q[k].copy()
    grid_value = best_v
    if refine and np.isfinite(best_v):
        q, v = _refine_min(obj, best_q, tol)
        if v < best_v:
            best_q, best_v = q, v
    return CoherenceResult(
        best_v, best_q, Method.GRID_ORACLE, p,
        info={"grid_points": size, "grid_value": grid_value},
    )


def oracle_sup_pure(
    phi: KrausChannel,
    p: AlphaZ,
    grid_n: int = 256,
    refine: bool = True,
    tol: float = 1e-13,
) -> CoherenceResult:
    """Dense grid over pure inputs for ``Ct``, then Nelder-Mead polish.

    Qubits use a ``grid_n x grid_n`` grid on ``(theta, phase)``.  For
    ``d > 2`` the grid is ``grid_n^(2d-2)`` points over hyperspherical
    moduli and relative phases, so only small ``grid_n`` are affordable
    (``grid_n = 8`` for two qubits is already 262144 points).
    """
    _square(phi)
    d = phi.input_dim
    size = grid_n ** (2 * d - 2)
    if size > ORACLE_MAX_POINTS:
        raise DimensionTooLarge(
            f"pure-state grid would have {size} points (d={d}, grid_n={grid_n}); cap is {ORACLE_MAX_POINTS}"
        )
    grid = _grid_params(d, grid_n)
    vals = commutativity_divergence(phi, _amplitudes(grid), p)
    opts = OptimizerOptions(refine_top=1 if refine else 0, tol=tol)
    if not refine:
        k = int(np.argmax(vals))
        return CoherenceResult(float(vals[k]), pure_from_params(grid[k]), Method.GRID_ORACLE, p,
                               info={"params": grid[k], "grid_points": size})
    return _finish_sup(phi, p, grid, vals, opts, Method.GRID_ORACLE)


# --- additivity -------------------------------------------------------------------

@dataclass
class AdditivityReport:
    combined: float
    weighted: float
    parts: tuple
    p1: float

    @property
    def gap(self) -> float:
        return abs(self.combined - self.weighted)


def check_additivity(
    phi1: KrausChannel,
    phi2: KrausChannel,
    p1: float,
    p: AlphaZ,
    opts: OptimizerOptions | None = None,
) -> AdditivityReport:
    """Compare ``C(p1 M1 (+) p2 M2)`` with ``p1 C(M1) + p2 C(M2)``.

    ``z = 1`` uses the closed form on both sides, other ``z`` the simplex
    optimiser.
    """
    if not 0 <= p1 <= 1:
        raise ValueError("p1 must lie in [0, 1]")
    M1, M2 = _choi_matrix(phi1.stacked), _choi_matrix(phi2.stacked)
    big = direct_sum(p1 * M1, (1 - p1) * M2)

    def measure(M):
        if p.z == 1.0:
            return coherence_z1(M, p.alpha).value
        return coherence_state(M, p, opts).value

    c1, c2, c = measure(M1), measure(M2), measure(big)
    return AdditivityReport(c, p1 * c1 + (1 - p1) * c2, (c1, c2), p1)


def reevaluate(result: CoherenceResult, phi: KrausChannel) -> float:
    """Recompute a result's value from its certificate via the entropy module."""
    if isinstance(result.certificate, PureState):
        return float(commutativity_divergence(phi, result.certificate.amplitudes[None, :], result.params)[0])
    q = np.asarray(result.certificate)
    return d_alpha_z(_choi_matrix(phi.stacked), np.diag(q).astype(complex), result.params).value
