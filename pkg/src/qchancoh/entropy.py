"""Generalised alpha-z relative Renyi entropy for states and channels.

    f_{a,z}(rho, sigma) = Tr (sigma^{(1-a)/2z} rho^{a/z} sigma^{(1-a)/2z})^z
    D_{a,z}(rho, sigma) = (f^{1/a} - 1) / (a - 1)

All logarithms are natural.  ``alpha == 1`` selects the limit branch, the
Umegaki relative entropy ``Tr rho (ln rho - ln sigma)``; the limit does not
depend on ``z``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .linalg import POWER_CUTOFF, dagger
from .quantum import KrausChannel, _as_array, _choi_matrix

ALPHA_TO_ONE = 1.0
SUPPORT_TOL = 1e-10
_REGIME_EPS = 1e-12

__all__ = [
    "ALPHA_TO_ONE",
    "Regime",
    "AlphaZ",
    "DivergenceValue",
    "classify",
    "f_alpha_z",
    "d_alpha_z",
    "d_alpha_z_channels",
    "relative_entropy",
]


class Regime(enum.Enum):
    REGIME_1 = "Regime1"  # 0 < a < 1, z >= max(a, 1 - a)
    REGIME_2 = "Regime2"  # 1 < a <= 2, z in {1, a/2}
    REGIME_3 = "Regime3"  # a > 1, z = a
    LIMIT = "AlphaToOne"  # a -> 1 (relative entropy)
    OUTSIDE = "OutsideKnownRegimes"

    @property
    def certified(self) -> bool:
        return self is not Regime.OUTSIDE


def classify(alpha: float, z: float) -> Regime:
    if alpha == ALPHA_TO_ONE:
        return Regime.LIMIT
    if 0 < alpha < 1 and z >= max(alpha, 1 - alpha) - _REGIME_EPS:
        return Regime.REGIME_1
    if 1 < alpha <= 2 and (abs(z - 1) <= _REGIME_EPS or abs(z - alpha / 2) <= _REGIME_EPS):
        return Regime.REGIME_2
    if alpha > 1 and abs(z - alpha) <= _REGIME_EPS:
        return Regime.REGIME_3
    return Regime.OUTSIDE


@dataclass(frozen=True)
class AlphaZ:
    """The ``(alpha, z)`` pair; ``alpha == ALPHA_TO_ONE`` marks the limit."""

    alpha: float
    z: float = 1.0

    def __post_init__(self):
        a, z = float(self.alpha), float(self.z)
        if not a > 0 or not math.isfinite(a):
            raise ValueError(f"alpha must be a positive real, got {self.alpha!r}")
        if z == 0 or not math.isfinite(z):
            raise ValueError(f"z must be a nonzero real, got {self.z!r}")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "z", z)

    @property
    def is_limit(self) -> bool:
        return self.alpha == ALPHA_TO_ONE

    @property
    def regime(self) -> Regime:
        return classify(self.alpha, self.z)

    def __str__(self):
        a = "1(limit)" if self.is_limit else f"{self.alpha:g}"
        return f"(alpha={a}, z={self.z:g})"


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    support_dominated: bool = True

    def __float__(self):
        return float(self.value)


def _pow(w: np.ndarray, r: float, cutoff: float) -> np.ndarray:
    out = np.zeros_like(w)
    pos = w > cutoff
    out[pos] = w[pos] ** r
    return out


def _herm(X: np.ndarray) -> np.ndarray:
    return 0.5 * (X + dagger(X))


def _trace_power(X: np.ndarray, z: float) -> np.ndarray:
    """``Tr X^z`` over the support for a stack of PSD matrices."""
    if z == 1.0:
        return np.real(np.einsum("...ii->...", X))
    w = np.linalg.eigvalsh(_herm(X))
    floor = 1e-14 * np.maximum(1.0, w[..., -1:])
    w = np.where(w > floor, w, 0.0)
    out = np.zeros_like(w)
    pos = w > 0
    out[pos] = w[pos] ** z
    return out.sum(axis=-1)


def _kernel_weight(R: np.ndarray, wS: np.ndarray, VS: np.ndarray, cutoff: float) -> np.ndarray:
    # Tr(P_ker(sigma) rho) for each item of the stack
    diag = np.real(np.einsum("...ji,...jk,...ki->...i", VS.conj(), R, VS))
    return np.sum(np.where(wS <= cutoff, diag, 0.0), axis=-1)


def f_batch(R, S, alpha: float, z: float, cutoff: float = POWER_CUTOFF):
    """Vectorised ``f_{alpha,z}`` over stacks; returns ``(f, dominated)``."""
    R = _herm(np.asarray(R, dtype=np.complex128))
    S = _herm(np.asarray(S, dtype=np.complex128))
    wS, VS = np.linalg.eigh(S)
    dominated = _kernel_weight(R, wS, VS, cutoff) <= SUPPORT_TOL
    wR, VR = np.linalg.eigh(R)
    Rp = (VR * _pow(wR, alpha / z, cutoff)[..., None, :]) @ dagger(VR)
    Sp = (VS * _pow(wS, (1 - alpha) / (2 * z), cutoff)[..., None, :]) @ dagger(VS)
    f = _trace_power(Sp @ Rp @ Sp, z)
    return np.maximum(f, 0.0), dominated


def _relative_entropy_batch(R, S, cutoff: float = POWER_CUTOFF):
    R = _herm(np.asarray(R, dtype=np.complex128))
    S = _herm(np.asarray(S, dtype=np.complex128))
    wR = np.linalg.eigvalsh(R)
    wS, VS = np.linalg.eigh(S)
    dominated = _kernel_weight(R, wS, VS, cutoff) <= SUPPORT_TOL
    lr = np.zeros_like(wR)
    pos = wR > cutoff
    lr[pos] = wR[pos] * np.log(wR[pos])
    diag = np.real(np.einsum("...ji,...jk,...ki->...i", VS.conj(), R, VS))
    ls = np.zeros_like(wS)
    pos = wS > cutoff
    ls[pos] = np.log(wS[pos])
    val = lr.sum(axis=-1) - np.sum(diag * ls, axis=-1)
    return np.where(dominated, val, np.inf), dominated


def divergence_batch(R, S, p: AlphaZ, cutoff: float = POWER_CUTOFF):
    """Vectorised ``D_{alpha,z}``; returns ``(values, dominated)`` arrays."""
    if p.is_limit:
        return _relative_entropy_batch(R, S, cutoff)
    f, dom = f_batch(R, S, p.alpha, p.z, cutoff)
    a = p.alpha
    val = (f ** (1.0 / a) - 1.0) / (a - 1.0)
    if a > 1:
        val = np.where(dom, val, np.inf)
    return val, dom


def _pair(rho, sigma):
    R, S = _as_array(rho), _as_array(sigma)
    if R.shape != S.shape:
        raise DimensionMismatch(f"states have dims {R.shape[0]} and {S.shape[0]}")
    return R, S


def f_alpha_z(rho, sigma, p: AlphaZ, with_flag: bool = False):
    """``Tr(sigma^{(1-a)/2z} rho^{a/z} sigma^{(1-a)/2z})^z``.

    With ``with_flag=True`` returns ``(f, support_dominated)``.  When
    ``alpha > 1`` and supp(rho) is not inside supp(sigma) the pseudo-power
    value is meaningless and ``f`` is reported as ``inf``.
    """
    R, S = _pair(rho, sigma)
    f, dom = f_batch(R, S, p.alpha, p.z)
    f, dom = float(f), bool(dom)
    if p.alpha > 1 and not dom:
        f = math.inf
    return (f, dom) if with_flag else f


def relative_entropy(rho, sigma) -> float:
    R, S = _pair(rho, sigma)
    val, _ = _relative_entropy_batch(R, S)
    return float(val)


def d_alpha_z(rho, sigma, p: AlphaZ) -> DivergenceValue:
    R, S = _pair(rho, sigma)
    val, dom = divergence_batch(R, S, p)
    return DivergenceValue(float(val), bool(dom))


def d_alpha_z_channels(phi: KrausChannel, phi_t: KrausChannel, p: AlphaZ) -> DivergenceValue:
    """Divergence of the normalised Choi states of two channels."""
    if (phi.input_dim, phi.output_dim) != (phi_t.input_dim, phi_t.output_dim):
        raise DimensionMismatch("channels must share input and output dimensions")
    return d_alpha_z(_choi_matrix(phi.stacked), _choi_matrix(phi_t.stacked), p)
