"""States, Kraus channels and the Choi-Jamiolkowski map.

Basis convention: bipartite operators live on the tensor basis ``|i beta>``
with the input index ``i`` major, i.e. row ``i * |B| + beta``.  Choi states
are stored normalised (trace one), ``M = J / |A|``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ChannelFormatError, DimensionMismatch, NotCPTP, NotHermitian, NotPSD
from .linalg import as_matrix, is_hermitian

STATE_TOL = 1e-10
CPTP_TOL = 1e-9
NORM_TOL = 1e-12

__all__ = [
    "DensityMatrix",
    "PureState",
    "KrausChannel",
    "ChoiState",
    "density",
    "choi_state",
    "apply",
    "dephase",
    "compose",
    "dephasing_channel",
    "identity_channel",
    "unitary_channel",
    "mixture",
    "kraus_from_choi",
    "partial_trace",
    "pure_from_params",
    "random_state",
    "random_pure_state",
    "random_channel",
    "channel_from_dict",
    "channel_to_dict",
    "load_channel",
    "save_channel",
]


@dataclass(frozen=True)
class DensityMatrix:
    mat: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.mat)
        if not is_hermitian(A, STATE_TOL):
            raise NotHermitian("density matrix is not Hermitian")
        tr = np.trace(A).real
        if abs(tr - 1.0) > STATE_TOL:
            raise NotPSD(f"density matrix has trace {tr!r}, expected 1")
        w = np.linalg.eigvalsh(0.5 * (A + A.conj().T))
        if w[0] < -STATE_TOL:
            raise NotPSD(f"density matrix has eigenvalue {w[0]:.3e}")
        object.__setattr__(self, "mat", A)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def density(rho) -> DensityMatrix:
    """Accept a DensityMatrix, a PureState, a matrix or a state vector."""
    if isinstance(rho, DensityMatrix):
        return rho
    if isinstance(rho, PureState):
        return rho.density()
    A = np.asarray(rho, dtype=np.complex128)
    if A.ndim == 1:
        return PureState(A).density()
    return DensityMatrix(A)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > NORM_TOL)
    if nz.size == 0:
        return v
    ph = v[nz[0]] / abs(v[nz[0]])
    return v / ph


@dataclass(frozen=True)
class PureState:
    """Unit vector with its global phase fixed (first nonzero amplitude >= 0)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-6:
            raise ValueError(f"state vector has norm {n}, expected 1")
        v = _fix_phase(v / n)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> DensityMatrix:
        v = self.amplitudes
        return DensityMatrix(np.outer(v, v.conj()))


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map ``rho -> sum_n K_n rho K_n^dag`` from C^{|A|} to C^{|B|}."""

    kraus_ops: tuple
    input_dim: int = field(default=0)
    output_dim: int = field(default=0)

    def __post_init__(self):
        ops = tuple(np.asarray(K, dtype=np.complex128) for K in self.kraus_ops)
        if not ops:
            raise NotCPTP("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(K.shape != shape for K in ops):
            raise DimensionMismatch("Kraus operators must share one 2-D shape")
        dout, din = shape
        if self.input_dim and self.input_dim != din or self.output_dim and self.output_dim != dout:
            raise DimensionMismatch(
                f"Kraus operators are {dout}x{din}, declared {self.output_dim}x{self.input_dim}"
            )
        object.__setattr__(self, "kraus_ops", ops)
        object.__setattr__(self, "input_dim", din)
        object.__setattr__(self, "output_dim", dout)
        res = self.cptp_residual()
        if res > CPTP_TOL:
            raise NotCPTP(f"sum K^dag K deviates from identity: residual {res:.3e}", residual=res)

    def cptp_residual(self) -> float:
        S = sum(K.conj().T @ K for K in self.kraus_ops)
        return float(np.linalg.norm(S - np.eye(self.input_dim)))

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus_ops)

    def __call__(self, rho):
        return apply(self, rho)


@dataclass(frozen=True)
class ChoiState:
    mat: DensityMatrix
    input_dim: int
    output_dim: int

    @property
    def matrix(self) -> np.ndarray:
        return self.mat.mat


def partial_trace(M, dims: Sequence[int], keep: int) -> np.ndarray:
    """Partial trace of a bipartite operator, keeping subsystem ``keep`` (0 or 1)."""
    da, db = dims
    T = as_matrix(M).reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ibjb->ij", T)
    return np.einsum("aiaj->ij", T)


def _choi_matrix(kraus: np.ndarray) -> np.ndarray:
    # column vector sum_i |i> (x) K|i> per Kraus op, flattened input-major
    n, dout, din = kraus.shape
    vecs = np.transpose(kraus, (0, 2, 1)).reshape(n, din * dout) / np.sqrt(din)
    return vecs.T @ vecs.conj()


def choi_state(phi: KrausChannel) -> ChoiState:
    """Normalised Choi state ``sum_n (I (x) K_n)|Phi><Phi|(I (x) K_n)^dag``."""
    M = _choi_matrix(phi.stacked)
    return ChoiState(DensityMatrix(0.5 * (M + M.conj().T)), phi.input_dim, phi.output_dim)


def kraus_from_choi(M, input_dim: int, output_dim: int, tol: float = 1e-12) -> KrausChannel:
    """Canonical Kraus operators from the eigendecomposition of a Choi state."""
    A = as_matrix(M) * input_dim
    w, V = np.linalg.eigh(0.5 * (A + A.conj().T))
    if w[0] < -1e-9:
        raise NotPSD(f"Choi matrix has eigenvalue {w[0] / input_dim:.3e}")
    ops = [
        np.sqrt(lam) * V[:, k].reshape(input_dim, output_dim).T
        for k, lam in enumerate(w)
        if lam > tol
    ]
    return KrausChannel(tuple(ops))


def _as_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.mat
    if isinstance(rho, PureState):
        return rho.density().mat
    return as_matrix(rho)


def _apply_raw(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("kab,bc,kdc->ad", kraus, rho, kraus.conj())


def apply(phi: KrausChannel, rho) -> DensityMatrix:
    R = _as_array(rho)
    if R.shape[0] != phi.input_dim:
        raise DimensionMismatch(f"state of dim {R.shape[0]} fed to channel with |A|={phi.input_dim}")
    out = _apply_raw(phi.stacked, R)
    return DensityMatrix(0.5 * (out + out.conj().T))


def dephase(rho) -> DensityMatrix:
    R = _as_array(rho)
    return DensityMatrix(np.diag(np.diag(R)))


def compose(phi2: KrausChannel, phi1: KrausChannel) -> KrausChannel:
    """``phi2 o phi1`` with Kraus list ``{K2_m K1_n}``."""
    if phi1.output_dim != phi2.input_dim:
        raise DimensionMismatch(
            f"cannot compose: output dim {phi1.output_dim} != input dim {phi2.input_dim}"
        )
    return KrausChannel(tuple(K2 @ K1 for K2 in phi2.kraus_ops for K1 in phi1.kraus_ops))


def dephasing_channel(d: int) -> KrausChannel:
    if d < 1:
        raise ValueError("dimension must be positive")
    eye = np.eye(d, dtype=np.complex128)
    return KrausChannel(tuple(np.outer(eye[i], eye[i]) for i in range(d)))


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d, dtype=np.complex128),))


def unitary_channel(U) -> KrausChannel:
    return KrausChannel((as_matrix(U),))


def mixture(channels: Sequence[KrausChannel], weights: Sequence[float]) -> KrausChannel:
    """Convex combination realised by concatenating ``sqrt(w_m) K``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("mixture weights must be a probability vector")
    ops = [np.sqrt(wm) * K for wm, ch in zip(w, channels) if wm > 0 for K in ch.kraus_ops]
    return KrausChannel(tuple(ops))


def pure_from_params(angles: Sequence[float]) -> PureState:
    """Pure state from angles.

    For a qubit ``angles = (theta, phase)`` gives
    ``cos(theta/2)|0> + e^{i phase} sin(theta/2)|1>``.  For ``d > 2`` pass
    ``d - 1`` hyperspherical angles followed by ``d - 1`` relative phases
    (``2d - 2`` numbers in total); the moduli are the hyperspherical
    coordinates of the first block.
    """
    a = np.asarray(angles, dtype=float).ravel()
    if a.size % 2 or a.size == 0:
        raise ValueError("need an even, nonzero number of angles (2d - 2)")
    m = a.size // 2
    if m == 1:
        th, ph = a
        v = np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)])
        return PureState(v)
    thetas, phases = a[:m], a[m:]
    mod = np.empty(m + 1)
    s = 1.0
    for k, t in enumerate(thetas):
        mod[k] = s * np.cos(t)
        s *= np.sin(t)
    mod[m] = s
    v = np.abs(mod) * np.exp(1j * np.concatenate([[0.0], phases]))
    return PureState(v)


def random_state(d: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank (full rank by default)."""
    k = rank or d
    G = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    M = G @ G.conj().T
    return DensityMatrix(M / np.trace(M).real)


def random_pure_state(d: int, rng: np.random.Generator) -> PureState:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(v / np.linalg.norm(v))


def random_channel(
    input_dim: int,
    rng: np.random.Generator,
    output_dim: int | None = None,
    n_kraus: int | None = None,
) -> KrausChannel:
    """Random CPTP map from a Haar isometry ``C^{|A|} -> C^{|B| n_kraus}``.

    The isometry is the Q factor of a complex Gaussian matrix with the
    diagonal of R made real positive, sliced into ``n_kraus`` blocks.
    """
    dout = output_dim or input_dim
    nk = n_kraus or input_dim * dout
    if dout * nk < input_dim:
        raise ValueError(f"need output_dim * n_kraus >= input_dim, got {dout} * {nk} < {input_dim}")
    G = rng.normal(size=(dout * nk, input_dim)) + 1j * rng.normal(size=(dout * nk, input_dim))
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    Q = Q * (d / np.abs(d))
    return KrausChannel(tuple(Q[k * dout:(k + 1) * dout] for k in range(nk)))


# --- channel JSON -------------------------------------------------------------

def channel_to_dict(phi: KrausChannel) -> dict:
    return {
        "input_dim": phi.input_dim,
        "output_dim": phi.output_dim,
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in K]
            for K in phi.kraus_ops
        ],
    }


def channel_from_dict(data: dict) -> KrausChannel:
    """Parse ``{"input_dim", "output_dim", "kraus": [[[ [re, im], ...], ...], ...]}``."""
    try:
        din = int(data["input_dim"])
        dout = int(data["output_dim"])
        raw = data["kraus"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ChannelFormatError(f"channel JSON missing or malformed field: {exc}") from exc
    ops = []
    for n, K in enumerate(raw):
        try:
            arr = np.asarray(K, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ChannelFormatError(f"kraus[{n}] is not a numeric array") from exc
        if arr.shape != (dout, din, 2):
            raise ChannelFormatError(
                f"kraus[{n}] has shape {arr.shape[:2]}, expected ({dout}, {din}) of [re, im] pairs"
            )
        ops.append(arr[..., 0] + 1j * arr[..., 1])
    if not ops:
        raise ChannelFormatError("kraus list is empty")
    return KrausChannel(tuple(ops), input_dim=din, output_dim=dout)


def load_channel(path) -> KrausChannel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return channel_from_dict(data)


def save_channel(phi: KrausChannel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(phi), indent=1))
