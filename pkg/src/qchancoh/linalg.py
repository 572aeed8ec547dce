"""Dense complex matrix helpers: Hermitian eigensolvers and pseudo-powers.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
helpers below validate shape and Hermiticity at the public boundary and
leave the hot paths to the underscore-prefixed kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NotHermitian, NotPSD

HERM_TOL = 1e-10
POWER_CUTOFF = 1e-12
RECON_TOL = 1e-10

__all__ = [
    "Spectrum",
    "as_matrix",
    "is_hermitian",
    "eig_hermitian",
    "jacobi_eigh",
    "psd_power",
    "support_projector",
    "tensor",
    "direct_sum",
    "dagger",
]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending) and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def as_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a square complex128 array, raising ValueError otherwise."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    return A


def dagger(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


def is_hermitian(M, tol: float = HERM_TOL) -> bool:
    A = as_matrix(M)
    return bool(np.max(np.abs(A - A.conj().T), initial=0.0) <= tol)


def _check_hermitian(A: np.ndarray, tol: float) -> None:
    err = np.max(np.abs(A - A.conj().T), initial=0.0)
    if err > tol:
        raise NotHermitian(f"matrix is not Hermitian: max |M - M^dag| = {err:.3e} > {tol:.1e}")


def jacobi_eigh(M, tol: float = 1e-14, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first strips the phase of the pivot ``a_pq`` with a
    diagonal unitary, then applies the real symmetric Jacobi rotation.
    Returns ``(w, V)`` with ``w`` ascending and ``V`` unitary.
    """
    A = as_matrix(M).copy()
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        # direct norm; ||A||^2 - sum|a_ii|^2 cancels catastrophically near convergence
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                tau = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] acting on (p, q)
                J = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    else:
        raise NoConvergence(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def eig_hermitian(M, method: str = "lapack", herm_tol: float = HERM_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    M : array_like
        Square matrix, Hermitian to ``herm_tol`` (entrywise).
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls ``numpy.linalg.eigh``; ``"jacobi"`` uses the
        in-house cyclic Jacobi solver.

    Raises
    ------
    NotHermitian
        If ``max|M - M^dag| > herm_tol``.
    NoConvergence
        If the Jacobi solver exceeds its sweep cap.
    """
    A = as_matrix(M)
    _check_hermitian(A, herm_tol)
    A = 0.5 * (A + A.conj().T)
    if method == "lapack":
        w, V = np.linalg.eigh(A)
    elif method == "jacobi":
        w, V = jacobi_eigh(A)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return Spectrum(np.asarray(w, dtype=float), V)


def _powered(w: np.ndarray, r: float, cutoff: float) -> np.ndarray:
    g = np.zeros_like(w)
    pos = w > cutoff
    g[pos] = w[pos] ** r
    return g


def _psd_power_unchecked(A: np.ndarray, r: float, cutoff: float = POWER_CUTOFF) -> np.ndarray:
    w, V = np.linalg.eigh(A)
    return (V * _powered(w, r, cutoff)) @ V.conj().T


def psd_power(M, r: float, cutoff: float = POWER_CUTOFF, method: str = "lapack") -> np.ndarray:
    """Pseudo-power ``M^r`` restricted to the support of ``M``.

    Eigenvalues in ``[-cutoff, cutoff]`` are treated as exact zeros and map
    to 0 for every ``r`` (including ``r <= 0``), so ``psd_power(M, 0)`` is
    the support projector and negative powers act as pseudo-inverses.

    Raises
    ------
    NotPSD
        If an eigenvalue is below ``-cutoff``.
    """
    spec = eig_hermitian(M, method=method)
    w = spec.eigenvalues
    if w.size and w[0] < -cutoff:
        raise NotPSD(f"matrix has eigenvalue {w[0]:.3e} < -{cutoff:.0e}")
    V = spec.eigenvectors
    return (V * _powered(w, r, cutoff)) @ V.conj().T


def support_projector(M, cutoff: float = POWER_CUTOFF) -> np.ndarray:
    return psd_power(M, 0.0, cutoff)


def tensor(A, B) -> np.ndarray:
    """Kronecker product with ``A``'s index major."""
    return np.kron(as_matrix(A), as_matrix(B))


def direct_sum(A, B) -> np.ndarray:
    return scipy.linalg.block_diag(as_matrix(A), as_matrix(B)).astype(np.complex128)
