"""Named qubit (and two-qubit) channels with their analytic coherence values."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import xlogy

from .errors import ParamOutOfRange
from .quantum import KrausChannel, dephasing_channel, identity_channel, kraus_from_choi

__all__ = [
    "ChannelKind",
    "NamedChannel",
    "make",
    "reference_value",
    "iso_hadamard_half_minus3t",
    "iso_hadamard_half_plus3t",
    "GATES",
    "UNDEFINED",
]

UNDEFINED = None

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
T = np.diag([1, np.exp(1j * np.pi / 4)])
GATES = {"H": H, "S": S, "T": T, "X": X, "Y": Y, "Z": Z}


class ChannelKind(enum.Enum):
    PHASE_FLIP = "phase-flip"
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "amplitude-damping"
    ISOTROPIC_HADAMARD = "isotropic-hadamard"
    UNITARY_H = "hadamard"
    UNITARY_S = "s-gate"
    UNITARY_T = "t-gate"
    SS = "ss"
    TT = "tt"
    DEPHASING = "dephasing"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, name) -> "ChannelKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            names = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown channel {name!r}; choose from {names}") from None

    @property
    def param_range(self) -> Optional[tuple]:
        if self in (ChannelKind.PHASE_FLIP, ChannelKind.DEPOLARIZING, ChannelKind.AMPLITUDE_DAMPING):
            return (0.0, 1.0)
        if self is ChannelKind.ISOTROPIC_HADAMARD:
            return (-1.0 / 3.0, 1.0)
        return None

    @property
    def param_name(self) -> Optional[str]:
        if self.param_range is None:
            return None
        return "t" if self is ChannelKind.ISOTROPIC_HADAMARD else "p"


@dataclass(frozen=True)
class NamedChannel:
    kind: ChannelKind
    param: Optional[float]
    channel: KrausChannel


def _nonzero(ops):
    return tuple(K for K in ops if np.any(np.abs(K) > 0))


def _isotropic_hadamard(t: float) -> KrausChannel:
    if t >= 0:
        c = math.sqrt(1 - t) / 2
        return KrausChannel(_nonzero([math.sqrt(t) * H, c * X, c * Y, c * Z, c * I2]))
    # sqrt(t) is imaginary below zero; take Kraus operators from the Choi state
    v = np.array([1, 1, 1, -1], dtype=complex) / 2
    M = t * np.outer(v, v.conj()) + (1 - t) * np.eye(4) / 4
    return kraus_from_choi(M, 2, 2)


def make(kind, param: Optional[float] = None) -> NamedChannel:
    """Build one of the named channels.

    ``param`` is ``p`` in [0, 1] for phase flip, depolarizing and amplitude
    damping, ``t`` in [-1/3, 1] for the isotropic Hadamard channel, and
    ignored for the unitary, dephasing and identity channels.
    """
    kind = ChannelKind.parse(kind)
    rng = kind.param_range
    if rng is not None:
        if param is None:
            raise ParamOutOfRange(f"{kind.value} needs a {kind.param_name} parameter")
        param = float(param)
        lo, hi = rng
        if not lo - 1e-12 <= param <= hi + 1e-12:
            raise ParamOutOfRange(f"{kind.param_name}={param} outside [{lo:g}, {hi:g}] for {kind.value}")
        param = min(max(param, lo), hi)
    else:
        param = None

    if kind is ChannelKind.PHASE_FLIP:
        p = param
        ch = KrausChannel(_nonzero([math.sqrt(p) * I2, math.sqrt(1 - p) * Z]))
    elif kind is ChannelKind.DEPOLARIZING:
        p = param
        ch = KrausChannel(_nonzero([
            math.sqrt(1 - 0.75 * p) * I2,
            math.sqrt(p) / 2 * X,
            math.sqrt(p) / 2 * Y,
            math.sqrt(p) / 2 * Z,
        ]))
    elif kind is ChannelKind.AMPLITUDE_DAMPING:
        p = param
        ch = KrausChannel(_nonzero([
            np.array([[1, 0], [0, math.sqrt(1 - p)]], dtype=complex),
            np.array([[0, math.sqrt(p)], [0, 0]], dtype=complex),
        ]))
    elif kind is ChannelKind.ISOTROPIC_HADAMARD:
        ch = _isotropic_hadamard(param)
    elif kind is ChannelKind.UNITARY_H:
        ch = KrausChannel((H,))
    elif kind is ChannelKind.UNITARY_S:
        ch = KrausChannel((S,))
    elif kind is ChannelKind.UNITARY_T:
        ch = KrausChannel((T,))
    elif kind is ChannelKind.SS:
        ch = KrausChannel((np.kron(S, S),))
    elif kind is ChannelKind.TT:
        ch = KrausChannel((np.kron(T, T),))
    elif kind is ChannelKind.DEPHASING:
        ch = dephasing_channel(2)
    else:
        ch = identity_channel(2)
    return NamedChannel(kind, param, ch)


# --- closed forms ---------------------------------------------------------------

def iso_hadamard_half_minus3t(t: float) -> float:
    """Simplified isotropic-Hadamard ``C_{1/2,1}`` with radicand ``(1-t)(1-3t)``.

    This is the form as commonly quoted; it disagrees with the general
    formula and is real only for ``t <= 1/3``.
    """
    return (3 * t - 5) / 4 - 0.75 * math.sqrt((1 - t) * (1 - 3 * t)) + 2


def iso_hadamard_half_plus3t(t: float) -> float:
    """The general isotropic-Hadamard formula at ``alpha = 1/2``, simplified."""
    return (3 * t - 5) / 4 - 0.75 * math.sqrt((1 - t) * (1 + 3 * t)) + 2


def _renyi(total: float, alpha: float) -> float:
    return (total - 1.0) / (alpha - 1.0)


def _c_phase_flip(p, a):
    if a == 1.0:
        return math.log(2) + xlogy(p, p) + xlogy(1 - p, 1 - p)
    if a == 0.5:
        return 1 - 2 * math.sqrt(p * (1 - p))
    return _renyi(2 ** (1 - 1 / a) * (p ** a + (1 - p) ** a) ** (1 / a), a)


def _c_depolarizing(p, a):
    if a == 1.0:
        return 0.25 * (xlogy(4 - 3 * p, 4 - 3 * p) + 2 * xlogy(p - 2, 2 - p) + xlogy(p, p))
    if a == 0.5:
        return 1 - (math.sqrt(p * (4 - 3 * p)) + p) / 2
    inner = p ** a / 2 ** (2 * a + 1) + (1 - 0.75 * p) ** a / 2
    return _renyi(2 * inner ** (1 / a) + p / 2, a)


def _c_amplitude_damping(p, a):
    if a == 1.0:
        return 0.5 * (xlogy(p - 1, 1 - p) - xlogy(p - 2, 2 - p))
    if a == 0.5:
        return (2 * p - 2) / (p - 2)
    return _renyi((0.5 + 0.5 * (1 - p) ** (1 / a)) * (2 - p) ** (1 - 1 / a) + p / 2, a)


def _c_isotropic_hadamard(t, a):
    if a == 1.0:
        return 0.25 * (3 * xlogy(1 - t, 1 - t) + xlogy(1 + 3 * t, 1 + 3 * t))
    # the quoted alpha = 1/2 simplification has a sign slip; use the general form
    return _renyi(4 ** (-1 / a) * (3 * (1 - t) ** a + (1 + 3 * t) ** a) ** (1 / a), a)


def _c_four_level(a):
    if a == 1.0:
        return math.log(4)
    if a == 0.5:
        return 1.5
    return _renyi(4 ** (1 - 1 / a), a)


def _c_two_level(a):
    if a == 1.0:
        return math.log(2)
    if a == 0.5:
        return 1.0
    return _renyi(2 ** (1 - 1 / a), a)


_DETECTION_CREATION_INCOHERENT = {
    ChannelKind.PHASE_FLIP,
    ChannelKind.DEPOLARIZING,
    ChannelKind.AMPLITUDE_DAMPING,
    ChannelKind.UNITARY_S,
    ChannelKind.UNITARY_T,
    ChannelKind.SS,
    ChannelKind.TT,
}


def reference_value(kind, param: Optional[float], alpha: float, measure: str = "C", z: float = 1.0):
    """Published closed-form value for ``(kind, measure, alpha)``, or ``UNDEFINED``.

    ``alpha == 1`` stands for the limit ``alpha -> 1``.  ``C`` values are
    for ``z = 1``; ``Ctilde`` values are zero for every ``(alpha, z)`` on
    the commuting channels and known only at ``(1/2, 1)`` for the
    Hadamard family.
    """
    kind = ChannelKind.parse(kind)
    a = float(alpha)
    m = measure.lower()
    if m == "c":
        if z != 1.0:
            return UNDEFINED
        if kind is ChannelKind.PHASE_FLIP:
            return _c_phase_flip(param, a)
        if kind is ChannelKind.DEPOLARIZING:
            return _c_depolarizing(param, a)
        if kind is ChannelKind.AMPLITUDE_DAMPING:
            return _c_amplitude_damping(param, a)
        if kind is ChannelKind.ISOTROPIC_HADAMARD:
            return _c_isotropic_hadamard(param, a)
        if kind in (ChannelKind.UNITARY_H, ChannelKind.SS, ChannelKind.TT):
            return _c_four_level(a)
        if kind in (ChannelKind.UNITARY_S, ChannelKind.UNITARY_T):
            return _c_two_level(a)
        return UNDEFINED
    if m in ("ctilde", "ct"):
        if kind in _DETECTION_CREATION_INCOHERENT:
            return 0.0
        if a == 0.5 and z == 1.0:
            if kind is ChannelKind.ISOTROPIC_HADAMARD:
                return 1 - math.sqrt(1 - param * param)
            if kind is ChannelKind.UNITARY_H:
                return 1.0
        return UNDEFINED
    raise ValueError(f"measure must be 'C' or 'Ctilde', got {measure!r}")
