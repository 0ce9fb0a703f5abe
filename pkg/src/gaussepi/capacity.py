"""Entanglement-assisted capacity bounds for the additive noise channel.

All values are in nats; :func:`to_units` converts for output.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import InvariantViolation, ValidationError
from .state import g_function

ORDERING_TOL = 1e-9


@dataclass(frozen=True)
class ChannelParams:
    """Transmissivity ``lam``, input photon budget ``N``, environment photons ``N_E``.

    ``S_E`` is the environment entropy; ``None`` means a thermal environment
    with entropy ``g(N_E)``.
    """

    lam: float
    N: float
    N_E: float
    S_E: float = None

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValidationError(f"transmissivity must lie in [0, 1], got {self.lam}")
        if self.N < 0 or self.N_E < 0:
            raise ValidationError("photon numbers must be nonnegative")
        if self.S_E is not None and self.S_E < 0:
            raise ValidationError("environment entropy must be nonnegative")

    @property
    def thermal(self):
        return self.S_E is None

    @property
    def env_entropy(self):
        return g_function(self.N_E) if self.S_E is None else float(self.S_E)

    @property
    def n_max(self):
        return self.lam * self.N + (1.0 - self.lam) * self.N_E


def epi_capacity_bound(p):
    """``g(N_max) + l g(N) - (1 - l) S(E)``."""
    return g_function(p.n_max) + p.lam * g_function(p.N) - (1.0 - p.lam) * p.env_entropy


def naive_capacity_bound(p):
    """Twice the maximal output entropy, ``2 g(N_max)``."""
    return 2.0 * g_function(p.n_max)


def _clamped_g(x, tol=1e-12):
    if x < 0:
        if x < -tol:
            raise ArithmeticError(f"negative photon number {x} in capacity formula")
        x = 0.0
    return g_function(x)


def holevo_werner_capacity(p):
    """Exact capacity for a thermal environment.

    ``g(N) + g(N') - g((D + N' - N - 1)/2) - g((D - N' + N - 1)/2)`` with
    ``N' = N_max`` and ``D = sqrt((N + N' + 1)^2 - 4 l N (N + 1))``.

    Raises:
        ValidationError: for a non-thermal environment entropy.
    """
    if not p.thermal and not math.isclose(p.S_E, g_function(p.N_E), rel_tol=1e-12, abs_tol=1e-12):
        raise ValidationError("closed-form capacity needs a thermal environment")
    N, Nm = p.N, p.n_max
    D = math.sqrt((N + Nm + 1.0) ** 2 - 4.0 * p.lam * N * (N + 1.0))
    return g_function(N) + g_function(Nm) - _clamped_g((D + Nm - N - 1.0) / 2.0) - _clamped_g((D - Nm + N - 1.0) / 2.0)


@dataclass(frozen=True)
class SweepRecord:
    lam: float
    N: float
    N_E: float
    C_E_exact: float
    epi_bound: float
    naive_bound: float

    FIELDS = ("lambda", "N", "N_E", "C_E_exact", "epi_bound", "naive_bound")

    def values(self):
        return (self.lam, self.N, self.N_E, self.C_E_exact, self.epi_bound, self.naive_bound)


def capacity_record(lam, N, N_E, tol=ORDERING_TOL):
    """Evaluate all three quantities at one point and check their ordering."""
    p = ChannelParams(float(lam), float(N), float(N_E))
    rec = SweepRecord(p.lam, p.N, p.N_E, holevo_werner_capacity(p), epi_capacity_bound(p), naive_capacity_bound(p))
    if not (rec.C_E_exact <= rec.epi_bound + tol and rec.epi_bound <= rec.naive_bound + tol):
        raise InvariantViolation(f"bound ordering violated at {rec}")
    return rec


def capacity_sweep(lams, Ns, N_E):
    """Records over the grid ``lams x Ns`` (lambda outer), fixed ``N_E``."""
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    Ns = np.atleast_1d(np.asarray(Ns, dtype=float))
    return [capacity_record(lam, N, N_E) for lam in lams for N in Ns]


def to_units(value, units="nats"):
    """Convert an entropy in nats to ``nats`` or ``bits``."""
    if units == "nats":
        return value
    if units == "bits":
        return value / math.log(2.0)
    raise ValidationError(f"unknown units {units!r}")
