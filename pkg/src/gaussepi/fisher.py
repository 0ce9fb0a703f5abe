"""Divergence-based Fisher information of displaced Gaussian states.

Relative entropy between a Gaussian state and its translate is exactly
quadratic in the translation,

    S(rho_{M,d} || rho_{M,d+xi}) = 1/2 sum_j beta(l_j) ((S xi)_{2j-1}^2 + (S xi)_{2j}^2),

with ``S M S^T = D(l)``. Fisher informations are the curvatures of this
quadratic form along coordinate directions; the conditional version sums
only the coordinates of one subsystem.
"""

from dataclasses import dataclass

import numpy as np

from .channels import _add_noise
from .state import conditional_entropy, inverse_temperature
from .symplectic import symplectic_eigenvalues, williamson

#: Default central-difference step for first derivatives in ``t``.
RATE_STEP = 1e-4
#: Default central-difference step for second derivatives in ``theta``.
CURVATURE_STEP = 1e-3


def _betas(spectrum):
    return np.array([inverse_temperature(lam) for lam in spectrum])


def _weights(M):
    """``beta_j`` per normal mode and the Williamson matrix ``S``."""
    symplectic_eigenvalues(M)
    dec = williamson(M)
    return _betas(np.maximum(dec.spectrum, 1.0)), dec.S


def relative_entropy_displaced(M, xi):
    """``S(rho_{M,0} || rho_{M,xi})`` in nats.

    Raises:
        PureModeError: if ``M`` has a symplectic eigenvalue equal to 1.
    """
    beta, S = _weights(M)
    v = (S @ np.asarray(xi, dtype=float)).reshape(-1, 2)
    return float(0.5 * np.sum(beta * np.sum(v * v, axis=1)))


def _direction_fishers(M):
    beta, S = _weights(M)
    # column k: sum_j beta_j (S_{2j-1,k}^2 + S_{2j,k}^2)
    return np.repeat(beta, 2) @ (S * S)


def fisher_direction(state, k):
    """Fisher information of the family translated along quadrature ``k``.

    ``k`` is a 0-based index into ``(Q_1, P_1, ..., Q_n, P_n)``.
    """
    if not 0 <= k < 2 * state.n_modes:
        raise IndexError(f"quadrature index {k} out of range for {state.n_modes} modes")
    return float(_direction_fishers(state.cov)[k])


@dataclass(frozen=True)
class FisherReport:
    """Per-direction Fisher informations and their sum."""

    per_direction: np.ndarray
    total: float
    subsystem: tuple

    def to_dict(self):
        return {
            "subsystem": list(self.subsystem),
            "per_direction": [float(x) for x in self.per_direction],
            "total": self.total,
        }


def fisher_total(state):
    """Sum of Fisher informations over all ``2n`` quadrature translations."""
    values = _direction_fishers(state.cov)
    return FisherReport(values, float(values.sum()), tuple(state.names))


def conditional_fisher(state, subsystems):
    """``J(A|B)``: directions of ``A`` only, ``S`` from the full ``M_AB``."""
    names = [subsystems] if isinstance(subsystems, str) else list(subsystems)
    values = _direction_fishers(state.cov)[state.indices(names)]
    return FisherReport(values, float(values.sum()), tuple(names))


def entropy_rate(state, subsystems):
    """``d/dt S(A|B)`` at ``t = 0`` under diffusion of ``A``.

    ``1/4 sum_l beta(l_l) tr [S (I_A + 0_B) S^T]^{(l)}`` where ``[.]^{(l)}`` is
    the 2x2 block of normal mode ``l``.
    """
    names = [subsystems] if isinstance(subsystems, str) else list(subsystems)
    beta, S = _weights(state.cov)
    if not names:
        return 0.0
    idx = state.indices(names)
    Sa = S[:, idx]
    diag = np.sum(Sa * Sa, axis=1)
    block_traces = diag[0::2] + diag[1::2]
    return float(0.25 * np.dot(beta, block_traces))


def entropy_rate_fd(state, subsystems, h=RATE_STEP):
    """Central difference of ``t -> S(A|B)`` under diffusion of ``A`` at ``t = 0``."""
    names = [subsystems] if isinstance(subsystems, str) else list(subsystems)
    rest = [n for n in state.names if n not in names]
    plus = conditional_entropy(_add_noise(state, h, names), names, rest)
    minus = conditional_entropy(_add_noise(state, -h, names), names, rest)
    return (plus - minus) / (2.0 * h)


def fisher_direction_fd(state, k, h=CURVATURE_STEP):
    """Second central difference of ``theta -> S(rho || rho_{theta e_k})`` at 0."""
    e = np.zeros(2 * state.n_modes)
    e[k] = 1.0
    f = lambda theta: relative_entropy_displaced(state.cov, theta * e)  # noqa: E731
    return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h)


def debruijn_residual(state, subsystems, h=1e-3):
    """``|dS(A|B)/dt - J(A|B)/4|`` with the derivative by central difference.

    The residual is the finite-difference truncation error and shrinks as
    ``h^2``.
    """
    rate = entropy_rate_fd(state, subsystems, h)
    return abs(rate - conditional_fisher(state, subsystems).total / 4.0)


#: Steps ``(h, h/2)`` for the Richardson check of the de Bruijn residual.
RICHARDSON_STEP = 1e-2


@dataclass(frozen=True)
class DebruijnRecord:
    """Exact and finite-difference checks of ``dS(A|B)/dt = J(A|B)/4`` on one state."""

    seed: int
    m: int
    n: int
    rate: float
    quarter_fisher: float
    exact_residual: float
    fd_residual: float
    fd_residual_half: float

    FIELDS = ("seed", "m", "n", "rate", "quarter_fisher", "exact_residual", "fd_residual", "fd_residual_half", "richardson_ratio")

    @property
    def richardson_ratio(self):
        return self.fd_residual / self.fd_residual_half if self.fd_residual_half > 0 else float("inf")

    def values(self):
        return (
            self.seed,
            self.m,
            self.n,
            self.rate,
            self.quarter_fisher,
            self.exact_residual,
            self.fd_residual,
            self.fd_residual_half,
            self.richardson_ratio,
        )


def random_bipartite_state(seed, m=None, n=None, spectrum_range=(1.05, 6.0)):
    """Random mixed state on ``A`` (``m`` modes) and ``B`` (``n`` modes, may be 0).

    Mode counts not given are drawn from ``{1, 2, 3}`` and ``{0, 1, 2}``.
    """
    from .state import GaussianState
    from .symplectic import random_gaussian_covariance

    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 4)) if m is None else int(m)
    n = int(rng.integers(0, 3)) if n is None else int(n)
    cov = random_gaussian_covariance(rng, m + n, spectrum_range)
    part = [("A", m)] + ([("B", n)] if n else [])
    return GaussianState(cov, partition=part)


def debruijn_record(seed, m=None, n=None, h=RICHARDSON_STEP):
    state = random_bipartite_state(seed, m, n)
    rate = entropy_rate(state, "A")
    quarter = conditional_fisher(state, "A").total / 4.0
    return DebruijnRecord(
        int(seed),
        state.partition[0][1],
        state.n_modes - state.partition[0][1],
        rate,
        quarter,
        abs(rate - quarter),
        debruijn_residual(state, "A", h),
        debruijn_residual(state, "A", h / 2.0),
    )


def debruijn_sweep(seed, count, m=None, n=None, h=RICHARDSON_STEP):
    """Records for seeds ``seed, ..., seed + count - 1``."""
    return [debruijn_record(seed + i, m, n, h) for i in range(count)]
