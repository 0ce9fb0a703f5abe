"""Gaussian maps acting on :class:`~gaussepi.state.GaussianState`."""

import numpy as np

from .exceptions import ValidationError
from .state import GaussianState, entropy, purify, reduce


def _check_transmissivity(lam):
    lam = float(lam)
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"transmissivity must lie in [0, 1], got {lam}")
    return lam


def beam_splitter_matrix(lam, n_modes=1):
    """Symplectic matrix ``[[sqrt(l) I, sqrt(1-l) I], [sqrt(1-l) I, -sqrt(l) I]]``.

    Acts on two arms of ``n_modes`` each, arm 1 first.
    """
    lam = _check_transmissivity(lam)
    eye = np.eye(2 * n_modes)
    t, r = np.sqrt(lam), np.sqrt(1.0 - lam)
    return np.block([[t * eye, r * eye], [r * eye, -t * eye]])


def apply_symplectic(state, S):
    """Conjugate by the Gaussian unitary of ``S``: ``(M, d) -> (S M S^T, S d)``."""
    S = np.asarray(S, dtype=float)
    if S.shape != state.cov.shape:
        raise ValidationError(f"symplectic matrix shape {S.shape} does not match state {state.cov.shape}")
    return GaussianState(S @ state.cov @ S.T, S @ state.displacement, state.partition, validate=False)


def displace(state, xi):
    """Weyl displacement ``d -> d + xi``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != state.displacement.shape:
        raise ValidationError(f"displacement must have length {state.displacement.size}")
    return GaussianState(state.cov, state.displacement + xi, state.partition, validate=False)


def diffuse(state, t, subsystems=None):
    """Diffusion for time ``t`` on the named subsystems (all modes if None).

    Adds ``t I`` to the covariance of the diffused block; the displacement is
    unchanged.
    """
    if t < 0:
        raise ValidationError(f"diffusion time must be nonnegative, got {t}")
    return _add_noise(state, t, subsystems)


def _add_noise(state, t, subsystems=None):
    # signed version of diffuse, used for central differences
    if subsystems is None:
        idx = np.arange(2 * state.n_modes)
    else:
        idx = state.indices(subsystems)
    cov = np.array(state.cov)
    cov[idx, idx] += t
    return GaussianState(cov, state.displacement, state.partition, validate=t < 0)


def beam_splitter_combine(rho1, rho2, lam, name="Y"):
    """Output arm of a beam splitter fed with the product ``rho1 (x) rho2``.

    ``M_Y = l M_1 + (1 - l) M_2`` and ``d_Y = sqrt(l) d_1 + sqrt(1 - l) d_2``.
    """
    lam = _check_transmissivity(lam)
    if rho1.n_modes != rho2.n_modes:
        raise ValidationError(f"arms have {rho1.n_modes} and {rho2.n_modes} modes")
    cov = lam * rho1.cov + (1.0 - lam) * rho2.cov
    d = np.sqrt(lam) * rho1.displacement + np.sqrt(1.0 - lam) * rho2.displacement
    return GaussianState(cov, d, [(name, rho1.n_modes)], validate=False)


def _split(state, x):
    x = state.names[0] if x is None else x
    rest = [name for name in state.names if name != x]
    idx_x = state.indices(x)
    idx_e = state.indices(rest) if rest else np.array([], dtype=int)
    return idx_x, idx_e


def _output_partition(n_y, n_e1, n_e2):
    part = [("Y", n_y)]
    if n_e1:
        part.append(("E1", n_e1))
    if n_e2:
        part.append(("E2", n_e2))
    return part


def beam_splitter_stabilized(rho1, rho2, lam, x1=None, x2=None):
    """Beam splitter on ``X1 X2`` with side systems ``E1``, ``E2`` left alone.

    Each input is split into its ``X`` block (``x1``/``x2``, default the first
    subsystem) and everything else, which becomes ``E1``/``E2``. The output
    partition is ``Y, E1, E2`` (empty side systems are dropped) with covariance

        [[l M_X1 + (1-l) M_X2, sqrt(l) L_X1E1, sqrt(1-l) L_X2E2],
         [sqrt(l) L_X1E1^T,    M_E1,           0               ],
         [sqrt(1-l) L_X2E2^T,  0,              M_E2            ]]
    """
    lam = _check_transmissivity(lam)
    x1_idx, e1_idx = _split(rho1, x1)
    x2_idx, e2_idx = _split(rho2, x2)
    if x1_idx.size != x2_idx.size:
        raise ValidationError(f"X blocks have {x1_idx.size // 2} and {x2_idx.size // 2} modes")
    t, r = np.sqrt(lam), np.sqrt(1.0 - lam)
    ny, n1, n2 = x1_idx.size, e1_idx.size, e2_idx.size
    M1, M2 = rho1.cov, rho2.cov
    cov = np.zeros((ny + n1 + n2,) * 2)
    y, e1, e2 = slice(0, ny), slice(ny, ny + n1), slice(ny + n1, ny + n1 + n2)
    cov[y, y] = lam * M1[np.ix_(x1_idx, x1_idx)] + (1.0 - lam) * M2[np.ix_(x2_idx, x2_idx)]
    cov[y, e1] = t * M1[np.ix_(x1_idx, e1_idx)]
    cov[y, e2] = r * M2[np.ix_(x2_idx, e2_idx)]
    cov[e1, y] = cov[y, e1].T
    cov[e2, y] = cov[y, e2].T
    cov[e1, e1] = M1[np.ix_(e1_idx, e1_idx)]
    cov[e2, e2] = M2[np.ix_(e2_idx, e2_idx)]
    d = np.concatenate(
        [
            t * rho1.displacement[x1_idx] + r * rho2.displacement[x2_idx],
            rho1.displacement[e1_idx],
            rho2.displacement[e2_idx],
        ]
    )
    return GaussianState(cov, d, _output_partition(ny // 2, n1 // 2, n2 // 2), validate=False)


def beam_splitter_by_conjugation(rho1, rho2, lam, x1=None, x2=None):
    """Same map as :func:`beam_splitter_stabilized`, built the long way.

    Forms ``rho1 (x) rho2``, applies the full beam-splitter unitary on the two
    ``X`` blocks with identity on the side systems, then traces out the second
    output arm. Used as an independent check of the block formula.
    """
    lam = _check_transmissivity(lam)
    x1_idx, e1_idx = _split(rho1, x1)
    x2_idx, e2_idx = _split(rho2, x2)
    if x1_idx.size != x2_idx.size:
        raise ValidationError(f"X blocks have {x1_idx.size // 2} and {x2_idx.size // 2} modes")
    n1 = rho1.cov.shape[0]
    cov = np.zeros((n1 + rho2.cov.shape[0],) * 2)
    cov[:n1, :n1] = rho1.cov
    cov[n1:, n1:] = rho2.cov
    d = np.concatenate([rho1.displacement, rho2.displacement])
    x_all = np.concatenate([x1_idx, n1 + x2_idx])
    S = np.eye(cov.shape[0])
    S[np.ix_(x_all, x_all)] = beam_splitter_matrix(lam, x1_idx.size // 2)
    cov = S @ cov @ S.T
    d = S @ d
    keep = np.concatenate([x1_idx, e1_idx, n1 + e2_idx])
    part = _output_partition(x1_idx.size // 2, e1_idx.size // 2, e2_idx.size // 2)
    return GaussianState(cov[np.ix_(keep, keep)], d[keep], part, validate=False)


def mutual_information(rho_a, lam, sigma_e, purification=None):
    """``I(A':C)`` for the additive noise channel with environment ``sigma_e``.

    The input is purified (or ``purification`` is used: a pure state whose
    first ``n`` modes carry ``rho_a``), the input arm goes through the beam
    splitter against ``sigma_e`` and ``S(A') + S(C) - S(A'C)`` is returned.
    """
    n = rho_a.n_modes
    if sigma_e.n_modes != n:
        raise ValidationError(f"input has {n} modes but environment has {sigma_e.n_modes}")
    if purification is None:
        psi = purify(rho_a.relabel([("A", n)]), name="R")
    else:
        psi = purification.relabel([("A", n), ("R", purification.n_modes - n)])
    out = beam_splitter_stabilized(psi, sigma_e.relabel([("X", n)]), lam, x1="A")
    return entropy(reduce(out, "E1")) + entropy(reduce(out, "Y")) - entropy(out)
