"""Truncated number-basis oracle for one- and two-mode checks.

Everything here is computed from density matrices in the Fock basis and
shares no code with the covariance-matrix routines, so agreement between
the two is an independent test. The ladder operator is
``a = (Q + iP) / sqrt(2)``, hence a displacement ``xi = (xi_Q, xi_P)`` of the
quadratures corresponds to ``alpha = (xi_Q + i xi_P) / sqrt(2)``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from .exceptions import ValidationError

TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockDensityMatrix:
    """Density matrix on ``n_modes`` modes, each truncated at ``cutoff`` photons.

    ``deficit`` bounds the probability lost to the truncation.
    """

    matrix: np.ndarray
    cutoff: int
    n_modes: int = 1
    deficit: float = 0.0

    @property
    def dim(self):
        return (self.cutoff + 1) ** self.n_modes

    def trace(self):
        return float(np.trace(self.matrix).real)

    def conjugate(self, U, deficit=None):
        """``U rho U^dagger``; the deficit is carried over unless given."""
        return FockDensityMatrix(
            U @ self.matrix @ U.conj().T, self.cutoff, self.n_modes, self.deficit if deficit is None else deficit
        )

    def partial_trace(self, keep=0):
        """Reduce a two-mode matrix to mode ``keep`` (0 or 1)."""
        if self.n_modes != 2:
            raise ValidationError("partial trace needs a two-mode matrix")
        d = self.cutoff + 1
        r = self.matrix.reshape(d, d, d, d)
        red = np.einsum("ijkj->ik", r) if keep == 0 else np.einsum("jijk->ik", r)
        return FockDensityMatrix(red, self.cutoff, 1, self.deficit)


def fock_cutoff(nbar, alpha=0.0, tol=TAIL_TOL):
    """Smallest ``c`` with ``(nbar / (nbar + 1))^(c + 1) < tol``, plus displacement headroom.

    The headroom is ``10 (1 + |alpha|^2)`` photons when ``alpha != 0``.
    """
    c = 1
    if nbar > 0:
        q = nbar / (nbar + 1.0)
        c = max(1, math.ceil(math.log(tol) / math.log(q)) - 1)
    if alpha != 0:
        c += math.ceil(10.0 * (1.0 + abs(alpha) ** 2))
    return int(c)


def fock_thermal(nbar, cutoff):
    """Thermal state ``p_n = nbar^n / (nbar + 1)^(n + 1)`` for ``n <= cutoff``."""
    if cutoff < 1:
        raise ValidationError("cutoff must be at least 1")
    if nbar < 0:
        raise ValidationError("mean photon number must be nonnegative")
    n = np.arange(cutoff + 1)
    if nbar == 0:
        p = (n == 0).astype(float)
        deficit = 0.0
    else:
        q = nbar / (nbar + 1.0)
        p = (1.0 - q) * q**n
        deficit = q ** (cutoff + 1)
    return FockDensityMatrix(np.diag(p).astype(complex), int(cutoff), 1, float(deficit))


def fock_displacement(alpha, cutoff):
    """Matrix elements ``<m|D(alpha)|n>`` for ``m, n <= cutoff``.

    Uses the closed form
    ``<m|D|n> = sqrt(n!/m!) alpha^(m-n) e^(-|alpha|^2/2) L_n^(m-n)(|alpha|^2)``
    for ``m >= n`` and its mirror image for ``m < n``. These are exact
    elements of the untruncated operator, so columns with
    ``n <= cutoff - 10 |alpha|^2 - 10`` have unit norm to high accuracy.
    """
    alpha = complex(alpha)
    x = abs(alpha) ** 2
    if x > cutoff / 4.0:
        raise ValidationError(f"|alpha|^2 = {x} too large for cutoff {cutoff}")
    D = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    if alpha == 0:
        return np.eye(cutoff + 1, dtype=complex)
    log_r = math.log(abs(alpha))
    phase = alpha / abs(alpha)
    for m in range(cutoff + 1):
        for n in range(cutoff + 1):
            k = abs(m - n)
            lo = min(m, n)
            mag = math.exp(0.5 * (gammaln(lo + 1) - gammaln(lo + k + 1)) + k * log_r - x / 2.0)
            lag = eval_genlaguerre(lo, k, x)
            if m >= n:
                D[m, n] = mag * lag * phase**k
            else:
                D[m, n] = mag * lag * (-phase.conjugate()) ** k
    return D


def _bs_block_amplitudes(n1, n2, t, r):
    """Coefficients of ``U|n1, n2>`` on ``|k, N - k>``, ``N = n1 + n2``.

    ``a1^dag -> t a1^dag + r a2^dag`` and ``a2^dag -> r a1^dag - t a2^dag``.
    """
    N = n1 + n2
    amp = np.zeros(N + 1)
    for i in range(n1 + 1):
        ci = math.comb(n1, i) * t**i * r ** (n1 - i)
        for j in range(n2 + 1):
            cj = math.comb(n2, j) * r**j * (-t) ** (n2 - j)
            amp[i + j] += ci * cj
    k = np.arange(N + 1)
    log_norm = 0.5 * (gammaln(k + 1) + gammaln(N - k + 1) - gammaln(n1 + 1) - gammaln(n2 + 1))
    return amp * np.exp(log_norm)


def fock_beam_splitter(lam, cutoff):
    """Beam splitter on two modes, exact on the subspace ``n1 + n2 <= cutoff``.

    Photon number is conserved, so the operator is block diagonal in
    ``N = n1 + n2``; blocks with ``N > cutoff`` do not fit in the truncated
    space and are set to zero. The one-photon block is
    ``[[sqrt(l), sqrt(1-l)], [sqrt(1-l), -sqrt(l)]]``.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValidationError(f"transmissivity must lie in [0, 1], got {lam}")
    t, r = math.sqrt(lam), math.sqrt(1.0 - lam)
    d = cutoff + 1
    U = np.zeros((d * d, d * d))
    for N in range(cutoff + 1):
        for n1 in range(N + 1):
            n2 = N - n1
            amp = _bs_block_amplitudes(n1, n2, t, r)
            for k in range(N + 1):
                U[k * d + (N - k), n1 * d + n2] = amp[k]
    return U


def fock_beam_splitter_block(lam, N):
    """The ``(N + 1) x (N + 1)`` block of the beam splitter at total photon number ``N``."""
    t, r = math.sqrt(lam), math.sqrt(1.0 - lam)
    return np.column_stack([_bs_block_amplitudes(n1, N - n1, t, r) for n1 in range(N + 1)])


def fock_entropy(rho, cutoff=1e-15):
    """``-sum e log e`` over eigenvalues of ``rho`` above ``cutoff`` (nats)."""
    mat = rho.matrix if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    ev = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    ev = ev[ev > cutoff]
    return float(-np.sum(ev * np.log(ev)))


def fock_relative_entropy(rho, sigma, cutoff=1e-15):
    """``tr rho (log rho - log sigma)`` in nats; ``inf`` if supports mismatch."""
    a = rho.matrix if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, FockDensityMatrix) else np.asarray(sigma)
    ea, va = np.linalg.eigh(0.5 * (a + a.conj().T))
    eb, vb = np.linalg.eigh(0.5 * (b + b.conj().T))
    keep_a = ea > cutoff
    term_a = float(np.sum(ea[keep_a] * np.log(ea[keep_a])))
    # weights of rho on sigma's eigenvectors
    overlap = np.real(np.einsum("ki,kl,li->i", vb.conj(), a, vb))
    support = eb > 0
    if np.any(overlap[~support] > cutoff):
        return float("inf")
    term_b = float(np.sum(overlap[support] * np.log(eb[support])))
    return term_a - term_b


def coherent_alpha(xi):
    """Complex amplitude of a quadrature displacement ``(xi_Q, xi_P)``."""
    return complex(xi[0], xi[1]) / math.sqrt(2.0)


#: Agreement tolerance between the number-basis and covariance computations.
ORACLE_TOL = 1e-6


def oracle_residuals(nbars=(0.1, 0.5, 2.0), lam=0.3, nus=(2.0, 1.5), xi=(0.8, -0.5)):
    """Absolute differences between number-basis values and closed forms.

    Returns a dict with keys ``thermal_entropy``, ``displaced_relative_entropy``
    and ``beam_split_entropy``, each the worst case over the inputs. The
    closed forms are ``g(N)``, ``beta/2 |xi|^2`` and ``g((l nu1 + (1-l) nu2 - 1)/2)``.
    """
    from .fisher import relative_entropy_displaced
    from .state import g_function, inverse_temperature

    thermal_err = 0.0
    for nbar in nbars:
        rho = fock_thermal(nbar, fock_cutoff(nbar))
        thermal_err = max(thermal_err, abs(fock_entropy(rho) - g_function(nbar)))

    rel_err = 0.0
    alpha = coherent_alpha(xi)
    for nbar in nbars:
        cutoff = fock_cutoff(nbar, alpha)
        rho = fock_thermal(nbar, cutoff)
        shifted = rho.conjugate(fock_displacement(alpha, cutoff))
        nu = 2.0 * nbar + 1.0
        closed = 0.5 * inverse_temperature(nu) * float(np.dot(xi, xi))
        gaussian = relative_entropy_displaced(nu * np.eye(2), xi)
        value = fock_relative_entropy(rho, shifted)
        rel_err = max(rel_err, abs(value - closed), abs(gaussian - closed))

    nu1, nu2 = nus
    n1, n2 = (nu1 - 1.0) / 2.0, (nu2 - 1.0) / 2.0
    cutoff = max(fock_cutoff(n1), fock_cutoff(n2))
    a, b = fock_thermal(n1, cutoff), fock_thermal(n2, cutoff)
    joint = FockDensityMatrix(np.kron(a.matrix, b.matrix), cutoff, 2, a.deficit + b.deficit)
    out = joint.conjugate(fock_beam_splitter(lam, cutoff)).partial_trace(0)
    closed = g_function((lam * nu1 + (1.0 - lam) * nu2 - 1.0) / 2.0)
    bs_err = abs(fock_entropy(out) - closed)

    return {
        "thermal_entropy": thermal_err,
        "displaced_relative_entropy": rel_err,
        "beam_split_entropy": bs_err,
    }
