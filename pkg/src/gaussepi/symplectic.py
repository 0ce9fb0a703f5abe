"""Symplectic linear algebra on quadrature covariance matrices.

Conventions used throughout the package:

* Quadratures are ordered ``(Q_1, P_1, ..., Q_n, P_n)``.
* Covariances use the anticommutator without a factor 1/2, so the vacuum
  has covariance equal to the identity and physical states satisfy
  ``M + iJ >= 0``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from .exceptions import DecompositionError, ValidationError

#: Symplectic eigenvalues in ``[1 - PURE_TOL, 1)`` are reported as exactly 1.
PURE_TOL = 1e-9


def symplectic_form(n_modes):
    """Return the ``2n x 2n`` symplectic form ``J = [[0, 1], [-1, 0]]^{(+) n}``."""
    if int(n_modes) != n_modes or n_modes < 1:
        raise ValidationError(f"n_modes must be a positive integer, got {n_modes!r}")
    return np.kron(np.eye(int(n_modes)), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _as_square_even(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"covariance must be a square matrix, got shape {M.shape}")
    if M.shape[0] % 2 or M.shape[0] == 0:
        raise ValidationError(f"covariance dimension must be even and nonzero, got {M.shape[0]}")
    return M


@dataclass(frozen=True)
class CovarianceReport:
    """Outcome of :func:`validate_covariance`."""

    ok: bool
    min_eigenvalue: float
    asymmetry: float

    def __bool__(self):
        return self.ok


def validate_covariance(M, tol=1e-9):
    """Check symmetry and the uncertainty relation ``M + iJ >= 0``.

    Args:
        M (array): candidate ``2n x 2n`` covariance matrix
        tol (float): tolerance on the asymmetry and on the smallest
            eigenvalue of the Hermitian matrix ``M + iJ``

    Returns:
        CovarianceReport: ok flag, smallest eigenvalue of ``M + iJ`` and
        the max-norm of ``M - M^T``.
    """
    M = _as_square_even(M)
    asym = float(np.max(np.abs(M - M.T)))
    sym = 0.5 * (M + M.T)
    J = symplectic_form(M.shape[0] // 2)
    min_eig = float(np.linalg.eigvalsh(sym + 1j * J)[0])
    return CovarianceReport(ok=asym <= tol and min_eig >= -tol, min_eigenvalue=min_eig, asymmetry=asym)


def _sqrt_and_inv_sqrt(M):
    w, V = np.linalg.eigh(0.5 * (M + M.T))
    if w[0] <= 0:
        raise DecompositionError(f"matrix is not positive definite (smallest eigenvalue {w[0]:.3e})")
    root = np.sqrt(w)
    return (V * root) @ V.T, (V / root) @ V.T


def symplectic_spectrum(M):
    """Symplectic eigenvalues of any real symmetric positive definite matrix.

    No physicality check is made, so this also serves matrices such as
    ``I_A (+) 0_B + eps M`` whose spectrum lies below 1. Values are the
    positive members of ``spec(iJM)`` sorted in descending order.
    """
    M = _as_square_even(M)
    n = M.shape[0] // 2
    half, _ = _sqrt_and_inv_sqrt(M)
    A = half @ symplectic_form(n) @ half
    # iA is Hermitian with eigenvalues +-lambda_j
    vals = np.linalg.eigvalsh(1j * A)
    return np.sort(vals[n:])[::-1].copy()


def symplectic_eigenvalues(M, tol=PURE_TOL):
    """Symplectic eigenvalues of a physical covariance matrix, descending.

    Values within ``tol`` below 1 are clamped to 1.

    Raises:
        ValidationError: if ``M`` violates the uncertainty relation.
    """
    report = validate_covariance(M, tol=tol)
    if not report.ok:
        raise ValidationError(
            f"uncertainty violation: min eig(M + iJ) = {report.min_eigenvalue:.6g}, "
            f"asymmetry = {report.asymmetry:.3g}"
        )
    spec = symplectic_spectrum(M)
    if spec[-1] < 1.0 - tol:
        raise ValidationError(f"uncertainty violation: symplectic eigenvalue {spec[-1]:.12g} < 1")
    return np.maximum(spec, 1.0)


def symplectic_gap(spectrum, tol=1e-9):
    """Smallest distance between distinct values of ``spectrum``.

    Values closer than ``tol`` count as one. Returns ``inf`` when only a
    single distinct value is present.
    """
    vals = np.sort(np.asarray(spectrum, dtype=float).ravel())
    if vals.size == 0:
        raise ValidationError("spectrum must be nonempty")
    diffs = np.diff(vals)
    diffs = diffs[diffs > tol]
    return float(diffs.min()) if diffs.size else float("inf")


@dataclass(frozen=True)
class SymplecticDecomposition:
    """Williamson normal form ``S M S^T = D(spectrum)``.

    Attributes:
        S (array): symplectic matrix
        spectrum (array): symplectic eigenvalues, descending
        gap (float): symplectic gap of ``spectrum``
        symplectic_residual (float): ``max|S J S^T - J|``
        diagonal_residual (float): ``max|S M S^T - D|``
    """

    S: np.ndarray
    spectrum: np.ndarray
    gap: float
    symplectic_residual: float
    diagonal_residual: float

    @property
    def diagonal(self):
        return np.diag(np.repeat(self.spectrum, 2))


def williamson(M):
    """Williamson decomposition of a positive definite matrix.

    With ``A = M^{1/2} J M^{1/2}`` (real antisymmetric) the real Schur form
    ``O^T A O`` is a direct sum of blocks ``[[0, l], [-l, 0]]``. Then
    ``S = D^{1/2} O^T M^{-1/2}`` is symplectic and ``S M S^T = D``. Blocks are
    ordered by descending ``l``; within a block both columns of ``O`` are
    flipped if needed so the first entry above 1e-12 in magnitude is positive.

    Raises:
        DecompositionError: if ``M`` is not positive definite.
    """
    M = _as_square_even(M)
    n = M.shape[0] // 2
    J = symplectic_form(n)
    half, inv_half = _sqrt_and_inv_sqrt(M)
    A = half @ J @ half
    A = 0.5 * (A - A.T)
    T, O = scipy.linalg.schur(A, output="real")

    pairs = []
    i = 0
    while i < 2 * n:
        if i + 1 >= 2 * n or abs(T[i + 1, i]) < 1e-300:
            raise DecompositionError("real Schur form did not split into 2x2 blocks")
        u, v = O[:, i].copy(), O[:, i + 1].copy()
        b = T[i, i + 1]
        if b < 0:
            u, v, b = v, u, -b
        nz = np.flatnonzero(np.abs(u) > 1e-12)
        if nz.size and u[nz[0]] < 0:
            u, v = -u, -v
        pairs.append((b, u, v))
        i += 2
    pairs.sort(key=lambda p: -p[0])

    spectrum = np.array([p[0] for p in pairs])
    O = np.column_stack([c for p in pairs for c in (p[1], p[2])])
    S = np.sqrt(np.repeat(spectrum, 2))[:, None] * (O.T @ inv_half)
    D = np.diag(np.repeat(spectrum, 2))
    return SymplecticDecomposition(
        S=S,
        spectrum=spectrum,
        gap=symplectic_gap(spectrum),
        symplectic_residual=float(np.max(np.abs(S @ J @ S.T - J))),
        diagonal_residual=float(np.max(np.abs(S @ M @ S.T - D))),
    )


def _xxpp_to_xpxp(n):
    perm = np.empty(2 * n, dtype=int)
    perm[0::2] = np.arange(n)
    perm[1::2] = np.arange(n, 2 * n)
    return perm


def random_orthosymplectic(seed, n_modes):
    """Haar-random passive (orthogonal and symplectic) transformation."""
    rng = np.random.default_rng(seed)
    if n_modes == 1:
        U = np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    else:
        U = unitary_group.rvs(n_modes, random_state=rng)
    O = np.block([[U.real, -U.imag], [U.imag, U.real]])
    perm = _xxpp_to_xpxp(n_modes)
    return O[np.ix_(perm, perm)]


def random_symplectic(seed, n_modes, intensity=1.0):
    """Random symplectic matrix ``O_1 diag(e^{-r_j}, e^{r_j}) O_2``.

    ``O_1``, ``O_2`` are Haar-random passive transformations and the
    squeezing parameters ``r_j`` are uniform on ``[0, intensity]``, so
    ``intensity = 0`` yields a pure rotation. Deterministic in ``seed``.
    """
    if intensity < 0:
        raise ValidationError("intensity must be nonnegative")
    rng = np.random.default_rng(seed)
    O1 = random_orthosymplectic(rng, n_modes)
    O2 = random_orthosymplectic(rng, n_modes)
    r = rng.uniform(0.0, intensity, size=n_modes)
    sq = np.column_stack([np.exp(-r), np.exp(r)]).ravel()
    return (O1 * sq) @ O2


def random_gaussian_covariance(seed, n_modes, spectrum_range=(1.05, 6.0), intensity=1.0, return_spectrum=False):
    """Random covariance ``S^{-1} D(l) S^{-T}`` with prescribed spectrum range.

    Args:
        seed (int or Generator): randomness source
        n_modes (int): number of modes
        spectrum_range (tuple[float, float]): symplectic eigenvalues are drawn
            uniformly from ``[lo, hi]`` with ``1 <= lo <= hi``
        intensity (float): squeezing scale passed to :func:`random_symplectic`
        return_spectrum (bool): also return the drawn eigenvalues (descending)

    Returns:
        array or tuple[array, array]
    """
    lo, hi = spectrum_range
    if not 1.0 <= lo <= hi:
        raise ValidationError(f"need 1 <= lo <= hi, got {spectrum_range}")
    rng = np.random.default_rng(seed)
    spec = np.sort(rng.uniform(lo, hi, size=n_modes))[::-1]
    S = random_symplectic(rng, n_modes, intensity)
    J = symplectic_form(n_modes)
    S_inv = -J @ S.T @ J
    M = S_inv @ np.diag(np.repeat(spec, 2)) @ S_inv.T
    M = 0.5 * (M + M.T)
    return (M, spec) if return_spectrum else M
