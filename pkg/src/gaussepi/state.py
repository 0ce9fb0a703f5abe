"""Gaussian states with named subsystems, entropies and purification."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .exceptions import PureModeError, ValidationError
from .symplectic import PURE_TOL, symplectic_eigenvalues, validate_covariance, williamson


def g_function(N):
    """Entropy in nats of a thermal mode with mean photon number ``N``.

    ``g(N) = (N + 1) log(N + 1) - N log N`` with ``g(0) = 0``. Vectorized.
    """
    N = np.asarray(N, dtype=float)
    if np.any(N < 0):
        raise ValidationError("g is defined for N >= 0 only")
    out = xlogy(N + 1.0, N + 1.0) - xlogy(N, N)
    return float(out) if out.ndim == 0 else out


def inverse_temperature(lam, allow_pure=False):
    """``beta(l) = log((l + 1) / (l - 1))`` for a symplectic eigenvalue ``l``.

    A pure mode (``l`` within ``PURE_TOL`` of 1) raises :class:`PureModeError`
    unless ``allow_pure`` is set, in which case ``inf`` is returned.
    """
    lam = float(lam)
    if lam < 1.0 - PURE_TOL:
        raise ValidationError(f"symplectic eigenvalue {lam} < 1")
    if lam - 1.0 <= PURE_TOL:
        if allow_pure:
            return float("inf")
        raise PureModeError(f"inverse temperature diverges at symplectic eigenvalue {lam}")
    return float(np.log1p(2.0 / (lam - 1.0)))


def mean_photon_eigenmode(lam):
    """Mean photon number ``(l - 1) / 2`` of a normal mode."""
    lam = float(lam)
    if lam < 1.0 - PURE_TOL:
        raise ValidationError(f"symplectic eigenvalue {lam} < 1")
    return max(lam - 1.0, 0.0) / 2.0


def entropy_from_spectrum(spectrum):
    """Von Neumann entropy (nats) from a list of symplectic eigenvalues."""
    spec = np.maximum(np.asarray(spectrum, dtype=float), 1.0)
    return float(np.sum(g_function((spec - 1.0) / 2.0)))


def _normalize_partition(partition, n_modes):
    if partition is None:
        return (("A", n_modes),)
    if isinstance(partition, dict):
        partition = partition.items()
    out = []
    for item in partition:
        if isinstance(item, dict):
            name, k = item["name"], item["n_modes"]
        else:
            name, k = item
        if int(k) != k or k < 1:
            raise ValidationError(f"subsystem {name!r} has invalid mode count {k!r}")
        out.append((str(name), int(k)))
    names = [name for name, _ in out]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate subsystem names in {names}")
    if sum(k for _, k in out) != n_modes:
        raise ValidationError(f"partition {out} does not tile {n_modes} modes")
    return tuple(out)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Gaussian state given by covariance, displacement and a mode partition.

    ``partition`` is an ordered sequence of ``(name, n_modes)`` pairs whose
    blocks tile the modes contiguously in order. Arrays are stored read-only.
    """

    cov: np.ndarray
    displacement: np.ndarray = None
    partition: tuple = None
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValidationError(f"covariance must be square with even dimension, got {cov.shape}")
        n = cov.shape[0] // 2
        disp = np.zeros(2 * n) if self.displacement is None else np.array(self.displacement, dtype=float)
        if disp.shape != (2 * n,):
            raise ValidationError(f"displacement must have length {2 * n}, got shape {disp.shape}")
        if self.validate:
            report = validate_covariance(cov)
            if not report.ok:
                raise ValidationError(
                    f"uncertainty violation: min eig(M + iJ) = {report.min_eigenvalue:.6g}, "
                    f"asymmetry = {report.asymmetry:.3g}"
                )
        cov = 0.5 * (cov + cov.T)
        cov.flags.writeable = False
        disp.flags.writeable = False
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "displacement", disp)
        object.__setattr__(self, "partition", _normalize_partition(self.partition, n))

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    @property
    def names(self):
        return [name for name, _ in self.partition]

    def mode_slices(self):
        """Map each subsystem name to its slice of quadrature indices."""
        out, start = {}, 0
        for name, k in self.partition:
            out[name] = slice(2 * start, 2 * (start + k))
            start += k
        return out

    def indices(self, names):
        """Quadrature indices of the listed subsystems, in the given order."""
        if isinstance(names, str):
            names = [names]
        slices = self.mode_slices()
        idx = []
        for name in names:
            if name not in slices:
                raise ValidationError(f"unknown subsystem {name!r}; have {self.names}")
            s = slices[name]
            idx.extend(range(s.start, s.stop))
        return np.array(idx, dtype=int)

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def williamson(self):
        return williamson(self.cov)

    def relabel(self, partition):
        """Same moments with a new partition."""
        return GaussianState(self.cov, self.displacement, partition, validate=False)

    def to_dict(self):
        return {
            "n_modes": self.n_modes,
            "covariance": [float(x) for x in self.cov.ravel()],
            "displacement": [float(x) for x in self.displacement],
            "partition": [{"name": name, "n_modes": k} for name, k in self.partition],
        }

    @classmethod
    def from_dict(cls, data, validate=True):
        """Build from ``{n_modes, covariance, displacement, partition}``.

        ``covariance`` is row-major with ``4 n^2`` entries; ``displacement``
        and ``partition`` (a list of ``{name, n_modes}``) are optional.
        """
        n = int(data["n_modes"])
        cov = np.asarray(data["covariance"], dtype=float)
        if cov.size != 4 * n * n:
            raise ValidationError(f"covariance needs {4 * n * n} entries, got {cov.size}")
        return cls(cov.reshape(2 * n, 2 * n), data.get("displacement"), data.get("partition"), validate=validate)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text, validate=True):
        return cls.from_dict(json.loads(text), validate=validate)


def vacuum(n_modes=1, name="A"):
    return GaussianState(np.eye(2 * n_modes), partition=[(name, n_modes)])


def thermal(lam, n_modes=1, name="A"):
    """Thermal state with symplectic eigenvalue ``lam`` on every mode."""
    return GaussianState(float(lam) * np.eye(2 * n_modes), partition=[(name, n_modes)])


def two_mode_squeezed(a, names=("A", "B")):
    """Pure two-mode squeezed state whose single-mode marginals have covariance ``a I``."""
    c = np.sqrt(a * a - 1.0)
    Z = np.diag([1.0, -1.0])
    cov = np.block([[a * np.eye(2), c * Z], [c * Z, a * np.eye(2)]])
    return GaussianState(cov, partition=[(names[0], 1), (names[1], 1)])


def entropy(state):
    """Von Neumann entropy in nats; independent of the displacement."""
    return entropy_from_spectrum(symplectic_eigenvalues(state.cov))


def reduce(state, subsystems):
    """Partial trace onto ``subsystems`` (a name or list of names)."""
    if isinstance(subsystems, str):
        subsystems = [subsystems]
    idx = state.indices(subsystems)
    k = dict(state.partition)
    return GaussianState(
        state.cov[np.ix_(idx, idx)],
        state.displacement[idx],
        [(name, k[name]) for name in subsystems],
        validate=False,
    )


def conditional_entropy(state, target, condition=()):
    """``S(target | condition) = S(target, condition) - S(condition)``."""
    target = [target] if isinstance(target, str) else list(target)
    condition = [condition] if isinstance(condition, str) else list(condition)
    if set(target) & set(condition):
        raise ValidationError(f"target {target} and condition {condition} overlap")
    joint = entropy(reduce(state, target + condition))
    if not condition:
        return joint
    return joint - entropy(reduce(state, condition))


def mean_photon_number(state, subsystem):
    """Total mean photon number of a subsystem, including displacement."""
    sub = reduce(state, subsystem)
    diag = np.diag(sub.cov)
    d = sub.displacement
    return float(np.sum(diag) / 4.0 + np.sum(d * d) / 2.0 - sub.n_modes / 2.0)


def tensor(s1, s2):
    """Tensor product; partitions are concatenated and must not clash."""
    clash = set(s1.names) & set(s2.names)
    if clash:
        raise ValidationError(f"subsystem names clash: {sorted(clash)}")
    n1, n2 = 2 * s1.n_modes, 2 * s2.n_modes
    cov = np.zeros((n1 + n2, n1 + n2))
    cov[:n1, :n1] = s1.cov
    cov[n1:, n1:] = s2.cov
    return GaussianState(
        cov,
        np.concatenate([s1.displacement, s2.displacement]),
        list(s1.partition) + list(s2.partition),
        validate=False,
    )


def purify(state, name="R"):
    """Pure Gaussian state on ``state`` plus ``n`` purifying modes called ``name``.

    With ``S M S^T = D`` the output covariance is
    ``[[M, S^{-1} sqrt(D^2 - I) Z], [Z sqrt(D^2 - I) S^{-T}, D]]``,
    ``Z = diag(1, -1, 1, -1, ...)``. The purifier is centred.
    """
    if name in state.names:
        raise ValidationError(f"purifier name {name!r} already used")
    n = state.n_modes
    dec = williamson(state.cov)
    lam = np.maximum(dec.spectrum, 1.0)
    D = np.repeat(lam, 2)
    C = np.sqrt(np.repeat(lam * lam - 1.0, 2)) * np.tile([1.0, -1.0], n)
    S_inv = np.linalg.solve(dec.S, np.eye(2 * n))
    off = S_inv * C[None, :]
    cov = np.block([[state.cov, off], [off.T, np.diag(D)]])
    return GaussianState(
        cov,
        np.concatenate([state.displacement, np.zeros(2 * n)]),
        list(state.partition) + [(name, n)],
        validate=False,
    )


def entropy_continuity_bound(nu, lam):
    """Upper bound on ``|S(rho) - S(sigma)|`` from the two symplectic spectra.

    ``(N/2) (d beta(l_*) + d^2 / (m^2 - 1))`` with ``d = max_j |nu_j - l_j|``,
    ``l_* = min_j l_j`` and ``m = min(l_*, min_j nu_j)``. Taking ``m`` over
    both spectra keeps the Taylor remainder bounded when some ``nu_j`` lies
    below ``l_*``; for ``nu >= l`` it equals ``l_*``. Every ``l_j`` must
    exceed 1; a pure mode in ``nu`` alone gives ``inf`` unless ``d = 0``.
    """
    nu = np.asarray(nu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if nu.shape != lam.shape or nu.ndim != 1:
        raise ValidationError("spectra must be 1-d and of equal length")
    lam_min = float(lam.min())
    if lam_min <= 1.0:
        raise PureModeError("continuity bound needs every reference eigenvalue > 1")
    d = float(np.max(np.abs(nu - lam)))
    if d == 0.0:
        return 0.0
    m = min(lam_min, float(nu.min()))
    if m <= 1.0:
        return float("inf")
    return len(lam) / 2.0 * (d * inverse_temperature(lam_min) + d * d / (m * m - 1.0))
