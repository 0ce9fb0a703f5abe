"""Conditional entropy power inequality checks and perturbation validators."""

from dataclasses import dataclass

import numpy as np

from .channels import _check_transmissivity, beam_splitter_stabilized, diffuse
from .exceptions import PreconditionError, ValidationError
from .fisher import conditional_fisher
from .state import GaussianState, conditional_entropy, g_function
from .symplectic import random_gaussian_covariance, symplectic_gap, symplectic_spectrum, williamson

#: Symplectic spectrum range for randomly drawn states that feed Fisher paths.
DEFAULT_SPECTRUM_RANGE = (1.05, 6.0)

#: Instance families understood by :func:`random_epi_instance`.
KINDS = ("general", "pure", "thermal", "squeezed", "correlated")


@dataclass(frozen=True)
class EpiInstance:
    """Two input states and a transmissivity.

    The first subsystem of each state is its ``X`` block, the remaining
    subsystems (if any) form its side system ``E``.
    """

    state1: GaussianState
    state2: GaussianState
    lam: float

    def __post_init__(self):
        _check_transmissivity(self.lam)
        if self.state1.partition[0][1] != self.state2.partition[0][1]:
            raise ValidationError("X blocks must have equal mode counts")

    @property
    def m(self):
        return self.state1.partition[0][1]

    def _x_e(self, state):
        return state.names[0], state.names[1:]

    def conditional_entropies(self):
        x1, e1 = self._x_e(self.state1)
        x2, e2 = self._x_e(self.state2)
        return conditional_entropy(self.state1, x1, e1), conditional_entropy(self.state2, x2, e2)

    def output(self):
        return beam_splitter_stabilized(self.state1, self.state2, self.lam)

    def diffused(self, t):
        """Instance with both ``X`` blocks diffused for time ``t``."""
        return EpiInstance(
            diffuse(self.state1, t, self.state1.names[0]),
            diffuse(self.state2, t, self.state2.names[0]),
            self.lam,
        )


def epi_gap(inst):
    """``delta = S(Y|E1 E2) - l S(X1|E1) - (1 - l) S(X2|E2)``; nonnegative."""
    out = inst.output()
    s1, s2 = inst.conditional_entropies()
    s_out = conditional_entropy(out, "Y", out.names[1:])
    return s_out - inst.lam * s1 - (1.0 - inst.lam) * s2


def delta_trajectory(inst, t_grid):
    """``[(t, delta(t))]`` with both inputs diffused for time ``t`` first."""
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid must be nonnegative and strictly increasing")
    return [(float(t), epi_gap(inst.diffused(t))) for t in t_grid]


def fisher_combination(inst):
    """``J(Y|E1 E2) - l J(X1|E1) - (1 - l) J(X2|E2)``, equal to ``4 delta'``."""
    out = inst.output()
    j1 = conditional_fisher(inst.state1, inst.state1.names[0]).total
    j2 = conditional_fisher(inst.state2, inst.state2.names[0]).total
    j_out = conditional_fisher(out, "Y").total
    return j_out - inst.lam * j1 - (1.0 - inst.lam) * j2


def fisher_inequality_residual(inst, t=0.1):
    """``l J(X1|E1) + (1 - l) J(X2|E2) - J(Y|E1 E2)`` after diffusing by ``t``.

    Nonnegative by the conditional Fisher information inequality.
    """
    return -fisher_combination(inst.diffused(t))


def asymptotic_residual(state, subsystems, t):
    """``|S(A|B) - m g((t - 1)/2)|`` after diffusing ``A`` for time ``t > 1``."""
    if t <= 1:
        raise ValidationError("asymptotic residual needs t > 1")
    names = [subsystems] if isinstance(subsystems, str) else list(subsystems)
    rest = [n for n in state.names if n not in names]
    m = sum(dict(state.partition)[n] for n in names)
    s = conditional_entropy(diffuse(state, t, names), names, rest)
    return abs(s - m * g_function((t - 1.0) / 2.0))


@dataclass(frozen=True)
class PerturbationReport:
    """Predicted versus exact symplectic spectra of a perturbed matrix.

    Attributes:
        epsilon (float): perturbation size
        predicted (array): first-order prediction, one value per mode
        exact (array): exact symplectic spectrum, same length
        max_error (float): largest deviation that the prediction controls
        ratio_at_half_eps (float): ``max_error(eps) / max_error(eps / 2)``;
            about ``2**p`` when the error is ``O(eps**p)``
        cluster_counts_match (bool or None): degeneracy bookkeeping check,
            only filled in for the infinitesimal-time expansion
    """

    epsilon: float
    predicted: np.ndarray
    exact: np.ndarray
    max_error: float
    ratio_at_half_eps: float
    cluster_counts_match: bool = None

    @property
    def order(self):
        """Empirical convergence order ``log2(ratio_at_half_eps)``."""
        return float(np.log2(self.ratio_at_half_eps))

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "predicted": [float(x) for x in self.predicted],
            "exact": [float(x) for x in self.exact],
            "max_error": self.max_error,
            "ratio_at_half_eps": self.ratio_at_half_eps,
            "order": self.order,
            "cluster_counts_match": self.cluster_counts_match,
        }


def _ratio(err, err_half):
    return float(err / err_half) if err_half > 0 else float("inf")


def _zeroth(M, eps):
    exact = symplectic_spectrum(np.eye(M.shape[0]) + eps * M)
    predicted = np.ones_like(exact)
    return predicted, exact, float(np.max(np.abs(exact - predicted)))


def perturb_check_zeroth(M, eps):
    """Spectrum of ``I + eps M`` against the all-ones prediction (error ``O(eps)``)."""
    M = np.asarray(M, dtype=float)
    predicted, exact, err = _zeroth(M, eps)
    _, _, err_half = _zeroth(M, eps / 2.0)
    return PerturbationReport(float(eps), predicted, exact, err, _ratio(err, err_half))


def _block_projector(n_total, m):
    P = np.zeros((2 * n_total, 2 * n_total))
    P[: 2 * m, : 2 * m] = np.eye(2 * m)
    return P


def _first_infinite(M, m, eps):
    n_total = M.shape[0] // 2
    exact = symplectic_spectrum(_block_projector(n_total, m) + eps * M)
    a = symplectic_spectrum(np.eye(2 * m) + eps * M[: 2 * m, : 2 * m])
    b = eps * symplectic_spectrum(M[2 * m :, 2 * m :])
    predicted = np.sort(np.concatenate([a, b]))[::-1]
    return predicted, exact, float(np.max(np.abs(exact - predicted)))


def perturb_check_first_infinite(M, m, eps):
    """Spectrum of ``I_A (+) 0_B + eps M_AB`` against the decoupled prediction.

    Predicted: symplectic eigenvalues of ``I_A + eps M_A`` together with
    ``eps`` times the symplectic eigenvalues of ``M_B``; error ``O(eps^2)``.
    ``m`` is the number of modes in ``A`` (the leading block).
    """
    M = np.asarray(M, dtype=float)
    if not 0 < m < M.shape[0] // 2:
        raise ValidationError("A and B must both be nonempty")
    predicted, exact, err = _first_infinite(M, m, eps)
    _, _, err_half = _first_infinite(M, m, eps / 2.0)
    return PerturbationReport(float(eps), predicted, exact, err, _ratio(err, err_half))


def _clusters(spectrum, tol):
    """Group a descending spectrum into runs of (numerically) equal values."""
    groups = [[0]]
    for i in range(1, len(spectrum)):
        if abs(spectrum[i] - spectrum[groups[-1][0]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _first_infinitesimal(M, a_idx, eps, cluster_tol):
    dec = williamson(M)
    lam = dec.spectrum
    gap = symplectic_gap(lam, tol=cluster_tol)
    P = np.zeros_like(M)
    P[a_idx, a_idx] = 1.0
    Z = dec.S @ P @ dec.S.T
    shifts = 0.5 * (np.diag(Z)[0::2] + np.diag(Z)[1::2])
    predicted = lam + eps * shifts
    exact = symplectic_spectrum(M + eps * P)
    err, counts_ok = 0.0, True
    for group in _clusters(lam, cluster_tol):
        centre = float(np.mean(lam[group]))
        lo, hi = centre - gap / 2.0, centre + gap / 2.0
        inside = exact[(exact >= lo) & (exact <= hi)]
        counts_ok &= inside.size == len(group)
        err = max(err, abs(float(inside.sum()) - float(predicted[group].sum())))
    return predicted, exact, err, bool(counts_ok), gap


def perturb_check_first_infinitesimal(M, a_subsystem, eps=None, cluster_tol=1e-8):
    """Spectrum of ``M + eps (I_A (+) 0_B)`` against first-order cluster sums.

    For each distinct symplectic eigenvalue ``l`` of ``M`` the exact values in
    ``[l - gap/2, l + gap/2]`` are counted (must equal the multiplicity) and
    summed; the sum is compared with
    ``sum_l (l + eps/2 tr [S (I_A (+) 0_B) S^T]^{(l)})``. Error ``O(eps^2)``.

    Args:
        M (array or GaussianState): covariance ``M_AB``; with a state,
            ``a_subsystem`` may be a subsystem name
        a_subsystem (int or str): number of leading modes in ``A``, or a name
        eps (float): perturbation; defaults to ``gap / 1000`` (``1e-3`` when
            the spectrum is fully degenerate)

    Raises:
        PreconditionError: if ``eps >= gap / 10``.
    """
    if isinstance(M, GaussianState):
        a_idx = M.indices(a_subsystem) if isinstance(a_subsystem, str) else np.arange(2 * a_subsystem)
        M = np.asarray(M.cov)
    else:
        M = np.asarray(M, dtype=float)
        a_idx = np.arange(2 * int(a_subsystem))
    gap = williamson(M).gap
    if eps is None:
        eps = gap / 1000.0 if np.isfinite(gap) else 1e-3
    if eps >= gap / 10.0:
        raise PreconditionError(f"eps = {eps} is not small against the symplectic gap {gap}")
    predicted, exact, err, counts_ok, _ = _first_infinitesimal(M, a_idx, eps, cluster_tol)
    _, _, err_half, counts_half, _ = _first_infinitesimal(M, a_idx, eps / 2.0, cluster_tol)
    return PerturbationReport(
        float(eps), predicted, exact, err, _ratio(err, err_half), cluster_counts_match=counts_ok and counts_half
    )


def _random_state(rng, m, L, kind, spectrum_range, intensity):
    n = m + L
    if kind == "pure":
        cov = random_gaussian_covariance(rng, n, (1.0, 1.0), intensity)
    elif kind == "thermal":
        nu = rng.uniform(*spectrum_range)
        cov = nu * np.eye(2 * n)
    elif kind == "squeezed":
        # product of independently squeezed thermal modes, no X-E correlation
        blocks = [random_gaussian_covariance(rng, 1, spectrum_range, intensity) for _ in range(n)]
        cov = np.zeros((2 * n, 2 * n))
        for j, b in enumerate(blocks):
            cov[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = b
    elif kind == "correlated":
        cov = random_gaussian_covariance(rng, n, (spectrum_range[0], spectrum_range[0] + 0.5), 1.5 * intensity)
    elif kind == "general":
        cov = random_gaussian_covariance(rng, n, spectrum_range, intensity)
    else:
        raise ValidationError(f"unknown instance kind {kind!r}; choose from {KINDS}")
    part = [("X", m)] + ([("E", L)] if L else [])
    return GaussianState(cov, partition=part)


def random_epi_instance(seed, m, L, lam=None, kind="general", spectrum_range=DEFAULT_SPECTRUM_RANGE, intensity=1.0):
    """Deterministic random instance; ``lam=None`` draws it uniformly from [0, 1].

    ``kind`` selects the input family: ``general`` (random spectrum in
    ``spectrum_range`` and random symplectic), ``pure``, ``thermal``,
    ``squeezed`` (product of single-mode squeezed thermal states) or
    ``correlated`` (near-pure, strongly squeezed and entangled).
    """
    rng = np.random.default_rng(seed)
    lam = rng.uniform(0.0, 1.0) if lam is None else float(lam)
    s1 = _random_state(rng, m, L, kind, spectrum_range, intensity)
    s2 = _random_state(rng, m, L, kind, spectrum_range, intensity)
    return EpiInstance(s1, s2, lam)


#: Diffusion times at which the gap trajectory is sampled in a sweep.
SWEEP_T_GRID = (0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0)

#: Slack for the sign checks (gap, monotonicity, Fisher inequality).
GAP_TOL = 1e-9


@dataclass(frozen=True)
class EpiSweepRecord:
    """One row of an EPI sweep.

    ``min_delta_slope`` is the smallest ``-(delta(t') - delta(t)) / (t' - t)``
    along the diffusion grid and ``max_fisher_residual`` the largest
    ``J(Y|E1E2) - l J(X1|E1) - (1-l) J(X2|E2)`` over the grid points ``t > 0``.
    ``max_delta_increase`` is the largest raw step ``delta(t') - delta(t)``.
    """

    seed: int
    m: int
    L: int
    lam: float
    delta0: float
    min_delta_slope: float
    max_fisher_residual: float
    max_delta_increase: float

    FIELDS = ("seed", "m", "L", "lambda", "delta0", "min_delta_slope", "max_fisher_residual")

    def values(self):
        return (self.seed, self.m, self.L, self.lam, self.delta0, self.min_delta_slope, self.max_fisher_residual)

    @property
    def violated(self):
        return (
            self.delta0 < -GAP_TOL
            or self.max_delta_increase > GAP_TOL
            or self.max_fisher_residual > 1e-8 * max(1.0, abs(self.delta0))
        )


def epi_sweep_record(seed, m, L, lam=None, kind="general", t_grid=SWEEP_T_GRID):
    """Draw :func:`random_epi_instance` for ``seed`` and evaluate its gap trajectory."""
    inst = random_epi_instance(seed, m, L, lam=lam, kind=kind)
    traj = np.array(delta_trajectory(inst, t_grid))
    dt, dd = np.diff(traj[:, 0]), np.diff(traj[:, 1])
    fisher = [fisher_combination(inst.diffused(t)) for t in traj[1:, 0]]
    return EpiSweepRecord(
        int(seed),
        int(m),
        int(L),
        float(inst.lam),
        float(traj[0, 1]),
        float(np.min(-dd / dt)),
        float(np.max(fisher)),
        float(np.max(dd)),
    )


def epi_sweep(seed, count, m, L, lam=None, kind="general", t_grid=SWEEP_T_GRID):
    """Records for seeds ``seed, seed + 1, ..., seed + count - 1``."""
    return [epi_sweep_record(seed + i, m, L, lam, kind, t_grid) for i in range(count)]
