"""Closed-form Wightman kernels pulled back to detector trajectories.

Four kernels are provided.  The local one (same branch) has the same form in
every scenario; the nonlocal ones (between branches) depend on the scenario:

* local:            W_D(s)    = -kappa^2/(16 pi^2) / sinh(kappa s/2 - i eps)^2
* thermal bath:     W_T(s)    = kappa/(16 pi^2 L) [coth(kappa(L-s+i eps)/2)
                                                   + coth(kappa(L+s-i eps)/2)]
* de Sitter:        W_dS(p,s) = (kappa/4 pi)^2 / (e^{kappa p}(kappa L/2)^2
                                                  - sinh(kappa s/2 - i eps)^2)
* parallel accel.:  W_P(p,s)  = kappa^2/(16 pi^2)
                                [kappa L/2 + i eps - e^{-p kappa/2} sinh(kappa s/2)]^{-1}
                                [kappa L/2 - i eps + e^{ p kappa/2} sinh(kappa s/2)]^{-1}

with s = tau - tau' and p = tau + tau'.  W_D and W_T are stationary (depend
on s only); W_dS and W_P are explicitly p-dependent.  Internally everything
is evaluated in kappa = 1 units; the kappa^2 scaling is applied at the
boundary.  The epsilon arguments are dimensionless displacements exactly as
they appear in the formulas above (i.e. epsilon = kappa * displacement in
time units), sampled from an EpsilonSchedule and extrapolated to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import desitter_w, local_w, parallel_w, thermal_w
from .quadrature import EpsilonSchedule, epsilon_extrapolate

__all__ = [
    "THERMAL_MINKOWSKI",
    "DE_SITTER_COMOVING",
    "PARALLEL_ACCELERATED",
    "SCENARIO_KINDS",
    "Scenario",
    "CorrelatorKernel",
    "eval_local",
    "eval_thermal_nonlocal",
    "eval_desitter_nonlocal",
    "eval_parallel_nonlocal",
    "kms_periodicity_residual",
]

THERMAL_MINKOWSKI = "thermal_minkowski"
DE_SITTER_COMOVING = "de_sitter_comoving"
PARALLEL_ACCELERATED = "parallel_accelerated"
SCENARIO_KINDS = (THERMAL_MINKOWSKI, DE_SITTER_COMOVING, PARALLEL_ACCELERATED)

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Scenario:
    """Background scenario: kind, scale kappa and pairwise branch separations.

    kappa (units 1/time) is the temperature scale, expansion rate or proper
    acceleration depending on kind; separations[i, j] is the constant
    distance, comoving distance or inertial-frame distance between branches
    i and j, in units of length.
    """

    kind: str
    kappa: float
    separations: np.ndarray

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        sep = np.atleast_2d(np.asarray(self.separations, dtype=float))
        if sep.shape[0] != sep.shape[1]:
            raise ValueError("separations must be a square matrix")
        if not np.allclose(sep, sep.T):
            raise ValueError("separations must be symmetric (L_ij = L_ji)")
        if np.any(np.diag(sep) != 0.0):
            raise ValueError("diagonal separations must vanish (L_ii = 0)")
        if np.any(sep < 0):
            raise ValueError("separations must be nonnegative")
        object.__setattr__(self, "separations", sep)

    @property
    def n_branches(self) -> int:
        return self.separations.shape[0]

    def kms_temperature(self) -> float:
        """KMS temperature kappa/(2 pi) shared by all three scenarios."""
        return self.kappa / _TWO_PI


def eval_local(s, kappa: float, epsilon: float):
    """Local kernel W_D(s); identical form in all scenarios."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive (on-axis pole at s = 0)")
    return kappa ** 2 * local_w(np.asarray(s, dtype=float) * kappa, epsilon)


def eval_thermal_nonlocal(s, kappa: float, L: float, epsilon: float):
    """Thermal-bath nonlocal kernel W_T(s) at constant separation L > 0."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if L <= 0:
        raise ValueError("L must be positive; coincident branches use eval_local")
    return kappa ** 2 * thermal_w(np.asarray(s, dtype=float) * kappa, L * kappa, epsilon)


def eval_desitter_nonlocal(p, s, kappa: float, L: float, epsilon: float):
    """de Sitter comoving nonlocal kernel W_dS(p, s); p-dependent."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if L < 0:
        raise ValueError("L must be nonnegative")
    return kappa ** 2 * desitter_w(np.asarray(p, dtype=float) * kappa,
                                   np.asarray(s, dtype=float) * kappa,
                                   L * kappa, epsilon)


def eval_parallel_nonlocal(p, s, kappa: float, L: float, epsilon: float):
    """Parallel-acceleration nonlocal kernel W_P(p, s); p-dependent."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if L <= 0:
        raise ValueError("L must be positive")
    return kappa ** 2 * parallel_w(np.asarray(p, dtype=float) * kappa,
                                   np.asarray(s, dtype=float) * kappa,
                                   L * kappa, epsilon)


def _nonlocal_unit(kind: str, p, s, L: float, eps: float):
    """Nonlocal kernel in kappa = 1 units for the given scenario kind."""
    if L == 0.0:
        return local_w(s, eps)
    if kind == THERMAL_MINKOWSKI:
        return thermal_w(s, L, eps)
    if kind == DE_SITTER_COMOVING:
        return desitter_w(p, s, L, eps)
    if kind == PARALLEL_ACCELERATED:
        return parallel_w(p, s, L, eps)
    raise ValueError(f"unknown scenario kind {kind!r}")


@dataclass(frozen=True)
class CorrelatorKernel:
    """Evaluable two-point kernel for one (scenario, branch pair).

    For branch_pair (i, i) this is the local kernel W_D regardless of the
    scenario kind.  epsilon is the dimensionless i-epsilon displacement as
    printed in the closed forms.
    """

    scenario: Scenario
    branch_pair: tuple[int, int]
    epsilon: float

    def __post_init__(self):
        i, j = self.branch_pair
        n = self.scenario.n_branches
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"branch pair {self.branch_pair} out of range for N={n}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def is_local(self) -> bool:
        return self.branch_pair[0] == self.branch_pair[1]

    @property
    def stationary(self) -> bool:
        """True when the kernel depends on s = tau - tau' only."""
        return self.is_local or self.scenario.kind == THERMAL_MINKOWSKI

    @property
    def separation(self) -> float:
        i, j = self.branch_pair
        return float(self.scenario.separations[i, j])

    def eval_ps(self, p, s, epsilon: float | None = None):
        """Kernel value at proper-time sum p and difference s (physical units).

        For the parallel scenario the branch index orders the trajectories
        along the acceleration axis (branch i trails branch j for i < j) and
        the closed form's first slot holds the leading trajectory, so pairs
        with i < j evaluate it at lag -s.  The other kernels are even in s.
        """
        kap = self.scenario.kappa
        eps = self.epsilon if epsilon is None else epsilon
        pk = np.asarray(p, dtype=float) * kap
        sk = np.asarray(s, dtype=float) * kap
        if self.is_local:
            return kap ** 2 * local_w(sk, eps)
        i, j = self.branch_pair
        if self.scenario.kind == PARALLEL_ACCELERATED and i < j:
            sk = -sk
        return kap ** 2 * _nonlocal_unit(self.scenario.kind, pk, sk,
                                         self.separation * kap, eps)

    def eval(self, tau, tau_prime, epsilon: float | None = None):
        """Kernel value W(tau, tau')."""
        tau = np.asarray(tau, dtype=float)
        tau_prime = np.asarray(tau_prime, dtype=float)
        return self.eval_ps(tau + tau_prime, tau - tau_prime, epsilon)


def _slice_complex(kernel: CorrelatorKernel, tau: float, z: np.ndarray,
                   eps: float) -> np.ndarray:
    """Closed-form slice value W(tau, tau - z) at complex lag z (kappa = 1 units).

    Used only by the KMS diagnostic, which needs the kernels continued to
    complex lags; the hot backends handle real arguments only.
    """
    z = np.asarray(z, dtype=complex)
    pref = 1.0 / (16.0 * np.pi ** 2)
    if kernel.is_local:
        sh = np.sinh(0.5 * z - 1j * eps)
        return -pref / (sh * sh)
    L = kernel.separation * kernel.scenario.kappa
    kind = kernel.scenario.kind
    if kind == THERMAL_MINKOWSKI:
        return (pref / L) * (1.0 / np.tanh(0.5 * (L - z + 1j * eps))
                             + 1.0 / np.tanh(0.5 * (L + z - 1j * eps)))
    p = 2.0 * tau - z
    if kind == DE_SITTER_COMOVING:
        sh = np.sinh(0.5 * z - 1j * eps)
        return pref / (np.exp(p) * 0.25 * L * L - sh * sh)
    i, j = kernel.branch_pair
    zz = -z if i < j else z  # branch ordering, see CorrelatorKernel.eval_ps
    f1 = 0.5 * L + 1j * eps - np.exp(-0.5 * p) * np.sinh(0.5 * zz)
    f2 = 0.5 * L - 1j * eps + np.exp(0.5 * p) * np.sinh(0.5 * zz)
    return pref / (f1 * f2)


def kms_periodicity_residual(kernel: CorrelatorKernel, s_samples,
                             kappa: float | None = None, *, tau: float = 0.0,
                             schedule: EpsilonSchedule | None = None) -> float:
    """Imaginary-time periodicity residual max_s |W(s - 2 pi i/kappa) - W(-s)|.

    The KMS condition for a thermal state at temperature kappa/(2 pi) makes
    the stationary kernel periodic in imaginary time; the residual
    extrapolates the difference over the epsilon ladder and vanishes for the
    local and thermal kernels.  For the p-dependent kernels the residual is
    taken on the fixed-measurement-time slice w(z) = W(tau, tau - z) (the
    function the rate integral actually sees; tau = 0 anchors p = 0 at zero
    lag).  Those kernels are not stationary, so the residual is of the order
    of the kernel itself and quantifies the breaking of thermality.

    Results are in physical kernel units (scaled by kappa^2).
    """
    kap = kernel.scenario.kappa if kappa is None else float(kappa)
    if kappa is not None and not np.isclose(kap, kernel.scenario.kappa):
        raise ValueError("kappa disagrees with the kernel's scenario")
    # The identity residual vanishes like eps for thermal kernels but its
    # higher eps-derivatives grow near the kernel poles; a deep ladder with
    # third-order extrapolation keeps the numerical zero below 1e-8 for
    # samples as close as ~0.1/kappa to a pole.
    sched = schedule or EpsilonSchedule(eps0=3e-4, ratio=0.5, steps=6,
                                        extrapolation_order=3)
    s = np.asarray(s_samples, dtype=float) * kap  # kappa-normalized lags
    tau_k = float(tau) * kap
    ladder = sched.ladder()
    diffs = []
    for eps in ladder:
        shifted = _slice_complex(kernel, tau_k, s - 2j * np.pi, eps)
        swapped = _slice_complex(kernel, tau_k, -s, eps)
        diffs.append(shifted - swapped)
    per_sample = []
    for idx in range(s.size):
        samples = [(ladder[k], diffs[k][idx]) for k in range(len(ladder))]
        per_sample.append(abs(epsilon_extrapolate(samples, sched.extrapolation_order)))
    return kap ** 2 * float(np.max(per_sample))


def real_axis_pole_lags(kernel: CorrelatorKernel, tau: float,
                        s_range: tuple[float, float]) -> list[float]:
    """Real lags s where the slice W(tau, tau - s) is resonant (physical units).

    These feed the quadrature engine's near-pole refinement.  The cone
    crossings have closed forms: s = 0 for the local kernel, s = +-L for
    the thermal one, and for the p-dependent kernels the factor equations
    reduce to e^{-kappa tau} -+ e^{-kappa tau'} = kappa L (and the time
    reverse), solved directly for the lag s = tau - tau'.
    """
    kap = kernel.scenario.kappa
    lo, hi = s_range
    if kernel.is_local:
        return [0.0] if lo <= 0.0 <= hi else []
    L = kernel.separation * kap
    kind = kernel.scenario.kind
    t = tau * kap
    roots: list[float] = []
    if kind == THERMAL_MINKOWSKI:
        roots = [-L, L]
    elif kind == DE_SITTER_COMOVING:
        # |e^{-t} - e^{-t'}| = L with t' = t - s
        roots.append(t + np.log(np.exp(-t) + L))
        if np.exp(-t) > L:
            roots.append(t + np.log(np.exp(-t) - L))
    else:
        i, j = kernel.branch_pair
        if i < j:  # trailing branch first: crossings exist only past criticality
            if np.exp(-t) > L:
                roots.append(t + np.log(np.exp(-t) - L))
            if np.exp(t) > L:
                roots.append(t - np.log(np.exp(t) - L))
        else:
            roots.append(t - np.log(np.exp(t) + L))
            roots.append(t + np.log(np.exp(-t) + L))
    return [s / kap for s in roots if lo <= s / kap <= hi]
