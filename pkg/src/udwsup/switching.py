"""Switching profiles, phased windows and causal classification of
interaction regions.

Two window shapes are supported: a Gaussian eta(tau) = exp(-(tau-c)^2/2
sigma^2) and a compactly supported cosine-squared window eta(tau) =
cos^2((tau-c)/sigma) on [c - pi sigma/2, c + pi sigma/2] (exactly zero
outside).  The phased window chi(tau) = eta(tau) e^{-i Omega tau} is what
enters the response integrals.

classify_causal decides whether the interaction region of one branch can be
in causal contact with that of another.  Each scenario supplies a "cone
distance" d(tau, tau') >= 0 such that the pair of events is lightlike exactly
at separation L = d, spacelike for L > d and timelike for L < d:

* thermal Minkowski (static worldlines):  d = |tau - tau'|
* de Sitter flat slicing:                 d = |eta(tau) - eta(tau')| with
                                          conformal time eta = -e^{-kappa tau}/kappa
* parallel acceleration (hyperbolas offset along the acceleration axis,
  branch i trailing branch j for i < j):
                                          d = max(e^{-k t}-e^{-k t'},
                                                  e^{ k t}-e^{ k t'}, 0)/kappa

The parallel expression is the exact factorization of the Minkowski interval
between the two shifted hyperbolas; its null coordinates make the
front trajectory recede from the trailing one like a comoving de Sitter pair,
which is why a critical L exists beyond which the regions can never touch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .correlators import (
    DE_SITTER_COMOVING,
    PARALLEL_ACCELERATED,
    THERMAL_MINKOWSKI,
    Scenario,
)

__all__ = [
    "GAUSSIAN",
    "COSINE_SQUARED",
    "TIMELIKE",
    "LIGHTLIKE_OVERLAP",
    "SPACELIKE",
    "SwitchingProfile",
    "CausalRelation",
    "eval_eta",
    "eval_chi",
    "classify_causal",
]

GAUSSIAN = "gaussian"
COSINE_SQUARED = "cosine_squared"

TIMELIKE = "timelike"
LIGHTLIKE_OVERLAP = "lightlike_overlap"
SPACELIKE = "spacelike"


@dataclass(frozen=True)
class SwitchingProfile:
    """Switching window eta_i(tau) of one branch."""

    kind: str
    sigma: float
    center: float = 0.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, COSINE_SQUARED):
            raise ValueError(f"unknown switching kind {self.kind!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")

    def eta(self, tau):
        return eval_eta(self, tau)

    def chi(self, tau, omega: float):
        return eval_chi(self, tau, omega)

    def support(self, gaussian_cutoff: float = 8.0) -> tuple[float, float]:
        """Interval outside which eta is (numerically) negligible.

        Exact for the compact window; +-gaussian_cutoff*sigma for the
        Gaussian (8 sigma keeps the truncated mass below 1e-14).
        """
        if self.kind == COSINE_SQUARED:
            half = 0.5 * np.pi * self.sigma
        else:
            half = gaussian_cutoff * self.sigma
        return (self.center - half, self.center + half)


def eval_eta(profile: SwitchingProfile, tau):
    """Window value in [0, 1]; bit-exact zero outside a compact support."""
    tau = np.asarray(tau, dtype=float)
    x = tau - profile.center
    if profile.kind == GAUSSIAN:
        return np.exp(-0.5 * (x / profile.sigma) ** 2)
    half = 0.5 * np.pi * profile.sigma
    inside = np.abs(x) < half
    out = np.zeros(tau.shape)
    out[inside] = np.cos(x[inside] / profile.sigma) ** 2
    return out


def eval_chi(profile: SwitchingProfile, tau, omega: float):
    """Phased window chi(tau) = eta(tau) e^{-i Omega tau}; |chi| = eta."""
    tau = np.asarray(tau, dtype=float)
    return eval_eta(profile, tau) * np.exp(-1j * omega * tau)


@dataclass(frozen=True)
class CausalRelation:
    """Causal relation between two interaction regions.

    margin is the distance (in time units) from the separation L to the
    lightlike boundary: positive when every pair of region points is
    timelike related, negative when every pair is spacelike, and zero inside
    the lightlike-overlap band (the cone crossing falls within the supports).
    """

    value: str
    margin: float


def _cone_distance(scenario: Scenario, tau_i: np.ndarray, tau_j: np.ndarray) -> np.ndarray:
    kap = scenario.kappa
    if scenario.kind == THERMAL_MINKOWSKI:
        return np.abs(tau_i - tau_j)
    if scenario.kind == DE_SITTER_COMOVING:
        return np.abs(np.exp(-kap * tau_i) - np.exp(-kap * tau_j)) / kap
    a = kap * tau_i
    b = kap * tau_j
    d = np.maximum(np.exp(-a) - np.exp(-b), np.exp(a) - np.exp(b))
    return np.maximum(d, 0.0) / kap


def classify_causal(scenario: Scenario, profile_i: SwitchingProfile,
                    profile_j: SwitchingProfile, branch_pair: tuple[int, int] = (0, 1),
                    *, gaussian_support_sigmas: float = 3.0,
                    grid: int = 129) -> CausalRelation:
    """Causal relation between the interaction regions of two branches.

    Gaussian windows are truncated at +-gaussian_support_sigmas * sigma (the
    effective interaction region); compact windows use their exact support.
    The cone distance is scanned on a grid x grid sample of the support
    rectangle, which is ample for these monotone-in-each-variable distances.
    """
    i, j = branch_pair
    L = float(scenario.separations[i, j])
    if i > j:
        # The parallel cone distance keeps the trailing trajectory (lower
        # branch index) in its first slot; the relation itself is symmetric.
        i, j = j, i
        profile_i, profile_j = profile_j, profile_i
    lo_i, hi_i = profile_i.support(gaussian_support_sigmas)
    lo_j, hi_j = profile_j.support(gaussian_support_sigmas)
    ti = np.linspace(lo_i, hi_i, grid)
    tj = np.linspace(lo_j, hi_j, grid)
    d = _cone_distance(scenario, ti[:, None], tj[None, :])
    dmin = float(d.min())
    dmax = float(d.max())
    if dmin > L:
        return CausalRelation(TIMELIKE, dmin - L)
    if dmax < L:
        return CausalRelation(SPACELIKE, dmax - L)
    return CausalRelation(LIGHTLIKE_OVERLAP, 0.0)
