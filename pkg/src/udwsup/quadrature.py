"""Adaptive quadrature for complex, oscillatory, i-epsilon-regularized integrands.

The engine is a panel-based Gauss-Kronrod (G7, K15) integrator that evaluates
every active panel of a refinement sweep in a single vectorized call, so
integrands must accept NumPy arrays and return complex arrays of the same
shape.  Panels are pre-split to resolve known pole locations (the kernels of
this package have poles displaced off-axis by epsilon) and to keep at least
eight panels per oscillation period, then refined wherever the local
Kronrod-Gauss error exceeds the panel's share of the tolerance budget.

Infinite-domain integrals are truncated at a multiple of the integrand's decay
scale; for semi-infinite oscillatory integrals the constant asymptote of the
integrand is subtracted and its tail added back analytically.

The distributional epsilon -> 0 limit is taken by sampling on a geometric
epsilon ladder and Richardson-extrapolating (polynomial in epsilon), which
converges fast because every kernel in this package is meromorphic in epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureSpec",
    "EpsilonSchedule",
    "IntegralEstimate",
    "QuadratureDomainError",
    "ContractViolationError",
    "integrate_1d",
    "integrate_2d",
    "integrate_semi_infinite_oscillatory",
    "epsilon_extrapolate",
    "epsilon_extrapolate_report",
]

# Gauss-Kronrod 15-point rule on [-1, 1]; the embedded Gauss-7 nodes sit at
# the odd indices of the sorted Kronrod abscissae.
_XGK_HALF = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.0,
    ]
)
_WGK_HALF = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG_HALF = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

_XK = np.concatenate([-_XGK_HALF[:-1], _XGK_HALF[::-1]])  # 15 sorted nodes
_WK = np.concatenate([_WGK_HALF[:-1], _WGK_HALF[::-1]])
_WG = np.concatenate([_WG_HALF[:-1], _WG_HALF[::-1]])  # 7 weights, nodes 1,3,..,13

_MAX_PANELS = 200_000


class QuadratureDomainError(ValueError):
    """The integrand produced NaN/Inf inside the integration domain."""


class ContractViolationError(ValueError):
    """An operation was called outside its documented contract."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy and refinement policy for the adaptive engine.

    truncation_radius is a multiple of the integrand's decay scale, used when
    an infinite domain has to be cut off.  oscillation_hint is the angular
    frequency of the fastest expected phase factor; when positive, initial
    panel widths are capped at pi / (4 * oscillation_hint) so that one period
    is always covered by at least eight panels.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_refinements: int = 24
    truncation_radius: float = 8.0
    oscillation_hint: float = 0.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("abs_tol and rel_tol must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if self.truncation_radius <= 0:
            raise ValueError("truncation_radius must be positive")
        if self.oscillation_hint < 0:
            raise ValueError("oscillation_hint must be >= 0")


@dataclass(frozen=True)
class EpsilonSchedule:
    """Geometric ladder eps_k = eps0 * ratio**k for the epsilon -> 0 limit.

    eps0 is expressed in units of 1/kappa (the regularized variable is a
    proper time, and all internal evaluation is kappa-normalized).
    """

    eps0: float = 1e-2
    ratio: float = 0.5
    steps: int = 4
    extrapolation_order: int = 2

    def __post_init__(self):
        if self.eps0 <= 0:
            raise ValueError("eps0 must be positive")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")
        if self.steps < 2:
            raise ValueError("steps must be >= 2")
        if self.extrapolation_order < 1:
            raise ValueError("extrapolation_order must be >= 1")

    def ladder(self) -> np.ndarray:
        return self.eps0 * self.ratio ** np.arange(self.steps)


@dataclass
class IntegralEstimate:
    """Result of an adaptive integration.

    converged=False flags the best available estimate after the refinement
    budget was exhausted; callers embed the flag in their diagnostics instead
    of aborting a sweep.
    """

    value: complex
    error_bound: float
    refinements_used: int
    converged: bool = True

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        return IntegralEstimate(
            self.value + other.value,
            self.error_bound + other.error_bound,
            max(self.refinements_used, other.refinements_used),
            self.converged and other.converged,
        )


def _check_finite(y: np.ndarray):
    if not np.all(np.isfinite(y.view(np.float64) if y.dtype == complex else y)):
        raise QuadratureDomainError("integrand returned NaN or Inf")


def _gk_batch(f, lo: np.ndarray, hi: np.ndarray):
    """Evaluate K15 and the embedded G7 on each panel [lo_i, hi_i]."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * _XK[None, :]
    y = np.asarray(f(x.ravel()), dtype=complex).reshape(x.shape)
    _check_finite(y)
    ik = (y * _WK).sum(axis=1) * half
    ig = (y[:, 1::2] * _WG).sum(axis=1) * half
    return ik, np.abs(ik - ig)


def _initial_edges(a: float, b: float, spec: QuadratureSpec,
                   singular_points: Sequence[float], pole_epsilon: float | None):
    """Panel edges honoring singular-point pre-splits and the oscillation cap."""
    edges = {a, b}
    poles = [p for p in singular_points if a < p < b]
    edges.update(poles)
    # Near-pole zoom: within 10*eps of each pole, panels no wider than eps/2.
    if pole_epsilon is not None and pole_epsilon > 0:
        eps = pole_epsilon
        for p in poles + [p for p in singular_points if a <= p <= b]:
            zlo, zhi = max(a, p - 10 * eps), min(b, p + 10 * eps)
            if zhi > zlo:
                n = int(np.ceil((zhi - zlo) / (0.5 * eps)))
                n = min(n, 2000)
                edges.update(np.linspace(zlo, zhi, n + 1).tolist())
    edge_arr = np.array(sorted(edges))
    # Oscillation cap: at least 8 panels per period 2*pi/hint.
    cap = np.inf
    if spec.oscillation_hint > 0:
        cap = np.pi / (4.0 * spec.oscillation_hint)
    width0 = (b - a) / 8.0  # never start from a single panel
    cap = min(cap, width0) if width0 > 0 else cap
    if not np.isfinite(cap) or cap <= 0:
        return edge_arr
    out = [edge_arr[0]]
    for right in edge_arr[1:]:
        left = out[-1]
        n = max(1, int(np.ceil((right - left) / cap)))
        n = min(n, 10_000)
        out.extend(np.linspace(left, right, n + 1)[1:].tolist())
    return np.array(out)


def integrate_1d(f: Callable[[np.ndarray], np.ndarray], interval, spec: QuadratureSpec,
                 singular_points: Sequence[float] = (),
                 pole_epsilon: float | None = None) -> IntegralEstimate:
    """Adaptively integrate a complex-valued integrand over [a, b].

    singular_points lists real locations near which the integrand is peaked
    (poles displaced off-axis by pole_epsilon); panels there are pre-split to
    width < pole_epsilon/2 within ten pole widths.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integration interval must be finite (truncate first)")
    if a == b:
        return IntegralEstimate(0.0 + 0.0j, 0.0, 0)
    if a > b:
        est = integrate_1d(f, (b, a), spec, singular_points, pole_epsilon)
        est.value = -est.value
        return est

    edges = _initial_edges(a, b, spec, singular_points, pole_epsilon)
    lo, hi = edges[:-1], edges[1:]
    vals, errs = _gk_batch(f, lo, hi)

    refinements = 0
    for sweep in range(spec.max_refinements):
        refinements = sweep
        total = vals.sum()
        err_total = errs.sum()
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if err_total <= tol:
            return IntegralEstimate(total, err_total, sweep, True)
        if lo.size >= _MAX_PANELS:
            break
        budget = tol * (hi - lo) / (b - a)
        split = errs > budget
        if not split.any():
            split = errs >= errs.max()
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[~split], lo[split], mid])
        new_hi = np.concatenate([hi[~split], mid, hi[split]])
        keep_vals, keep_errs = vals[~split], errs[~split]
        nv, ne = _gk_batch(f, np.concatenate([lo[split], mid]),
                           np.concatenate([mid, hi[split]]))
        lo, hi = new_lo, new_hi
        vals = np.concatenate([keep_vals, nv])
        errs = np.concatenate([keep_errs, ne])

    total = vals.sum()
    return IntegralEstimate(total, errs.sum(), refinements + 1, False)


def integrate_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray], rect,
                 spec: QuadratureSpec) -> IntegralEstimate:
    """Adaptively integrate f(x, y) over the rectangle (ax, bx, ay, by).

    Tensor-product Gauss-Kronrod with quadtree refinement of the worst cells.
    """
    ax, bx, ay, by = (float(v) for v in rect)
    if ax == bx or ay == by:
        return IntegralEstimate(0.0 + 0.0j, 0.0, 0)
    sgn = 1.0
    if ax > bx:
        ax, bx, sgn = bx, ax, -sgn
    if ay > by:
        ay, by, sgn = by, ay, -sgn

    n0 = 4
    xs = np.linspace(ax, bx, n0 + 1)
    ys = np.linspace(ay, by, n0 + 1)
    cells = np.array([(xs[i], xs[i + 1], ys[j], ys[j + 1])
                      for i in range(n0) for j in range(n0)])

    def eval_cells(c):
        xlo, xhi, ylo, yhi = c[:, 0], c[:, 1], c[:, 2], c[:, 3]
        xm, xh = 0.5 * (xlo + xhi), 0.5 * (xhi - xlo)
        ym, yh = 0.5 * (ylo + yhi), 0.5 * (yhi - ylo)
        X = xm[:, None, None] + xh[:, None, None] * _XK[None, :, None]
        Y = ym[:, None, None] + yh[:, None, None] * _XK[None, None, :]
        X, Y = np.broadcast_arrays(X, Y)
        z = np.asarray(f(X.ravel(), Y.ravel()), dtype=complex).reshape(X.shape)
        _check_finite(z)
        wk2 = _WK[:, None] * _WK[None, :]
        ik = (z * wk2).sum(axis=(1, 2)) * xh * yh
        zg = z[:, 1::2, 1::2]
        wg2 = _WG[:, None] * _WG[None, :]
        ig = (zg * wg2).sum(axis=(1, 2)) * xh * yh
        return ik, np.abs(ik - ig)

    vals, errs = eval_cells(cells)
    area = (bx - ax) * (by - ay)
    refinements = 0
    for sweep in range(spec.max_refinements):
        refinements = sweep
        total = vals.sum()
        err_total = errs.sum()
        tol = max(spec.abs_tol, spec.rel_tol * abs(total))
        if err_total <= tol:
            return IntegralEstimate(sgn * total, err_total, sweep, True)
        if cells.shape[0] >= _MAX_PANELS // 4:
            break
        cell_area = (cells[:, 1] - cells[:, 0]) * (cells[:, 3] - cells[:, 2])
        split = errs > tol * cell_area / area
        if not split.any():
            split = errs >= errs.max()
        quads = []
        for (xl, xh_, yl, yh_) in cells[split]:
            xm, ym = 0.5 * (xl + xh_), 0.5 * (yl + yh_)
            quads.extend([(xl, xm, yl, ym), (xm, xh_, yl, ym),
                          (xl, xm, ym, yh_), (xm, xh_, ym, yh_)])
        new_cells = np.array(quads)
        nv, ne = eval_cells(new_cells)
        cells = np.concatenate([cells[~split], new_cells])
        vals = np.concatenate([vals[~split], nv])
        errs = np.concatenate([errs[~split], ne])

    return IntegralEstimate(sgn * vals.sum(), errs.sum(), refinements + 1, False)


def integrate_semi_infinite_oscillatory(
        f: Callable[[np.ndarray], np.ndarray], omega: float, spec: QuadratureSpec,
        g_inf: complex = 0.0, decay_scale: float = 1.0,
        singular_points: Sequence[float] = (),
        pole_epsilon: float | None = None) -> IntegralEstimate:
    """Evaluate int_0^inf e^{-i omega s} f(s) ds.

    f(s) must approach g_inf with an exponentially decaying remainder on the
    scale decay_scale.  The body is integrated adaptively on
    [0, truncation_radius * decay_scale] after subtracting g_inf; the constant
    tail is then completed analytically (Abel-regularized, convergence
    supplied by the i-epsilon displacement of the physical kernels):

        int_R^inf e^{-i omega s} ds = e^{-i omega R} / (i omega).
    """
    omega = float(omega)
    if omega == 0.0 and g_inf != 0.0:
        raise ContractViolationError(
            "omega = 0 with a non-decaying integrand: tail integral diverges")
    radius = spec.truncation_radius * decay_scale
    hint = max(spec.oscillation_hint, abs(omega))
    body_spec = QuadratureSpec(
        abs_tol=spec.abs_tol, rel_tol=spec.rel_tol,
        max_refinements=spec.max_refinements,
        truncation_radius=spec.truncation_radius, oscillation_hint=hint)

    def integrand(s):
        return np.exp(-1j * omega * s) * (np.asarray(f(s), dtype=complex) - g_inf)

    est = integrate_1d(integrand, (0.0, radius), body_spec,
                       singular_points=singular_points, pole_epsilon=pole_epsilon)
    # Remainder of the decaying part beyond the truncation radius.
    g_end = complex(np.asarray(f(np.array([radius])), dtype=complex)[0])
    tail_err = abs(g_end - g_inf) * decay_scale
    value = est.value
    if g_inf != 0.0:
        value += g_inf * np.exp(-1j * omega * radius) / (1j * omega)
    return IntegralEstimate(value, est.error_bound + tail_err,
                            est.refinements_used, est.converged)


@dataclass
class ExtrapolationReport:
    """Extrapolated value plus the residual against the next-lower order."""

    value: complex
    residual: float
    order: int
    epsilons: np.ndarray = field(default_factory=lambda: np.empty(0))


def _neville_at_zero(eps: np.ndarray, vals: np.ndarray) -> complex:
    y = np.array(vals, dtype=complex)
    x = np.asarray(eps, dtype=float)
    n = len(x)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            y[i] = y[i] + (y[i] - y[i - 1]) * x[i] / (x[i - 1] - x[i])
    return complex(y[-1])


def epsilon_extrapolate_report(samples: Sequence[tuple[float, complex]],
                               order: int) -> ExtrapolationReport:
    """Richardson extrapolation of (eps_k, value_k) samples to eps = 0.

    Uses the order+1 smallest epsilons; the residual against the order-1
    extrapolant monitors convergence of the distributional limit.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    pts = sorted(((float(e), complex(v)) for e, v in samples), key=lambda t: -t[0])
    if len(pts) < order + 1:
        raise ValueError(
            f"epsilon extrapolation at order {order} needs at least {order + 1} samples, "
            f"got {len(pts)}")
    eps = np.array([p[0] for p in pts])
    vals = np.array([p[1] for p in pts])
    value = _neville_at_zero(eps[-(order + 1):], vals[-(order + 1):])
    if order == 1:
        lower = vals[-1]
    else:
        lower = _neville_at_zero(eps[-order:], vals[-order:])
    return ExtrapolationReport(value, abs(value - lower), order, eps)


def epsilon_extrapolate(samples: Sequence[tuple[float, complex]], order: int) -> complex:
    """Richardson-type extrapolant of the epsilon ladder at eps = 0."""
    return epsilon_extrapolate_report(samples, order).value
