"""NumPy implementation of the hot correlator kernels (kappa = 1 units).

This is the pure-Python fallback twin of the compiled extension in
``_ckernels.pyx``; both expose the same four vectorized functions.  All
arguments are kappa-normalized (s, p, L, eps measured in units of 1/kappa)
and results are the kernels divided by kappa**2.

Overflow policy: complex sinh/coth are evaluated through guarded
exponentials.  Once |s| or |p| is large enough that the true kernel value
underflows double precision, the functions return exact zeros instead of
tripping overflow warnings; the crossover thresholds are far inside the
region where e^{-|x|} is already below 1e-300.
"""

import numpy as np

_PREF = 1.0 / (16.0 * np.pi ** 2)
_SINH_BIG = 350.0  # |Re z| beyond which 1/sinh^2 underflows to 0
_EXP_CLIP = 700.0  # largest exponent fed to np.exp

BACKEND = "python"


def _inv_sinh_sq(z: np.ndarray) -> np.ndarray:
    """1 / sinh(z)**2 with underflow to exact zero for large |Re z|."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    small = np.abs(z.real) < _SINH_BIG
    if np.any(small):
        sh = np.sinh(z[small])
        out[small] = 1.0 / (sh * sh)
    return out


def _coth(z: np.ndarray) -> np.ndarray:
    """coth(z); np.tanh is overflow-safe and saturates to +-1."""
    return 1.0 / np.tanh(np.asarray(z, dtype=complex))


def local_w(s, eps: float) -> np.ndarray:
    """W_D / kappa**2 at kappa = 1: -1/(16 pi^2) / sinh(s/2 - i eps)^2."""
    s = np.asarray(s, dtype=float)
    return -_PREF * _inv_sinh_sq(0.5 * s - 1j * eps)


def thermal_w(s, L: float, eps: float) -> np.ndarray:
    """Thermal nonlocal kernel / kappa**2 at separation L (kappa = 1)."""
    s = np.asarray(s, dtype=float)
    a = 0.5 * (L - s + 1j * eps)
    b = 0.5 * (L + s - 1j * eps)
    return (_PREF / L) * (_coth(a) + _coth(b))


def desitter_w(p, s, L: float, eps: float) -> np.ndarray:
    """de Sitter comoving nonlocal kernel / kappa**2 (kappa = 1).

    (1/4 pi)^2 / (e^p (L/2)^2 - sinh(s/2 - i eps)^2); the e^p factor makes it
    explicitly dependent on the proper-time sum p.
    """
    p = np.asarray(p, dtype=float)
    s = np.asarray(s, dtype=float)
    p, s = np.broadcast_arrays(p, s)
    ep = np.exp(np.minimum(p, _EXP_CLIP))
    sh2 = np.zeros(s.shape, dtype=complex)
    small = np.abs(s) < 2 * _SINH_BIG
    if np.any(small):
        sh = np.sinh(0.5 * s[small] - 1j * eps)
        sh2[small] = sh * sh
    denom = ep * (0.25 * L * L) - sh2
    out = np.zeros(s.shape, dtype=complex)
    # For |s| past the sinh guard the kernel magnitude is below ~e^{-700};
    # leave those entries at exact zero.
    out[small] = _PREF / denom[small]
    return out


def parallel_w(p, s, L: float, eps: float) -> np.ndarray:
    """Parallel uniformly-accelerated nonlocal kernel / kappa**2 (kappa = 1).

    1/(16 pi^2) * [L/2 + i eps - e^{-p/2} sinh(s/2)]^{-1}
                * [L/2 - i eps + e^{p/2} sinh(s/2)]^{-1}
    """
    p = np.asarray(p, dtype=float)
    s = np.asarray(s, dtype=float)
    p, s = np.broadcast_arrays(p, s)
    # e^{+-p/2} sinh(s/2) = (e^{(s +- ... )/2} - e^{-(s -+ ...)/2}) / 2, clipped
    a1 = np.clip(0.5 * (s - p), -_EXP_CLIP, _EXP_CLIP)
    b1 = np.clip(0.5 * (-s - p), -_EXP_CLIP, _EXP_CLIP)
    em_sh = 0.5 * (np.exp(a1) - np.exp(b1))  # e^{-p/2} sinh(s/2)
    a2 = np.clip(0.5 * (s + p), -_EXP_CLIP, _EXP_CLIP)
    b2 = np.clip(0.5 * (p - s), -_EXP_CLIP, _EXP_CLIP)
    ep_sh = 0.5 * (np.exp(a2) - np.exp(b2))  # e^{+p/2} sinh(s/2)
    f1 = 0.5 * L + 1j * eps - em_sh
    f2 = 0.5 * L - 1j * eps + ep_sh
    return _PREF / (f1 * f2)
