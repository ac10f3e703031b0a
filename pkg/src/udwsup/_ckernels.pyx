# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled twin of _kernels_py: the four hot correlator kernels.

Same contract as the NumPy fallback: kappa = 1 units, vectorized over the
time arguments, guarded against overflow of the hyperbolic functions (the
kernel value underflows to an exact zero long before the guards trigger).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, cosh, exp, sin, sinh

cnp.import_array()

cdef double PREF = 1.0 / (16.0 * 3.14159265358979323846 ** 2)
cdef double SINH_BIG = 350.0
cdef double EXP_CLIP = 700.0

BACKEND = "compiled"


cdef inline double _clip(double x) nogil:
    if x > EXP_CLIP:
        return EXP_CLIP
    if x < -EXP_CLIP:
        return -EXP_CLIP
    return x


cdef inline void _inv_sinh_sq(double x, double y, double *outre, double *outim) nogil:
    """(re, im) of 1 / sinh(x + i y)^2, zero when |x| is huge."""
    cdef double shr, shi, re, im, den
    if x > SINH_BIG or x < -SINH_BIG:
        outre[0] = 0.0
        outim[0] = 0.0
        return
    shr = sinh(x) * cos(y)
    shi = cosh(x) * sin(y)
    re = shr * shr - shi * shi
    im = 2.0 * shr * shi
    den = re * re + im * im
    outre[0] = re / den
    outim[0] = -im / den


cdef inline void _coth(double x, double y, double *outre, double *outim) nogil:
    """(re, im) of coth(x + i y); saturates to +-1 for large |x|."""
    cdef double shr, shi, chr_, chi, den
    if x > 25.0:
        outre[0] = 1.0
        outim[0] = 0.0
        return
    if x < -25.0:
        outre[0] = -1.0
        outim[0] = 0.0
        return
    shr = sinh(x) * cos(y)
    shi = cosh(x) * sin(y)
    chr_ = cosh(x) * cos(y)
    chi = sinh(x) * sin(y)
    den = shr * shr + shi * shi
    outre[0] = (chr_ * shr + chi * shi) / den
    outim[0] = (chi * shr - chr_ * shi) / den


def local_w(s, double eps):
    """W_D / kappa^2 at kappa = 1: -1/(16 pi^2) / sinh(s/2 - i eps)^2."""
    cdef cnp.ndarray[double, ndim=1] sa = np.ascontiguousarray(
        np.atleast_1d(np.asarray(s, dtype=np.float64)).ravel())
    cdef Py_ssize_t n = sa.shape[0]
    cdef cnp.ndarray[complex, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    cdef double re, im
    with nogil:
        for k in range(n):
            _inv_sinh_sq(0.5 * sa[k], -eps, &re, &im)
            out[k].real = -PREF * re
            out[k].imag = -PREF * im
    return out.reshape(np.shape(s)) if np.ndim(s) else out[0]


def thermal_w(s, double L, double eps):
    """Thermal nonlocal kernel / kappa^2 at separation L (kappa = 1)."""
    cdef cnp.ndarray[double, ndim=1] sa = np.ascontiguousarray(
        np.atleast_1d(np.asarray(s, dtype=np.float64)).ravel())
    cdef Py_ssize_t n = sa.shape[0]
    cdef cnp.ndarray[complex, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    cdef double ar, ai, br, bi
    cdef double pref = PREF / L
    with nogil:
        for k in range(n):
            _coth(0.5 * (L - sa[k]), 0.5 * eps, &ar, &ai)
            _coth(0.5 * (L + sa[k]), -0.5 * eps, &br, &bi)
            out[k].real = pref * (ar + br)
            out[k].imag = pref * (ai + bi)
    return out.reshape(np.shape(s)) if np.ndim(s) else out[0]


def desitter_w(p, s, double L, double eps):
    """de Sitter comoving nonlocal kernel / kappa^2 (kappa = 1)."""
    pb, sb = np.broadcast_arrays(np.asarray(p, dtype=np.float64),
                                 np.asarray(s, dtype=np.float64))
    shape = pb.shape
    cdef cnp.ndarray[double, ndim=1] pa = np.ascontiguousarray(np.atleast_1d(pb).ravel())
    cdef cnp.ndarray[double, ndim=1] sa = np.ascontiguousarray(np.atleast_1d(sb).ravel())
    cdef Py_ssize_t n = sa.shape[0]
    cdef cnp.ndarray[complex, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    cdef double shr, shi, re, im, dre, dim, den, ep
    cdef double quarterL2 = 0.25 * L * L
    with nogil:
        for k in range(n):
            if sa[k] > 2.0 * SINH_BIG or sa[k] < -2.0 * SINH_BIG:
                out[k].real = 0.0
                out[k].imag = 0.0
                continue
            shr = sinh(0.5 * sa[k]) * cos(eps)
            shi = -cosh(0.5 * sa[k]) * sin(eps)
            re = shr * shr - shi * shi
            im = 2.0 * shr * shi
            ep = exp(_clip(pa[k]))
            dre = ep * quarterL2 - re
            dim = -im
            den = dre * dre + dim * dim
            out[k].real = PREF * dre / den
            out[k].imag = -PREF * dim / den
    return out.reshape(shape) if shape else out[0]


def parallel_w(p, s, double L, double eps):
    """Parallel uniformly-accelerated nonlocal kernel / kappa^2 (kappa = 1)."""
    pb, sb = np.broadcast_arrays(np.asarray(p, dtype=np.float64),
                                 np.asarray(s, dtype=np.float64))
    shape = pb.shape
    cdef cnp.ndarray[double, ndim=1] pa = np.ascontiguousarray(np.atleast_1d(pb).ravel())
    cdef cnp.ndarray[double, ndim=1] sa = np.ascontiguousarray(np.atleast_1d(sb).ravel())
    cdef Py_ssize_t n = sa.shape[0]
    cdef cnp.ndarray[complex, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t k
    cdef double em_sh, ep_sh, f1r, f1i, f2r, f2i, re, im, den
    cdef double halfL = 0.5 * L
    with nogil:
        for k in range(n):
            em_sh = 0.5 * (exp(_clip(0.5 * (sa[k] - pa[k])))
                           - exp(_clip(0.5 * (-sa[k] - pa[k]))))
            ep_sh = 0.5 * (exp(_clip(0.5 * (sa[k] + pa[k])))
                           - exp(_clip(0.5 * (pa[k] - sa[k]))))
            f1r = halfL - em_sh
            f1i = eps
            f2r = halfL + ep_sh
            f2i = -eps
            re = f1r * f2r - f1i * f2i
            im = f1r * f2i + f1i * f2r
            den = re * re + im * im
            out[k].real = PREF * re / den
            out[k].imag = -PREF * im / den
    return out.reshape(shape) if shape else out[0]
