"""Hot numerical kernels.

Each kernel has a pure-numpy implementation and, when numba is importable
and not disabled via the ``RESBEAM_DISABLE_NUMBA`` environment variable, a
JIT-compiled variant. The public functions dispatch to whichever backend
is active; both backends produce identical results to floating-point
round-off.

``RESBEAM_THREADS`` caps the number of threads numba may use.
"""

from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("RESBEAM_DISABLE_NUMBA", "").strip().lower() in (
    "1", "true", "yes", "on",
)

try:
    if _DISABLED:
        raise ImportError("numba disabled by RESBEAM_DISABLE_NUMBA")
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag
    numba = None
    njit = None
    HAVE_NUMBA = False


def _thread_count() -> int:
    raw = os.environ.get("RESBEAM_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


if HAVE_NUMBA:
    numba.set_num_threads(min(_thread_count(), numba.config.NUMBA_NUM_THREADS))


def rayleigh_sommerfeld_sum_numpy(
    samples: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    distance: float,
    wavenumber: float,
) -> np.ndarray:
    """Raw double sum of exp(j*k*rho)/rho^2 against every source sample.

    ``xs``/``ys`` are the (shared) 1-D coordinate axes of the source and
    destination planes; the caller applies the kernel prefactor and the
    source area element.
    """
    n = samples.shape[0]
    # Broadcasting all four axes at once is O(N^4) memory; go row by row.
    out = np.zeros((n, n), dtype=np.complex128)
    src_x = xs.reshape(1, n)
    src_y = ys.reshape(n, 1)
    for i in range(n):
        for j_block in range(0, n, 16):
            cols = slice(j_block, min(j_block + 16, n))
            ox = xs[cols].reshape(-1, 1, 1)
            oy = ys[i]
            rho2 = (ox - src_x) ** 2 + (oy - src_y) ** 2 + distance * distance
            rho = np.sqrt(rho2)
            kern = np.exp(1j * wavenumber * rho) / rho2
            out[i, cols] = np.sum(samples * kern, axis=(1, 2))
    return out


def bilinear_gather_numpy(
    re: np.ndarray,
    im: np.ndarray,
    iy: np.ndarray,
    ix: np.ndarray,
) -> np.ndarray:
    """Bilinear interpolation of a complex array at fractional indices.

    Out-of-range lookups return zero.
    """
    n_y, n_x = re.shape
    y0 = np.floor(iy).astype(np.int64)
    x0 = np.floor(ix).astype(np.int64)
    fy = iy - y0
    fx = ix - x0
    out_re = np.zeros(iy.shape, dtype=np.float64)
    out_im = np.zeros(iy.shape, dtype=np.float64)
    for dy in (0, 1):
        for dx in (0, 1):
            yy = y0 + dy
            xx = x0 + dx
            w = (fy if dy else 1.0 - fy) * (fx if dx else 1.0 - fx)
            ok = (yy >= 0) & (yy < n_y) & (xx >= 0) & (xx < n_x)
            yc = np.clip(yy, 0, n_y - 1)
            xc = np.clip(xx, 0, n_x - 1)
            wv = np.where(ok, w, 0.0)
            out_re += wv * re[yc, xc]
            out_im += wv * im[yc, xc]
    return out_re + 1j * out_im


if HAVE_NUMBA:

    @njit(cache=True)
    def _rs_sum_jit(samples_re, samples_im, xs, ys, distance, wavenumber):
        n = samples_re.shape[0]
        out_re = np.zeros((n, n), dtype=np.float64)
        out_im = np.zeros((n, n), dtype=np.float64)
        z2 = distance * distance
        for i in range(n):
            for j in range(n):
                acc_re = 0.0
                acc_im = 0.0
                for si in range(n):
                    dy = ys[i] - ys[si]
                    for sj in range(n):
                        dx = xs[j] - xs[sj]
                        rho2 = dx * dx + dy * dy + z2
                        rho = np.sqrt(rho2)
                        ph = wavenumber * rho
                        c = np.cos(ph) / rho2
                        s = np.sin(ph) / rho2
                        acc_re += samples_re[si, sj] * c - samples_im[si, sj] * s
                        acc_im += samples_re[si, sj] * s + samples_im[si, sj] * c
                out_re[i, j] = acc_re
                out_im[i, j] = acc_im
        return out_re, out_im

    @njit(cache=True)
    def _bilinear_jit(re, im, iy, ix):
        n_y, n_x = re.shape
        m_y, m_x = iy.shape
        out_re = np.zeros((m_y, m_x), dtype=np.float64)
        out_im = np.zeros((m_y, m_x), dtype=np.float64)
        for i in range(m_y):
            for j in range(m_x):
                y = iy[i, j]
                x = ix[i, j]
                y0 = int(np.floor(y))
                x0 = int(np.floor(x))
                fy = y - y0
                fx = x - x0
                for dy in range(2):
                    yy = y0 + dy
                    if yy < 0 or yy >= n_y:
                        continue
                    wy = fy if dy == 1 else 1.0 - fy
                    for dx in range(2):
                        xx = x0 + dx
                        if xx < 0 or xx >= n_x:
                            continue
                        w = wy * (fx if dx == 1 else 1.0 - fx)
                        out_re[i, j] += w * re[yy, xx]
                        out_im[i, j] += w * im[yy, xx]
        return out_re, out_im


def rayleigh_sommerfeld_sum(
    samples: np.ndarray,
    xs: np.ndarray,
    ys: np.ndarray,
    distance: float,
    wavenumber: float,
) -> np.ndarray:
    """Dispatching wrapper for the O(N^4) Rayleigh-Sommerfeld quadrature."""
    if HAVE_NUMBA:
        re, im = _rs_sum_jit(
            np.ascontiguousarray(samples.real),
            np.ascontiguousarray(samples.imag),
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(ys, dtype=np.float64),
            float(distance),
            float(wavenumber),
        )
        return re + 1j * im
    return rayleigh_sommerfeld_sum_numpy(samples, xs, ys, distance, wavenumber)


def bilinear_gather(
    re: np.ndarray,
    im: np.ndarray,
    iy: np.ndarray,
    ix: np.ndarray,
) -> np.ndarray:
    """Dispatching wrapper for bilinear complex-array interpolation."""
    if HAVE_NUMBA:
        out_re, out_im = _bilinear_jit(
            np.ascontiguousarray(re),
            np.ascontiguousarray(im),
            np.ascontiguousarray(iy),
            np.ascontiguousarray(ix),
        )
        return out_re + 1j * out_im
    return bilinear_gather_numpy(re, im, iy, ix)
