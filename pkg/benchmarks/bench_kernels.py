"""Benchmark the compiled compute kernels against their numpy fallbacks.

Run with ``python benchmarks/bench_kernels.py``. Each kernel is timed in
both implementations on the same inputs, and the outputs are compared so a
speedup never hides a numerical divergence.
"""

import time

import numpy as np

from resbeam import _kernels


def _time(fn, *args, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, result


def bench_diffraction_sum(n=48):
    rng = np.random.default_rng(0)
    samples = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    coords = (np.arange(n) - n // 2) * 1e-3
    wavenumber = 2 * np.pi / 1064e-9

    t_np, out_np = _time(
        _kernels.rayleigh_sommerfeld_sum_numpy,
        samples, coords, coords, 0.25, wavenumber,
    )
    if not _kernels.HAVE_NUMBA:
        return "diffraction sum", t_np, None, True
    jit_args = (
        np.ascontiguousarray(samples.real), np.ascontiguousarray(samples.imag),
        coords, coords, 0.25, wavenumber,
    )
    _kernels._rs_sum_jit(*jit_args)  # compile outside the timed region
    t_nb, (out_re, out_im) = _time(_kernels._rs_sum_jit, *jit_args)
    valid = np.allclose(out_np, out_re + 1j * out_im, rtol=1e-10)
    return "diffraction sum", t_np, t_nb, valid


def bench_bilinear_gather(n=2048):
    rng = np.random.default_rng(1)
    re = rng.normal(size=(n, n))
    im = rng.normal(size=(n, n))
    iy = rng.uniform(-1, n, size=(n, n))
    ix = rng.uniform(-1, n, size=(n, n))

    t_np, out_np = _time(_kernels.bilinear_gather_numpy, re, im, iy, ix)
    if not _kernels.HAVE_NUMBA:
        return "bilinear gather", t_np, None, True
    _kernels._bilinear_jit(re, im, iy, ix)  # compile outside the timed region
    t_nb, (out_re, out_im) = _time(_kernels._bilinear_jit, re, im, iy, ix)
    valid = np.allclose(out_np, out_re + 1j * out_im, rtol=1e-12, atol=1e-12)
    return "bilinear gather", t_np, t_nb, valid


def main():
    print(f"numba available: {_kernels.HAVE_NUMBA}")
    header = f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>9}  match"
    print(header)
    print("-" * len(header))
    for name, t_np, t_nb, valid in (bench_diffraction_sum(), bench_bilinear_gather()):
        if t_nb is None:
            print(f"{name:<18}{t_np * 1e3:>12.2f}{'n/a':>12}{'n/a':>9}  {valid}")
        else:
            print(
                f"{name:<18}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}"
                f"{t_np / t_nb:>8.1f}x  {valid}"
            )


if __name__ == "__main__":
    main()
