"""Benchmark the numba kernels against their pure-numpy fallbacks.

Workload mirrors one sweep trial of the default 5 MHz 2x2 configuration:
a 7-symbol slot stream through a 40-tap channel, and zero-forcing detection
over all data resource elements.  Run directly:

    python benchmarks/bench_kernels.py [repeats]
"""

from __future__ import annotations

import sys
import time

import numpy as np

from ltelink import kernels


def _time(fn, *args, repeats: int) -> float:
    fn(*args)  # warm up (jit compile, cache touch)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 20
    rng = np.random.default_rng(0)
    n_tx, n_rx, taps, n = 2, 2, 40, 7 * (512 + 16)
    tx = rng.standard_normal((n_tx, n)) + 1j * rng.standard_normal((n_tx, n))
    impulse = rng.standard_normal((n_tx, n_rx, taps)) + 1j * rng.standard_normal(
        (n_tx, n_rx, taps)
    )
    n_re = 1900
    y = rng.standard_normal((n_re, n_rx)) + 1j * rng.standard_normal((n_re, n_rx))
    h = rng.standard_normal((n_re, n_rx, n_tx)) + 1j * rng.standard_normal(
        (n_re, n_rx, n_tx)
    )

    rows = [("kernel", "numpy", "numba", "speedup")]
    conv_np = _time(kernels.mimo_convolve_numpy, tx, impulse, repeats=repeats)
    zf_np = _time(kernels.zf_detect_grid_numpy, y, h, repeats=repeats)
    if kernels.numba_enabled():
        conv_nb = _time(kernels.mimo_convolve_numba, tx, impulse, repeats=repeats)
        zf_nb = _time(kernels.zf_detect_grid_numba, y, h, repeats=repeats)
        rows.append(
            ("mimo_convolve", f"{conv_np*1e3:.3f} ms", f"{conv_nb*1e3:.3f} ms", f"{conv_np/conv_nb:.2f}x")
        )
        rows.append(
            ("zf_detect_grid", f"{zf_np*1e3:.3f} ms", f"{zf_nb*1e3:.3f} ms", f"{zf_np/zf_nb:.2f}x")
        )
    else:
        rows.append(("mimo_convolve", f"{conv_np*1e3:.3f} ms", "disabled", "-"))
        rows.append(("zf_detect_grid", f"{zf_np*1e3:.3f} ms", "disabled", "-"))
        print("numba path disabled (LTELINK_NUMBA=0 or numba missing)\n")

    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
