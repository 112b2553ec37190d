"""Benchmark: compiled field kernels vs the NumPy fallback.

Times the two hot kernels on planner-realistic scenes plus one full
annealing objective loop. Run from the repo root:

    python3 benchmarks/bench_fields.py
"""

import time

import numpy as np

from beaconplan import _fieldpure
from beaconplan.rss import DET_EPS

try:
    from beaconplan import _fieldcore
except ImportError:
    _fieldcore = None

COEFF = (10.0 * 3.0 / (1.732 * np.log(10.0))) ** 2

SCENES = [
    # (label, cells_x, cells_y, beacons)  -- roughly: SA objective grid,
    # interactive map, office display map
    ("optimizer 10x5 @2m, 4 beacons", 10, 5, 4),
    ("interactive 100x50 @0.5m, 15 beacons", 100, 50, 15),
    ("office 188x78 @0.5m, 15 beacons", 188, 78, 15),
]


def make_scene(nx, ny, beacons, rng):
    cx = (np.arange(nx, dtype=np.float64) + 0.5) * 0.5
    cy = (np.arange(ny, dtype=np.float64) + 0.5) * 0.5
    xx, yy = np.meshgrid(cx, cy)
    bx = rng.uniform(0, nx * 0.5, beacons)
    by = rng.uniform(0, ny * 0.5, beacons)
    return xx.ravel(), yy.ravel(), bx, by


def time_call(fn, *args, repeats=None):
    fn(*args)  # warm up
    if repeats is None:
        # scale repeats so each measurement takes ~0.3 s
        t0 = time.perf_counter()
        fn(*args)
        once = time.perf_counter() - t0
        repeats = max(3, int(0.3 / max(once, 1e-7)))
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def bench_kernels():
    rng = np.random.default_rng(42)
    backends = [("pure", _fieldpure)] + ([("native", _fieldcore)] if _fieldcore else [])
    print(f"{'scene':45s} {'kernel':10s}" + "".join(f" {n:>12s}" for n, _ in backends) + "   speedup")
    for label, nx, ny, m in SCENES:
        cx, cy, bx, by = make_scene(nx, ny, m, rng)
        rows = {
            "strength": [
                time_call(mod.strength_field, cx, cy, bx, by, -59.0, 3.0, 1.0, 0.5)
                for _, mod in backends
            ],
            "crlb": [
                time_call(mod.crlb_field, cx, cy, bx, by, COEFF, 0.5, 23.0, DET_EPS)
                for _, mod in backends
            ],
        }
        for kernel, times in rows.items():
            cells = f"{label}"
            cols = "".join(f" {t * 1e6:>10.1f}us" for t in times)
            speedup = f"{times[0] / times[-1]:10.1f}x" if len(times) == 2 else "         -"
            print(f"{cells:45s} {kernel:10s}{cols} {speedup}")


def bench_annealing():
    import beaconplan as bp
    from beaconplan.anneal import SaConfig

    ch = bp.ChannelModel(beta=3.0, sigma=1.732, p0=-59.0)
    plan = bp.Floorplan(20.0, 10.0)
    grid = bp.GridSpec.for_floorplan(plan, 2.0)
    cfg = SaConfig(beacon_count=4, max_evals=2000, seed=1, min_temp_ratio=1e-9)
    t0 = time.perf_counter()
    bp.anneal(ch, plan, grid, cfg)
    elapsed = time.perf_counter() - t0
    print(f"\nannealing 2000 evals on 10x5 grid ({bp.FIELD_BACKEND} backend): "
          f"{elapsed:.2f}s ({elapsed / 2000 * 1e3:.2f} ms/eval)")


if __name__ == "__main__":
    if _fieldcore is None:
        print("compiled kernels not built; timing the NumPy fallback only\n")
    bench_kernels()
    bench_annealing()
