"""Timing comparison of the numba and pure-numpy kernel implementations.

Three kernels have dual implementations: the Hankel lift, its adjoint, and
the Poisson-disc dart throw.  Both variants live side by side in the package
(dispatch happens at import time via ``TXLR_DISABLE_NUMBA``), so one process
can time them against each other directly.  The solver itself is BLAS-bound
(SVD / eigendecomposition) and is benchmarked as a whole for reference.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from txlr._accel import NUMBA_ENABLED
from txlr.hankel import (
    _adjoint_loops,
    _adjoint_slices,
    _forward_loops,
    _forward_windows,
    hankel_shape,
)
from txlr.sampling import _dart_throw_loops, _dart_throw_python


def timeit(fn, *args, repeats=20):
    fn(*args)  # warm-up (JIT compilation, cache effects)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_hankel(dims=(24, 24), channels=(8, 8), kernel=(5, 5)):
    rng = np.random.default_rng(0)
    shape = dims + channels
    d = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    m, n = kernel
    n1, n2 = hankel_shape(dims, kernel)
    hshape = (n1, n2) + channels

    def forward_numba():
        out = np.empty(hshape, dtype=np.complex128)
        _forward_loops(d, m, n, out)
        return out

    h = forward_numba() if NUMBA_ENABLED else _forward_windows(d, m, n)

    def adjoint_numba():
        out = np.zeros(shape, dtype=np.complex128)
        _adjoint_loops(h, m, n, out)
        return out

    rows = []
    rows.append(("hankel_forward", "numpy", timeit(_forward_windows, d, m, n)))
    if NUMBA_ENABLED:
        rows.append(("hankel_forward", "numba", timeit(forward_numba)))
    rows.append(("hankel_adjoint", "numpy", timeit(_adjoint_slices, h, dims, m, n)))
    if NUMBA_ENABLED:
        rows.append(("hankel_adjoint", "numba", timeit(adjoint_numba)))
    return rows


def bench_dart_throw(dims=(128, 128), radius=2.5, repeats=10):
    nkx, nky = dims
    rng = np.random.default_rng(1)
    order = rng.permutation(nkx * nky)
    xs = (order // nky).astype(np.int64)
    ys = (order % nky).astype(np.int64)
    n_target = nkx * nky // 8

    def run_python():
        occ = np.zeros(dims, dtype=np.bool_)
        _dart_throw_python(xs, ys, nkx, nky, radius, n_target, occ)

    def run_numba():
        occ = np.zeros(dims, dtype=np.bool_)
        _dart_throw_loops(xs, ys, nkx, nky, radius, n_target, occ)

    rows = [("dart_throw", "numpy", timeit(run_python, repeats=repeats))]
    if NUMBA_ENABLED:
        rows.append(("dart_throw", "numba", timeit(run_numba, repeats=repeats)))
    return rows


def bench_solver_reference():
    """Whole-iteration timing; BLAS-dominated, so no numba variant exists."""
    from txlr import sampling
    from txlr.phantom import (
        crop_kspace,
        generate_phantom,
        generate_sensitivities,
        simulate_kspace,
    )
    from txlr.solver import SolverConfig, admm_reconstruct

    phantom = generate_phantom((48, 48), "body_ellipses", seed=0)
    sens = generate_sensitivities((48, 48), 8, 8, 3, seed=1)
    truth = crop_kspace(simulate_kspace(phantom, sens), (24, 24))
    mask = sampling.mask_variants_per_tx((24, 24), 4.0, 8, seed=0)
    data = sampling.apply_mask(truth, mask)
    cfg = SolverConfig(method="txlr", max_iters=10)
    t0 = time.perf_counter()
    admm_reconstruct(data, mask, cfg)
    per_iter = (time.perf_counter() - t0) / cfg.max_iters
    return [("admm_iteration", "blas", per_iter)]


def main():
    print(f"numba available and enabled: {NUMBA_ENABLED}")
    if not NUMBA_ENABLED:
        print("(set TXLR_DISABLE_NUMBA=0 or install numba to time the jit path)")
    rows = bench_hankel() + bench_dart_throw() + bench_solver_reference()
    print(f"\n{'kernel':<18} {'impl':<7} {'best (ms)':>10}")
    best = {}
    for name, impl, secs in rows:
        print(f"{name:<18} {impl:<7} {secs * 1e3:>10.3f}")
        best.setdefault(name, {})[impl] = secs
    for name, impls in best.items():
        if "numba" in impls and "numpy" in impls:
            print(f"{name}: numba is {impls['numpy'] / impls['numba']:.1f}x numpy")


if __name__ == "__main__":
    main()
