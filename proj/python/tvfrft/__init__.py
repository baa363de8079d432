"""Time-vertex graph filtering in fractional Fourier domains.

Thin Python veneer over the C++ core: graph construction, joint
(fractional) Fourier transforms, the time-vertex Wiener-Hopf solver,
baseline filters, and the two-stage denoising pipeline. All matrices are
numpy arrays; signals are N x T with one column per time step.
"""

from ._core import (
    JointFractionalAnalyzer,
    __version__,
    add_noise,
    build_vandermonde,
    cycle_laplacian,
    dft_matrix,
    eigendecompose,
    fractional_transform,
    frequency_response,
    gfso,
    haversine_km,
    ijft,
    jft,
    knn_adjacency,
    laplacian,
    make_smooth_signal,
    median_filter,
    normalize_energy_preserving,
    run_experiment,
    snr_db,
    solve_wiener,
    tikhonov_denoise,
    two_stage_denoise,
)


def orders_grid(step):
    """(a, b) grid over [0, 1]^2 with the given step, matching the CLI's
    grid subcommand: multiples of step below 1, plus 1 itself."""
    if not 0.0 < step <= 1.0:
        raise ValueError("orders_grid: step must be in (0, 1]")
    points = []
    k = 0
    while k * step < 1.0 - 1e-12:
        points.append(k * step)
        k += 1
    points.append(1.0)
    return [(a, b) for a in points for b in points]


__all__ = [
    "JointFractionalAnalyzer",
    "__version__",
    "add_noise",
    "build_vandermonde",
    "cycle_laplacian",
    "dft_matrix",
    "eigendecompose",
    "fractional_transform",
    "frequency_response",
    "gfso",
    "haversine_km",
    "ijft",
    "jft",
    "knn_adjacency",
    "laplacian",
    "make_smooth_signal",
    "median_filter",
    "normalize_energy_preserving",
    "orders_grid",
    "run_experiment",
    "snr_db",
    "solve_wiener",
    "tikhonov_denoise",
    "two_stage_denoise",
]
