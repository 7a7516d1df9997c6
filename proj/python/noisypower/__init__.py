"""Noisy power method: streaming and differentially private PCA.

Thin re-export of the compiled core. Matrices are float64 numpy arrays;
run results are plain dicts. Every stochastic entry point takes an explicit
integer seed, and sub-streams are derived with :func:`mix_seed`, so results
are reproducible bit-for-bit on one build.
"""

from ._core import (
    angle_oracle,
    check_decrease,
    coherence,
    cos_theta_k,
    gaussian_sigma,
    incoherence_trace,
    laplacian_lambda,
    low_rank,
    mix_seed,
    noise_admissible,
    npm,
    ppm,
    probe_conjecture,
    required_iterations,
    residual_norm,
    sign_profile,
    spectral_ppm,
    spiked_covariance,
    spiked_samples,
    spm,
    symmetric_eig,
    tan_theta_k,
)

__all__ = [
    "angle_oracle",
    "check_decrease",
    "coherence",
    "cos_theta_k",
    "gaussian_sigma",
    "incoherence_trace",
    "laplacian_lambda",
    "low_rank",
    "mix_seed",
    "noise_admissible",
    "npm",
    "ppm",
    "probe_conjecture",
    "required_iterations",
    "residual_norm",
    "sign_profile",
    "spectral_ppm",
    "spiked_covariance",
    "spiked_samples",
    "spm",
    "symmetric_eig",
    "tan_theta_k",
]

__version__ = "0.1.0"
