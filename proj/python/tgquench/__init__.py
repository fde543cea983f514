"""Exact dynamics of two harmonically trapped bosons after interaction
quenches between the noninteracting and Tonks-Girardeau regimes."""

from tgquench._core import (  # noqa: F401
    SummationControl,
    double_factorial,
    double_quench_overlap,
    erf,
    evolved_momentum,
    evolved_sdm,
    hermite,
    hyp3f2,
    loschmidt_forward,
    loschmidt_reverse,
    mehler_kernel,
    overlap_cmn,
    phi,
    phi0_closed,
    phi_energy,
    phi_series,
    psi,
    psi0_closed,
    psi_energy,
    psi_series,
    reference_momentum,
    truncated_propagate,
    verify_derivative_relation,
)

__all__ = [
    "SummationControl",
    "double_factorial",
    "double_quench_overlap",
    "erf",
    "evolved_momentum",
    "evolved_sdm",
    "hermite",
    "hyp3f2",
    "loschmidt_forward",
    "loschmidt_reverse",
    "mehler_kernel",
    "overlap_cmn",
    "phi",
    "phi0_closed",
    "phi_energy",
    "phi_series",
    "psi",
    "psi0_closed",
    "psi_energy",
    "psi_series",
    "reference_momentum",
    "truncated_propagate",
    "verify_derivative_relation",
]
