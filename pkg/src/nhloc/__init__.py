"""Non-Hermitian quasiperiodic chains: spectra and localization diagnostics."""

__version__ = "0.1.0"
