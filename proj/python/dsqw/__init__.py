"""Two-band walk simulator: spectra, noise ensembles, and master equations."""

from ._core import (
    ConfigError,
    ResourceRefusal,
    __version__,
    band_curve,
    canonical_config,
    dfs_momenta,
    edge_states,
    noise_coefficients,
    preset_names,
    preset_text,
    quasienergies,
    run,
    verify,
)

__all__ = [
    "ConfigError",
    "ResourceRefusal",
    "__version__",
    "band_curve",
    "canonical_config",
    "dfs_momenta",
    "edge_states",
    "noise_coefficients",
    "preset_names",
    "preset_text",
    "quasienergies",
    "run",
    "verify",
]
