"""Quantum energy teleportation in vacuum and squeezed states.

Results are dicts keyed like the JSON reports of the ``qet`` command-line tool.
Failures raise :class:`QetError` with ``args == (code, message)``.
"""

from ._qet import (
    Geometry,
    QetError,
    QuadratureConfig,
    SmearingProfile,
    SqueezeProfile,
    __version__,
    compare_with_oracle,
    energy_density,
    flanagan_functional,
    load_config,
    log_grid,
    minimize_flanagan,
    piecewise_quadratic_cost,
    scan_distance,
    squeeze_cost,
    squeezed_correlator,
    teleported_energy,
    teleported_energy_squeezed,
    vacuum_correlator,
)


def error_code(exc: QetError) -> str:
    """Machine-readable code of a QetError, e.g. ``"SupportViolation"``."""
    return exc.args[0]


__all__ = [
    "Geometry",
    "QetError",
    "QuadratureConfig",
    "SmearingProfile",
    "SqueezeProfile",
    "__version__",
    "compare_with_oracle",
    "energy_density",
    "error_code",
    "flanagan_functional",
    "load_config",
    "log_grid",
    "minimize_flanagan",
    "piecewise_quadratic_cost",
    "scan_distance",
    "squeeze_cost",
    "squeezed_correlator",
    "teleported_energy",
    "teleported_energy_squeezed",
    "vacuum_correlator",
]
