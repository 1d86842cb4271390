"""THz-driven field-free orientation of symmetric-top molecules and the
free-induction decay it emits.

Settings are passed as ``{"section.key": value}`` dictionaries using the same
keys as the command-line config files; missing keys take their defaults.
"""

import json as _json

from . import _core
from ._core import (
    ConfigError,
    DegenerateFitError,
    DomainError,
    StepSizeError,
    TruncationError,
    config_keys,
    config_text,
    cos_theta_coupling,
    cos_theta_diagonal,
    detect_revivals,
    echo_spacing,
    energy,
    fit_trace,
    parse_config,
    partition_function,
    pulse_field,
    simulate,
    spectral_derivative_check,
)

__version__ = _core.__version__


def scan(parameter, values, settings=None, derivative=False, threads=0):
    """Peak |<cos theta>| (or |d<cos theta>/dt|) per channel over a scan.

    ``parameter`` is ``"amplitude"`` (kV/cm) or ``"tau"`` (ps).
    """
    result = _json.loads(_core.scan(parameter, values, settings or {}, derivative, threads))
    result.pop("manifest", None)
    return result


def default_settings():
    """Every config key with its default value, as text."""
    out = {}
    for line in config_text().splitlines():
        key, _, value = line.partition(" = ")
        out[key] = value
    return out
