# SPDX-License-Identifier: Apache-2.0
"""Python front end for the mmcov coverage simulator."""
import json as _json
import os as _os

from . import _core
from ._core import DomainError, IoError, coverage_probability, ncr_e2e_gain_db, run_cli, version

__all__ = [
    "DomainError",
    "IoError",
    "coverage_probability",
    "default_config",
    "dynamic_block_probability",
    "heatmap",
    "ncr_e2e_gain_db",
    "run_cli",
    "sweep",
    "validate",
    "version",
]

__version__ = version()


def _dump(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    """Reference operating point as a nested dict."""
    return _json.loads(_core.default_config())


def dynamic_block_probability(r, z_t=6.0, z_r=1.5, config=None):
    return _core.dynamic_block_probability(r, z_t, z_r, _dump(config))


def validate(scenario, relay=None):
    return _core.validate(_os.fspath(scenario), relay or "")


def heatmap(scenario, mode="direct", config=None, seed=None, threads=None):
    """Per-point long-term SNR over the scenario grid.

    Returns a dict of lists (x, y, z, snr_db, chosen_link) plus
    coverage_probability keyed by threshold in dB.
    """
    return _core.heatmap(_os.fspath(scenario), mode, _dump(config), seed, threads)


def sweep(scenario, param, values, thresholds_db=(0.0, 5.0, 10.0), config=None):
    return _core.sweep(_os.fspath(scenario), param, list(values), list(thresholds_db), _dump(config))
