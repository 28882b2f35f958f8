"""Closed-loop simulator for adaptive extrusion printing control.

Thin wrapper over the compiled `_core` module. When the package is not
installed (running tests straight from the source tree), the extension is
picked up from the directory named by DIWMRAC_EXT_DIR.
"""

try:
    from ._core import (
        ConfigError,
        SimulationError,
        convergence_time,
        default_scenario,
        run_scenario,
    )
except ImportError:  # source tree: load the extension from the build dir
    import importlib.util
    import os
    import sys

    _ext_dir = os.environ.get("DIWMRAC_EXT_DIR")
    if not _ext_dir:
        raise
    _spec = None
    for _name in os.listdir(_ext_dir):
        if _name.startswith("_core") and (_name.endswith(".so") or _name.endswith(".pyd")):
            _spec = importlib.util.spec_from_file_location(
                __name__ + "._core", os.path.join(_ext_dir, _name)
            )
            break
    if _spec is None:
        raise
    _core = importlib.util.module_from_spec(_spec)
    sys.modules[__name__ + "._core"] = _core
    _spec.loader.exec_module(_core)
    ConfigError = _core.ConfigError
    SimulationError = _core.SimulationError
    convergence_time = _core.convergence_time
    default_scenario = _core.default_scenario
    run_scenario = _core.run_scenario

__all__ = [
    "ConfigError",
    "SimulationError",
    "convergence_time",
    "default_scenario",
    "run_scenario",
]
