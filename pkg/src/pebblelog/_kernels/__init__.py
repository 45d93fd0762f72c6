"""Hot loops with a compiled implementation and a pure-Python fallback.

The compiled module is used when it was built and ``PEBBLELOG_PURE`` is not
set.  ``BACKEND`` names the implementation in use.
"""

import os

from . import _pebble_py

python_sweep_fixpoint = _pebble_py.sweep_fixpoint

try:
    from ._pebble import sweep_fixpoint as compiled_sweep_fixpoint
except ImportError:  # extension not built
    compiled_sweep_fixpoint = None

if compiled_sweep_fixpoint is not None and not os.environ.get("PEBBLELOG_PURE"):
    sweep_fixpoint = compiled_sweep_fixpoint
    BACKEND = "cython"
else:
    sweep_fixpoint = python_sweep_fixpoint
    BACKEND = "python"
