"""Stencil backend selection: compiled extension when importable, numpy otherwise.

Set EGGCHAMBER_BACKEND=numpy (or =cython) to force a backend; forcing cython
raises if the extension is missing.  Both backends are bit-identical, so the
choice affects speed only (see benchmarks/bench_kernels.py).
"""

import os

from . import _stencils_py

_forced = os.environ.get("EGGCHAMBER_BACKEND", "").strip().lower()

if _forced == "numpy":
    _impl = _stencils_py
elif _forced == "cython":
    from . import _stencils as _impl
else:
    try:
        from . import _stencils as _impl
    except ImportError:
        _impl = _stencils_py

BACKEND = "numpy" if _impl is _stencils_py else "cython"

laplacian = _impl.laplacian
div_flux_faces = _impl.div_flux_faces
chemo_substeps = _impl.chemo_substeps
phase_reaction = _impl.phase_reaction
