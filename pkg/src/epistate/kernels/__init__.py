"""Shot kernels: compiled when available, pure Python otherwise.

Set ``EPISTATE_PURE_PYTHON=1`` to force the fallback. Both backends
produce bit-identical codes for the same draws.
"""
import os

from . import _shots_py

_impl = _shots_py
BACKEND = "python"
if os.environ.get("EPISTATE_PURE_PYTHON", "") != "1":
    try:
        from . import _shots_c

        _impl = _shots_c
        BACKEND = "cython"
    except ImportError:
        pass

D1, D2, DPLUS3, DMINUS3 = _shots_py.D1, _shots_py.D2, _shots_py.DPLUS3, _shots_py.DMINUS3
KERNELS = ("categorical", "epr_ess", "mz_ess", "optical_qm", "optical_ess")

categorical = _impl.categorical
epr_ess = _impl.epr_ess
mz_ess = _impl.mz_ess
optical_qm = _impl.optical_qm
optical_ess = _impl.optical_ess


def backend(name: str):
    """The kernel module for ``'python'`` or ``'cython'``."""
    if name == "python":
        return _shots_py
    if name == "cython":
        from . import _shots_c

        return _shots_c
    raise ValueError(f"unknown backend {name!r}")
