"""Hot loops of both solvers.

The compiled extension ``_ckernels`` is used when it was built; otherwise the
numpy implementation in ``_pykernels`` is selected at import. Either backend
can be requested explicitly with :func:`get_backend`.
"""
from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

DEFAULT_BACKEND = "cython" if _ckernels is not None else "python"

OK = _pykernels.OK
CFL_VIOLATION = _pykernels.CFL_VIOLATION
SUPERSONIC_LOSS = _pykernels.SUPERSONIC_LOSS
NON_FINITE = _pykernels.NON_FINITE


def get_backend(name=None):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available; have {sorted(BACKENDS)}") from None
