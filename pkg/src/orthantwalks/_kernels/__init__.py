"""Kernel backend selection.

Imports the compiled extension when available and falls back to the
pure-Python reference implementation otherwise.  ``get_backend`` gives
explicit access to either one for equivalence tests and benchmarks.
"""
from . import pure

try:
    from orthantwalks import _speedups as _compiled
except ImportError:  # extension not built
    _compiled = None

_active = _compiled if _compiled is not None else pure

BACKEND = _active.BACKEND
draw_word = _active.draw_word
run_sampler = _active.run_sampler
run_naive = _active.run_naive


def get_backend(name: str):
    if name == "pure":
        return pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    if name == "active":
        return _active
    raise ValueError("unknown backend %r" % name)


def available_backends():
    names = ["pure"]
    if _compiled is not None:
        names.append("compiled")
    return names
