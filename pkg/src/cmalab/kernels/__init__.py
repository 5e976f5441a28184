"""Stencil kernels: compiled extension if available, numpy fallback otherwise.

Set CMA_LAB_FORCE_FALLBACK=1 to skip the extension (used by the
benchmark and by tests that compare the two implementations).
"""

import os

from . import fallback

if os.environ.get("CMA_LAB_FORCE_FALLBACK"):
    _impl = fallback
else:
    try:
        from . import _stencil as _impl
    except ImportError:
        _impl = fallback

IMPL = _impl.IMPL
hessian_fields = _impl.hessian_fields
apply_linearization = _impl.apply_linearization

__all__ = ["IMPL", "hessian_fields", "apply_linearization", "fallback"]
