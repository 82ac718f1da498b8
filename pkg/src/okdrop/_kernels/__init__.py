"""Kernel backend selection.

The compiled extension is preferred when present; ``OKDROP_KERNELS=py`` or
``=cy`` forces a backend (``cy`` raises if the extension is missing).  All
call sites go through the thin wrappers below, which allocate outputs and
normalize dtypes so both backends are drop-in interchangeable.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

_forced = os.environ.get("OKDROP_KERNELS", "").lower()
if _forced == "py":
    _impl = _pykernels
    BACKEND = "python"
elif _forced == "cy":
    from . import _cykernels as _impl  # noqa: F401

    BACKEND = "cython"
else:
    try:
        from . import _cykernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"


def quartic_terms(u):
    """W'(u) for the quartic well plus the sums of W(u) and W'(u)."""
    u = np.ascontiguousarray(u, dtype=np.float64).ravel()
    wprime = np.empty_like(u)
    w_sum, wp_sum = _impl.quartic_terms(u, wprime)
    return wprime, w_sum, wp_sum


def explicit_combine(u, wprime, v, dt, stab):
    out = np.empty_like(u)
    _impl.explicit_combine(u, wprime, v, float(dt), float(stab), out)
    return out


def residual_sup(neg_lap, wprime, v, lagrange):
    return _impl.residual_sup(neg_lap, wprime, v, float(lagrange))


def dot(a, b):
    return _impl.masked_dot(a, b)


def label_components(mask, n):
    mask = np.ascontiguousarray(mask, dtype=np.uint8).ravel()
    if mask.size != n**3:
        raise ValueError(f"mask size {mask.size} is not {n}^3")
    labels = np.zeros(mask.size, dtype=np.int32)
    count = _impl.label_components(mask, int(n), labels)
    return labels, int(count)


def yukawa_image_sum(points, decay, ell, shells):
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    out = np.empty(points.shape[0], dtype=np.float64)
    _impl.yukawa_image_sum(points, float(decay), float(ell), int(shells), out)
    return out
