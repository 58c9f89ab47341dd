"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``CBCTSEG_KERNELS=pure`` or ``CBCTSEG_KERNELS=compiled`` to force a
backend (forcing ``compiled`` raises if the extension is missing). Both
backends produce bit-identical results; the compiled one is just fast.

All 3D arrays use the package convention: shape ``(nx, ny, nz)``, indexed
``[x, y, z]``, Fortran-contiguous so the flat order is x-fastest.
"""

from __future__ import annotations

import os

import numpy as np

_forced = os.environ.get("CBCTSEG_KERNELS", "").strip().lower()
if _forced not in ("", "pure", "compiled"):
    raise ImportError(f"CBCTSEG_KERNELS must be 'pure' or 'compiled', got {_forced!r}")

if _forced == "pure":
    from . import _pure as _impl
    BACKEND = "pure"
else:
    try:
        from . import _compiled as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise
        from . import _pure as _impl  # type: ignore[no-redef]
        BACKEND = "pure"


def _flat_f(arr: np.ndarray, dtype) -> np.ndarray:
    """x-fastest flat copy/view of a 3D array."""
    a = np.asfortranarray(arr, dtype=dtype)
    return a.reshape(-1, order="F")


def edt_sq(mask: np.ndarray, spacing: tuple[float, float, float],
           impl=None) -> np.ndarray:
    """Exact squared anisotropic distance (mm^2) to the nearest True voxel.

    Raises on an all-False mask (there is no nearest foreground voxel).
    """
    impl = impl or _impl
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise ValueError("mask must be 3-D")
    if not mask.any():
        raise ValueError("distance transform of an empty mask is undefined")
    nx, ny, nz = mask.shape
    d = np.where(mask, 0.0, np.inf)
    flat = _flat_f(d, np.float64)
    impl.edt_sq_inplace(flat, nx, ny, nz, float(spacing[0]), float(spacing[1]),
                        float(spacing[2]))
    return flat.reshape((nx, ny, nz), order="F")


def connected_components(mask: np.ndarray, connectivity: int = 26,
                         impl=None) -> tuple[np.ndarray, int]:
    """Label components of a binary mask; ids 1..k by smallest linear index."""
    impl = impl or _impl
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 3:
        raise ValueError("mask must be 3-D")
    nx, ny, nz = mask.shape
    flat = _flat_f(mask, np.uint8)
    labels = np.zeros(flat.shape[0], dtype=np.int32)
    k = impl.label_components(flat, nx, ny, nz, connectivity, labels)
    return labels.reshape((nx, ny, nz), order="F"), int(k)


def label_extents(data: np.ndarray, impl=None):
    """Per-label voxel counts and inclusive bounding boxes in one pass.

    Returns ``(counts, lo, hi)`` indexed by label id 0..max(data); absent
    labels have count 0 and an empty box (hi < lo).
    """
    impl = impl or _impl
    data = np.asarray(data)
    if data.ndim != 3 or not np.issubdtype(data.dtype, np.integer):
        raise ValueError("expected a 3-D integer array")
    nx, ny, nz = data.shape
    max_label = int(data.max()) if data.size else 0
    n = max_label + 1
    counts = np.zeros(n, dtype=np.int64)
    lo = np.empty(3 * n, dtype=np.intp)
    lo[0::3] = nx
    lo[1::3] = ny
    lo[2::3] = nz
    hi = np.full(3 * n, -1, dtype=np.intp)
    if data.dtype not in (np.uint8, np.uint16, np.int32):
        data = data.astype(np.int32)
    flat = _flat_f(data, data.dtype)
    impl.label_extents(flat, nx, ny, nz, counts, lo, hi)
    return counts, lo.reshape(n, 3), hi.reshape(n, 3)


def encode_border_core(inst: np.ndarray, width: int, impl=None) -> np.ndarray:
    """Border-core map of an instance volume: 0 bg, 1 core, 2 border."""
    impl = impl or _impl
    inst = np.asarray(inst)
    if inst.ndim != 3:
        raise ValueError("instance map must be 3-D")
    if width < 1:
        raise ValueError("border width must be >= 1")
    nx, ny, nz = inst.shape
    flat = _flat_f(inst, np.int32)
    out = np.zeros(flat.shape[0], dtype=np.uint8)
    impl.encode_border_core(flat, nx, ny, nz, int(width), out)
    return out.reshape((nx, ny, nz), order="F")


def propagate_labels(seeds: np.ndarray, fg: np.ndarray, impl=None) -> np.ndarray:
    """Grow seed ids through foreground by 6-connected BFS (min-id on ties)."""
    impl = impl or _impl
    seeds = np.asarray(seeds)
    fg = np.asarray(fg, dtype=bool)
    if seeds.shape != fg.shape or seeds.ndim != 3:
        raise ValueError("seeds and foreground must share a 3-D shape")
    nx, ny, nz = seeds.shape
    labels = _flat_f(seeds, np.int32).copy()
    impl.propagate_labels(labels, _flat_f(fg, np.uint8), nx, ny, nz)
    return labels.reshape((nx, ny, nz), order="F")
