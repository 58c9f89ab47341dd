"""Pure-Python fallback kernels.

Same contracts as ``_compiled`` and bit-identical outputs: the EDT repeats the
compiled version's floating-point expressions verbatim (Python floats are the
same IEEE doubles), the integer kernels share the exact algorithms. Expect
these to be orders of magnitude slower on large volumes; see
``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import numpy as np

_INF = float("inf")


# ---------------------------------------------------------------------------
# Exact anisotropic squared Euclidean distance transform
# ---------------------------------------------------------------------------

def _edt_line(f: list, sp: float) -> list:
    """Lower-envelope squared distance transform of one sampled line."""
    m = len(f)
    v = [0] * m
    z = [0.0] * (m + 1)
    k = -1
    for q in range(m):
        fq = f[q]
        if fq == _INF:
            continue
        qs = q * sp
        if k < 0:
            k = 0
            v[0] = q
            z[0] = -_INF
            z[1] = _INF
            continue
        while True:
            p = v[k]
            ps = p * sp
            cut = ((fq + qs * qs) - (f[p] + ps * ps)) / (2.0 * (sp * sp) * (q - p))
            if cut <= z[k]:
                k -= 1
                if k < 0:
                    k = 0
                    v[0] = q
                    z[0] = -_INF
                    z[1] = _INF
                    break
            else:
                k += 1
                v[k] = q
                z[k] = cut
                z[k + 1] = _INF
                break
    if k < 0:
        return f
    out = [0.0] * m
    j = 0
    for q in range(m):
        while z[j + 1] < q:
            j += 1
        dq = q - v[j]
        ds = dq * sp
        out[q] = f[v[j]] + ds * ds
    return out


def edt_sq_inplace(d: np.ndarray, nx: int, ny: int, nz: int,
                   sx: float, sy: float, sz: float) -> None:
    """Transform d (0 at sources, +inf elsewhere) into exact squared distances."""
    vol = d.reshape((nx, ny, nz), order="F")
    for axis, sp in ((0, sx), (1, sy), (2, sz)):
        moved = np.moveaxis(vol, axis, -1)  # view; line writes go through
        na, nb = moved.shape[0], moved.shape[1]
        for a in range(na):
            for b in range(nb):
                line = moved[a, b, :]
                line[:] = _edt_line(line.tolist(), sp)


# ---------------------------------------------------------------------------
# Connected components via union-find
# ---------------------------------------------------------------------------

def _find(parent, i: int) -> int:
    r = i
    while parent[r] != r:
        r = parent[r]
    while parent[i] != i:
        parent[i], i = r, parent[i]
    return r


def _union(parent, a: int, b: int) -> None:
    ra = _find(parent, a)
    rb = _find(parent, b)
    if ra == rb:
        return
    if ra < rb:
        parent[rb] = ra
    else:
        parent[ra] = rb


def label_components(mask: np.ndarray, nx: int, ny: int, nz: int,
                     connectivity: int, labels: np.ndarray) -> int:
    """Label maximal components of a flat binary mask (ids by first voxel)."""
    if connectivity not in (6, 26):
        raise ValueError("connectivity must be 6 or 26")
    n = nx * ny * nz
    nxy = nx * ny
    parent = np.zeros(n, dtype=np.intp)
    m = mask
    i = 0
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if not m[i]:
                    i += 1
                    continue
                parent[i] = i
                if connectivity == 6:
                    if x > 0 and m[i - 1]:
                        _union(parent, i, i - 1)
                    if y > 0 and m[i - nx]:
                        _union(parent, i, i - nx)
                    if z > 0 and m[i - nxy]:
                        _union(parent, i, i - nxy)
                else:
                    if z > 0:
                        for dy in (-1, 0, 1):
                            if not 0 <= y + dy < ny:
                                continue
                            for dx in (-1, 0, 1):
                                if not 0 <= x + dx < nx:
                                    continue
                                j = i - nxy + dy * nx + dx
                                if m[j]:
                                    _union(parent, i, j)
                    if y > 0:
                        for dx in (-1, 0, 1):
                            if not 0 <= x + dx < nx:
                                continue
                            j = i - nx + dx
                            if m[j]:
                                _union(parent, i, j)
                    if x > 0 and m[i - 1]:
                        _union(parent, i, i - 1)
                i += 1

    k = 0
    rootlab: dict[int, int] = {}
    for i in range(n):
        if m[i]:
            r = _find(parent, i)
            lab = rootlab.get(r)
            if lab is None:
                k += 1
                lab = k
                rootlab[r] = lab
            labels[i] = lab
    return k


# ---------------------------------------------------------------------------
# Per-label voxel counts and bounding boxes
# ---------------------------------------------------------------------------

def label_extents(data: np.ndarray, nx: int, ny: int, nz: int,
                  counts: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> None:
    """Fill per-label counts and inclusive bboxes; same layout as compiled."""
    vol = data.reshape((nx, ny, nz), order="F")
    n_labels = counts.shape[0]
    counts += np.bincount(data, minlength=n_labels).astype(np.int64)
    lo3 = lo.reshape(-1, 3)
    hi3 = hi.reshape(-1, 3)
    for v in np.nonzero(counts)[0]:
        where = (vol == v)
        for axis in range(3):
            proj = np.any(where, axis=tuple(a for a in range(3) if a != axis))
            idx = np.nonzero(proj)[0]
            lo3[v, axis] = idx[0]
            hi3[v, axis] = idx[-1]


# ---------------------------------------------------------------------------
# Border-core encoding and decoding
# ---------------------------------------------------------------------------

def encode_border_core(inst: np.ndarray, nx: int, ny: int, nz: int,
                       width: int, out: np.ndarray) -> None:
    """Mark each instance voxel core (1) or border (2); background stays 0."""
    vol = inst.reshape((nx, ny, nz), order="F")
    w = width
    # Pad with -1 so out-of-bounds always counts as "different".
    padded = np.full((nx + 2 * w, ny + 2 * w, nz + 2 * w), -1, dtype=vol.dtype)
    padded[w:w + nx, w:w + ny, w:w + nz] = vol
    fg = vol != 0
    differs = np.zeros_like(fg)
    for dz in range(-w, w + 1):
        for dy in range(-w, w + 1):
            for dx in range(-w, w + 1):
                if dx == 0 and dy == 0 and dz == 0:
                    continue
                shifted = padded[w + dx:w + dx + nx,
                                 w + dy:w + dy + ny,
                                 w + dz:w + dz + nz]
                differs |= shifted != vol
    res = np.zeros((nx, ny, nz), dtype=np.uint8)
    res[fg] = np.where(differs[fg], 2, 1)
    out[:] = res.reshape(-1, order="F")


def propagate_labels(labels: np.ndarray, fg: np.ndarray,
                     nx: int, ny: int, nz: int) -> None:
    """Generation-synchronous BFS through foreground, 6-connected, min-id ties."""
    lab = labels.reshape((nx, ny, nz), order="F")
    fgv = fg.reshape((nx, ny, nz), order="F").astype(bool)
    sentinel = np.iinfo(np.int64).max
    while True:
        open_fg = fgv & (lab == 0)
        if not open_fg.any():
            return
        cand = np.full((nx, ny, nz), sentinel, dtype=np.int64)
        cur = np.where(lab > 0, lab.astype(np.int64), sentinel)
        for axis in range(3):
            for sign in (1, -1):
                shifted = np.full_like(cand, sentinel)
                src = [slice(None)] * 3
                dst = [slice(None)] * 3
                if sign == 1:
                    dst[axis] = slice(1, None)
                    src[axis] = slice(None, -1)
                else:
                    dst[axis] = slice(None, -1)
                    src[axis] = slice(1, None)
                shifted[tuple(dst)] = cur[tuple(src)]
                np.minimum(cand, shifted, out=cand)
        newly = open_fg & (cand < sentinel)
        if not newly.any():
            return  # remaining foreground is unreachable
        lab[newly] = cand[newly].astype(labels.dtype)
