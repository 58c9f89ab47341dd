# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled voxel kernels: exact squared EDT, union-find labeling, border-core.

The pure-Python equivalents live in ``_pure``. Both backends operate on flat
buffers in x-fastest order (linear index ``x + nx*(y + ny*z)``) and must
produce bit-identical outputs; the EDT mirrors the fallback's floating-point
expressions exactly for that reason.
"""

from libc.math cimport INFINITY
from libc.stdlib cimport free, malloc


# ---------------------------------------------------------------------------
# Exact anisotropic squared Euclidean distance transform
# ---------------------------------------------------------------------------

cdef int _edt_axis(double[::1] d, Py_ssize_t n1, Py_ssize_t s1,
                   Py_ssize_t n2, Py_ssize_t s2,
                   Py_ssize_t m, Py_ssize_t sm, double sp) nogil:
    """One lower-envelope pass over all lines along a single axis.

    Lines are enumerated by two outer dimensions (extent n1/n2, stride s1/s2);
    each line has m samples sm apart. Returns 0, or -1 on allocation failure.
    """
    cdef double* f = <double*> malloc(m * sizeof(double))
    cdef double* dout = <double*> malloc(m * sizeof(double))
    cdef Py_ssize_t* v = <Py_ssize_t*> malloc(m * sizeof(Py_ssize_t))
    cdef double* z = <double*> malloc((m + 1) * sizeof(double))
    cdef Py_ssize_t i1, i2, base, q, k, j, p, dq
    cdef double fq, qs, ps, cut, ds
    cdef double s2d = sp * sp

    if f == NULL or dout == NULL or v == NULL or z == NULL:
        free(f); free(dout); free(v); free(z)
        return -1

    for i1 in range(n1):
        for i2 in range(n2):
            base = i1 * s1 + i2 * s2
            for q in range(m):
                f[q] = d[base + q * sm]

            # Build the lower envelope of parabolas rooted at finite samples.
            k = -1
            for q in range(m):
                fq = f[q]
                if fq == INFINITY:
                    continue
                qs = q * sp
                if k < 0:
                    k = 0
                    v[0] = q
                    z[0] = -INFINITY
                    z[1] = INFINITY
                    continue
                while True:
                    p = v[k]
                    ps = p * sp
                    cut = ((fq + qs * qs) - (f[p] + ps * ps)) / (2.0 * s2d * (q - p))
                    if cut <= z[k]:
                        k -= 1
                        if k < 0:
                            k = 0
                            v[0] = q
                            z[0] = -INFINITY
                            z[1] = INFINITY
                            break
                    else:
                        k += 1
                        v[k] = q
                        z[k] = cut
                        z[k + 1] = INFINITY
                        break

            if k < 0:
                continue  # no finite sample on this line; leave it infinite

            j = 0
            for q in range(m):
                while z[j + 1] < q:
                    j += 1
                dq = q - v[j]
                ds = dq * sp
                dout[q] = f[v[j]] + ds * ds
            for q in range(m):
                d[base + q * sm] = dout[q]

    free(f); free(dout); free(v); free(z)
    return 0


def edt_sq_inplace(double[::1] d, Py_ssize_t nx, Py_ssize_t ny, Py_ssize_t nz,
                   double sx, double sy, double sz):
    """Transform d (0 at sources, +inf elsewhere) into exact squared distances."""
    cdef int rc = 0
    with nogil:
        rc = _edt_axis(d, ny, nx, nz, nx * ny, nx, 1, sx)
        if rc == 0:
            rc = _edt_axis(d, nx, 1, nz, nx * ny, ny, nx, sy)
        if rc == 0:
            rc = _edt_axis(d, nx, 1, ny, nx, nz, nx * ny, sz)
    if rc != 0:
        raise MemoryError("EDT scratch allocation failed")


# ---------------------------------------------------------------------------
# Connected components via union-find
# ---------------------------------------------------------------------------

cdef inline Py_ssize_t _find(int* parent, Py_ssize_t i) nogil:
    cdef Py_ssize_t r = i
    cdef Py_ssize_t j = i
    cdef Py_ssize_t t
    while parent[r] != r:
        r = parent[r]
    while parent[j] != j:
        t = parent[j]
        parent[j] = <int> r
        j = t
    return r


def label_components(const unsigned char[::1] mask,
                     Py_ssize_t nx, Py_ssize_t ny, Py_ssize_t nz,
                     int connectivity, int[::1] labels):
    """Label maximal components of a flat binary mask.

    Component ids are 1..k ordered by each component's smallest linear index.
    Returns k. ``labels`` must be zero-initialized, same length as ``mask``.
    """
    cdef Py_ssize_t n = nx * ny * nz
    cdef int* parent = <int*> malloc(n * sizeof(int))
    cdef int* rootlab = <int*> malloc(n * sizeof(int))
    cdef Py_ssize_t x, y, z, i, j, ri
    cdef Py_ssize_t dx, dy
    cdef int k = 0
    if parent == NULL or rootlab == NULL:
        free(parent); free(rootlab)
        raise MemoryError("union-find scratch allocation failed")
    if connectivity != 6 and connectivity != 26:
        free(parent); free(rootlab)
        raise ValueError("connectivity must be 6 or 26")

    with nogil:
        i = 0
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    if mask[i] == 0:
                        i += 1
                        continue
                    parent[i] = <int> i
                    if connectivity == 6:
                        if x > 0 and mask[i - 1]:
                            _union(parent, i, i - 1)
                        if y > 0 and mask[i - nx]:
                            _union(parent, i, i - nx)
                        if z > 0 and mask[i - nx * ny]:
                            _union(parent, i, i - nx * ny)
                    else:
                        # previous 26-neighbors: dz=-1 plane, dy=-1 row, dx=-1
                        if z > 0:
                            for dy in range(-1, 2):
                                if y + dy < 0 or y + dy >= ny:
                                    continue
                                for dx in range(-1, 2):
                                    if x + dx < 0 or x + dx >= nx:
                                        continue
                                    j = i - nx * ny + dy * nx + dx
                                    if mask[j]:
                                        _union(parent, i, j)
                        if y > 0:
                            for dx in range(-1, 2):
                                if x + dx < 0 or x + dx >= nx:
                                    continue
                                j = i - nx + dx
                                if mask[j]:
                                    _union(parent, i, j)
                        if x > 0 and mask[i - 1]:
                            _union(parent, i, i - 1)
                    i += 1

        for i in range(n):
            rootlab[i] = 0
        for i in range(n):
            if mask[i]:
                ri = _find(parent, i)
                if rootlab[ri] == 0:
                    k += 1
                    rootlab[ri] = k
                labels[i] = rootlab[ri]

    free(parent)
    free(rootlab)
    return k


cdef inline void _union(int* parent, Py_ssize_t a, Py_ssize_t b) nogil:
    cdef Py_ssize_t ra = _find(parent, a)
    cdef Py_ssize_t rb = _find(parent, b)
    if ra == rb:
        return
    if ra < rb:
        parent[rb] = <int> ra
    else:
        parent[ra] = <int> rb


# ---------------------------------------------------------------------------
# Per-label voxel counts and bounding boxes (single pass)
# ---------------------------------------------------------------------------

ctypedef fused label_t:
    unsigned char
    unsigned short
    int


def label_extents(label_t[::1] data, Py_ssize_t nx, Py_ssize_t ny, Py_ssize_t nz,
                  long long[::1] counts, Py_ssize_t[::1] lo, Py_ssize_t[::1] hi):
    """Fill per-label counts and inclusive bboxes (lo/hi hold 3 ints per label).

    counts has max_label+1 entries (zeroed); lo is pre-filled with dims, hi
    with -1 so absent labels stay empty.
    """
    cdef Py_ssize_t x, y, z, i = 0
    cdef Py_ssize_t v
    with nogil:
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    v = <Py_ssize_t> data[i]
                    counts[v] += 1
                    if x < lo[3 * v]:
                        lo[3 * v] = x
                    if y < lo[3 * v + 1]:
                        lo[3 * v + 1] = y
                    if z < lo[3 * v + 2]:
                        lo[3 * v + 2] = z
                    if x > hi[3 * v]:
                        hi[3 * v] = x
                    if y > hi[3 * v + 1]:
                        hi[3 * v + 1] = y
                    if z > hi[3 * v + 2]:
                        hi[3 * v + 2] = z
                    i += 1


# ---------------------------------------------------------------------------
# Border-core encoding and decoding
# ---------------------------------------------------------------------------

cdef inline bint _window_differs(const int[::1] inst, Py_ssize_t nx, Py_ssize_t ny,
                                 Py_ssize_t nz, Py_ssize_t x, Py_ssize_t y,
                                 Py_ssize_t z, Py_ssize_t w, int v) nogil:
    cdef Py_ssize_t dx, dy, dz, j
    for dz in range(-w, w + 1):
        for dy in range(-w, w + 1):
            for dx in range(-w, w + 1):
                j = (x + dx) + nx * ((y + dy) + ny * (z + dz))
                if inst[j] != v:
                    return True
    return False


def encode_border_core(const int[::1] inst, Py_ssize_t nx, Py_ssize_t ny,
                       Py_ssize_t nz, Py_ssize_t width,
                       unsigned char[::1] out):
    """Mark each instance voxel core (1) or border (2); background stays 0.

    A voxel is border when any voxel within Chebyshev radius ``width`` has a
    different instance id, is background, or falls outside the volume.
    """
    cdef Py_ssize_t x, y, z, i = 0
    cdef int v
    with nogil:
        for z in range(nz):
            for y in range(ny):
                for x in range(nx):
                    v = inst[i]
                    if v == 0:
                        out[i] = 0
                    elif (x < width or x >= nx - width or
                          y < width or y >= ny - width or
                          z < width or z >= nz - width):
                        out[i] = 2
                    elif _window_differs(inst, nx, ny, nz, x, y, z, width, v):
                        out[i] = 2
                    else:
                        out[i] = 1
                    i += 1


def propagate_labels(int[::1] labels, const unsigned char[::1] fg,
                     Py_ssize_t nx, Py_ssize_t ny, Py_ssize_t nz):
    """Multi-source BFS through foreground with 6-connected steps.

    ``labels`` holds seed ids (>0) and zeros; it is filled in place. Voxels
    reached in the same generation from several seeds take the lowest id.
    Unreachable foreground stays 0.
    """
    cdef Py_ssize_t n = nx * ny * nz
    cdef Py_ssize_t nxy = nx * ny
    cdef int* cur = <int*> malloc(n * sizeof(int))
    cdef int* nxt = <int*> malloc(n * sizeof(int))
    cdef unsigned char* state = <unsigned char*> malloc(n)  # 0 open, 1 final, 2 pending
    cdef Py_ssize_t cur_len = 0, nxt_len = 0
    cdef Py_ssize_t i, t, x, y, z, j
    cdef int lab
    if cur == NULL or nxt == NULL or state == NULL:
        free(cur); free(nxt); free(state)
        raise MemoryError("BFS scratch allocation failed")

    with nogil:
        for i in range(n):
            if labels[i] > 0:
                state[i] = 1
                cur[cur_len] = <int> i
                cur_len += 1
            else:
                state[i] = 0

        while cur_len > 0:
            nxt_len = 0
            for t in range(cur_len):
                i = cur[t]
                lab = labels[i]
                x = i % nx
                y = (i // nx) % ny
                z = i // nxy
                if x > 0:
                    j = i - 1
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
                if x < nx - 1:
                    j = i + 1
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
                if y > 0:
                    j = i - nx
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
                if y < ny - 1:
                    j = i + nx
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
                if z > 0:
                    j = i - nxy
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
                if z < nz - 1:
                    j = i + nxy
                    nxt_len = _propose(labels, fg, state, nxt, nxt_len, j, lab)
            for t in range(nxt_len):
                state[nxt[t]] = 1
            cur, nxt = nxt, cur
            cur_len = nxt_len

    free(cur)
    free(nxt)
    free(state)


cdef inline Py_ssize_t _propose(int[::1] labels, const unsigned char[::1] fg,
                                unsigned char* state, int* nxt,
                                Py_ssize_t nxt_len, Py_ssize_t j, int lab) nogil:
    if fg[j] == 0 or state[j] == 1:
        return nxt_len
    if state[j] == 0:
        state[j] = 2
        labels[j] = lab
        nxt[nxt_len] = <int> j
        return nxt_len + 1
    if lab < labels[j]:
        labels[j] = lab
    return nxt_len
