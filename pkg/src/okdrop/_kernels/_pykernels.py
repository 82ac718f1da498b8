"""Pure-numpy fallbacks for the compiled kernels.

Same contracts as ``_cykernels``; used when the extension is not built or
when ``OKDROP_KERNELS=py`` forces them.  Labeling delegates to
``scipy.ndimage`` plus an explicit wrap-seam merge so the result is
identical (including label numbering) to the union-find extension.
"""

from __future__ import annotations

import numpy as np


def quartic_terms(u, out_wprime):
    u2 = u * u
    q = 1.0 - u2
    w_sum = 0.25 * float(np.dot(q, q))
    np.multiply(u2, u, out=out_wprime)
    out_wprime -= u
    return w_sum, float(out_wprime.sum())


def explicit_combine(u, wprime, v, dt, stab, out):
    np.multiply(u, 1.0 + dt * stab, out=out)
    out -= dt * wprime
    out -= dt * v


def residual_sup(neg_lap, wprime, v, lagrange):
    g = neg_lap + wprime
    g += v
    g -= lagrange
    return float(np.max(np.abs(g)))


def masked_dot(a, b):
    return float(np.dot(a, b))


def label_components(mask, n, labels):
    from scipy import ndimage

    cube = np.asarray(mask, dtype=bool).reshape(n, n, n)
    struct = ndimage.generate_binary_structure(3, 1)  # 6-connectivity
    lab, _ = ndimage.label(cube, structure=struct)

    # merge labels that touch across the three periodic seams
    parent = np.arange(lab.max() + 1, dtype=np.int64)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra < rb:
            parent[rb] = ra
        elif rb < ra:
            parent[ra] = rb

    for axis in range(3):
        lo = np.take(lab, 0, axis=axis).ravel()
        hi = np.take(lab, n - 1, axis=axis).ravel()
        both = (lo > 0) & (hi > 0)
        for a, b in zip(lo[both], hi[both]):
            union(int(a), int(b))

    roots = np.array([find(i) for i in range(parent.size)], dtype=np.int64)
    merged = roots[lab]

    # renumber from 1 in order of first appearance in x-fastest raster order
    flat = merged.ravel()
    out = np.zeros_like(flat, dtype=np.int32)
    nz = flat > 0
    uniq, first, inv = np.unique(flat[nz], return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(1, order.size + 1)
    out[nz] = rank[inv]
    labels[:] = out
    return int(order.size)


def yukawa_image_sum(points, decay, ell, shells, out):
    rng = np.arange(-shells, shells + 1, dtype=np.float64) * ell
    oz, oy, ox = np.meshgrid(rng, rng, rng, indexing="ij")
    offsets = np.stack([ox.ravel(), oy.ravel(), oz.ravel()], axis=1)
    chunk = max(1, int(2e7 // max(1, offsets.shape[0])))
    for lo in range(0, points.shape[0], chunk):
        pts = points[lo : lo + chunk]
        d = np.linalg.norm(pts[:, None, :] - offsets[None, :, :], axis=2)
        out[lo : lo + chunk] = np.sum(np.exp(-decay * d) / d, axis=1) / (4.0 * np.pi)
