"""Numba implementations of the hot kernels.

Semantics contract shared with _kernels_numpy:

render_rgb      inverse-map every canvas (sub)pixel into the fundamental
                domain and sample the per-op FD stack
render_claim    same mapping at ss=1; emits the claiming op index and the
                nearest FD pixel coordinates
mismatch_affine mean normalized per-channel |difference| between an image
                and its affine transform over the overlap region
scan_affine     mismatch_affine for a batch of translations sharing one
                linear part

Coordinate conventions: pixel (x, y) = (column, row) with the sample point
at integer coordinates; fractional coords f = Binv @ (p - origin).
"""

import numpy as np
from numba import njit, prange

_OFFS = ((0.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (-1.0, -1.0))


@njit(cache=True)
def _inside_convex(px, py, poly):
    """Point in convex CCW polygon, boundary inclusive (tol 1e-9)."""
    n = poly.shape[0]
    for i in range(n):
        ax, ay = poly[i, 0], poly[i, 1]
        j = i + 1
        if j == n:
            j = 0
        bx, by = poly[j, 0], poly[j, 1]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        if cross < -1e-9:
            return False
    return True


@njit(cache=True)
def _find_claim(fx, fy, ops_inv, poly):
    """First op (priority order) whose inverse image of (fx, fy) lies in the
    FD polygon; returns (op index, hx, hy) or (-1, 0, 0)."""
    K = ops_inv.shape[0]
    for k in range(K):
        m00, m01, m10, m11 = ops_inv[k, 0], ops_inv[k, 1], ops_inv[k, 2], ops_inv[k, 3]
        t0, t1 = ops_inv[k, 4], ops_inv[k, 5]
        hx = m00 * fx + m01 * fy + t0
        hy = m10 * fx + m11 * fy + t1
        hx -= np.floor(hx)
        hy -= np.floor(hy)
        for ox, oy in ((0.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (-1.0, -1.0)):
            gx = hx + ox
            gy = hy + oy
            if _inside_convex(gx, gy, poly):
                return k, gx, gy
    return -1, 0.0, 0.0


@njit(cache=True)
def _sample_bilinear(img, k, sx, sy):
    Hf, Wf = img.shape[1], img.shape[2]
    if sx < 0.0:
        sx = 0.0
    if sy < 0.0:
        sy = 0.0
    if sx > Wf - 1.0:
        sx = Wf - 1.0
    if sy > Hf - 1.0:
        sy = Hf - 1.0
    x0 = int(np.floor(sx))
    y0 = int(np.floor(sy))
    if x0 > Wf - 2:
        x0 = Wf - 2
    if y0 > Hf - 2:
        y0 = Hf - 2
    if x0 < 0:
        x0 = 0
    if y0 < 0:
        y0 = 0
    wx = sx - x0
    wy = sy - y0
    r = np.empty(3)
    for c in range(3):
        v00 = img[k, y0, x0, c]
        v01 = img[k, y0, x0 + 1, c]
        v10 = img[k, y0 + 1, x0, c]
        v11 = img[k, y0 + 1, x0 + 1, c]
        r[c] = (v00 * (1 - wx) * (1 - wy) + v01 * wx * (1 - wy)
                + v10 * (1 - wx) * wy + v11 * wx * wy)
    return r


@njit(cache=True)
def render_rgb(out, fd_stack, Binv, B, ops_inv, poly, anchor, origin, ss, bilinear):
    H, W = out.shape[0], out.shape[1]
    Hf, Wf = fd_stack.shape[1], fd_stack.shape[2]
    inv_ss2 = 1.0 / (ss * ss)
    for iy in range(H):
        for ix in range(W):
            acc0 = 0.0
            acc1 = 0.0
            acc2 = 0.0
            for sy in range(ss):
                for sx in range(ss):
                    px = ix + (sx + 0.5) / ss - 0.5 - origin[0]
                    py = iy + (sy + 0.5) / ss - 0.5 - origin[1]
                    fx = Binv[0, 0] * px + Binv[0, 1] * py
                    fy = Binv[1, 0] * px + Binv[1, 1] * py
                    fx -= np.floor(fx)
                    fy -= np.floor(fy)
                    k, gx, gy = _find_claim(fx, fy, ops_inv, poly)
                    if k < 0:
                        continue
                    qx = B[0, 0] * gx + B[0, 1] * gy - anchor[0]
                    qy = B[1, 0] * gx + B[1, 1] * gy - anchor[1]
                    if bilinear:
                        v = _sample_bilinear(fd_stack, k, qx, qy)
                        acc0 += v[0]
                        acc1 += v[1]
                        acc2 += v[2]
                    else:
                        ux = int(np.floor(qx + 0.5))
                        uy = int(np.floor(qy + 0.5))
                        if ux < 0:
                            ux = 0
                        if uy < 0:
                            uy = 0
                        if ux > Wf - 1:
                            ux = Wf - 1
                        if uy > Hf - 1:
                            uy = Hf - 1
                        acc0 += fd_stack[k, uy, ux, 0]
                        acc1 += fd_stack[k, uy, ux, 1]
                        acc2 += fd_stack[k, uy, ux, 2]
            out[iy, ix, 0] = acc0 * inv_ss2
            out[iy, ix, 1] = acc1 * inv_ss2
            out[iy, ix, 2] = acc2 * inv_ss2


@njit(cache=True)
def render_claim(claim, fdx, fdy, Binv, B, ops_inv, poly, anchor, origin):
    H, W = claim.shape[0], claim.shape[1]
    for iy in range(H):
        for ix in range(W):
            px = ix - origin[0]
            py = iy - origin[1]
            fx = Binv[0, 0] * px + Binv[0, 1] * py
            fy = Binv[1, 0] * px + Binv[1, 1] * py
            fx -= np.floor(fx)
            fy -= np.floor(fy)
            k, gx, gy = _find_claim(fx, fy, ops_inv, poly)
            claim[iy, ix] = k
            if k >= 0:
                fdx[iy, ix] = B[0, 0] * gx + B[0, 1] * gy - anchor[0]
                fdy[iy, ix] = B[1, 0] * gx + B[1, 1] * gy - anchor[1]
            else:
                fdx[iy, ix] = -1.0
                fdy[iy, ix] = -1.0


@njit(cache=True)
def mismatch_affine(img, L, t, stride, bilinear):
    """Returns (sum of |diff| over channels, overlap samples, total samples)."""
    H, W = img.shape[0], img.shape[1]
    total = 0
    count = 0
    acc = 0.0
    for iy in range(0, H, stride):
        for ix in range(0, W, stride):
            total += 1
            qx = L[0, 0] * ix + L[0, 1] * iy + t[0]
            qy = L[1, 0] * ix + L[1, 1] * iy + t[1]
            if qx < 0.0 or qy < 0.0 or qx > W - 1.0 or qy > H - 1.0:
                continue
            count += 1
            if bilinear:
                x0 = int(np.floor(qx))
                y0 = int(np.floor(qy))
                if x0 > W - 2:
                    x0 = W - 2
                if y0 > H - 2:
                    y0 = H - 2
                wx = qx - x0
                wy = qy - y0
                for c in range(3):
                    v = (img[y0, x0, c] * (1 - wx) * (1 - wy)
                         + img[y0, x0 + 1, c] * wx * (1 - wy)
                         + img[y0 + 1, x0, c] * (1 - wx) * wy
                         + img[y0 + 1, x0 + 1, c] * wx * wy)
                    acc += abs(img[iy, ix, c] - v)
            else:
                ux = int(np.floor(qx + 0.5))
                uy = int(np.floor(qy + 0.5))
                for c in range(3):
                    acc += abs(img[iy, ix, c] - img[uy, ux, c])
    return acc, count, total


@njit(cache=True, parallel=True)
def scan_affine(img, L, ts, stride, bilinear):
    """Batch mismatch over candidate translations sharing a linear part.

    Parallel over candidates; each candidate's accumulation stays serial,
    so results are deterministic."""
    N = ts.shape[0]
    scores = np.empty(N)
    overlaps = np.empty(N)
    for n in prange(N):
        acc, count, total = mismatch_affine(img, L, ts[n], stride, bilinear)
        if count == 0:
            scores[n] = 1.0
            overlaps[n] = 0.0
        else:
            scores[n] = acc / (3.0 * count)
            overlaps[n] = count / total
    return scores, overlaps
