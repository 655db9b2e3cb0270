"""Pure-numpy fallbacks for the hot kernels (see _kernels_numba for the
semantics contract).  Vectorized over pixels; op priority is preserved by
claiming in op order and masking already-claimed pixels."""

import numpy as np

_OFFS = ((0.0, 0.0), (-1.0, 0.0), (0.0, -1.0), (-1.0, -1.0))


def _inside_convex_vec(pts, poly):
    ok = np.ones(len(pts), dtype=bool)
    n = len(poly)
    for i in range(n):
        a = poly[i]
        b = poly[(i + 1) % n]
        cross = (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])
        ok &= cross >= -1e-9
    return ok


def _claim_pixels(frac, ops_inv, poly):
    """Per row of frac: claiming op index (or -1) and folded FD coords."""
    n = len(frac)
    claim = np.full(n, -1, dtype=np.int64)
    hx = np.zeros(n)
    hy = np.zeros(n)
    todo = np.ones(n, dtype=bool)
    for k in range(len(ops_inv)):
        if not todo.any():
            break
        m = ops_inv[k]
        gx = m[0] * frac[:, 0] + m[1] * frac[:, 1] + m[4]
        gy = m[2] * frac[:, 0] + m[3] * frac[:, 1] + m[5]
        gx -= np.floor(gx)
        gy -= np.floor(gy)
        for ox, oy in _OFFS:
            if not todo.any():
                break
            cand = np.stack([gx + ox, gy + oy], axis=1)
            hit = todo & _inside_convex_vec(cand, poly)
            claim[hit] = k
            hx[hit] = cand[hit, 0]
            hy[hit] = cand[hit, 1]
            todo &= ~hit
    return claim, hx, hy


def _sample_stack(fd_stack, k, sx, sy, bilinear):
    K, Hf, Wf, _ = fd_stack.shape
    sx = np.clip(sx, 0.0, Wf - 1.0)
    sy = np.clip(sy, 0.0, Hf - 1.0)
    if bilinear:
        x0 = np.clip(np.floor(sx).astype(np.int64), 0, Wf - 2)
        y0 = np.clip(np.floor(sy).astype(np.int64), 0, Hf - 2)
        wx = (sx - x0)[:, None]
        wy = (sy - y0)[:, None]
        v00 = fd_stack[k, y0, x0]
        v01 = fd_stack[k, y0, x0 + 1]
        v10 = fd_stack[k, y0 + 1, x0]
        v11 = fd_stack[k, y0 + 1, x0 + 1]
        return (v00 * (1 - wx) * (1 - wy) + v01 * wx * (1 - wy)
                + v10 * (1 - wx) * wy + v11 * wx * wy)
    ux = np.clip(np.floor(sx + 0.5).astype(np.int64), 0, Wf - 1)
    uy = np.clip(np.floor(sy + 0.5).astype(np.int64), 0, Hf - 1)
    return fd_stack[k, uy, ux]


def render_rgb(out, fd_stack, Binv, B, ops_inv, poly, anchor, origin, ss, bilinear):
    H, W = out.shape[:2]
    ys, xs = np.mgrid[0:H, 0:W]
    xs = xs.ravel().astype(float)
    ys = ys.ravel().astype(float)
    acc = np.zeros((H * W, 3))
    for sy in range(ss):
        for sx in range(ss):
            px = xs + (sx + 0.5) / ss - 0.5 - origin[0]
            py = ys + (sy + 0.5) / ss - 0.5 - origin[1]
            fx = Binv[0, 0] * px + Binv[0, 1] * py
            fy = Binv[1, 0] * px + Binv[1, 1] * py
            frac = np.stack([fx - np.floor(fx), fy - np.floor(fy)], axis=1)
            claim, hx, hy = _claim_pixels(frac, ops_inv, poly)
            qx = B[0, 0] * hx + B[0, 1] * hy - anchor[0]
            qy = B[1, 0] * hx + B[1, 1] * hy - anchor[1]
            for k in range(len(ops_inv)):
                sel = claim == k
                if not sel.any():
                    continue
                acc[sel] += _sample_stack(fd_stack, k, qx[sel], qy[sel], bilinear)
    out[:] = (acc / (ss * ss)).reshape(H, W, 3)


def render_claim(claim, fdx, fdy, Binv, B, ops_inv, poly, anchor, origin):
    H, W = claim.shape
    ys, xs = np.mgrid[0:H, 0:W]
    px = xs.ravel() - origin[0]
    py = ys.ravel() - origin[1]
    fx = Binv[0, 0] * px + Binv[0, 1] * py
    fy = Binv[1, 0] * px + Binv[1, 1] * py
    frac = np.stack([fx - np.floor(fx), fy - np.floor(fy)], axis=1)
    c, hx, hy = _claim_pixels(frac, ops_inv, poly)
    qx = np.where(c >= 0, B[0, 0] * hx + B[0, 1] * hy - anchor[0], -1.0)
    qy = np.where(c >= 0, B[1, 0] * hx + B[1, 1] * hy - anchor[1], -1.0)
    claim[:] = c.reshape(H, W)
    fdx[:] = qx.reshape(H, W)
    fdy[:] = qy.reshape(H, W)


def mismatch_affine(img, L, t, stride, bilinear):
    H, W = img.shape[:2]
    ys, xs = np.mgrid[0:H:stride, 0:W:stride]
    xs = xs.ravel().astype(float)
    ys = ys.ravel().astype(float)
    total = len(xs)
    qx = L[0, 0] * xs + L[0, 1] * ys + t[0]
    qy = L[1, 0] * xs + L[1, 1] * ys + t[1]
    ok = (qx >= 0.0) & (qy >= 0.0) & (qx <= W - 1.0) & (qy <= H - 1.0)
    count = int(ok.sum())
    if count == 0:
        return 0.0, 0, total
    xs, ys, qx, qy = xs[ok], ys[ok], qx[ok], qy[ok]
    src = img[ys.astype(np.int64), xs.astype(np.int64)].astype(float)
    if bilinear:
        x0 = np.clip(np.floor(qx).astype(np.int64), 0, W - 2)
        y0 = np.clip(np.floor(qy).astype(np.int64), 0, H - 2)
        wx = (qx - x0)[:, None]
        wy = (qy - y0)[:, None]
        dst = (img[y0, x0] * (1 - wx) * (1 - wy) + img[y0, x0 + 1] * wx * (1 - wy)
               + img[y0 + 1, x0] * (1 - wx) * wy + img[y0 + 1, x0 + 1] * wx * wy)
    else:
        ux = np.floor(qx + 0.5).astype(np.int64)
        uy = np.floor(qy + 0.5).astype(np.int64)
        dst = img[uy, ux].astype(float)
    acc = float(np.abs(src - dst).sum())
    return acc, count, total


def scan_affine(img, L, ts, stride, bilinear):
    N = len(ts)
    scores = np.empty(N)
    overlaps = np.empty(N)
    for n in range(N):
        acc, count, total = mismatch_affine(img, L, ts[n], stride, bilinear)
        if count == 0:
            scores[n] = 1.0
            overlaps[n] = 0.0
        else:
            scores[n] = acc / (3.0 * count)
            overlaps[n] = count / total
    return scores, overlaps
