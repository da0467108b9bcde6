"""Pure numpy implementations of the compiled kernels (reference and fallback)."""

from __future__ import annotations

import numpy as np

_CHUNK = 2_000_000  # grid points per vectorized block


def geometry_tensor(p1, p2, xs, wx, ys, wy, zs, wz) -> np.ndarray:
    """Half the weighted sum of (p1-r)_i (p2-r)_j / (|p1-r|^3 |p2-r|^3)."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    Y, Z = np.meshgrid(ys, zs, indexing="ij")
    Wyz = np.outer(wy, wz).ravel()
    Y, Z = Y.ravel(), Z.ravel()
    step = max(1, _CHUNK // max(Y.size, 1))
    acc = np.zeros((3, 3))
    for start in range(0, len(xs), step):
        X = np.asarray(xs[start:start + step])[:, None]
        W = np.asarray(wx[start:start + step])[:, None] * Wyz[None, :]
        a1 = np.stack(np.broadcast_arrays(p1[0] - X, p1[1] - Y[None, :], p1[2] - Z[None, :]))
        a2 = np.stack(np.broadcast_arrays(p2[0] - X, p2[1] - Y[None, :], p2[2] - Z[None, :]))
        r1 = np.einsum("i...,i...->...", a1, a1)
        r2 = np.einsum("i...,i...->...", a2, a2)
        f = W / (r1 * np.sqrt(r1) * r2 * np.sqrt(r2))
        acc += (a1.reshape(3, -1) * f.ravel()) @ a2.reshape(3, -1).T
    return 0.5 * acc


def transverse_field(xobs, zobs, xs, wx, ys, wy, zs, wz, jy) -> np.ndarray:
    """Sum of jy * (zobs - z') / R^3 over source nodes, for points (xobs, 0, zobs)."""
    xobs = np.asarray(xobs, dtype=float)
    dz = zobs - np.asarray(zs)
    wxy = (np.asarray(wx)[:, None] * wy * jy)  # (nx, ny)
    ys2 = np.asarray(ys) ** 2
    out = np.empty(len(xobs))
    for o, xo in enumerate(xobs):
        dx2 = ((xo - np.asarray(xs)) ** 2)[:, None] + ys2  # (nx, ny)
        r2 = dx2[:, :, None] + dz[None, None, :] ** 2
        s = np.einsum("abc,c->ab", dz[None, None, :] / (r2 * np.sqrt(r2)), wz)
        out[o] = np.sum(wxy * s)
    return out
