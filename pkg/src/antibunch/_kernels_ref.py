"""Numpy reference implementation of the accumulation kernels.

Same contracts as the compiled extension in ``_kernels.pyx``; all outputs are
int64 counts so results are exact and independent of how frames are chunked
or partitioned across workers.
"""

import numpy as np


def _pair_window(shape, dr, dc):
    h, w = shape
    r0, r1 = max(0, -dr), h - max(0, dr)
    c0, c1 = max(0, -dc), w - max(0, dc)
    return r0, r1, c0, c1


def pair_products(frames, offsets, out):
    """Accumulate same-frame products of pixel pairs.

    frames  : (n, H, W) uint8 0/1
    offsets : (n_cfg, 2) int64 (drow, dcol) of the partner pixel
    out     : (n_cfg, H, W) int64, incremented in place; entry (g, r, c) gets
              sum_t frames[t, r, c] * frames[t, r+dr, c+dc] over anchors whose
              partner lies on the grid.
    """
    h, w = frames.shape[1:]
    for g in range(offsets.shape[0]):
        dr, dc = int(offsets[g, 0]), int(offsets[g, 1])
        r0, r1, c0, c1 = _pair_window((h, w), dr, dc)
        a = frames[:, r0:r1, c0:c1]
        b = frames[:, r0 + dr:r1 + dr, c0 + dc:c1 + dc]
        out[g, r0:r1, c0:c1] += (a & b).sum(axis=0, dtype=np.int64)


def _triple_window(shape, offs):
    h, w = shape
    r0 = max(0, -int(offs[:, 0].min()))
    r1 = h - max(0, int(offs[:, 0].max()))
    c0 = max(0, -int(offs[:, 1].min()))
    c1 = w - max(0, int(offs[:, 1].max()))
    return r0, r1, c0, c1


def triple_products(frames, offsets, out_triple, out_pairs):
    """Accumulate same-frame triple products and their three pairwise products.

    frames     : (n, H, W) uint8 0/1
    offsets    : (n_cfg, 3, 2) int64 pixel offsets of the three members
    out_triple : (n_cfg, H, W) int64, += sum_t a*b*c per anchor
    out_pairs  : (n_cfg, 3, H, W) int64, pair order (ab, ac, bc)
    """
    h, w = frames.shape[1:]
    for g in range(offsets.shape[0]):
        offs = offsets[g]
        r0, r1, c0, c1 = _triple_window((h, w), offs)
        views = [
            frames[:, r0 + int(dr):r1 + int(dr), c0 + int(dc):c1 + int(dc)]
            for dr, dc in offs
        ]
        ab = views[0] & views[1]
        out_pairs[g, 0, r0:r1, c0:c1] += ab.sum(axis=0, dtype=np.int64)
        out_pairs[g, 1, r0:r1, c0:c1] += (views[0] & views[2]).sum(axis=0, dtype=np.int64)
        out_pairs[g, 2, r0:r1, c0:c1] += (views[1] & views[2]).sum(axis=0, dtype=np.int64)
        out_triple[g, r0:r1, c0:c1] += (ab & views[2]).sum(axis=0, dtype=np.int64)


def pixel_sums(frames, out):
    """out (H, W) int64 += per-pixel event counts."""
    out += frames.sum(axis=0, dtype=np.int64)
