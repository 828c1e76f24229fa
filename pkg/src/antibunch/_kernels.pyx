# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled accumulation kernels.

Contracts match ``_kernels_ref.py``: int64 count accumulators updated in
place, one fused pass over each frame so all configurations share the memory
traffic.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t


def pair_products(const uint8_t[:, :, ::1] frames,
                  const int64_t[:, ::1] offsets,
                  int64_t[:, :, ::1] out):
    cdef Py_ssize_t n = frames.shape[0], h = frames.shape[1], w = frames.shape[2]
    cdef Py_ssize_t ncfg = offsets.shape[0]
    cdef Py_ssize_t t, g, r, c, r0, r1, c0, c1
    cdef int64_t dr, dc
    with nogil:
        for t in range(n):
            for g in range(ncfg):
                dr = offsets[g, 0]
                dc = offsets[g, 1]
                r0 = -dr if dr < 0 else 0
                r1 = h - dr if dr > 0 else h
                c0 = -dc if dc < 0 else 0
                c1 = w - dc if dc > 0 else w
                for r in range(r0, r1):
                    for c in range(c0, c1):
                        if frames[t, r, c]:
                            out[g, r, c] += frames[t, r + dr, c + dc]


def triple_products(const uint8_t[:, :, ::1] frames,
                    const int64_t[:, :, ::1] offsets,
                    int64_t[:, :, ::1] out_triple,
                    int64_t[:, :, :, ::1] out_pairs):
    cdef Py_ssize_t n = frames.shape[0], h = frames.shape[1], w = frames.shape[2]
    cdef Py_ssize_t ncfg = offsets.shape[0]
    cdef Py_ssize_t t, g, r, c, r0, r1, c0, c1
    cdef int64_t rmin, rmax, cmin, cmax
    cdef int64_t ar, ac, br, bc, cr, cc
    cdef uint8_t va, vb, vc
    with nogil:
        for t in range(n):
            for g in range(ncfg):
                ar = offsets[g, 0, 0]; ac = offsets[g, 0, 1]
                br = offsets[g, 1, 0]; bc = offsets[g, 1, 1]
                cr = offsets[g, 2, 0]; cc = offsets[g, 2, 1]
                rmin = min(ar, min(br, cr)); rmax = max(ar, max(br, cr))
                cmin = min(ac, min(bc, cc)); cmax = max(ac, max(bc, cc))
                r0 = -rmin if rmin < 0 else 0
                r1 = h - rmax if rmax > 0 else h
                c0 = -cmin if cmin < 0 else 0
                c1 = w - cmax if cmax > 0 else w
                for r in range(r0, r1):
                    for c in range(c0, c1):
                        va = frames[t, r + ar, c + ac]
                        vb = frames[t, r + br, c + bc]
                        vc = frames[t, r + cr, c + cc]
                        if va:
                            if vb:
                                out_pairs[g, 0, r, c] += 1
                                if vc:
                                    out_triple[g, r, c] += 1
                            if vc:
                                out_pairs[g, 1, r, c] += 1
                        if vb and vc:
                            out_pairs[g, 2, r, c] += 1


def pixel_sums(const uint8_t[:, :, ::1] frames, int64_t[:, ::1] out):
    cdef Py_ssize_t n = frames.shape[0], h = frames.shape[1], w = frames.shape[2]
    cdef Py_ssize_t t, r, c
    with nogil:
        for t in range(n):
            for r in range(h):
                for c in range(w):
                    out[r, c] += frames[t, r, c]
