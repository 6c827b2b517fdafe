#!/usr/bin/env python3
"""Generate a plain-text table of the first positive zeta-zero ordinates.

Low zeros come from mpmath.zetazero. Above that, zeros are located as sign
changes of the Riemann-Siegel Z function (main sum plus the C0, C1, C2
correction terms), bracketed inside Gram blocks and refined by vectorized
Illinois iteration. Each Gram block between consecutive good Gram points must
contain exactly as many zeros as Gram intervals (Rosser's rule, which holds
far beyond the heights produced here); blocks that come up short are
resampled on finer grids until the count matches.

Usage:
    python scripts/make_zero_table.py --count 100000 --out data/zeta_zeros_1e5.txt
"""
from __future__ import annotations

import argparse
import sys
import time

import mpmath
import numpy as np

MP_ZEROS = 200
TAYLOR_ORDER = 70


def _psi_taylor():
    mpmath.mp.dps = 40

    def psi(p):
        return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)

    coeffs = mpmath.taylor(psi, mpmath.mpf("0.5"), TAYLOR_ORDER)
    out = {}
    for k in (0, 2, 3, 6):
        c = list(coeffs)
        for _ in range(k):
            c = [c[i] * i for i in range(1, len(c))]
        out[k] = np.array([float(v) for v in c])[::-1]
    return out


_PSI = _psi_taylor()


def theta(t):
    return t / 2 * np.log(t / (2 * np.pi)) - t / 2 - np.pi / 8 + 1 / (48 * t) + 7 / (5760 * t**3)


def siegel_z(t):
    t = np.asarray(t, dtype=float)
    a = np.sqrt(t / (2 * np.pi))
    n_terms = np.floor(a).astype(np.int64)
    p = a - n_terms
    th = theta(t)
    s = np.zeros_like(t)
    for k in range(1, int(n_terms.max()) + 1):
        s += np.where(k <= n_terms, np.cos(th - t * np.log(k)) / np.sqrt(k), 0.0)
    q = p - 0.5
    c0 = np.polyval(_PSI[0], q)
    c1 = -np.polyval(_PSI[3], q) / (96 * np.pi**2)
    c2 = np.polyval(_PSI[2], q) / (64 * np.pi**2) + np.polyval(_PSI[6], q) / (18432 * np.pi**4)
    sign = np.where(n_terms % 2 == 1, 1.0, -1.0)
    return 2 * s + sign * a**-0.5 * (c0 + c1 / a + c2 / a**2)


def gram_points(n_lo, n_hi):
    n = np.arange(n_lo, n_hi + 1, dtype=float)
    target = n * np.pi
    g = 2 * np.pi * np.exp(1 + np.real(np.asarray([complex(mpmath.lambertw((8 * v + 1) / (8 * np.e))) for v in n])))
    for _ in range(6):
        g -= (theta(g) - target) / (0.5 * np.log(g / (2 * np.pi)))
    return n.astype(np.int64), g


def refine(lo, hi, flo, fhi, iters=60):
    """Vectorized Illinois iteration on brackets with flo*fhi < 0."""
    lo, hi, flo, fhi = lo.copy(), hi.copy(), flo.copy(), fhi.copy()
    side = np.zeros(lo.shape, dtype=np.int8)
    for _ in range(iters):
        x = (lo * fhi - hi * flo) / (fhi - flo)
        fx = siegel_z(x)
        left = np.sign(fx) == np.sign(flo)
        lo = np.where(left, x, lo)
        flo = np.where(left, fx, flo)
        hi = np.where(left, hi, x)
        fhi = np.where(left, fhi, fx)
        fhi = np.where(left & (side == 1), fhi / 2, fhi)
        flo = np.where(~left & (side == -1), flo / 2, flo)
        side = np.where(left, 1, -1).astype(np.int8)
        if np.all(hi - lo < 1e-11 * np.maximum(1.0, hi)):
            break
    return 0.5 * (lo + hi)


def bracket_blocks(g0, g1, expected, pts_per_zero=16, chunk=200_000):
    """Sign-change brackets for many Gram blocks at once.

    Returns (lo, hi, flo, fhi) arrays; a block is resampled 4x finer
    until it yields `expected` sign changes.
    """
    out = []
    todo = np.arange(len(g0))
    pts = pts_per_zero
    while len(todo):
        npts = pts * expected[todo]
        block = np.repeat(todo, npts + 1)
        start = np.concatenate([[0], np.cumsum(npts + 1)[:-1]])
        pos = np.arange(block.size) - np.repeat(start, npts + 1)
        t = g0[block] + (g1[block] - g0[block]) * pos / np.repeat(npts, npts + 1)
        z = np.concatenate([siegel_z(t[i:i + chunk]) for i in range(0, t.size, chunk)])
        change = (np.sign(z[:-1]) * np.sign(z[1:]) < 0) & (block[:-1] == block[1:])
        found = np.bincount(block[:-1][change], minlength=len(g0))
        ok = found[todo] == expected[todo]
        ok_blocks = todo[ok]
        sel = change & np.isin(block[:-1], ok_blocks)
        idx = np.nonzero(sel)[0]
        out.append((t[idx], t[idx + 1], z[idx], z[idx + 1]))
        todo = todo[~ok]
        pts *= 4
        if len(todo):
            print(f"resampling {len(todo)} Gram blocks at {pts} points per zero", file=sys.stderr)
        if pts > 1 << 14:
            raise RuntimeError(f"could not separate zeros in Gram blocks {todo[:10]}")
    return tuple(np.concatenate(parts) for parts in zip(*out))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--count", type=int, default=100_000)
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)

    t0 = time.time()
    mpmath.mp.dps = 25
    low = [float(mpmath.zetazero(n).imag) for n in range(1, MP_ZEROS + 1)]
    print(f"mpmath zeros 1..{MP_ZEROS}: {time.time() - t0:.1f}s", file=sys.stderr)

    # Gram point g_n separates zero n+1 from zero n+2 when Gram's law holds;
    # start blocks at the last good Gram point below zero number MP_ZEROS.
    n_hi = args.count + 50
    ns, g = gram_points(MP_ZEROS - 10, n_hi)
    zg = siegel_z(g)
    good = ((-1.0) ** ns) * zg > 0
    good_idx = np.nonzero(good)[0]
    start = good_idx[0]
    n_start = ns[start]
    kept = [v for v in low if v < g[start]]
    if len(kept) != n_start + 1:
        raise RuntimeError(f"mpmath zeros below g_{n_start} = {len(kept)}, expected {n_start + 1}")

    blocks = good_idx[good_idx >= start]
    expected = (ns[blocks[1:]] - ns[blocks[:-1]]).astype(np.int64)
    lo, hi, flo, fhi = bracket_blocks(g[blocks[:-1]], g[blocks[1:]], expected)
    if len(lo) != expected.sum():
        raise RuntimeError(f"found {len(lo)} zeros, Gram counting expects {expected.sum()}")
    print(f"bracketing: {time.time() - t0:.1f}s", file=sys.stderr)
    roots = refine(lo, hi, flo, fhi)
    allz = np.concatenate([np.array(kept), np.sort(roots)])[: args.count]
    if len(allz) < args.count or np.any(np.diff(allz) <= 0):
        raise RuntimeError("zero table incomplete or not increasing")
    print(f"refined: {time.time() - t0:.1f}s", file=sys.stderr)

    with open(args.out, "w") as fh:
        fh.write(f"# first {args.count} positive ordinates of nontrivial zeta zeros\n")
        fh.write(f"# n<= {MP_ZEROS}: mpmath.zetazero; above: Riemann-Siegel Z (C0..C2), Gram-block counted\n")
        for v in allz:
            fh.write(f"{v:.12f}\n")

    for n in (MP_ZEROS + 1, 1000, 10_000, 50_000, args.count):
        if n <= args.count:
            ref = float(mpmath.zetazero(n).imag)
            print(f"check n={n}: table={allz[n - 1]:.10f} mpmath={ref:.10f} diff={allz[n - 1] - ref:.2e}", file=sys.stderr)


if __name__ == "__main__":
    main()
