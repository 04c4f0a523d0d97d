"""Deterministic CF gaps max_q |E e(qX) - exp(-t|q|^(nu+2)/2)| at t = 1, x0 = 0.

Used to judge whether the Monte Carlo convergence studies are plausible,
independently of the Rust samplers.

    python3 tools/reference_gaps.py sde 2 100 1000 10000
    python3 tools/reference_gaps.py ctrw 2 1000 10000 100000

sde:  finite-volume Fokker-Planck solve of dp/dt = 1/2 d/dx D_N dp/dx with
      D_N(x) = 1/(N^(-nu/(nu+2)) + |x|^nu) in rescaled units, implicit Euler
      with Richardson extrapolation on a geometric time grid.
ctrw: exact law of the walk with bond rates 1/(|n|^nu + |n+1|^nu) via a
      sparse matrix exponential, positions rescaled by N^(-1/(nu+2)).
"""
import sys

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spl
import scipy.special as sp
from scipy.sparse.linalg import expm_multiply


def plane_wave(nu, x):
    c = nu / 2 + 1
    beta = (nu + 1) / (nu + 2)
    u = sp.gamma(1 / (nu + 2)) * (nu + 2) ** (-beta)
    ax = np.abs(x)
    z = ax ** c / c
    a = u * ax ** ((nu + 1) / 2)
    with np.errstate(all="ignore"):
        re = np.where(ax > 0, a * sp.jv(-beta, z), 1.0)
        im = np.where(ax > 0, np.sign(x) * a * sp.jv(beta, z), 0.0)
    return re + 1j * im


QS = np.linspace(-2, 2, 41)


def max_gap(nu, x, mass):
    g = [abs(np.sum(mass * plane_wave(nu, q * x)) - np.exp(-abs(q) ** (nu + 2) / 2)) for q in QS]
    k = int(np.argmax(g))
    return g[k], QS[k]


def sde_law(nu, n, cells=2000, half_width=5.0, steps=3000, grading=2.0):
    eps = n ** (-nu / (nu + 2))
    r = np.linspace(-1, 1, 2 * cells + 1)
    xf = half_width * np.sign(r) * np.abs(r) ** grading
    xc = 0.5 * (xf[1:] + xf[:-1])
    dx = np.diff(xf)
    d = 1 / (eps + np.abs(xf[1:-1]) ** nu)
    g = 0.5 * d / np.diff(xc)
    main = np.zeros(len(xc))
    main[:-1] -= g
    main[1:] -= g
    op = (sps.diags([main, g, g], [0, 1, -1]) @ sps.diags(1 / dx)).tocsc()
    m = np.zeros(len(xc))
    m[cells] = m[cells - 1] = 0.5
    ts = np.concatenate([[0], np.geomspace(1e-9, 1, steps)])
    eye = sps.identity(len(xc), format="csc")
    for k in range(steps):
        h = ts[k + 1] - ts[k]
        a = spl.spsolve(eye - h * op, m)
        b = spl.spsolve(eye - 0.5 * h * op, spl.spsolve(eye - 0.5 * h * op, m))
        m = 2 * b - a
    return xc, m


def ctrw_law(nu, n):
    s = n ** (1 / (nu + 2))
    k = int(12 * s) + 20
    sites = np.arange(-k, k + 1)
    bond = 1 / (np.abs(sites) ** nu + np.abs(sites + 1) ** nu)
    up = bond.copy()
    up[-1] = 0
    down = np.concatenate([[0], bond[:-1]])
    gen = sps.diags([-(up + down), up[:-1], down[1:]], [0, -1, 1]).tocsc()
    p0 = np.zeros(len(sites))
    p0[k] = 1
    return sites / s, expm_multiply(gen * n, p0)


def main():
    kind, nu = sys.argv[1], float(sys.argv[2])
    for n in map(float, sys.argv[3:]):
        x, m = sde_law(nu, n) if kind == "sde" else ctrw_law(nu, n)
        gap, q = max_gap(nu, x, m)
        print(f"N={n:g} max_gap={gap:.6f} at q={q:.2f} mass={m.sum():.12f}", flush=True)


if __name__ == "__main__":
    main()
