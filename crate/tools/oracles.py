"""High-precision reference values frozen into the Rust tests.

Run with `python3 tools/oracles.py`; prints Rust constant lines.
Everything here is evaluated with mpmath at 40 significant digits,
independently of the Rust implementation.
"""
import mpmath as mp

mp.mp.dps = 40


def e_nu(nu, x):
    nu = mp.mpf(nu)
    x = mp.mpf(x)
    if x == 0:
        return mp.mpc(1, 0)
    beta = (nu + 1) / (nu + 2)
    c = nu / 2 + 1
    u = mp.gamma(1 / (nu + 2)) * (nu + 2) ** (-beta)
    z = abs(x) ** c / c
    amp = u * abs(x) ** ((nu + 1) / 2)
    return mp.mpc(amp * mp.besselj(-beta, z), mp.sign(x) * amp * mp.besselj(beta, z))


def n_nu(nu):
    nu = mp.mpf(nu)
    beta = (nu + 1) / (nu + 2)
    return 2 ** beta * mp.gamma(1 / (nu + 2)) * (nu + 2) ** (-nu / (nu + 2))


def phi(nu, t, x, xp):
    nu, t, x, xp = (mp.mpf(v) for v in (nu, t, x, xp))
    beta = (nu + 1) / (nu + 2)
    c = nu / 2 + 1
    if x == 0 or xp == 0:
        y = xp if x == 0 else x
        return mp.exp(-abs(y) ** (nu + 2) / (2 * t * c * c)) / (n_nu(nu) * t ** (1 / (nu + 2)))
    z = abs(x * xp) ** c / (t * c * c)
    s = mp.sign(x * xp)
    pref = abs(x * xp) ** ((nu + 1) / 2) / (t * (nu + 2))
    damp = mp.exp(-(abs(x) ** (nu + 2) + abs(xp) ** (nu + 2)) / (2 * t * c * c))
    return pref * damp * (mp.besseli(-beta, z) + s * mp.besseli(beta, z))


def show(name, v):
    print(f"pub const {name}: f64 = {mp.nstr(v, 20)};")


show("GAMMA_QUARTER", mp.gamma(mp.mpf(1) / 4))
show("GAMMA_THIRTY", mp.gamma(30))
show("GAMMA_0_05", mp.gamma(mp.mpf("0.05")))
show("GAMMA_NEG_2_5", mp.gamma(mp.mpf("-2.5")))
show("J_3_4_AT_7_3", mp.besselj(mp.mpf(3) / 4, mp.mpf("7.3")))
show("J_NEG_1_3_AT_2", mp.besselj(-mp.mpf(1) / 3, 2))
show("J_3_4_AT_1E3", mp.besselj(mp.mpf(3) / 4, 1000))
show("J_NEG_3_4_AT_1E4", mp.besselj(-mp.mpf(3) / 4, 10000))
show("J_0_2_AT_20", mp.besselj(mp.mpf("0.2"), 20))
show("I_SCALED_NEG_3_4_AT_50", mp.exp(-50) * mp.besseli(-mp.mpf(3) / 4, 50))
show("I_SCALED_0_6_AT_3", mp.exp(-3) * mp.besseli(mp.mpf("0.6"), 3))
show("I_SCALED_NEG_0_9_AT_0_01", mp.exp(-mp.mpf("0.01")) * mp.besseli(-mp.mpf("0.9"), mp.mpf("0.01")))
show("I_SCALED_0_75_AT_1E6", mp.exp(-1000000) * mp.besseli(mp.mpf(3) / 4, 1000000))
v = e_nu(2, 1)
show("E2_AT_1_RE", v.real)
show("E2_AT_1_IM", v.imag)
v = e_nu(1, 2)
show("E1_AT_2_RE", v.real)
show("E1_AT_2_IM", v.imag)
v = e_nu(3, -1.4)
show("E3_AT_NEG_1_4_RE", v.real)
show("E3_AT_NEG_1_4_IM", v.imag)
v = e_nu(0.5, 30)
show("E05_AT_30_RE", v.real)
show("E05_AT_30_IM", v.imag)
show("N_NU_2", n_nu(2))
show("PHI_2_1_0_0", phi(2, 1, 0, 0))
show("PHI_1_05_1_NEG1", phi(1, 0.5, 1, -1))
show("PHI_2_1_07_12", phi(2, 1, 0.7, 1.2))
show("PHI_3_02_NEG05_NEG08", phi(3, 0.2, -0.5, -0.8))
show("PHI_05_2_3_NEG2", phi(0.5, 2, 3, -2))
show("PHI_1_001_2_2", phi(1, 0.01, 2, 2))


def kolmogorov_tail(lam):
    lam = mp.mpf(lam)
    return 2 * mp.nsum(lambda k: (-1) ** (k - 1) * mp.exp(-2 * k * k * lam * lam), [1, mp.inf])


def u_nu(nu):
    nu = mp.mpf(nu)
    return mp.gamma(1 / (nu + 2)) * (nu + 2) ** (-(nu + 1) / (nu + 2))


show("KS_TAIL_0_6", kolmogorov_tail("0.6"))
show("KS_TAIL_1", kolmogorov_tail(1))
show("KS_TAIL_1_8", kolmogorov_tail("1.8"))
show("U_NU_1", u_nu(1))
show("U_NU_0_5", u_nu("0.5"))
