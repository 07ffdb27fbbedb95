"""Independent high-precision evaluations used as frozen test expectations.

Nothing here imports nvforge. Each value is computed from first principles
with mpmath (or direct quadrature) and printed; the numbers are copied into
the test suite.
"""

import mpmath as mp

mp.mp.dps = 40

H = mp.mpf("6.62607015e-34")
KB = mp.mpf("1.380649e-23")
HBAR = H / (2 * mp.pi)
EPS0 = mp.mpf("8.8541878128e-12")
C = mp.mpf(299792458)


def raman(lam_nm, shift_cm):
    return 1 / (1 / (lam_nm * mp.mpf("1e-7")) - shift_cm) * mp.mpf("1e7")


def thermal(nu, t):
    return mp.exp(-H * nu / (KB * t))


def dipole(t1, lam, f12):
    omega = 2 * mp.pi * C / lam
    return mp.sqrt(3 * mp.pi * EPS0 * HBAR * C**3 * f12 / (t1 * omega**3))


def branching(d, t1, lam):
    return mp.findroot(lambda f: dipole(t1, lam, f) - d, mp.mpf("0.04"))


# ZBL universal screening
_ZC = [mp.mpf(x) for x in ("0.18175", "0.50986", "0.28022", "0.028171")]
_ZD = [mp.mpf(x) for x in ("3.1998", "0.94229", "0.4029", "0.20162")]


def phi(x):
    return sum(c * mp.exp(-d * x) for c, d in zip(_ZC, _ZD))


def cos_half_theta(eps, b):
    """Exact classical CM scattering angle for the ZBL potential, as cos(theta/2)."""
    eps, b = mp.mpf(eps), mp.mpf(b)
    g = lambda r: 1 - phi(r) / (r * eps) - (b / r) ** 2  # noqa: E731
    hi = 0.5 / eps + mp.sqrt((0.5 / eps) ** 2 + b * b)  # unscreened root bounds it
    lo = hi / 2
    while g(lo) > 0:
        lo /= 2
    r0 = mp.findroot(g, (lo, hi), solver="anderson")
    # theta = pi - 2 b int_r0^inf dr / (r^2 sqrt(g)); substitute r = r0 / u
    integrand = lambda u: 1 / mp.sqrt(g(r0 / u))  # noqa: E731
    theta = mp.pi - 2 * b / r0 * mp.quad(integrand, [0, mp.mpf("0.5"), 1])
    return mp.cos(theta / 2)


if __name__ == "__main__":
    print("raman 532/1332", mp.nstr(raman(532, 1332), 15))
    print("raman 632.8/1332", mp.nstr(raman(mp.mpf("632.8"), 1332), 15))
    print("thermal 15.3THz 300K", mp.nstr(thermal(mp.mpf("15.3e12"), 300), 15))
    print("log10 thermal 15.3THz 4K", mp.nstr(mp.log10(thermal(mp.mpf("15.3e12"), 4)), 15))
    print("dipole f12=0.04", mp.nstr(dipole(mp.mpf("12e-9"), mp.mpf("638e-9"), mp.mpf("0.04")), 15))
    print("f12 for d=5.5e-30", mp.nstr(branching(mp.mpf("5.5e-30"), mp.mpf("12e-9"), mp.mpf("638e-9")), 15))
    print("brewster 2.4", mp.nstr(mp.degrees(mp.atan(mp.mpf("2.4"))), 15))
    print("dnu 638/0.66", mp.nstr(C * mp.mpf("0.66e-9") / mp.mpf("638e-9") ** 2, 15))
    print("dnu 638/2.7", mp.nstr(C * mp.mpf("2.7e-9") / mp.mpf("638e-9") ** 2, 15))
    for eps, b in [(0.01, 1.0), (0.1, 0.5), (0.1, 2.0), (1.0, 0.2), (1.0, 1.0), (10.0, 0.1), (10.0, 1.0)]:
        print("zbl cos(theta/2)", eps, b, mp.nstr(cos_half_theta(eps, b), 12))
