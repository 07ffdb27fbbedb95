"""Compiled binary-collision kernel.

Lengths are nm and energies eV inside this module. Every particle draws its
random numbers from a counter-based stream keyed by (seed, ion index,
particle serial), so a chunk of ions gives the same result whichever thread
runs it.
"""

import math

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# MAGIC scattering constants for the ZBL potential
_C1, _C2, _C3, _C4, _C5 = 0.99229, 0.011615, 0.0071222, 9.3066, 14.813

STOPPED, BACKSCATTERED = 0, 1

_jit = nb.njit(cache=True, nogil=True)


@_jit
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@_jit
def stream_key(seed, ion_index, serial):
    k = mix64(np.uint64(seed) + _GOLDEN)
    k = mix64(k ^ (np.uint64(ion_index) * _GOLDEN + np.uint64(1)))
    return mix64(k ^ (np.uint64(serial) * _M2 + np.uint64(7)))


@_jit
def uniform(key, counter):
    """Open-interval uniform (0, 1) for draw number ``counter`` of stream ``key``."""
    # explicit cast: an int64 key would be promoted to float when mixed with uint64
    x = mix64(np.uint64(key) + np.uint64(counter + 1) * _GOLDEN)
    return ((x >> np.uint64(11)) + 0.5) * _INV53


@_jit
def _phi(x):
    return (0.18175 * math.exp(-3.1998 * x) + 0.50986 * math.exp(-0.94229 * x)
            + 0.28022 * math.exp(-0.4029 * x) + 0.028171 * math.exp(-0.20162 * x))


@_jit
def _dphi(x):
    return -(0.18175 * 3.1998 * math.exp(-3.1998 * x) + 0.50986 * 0.94229 * math.exp(-0.94229 * x)
             + 0.28022 * 0.4029 * math.exp(-0.4029 * x) + 0.028171 * 0.20162 * math.exp(-0.20162 * x))


@_jit
def closest_approach(eps, b):
    """Reduced distance of closest approach for the ZBL potential."""
    # unscreened Coulomb value bounds the root from above
    h = 0.5 / eps
    r = h + math.sqrt(h * h + b * b)
    for _ in range(60):
        phi = _phi(r)
        f = 1.0 - phi / (r * eps) - (b / r) ** 2
        fp = 2.0 * b * b / r**3 + (phi - r * _dphi(r)) / (eps * r * r)
        step = f / fp
        r_new = r - step
        if r_new <= 0.0:
            r_new = 0.5 * r
        if abs(r_new - r) <= 1e-12 * r:
            r = r_new
            break
        r = r_new
    return r


@_jit
def magic_cos_half_theta(eps, b):
    """cos(theta_cm / 2) from the Biersack-Haggmark MAGIC formula."""
    r = closest_approach(eps, b)
    phi = _phi(r)
    v = phi / r
    dv = (_dphi(r) * r - phi) / (r * r)
    rho = -2.0 * (eps - v) / dv
    sq = math.sqrt(eps)
    alpha = 1.0 + _C1 / sq
    beta = (_C2 + sq) / (_C3 + sq)
    gamma = (_C4 + eps) / (_C5 + eps)
    a = 2.0 * alpha * eps * b**beta
    g = gamma * (math.sqrt(1.0 + a * a) - a)
    delta = a * (r - b) * g / (1.0 + g)
    c = (b + rho + delta) / (r + rho)
    if c > 1.0:
        c = 1.0
    return c


@_jit
def nrt(t, e_d):
    if t < e_d:
        return 0.0
    if t < 2.0 * e_d / 0.8:
        return 1.0
    return 0.8 * t / (2.0 * e_d)


@_jit
def damage_energy(t, z, m):
    """Norgett-Robinson-Torrens damage energy of a recoil of energy t in its own lattice."""
    z23 = z ** (2.0 / 3.0)
    e_l = 30.724 * z * z * math.sqrt(2.0 * z23) * 2.0
    k = 0.1337 * z ** (1.0 / 6.0) * math.sqrt(z / m)
    eps = t / e_l
    g = eps + 0.40244 * eps**0.75 + 3.4008 * eps ** (1.0 / 6.0)
    return t / (1.0 + k * g)


@_jit
def _stopping(e, ln_e0, inv_dln, ln_s, lin_k):
    """Electronic stopping (eV/nm) from a uniform log-log table, or k*sqrt(E) when no table."""
    if ln_s.shape[0] == 0:
        return lin_k * math.sqrt(e)
    x = (math.log(e) - ln_e0) * inv_dln
    if x <= 0.0:
        return math.exp(ln_s[0]) * math.sqrt(e / math.exp(ln_e0))
    i = int(x)
    n = ln_s.shape[0]
    if i >= n - 1:
        return math.exp(ln_s[n - 1])
    w = x - i
    return math.exp(ln_s[i] * (1.0 - w) + ln_s[i + 1] * w)


@_jit
def _rotate(cz, psi, phi_az):
    """New polar direction cosine after deflection psi at azimuth phi_az."""
    sz = math.sqrt(max(0.0, 1.0 - cz * cz))
    c = cz * math.cos(psi) + sz * math.sin(psi) * math.cos(phi_az)
    if c > 1.0:
        c = 1.0
    elif c < -1.0:
        c = -1.0
    return c


@_jit
def _flight(e, z12e2_over_2ec_factor, gmass, t_min, se, n_nm3, l_min, frac):
    """Free-flight length (nm) for the current energy."""
    # impact parameter giving t_min for unscreened scattering; screening only lowers T(p)
    tmax = gmass * e
    l_e = frac * e / se if se > 0.0 else 1e30
    if tmax > t_min:
        p0 = z12e2_over_2ec_factor / e
        p = p0 * math.sqrt(tmax / t_min - 1.0)
        l_r = 1.0 / (math.pi * n_nm3 * p * p)
    else:
        l_r = 1e30
    length = min(l_r, l_e)
    if length < l_min:
        length = l_min
    return length


@_jit
def _track(e0, depth0, cz0, key, z1, m1, z2, m2, n_nm3, e_d, e_cut, t_min, frac,
           ln_e0, inv_dln, ln_s, lin_k, first_step_random, accumulate_vac,
           bin_w, vac, out, follow, partition, stack, nstack, serial_counter):
    """Transport one particle until it stops or leaves through the surface.

    out[0..3] = (electronic loss, nuclear transfer, residual energy, final depth),
    out[4] = status. Recoils are pushed onto ``stack`` when ``follow``.
    Returns the updated stack size.
    """
    a = 0.8854 * 0.0529177210903 / (z1**0.23 + z2**0.23)
    msum = m1 + m2
    eps_per_ev = m2 / msum * a / (z1 * z2 * 1.439964548)
    p0_num = z1 * z2 * 1.439964548 / (2.0 * m2 / msum)
    gmass = 4.0 * m1 * m2 / (msum * msum)
    l_min = n_nm3 ** (-1.0 / 3.0)
    nb_ = vac.shape[0]

    e = e0
    x = depth0
    cz = cz0
    e_el = 0.0
    e_nuc = 0.0
    status = STOPPED
    counter = 0
    first = first_step_random
    while e >= e_cut:
        se = _stopping(e, ln_e0, inv_dln, ln_s, lin_k)
        length = _flight(e, p0_num, gmass, t_min, se, n_nm3, l_min, frac)
        if first:
            length *= uniform(key, counter)
            counter += 1
            first = False
        pmax = 1.0 / math.sqrt(math.pi * n_nm3 * length)
        # midpoint electronic loss over the flight
        se_mid = _stopping(max(e - 0.5 * se * length, 0.5 * e), ln_e0, inv_dln, ln_s, lin_k)
        de = se_mid * length
        x += cz * length
        if x < 0.0:
            status = BACKSCATTERED
            # charge the whole flight; the particle leaves with the remainder
            if de > e:
                de = e
            e_el += de
            e -= de
            break
        if de >= e - e_cut:
            if de > e:
                de = e
            e_el += de
            e -= de
            break
        e_el += de
        e -= de

        u1 = uniform(key, counter)
        u2 = uniform(key, counter + 1)
        counter += 2
        p = pmax * math.sqrt(u1)
        eps = e * eps_per_ev
        c = magic_cos_half_theta(eps, p / a)
        s2 = 1.0 - c * c
        t = gmass * e * s2
        if t > e:
            t = e
        theta = 2.0 * math.acos(c)
        psi = math.atan2(math.sin(theta), m1 / m2 + math.cos(theta))
        phi_az = 2.0 * math.pi * u2
        cz_before = cz
        e -= t
        e_nuc += t
        cz = _rotate(cz, psi, phi_az)

        if accumulate_vac and t >= e_d:
            ib = int(x / bin_w)
            if ib >= nb_:
                ib = nb_ - 1
            if follow:
                replacement = (z1 == z2) and (e < e_d)
                if not replacement:
                    vac[ib] += 1.0
                if t >= e_cut and nstack < stack.shape[0]:
                    recoil_angle = 0.5 * (math.pi - theta)
                    stack[nstack, 0] = t
                    stack[nstack, 1] = x
                    stack[nstack, 2] = _rotate(cz_before, recoil_angle, phi_az + math.pi)
                    stack[nstack, 3] = float(serial_counter[0])
                    serial_counter[0] += 1
                    nstack += 1
            elif partition:
                vac[ib] += nrt(damage_energy(t, z2, m2), e_d)
            else:
                vac[ib] += nrt(t, e_d)
    out[0] = e_el
    out[1] = e_nuc
    out[2] = e
    out[3] = x
    out[4] = status
    return nstack


@_jit
def run_chunk(first_ion, n_ions, seed, e0, z1, m1, z2, m2, n_nm3, e_d, e_cut, t_min, frac,
              ln_e0, inv_dln, ln_s_ion, k_ion, ln_s_rec, k_rec, follow, partition, bin_w, n_bins,
              max_stack):
    """Simulate ions [first_ion, first_ion + n_ions).

    Returns (vacancy histogram, per-ion ledger). Ledger columns: electronic
    loss, nuclear transfer, residual energy, final depth (nm), status.
    """
    vac = np.zeros(n_bins)
    ledger = np.zeros((n_ions, 5))
    out = np.zeros(5)
    rec_out = np.zeros(5)
    stack = np.zeros((max_stack, 4))
    serial = np.zeros(1, dtype=np.int64)
    for i in range(n_ions):
        ion = first_ion + i
        serial[0] = 1
        key = stream_key(seed, ion, 0)
        nstack = _track(e0, 0.0, 1.0, key, z1, m1, z2, m2, n_nm3, e_d, e_cut, t_min, frac,
                        ln_e0, inv_dln, ln_s_ion, k_ion, True, True, bin_w, vac, out,
                        follow, partition, stack, 0, serial)
        ledger[i, :] = out
        # depth-first cascade; order fixed by the stack discipline
        while nstack > 0:
            nstack -= 1
            t = stack[nstack, 0]
            x0 = stack[nstack, 1]
            c0 = stack[nstack, 2]
            rkey = stream_key(seed, ion, np.int64(stack[nstack, 3]))
            nstack = _track(t, x0, c0, rkey, z2, m2, z2, m2, n_nm3, e_d, e_cut, t_min, frac,
                            ln_e0, inv_dln, ln_s_rec, k_rec, False, True, bin_w, vac,
                            rec_out, follow, partition, stack, nstack, serial)
    return vac, ledger
