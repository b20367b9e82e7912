"""Compiled Dormand-Prince 5(4) stepper with dense output.

Private numerical core behind :mod:`alleepatch.flow`.  Everything here is
numba-compiled; the public modules wrap these kernels with validated,
array-free interfaces.  The state is always the full 4-vector; subsystems are
realized by a 0/1 mask that zeroes pinned derivative components.

Status codes returned by the kernels:
  0  reached t_end
  1  stopped after max_crossings section crossings
 -1  step-size underflow
 -2  accepted-step budget exhausted
"""

import numpy as np
from numba import njit

# Dormand-Prince 5(4) tableau (FSAL).
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                                49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                                -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)
# Dense-output weights (order-4 interpolant).
_D1 = -12715105075.0 / 11282082432.0
_D3 = 87487479700.0 / 32700410799.0
_D4 = -10690763975.0 / 1880347072.0
_D5 = 701980252875.0 / 199316789632.0
_D6 = -1453857185.0 / 822651844.0
_D7 = 69997945.0 / 29380423.0

_CLIP = -1e-12


@njit(cache=True)
def rhs4(y, pars, mask, out):
    """Full two-patch field; pars = (a1,a2,g1,g2,m1,m2,l1,l2,b1,b2)."""
    a1, a2, g1, g2, m1, m2, l1, l2, b1, b2 = (
        pars[0], pars[1], pars[2], pars[3], pars[4],
        pars[5], pars[6], pars[7], pars[8], pars[9])
    u1, v1, u2, v2 = y[0], y[1], y[2], y[3]
    out[0] = (b1 * u1 * (u1 - l1) * (1.0 - u1) - u1 * v1 + a1 * (u2 - u1)) * mask[0]
    out[1] = (g1 * v1 * (u1 - m1)) * mask[1]
    out[2] = (b2 * u2 * (u2 - l2) * (1.0 - u2) + a2 * (u1 - u2) - u2 * v2) * mask[2]
    out[3] = (g2 * v2 * (u2 - m2)) * mask[3]


@njit(cache=True)
def jac4(y, pars, mask, out):
    """Jacobian of the masked field (rows and columns of pinned coords zeroed)."""
    a1, a2, g1, g2, m1, m2, l1, l2, b1, b2 = (
        pars[0], pars[1], pars[2], pars[3], pars[4],
        pars[5], pars[6], pars[7], pars[8], pars[9])
    u1, v1, u2, v2 = y[0], y[1], y[2], y[3]
    for i in range(4):
        for j in range(4):
            out[i, j] = 0.0
    out[0, 0] = b1 * (-3.0 * u1 * u1 + 2.0 * (1.0 + l1) * u1 - l1) - v1 - a1
    out[0, 1] = -u1
    out[0, 2] = a1
    out[1, 0] = g1 * v1
    out[1, 1] = g1 * (u1 - m1)
    out[2, 0] = a2
    out[2, 2] = b2 * (-3.0 * u2 * u2 + 2.0 * (1.0 + l2) * u2 - l2) - v2 - a2
    out[2, 3] = -u2
    out[3, 2] = g2 * v2
    out[3, 3] = g2 * (u2 - m2)
    for i in range(4):
        if mask[i] == 0.0:
            for j in range(4):
                out[i, j] = 0.0
                out[j, i] = 0.0


@njit(cache=True)
def _error_norm(err, y0, y1, rtol, atol):
    s = 0.0
    for i in range(4):
        sc = atol + rtol * max(abs(y0[i]), abs(y1[i]))
        e = err[i] / sc
        s += e * e
    return np.sqrt(s / 4.0)


@njit(cache=True)
def _initial_step(y0, f0, rtol, atol, t_span):
    d0 = 0.0
    d1 = 0.0
    for i in range(4):
        sc = atol + rtol * abs(y0[i])
        d0 += (y0[i] / sc) ** 2
        d1 += (f0[i] / sc) ** 2
    d0 = np.sqrt(d0 / 4.0)
    d1 = np.sqrt(d1 / 4.0)
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    return min(h, 0.1 * t_span)


@njit(cache=True)
def _dense_eval(theta, h, y0, r2, r3, r4, r5, out):
    for i in range(4):
        out[i] = y0[i] + theta * (r2[i] + (1.0 - theta) * (
            r3[i] + theta * (r4[i] + (1.0 - theta) * r5[i])))


@njit(cache=True)
def integrate_core(y0, pars, mask, t0, t_end, rtol, atol,
                   max_steps, store_every,
                   sec_idx, sec_level, sec_dir, max_crossings, cross_t_min,
                   t_grid):
    """Adaptive DOPRI5(4) run over [t0, t_end].

    sec_idx < 0 disables section detection; sec_dir in {-1, +1} selects the
    crossing direction of coordinate sec_idx through sec_level.  Crossing
    times are refined by bisection on the dense interpolant.  t_grid (sorted,
    possibly empty) requests dense samples.
    """
    y = y0.copy()
    t = t0
    f0 = np.zeros(4)
    rhs4(y, pars, mask, f0)
    nrhs = 1
    h = _initial_step(y, f0, rtol, atol, t_end - t0)

    n_store_cap = 2 + (max_steps // store_every if store_every > 0 else 0)
    ts = np.empty(n_store_cap)
    ys = np.empty((n_store_cap, 4))
    ts[0] = t
    ys[0] = y
    nstored = 1

    cross_t = np.empty(max_crossings if max_crossings > 0 else 1)
    cross_y = np.empty((max_crossings if max_crossings > 0 else 1, 4))
    ncross = 0

    grid_y = np.empty((t_grid.shape[0], 4))
    igrid = 0
    while igrid < t_grid.shape[0] and t_grid[igrid] <= t0:
        grid_y[igrid] = y
        igrid += 1

    k2 = np.zeros(4)
    k3 = np.zeros(4)
    k4 = np.zeros(4)
    k5 = np.zeros(4)
    k6 = np.zeros(4)
    k7 = np.zeros(4)
    ynew = np.empty(4)
    ytmp = np.empty(4)
    err = np.empty(4)
    r2 = np.empty(4)
    r3 = np.empty(4)
    r4 = np.empty(4)
    r5 = np.empty(4)
    ydense = np.empty(4)

    nacc = 0
    nrej = 0
    status = 0
    while t < t_end:
        if h < 1e-14 * max(1.0, abs(t)):
            status = -1
            break
        if nacc >= max_steps:
            status = -2
            break
        if t + h > t_end:
            h = t_end - t

        for i in range(4):
            ytmp[i] = y[i] + h * _A21 * f0[i]
        rhs4(ytmp, pars, mask, k2)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A31 * f0[i] + _A32 * k2[i])
        rhs4(ytmp, pars, mask, k3)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A41 * f0[i] + _A42 * k2[i] + _A43 * k3[i])
        rhs4(ytmp, pars, mask, k4)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A51 * f0[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        rhs4(ytmp, pars, mask, k5)
        for i in range(4):
            ytmp[i] = y[i] + h * (_A61 * f0[i] + _A62 * k2[i] + _A63 * k3[i]
                                  + _A64 * k4[i] + _A65 * k5[i])
        rhs4(ytmp, pars, mask, k6)
        for i in range(4):
            ynew[i] = y[i] + h * (_B1 * f0[i] + _B3 * k3[i] + _B4 * k4[i]
                                  + _B5 * k5[i] + _B6 * k6[i])
        rhs4(ynew, pars, mask, k7)
        nrhs += 6
        for i in range(4):
            err[i] = h * (_E1 * f0[i] + _E3 * k3[i] + _E4 * k4[i]
                          + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
        enorm = _error_norm(err, y, ynew, rtol, atol)
        if enorm > 1.0:
            nrej += 1
            h *= max(0.2, 0.9 * enorm ** -0.2)
            continue

        # accepted: dense coefficients for this step
        for i in range(4):
            r2[i] = ynew[i] - y[i]
            r3[i] = h * f0[i] - r2[i]
            r4[i] = r2[i] - h * k7[i] - r3[i]
            r5[i] = h * (_D1 * f0[i] + _D3 * k3[i] + _D4 * k4[i]
                         + _D5 * k5[i] + _D6 * k6[i] + _D7 * k7[i])

        tnew = t + h
        # section crossing inside (t, tnew]
        if sec_idx >= 0 and ncross < max_crossings and tnew > cross_t_min:
            g0 = y[sec_idx] - sec_level
            g1 = ynew[sec_idx] - sec_level
            if (g0 * g1 < 0.0) and (sec_dir * (g1 - g0) > 0.0):
                lo = 0.0
                hi = 1.0
                for _ in range(80):
                    mid = 0.5 * (lo + hi)
                    _dense_eval(mid, h, y, r2, r3, r4, r5, ydense)
                    gm = ydense[sec_idx] - sec_level
                    if gm * g0 <= 0.0:
                        hi = mid
                    else:
                        lo = mid
                mid = 0.5 * (lo + hi)
                _dense_eval(mid, h, y, r2, r3, r4, r5, ydense)
                tc = t + mid * h
                if tc >= cross_t_min:
                    cross_t[ncross] = tc
                    for i in range(4):
                        cross_y[ncross, i] = ydense[i]
                    cross_y[ncross, sec_idx] = sec_level
                    ncross += 1
                    if ncross >= max_crossings:
                        # finish this step, then stop
                        status = 1

        # grid samples inside (t, tnew]
        while igrid < t_grid.shape[0] and t_grid[igrid] <= tnew:
            theta = (t_grid[igrid] - t) / h
            _dense_eval(theta, h, y, r2, r3, r4, r5, ydense)
            for i in range(4):
                gv = ydense[i]
                if _CLIP < gv < 0.0:
                    gv = 0.0
                grid_y[igrid, i] = gv
            igrid += 1

        t = tnew
        for i in range(4):
            yi = ynew[i]
            if _CLIP < yi < 0.0:
                yi = 0.0
            y[i] = yi
            f0[i] = k7[i]
        # FSAL derivative is stale if clipping changed the state
        if y[0] != ynew[0] or y[1] != ynew[1] or y[2] != ynew[2] or y[3] != ynew[3]:
            rhs4(y, pars, mask, f0)
            nrhs += 1
        nacc += 1
        if store_every > 0 and (nacc % store_every == 0):
            ts[nstored] = t
            ys[nstored] = y
            nstored += 1
        if status == 1:
            break
        h *= min(5.0, max(0.2, 0.9 * enorm ** -0.2)) if enorm > 0.0 else 5.0

    if ts[nstored - 1] != t:
        ts[nstored] = t
        ys[nstored] = y
        nstored += 1

    return (status, ts[:nstored], ys[:nstored], nacc, nrej, nrhs,
            cross_t[:ncross], cross_y[:ncross], grid_y[:igrid])


@njit(cache=True)
def benettin_core(y0, pars, mask, t0, horizon, renorm_dt, rtol, atol, max_steps_per_leg):
    """Largest-Lyapunov tangent run with periodic renormalization.

    Integrates the 4D state together with a tangent vector (variational
    equations), renormalizing the tangent every renorm_dt time units.
    Returns the per-leg log growth factors.
    """
    nlegs = int(horizon / renorm_dt)
    logs = np.empty(nlegs)
    y = y0.copy()
    w = np.zeros(4)
    # tangent seeded in the active directions
    nact = 0.0
    for i in range(4):
        w[i] = mask[i]
        nact += mask[i]
    w /= np.sqrt(nact)

    z = np.empty(8)
    f = np.empty(8)
    k2 = np.empty(8)
    k3 = np.empty(8)
    k4 = np.empty(8)
    k5 = np.empty(8)
    k6 = np.empty(8)
    k7 = np.empty(8)
    ztmp = np.empty(8)
    znew = np.empty(8)
    err = np.empty(8)
    J = np.empty((4, 4))

    t = t0
    h = renorm_dt / 64.0
    for leg in range(nlegs):
        for i in range(4):
            z[i] = y[i]
            z[4 + i] = w[i]
        t_leg_end = t + renorm_dt
        while t < t_leg_end:
            if h < 1e-14:
                logs[leg] = np.nan
                return logs[:leg]
            if t + h > t_leg_end:
                h = t_leg_end - t
            # stage evaluations on the augmented system
            _aug_rhs(z, pars, mask, J, f)
            for i in range(8):
                ztmp[i] = z[i] + h * _A21 * f[i]
            _aug_rhs(ztmp, pars, mask, J, k2)
            for i in range(8):
                ztmp[i] = z[i] + h * (_A31 * f[i] + _A32 * k2[i])
            _aug_rhs(ztmp, pars, mask, J, k3)
            for i in range(8):
                ztmp[i] = z[i] + h * (_A41 * f[i] + _A42 * k2[i] + _A43 * k3[i])
            _aug_rhs(ztmp, pars, mask, J, k4)
            for i in range(8):
                ztmp[i] = z[i] + h * (_A51 * f[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
            _aug_rhs(ztmp, pars, mask, J, k5)
            for i in range(8):
                ztmp[i] = z[i] + h * (_A61 * f[i] + _A62 * k2[i] + _A63 * k3[i]
                                      + _A64 * k4[i] + _A65 * k5[i])
            _aug_rhs(ztmp, pars, mask, J, k6)
            for i in range(8):
                znew[i] = z[i] + h * (_B1 * f[i] + _B3 * k3[i] + _B4 * k4[i]
                                      + _B5 * k5[i] + _B6 * k6[i])
            _aug_rhs(znew, pars, mask, J, k7)
            for i in range(8):
                err[i] = h * (_E1 * f[i] + _E3 * k3[i] + _E4 * k4[i]
                              + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i])
            s = 0.0
            for i in range(8):
                sc = atol + rtol * max(abs(z[i]), abs(znew[i]))
                e = err[i] / sc
                s += e * e
            enorm = np.sqrt(s / 8.0)
            if enorm > 1.0:
                h *= max(0.2, 0.9 * enorm ** -0.2)
                continue
            t += h
            for i in range(8):
                z[i] = znew[i]
            h *= min(5.0, max(0.2, 0.9 * enorm ** -0.2)) if enorm > 0.0 else 5.0
        for i in range(4):
            y[i] = z[i]
            w[i] = z[4 + i]
        nw = 0.0
        for i in range(4):
            nw += w[i] * w[i]
        nw = np.sqrt(nw)
        logs[leg] = np.log(nw)
        for i in range(4):
            w[i] /= nw
    return logs


@njit(cache=True)
def _aug_rhs(z, pars, mask, J, out):
    y = z[:4]
    w = z[4:]
    rhs4(y, pars, mask, out[:4])
    jac4(y, pars, mask, J)
    for i in range(4):
        s = 0.0
        for j in range(4):
            s += J[i, j] * w[j]
        out[4 + i] = s
