"""Hot simulation loops with a numba backend and a pure-Python fallback.

The plant and closed-loop integrators run one arithmetic statement per
state component per step, so a 10 kHz simulation over tens of seconds is
dominated by this module. The same loop source is either compiled with
``numba.njit`` or executed as-is, selected once at import time:

- ``FLEXPOS_BACKEND=numba``  require numba (ImportError if missing);
- ``FLEXPOS_BACKEND=numpy``  force the interpreted fallback;
- unset or ``auto``          numba when importable, fallback otherwise.

Both paths execute identical operations in identical order (no fastmath),
so trajectories agree bit-for-bit across backends. See
``flexpos.benchmark`` for a speed comparison.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("FLEXPOS_BACKEND", "auto").strip().lower() or "auto"
if _FLAG not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"FLEXPOS_BACKEND must be 'numba', 'numpy' or 'auto', got {_FLAG!r}"
    )

if _FLAG == "numpy":
    _numba = None
else:
    try:
        import numba as _numba
    except ImportError:
        if _FLAG == "numba":
            raise
        _numba = None

BACKEND = "numba" if _numba is not None else "numpy"


def backend_name() -> str:
    """Active backend: 'numba' or 'numpy'."""
    return BACKEND


def _compile(fn):
    if _numba is not None:
        return _numba.njit(cache=True, fastmath=False)(fn)
    return fn


# Divergence status: kernels return 0 on success, or 1 + index of the
# step where a pose component crossed its divergence limit.

def _bw_substep_count(dd, cap):
    # Explicit Euler overshoots the hysteresis fixed point when a single
    # move is large relative to the saturation level; subdividing keeps
    # |h| inside the bound. Smooth drives at 10 kHz take one substep.
    return 1 + int(abs(dd) / cap)


def _plant_chain(
    k, v, noise,
    J, v_min, stroke_over_span,
    bw_alpha, bw_beta, bw_gamma, bw_n, h_bound, bw_cap,
    wn, zeta, dt,
    qstep, qclip,
    h, dlin, d_out, q, qd, offset,
    out_true, out_meas, out_volt, meas, div_limit,
):
    """Advance actuators, structure, and sensing by one dt. Returns flag bits."""
    flags = 0
    for i in range(6):
        d_new = stroke_over_span * (v[i] - v_min)
        dd = d_new - dlin[i]
        if dd != 0.0:
            nsub = _bw_substep_count(dd, bw_cap)
            step = dd / nsub
            hh = h[i]
            for _ in range(nsub):
                ah = abs(hh)
                hh += (
                    step
                    - bw_beta * abs(step) * ah ** (bw_n - 1.0) * hh
                    - bw_gamma * step * ah**bw_n
                )
            h[i] = hh
        dlin[i] = d_new
        if abs(h[i]) > h_bound * (1.0 + 1e-9):
            flags |= 4
        d_out[i] = bw_alpha * d_new + (1.0 - bw_alpha) * h[i]
    for i in range(6):
        p_star = 0.0
        for j in range(6):
            p_star += J[i, j] * d_out[j]
        qd[i] += dt * (wn[i] * wn[i] * (p_star - q[i]) - 2.0 * zeta[i] * wn[i] * qd[i])
        q[i] += dt * qd[i]
        true_rel = q[i] - offset[i]
        out_true[k, i] = true_rel
        m = np.rint((true_rel + noise[k, i]) / qstep[i]) * qstep[i]
        if m > qclip[i]:
            m = qclip[i]
            flags |= 2
        elif m < -qclip[i]:
            m = -qclip[i]
            flags |= 2
        out_meas[k, i] = m
        meas[i] = m
        out_volt[k, i] = v[i]
        if abs(true_rel) > div_limit[i]:
            flags |= 8
    return flags


def _open_loop_core(
    volts, noise,
    J, v_min, v_max, stroke,
    bw_alpha, bw_beta, bw_gamma, bw_n,
    wn, zeta, qstep, qclip, dt,
    h, dlin, q, qd, offset, div_limit,
    out_true, out_meas, out_volt, out_flags,
):
    n = volts.shape[0]
    stroke_over_span = stroke / (v_max - v_min)
    h_bound = (1.0 / (bw_beta + bw_gamma)) ** (1.0 / bw_n)
    bw_cap = 0.25 * h_bound / bw_n
    v = np.empty(6)
    d_out = np.empty(6)
    meas = np.empty(6)
    for k in range(n):
        flags = 0
        for i in range(6):
            vc = volts[k, i]
            if vc < v_min:
                vc = v_min
                flags |= 1
            elif vc > v_max:
                vc = v_max
                flags |= 1
            v[i] = vc
        flags |= _plant_chain(
            k, v, noise,
            J, v_min, stroke_over_span,
            bw_alpha, bw_beta, bw_gamma, bw_n, h_bound, bw_cap,
            wn, zeta, dt,
            qstep, qclip,
            h, dlin, d_out, q, qd, offset,
            out_true, out_meas, out_volt, meas, div_limit,
        )
        out_flags[k] = flags
        if flags & 8:
            return 1 + k
    return 0


def _closed_loop_core(
    ref, noise,
    J, Jinv, v_min, v_max, stroke,
    bw_alpha, bw_beta, bw_gamma, bw_n,
    wn, zeta, qstep, qclip, dt,
    kp, ki, kd, deriv_tau,
    eff_lo, eff_hi, clamp_lo, clamp_hi, v_op, ctrl_div,
    h, dlin, q, qd, offset,
    integ, e_prev, d_filt, div_limit,
    out_true, out_meas, out_volt, out_flags,
):
    n = ref.shape[0]
    stroke_over_span = stroke / (v_max - v_min)
    h_bound = (1.0 / (bw_beta + bw_gamma)) ** (1.0 / bw_n)
    bw_cap = 0.25 * h_bound / bw_n
    dt_c = dt * ctrl_div
    v = np.full(6, v_op)
    u_eff = np.zeros(6)
    d_out = np.empty(6)
    meas = np.zeros(6)
    for k in range(n):
        flags = 0
        if k % ctrl_div == 0:
            for i in range(6):
                e = ref[k, i] - meas[i]
                de = (e - e_prev[i]) / dt_c
                if deriv_tau > 0.0:
                    d_filt[i] += (dt_c / (deriv_tau + dt_c)) * (de - d_filt[i])
                    de = d_filt[i]
                integ_cand = integ[i] + e * dt_c
                u_raw = kp[i] * e + ki[i] * integ_cand + kd[i] * de
                # conditional integration: freeze while pushing into a limit
                if u_raw > eff_hi[i] and e > 0.0:
                    u = eff_hi[i]
                elif u_raw < eff_lo[i] and e < 0.0:
                    u = eff_lo[i]
                else:
                    integ[i] = integ_cand
                    u = min(max(u_raw, eff_lo[i]), eff_hi[i])
                u_eff[i] = u
                e_prev[i] = e
            for i in range(6):
                s = 0.0
                for j in range(6):
                    s += Jinv[i, j] * u_eff[j]
                vi = v_op + s / stroke_over_span
                vc = min(max(vi, clamp_lo), clamp_hi)
                if vc != vi:
                    flags |= 1
                v[i] = vc
        flags |= _plant_chain(
            k, v, noise,
            J, v_min, stroke_over_span,
            bw_alpha, bw_beta, bw_gamma, bw_n, h_bound, bw_cap,
            wn, zeta, dt,
            qstep, qclip,
            h, dlin, d_out, q, qd, offset,
            out_true, out_meas, out_volt, meas, div_limit,
        )
        out_flags[k] = flags
        if flags & 8:
            return 1 + k
    return 0


if _numba is not None:
    _bw_substep_count = _compile(_bw_substep_count)
    _plant_chain = _compile(_plant_chain)

open_loop = _compile(_open_loop_core)
closed_loop = _compile(_closed_loop_core)

# Flag bits written per sample into out_flags.
FLAG_VOLT_SATURATED = 1
FLAG_SENSOR_SATURATED = 2
FLAG_HYSTERESIS_BOUND = 4
FLAG_DIVERGED = 8
