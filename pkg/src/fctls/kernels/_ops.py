"""Numeric kernels shared by every execution path.

Each function here is written so that it runs identically as plain NumPy and
under ``numba.njit`` (see ``_backend``).  Higher-level modules delegate their
arithmetic to these kernels, so the forgetting-factor dynamics, the algebraic
reconstruction, the excitation quadrature and the fused simulation loop all
have exactly one definition.
"""

import numpy as np

from ._backend import jit

# Packed state layout for the benchmark plant (q = 3), used by both the fused
# loop and the step-by-step reference engine:
#   [0:6]   plant: x1, x2, f1, f2, f3, fy
#   [6:9]   theta_hat   (forgetting-factor LS)
#   [9:15]  F upper triangle, row-major: 00, 01, 02, 11, 12, 22
#   [15]    z
#   [16:19] theta_hat   (no-forgetting LS)
#   [19:25] F upper triangle
#   [25:28] theta_hat   (gradient baseline)
STATE_SIZE = 28
PLANT_SLICE = (0, 6)
FF_THETA_SLICE = (6, 9)
FF_COV_SLICE = (9, 15)
FF_Z_INDEX = 15
STD_THETA_SLICE = (16, 19)
STD_COV_SLICE = (19, 25)
GRAD_THETA_SLICE = (25, 28)

# Covariance positivity floor: losing it means the step size is wrong.
COV_MIN_EIG_FLOOR = 1e-12

SIM_OK = 0
SIM_COV_NOT_PD = 1
SIM_NON_FINITE = 2


@jit
def outer_product(v):
    n = v.shape[0]
    return v.reshape(n, 1) * v.reshape(1, n)


@jit
def sym_eig_bounds(m):
    """Smallest and largest eigenvalue of (m + m.T)/2."""
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return w[0], w[w.shape[0] - 1]


@jit
def spectral_norm_sym(m):
    lo, hi = sym_eig_bounds(m)
    return max(abs(lo), abs(hi))


@jit
def frobenius_norm(m):
    return np.sqrt(np.sum(m * m))


@jit
def pack_sym(m):
    """Row-major upper triangle of a symmetric matrix."""
    q = m.shape[0]
    u = np.empty(q * (q + 1) // 2)
    k = 0
    for i in range(q):
        for j in range(i, q):
            u[k] = m[i, j]
            k += 1
    return u


@jit
def unpack_sym(u, q):
    m = np.empty((q, q))
    k = 0
    for i in range(q):
        for j in range(i, q):
            m[i, j] = u[k]
            m[j, i] = u[k]
            k += 1
    return m


@jit
def gram_step(gram, prev_outer, new_outer, dt):
    """Trapezoidal increment of the running regressor Gram integral."""
    return gram + (0.5 * dt) * (prev_outer + new_outer)


@jit
def ls_ff_rates(theta_hat, cov, z, phi, y, gamma_f, chi0, k_cap, use_frobenius):
    """Time derivatives of the forgetting-factor LS state.

    d theta = gamma_f * F phi (y - phi' theta)
    d F     = -gamma_f * F phi phi' F + chi * F
    d z     = -chi * z          with chi = chi0 * (1 - ||F|| / k_cap)
    """
    if use_frobenius:
        nrm = frobenius_norm(cov)
    else:
        nrm = spectral_norm_sym(cov)
    chi = chi0 * (1.0 - nrm / k_cap)
    err = y - phi @ theta_hat
    cov_phi = cov @ phi
    d_theta = gamma_f * cov_phi * err
    d_cov = -gamma_f * outer_product(cov_phi) + chi * cov
    d_z = -chi * z
    return d_theta, d_cov, d_z


@jit
def ls_standard_rates(theta_hat, cov, phi, y):
    """No-forgetting specialization: gamma_f = 1, chi = 0."""
    err = y - phi @ theta_hat
    cov_phi = cov @ phi
    return cov_phi * err, -outer_product(cov_phi)


@jit
def gradient_rate(theta_hat, phi, y, gamma):
    return gamma * phi * (y - phi @ theta_hat)


@jit
def fct_evaluate(theta_hat, cov, z, f0, theta0, delta, force):
    """Algebraic reconstruction gate and solve.

    Forms M = I - z*f0*F and, when det(M) >= delta (or when forced after the
    gate has latched), solves M x = theta_hat - z*f0*F theta0 with a
    partial-pivoting factorization.  Returns (gate_open, det, x-or-NaN).
    """
    q = theta_hat.shape[0]
    s = z * f0
    m = np.eye(q) - s * cov
    det = np.linalg.det(m)
    ok = det >= delta
    if ok or force:
        value = np.linalg.solve(m, theta_hat - s * (cov @ theta0))
    else:
        value = np.full(q, np.nan)
    return ok, det, value


@jit
def plant_rates(xp, theta_true, lam, u):
    """Second-order plant plus the four first-order signal filters."""
    dx = np.empty(6)
    dx[0] = xp[1]
    dx[1] = -theta_true[0] * xp[0] - theta_true[1] * xp[1] + theta_true[2] * u
    dx[2] = -lam * xp[2] - xp[0]
    dx[3] = -lam * xp[3] - xp[1]
    dx[4] = -lam * xp[4] + u
    dx[5] = -lam * xp[5] + xp[1]
    return dx


@jit
def plant_emit(xp, lam):
    """Measured pair (y, phi) from the plant/filter state.

    y is realized as x2 - lam*fy, which equals the filtered derivative of x2
    without differentiating any measured signal.
    """
    y = xp[1] - lam * xp[5]
    phi = xp[2:5].copy()
    return y, phi


@jit
def initial_state(theta_hat0, f0):
    x = np.zeros(STATE_SIZE)
    f_init = 1.0 / f0
    x[6:9] = theta_hat0
    x[9] = f_init
    x[12] = f_init
    x[14] = f_init
    x[15] = 1.0
    x[16:19] = theta_hat0
    x[19] = f_init
    x[22] = f_init
    x[24] = f_init
    x[25:28] = theta_hat0
    return x


@jit
def coupled_rhs(x, u, noise_y, theta_true, lam, gamma_f, chi0, k_cap,
                use_frobenius, grad_gain, run_ff, run_std, run_grad):
    """Right-hand side of the coupled plant + estimators system."""
    dx = np.zeros(STATE_SIZE)
    dx[0:6] = plant_rates(x[0:6], theta_true, lam, u)
    y, phi = plant_emit(x[0:6], lam)
    ym = y + noise_y
    if run_ff:
        cov = unpack_sym(x[9:15], 3)
        d_theta, d_cov, d_z = ls_ff_rates(
            x[6:9], cov, x[15], phi, ym, gamma_f, chi0, k_cap, use_frobenius
        )
        dx[6:9] = d_theta
        dx[9:15] = pack_sym(d_cov)
        dx[15] = d_z
    if run_std:
        cov = unpack_sym(x[19:25], 3)
        d_theta, d_cov = ls_standard_rates(x[16:19], cov, phi, ym)
        dx[16:19] = d_theta
        dx[19:25] = pack_sym(d_cov)
    if run_grad:
        dx[25:28] = gradient_rate(x[25:28], phi, ym, grad_gain)
    return dx


@jit
def simulate_benchmark(theta_true, lam, u_grid, noise, theta_hat0,
                       gamma_f, f0, chi0, k_cap, use_frobenius, grad_gain,
                       run_ff, run_std, run_grad, run_fct,
                       delta_fct, rho, h, n_steps, use_euler):
    """Fused fixed-step simulation of the benchmark scenario.

    ``u_grid`` holds the input sampled at half-step resolution (2*n_steps + 1
    points) so the RK4 stages see the exact input; ``noise`` holds one
    measurement disturbance per step, held constant over that step.

    Returns the full per-step trace plus (status, rows_filled, t_c,
    first_valid_time).  ``status`` is SIM_OK, or an error code with
    ``rows_filled`` rows of valid prefix.
    """
    rows = n_steps + 1
    t_out = np.empty(rows)
    y_out = np.empty(rows)
    phi_out = np.empty((rows, 3))
    theta_ff = np.empty((rows, 3))
    cov_ff = np.empty((rows, 6))
    z_out = np.empty(rows)
    theta_std = np.empty((rows, 3))
    cov_std = np.empty((rows, 6))
    theta_grad = np.empty((rows, 3))
    gram_out = np.empty((rows, 6))
    min_eig = np.empty(rows)
    det_m = np.full(rows, np.nan)
    fct_out = np.full((rows, 3), np.nan)

    x = initial_state(theta_hat0, f0)
    gram = np.zeros((3, 3))
    _, phi0 = plant_emit(x[0:6], lam)
    prev_outer = outer_product(phi0)
    t_c = -1.0
    first_valid = -1.0
    status = SIM_OK
    rows_filled = 0

    for i in range(rows):
        t = i * h
        y, phi = plant_emit(x[0:6], lam)
        if i < n_steps:
            nz = noise[i]
        else:
            nz = noise[n_steps - 1]
        t_out[i] = t
        y_out[i] = y + nz
        phi_out[i] = phi
        theta_ff[i] = x[6:9]
        cov_ff[i] = x[9:15]
        z_out[i] = x[15]
        theta_std[i] = x[16:19]
        cov_std[i] = x[19:25]
        theta_grad[i] = x[25:28]

        if i > 0:
            new_outer = outer_product(phi)
            gram = gram_step(gram, prev_outer, new_outer, h)
            prev_outer = new_outer
        gram_out[i] = pack_sym(gram)
        lo, _ = sym_eig_bounds(gram)
        min_eig[i] = lo
        if t_c < 0.0 and lo >= rho:
            t_c = t

        if run_ff and run_fct:
            cov = unpack_sym(x[9:15], 3)
            latched = first_valid >= 0.0
            ok, det, value = fct_evaluate(
                x[6:9], cov, x[15], f0, theta_hat0, delta_fct, latched
            )
            det_m[i] = det
            if ok and not latched:
                first_valid = t
            if ok or latched:
                fct_out[i] = value

        rows_filled = i + 1
        if i == n_steps:
            break

        # advance one step; the held disturbance nz applies to every stage
        if use_euler:
            k1 = coupled_rhs(x, u_grid[2 * i], nz, theta_true, lam, gamma_f,
                             chi0, k_cap, use_frobenius, grad_gain,
                             run_ff, run_std, run_grad)
            x_new = x + h * k1
        else:
            u0 = u_grid[2 * i]
            uh = u_grid[2 * i + 1]
            u1 = u_grid[2 * i + 2]
            k1 = coupled_rhs(x, u0, nz, theta_true, lam, gamma_f, chi0,
                             k_cap, use_frobenius, grad_gain,
                             run_ff, run_std, run_grad)
            k2 = coupled_rhs(x + (0.5 * h) * k1, uh, nz, theta_true, lam,
                             gamma_f, chi0, k_cap, use_frobenius, grad_gain,
                             run_ff, run_std, run_grad)
            k3 = coupled_rhs(x + (0.5 * h) * k2, uh, nz, theta_true, lam,
                             gamma_f, chi0, k_cap, use_frobenius, grad_gain,
                             run_ff, run_std, run_grad)
            k4 = coupled_rhs(x + h * k3, u1, nz, theta_true, lam, gamma_f,
                             chi0, k_cap, use_frobenius, grad_gain,
                             run_ff, run_std, run_grad)
            x_new = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        if not np.all(np.isfinite(x_new)):
            status = SIM_NON_FINITE
            break
        if run_ff:
            lo, _ = sym_eig_bounds(unpack_sym(x_new[9:15], 3))
            if lo < COV_MIN_EIG_FLOOR:
                status = SIM_COV_NOT_PD
                break
        if run_std:
            lo, _ = sym_eig_bounds(unpack_sym(x_new[19:25], 3))
            if lo < COV_MIN_EIG_FLOOR:
                status = SIM_COV_NOT_PD
                break
        x = x_new

    return (t_out, y_out, phi_out, theta_ff, cov_ff, z_out, theta_std,
            cov_std, theta_grad, gram_out, min_eig, det_m, fct_out,
            status, rows_filled, t_c, first_valid)
