# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulation kernel.

Walks the same packed term tables, bases, and gain vectors as the
pure-Python fallback, evaluating the full network derivative (plant
layers, controller cascade, adaptation laws) and the RK4 loop in C.
"""

from libc.math cimport exp, fabs, pow, sin, cos, sqrt, isfinite

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline double spow(double x, double r) nogil:
    if x > 0.0:
        return pow(x, r)
    elif x < 0.0:
        return -pow(-x, r)
    return 0.0


cdef inline double trig_factor(int kind, double arg, int m) nogil:
    cdef double val
    if kind == 0:
        return 1.0
    val = sin(arg) if kind == 1 else cos(arg)
    if m == 1:
        return val
    return pow(val, m)


cdef double eval_time_terms(int[::1] ptr, double[::1] coef, int[::1] mu,
                            int[::1] trig, double[::1] a, double[::1] ph,
                            int[::1] mt, Py_ssize_t row, double t) nogil:
    cdef double out = 0.0, v
    cdef Py_ssize_t k
    for k in range(ptr[row], ptr[row + 1]):
        v = coef[k]
        if mu[k] > 0:
            v *= pow(t, mu[k])
        v *= trig_factor(trig[k], a[k] * t + ph[k], mt[k])
        out += v
    return out


cdef double eval_state_terms(int[::1] ptr, double[::1] coef, int[::1] u,
                             int[::1] mu, int[::1] trig, int[::1] v_idx,
                             double[::1] a, double[::1] ph, int[::1] mt,
                             Py_ssize_t row, double[::1] x, Py_ssize_t x0) nogil:
    """x0 is the offset of the agent's first state inside the flat vector."""
    cdef double out = 0.0, v
    cdef Py_ssize_t k
    for k in range(ptr[row], ptr[row + 1]):
        v = coef[k]
        if u[k] > 0:
            v *= pow(x[x0 + u[k] - 1], mu[k])
        if trig[k] != 0:
            v *= trig_factor(trig[k], a[k] * x[x0 + v_idx[k] - 1] + ph[k], mt[k])
        out += v
    return out


cdef class Net:
    cdef int N, n, M, Mt, nl, leader_mode, wb, blk, size
    cdef double dt, p, q, guard, pd_kp, pd_kd
    cdef double[:, ::1] A
    cdef double[::1] b, g
    # follower layer nonlinearities / disturbances
    cdef int[::1] f_ptr, f_u, f_mu, f_trig, f_v, f_mt
    cdef double[::1] f_coef, f_a, f_ph
    cdef int[::1] d_ptr, d_mu, d_trig, d_mt
    cdef double[::1] d_coef, d_a, d_ph
    # leader tables
    cdef int[::1] lf_ptr, lf_u, lf_mu, lf_trig, lf_v, lf_mt
    cdef double[::1] lf_coef, lf_a, lf_ph
    cdef int[::1] ld_ptr, ld_mu, ld_trig, ld_mt
    cdef double[::1] ld_coef, ld_a, ld_ph
    # reference path: rows 0..2 = output, rate, accel
    cdef int[::1] r_ptr, r_mu, r_trig, r_mt
    cdef double[::1] r_coef, r_a, r_ph
    # bases
    cdef double[:, ::1] ca_c, ca_w, th_c, th_w
    cdef int[::1] th_dim
    # per-step gains
    cdef double[::1] gk, gkp, gkq, s1c, s2c, s3c, s1a, s2a, s3a
    cdef double[::1] s1th, s2th, s1d, s2d, gc, ga, gth, gd
    # scratch
    cdef double[::1] chi, S, phi, k1, k2, k3, k4, vtmp
    # record buffers
    cdef double[::1] rec_t, rec_y0
    cdef double[:, ::1] rec_y, rec_e, rec_u
    cdef double[:, :, ::1] rec_z, rec_alpha, rec_wc, rec_wa, rec_th, rec_dh

    def __init__(self, params, record):
        p = params
        self.N = p["N"]; self.n = p["n"]; self.M = p["M"]; self.Mt = p["Mt"]
        self.nl = p["nl"]; self.leader_mode = p["leader_mode"]
        self.dt = p["dt"]; self.p = p["p"]; self.q = p["q"]
        self.guard = p["guard"]; self.pd_kp = p["pd_kp"]; self.pd_kd = p["pd_kd"]
        self.A = p["A"]; self.b = p["b"]; self.g = p["g"]
        (self.f_ptr, self.f_coef, self.f_u, self.f_mu, self.f_trig,
         self.f_v, self.f_a, self.f_ph, self.f_mt) = p["fterms"]
        (self.d_ptr, self.d_coef, self.d_mu, self.d_trig,
         self.d_a, self.d_ph, self.d_mt) = p["dterms"]
        (self.lf_ptr, self.lf_coef, self.lf_u, self.lf_mu, self.lf_trig,
         self.lf_v, self.lf_a, self.lf_ph, self.lf_mt) = p["lfterms"]
        (self.ld_ptr, self.ld_coef, self.ld_mu, self.ld_trig,
         self.ld_a, self.ld_ph, self.ld_mt) = p["ldterms"]
        (self.r_ptr, self.r_coef, self.r_mu, self.r_trig,
         self.r_a, self.r_ph, self.r_mt) = p["rterms"]
        self.ca_c = p["ca_c"]; self.ca_w = p["ca_w"]
        self.th_c = p["th_c"]; self.th_w = p["th_w"]; self.th_dim = p["th_dim"]
        (self.gk, self.gkp, self.gkq, self.s1c, self.s2c, self.s3c,
         self.s1a, self.s2a, self.s3a, self.s1th, self.s2th,
         self.s1d, self.s2d, self.gc, self.ga, self.gth, self.gd) = p["gains"]
        self.wb = p["weights_base"]; self.blk = p["block"]; self.size = p["size"]

        self.chi = np.zeros(p["chi_max"])
        self.S = np.zeros(self.M)
        self.phi = np.zeros(self.Mt)
        self.k1 = np.zeros(self.size); self.k2 = np.zeros(self.size)
        self.k3 = np.zeros(self.size); self.k4 = np.zeros(self.size)
        self.vtmp = np.zeros(self.size)

        self.rec_t = record["t"]; self.rec_y0 = record["y0"]
        self.rec_y = record["y"]; self.rec_e = record["e"]
        self.rec_u = record["u"]; self.rec_z = record["z"]
        self.rec_alpha = record["alpha"]
        self.rec_wc = record["wc"]; self.rec_wa = record["wa"]
        self.rec_th = record["th"]; self.rec_dh = record["dh"]

    cdef double ref_eval(self, Py_ssize_t row, double t) nogil:
        return eval_time_terms(self.r_ptr, self.r_coef, self.r_mu, self.r_trig,
                               self.r_a, self.r_ph, self.r_mt, row, t)

    cdef void deriv(self, double t, double[::1] v, double[::1] dv,
                    bint log, Py_ssize_t row) nogil:
        cdef int N = self.N, n = self.n, M = self.M, Mt = self.Mt, nl = self.nl
        cdef Py_ssize_t i, j, k, m, d, base, woff, soff, pos, dim
        cdef double y0, e, zj, zprev, s_in, alpha, prev_alpha, err
        cdef double waS, thphi, dhat, SdotWc, SdotDelta, w, delta, ssq, u0
        cdef double yd0, yd1, yd2, acc

        if nl > 0:
            y0 = v[0]
        else:
            y0 = self.ref_eval(0, t)

        for i in range(N):
            base = nl + i * n
            e = self.g[i] * v[base] - self.b[i] * y0
            for k in range(N):
                if self.A[i, k] != 0.0:
                    e -= self.A[i, k] * v[nl + k * n]
            prev_alpha = 0.0
            zprev = 0.0
            alpha = 0.0
            for j in range(1, n + 1):
                woff = self.wb + (i * n + j - 1) * self.blk
                if j == 1:
                    zj = v[base] - y0
                    s_in = e
                    err = e
                else:
                    zj = v[base + j - 1] - prev_alpha
                    s_in = zj
                    err = zj
                for m in range(M):
                    w = s_in - self.ca_c[j - 1, m]
                    self.S[m] = exp(-(w * w) / (self.ca_w[j - 1, m] * self.ca_w[j - 1, m]))
                # estimator input: x_1 at step 1, truncated input chi at step j
                if j == 1:
                    dim = 1
                    self.chi[0] = v[base]
                else:
                    dim = self.th_dim[j - 1]
                    pos = 0
                    for k in range(j):
                        self.chi[pos] = v[base + k]; pos += 1
                    for k in range(j - 1):
                        soff = self.wb + (i * n + k) * self.blk
                        for m in range(M):
                            self.chi[pos] = v[soff + m]; pos += 1
                    for k in range(j - 1):
                        soff = self.wb + (i * n + k) * self.blk
                        for m in range(M):
                            self.chi[pos] = v[soff + M + m]; pos += 1
                    for k in range(j - 1):
                        soff = self.wb + (i * n + k) * self.blk
                        for m in range(Mt):
                            self.chi[pos] = v[soff + 2 * M + m]; pos += 1
                    for k in range(j - 1):
                        soff = self.wb + (i * n + k) * self.blk
                        self.chi[pos] = v[soff + 2 * M + Mt]; pos += 1
                for m in range(Mt):
                    ssq = 0.0
                    for d in range(dim):
                        w = self.chi[d] - self.th_c[j - 1, m]
                        ssq += w * w
                    self.phi[m] = exp(-ssq / (self.th_w[j - 1, m] * self.th_w[j - 1, m]))

                waS = 0.0
                for m in range(M):
                    waS += v[woff + M + m] * self.S[m]
                thphi = 0.0
                for m in range(Mt):
                    thphi += v[woff + 2 * M + m] * self.phi[m]
                dhat = v[woff + 2 * M + Mt]

                if j == 1:
                    alpha = (-(self.gk[0] / self.g[i]) * e - waS / self.g[i]
                             + (-self.gkp[0] * spow(e, self.p)
                                - self.gkq[0] * spow(e, self.q)
                                - thphi - dhat) / self.g[i])
                else:
                    if j == 2:
                        zprev = self.g[i] * e
                    alpha = (-self.gk[j - 1] * zj - waS
                             - self.gkp[j - 1] * spow(zj, self.p)
                             - self.gkq[j - 1] * spow(zj, self.q)
                             - thphi - dhat - zprev)

                # adaptation flows
                SdotWc = 0.0
                for m in range(M):
                    SdotWc += self.S[m] * v[woff + m]
                SdotDelta = 0.0
                for m in range(M):
                    SdotDelta += self.S[m] * (v[woff + M + m] - v[woff + m])
                for m in range(M):
                    w = v[woff + m]
                    dv[woff + m] = self.gc[j - 1] * (
                        -self.S[m] * err
                        - self.s1c[j - 1] * self.S[m] * SdotWc
                        - self.s2c[j - 1] * spow(w, self.p)
                        - self.s3c[j - 1] * spow(w, self.q))
                for m in range(M):
                    delta = v[woff + M + m] - v[woff + m]
                    dv[woff + M + m] = -self.ga[j - 1] * (
                        self.s1a[j - 1] * self.S[m] * SdotDelta
                        + self.s2a[j - 1] * spow(delta, self.p)
                        + self.s3a[j - 1] * spow(delta, self.q))
                for m in range(Mt):
                    w = v[woff + 2 * M + m]
                    dv[woff + 2 * M + m] = self.gth[j - 1] * (
                        err * self.phi[m]
                        - self.s1th[j - 1] * spow(w, self.p)
                        - self.s2th[j - 1] * spow(w, self.q))
                dv[woff + 2 * M + Mt] = self.gd[j - 1] * (
                    err
                    - self.s1d[j - 1] * spow(dhat, self.p)
                    - self.s2d[j - 1] * spow(dhat, self.q))

                if log:
                    self.rec_z[row, i, j - 1] = zj
                    self.rec_alpha[row, i, j - 1] = alpha
                    acc = 0.0
                    for m in range(M):
                        acc += v[woff + m] * v[woff + m]
                    self.rec_wc[row, i, j - 1] = sqrt(acc)
                    acc = 0.0
                    for m in range(M):
                        acc += v[woff + M + m] * v[woff + M + m]
                    self.rec_wa[row, i, j - 1] = sqrt(acc)
                    acc = 0.0
                    for m in range(Mt):
                        acc += v[woff + 2 * M + m] * v[woff + 2 * M + m]
                    self.rec_th[row, i, j - 1] = sqrt(acc)
                    self.rec_dh[row, i, j - 1] = dhat

                zprev = zj
                prev_alpha = alpha

            # plant layers driven by the cascade's last policy
            for k in range(1, n + 1):
                w = v[base + k] if k < n else alpha
                dv[base + k - 1] = (w
                    + eval_state_terms(self.f_ptr, self.f_coef, self.f_u,
                                       self.f_mu, self.f_trig, self.f_v,
                                       self.f_a, self.f_ph, self.f_mt,
                                       i * n + k - 1, v, base)
                    + eval_time_terms(self.d_ptr, self.d_coef, self.d_mu,
                                      self.d_trig, self.d_a, self.d_ph,
                                      self.d_mt, i * n + k - 1, t))
            if log:
                self.rec_y[row, i] = v[base]
                self.rec_e[row, i] = e
                self.rec_u[row, i] = alpha

        if nl > 0:
            if self.leader_mode == 1:
                yd0 = self.ref_eval(0, t)
                yd1 = self.ref_eval(1, t)
                yd2 = self.ref_eval(2, t)
                u0 = (yd2 + self.pd_kd * (yd1 - v[1]) + self.pd_kp * (yd0 - v[0])
                      - eval_state_terms(self.lf_ptr, self.lf_coef, self.lf_u,
                                         self.lf_mu, self.lf_trig, self.lf_v,
                                         self.lf_a, self.lf_ph, self.lf_mt,
                                         nl - 1, v, 0))
            else:
                u0 = 0.0
            for k in range(1, nl + 1):
                w = v[k] if k < nl else u0
                dv[k - 1] = (w
                    + eval_state_terms(self.lf_ptr, self.lf_coef, self.lf_u,
                                       self.lf_mu, self.lf_trig, self.lf_v,
                                       self.lf_a, self.lf_ph, self.lf_mt,
                                       k - 1, v, 0)
                    + eval_time_terms(self.ld_ptr, self.ld_coef, self.ld_mu,
                                      self.ld_trig, self.ld_a, self.ld_ph,
                                      self.ld_mt, k - 1, t))
        if log:
            self.rec_t[row] = t
            self.rec_y0[row] = y0

    cdef Py_ssize_t guard_check(self, double[::1] v) nogil:
        cdef Py_ssize_t i
        for i in range(self.size):
            if not isfinite(v[i]) or fabs(v[i]) > self.guard:
                return i
        return -1

    def run(self, double[::1] v, Py_ssize_t nsteps, long[::1] rec):
        """Integrate in place; returns None or (t, component) on divergence."""
        cdef Py_ssize_t step, i, r = 0, nrec = rec.shape[0], bad
        cdef double t, h = self.dt
        for step in range(nsteps + 1):
            t = step * h
            bad = self.guard_check(v)
            if bad >= 0:
                return (t, bad)
            if r < nrec and rec[r] == step:
                self.deriv(t, v, self.k1, 1, r)
                r += 1
            else:
                if step == nsteps:
                    break
                self.deriv(t, v, self.k1, 0, 0)
            if step == nsteps:
                break
            for i in range(self.size):
                self.vtmp[i] = v[i] + 0.5 * h * self.k1[i]
            self.deriv(t + 0.5 * h, self.vtmp, self.k2, 0, 0)
            for i in range(self.size):
                self.vtmp[i] = v[i] + 0.5 * h * self.k2[i]
            self.deriv(t + 0.5 * h, self.vtmp, self.k3, 0, 0)
            for i in range(self.size):
                self.vtmp[i] = v[i] + h * self.k3[i]
            self.deriv(t + h, self.vtmp, self.k4, 0, 0)
            for i in range(self.size):
                v[i] = v[i] + (h / 6.0) * (self.k1[i] + 2.0 * self.k2[i]
                                           + 2.0 * self.k3[i] + self.k4[i])
        return None
