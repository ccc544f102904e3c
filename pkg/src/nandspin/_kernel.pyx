# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops: macrospin RK4 integration and the coupled
Newton/backward-Euler transient.

The pure-Python twin lives in ``_pykernel.py``; both expose the same two
entry points, ``llg_integrate`` and ``transient``, with identical argument
layouts (see ``layout.py``).
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, pow, fabs

from nandspin.errors import SolverError

cnp.import_array()

# layer parameter slots, mirrored in layout.py
cdef enum:
    P_HK = 0
    P_EASY = 1
    P_MEFF = 4
    P_ALPHA = 5
    P_XI = 6
    P_GMU0 = 7
    P_HEXT = 8
    P_MP = 11
    P_SIG = 14
    P_POL = 17
    P_LAM = 18
    P_ETA = 19
    P_AREA = 20
    P_XSEC = 21
    P_SOTSIGN = 22


cdef inline void _cross(const double* a, const double* b, double* out) noexcept nogil:
    out[0] = a[1] * b[2] - a[2] * b[1]
    out[1] = a[2] * b[0] - a[0] * b[2]
    out[2] = a[0] * b[1] - a[1] * b[0]


cdef void _rhs(const double* m, const double* p, double jstt, double jshe,
               double* out) noexcept nogil:
    cdef double h[3]
    cdef double mxh[3]
    cdef double mmh[3]
    cdef double mxp[3]
    cdef double mmp[3]
    cdef double mxs[3]
    cdef double mms[3]
    cdef double proj = m[0] * p[P_EASY] + m[1] * p[P_EASY + 1] + m[2] * p[P_EASY + 2]
    cdef int i
    for i in range(3):
        h[i] = p[P_HK] * proj * p[P_EASY + i] + p[P_HEXT + i]
    h[2] -= p[P_MEFF] * m[2]
    _cross(m, h, mxh)
    _cross(m, mxh, mmh)
    cdef double cosang = m[0] * p[P_MP] + m[1] * p[P_MP + 1] + m[2] * p[P_MP + 2]
    cdef double lam2 = p[P_LAM] * p[P_LAM]
    cdef double phi = 2.0 * p[P_POL] * lam2 / ((lam2 + 1.0) + (lam2 - 1.0) * cosang)
    cdef double a_stt = p[P_XI] * phi * jstt
    cdef double a_sot = p[P_XI] * p[P_ETA] * jshe
    _cross(m, &p[P_MP], mxp)
    _cross(m, mxp, mmp)
    _cross(m, &p[P_SIG], mxs)
    _cross(m, mxs, mms)
    cdef double al = p[P_ALPHA]
    cdef double g = p[P_GMU0]
    cdef double pref = 1.0 / (1.0 + al * al)
    for i in range(3):
        out[i] = pref * (-g * mxh[i] - al * g * mmh[i]
                         - a_stt * mmp[i] + al * a_stt * mxp[i]
                         - a_sot * mms[i] + al * a_sot * mxs[i])


cdef void _rk4(double* m, const double* p, double jstt, double jshe, double dt) noexcept nogil:
    cdef double k1[3]
    cdef double k2[3]
    cdef double k3[3]
    cdef double k4[3]
    cdef double tmp[3]
    cdef int i
    _rhs(m, p, jstt, jshe, k1)
    for i in range(3):
        tmp[i] = m[i] + 0.5 * dt * k1[i]
    _rhs(tmp, p, jstt, jshe, k2)
    for i in range(3):
        tmp[i] = m[i] + 0.5 * dt * k2[i]
    _rhs(tmp, p, jstt, jshe, k3)
    for i in range(3):
        tmp[i] = m[i] + dt * k3[i]
    _rhs(tmp, p, jstt, jshe, k4)
    for i in range(3):
        m[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    cdef double norm = sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2])
    for i in range(3):
        m[i] /= norm


def llg_rhs(double[::1] m, double[::1] par, double jstt, double jshe):
    out = np.empty(3)
    cdef double[::1] o = out
    _rhs(&m[0], &par[0], jstt, jshe, &o[0])
    return out


def llg_integrate(double[::1] m0, double[::1] seg_t0, double[:, ::1] seg_par,
                  double[:, ::1] seg_j, double dt, long nsteps, long rec_every):
    """RK4 over piecewise-constant drive segments; returns (t, m) samples."""
    cdef long nrec = nsteps // rec_every + 2
    t_out = np.empty(nrec)
    m_out = np.empty((nrec, 3))
    cdef double[::1] tv = t_out
    cdef double[:, ::1] mv = m_out
    cdef double m[3]
    cdef long step, r = 0
    cdef int seg = 0, nseg = seg_t0.shape[0]
    cdef double t
    m[0] = m0[0]; m[1] = m0[1]; m[2] = m0[2]
    tv[0] = 0.0
    mv[0, 0] = m[0]; mv[0, 1] = m[1]; mv[0, 2] = m[2]
    r = 1
    with nogil:
        for step in range(nsteps):
            t = step * dt
            while seg + 1 < nseg and seg_t0[seg + 1] <= t + 1e-6 * dt:
                seg += 1
            _rk4(m, &seg_par[seg, 0], seg_j[seg, 0], seg_j[seg, 1], dt)
            if (step + 1) % rec_every == 0 or step == nsteps - 1:
                tv[r] = (step + 1) * dt
                mv[r, 0] = m[0]; mv[r, 1] = m[1]; mv[r, 2] = m[2]
                r += 1
    return t_out[:r], m_out[:r]


cdef class _Engine:
    cdef int nf, nn, nt, nr, nm, nl, nsrc, supply
    cdef int[::1] tr_type, tr_d, tr_g, tr_s
    cdef double[::1] tr_beta, tr_vth, tr_alpha, tr_lam
    cdef int[::1] r_a, r_b
    cdef double[::1] r_g
    cdef int[::1] mj_top, mj_bot, mj_layer
    cdef double[::1] mj_gp, mj_tmr, mj_vh
    cdef double[::1] cap
    cdef int[::1] src_ptr
    cdef double[::1] src_t, src_v
    cdef int[::1] ly_mtj, ly_res
    cdef double[:, ::1] ly_par
    cdef double abstol, dv_limit, gmin
    cdef int maxiter, max_halvings
    cdef double[::1] V, Vprev, F, dV, cosl, i_mtj, i_res
    cdef double[:, ::1] Jac, M
    cdef int[::1] piv
    cdef public long newton_iters
    cdef public double fail_time, p_supply, energy

    def __init__(self, cc, double[::1] v0, double[:, ::1] m0, double abstol,
                 int maxiter, int max_halvings, double dv_limit, double gmin):
        self.nf = cc.n_free
        self.nn = cc.n_nodes
        self.nsrc = self.nn - self.nf
        self.tr_type = cc.tr_type
        self.tr_d = cc.tr_d
        self.tr_g = cc.tr_g
        self.tr_s = cc.tr_s
        self.tr_beta = cc.tr_beta
        self.tr_vth = cc.tr_vth
        self.tr_alpha = cc.tr_alpha
        self.tr_lam = cc.tr_lam
        self.nt = self.tr_type.shape[0]
        self.r_a = cc.r_a
        self.r_b = cc.r_b
        self.r_g = cc.r_g
        self.nr = self.r_a.shape[0]
        self.mj_top = cc.mj_top
        self.mj_bot = cc.mj_bot
        self.mj_layer = cc.mj_layer
        self.mj_gp = cc.mj_gp
        self.mj_tmr = cc.mj_tmr
        self.mj_vh = cc.mj_vh
        self.nm = self.mj_top.shape[0]
        self.cap = cc.cap
        self.src_ptr = cc.src_ptr
        self.src_t = cc.src_t
        self.src_v = cc.src_v
        self.ly_mtj = cc.ly_mtj
        self.ly_res = cc.ly_res
        self.ly_par = cc.ly_par
        self.nl = self.ly_mtj.shape[0]
        self.supply = cc.supply
        self.abstol = abstol
        self.maxiter = maxiter
        self.max_halvings = max_halvings
        self.dv_limit = dv_limit
        self.gmin = gmin
        self.V = np.array(v0, dtype=np.float64)
        self.Vprev = np.array(v0, dtype=np.float64)
        self.F = np.zeros(max(self.nf, 1))
        self.dV = np.zeros(max(self.nf, 1))
        self.Jac = np.zeros((max(self.nf, 1), max(self.nf, 1)))
        self.piv = np.zeros(max(self.nf, 1), dtype=np.int32)
        self.M = np.array(m0, dtype=np.float64).reshape(-1, 3) if self.nl else np.zeros((1, 3))
        self.cosl = np.zeros(max(self.nl, 1))
        self.i_mtj = np.zeros(max(self.nm, 1))
        self.i_res = np.zeros(max(self.nr, 1))
        self.newton_iters = 0
        self.fail_time = -1.0
        self.energy = 0.0

    cdef void set_sources(self, double t) noexcept nogil:
        cdef int k, j, lo, hi
        cdef double v, w
        for k in range(self.nsrc):
            lo = self.src_ptr[k]
            hi = self.src_ptr[k + 1]
            if t <= self.src_t[lo]:
                v = self.src_v[lo]
            elif t >= self.src_t[hi - 1]:
                v = self.src_v[hi - 1]
            else:
                j = lo
                while self.src_t[j + 1] < t:
                    j += 1
                w = (t - self.src_t[j]) / (self.src_t[j + 1] - self.src_t[j])
                v = self.src_v[j] + w * (self.src_v[j + 1] - self.src_v[j])
            self.V[self.nf + k] = v

    cdef void update_cos(self) noexcept nogil:
        cdef int l
        cdef double* p
        for l in range(self.nl):
            p = &self.ly_par[l, 0]
            self.cosl[l] = (self.M[l, 0] * p[P_MP] + self.M[l, 1] * p[P_MP + 1]
                            + self.M[l, 2] * p[P_MP + 2])

    cdef inline void stamp(self, int a, int b, double cur, int k, double dcur) noexcept nogil:
        # current `cur` leaves node a and enters node b; dcur = d(cur)/dV[k]
        if k >= self.nf:
            return
        if a < self.nf:
            self.Jac[a, k] += dcur
        if b < self.nf:
            self.Jac[b, k] -= dcur

    cdef inline void inject(self, int a, int b, double cur) noexcept nogil:
        if a < self.nf:
            self.F[a] += cur
        if b < self.nf:
            self.F[b] -= cur

    cdef void assemble(self, double dt_inv) noexcept nogil:
        cdef int i, j, e, hi, lo, g
        cdef double sgn, vd, vs, vg, vhi, vlo, vov, vds, i0, ich, gm, gds, x, f, clm
        cdef double vb, gp, tmr, vh, u, den, gap, dgap, c, gcond, cur, dcur
        for i in range(self.nf):
            self.F[i] = 0.0
            for j in range(self.nf):
                self.Jac[i, j] = 0.0
        for i in range(self.nf):
            if dt_inv > 0.0:
                self.F[i] += self.cap[i] * dt_inv * (self.V[i] - self.Vprev[i])
                self.Jac[i, i] += self.cap[i] * dt_inv
            else:
                self.F[i] += self.gmin * self.V[i]
                self.Jac[i, i] += self.gmin
        for e in range(self.nr):
            cur = self.r_g[e] * (self.V[self.r_a[e]] - self.V[self.r_b[e]])
            self.inject(self.r_a[e], self.r_b[e], cur)
            self.stamp(self.r_a[e], self.r_b[e], cur, self.r_a[e], self.r_g[e])
            self.stamp(self.r_a[e], self.r_b[e], cur, self.r_b[e], -self.r_g[e])
        for e in range(self.nm):
            vb = self.V[self.mj_bot[e]] - self.V[self.mj_top[e]]
            gp = self.mj_gp[e]
            tmr = self.mj_tmr[e]
            vh = self.mj_vh[e]
            u = (vb / vh) * (vb / vh)
            den = 1.0 + tmr / (1.0 + u)
            gap = gp / den
            dgap = gp * tmr * 2.0 * vb / (vh * vh * (1.0 + u) * (1.0 + u) * den * den)
            c = self.cosl[self.mj_layer[e]]
            gcond = gp * 0.5 * (1.0 + c) + gap * 0.5 * (1.0 - c)
            cur = gcond * vb
            dcur = gcond + vb * dgap * 0.5 * (1.0 - c)
            self.inject(self.mj_bot[e], self.mj_top[e], cur)
            self.stamp(self.mj_bot[e], self.mj_top[e], cur, self.mj_bot[e], dcur)
            self.stamp(self.mj_bot[e], self.mj_top[e], cur, self.mj_top[e], -dcur)
        for e in range(self.nt):
            sgn = self.tr_type[e]
            vd = sgn * self.V[self.tr_d[e]]
            vs = sgn * self.V[self.tr_s[e]]
            vg = sgn * self.V[self.tr_g[e]]
            if vd >= vs:
                hi = self.tr_d[e]; lo = self.tr_s[e]; vhi = vd; vlo = vs
            else:
                hi = self.tr_s[e]; lo = self.tr_d[e]; vhi = vs; vlo = vd
            vov = vg - vlo - self.tr_vth[e]
            if vov <= 0.0:
                continue
            vds = vhi - vlo
            clm = 1.0 + self.tr_lam[e] * vds
            i0 = self.tr_beta[e] * pow(vov, self.tr_alpha[e])
            if vds >= vov:
                ich = i0 * clm
                gm = self.tr_alpha[e] * i0 / vov * clm
                gds = i0 * self.tr_lam[e]
            else:
                x = vds / vov
                f = x * (2.0 - x)
                ich = i0 * f * clm
                gds = i0 * ((2.0 - 2.0 * x) / vov * clm + f * self.tr_lam[e])
                gm = clm * (self.tr_alpha[e] * i0 / vov * f - i0 * (2.0 - 2.0 * x) * x / vov)
            cur = sgn * ich
            g = self.tr_g[e]
            self.inject(hi, lo, cur)
            self.stamp(hi, lo, cur, g, gm)
            self.stamp(hi, lo, cur, hi, gds)
            self.stamp(hi, lo, cur, lo, -gm - gds)

    cdef int solve_linear(self) noexcept nogil:
        # in-place LU with partial pivoting on Jac; dV = -Jac^{-1} F
        cdef int n = self.nf, i, j, k, p
        cdef double amax, tmp, fac
        for i in range(n):
            self.dV[i] = -self.F[i]
        for k in range(n):
            p = k
            amax = fabs(self.Jac[k, k])
            for i in range(k + 1, n):
                if fabs(self.Jac[i, k]) > amax:
                    amax = fabs(self.Jac[i, k])
                    p = i
            if amax == 0.0:
                return 0
            if p != k:
                for j in range(n):
                    tmp = self.Jac[k, j]; self.Jac[k, j] = self.Jac[p, j]; self.Jac[p, j] = tmp
                tmp = self.dV[k]; self.dV[k] = self.dV[p]; self.dV[p] = tmp
            for i in range(k + 1, n):
                fac = self.Jac[i, k] / self.Jac[k, k]
                if fac != 0.0:
                    for j in range(k + 1, n):
                        self.Jac[i, j] -= fac * self.Jac[k, j]
                    self.dV[i] -= fac * self.dV[k]
        for i in range(n - 1, -1, -1):
            tmp = self.dV[i]
            for j in range(i + 1, n):
                tmp -= self.Jac[i, j] * self.dV[j]
            self.dV[i] = tmp / self.Jac[i, i]
        return 1

    cdef int newton(self, double t, double dt_inv) noexcept nogil:
        cdef int it, i
        cdef double fmax, dvm, scale
        self.set_sources(t)
        for it in range(self.maxiter):
            self.assemble(dt_inv)
            self.newton_iters += 1
            fmax = 0.0
            for i in range(self.nf):
                if fabs(self.F[i]) > fmax:
                    fmax = fabs(self.F[i])
            if fmax < self.abstol:
                return 1
            if not self.solve_linear():
                return 0
            dvm = 0.0
            for i in range(self.nf):
                if fabs(self.dV[i]) > dvm:
                    dvm = fabs(self.dV[i])
            scale = 1.0
            if dvm > self.dv_limit:
                scale = self.dv_limit / dvm
            for i in range(self.nf):
                self.V[i] += scale * self.dV[i]
        return 0

    cdef void branch_currents(self) noexcept nogil:
        cdef int e, hi, lo, s = self.supply
        cdef double sgn, vd, vs, vg, vhi, vlo, vov, vds, i0, ich, x, vb, u, gap, c, cur
        cdef double isup = 0.0
        for e in range(self.nr):
            cur = self.r_g[e] * (self.V[self.r_a[e]] - self.V[self.r_b[e]])
            self.i_res[e] = cur
            if self.r_a[e] == s:
                isup += cur
            elif self.r_b[e] == s:
                isup -= cur
        for e in range(self.nm):
            vb = self.V[self.mj_bot[e]] - self.V[self.mj_top[e]]
            u = (vb / self.mj_vh[e]) * (vb / self.mj_vh[e])
            gap = self.mj_gp[e] / (1.0 + self.mj_tmr[e] / (1.0 + u))
            c = self.cosl[self.mj_layer[e]]
            cur = (self.mj_gp[e] * 0.5 * (1.0 + c) + gap * 0.5 * (1.0 - c)) * vb
            self.i_mtj[e] = cur
            if self.mj_bot[e] == s:
                isup += cur
            elif self.mj_top[e] == s:
                isup -= cur
        if s >= 0:
            for e in range(self.nt):
                if self.tr_d[e] != s and self.tr_s[e] != s:
                    continue
                sgn = self.tr_type[e]
                vd = sgn * self.V[self.tr_d[e]]
                vs = sgn * self.V[self.tr_s[e]]
                vg = sgn * self.V[self.tr_g[e]]
                if vd >= vs:
                    hi = self.tr_d[e]; lo = self.tr_s[e]; vhi = vd; vlo = vs
                else:
                    hi = self.tr_s[e]; lo = self.tr_d[e]; vhi = vs; vlo = vd
                vov = vg - vlo - self.tr_vth[e]
                if vov <= 0.0:
                    continue
                vds = vhi - vlo
                i0 = self.tr_beta[e] * pow(vov, self.tr_alpha[e])
                if vds >= vov:
                    ich = i0 * (1.0 + self.tr_lam[e] * vds)
                else:
                    x = vds / vov
                    ich = i0 * x * (2.0 - x) * (1.0 + self.tr_lam[e] * vds)
                cur = sgn * ich
                if hi == s:
                    isup += cur
                else:
                    isup -= cur
            self.p_supply = self.V[s] * isup
        else:
            self.p_supply = 0.0

    cdef void llg_advance(self, double dt) noexcept nogil:
        cdef int l
        cdef double jstt, jshe
        cdef double* p
        for l in range(self.nl):
            p = &self.ly_par[l, 0]
            jstt = 0.0
            jshe = 0.0
            if self.ly_mtj[l] >= 0:
                jstt = self.i_mtj[self.ly_mtj[l]] / p[P_AREA]
            if self.ly_res[l] >= 0:
                jshe = p[P_SOTSIGN] * self.i_res[self.ly_res[l]] / p[P_XSEC]
            _rk4(&self.M[l, 0], p, jstt, jshe, dt)

    cdef int advance(self, double t, double dt, int depth) noexcept nogil:
        cdef int i
        cdef double p_old = self.p_supply
        if self.newton(t + dt, 1.0 / dt):
            self.branch_currents()
            self.llg_advance(dt)
            self.update_cos()
            self.energy += 0.5 * (p_old + self.p_supply) * dt
            for i in range(self.nn):
                self.Vprev[i] = self.V[i]
            return 1
        for i in range(self.nn):
            self.V[i] = self.Vprev[i]
        if depth >= self.max_halvings:
            self.fail_time = t + dt
            return 0
        if not self.advance(t, 0.5 * dt, depth + 1):
            return 0
        return self.advance(t + 0.5 * dt, 0.5 * dt, depth + 1)

    def dc(self, double t):
        """Operating point with capacitors open (gmin to ground on every node)."""
        self.update_cos()
        if not self.newton(t, 0.0):
            raise SolverError(t)
        for i in range(self.nn):
            self.Vprev[i] = self.V[i]
        return np.asarray(self.V).copy()

    def run(self, double t0, double dt, long nsteps, long rec_every,
            int mon_kind, int[::1] mon_idx, double[::1] mon_sign, double mon_thr,
            double mon_hold, double mon_tmin):
        cdef long nrec = nsteps // rec_every + 2, r = 0, step
        cdef int l, k, cond
        cdef int ok = 1
        cdef double t = t0, proj, since = -1.0, event = -1.0
        cdef int stopped = 0
        cdef double* p
        t_out = np.empty(nrec)
        v_out = np.empty((nrec, self.nn))
        m_out = np.empty((nrec, max(self.nl, 1), 3))
        imtj_out = np.empty((nrec, max(self.nm, 1)))
        isot_out = np.empty((nrec, max(self.nl, 1)))
        p_out = np.empty(nrec)
        e_out = np.empty(nrec)
        cdef double[::1] tv = t_out, pv = p_out, ev = e_out
        cdef double[:, ::1] vv = v_out, iv = imtj_out, sv = isot_out
        cdef double[:, :, ::1] mv = m_out

        self.set_sources(t0)
        for k in range(self.nn):
            self.Vprev[k] = self.V[k]
        self.update_cos()
        self.branch_currents()
        self.energy = 0.0
        self._record(r, t, tv, vv, mv, iv, sv, pv, ev)
        r += 1
        with nogil:
            for step in range(nsteps):
                ok = self.advance(t, dt, 0)
                if not ok:
                    break
                t = t0 + (step + 1) * dt
                if mon_kind != 0:
                    cond = 1
                    if mon_kind == 1:
                        for k in range(mon_idx.shape[0]):
                            l = mon_idx[k]
                            p = &self.ly_par[l, 0]
                            proj = (self.M[l, 0] * p[P_EASY] + self.M[l, 1] * p[P_EASY + 1]
                                    + self.M[l, 2] * p[P_EASY + 2])
                            if mon_sign[k] * proj < mon_thr:
                                cond = 0
                    else:
                        if fabs(self.V[mon_idx[0]] - self.V[mon_idx[1]]) < mon_thr:
                            cond = 0
                    if cond:
                        if since < 0.0:
                            since = t
                    else:
                        since = -1.0
                    if since >= 0.0 and t - since >= mon_hold and t >= mon_tmin:
                        event = since
                        stopped = 1
                if (step + 1) % rec_every == 0 or step == nsteps - 1 or stopped:
                    with gil:
                        self._record(r, t, tv, vv, mv, iv, sv, pv, ev)
                    r += 1
                if stopped:
                    break
        if not ok:
            raise SolverError(self.fail_time)
        return {
            "t": t_out[:r], "v": v_out[:r], "m": m_out[:r, :self.nl],
            "i_mtj": imtj_out[:r, :self.nm], "i_sot": isot_out[:r, :self.nl],
            "p_supply": p_out[:r], "e_cum": e_out[:r],
            "stopped": bool(stopped), "event": event if stopped else None,
            "v_final": np.asarray(self.V).copy(), "m_final": np.asarray(self.M)[:self.nl].copy(),
        }

    cdef void _record(self, long r, double t, double[::1] tv, double[:, ::1] vv,
                      double[:, :, ::1] mv, double[:, ::1] iv, double[:, ::1] sv,
                      double[::1] pv, double[::1] ev):
        cdef int k, l
        cdef double* p
        tv[r] = t
        for k in range(self.nn):
            vv[r, k] = self.V[k]
        for l in range(self.nl):
            mv[r, l, 0] = self.M[l, 0]
            mv[r, l, 1] = self.M[l, 1]
            mv[r, l, 2] = self.M[l, 2]
            p = &self.ly_par[l, 0]
            sv[r, l] = p[P_SOTSIGN] * self.i_res[self.ly_res[l]] if self.ly_res[l] >= 0 else 0.0
        for k in range(self.nm):
            iv[r, k] = self.i_mtj[k]
        pv[r] = self.p_supply
        ev[r] = self.energy


def transient(cc, double[::1] v0, double[:, ::1] m0, double t0, double dt, long nsteps,
              long rec_every, int mon_kind, int[::1] mon_idx, double[::1] mon_sign,
              double mon_thr, double mon_hold, double mon_tmin, double abstol=1e-12,
              int maxiter=60, int max_halvings=6, double dv_limit=0.3, double gmin=1e-12):
    eng = _Engine(cc, v0, m0, abstol, maxiter, max_halvings, dv_limit, gmin)
    out = eng.run(t0, dt, nsteps, rec_every, mon_kind, mon_idx, mon_sign, mon_thr,
                  mon_hold, mon_tmin)
    out["newton_iters"] = eng.newton_iters
    return out


def dc_operating_point(cc, double[::1] v0, double[:, ::1] m0, double t, double abstol=1e-12,
                       int maxiter=200, double dv_limit=0.3, double gmin=1e-12):
    eng = _Engine(cc, v0, m0, abstol, maxiter, 0, dv_limit, gmin)
    return eng.dc(t)
