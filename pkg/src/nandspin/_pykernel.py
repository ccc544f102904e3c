"""Pure-Python twin of ``_kernel.pyx``.

Same algorithms, same argument layout, scalar float arithmetic for the tiny
3-vectors and numpy only for the dense linear solve. Selected automatically
when the compiled extension is unavailable.
"""
from __future__ import annotations

import math

import numpy as np

from nandspin.errors import SolverError
from nandspin.layout import (P_ALPHA, P_AREA, P_ETA, P_GMU0, P_HK, P_LAM, P_MEFF, P_POL,
                             P_SOTSIGN, P_XI, P_XSEC)

_EASY, _HEXT, _MP, _SIG = 1, 8, 11, 14


def _rhs(m, p, jstt, jshe):
    mx, my, mz = m
    ex, ey, ez = p[_EASY], p[_EASY + 1], p[_EASY + 2]
    proj = mx * ex + my * ey + mz * ez
    hk = p[P_HK]
    hx = hk * proj * ex + p[_HEXT]
    hy = hk * proj * ey + p[_HEXT + 1]
    hz = hk * proj * ez + p[_HEXT + 2] - p[P_MEFF] * mz
    # m x H and m x (m x H)
    ax, ay, az = my * hz - mz * hy, mz * hx - mx * hz, mx * hy - my * hx
    bx, by, bz = my * az - mz * ay, mz * ax - mx * az, mx * ay - my * ax
    px, py, pz = p[_MP], p[_MP + 1], p[_MP + 2]
    cosang = mx * px + my * py + mz * pz
    lam2 = p[P_LAM] * p[P_LAM]
    phi = 2.0 * p[P_POL] * lam2 / ((lam2 + 1.0) + (lam2 - 1.0) * cosang)
    a_stt = p[P_XI] * phi * jstt
    a_sot = p[P_XI] * p[P_ETA] * jshe
    cx, cy, cz = my * pz - mz * py, mz * px - mx * pz, mx * py - my * px
    dx, dy, dz = my * cz - mz * cy, mz * cx - mx * cz, mx * cy - my * cx
    sx, sy, sz = p[_SIG], p[_SIG + 1], p[_SIG + 2]
    fx, fy, fz = my * sz - mz * sy, mz * sx - mx * sz, mx * sy - my * sx
    gx, gy, gz = my * fz - mz * fy, mz * fx - mx * fz, mx * fy - my * fx
    al = p[P_ALPHA]
    g = p[P_GMU0]
    pref = 1.0 / (1.0 + al * al)
    return (pref * (-g * ax - al * g * bx - a_stt * dx + al * a_stt * cx - a_sot * gx + al * a_sot * fx),
            pref * (-g * ay - al * g * by - a_stt * dy + al * a_stt * cy - a_sot * gy + al * a_sot * fy),
            pref * (-g * az - al * g * bz - a_stt * dz + al * a_stt * cz - a_sot * gz + al * a_sot * fz))


def _rk4(m, p, jstt, jshe, dt):
    k1 = _rhs(m, p, jstt, jshe)
    k2 = _rhs([m[i] + 0.5 * dt * k1[i] for i in range(3)], p, jstt, jshe)
    k3 = _rhs([m[i] + 0.5 * dt * k2[i] for i in range(3)], p, jstt, jshe)
    k4 = _rhs([m[i] + dt * k3[i] for i in range(3)], p, jstt, jshe)
    out = [m[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) for i in range(3)]
    norm = math.sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2])
    return [c / norm for c in out]


def llg_rhs(m, par, jstt, jshe):
    return np.array(_rhs(list(m), list(par), jstt, jshe))


def llg_integrate(m0, seg_t0, seg_par, seg_j, dt, nsteps, rec_every):
    """RK4 over piecewise-constant drive segments; returns (t, m) samples."""
    pars = [list(row) for row in np.asarray(seg_par)]
    js = [tuple(row) for row in np.asarray(seg_j)]
    t0s = list(seg_t0)
    m = list(m0)
    times, traj = [0.0], [tuple(m)]
    seg = 0
    for step in range(nsteps):
        t = step * dt
        while seg + 1 < len(t0s) and t0s[seg + 1] <= t + 1e-6 * dt:
            seg += 1
        m = _rk4(m, pars[seg], js[seg][0], js[seg][1], dt)
        if (step + 1) % rec_every == 0 or step == nsteps - 1:
            times.append((step + 1) * dt)
            traj.append(tuple(m))
    return np.array(times), np.array(traj)


def _channel(beta, vth, alpha, lam, vov, vds):
    """Alpha-power channel current plus (gm, gds) in the NFET frame."""
    clm = 1.0 + lam * vds
    i0 = beta * vov ** alpha
    if vds >= vov:
        return i0 * clm, alpha * i0 / vov * clm, i0 * lam
    x = vds / vov
    f = x * (2.0 - x)
    gds = i0 * ((2.0 - 2.0 * x) / vov * clm + f * lam)
    gm = clm * (alpha * i0 / vov * f - i0 * (2.0 - 2.0 * x) * x / vov)
    return i0 * f * clm, gm, gds


class _Engine:
    def __init__(self, cc, v0, m0, abstol, maxiter, max_halvings, dv_limit, gmin):
        self.nf = int(cc.n_free)
        self.nn = int(cc.n_nodes)
        self.tr = list(zip(cc.tr_type.tolist(), cc.tr_d.tolist(), cc.tr_g.tolist(),
                           cc.tr_s.tolist(), cc.tr_beta.tolist(), cc.tr_vth.tolist(),
                           cc.tr_alpha.tolist(), cc.tr_lam.tolist()))
        self.res = list(zip(cc.r_a.tolist(), cc.r_b.tolist(), cc.r_g.tolist()))
        self.mtj = list(zip(cc.mj_top.tolist(), cc.mj_bot.tolist(), cc.mj_layer.tolist(),
                            cc.mj_gp.tolist(), cc.mj_tmr.tolist(), cc.mj_vh.tolist()))
        self.cap = cc.cap.tolist()
        self.src = []
        ptr = cc.src_ptr.tolist()
        for k in range(self.nn - self.nf):
            self.src.append((cc.src_t[ptr[k]:ptr[k + 1]].tolist(), cc.src_v[ptr[k]:ptr[k + 1]].tolist()))
        self.ly_mtj = cc.ly_mtj.tolist()
        self.ly_res = cc.ly_res.tolist()
        self.ly_par = [list(row) for row in np.asarray(cc.ly_par)]
        self.nl = len(self.ly_mtj)
        self.supply = int(cc.supply)
        self.abstol = abstol
        self.maxiter = maxiter
        self.max_halvings = max_halvings
        self.dv_limit = dv_limit
        self.gmin = gmin
        self.V = [float(v) for v in v0]
        self.Vprev = list(self.V)
        self.M = [list(map(float, row)) for row in np.asarray(m0).reshape(-1, 3)][:self.nl]
        self.cosl = [0.0] * self.nl
        self.i_mtj = [0.0] * len(self.mtj)
        self.i_res = [0.0] * len(self.res)
        self.newton_iters = 0
        self.fail_time = -1.0
        self.p_supply = 0.0
        self.energy = 0.0

    def set_sources(self, t):
        for k, (ts, vs) in enumerate(self.src):
            if t <= ts[0]:
                v = vs[0]
            elif t >= ts[-1]:
                v = vs[-1]
            else:
                j = 0
                while ts[j + 1] < t:
                    j += 1
                w = (t - ts[j]) / (ts[j + 1] - ts[j])
                v = vs[j] + w * (vs[j + 1] - vs[j])
            self.V[self.nf + k] = v

    def update_cos(self):
        for l in range(self.nl):
            p = self.ly_par[l]
            m = self.M[l]
            self.cosl[l] = m[0] * p[_MP] + m[1] * p[_MP + 1] + m[2] * p[_MP + 2]

    def assemble(self, dt_inv):
        nf = self.nf
        V = self.V
        F = [0.0] * nf
        J = np.zeros((nf, nf))

        def add(a, b, cur, derivs):
            if a < nf:
                F[a] += cur
                for k, d in derivs:
                    if k < nf:
                        J[a, k] += d
            if b < nf:
                F[b] -= cur
                for k, d in derivs:
                    if k < nf:
                        J[b, k] -= d

        for i in range(nf):
            if dt_inv > 0.0:
                F[i] += self.cap[i] * dt_inv * (V[i] - self.Vprev[i])
                J[i, i] += self.cap[i] * dt_inv
            else:
                F[i] += self.gmin * V[i]
                J[i, i] += self.gmin
        for a, b, g in self.res:
            add(a, b, g * (V[a] - V[b]), ((a, g), (b, -g)))
        for top, bot, layer, gp, tmr, vh, in self.mtj:
            vb = V[bot] - V[top]
            u = (vb / vh) ** 2
            den = 1.0 + tmr / (1.0 + u)
            gap = gp / den
            dgap = gp * tmr * 2.0 * vb / (vh * vh * (1.0 + u) ** 2 * den * den)
            c = self.cosl[layer]
            gcond = gp * 0.5 * (1.0 + c) + gap * 0.5 * (1.0 - c)
            dcur = gcond + vb * dgap * 0.5 * (1.0 - c)
            add(bot, top, gcond * vb, ((bot, dcur), (top, -dcur)))
        for sgn, d, g, s, beta, vth, alpha, lam in self.tr:
            vd, vs, vg = sgn * V[d], sgn * V[s], sgn * V[g]
            if vd >= vs:
                hi, lo, vhi, vlo = d, s, vd, vs
            else:
                hi, lo, vhi, vlo = s, d, vs, vd
            vov = vg - vlo - vth
            if vov <= 0.0:
                continue
            ich, gm, gds = _channel(beta, vth, alpha, lam, vov, vhi - vlo)
            add(hi, lo, sgn * ich, ((g, gm), (hi, gds), (lo, -gm - gds)))
        return F, J

    def newton(self, t, dt_inv):
        self.set_sources(t)
        nf = self.nf
        for _ in range(self.maxiter):
            F, J = self.assemble(dt_inv)
            self.newton_iters += 1
            if max((abs(f) for f in F), default=0.0) < self.abstol:
                return True
            try:
                dv = np.linalg.solve(J, -np.asarray(F))
            except np.linalg.LinAlgError:
                return False
            dvm = float(np.max(np.abs(dv)))
            scale = self.dv_limit / dvm if dvm > self.dv_limit else 1.0
            for i in range(nf):
                self.V[i] += scale * float(dv[i])
        return False

    def branch_currents(self):
        V = self.V
        s = self.supply
        isup = 0.0
        for e, (a, b, g) in enumerate(self.res):
            cur = g * (V[a] - V[b])
            self.i_res[e] = cur
            if a == s:
                isup += cur
            elif b == s:
                isup -= cur
        for e, (top, bot, layer, gp, tmr, vh) in enumerate(self.mtj):
            vb = V[bot] - V[top]
            gap = gp / (1.0 + tmr / (1.0 + (vb / vh) ** 2))
            c = self.cosl[layer]
            cur = (gp * 0.5 * (1.0 + c) + gap * 0.5 * (1.0 - c)) * vb
            self.i_mtj[e] = cur
            if bot == s:
                isup += cur
            elif top == s:
                isup -= cur
        if s < 0:
            self.p_supply = 0.0
            return
        for sgn, d, g, src, beta, vth, alpha, lam in self.tr:
            if d != s and src != s:
                continue
            vd, vs, vg = sgn * V[d], sgn * V[src], sgn * V[g]
            if vd >= vs:
                hi, lo, vhi, vlo = d, src, vd, vs
            else:
                hi, lo, vhi, vlo = src, d, vs, vd
            vov = vg - vlo - vth
            if vov <= 0.0:
                continue
            cur = sgn * _channel(beta, vth, alpha, lam, vov, vhi - vlo)[0]
            isup += cur if hi == s else -cur
        self.p_supply = V[s] * isup

    def llg_advance(self, dt):
        for l in range(self.nl):
            p = self.ly_par[l]
            jstt = self.i_mtj[self.ly_mtj[l]] / p[P_AREA] if self.ly_mtj[l] >= 0 else 0.0
            jshe = p[P_SOTSIGN] * self.i_res[self.ly_res[l]] / p[P_XSEC] if self.ly_res[l] >= 0 else 0.0
            self.M[l] = _rk4(self.M[l], p, jstt, jshe, dt)

    def advance(self, t, dt, depth):
        p_old = self.p_supply
        if self.newton(t + dt, 1.0 / dt):
            self.branch_currents()
            self.llg_advance(dt)
            self.update_cos()
            self.energy += 0.5 * (p_old + self.p_supply) * dt
            self.Vprev = list(self.V)
            return True
        self.V = list(self.Vprev)
        if depth >= self.max_halvings:
            self.fail_time = t + dt
            return False
        if not self.advance(t, 0.5 * dt, depth + 1):
            return False
        return self.advance(t + 0.5 * dt, 0.5 * dt, depth + 1)

    def dc(self, t):
        self.update_cos()
        if not self.newton(t, 0.0):
            raise SolverError(t)
        self.Vprev = list(self.V)
        return np.array(self.V)

    def _proj(self, l):
        p, m = self.ly_par[l], self.M[l]
        return m[0] * p[_EASY] + m[1] * p[_EASY + 1] + m[2] * p[_EASY + 2]

    def run(self, t0, dt, nsteps, rec_every, mon_kind, mon_idx, mon_sign, mon_thr, mon_hold, mon_tmin):
        rec = {k: [] for k in ("t", "v", "m", "i_mtj", "i_sot", "p_supply", "e_cum")}

        def record(t):
            rec["t"].append(t)
            rec["v"].append(list(self.V))
            rec["m"].append([list(m) for m in self.M])
            rec["i_mtj"].append(list(self.i_mtj))
            rec["i_sot"].append([self.ly_par[l][P_SOTSIGN] * self.i_res[self.ly_res[l]]
                                 if self.ly_res[l] >= 0 else 0.0 for l in range(self.nl)])
            rec["p_supply"].append(self.p_supply)
            rec["e_cum"].append(self.energy)

        self.set_sources(t0)
        self.Vprev = list(self.V)
        self.update_cos()
        self.branch_currents()
        self.energy = 0.0
        record(t0)
        mon_idx = list(mon_idx)
        mon_sign = list(mon_sign)
        since, event, stopped = -1.0, -1.0, False
        t = t0
        for step in range(nsteps):
            if not self.advance(t, dt, 0):
                raise SolverError(self.fail_time)
            t = t0 + (step + 1) * dt
            if mon_kind != 0:
                if mon_kind == 1:
                    cond = all(sg * self._proj(l) >= mon_thr for l, sg in zip(mon_idx, mon_sign))
                else:
                    cond = abs(self.V[mon_idx[0]] - self.V[mon_idx[1]]) >= mon_thr
                if cond:
                    if since < 0.0:
                        since = t
                else:
                    since = -1.0
                if since >= 0.0 and t - since >= mon_hold and t >= mon_tmin:
                    event, stopped = since, True
            if (step + 1) % rec_every == 0 or step == nsteps - 1 or stopped:
                record(t)
            if stopped:
                break
        nl, nm = self.nl, len(self.mtj)
        return {
            "t": np.array(rec["t"]),
            "v": np.array(rec["v"]).reshape(-1, self.nn),
            "m": np.array(rec["m"]).reshape(-1, nl, 3),
            "i_mtj": np.array(rec["i_mtj"]).reshape(-1, nm),
            "i_sot": np.array(rec["i_sot"]).reshape(-1, nl),
            "p_supply": np.array(rec["p_supply"]),
            "e_cum": np.array(rec["e_cum"]),
            "stopped": stopped, "event": event if stopped else None,
            "v_final": np.array(self.V), "m_final": np.array(self.M).reshape(nl, 3),
        }


def transient(cc, v0, m0, t0, dt, nsteps, rec_every, mon_kind, mon_idx, mon_sign,
              mon_thr, mon_hold, mon_tmin, abstol=1e-12, maxiter=60, max_halvings=6,
              dv_limit=0.3, gmin=1e-12):
    eng = _Engine(cc, v0, m0, abstol, maxiter, max_halvings, dv_limit, gmin)
    out = eng.run(t0, dt, nsteps, rec_every, mon_kind, mon_idx, mon_sign, mon_thr,
                  mon_hold, mon_tmin)
    out["newton_iters"] = eng.newton_iters
    return out


def dc_operating_point(cc, v0, m0, t, abstol=1e-12, maxiter=200, dv_limit=0.3, gmin=1e-12):
    eng = _Engine(cc, v0, m0, abstol, maxiter, 0, dv_limit, gmin)
    return eng.dc(t)
