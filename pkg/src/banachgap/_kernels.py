"""Hot numeric kernels, in numba-jitted and pure-numpy variants.

Every kernel exists twice with identical semantics:

* ``*_nb``  -- explicit loops compiled with ``@njit`` (default path),
* ``*_np``  -- vectorized numpy (fallback, selected via BANACHGAP_NO_NUMBA).

The module-level names (``descend``, ``oracle_circle``, ...) point at the
active variant.  ``IMPLEMENTATIONS`` exposes both for the benchmark and the
cross-consistency tests.

Conventions: maps are (n, d) float64 arrays, edges are parallel int64
arrays (u, v, mult) over non-loop edges.  The objective is

    R(F) = sum_e m_e * ||F[u]-F[v]||_q^p  /  sum_v ||F[v] - mean||_q^p,

i.e. the oriented-edge quotient with the global 1/2 and the one-per-
direction doubling cancelled.  Subgradients at kinks (p=1 or q=1) use 0.
"""

from __future__ import annotations

import math

import numpy as np

from ._accel import NUMBA_ACTIVE, active_mode, njit

__all__ = [
    "ratio_parts",
    "descend",
    "oracle_circle",
    "oracle_sphere",
    "kappa_residuals",
    "kappa_descend",
    "IMPLEMENTATIONS",
]

_ARMIJO = 1e-4
_BACKTRACKS = 60


# ======================================================================
# numba variants
# ======================================================================


@njit(cache=True, nogil=True)
def _ratio_parts_nb(F, eu, ev, em, p, q):
    n, d = F.shape
    E = 0.0
    D = 0.0
    if d == 1:
        # scalar maps: the coordinate norm is |x|, no q-root needed
        for e in range(eu.shape[0]):
            diff = abs(F[eu[e], 0] - F[ev[e], 0])
            if diff > 0.0:
                E += em[e] * diff**p
        for i in range(n):
            a = abs(F[i, 0])
            if a > 0.0:
                D += a**p
        return E, D
    for e in range(eu.shape[0]):
        u = eu[e]
        v = ev[e]
        nq = 0.0
        for j in range(d):
            nq += abs(F[u, j] - F[v, j]) ** q
        if nq > 0.0:
            E += em[e] * (nq ** (1.0 / q)) ** p
    for i in range(n):
        nq = 0.0
        for j in range(d):
            nq += abs(F[i, j]) ** q
        if nq > 0.0:
            D += (nq ** (1.0 / q)) ** p
    return E, D


@njit(cache=True, nogil=True)
def _center_nb(F):
    n, d = F.shape
    for j in range(d):
        mu = 0.0
        for i in range(n):
            mu += F[i, j]
        mu /= n
        for i in range(n):
            F[i, j] -= mu


@njit(cache=True, nogil=True)
def _grads_nb(F, eu, ev, em, p, q, gE, gD):
    n, d = F.shape
    gE[:] = 0.0
    gD[:] = 0.0
    E = 0.0
    if d == 1:
        D = 0.0
        for e in range(eu.shape[0]):
            dj = F[eu[e], 0] - F[ev[e], 0]
            if dj != 0.0:
                a = abs(dj)
                E += em[e] * a**p
                t = em[e] * p * a ** (p - 1.0) * (1.0 if dj > 0.0 else -1.0)
                gE[eu[e], 0] += t
                gE[ev[e], 0] -= t
        for i in range(n):
            fj = F[i, 0]
            if fj != 0.0:
                a = abs(fj)
                D += a**p
                gD[i, 0] = p * a ** (p - 1.0) * (1.0 if fj > 0.0 else -1.0)
        return E, D
    for e in range(eu.shape[0]):
        u = eu[e]
        v = ev[e]
        nq = 0.0
        for j in range(d):
            nq += abs(F[u, j] - F[v, j]) ** q
        if nq <= 0.0:
            continue
        nrm = nq ** (1.0 / q)
        E += em[e] * nrm ** p
        c = em[e] * p * nrm ** (p - q)
        for j in range(d):
            dj = F[u, j] - F[v, j]
            if dj != 0.0:
                t = c * abs(dj) ** (q - 1.0) * (1.0 if dj > 0.0 else -1.0)
                gE[u, j] += t
                gE[v, j] -= t
    D = 0.0
    for i in range(n):
        nq = 0.0
        for j in range(d):
            nq += abs(F[i, j]) ** q
        if nq <= 0.0:
            continue
        nrm = nq ** (1.0 / q)
        D += nrm ** p
        c = p * nrm ** (p - q)
        for j in range(d):
            fj = F[i, j]
            if fj != 0.0:
                gD[i, j] = c * abs(fj) ** (q - 1.0) * (1.0 if fj > 0.0 else -1.0)
    return E, D


@njit(cache=True, nogil=True)
def _descend_nb(F0, eu, ev, em, p, q, max_iter, tol):
    F = F0.copy()
    _center_nb(F)
    _, D0 = _ratio_parts_nb(F, eu, ev, em, p, q)
    if D0 <= 0.0:
        return F, np.inf, 0, 0.0
    F /= D0 ** (1.0 / p)
    E, D = _ratio_parts_nb(F, eu, ev, em, p, q)
    bestR = E / D
    bestF = F.copy()
    gE = np.zeros_like(F)
    gD = np.zeros_like(F)
    eta = 0.25
    step = 0.0
    it = 0
    while it < max_iter:
        it += 1
        E, D = _grads_nb(F, eu, ev, em, p, q, gE, gD)
        R = E / D
        g = (gE - R * gD) / D
        _center_nb(g)
        g2 = 0.0
        for i in range(g.shape[0]):
            for j in range(g.shape[1]):
                g2 += g[i, j] * g[i, j]
        if g2 < 1e-30:
            break
        eta_try = eta * 4.0
        accepted = False
        R2 = R
        F2 = F
        for _ in range(_BACKTRACKS):
            F2 = F - eta_try * g
            _center_nb(F2)
            E2, D2 = _ratio_parts_nb(F2, eu, ev, em, p, q)
            if D2 > 0.0:
                F2 /= D2 ** (1.0 / p)
                E2, D2 = _ratio_parts_nb(F2, eu, ev, em, p, q)
                R2 = E2 / D2
                if R2 <= R - _ARMIJO * eta_try * g2:
                    accepted = True
                    break
            eta_try *= 0.5
        if not accepted:
            break
        eta = eta_try
        step = 0.0
        for i in range(F.shape[0]):
            for j in range(F.shape[1]):
                dd = F2[i, j] - F[i, j]
                step += dd * dd
        step = math.sqrt(step)
        F = F2
        if R2 < bestR:
            bestR = R2
            bestF = F.copy()
        if step < tol:
            break
    return bestF, bestR, it, step


@njit(cache=True, nogil=True)
def _oracle_circle_nb(b1, b2, eu, ev, em, p, npts):
    h = math.pi / npts
    best = np.inf
    best_t = 0.0
    prev = 0.0
    maxjump = 0.0
    n = b1.shape[0]
    f = np.empty((n, 1))
    for k in range(npts):
        t = k * h
        c = math.cos(t)
        s = math.sin(t)
        for i in range(n):
            f[i, 0] = c * b1[i] + s * b2[i]
        E, D = _ratio_parts_nb(f, eu, ev, em, p, 2.0)
        R = E / D
        if R < best:
            best = R
            best_t = t
        if k > 0:
            jump = abs(R - prev)
            if jump > maxjump:
                maxjump = jump
        prev = R
    return best, best_t, maxjump


@njit(cache=True, nogil=True)
def _oracle_sphere_nb(b1, b2, b3, eu, ev, em, p, nth, nph):
    hth = math.pi / (nth - 1)
    hph = 2.0 * math.pi / nph
    best = np.inf
    best_th = 0.0
    best_ph = 0.0
    maxjump = 0.0
    n = b1.shape[0]
    f = np.empty((n, 1))
    prev_row = np.zeros(nph)
    row = np.zeros(nph)
    for a in range(nth):
        th = a * hth
        st = math.sin(th)
        ct = math.cos(th)
        prevR = 0.0
        for b in range(nph):
            ph = b * hph
            x = st * math.cos(ph)
            y = st * math.sin(ph)
            for i in range(n):
                f[i, 0] = x * b1[i] + y * b2[i] + ct * b3[i]
            E, D = _ratio_parts_nb(f, eu, ev, em, p, 2.0)
            R = E / D
            row[b] = R
            if R < best:
                best = R
                best_th = th
                best_ph = ph
            if b > 0:
                jump = abs(R - prevR)
                if jump > maxjump:
                    maxjump = jump
            if a > 0:
                jump = abs(R - prev_row[b])
                if jump > maxjump:
                    maxjump = jump
            prevR = R
        tmp = prev_row
        prev_row = row
        row = tmp
    return best, best_th, best_ph, maxjump


@njit(cache=True, nogil=True)
def _kappa_residuals_nb(xi, perms, p):
    g = perms.shape[0]
    m, d = xi.shape
    r = np.zeros(g)
    for s in range(g):
        acc = 0.0
        for v in range(m):
            w = perms[s, v]
            for j in range(d):
                acc += abs(xi[w, j] - xi[v, j]) ** p
        r[s] = acc ** (1.0 / p)
    return r


@njit(cache=True, nogil=True)
def _kappa_normalize_nb(xi, p):
    m, d = xi.shape
    for j in range(d):
        mu = 0.0
        for i in range(m):
            mu += xi[i, j]
        mu /= m
        for i in range(m):
            xi[i, j] -= mu
    S = 0.0
    for i in range(m):
        for j in range(d):
            S += abs(xi[i, j]) ** p
    if S > 0.0:
        xi /= S ** (1.0 / p)
    return S


@njit(cache=True, nogil=True)
def _kappa_smoothed_nb(r, beta):
    rmax = r[0]
    for i in range(r.shape[0]):
        if r[i] > rmax:
            rmax = r[i]
    acc = 0.0
    for i in range(r.shape[0]):
        acc += math.exp(beta * (r[i] - rmax))
    return rmax + math.log(acc) / beta


@njit(cache=True, nogil=True)
def _kappa_grad_nb(xi, perms, p, beta, grad):
    g = perms.shape[0]
    m, d = xi.shape
    r = _kappa_residuals_nb(xi, perms, p)
    rmax = r[0]
    for i in range(g):
        if r[i] > rmax:
            rmax = r[i]
    wsum = 0.0
    w = np.empty(g)
    for i in range(g):
        w[i] = math.exp(beta * (r[i] - rmax))
        wsum += w[i]
    grad[:] = 0.0
    for s in range(g):
        ws = w[s] / wsum
        if r[s] <= 0.0 or ws == 0.0:
            continue
        scale = ws * r[s] ** (1.0 - p)
        for v in range(m):
            wv = perms[s, v]
            for j in range(d):
                u = xi[wv, j] - xi[v, j]
                if u != 0.0:
                    t = scale * abs(u) ** (p - 1.0) * (1.0 if u > 0.0 else -1.0)
                    grad[wv, j] += t
                    grad[v, j] -= t
    return rmax + math.log(wsum) / beta, r


@njit(cache=True, nogil=True)
def _kappa_descend_nb(xi0, perms, p, betas, iters_per_stage, tol):
    xi = xi0.copy()
    _kappa_normalize_nb(xi, p)
    r = _kappa_residuals_nb(xi, perms, p)
    best = r.max()
    best_xi = xi.copy()
    grad = np.zeros_like(xi)
    total_it = 0
    for bi in range(betas.shape[0]):
        beta = betas[bi]
        eta = 0.25
        it = 0
        while it < iters_per_stage:
            it += 1
            total_it += 1
            fsm, r = _kappa_grad_nb(xi, perms, p, beta, grad)
            for j in range(grad.shape[1]):
                mu = 0.0
                for i in range(grad.shape[0]):
                    mu += grad[i, j]
                mu /= grad.shape[0]
                for i in range(grad.shape[0]):
                    grad[i, j] -= mu
            g2 = 0.0
            for i in range(grad.shape[0]):
                for j in range(grad.shape[1]):
                    g2 += grad[i, j] * grad[i, j]
            if g2 < 1e-30:
                break
            eta_try = eta * 4.0
            accepted = False
            for _ in range(_BACKTRACKS):
                xi2 = xi - eta_try * grad
                S = _kappa_normalize_nb(xi2, p)
                if S > 0.0:
                    r2 = _kappa_residuals_nb(xi2, perms, p)
                    f2 = _kappa_smoothed_nb(r2, beta)
                    if f2 <= fsm - _ARMIJO * eta_try * g2:
                        accepted = True
                        tru = r2.max()
                        if tru < best:
                            best = tru
                            best_xi = xi2.copy()
                        break
                eta_try *= 0.5
            if not accepted:
                break
            eta = eta_try
            step = 0.0
            for i in range(xi.shape[0]):
                for j in range(xi.shape[1]):
                    dd = xi2[i, j] - xi[i, j]
                    step += dd * dd
            xi = xi2
            if math.sqrt(step) < tol:
                break
    return best_xi, best, total_it


# ======================================================================
# numpy variants
# ======================================================================


def _ratio_parts_np(F, eu, ev, em, p, q):
    if eu.shape[0]:
        diff = F[eu] - F[ev]
        nrm = (np.abs(diff) ** q).sum(axis=1) ** (1.0 / q)
        E = float((em * nrm**p).sum())
    else:
        E = 0.0
    vn = (np.abs(F) ** q).sum(axis=1) ** (1.0 / q)
    return E, float((vn**p).sum())


def _grads_np(F, eu, ev, em, p, q):
    gE = np.zeros_like(F)
    if eu.shape[0]:
        diff = F[eu] - F[ev]
        nq = (np.abs(diff) ** q).sum(axis=1)
        pos = nq > 0.0
        nrm = np.where(pos, nq, 1.0) ** (1.0 / q)
        E = float((em[pos] * nrm[pos] ** p).sum())
        c = np.where(pos, em * p * nrm ** (p - q), 0.0)
        t = c[:, None] * np.abs(diff) ** (q - 1.0) * np.sign(diff)
        np.add.at(gE, eu, t)
        np.subtract.at(gE, ev, t)
    else:
        E = 0.0
    nq = (np.abs(F) ** q).sum(axis=1)
    pos = nq > 0.0
    nrm = np.where(pos, nq, 1.0) ** (1.0 / q)
    D = float((nrm[pos] ** p).sum())
    c = np.where(pos, p * nrm ** (p - q), 0.0)
    gD = c[:, None] * np.abs(F) ** (q - 1.0) * np.sign(F)
    return E, D, gE, gD


def _descend_np(F0, eu, ev, em, p, q, max_iter, tol):
    F = F0.copy()
    F -= F.mean(axis=0)
    _, D0 = _ratio_parts_np(F, eu, ev, em, p, q)
    if D0 <= 0.0:
        return F, np.inf, 0, 0.0
    F /= D0 ** (1.0 / p)
    E, D = _ratio_parts_np(F, eu, ev, em, p, q)
    bestR = E / D
    bestF = F.copy()
    eta = 0.25
    step = 0.0
    it = 0
    while it < max_iter:
        it += 1
        E, D, gE, gD = _grads_np(F, eu, ev, em, p, q)
        R = E / D
        g = (gE - R * gD) / D
        g -= g.mean(axis=0)
        g2 = float((g * g).sum())
        if g2 < 1e-30:
            break
        eta_try = eta * 4.0
        accepted = False
        R2 = R
        F2 = F
        for _ in range(_BACKTRACKS):
            F2 = F - eta_try * g
            F2 -= F2.mean(axis=0)
            E2, D2 = _ratio_parts_np(F2, eu, ev, em, p, q)
            if D2 > 0.0:
                F2 = F2 / D2 ** (1.0 / p)
                E2, D2 = _ratio_parts_np(F2, eu, ev, em, p, q)
                R2 = E2 / D2
                if R2 <= R - _ARMIJO * eta_try * g2:
                    accepted = True
                    break
            eta_try *= 0.5
        if not accepted:
            break
        eta = eta_try
        step = float(np.sqrt(((F2 - F) ** 2).sum()))
        F = F2
        if R2 < bestR:
            bestR = R2
            bestF = F.copy()
        if step < tol:
            break
    return bestF, bestR, it, step


def _oracle_circle_np(b1, b2, eu, ev, em, p, npts, chunk=65536):
    h = math.pi / npts
    best = np.inf
    best_t = 0.0
    maxjump = 0.0
    prev_last = None
    for start in range(0, npts, chunk):
        ts = (np.arange(start, min(start + chunk, npts))) * h
        # grid evaluations: (n, chunk) map values
        Fs = np.outer(b1, np.cos(ts)) + np.outer(b2, np.sin(ts))
        R = _batch_ratio_np(Fs, eu, ev, em, p)
        k = int(np.argmin(R))
        if R[k] < best:
            best = float(R[k])
            best_t = float(ts[k])
        if R.shape[0] > 1:
            maxjump = max(maxjump, float(np.abs(np.diff(R)).max()))
        if prev_last is not None:
            maxjump = max(maxjump, abs(float(R[0]) - prev_last))
        prev_last = float(R[-1])
    return best, best_t, maxjump


def _oracle_sphere_np(b1, b2, b3, eu, ev, em, p, nth, nph):
    hth = math.pi / (nth - 1)
    hph = 2.0 * math.pi / nph
    phs = np.arange(nph) * hph
    best = np.inf
    best_th = 0.0
    best_ph = 0.0
    maxjump = 0.0
    prev_row = None
    for a in range(nth):
        th = a * hth
        x = math.sin(th) * np.cos(phs)
        y = math.sin(th) * np.sin(phs)
        Fs = np.outer(b1, x) + np.outer(b2, y) + math.cos(th) * b3[:, None]
        R = _batch_ratio_np(Fs, eu, ev, em, p)
        k = int(np.argmin(R))
        if R[k] < best:
            best = float(R[k])
            best_th = th
            best_ph = float(phs[k])
        if nph > 1:
            maxjump = max(maxjump, float(np.abs(np.diff(R)).max()))
        if prev_row is not None:
            maxjump = max(maxjump, float(np.abs(R - prev_row).max()))
        prev_row = R
    return best, best_th, best_ph, maxjump


def _batch_ratio_np(Fs, eu, ev, em, p):
    """Fs: (n, batch) scalar maps evaluated columnwise."""
    E = (em[:, None] * np.abs(Fs[eu] - Fs[ev]) ** p).sum(axis=0)
    D = (np.abs(Fs - Fs.mean(axis=0)) ** p).sum(axis=0)
    return E / D


def _kappa_residuals_np(xi, perms, p):
    diff = xi[perms] - xi[None, :, :]
    return ((np.abs(diff) ** p).sum(axis=(1, 2))) ** (1.0 / p)


def _kappa_normalize_np(xi, p):
    xi -= xi.mean(axis=0)
    S = float((np.abs(xi) ** p).sum())
    if S > 0.0:
        xi /= S ** (1.0 / p)
    return S


def _kappa_smoothed_np(r, beta):
    rmax = float(r.max())
    return rmax + math.log(float(np.exp(beta * (r - rmax)).sum())) / beta


def _kappa_grad_np(xi, perms, p, beta):
    r = _kappa_residuals_np(xi, perms, p)
    rmax = float(r.max())
    w = np.exp(beta * (r - rmax))
    wsum = float(w.sum())
    w = w / wsum
    grad = np.zeros_like(xi)
    for s in range(perms.shape[0]):
        if r[s] <= 0.0 or w[s] == 0.0:
            continue
        u = xi[perms[s]] - xi
        t = (w[s] * r[s] ** (1.0 - p)) * np.abs(u) ** (p - 1.0) * np.sign(u)
        grad[perms[s]] += t
        grad -= t
    return rmax + math.log(wsum) / beta, r, grad


def _kappa_descend_np(xi0, perms, p, betas, iters_per_stage, tol):
    xi = xi0.copy()
    _kappa_normalize_np(xi, p)
    r = _kappa_residuals_np(xi, perms, p)
    best = float(r.max())
    best_xi = xi.copy()
    total_it = 0
    for beta in betas:
        eta = 0.25
        it = 0
        while it < iters_per_stage:
            it += 1
            total_it += 1
            fsm, r, grad = _kappa_grad_np(xi, perms, p, beta)
            grad -= grad.mean(axis=0)
            g2 = float((grad * grad).sum())
            if g2 < 1e-30:
                break
            eta_try = eta * 4.0
            accepted = False
            for _ in range(_BACKTRACKS):
                xi2 = xi - eta_try * grad
                S = _kappa_normalize_np(xi2, p)
                if S > 0.0:
                    r2 = _kappa_residuals_np(xi2, perms, p)
                    f2 = _kappa_smoothed_np(r2, beta)
                    if f2 <= fsm - _ARMIJO * eta_try * g2:
                        accepted = True
                        tru = float(r2.max())
                        if tru < best:
                            best = tru
                            best_xi = xi2.copy()
                        break
                eta_try *= 0.5
            if not accepted:
                break
            eta = eta_try
            step = float(np.sqrt(((xi2 - xi) ** 2).sum()))
            xi = xi2
            if step < tol:
                break
    return best_xi, best, total_it


# ======================================================================
# dispatch
# ======================================================================

IMPLEMENTATIONS: dict[str, dict | None] = {
    "numpy": {
        "ratio_parts": _ratio_parts_np,
        "descend": _descend_np,
        "oracle_circle": _oracle_circle_np,
        "oracle_sphere": _oracle_sphere_np,
        "kappa_residuals": _kappa_residuals_np,
        "kappa_descend": _kappa_descend_np,
    },
    "numba": None,
}

if NUMBA_ACTIVE:
    IMPLEMENTATIONS["numba"] = {
        "ratio_parts": _ratio_parts_nb,
        "descend": _descend_nb,
        "oracle_circle": _oracle_circle_nb,
        "oracle_sphere": _oracle_sphere_nb,
        "kappa_residuals": _kappa_residuals_nb,
        "kappa_descend": _kappa_descend_nb,
    }

_ACTIVE = IMPLEMENTATIONS[active_mode()]
assert _ACTIVE is not None

ratio_parts = _ACTIVE["ratio_parts"]
descend = _ACTIVE["descend"]
oracle_circle = _ACTIVE["oracle_circle"]
oracle_sphere = _ACTIVE["oracle_sphere"]
kappa_residuals = _ACTIVE["kappa_residuals"]
kappa_descend = _ACTIVE["kappa_descend"]
