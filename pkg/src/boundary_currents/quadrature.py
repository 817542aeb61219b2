"""
Support-adapted quadrature on planar factors and their boundary curves.

The integrands met in pairings are products of mollifier-type bumps (smooth
but not analytic at their support edges), smooth partition-of-unity steps,
and a holomorphic factor that may blow up at one boundary point.  Gauss rules
converge fast only when those non-analytic curves sit on panel edges, so the
rules here are polar about an origin (the domain centre, or a boundary
anchor where f is singular) with per-ray radial breakpoints at every support
edge and transition curve, and angular breakpoints wherever the order of
those crossings along the ray changes.

Shapes are hashable tuples:
    ('box', x0, x1, y0, y1)     region, vanishing outside
    ('disc', cx, cy, R)          region, vanishing outside
    ('circle', cx, cy, R)        transition curve only
    ('level', lam)               transition on the elliptic level rho = lam
    ('wedge', alpha)             transition on the half-line at parameter angle alpha
"""

from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

__all__ = ["planar_rule", "boundary_rule", "points_per_panel"]


def points_per_panel(level):
    return 8 + 8 * level


def _gl(q):
    return np.polynomial.legendre.leggauss(q)


def _map(xw, a, b):
    x, w = xw
    h = 0.5 * (b - a)
    return 0.5 * (a + b) + h * x, h * w


def _curves(dom, regions, edges):
    """Flat list of curve shapes whose ray crossings are breakpoints."""
    seen, out = set(), []
    for sh in list(edges) + [s for reg in regions for s in reg]:
        if sh not in seen:
            seen.add(sh)
            out.append(sh)
    return out


def _conic_roots(O, e, cx, cy, ax, by):
    X, Y = (O.real - cx) / ax, (O.imag - cy) / by
    dx, dy = e.real / ax, e.imag / by
    A = dx * dx + dy * dy
    B = 2 * (X * dx + Y * dy)
    C = X * X + Y * Y - 1
    D = B * B - 4 * A * C
    sq = np.sqrt(np.where(D > 0, D, np.nan))
    return (-B - sq) / (2 * A), (-B + sq) / (2 * A)


def _segment_hit(O, e, P, Q):
    """rho with O + rho e on the segment [P, Q] (nan if none)."""
    u = Q - P
    det = e.real * (-u.imag) - e.imag * (-u.real)
    w = P - O
    with np.errstate(all="ignore"):
        rho = (w.real * (-u.imag) - w.imag * (-u.real)) / det
        s = (e.real * w.imag - e.imag * w.real) / det
    ok = (np.abs(det) > 1e-14) & (s >= 0) & (s <= 1)
    return np.where(ok, rho, np.nan)


def _hits(dom, O, e, curves):
    """Matrix of ray crossings (len(e), ncols) with nan for misses."""
    cols = []
    for sh in curves:
        kind = sh[0]
        if kind == "box":
            _, x0, x1, y0, y1 = sh
            c = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
            for i in range(4):
                cols.append(_segment_hit(O, e, c[i], c[(i + 1) % 4]))
        elif kind in ("disc", "circle"):
            cols += list(_conic_roots(O, e, sh[1], sh[2], sh[3], sh[3]))
        elif kind == "level":
            cols += list(_conic_roots(O, e, dom.center.real, dom.center.imag, dom.a * sh[1], dom.b * sh[1]))
        elif kind == "wedge":
            u = complex(dom.a * np.cos(sh[1]), dom.b * np.sin(sh[1]))
            cols.append(_segment_hit(O, e, dom.center, dom.center + 10 * (dom.a + dom.b) * u / abs(u)))
    if not cols:
        return np.zeros((e.size, 0))
    return np.stack([np.broadcast_to(c, e.shape) for c in cols], axis=1)


def _support_interval(dom, O, e, regions):
    """[lo, hi] per ray: hull over regions of the intersection within each, clipped to the domain."""
    R = dom.ray_exit(O, e)
    if not regions:
        return np.zeros_like(R), R
    lo_all = np.full(R.shape, np.inf)
    hi_all = np.full(R.shape, -np.inf)
    for reg in regions:
        lo, hi = np.zeros_like(R), R.copy()
        for sh in reg:
            if sh[0] == "box":
                _, x0, x1, y0, y1 = sh
                a, b = np.full(R.shape, -np.inf), np.full(R.shape, np.inf)
                for o, dcomp, p, q in ((O.real, e.real, x0, x1), (O.imag, e.imag, y0, y1)):
                    with np.errstate(all="ignore"):
                        s1, s2 = (p - o) / dcomp, (q - o) / dcomp
                    par = np.abs(dcomp) < 1e-15
                    inside = (p <= o) & (o <= q)
                    s1 = np.where(par, np.where(inside, -np.inf, np.inf), s1)
                    s2 = np.where(par, np.where(inside, np.inf, -np.inf), s2)
                    a = np.maximum(a, np.minimum(s1, s2))
                    b = np.minimum(b, np.maximum(s1, s2))
            else:
                a, b = _conic_roots(O, e, sh[1], sh[2], sh[3], sh[3])
                a, b = np.where(np.isnan(a), np.inf, a), np.where(np.isnan(b), -np.inf, b)
            lo, hi = np.maximum(lo, a), np.minimum(hi, b)
        ok = hi > lo
        lo_all = np.where(ok, np.minimum(lo_all, lo), lo_all)
        hi_all = np.where(ok, np.maximum(hi_all, hi), hi_all)
    return lo_all, hi_all


def _signature(dom, O, th, curves, regions):
    e = np.exp(1j * np.atleast_1d(th))
    lo, hi = _support_interval(dom, O, e, regions)
    H = _hits(dom, O, e, curves)
    empty = ~(hi > lo)
    tol = 1e-12
    valid = (H > lo[:, None] - tol) & (H < hi[:, None] + tol) & ~empty[:, None]
    key = np.where(valid, H, np.inf)
    order = np.argsort(key, axis=1, kind="stable")
    order = np.where(np.take_along_axis(valid, order, axis=1), order, -1)
    return np.concatenate([empty[:, None].astype(int), order], axis=1)


def _theta_breaks(dom, O, lo, hi, curves, regions, n=4096):
    th = np.linspace(lo, hi, n + 1)[1:-1]
    sig = _signature(dom, O, th, curves, regions)
    change = np.nonzero(np.any(sig[1:] != sig[:-1], axis=1))[0]
    out = []
    for i in change:
        a, b = th[i], th[i + 1]
        sa = sig[i]
        for _ in range(45):
            m = 0.5 * (a + b)
            if np.array_equal(_signature(dom, O, m, curves, regions)[0], sa):
                a = m
            else:
                b = m
        out.append(0.5 * (a + b))
    return out


@lru_cache(maxsize=256)
def planar_rule(dom, level, anchor, regions, edges, K=16, graded=2):
    """Adapted polar rule on a planar factor.

    ``regions`` is a tuple of region-lists; the integrand is assumed to
    vanish outside the union over lists of the intersection within a list
    (an empty tuple means no restriction).  ``edges`` lists transition shapes.
    ``anchor`` is a boundary parameter (polar about gamma(anchor)) or None.
    ``graded`` refines panels geometrically toward the anchor: 1 in radius,
    2 also toward the two tangent directions, where a strongly singular f
    varies on the scale of its distance to the anchor.
    Angular panel edges sit wherever the ordering of crossings along the ray
    changes; radial panel edges sit at the crossings.  Returns (nodes, weights).
    """
    q = points_per_panel(level)
    gl = _gl(q)
    glg = _gl(max(6, q // 2))
    if anchor is None:
        O = dom.center
        lo, hi = -np.pi, np.pi
    else:
        O = complex(dom.gamma(anchor))
        th_in = float(np.angle(-dom.normal(anchor)))
        lo, hi = th_in - np.pi / 2, th_in + np.pi / 2
    if any(not r for r in regions):
        regions = ()
    curves = _curves(dom, regions, edges)
    breaks = _theta_breaks(dom, O, lo, hi, curves, regions)
    if anchor is None:
        # rays from the centre never cross the wedge half-lines, they run along them
        for sh in curves:
            if sh[0] == "wedge":
                a = float(np.angle(complex(dom.a * np.cos(sh[1]), dom.b * np.sin(sh[1]))))
                breaks.append(a if a >= lo else a + 2 * np.pi)
    th_edges = [lo] + sorted(b for b in set(breaks) if lo < b < hi) + [hi]
    # near the tangent directions of an anchored rule the rays are short and
    # a near-singular f varies on the scale of its distance to the anchor
    th_panels = []
    for a, b in zip(th_edges[:-1], th_edges[1:]):
        if b - a < 1e-12:
            continue
        if graded >= 2 and anchor is not None and (a == lo or b == hi):
            g = np.array([0.0] + [2.0 ** -j for j in range(K, 0, -1)] + [1.0])
            g = a + (b - a) * (g if a == lo else 1 - g[::-1])
            th_panels += [(ga, gb, glg if min(gb - lo, hi - ga) < 0.5 * (b - a) else gl)
                          for ga, gb in zip(g[:-1], g[1:])]
        else:
            th_panels.append((a, b, gl))
    nodes, weights = [], []
    for a, b, rule in th_panels:
        mid = 0.5 * (a + b)
        if _signature(dom, O, mid, curves, regions)[0, 0]:
            continue  # no support along these rays
        ths, wths = _map(rule, a, b)
        e = np.exp(1j * ths)
        slo, shi = _support_interval(dom, O, e, regions)
        H = _hits(dom, O, e, curves)
        for i in range(ths.size):
            r0, r1 = slo[i], shi[i]
            if not r1 > r0:
                continue
            h = H[i]
            h = np.sort(h[(h > r0 + 1e-12) & (h < r1 - 1e-12)])
            r_edges = np.concatenate([[r0], h, [r1]])
            for k in range(r_edges.size - 1):
                ra, rb = r_edges[k], r_edges[k + 1]
                if rb - ra <= 1e-14:
                    continue
                if graded >= 1 and k == 0 and ra == 0.0 and anchor is not None:
                    g = [0.0] + [rb * 2.0 ** -j for j in range(K, 0, -1)] + [rb]
                    for ga, gb in zip(g[:-1], g[1:]):
                        rr, wr = _map(glg if gb < 0.5 * rb else gl, ga, gb)
                        nodes.append(O + rr * e[i])
                        weights.append(wths[i] * wr * rr)
                else:
                    rr, wr = _map(gl, ra, rb)
                    nodes.append(O + rr * e[i])
                    weights.append(wths[i] * wr * rr)
    if not nodes:
        return np.zeros(0, complex), np.zeros(0)
    return np.concatenate(nodes), np.concatenate(weights)


def _crossings(dom, shape, n=2048):
    t = np.linspace(0, 2 * np.pi, n + 1)
    kind = shape[0]
    if kind == "box":
        _, x0, x1, y0, y1 = shape
        xm, ym, hx, hy = 0.5 * (x0 + x1), 0.5 * (y0 + y1), 0.5 * (x1 - x0), 0.5 * (y1 - y0)

        def g(tt):
            z = dom.gamma(tt)
            return np.maximum(np.abs(z.real - xm) / hx, np.abs(z.imag - ym) / hy) - 1
    elif kind in ("disc", "circle"):
        _, cx, cy, R = shape

        def g(tt):
            return np.abs(dom.gamma(tt) - complex(cx, cy)) ** 2 - R * R
    else:
        return []
    v = g(t)
    out = []
    for i in np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]:
        out.append(brentq(g, t[i], t[i + 1], xtol=1e-14))
    return out


@lru_cache(maxsize=256)
def boundary_rule(dom, level, anchor, edges, K=14):
    """Rule on one period of the boundary parameter.

    Breakpoints at the given parameter angles (('wedge', alpha) shapes) and at
    boundary crossings of box/disc/circle shapes; geometric grading toward
    the anchor parameter from both sides.
    """
    q = points_per_panel(level)
    gl = _gl(q)
    glg = _gl(max(6, q // 2))
    start = 0.0 if anchor is None else float(anchor)
    bps = []
    for sh in edges:
        if sh[0] == "wedge":
            bps.append(sh[1])
        else:
            bps += _crossings(dom, sh)
    bps = sorted({float(start + (b - start) % (2 * np.pi)) for b in bps})
    bps = [b for b in bps if start + 1e-9 < b < start + 2 * np.pi - 1e-9]
    edges_t = [start] + bps + [start + 2 * np.pi]
    # at least a few panels so trapezoid-like smooth parts resolve
    refined = []
    for a, b in zip(edges_t[:-1], edges_t[1:]):
        m = max(1, int(np.ceil((b - a) / (np.pi / 4))))
        refined += list(np.linspace(a, b, m + 1)[:-1])
    refined.append(edges_t[-1])
    ts, ws = [], []
    n = len(refined) - 1
    for i, (a, b) in enumerate(zip(refined[:-1], refined[1:])):
        if anchor is not None and (i == 0 or i == n - 1):
            L = b - a
            if i == 0:
                g = [a] + [a + L * 2.0 ** -j for j in range(K, 0, -1)] + [b]
            else:
                g = [a] + [b - L * 2.0 ** -j for j in range(1, K + 1)] + [b]
            for ga, gb in zip(g[:-1], g[1:]):
                x, w = _map(glg if (gb - ga) < 0.5 * L else gl, ga, gb)
                ts.append(x)
                ws.append(w)
        else:
            x, w = _map(gl, a, b)
            ts.append(x)
            ws.append(w)
    return np.concatenate(ts), np.concatenate(ws)
