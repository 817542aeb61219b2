"""
Numerical pairings of currents attached to a holomorphic f with test forms.

Two routes to the canonical extension:

* limit route: Richardson extrapolation over eps of integrals of
  f(z - eps v) against the test form, localised by a partition of unity whose
  boundary pieces each carry their own outward vector v;
* integration-by-parts route: with T = a d/dzbar, a = 1/(dr/dzbar),

      <ce f, phi> = sum_S int (prod_{j in S} r_j^{s_j}/s_j!) f prod_{j in S} (T_j*)^{s_j} (chi_S phi_0) dV,

  which has a continuous integrand and needs no limit.  The subset sum
  factorises into prod_k (G0_k + G1_k), so one tensor contraction suffices.

Boundary pairings (faces, the distinguished torus) use the limit route.
"""

import itertools
from dataclasses import dataclass, field, replace
from functools import lru_cache
from math import ceil, factorial

import numpy as np

from .extrapolation import richardson_table
from .forms import (FaceForm, TestForm, VectorFieldT, dbar, pullback_to_face,
                    slot_jet, slot_value, volume_density_factor, RadialBump)
from .geometry import PlanarRule, as_product, boundary_patches
from .quadrature import boundary_rule, planar_rule
from .holofunc import growth_order_estimate
from .smooth import smooth_step

__all__ = [
    "PairingConfig", "PairingResult", "InsufficientOrderError", "FaceDistributionProxy",
    "ce_pair_limit", "ce_pair_ibp", "bc_pair", "bc_pair_many", "face_pair_ce", "face_pair", "silov_pair",
    "cauchy_reconstruct", "default_s", "eps_ladder", "ibp_levels",
]


class InsufficientOrderError(ValueError):
    pass


@dataclass(frozen=True)
class PairingConfig:
    eps_rungs: int = 6
    eps_ratio: float = 2.0
    eps0_frac: float = 0.05
    order_hint: int = 1
    level: int = 2
    ibp_levels: tuple = None  # default (4, 5) for one factor, (2, 3) otherwise
    patches: int = 4
    overlap: float = 0.3
    band: tuple = (0.15, 0.35)  # h = 1 for r >= -band[0], 0 for r <= -band[1]
    tol: float = 1e-4
    max_grid: int = 1_500_000


DEFAULT = PairingConfig()


@dataclass
class PairingResult:
    value: complex
    error_estimate: float
    ladder: list
    extrapolation_order: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)

    def __complex__(self):
        return complex(self.value)


def _zero_result(what):
    return PairingResult(0j, 0.0, [], 0, True, {"short_circuit": what})


# quadrature and partition helpers


def _anchor(dom, hint):
    if hint is None:
        return None
    if float(dom.dist(complex(hint))) > 0.5 * dom.inradius:
        return None
    return round(dom.nearest_boundary_param(complex(hint)), 12)


def _edges(d, cfg, patch_sets=()):
    """Transition curves of the partition of unity on factor d."""
    b1, b2 = cfg.band
    out = [("level", 1.0 - b2), ("level", 1.0 - b1)]
    for ps in patch_sets:
        for p in ps:
            for a in (p.half_width - p.overlap / 2, p.half_width + p.overlap / 2):
                for w in (p.center - a, p.center + a):
                    w = round(float(np.mod(w, 2 * np.pi)), 12)
                    if ("wedge", w) not in out:
                        out.append(("wedge", w))
    return out


def _slot_shapes(slots):
    """Union-of-regions and edges for a list of slots (None means no restriction)."""
    regions, edges = [], []
    for sl in slots:
        reg, edg = ((), ()) if sl is None else sl[0].shapes()
        regions.append(tuple(reg))
        edges += list(edg)
    if any(not r for r in regions):
        regions = []
    return tuple(regions), edges


def _shape_dist(z, sh):
    if sh[0] == "box":
        _, x0, x1, y0, y1 = sh
        return float(np.hypot(max(x0 - z.real, 0, z.real - x1), max(y0 - z.imag, 0, z.imag - y1)))
    return max(0.0, abs(z - complex(sh[1], sh[2])) - sh[3])


def _rule(d, level, anchor, slots, cfg, patch_sets=(), graded=2, reach=0.1):
    """Adapted rule for factor d; the anchor is dropped when the slots vanish
    farther than ``reach`` from the anchor point."""
    regions, edges = _slot_shapes(slots)
    if anchor is not None and regions:
        z = complex(d.gamma(anchor))
        dist = min(max([_shape_dist(z, sh) for sh in reg if sh[0] in ("box", "disc")] or [0.0])
                   for reg in regions)
        if dist > reach:
            anchor = None
    edges = tuple(edges + _edges(d, cfg, patch_sets))
    nodes, weights = planar_rule(d, level, anchor, regions, edges, graded=graded)
    return PlanarRule(nodes, weights, anchor)


def _trule(d, level, anchor, shapes, cfg, patch_sets=()):
    edges = tuple(list(shapes) + [e for e in _edges(d, cfg, patch_sets) if e[0] == "wedge"])
    return boundary_rule(d, level, anchor, edges)


def _planar_rule(d, level, anchor):
    return _rule(d, level, anchor, [None], DEFAULT)


@lru_cache(maxsize=64)
def _patches(dom, count, overlap):
    return tuple(boundary_patches(dom, count, overlap))


def eps_ladder(dom, cfg=DEFAULT):
    dom = as_product(dom)
    eps0 = cfg.eps0_frac * min(d.inradius for d in dom)
    return eps0 * cfg.eps_ratio ** -np.arange(cfg.eps_rungs)


def _band(dom, z, cfg):
    b1, b2 = cfg.band
    return smooth_step((dom.r(z) + b2) / (b2 - b1))


def _planar_pieces(dom, z, cfg, patches=None):
    """Partition of unity on planar nodes: interior piece then one per patch."""
    patches = patches if patches is not None else _patches(dom, cfg.patches, cfg.overlap)
    h = _band(dom, z, cfg)
    t = dom.angle(z)
    out = [(1.0 - h, 0j)]
    for p in patches:
        out.append((h * p.weight(t), p.transversal))
    return out


def _angular_pieces(dom, t, cfg, patches=None):
    patches = patches if patches is not None else _patches(dom, cfg.patches, cfg.overlap)
    return [(p.weight(t), p.transversal) for p in patches]


def _contract(F, mats):
    """Contract every grid axis of F with the matching (n_k, P) matrix; returns (P,)."""
    X = F @ mats[-1]
    for M in mats[-2::-1]:
        X = np.einsum("...ip,ip->...p", X, M)
    return X


def _grid_integral(f, nodes, shifts, terms, cfg, arg_map=None, l1=False):
    """Per-term values weight * sum_grid F * prod_k vec_k with F = f(z - shift) * joint(z).

    ``terms`` is a list of (weight, [vec_k], joint).  Nodes are per-factor
    1-D arrays; the grid is their tensor product.  Terms without a joint
    factor share one contraction of F.  With ``l1`` the per-term integrals of
    |F| * prod |vec_k| are returned as well.
    """
    N = len(nodes)
    T = len(terms)
    out = np.zeros(T, dtype=complex)
    mass = np.zeros(T)
    args = [nd - s for nd, s in zip(nodes, shifts)] if arg_map is None else arg_map(nodes)
    sizes = [a.size for a in args]
    if T == 0 or min(sizes) == 0:
        return (out, mass) if l1 else out
    plain = [n for n, t in enumerate(terms) if t[2] is None]
    joint = [n for n, t in enumerate(terms) if t[2] is not None]
    mats = [np.stack([terms[n][1][k] for n in plain], axis=1) for k in range(N)] if plain else []
    rest = int(np.prod(sizes[1:])) if N > 1 else 1
    chunk = max(1, cfg.max_grid // max(rest, 1))
    for i0 in range(0, sizes[0], chunk):
        sl = slice(i0, i0 + chunk)
        grid = [args[0][sl].reshape((-1,) + (1,) * (N - 1))]
        grid += [args[k].reshape((1,) * k + (-1,) + (1,) * (N - 1 - k)) for k in range(1, N)]
        full = tuple(grid[k].shape[k] for k in range(N))
        F = np.broadcast_to(f(*grid), full)
        if plain:
            out[plain] += _contract(F, [mats[0][sl]] + mats[1:])
            if l1:
                mass[plain] += _contract(np.abs(F), [np.abs(mats[0][sl])] + [np.abs(m) for m in mats[1:]])
        if joint:
            jg = [nodes[0][sl].reshape(grid[0].shape)]
            jg += [nodes[k].reshape(grid[k].shape) for k in range(1, N)]
        for n in joint:
            _, vecs, fn = terms[n]
            with np.errstate(all="ignore"):
                G = F * fn(*jg)
            cols = [vecs[0][sl][:, None]] + [v[:, None] for v in vecs[1:]]
            out[n] += _contract(G, cols)[0]
            if l1:
                mass[n] += _contract(np.abs(G), [np.abs(c) for c in cols])[0].real
    w = np.array([t[0] for t in terms], dtype=complex)
    out *= w
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite pairing integrand")
    return (out, mass * np.abs(w)) if l1 else out


def _piecewise_ladder(f, base, fac, pieces, weights, joints, eps, cfg):
    """eps-ladders per term of sum over partition pieces of int f(z - eps v_piece) * prod fac.

    Returns (values (rungs, terms), scales, number of nonempty pieces) where
    scales holds per term the sum over pieces of |piece value| ("pieces") and
    the integral of the absolute integrand ("l1"), both at the smallest eps.
    """
    N, T = len(base), len(weights)
    vals = np.zeros((eps.size, T), dtype=complex)
    pabs = np.zeros(T)
    l1 = np.zeros(T)
    npieces = 0
    for combo in itertools.product(*[range(len(p)) for p in pieces]):
        nodes, vs, vecs = [], [], [[] for _ in range(T)]
        for j in range(N):
            chi, v = pieces[j][combo[j]]
            m = (chi != 0) & np.any([x != 0 for x in fac[j]], axis=0)
            if not np.any(m):
                break
            nodes.append(base[j][m])
            vs.append(v)
            for n in range(T):
                vecs[n].append((chi * fac[j][n])[m])
        else:
            npieces += 1
            tl = [(weights[n], vecs[n], joints[n]) for n in range(T)]
            if all(v == 0 for v in vs):
                row, m = _grid_integral(f, nodes, [0] * N, tl, cfg, l1=True)
                vals += row
            else:
                for i, e in enumerate(eps):
                    last = i == eps.size - 1
                    row = _grid_integral(f, nodes, [e * v for v in vs], tl, cfg, l1=last)
                    if last:
                        row, m = row
                    vals[i] += row
            pabs += np.abs(row)
            l1 += m
    return vals, {"pieces": pabs, "l1": l1}, npieces


def _scales(sc):
    return {"scale": float(np.sum(sc["pieces"])), "l1": float(np.sum(sc["l1"]))}


def _finish(ladder_h, ladder_v, cfg, diag=None, exact=False):
    v = np.asarray(ladder_v)
    if exact or np.allclose(v, v[0], rtol=0, atol=1e-15 * max(1.0, np.max(np.abs(v)))):
        return PairingResult(complex(v[-1]), float(np.max(np.abs(v - v[-1]))),
                             list(zip(map(float, ladder_h), map(complex, v))), 0, True, diag or {})
    rr = richardson_table(ladder_h, v, cfg.order_hint)
    ok = rr.converged and rr.error <= cfg.tol * (1 + abs(rr.value))
    d = dict(diag or {})
    d["corrections"] = [float(c) for c in rr.corrections]
    return PairingResult(rr.value, rr.error, list(zip(map(float, ladder_h), map(complex, v))),
                         cfg.order_hint, bool(ok), d)


def _group(vals, owners, count):
    """Sum the term axis (last) of vals into ``count`` owner groups."""
    M = np.zeros((len(owners), count))
    M[np.arange(len(owners)), owners] = 1.0
    return vals @ M


def _check_form(form, dom, bideg):
    if form.N != dom.N:
        raise ValueError(f"form on C^{form.N} paired on a {dom.N}-factor domain")
    b = form.bidegree
    if b is not None and b != bideg:
        raise ValueError(f"expected a form of bidegree {bideg}, got {b}")


def _volume_terms(phi):
    """(weight, slots, joint) of the real density of a top-degree form."""
    N = phi.N
    c = volume_density_factor(N)
    full = tuple(range(N))
    return [(t.weight * c, t.slots, t.joint) for t in phi.monomials.get((full, full), [])]


# canonical extension, limit route


def _ce_limit_ladder(f, phi, dom, cfg, mode, patches=None):
    terms = _volume_terms(phi)
    N = dom.N
    psets = [(_patches(d, cfg.patches, cfg.overlap) if patches is None else patches[k],)
             for k, d in enumerate(dom)]
    grad = _gradings(f, dom)
    rules = [_rule(d, cfg.level, _anchor(d, h), [sl[k] for (_, sl, _) in terms], cfg, psets[k], grad[k])
             for k, (d, h) in enumerate(zip(dom, f.hints))]
    fac = [[rules[k].weights * slot_value(sl[k], rules[k].nodes) for (_, sl, _) in terms]
           for k in range(N)]
    weights = [w for w, _, _ in terms]
    joints = [j for _, _, j in terms]
    eps = eps_ladder(dom, cfg)
    if mode == "disc-dilate":
        for d in dom:
            if not d.is_disc:
                raise ValueError(f"disc-dilate mode needs disc factors, got {d.describe()}")
        centers = [d.center for d in dom]
        tl = [(w, [fac[k][n] for k in range(N)], j) for n, (w, j) in enumerate(zip(weights, joints))]
        vals = np.zeros((eps.size, len(terms)), dtype=complex)
        for i, e in enumerate(eps):
            amap = (lambda nodes, e=e: [c + (1 - e) * (nd - c) for nd, c in zip(nodes, centers)])
            vals[i] = _grid_integral(f, [r.nodes for r in rules], [0] * N, tl, cfg, arg_map=amap)
        return eps, vals, {"mode": mode, "scale": float(np.sum(np.abs(vals[-1])))}
    if mode != "patchwise-translate":
        raise ValueError(f"unknown mode {mode!r}")
    pieces = [_planar_pieces(d, r.nodes, cfg, None if patches is None else patches[k])
              for k, (d, r) in enumerate(zip(dom, rules))]
    vals, sc, npieces = _piecewise_ladder(f, [r.nodes for r in rules], fac, pieces,
                                          weights, joints, eps, cfg)
    return eps, vals, {"mode": mode, "pieces": npieces, **_scales(sc)}


def ce_pair_limit(f, phi, dom, mode="patchwise-translate", cfg=DEFAULT, patches=None):
    """<ce f, phi> as the extrapolated limit of int_Omega f(z - eps v) phi."""
    dom = as_product(dom)
    _check_form(phi, dom, (dom.N, dom.N))
    if f.zero or phi.is_zero:
        return _zero_result("zero input")
    eps, vals, diag = _ce_limit_ladder(f, phi, dom, cfg, mode, patches)
    return _finish(eps, vals.sum(axis=1), cfg, diag)


# canonical extension, integration by parts


_growth_cache = {}


def _growth(f, dom):
    key = (f, dom)
    if key not in _growth_cache:
        _growth_cache[key] = growth_order_estimate(f, dom)
    return _growth_cache[key]


def _gradings(f, dom):
    """Per-factor grading strength of limit-route rules from the growth order."""
    if f.tensor_factors:
        est = [_growth(g, d) for g, d in zip(f.tensor_factors, dom)]
    else:
        est = [_growth(f, dom)] * dom.N
    return [2 if e > 1.5 else 1 for e in est]


def default_s(f, dom):
    """s_j = ceil(growth estimate) + 1 per factor (factorwise for tensor functions)."""
    dom = as_product(dom)
    if f.tensor_factors:
        est = [_growth(g, d) for g, d in zip(f.tensor_factors, dom)]
    else:
        est = [_growth(f, dom)] * dom.N
    return tuple(int(ceil(e - 1e-6)) + 1 for e in est), est


def _ibp_vectors(d, rule, slot, s, cfg):
    """Per-node weight * (G0 + G1) for one factor slot."""
    z = rule.nodes
    r = d.r(z)
    b1, b2 = cfg.band
    near = r > -b2 - 1e-9
    G = (1.0 - _band(d, z, cfg)) * slot_value(slot, z)
    if np.any(near):
        zn = z[near]
        u = slot_jet(slot, zn, s)
        hj = smooth_step((d.r_jet(zn, s) + b2) * (1.0 / (b2 - b1)))
        Ts = VectorFieldT(d).apply_transpose(hj * u, zn, s)
        G[near] += r[near] ** s / factorial(s) * Ts.c[0]
    return rule.weights * G


def _resolve_s(f, dom, s):
    s_min, est = default_s(f, dom)
    if s is None:
        s = s_min
    s = tuple(int(x) for x in (s if np.ndim(s) else [s] * dom.N))
    need = tuple(int(ceil(e - 0.25)) + 1 for e in est)
    if any(a < b for a, b in zip(s, need)):
        raise InsufficientOrderError(
            f"s={s} too small for {f.name}: r^s f does not decay at the boundary "
            f"(growth estimate {', '.join(f'{e:.2f}' for e in est)}; need s >= {need})")
    return s, est


def ibp_levels(dom, s, cfg=DEFAULT):
    """Per-factor quadrature levels of the integration-by-parts ladder.

    Explicit cfg.ibp_levels apply to every factor.  Otherwise the base
    ladder is (4, 5) for one factor and (2, 3) for more, raised by one level
    at s = 3 and three more per further unit of s: the integrand carries
    s + 1 derivatives of the test form, and mollifier derivatives converge
    slowly under Gauss-Legendre refinement.  Non-circular factors get
    ceil(2 log2(a/b)) more levels, since the band field a = 1/(dr/dzbar)
    varies fastest where the curvature is largest.
    """
    if cfg.ibp_levels:
        return [(L,) * dom.N for L in cfg.ibp_levels]
    base = (4, 5) if dom.N == 1 else (2, 3)
    extra = [(0 if sk <= 2 else 1 + 3 * (sk - 3))
             + (0 if d.is_disc else int(ceil(2 * np.log2(max(d.a, d.b) / min(d.a, d.b)))))
             for sk, d in zip(s, dom)]
    return [tuple(L + e for e in extra) for L in base]


def _ibp_ladder(f, terms, dom, s, cfg):
    """Per-term integration-by-parts values over the quadrature-level ladder."""
    levels, vals = [], []
    for Ls in ibp_levels(dom, s, cfg):
        rules = [_rule(d, L, _anchor(d, h), [sl[k] for (_, sl, _) in terms], cfg, graded=0)
                 for k, (L, d, h) in enumerate(zip(Ls, dom, f.hints))]
        tl, keep = [], [np.zeros(len(r), bool) for r in rules]
        for w, slots, joint in terms:
            vecs = [_ibp_vectors(d, r, sl, sk, cfg) for d, r, sl, sk in zip(dom, rules, slots, s)]
            for k in range(dom.N):
                keep[k] |= vecs[k] != 0
            tl.append((w, vecs, joint))
        nodes = [r.nodes[m] for r, m in zip(rules, keep)]
        tl = [(w, [v[m] for v, m in zip(vecs, keep)], j) for w, vecs, j in tl]
        vals.append(_grid_integral(f, nodes, [0] * dom.N, tl, cfg))
        levels.append(Ls[0] if len(set(Ls)) == 1 else "/".join(map(str, Ls)))
    return levels, np.array(vals)


def _ibp_result(levels, vals, cfg, diag):
    value = vals[-1]
    err = abs(vals[-1] - vals[-2]) if len(vals) > 1 else np.nan
    ok = bool(np.isfinite(err) and err <= cfg.tol * (1 + abs(value)))
    return PairingResult(complex(value), float(err), list(zip(levels, map(complex, vals))), 0, ok, diag)


def ce_pair_ibp(f, phi, dom, s=None, cfg=DEFAULT):
    """<ce f, phi> by integration by parts with orders s (tuple, one per factor).

    Returns the finest level of the quadrature-level ladder; the error
    estimate is the change between the last two levels.
    """
    dom = as_product(dom)
    _check_form(phi, dom, (dom.N, dom.N))
    if f.zero or phi.is_zero:
        return _zero_result("zero input")
    s, est = _resolve_s(f, dom, s)
    levels, vals = _ibp_ladder(f, _volume_terms(phi), dom, s, cfg)
    return _ibp_result(levels, vals.sum(axis=1), cfg,
                       {"s": s, "growth_estimate": est, "scale": float(np.sum(np.abs(vals[-1])))})


# boundary pairings


def _face_ladder(f, terms, k, dom, cfg, patches=None):
    """Per-term eps-ladders of int_{bD_k x D^_k} f(. - eps v) u for FaceTerms of face k (0-based)."""
    N = dom.N
    eps = eps_ladder(dom, cfg)
    if not terms:
        return eps, np.zeros((eps.size, 0), dtype=complex), {"pieces": np.zeros(0), "l1": np.zeros(0)}, 0
    hints = f.hints
    grad = _gradings(f, dom)
    psets = [(_patches(d, cfg.patches, cfg.overlap) if patches is None else patches[j],)
             for j, d in enumerate(dom)]
    t, wt = _trule(dom[k], cfg.level, _anchor(dom[k], hints[k]),
                   [sh for ft in terms for sh in ft.shapes], cfg, psets[k])
    rules = [None if j == k else
             _rule(d, cfg.level, _anchor(d, hints[j]), [ft.slots[j] for ft in terms], cfg, psets[j], grad[j])
             for j, d in enumerate(dom)]
    fac, pieces, base = [], [], []
    for j, d in enumerate(dom):
        pp = None if patches is None else patches[j]
        if j == k:
            fac.append([wt * ft.angular(t) for ft in terms])
            pieces.append(_angular_pieces(d, t, cfg, pp))
            base.append(d.gamma(t))
        else:
            fac.append([rules[j].weights * slot_value(ft.slots[j], rules[j].nodes) for ft in terms])
            pieces.append(_planar_pieces(d, rules[j].nodes, cfg, pp))
            base.append(rules[j].nodes)
    vals, sc, npieces = _piecewise_ladder(f, base, fac, pieces, [ft.weight for ft in terms],
                                          [ft.joint for ft in terms], eps, cfg)
    return eps, vals, sc, npieces


def face_pair(f, k, u, dom, cfg=DEFAULT, patches=None):
    """<alpha_k, u>: extrapolated limit of int over bD_k x D^_k of f(z - eps v) u.

    ``k`` is 1-based; ``u`` is a top-degree FaceForm on face k (see
    FaceForm.density for direct density data).
    """
    dom = as_product(dom)
    if u.k != k - 1:
        raise ValueError(f"face form lives on face {u.k + 1}, not {k}")
    if f.zero or u.is_zero:
        return _zero_result("zero input")
    eps, vals, sc, npieces = _face_ladder(f, u.top_terms(), u.k, dom, cfg, patches)
    return _finish(eps, vals.sum(axis=1), cfg, {"face": k, "pieces": npieces, **_scales(sc)})


def face_pair_ce(f, k, u, dom, cfg=DEFAULT, s=None):
    """<alpha_k, u> with the remaining variables paired through their canonical extension.

    The boundary variable is still an eps-limit; in the other factors the
    slice is paired by integration by parts with orders ``s``, so the value
    realises (id_k (x) ce) applied to the restriction of alpha_k to the open face.
    """
    dom = as_product(dom)
    if u.k != k - 1:
        raise ValueError(f"face form lives on face {u.k + 1}, not {k}")
    if f.zero or u.is_zero:
        return _zero_result("zero input")
    s, est = _resolve_s(f, dom, s)
    terms = u.top_terms()
    k0 = u.k
    Ls = ibp_levels(dom, s, cfg)[-1]
    eps = eps_ladder(dom, cfg)
    pset = (_patches(dom[k0], cfg.patches, cfg.overlap),)
    t, wt = _trule(dom[k0], cfg.level, _anchor(dom[k0], f.hints[k0]),
                   [sh for ft in terms for sh in ft.shapes], cfg, pset)
    fac, pieces, base = [], [], []
    for j, d in enumerate(dom):
        if j == k0:
            fac.append([wt * ft.angular(t) for ft in terms])
            pieces.append(_angular_pieces(d, t, cfg))
            base.append(d.gamma(t))
            continue
        rule = _rule(d, Ls[j], _anchor(d, f.hints[j]), [ft.slots[j] for ft in terms], cfg, graded=0)
        fac.append([_ibp_vectors(d, rule, ft.slots[j], s[j], cfg) for ft in terms])
        pieces.append([(np.ones(len(rule)), 0j)])
        base.append(rule.nodes)
    vals, sc, npieces = _piecewise_ladder(f, base, fac, pieces, [ft.weight for ft in terms],
                                          [ft.joint for ft in terms], eps, cfg)
    return _finish(eps, vals.sum(axis=1), cfg, {"face": k, "pieces": npieces, "s": s, **_scales(sc)})


def bc_pair(f, psi, dom, route="dbar-of-ce", cfg=DEFAULT, s=None, patches=None):
    """<bc f, psi> for an (N, N-1)-form psi.

    route 'dbar-of-ce' evaluates <ce f, dbar psi> by integration by parts;
    route 'boundary-limit' extrapolates sum_k int_{F_k} f(z - eps v) psi.
    """
    return bc_pair_many(f, [psi], dom, route, cfg, s, patches)[0]


def bc_pair_many(f, psis, dom, route="dbar-of-ce", cfg=DEFAULT, s=None, patches=None):
    """bc_pair for a list of forms sharing the evaluations of f."""
    dom = as_product(dom)
    for psi in psis:
        _check_form(psi, dom, (dom.N, dom.N - 1))
    out = [None] * len(psis)
    live = []
    for i, psi in enumerate(psis):
        if f.zero or psi.is_zero:
            out[i] = _zero_result("zero input")
        else:
            live.append(i)
    if not live:
        return out
    if route == "dbar-of-ce":
        s, est = _resolve_s(f, dom, s)
        terms, owners = [], []
        for n, i in enumerate(live):
            tv = _volume_terms(dbar(psis[i]))
            terms += tv
            owners += [n] * len(tv)
        levels, vals = _ibp_ladder(f, terms, dom, s, cfg)
        tot = _group(vals, owners, len(live))
        sc = _group(np.abs(vals[-1]), owners, len(live))
        for n, i in enumerate(live):
            out[i] = _ibp_result(levels, tot[:, n], cfg, {"route": route, "s": s, "growth_estimate": est,
                                                          "scale": float(sc[n])})
        return out
    if route != "boundary-limit":
        raise ValueError(f"unknown route {route!r}")
    total = 0
    faces, scale, l1 = [], 0, 0
    for k in range(dom.N):
        terms, owners = [], []
        for n, i in enumerate(live):
            tf = pullback_to_face(psis[i], dom, k + 1).top_terms()
            terms += tf
            owners += [n] * len(tf)
        eps, vals, sc, _ = _face_ladder(f, terms, k, dom, cfg, patches)
        fv = _group(vals, owners, len(live))
        faces.append(fv)
        total = total + fv
        scale = scale + _group(sc["pieces"], owners, len(live))
        l1 = l1 + _group(sc["l1"], owners, len(live))
    for n, i in enumerate(live):
        res = _finish(eps, total[:, n], cfg, {"route": route, "scale": float(scale[n]), "l1": float(l1[n])})
        res.diagnostics["face_values"] = [complex(richardson_table(eps, fv[:, n], cfg.order_hint).value)
                                          if np.any(fv[:, n]) else 0j for fv in faces]
        out[i] = res
    return out


def silov_pair(f, psi, dom, cfg=DEFAULT, patches=None):
    """Pairing of the distinguished-boundary current with an (N, 0)-form psi.

    The torus bD_1 x ... x bD_N is oriented by (t_1, ..., t_N), so
    g dz_1 ^ ... ^ dz_N pulls back to g prod gamma_k'(t_k) dt.
    """
    dom = as_product(dom)
    _check_form(psi, dom, (dom.N, 0))
    if f.zero or psi.is_zero:
        return _zero_result("zero input")
    N = dom.N
    terms = psi.monomials.get((tuple(range(N)), ()), [])
    eps = eps_ladder(dom, cfg)
    fac, pieces, base = [], [], []
    for j, (d, h) in enumerate(zip(dom, f.hints)):
        shapes = [sh for tm in terms for part in tm.slots[j][0].shapes() for sh in part]
        pset = (_patches(d, cfg.patches, cfg.overlap) if patches is None else patches[j],)
        t, w = _trule(d, cfg.level, _anchor(d, h), shapes, cfg, pset)
        z = d.gamma(t)
        fac.append([w * d.dgamma(t) * slot_value(tm.slots[j], z) for tm in terms])
        pieces.append(_angular_pieces(d, t, cfg, None if patches is None else patches[j]))
        base.append(z)
    vals, sc, _ = _piecewise_ladder(f, base, fac, pieces, [tm.weight for tm in terms],
                                    [tm.joint for tm in terms], eps, cfg)
    return _finish(eps, vals.sum(axis=1), cfg, {"torus": True, **_scales(sc)})


# reconstruction


@dataclass(frozen=True)
class FaceDistributionProxy:
    """alpha_k for f on face k (1-based); call it on FaceForm data."""
    dom: object
    k: int
    f: object
    cfg: PairingConfig = DEFAULT

    def __call__(self, u):
        return face_pair(self.f, self.k, u, self.dom, self.cfg)


def cauchy_kernel_density(dom, k, z):
    """p(t) = gamma'(t) / (2 pi i (gamma(t) - z)) on factor k (1-based)."""
    d = as_product(dom)[k - 1]
    return lambda t: d.dgamma(t) / (2j * np.pi * (d.gamma(t) - z))


def cauchy_reconstruct(proxy, z, w_hat=(), margin=0.2, bump_radius=0.3):
    """Recover f(z, w_hat) from the face distribution alpha_k by a Cauchy transform.

    The face datum is the Cauchy kernel in the boundary variable tensored with
    normalised radial bumps at w_hat, whose means reproduce holomorphic
    functions.  Returns the PairingResult; its value estimates f.
    """
    dom = as_product(proxy.dom)
    k = proxy.k
    d = dom[k - 1]
    w_hat = list(np.atleast_1d(np.asarray(w_hat, dtype=complex)))
    if len(w_hat) != dom.N - 1:
        raise ValueError(f"need {dom.N - 1} remaining coordinates, got {len(w_hat)}")
    if not d.contains(z) or float(d.dist(z)) < margin:
        raise ValueError(f"z = {z} violates the reconstruction margin {margin} in factor {k}")
    qs = []
    others = [j for j in range(dom.N) if j != k - 1]
    for j, w in zip(others, w_hat):
        dj = dom[j]
        dist = float(dj.dist(w))
        if not dj.contains(w) or dist <= 0:
            raise ValueError(f"w_hat component {w} is not interior to factor {j + 1}")
        R = min(bump_radius, 0.5 * dist)
        q = RadialBump(w, R, normalized=True)
        mass = _rule(dj, proxy.cfg.level + 1, None, [(q, 0)], proxy.cfg).integrate(q)
        if abs(mass - 1) > 1e-8:
            raise ValueError(f"bump normalisation failed (mass {mass.real:.12f})")
        qs.append(q)
    u = FaceForm.density(dom.N, k, d, [(1.0, cauchy_kernel_density(dom, k, z), qs)])
    return proxy(u)
