"""
Executable checks of the identities satisfied by boundary currents.

Each check evaluates a finite family of pairings and returns a CheckReport
listing (case label, |residual|, tolerance).  Identities between currents are
only ever tested weakly, through these finite families.
"""

import itertools
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .forms import (BoxBump, DomainCutoff, FaceForm, RadialBump, TestForm, dbar_factor,
                    make_weinstock_form, pullback_to_face, sigma_apply, volume_density_factor)
from .geometry import ProductDomain, as_product
from .holofunc import growth_order_estimate, tensor
from .pairing import (DEFAULT, FaceDistributionProxy, bc_pair, bc_pair_many, cauchy_reconstruct,
                      ce_pair_ibp, ce_pair_limit, face_pair, face_pair_ce)

__all__ = [
    "CheckReport", "CHECKS", "check_weinstock", "check_facewise", "check_canonicality",
    "check_edge", "check_reconstruction", "check_tensor_ce", "check_growth_extension",
]

WEAK_NOTE = "current identities are tested weakly, against the finite test-form family listed in the cases"


@dataclass
class CheckReport:
    name: str
    inputs: str
    residuals: list = field(default_factory=list)  # (label, |residual|, tolerance)
    wall_time: float = 0.0
    seed: int = None
    notes: list = field(default_factory=list)
    ladders: dict = field(default_factory=dict)  # label -> PairingResult

    @property
    def passed(self):
        return bool(self.residuals) and all(r <= t for _, r, t in self.residuals)

    def add(self, label, residual, tol):
        r = float(residual)
        self.residuals.append((label, r if np.isfinite(r) else float("inf"), float(tol)))

    def fail(self, label, exc):
        self.residuals.append((label, float("inf"), 0.0))
        self.notes.append(f"{label}: {type(exc).__name__}: {exc}")

    def record(self, label, res):
        self.ladders[label] = res
        return res

    @property
    def worst(self):
        """Largest residual / tolerance ratio."""
        out = 0.0
        for _, r, t in self.residuals:
            out = max(out, r / t if t > 0 else (0.0 if r == 0 else np.inf))
        return out

    def to_dict(self, timings=True):
        d = {
            "name": self.name,
            "inputs": self.inputs,
            "passed": self.passed,
            "seed": self.seed,
            "cases": [{"label": lab, "residual": r, "tolerance": t, "passed": r <= t}
                      for lab, r, t in self.residuals],
            "notes": list(self.notes),
        }
        if timings:
            d["wall_time"] = round(self.wall_time, 3)
        return d

    def ladder_rows(self):
        """(label, step, Re value, Im value, correction) rows of the recorded pairings."""
        rows = []
        for lab, res in self.ladders.items():
            corr = res.diagnostics.get("corrections", [])
            for i, (h, v) in enumerate(res.ladder):
                c = corr[i - 1] if 0 < i <= len(corr) else ""
                rows.append((lab, h, complex(v).real, complex(v).imag, c))
        return rows


def _rel(a, b, floor=1e-6):
    """|a - b| relative to the larger magnitude, floored so that exact zeros compare absolutely."""
    return abs(a - b) / max(abs(a), abs(b), floor)


def _start(name, f, dom, extra=""):
    dom = as_product(dom)
    names = f.name if not isinstance(f, (list, tuple)) else ", ".join(g.name for g in f)
    rep = CheckReport(name, f"f = {names}; domain = {dom.describe()}" + (f"; {extra}" if extra else ""))
    rep.notes.append(WEAK_NOTE)
    return rep, dom, time.perf_counter()


def _done(rep, t0):
    rep.wall_time = time.perf_counter() - t0
    return rep


def _straddle(d, t0, h=0.3):
    """Box bump centred on the boundary point gamma(t0)."""
    return BoxBump.around(complex(d.gamma(t0)), h)


def _inner(d, frac=0.3):
    return RadialBump(d.center, frac * d.inradius)


def _outside(d, gap=0.05, radius=0.3):
    """Radial bump whose support stays ``gap`` away from the closed factor."""
    return RadialBump(d.center + max(d.a, d.b) + radius + gap, radius)


def random_polynomials(N, count, degree=2, seed=0):
    """``count`` dicts {exponent: coefficient} with standard complex normal coefficients."""
    rng = np.random.default_rng(seed)
    exps = [a for a in itertools.product(range(degree + 1), repeat=N) if sum(a) <= degree]
    out = []
    for _ in range(count):
        c = rng.normal(size=(len(exps), 2))
        out.append({a: complex(x, y) for a, (x, y) in zip(exps, c)})
    return out


# checks


def check_weinstock(f, dom, count=10, seed=0, degree=2, tol=1e-6, cfg=DEFAULT, tol_scale=1.0):
    """<bc f, omega> = 0 for Weinstock forms chi * g * dz_1..dz_N ^ dzbar_J with polynomial g.

    The pairing runs the boundary-limit route (for dbar-of-ce it vanishes
    identically).  Residuals are |<bc f, omega>| over the sum of magnitudes
    of the partition pieces, which carries the size of f and of g.
    """
    rep, dom, t0 = _start("check_weinstock", f, dom, f"{count} random polynomial g of degree {degree}")
    rep.seed = seed
    gs = random_polynomials(dom.N, count, degree, seed)
    psis = [make_weinstock_form(dom, g) for g in gs]
    try:
        results = bc_pair_many(f, psis, dom, route="boundary-limit", cfg=cfg)
    except Exception as exc:  # noqa: BLE001
        rep.fail("all forms", exc)
        return _done(rep, t0)
    for i, res in enumerate(results):
        lab = f"omega[{i}]"
        rep.record(lab, res)
        scale = max(res.diagnostics.get("scale", 0.0), 1e-300)
        rep.add(lab, abs(res.value) / scale, tol * tol_scale)
    return _done(rep, t0)


def _psi_family(dom):
    """Tensor (N, N-1) monomials seen by a single face, plus one interior form."""
    N = dom.N
    full = tuple(range(N))
    out = []
    for t0 in (0.0, 2.0):
        bumps = [_straddle(d, t0 + 0.7 * j) for j, d in enumerate(dom)]
        for k in range(N):
            J = tuple(j for j in full if j != k)
            out.append((f"t0={t0:g} face {k + 1}", TestForm.monomial(N, full, J, bumps), k))
    out.append(("interior", TestForm.monomial(N, full, full[:-1], [_inner(d) for d in dom]), None))
    return out


def check_facewise(f, dom, family=None, tol=1e-4, cfg=DEFAULT, tol_scale=1.0):
    """bc f against the sum of face contributions, and the component selection rule.

    ``family`` lists (label, psi, k) where psi omits dzbar_k only (k 0-based,
    None for forms supported away from the boundary).
    """
    rep, dom, t0 = _start("check_facewise", f, dom)
    family = _psi_family(dom) if family is None else family
    try:
        faces = bc_pair_many(f, [p for _, p, _ in family], dom, route="boundary-limit", cfg=cfg)
    except Exception as exc:  # noqa: BLE001
        rep.fail("faces", exc)
        return _done(rep, t0)
    for (lab, psi, k), fr in zip(family, faces):
        try:
            ref = rep.record(f"{lab} dbar-of-ce", bc_pair(f, psi, dom, cfg=cfg))
        except Exception as exc:  # noqa: BLE001
            rep.fail(lab, exc)
            continue
        rep.record(f"{lab} faces", fr)
        fv = fr.diagnostics.get("face_values", [0j] * dom.N)
        total = sum(fv)
        if k is None:
            rep.add(f"{lab}: dbar-of-ce", abs(ref.value), 1e-8 * tol_scale)
            rep.add(f"{lab}: faces", abs(total), 1e-8 * tol_scale)
            continue
        rep.add(f"{lab}: bc vs sum of faces", _rel(ref.value, total), tol * tol_scale)
        rep.add(f"{lab}: bc vs face {k + 1} alone", _rel(ref.value, fv[k]), tol * tol_scale)
        for j in range(dom.N):
            if j != k:
                # the pullback to face j contains dzbar_j ^ dz_j-bar, hence vanishes identically
                zero = pullback_to_face(psi, dom, j + 1).is_zero and fv[j] == 0
                rep.add(f"{lab}: face {j + 1} silent", 0.0 if zero else np.inf, 0.0)
    return _done(rep, t0)


def _angular_family():
    return [("p=1", lambda t: np.ones_like(t) + 0j),
            ("p=exp(-it)", lambda t: np.exp(-1j * t)),
            ("p=exp(cos t)", lambda t: np.exp(np.cos(t)) + 0j)]


def check_canonicality(f, dom, k=1, ps=None, qs=None, tol=1e-4, cfg=DEFAULT, tol_scale=1.0):
    """(id_k (x) ce) of the open-face restriction of alpha_k against alpha_k itself.

    Test data are p(t) dt (x) q dV on face k over a grid of angular densities
    p and factor functions q of the remaining variables (products of one
    function per remaining factor).  The left side pairs the remaining
    variables by integration by parts, the right side by their eps-limit.
    """
    rep, dom, t0 = _start("check_canonicality", f, dom, f"face {k}")
    others = [d for j, d in enumerate(dom) if j != k - 1]
    ps = _angular_family() if ps is None else ps
    if qs is None:
        qs = [("q=cutoff", [DomainCutoff(d, 0.2) for d in others]),
              ("q=boundary bump", [_straddle(d, 0.0, 0.4) for d in others]),
              ("q=exterior", [_outside(d) for d in others])]
    for (pl, p), (ql, q) in itertools.product(ps, qs):
        lab = f"{pl}, {ql}"
        u = FaceForm.density(dom.N, k, dom[k - 1], [(1.0, p, list(q))])
        try:
            lhs = rep.record(f"{lab} lhs", face_pair_ce(f, k, u, dom, cfg))
            rhs = rep.record(f"{lab} rhs", face_pair(f, k, u, dom, cfg))
        except Exception as exc:  # noqa: BLE001
            rep.fail(lab, exc)
            continue
        rep.add(lab, _rel(lhs.value, rhs.value), tol * tol_scale)
    return _done(rep, t0)


def _eta_family(dom):
    N = dom.N
    full = tuple(range(N))
    out = []
    for j, k in itertools.combinations(range(N), 2):
        J = tuple(i for i in full if i not in (j, k))
        for t0 in (0.0, 2.0):
            bumps = [_straddle(d, t0 + 0.7 * i) for i, d in enumerate(dom)]
            out.append((f"t0={t0:g} faces {j + 1},{k + 1}", TestForm.monomial(N, full, J, bumps), j, k))
    return out


def check_edge(f, dom, etas=None, tol=1e-4, face_tol=1e-6, cfg=DEFAULT, tol_scale=1.0):
    """Edge relation <gamma_k, sigma_j dbar_j eta> + <gamma_j, sigma_k dbar_k eta> = 0 and face holomorphy.

    eta are (N, N-2) tensor monomials missing dzbar_j and dzbar_k.  dbar_j
    acts inside the tensor block of factor j and sigma_j is the sign
    (-1)^(degrees of the factors before j), so that dbar = sum_j sigma_j dbar_j.
    Face holomorphy pairs p dt (x) dbar q with q supported inside the
    remaining factors; the value must vanish relative to the integral of the
    absolute integrand.
    """
    rep, dom, t0 = _start("check_edge", f, dom)
    if dom.N < 2:
        rep.notes.append("edge relations need at least two factors")
        rep.add("no edges", 0.0, 0.0)
        return _done(rep, t0)
    etas = _eta_family(dom) if etas is None else etas
    for lab, eta, j, k in etas:
        try:
            dj = sigma_apply(j + 1, dbar_factor(j + 1, eta))
            dk = sigma_apply(k + 1, dbar_factor(k + 1, eta))
            a = rep.record(f"{lab} face {k + 1}", face_pair(f, k + 1, pullback_to_face(dj, dom, k + 1), dom, cfg))
            b = rep.record(f"{lab} face {j + 1}", face_pair(f, j + 1, pullback_to_face(dk, dom, j + 1), dom, cfg))
        except Exception as exc:  # noqa: BLE001
            rep.fail(lab, exc)
            continue
        rep.add(f"edge {lab}", _rel(a.value, -b.value), tol * tol_scale)
    for k in range(dom.N):
        others = [d for j, d in enumerate(dom) if j != k]
        for pl, p in _angular_family()[:2]:
            # dbar of the bump in the first remaining factor, plain bumps in the rest
            qs = [(RadialBump(d.center + 0.2 * d.inradius, 0.5 * d.inradius), 1 if i == 0 else 0)
                  for i, d in enumerate(others)]
            u = FaceForm.density(dom.N, k + 1, dom[k], [(1.0, p, qs)])
            lab = f"face {k + 1} holomorphy {pl}"
            try:
                res = rep.record(lab, face_pair(f, k + 1, u, dom, cfg))
            except Exception as exc:  # noqa: BLE001
                rep.fail(lab, exc)
                continue
            scale = max(res.diagnostics.get("l1", 0.0), 1e-300)
            rep.add(lab, abs(res.value) / scale, face_tol * tol_scale)
    return _done(rep, t0)


def _point_grid(dom):
    per = []
    for d in dom:
        c = d.center
        per.append([c, c + 0.5 * (complex(d.gamma(0.0)) - c), c + 0.5 * (complex(d.gamma(2.2)) - c)])
    return list(itertools.product(*per))


def check_reconstruction(f, dom, points=None, tol=1e-4, cross_tol=1e-4, margin=0.2, cfg=DEFAULT,
                         tol_scale=1.0):
    """Cauchy transforms of every face distribution reproduce f at interior points."""
    rep, dom, t0 = _start("check_reconstruction", f, dom, f"margin {margin}")
    points = _point_grid(dom) if points is None else [tuple(np.atleast_1d(p)) for p in points]
    for z in points:
        exact = complex(f(*[np.asarray(x) for x in z]))
        vals = []
        zl = "(" + ", ".join(f"{complex(x):.3g}" for x in z) + ")"
        for k in range(dom.N):
            lab = f"z={zl} face {k + 1}"
            proxy = FaceDistributionProxy(dom, k + 1, f, cfg)
            try:
                res = rep.record(lab, cauchy_reconstruct(proxy, z[k], [x for j, x in enumerate(z) if j != k],
                                                         margin=margin))
            except Exception as exc:  # noqa: BLE001
                rep.fail(lab, exc)
                continue
            vals.append(res.value)
            rep.add(lab, abs(res.value - exact) / (1 + abs(exact)), tol * tol_scale)
        for a, b in itertools.combinations(range(len(vals)), 2):
            rep.add(f"z={zl} faces {a + 1} vs {b + 1}", abs(vals[a] - vals[b]), cross_tol * tol_scale)
    return _done(rep, t0)


def _tensor_bumps(dom):
    return [("straddle t0=0", [_straddle(d, 0.0) for d in dom]),
            ("straddle t0=2", [_straddle(d, 2.0 + 0.5 * j) for j, d in enumerate(dom)])]


def check_tensor_ce(factors, dom, families=None, tol=1e-4, levels=None, cfg=DEFAULT, tol_scale=1.0):
    """ce and bc of a tensor function against products of one-variable pairings.

    ce f is the tensor product of the factor extensions, and bc f on tensor
    forms is the signed sum of mixed products.
    For psi = psi_1 ^ ... ^ psi_N with psi_k of bidegree (1, 0) and the rest
    of top degree, <bc f, psi> = (-1)^(sum_{j<k} deg psi_j) <bc f_k, psi_k>
    prod_{j != k} <ce f_j, psi_j>.  The N-variable pairings run at the
    quadrature ``levels`` (default: the automatic N-variable ladder); the
    one-variable references keep their own default ladder, so the two sides
    do not share a quadrature rule.
    """
    factors = list(factors)
    rep, dom, t0 = _start("check_tensor_ce", factors, dom)
    N = dom.N
    if len(factors) != N:
        raise ValueError(f"{len(factors)} factors for a {N}-factor domain")
    f = tensor(factors, dom)
    cfgN = replace(cfg, ibp_levels=None if levels is None else tuple(levels))
    cfg1 = replace(cfg, ibp_levels=None)
    singles = [ProductDomain([d]) for d in dom]
    families = _tensor_bumps(dom) if families is None else families
    for lab, bumps in families:
        try:
            full = rep.record(f"{lab} ce", ce_pair_ibp(f, TestForm.volume(bumps), dom, cfg=cfgN))
            one = [ce_pair_ibp(g, TestForm.volume([b]), d1, cfg=cfg1)
                   for g, b, d1 in zip(factors, bumps, singles)]
        except Exception as exc:  # noqa: BLE001
            rep.fail(f"{lab} ce", exc)
            continue
        rep.add(f"{lab}: ce product", _rel(full.value, np.prod([r.value for r in one])), tol * tol_scale)
        for k in range(N):
            pieces = [(b, "dz" if j == k else "dzdzb") for j, b in enumerate(bumps)]
            psi = TestForm.from_tensor(pieces)
            sign = (-1) ** (2 * k)  # every factor before k carries a 2-form
            try:
                full_bc = rep.record(f"{lab} bc {k + 1}", bc_pair(f, psi, dom, cfg=cfgN))
                bk = bc_pair(factors[k], TestForm.from_tensor([(bumps[k], "dz")]), singles[k], cfg=cfg1)
            except Exception as exc:  # noqa: BLE001
                rep.fail(f"{lab} bc {k + 1}", exc)
                continue
            # <ce f_j, b dz ^ dzbar> is the density pairing times the one-variable volume factor
            c1 = volume_density_factor(1)
            mixed = sign * bk.value * np.prod([c1 * one[j].value for j in range(N) if j != k])
            rep.add(f"{lab}: bc mixed product {k + 1}", _rel(full_bc.value, mixed), tol * tol_scale)
    return _done(rep, t0)


def check_growth_extension(f, dom, declared=None, tol=0.5, zero_tol=1e-8, cfg=DEFAULT, tol_scale=1.0):
    """Growth order near the declared one, and ce f vanishing against exterior test forms."""
    rep, dom, t0 = _start("check_growth_extension", f, dom)
    declared = f.declared_growth_order if declared is None else declared
    try:
        est = growth_order_estimate(f, dom)
        rep.notes.append(f"growth estimate {est:.4f}, declared {declared}")
        rep.add(f"growth order (estimate {est:.3f}, declared {declared})", abs(est - declared), tol)
    except Exception as exc:  # noqa: BLE001
        rep.fail("growth order", exc)
    for k in range(dom.N):
        bumps = [_outside(d) if j == k else _straddle(d, 0.0) for j, d in enumerate(dom)]
        phi = TestForm.volume(bumps)
        norm = 1.0  # sup of the product of bumps
        for route, fn in (("ibp", lambda: ce_pair_ibp(f, phi, dom, cfg=cfg)),
                          ("limit", lambda: ce_pair_limit(f, phi, dom, cfg=cfg))):
            lab = f"exterior in factor {k + 1} ({route})"
            try:
                res = rep.record(lab, fn())
            except Exception as exc:  # noqa: BLE001
                rep.fail(lab, exc)
                continue
            rep.add(lab, abs(res.value) / norm, zero_tol * tol_scale)
    return _done(rep, t0)


CHECKS = {
    "check_weinstock": check_weinstock,
    "check_facewise": check_facewise,
    "check_canonicality": check_canonicality,
    "check_edge": check_edge,
    "check_reconstruction": check_reconstruction,
    "check_tensor_ce": check_tensor_ce,
    "check_growth_extension": check_growth_extension,
}
