"""
Holomorphic functions of polynomial growth on product domains.

A HoloFunction wraps a vectorised evaluator taking N broadcastable complex
arrays.  Singular hints are raw points (one per factor, or None) near which
the function blows up; quadrature anchors its grading there.
"""

from dataclasses import dataclass, field, replace
from functools import reduce

import numpy as np
from scipy.optimize import minimize

from .geometry import as_product

__all__ = [
    "HoloFunction", "EvaluationError", "constant", "monomial", "polynomial",
    "inv_pole", "inv_sum", "tensor", "translate", "dilate_disc",
    "growth_order_estimate", "zbar_perturbed",
]


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class HoloFunction:
    evaluator: object
    N: int = 1
    declared_growth_order: int = 0
    tensor_factors: tuple = None
    singular_set_hint: tuple = None
    name: str = "f"
    holomorphic: bool = True  # False only for deliberately perturbed controls
    zero: bool = False

    def __call__(self, *z):
        if len(z) != self.N:
            raise ValueError(f"{self.name} takes {self.N} arguments, got {len(z)}")
        with np.errstate(all="ignore"):
            return np.asarray(self.evaluator(*z), dtype=complex)

    @property
    def hints(self):
        return self.singular_set_hint if self.singular_set_hint else (None,) * self.N

    def check_holomorphic(self, dom, n=20, h=1e-4, seed=0, min_dist=0.2):
        """Largest finite-difference |df/dzbar| / (1 + |f|) at random points with dist >= min_dist."""
        dom = as_product(dom)
        rng = np.random.default_rng(seed)
        pts = []
        for d in dom:
            t = rng.uniform(0, 2 * np.pi, n)
            s = rng.uniform(0, 1, n)
            depth = max(min_dist / d.inradius, 0.0)
            pts.append(d.center + (1 - depth) * s * (d.gamma(t) - d.center))
        f0 = self(*pts)
        worst = 0.0
        for k in range(self.N):
            def at(delta):
                return self(*[p + delta if j == k else p for j, p in enumerate(pts)])
            fx = (at(h) - at(-h)) / (2 * h)
            fy = (at(1j * h) - at(-1j * h)) / (2 * h)
            worst = max(worst, float(np.max(np.abs(0.5 * (fx + 1j * fy)) / (1 + np.abs(f0)))))
        return worst

    def check_tensor(self, dom, n=20, seed=0):
        if not self.tensor_factors:
            return 0.0
        dom = as_product(dom)
        rng = np.random.default_rng(seed)
        pts = [d.center + 0.9 * rng.uniform(0, 1, n) * (d.gamma(rng.uniform(0, 6.3, n)) - d.center)
               for d in dom]
        prod = reduce(np.multiply, [g(p) for g, p in zip(self.tensor_factors, pts)])
        return float(np.max(np.abs(self(*pts) - prod)))

    def validate(self, dom, tol=1e-6):
        if not self.holomorphic:
            return True
        res = self.check_holomorphic(dom)
        if res > tol:
            raise ValueError(f"{self.name}: Cauchy-Riemann residual {res:.2e} exceeds {tol}")
        if self.check_tensor(dom) > 1e-12:
            raise ValueError(f"{self.name}: evaluator disagrees with its tensor factors")
        return True


def constant(c=1.0, N=1):
    c = complex(c)
    return HoloFunction(lambda *z: np.full(np.broadcast_shapes(*[np.shape(x) for x in z]), c),
                        N, 0, name=f"const {c.real:g}" if c.imag == 0 else f"const {c}",
                        zero=(c == 0))


def monomial(m, N=1, k=0):
    return HoloFunction(lambda *z: z[k] ** m * np.ones(np.broadcast_shapes(*[np.shape(x) for x in z])),
                        N, 0, name=f"z{k + 1}^{m}" if N > 1 else f"z^{m}")


def polynomial(coeffs):
    """One-variable polynomial sum_n coeffs[n] z^n."""
    c = np.asarray(coeffs, dtype=complex)
    return HoloFunction(lambda z: np.polynomial.polynomial.polyval(z, c), 1, 0,
                        name="poly", zero=not np.any(c))


def inv_pole(pole=1.0, power=1):
    """1/(pole - z)^power."""
    pole = complex(pole)
    return HoloFunction(lambda z: 1.0 / (pole - z) ** power, 1, int(power),
                        singular_set_hint=(pole,), name=f"inv_pole pole={pole.real:g} power={power}")


def inv_sum(c=2.0, N=2):
    """1/(c - z_1 - ... - z_N); on the unit polydisc with c = N it blows up at the corner (1,...,1)."""
    c = complex(c)
    return HoloFunction(lambda *z: 1.0 / (c - sum(z)), N, 1,
                        singular_set_hint=(1.0 + 0j,) * N, name=f"inv_sum c={c.real:g}")


def tensor(factors, dom=None):
    factors = tuple(factors)
    if dom is not None and len(factors) != as_product(dom).N:
        raise ValueError(f"tensor of {len(factors)} factors on a {as_product(dom).N}-factor domain")
    for g in factors:
        if g.N != 1:
            raise ValueError("tensor factors must be functions of one variable")

    def ev(*z):
        return reduce(np.multiply, [g(zk) for g, zk in zip(factors, z)])

    hints = tuple(g.hints[0] for g in factors)
    return HoloFunction(ev, len(factors), sum(g.declared_growth_order for g in factors),
                        factors, hints if any(h is not None for h in hints) else None,
                        " (x) ".join(g.name for g in factors),
                        all(g.holomorphic for g in factors), any(g.zero for g in factors))


def translate(f, v, eps):
    """g(z) = f(z - eps*v)."""
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.size != f.N:
        raise ValueError("translation vector arity mismatch")
    shift = eps * v
    ev = f.evaluator
    tf = None
    if f.tensor_factors:
        tf = tuple(translate(g, [s], 1.0) for g, s in zip(f.tensor_factors, shift))
    hints = None
    if f.singular_set_hint:
        hints = tuple(None if h is None else h + s for h, s in zip(f.singular_set_hint, shift))
    return replace(f, evaluator=lambda *z: ev(*[zk - s for zk, s in zip(z, shift)]),
                   tensor_factors=tf, singular_set_hint=hints, name=f"{f.name} shifted")


def dilate_disc(f, rho, dom=None):
    """g(z) = f(c + rho (z - c)) factorwise; every factor must be a disc."""
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    centers = [0j] * f.N
    if dom is not None:
        dom = as_product(dom)
        for d in dom:
            if not d.is_disc:
                raise ValueError(f"dilation needs disc factors, got {d.describe()}")
        centers = [d.center for d in dom]
    ev = f.evaluator
    return replace(f, evaluator=lambda *z: ev(*[c + rho * (zk - c) for zk, c in zip(z, centers)]),
                   tensor_factors=None, name=f"{f.name} dilated")


def zbar_perturbed(f, delta=1e-2):
    """Non-holomorphic control f + delta * sum(conj z_k)."""
    ev = f.evaluator
    return replace(f, evaluator=lambda *z: ev(*z) + delta * sum(np.conj(zk) for zk in z),
                   tensor_factors=None, holomorphic=False, zero=False,
                   name=f"{f.name} + {delta:g} zbar")


# growth order


def _shell_points(d, delta, ts):
    return d.inner_point(ts, delta)


def _shell_sup(f, dom, delta, rng, n_samples):
    """Approximate sup of |f| over {dist(z, bdry) = delta}."""
    N = dom.N
    cands = []
    ts = rng.uniform(0, 2 * np.pi, (N, n_samples))
    hint_ts = []
    for k, (d, h) in enumerate(zip(dom, f.hints)):
        hint_ts.append(None if h is None else d.nearest_boundary_param(h))
    # every factor on its shell
    pts = [_shell_points(d, delta, ts[k]) for k, d in enumerate(dom)]
    cands.append(("all", pts, ts))
    if all(h is not None for h in hint_ts):
        ht = np.array(hint_ts)[:, None]
        cands.append(("all", [_shell_points(d, delta, ht[k]) for k, d in enumerate(dom)], ht))
    # factor k on its shell, others deeper
    if N > 1:
        for k in range(N):
            deep = delta * np.geomspace(1, 1e3, 8)
            pts = []
            for j, d in enumerate(dom):
                if j == k:
                    pts.append(_shell_points(d, delta, ts[j]))
                else:
                    dj = rng.choice(deep[deep < 0.95 * d.inradius], n_samples)
                    pts.append(d.inner_point(ts[j], dj))
            cands.append(("mixed", pts, None))
    best_val, best = -np.inf, None
    for kind, pts, tt in cands:
        vals = np.abs(f(*pts))
        vals = np.where(np.isfinite(vals), vals, np.inf)
        if np.any(np.isinf(vals)):
            raise EvaluationError(f"{f.name}: non-finite value on the shell dist={delta:g}")
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = vals[i]
            best = (kind, [np.ravel(p)[i] if np.size(p) > 1 else complex(np.ravel(p)[0]) for p in pts])
    # local refinement over the shell parameters (all factors on the shell)
    if best[0] == "all":
        t0 = np.array([d.nearest_boundary_param(p) if not d.is_disc else np.angle(p - d.center)
                       for d, p in zip(dom, best[1])])

        def neg(t):
            return -abs(complex(f(*[_shell_points(d, delta, t[k]) for k, d in enumerate(dom)])))
        res = minimize(neg, t0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14})
        best_val = max(best_val, -res.fun)
    return best_val


def growth_order_estimate(f, dom, deltas=None, n_samples=512, seed=0):
    """Least-squares slope of log sup|f| on distance shells against -log dist.

    Shells sit at geometric distances in [1e-4, 1e-1].  The result is clamped
    at zero.
    """
    dom = as_product(dom)
    if deltas is None:
        deltas = np.geomspace(1e-1, 1e-4, 7)
    rng = np.random.default_rng(seed)
    sups = np.array([_shell_sup(f, dom, dl, rng, n_samples) for dl in deltas])
    if np.any(sups <= 0):
        return 0.0
    slope = np.polyfit(-np.log(deltas), np.log(sups), 1)[0]
    return max(float(slope), 0.0)
