"""
Planar factors, product domains, boundary patches and quadrature rules.

Every planar factor is an axis-aligned ellipse

    D = {z : ((x - cx)/a)^2 + ((y - cy)/b)^2 < 1}

with defining function r = rho - 1, rho the elliptic radius.  The disc of
radius R is the case a = b = R, where r = |z - c|/R - 1 (so the unit disc
has r = |z| - 1).  The boundary parameter is gamma(t) = c + a cos t + i b sin t,
counterclockwise.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .jets import Jet, coordinate_jets, jlog, jsqrt
from .smooth import smooth_step

__all__ = [
    "PlanarDomain", "ProductDomain", "BoundaryPatch", "PlanarRule",
    "TransversalityError", "unit_disc", "disc", "ellipse", "parse_domain",
    "dist_to_boundary", "interior_quadrature", "boundary_quadrature",
    "boundary_patches", "gauss_legendre",
]


class TransversalityError(ValueError):
    pass


def gauss_legendre(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def _panels(edges, q):
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(q, a, b)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def graded_edges(K, n_uniform):
    """Panel edges on [0, 1]: geometric toward 0 (ratio 2, K levels) then uniform."""
    geo = [0.0] + [2.0 ** -j for j in range(K, 0, -1)]
    tail = np.linspace(0.5, 1.0, n_uniform + 1)[1:]
    return np.concatenate([geo, tail])


def wrap_angle(t):
    return (np.asarray(t) + np.pi) % (2 * np.pi) - np.pi


@dataclass(frozen=True)
class PlanarDomain:
    a: float = 1.0
    b: float = 1.0
    center: complex = 0j
    name: str = "unit_disc"
    band: tuple = (0.5, 1.5)  # rho-range where the transversal field lives

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("semi-axes must be positive")
        object.__setattr__(self, "center", complex(self.center))

    @property
    def is_disc(self):
        return self.a == self.b

    @property
    def inradius(self):
        return min(self.a, self.b)

    @property
    def bounding_box(self):
        c = self.center
        return (c.real - self.a, c.real + self.a, c.imag - self.b, c.imag + self.b)

    # defining function and its Wirtinger derivative

    def _XY(self, z):
        z = np.asarray(z, dtype=complex) - self.center
        return z.real / self.a, z.imag / self.b

    def rho(self, z):
        X, Y = self._XY(z)
        return np.hypot(X, Y)

    def r(self, z):
        return self.rho(z) - 1.0

    __call__ = r

    def dbar_r(self, z):
        X, Y = self._XY(z)
        rho = np.hypot(X, Y)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (X / self.a + 1j * Y / self.b) / (2 * rho)

    def r_jet(self, z, order):
        x, y = coordinate_jets(z, order)
        X = (x - self.center.real) * (1.0 / self.a)
        Y = (y - self.center.imag) * (1.0 / self.b)
        return jsqrt(X * X + Y * Y) - 1.0

    def angle(self, z):
        X, Y = self._XY(z)
        return np.arctan2(Y, X)

    def angle_jet(self, z, order):
        """Jet of the angle map t(z) = atan2(Y, X); the value branch is (-pi, pi]."""
        x, y = coordinate_jets(z, order)
        X = (x - self.center.real) * (1.0 / self.a)
        Y = (y - self.center.imag) * (1.0 / self.b)
        t = (jlog(X + 1j * Y) - 0.5 * jlog(X * X + Y * Y)) * (-1j)
        c = t.c.copy()
        c[0] = self.angle(z)
        return Jet(c)

    # boundary

    def gamma(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + self.a * np.cos(t) + 1j * self.b * np.sin(t)

    def dgamma(self, t):
        t = np.asarray(t, dtype=float)
        return -self.a * np.sin(t) + 1j * self.b * np.cos(t)

    def normal(self, t):
        """Outward unit normal at gamma(t)."""
        t = np.asarray(t, dtype=float)
        n = self.b * np.cos(t) + 1j * self.a * np.sin(t)
        return n / np.abs(n)

    def contains(self, z):
        return self.r(z) < 0

    def ray_exit(self, z0, direction):
        """Largest s >= 0 with z0 + s*direction in the closed domain (z0 inside)."""
        X, Y = self._XY(z0)
        d = np.asarray(direction, dtype=complex)
        dx, dy = d.real / self.a, d.imag / self.b
        A = dx * dx + dy * dy
        B = 2 * (X * dx + Y * dy)
        C = X * X + Y * Y - 1.0
        disc_ = np.maximum(B * B - 4 * A * C, 0.0)
        return np.maximum((-B + np.sqrt(disc_)) / (2 * A), 0.0)

    def nearest_boundary_param(self, z):
        """Parameter of the boundary point closest to z (exact for discs)."""
        z = complex(z)
        if self.is_disc:
            return float(np.angle(z - self.center)) if z != self.center else 0.0
        ts = np.linspace(0, 2 * np.pi, 2048, endpoint=False)
        d = np.abs(self.gamma(ts) - z)
        t0 = ts[np.argmin(d)]
        h = 2 * np.pi / 2048
        res = minimize_scalar(lambda t: abs(self.gamma(t) - z), bounds=(t0 - h, t0 + h),
                              method="bounded", options={"xatol": 1e-13})
        return float(res.x)

    def dist(self, z):
        z = np.asarray(z, dtype=complex)
        if self.is_disc:
            return np.abs(np.abs(z - self.center) - self.a)
        flat = z.ravel()
        out = np.empty(flat.shape)
        for i, zi in enumerate(flat):
            t = self.nearest_boundary_param(zi)
            out[i] = abs(self.gamma(t) - zi)
        return out.reshape(z.shape)

    def inner_point(self, t, delta):
        """Point at distance delta inside the boundary along the inner normal."""
        return self.gamma(t) - delta * self.normal(t)

    def validate(self, n=256, rng=None):
        """Sampled check of the defining-function invariants; raises on failure."""
        ts = np.linspace(0, 2 * np.pi, n, endpoint=False)
        if np.max(np.abs(self.r(self.gamma(ts)))) > 1e-10:
            raise ValueError(f"{self.name}: boundary parametrization off r = 0")
        g = self.gamma(ts) - self.center
        winding = np.sum(np.diff(np.unwrap(np.angle(np.append(g, g[0]))))) / (2 * np.pi)
        if abs(winding - 1) > 1e-9:
            raise ValueError(f"{self.name}: boundary is not counterclockwise")
        rng = np.random.default_rng(0) if rng is None else rng
        inner = self.center + rng.uniform(0, 0.99, n) * (self.gamma(ts) - self.center)
        if np.any(self.r(inner) >= 0):
            raise ValueError(f"{self.name}: interior samples with r >= 0")
        lo, hi = self.band
        band = self.center + rng.uniform(lo, hi, n) * (self.gamma(ts) - self.center)
        if np.min(np.abs(self.dbar_r(band))) < 1e-3:
            raise ValueError(f"{self.name}: dbar r degenerates on the band")
        return True

    def describe(self):
        if self.is_disc:
            if self.a == 1 and self.center == 0:
                return "unit_disc"
            return f"disc r={self.a:g}" + (f" c={self.center}" if self.center else "")
        return f"ellipse {self.a:g},{self.b:g}"


def unit_disc():
    return PlanarDomain()


def disc(R=1.0, center=0j):
    return PlanarDomain(R, R, center, name=f"disc r={R:g}")


def ellipse(a, b, center=0j):
    return PlanarDomain(a, b, center, name=f"ellipse {a:g},{b:g}")


def parse_domain(text):
    """Parse 'unit_disc', 'disc r=R' or 'ellipse a,b'."""
    s = text.strip()
    if s == "unit_disc":
        return unit_disc()
    if s.startswith("disc"):
        rest = s[4:].strip()
        if not rest.startswith("r="):
            raise ValueError(f"bad disc description {text!r}")
        return disc(float(rest[2:]))
    if s.startswith("ellipse"):
        parts = s[7:].replace(" ", "").split(",")
        if len(parts) != 2:
            raise ValueError(f"bad ellipse description {text!r}")
        return ellipse(float(parts[0]), float(parts[1]))
    raise KeyError(s)


@dataclass(frozen=True)
class ProductDomain:
    factors: tuple

    def __init__(self, factors):
        factors = tuple(factors)
        if len(factors) < 1:
            raise ValueError("a product domain needs at least one factor")
        object.__setattr__(self, "factors", factors)

    @property
    def N(self):
        return len(self.factors)

    def __getitem__(self, k):
        return self.factors[k]

    def __iter__(self):
        return iter(self.factors)

    def contains(self, z):
        z = [np.asarray(zk) for zk in z]
        out = np.ones(np.broadcast_shapes(*[zk.shape for zk in z]), dtype=bool)
        for dom, zk in zip(self.factors, z):
            out &= dom.contains(zk)
        return out

    def in_face(self, k, z, tol=1e-10):
        """Membership in F_k = bD_k x prod_{j != k} closure(D_j)."""
        ok = np.abs(self.factors[k].r(z[k])) < tol
        for j, dom in enumerate(self.factors):
            if j != k:
                ok &= dom.r(z[j]) <= tol
        return ok

    def validate(self):
        for d in self.factors:
            d.validate()
        return True

    def describe(self):
        return " x ".join(d.describe() for d in self.factors)


def as_product(dom):
    return dom if isinstance(dom, ProductDomain) else ProductDomain([dom])


def dist_to_boundary(dom, z):
    """Euclidean distance from z (complex N-vector) to the boundary of dom."""
    dom = as_product(dom)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape[0] != dom.N:
        raise ValueError("point arity does not match the domain")
    return float(min(float(d.dist(zk)) for d, zk in zip(dom.factors, z)))


# quadrature


@dataclass(frozen=True)
class PlanarRule:
    nodes: np.ndarray
    weights: np.ndarray
    anchor: object = None

    def __len__(self):
        return self.nodes.size

    def integrate(self, fn):
        return np.sum(self.weights * fn(self.nodes))

    def restrict(self, mask):
        return PlanarRule(self.nodes[mask], self.weights[mask], self.anchor)


def interior_quadrature(dom, level, anchor=None):
    """Positive quadrature rule on the planar factor ``dom``.

    Without an anchor the rule is polar about the centre: trapezoid in angle,
    Gauss-Legendre panels in the scaled radius.  With an anchor ``t_a`` (a
    boundary parameter) the rule is polar about gamma(t_a), covering the
    inward half-plane of directions, with the radius graded geometrically
    toward the anchor.  This resolves integrands that blow up at that point.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    dom.validate(n=64)
    if anchor is None:
        nth = 16 * 2 ** level
        th = 2 * np.pi * np.arange(nth) / nth
        wth = np.full(nth, 2 * np.pi / nth)
        sig, wsig = _panels(np.linspace(0, 1, 2 ** (level - 1) + 1), 10)
        R = dom.ray_exit(dom.center, np.exp(1j * th))
        S, TH = np.meshgrid(sig, th, indexing="ij")
        RR = np.broadcast_to(R, S.shape)
        nodes = dom.center + S * RR * np.exp(1j * TH)
        weights = (wsig[:, None] * wth[None, :]) * S * RR ** 2
        return PlanarRule(nodes.ravel(), weights.ravel(), None)
    z0 = dom.gamma(anchor)
    th_in = np.angle(-dom.normal(anchor))
    th, wth = _panels(th_in + np.linspace(-np.pi / 2, np.pi / 2, 2 ** (level + 1) + 1), 10)
    sig, wsig = _panels(graded_edges(16, 2 ** (level - 1)), 6 + 2 * level)
    R = dom.ray_exit(z0, np.exp(1j * th))
    S, TH = np.meshgrid(sig, th, indexing="ij")
    RR = np.broadcast_to(R, S.shape)
    nodes = z0 + S * RR * np.exp(1j * TH)
    weights = (wsig[:, None] * wth[None, :]) * S * RR ** 2
    keep = weights > 0
    return PlanarRule(nodes[keep], weights[keep], anchor)


def boundary_quadrature(dom, level, anchor=None):
    """Rule on the boundary parameter interval of length 2*pi.

    Returns (t, w).  Trapezoid when there is no anchor; otherwise Gauss-Legendre
    panels graded toward the anchor parameter from both sides.
    """
    if anchor is None:
        n = 64 * 2 ** level
        t = 2 * np.pi * np.arange(n) / n
        return t, np.full(n, 2 * np.pi / n)
    e = graded_edges(14, 2 ** level)
    x, w = _panels(e, 6 + 2 * level)
    # graded toward both ends of [anchor, anchor + 2 pi]
    t = np.concatenate([anchor + np.pi * x, anchor + 2 * np.pi - np.pi * x[::-1]])
    w = np.concatenate([np.pi * w, np.pi * w[::-1]])
    return t, w


# boundary patches


@dataclass(frozen=True)
class BoundaryPatch:
    factor_index: int
    center: float
    half_width: float
    overlap: float
    transversal: complex
    margin: float
    domain: PlanarDomain = field(repr=False, default=None)

    @property
    def angular_interval(self):
        return (self.center - self.half_width - self.overlap / 2,
                self.center + self.half_width + self.overlap / 2)

    def weight(self, t):
        """Angular partition-of-unity weight (values only)."""
        d = np.abs(wrap_angle(np.asarray(t, dtype=float) - self.center))
        return smooth_step((self.half_width + self.overlap / 2 - d) / self.overlap)

    def weight_jet(self, tjet):
        c = tjet.c.copy()
        d0 = wrap_angle(c[0].real - self.center)
        c[0] = d0
        sgn = np.where(d0 < 0, -1.0, 1.0)
        d = Jet(c * sgn)
        return smooth_step((self.half_width + self.overlap / 2 - d) * (1.0 / self.overlap))

    def ray_check(self, eps_max, n=64):
        """True when gamma(t) + eps*v leaves the closed domain for eps in (0, eps_max]."""
        lo, hi = self.angular_interval
        ts = np.linspace(lo, hi, n)
        eps = eps_max * np.geomspace(1e-6, 1.0, 24)
        pts = self.domain.gamma(ts)[:, None] + eps[None, :] * self.transversal
        return bool(np.all(self.domain.r(pts) > 0))


def boundary_patches(dom, count, overlap=0.3, factor_index=0, min_margin=0.05):
    """Cover the boundary of a planar factor by ``count`` overlapping arcs.

    Arc j is centred at parameter 2*pi*j/count; its transversal is the outward
    normal at that parameter.  Raises TransversalityError when some node of an
    arc fails Re(v * conj(n)) >= min_margin.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be positive")
    half = np.pi / count
    if not (0 < overlap < 2 * half):
        raise ValueError("overlap must lie in (0, 2*pi/count)")
    out = []
    for j in range(count):
        c = 2 * np.pi * j / count
        v = complex(dom.normal(c))
        ts = c + np.linspace(-half - overlap / 2, half + overlap / 2, 513)[1:-1]
        margin = float(np.min(np.real(v * np.conj(dom.normal(ts)))))
        if margin < min_margin:
            raise TransversalityError(
                f"patch {j} of {count} on {dom.describe()}: transversality margin "
                f"{margin:.3f} below {min_margin}")
        out.append(BoundaryPatch(factor_index, c, half, overlap, v, margin, dom))
    return out
