"""
Compactly supported test forms on C^N with exact z-bar derivative oracles.

A form is stored in normal order: a sum over monomials dz_I ^ dzbar_J (I, J
strictly increasing 0-based index tuples) of coefficient terms

    weight * joint(z_1, ..., z_N) * prod_k  d^{m_k}/dzbar_k^{m_k} u_k(z_k)

where u_k are one-variable smooth factor functions carrying jet oracles and
``joint`` is an optional holomorphic function of all variables (it commutes
with every dbar and with the transversal field).  Public factor indices are
1-based, matching the usual z_1, ..., z_N.

Conventions: dV is Lebesgue measure on R^{2N}; real coordinates per factor
are ordered (x_k, y_k); dz ^ dzbar = -2i dx ^ dy.
"""

from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

import numpy as np

from .jets import Jet, coordinate_jets
from .smooth import BUMP_MASS_2D, mollifier, radial_profile, smooth_step

__all__ = [
    "FactorFunction", "Constant", "BoxBump", "RadialBump", "Cutoff", "DomainCutoff",
    "HoloFactor", "Monomial", "ConjMonomial", "Product",
    "Term", "TestForm", "FaceTerm", "FaceForm", "VectorFieldT",
    "dbar", "dbar_factor", "sigma_apply", "make_weinstock_form", "pullback_to_face",
    "real_density_factor", "volume_density_factor",
]


# one-variable factor functions


class FactorFunction:
    """Smooth function of one complex variable with z-bar jets."""

    support = None  # (center, radius) of a disc containing the support, or None

    def jet(self, z, order):
        raise NotImplementedError

    def shapes(self):
        """(regions, edges) for quadrature: the function vanishes outside the
        intersection of ``regions`` and is analytic away from the ``edges``."""
        return (), ()

    def __call__(self, z):
        return self.jet(np.asarray(z, dtype=complex), 0).c[0]

    def derivative(self, z, m):
        """d^m/dzbar^m at z."""
        return self.jet(np.asarray(z, dtype=complex), m).c[m] * factorial(m)

    def __mul__(self, other):
        return Product((self, other))


def _const_jet(values, order):
    values = np.asarray(values, dtype=complex)
    c = np.zeros((order + 1,) + values.shape, dtype=complex)
    c[0] = values
    return Jet(c)


@dataclass(frozen=True, eq=False)
class Constant(FactorFunction):
    value: complex = 1.0

    def jet(self, z, order):
        return _const_jet(np.full(np.shape(z), self.value, dtype=complex), order)


@dataclass(frozen=True, eq=False)
class BoxBump(FactorFunction):
    """Product of mollifier profiles on [x0, x1] x [y0, y1], peak value 1."""
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def support(self):
        c = complex(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
        return c, 0.5 * np.hypot(self.x1 - self.x0, self.y1 - self.y0)

    def shapes(self):
        return (("box", self.x0, self.x1, self.y0, self.y1),), ()

    def jet(self, z, order):
        x, y = coordinate_jets(z, order)
        tx = (x * 2.0 - (self.x0 + self.x1)) * (1.0 / (self.x1 - self.x0))
        ty = (y * 2.0 - (self.y0 + self.y1)) * (1.0 / (self.y1 - self.y0))
        return mollifier(tx) * mollifier(ty) * np.exp(2.0)

    @classmethod
    def around(cls, center, half_x, half_y=None):
        half_y = half_x if half_y is None else half_y
        c = complex(center)
        return cls(c.real - half_x, c.real + half_x, c.imag - half_y, c.imag + half_y)


@dataclass(frozen=True, eq=False)
class RadialBump(FactorFunction):
    """exp(-1/(1 - |z-c|^2/R^2)); with ``normalized`` its integral over C is 1."""
    center: complex
    radius: float
    normalized: bool = False

    @property
    def support(self):
        return complex(self.center), self.radius

    def shapes(self):
        c = complex(self.center)
        return (("disc", c.real, c.imag, self.radius),), ()

    def jet(self, z, order):
        x, y = coordinate_jets(z, order)
        c = complex(self.center)
        u = ((x - c.real) * (x - c.real) + (y - c.imag) * (y - c.imag)) * (1.0 / self.radius ** 2)
        out = radial_profile(u)
        if self.normalized:
            out = out * (1.0 / (np.pi * self.radius ** 2 * BUMP_MASS_2D))
        return out


@dataclass(frozen=True, eq=False)
class Cutoff(FactorFunction):
    """1 on |z - c| <= r_in, 0 on |z - c| >= r_out."""
    center: complex
    r_in: float
    r_out: float

    @property
    def support(self):
        return complex(self.center), self.r_out

    def shapes(self):
        c = complex(self.center)
        return (("disc", c.real, c.imag, self.r_out),), (("circle", c.real, c.imag, self.r_in),)

    def jet(self, z, order):
        x, y = coordinate_jets(z, order)
        c = complex(self.center)
        q = (x - c.real) * (x - c.real) + (y - c.imag) * (y - c.imag)
        return smooth_step((self.r_out ** 2 - q) * (1.0 / (self.r_out ** 2 - self.r_in ** 2)))


@dataclass(frozen=True, eq=False)
class DomainCutoff(FactorFunction):
    """1 on {r <= margin/2 / L}, 0 on {r >= margin / L} for a planar factor, L = max(a, b).

    The support lies in the margin-neighbourhood of the closed factor.
    """
    domain: object
    margin: float

    @property
    def support(self):
        d = self.domain
        return d.center, max(d.a, d.b) + self.margin

    def jet(self, z, order):
        L = max(self.domain.a, self.domain.b)
        hi = self.margin / L
        z = np.asarray(z, dtype=complex)
        # on the plateau the value is 1; skipping it also avoids the kink of r at the centre
        flat = self.domain.r(z) <= 0.25 * hi
        r = self.domain.r_jet(np.where(flat, self.domain.gamma(0.0), z), order)
        out = smooth_step((hi - r) * (2.0 / hi))
        c = out.c.copy()
        c[:, flat] = 0.0
        c[0, flat] = 1.0
        return Jet(c)


@dataclass(frozen=True, eq=False)
class HoloFactor(FactorFunction):
    """Holomorphic factor g(z); its z-bar jet is constant."""
    fn: object
    label: str = "g"

    def jet(self, z, order):
        with np.errstate(all="ignore"):
            return _const_jet(self.fn(z), order)


def Monomial(n):
    return HoloFactor(lambda z, n=n: np.asarray(z, dtype=complex) ** n, f"z^{n}")


@dataclass(frozen=True, eq=False)
class ConjMonomial(FactorFunction):
    """conj(z)^n."""
    n: int

    def jet(self, z, order):
        x, y = coordinate_jets(z, order)
        zb = x - y * 1j
        return zb ** self.n


@dataclass(frozen=True, eq=False)
class Product(FactorFunction):
    parts: tuple

    @property
    def support(self):
        best = None
        for p in self.parts:
            s = p.support
            if s is not None and (best is None or s[1] < best[1]):
                best = s
        return best

    def shapes(self):
        reg, edg = (), ()
        for p in self.parts:
            a, b = p.shapes()
            reg, edg = reg + a, edg + b
        return reg, edg

    def jet(self, z, order):
        out = self.parts[0].jet(z, order)
        for p in self.parts[1:]:
            out = out * p.jet(z, order)
        return out


def slot_jet(slot, z, order):
    """Jet of d^m u / dzbar^m (slot = (u, m)) truncated at ``order``."""
    u, m = slot
    j = u.jet(z, order + m)
    for _ in range(m):
        j = j.d()
    return j


def slot_value(slot, z):
    u, m = slot
    if m == 0:
        return u(z)
    return u.derivative(z, m)


# exterior algebra bookkeeping


def _sort_sign(seq, key):
    """Sign of the permutation that sorts seq by key (0 if an entry repeats)."""
    keys = [key(s) for s in seq]
    if len(set(keys)) != len(keys):
        return 0
    sign = 1
    for i in range(len(keys)):
        for j in range(i + 1, len(keys)):
            if keys[i] > keys[j]:
                sign = -sign
    return sign


def _normal_key(s):
    return (0 if s[0] == "z" else 1, s[1])


def _tensor_key(s):
    return (s[1], 0 if s[0] == "z" else 1)


def _normal_seq(I, J):
    return [("z", i) for i in I] + [("zb", j) for j in J]


def _tensor_seq(I, J, N):
    out = []
    for k in range(N):
        if k in I:
            out.append(("z", k))
        if k in J:
            out.append(("zb", k))
    return out


def _degrees(I, J, N):
    return [int(k in I) + int(k in J) for k in range(N)]


def _oneform_row(sym, N, frame):
    """Row of a 1-form in an oriented real frame.

    frame lists basis labels: ('x', k), ('y', k) or ('t', k) for a boundary
    parameter in factor k (in which case gamma' must be supplied via frame dict).
    """
    row = np.zeros(len(frame), dtype=complex)
    kind, k = sym[0], sym[1]
    for col, (lab, kk, gp) in enumerate(frame):
        if kk != k:
            continue
        if lab == "x":
            row[col] = 1.0
        elif lab == "y":
            row[col] = 1j if kind == "z" else -1j
        elif lab == "t":
            row[col] = gp if kind in ("z", "dt") else np.conj(gp)
    return row


def volume_density_factor(N):
    """Real coefficient c_N with dz_1..dz_N dzbar_1..dzbar_N = c_N dV."""
    frame = [(lab, k, None) for k in range(N) for lab in ("x", "y")]
    M = np.array([_oneform_row(s, N, frame) for s in _normal_seq(range(N), range(N))])
    return complex(np.round(np.linalg.det(M), 12))


def real_density_factor(N, k, I, J):
    """Coefficient of dt ^ dz_I ^ dzbar_J against the oriented face frame of face k.

    The face bD_k x C^{N-1} is oriented in block order with the boundary
    parameter t in place of (x_k, y_k).  I, J exclude k.
    """
    frame = []
    for j in range(N):
        if j == k:
            frame.append(("t", j, 1.0))
        else:
            frame.extend([("x", j, None), ("y", j, None)])
    seq = [("dt", k)] + _normal_seq(I, J)
    if len(seq) != len(frame):
        return 0.0
    M = np.array([_oneform_row(s, N, frame) for s in seq])
    return complex(np.round(np.linalg.det(M), 12))


# test forms


@dataclass(frozen=True)
class Term:
    weight: complex
    slots: tuple  # per factor (FactorFunction, dbar order)
    joint: object = None  # holomorphic function of all variables, or None

    def scaled(self, c):
        return Term(self.weight * c, self.slots, self.joint)

    def bump(self, k):
        slots = list(self.slots)
        u, m = slots[k]
        slots[k] = (u, m + 1)
        return Term(self.weight, tuple(slots), self.joint)

    def value(self, z):
        out = self.weight
        for slot, zk in zip(self.slots, z):
            out = out * slot_value(slot, zk)
        if self.joint is not None:
            with np.errstate(all="ignore"):
                out = out * self.joint(*z)
        return out


class TestForm:
    """Finite sum of tensor monomials in normal order."""

    __test__ = False  # keep pytest from collecting this class

    def __init__(self, N, monomials=None):
        self.N = int(N)
        self.monomials = {}
        for key, terms in (monomials or {}).items():
            I, J = tuple(key[0]), tuple(key[1])
            if list(I) != sorted(set(I)) or list(J) != sorted(set(J)):
                raise ValueError(f"monomial {key} is not in normal form")
            if terms:
                self.monomials.setdefault((I, J), []).extend(terms)

    # construction

    @classmethod
    def from_tensor(cls, pieces, weight=1.0, joint=None):
        """Tensor product of per-factor pieces (u_k, basis_k).

        basis_k is one of '', 'dz', 'dzb', 'dzdzb' (the latter meaning
        dz_k ^ dzbar_k).
        """
        N = len(pieces)
        I = tuple(k for k, (_, b) in enumerate(pieces) if b in ("dz", "dzdzb"))
        J = tuple(k for k, (_, b) in enumerate(pieces) if b in ("dzb", "dzdzb"))
        for _, b in pieces:
            if b not in ("", "dz", "dzb", "dzdzb"):
                raise ValueError(f"unknown factor basis {b!r}")
        sign = _sort_sign(_tensor_seq(I, J, N), _normal_key)
        slots = tuple((u, 0) for u, _ in pieces)
        return cls(N, {(I, J): [Term(complex(weight) * sign, slots, joint)]})

    @classmethod
    def monomial(cls, N, I, J, factors, weight=1.0, joint=None):
        """weight * joint * prod factors  dz_I ^ dzbar_J with 0-based index tuples."""
        s = _sort_sign(_normal_seq(I, J), _normal_key)
        return cls(N, {(tuple(sorted(I)), tuple(sorted(J))):
                       [Term(complex(weight) * s, tuple((u, 0) for u in factors), joint)]})

    @classmethod
    def volume(cls, factors, weight=1.0, joint=None):
        """Top-degree form whose real density against dV is weight * prod factors."""
        N = len(factors)
        c = volume_density_factor(N)
        full = tuple(range(N))
        return cls(N, {(full, full): [Term(complex(weight) / c, tuple((u, 0) for u in factors), joint)]})

    # algebra

    def __add__(self, other):
        if other.N != self.N:
            raise ValueError("dimension mismatch")
        out = TestForm(self.N, {k: list(v) for k, v in self.monomials.items()})
        for k, v in other.monomials.items():
            out.monomials.setdefault(k, []).extend(v)
        return out

    def __mul__(self, c):
        return TestForm(self.N, {k: [t.scaled(c) for t in v] for k, v in self.monomials.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    @property
    def is_zero(self):
        return not any(t.weight != 0 for v in self.monomials.values() for t in v)

    @property
    def bidegree(self):
        degs = {(len(I), len(J)) for I, J in self.monomials}
        if len(degs) > 1:
            raise ValueError(f"mixed bidegrees {sorted(degs)}")
        return degs.pop() if degs else None

    def factor_degrees(self, key):
        return _degrees(key[0], key[1], self.N)

    def coefficient(self, I, J, z):
        z = [np.asarray(zk, dtype=complex) for zk in z]
        shape = np.broadcast_shapes(*[zk.shape for zk in z])
        out = np.zeros(shape, dtype=complex)
        for t in self.monomials.get((tuple(I), tuple(J)), []):
            out = out + t.value(z)
        return out

    def coefficients(self, z):
        return {key: self.coefficient(key[0], key[1], z) for key in self.monomials}

    def __repr__(self):
        parts = []
        for (I, J), terms in sorted(self.monomials.items()):
            basis = " ".join([f"dz{i + 1}" for i in I] + [f"dzb{j + 1}" for j in J]) or "1"
            parts.append(f"{len(terms)} term(s) {basis}")
        return f"TestForm(N={self.N}: " + "; ".join(parts) + ")"


def dbar(form):
    """Exterior z-bar derivative: raises q by one."""
    out = {}
    for (I, J), terms in form.monomials.items():
        for k in range(form.N):
            if k in J:
                continue
            sign = (-1) ** (len(I) + sum(1 for j in J if j < k))
            J2 = tuple(sorted(J + (k,)))
            out.setdefault((I, J2), []).extend(t.bump(k).scaled(sign) for t in terms)
    return TestForm(form.N, out)


def dbar_factor(k, form):
    """dbar in the k-th factor only (1-based k), acting inside the tensor block of z_k."""
    k0 = k - 1
    if not 0 <= k0 < form.N:
        raise ValueError(f"factor index {k} out of range 1..{form.N}")
    out = {}
    for (I, J), terms in form.monomials.items():
        if k0 in J:
            continue
        tau = _sort_sign(_normal_seq(I, J), _tensor_key)
        seq = []
        for b in range(form.N):
            if b == k0:
                seq.append(("zb", b))
            if b in I:
                seq.append(("z", b))
            if b in J:
                seq.append(("zb", b))
        sign = tau * _sort_sign(seq, _normal_key)
        J2 = tuple(sorted(J + (k0,)))
        out.setdefault((I, J2), []).extend(t.bump(k0).scaled(sign) for t in terms)
    return TestForm(form.N, out)


def sigma_apply(j, form):
    """Multiply each monomial by (-1)^(sum of factor degrees before factor j), 1-based j."""
    if not 1 <= j <= form.N:
        raise ValueError(f"factor index {j} out of range 1..{form.N}")
    out = {}
    for key, terms in form.monomials.items():
        degs = form.factor_degrees(key)
        if degs is None:
            raise ValueError(f"tensor degrees unknown for monomial {key}")
        s = (-1) ** sum(degs[: j - 1])
        out[key] = [t.scaled(s) for t in terms]
    return TestForm(form.N, out)


def make_weinstock_form(dom, g, cutoff_margin=0.2, J=None, holomorphy_margin=np.inf):
    """chi * g * dz_1 ^ ... ^ dz_N ^ dzbar_J with |J| = N - 1 (0-based J).

    chi is a product of cutoffs equal to 1 on a neighbourhood of the closed
    domain, so dbar of the result vanishes there.  ``g`` is a holomorphic
    function of N variables valid on the holomorphy_margin-neighbourhood, or a
    dict {exponent tuple: coefficient} describing a polynomial.
    """
    from .geometry import as_product
    dom = as_product(dom)
    N = dom.N
    if cutoff_margin > holomorphy_margin:
        raise ValueError(f"cutoff margin {cutoff_margin} exceeds the holomorphy margin "
                         f"{holomorphy_margin} of g")
    if J is None:
        J = tuple(range(N - 1))
    J = tuple(sorted(J))
    if len(J) != N - 1:
        raise ValueError("the antiholomorphic part must have degree N - 1")
    chis = [DomainCutoff(d, cutoff_margin) for d in dom]
    if isinstance(g, dict):
        # polynomial sum c_a z^a, kept in tensor form so no joint factor is needed
        terms = []
        for a, c in g.items():
            if len(a) != N:
                raise ValueError(f"exponent {a} does not have {N} entries")
            slots = tuple((chi if ak == 0 else Product((chi, Monomial(ak))), 0)
                          for chi, ak in zip(chis, a))
            terms.append(Term(complex(c), slots))
        return TestForm(N, {(tuple(range(N)), J): terms})
    return TestForm(N, {(tuple(range(N)), J): [Term(1.0, tuple((c, 0) for c in chis), g)]})


# faces


@dataclass(frozen=True)
class FaceTerm:
    weight: complex
    angular: object  # callable t -> complex array (already includes the factor-k slot)
    slots: tuple  # per factor; entry k is None
    joint: object = None
    shapes: tuple = ()  # support shapes of the angular part, for quadrature breakpoints


class FaceForm:
    """Form on the extended face bD_k x C^{N-1}, in normal order dt ^ dz_I ^ dzbar_J.

    ``monomials`` maps (has_dt, I, J) with I, J excluding k to FaceTerm lists.
    """

    def __init__(self, N, k, domain, monomials=None):
        self.N, self.k, self.domain = N, k, domain
        self.monomials = {key: list(v) for key, v in (monomials or {}).items() if v}

    @classmethod
    def density(cls, N, k, domain, terms):
        """Top-degree face form with real density sum(weight * p(t) * prod q_j) against dt dV.

        ``terms`` holds tuples (weight, p, qs[, joint]) where p is a callable
        of the boundary parameter and qs lists the factor functions of the
        other variables (length N - 1, or N with None at position k); an
        entry may also be a slot (u, m) standing for d^m u / dzbar^m.
        """
        others = tuple(j for j in range(N) if j != k - 1)
        c = real_density_factor(N, k - 1, others, others)
        fts = []
        for t in terms:
            w, p, qs = t[0], t[1], list(t[2])
            joint = t[3] if len(t) > 3 else None
            if len(qs) == N - 1:
                qs.insert(k - 1, None)
            slots = tuple(None if j == k - 1 else qs[j] if isinstance(qs[j], tuple) else (qs[j], 0)
                          for j in range(N))
            fts.append(FaceTerm(complex(w) / c, p, slots, joint))
        return cls(N, k - 1, domain, {(True, others, others): fts})

    @property
    def is_zero(self):
        return not self.monomials

    def top_terms(self):
        """FaceTerms of the top-degree part with the real density factor folded into the weight."""
        others = tuple(j for j in range(self.N) if j != self.k)
        c = real_density_factor(self.N, self.k, others, others)
        return [FaceTerm(t.weight * c, t.angular, t.slots, t.joint, t.shapes)
                for t in self.monomials.get((True, others, others), [])]

    def angular_density(self, t):
        """For N = 1: the density of the pulled-back 1-form against dt."""
        out = 0
        for ft in self.top_terms():
            out = out + ft.weight * ft.angular(np.asarray(t, dtype=float))
        return out


def pullback_to_face(form, dom, k):
    """Pull back along z_k = gamma_k(t) (1-based k).

    dz_k becomes gamma'(t) dt and dzbar_k becomes conj(gamma'(t)) dt; monomials
    containing both vanish.
    """
    from .geometry import as_product
    dom = as_product(dom)
    k0 = k - 1
    d = dom[k0]
    out = {}
    for (I, J), terms in form.monomials.items():
        inI, inJ = k0 in I, k0 in J
        if inI and inJ:
            continue
        I2 = tuple(i for i in I if i != k0)
        J2 = tuple(j for j in J if j != k0)
        if inI or inJ:
            pos = I.index(k0) if inI else len(I) + J.index(k0)
            sign = (-1) ** pos
            mult = d.dgamma if inI else (lambda t: np.conj(d.dgamma(t)))
        else:
            sign, mult = 1, (lambda t: 1.0)
        for t in terms:
            slot = t.slots[k0]
            ang = (lambda tt, slot=slot, mult=mult: mult(tt) * slot_value(slot, d.gamma(tt)))
            slots = tuple(None if j == k0 else s for j, s in enumerate(t.slots))
            reg, edg = slot[0].shapes()
            out.setdefault((inI or inJ, I2, J2), []).append(
                FaceTerm(t.weight * sign, ang, slots, t.joint, reg + edg))
    return FaceForm(form.N, k0, d, out)


# transversal field


@dataclass(frozen=True)
class VectorFieldT:
    """T = a d/dzbar on factor k (1-based) with a = 1 / (dr/dzbar), so T r = 1 on the band."""
    domain: object
    k: int = 1

    def a(self, z):
        return 1.0 / self.domain.dbar_r(z)

    def check(self, n=200, seed=0):
        rng = np.random.default_rng(seed)
        d = self.domain
        lo, hi = d.band
        z = d.center + rng.uniform(lo + 0.01, hi - 0.01, n) * (d.gamma(rng.uniform(0, 2 * np.pi, n)) - d.center)
        return float(np.max(np.abs(self.a(z) * d.dbar_r(z) - 1)))

    def apply(self, v, z):
        """T v = a dv/dzbar on a Jet ``v`` at z; the order drops by one."""
        a = self.domain.r_jet(z, v.order).d().reciprocal()
        return a.truncate(v.order - 1) * v.d()

    def apply_transpose(self, v, z, s=1):
        """(T*)^s v with T* v = -a dv/dzbar - (da/dzbar) v, on jets.

        ``v`` is a Jet at z of order >= s; returns a Jet of order (order - s).
        """
        a = self.domain.r_jet(z, v.order + 1).d().reciprocal()
        da = a.d()
        for _ in range(s):
            n = v.order - 1
            v = -(a.truncate(n) * v.d()) - da.truncate(n) * v.truncate(n)
        return v
