"""
Scenario files and the built-in registries they refer to.

A scenario is a YAML mapping::

    name: disc_smoke
    domain: unit_disc                # registry name, "ellipse 1,0.6", or a list of factors
    functions: [one]                 # names or {name: ..., <parameters>}
    perturb: 0.01                    # optional non-holomorphic control, f + perturb * sum(zbar)
    seed: 0
    tol_scale: 1.0
    config: {level: 2}               # PairingConfig overrides
    checks:
      - check_weinstock: {count: 3}
      - check_growth_extension

Names are resolved while parsing; errors carry the line of the offending key.
"""

import inspect
from dataclasses import dataclass, fields, replace

import yaml

from .geometry import ProductDomain, ellipse, parse_domain, unit_disc
from .holofunc import constant, inv_pole, inv_sum, monomial, polynomial, tensor, zbar_perturbed
from .pairing import DEFAULT, PairingConfig
from .verify import CHECKS

__all__ = ["ScenarioError", "Scenario", "load_scenario", "parse_scenario", "DOMAINS", "FUNCTIONS",
           "FORMS", "list_builtins"]


class ScenarioError(ValueError):
    def __init__(self, msg, line=None, source="<scenario>"):
        self.line = line
        where = f"{source}:{line}" if line is not None else source
        super().__init__(f"{where}: {msg}")


DOMAINS = {
    "unit_disc": lambda: ProductDomain([unit_disc()]),
    "bidisc": lambda: ProductDomain([unit_disc(), unit_disc()]),
    "disc_x_ellipse": lambda: ProductDomain([unit_disc(), ellipse(1.0, 0.6)]),
}


# name -> (constructor(N, **params), parameter defaults, description)
FUNCTIONS = {
    "one": (lambda N: constant(1.0, N), {}, "the constant 1"),
    "const": (lambda N, c=1.0: constant(c, N), {"c": 1.0}, "constant c"),
    "monomial": (lambda N, m=1, k=1: monomial(int(m), N, int(k) - 1), {"m": 1, "k": 1}, "z_k^m"),
    "polynomial": (lambda N, coeffs=(0, 1): polynomial(coeffs), {"coeffs": [0, 1]}, "sum coeffs[n] z^n"),
    "inv_pole": (lambda N, pole=1.0, power=1: inv_pole(complex(pole), int(power)),
                 {"pole": 1.0, "power": 1}, "1/(pole - z)^power"),
    "inv_sum": (lambda N, c=None: inv_sum(N if c is None else c, N), {"c": None},
                "1/(c - z_1 - ... - z_N), c defaults to N"),
}

FORMS = {
    "make_weinstock_form": "chi * g * dz_1..dz_N ^ dzbar_J, dbar-closed near the closed domain",
    "TestForm.volume": "top-degree form with a given real density",
    "TestForm.monomial": "weight * prod u_k dz_I ^ dzbar_J",
    "TestForm.from_tensor": "wedge of per-factor pieces (u_k, basis_k)",
    "FaceForm.density": "top-degree form on a face from p(t) and factor functions",
    "BoxBump": "product of one-dimensional mollifiers on a box",
    "RadialBump": "radial mollifier, optionally normalised to unit mass",
    "Cutoff": "radial cutoff between two radii",
    "DomainCutoff": "cutoff equal to 1 near a closed factor",
}


def list_builtins():
    lines = ["domains:"]
    lines += [f"  {k:16s} {v().describe()}" for k, v in DOMAINS.items()]
    lines.append("  (also 'disc r=R' and 'ellipse a,b' strings, or a list of factors)")
    lines.append("functions:")
    for k, (_, params, desc) in FUNCTIONS.items():
        p = ", ".join(f"{a}={b}" for a, b in params.items())
        lines.append(f"  {k:16s} {desc}" + (f"  [{p}]" if p else ""))
    lines.append("  tensor           {tensor: [f_1, ..., f_N]}, one-variable functions per factor")
    lines.append("form constructors:")
    lines += [f"  {k:20s} {v}" for k, v in FORMS.items()]
    lines.append("checks:")
    for k, fn in CHECKS.items():
        lines.append(f"  {k:24s} {inspect.getdoc(fn).splitlines()[0]}")
    return "\n".join(lines)


@dataclass
class Scenario:
    name: str
    domain: object
    functions: list  # (label, HoloFunction)
    checks: list  # (check name, params)
    cfg: PairingConfig = DEFAULT
    seed: int = 0
    tol_scale: float = 1.0
    output: str = None
    source: str = "<scenario>"


# node helpers


def _line(node):
    return node.start_mark.line + 1


def _value(node, src):
    """Plain Python value of a YAML node."""
    try:
        return yaml.safe_load(yaml.serialize(node))
    except yaml.YAMLError as exc:
        raise ScenarioError(f"bad value: {exc}", _line(node), src) from None


def _mapping(node, src, what):
    if not isinstance(node, yaml.MappingNode):
        raise ScenarioError(f"{what} must be a mapping", _line(node), src)
    out = {}
    for k, v in node.value:
        if not isinstance(k, yaml.ScalarNode):
            raise ScenarioError(f"{what}: keys must be plain names", _line(k), src)
        if k.value in out:
            raise ScenarioError(f"{what}: duplicate key {k.value!r}", _line(k), src)
        out[k.value] = (k, v)
    return out


def _domain(node, src):
    if isinstance(node, yaml.SequenceNode):
        factors = []
        for item in node.value:
            factors.extend(list(_domain(item, src)[0]))
        return ProductDomain(factors), " x ".join(d.describe() for d in factors)
    if not isinstance(node, yaml.ScalarNode):
        raise ScenarioError("domain must be a name, a factor string or a list", _line(node), src)
    text = str(node.value).strip()
    if text in DOMAINS:
        return DOMAINS[text](), text
    try:
        return ProductDomain([parse_domain(text)]), text
    except (ValueError, KeyError) as exc:
        raise ScenarioError(f"unknown domain {text!r} ({exc!s}); known: {', '.join(DOMAINS)}",
                            _line(node), src) from None


def _function(node, N, src):
    if isinstance(node, yaml.ScalarNode):
        name, params, pnodes = str(node.value), {}, {}
        keynode = node
    else:
        m = _mapping(node, src, "function")
        if "tensor" in m:
            knode, vnode = m["tensor"]
            if len(m) > 1:
                other = next(k for k in m if k != "tensor")
                raise ScenarioError(f"unexpected key {other!r} next to 'tensor'", _line(m[other][0]), src)
            if not isinstance(vnode, yaml.SequenceNode) or len(vnode.value) != N:
                raise ScenarioError(f"'tensor' needs a list of {N} one-variable functions", _line(knode), src)
            parts = [_function(v, 1, src)[1] for v in vnode.value]
            f = tensor(parts)
            return f.name, f
        if "name" not in m:
            raise ScenarioError("function mapping needs a 'name' key", _line(node), src)
        keynode = m["name"][1]
        name = str(keynode.value)
        pnodes = {k: kv for k, kv in m.items() if k != "name"}
        params = {k: _value(v, src) for k, (_, v) in pnodes.items()}
    if name not in FUNCTIONS:
        raise ScenarioError(f"unknown function {name!r}; known: {', '.join(FUNCTIONS)}, tensor",
                            _line(keynode), src)
    ctor, defaults, _ = FUNCTIONS[name]
    for k in params:
        if k not in defaults:
            raise ScenarioError(f"function {name!r} has no parameter {k!r}", _line(pnodes[k][0]), src)
    try:
        f = ctor(N, **params)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"function {name!r}: {exc}", _line(keynode), src) from None
    if f.N != N:
        raise ScenarioError(f"function {name!r} takes {f.N} variables, the domain has {N}",
                            _line(keynode), src)
    label = name + "".join(f" {k}={v}" for k, v in params.items())
    return label, f


_CHECK_SKIP = {"f", "dom", "factors", "cfg", "tol_scale"}


def _checks(node, src):
    if not isinstance(node, yaml.SequenceNode):
        raise ScenarioError("checks must be a list", _line(node), src)
    out = []
    for item in node.value:
        if isinstance(item, yaml.ScalarNode):
            name, knode, params, pnodes = str(item.value), item, {}, {}
        else:
            m = _mapping(item, src, "check entry")
            if len(m) != 1:
                raise ScenarioError("a check entry is a name or {name: {parameters}}", _line(item), src)
            name, (knode, vnode) = next(iter(m.items()))
            pnodes = {} if (isinstance(vnode, yaml.ScalarNode) and vnode.value in ("", "~", "null")) \
                else _mapping(vnode, src, f"parameters of {name}")
            params = {k: _value(v, src) for k, (_, v) in pnodes.items()}
        if name not in CHECKS:
            raise ScenarioError(f"unknown check {name!r}; known: {', '.join(CHECKS)}", _line(knode), src)
        sig = inspect.signature(CHECKS[name]).parameters
        for k in params:
            if k not in sig or k in _CHECK_SKIP:
                raise ScenarioError(f"check {name!r} has no parameter {k!r}", _line(pnodes[k][0]), src)
        if "points" in params:
            params["points"] = [tuple(complex(str(x).replace(" ", "")) for x in p) for p in params["points"]]
        out.append((name, params))
    return out


_TOP = {"name", "domain", "function", "functions", "perturb", "seed", "tol_scale", "config", "checks",
        "output"}


def parse_scenario(text, source="<scenario>"):
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"YAML syntax error: {getattr(exc, 'problem', exc)}",
                            mark.line + 1 if mark else None, source) from None
    if root is None:
        raise ScenarioError("empty scenario", None, source)
    top = _mapping(root, source, "scenario")
    for k, (kn, _) in top.items():
        if k not in _TOP:
            raise ScenarioError(f"unknown key {k!r}; expected one of {', '.join(sorted(_TOP))}", _line(kn), source)
    for req in ("domain", "checks"):
        if req not in top:
            raise ScenarioError(f"missing required key {req!r}", _line(root), source)
    dom, _ = _domain(top["domain"][1], source)
    if "function" in top and "functions" in top:
        raise ScenarioError("give either 'function' or 'functions'", _line(top["functions"][0]), source)
    fnode = top.get("functions", top.get("function"))
    if fnode is None:
        raise ScenarioError("missing required key 'functions'", _line(root), source)
    fnode = fnode[1]
    items = fnode.value if isinstance(fnode, yaml.SequenceNode) else [fnode]
    funcs = [_function(n, dom.N, source) for n in items]
    if "perturb" in top:
        delta = _value(top["perturb"][1], source)
        if not isinstance(delta, (int, float)):
            raise ScenarioError("perturb must be a number", _line(top["perturb"][0]), source)
        funcs = [(f"{lab} + {delta:g} zbar", zbar_perturbed(f, float(delta))) for lab, f in funcs]
    cfg = DEFAULT
    if "config" in top:
        cm = _mapping(top["config"][1], source, "config")
        names = {f.name for f in fields(PairingConfig)}
        over = {}
        for k, (kn, vn) in cm.items():
            if k not in names:
                raise ScenarioError(f"unknown config key {k!r}; known: {', '.join(sorted(names))}", _line(kn), source)
            v = _value(vn, source)
            over[k] = tuple(v) if isinstance(v, list) else v
        cfg = replace(DEFAULT, **over)
    sc = Scenario(
        name=str(_value(top["name"][1], source)) if "name" in top else "scenario",
        domain=dom,
        functions=funcs,
        checks=_checks(top["checks"][1], source),
        cfg=cfg,
        seed=int(_value(top["seed"][1], source)) if "seed" in top else 0,
        tol_scale=float(_value(top["tol_scale"][1], source)) if "tol_scale" in top else 1.0,
        output=str(_value(top["output"][1], source)) if "output" in top else None,
        source=source,
    )
    return sc


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc.strerror}", None, str(path)) from None
    return parse_scenario(text, str(path))
