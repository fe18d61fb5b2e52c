"""Named symbol presets and a tiny expression language for user symbols.

Presets::

    one                       a = 1                          (degree 0)
    laplace                   a = zeta^2 + eta^2             (degree 2)
    resolvent(k)              a = (1 + zeta^2 + eta^2)^-k    (degree -2k)
    modulated-resolvent(k)    a = (2 + cos z) resolvent(k)   (degree -2k)

Expressions use the variables ``z``, ``y``, ``zeta``, ``eta``, the
functions ``sqrt``, ``cos``, ``sin``, the constant ``pi``, numeric literals,
``+ - * /`` and integer powers (``^`` or ``**``).  An expression needs a
declared degree, either as ``expr @ degree`` or through ``degree=``.
"""
from __future__ import annotations

import ast
import math
import re
import warnings
from math import comb

import numpy as np

from .symbols import ClassicalSymbol, HomogeneousComponent

__all__ = ["parse_symbol", "resolvent", "modulated_resolvent", "ONE", "LAPLACE", "SymbolSpecError"]

EXPANSION_TERMS = 4


class SymbolSpecError(ValueError):
    pass


def _one(z, y, zeta, eta):
    return np.ones(np.broadcast(z, y, zeta, eta).shape)


def _laplace(z, y, zeta, eta):
    return np.broadcast_to(zeta * zeta + eta * eta, np.broadcast(z, y, zeta, eta).shape)


# polynomial symbols need no low-frequency cutoff
ONE = ClassicalSymbol((HomogeneousComponent(0.0, _one, "1"),), cutoff_radius=0.0, label="one")
LAPLACE = ClassicalSymbol(
    (HomogeneousComponent(2.0, _laplace, "zeta^2+eta^2"),), cutoff_radius=0.0, label="laplace"
)


def _power_term(coef, p, modulated):
    def f(z, y, zeta, eta):
        r2 = zeta * zeta + eta * eta
        out = coef * r2 ** float(p)
        return (2.0 + np.cos(z)) * out if modulated else out

    return f


def _resolvent(k: int, modulated: bool, terms: int = EXPANSION_TERMS) -> ClassicalSymbol:
    if k < 1:
        raise SymbolSpecError(f"resolvent order must be a positive integer, got {k}")
    d = -2 * k
    comps = []
    # (1 + r^2)^-k = sum_j binom(-k, j) r^(-2k-2j); odd orders vanish
    for i in range(terms + 1):
        if i % 2:
            comps.append(ClassicalSymbol.zero_component(d - i))
        else:
            j = i // 2
            coef = (-1) ** j * comb(k + j - 1, j)
            comps.append(
                HomogeneousComponent(d - i, _power_term(coef, -k - j, modulated), f"{coef}r^{d - i}")
            )

    def full(z, y, zeta, eta):
        out = (1.0 + zeta * zeta + eta * eta) ** float(-k)
        return (2.0 + np.cos(z)) * out if modulated else out

    name = f"modulated-resolvent({k})" if modulated else f"resolvent({k})"
    return ClassicalSymbol(tuple(comps), 1.0, full, name)


def resolvent(k: int = 1) -> ClassicalSymbol:
    return _resolvent(k, False)


def modulated_resolvent(k: int = 1) -> ClassicalSymbol:
    return _resolvent(k, True)


_PRESET = re.compile(r"^\s*(one|laplace|resolvent|modulated-resolvent)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def parse_symbol(text: str, degree: float | None = None, probe: bool = True) -> ClassicalSymbol:
    """Turn a preset name or an expression into a :class:`ClassicalSymbol`."""
    m = _PRESET.match(text)
    if m:
        name, arg = m.groups()
        if name in ("one", "laplace"):
            if arg is not None:
                raise SymbolSpecError(f"preset {name!r} takes no argument")
            return ONE if name == "one" else LAPLACE
        k = int(arg) if arg is not None else 1
        return resolvent(k) if name == "resolvent" else modulated_resolvent(k)

    expr = text
    if "@" in text:
        expr, _, deg_text = text.rpartition("@")
        try:
            degree = float(deg_text)
        except ValueError:
            raise SymbolSpecError(f"bad degree {deg_text!r}") from None
    if degree is None:
        raise SymbolSpecError("an expression symbol needs a declared degree (expr @ degree)")
    f = compile_expression(expr)
    sym = ClassicalSymbol((HomogeneousComponent(float(degree), f, expr.strip()),), 1.0, None, expr.strip())
    if probe:
        est = probe_degree(f)
        if not math.isfinite(est) or abs(est - degree) > 0.05:
            warnings.warn(
                f"declared degree {degree} disagrees with sampled decay rate {est:.3f} of {expr.strip()!r}",
                stacklevel=2,
            )
    return sym


def probe_degree(f, seed: int = 0) -> float:
    """Median log-slope of ``|f|`` along random frequency rays, |xi| 1e3 -> 1e4."""
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.0, 2.0 * math.pi, 16)
    z = rng.uniform(0.0, 2.0 * math.pi, 16)
    lo = np.abs(np.broadcast_to(f(z, 0.0, 1e3 * np.cos(th), 1e3 * np.sin(th)), th.shape))
    hi = np.abs(np.broadcast_to(f(z, 0.0, 1e4 * np.cos(th), 1e4 * np.sin(th)), th.shape))
    ok = (lo > 0) & (hi > 0)
    if not ok.any():
        return float("nan")
    return float(np.median(np.log10(hi[ok] / lo[ok])))


# --------------------------------------------------------------------------
# expressions

_FUNCS = {"sqrt": np.sqrt, "cos": np.cos, "sin": np.sin}
_VARS = ("z", "y", "zeta", "eta")
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply, ast.Div: np.divide}


def compile_expression(text: str):
    """Compile an expression to a broadcasting ``(z, y, zeta, eta)`` callable."""
    src = text.replace("^", "**")
    try:
        tree = ast.parse(src.strip(), mode="eval")
    except SyntaxError as exc:
        raise SymbolSpecError(f"cannot parse symbol expression {text!r}: {exc.msg}") from None
    node = tree.body
    _check(node, text)

    def f(z, y, zeta, eta):
        env = {"z": np.asarray(z, float), "y": np.asarray(y, float),
               "zeta": np.asarray(zeta, float), "eta": np.asarray(eta, float)}
        with np.errstate(divide="ignore", invalid="ignore"):
            out = _eval(node, env)
        return np.broadcast_to(out, np.broadcast(z, y, zeta, eta).shape)

    return f


def _int_literal(node):
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _int_literal(node.operand)
        return None if v is None else (-v if isinstance(node.op, ast.USub) else v)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return node.value
    return None


def _check(node, text):
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            if _int_literal(node.right) is None:
                raise SymbolSpecError(f"only integer powers are allowed in {text!r}")
            _check(node.left, text)
            return
        if type(node.op) not in _BINOPS:
            raise SymbolSpecError(f"operator {type(node.op).__name__} not allowed in {text!r}")
        _check(node.left, text)
        _check(node.right, text)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        _check(node.operand, text)
    elif isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
            raise SymbolSpecError(f"unknown function in {text!r}; allowed: {sorted(_FUNCS)}")
        if len(node.args) != 1 or node.keywords:
            raise SymbolSpecError(f"{node.func.id} takes exactly one argument")
        _check(node.args[0], text)
    elif isinstance(node, ast.Name):
        if node.id not in _VARS and node.id != "pi":
            raise SymbolSpecError(f"unknown name {node.id!r}; variables are {_VARS}")
    elif isinstance(node, ast.Constant):
        if not isinstance(node.value, (int, float)) or isinstance(node.value, bool):
            raise SymbolSpecError(f"bad literal {node.value!r}")
    else:
        raise SymbolSpecError(f"unsupported syntax {type(node).__name__} in {text!r}")


def _eval(node, env):
    if isinstance(node, ast.BinOp):
        left = _eval(node.left, env)
        if isinstance(node.op, ast.Pow):
            return np.power(np.asarray(left, float), float(_int_literal(node.right)))
        return _BINOPS[type(node.op)](left, _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return _FUNCS[node.func.id](_eval(node.args[0], env))
    if isinstance(node, ast.Name):
        return math.pi if node.id == "pi" else env[node.id]
    return float(node.value)
