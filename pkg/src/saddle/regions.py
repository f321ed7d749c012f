"""Initial-direction recipes: planar region predicates and boundary data.

Regions are described by a small expression grammar and evaluated on node
coordinates.  Every primitive is backed by a signed level function s(x);
the region is the open set {s > 0} and ``complement`` flips the sign, so
nodes on the dividing set belong to neither a region nor its complement
(this keeps indicator loads exactly antisymmetric on symmetric grids).

Grammar:
    all | empty
    halfplane(a, b, c)      {a*x1 + b*x2 > c}
    quadrant(sx, sy)        {sx*x1 > 0 and sy*x2 > 0}
    band(a, b, c)           {|a*x1 + b*x2| > c}
    absdiff                 {|x1| > |x2|}
    disc(r)                 {x1^2 + x2^2 < r^2}
    complement(R)
    union(R1, R2, ...)

Boundary data for flux-driven problems is written as an expression in the
boundary parameter ``theta`` (supporting sin, cos, pi and arithmetic), with
theta the scaled arc length along the boundary, counterclockwise from the
lower-left corner, running over [0, 2*pi).
"""

from __future__ import annotations

import ast
import math
import re

import numpy as np

from .errors import ConfigError
from .grid import GridSpec

_TOKEN = re.compile(r"\s*([A-Za-z_]+|[-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?|[(),])")


def _tokenize(text: str):
    pos, out = 0, []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ConfigError(f"region: cannot tokenize {text[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class Region:
    """A node-set predicate with a signed level function."""

    def __init__(self, fn, text):
        self._fn = fn
        self.text = text

    def level(self, x1, x2):
        return self._fn(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))

    def mask(self, x1, x2):
        return self.level(x1, x2) > 0.0

    def __repr__(self):
        return f"Region({self.text})"

    def __reduce__(self):
        # the level function is a closure; rebuild from source when pickled
        return (parse_region, (self.text,))


def _prim_all(args):
    _expect_arity(args, 0, "all")
    return lambda x1, x2: np.ones_like(x1)


def _prim_empty(args):
    _expect_arity(args, 0, "empty")
    return lambda x1, x2: -np.ones_like(x1)


def _prim_halfplane(args):
    a, b, c = _expect_arity(args, 3, "halfplane")
    return lambda x1, x2: a * x1 + b * x2 - c


def _prim_quadrant(args):
    sx, sy = _expect_arity(args, 2, "quadrant")
    if sx not in (-1.0, 1.0) or sy not in (-1.0, 1.0):
        raise ConfigError("quadrant signs must be +-1")
    return lambda x1, x2: np.minimum(sx * x1, sy * x2)


def _prim_band(args):
    a, b, c = _expect_arity(args, 3, "band")
    return lambda x1, x2: np.abs(a * x1 + b * x2) - c


def _prim_absdiff(args):
    _expect_arity(args, 0, "absdiff")
    return lambda x1, x2: np.abs(x1) - np.abs(x2)


def _prim_disc(args):
    (r,) = _expect_arity(args, 1, "disc")
    return lambda x1, x2: r * r - (x1 * x1 + x2 * x2)


_PRIMITIVES = {
    "all": _prim_all,
    "empty": _prim_empty,
    "halfplane": _prim_halfplane,
    "quadrant": _prim_quadrant,
    "band": _prim_band,
    "absdiff": _prim_absdiff,
    "disc": _prim_disc,
}


def _expect_arity(args, n, name):
    if len(args) != n:
        raise ConfigError(f"region: {name} takes {n} argument(s), got {len(args)}")
    return args


class _Parser:
    def __init__(self, tokens, text):
        self.tokens = tokens
        self.pos = 0
        self.text = text

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None:
            raise ConfigError(f"region: unexpected end of {self.text!r}")
        if expected is not None and tok != expected:
            raise ConfigError(f"region: expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse(self):
        fn = self.expr()
        if self.peek() is not None:
            raise ConfigError(f"region: trailing input {self.peek()!r} in {self.text!r}")
        return fn

    def expr(self):
        name = self.take()
        if name == "complement":
            self.take("(")
            inner = self.expr()
            self.take(")")
            return lambda x1, x2: -inner(x1, x2)
        if name == "union":
            self.take("(")
            parts = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                parts.append(self.expr())
            self.take(")")
            return lambda x1, x2: np.maximum.reduce([p(x1, x2) for p in parts])
        if name not in _PRIMITIVES:
            raise ConfigError(f"region: unknown primitive {name!r}")
        args = []
        if self.peek() == "(":
            self.take("(")
            if self.peek() != ")":
                args.append(self.number())
                while self.peek() == ",":
                    self.take(",")
                    args.append(self.number())
            self.take(")")
        return _PRIMITIVES[name](args)

    def number(self):
        tok = self.take()
        try:
            return float(tok)
        except ValueError:
            raise ConfigError(f"region: expected a number, got {tok!r}")


def parse_region(text: str) -> Region:
    text = text.strip()
    if not text:
        raise ConfigError("region: empty expression")
    return Region(_Parser(_tokenize(text), text).parse(), text)


# --- boundary data expressions -------------------------------------------

_ALLOWED_FUNCS = {"sin": np.sin, "cos": np.cos}
_ALLOWED_NAMES = {"pi": math.pi, "theta": None}
_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def _check_expr(node, text):
    if isinstance(node, ast.Expression):
        return _check_expr(node.body, text)
    if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
        _check_expr(node.left, text)
        _check_expr(node.right, text)
        return
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check_expr(node.operand, text)
        return
    if isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id in _ALLOWED_FUNCS):
            raise ConfigError(f"boundary data: only sin/cos calls allowed in {text!r}")
        if len(node.args) != 1 or node.keywords:
            raise ConfigError(f"boundary data: {node.func.id} takes one argument")
        _check_expr(node.args[0], text)
        return
    if isinstance(node, ast.Name):
        if node.id not in _ALLOWED_NAMES:
            raise ConfigError(f"boundary data: unknown name {node.id!r} in {text!r}")
        return
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return
    raise ConfigError(f"boundary data: unsupported syntax in {text!r}")


class BoundaryData:
    """An expression in the boundary parameter theta."""

    def __init__(self, text: str):
        self.text = text.strip()
        if not self.text:
            raise ConfigError("boundary data: empty expression")
        try:
            tree = ast.parse(self.text, mode="eval")
        except SyntaxError as exc:
            raise ConfigError(f"boundary data: {exc}") from exc
        _check_expr(tree, self.text)
        self._code = compile(tree, "<boundary-data>", "eval")

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        env = {"theta": np.asarray(theta, dtype=float), "pi": math.pi}
        env.update(_ALLOWED_FUNCS)
        out = eval(self._code, {"__builtins__": {}}, env)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(theta)).copy()

    def __repr__(self):
        return f"BoundaryData({self.text})"

    def __reduce__(self):
        # compiled expressions do not pickle; rebuild from source
        return (BoundaryData, (self.text,))


def boundary_theta(grid: GridSpec) -> np.ndarray:
    """Boundary parameter for each boundary node of a rectangle.

    Scaled arc length counterclockwise from (x_lo, y_lo): theta = 2*pi*s/P
    with P the perimeter.  Returned in the order of the flattened boundary
    mask (row-major); interior nodes are absent.
    """
    if grid.is_1d:
        raise ValueError("boundary parameter requires a 2D grid")
    x, y = grid.node_coords()
    bmask = grid.boundary_mask()
    xb, yb = x[bmask], y[bmask]
    lx = grid.x_hi - grid.x_lo
    ly = grid.y_hi - grid.y_lo
    per = 2.0 * (lx + ly)
    s = np.empty_like(xb)
    on_bottom = yb == grid.y_lo
    on_right = (xb == grid.x_hi) & ~on_bottom
    on_top = (yb == grid.y_hi) & ~on_bottom & ~on_right
    on_left = ~(on_bottom | on_right | on_top)
    s[on_bottom] = xb[on_bottom] - grid.x_lo
    s[on_right] = lx + (yb[on_right] - grid.y_lo)
    s[on_top] = lx + ly + (grid.x_hi - xb[on_top])
    s[on_left] = 2.0 * lx + ly + (grid.y_hi - yb[on_left])
    return 2.0 * math.pi * s / per
