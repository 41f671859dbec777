"""Scalar and vector field expressions: potential V, boundary coupling sigma, vector potential A.

Expressions use the variables ``x1 .. xd`` (aliases ``x, y, z`` for d <= 3),
the built-in ``r2 = sum x_i^2``, the constant ``pi``, the operators
``+ - * / ^`` (``^`` is right-associative, ``**`` is accepted as a synonym)
and the functions ``sin cos exp sqrt abs``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EvaluationError, InvalidDimension, InvalidPotential, ParseError
from .geometry import DomainSpec

FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": np.sqrt,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi}
ALIASES = {"x": 0, "y": 1, "z": 2}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^(),]))"
)


# -- expression tree ---------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float

    def __str__(self):
        return repr(float(self.value))


@dataclass(frozen=True)
class Var:
    index: int

    def __str__(self):
        return f"x{self.index + 1}"


@dataclass(frozen=True)
class R2:
    def __str__(self):
        return "r2"


@dataclass(frozen=True)
class Neg:
    operand: object

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object

    def __str__(self):
        return f"({self.left} {self.op} {self.right})"


@dataclass(frozen=True)
class Call:
    name: str
    arg: object

    def __str__(self):
        return f"{self.name}({self.arg})"


def _eval(node, coords, bad):
    if isinstance(node, Const):
        return np.full(bad.shape, node.value)
    if isinstance(node, Var):
        return coords[node.index]
    if isinstance(node, R2):
        return sum(c * c for c in coords)
    if isinstance(node, Neg):
        return -_eval(node.operand, coords, bad)
    if isinstance(node, Call):
        arg = _eval(node.arg, coords, bad)
        if node.name == "sqrt":
            bad |= arg < 0
        return FUNCTIONS[node.name](arg)
    a = _eval(node.left, coords, bad)
    b = _eval(node.right, coords, bad)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        bad |= b == 0
        return a / b
    # power: negative base with non-integer exponent is undefined in the reals
    bad |= (a < 0) & (b != np.round(b))
    bad |= (a == 0) & (b < 0)
    return a**b


@dataclass(frozen=True)
class ScalarFieldExpr:
    """Immutable parsed expression over ``dimension`` coordinates."""

    root: object
    dimension: int
    text: str = ""

    def __str__(self):
        return str(self.root)

    @property
    def is_zero(self) -> bool:
        return isinstance(self.root, Const) and self.root.value == 0.0

    @property
    def constant_value(self) -> float | None:
        return float(self.root.value) if isinstance(self.root, Const) else None

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at ``points`` of shape ``(..., d)``.

        Raises EvaluationError naming the first point where the value is
        undefined or non-finite.
        """
        pts = np.asarray(points, dtype=float)
        if pts.shape[-1] != self.dimension:
            raise InvalidDimension(
                f"points have dimension {pts.shape[-1]}, expression expects {self.dimension}")
        coords = tuple(pts[..., i] for i in range(self.dimension))
        bad = np.zeros(pts.shape[:-1], dtype=bool)
        with np.errstate(all="ignore"):
            out = np.asarray(_eval(self.root, coords, bad), dtype=float)
        out = np.broadcast_to(out, bad.shape).copy()
        bad |= ~np.isfinite(out)
        if bad.any():
            first = np.argwhere(bad)[0]
            raise EvaluationError(f"expression {self.text or self} is undefined",
                                  pts[tuple(first)])
        return out


# -- parser ------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, dimension: int):
        self.text = text
        self.dimension = dimension
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text):
        tokens = []
        i = 0
        while i < len(text):
            if text[i].isspace():
                i += 1
                continue
            m = _TOKEN.match(text, i)
            if not m or m.end() == i:
                raise ParseError(f"unexpected character {text[i]!r}", text, i)
            kind = m.lastgroup
            start = m.start(kind)
            tokens.append((kind, m.group(kind), start))
            i = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        kind, val, off = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", self.text, off)

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", self.text, off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            operand = self.unary()
            return Neg(operand) if val == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val in ("^", "**"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(val, arg)
            return self.identifier(val, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", self.text, off)

    def identifier(self, name, off):
        if name == "r2":
            return R2()
        if name in CONSTANTS:
            return Const(CONSTANTS[name])
        index = None
        if name in ALIASES and self.dimension <= 3:
            index = ALIASES[name]
        else:
            m = re.fullmatch(r"x([1-9]\d*)", name)
            if m:
                index = int(m.group(1)) - 1
        if index is None:
            raise ParseError(f"unknown identifier {name!r}", self.text, off)
        if index >= self.dimension:
            raise ParseError(
                f"variable {name!r} is not defined in dimension {self.dimension}", self.text, off)
        return Var(index)


def parse_field(text: str, dimension: int) -> ScalarFieldExpr:
    if int(dimension) != dimension or dimension < 1:
        raise InvalidDimension(f"dimension must be a positive integer, got {dimension!r}")
    if not isinstance(text, str) or not text.strip():
        raise ParseError("empty expression", str(text), 0)
    root = _Parser(text, int(dimension)).parse()
    return ScalarFieldExpr(root=root, dimension=int(dimension), text=text)


def constant(value: float, dimension: int) -> ScalarFieldExpr:
    return ScalarFieldExpr(Const(float(value)), dimension, repr(float(value)))


def eval_field(expr: ScalarFieldExpr, point: Sequence[float]) -> float:
    pt = np.asarray(point, dtype=float)
    if pt.shape != (expr.dimension,):
        raise InvalidDimension(
            f"point has dimension {pt.size}, expression expects {expr.dimension}")
    return float(expr.evaluate(pt))


# -- vector potential --------------------------------------------------------

@dataclass(frozen=True)
class VectorPotentialSpec:
    components: tuple[ScalarFieldExpr, ...]
    preset: tuple | None = None  # ("constant_field", B, gauge)

    def __post_init__(self):
        if not self.components:
            raise InvalidDimension("vector potential needs at least one component")
        d = self.components[0].dimension
        if len(self.components) != d or any(c.dimension != d for c in self.components):
            raise InvalidDimension("vector potential must have exactly d components in dimension d")

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    @property
    def is_constant_field(self) -> bool:
        return self.preset is not None and self.preset[0] == "constant_field"

    @property
    def field_strength(self) -> float | None:
        return float(self.preset[1]) if self.is_constant_field else None

    def evaluate(self, points: np.ndarray, axis: int) -> np.ndarray:
        return self.components[axis].evaluate(points)

    @classmethod
    def zero(cls, dimension: int) -> "VectorPotentialSpec":
        return cls(tuple(constant(0.0, dimension) for _ in range(dimension)))

    @classmethod
    def from_strings(cls, texts: Sequence[str], dimension: int) -> "VectorPotentialSpec":
        if len(texts) != dimension:
            raise InvalidDimension(f"expected {dimension} components, got {len(texts)}")
        return cls(tuple(parse_field(t, dimension) for t in texts))


def constant_field_gauge(B: float, gauge: str = "symmetric") -> VectorPotentialSpec:
    """Planar vector potential with constant curl ``B``.

    symmetric: A = (-B y / 2, B x / 2); landau: A = (0, B x).
    """
    B = float(B)
    if gauge == "symmetric":
        texts = (f"-({B!r}) * y / 2", f"({B!r}) * x / 2")
    elif gauge == "landau":
        texts = ("0", f"({B!r}) * x")
    else:
        raise ValueError(f"unknown gauge {gauge!r}; use 'symmetric' or 'landau'")
    comps = tuple(parse_field(t, 2) for t in texts)
    if B == 0.0:
        comps = (constant(0.0, 2), constant(0.0, 2))
    return VectorPotentialSpec(comps, preset=("constant_field", B, gauge))


# -- norms -------------------------------------------------------------------

@dataclass(frozen=True)
class FieldNorms:
    v_l1: float
    a_l2_sq: float
    sigma_sup: float
    sigma_min: float
    sigma_max: float
    resolution: int
    unresolved: bool = False

    @property
    def sigma_sign(self) -> str:
        """'zero', 'positive', 'negative' or 'mixed', read from boundary samples."""
        if self.sigma_min == 0.0 and self.sigma_max == 0.0:
            return "zero"
        if self.sigma_min > 0:
            return "positive"
        if self.sigma_max < 0:
            return "negative"
        if self.sigma_min >= 0:
            return "nonnegative"
        if self.sigma_max <= 0:
            return "nonpositive"
        return "mixed"


def quadrature_nodes(domain: DomainSpec, resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint-rule nodes and weights covering the domain."""
    if domain.kind == "rectangle":
        axes = [(np.arange(resolution) + 0.5) * L / resolution for L in domain.lengths]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, domain.dimension)
        w = np.prod(domain.lengths) / resolution**domain.dimension
        return mesh, np.full(len(mesh), w)
    if domain.kind == "disk":
        R = domain.radius
        nt = 4 * resolution
        r = (np.arange(resolution) + 0.5) * R / resolution
        t = (np.arange(nt) + 0.5) * 2 * math.pi / nt
        rr, tt = np.meshgrid(r, t, indexing="ij")
        pts = np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1).reshape(-1, 2)
        w = (rr * (R / resolution) * (2 * math.pi / nt)).ravel()
        return pts, w
    s = max(1, -(-resolution // max(domain.cells.shape)))
    h = domain.cell_size / s
    fine = domain.cells
    for axis in range(domain.dimension):
        fine = np.repeat(fine, s, axis=axis)
    pts = (np.argwhere(fine) + 0.5) * h
    return pts, np.full(len(pts), h**domain.dimension)


def boundary_nodes(domain: DomainSpec, resolution: int) -> np.ndarray:
    """Sample points on the boundary (face midpoints of the quadrature grid)."""
    d = domain.dimension
    if domain.kind == "rectangle":
        chunks = []
        for axis in range(d):
            others = [(np.arange(resolution) + 0.5) * L / resolution
                      for i, L in enumerate(domain.lengths) if i != axis]
            if others:
                face = np.stack(np.meshgrid(*others, indexing="ij"), axis=-1).reshape(-1, d - 1)
            else:
                face = np.zeros((1, 0))
            for value in (0.0, domain.lengths[axis]):
                pts = np.insert(face, axis, value, axis=1)
                chunks.append(pts)
        return np.concatenate(chunks)
    if domain.kind == "disk":
        nt = 4 * resolution
        t = (np.arange(nt) + 0.5) * 2 * math.pi / nt
        return domain.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
    s = max(1, -(-resolution // max(domain.cells.shape)))
    h = domain.cell_size / s
    fine = domain.cells
    for axis in range(d):
        fine = np.repeat(fine, s, axis=axis)
    return exposed_face_midpoints(fine, h)


def exposed_face_midpoints(cells: np.ndarray, h: float) -> np.ndarray:
    padded = np.pad(cells, 1, constant_values=False)
    out = []
    for axis in range(cells.ndim):
        for step in (1, -1):
            neighbor = np.roll(padded, -step, axis=axis)[tuple([slice(1, -1)] * cells.ndim)]
            idx = np.argwhere(cells & ~neighbor)
            if len(idx) == 0:
                continue
            pts = (idx + 0.5) * h
            pts[:, axis] += step * 0.5 * h
            out.append(pts)
    return np.concatenate(out) if out else np.zeros((0, cells.ndim))


def _norms_at(V, A, sigma, domain, resolution):
    pts, w = quadrature_nodes(domain, resolution)
    v_l1 = 0.0
    if V is not None:
        vals = V.evaluate(pts)
        if (vals < 0).any():
            raise InvalidPotential("potential V must be nonnegative", pts[np.argmax(vals < 0)])
        v_l1 = float(np.sum(w * vals))
    a_sq = 0.0
    if A is not None and not A.is_zero:
        a_sq = float(sum(np.sum(w * A.evaluate(pts, j) ** 2) for j in range(A.dimension)))
    smin = smax = 0.0
    if sigma is not None and not sigma.is_zero:
        svals = sigma.evaluate(boundary_nodes(domain, resolution))
        smin, smax = float(svals.min()), float(svals.max())
    return v_l1, a_sq, smin, smax


def field_norms(V: ScalarFieldExpr | None, A: VectorPotentialSpec | None,
                sigma: ScalarFieldExpr | None, domain: DomainSpec,
                resolution: int = 64) -> FieldNorms:
    """||V||_{L1}, ||A||^2_{L2} by midpoint quadrature and sup |sigma| on boundary samples.

    The quadrature is repeated at twice the resolution; the finer values are
    returned and ``unresolved`` is set when the two levels differ by more than
    0.1 % relative.
    """
    if resolution < 8:
        raise ValueError("field_norms needs resolution >= 8")
    for f in (V, sigma):
        if f is not None and f.dimension != domain.dimension:
            raise InvalidDimension("field dimension does not match the domain")
    if A is not None and A.dimension != domain.dimension:
        raise InvalidDimension("vector potential dimension does not match the domain")
    coarse = _norms_at(V, A, sigma, domain, resolution)
    fine = _norms_at(V, A, sigma, domain, 2 * resolution)
    unresolved = any(abs(f - c) > 1e-3 * abs(f) for c, f in zip(coarse[:2], fine[:2]) if f != 0)
    smin, smax = min(coarse[2], fine[2]), max(coarse[3], fine[3])
    return FieldNorms(v_l1=fine[0], a_l2_sq=fine[1], sigma_sup=max(abs(smin), abs(smax)),
                      sigma_min=smin, sigma_max=smax, resolution=2 * resolution,
                      unresolved=unresolved)
