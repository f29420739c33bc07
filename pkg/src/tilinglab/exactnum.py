"""Exact arithmetic in a real number field Q[x]/(p) with a chosen real root.

Elements are coefficient vectors in the power basis of the root.  Real
comparisons go through certified rational intervals obtained by bisecting the
isolating interval of the root, with a float filter in front for speed.
"""
from __future__ import annotations

import ast
import math
import operator
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DivisionByZero, FieldError

_EPS_FILTER = 1e-11


def to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise FieldError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"not a rational: {v!r}") from exc
    if isinstance(v, float):
        return Fraction(v)
    raise FieldError(f"not a rational: {v!r}")


def frac_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class NumberField:
    """Real algebraic number field given by a monic integer polynomial and a root.

    ``min_poly`` lists integer coefficients with the constant term first.
    ``root_interval`` is a pair of rationals isolating the chosen real root.
    """

    def __init__(self, min_poly: Sequence[int], root_interval, check: bool = True):
        try:
            coeffs = tuple(int(c) for c in min_poly)
        except (TypeError, ValueError) as exc:
            raise FieldError(f"min_poly must be integers: {min_poly!r}") from exc
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise FieldError("min_poly must be monic of degree >= 1")
        lo, hi = (to_fraction(v) for v in root_interval)
        if lo > hi:
            raise FieldError("root_interval must satisfy lo <= hi")
        self.min_poly = coeffs
        self.degree = len(coeffs) - 1
        if check:
            self._validate(lo, hi)
        if self.degree == 1:
            r = Fraction(-coeffs[0])
            lo = hi = r
        self._base = (lo, hi)
        self._memo: dict[int, tuple[Fraction, Fraction]] = {}
        self._root_float = None
        k = self.degree
        # x^j mod p for j = k .. 2k-2, as length-k coefficient lists
        red = []
        cur = [Fraction(-c) for c in coeffs[:-1]]
        for _ in range(max(0, k - 1)):
            red.append(tuple(cur))
            top = cur[-1]
            nxt = [Fraction(0)] + cur[:-1]
            if top:
                nxt = [a - top * c for a, c in zip(nxt, coeffs[:-1])]
            cur = nxt
        self._red = red
        self.zero = FieldElement(self, (0,) * k)
        self.one = FieldElement(self, (1,) + (0,) * (k - 1))
        self.gen = FieldElement(self, (0, 1) + (0,) * (k - 2)) if k > 1 else FieldElement(self, (Fraction(-coeffs[0]),))

    def _validate(self, lo, hi):
        import sympy

        x = sympy.Symbol("x")
        poly = sympy.Poly(list(reversed(self.min_poly)), x)
        if self.degree > 1 and not poly.is_irreducible:
            raise FieldError(f"min_poly {self.min_poly} is reducible over Q")
        n = poly.count_roots(sympy.Rational(lo.numerator, lo.denominator), sympy.Rational(hi.numerator, hi.denominator))
        if n != 1:
            raise FieldError(f"root_interval [{lo}, {hi}] holds {n} roots, expected 1")

    @classmethod
    def rationals(cls) -> "NumberField":
        return cls((0, 1), (-1, 1), check=False)

    def __eq__(self, other):
        if not isinstance(other, NumberField):
            return NotImplemented
        if self is other:
            return True
        if self.min_poly != other.min_poly:
            return False
        a, b = self._base, other._base
        return not (a[1] < b[0] or b[1] < a[0])

    def __hash__(self):
        return hash(self.min_poly)

    def __repr__(self):
        return f"NumberField({list(self.min_poly)}, [{frac_str(self._base[0])}, {frac_str(self._base[1])}])"

    def to_json(self) -> dict:
        return {"min_poly": list(self.min_poly), "root_interval": [frac_str(self._base[0]), frac_str(self._base[1])]}

    # root refinement
    def _p(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.min_poly):
            acc = acc * t + c
        return acc

    def root_interval(self, bits: int) -> tuple[Fraction, Fraction]:
        """Isolating interval of width <= 2^-bits, taken from a fixed bisection chain."""
        lo, hi = self._base
        if lo == hi:
            return lo, hi
        hit = self._memo.get(bits)
        if hit is not None:
            return hit
        # restart from the closest cached ancestor in the chain
        start = max((b for b in self._memo if b < bits), default=None)
        if start is not None:
            lo, hi = self._memo[start]
        target = Fraction(1, 2 ** bits)
        s_lo = self._p(lo) > 0
        while hi - lo > target:
            mid = (lo + hi) / 2
            v = self._p(mid)
            if v == 0:
                lo = hi = mid
                break
            if (v > 0) == s_lo:
                lo = mid
            else:
                hi = mid
        self._memo[bits] = (lo, hi)
        return lo, hi

    def root_float(self) -> float:
        if self._root_float is None:
            lo, hi = self.root_interval(64)
            self._root_float = float((lo + hi) / 2)
        return self._root_float

    # constructors
    def element(self, coeffs) -> "FieldElement":
        coeffs = list(coeffs)
        if len(coeffs) > self.degree:
            if any(to_fraction(c) for c in coeffs[self.degree:]):
                raise FieldError(f"coefficient vector {coeffs} longer than degree {self.degree}")
            coeffs = coeffs[: self.degree]
        coeffs = coeffs + [0] * (self.degree - len(coeffs))
        return FieldElement(self, coeffs)

    def __call__(self, value) -> "FieldElement":
        return self.coerce(value)

    def coerce(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            if value.field is not self and value.field != self:
                raise FieldError("elements from different fields")
            return value
        if isinstance(value, (list, tuple)):
            return self.element([to_fraction(v) for v in value])
        q = to_fraction(value)
        return FieldElement(self, (q,) + (0,) * (self.degree - 1))


class FieldElement:
    __slots__ = ("field", "c")

    def __init__(self, field: NumberField, coeffs: Iterable):
        self.field = field
        self.c = tuple(v if isinstance(v, Fraction) else Fraction(v) for v in coeffs)

    # helpers
    def _other(self, o):
        if isinstance(o, FieldElement):
            if o.field is not self.field and o.field != self.field:
                raise FieldError("mixed-field arithmetic")
            return o
        if isinstance(o, (int, Fraction)) and not isinstance(o, bool):
            return FieldElement(self.field, (Fraction(o),) + (0,) * (self.field.degree - 1))
        return None

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise FieldError(f"{self} is not rational")
        return self.c[0]

    # ring operations
    def __add__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, map(operator.add, self.c, o.c))

    __radd__ = __add__

    def __sub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return FieldElement(self.field, map(operator.sub, self.c, o.c))

    def __rsub__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return FieldElement(self.field, (-v for v in self.c))

    def __pos__(self):
        return self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)) and not isinstance(o, bool):
            return FieldElement(self.field, (v * o for v in self.c))
        o = self._other(o)
        if o is None:
            return NotImplemented
        k = self.field.degree
        if k == 1:
            return FieldElement(self.field, (self.c[0] * o.c[0],))
        prod = [Fraction(0)] * (2 * k - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        res = prod[:k]
        for j in range(k, 2 * k - 1):
            pj = prod[j]
            if pj:
                for i, r in enumerate(self.field._red[j - k]):
                    if r:
                        res[i] += pj * r
        return FieldElement(self.field, res)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in number field")
        k = self.field.degree
        if k == 1:
            return FieldElement(self.field, (1 / self.c[0],))
        # columns of the multiplication-by-self matrix
        cols = []
        basis = self.field.one
        for _ in range(k):
            cols.append((self * basis).c)
            basis = basis * self.field.gen
        rows = [[cols[j][i] for j in range(k)] + [Fraction(1 if i == 0 else 0)] for i in range(k)]
        sol = _solve(rows, k)
        return FieldElement(self.field, sol)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)) and not isinstance(o, bool):
            if o == 0:
                raise DivisionByZero("division by zero")
            return FieldElement(self.field, (v / o for v in self.c))
        o = self._other(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        o = self._other(o)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result, base = self.field.one, self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # equality and order
    def __eq__(self, o):
        if isinstance(o, FieldElement):
            return self.c == o.c and (o.field is self.field or o.field == self.field)
        if isinstance(o, (int, Fraction)) and not isinstance(o, bool):
            return self.is_rational() and self.c[0] == o
        return NotImplemented

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    def __lt__(self, o):
        return sign(self - o) < 0

    def __le__(self, o):
        return sign(self - o) <= 0

    def __gt__(self, o):
        return sign(self - o) > 0

    def __ge__(self, o):
        return sign(self - o) >= 0

    def __float__(self):
        return self.approx()

    def __repr__(self):
        if self.is_rational():
            return frac_str(self.c[0])
        return "[" + ", ".join(frac_str(v) for v in self.c) + "]"

    def to_json(self) -> list[str]:
        return [frac_str(v) for v in self.c]

    # real embedding
    def approx(self) -> float:
        if self.is_rational():
            return float(self.c[0])
        r = self.field.root_float()
        acc = 0.0
        for v in reversed(self.c):
            acc = acc * r + float(v)
        return acc

    def _approx_bound(self) -> tuple[float, float]:
        r = abs(self.field.root_float()) + 1e-9
        acc = 0.0
        mag = 0.0
        for v in reversed(self.c):
            fv = float(v)
            acc = acc * self.field.root_float() + fv
            mag = mag * r + abs(fv)
        return acc, _EPS_FILTER * (1.0 + mag)

    def floor(self) -> int:
        if self.is_rational():
            return math.floor(self.c[0])
        prec = 32
        while True:
            lo, hi = embed(self, prec)
            if math.floor(lo) == math.floor(hi):
                return math.floor(lo)
            prec *= 2


def _solve(rows, k):
    """Gauss-Jordan elimination on an augmented k x (k+1) rational matrix."""
    for col in range(k):
        piv = next((r for r in range(col, k) if rows[r][col] != 0), None)
        if piv is None:
            raise DivisionByZero("singular system")
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [v / pv for v in rows[col]]
        for r in range(k):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][k] for i in range(k)]


def _interval_horner(c, lo, hi):
    a = b = c[-1]
    for ci in reversed(c[:-1]):
        prods = (a * lo, a * hi, b * lo, b * hi)
        a, b = min(prods) + ci, max(prods) + ci
    return a, b


def embed(x: FieldElement, precision: int) -> tuple[Fraction, Fraction]:
    """Certified rational interval of width <= 2^-precision containing x."""
    if precision < 1:
        raise ValueError("precision must be >= 1")
    if x.is_rational():
        return x.c[0], x.c[0]
    f = x.field
    lo0, hi0 = f._base
    m = max(abs(lo0), abs(hi0), Fraction(1))
    deriv = sum(i * abs(v) * m ** (i - 1) for i, v in enumerate(x.c) if i)
    extra = max(0, math.ceil(math.log2(float(deriv) + 1))) + 1
    bits = precision + extra
    target = Fraction(1, 2 ** precision)
    while True:
        rlo, rhi = f.root_interval(bits)
        lo, hi = _interval_horner(x.c, rlo, rhi)
        if hi - lo <= target:
            return lo, hi
        bits += 1


def sign(x) -> int:
    if isinstance(x, (int, Fraction)):
        return (x > 0) - (x < 0)
    if x.is_rational():
        v = x.c[0]
        return (v > 0) - (v < 0)
    a, err = x._approx_bound()
    if a > err:
        return 1
    if a < -err:
        return -1
    prec = 64
    while True:
        lo, hi = embed(x, prec)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        prec *= 2


def floor(x) -> int:
    if isinstance(x, (int, Fraction)):
        return math.floor(x)
    return x.floor()


# circle group

class CirclePoint:
    """A point e^{2 pi i theta} of the circle, stored by theta reduced to [0, 1)."""

    __slots__ = ("theta",)

    def __init__(self, theta):
        self.theta = theta - floor(theta)

    def __add__(self, o: "CirclePoint") -> "CirclePoint":
        return CirclePoint(self.theta + o.theta)

    def __sub__(self, o: "CirclePoint") -> "CirclePoint":
        return CirclePoint(self.theta - o.theta)

    def __neg__(self):
        return CirclePoint(-self.theta)

    def __eq__(self, o):
        if not isinstance(o, CirclePoint):
            return NotImplemented
        return sign(self.theta - o.theta) == 0

    def __hash__(self):
        return hash(self.theta)

    def is_identity(self) -> bool:
        return sign(self.theta) == 0

    def __repr__(self):
        return f"CirclePoint({self.theta!r})"


def circle_dist(p, q):
    """min over integers n of |theta_p - theta_q + n|; exact."""
    tp = p.theta if isinstance(p, CirclePoint) else p
    tq = q.theta if isinstance(q, CirclePoint) else q
    d = tp - tq
    d = d - floor(d)
    other = 1 - d
    return d if sign(d - other) <= 0 else other


def character(a, x) -> CirclePoint:
    """chi_a(x) = exp(2 pi i <a, x>) as a circle point."""
    return CirclePoint(dot(a, x))


# vectors and matrices over a field (tuples of FieldElements)

def vec(field: NumberField, entries) -> tuple:
    return tuple(field.coerce(e) for e in entries)


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vneg(u):
    return tuple(-a for a in u)


def vscale(s, u):
    return tuple(s * a for a in u)


def dot(u, v):
    it = iter(zip(u, v))
    a, b = next(it)
    acc = a * b
    for a, b in it:
        acc = acc + a * b
    return acc


def norm2(u):
    return dot(u, u)


def vkey(u) -> tuple:
    return tuple(e.c for e in u)


def is_zero_vec(u) -> bool:
    return all(e.is_zero() for e in u)


def matvec(m, u):
    return tuple(dot(row, u) for row in m)


def matmul(a, b):
    cols = list(zip(*b))
    return tuple(tuple(dot(row, col) for col in cols) for row in a)


def transpose(m):
    return tuple(zip(*m))


def identity(field: NumberField, d: int):
    return tuple(tuple(field.one if i == j else field.zero for j in range(d)) for i in range(d))


def matpow(m, n: int):
    field = m[0][0].field
    result, base = identity(field, len(m)), m
    while n:
        if n & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        n >>= 1
    return result


def matsub(a, b):
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def matinv(m):
    """Inverse of a square matrix over the field by Gauss-Jordan elimination."""
    d = len(m)
    field = m[0][0].field
    rows = [list(m[i]) + [field.one if i == j else field.zero for j in range(d)] for i in range(d)]
    for col in range(d):
        piv = next((r for r in range(col, d) if not rows[r][col].is_zero()), None)
        if piv is None:
            raise DivisionByZero("singular matrix")
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [v * inv for v in rows[col]]
        for r in range(d):
            if r != col and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return tuple(tuple(rows[i][d:]) for i in range(d))


def is_scalar_matrix(m) -> bool:
    d = len(m)
    return all((m[i][j].is_zero() if i != j else m[i][i] == m[0][0]) for i in range(d) for j in range(d))


# expression evaluation

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def field_eval(field: NumberField, expr: str, symbol: str = "x", **env) -> FieldElement:
    """Evaluate a ring expression such as ``"x**2 - x"`` or ``"1/(a+b)"`` exactly.

    ``symbol`` names the field generator; extra names bind FieldElements or rationals.
    """
    tree = ast.parse(expr, mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return field.coerce(node.value)
        if isinstance(node, ast.Constant) and isinstance(node.value, str):
            return field.coerce(node.value)
        if isinstance(node, ast.Name):
            if node.id == symbol:
                return field.gen
            if node.id in env:
                return field.coerce(env[node.id])
            raise FieldError(f"unknown name {node.id!r}")
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub) and isinstance(exp.operand, ast.Constant):
                    return ev(node.left) ** (-int(exp.operand.value))
                if isinstance(exp, ast.Constant) and isinstance(exp.value, int):
                    return ev(node.left) ** exp.value
                raise FieldError("exponents must be integer literals")
            op = _BINOPS.get(type(node.op))
            if op is None:
                raise FieldError(f"unsupported operator in {expr!r}")
            return op(ev(node.left), ev(node.right))
        raise FieldError(f"unsupported expression {expr!r}")

    return ev(tree)
