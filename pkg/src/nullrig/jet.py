"""Truncated multivariate Taylor jets on numpy arrays.

A :class:`Jet` carries an array value together with its exact partial
derivatives up to a fixed order with respect to ``nvars`` seeded variables.
Coefficient ``c[k]`` holds the full symmetric ``k``-th derivative tensor, with
the derivative axes appended after the array axes::

    c[0].shape == S
    c[1].shape == S + (m,)
    c[2].shape == S + (m, m)
    ...

Products follow the multivariate Leibniz rule and elementary functions follow
Faa di Bruno's formula, so derivatives are exact up to floating point.  The
second-order case is the usual hyper-dual number; the geometry code needs a
third order for curvature of induced connections, so the order is a parameter.

Geometry code is written against the helpers at the bottom of this module
(``einsum``, ``inv``, ``array``, ...) and numpy ufuncs, so the same functions
run on plain floats/ndarrays and on jets.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "DScalar",
    "lift",
    "is_jet",
    "value",
    "einsum",
    "inv",
    "array",
    "stack",
    "concatenate",
    "gradient",
    "jabs",
    "sign_of",
]

_DLETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


# ---------------------------------------------------------------------------
# combinatorics
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _subset_perms(k: int, i: int) -> tuple[tuple[int, ...], ...]:
    """Axis permutations placing ``i`` left-factor axes at every size-``i`` subset.

    The unpermuted tensor has derivative axes ``[a_0..a_{i-1}, b_0..b_{j-1}]``.
    """
    perms = []
    for subset in itertools.combinations(range(k), i):
        rest = [p for p in range(k) if p not in subset]
        perm = []
        for q in range(k):
            if q in subset:
                perm.append(subset.index(q))
            else:
                perm.append(i + rest.index(q))
        perms.append(tuple(perm))
    return tuple(perms)


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for idx in range(len(part)):
            yield part[:idx] + [[first] + part[idx]] + part[idx + 1:]


@lru_cache(maxsize=None)
def _faa_terms(k: int) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """(block sizes, axis permutation) for every set partition of ``range(k)``."""
    terms = []
    for part in _set_partitions(list(range(k))):
        order = [p for block in part for p in block]
        perm = tuple(order.index(q) for q in range(k))
        terms.append((tuple(len(b) for b in part), perm))
    return tuple(terms)


def _permute_trailing(t: np.ndarray, lead: int, perm: tuple[int, ...]) -> np.ndarray:
    if perm == tuple(range(len(perm))):
        return t
    return np.transpose(t, tuple(range(lead)) + tuple(lead + p for p in perm))


# ---------------------------------------------------------------------------
# core bilinear machinery
# ---------------------------------------------------------------------------


def _leibniz(ac, bc, order: int, prod, lead: int, only: int | None = None, skip_b_top=False):
    """Coefficients of a bilinear product by the Leibniz rule.

    ``ac``/``bc`` are coefficient lists (``None`` marks an identically zero
    coefficient).  ``prod(x, y, i, j)`` contracts the array axes and returns the
    derivative axes ordered ``[x's i axes, y's j axes]``.
    """
    out = []
    ks = range(order + 1) if only is None else [only]
    for k in ks:
        total = None
        for i in range(k + 1):
            j = k - i
            if skip_b_top and j == k:
                continue
            x = ac[i] if i < len(ac) else None
            y = bc[j] if j < len(bc) else None
            if x is None or y is None:
                continue
            t = prod(x, y, i, j)
            for perm in _subset_perms(k, i):
                term = _permute_trailing(t, lead, perm)
                total = term if total is None else total + term
        out.append(total)
    return out


def _mul_prod(x, y, i, j):
    xs = x.reshape(x.shape + (1,) * j)
    ys = y.reshape(y.shape[: y.ndim - j] + (1,) * i + y.shape[y.ndim - j:])
    return xs * ys


def _coeffs(x, order: int) -> list:
    if isinstance(x, Jet):
        return list(x.c)
    return [np.asarray(x, dtype=float)] + [None] * order


def _fill(coeffs, shape, nvars):
    out = []
    for k, c in enumerate(coeffs):
        if c is None:
            c = np.zeros(tuple(shape) + (nvars,) * k)
        out.append(c)
    return out


class Jet:
    """Array value with exact partial derivatives up to ``order``.

    Use :func:`lift` to seed independent variables; everything computed from
    seeded jets through arithmetic, numpy ufuncs and the module helpers carries
    derivatives along.
    """

    __array_priority__ = 1000
    __slots__ = ("c", "nvars")

    def __init__(self, coeffs: Sequence[np.ndarray], nvars: int):
        self.c = tuple(np.asarray(x, dtype=float) for x in coeffs)
        self.nvars = int(nvars)

    # -- introspection --------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    @property
    def grad(self) -> np.ndarray:
        return self.c[1]

    @property
    def hess(self) -> np.ndarray:
        return self.c[2]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.c[0].shape

    @property
    def ndim(self) -> int:
        return self.c[0].ndim

    def __len__(self) -> int:
        return self.shape[0]

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order}, nvars={self.nvars}, value={self.value!r})"

    def __float__(self) -> float:
        return float(self.c[0])

    # -- structural -----------------------------------------------------
    def __getitem__(self, idx) -> "Jet":
        if idx is Ellipsis or (isinstance(idx, tuple) and any(i is Ellipsis for i in idx)):
            raise IndexError("Ellipsis indexing is ambiguous on jets")
        return Jet([c[idx] for c in self.c], self.nvars)

    def _map_lead(self, fn) -> "Jet":
        return Jet([fn(c, k) for k, c in enumerate(self.c)], self.nvars)

    def transpose(self, *axes) -> "Jet":
        nd = self.ndim
        if not axes:
            axes = tuple(reversed(range(nd)))
        elif len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return self._map_lead(lambda c, k: np.transpose(c, tuple(axes) + tuple(range(nd, nd + k))))

    @property
    def T(self) -> "Jet":
        return self.transpose()

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        m = self.nvars
        return self._map_lead(lambda c, k: c.reshape(tuple(shape) + (m,) * k))

    def sum(self, axis=None) -> "Jet":
        nd = self.ndim
        if axis is None:
            axis = tuple(range(nd))
        return self._map_lead(lambda c, k: c.sum(axis=axis))

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} to {order}")
        return Jet(self.c[: order + 1], self.nvars)

    def restrict(self, dirs: Sequence[int]) -> "Jet":
        """Keep only derivatives along the listed seed directions."""
        dirs = np.asarray(list(dirs), dtype=int)
        out = []
        for k, c in enumerate(self.c):
            for ax in range(k):
                c = np.take(c, dirs, axis=self.ndim + ax)
            out.append(c)
        return Jet(out, len(dirs))

    def gradient(self) -> "Jet":
        """Jet of the gradient: shape ``S + (m,)``, order reduced by one."""
        if self.order < 1:
            raise ValueError("jet of order 0 carries no derivative")
        return Jet(self.c[1:], self.nvars)

    def partial(self, i: int) -> "Jet":
        nd = self.ndim
        return Jet([np.take(c, i, axis=nd) for c in self.c[1:]], self.nvars)

    # -- arithmetic -----------------------------------------------------
    def _binary_order(self, other) -> int:
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets seeded with different variable counts")
            return min(self.order, other.order)
        return self.order

    def __neg__(self) -> "Jet":
        return Jet([-c for c in self.c], self.nvars)

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        order = self._binary_order(other)
        if isinstance(other, Jet):
            return Jet([a + b for a, b in zip(self.c[: order + 1], other.c)], self.nvars)
        other = np.asarray(other, dtype=float)
        c0 = self.c[0] + other
        out = [c0]
        for k in range(1, order + 1):
            out.append(np.broadcast_to(self.c[k], c0.shape + (self.nvars,) * k).copy()
                       if c0.shape != self.shape else self.c[k])
        return Jet(out, self.nvars)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        order = self._binary_order(other)
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            out = [self.c[0] * other]
            for k in range(1, order + 1):
                out.append(self.c[k] * other.reshape(other.shape + (1,) * k))
            return Jet(out, self.nvars)
        shape = np.broadcast_shapes(self.shape, other.shape)
        d = len(shape)
        ac = [c.reshape((1,) * (d - self.ndim) + c.shape) for c in self.c]
        bc = [c.reshape((1,) * (d - other.ndim) + c.shape) for c in other.c]
        coeffs = _leibniz(ac, bc, order, _mul_prod, lead=d)
        return Jet(_fill(coeffs, shape, self.nvars), self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * _unary(other, _recip_derivs)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other) -> "Jet":
        return _unary(self, _recip_derivs) * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, Jet):
            return np.exp(p * np.log(self))
        p = float(p)
        if p == int(p) and 0 <= p <= 4:
            out: Jet | float = 1.0
            for _ in range(int(p)):
                out = self * out
            if isinstance(out, float):
                return self * 0.0 + 1.0
            return out
        return _unary(self, _power_derivs(p))

    def __rpow__(self, base) -> "Jet":
        return np.exp(self * np.log(np.asarray(base, dtype=float)))

    def __matmul__(self, other) -> "Jet":
        return _matmul(self, other)

    def __rmatmul__(self, other) -> "Jet":
        return _matmul(other, self)

    # -- numpy interop --------------------------------------------------
    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        if method != "__call__" or kwargs.get("out") is not None:
            return NotImplemented
        if ufunc in _UNARY and len(inputs) == 1:
            return _unary(inputs[0], _UNARY[ufunc])
        a, b = (inputs + (None,))[:2]
        if ufunc is np.add:
            return a + b if isinstance(a, Jet) else b + a
        if ufunc is np.subtract:
            return a - b if isinstance(a, Jet) else (-b) + a
        if ufunc is np.multiply:
            return a * b if isinstance(a, Jet) else b * a
        if ufunc is np.true_divide:
            return a / b if isinstance(a, Jet) else b.__rtruediv__(a)
        if ufunc is np.power:
            return a ** b if isinstance(a, Jet) else b.__rpow__(a)
        if ufunc is np.negative:
            return -a
        if ufunc is np.absolute:
            return jabs(a)
        if ufunc is np.matmul:
            return _matmul(a, b)
        return NotImplemented


DScalar = Jet


# ---------------------------------------------------------------------------
# elementary functions (Faa di Bruno)
# ---------------------------------------------------------------------------


def _unary(a: Jet, derivs: Callable[[np.ndarray, int], list[np.ndarray]]) -> Jet:
    K = a.order
    d = derivs(a.c[0], K)
    out = [d[0]]
    nd = a.ndim
    for k in range(1, K + 1):
        total = None
        for sizes, perm in _faa_terms(k):
            t = d[len(sizes)].reshape(a.shape + (1,) * k)
            outer = None
            for s in sizes:
                blk = a.c[s]
                if outer is None:
                    outer = blk
                else:
                    outer = outer.reshape(outer.shape + (1,) * s) * blk.reshape(
                        blk.shape[:nd] + (1,) * (outer.ndim - nd) + blk.shape[nd:])
            term = _permute_trailing(outer * t, nd, perm)
            total = term if total is None else total + term
        out.append(total)
    return Jet(out, a.nvars)


def _cycle(*fns):
    def derivs(x, K):
        return [fns[k % len(fns)](x) for k in range(K + 1)]
    return derivs


def _power_derivs(p: float):
    def derivs(x, K):
        out = []
        coef = 1.0
        for k in range(K + 1):
            out.append(coef * np.power(x, p - k))
            coef *= p - k
        return out
    return derivs


def _recip_derivs(x, K):
    return [((-1) ** k) * math.factorial(k) * np.power(x, -(k + 1)) for k in range(K + 1)]


def _log_derivs(x, K):
    return [np.log(x)] + [((-1) ** (k - 1)) * math.factorial(k - 1) * np.power(x, -k)
                          for k in range(1, K + 1)]


def _arctan_derivs(x, K):
    # d/dx arctan = 1/(1+x^2); higher orders written out to third order
    w = 1.0 / (1.0 + x * x)
    full = [np.arctan(x), w, -2.0 * x * w ** 2, (6.0 * x * x - 2.0) * w ** 3]
    if K > 3:
        raise NotImplementedError("arctan jets limited to third order")
    return full[: K + 1]


def _tanh_derivs(x, K):
    t = np.tanh(x)
    s = 1.0 - t * t
    full = [t, s, -2.0 * t * s, s * (6.0 * t * t - 2.0)]
    if K > 3:
        raise NotImplementedError("tanh jets limited to third order")
    return full[: K + 1]


_UNARY = {
    np.sin: _cycle(np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)),
    np.cos: _cycle(np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin),
    np.exp: lambda x, K: [np.exp(x)] * (K + 1),
    np.sinh: _cycle(np.sinh, np.cosh),
    np.cosh: _cycle(np.cosh, np.sinh),
    np.tanh: _tanh_derivs,
    np.arctan: _arctan_derivs,
    np.log: _log_derivs,
    np.sqrt: _power_derivs(0.5),
    np.square: lambda x, K: [x * x, 2.0 * x, 2.0 * np.ones_like(x), np.zeros_like(x)][: K + 1]
    + [np.zeros_like(x)] * max(0, K - 3),
    np.reciprocal: _recip_derivs,
}


def jabs(x):
    """|x| for values bounded away from zero (sign read from the value)."""
    if isinstance(x, Jet):
        return x * np.sign(x.value)
    return np.abs(x)


def sign_of(x) -> np.ndarray:
    return np.sign(value(x))


# ---------------------------------------------------------------------------
# seeding and helpers
# ---------------------------------------------------------------------------


def lift(point, active: Sequence[int] | None = None, order: int = 2) -> Jet:
    """Seed a coordinate vector as independent variables.

    Coordinates listed in ``active`` get canonical-basis gradients (in the
    listed order); the others are constants.
    """
    point = np.atleast_1d(np.asarray(point, dtype=float))
    if point.ndim != 1:
        raise ValueError("lift expects a coordinate vector")
    if active is None:
        active = range(point.size)
    active = list(active)
    if any(a < 0 or a >= point.size for a in active):
        raise ValueError("active directions must index the point's coordinates")
    m = len(active)
    coeffs = [point.copy()]
    if order >= 1:
        g = np.zeros((point.size, m))
        for col, a in enumerate(active):
            g[a, col] = 1.0
        coeffs.append(g)
    for k in range(2, order + 1):
        coeffs.append(np.zeros((point.size,) + (m,) * k))
    return Jet(coeffs, m)


def is_jet(x) -> bool:
    return isinstance(x, Jet)


def value(x) -> np.ndarray:
    """Plain value of a jet, array or scalar."""
    if isinstance(x, Jet):
        return x.c[0]
    return np.asarray(x, dtype=float)


def gradient(x) -> Jet:
    if not isinstance(x, Jet):
        raise TypeError("gradient requires a jet")
    return x.gradient()


def _jet_template(objs):
    order, nvars = None, None
    for o in objs:
        if isinstance(o, Jet):
            if order is None:
                order, nvars = o.order, o.nvars
            else:
                if o.nvars != nvars:
                    raise ValueError("jets seeded with different variable counts")
                order = min(order, o.order)
    return order, nvars


def _to_jet(x, order: int, nvars: int) -> Jet:
    if isinstance(x, Jet):
        return x.truncate(order) if x.order > order else x
    x = np.asarray(x, dtype=float)
    return Jet([x] + [np.zeros(x.shape + (nvars,) * k) for k in range(1, order + 1)], nvars)


def stack(seq, axis: int = 0):
    seq = list(seq)
    order, nvars = _jet_template(seq)
    if order is None:
        return np.stack([np.asarray(s, dtype=float) for s in seq], axis=axis)
    jets = [_to_jet(s, order, nvars) for s in seq]
    nd = jets[0].ndim
    if axis < 0:
        axis += nd + 1
    return Jet([np.stack([j.c[k] for j in jets], axis=axis) for k in range(order + 1)], nvars)


def concatenate(seq, axis: int = 0):
    seq = list(seq)
    order, nvars = _jet_template(seq)
    if order is None:
        return np.concatenate([np.asarray(s, dtype=float) for s in seq], axis=axis)
    jets = [_to_jet(s, order, nvars) for s in seq]
    nd = jets[0].ndim
    if axis < 0:
        axis += nd
    return Jet([np.concatenate([j.c[k] for j in jets], axis=axis) for k in range(order + 1)], nvars)


def array(nested):
    """Build an array (or jet) from nested lists mixing floats and jets."""
    if isinstance(nested, (list, tuple)):
        items = [array(x) for x in nested]
        return stack(items, axis=0)
    if isinstance(nested, Jet):
        return nested
    return np.asarray(nested, dtype=float)


# ---------------------------------------------------------------------------
# contractions
# ---------------------------------------------------------------------------


def _einsum2(spec: str, a, b):
    ins, out = spec.split("->")
    sa, sb = ins.split(",")
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(spec, a, b)
    order = min(x.order for x in (a, b) if isinstance(x, Jet))
    nvars = next(x.nvars for x in (a, b) if isinstance(x, Jet))
    if isinstance(a, Jet) and isinstance(b, Jet) and a.nvars != b.nvars:
        raise ValueError("jets seeded with different variable counts")

    def prod(x, y, i, j):
        da, db = _DLETTERS[:i], _DLETTERS[i:i + j]
        return np.einsum(f"{sa}{da},{sb}{db}->{out}{da}{db}", x, y, optimize=False)

    coeffs = _leibniz(_coeffs(a, order), _coeffs(b, order), order, prod, lead=len(out))
    shape = np.einsum(spec, value(a), value(b)).shape
    return Jet(_fill(coeffs, shape, nvars), nvars)


def einsum(spec: str, *operands):
    """``numpy.einsum`` for lowercase-subscript specs, jet aware.

    More than two operands are contracted pairwise left to right.
    """
    spec = spec.replace(" ", "")
    ins, out = spec.split("->")
    terms = ins.split(",")
    if len(terms) != len(operands):
        raise ValueError("operand count does not match subscripts")
    if not any(isinstance(o, Jet) for o in operands):
        return np.einsum(spec, *[np.asarray(o, dtype=float) for o in operands])
    if len(operands) == 1:
        t = terms[0]
        x = operands[0]
        return x._map_lead(lambda c, k: np.einsum(f"{t}{_DLETTERS[:k]}->{out}{_DLETTERS[:k]}", c))
    acc, acc_t = operands[0], terms[0]
    for idx in range(1, len(operands)):
        nxt_t = terms[idx]
        later = set("".join(terms[idx + 1:]) + out)
        keep = [ch for ch in dict.fromkeys(acc_t + nxt_t) if ch in later]
        res_t = "".join(keep) if idx < len(operands) - 1 else out
        acc = _einsum2(f"{acc_t},{nxt_t}->{res_t}", acc, operands[idx])
        acc_t = res_t
    return acc


def _matmul(a, b):
    va, vb = value(a), value(b)
    if va.ndim == 2 and vb.ndim == 2:
        return einsum("ij,jk->ik", a, b)
    if va.ndim == 2 and vb.ndim == 1:
        return einsum("ij,j->i", a, b)
    if va.ndim == 1 and vb.ndim == 2:
        return einsum("i,ij->j", a, b)
    if va.ndim == 1 and vb.ndim == 1:
        return einsum("i,i->", a, b)
    raise ValueError("matmul supports 1-d and 2-d operands only")


def inv(a):
    """Matrix inverse; derivatives from differentiating ``A X = I`` order by order."""
    if not isinstance(a, Jet):
        return np.linalg.inv(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise ValueError("inv expects a square matrix")
    x0 = np.linalg.inv(a.c[0])
    xc = [x0]

    def prod(x, y, i, j):
        da, db = _DLETTERS[:i], _DLETTERS[i:i + j]
        return np.einsum(f"ij{da},jk{db}->ik{da}{db}", x, y)

    for k in range(1, a.order + 1):
        rest = _leibniz(a.c, xc + [None], k, prod, lead=2, only=k, skip_b_top=True)[0]
        if rest is None:
            xk = np.zeros(x0.shape + (a.nvars,) * k)
        else:
            dk = _DLETTERS[:k]
            xk = -np.einsum(f"ij,jk{dk}->ik{dk}", x0, rest)
        xc.append(xk)
    return Jet(xc, a.nvars)


def det(a):
    """Determinant (value path only is needed by the checks)."""
    return float(np.linalg.det(value(a)))
