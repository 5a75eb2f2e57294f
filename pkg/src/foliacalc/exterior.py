"""Exact exterior algebra over an orthonormal coframe e^0, ..., e^{n-1}.

A monomial e^{i_1} ^ ... ^ e^{i_r} is labelled by the strictly increasing
tuple (i_1, ..., i_r).  Signs follow the sorted-insert convention: the
product of two monomials is the sign of the permutation that sorts the
concatenated index tuple, or zero when an index repeats.  Every other sign
in the package (Hodge star, contraction, basic star) is derived from this.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Iterable, Iterator, Mapping

MultiIndex = tuple[int, ...]

__all__ = [
    "Form",
    "MultiIndex",
    "contract",
    "hodge",
    "merge_sign",
    "monomials",
    "pointwise_inner",
    "volume",
    "wedge",
]


def merge_sign(left: MultiIndex, right: MultiIndex) -> int:
    """Sign of e^left ^ e^right relative to the sorted monomial, 0 on overlap."""
    if not left or not right:
        return 1
    inversions = 0
    rset = set(right)
    for i in left:
        if i in rset:
            return 0
        for j in right:
            if j < i:
                inversions += 1
    return -1 if inversions % 2 else 1


def monomials(n: int, r: int) -> list[MultiIndex]:
    """All degree-r monomials on n generators in lexicographic order."""
    if r < 0 or r > n:
        return []
    return list(combinations(range(n), r))


class Form:
    """Homogeneous form with exact rational coefficients.

    ``terms`` maps strictly increasing index tuples to nonzero Fractions.
    Instances are treated as immutable.
    """

    __slots__ = ("degree", "_terms", "_hash")

    def __init__(self, degree: int, terms: Mapping[MultiIndex, object] | None = None):
        if degree < 0:
            raise ValueError(f"negative degree {degree}")
        clean: dict[MultiIndex, Fraction] = {}
        for key, value in (terms or {}).items():
            key = tuple(key)
            if len(key) != degree:
                raise ValueError(f"monomial {key} does not have degree {degree}")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise ValueError(f"monomial {key} is not strictly increasing")
            value = Fraction(value)
            if value:
                clean[key] = value
        self.degree = degree
        self._terms = dict(sorted(clean.items()))
        self._hash: int | None = None

    @classmethod
    def _raw(cls, degree: int, terms: dict[MultiIndex, Fraction]) -> Form:
        # trusted constructor: keys valid, zeros already dropped
        obj = cls.__new__(cls)
        obj.degree = degree
        obj._terms = dict(sorted(terms.items()))
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, degree: int = 0) -> Form:
        return cls._raw(degree, {})

    @classmethod
    def constant(cls, value: object = 1) -> Form:
        return cls(0, {(): value})

    @classmethod
    def monomial(cls, indices: Iterable[int], coeff: object = 1) -> Form:
        """Signed monomial; ``indices`` may be unsorted (sign is applied)."""
        idx = list(indices)
        sign = 1
        # bubble sort to track parity
        for i in range(len(idx)):
            for j in range(len(idx) - 1 - i):
                if idx[j] == idx[j + 1]:
                    return cls.zero(len(idx))
                if idx[j] > idx[j + 1]:
                    idx[j], idx[j + 1] = idx[j + 1], idx[j]
                    sign = -sign
        if len(set(idx)) != len(idx):
            return cls.zero(len(idx))
        return cls(len(idx), {tuple(idx): sign * Fraction(coeff)})

    @property
    def terms(self) -> Mapping[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        return iter(self._terms.items())

    def coeff(self, key: MultiIndex) -> Fraction:
        return self._terms.get(tuple(key), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def support(self) -> set[int]:
        out: set[int] = set()
        for key in self._terms:
            out.update(key)
        return out

    def _check(self, other: Form) -> None:
        if not isinstance(other, Form):
            raise TypeError(f"expected Form, got {type(other).__name__}")
        if other.degree != self.degree and self._terms and other._terms:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other: Form) -> Form:
        self._check(other)
        degree = self.degree if self._terms else other.degree
        out = dict(self._terms)
        for key, value in other._terms.items():
            s = out.get(key, 0) + value
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return Form._raw(degree, out)

    def __neg__(self) -> Form:
        return Form._raw(self.degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: Form) -> Form:
        return self + (-other)

    def __mul__(self, scalar: object) -> Form:
        if isinstance(scalar, Form):
            return NotImplemented
        if not isinstance(scalar, (Rational, Fraction, int)):
            raise TypeError(f"forms scale by rationals only, got {type(scalar).__name__}")
        c = Fraction(scalar)
        if not c:
            return Form.zero(self.degree)
        return Form._raw(self.degree, {k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: object) -> Form:
        return self * (1 / Fraction(scalar))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        if not self._terms and not other._terms:
            return True
        return self.degree == other.degree and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            key = tuple(self._terms.items()) if self._terms else ()
            self._hash = hash((self.degree if self._terms else -1, key))
        return self._hash

    def __repr__(self) -> str:
        if not self._terms:
            return f"Form({self.degree}, 0)"
        parts = []
        for key, value in self._terms.items():
            mono = "^".join(f"e{i}" for i in key) or "1"
            parts.append(f"{value}*{mono}")
        return f"Form({self.degree}, {' + '.join(parts)})"


def volume(n: int) -> Form:
    return Form(n, {tuple(range(n)): 1})


def wedge(a: Form, b: Form, *more: Form) -> Form:
    """Exterior product; associative and graded commutative."""
    if more:
        return wedge(wedge(a, b), *more)
    out: dict[MultiIndex, Fraction] = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            s = merge_sign(ka, kb)
            if not s:
                continue
            key = tuple(sorted(ka + kb))
            v = out.get(key, 0) + s * va * vb
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return Form._raw(a.degree + b.degree, out)


def contract(a: Form, b: Form) -> Form:
    """Interior product a -| b, the adjoint of a ^ . in the monomial inner product.

    Returns the zero 0-form when deg a > deg b.
    """
    if a.degree > b.degree:
        return Form.zero(0)
    out: dict[MultiIndex, Fraction] = {}
    for ka, va in a.items():
        sa = set(ka)
        for kb, vb in b.items():
            if not sa.issubset(kb):
                continue
            rest = tuple(i for i in kb if i not in sa)
            s = merge_sign(ka, rest)
            v = out.get(rest, 0) + s * va * vb
            if v:
                out[rest] = v
            else:
                out.pop(rest, None)
    return Form._raw(b.degree - a.degree, out)


def hodge(a: Form, model: object) -> Form:
    """Hodge star for the orientation e^0 ^ ... ^ e^{n-1}.

    ``model`` is a CoframeModel or a plain generator count.
    """
    n = model if isinstance(model, int) else model.n
    full = set(range(n))
    out: dict[MultiIndex, Fraction] = {}
    for key, value in a.items():
        comp = tuple(sorted(full.difference(key)))
        out[comp] = merge_sign(key, comp) * value
    return Form._raw(n - a.degree, out)


def pointwise_inner(a: Form, b: Form) -> Fraction:
    """Inner product in which the monomials are orthonormal."""
    if a.degree != b.degree:
        raise ValueError(f"inner product of a {a.degree}-form with a {b.degree}-form")
    small, large = (a, b) if len(a) <= len(b) else (b, a)
    total = Fraction(0)
    for key, value in small.items():
        total += value * large.coeff(key)
    return total
