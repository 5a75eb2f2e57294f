"""Independent reference computations used as test oracles.

Nothing here calls the package's wedge, contraction, star, differential or
linear algebra.  Forms are evaluated as alternating multilinear maps on the
dual frame, the differential comes from the Chevalley-Eilenberg formula
applied to brackets read off the generator differentials, and ranks come
from sympy.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import sympy

Coeffs = dict  # sorted index tuple -> Fraction


def perm_sign(seq) -> int:
    """Sign of the permutation sorting ``seq`` (0 on repeated entries)."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inversions % 2 else 1


def evaluate(form: Coeffs, vectors) -> Fraction:
    """Value of a form on frame vectors given by index (any order)."""
    sign = perm_sign(vectors)
    if not sign:
        return Fraction(0)
    return sign * Fraction(form.get(tuple(sorted(vectors)), 0))


def wedge(a: Coeffs, ra: int, b: Coeffs, rb: int, n: int) -> Coeffs:
    """Shuffle-sum wedge product."""
    out = {}
    for J in combinations(range(n), ra + rb):
        total = Fraction(0)
        for S in combinations(J, ra):
            rest = tuple(j for j in J if j not in S)
            total += perm_sign(S + rest) * evaluate(a, S) * evaluate(b, rest)
        if total:
            out[J] = total
    return out


def inner(a: Coeffs, b: Coeffs) -> Fraction:
    return sum((Fraction(v) * Fraction(b.get(k, 0)) for k, v in a.items()), Fraction(0))


def contract(a: Coeffs, ra: int, b: Coeffs, rb: int, n: int) -> Coeffs:
    """Contraction defined through <a -| b, c> = <b, a ^ c> for all monomials c."""
    out = {}
    for K in combinations(range(n), rb - ra):
        # <b, e^A ^ e^K> with e^A ^ e^K = sign(A + K) e^{sorted(A + K)}
        val = sum((Fraction(c) * perm_sign(A + K) * Fraction(b.get(tuple(sorted(A + K)), 0))
                   for A, c in a.items()), Fraction(0))
        if val:
            out[K] = val
    return out


def hodge(b: Coeffs, r: int, n: int) -> Coeffs:
    """Star defined through a ^ *b = <a, b> vol for all monomials a."""
    top = tuple(range(n))
    out = {}
    for I in combinations(range(n), r):
        comp = tuple(i for i in top if i not in I)
        # e^I ^ e^comp = s vol, so *b has coefficient <e^I, b> / s on e^comp
        s = wedge({I: 1}, r, {comp: 1}, n - r, n)[top]
        val = Fraction(b.get(I, 0)) / s
        if val:
            out[comp] = val
    return out


class LieOracle:
    """Chevalley-Eilenberg calculus for a coframe with constant structure equations."""

    def __init__(self, n: int, gen_d: dict[int, Coeffs], leafwise=()):
        self.n = n
        self.leafwise = tuple(leafwise)
        # d e^i = sum_{j<k} c^i_{jk} e^j ^ e^k  and  [X_j, X_k] = -sum_i c^i_{jk} X_i
        self.bracket = {}
        for j in range(n):
            for k in range(n):
                self.bracket[j, k] = {
                    i: -evaluate(gen_d.get(i, {}), (j, k)) for i in range(n) if evaluate(gen_d.get(i, {}), (j, k))
                }

    @classmethod
    def from_model(cls, model) -> LieOracle:
        gen_d = {i: dict(model.d_monomial((i,)).terms) for i in range(model.n)}
        return cls(model.n, gen_d, model.leafwise)

    def d(self, form: Coeffs, r: int) -> Coeffs:
        out = {}
        for J in combinations(range(self.n), r + 1):
            total = Fraction(0)
            for a in range(r + 1):
                for b in range(a + 1, r + 1):
                    rest = tuple(J[c] for c in range(r + 1) if c not in (a, b))
                    for i, coeff in self.bracket[J[a], J[b]].items():
                        total += (-1) ** (a + b) * coeff * evaluate(form, (i,) + rest)
            if total:
                out[J] = total
        return out

    def mean_curvature(self) -> Coeffs:
        """kappa(Z) = sum over leafwise X of <[Z, X], X>, from the Koszul formula."""
        out = {}
        for z in range(self.n):
            if z in self.leafwise:
                continue
            val = sum((self.bracket[z, x].get(x, Fraction(0)) for x in self.leafwise), Fraction(0))
            if val:
                out[(z,)] = val
        return out

    # -- sympy-backed cohomology ---------------------------------------------

    def _monos(self, r: int):
        return list(combinations(range(self.n), r))

    def _column(self, form: Coeffs, r: int) -> list:
        return [sympy.Rational(Fraction(form.get(m, 0)).numerator, Fraction(form.get(m, 0)).denominator)
                for m in self._monos(r)]

    def d_twisted(self, form: Coeffs, r: int, omega: Coeffs) -> Coeffs:
        out = dict(self.d(form, r))
        for k, v in wedge(omega, 1, form, r, self.n).items():
            out[k] = out.get(k, 0) - v
        return {k: v for k, v in out.items() if v}

    def basic_basis(self, r: int) -> sympy.Matrix:
        """Columns spanning the basic r-forms: X -| a = 0 and X -| da = 0 for leafwise X."""
        monos = self._monos(r)
        dm = [self.d({m: 1}, r) for m in monos]
        rows = []
        for x in self.leafwise:
            for J in combinations(range(self.n), r - 1) if r >= 1 else []:
                rows.append([evaluate({m: 1}, (x,) + J) for m in monos])
            for J in combinations(range(self.n), r):
                rows.append([evaluate(dm[c], (x,) + J) for c in range(len(monos))])
        if not rows:
            return sympy.eye(len(monos))
        kernel = sympy.Matrix(rows).nullspace()
        if not kernel:
            return sympy.zeros(len(monos), 0)
        return sympy.Matrix.hstack(*kernel)

    def cohomology_dims(self, basic: bool, omega: Coeffs | None = None) -> tuple[int, ...]:
        omega = omega or {}
        top = self.n - len(self.leafwise) if basic else self.n
        spaces = [self.basic_basis(r) if basic else sympy.eye(len(self._monos(r))) for r in range(top + 1)]
        ranks = []
        for r in range(top + 1):
            space = spaces[r]
            if r == top or space.cols == 0:
                ranks.append(0)
                continue
            cols = []
            for c in range(space.cols):
                form = {m: Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1]))
                        for m, v in zip(self._monos(r), space[:, c]) if v != 0}
                cols.append(sympy.Matrix(self._column(self.d_twisted(form, r, omega), r + 1)))
            ranks.append(sympy.Matrix.hstack(*cols).rank())
        return tuple(
            spaces[r].cols - ranks[r] - (ranks[r - 1] if r else 0) for r in range(top + 1)
        )
