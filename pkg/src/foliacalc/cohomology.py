"""Cohomology of the full and basic invariant complexes, possibly twisted.

Dimensions are computed twice: by rank-nullity of the (twisted) differential
and as the kernel of the matching Laplacian.  Generators are the harmonic
representatives in reduced echelon form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exterior import Form, contract, monomials, wedge
from .foliation import (
    _check_twist,
    basic_star,
    canonical_forms,
    delta_b,
    foliation_context,
    form_to_vector,
    full_twisted_delta,
)
from .linalg import matmul, nullspace, rank, solve, transpose
from .model import Check, CoframeModel, differential, validate

__all__ = [
    "CochainComplex",
    "CohomologyReport",
    "DualityReport",
    "GysinReport",
    "TheoremCheck",
    "class_coordinates",
    "cohomology",
    "duality_check",
    "gysin_flow_report",
]

HOLDS = "holds"
VACUOUS = "vacuous"
FALSIFIED = "FALSIFIED"


@dataclass(frozen=True)
class TheoremCheck:
    """An implication evaluated on one model: holds, vacuous or FALSIFIED."""

    name: str
    status: str
    detail: str = ""

    @property
    def falsified(self) -> bool:
        return self.status == FALSIFIED


def implication(name: str, hypothesis: bool, conclusion: bool, detail: str = "") -> TheoremCheck:
    if not hypothesis:
        return TheoremCheck(name, VACUOUS, detail)
    return TheoremCheck(name, HOLDS if conclusion else FALSIFIED, detail)


@dataclass(frozen=True)
class CochainComplex:
    """The full or basic invariant complex with differential d - twist ^."""

    model: CoframeModel
    variant: str
    twist: Form

    @property
    def top(self) -> int:
        return self.model.n if self.variant == "full" else self.model.q

    def basis(self, r: int) -> list[Form]:
        if r < 0 or r > self.top:
            return []
        if self.variant == "full":
            return [Form(r, {key: 1}) for key in monomials(self.model.n, r)]
        return list(foliation_context(self.model).basis(r))

    def d(self, a: Form) -> Form:
        out = differential(a, self.model)
        if self.twist:
            out = out - wedge(self.twist, a)
        return out if out else Form.zero(a.degree + 1)

    def delta(self, a: Form) -> Form:
        if a.degree == 0:
            return Form.zero(0)
        if self.variant == "full":
            return full_twisted_delta(a, self.twist, self.model)
        out = delta_b(a, self.model, check=False)
        if self.twist:
            out = out - contract(self.twist, a)
        return out if out else Form.zero(a.degree - 1)

    def laplacian(self, a: Form) -> Form:
        r = a.degree
        out = Form.zero(r)
        if r > 0:
            out = out + self.d(self.delta(a))
        if r < self.top:
            out = out + self.delta(self.d(a))
        return out if out else Form.zero(r)

    def matrix(self, op, r: int, out_degree: int) -> list[list[Fraction]]:
        """Columns are op(basis element) in ambient monomial coordinates."""
        n = self.model.n
        cols = [form_to_vector(op(b), n, out_degree) for b in self.basis(r)]
        return transpose(cols, len(monomials(n, out_degree))) if cols else []


def _combine(coeffs, basis: list[Form], degree: int) -> Form:
    out = Form.zero(degree)
    for c, b in zip(coeffs, basis):
        if c:
            out = out + c * b
    return out


def _kernel(cx: CochainComplex, op, r: int, out_degree: int) -> list[Form]:
    basis = cx.basis(r)
    if not basis:
        return []
    vecs = nullspace(cx.matrix(op, r, out_degree), len(basis))
    forms = [_combine(v, basis, r) for v in vecs]
    return canonical_forms(forms, cx.model.n, r)


@dataclass(frozen=True)
class CohomologyReport:
    model: CoframeModel
    variant: str
    twist: Form
    dims: tuple[int, ...]
    laplacian_dims: tuple[int, ...]
    generators: tuple[tuple[Form, ...], ...]
    kernel_bases: tuple[tuple[Form, ...], ...]
    image_bases: tuple[tuple[Form, ...], ...]
    crosschecks: tuple[Check, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return all(c.passed or c.severity != "error" for c in self.crosschecks)

    def generators_in(self, r: int) -> tuple[Form, ...]:
        return self.generators[r] if 0 <= r < len(self.generators) else ()

    def dim(self, r: int) -> int:
        return self.dims[r] if 0 <= r < len(self.dims) else 0


def cohomology(model: CoframeModel, variant: str = "basic", twist: Form | None = None) -> CohomologyReport:
    """Cohomology of the selected complex twisted by a closed 1-form."""
    if variant not in ("full", "basic"):
        raise ValueError(f"unknown variant {variant!r}")
    omega = twist if twist else Form.zero(1)
    _check_twist(omega, model, need_basic=variant == "basic")
    return _cohomology(model, variant, omega)


@lru_cache(maxsize=512)
def _cohomology(model: CoframeModel, variant: str, omega: Form) -> CohomologyReport:
    cx = CochainComplex(model, variant, omega)
    n = model.n
    unimodular = validate(model).get("unimodular").passed
    severity = "error" if unimodular else "warning"
    dims, hdims, gens, kers, ims = [], [], [], [], []
    checks: list[Check] = []
    for r in range(cx.top + 1):
        ker = _kernel(cx, cx.d, r, r + 1)
        prev = cx.basis(r - 1)
        images = [cx.d(b) for b in prev]
        im = canonical_forms(images, n, r) if images else []
        harm = _kernel(cx, cx.laplacian, r, r)
        dims.append(len(ker) - len(im))
        hdims.append(len(harm))
        kers.append(tuple(ker))
        ims.append(tuple(im))
        gens.append(tuple(harm))
        checks.append(Check(
            f"H^{r}: rank-nullity dimension = harmonic dimension",
            dims[-1] == hdims[-1],
            "" if dims[-1] == hdims[-1] else f"{dims[-1]} vs {hdims[-1]}",
            severity,
        ))
        both = _joint_kernel_dim(cx, r)
        closed = all(not cx.d(h) and not cx.delta(h) for h in harm)
        ok = closed and both == len(harm)
        checks.append(Check(
            f"H^{r}: harmonic = ker d_w and ker delta_w",
            ok,
            "" if ok else f"{len(harm)} harmonic vs {both} in the joint kernel",
            severity,
        ))
        vecs = [form_to_vector(f, n, r) for f in list(harm) + list(im)]
        independent = rank(vecs) == len(vecs) if vecs else True
        checks.append(Check(
            f"H^{r}: harmonic forms are independent modulo exact forms",
            independent,
            "" if independent else "a harmonic combination is exact",
            severity,
        ))
    return CohomologyReport(
        model, variant, omega, tuple(dims), tuple(hdims), tuple(gens),
        tuple(kers), tuple(ims), tuple(checks),
    )


def _joint_kernel_dim(cx: CochainComplex, r: int) -> int:
    size = len(cx.basis(r))
    stacked = cx.matrix(cx.d, r, r + 1) + cx.matrix(cx.delta, r, max(r - 1, 0))
    return size - rank(stacked) if stacked else size


def class_coordinates(report: CohomologyReport, a: Form) -> list[Fraction] | None:
    """Coordinates of [a] in the harmonic generators, or None if a is not a cocycle
    of the report's complex."""
    r = a.degree
    if r < 0 or r >= len(report.generators):
        return [] if not a else None
    gens = list(report.generators[r])
    ims = list(report.image_bases[r])
    n = report.model.n
    if not gens and not ims:
        return [] if not a else None
    cols = [form_to_vector(f, n, r) for f in gens + ims]
    m = transpose(cols, len(monomials(n, r)))
    x = solve(m, form_to_vector(a, n, r), len(cols))
    if x is None:
        return None
    return x[: len(gens)]


def map_matrix(source: CohomologyReport, target: CohomologyReport, fn, src_degree: int,
               tgt_degree: int) -> list[list[Fraction]] | None:
    """Matrix (rows = target generators) of a cochain map on harmonic generators."""
    cols = []
    for g in source.generators_in(src_degree):
        image = fn(g)
        coords = class_coordinates(target, image) if image else [Fraction(0)] * target.dim(tgt_degree)
        if coords is None:
            return None
        cols.append(coords)
    rows = target.dim(tgt_degree)
    if not cols:
        return [[] for _ in range(rows)]
    return transpose(cols, rows)


def _rank(m: list[list[Fraction]]) -> int:
    return rank(m) if m and m[0] else 0


# ---------------------------------------------------------------------------
# twisted duality


@dataclass(frozen=True)
class DualityRow:
    degree: int
    dim: int
    dual_dim: int
    pairing: tuple[tuple[Fraction, ...], ...]
    nonsingular: bool
    star_matches: bool

    @property
    def ok(self) -> bool:
        return self.dim == self.dual_dim and self.nonsingular and self.star_matches


@dataclass(frozen=True)
class DualityReport:
    rows: tuple[DualityRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)

    def checks(self) -> list[Check]:
        out = []
        for row in self.rows:
            r = row.degree
            out.append(Check(f"duality H^{r} vs H^{{q-{r}}}_kappa_b dimensions", row.dim == row.dual_dim,
                             "" if row.dim == row.dual_dim else f"{row.dim} vs {row.dual_dim}"))
            out.append(Check(f"duality H^{r} pairing nonsingular", row.nonsingular))
            out.append(Check(f"basic star maps H^{r} harmonics onto twisted harmonics", row.star_matches))
        return out


def duality_check(model: CoframeModel) -> DualityReport:
    """Compare basic cohomology with kappa_b-twisted cohomology in the complementary degree."""
    ctx = foliation_context(model)
    plain = cohomology(model, "basic")
    twisted = cohomology(model, "basic", ctx.kappa_b)
    q, n = model.q, model.n
    top = tuple(range(n))
    rows = []
    for r in range(q + 1):
        hs = plain.generators_in(r)
        ks = twisted.generators_in(q - r)
        pairing = tuple(
            tuple(wedge(a, b, ctx.chi).coeff(top) for b in ks) for a in hs
        )
        if len(hs) == len(ks):
            nonsingular = _determinant(pairing) != 0
        else:
            nonsingular = False
        stars = [basic_star(h, model, check=False) for h in hs]
        star_span = canonical_forms(stars, n, q - r) if stars else []
        rows.append(DualityRow(r, len(hs), len(ks), pairing, nonsingular, star_span == list(ks)))
    return DualityReport(tuple(rows))


def _determinant(m) -> Fraction:
    from .linalg import determinant

    return determinant([list(row) for row in m]) if m else Fraction(1)


# ---------------------------------------------------------------------------
# Gysin sequence of a Riemannian flow


@dataclass(frozen=True)
class GysinMap:
    kind: str  # "incl", "pi" or "euler"
    source: str
    target: str
    matrix: tuple[tuple[Fraction, ...], ...]
    rank: int


@dataclass(frozen=True)
class Junction:
    space: str
    dim: int
    rank_in: int
    rank_out: int
    composition_zero: bool

    @property
    def exact(self) -> bool:
        return self.composition_zero and self.rank_in + self.rank_out == self.dim


@dataclass(frozen=True)
class GysinReport:
    basic_twisted_dims: tuple[int, ...]
    full_twisted_dims: tuple[int, ...]
    basic_dims: tuple[int, ...]
    euler_class: tuple[Fraction, ...]
    maps: tuple[GysinMap, ...]
    junctions: tuple[Junction, ...]
    checks: tuple[Check, ...]
    statements: tuple[TheoremCheck, ...]

    @property
    def euler_class_nonzero(self) -> bool:
        return any(self.euler_class)

    @property
    def exact(self) -> bool:
        return all(j.exact for j in self.junctions)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks) and not any(s.falsified for s in self.statements)


def _rep_in_flow_subcomplex(model: CoframeModel, a: Form, full: CochainComplex, xi: Form):
    """Write a = b + xi ^ c - D eta with b, c basic; return c, or None."""
    ctx = foliation_context(model)
    r, n = a.degree, model.n
    bb = list(ctx.basis(r))
    cb = list(ctx.basis(r - 1))
    eb = full.basis(r - 1)
    cols = [form_to_vector(b, n, r) for b in bb]
    cols += [form_to_vector(wedge(xi, c), n, r) for c in cb]
    cols += [form_to_vector(-full.d(e), n, r) for e in eb]
    if not cols:
        return (Form.zero(max(r - 1, 0)) if not a else None), []
    m = transpose(cols, len(monomials(n, r)))
    x = solve(m, form_to_vector(a, n, r), len(cols))
    nb, nc = len(bb), len(cb)

    def c_part(v):
        return _combine(v[nb:nb + nc], cb, r - 1) if r > 0 else Form.zero(0)

    # solutions of the homogeneous system measure the choice of representative
    ambiguity = [c_part(v) for v in nullspace(m, len(cols))]
    if x is None:
        return None, ambiguity
    return c_part(x), ambiguity


def gysin_flow_report(model: CoframeModel) -> GysinReport:
    """Assemble H_{-k}(F) -> H_{-k}(M) -> H(F)[-1] -> H_{-k}(F)[+2] -> ... and test exactness.

    Fiber integration is realized as contraction with the leafwise generator
    on representatives of the form b + xi ^ c with b, c basic.
    """
    if model.p != 1:
        raise ValueError(f"flow-only operation (leaf dimension is {model.p})")
    ctx = foliation_context(model)
    if not ctx.kappa_is_basic:
        raise ValueError("the Gysin sequence needs a basic mean curvature form")
    n = model.n
    xi = ctx.chi
    phi0 = ctx.euler
    omega = -ctx.kappa
    B = cohomology(model, "basic", omega)
    T = cohomology(model, "full", omega)
    U = cohomology(model, "basic")
    full = CochainComplex(model, "full", omega)

    checks: list[Check] = []
    maps: list[GysinMap] = []
    incl: dict[int, list] = {}
    pi: dict[int, list] = {}
    euler: dict[int, list] = {}

    def zero_matrix(rows: int, cols: int):
        return [[Fraction(0)] * cols for _ in range(rows)]

    for r in range(n + 1):
        m = map_matrix(B, T, lambda a: a, r, r) if r <= model.q else zero_matrix(T.dim(r), 0)
        if m is None:
            checks.append(Check(f"inclusion H^{r}_-k(F) -> H^{r}_-k(M) is a cochain map", False))
            m = zero_matrix(T.dim(r), B.dim(r))
        incl[r] = m

        cols = []
        well_defined = True
        for g in T.generators_in(r):
            c, amb = _rep_in_flow_subcomplex(model, g, full, xi)
            if c is None:
                checks.append(Check(
                    f"H^{r}_-k(M) class has a representative b + xi ^ c",
                    False, model.format_form(g),
                ))
                cols.append([Fraction(0)] * U.dim(r - 1))
                continue
            coords = class_coordinates(U, c) if r > 0 else []
            if coords is None:
                checks.append(Check(f"xi -| representative in degree {r} is closed", False, model.format_form(c)))
                coords = [Fraction(0)] * U.dim(r - 1)
            cols.append(coords)
            for extra in amb:
                if not extra:
                    continue
                coords_extra = class_coordinates(U, extra)
                if coords_extra is None or any(coords_extra):
                    well_defined = False
        if not well_defined:
            checks.append(Check(f"fiber integration on H^{r}_-k(M) is independent of the representative", False))
        pi[r] = transpose(cols, U.dim(r - 1)) if cols else zero_matrix(U.dim(r - 1), 0)

        src = r - 1
        m = map_matrix(U, B, lambda c: wedge(phi0, c), src, r + 1) if 0 <= src <= model.q else None
        if m is None:
            m = zero_matrix(B.dim(r + 1), U.dim(src))
        euler[r] = m

    for r in range(n + 1):
        maps.append(GysinMap("incl", f"H^{r}_-k(F)", f"H^{r}_-k(M)", _freeze(incl[r]), _rank(incl[r])))
        maps.append(GysinMap("pi", f"H^{r}_-k(M)", f"H^{r - 1}(F)", _freeze(pi[r]), _rank(pi[r])))
        maps.append(GysinMap("euler", f"H^{r - 1}(F)", f"H^{r + 1}_-k(F)", _freeze(euler[r]), _rank(euler[r])))

    junctions: list[Junction] = []
    for r in range(n + 1):
        if r <= model.q:
            incoming = euler[r - 1] if r >= 1 else []
            junctions.append(_junction(f"H^{r}_-k(F)", B.dim(r), incoming, incl[r]))
        junctions.append(_junction(f"H^{r}_-k(M)", T.dim(r), incl[r], pi[r]))
        if r >= 1:
            junctions.append(_junction(f"H^{r - 1}(F)", U.dim(r - 1), pi[r], euler[r]))
    for j in junctions:
        checks.append(Check(
            f"Gysin exact at {j.space}", j.exact,
            "" if j.exact else f"dim {j.dim}, rank in {j.rank_in}, rank out {j.rank_out}, "
                               f"composition zero {j.composition_zero}",
        ))

    euler_coords = tuple(class_coordinates(B, phi0) or []) if model.q >= 2 else ()
    bd = tuple(B.dim(r) for r in range(n + 2))
    td = tuple(T.dim(r) for r in range(n + 2))
    ud = tuple(U.dim(r) for r in range(n + 2))
    statements = _gysin_statements(bd, td, ud, any(euler_coords), pi, incl)
    return GysinReport(
        B.dims, T.dims, U.dims, euler_coords, tuple(maps), tuple(junctions),
        tuple(checks), tuple(statements),
    )


def _freeze(m) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(row) for row in m)


def _junction(space: str, dim: int, incoming, outgoing) -> Junction:
    rin = _rank(incoming)
    rout = _rank(outgoing)
    zero = True
    if incoming and outgoing and incoming[0] and outgoing[0]:
        inner = len(incoming)
        prod = matmul(outgoing, incoming, inner, len(incoming[0]))
        zero = all(x == 0 for row in prod for x in row)
    return Junction(space, dim, rin, rout, zero)


def _gysin_statements(B, T, U, euler_nonzero: bool, pi, incl) -> list[TheoremCheck]:
    out = []
    out.append(implication(
        "nonzero Euler class: H^1_-k(F) = H^1_-k(M) and 1 <= dim H^2_-k(F) <= 1 + dim H^2_-k(M)",
        euler_nonzero,
        B[1] == T[1] and 1 <= B[2] <= 1 + T[2],
        f"dims H^1_-k(F)={B[1]}, H^1_-k(M)={T[1]}, H^2_-k(F)={B[2]}, H^2_-k(M)={T[2]}",
    ))
    out.append(implication(
        "nonzero Euler class and dim H^2_-k(F) = 1: H^2_-k(M) -> H^1(F) injective",
        euler_nonzero and B[2] == 1,
        _rank(pi[2]) == T[2] if 2 in pi else T[2] == 0,
    ))
    for r in range(len(U) - 2):
        hyp = U[r] == 0
        inj = _rank(incl[r + 2]) == B[r + 2] if r + 2 in incl else True
        out.append(implication(
            f"H^{r}(F) = 0: H^{r + 2}_-k(F) injects into H^{r + 2}_-k(M) and "
            f"dim H^{r + 1}_-k(F) >= dim H^{r + 1}_-k(M)",
            hyp,
            inj and B[r + 1] >= T[r + 1] and T[r + 2] <= B[r + 2] + U[r + 1],
        ))
        out.append(implication(
            f"H^{r + 1}_-k(M) = H^{r + 2}_-k(M) = 0: H^{r}(F) = H^{r + 2}_-k(F)",
            T[r + 1] == 0 and T[r + 2] == 0,
            U[r] == B[r + 2],
        ))
    return out
