"""Foliation operators on an invariant coframe model.

Everything here acts on constant-coefficient forms: the characteristic form
and Rummler decomposition, the basic subcomplex, the basic star and its
codifferential, twisted differentials and Laplacians, and the quantities
attached to a Riemannian flow.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exterior import Form, contract, hodge, monomials, pointwise_inner, wedge
from .linalg import nullspace, row_space_basis, solve
from .model import Check, CoframeModel, differential

__all__ = [
    "FlowQuantities",
    "FoliationContext",
    "NotBasicError",
    "basic_projection",
    "basic_star",
    "basic_subspace",
    "characteristic_form",
    "delta_b",
    "flow_identity_checks",
    "flow_quantities",
    "foliation_context",
    "form_from_vector",
    "form_to_vector",
    "full_codifferential",
    "full_laplacian",
    "full_twisted_delta",
    "is_basic",
    "laplacian",
    "rummler_decompose",
    "twisted_d",
    "twisted_delta",
]


class NotBasicError(ValueError):
    pass


def form_to_vector(f: Form, n: int, r: int | None = None) -> list[Fraction]:
    r = f.degree if r is None else r
    return [f.coeff(key) for key in monomials(n, r)]


def form_from_vector(v, n: int, r: int) -> Form:
    return Form(r, {key: c for key, c in zip(monomials(n, r), v) if c})


def canonical_forms(forms: list[Form], n: int, r: int) -> list[Form]:
    """Reduced echelon basis of span(forms) in lexicographic monomial order."""
    rows = row_space_basis([form_to_vector(f, n, r) for f in forms])
    return [form_from_vector(v, n, r) for v in rows]


def characteristic_form(model: CoframeModel) -> Form:
    """Wedge of the leafwise generators in manifest order (1 if there are none)."""
    return Form.monomial(model.leafwise)


def rummler_decompose(model: CoframeModel) -> tuple[Form, Form]:
    """Split d(chi) = -kappa ^ chi + phi0 with chi -| phi0 = 0.

    Components of d(chi) containing every leafwise index give -kappa ^ chi.
    """
    chi = characteristic_form(model)
    dchi = differential(chi, model)
    leaf = set(model.leafwise)
    full = Form(dchi.degree, {k: c for k, c in dchi.items() if leaf.issubset(k)})
    phi0 = dchi - full
    sign = -1 if model.p % 2 else 1
    kappa = -sign * contract(chi, full)
    if kappa.is_zero():
        kappa = Form.zero(1)
    if -wedge(kappa, chi) + phi0 != dchi or contract(chi, phi0):
        raise RuntimeError("Rummler decomposition failed to reassemble d(chi)")
    return kappa, phi0


def basic_subspace(model: CoframeModel, r: int) -> list[Form]:
    """Canonical basis of basic r-forms: no leafwise index in a or in da."""
    if r < 0 or r > model.q:
        return []
    leaf = set(model.leafwise)
    cand = [key for key in monomials(model.n, r) if leaf.isdisjoint(key)]
    if not leaf:
        return [Form(r, {key: 1}) for key in cand]
    images = [model.d_monomial(key) for key in cand]
    rows_keys = sorted({k for img in images for k in img.terms if not leaf.isdisjoint(k)})
    matrix = [[img.coeff(k) for img in images] for k in rows_keys]
    kernel = nullspace(matrix, len(cand))
    forms = [Form(r, {key: c for key, c in zip(cand, v) if c}) for v in kernel]
    return canonical_forms(forms, model.n, r)


@dataclass(frozen=True)
class FoliationContext:
    model: CoframeModel
    chi: Form
    nu: Form
    kappa: Form
    euler: Form
    kappa_b: Form
    basic_basis: tuple[tuple[Form, ...], ...]

    @property
    def p(self) -> int:
        return self.model.p

    @property
    def q(self) -> int:
        return self.model.q

    @property
    def kappa_is_basic(self) -> bool:
        return self.kappa == self.kappa_b

    @property
    def kappa_b_closed(self) -> bool:
        return differential(self.kappa_b, self.model).is_zero()

    def basis(self, r: int) -> tuple[Form, ...]:
        if 0 <= r < len(self.basic_basis):
            return self.basic_basis[r]
        return ()


@lru_cache(maxsize=256)
def foliation_context(model: CoframeModel) -> FoliationContext:
    chi = characteristic_form(model)
    kappa, euler = rummler_decompose(model)
    bases = tuple(tuple(basic_subspace(model, r)) for r in range(model.q + 1))
    sign = -1 if (model.p * model.q) % 2 else 1
    nu = sign * hodge(chi, model)
    kappa_b = _project(kappa, bases[1] if model.q >= 1 else (), model.n)
    return FoliationContext(model, chi, nu, kappa, euler, kappa_b, bases)


def _project(a: Form, basis, n: int) -> Form:
    if not basis:
        return Form.zero(a.degree)
    gram = [[pointwise_inner(b, c) for c in basis] for b in basis]
    rhs = [pointwise_inner(b, a) for b in basis]
    coeffs = solve(gram, rhs, len(basis))
    out = Form.zero(a.degree)
    for c, b in zip(coeffs, basis):
        out = out + c * b
    return out


def is_basic(a: Form, model: CoframeModel) -> bool:
    if a.is_zero():
        return True
    leaf = set(model.leafwise)
    if any(not leaf.isdisjoint(k) for k, _ in a.items()):
        return False
    return all(leaf.isdisjoint(k) for k, _ in differential(a, model).items())


def _require_basic(a: Form, model: CoframeModel, what: str) -> None:
    if not is_basic(a, model):
        raise NotBasicError(f"{what}: input {model.format_form(a)} is not basic")


def basic_projection(a: Form, model: CoframeModel) -> Form:
    """Orthogonal projection onto the basic subspace in the monomial inner product."""
    ctx = foliation_context(model)
    return _project(a, ctx.basis(a.degree), model.n)


def basic_star(a: Form, model: CoframeModel, check: bool = True) -> Form:
    """Transverse Hodge star: (-1)^{p(q-r)} * (a ^ chi)."""
    if check:
        _require_basic(a, model, "basic_star")
    return _basic_star(a, model)


def _basic_star(a: Form, model: CoframeModel) -> Form:
    chi = foliation_context(model).chi
    sign = -1 if (model.p * (model.q - a.degree)) % 2 else 1
    return sign * hodge(wedge(a, chi), model)


def _check_twist(omega: Form, model: CoframeModel, need_basic: bool) -> None:
    if omega.is_zero():
        return
    if omega.degree != 1:
        raise ValueError("twist must be a 1-form")
    if differential(omega, model):
        raise ValueError(f"twist {model.format_form(omega)} is not closed")
    if need_basic and not is_basic(omega, model):
        raise NotBasicError(f"twist {model.format_form(omega)} is not basic")


def delta_b(a: Form, model: CoframeModel, check: bool = True) -> Form:
    """Basic codifferential (-1)^{q(r+1)+1} *b (d - kappa_b ^) *b."""
    if check:
        _require_basic(a, model, "delta_b")
    return _delta_b(a, model)


def _delta_b(a: Form, model: CoframeModel) -> Form:
    r = a.degree
    if r == 0:
        return Form.zero(0)
    kb = foliation_context(model).kappa_b
    s = _basic_star(a, model)
    inner = differential(s, model) - wedge(kb, s)
    sign = -1 if (model.q * (r + 1) + 1) % 2 else 1
    out = sign * _basic_star(inner, model)
    return out if out else Form.zero(r - 1)


def full_codifferential(a: Form, model: CoframeModel) -> Form:
    """(-1)^{n(r+1)+1} * d * on the whole invariant complex."""
    r = a.degree
    if r == 0:
        return Form.zero(0)
    sign = -1 if (model.n * (r + 1) + 1) % 2 else 1
    out = sign * hodge(differential(hodge(a, model), model), model)
    return out if out else Form.zero(r - 1)


def twisted_d(a: Form, omega: Form, model: CoframeModel) -> Form:
    """d_omega = d - omega ^ for a closed 1-form omega."""
    _check_twist(omega, model, need_basic=False)
    return differential(a, model) - wedge(omega, a) if omega else differential(a, model)


def twisted_delta(a: Form, omega: Form, model: CoframeModel) -> Form:
    """delta_omega = delta_b - omega -| on basic forms."""
    _require_basic(a, model, "twisted_delta")
    _check_twist(omega, model, need_basic=True)
    out = _delta_b(a, model)
    if omega and a.degree > 0:
        out = out - contract(omega, a)
    return out


def laplacian(a: Form, model: CoframeModel, twist: Form | None = None) -> Form:
    """Basic (twisted) Laplacian d_w delta_w + delta_w d_w; twist None or 0 gives Delta_b."""
    omega = twist if twist is not None else Form.zero(1)
    _require_basic(a, model, "laplacian")
    _check_twist(omega, model, need_basic=True)
    return _basic_laplacian(a, model, omega)


def _basic_laplacian(a: Form, model: CoframeModel, omega: Form) -> Form:
    def dw(x: Form) -> Form:
        return differential(x, model) - wedge(omega, x) if omega else differential(x, model)

    def deltaw(x: Form) -> Form:
        out = _delta_b(x, model)
        if omega and x.degree > 0:
            out = out - contract(omega, x)
        return out

    first = dw(deltaw(a)) if a.degree > 0 else Form.zero(a.degree)
    second = deltaw(dw(a)) if a.degree < model.q else Form.zero(a.degree)
    out = first + second
    return out if out else Form.zero(a.degree)


def full_twisted_delta(a: Form, omega: Form, model: CoframeModel) -> Form:
    out = full_codifferential(a, model)
    if omega and a.degree > 0:
        out = out - contract(omega, a)
    return out


def full_laplacian(a: Form, model: CoframeModel, twist: Form | None = None) -> Form:
    """Hodge Laplacian of the whole complex, optionally twisted by a closed 1-form."""
    omega = twist if twist is not None else Form.zero(1)
    _check_twist(omega, model, need_basic=False)

    def dw(x: Form) -> Form:
        return differential(x, model) - wedge(omega, x) if omega else differential(x, model)

    first = dw(full_twisted_delta(a, omega, model)) if a.degree > 0 else Form.zero(a.degree)
    second = full_twisted_delta(dw(a), omega, model) if a.degree < model.n else Form.zero(a.degree)
    out = first + second
    return out if out else Form.zero(a.degree)


# ---------------------------------------------------------------------------
# Riemannian flows


@dataclass(frozen=True)
class FlowQuantities:
    xi_flat: Form
    phi0: Form
    kappa: Form
    norm_phi0_sq: Fraction
    norm_kappa_sq: Fraction
    delta_b_kappa: Fraction
    lam: Fraction
    euler_lemma: bool | None  # None when kappa is not basic
    note: str = "lambda valid under Ric(xi) = lambda xi"


def _require_flow(model: CoframeModel) -> None:
    if model.p != 1:
        raise ValueError(f"flow-only operation (leaf dimension is {model.p})")


def flow_quantities(model: CoframeModel) -> FlowQuantities:
    _require_flow(model)
    ctx = foliation_context(model)
    xi = ctx.chi
    phi0 = ctx.euler
    kappa = ctx.kappa
    norm_phi0 = pointwise_inner(phi0, phi0) if phi0 else Fraction(0)
    norm_kappa = pointwise_inner(kappa, kappa) if kappa else Fraction(0)
    dbk = _delta_b(ctx.kappa_b, model) if ctx.kappa_b else Form.zero(0)
    dbk_scalar = dbk.coeff(())
    lam = -dbk_scalar + norm_phi0 / 2
    lemma = None
    if ctx.kappa_is_basic:
        dphi = differential(phi0, model)
        lemma = dphi == -wedge(kappa, phi0) and is_basic(phi0, model)
    return FlowQuantities(xi, phi0, kappa, norm_phi0, norm_kappa, dbk_scalar, lam, lemma)


def flow_identity_checks(model: CoframeModel) -> list[Check]:
    """The two codifferential formulas for the Euler form of a flow.

    Returns an empty list when the hypotheses (basic, resp. basic harmonic,
    mean curvature) do not hold.
    """
    _require_flow(model)
    ctx = foliation_context(model)
    fq = flow_quantities(model)
    checks: list[Check] = []
    if not ctx.kappa_is_basic or not is_basic(fq.phi0, model):
        return checks
    dphi = _delta_b(fq.phi0, model) if fq.phi0 else Form.zero(1)
    kappa_harmonic = _basic_laplacian(ctx.kappa_b, model, Form.zero(1)).is_zero()
    if kappa_harmonic:
        rhs = full_laplacian(fq.xi_flat, model) - (fq.norm_phi0_sq + fq.norm_kappa_sq) * fq.xi_flat
        ok = dphi == rhs
        checks.append(Check(
            "delta_b phi0 = (Delta - |phi0|^2 - |kappa|^2) xi",
            ok,
            "" if ok else f"lhs {model.format_form(dphi)} vs rhs {model.format_form(rhs)}",
        ))
    rhs = -contract(fq.kappa, fq.phi0) if fq.phi0 and fq.kappa else Form.zero(1)
    ok = dphi == rhs
    checks.append(Check(
        "delta_b phi0 = -kappa -| phi0 (under Ric(xi) = lambda xi)",
        ok,
        "" if ok else f"lhs {model.format_form(dphi)} vs rhs {model.format_form(rhs)}",
    ))
    return checks
