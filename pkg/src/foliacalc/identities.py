"""Exhaustive verification of the structural identities on one model.

Every identity is checked on a basis (monomials for the full complex, the
canonical basic basis for the basic complex), so a pass is a proof for the
given model.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .exterior import Form, contract, hodge, monomials, pointwise_inner, volume, wedge
from .foliation import (
    basic_star,
    delta_b,
    flow_identity_checks,
    flow_quantities,
    foliation_context,
    full_codifferential,
    is_basic,
    laplacian,
    twisted_d,
    twisted_delta,
)
from .model import Check, CoframeModel, differential, validate

__all__ = ["check_identities"]


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _first_failure(model: CoframeModel, items: Iterable[Form], test: Callable[[Form], str]) -> str:
    for a in items:
        problem = test(a)
        if problem:
            return f"{model.format_form(a)}: {problem}"
    return ""


def _check(name: str, witness: str, severity: str = "error") -> Check:
    return Check(name, not witness, witness, severity)


def check_identities(model: CoframeModel) -> list[Check]:
    n, q = model.n, model.q
    fmt = model.format_form
    out: list[Check] = []

    def d_squared(a: Form) -> str:
        dd = differential(differential(a, model), model)
        return "" if not dd else f"d(d a) = {fmt(dd)}"

    every = [Form(r, {key: 1}) for r in range(n + 1) for key in monomials(n, r)]
    out.append(_check("d^2 = 0 on every monomial", _first_failure(model, every, d_squared)))
    if out[-1].passed is False:
        # the remaining identities presuppose a cochain complex
        return out

    ctx = foliation_context(model)
    basic = [a for r in range(q + 1) for a in ctx.basis(r)]
    kb = ctx.kappa_b
    unimodular = validate(model).get("unimodular").passed
    adj_severity = "error" if unimodular else "warning"

    dchi = differential(ctx.chi, model)
    reassembled = -wedge(ctx.kappa, ctx.chi) + ctx.euler
    out.append(_check(
        "Rummler: d chi = -kappa ^ chi + phi0",
        "" if dchi == reassembled else f"d chi = {fmt(dchi)}, reassembled {fmt(reassembled)}",
    ))
    leftover = contract(ctx.chi, ctx.euler) if ctx.euler else Form.zero(0)
    out.append(_check("Rummler: chi -| phi0 = 0", "" if not leftover else fmt(leftover)))
    dkb = differential(kb, model)
    out.append(_check("kappa_b is closed", "" if not dkb else f"d kappa_b = {fmt(dkb)}"))
    out.append(_check("kappa_b is basic", "" if is_basic(kb, model) else fmt(kb)))

    def star_degree(a: Form) -> str:
        s = basic_star(a, model)
        if s and (s.degree != q - a.degree or not is_basic(s, model)):
            return f"basic star gives {fmt(s)}"
        return ""

    out.append(_check("basic star maps basic r-forms to basic (q-r)-forms",
                      _first_failure(model, basic, star_degree)))

    def star_star(a: Form) -> str:
        r = a.degree
        ss = basic_star(basic_star(a, model), model)
        expected = _sign(r * (q - r)) * a
        return "" if ss == expected else f"basic star twice gives {fmt(ss)}"

    out.append(_check("basic star twice = (-1)^{r(q-r)}", _first_failure(model, basic, star_star)))

    def star_definition(a: Form) -> str:
        s = basic_star(a, model)
        direct = _sign(model.p * (q - a.degree)) * hodge(wedge(a, ctx.chi), model)
        return "" if s == direct else f"{fmt(s)} vs {fmt(direct)}"

    out.append(_check("basic star = (-1)^{p(q-r)} * (a ^ chi)",
                      _first_failure(model, basic, star_definition)))
    one = Form.constant(1)
    nu = basic_star(one, model)
    out.append(_check("basic star of 1 = nu", "" if nu == ctx.nu else f"{fmt(nu)} vs {fmt(ctx.nu)}"))
    vol = volume(n)
    out.append(_check("nu ^ chi = volume", "" if wedge(ctx.nu, ctx.chi) == vol else fmt(wedge(ctx.nu, ctx.chi))))
    out.append(_check(
        "chi ^ nu = (-1)^{pq} volume",
        "" if wedge(ctx.chi, ctx.nu) == _sign(model.p * q) * vol else fmt(wedge(ctx.chi, ctx.nu)),
    ))
    dnu = delta_b(ctx.nu, model) if q > 0 else Form.zero(0)
    target = basic_star(kb, model) if q > 0 else Form.zero(0)
    out.append(_check(
        "delta_b nu = basic star of kappa_b",
        "" if q == 0 or dnu == target else f"{fmt(dnu)} vs {fmt(target)}",
    ))

    def star_delta(a: Form) -> str:
        r = a.degree
        if r == 0:
            return ""
        lhs = basic_star(delta_b(a, model), model)
        sign = _sign(q * (r + 1) + 1 + (q - r + 1) * (r - 1))
        rhs = sign * twisted_d(basic_star(a, model), kb, model)
        return "" if lhs == rhs else f"{fmt(lhs)} vs {fmt(rhs)}"

    out.append(_check("basic star delta_b = +-d_kappa_b basic star",
                      _first_failure(model, basic, star_delta)))

    def star_d(a: Form) -> str:
        r = a.degree
        if r == q:
            return ""
        lhs = basic_star(differential(a, model), model)
        rhs = _sign(r + 1) * twisted_delta(basic_star(a, model), kb, model)
        return "" if lhs == rhs else f"{fmt(lhs)} vs {fmt(rhs)}"

    out.append(_check("basic star d = (-1)^{r+1} delta_kappa_b basic star",
                      _first_failure(model, basic, star_d)))

    def intertwine(a: Form) -> str:
        s = basic_star(a, model)
        left = laplacian(s, model)
        right = basic_star(laplacian(a, model, kb), model)
        if left != right:
            return f"Delta_b(*a) = {fmt(left)}, *(Delta_kb a) = {fmt(right)}"
        left = laplacian(s, model, kb)
        right = basic_star(laplacian(a, model), model)
        if left != right:
            return f"Delta_kb(*a) = {fmt(left)}, *(Delta_b a) = {fmt(right)}"
        return ""

    out.append(_check("basic star intertwines Delta_b and Delta_kappa_b",
                      _first_failure(model, basic, intertwine)))

    def adjoint(items, d_op, delta_op) -> str:
        by_degree: dict[int, list[Form]] = {}
        for a in items:
            by_degree.setdefault(a.degree, []).append(a)
        for r, forms in sorted(by_degree.items()):
            uppers = [(b, delta_op(b)) for b in by_degree.get(r + 1, [])]
            for a in forms:
                da = d_op(a)
                for b, db in uppers:
                    lhs = pointwise_inner(da, b) if da else 0
                    rhs = pointwise_inner(a, db) if db else 0
                    if lhs != rhs:
                        return f"<d {fmt(a)}, {fmt(b)}> = {lhs} but <a, delta b> = {rhs}"
        return ""

    out.append(_check(
        "adjointness of d and delta_b on basic forms",
        adjoint(basic, lambda a: differential(a, model), lambda b: delta_b(b, model)),
        adj_severity,
    ))
    if kb:
        out.append(_check(
            "adjointness of d_kappa_b and delta_kappa_b on basic forms",
            adjoint(basic, lambda a: twisted_d(a, kb, model),
                    lambda b: twisted_delta(b, kb, model)),
            adj_severity,
        ))
    out.append(_check(
        "adjointness of d and delta on all forms",
        adjoint(every, lambda a: differential(a, model), lambda b: full_codifferential(b, model)),
        adj_severity,
    ))

    if model.p == 1:
        fq = flow_quantities(model)
        if fq.euler_lemma is not None:
            out.append(_check(
                "flow with basic kappa: d phi0 = -kappa ^ phi0 and phi0 basic",
                "" if fq.euler_lemma else fmt(differential(fq.phi0, model)),
            ))
        out.extend(flow_identity_checks(model))
    return out
