from __future__ import annotations

from fractions import Fraction

import pytest
import sympy

import oracles
from conftest import FLOWS, bound_models, case_id, load
from foliacalc.cohomology import (
    CochainComplex,
    class_coordinates,
    cohomology,
    duality_check,
    gysin_flow_report,
    implication,
)
from foliacalc.exterior import Form, contract
from foliacalc.foliation import NotBasicError, foliation_context
from foliacalc.model import differential, parse_manifest


def span_equal(forms_a, forms_b) -> bool:
    """Same linear span (independent check through sympy ranks)."""
    keys = sorted({k for f in list(forms_a) + list(forms_b) for k in f.terms})
    if not keys:
        return len(forms_a) == len(forms_b) == 0

    def mat(fs):
        return sympy.Matrix([[sympy.Rational(str(f.coeff(k))) for k in keys] for f in fs])

    a, b = mat(forms_a), mat(forms_b)
    ra = a.rank() if forms_a else 0
    rb = b.rank() if forms_b else 0
    both = sympy.Matrix.vstack(a, b).rank() if forms_a and forms_b else max(ra, rb)
    return ra == rb == both


def names(model, *monos):
    return [model.mono(*m.split("^")) for m in monos]


# --- worked examples ------------------------------------------------------


@pytest.mark.parametrize("r", [1, Fraction(2, 5)])
def test_hopf_basic_cohomology(r):
    h = load("hopf", r=r)
    rep = cohomology(h)
    assert rep.dims == (1, 0, 1)
    assert span_equal(rep.generators_in(2), [foliation_context(h).euler])
    assert cohomology(h, "full").dims == (1, 0, 0, 1)


def test_carriere_cohomology():
    c = load("carriere", k=Fraction(3, 2))
    kb = foliation_context(c).kappa_b
    assert kb == Fraction(3, 2) * c.gen("zeta")
    assert cohomology(c).dims == (1, 1, 0)
    tw = cohomology(c, "basic", kb)
    assert tw.dims == (0, 1, 1)
    assert span_equal(tw.generators_in(1), [c.gen("mu")])
    assert span_equal(tw.generators_in(2), names(c, "mu^zeta"))
    full = cohomology(c, "full")
    assert full.dims == (1, 1, 1, 1)
    for r, gens in enumerate([[Form.constant(1)], [c.gen("zeta")], names(c, "chi^mu"), names(c, "chi^mu^zeta")]):
        assert span_equal(full.generators_in(r), gens)


def test_solvmanifold_foliations():
    flow = load("solv-flow")
    assert cohomology(flow).dims == (1, 1, 1, 1)
    assert span_equal(cohomology(flow).generators_in(2), names(flow, "alpha^beta"))
    codim2 = load("solv-codim2", k=Fraction(7, 3))
    kb = foliation_context(codim2).kappa_b
    assert kb == Fraction(7, 3) * codim2.gen("gamma")
    assert cohomology(codim2).dims == (1, 1, 0)
    tw = cohomology(codim2, "basic", kb)
    assert tw.dims == (0, 1, 1)
    assert span_equal(tw.generators_in(1), [codim2.gen("alpha")])
    assert span_equal(tw.generators_in(2), [-codim2.mono("alpha", "gamma")])
    assert cohomology(load("solv-codim3")).dims == (1, 1)
    full = cohomology(flow, "full")
    assert full.dims[:3] == (1, 1, 0)
    assert span_equal(full.generators_in(1), [flow.gen("gamma")])


APPENDIX_CASES = {
    "generic": ({"k1": 1, "k2": 2}, (1, 1, 1, 1, 0), (0, 1, 1, 1, 1), ["xi^upsilon"], ["beta"]),
    "k1=k2": ({"k1": 1, "k2": 1}, (1, 1, 2, 2, 0), (0, 2, 2, 1, 1), ["xi^upsilon", "xi^beta"], ["upsilon", "beta"]),
    "k1=-k2": ({"k1": 1, "k2": -1}, (1, 1, 2, 2, 0), (0, 2, 2, 1, 1), ["xi^upsilon", "upsilon^beta"], ["xi", "beta"]),
}


@pytest.mark.parametrize("label", APPENDIX_CASES)
def test_appendix_cohomology(label):
    binding, basic, twisted, h2, k1 = APPENDIX_CASES[label]
    ap = load("appendix", **binding)
    kb = foliation_context(ap).kappa_b
    rep = cohomology(ap)
    tw = cohomology(ap, "basic", kb)
    assert rep.dims == basic
    assert tw.dims == twisted
    assert span_equal(rep.generators_in(1), [ap.gen("zeta")])
    assert span_equal(rep.generators_in(2), names(ap, *h2))
    assert span_equal(tw.generators_in(1), names(ap, *k1))
    assert span_equal(tw.generators_in(3), names(ap, "xi^upsilon^beta"))


def test_appendix_full_cohomology_generic():
    ap = load("appendix", k1=1, k2=2)
    full = cohomology(ap, "full")
    assert full.dims[1:3] == (1, 0)
    assert span_equal(full.generators_in(1), [ap.gen("zeta")])
    assert full.dims[3] >= 2
    assert full.dims == (1, 1, 0, 2, 2, 0, 1, 1)


@pytest.mark.parametrize("k2, extra", [(1, ["xi^beta", "upsilon^alpha"]), (-1, ["xi^alpha", "upsilon^beta"])])
def test_appendix_full_cohomology_degenerate(k2, extra):
    # with k1 = +-k2 two more invariant 2-forms become closed without being exact
    ap = load("appendix", k1=1, k2=k2)
    full = cohomology(ap, "full")
    assert full.dims == (1, 1, 2, 8, 8, 2, 1, 1)
    assert span_equal(full.generators_in(2), names(ap, *extra))


def test_appendix_scaled_binding_matches_unit_binding():
    a = cohomology(load("appendix", k1=Fraction(5, 3), k2=Fraction(5, 3), n1=-2, n2=Fraction(1, 4)))
    assert a.dims == (1, 1, 2, 2, 0)


def test_torus_binomial_dims():
    t = load("torus")
    assert cohomology(t).dims == (1, 3, 3, 1)
    assert cohomology(t, "full").dims == (1, 3, 3, 1)


def test_basic_twist_must_be_basic_and_closed():
    torus = parse_manifest("generator e1\ngenerator e2\nleafwise e1\n")
    with pytest.raises(NotBasicError):
        cohomology(torus, "basic", torus.gen("e1"))
    assert cohomology(torus, "full", torus.gen("e1")).dims == (0, 0, 0)
    with pytest.raises(ValueError):
        cohomology(load("carriere"), "full", load("carriere").gen("chi"))


# --- independent oracle ---------------------------------------------------


def _twists(model):
    kb = foliation_context(model).kappa_b
    out = [Form.zero(1)]
    if kb:
        out += [kb, -kb, Fraction(1, 2) * kb]
    return out


@pytest.mark.parametrize("case", bound_models(), ids=case_id)
def test_dims_match_sympy_chevalley_eilenberg_oracle(case):
    name, binding = case
    model = load(name, **binding)
    oracle = oracles.LieOracle.from_model(model)
    for omega in _twists(model):
        w = dict(omega.terms)
        for variant in ("basic", "full"):
            rep = cohomology(model, variant, omega)
            assert rep.dims == oracle.cohomology_dims(variant == "basic", w), (variant, omega)


@pytest.mark.parametrize("case", bound_models(), ids=case_id)
def test_rank_nullity_agrees_with_laplacian_kernels(case):
    name, binding = case
    model = load(name, **binding)
    for omega in _twists(model):
        for variant in ("basic", "full"):
            rep = cohomology(model, variant, omega)
            assert rep.dims == rep.laplacian_dims
            assert rep.ok


@pytest.mark.parametrize("case", bound_models(1), ids=case_id)
def test_generators_are_closed_harmonic_and_independent(case):
    name, binding = case
    model = load(name, **binding)
    for omega in _twists(model):
        for variant in ("basic", "full"):
            cx = CochainComplex(model, variant, omega)
            rep = cohomology(model, variant, omega)
            for r in range(cx.top + 1):
                gens = rep.generators_in(r)
                assert len(gens) == rep.dims[r]
                for g in gens:
                    assert not cx.d(g)
                    assert not cx.delta(g)
                    assert not cx.laplacian(g)


def test_class_coordinates():
    h = load("hopf")
    rep = cohomology(h)
    assert class_coordinates(rep, foliation_context(h).euler) == [2]
    s = load("solv-flow", nl=Fraction(3, 4))
    rep = cohomology(s)
    assert class_coordinates(rep, Fraction(3, 4) * s.mono("alpha", "beta")) == [Fraction(3, 4)]
    # exact forms have zero class, non-closed forms have none
    exact = differential(s.gen("alpha"), s)
    assert not any(class_coordinates(rep, exact))
    assert class_coordinates(rep, s.gen("alpha")) is None


# --- duality --------------------------------------------------------------


def test_carriere_duality():
    rows = duality_check(load("carriere")).rows
    assert [(r.degree, r.dim, r.dual_dim) for r in rows] == [(0, 1, 1), (1, 1, 1), (2, 0, 0)]
    assert all(r.ok for r in rows)
    assert all(len(r.pairing) == 1 and r.pairing[0][0] != 0 for r in rows[:2])


def test_appendix_duality_reverses_dims():
    ap = load("appendix")
    report = duality_check(ap)
    assert [r.dim for r in report.rows] == [1, 1, 1, 1, 0]
    assert [r.dual_dim for r in report.rows] == [1, 1, 1, 1, 0]
    assert report.ok


def test_torus_self_duality():
    report = duality_check(load("torus"))
    assert [r.dim for r in report.rows] == [1, 3, 3, 1]
    assert report.ok


@pytest.mark.parametrize("case", bound_models(), ids=case_id)
def test_duality_everywhere(case):
    name, binding = case
    model = load(name, **binding)
    report = duality_check(model)
    assert report.ok
    q = model.q
    plain = cohomology(model)
    twisted = cohomology(model, "basic", foliation_context(model).kappa_b)
    for r in range(q + 1):
        assert plain.dims[r] == twisted.dims[q - r]
        pairing = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in report.rows[r].pairing])
        assert pairing.shape[0] == 0 or pairing.det() != 0


# --- Gysin sequence -------------------------------------------------------


def test_hopf_gysin():
    g = gysin_flow_report(load("hopf"))
    assert g.euler_class_nonzero
    assert g.basic_dims[1] == 0 and g.full_twisted_dims[1] == 0
    assert g.exact and g.ok


def test_carriere_gysin():
    g = gysin_flow_report(load("carriere"))
    assert not g.euler_class_nonzero
    assert g.full_twisted_dims == (0, 1, 1, 0)
    assert g.exact and g.ok


def test_solv_flow_gysin():
    s = load("solv-flow", nl=Fraction(-3, 2))
    g = gysin_flow_report(s)
    assert g.euler_class_nonzero
    assert class_coordinates(cohomology(s), foliation_context(s).euler) == [Fraction(-3, 2)]
    assert g.exact and g.ok


@pytest.mark.parametrize("case", [c for c in bound_models() if c[0] in FLOWS], ids=case_id)
def test_gysin_exact_on_flows(case):
    name, binding = case
    model = load(name, **binding)
    g = gysin_flow_report(model)
    assert g.exact
    assert all(c.passed for c in g.checks), [c for c in g.checks if not c.passed]
    assert not any(s.falsified for s in g.statements)
    oracle = oracles.LieOracle.from_model(model)
    minus = {k: -v for k, v in foliation_context(model).kappa.terms.items()}
    assert g.full_twisted_dims == oracle.cohomology_dims(False, minus)
    assert g.basic_twisted_dims == oracle.cohomology_dims(True, minus)


def test_gysin_requires_flow():
    with pytest.raises(ValueError):
        gysin_flow_report(load("appendix"))


def test_euler_form_has_no_leafwise_component_on_flows():
    for name in FLOWS:
        model = load(name)
        ctx = foliation_context(model)
        if ctx.euler:
            assert not contract(ctx.chi, ctx.euler)


def test_implication_statuses():
    assert implication("x", False, False).status == "vacuous"
    assert implication("x", True, True).status == "holds"
    assert implication("x", True, False).falsified
