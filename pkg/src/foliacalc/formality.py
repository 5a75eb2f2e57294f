"""Transverse and geometric formality, and the implications that depend on them.

Formality is a closure property of harmonic spaces under products, so it is
decided on basis pairs: the Laplacian kernels are linear and the products
bilinear.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .cohomology import (
    CochainComplex,
    TheoremCheck,
    class_coordinates,
    cohomology,
    gysin_flow_report,
    implication,
)
from .exterior import Form, contract, pointwise_inner, wedge
from .foliation import flow_quantities, foliation_context, full_codifferential, is_basic
from .model import Check, CoframeModel, differential

__all__ = [
    "FormalityReport",
    "PairWitness",
    "geometric_formality",
    "theorem_diagnostics",
    "transverse_formality",
]


@dataclass(frozen=True)
class PairWitness:
    left: Form
    right: Form
    reason: str


@dataclass(frozen=True)
class ClosureTest:
    """Outcome of testing one product over all basis pairs."""

    name: str
    pairs: int
    failures: int
    witness: PairWitness | None

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass(frozen=True)
class FormalityReport:
    kind: str  # "transverse" or "geometric"
    model: CoframeModel
    wedge: ClosureTest
    interior: tuple[ClosureTest, ...]
    per_degree: tuple[tuple[int, bool], ...]
    inner_products: tuple[tuple[int, tuple[tuple[Fraction, ...], ...], tuple[tuple[Fraction, ...], ...]], ...]
    checks: tuple[Check, ...]

    @property
    def formal(self) -> bool:
        return self.wedge.passed

    @property
    def interior_formal(self) -> bool:
        return all(t.passed for t in self.interior)

    def r_formal(self, r: int) -> bool:
        return dict(self.per_degree).get(r, True)


def _flatten(groups) -> list[Form]:
    return [f for group in groups for f in group]


def _closure(name: str, lefts, rights, product, target: CochainComplex, ordered: bool) -> ClosureTest:
    pairs = failures = 0
    witness = None
    model = target.model
    for a in lefts:
        for b in rights:
            if ordered and a.degree > b.degree:
                continue
            pairs += 1
            x = product(a, b)
            if not x:
                continue
            if x.degree > target.top:
                continue
            reason = ""
            if target.variant == "basic" and not is_basic(x, model):
                reason = "product is not basic"
            elif target.laplacian(x):
                reason = f"Laplacian of {model.format_form(x)} is {model.format_form(target.laplacian(x))}"
            if reason:
                failures += 1
                if witness is None:
                    witness = PairWitness(a, b, reason)
    return ClosureTest(name, pairs, failures, witness)


def _gram(forms) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(pointwise_inner(a, b) for b in forms) for a in forms)


def transverse_formality(model: CoframeModel) -> FormalityReport:
    return _formality(model, "transverse")


def geometric_formality(model: CoframeModel) -> FormalityReport:
    """Formality of the whole invariant complex (leafwise split ignored)."""
    return _formality(model.trivial(), "geometric")


def _formality(model: CoframeModel, kind: str) -> FormalityReport:
    ctx = foliation_context(model)
    q = model.q
    harmonic = cohomology(model, "basic")
    twisted = cohomology(model, "basic", ctx.kappa_b)
    plain_cx = CochainComplex(model, "basic", Form.zero(1))
    twisted_cx = CochainComplex(model, "basic", ctx.kappa_b)
    H = _flatten(harmonic.generators)
    K = _flatten(twisted.generators)

    wedge_test = _closure("wedge H x K", H, K, wedge, twisted_cx, ordered=False)
    interior = (
        _closure("interior H x H", H, H, contract, plain_cx, ordered=True),
        # contraction of two kappa_b-harmonic forms lands in the untwisted harmonics
        _closure("interior K x K", K, K, contract, plain_cx, ordered=True),
    )
    per_degree = []
    grams = []
    for r in range(q + 1):
        hr = harmonic.generators_in(r)
        kr = twisted.generators_in(q - r)
        test = _closure(f"wedge H^{r} x K^{q - r}", hr, kr, wedge, twisted_cx, ordered=False)
        per_degree.append((r, test.passed))
        grams.append((r, _gram(hr), _gram(kr)))

    checks = []
    agree = wedge_test.passed == all(t.passed for t in interior)
    checks.append(Check(
        "wedge and interior formality verdicts agree",
        agree,
        "" if agree else f"wedge {wedge_test.passed}, interior {[t.passed for t in interior]}",
    ))
    if wedge_test.passed:
        bad = [r for r in range(q + 1) if harmonic.dim(r) > comb(q, r)]
        checks.append(Check(
            "formal: dim H^r <= C(q, r) in every degree",
            not bad,
            "" if not bad else f"degrees {bad}",
        ))
    return FormalityReport(
        kind, model, wedge_test, interior, tuple(per_degree), tuple(grams), tuple(checks),
    )


# ---------------------------------------------------------------------------
# theorem diagnostics


def theorem_diagnostics(model: CoframeModel, report: FormalityReport | None = None) -> list[TheoremCheck]:
    """Evaluate each implication on the model; a true hypothesis with a false
    conclusion is reported as FALSIFIED."""
    ctx = foliation_context(model)
    report = report or transverse_formality(model)
    q = model.q
    H = cohomology(model, "basic")
    formal = report.formal
    kb = ctx.kappa_b
    taut = H.dim(q) > 0
    plain_cx = CochainComplex(model, "basic", Form.zero(1))
    kappa_harmonic = ctx.kappa_is_basic and not plain_cx.laplacian(ctx.kappa)
    out: list[TheoremCheck] = []

    kb_class = class_coordinates(H, kb) if kb else []
    kb_exact = kb_class is not None and not any(kb_class)
    out.append(implication(
        "taut (H^q != 0) exactly when [kappa_b] = 0",
        True,
        taut == kb_exact,
        f"dim H^q = {H.dim(q)}, kappa_b = {model.format_form(kb)}",
    ))
    out.append(implication(
        "taut and transversely formal: kappa_b = 0",
        taut and formal,
        not kb,
        f"kappa_b = {model.format_form(kb)}",
    ))
    for r in range(q + 1):
        out.append(implication(
            f"transversely {r}-formal: dim H^{r} <= C({q}, {r})",
            report.r_formal(r),
            H.dim(r) <= comb(q, r),
            f"dim H^{r} = {H.dim(r)}",
        ))
    maximal = [r for r in range(1, q + 1) if H.dim(r) == comb(q, r)]
    out.append(implication(
        "formal, basic harmonic kappa, dim H^r = C(q, r) for some 0 < r <= q: minimal",
        formal and kappa_harmonic and bool(maximal),
        not ctx.kappa,
        f"maximal degrees {maximal}",
    ))
    out.append(implication(
        "formal, basic harmonic kappa, nontaut: 1 <= dim H^1 <= q - 1",
        formal and kappa_harmonic and not taut,
        1 <= H.dim(1) <= q - 1,
        f"dim H^1 = {H.dim(1)}, q = {q}",
    ))
    out.append(implication(
        "taut and transversely formal: dim H^1 != q - 1",
        taut and formal and q >= 1,
        H.dim(1) != q - 1,
        f"dim H^1 = {H.dim(1)}, q = {q}",
    ))
    if taut and formal:
        gens = _flatten(H.generators)
        closed = _closure("wedge H x H", gens, gens, wedge, plain_cx, ordered=False)
        out.append(implication(
            "taut and transversely formal: wedge of basic harmonic forms is basic harmonic",
            True, closed.passed,
            "" if closed.passed else _describe(model, closed.witness),
        ))
    else:
        out.append(implication(
            "taut and transversely formal: wedge of basic harmonic forms is basic harmonic",
            False, True,
        ))
    ones = H.generators_in(1)
    full_harmonic = all(
        not differential(h, model) and not full_codifferential(h, model) for h in ones
    )
    out.append(implication(
        "basic mean curvature: basic harmonic 1-forms are harmonic",
        ctx.kappa_is_basic,
        full_harmonic,
    ))
    if model.p == 1 and ctx.kappa_is_basic:
        out.extend(gysin_flow_report(model).statements)
        out.extend(_minimal_flow_statements(model, report, H))
    return out


def _minimal_flow_statements(model: CoframeModel, report: FormalityReport, H) -> list[TheoremCheck]:
    ctx = foliation_context(model)
    lam = flow_quantities(model).lam
    full = cohomology(model, "full")
    q = model.q
    base = not ctx.kappa and lam > 0 and report.formal
    out = []
    for r in range(q + 1):
        hyp = base and H.dim(r) == 0
        gens = H.generators_in(r + 2)
        harmonic = all(
            not differential(a, model) and not full_codifferential(a, model) for a in gens
        )
        out.append(implication(
            f"minimal formal flow with H^{r}(F) = 0 (Ric(xi) = lambda xi assumed, lambda = {lam}): "
            f"basic harmonic {r + 2}-forms are harmonic",
            hyp, harmonic,
        ))
        out.append(implication(
            f"minimal formal flow with H^{r}(F) = 0 and H^1(F) != 0: "
            f"dim H^{r + 1}(M) <= dim H^{r + 1}(F) <= dim H^{r + 2}(M)",
            hyp and H.dim(1) >= 1,
            full.dim(r + 1) <= H.dim(r + 1) <= full.dim(r + 2),
            f"{full.dim(r + 1)} <= {H.dim(r + 1)} <= {full.dim(r + 2)}",
        ))
    return out


def _describe(model: CoframeModel, w: PairWitness | None) -> str:
    if w is None:
        return ""
    return f"({model.format_form(w.left)}, {model.format_form(w.right)}): {w.reason}"
