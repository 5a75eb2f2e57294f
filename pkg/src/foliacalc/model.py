"""Coframe models: manifest parsing, the invariant differential, validation.

A model is a Lie-algebra-like set of structure equations

    d e^i = sum_{j<k} c^i_{jk} e^j ^ e^k

for an orthonormal coframe, together with the subset of generators dual to
the leaves.  The dual frame satisfies [X_j, X_k] = -sum_i c^i_{jk} X_i.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .exterior import Form, MultiIndex, merge_sign, monomials, wedge

__all__ = [
    "Check",
    "CoframeModel",
    "Diagnostics",
    "ManifestError",
    "bracket_coefficient",
    "differential",
    "parse_form",
    "parse_manifest",
    "validate",
]


class ManifestError(ValueError):
    """Malformed or incompletely bound manifest."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


@dataclass(frozen=True)
class CoframeModel:
    generators: tuple[str, ...]
    structure: tuple[Form, ...]
    leafwise: tuple[int, ...] = ()
    parameters: tuple[tuple[str, Fraction], ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if len(self.structure) != len(self.generators):
            raise ValueError("one structure equation per generator is required")
        for f in self.structure:
            if f and f.degree != 2:
                raise ValueError("structure equations must be 2-forms")
        if tuple(sorted(set(self.leafwise))) != self.leafwise:
            raise ValueError("leafwise indices must be sorted and distinct")
        if any(i < 0 or i >= len(self.generators) for i in self.leafwise):
            raise ValueError("leafwise index out of range")

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def p(self) -> int:
        return len(self.leafwise)

    @property
    def q(self) -> int:
        return self.n - self.p

    @property
    def transverse(self) -> tuple[int, ...]:
        leaf = set(self.leafwise)
        return tuple(i for i in range(self.n) if i not in leaf)

    @property
    def params(self) -> dict[str, Fraction]:
        return dict(self.parameters)

    @property
    def leafwise_first_sign(self) -> int:
        """Sign of e^{leafwise} ^ e^{transverse} against the manifest orientation."""
        return merge_sign(self.leafwise, self.transverse)

    def index(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None

    def gen(self, name: str) -> Form:
        return Form.monomial([self.index(name)])

    def mono(self, *names: str) -> Form:
        return Form.monomial([self.index(x) for x in names])

    def form(self, text: str, degree: int | None = None) -> Form:
        return parse_form(text, self.generators, self.params, degree)

    def with_leafwise(self, names_or_indices) -> CoframeModel:
        idx = sorted({self.index(x) if isinstance(x, str) else int(x) for x in names_or_indices})
        return replace(self, leafwise=tuple(idx))

    def trivial(self) -> CoframeModel:
        """Same coframe with the foliation by points (full complex)."""
        return replace(self, leafwise=())

    @cached_property
    def _dcache(self) -> dict[MultiIndex, Form]:
        return {}

    def d_monomial(self, key: MultiIndex) -> Form:
        cache = self._dcache
        if key not in cache:
            out = Form.zero(len(key) + 1)
            for pos, i in enumerate(key):
                de = self.structure[i]
                if not de:
                    continue
                left = Form.monomial(key[:pos])
                right = Form.monomial(key[pos + 1:])
                term = wedge(left, de, right)
                out = out + (term if pos % 2 == 0 else -term)
            cache[key] = out
        return cache[key]

    def format_monomial(self, key: MultiIndex) -> str:
        return "^".join(self.generators[i] for i in key) if key else "1"

    def format_form(self, f: Form) -> str:
        if not f:
            return "0"
        parts = []
        for key, c in f.items():
            mono = self.format_monomial(key)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono == "1":
                body = str(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{mag} {mono}"
            parts.append((sign, body))
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def to_manifest(self) -> str:
        """Canonical manifest text; parse_manifest(to_manifest()) == self."""
        lines = []
        if self.name:
            lines.append(f"# {self.name}")
        for g in self.generators:
            lines.append(f"generator {g}")
        for name, value in self.parameters:
            lines.append(f"param {name} = {value}")
        for g, de in zip(self.generators, self.structure):
            if de:
                lines.append(f"d {g} = {self.format_form(de)}")
        if self.leafwise:
            lines.append("leafwise " + " ".join(self.generators[i] for i in self.leafwise))
        return "\n".join(lines) + "\n"


def differential(a: Form, model: CoframeModel) -> Form:
    """Invariant exterior derivative, extended from the structure equations by Leibniz."""
    out = Form.zero(a.degree + 1)
    for key, c in a.items():
        out = out + c * model.d_monomial(key)
    return out


def bracket_coefficient(model: CoframeModel, i: int, j: int, k: int) -> Fraction:
    """c^i_{jk}: coefficient of e^j ^ e^k in d e^i (antisymmetric in j, k)."""
    if j == k:
        return Fraction(0)
    if j < k:
        return model.structure[i].coeff((j, k))
    return -model.structure[i].coeff((k, j))


# ---------------------------------------------------------------------------
# manifest parsing

_NAME = r"[^\W\d]\w*"
_TOKEN = re.compile(rf"\s*(?:(?P<num>\d+)|(?P<name>{_NAME})|(?P<op>[-+*/^=]))")


def _tokenize(text: str, line: int, offset: int = 0) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = offset + pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ManifestError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), offset + m.start(kind) + 1))
        pos = m.end()
    return tokens


def _parse_expression(
    tokens: list[tuple[str, str, int]],
    generators: tuple[str, ...],
    params: Mapping[str, Fraction | None],
    line: int,
    degree: int | None,
) -> Form:
    gens = {g: i for i, g in enumerate(generators)}
    pos = 0
    total: Form | None = None

    def peek(k: int = 0):
        return tokens[pos + k] if pos + k < len(tokens) else None

    def fail(msg: str, tok=None):
        col = tok[2] if tok else (tokens[-1][2] if tokens else None)
        raise ManifestError(msg, line, col)

    def atom() -> Fraction:
        nonlocal pos
        tok = peek()
        if tok is None:
            fail("expected a number or parameter")
        kind, value, _ = tok
        pos += 1
        if kind == "num":
            return Fraction(int(value))
        if kind == "name" and value not in gens:
            bound = params.get(value)
            if bound is None:
                raise ManifestError(f"unbound parameter {value}", line, tok[2])
            return bound
        fail(f"expected a number or parameter, got {value!r}", tok)

    if not tokens:
        fail("empty expression")
    while pos < len(tokens):
        sign = 1
        tok = peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
        elif total is not None:
            fail(f"expected '+' or '-', got {tok[1]!r}", tok)
        coeff = Fraction(sign)
        saw_factor = False
        # coefficient: atoms joined by juxtaposition, '*' or '/'
        while True:
            tok = peek()
            if tok is None:
                break
            if tok[0] == "name" and tok[1] in gens:
                break
            if tok[0] == "op" and tok[1] in "+-":
                break
            if tok[0] == "op" and tok[1] in "*/":
                if not saw_factor:
                    fail(f"unexpected {tok[1]!r}", tok)
                pos += 1
                value = atom()
                if tok[1] == "/":
                    if value == 0:
                        fail("division by zero", tok)
                    coeff /= value
                else:
                    coeff *= value
                continue
            if tok[0] == "op":
                fail(f"unexpected {tok[1]!r}", tok)
            coeff *= atom()
            saw_factor = True
        # monomial: generator names joined by '^'
        indices: list[int] = []
        tok = peek()
        if tok is not None and tok[0] == "name" and tok[1] in gens:
            indices.append(gens[tok[1]])
            pos += 1
            while peek() is not None and peek()[0] == "op" and peek()[1] == "^":
                pos += 1
                tok = peek()
                if tok is None or tok[0] != "name":
                    fail("expected a generator after '^'", tok)
                if tok[1] not in gens:
                    raise ManifestError(f"undeclared generator {tok[1]!r} in wedge monomial", line, tok[2])
                indices.append(gens[tok[1]])
                pos += 1
        elif not saw_factor:
            fail("expected a term", tok)
        elif tok is not None and tok[0] == "op" and tok[1] == "^":
            fail("wedge monomial starts with a non-generator", tok)
        term = Form.monomial(indices, coeff)
        if degree is not None and len(indices) != degree and coeff != 0:
            fail(f"term has degree {len(indices)}, expected {degree}", tokens[min(pos, len(tokens)) - 1])
        total = term if total is None else total + term
    assert total is not None
    if degree is not None and total.is_zero():
        return Form.zero(degree)
    return total


def parse_form(
    text: str,
    generators: tuple[str, ...],
    params: Mapping[str, Fraction] | None = None,
    degree: int | None = None,
) -> Form:
    """Parse ``"2 xi^zeta - k/2 beta^zeta"`` into a Form."""
    return _parse_expression(_tokenize(text, 1), tuple(generators), dict(params or {}), 1, degree)


def _parse_rational(text: str, line: int, col: int) -> Fraction:
    m = re.fullmatch(r"\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*", text)
    if not m:
        raise ManifestError(f"expected a rational, got {text.strip()!r}", line, col)
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise ManifestError("zero denominator", line, col)
    return Fraction(int(m.group(1)), den)


def parse_manifest(
    text: str,
    overrides: Mapping[str, object] | None = None,
    name: str = "",
) -> CoframeModel:
    """Parse manifest text into a fully bound CoframeModel.

    ``overrides`` rebinds (or binds free) parameters.
    """
    generators: list[str] = []
    params: dict[str, Fraction | None] = {}
    d_lines: list[tuple[int, int, str, str]] = []
    leaf_lines: list[tuple[int, int, list[tuple[str, int]]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        stripped = body.strip()
        if not stripped:
            continue
        indent = len(body) - len(body.lstrip())
        keyword, _, rest = stripped.partition(" ")
        rest_col = indent + len(keyword) + 2
        rest = rest.strip()
        if keyword == "generator":
            if not re.fullmatch(_NAME, rest):
                raise ManifestError(f"bad generator name {rest!r}", lineno, rest_col)
            if rest in generators:
                raise ManifestError(f"duplicate generator name {rest}", lineno, rest_col)
            generators.append(rest)
        elif keyword == "param":
            pname, eq, value = rest.partition("=")
            pname = pname.strip()
            if not re.fullmatch(_NAME, pname):
                raise ManifestError(f"bad parameter name {pname!r}", lineno, rest_col)
            if pname in params:
                raise ManifestError(f"duplicate parameter {pname}", lineno, rest_col)
            params[pname] = _parse_rational(value, lineno, rest_col) if eq else None
        elif keyword == "d":
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise ManifestError("expected 'd <name> = <terms>'", lineno, rest_col)
            d_lines.append((lineno, body.index("=") + 1, lhs.strip(), rhs))
        elif keyword == "leafwise":
            names = []
            for m in re.finditer(r"\S+", rest):
                names.append((m.group(), rest_col + m.start()))
            leaf_lines.append((lineno, rest_col, names))
        else:
            raise ManifestError(f"unknown keyword {keyword!r}", lineno, indent + 1)

    if not generators:
        raise ManifestError("manifest declares no generators")
    for pname in params:
        if pname in generators:
            raise ManifestError(f"parameter {pname} shadows a generator")
    for key, value in (overrides or {}).items():
        if key in generators:
            raise ManifestError(f"parameter override {key} shadows a generator")
        params[key] = Fraction(value)

    gens = tuple(generators)
    structure: list[Form] = [Form.zero(2) for _ in gens]
    seen: set[str] = set()
    for lineno, col, lhs, rhs in d_lines:
        if lhs not in gens:
            raise ManifestError(f"d of undeclared generator {lhs!r}", lineno)
        if lhs in seen:
            raise ManifestError(f"duplicate equation for d {lhs}", lineno)
        seen.add(lhs)
        tokens = _tokenize(rhs, lineno, col)
        structure[gens.index(lhs)] = _parse_expression(tokens, gens, params, lineno, 2)

    leafwise: set[int] = set()
    if len(leaf_lines) > 1:
        raise ManifestError("more than one leafwise line", leaf_lines[1][0])
    for lineno, _, names in leaf_lines:
        for leaf, col in names:
            if leaf not in gens:
                raise ManifestError(f"leafwise name {leaf!r} is not a generator", lineno, col)
            leafwise.add(gens.index(leaf))

    unbound = [k for k, v in params.items() if v is None]
    if unbound:
        raise ManifestError(f"unbound parameter {unbound[0]}")
    bound = tuple(sorted((k, v) for k, v in params.items() if v is not None))
    return CoframeModel(gens, tuple(structure), tuple(sorted(leafwise)), bound, name=name)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    witness: str = ""
    severity: str = "error"  # "error" or "warning"


@dataclass(frozen=True)
class Diagnostics:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks if c.severity == "error")

    def __iter__(self):
        return iter(self.checks)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def validate(model: CoframeModel) -> Diagnostics:
    """Cochain, involutivity, bundle-like and unimodularity checks."""
    checks: list[Check] = []
    n = model.n
    leaf = set(model.leafwise)

    bad = [(i, differential(model.structure[i], model)) for i in range(n)]
    bad = [(i, dd) for i, dd in bad if dd]
    checks.append(Check(
        "d^2 = 0",
        not bad,
        f"d(d {model.generators[bad[0][0]]}) = {model.format_form(bad[0][1])}" if bad else "",
    ))

    witness = ""
    for i in model.transverse:
        for (j, k), c in model.structure[i].items():
            if j in leaf and k in leaf:
                witness = (f"d {model.generators[i]} has leafwise component "
                           f"{c} {model.format_monomial((j, k))}")
                break
        if witness:
            break
    checks.append(Check("leafwise distribution involutive", not witness, witness))

    # <[X_a, V], X_b> + <X_a, [X_b, V]> = -(c^b_{av} + c^a_{bv})
    witness = ""
    for v in model.leafwise:
        for a in model.transverse:
            for b in model.transverse:
                if b < a:
                    continue
                val = bracket_coefficient(model, b, a, v) + bracket_coefficient(model, a, b, v)
                if val:
                    g = model.generators
                    witness = (f"V={g[v]}, X={g[a]}, Y={g[b]}: "
                               f"<[X,V],Y> + <X,[Y,V]> = {-val}")
                    break
            if witness:
                break
        if witness:
            break
    checks.append(Check("bundle-like (Riemannian foliation)", not witness, witness))

    # tr ad_{X_j} = sum_k coefficient of X_k in [X_j, X_k] = -sum_k c^k_{jk}
    witness = ""
    for j in range(n):
        tr = -sum((bracket_coefficient(model, k, j, k) for k in range(n)), Fraction(0))
        if tr:
            witness = f"tr ad({model.generators[j]}) = {tr}"
            break
    checks.append(Check("unimodular", not witness, witness, severity="warning"))
    return Diagnostics(tuple(checks))


def all_monomial_forms(model: CoframeModel, r: int) -> list[Form]:
    return [Form(r, {key: 1}) for key in monomials(model.n, r)]
