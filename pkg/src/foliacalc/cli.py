"""Command-line front end.

    foliacalc run --input hopf.fol --analyses cohomology,formality
    foliacalc run --input appendix --param k2=1 --format structured

Exit status: 0 when every check passes, 1 when a mathematical check fails
(the report carries the witness), 2 on input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .cohomology import CohomologyReport, TheoremCheck, cohomology, duality_check, gysin_flow_report
from .exterior import Form
from .foliation import NotBasicError, flow_identity_checks, flow_quantities, foliation_context
from .formality import FormalityReport, geometric_formality, theorem_diagnostics, transverse_formality
from .identities import check_identities
from .model import Check, CoframeModel, ManifestError, differential, parse_form, parse_manifest, validate

ANALYSES = (
    "validate",
    "cohomology",
    "twisted-cohomology",
    "formality",
    "geometric-formality",
    "flow",
    "gysin",
    "diagnostics",
    "check-identities",
)
DEFAULT_ANALYSES = ("validate", "cohomology")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    input: str
    analyses: tuple[str, ...] = DEFAULT_ANALYSES
    twist: str | None = None
    format: str = "text"
    params: dict[str, str] = field(default_factory=dict)
    degree: int | None = None


# ---------------------------------------------------------------------------
# serialization helpers: every number leaves as an int or an exact rational string


def rational(x: Fraction | int) -> str:
    return str(Fraction(x))


def form_json(model: CoframeModel, f: Form) -> dict[str, Any]:
    return {
        "degree": f.degree,
        "text": model.format_form(f),
        "terms": [[model.format_monomial(k), rational(c)] for k, c in f.items()],
    }


def check_json(c: Check) -> dict[str, Any]:
    return {"name": c.name, "passed": c.passed, "severity": c.severity, "witness": c.witness}


def statement_json(s: TheoremCheck) -> dict[str, Any]:
    return {"name": s.name, "status": s.status, "detail": s.detail}


def matrix_json(m) -> list[list[str]]:
    return [[rational(x) for x in row] for row in m]


def cohomology_json(rep: CohomologyReport, degree: int | None) -> dict[str, Any]:
    m = rep.model
    rows = []
    for r in range(len(rep.dims)):
        if degree is not None and r != degree:
            continue
        rows.append({
            "degree": r,
            "dim": rep.dims[r],
            "laplacian_dim": rep.laplacian_dims[r],
            "generators": [form_json(m, g) for g in rep.generators[r]],
            "kernel_basis": [form_json(m, g) for g in rep.kernel_bases[r]],
            "image_basis": [form_json(m, g) for g in rep.image_bases[r]],
        })
    out = {
        "variant": rep.variant,
        "twist": form_json(m, rep.twist),
        "degrees": rows,
        "crosschecks": [check_json(c) for c in rep.crosschecks],
    }
    if degree is None:
        out["dims"] = list(rep.dims)
    return out


def formality_json(rep: FormalityReport) -> dict[str, Any]:
    m = rep.model

    def closure(t):
        w = t.witness
        return {
            "name": t.name,
            "pairs": t.pairs,
            "failures": t.failures,
            "passed": t.passed,
            "witness": None if w is None else {
                "left": form_json(m, w.left), "right": form_json(m, w.right), "reason": w.reason,
            },
        }

    return {
        "kind": rep.kind,
        "formal": rep.formal,
        "wedge": closure(rep.wedge),
        "interior": [closure(t) for t in rep.interior],
        "per_degree": [{"degree": r, "formal": ok} for r, ok in rep.per_degree],
        "inner_products": [
            {"degree": r, "harmonic_gram": matrix_json(h), "twisted_gram": matrix_json(k)}
            for r, h, k in rep.inner_products
        ],
        "inner_products_note": "constant by construction on invariant complexes",
        "checks": [check_json(c) for c in rep.checks],
    }


# ---------------------------------------------------------------------------
# running


def load_manifest_text(source: str) -> tuple[str, str]:
    path = Path(source)
    if path.is_file():
        return path.read_text(encoding="utf-8"), path.stem
    name = path.name[:-4] if path.name.endswith(".fol") else path.name
    bundled = resources.files("foliacalc").joinpath("manifests", f"{name}.fol")
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8"), name
    raise UsageError(f"cannot read input {source!r}")


def bundled_manifests() -> list[str]:
    folder = resources.files("foliacalc").joinpath("manifests")
    return sorted(p.name[:-4] for p in folder.iterdir() if p.name.endswith(".fol"))


def resolve_twist(model: CoframeModel, text: str | None) -> Form:
    kb = foliation_context(model).kappa_b
    if text is None:
        return kb
    try:
        return Fraction(text.strip()) * kb
    except (ValueError, ZeroDivisionError):
        pass
    try:
        omega = parse_form(text, model.generators, model.params, 1)
    except ManifestError as exc:
        raise UsageError(f"bad twist {text!r}: {exc}") from None
    if differential(omega, model):
        raise UsageError(f"twist {model.format_form(omega)} is not closed")
    return omega


def run(config: RunConfig) -> tuple[int, dict[str, Any]]:
    """Execute the analyses; returns (exit code, report document)."""
    unknown = [a for a in config.analyses if a not in ANALYSES]
    if unknown:
        raise UsageError(f"unknown analysis {', '.join(unknown)}")
    if not config.analyses:
        raise UsageError("no analysis selected")
    text, name = load_manifest_text(config.input)
    overrides = {}
    for key, value in config.params.items():
        try:
            overrides[key] = Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"parameter {key} needs a rational value, got {value!r}") from None
    try:
        model = parse_manifest(text, overrides, name=name)
    except ManifestError as exc:
        raise UsageError(str(exc)) from None
    if config.degree is not None and not 0 <= config.degree <= model.n:
        raise UsageError(f"degree {config.degree} outside 0..{model.n}")

    doc: dict[str, Any] = {
        "model": {
            "name": name,
            "generators": list(model.generators),
            "leafwise": [model.generators[i] for i in model.leafwise],
            "n": model.n,
            "p": model.p,
            "q": model.q,
            "parameters": {k: rational(v) for k, v in model.parameters},
        },
        "analyses": list(config.analyses),
    }
    failures: list[str] = []

    def record(checks, section: str) -> None:
        for c in checks:
            if isinstance(c, TheoremCheck):
                if c.falsified:
                    failures.append(f"{section}: {c.name}")
            elif not c.passed and c.severity == "error":
                failures.append(f"{section}: {c.name}")

    diag = validate(model)
    valid = diag.ok
    selected = set(config.analyses)
    if "validate" in selected or not valid:
        doc["validate"] = {"checks": [check_json(c) for c in diag]}
        record(diag, "validate")
    if "check-identities" in selected:
        checks = check_identities(model)
        doc["identities"] = [check_json(c) for c in checks]
        record(checks, "identities")

    skipped = sorted(selected - {"validate", "check-identities"})
    if not valid and skipped:
        doc["skipped"] = {"analyses": skipped, "reason": "model failed validation"}
        return _finish(doc, failures)

    ctx = foliation_context(model)
    deg = config.degree
    if "cohomology" in selected:
        basic = cohomology(model, "basic")
        full = cohomology(model, "full")
        dual = duality_check(model)
        doc["cohomology"] = {
            "basic": cohomology_json(basic, deg),
            "full": cohomology_json(full, deg),
            "kappa_b": form_json(model, ctx.kappa_b),
            "duality": [
                {
                    "degree": row.degree,
                    "dim": row.dim,
                    "dual_dim": row.dual_dim,
                    "pairing": matrix_json(row.pairing),
                    "nonsingular": row.nonsingular,
                    "star_matches": row.star_matches,
                }
                for row in dual.rows
                if deg is None or row.degree == deg
            ],
        }
        record(basic.crosschecks, "cohomology basic")
        record(full.crosschecks, "cohomology full")
        record(dual.checks(), "duality")
    if "twisted-cohomology" in selected:
        omega = resolve_twist(model, config.twist)
        section: dict[str, Any] = {"twist": form_json(model, omega)}
        try:
            rep = cohomology(model, "basic", omega)
            section["basic"] = cohomology_json(rep, deg)
            record(rep.crosschecks, "twisted cohomology basic")
        except NotBasicError as exc:
            section["basic"] = {"skipped": str(exc)}
        rep = cohomology(model, "full", omega)
        section["full"] = cohomology_json(rep, deg)
        record(rep.crosschecks, "twisted cohomology full")
        doc["twisted_cohomology"] = section
    transverse = None
    if "formality" in selected or "diagnostics" in selected:
        transverse = transverse_formality(model)
    if "formality" in selected:
        doc["formality"] = formality_json(transverse)
        record(transverse.checks, "formality")
    if "geometric-formality" in selected:
        geo = geometric_formality(model)
        doc["geometric_formality"] = formality_json(geo)
        record(geo.checks, "geometric formality")
    if "flow" in selected:
        if model.p != 1:
            raise UsageError(f"flow-only operation (leaf dimension is {model.p})")
        fq = flow_quantities(model)
        checks = flow_identity_checks(model)
        if fq.euler_lemma is not None:
            checks.insert(0, Check("d phi0 = -kappa ^ phi0 and phi0 basic", fq.euler_lemma))
        doc["flow"] = {
            "xi_flat": form_json(model, fq.xi_flat),
            "phi0": form_json(model, fq.phi0),
            "kappa": form_json(model, fq.kappa),
            "norm_phi0_sq": rational(fq.norm_phi0_sq),
            "norm_kappa_sq": rational(fq.norm_kappa_sq),
            "delta_b_kappa": rational(fq.delta_b_kappa),
            "lambda": rational(fq.lam),
            "lambda_note": fq.note,
            "checks": [check_json(c) for c in checks],
        }
        record(checks, "flow")
    if "gysin" in selected:
        if model.p != 1:
            raise UsageError(f"flow-only operation (leaf dimension is {model.p})")
        try:
            g = gysin_flow_report(model)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        doc["gysin"] = {
            "dims": {
                "basic_twisted": list(g.basic_twisted_dims),
                "full_twisted": list(g.full_twisted_dims),
                "basic": list(g.basic_dims),
            },
            "euler_class": [rational(x) for x in g.euler_class],
            "euler_class_nonzero": g.euler_class_nonzero,
            "maps": [
                {"kind": mp.kind, "source": mp.source, "target": mp.target, "rank": mp.rank,
                 "matrix": matrix_json(mp.matrix)}
                for mp in g.maps
            ],
            "junctions": [
                {"space": j.space, "dim": j.dim, "rank_in": j.rank_in, "rank_out": j.rank_out,
                 "composition_zero": j.composition_zero, "exact": j.exact}
                for j in g.junctions
            ],
            "exact": g.exact,
            "checks": [check_json(c) for c in g.checks],
            "statements": [statement_json(s) for s in g.statements],
        }
        record(g.checks, "gysin")
        record(g.statements, "gysin")
    if "diagnostics" in selected:
        stmts = theorem_diagnostics(model, transverse)
        doc["diagnostics"] = [statement_json(s) for s in stmts]
        record(stmts, "diagnostics")
    return _finish(doc, failures)


def _finish(doc: dict[str, Any], failures: list[str]) -> tuple[int, dict[str, Any]]:
    code = 1 if failures else 0
    doc["status"] = {"exit_code": code, "failed": failures}
    return code, doc


# ---------------------------------------------------------------------------
# rendering


def render_structured(doc: dict[str, Any]) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _matrix_text(m: list[list[str]]) -> str:
    return "[" + "; ".join(" ".join(row) for row in m) + "]"


def _forms(items: list[dict[str, Any]]) -> str:
    return ", ".join(f["text"] for f in items)


def _check_lines(checks: list[dict[str, Any]], pad: str, verbose: bool = True) -> list[str]:
    lines = []
    passed = 0
    for c in checks:
        if c["passed"]:
            passed += 1
            if verbose:
                lines.append(f"{pad}PASS {c['name']}")
            continue
        mark = "warn" if c["severity"] == "warning" else "FAIL"
        extra = f"  [{c['witness']}]" if c["witness"] else ""
        lines.append(f"{pad}{mark} {c['name']}{extra}")
    if not verbose:
        lines.insert(0, f"{pad}{passed}/{len(checks)} cross-checks passed")
    return lines


def _statement_lines(stmts: list[dict[str, Any]], pad: str) -> list[str]:
    out = []
    for s in stmts:
        extra = f"  [{s['detail']}]" if s["detail"] else ""
        out.append(f"{pad}{s['status']}: {s['name']}{extra}")
    return out


def _cohomology_lines(title: str, sec: dict[str, Any]) -> list[str]:
    if "skipped" in sec:
        return [f"  {title}: skipped ({sec['skipped']})"]
    head = f"  {title}"
    if sec["twist"]["terms"]:
        head += f", twist {sec['twist']['text']}"
    if "dims" in sec:
        head += f": dims {tuple(sec['dims'])}"
    lines = [head]
    for row in sec["degrees"]:
        gens = _forms(row["generators"])
        lines.append(f"    H^{row['degree']} dim {row['dim']}" + (f": {gens}" if gens else ""))
    lines.extend(_check_lines(sec["crosschecks"], "    ", verbose=False))
    return lines


def _formality_lines(title: str, sec: dict[str, Any]) -> list[str]:
    lines = [f"{title}: {'formal' if sec['formal'] else 'NOT formal'}"]
    for t in [sec["wedge"], *sec["interior"]]:
        line = f"  {t['name']}: {t['pairs']} pairs, {t['failures']} failing"
        if t["witness"]:
            w = t["witness"]
            line += f"; first ({w['left']['text']}, {w['right']['text']}): {w['reason']}"
        lines.append(line)
    per = ", ".join(f"{d['degree']}:{'yes' if d['formal'] else 'no'}" for d in sec["per_degree"])
    lines.append(f"  r-formal by degree: {per}")
    lines.extend(_check_lines(sec["checks"], "  "))
    return lines


def render_text(doc: dict[str, Any]) -> str:
    m = doc["model"]
    params = ", ".join(f"{k}={v}" for k, v in m["parameters"].items()) or "none"
    leaf = " ".join(m["leafwise"]) or "(trivial foliation)"
    lines = [
        f"model {m['name']}: n={m['n']} p={m['p']} q={m['q']}",
        f"  generators {' '.join(m['generators'])}; leafwise {leaf}; parameters {params}",
    ]
    if "validate" in doc:
        lines.append("validate")
        lines.extend(_check_lines(doc["validate"]["checks"], "  "))
    if "identities" in doc:
        lines.append("identities")
        lines.extend(_check_lines(doc["identities"], "  "))
    if "skipped" in doc:
        lines.append(f"skipped {', '.join(doc['skipped']['analyses'])}: {doc['skipped']['reason']}")
    if "cohomology" in doc:
        sec = doc["cohomology"]
        lines.append("cohomology")
        lines.extend(_cohomology_lines("basic", sec["basic"]))
        lines.extend(_cohomology_lines("full", sec["full"]))
        lines.append(f"  kappa_b = {sec['kappa_b']['text']}")
        for row in sec["duality"]:
            ok = row["dim"] == row["dual_dim"] and row["nonsingular"] and row["star_matches"]
            lines.append(
                f"  duality H^{row['degree']} ({row['dim']}) vs twisted H^{m['q'] - row['degree']} "
                f"({row['dual_dim']}): pairing {_matrix_text(row['pairing'])}, {'ok' if ok else 'FAIL'}"
            )
    if "twisted_cohomology" in doc:
        sec = doc["twisted_cohomology"]
        lines.append(f"twisted cohomology, twist {sec['twist']['text']}")
        lines.extend(_cohomology_lines("basic", sec["basic"]))
        lines.extend(_cohomology_lines("full", sec["full"]))
    if "formality" in doc:
        lines.extend(_formality_lines("transverse formality", doc["formality"]))
    if "geometric_formality" in doc:
        lines.extend(_formality_lines("geometric formality", doc["geometric_formality"]))
    if "flow" in doc:
        f = doc["flow"]
        lines.append("flow")
        for key in ("xi_flat", "phi0", "kappa"):
            lines.append(f"  {key} = {f[key]['text']}")
        lines.append(f"  |phi0|^2 = {f['norm_phi0_sq']}, |kappa|^2 = {f['norm_kappa_sq']}, "
                     f"delta_b kappa_b = {f['delta_b_kappa']}")
        lines.append(f"  lambda = {f['lambda']} ({f['lambda_note']})")
        lines.extend(_check_lines(f["checks"], "  "))
    if "gysin" in doc:
        g = doc["gysin"]
        lines.append("gysin")
        for key, dims in g["dims"].items():
            lines.append(f"  {key} dims {tuple(dims)}")
        euler = "nonzero" if g["euler_class_nonzero"] else "zero"
        lines.append(f"  Euler class {euler} {tuple(g['euler_class'])}")
        for j in g["junctions"]:
            lines.append(f"  at {j['space']}: dim {j['dim']}, rank in {j['rank_in']}, "
                         f"rank out {j['rank_out']}, {'exact' if j['exact'] else 'NOT exact'}")
        lines.extend(_check_lines([c for c in g["checks"] if not c["passed"]], "  "))
        lines.extend(_statement_lines(g["statements"], "  "))
    if "diagnostics" in doc:
        lines.append("diagnostics")
        lines.extend(_statement_lines(doc["diagnostics"], "  "))
    failed = doc["status"]["failed"]
    if failed:
        lines.append(f"FAILED ({len(failed)})")
        lines.extend(f"  {name}" for name in failed)
    else:
        lines.append("all checks passed")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _param(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=rational, got {text!r}")
    name, value = text.split("=", 1)
    return name.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="foliacalc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="analyse a manifest")
    run_p.add_argument("--input", required=True, help="manifest path or bundled manifest name")
    run_p.add_argument("--analyses", default=",".join(DEFAULT_ANALYSES),
                       help=f"comma-separated subset of: {', '.join(ANALYSES)}")
    run_p.add_argument("--twist", help="coefficient a for the twist a*kappa_b, or a closed 1-form")
    run_p.add_argument("--param", action="append", type=_param, default=[], metavar="NAME=RATIONAL")
    run_p.add_argument("--format", choices=("text", "structured"), default="text")
    run_p.add_argument("--degree", type=int, help="restrict cohomology output to one degree")
    run_p.add_argument("--check-identities", action="store_true")
    sub.add_parser("list", help="list bundled manifests")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        print("\n".join(bundled_manifests()))
        return 0
    analyses = [a.strip() for a in args.analyses.split(",") if a.strip()]
    if args.check_identities and "check-identities" not in analyses:
        analyses.append("check-identities")
    config = RunConfig(
        input=args.input,
        analyses=tuple(analyses),
        twist=args.twist,
        format=args.format,
        params=dict(args.param),
        degree=args.degree,
    )
    try:
        code, doc = run(config)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = render_structured(doc) if config.format == "structured" else render_text(doc)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
