from __future__ import annotations

import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from foliacalc.cli import bundled_manifests, load_manifest_text
from foliacalc.model import CoframeModel, parse_manifest

FIXTURES = Path(__file__).parent / "fixtures"
BUNDLED = tuple(bundled_manifests())
FLOWS = ("hopf", "carriere", "solv-flow")


def load(name: str, **params) -> CoframeModel:
    text, stem = load_manifest_text(name)
    return parse_manifest(text, {k: Fraction(v) for k, v in params.items()}, name=stem)


def random_rational(rng: random.Random) -> Fraction:
    num = rng.choice([i for i in range(-5, 6) if i])
    return Fraction(num, rng.randint(1, 4))


def random_bindings(name: str, count: int = 3, seed: int = 20261015) -> list[dict[str, Fraction]]:
    """Deterministic nonzero rational bindings for every declared parameter."""
    names = [k for k, _ in load(name).parameters]
    rng = random.Random(f"{seed}:{name}")
    return [{k: random_rational(rng) for k in names} for _ in range(count)]


def bound_models(count: int = 3) -> list[tuple[str, dict[str, Fraction]]]:
    """Every bundled manifest with its default binding plus random ones."""
    cases = []
    for name in BUNDLED:
        cases.append((name, {}))
        for binding in random_bindings(name, count):
            if binding:
                cases.append((name, binding))
    return cases


def case_id(case) -> str:
    name, binding = case
    if not binding:
        return name
    return name + "[" + ",".join(f"{k}={v}" for k, v in binding.items()) + "]"
