"""The theory files shipped with the package."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .checker import elaborate
from .signature import Signature
from .syntax import SourceFile, parse_file


@dataclass(frozen=True)
class BundledTheory:
    name: str
    description: str
    expected_evals: tuple[str, ...] = ()
    expected_checks: int = 0
    expected_outcome: str = "ok"

    @property
    def filename(self) -> str:
        return f"{self.name}.mdk"

    @property
    def path(self) -> Path:
        return Path(str(resources.files(__package__).joinpath("theories", self.filename)))

    def text(self) -> str:
        return resources.files(__package__).joinpath("theories", self.filename).read_text(encoding="utf-8")

    def parse(self) -> SourceFile:
        return parse_file(self.text(), f"theories/{self.filename}")

    def elaborate(self) -> Signature:
        return _elaborated(self.name)


_BUNDLE = (
    BundledTheory(
        "minimal_axiomatic",
        "minimal implicational logic with introduction/elimination axioms",
        expected_checks=1,
    ),
    BundledTheory(
        "minimal_modulo",
        "minimal implicational logic with eps (imp a b) rewritten to a function type",
        expected_checks=2,
    ),
    BundledTheory(
        "nat_t",
        "unary naturals with addition and the system T recursor as rewrite rules",
        expected_evals=("S (S (S (S 0)))", "S (S 0)"),
    ),
    BundledTheory(
        "nat_axiomatic",
        "unary naturals with addition and recursion as inert axioms",
        expected_evals=("rec 0 (k => acc => S acc) (S (S 0))",),
    ),
    BundledTheory(
        "stt",
        "simple type theory: type codes, arrow decoding, implication and quantifier rules",
        expected_evals=(
            "(x : term o) -> eps x -> eps x -> eps x",
            "x : term o => imp x x",
        ),
        expected_checks=1,
    ),
)


def bundle() -> tuple[BundledTheory, ...]:
    return _BUNDLE


def get(name: str) -> BundledTheory:
    """Look up a bundled theory by name, file name, or ``theories/<file>``."""
    key = Path(name).name
    if key.endswith(".mdk"):
        key = key[:-4]
    for t in _BUNDLE:
        if t.name == key:
            return t
    raise KeyError(name)


@lru_cache(maxsize=None)
def _elaborated(name: str) -> Signature:
    return elaborate(get(name).parse())
