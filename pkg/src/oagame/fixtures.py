"""Access to the bundled game and bimatrix fixtures."""

from __future__ import annotations

import hashlib
from importlib import resources

from .dsl import ParseResult, parse_game_spec
from .equilibrium import Bimatrix, parse_bimatrix

BUNDLED = ("oa.game", "table5.bmx", "table6.bmx")


def fixture_text(name: str) -> str:
    if name not in BUNDLED:
        raise KeyError(f"no bundled fixture {name!r}")
    return (resources.files("oagame.data") / name).read_text(encoding="utf-8")


def fixture_digest(name: str) -> str:
    return hashlib.sha256(fixture_text(name).encode("utf-8")).hexdigest()


def load_bundled_game() -> ParseResult:
    return parse_game_spec(fixture_text("oa.game"))


def load_bundled_bimatrix(name: str = "table5.bmx") -> Bimatrix:
    return parse_bimatrix(fixture_text(name))
