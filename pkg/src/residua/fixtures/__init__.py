"""Fixture library: the figures of the case study as ``.date`` / ``.prog`` files."""

from importlib import resources

from ..dateformat import parse_date
from ..program import parse_program


def text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def path(name: str):
    return resources.files(__name__).joinpath(name)


def names(suffix: str = "") -> list:
    return sorted(p.name for p in resources.files(__name__).iterdir()
                  if p.name.endswith(suffix) and not p.name.startswith("_"))


def date(name: str):
    return parse_date(text(name if name.endswith(".date") else name + ".date"))


def program(name: str):
    return parse_program(text(name if name.endswith(".prog") else name + ".prog"))
