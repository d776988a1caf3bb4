"""Bundled example networks and their expected verdicts."""

import json
from importlib import resources

from ..parser import parse_crn


def names() -> list[str]:
    return sorted(p.name[:-4] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".crn"))


def text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.crn").read_text("utf-8")


def path(name: str):
    return resources.files(__name__).joinpath(f"{name}.crn")


def load(name: str):
    return parse_crn(text(name))


def manifest() -> dict:
    return json.loads(resources.files(__name__).joinpath("manifest.json").read_text("utf-8"))
