"""Template-based NLG for user dialog acts."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ..errors import DialogForgeError
from .agenda import UserDialogAct


class MissingTemplate(DialogForgeError):
    code = "missing_template"


@dataclass
class ResponseTemplateSet:
    """Surface templates per user-act kind, with optional per-slot overrides
    under ``<kind>.<Slot>`` keys."""

    templates: dict[str, list[str]] = field(default_factory=dict)

    @classmethod
    def bundled(cls) -> "ResponseTemplateSet":
        raw = resources.files("dialogforge.data").joinpath("response_templates.json")
        return cls(templates=json.loads(raw.read_text("utf-8")))

    @classmethod
    def from_file(cls, path: str | Path) -> "ResponseTemplateSet":
        return cls(templates=json.loads(Path(path).read_text("utf-8")))

    def candidates(self, act: UserDialogAct) -> list[str]:
        if act.slot:
            specialized = self.templates.get(f"{act.kind}.{act.slot}")
            if specialized:
                return specialized
        generic = self.templates.get(act.kind)
        if not generic:
            raise MissingTemplate(f"no templates for user act kind {act.kind!r}", kind=act.kind)
        return generic


def realize(act: UserDialogAct, templates: ResponseTemplateSet, rng: random.Random | int) -> str:
    """Seeded-uniform template choice with ``{value}`` substitution.

    ``inform_intent`` passes the intent query through verbatim.
    """
    if act.kind == "inform_intent":
        templates.candidates(act)  # still required to exist
        return act.value or ""
    if isinstance(rng, int):
        rng = random.Random(rng)
    template = rng.choice(templates.candidates(act))
    return template.replace("{value}", act.value or "")
