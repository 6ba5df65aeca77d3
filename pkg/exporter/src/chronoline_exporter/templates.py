"""Prompt templates that turn a year into a text-encoder input.

Nine stock phrasings, P1 through P9, ranging from the bare year string to
full sentences about when something was built or first appeared.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ExporterError

_PLACEHOLDER = "{year}"


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    pattern: str

    def __post_init__(self):
        if self.pattern.count(_PLACEHOLDER) != 1:
            raise ExporterError(
                f"template {self.id}: pattern must contain exactly one "
                f"'{_PLACEHOLDER}' placeholder"
            )
        stripped = self.pattern.replace(_PLACEHOLDER, "")
        if "{" in stripped or "}" in stripped:
            raise ExporterError(
                f"template {self.id}: only the '{_PLACEHOLDER}' placeholder is allowed"
            )

    def fill(self, year: int) -> str:
        return self.pattern.replace(_PLACEHOLDER, str(year))


TEMPLATES: dict[str, PromptTemplate] = {
    t.id: t
    for t in (
        PromptTemplate("P1", "{year}"),
        PromptTemplate("P2", "Year {year}"),
        PromptTemplate("P3", "Was released in the year {year}"),
        PromptTemplate("P4", "Was invented in the year {year}"),
        PromptTemplate("P5", "Was first introduced in the year {year}"),
        PromptTemplate("P6", "Was created in the year {year}"),
        PromptTemplate("P7", "Was built in the year {year}"),
        PromptTemplate("P8", "First appeared in the year {year}"),
        PromptTemplate("P9", "Emerged in the year {year}"),
    )
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        known = ", ".join(sorted(TEMPLATES))
        raise ExporterError(f"unknown template {template_id!r} (known: {known})") from None
