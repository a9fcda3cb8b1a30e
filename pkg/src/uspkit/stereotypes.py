"""The fixed 15-member stereotype vocabulary and its element-kind grouping.

Five class stereotypes, five attribute stereotypes, four operation
stereotypes and one association stereotype. Names are case-sensitive.
"""

from __future__ import annotations

import difflib
import enum


class ElementKind(enum.Enum):
    CLASS = "class"
    ATTRIBUTE = "attribute"
    OPERATION = "operation"
    ASSOCIATION = "association"


class Stereotype(enum.Enum):
    # class stereotypes
    WHOLE = "whole"
    PART = "part"
    ATOM = "atom"
    BOUNDARY = "boundary"
    LINK = "link"
    # attribute stereotypes
    IN = "in"
    OUT = "out"
    STATE = "state"
    PARTS = "parts"
    REF = "ref"
    # operation stereotypes
    EXIST = "Exist"
    RULE = "Rule"
    ACCEPT = "accept"
    EMIT = "emit"
    # association stereotype
    CHANNEL = "channel"

    @property
    def element_kind(self) -> ElementKind:
        return _KIND_OF[self]

    def __str__(self) -> str:
        return self.value


_KIND_OF = {
    Stereotype.WHOLE: ElementKind.CLASS,
    Stereotype.PART: ElementKind.CLASS,
    Stereotype.ATOM: ElementKind.CLASS,
    Stereotype.BOUNDARY: ElementKind.CLASS,
    Stereotype.LINK: ElementKind.CLASS,
    Stereotype.IN: ElementKind.ATTRIBUTE,
    Stereotype.OUT: ElementKind.ATTRIBUTE,
    Stereotype.STATE: ElementKind.ATTRIBUTE,
    Stereotype.PARTS: ElementKind.ATTRIBUTE,
    Stereotype.REF: ElementKind.ATTRIBUTE,
    Stereotype.EXIST: ElementKind.OPERATION,
    Stereotype.RULE: ElementKind.OPERATION,
    Stereotype.ACCEPT: ElementKind.OPERATION,
    Stereotype.EMIT: ElementKind.OPERATION,
    Stereotype.CHANNEL: ElementKind.ASSOCIATION,
}

CLASS_STEREOTYPES = frozenset(
    s for s in Stereotype if s.element_kind is ElementKind.CLASS
)
FRAME_STEREOTYPES = frozenset(
    {Stereotype.WHOLE, Stereotype.PART, Stereotype.ATOM, Stereotype.BOUNDARY}
)

_BY_NAME = {s.value: s for s in Stereotype}


class UnknownStereotypeError(ValueError):
    """Raised for a name outside the vocabulary; carries the closest member."""

    def __init__(self, name: str):
        self.name = name
        matches = difflib.get_close_matches(name, _BY_NAME.keys(), n=1, cutoff=0.0)
        self.suggestion = matches[0] if matches else None
        hint = f" (did you mean «{self.suggestion}»?)" if self.suggestion else ""
        super().__init__(f"unknown stereotype «{name}»{hint}")


def stereotype_of(name: str) -> Stereotype:
    """Look up a vocabulary member by its case-sensitive name."""
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownStereotypeError(name) from None
