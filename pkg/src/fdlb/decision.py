"""Ranking choices by expert-weighted attribute memberships.

An expert's priorities are a utility box: an ordered list of (attribute,
weight) pairs, attributes being concept names from the knowledge base.  A
choice's score sums weight times the entailed lower membership bound of the
choice in each attribute.  A (choice, attribute) pair whose entailed
interval is still the vacuous [0, 1] is *undecided*: it contributes nothing
and is reported so the knowledge base can be completed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Sequence

from .model import Atom, FdlbError, ONE, ZERO

if TYPE_CHECKING:  # pragma: no cover
    from .reasoner import SaturatedKb


class UnknownAttributeError(FdlbError):
    """A utility-box attribute is not a concept name of the knowledge base."""


class EmptyChoiceSetError(FdlbError):
    """Ranking needs at least one choice."""


@dataclass(frozen=True)
class UtilityBox:
    """One expert's attribute weights, in file order."""

    expert_id: str
    entries: tuple[tuple[str, Fraction], ...]

    def __post_init__(self) -> None:
        seen = set()
        for name, w in self.entries:
            if name in seen:
                raise FdlbError(f"utility box {self.expert_id!r} weights attribute {name!r} twice")
            seen.add(name)
            if w < 0:
                raise FdlbError(f"utility box {self.expert_id!r} gives {name!r} a negative weight")

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def weight(self, attribute: str) -> Fraction:
        for name, w in self.entries:
            if name == attribute:
                return w
        raise UnknownAttributeError(f"no weight for attribute {attribute!r}")


@dataclass(frozen=True)
class AttributeContribution:
    attribute: str
    weight: Fraction
    bound: Fraction | None  # entailed lower membership bound; None = undecided
    contribution: Fraction  # weight * bound, or 0 when undecided


@dataclass(frozen=True)
class ChoiceScore:
    choice: str
    score: Fraction
    contributions: tuple[AttributeContribution, ...]

    @property
    def undecided(self) -> tuple[str, ...]:
        return tuple(c.attribute for c in self.contributions if c.bound is None)


@dataclass(frozen=True)
class DecisionReport:
    expert_id: str
    rows: tuple[ChoiceScore, ...]  # best score first, ties broken by name

    @property
    def ideal(self) -> str:
        return self.rows[0].choice

    @property
    def undecided(self) -> tuple[tuple[str, str], ...]:
        return tuple((row.choice, attr) for row in self.rows for attr in row.undecided)

    @property
    def complete(self) -> bool:
        return not self.undecided


def _check_attributes(sat: "SaturatedKb", ubox: UtilityBox) -> None:
    known = sat.kb.concept_names
    for name, _ in ubox.entries:
        if name not in known:
            raise UnknownAttributeError(
                f"attribute {name!r} in utility box {ubox.expert_id!r} is not a concept of the knowledge base"
            )


def attribute_utility(sat: "SaturatedKb", choice: str, attribute: str, weight: Fraction) -> AttributeContribution:
    """One attribute's share of a choice's score.

    Undecided memberships (vacuous entailed interval) contribute 0 and are
    flagged with ``bound=None`` rather than silently treated as 0.
    """
    bound = sat.entailed_lower_bound(choice, Atom(attribute))
    contribution = ZERO if bound is None else weight * bound
    return AttributeContribution(attribute, weight, bound, contribution)


def total_utility(sat: "SaturatedKb", choice: str, ubox: UtilityBox) -> Fraction:
    """Weighted sum of entailed lower membership bounds over the box's attributes."""
    _check_attributes(sat, ubox)
    return sum(
        (attribute_utility(sat, choice, name, w).contribution for name, w in ubox.entries),
        start=ZERO,
    )


def crisp_utility(sat: "SaturatedKb", choice: str, ubox: UtilityBox) -> Fraction:
    """Sum of weights of attributes the choice fully belongs to (bound 1).

    On a knowledge base whose entailed bounds are all 0 or 1 this coincides
    with :func:`total_utility`; partial memberships are ignored here.
    """
    _check_attributes(sat, ubox)
    total = ZERO
    for name, w in ubox.entries:
        if sat.entailed_lower_bound(choice, Atom(name)) == ONE:
            total += w
    return total


def rank(sat: "SaturatedKb", choices: Sequence[str], ubox: UtilityBox) -> DecisionReport:
    """Score every choice and order them best-first (ties: name order)."""
    if not choices:
        raise EmptyChoiceSetError("no choices to rank")
    _check_attributes(sat, ubox)
    rows = []
    for choice in choices:
        contributions = tuple(attribute_utility(sat, choice, name, w) for name, w in ubox.entries)
        score = sum((c.contribution for c in contributions), start=ZERO)
        rows.append(ChoiceScore(choice, score, contributions))
    rows.sort(key=lambda row: (-row.score, row.choice))
    return DecisionReport(ubox.expert_id, tuple(rows))


def ideal_choice(sat: "SaturatedKb", choices: Sequence[str], ubox: UtilityBox) -> str:
    return rank(sat, choices, ubox).ideal


def completeness_report(sat: "SaturatedKb", choices: Sequence[str], ubox: UtilityBox) -> tuple[tuple[str, str], ...]:
    """All (choice, attribute) pairs the knowledge base leaves undecided."""
    return rank(sat, choices, ubox).undecided
