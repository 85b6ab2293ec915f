"""Interval entailment for fuzzy knowledge bases.

Saturation computes, for every individual and every concept expression in
the knowledge base's closure, an interval of membership degrees that is
guaranteed in every model.  Bounds only ever tighten (the rules are
monotone), every rule is sound under min/max/complement semantics with
graded inclusions read as ``max(1 - lhs(x), rhs(x)) >= degree``, and the
result is the least fixpoint — independent of statement order.

Rules, by the name recorded on each derivation:

* ``top`` / ``bottom`` — the universal and empty classes are pinned.
* ``assertion`` — an asserted membership is a lower bound.
* ``concrete`` — a known quantity decides a threshold restriction crisply.
* ``negation`` — bounds mirror between an expression and its complement.
* ``conj-up`` / ``conj-hi`` / ``conj-down`` — a conjunction sits at the
  minimum of its conjuncts; its lower bound passes down to each conjunct.
* ``disj-up`` / ``disj-hi`` — a disjunction sits at the maximum of its
  disjuncts.
* ``exists-up`` — a named filler witnesses an existential from below.
* ``forall-down`` — a value restriction's lower bound passes to fillers.
* ``forall-up`` — on a closed role the filler set is complete, so the
  minimum over fillers bounds the restriction from below (1 when empty).
* ``gci`` — from ``max(1 - C(x), D(x)) >= t``: once ``C(x)`` is known to
  exceed ``1 - t``, ``D(x) >= t`` follows.
* ``disjoint`` — an inclusion with an empty right side caps its left side
  at ``1 - t``; for a conjunctive left side, once all but one conjunct
  exceed ``1 - t``, the remaining one is capped.

Inclusions never propagate right-to-left (no contrapositive rule): what the
knowledge base does not determine stays at the vacuous interval [0, 1]
rather than being guessed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .model import (
    And,
    BOTTOM,
    ConceptExpression,
    ConcretePredicate,
    DegreeInterval,
    Exists,
    FdlbError,
    Forall,
    FULL_INTERVAL,
    FuzzyGci,
    KnowledgeBase,
    Not,
    ONE,
    Or,
    TOP,
    ZERO,
    check_concept_roles,
    conjuncts,
    disjuncts,
    normalize,
    sort_key,
    sub_expressions,
    to_negation_normal_form,
)

Bound = str  # "lo" | "hi"
Key = tuple[str, ConceptExpression, Bound]


class UnknownIndividualError(FdlbError):
    """A query named an individual the knowledge base never mentions."""


class NoDerivationError(FdlbError):
    """The queried bound is still at its default; there is nothing to explain."""


@dataclass(frozen=True)
class DerivationNode:
    """One recorded bound improvement.

    ``premises`` are (individual, expression, bound-side) references into
    the final derivation map; ``source`` is the statement that licensed the
    step (an inclusion, an assertion, a role assertion, or a quantity
    fact), if any.  ``step`` is the global order in which improvements were
    recorded.
    """

    rule: str
    individual: str
    expr: ConceptExpression
    kind: Bound
    value: Fraction
    premises: tuple[Key, ...]
    source: object | None = None
    note: str = ""
    step: int = 0


@dataclass(frozen=True)
class ExplanationStep:
    node: DerivationNode
    children: tuple["ExplanationStep", ...]
    cyclic: bool = False  # a back-reference; children deliberately omitted


@dataclass(frozen=True)
class Explanation:
    individual: str
    expr: ConceptExpression
    kind: Bound
    value: Fraction
    root: ExplanationStep


@dataclass(frozen=True)
class Conflict:
    """Two derivations that squeeze one membership into an empty interval."""

    individual: str
    expr: ConceptExpression
    lo_value: Fraction
    hi_value: Fraction
    lo_explanation: ExplanationStep
    hi_explanation: ExplanationStep


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    conflicts: tuple[Conflict, ...] = ()


class InconsistencyError(FdlbError):
    """Saturation found bounds that cannot be satisfied together."""

    def __init__(self, report: ConsistencyReport):
        self.report = report
        conflict = report.conflicts[0]
        super().__init__(
            f"inconsistent knowledge base: membership of {conflict.individual!r} is forced "
            f"both >= {conflict.lo_value} and <= {conflict.hi_value} in the same class"
        )


# --------------------------------------------------------------------------
# Closure


def _dual(expr: ConceptExpression) -> ConceptExpression:
    return normalize(to_negation_normal_form(Not(expr)))


def build_closure(kb: KnowledgeBase, extra: Iterable[ConceptExpression] = ()) -> tuple[ConceptExpression, ...]:
    """Every expression saturation tracks, in a deterministic order.

    All subexpressions of axiom sides and asserted concepts, the pinned
    classes, any extra query expressions, and the complement-normal dual of
    each — closed under subexpressions until stable.  Sharing one closure
    across individuals keeps interval keys comparable everywhere.
    """
    seen: set[ConceptExpression] = {TOP, BOTTOM}
    for gci in kb.gcis:
        seen.update(sub_expressions(gci.lhs))
        seen.update(sub_expressions(gci.rhs))
    for fa in kb.assertions:
        seen.update(sub_expressions(fa.concept))
    for e in extra:
        seen.update(sub_expressions(normalize(e)))
    while True:
        grown = set(seen)
        for e in seen:
            grown.update(sub_expressions(_dual(e)))
        if grown == seen:
            break
        seen = grown
    return tuple(sorted(seen, key=sort_key))


# --------------------------------------------------------------------------
# Saturation engine


class _ConflictFound(Exception):
    def __init__(self, conflict: Conflict):
        self.conflict = conflict
        super().__init__("conflict")


class _Saturation:
    def __init__(self, kb: KnowledgeBase, extra: Iterable[ConceptExpression] = ()):
        self.kb = kb
        self.closure = build_closure(kb, extra)
        self.closure_set = frozenset(self.closure)
        self.intervals: dict[tuple[str, ConceptExpression], DegreeInterval] = {}
        self.derivations: dict[Key, DerivationNode] = {}
        self.queue: deque[Key] = deque()
        self.step = 0
        self._build_indexes()

    # -- indexes

    def _build_indexes(self) -> None:
        kb = self.kb
        self.neg_partners: dict[ConceptExpression, list[ConceptExpression]] = {}
        self.conj_parents: dict[ConceptExpression, list[ConceptExpression]] = {}
        self.disj_parents: dict[ConceptExpression, list[ConceptExpression]] = {}
        self.exists_by_role: dict[str, list[Exists]] = {}
        self.forall_by_role: dict[str, list[Forall]] = {}
        self.concrete_nodes: list[Exists] = []
        for e in self.closure:
            if isinstance(e, Not):
                self.neg_partners.setdefault(e.body, []).append(e)
                self.neg_partners.setdefault(e, []).append(e.body)
            elif isinstance(e, And):
                for c in conjuncts(e):
                    self.conj_parents.setdefault(c, []).append(e)
            elif isinstance(e, Or):
                for c in disjuncts(e):
                    self.disj_parents.setdefault(c, []).append(e)
            elif isinstance(e, Exists):
                if isinstance(e.target, ConcretePredicate):
                    self.concrete_nodes.append(e)
                else:
                    self.exists_by_role.setdefault(e.role, []).append(e)
            elif isinstance(e, Forall):
                self.forall_by_role.setdefault(e.role, []).append(e)

        self.fillers: dict[tuple[str, str], list[str]] = {}
        self.pointing_at: dict[str, list[tuple[str, str]]] = {}
        self.role_fact: dict[tuple[str, str, str], object] = {}
        for ra in kb.role_assertions:
            key = (ra.subject, ra.role)
            if ra.filler not in self.fillers.setdefault(key, []):
                self.fillers[key].append(ra.filler)
                self.pointing_at.setdefault(ra.filler, []).append((ra.subject, ra.role))
                self.role_fact[(ra.subject, ra.filler, ra.role)] = ra

        self.values: dict[tuple[str, str], object] = {}
        for cf in kb.concrete_facts:
            self.values[(cf.subject, cf.role)] = cf

        self.gcis_by_lhs: dict[ConceptExpression, list[FuzzyGci]] = {}
        self.bottom_by_conjunct: dict[ConceptExpression, list[FuzzyGci]] = {}
        self.bottom_simple: list[FuzzyGci] = []
        for gci in kb.gcis:
            if gci.rhs == BOTTOM:
                if isinstance(gci.lhs, And):
                    for c in set(conjuncts(gci.lhs)):
                        self.bottom_by_conjunct.setdefault(c, []).append(gci)
                else:
                    self.bottom_simple.append(gci)
            else:
                self.gcis_by_lhs.setdefault(gci.lhs, []).append(gci)

    # -- bound accessors

    def interval(self, ind: str, expr: ConceptExpression) -> DegreeInterval:
        return self.intervals.get((ind, expr), FULL_INTERVAL)

    def lo(self, ind: str, expr: ConceptExpression) -> Fraction:
        return self.interval(ind, expr).lo

    def hi(self, ind: str, expr: ConceptExpression) -> Fraction:
        return self.interval(ind, expr).hi

    def _explain_step(self, key: Key, path: frozenset[Key] = frozenset()) -> ExplanationStep:
        node = self.derivations[key]
        if key in path:
            return ExplanationStep(node, (), cyclic=True)
        deeper = path | {key}
        return ExplanationStep(node, tuple(self._explain_step(p, deeper) for p in node.premises))

    def _conflict(self, ind: str, expr: ConceptExpression, new: DerivationNode) -> Conflict:
        # The losing side's current bound must itself be derived: a default
        # bound (0 or 1) can never be crossed by a value inside [0, 1].
        self.derivations[(ind, expr, new.kind)] = new
        lo_tree = self._explain_step((ind, expr, "lo"))
        hi_tree = self._explain_step((ind, expr, "hi"))
        lo_value = new.value if new.kind == "lo" else self.lo(ind, expr)
        hi_value = new.value if new.kind == "hi" else self.hi(ind, expr)
        return Conflict(ind, expr, lo_value, hi_value, lo_tree, hi_tree)

    def set_lo(
        self,
        ind: str,
        expr: ConceptExpression,
        value: Fraction,
        rule: str,
        premises: tuple[Key, ...],
        source: object | None = None,
        note: str = "",
    ) -> None:
        cur = self.interval(ind, expr)
        if value <= cur.lo:
            return
        self.step += 1
        node = DerivationNode(rule, ind, expr, "lo", value, premises, source, note, self.step)
        if value > cur.hi:
            raise _ConflictFound(self._conflict(ind, expr, node))
        self.intervals[(ind, expr)] = DegreeInterval(value, cur.hi)
        self.derivations[(ind, expr, "lo")] = node
        self.queue.append((ind, expr, "lo"))

    def set_hi(
        self,
        ind: str,
        expr: ConceptExpression,
        value: Fraction,
        rule: str,
        premises: tuple[Key, ...],
        source: object | None = None,
        note: str = "",
    ) -> None:
        cur = self.interval(ind, expr)
        if value >= cur.hi:
            return
        self.step += 1
        node = DerivationNode(rule, ind, expr, "hi", value, premises, source, note, self.step)
        if value < cur.lo:
            raise _ConflictFound(self._conflict(ind, expr, node))
        self.intervals[(ind, expr)] = DegreeInterval(cur.lo, value)
        self.derivations[(ind, expr, "hi")] = node
        self.queue.append((ind, expr, "hi"))

    # -- seeds

    def seed(self) -> None:
        kb = self.kb
        for a in kb.individuals:
            self.set_lo(a, TOP, ONE, "top", ())
            self.set_hi(a, BOTTOM, ZERO, "bottom", ())
        for fa in kb.assertions:
            self.set_lo(fa.individual, fa.concept, fa.degree, "assertion", (), source=fa)
        for node in self.concrete_nodes:
            for (ind, role), cf in self.values.items():
                if role != node.role:
                    continue
                hit = node.target.evaluate(cf.value)  # type: ignore[union-attr]
                if hit == ONE:
                    self.set_lo(ind, node, ONE, "concrete", (), source=cf)
                else:
                    self.set_hi(ind, node, ZERO, "concrete", (), source=cf)
        for gci in self.bottom_simple:
            cap = ONE - gci.degree
            for a in kb.individuals:
                self.set_hi(a, gci.lhs, cap, "disjoint", (), source=gci)
        for role, nodes in self.forall_by_role.items():
            decl = kb.roles.get(role)
            if decl is None or not decl.closed:
                continue
            for node in nodes:
                for a in kb.individuals:
                    if not self.fillers.get((a, role)):
                        self.set_lo(a, node, ONE, "forall-up", (), note="closed role with no fillers")

    # -- propagation

    def run(self) -> None:
        self.seed()
        while self.queue:
            ind, expr, kind = self.queue.popleft()
            self._propagate(ind, expr, kind)

    def _propagate(self, a: str, e: ConceptExpression, kind: Bound) -> None:
        for partner in self.neg_partners.get(e, ()):
            if kind == "lo":
                self.set_hi(a, partner, ONE - self.lo(a, e), "negation", ((a, e, "lo"),))
            else:
                self.set_lo(a, partner, ONE - self.hi(a, e), "negation", ((a, e, "hi"),))
        if kind == "lo":
            self._lo_changed(a, e)
        else:
            self._hi_changed(a, e)

    def _lo_changed(self, a: str, e: ConceptExpression) -> None:
        for parent in self.conj_parents.get(e, ()):
            parts = conjuncts(parent)
            candidate = min(self.lo(a, c) for c in parts)
            self.set_lo(a, parent, candidate, "conj-up", tuple((a, c, "lo") for c in parts))
        for parent in self.disj_parents.get(e, ()):
            parts = disjuncts(parent)
            candidate = max(self.lo(a, c) for c in parts)
            witness = next(c for c in parts if self.lo(a, c) == candidate)
            self.set_lo(a, parent, candidate, "disj-up", ((a, witness, "lo"),))
        if isinstance(e, And):
            bound = self.lo(a, e)
            for c in conjuncts(e):
                self.set_lo(a, c, bound, "conj-down", ((a, e, "lo"),))
        if isinstance(e, Forall):
            bound = self.lo(a, e)
            for b in self.fillers.get((a, e.role), ()):
                self.set_lo(
                    b, e.body, bound, "forall-down", ((a, e, "lo"),),
                    source=self.role_fact[(a, b, e.role)],
                )
        for subject, role in self.pointing_at.get(a, ()):
            for node in self.exists_by_role.get(role, ()):
                if node.target != e:
                    continue
                fils = self.fillers[(subject, role)]
                candidate = max(self.lo(b, e) for b in fils)
                witness = next(b for b in fils if self.lo(b, e) == candidate)
                self.set_lo(
                    subject, node, candidate, "exists-up", ((witness, e, "lo"),),
                    source=self.role_fact[(subject, witness, role)],
                )
            decl = self.kb.roles.get(role)
            if decl is not None and decl.closed:
                for node in self.forall_by_role.get(role, ()):
                    if node.body != e:
                        continue
                    fils = self.fillers[(subject, role)]
                    candidate = min(self.lo(b, e) for b in fils)
                    self.set_lo(
                        subject, node, candidate, "forall-up",
                        tuple((b, e, "lo") for b in fils),
                        note="closed role: the listed fillers are all fillers",
                    )
        for gci in self.gcis_by_lhs.get(e, ()):
            if self.lo(a, e) > ONE - gci.degree:
                self.set_lo(a, gci.rhs, gci.degree, "gci", ((a, e, "lo"),), source=gci)
        for gci in self.bottom_by_conjunct.get(e, ()):
            self._apply_disjoint(a, gci)

    def _apply_disjoint(self, a: str, gci: FuzzyGci) -> None:
        cap = ONE - gci.degree
        parts = conjuncts(gci.lhs)
        for j, cj in enumerate(parts):
            others = parts[:j] + parts[j + 1 :]
            if min(self.lo(a, c) for c in others) > cap:
                self.set_hi(
                    a, cj, cap, "disjoint",
                    tuple((a, c, "lo") for c in others),
                    source=gci,
                )

    def _hi_changed(self, a: str, e: ConceptExpression) -> None:
        for parent in self.conj_parents.get(e, ()):
            parts = conjuncts(parent)
            candidate = min(self.hi(a, c) for c in parts)
            witness = next(c for c in parts if self.hi(a, c) == candidate)
            self.set_hi(a, parent, candidate, "conj-hi", ((a, witness, "hi"),))
        for parent in self.disj_parents.get(e, ()):
            parts = disjuncts(parent)
            candidate = max(self.hi(a, c) for c in parts)
            self.set_hi(a, parent, candidate, "disj-hi", tuple((a, c, "hi") for c in parts))


# --------------------------------------------------------------------------
# Public API


@dataclass(frozen=True)
class SaturatedKb:
    """A knowledge base together with its saturated interval map."""

    kb: KnowledgeBase
    closure: tuple[ConceptExpression, ...]
    _closure_set: frozenset[ConceptExpression]
    _intervals: Mapping[tuple[str, ConceptExpression], DegreeInterval]
    _derivations: Mapping[Key, DerivationNode]
    _individual_set: frozenset[str] = field(default_factory=frozenset)

    def interval(self, individual: str, expr: ConceptExpression) -> DegreeInterval:
        """The entailed interval for an in-closure expression (no extension)."""
        self._check_individual(individual)
        e = normalize(expr)
        if e not in self._closure_set:
            raise FdlbError(f"{_describe(e)} is outside the saturated closure; use instance_interval")
        return self._intervals.get((individual, e), FULL_INTERVAL)

    def instance_interval(self, individual: str, expr: ConceptExpression) -> DegreeInterval:
        """The entailed membership interval of an individual in any concept.

        Expressions outside the closure are answered by re-saturating with
        the query added, which never loosens anything already entailed.  If
        the extra expression exposes a contradiction the knowledge base was
        inconsistent all along and :class:`InconsistencyError` is raised.
        """
        self._check_individual(individual)
        e = normalize(expr)
        if e in self._closure_set:
            return self._intervals.get((individual, e), FULL_INTERVAL)
        check_concept_roles(e, self.kb.roles, "query")
        extended = saturate(self.kb, extra_concepts=(e,))
        return extended.interval(individual, e)

    def entailed_lower_bound(self, individual: str, expr: ConceptExpression) -> Fraction | None:
        """The entailed lower membership bound, or None when undecided.

        Undecided means the knowledge base says nothing at all: the
        entailed interval is exactly the vacuous [0, 1].
        """
        interval = self.instance_interval(individual, expr)
        if interval == FULL_INTERVAL:
            return None
        return interval.lo

    def interval_map(self) -> dict[tuple[str, ConceptExpression], DegreeInterval]:
        """All non-vacuous entailed intervals, keyed by (individual, expression)."""
        return {key: iv for key, iv in self._intervals.items() if iv != FULL_INTERVAL}

    def explain(self, individual: str, expr: ConceptExpression, kind: Bound = "lo") -> Explanation:
        """The derivation tree behind one bound.

        Raises :class:`NoDerivationError` when the bound is still at its
        default (0 from below, 1 from above) — there is nothing to show.
        """
        if kind not in ("lo", "hi"):
            raise ValueError("kind must be 'lo' or 'hi'")
        self._check_individual(individual)
        e = normalize(expr)
        if e not in self._closure_set:
            check_concept_roles(e, self.kb.roles, "query")
            return saturate(self.kb, extra_concepts=(e,)).explain(individual, e, kind)
        key = (individual, e, kind)
        node = self._derivations.get(key)
        if node is None:
            side = "lower" if kind == "lo" else "upper"
            raise NoDerivationError(
                f"no {side} bound beyond the default is entailed for {individual!r} in {_describe(e)}"
            )
        root = _tree_from(self._derivations, key)
        return Explanation(individual, e, kind, node.value, root)

    def _check_individual(self, individual: str) -> None:
        if individual not in self._individual_set:
            raise UnknownIndividualError(f"individual {individual!r} does not occur in the knowledge base")


def _describe(expr: ConceptExpression) -> str:
    from .kbtext import render_concept

    return f"concept '{render_concept(expr)}'"


def _tree_from(derivations: Mapping[Key, DerivationNode], key: Key, path: frozenset[Key] = frozenset()) -> ExplanationStep:
    node = derivations[key]
    if key in path:
        return ExplanationStep(node, (), cyclic=True)
    deeper = path | {key}
    return ExplanationStep(node, tuple(_tree_from(derivations, p, deeper) for p in node.premises))


def saturate(kb: KnowledgeBase, extra_concepts: Sequence[ConceptExpression] = ()) -> SaturatedKb:
    """Run saturation to its fixpoint.

    Returns the saturated knowledge base, or raises
    :class:`InconsistencyError` (carrying a :class:`ConsistencyReport` with
    the two clashing derivations) as soon as any membership interval
    becomes empty.
    """
    engine = _Saturation(kb, extra_concepts)
    try:
        engine.run()
    except _ConflictFound as found:
        raise InconsistencyError(ConsistencyReport(False, (found.conflict,))) from None
    return SaturatedKb(
        kb=kb,
        closure=engine.closure,
        _closure_set=engine.closure_set,
        _intervals=engine.intervals,
        _derivations=engine.derivations,
        _individual_set=frozenset(kb.individuals),
    )


def check_consistency(kb: KnowledgeBase) -> ConsistencyReport:
    """Saturate and report, without raising on inconsistency."""
    try:
        saturate(kb)
    except InconsistencyError as exc:
        return exc.report
    return ConsistencyReport(True, ())


# --------------------------------------------------------------------------
# Rendering


def _render_source(source: object) -> str:
    from .kbtext import render_statement

    return render_statement(source)


def format_step(step: ExplanationStep, indent: int = 0) -> list[str]:
    node = step.node
    op = ">=" if node.kind == "lo" else "<="
    head = f"{node.kind}({node.individual}, {_concept_text(node.expr)}) {op} {_degree_text(node.value)}"
    details = [node.rule]
    if node.source is not None:
        details.append(_render_source(node.source))
    if node.note:
        details.append(node.note)
    line = "  " * indent + f"{head}   [{'; '.join(details)}]"
    lines = [line]
    if step.cyclic:
        lines[0] += "  (see above)"
        return lines
    for child in step.children:
        lines.extend(format_step(child, indent + 1))
    return lines


def _concept_text(expr: ConceptExpression) -> str:
    from .kbtext import render_concept

    return render_concept(expr)


def _degree_text(value: Fraction) -> str:
    from .kbtext import render_decimal

    return render_decimal(value)


def format_explanation(explanation: Explanation) -> str:
    return "\n".join(format_step(explanation.root))


def format_conflict(conflict: Conflict) -> str:
    lines = [
        f"conflict on {conflict.individual!r} in {_concept_text(conflict.expr)}: "
        f"membership forced >= {_degree_text(conflict.lo_value)} and <= {_degree_text(conflict.hi_value)}",
        "lower bound:",
    ]
    lines.extend(format_step(conflict.lo_explanation, 1))
    lines.append("upper bound:")
    lines.extend(format_step(conflict.hi_explanation, 1))
    return "\n".join(lines)
