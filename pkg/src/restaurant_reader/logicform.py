"""Parsing, validation, and serialization of story logic forms.

A logic form is the input-dependent half of a story's program: sort-membership
facts declaring the entities the narrative mentions, plus observations tying
actions (st_hpd) and fluent values (st_obs) to story-timeline steps:

    customer(nicole).
    restaurant(veg_r).
    food(lentil_soup).
    waitress(waitress).
    cook(cook1).
    st_hpd(enter(nicole,veg_r),true,0).

The syntax mirrors ASP facts: one `pred(args).` per statement, `%` comments,
lowercase identifiers, boolean tokens exactly `true`/`false`.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from restaurant_reader.terms import Term, TermSyntaxError, _parse_term_at, _skip_ws

# sorts a story may declare entities in; everything else a story needs
# (locations, the table, the menu, the default bill) is built into the domain
ENTITY_SORTS = (
    "customer",
    "restaurant",
    "food",
    "waitress",
    "cook",
    "people",
    "bill",
)

ACTION_OBS = "action-obs"
FLUENT_OBS = "fluent-obs"

_OBS_PREDICATES = {"st_hpd": ACTION_OBS, "st_obs": FLUENT_OBS}


@dataclass(frozen=True)
class EntityDecl:
    """One sort-membership fact, e.g. customer(nicole)."""

    name: str
    sort: str


@dataclass(frozen=True)
class Observation:
    """One st_hpd/st_obs fact: subject observed (not) to hold at a story step."""

    kind: str  # ACTION_OBS or FLUENT_OBS
    subject: Term
    value: bool
    story_step: int

    def predicate(self) -> str:
        return "st_hpd" if self.kind == ACTION_OBS else "st_obs"

    def render(self) -> str:
        return "%s(%s,%s,%d)." % (
            self.predicate(),
            self.subject.render(),
            "true" if self.value else "false",
            self.story_step,
        )


@dataclass
class Story:
    """A parsed logic form: entity declarations plus observations."""

    entities: List[EntityDecl] = field(default_factory=list)
    observations: List[Observation] = field(default_factory=list)
    id: Optional[str] = None

    def entity_names(self) -> List[str]:
        return [e.name for e in self.entities]

    def of_sort(self, sort: str) -> List[str]:
        return [e.name for e in self.entities if e.sort == sort]

    def story_steps(self) -> List[int]:
        """Distinct story steps in increasing order."""
        return sorted({o.story_step for o in self.observations})

    def key(self) -> Tuple[frozenset, frozenset]:
        """Observational identity: entity set + observation set."""
        return frozenset(self.entities), frozenset(self.observations)


@dataclass(frozen=True)
class Diagnostic:
    """A validation finding; code is machine-checkable, message for humans."""

    code: str
    message: str

    def __str__(self) -> str:
        return "%s: %s" % (self.code, self.message)


class StorySyntaxError(ValueError):
    """Logic-form syntax or vocabulary error, with source position."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__("line %d, column %d: %s" % (line, column, message))
        self.line = line
        self.column = column


# ============================================================================
# parsing
# ============================================================================


def parse_story(source: str, story_id: Optional[str] = None) -> Story:
    """Parse logic-form text into a Story.

    Raises StorySyntaxError on malformed input, unknown predicates, or
    ill-formed observation facts (bad boolean token, non-numeric step).
    """
    story = Story(id=story_id)
    for fact, line, column in _iter_facts(source):
        _classify_fact(fact, line, column, story)
    return story


def _iter_facts(source: str):
    """Yield (term, line, column) for each `term.` fact, skipping % comments."""
    pos = 0
    length = len(source)
    line = 1
    line_start = 0

    def advance_to(p: int) -> None:
        nonlocal pos, line, line_start
        while pos < p:
            if source[pos] == "\n":
                line += 1
                line_start = pos + 1
            pos += 1

    while True:
        # skip whitespace and comments
        while pos < length:
            ch = source[pos]
            if ch.isspace():
                advance_to(pos + 1)
            elif ch == "%":
                end = source.find("\n", pos)
                advance_to(length if end < 0 else end)
            else:
                break
        if pos >= length:
            return
        fact_line, fact_col = line, pos - line_start + 1
        rest = source[pos:]
        try:
            term, consumed = _parse_term_at(rest, 0)
            consumed = _skip_ws(rest, consumed)
            if consumed >= len(rest) or rest[consumed] != ".":
                raise TermSyntaxError("expected '.' after fact", consumed)
        except TermSyntaxError as exc:
            err_pos = pos + exc.position
            err_line, err_col = _position_of(source, err_pos)
            raise StorySyntaxError(str(exc).rsplit(" (at column", 1)[0], err_line, err_col)
        advance_to(pos + consumed + 1)
        yield term, fact_line, fact_col


def _position_of(source: str, pos: int) -> Tuple[int, int]:
    line = source.count("\n", 0, pos) + 1
    last_nl = source.rfind("\n", 0, pos)
    return line, pos - (last_nl + 1) + 1


def _classify_fact(fact: Term, line: int, column: int, story: Story) -> None:
    if fact.functor in ENTITY_SORTS:
        if len(fact.args) != 1 or not fact.args[0].is_constant:
            raise StorySyntaxError(
                "sort fact %s expects a single constant" % fact.functor, line, column
            )
        story.entities.append(EntityDecl(name=fact.args[0].functor, sort=fact.functor))
        return
    if fact.functor in _OBS_PREDICATES:
        if len(fact.args) != 3:
            raise StorySyntaxError(
                "%s expects 3 arguments (subject, boolean, step)" % fact.functor,
                line,
                column,
            )
        subject, value_t, step_t = fact.args
        if value_t.render() not in ("true", "false"):
            raise StorySyntaxError(
                "boolean must be exactly true or false, got %s" % value_t.render(),
                line,
                column,
            )
        if not step_t.is_constant or not step_t.functor.isdigit():
            raise StorySyntaxError(
                "story step must be a non-negative integer, got %s" % step_t.render(),
                line,
                column,
            )
        story.observations.append(
            Observation(
                kind=_OBS_PREDICATES[fact.functor],
                subject=subject,
                value=value_t.render() == "true",
                story_step=int(step_t.functor),
            )
        )
        return
    raise StorySyntaxError("unknown predicate %s" % fact.functor, line, column)


# ============================================================================
# validation
# ============================================================================


def validate_story(story: Story, domain=None) -> List[Diagnostic]:
    """Check a story for well-sortedness; returns diagnostics, never raises.

    With a DomainSpec, observation subjects are checked against the domain
    signature (known symbol, arity, argument sorts). Without one, only the
    domain-independent checks run (duplicate entities, negative steps).
    """
    out: List[Diagnostic] = []
    seen = {}
    for ent in story.entities:
        if ent.name in seen and seen[ent.name] != ent.sort:
            out.append(
                Diagnostic(
                    "duplicate-entity",
                    "entity %s declared as both %s and %s"
                    % (ent.name, seen[ent.name], ent.sort),
                )
            )
        seen[ent.name] = ent.sort
        if domain is not None and ent.sort not in domain.sorts:
            out.append(
                Diagnostic("unknown-sort", "sort %s is not in the domain" % ent.sort)
            )
    for obs in story.observations:
        if obs.story_step < 0:
            out.append(
                Diagnostic(
                    "negative-step",
                    "story step %d in %s" % (obs.story_step, obs.render()),
                )
            )
        if domain is not None:
            out.extend(domain.check_term(obs.subject, obs.kind))
    return out


# ============================================================================
# serialization
# ============================================================================


def serialize_story(story: Story) -> str:
    """Canonical logic-form text: entities by (sort, name), observations by
    (story_step, kind, rendered term). parse(serialize(s)) == s."""
    lines = []
    for ent in sorted(story.entities, key=lambda e: (e.sort, e.name)):
        lines.append("%s(%s)." % (ent.sort, ent.name))
    obs_key = lambda o: (o.story_step, o.predicate(), o.subject.render(), o.value)
    for obs in sorted(story.observations, key=obs_key):
        lines.append(obs.render())
    return "\n".join(lines) + ("\n" if lines else "")
