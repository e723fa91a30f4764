"""Question generation and cautious answering over a model set.

Eight question forms ask about a single ground physical action: whether it
happened, when, where a person was at the time, who did it (and to whom),
what a fluent's value was at the time, and what goal or activity the actor
was pursuing. Answers are cautious: a definite verdict must hold in every
model. Value answers collect what each model supports; an empty set reads
as unknown and a multi-valued set as a disjunction.
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from restaurant_reader.domain import DomainSpec
from restaurant_reader.logicform import ACTION_OBS, Story
from restaurant_reader.reasoner import Model
from restaurant_reader.terms import Term, parse_term

QUERY_FORMS = (
    "yes_no",
    "when",
    "where",
    "who",
    "who_whom",
    "what",
    "goal",
    "intended",
)

_PERSON_FORMS = ("where", "goal", "intended")


class QueryError(ValueError):
    """Raised for malformed queries or impossible generation bounds."""


# ============================================================================
# query and answer records
# ============================================================================


@dataclass(frozen=True)
class Query:
    """One question: a form, the action it asks about, and an optional
    person or fluent argument where the form requires one."""

    form: str
    action: Term
    person: Optional[str] = None
    fluent: Optional[Term] = None

    def render(self) -> str:
        if self.form in _PERSON_FORMS:
            return "query_%s(%s,%s)" % (self.form, self.person, self.action.render())
        if self.form == "what":
            return "query_what(%s,%s)" % (self.fluent.render(), self.action.render())
        return "query_%s(%s)" % (self.form, self.action.render())


@dataclass(frozen=True)
class Answer:
    """A cautious answer.

    verdict: for yes_no one of "yes" / "no" / "unknown"; for the value
    forms "definite" (one value in every model), "disjunctive" (several),
    or "unknown" (no model supports any value).
    values: the collected value strings, sorted.
    when_details: for the when form, (reasoning step, story step or None)
    pairs; a None story step marks an occurrence the story never mentions.
    """

    form: str
    verdict: str
    values: Tuple[str, ...] = ()
    when_details: Tuple[Tuple[int, Optional[int]], ...] = ()

    def to_json(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "form": self.form,
            "verdict": self.verdict,
            "values": list(self.values),
        }
        if self.form == "when":
            out["steps"] = [
                {"step": s, "story_step": ss} for s, ss in self.when_details
            ]
        return out


def parse_query(text: str) -> Query:
    """Parse the textual form, e.g. query_where(nicole,pay(nicole,b))."""
    term = parse_term(text.strip().rstrip("."))
    if not term.functor.startswith("query_"):
        raise QueryError("not a query: %s" % text)
    form = term.functor[len("query_"):]
    if form not in QUERY_FORMS:
        raise QueryError("unknown query form %s" % form)
    args = term.args
    if form in _PERSON_FORMS:
        if len(args) != 2 or args[0].args:
            raise QueryError("%s expects (person, action)" % form)
        return Query(form, args[1], person=args[0].functor)
    if form == "what":
        if len(args) != 2:
            raise QueryError("what expects (fluent, action)")
        return Query(form, args[1], fluent=args[0])
    if len(args) != 1:
        raise QueryError("%s expects a single action" % form)
    return Query(form, args[0])


# ============================================================================
# generation
# ============================================================================


def explicit_actions(story: Story) -> FrozenSet[Term]:
    """Actions the story mentions at any truth value; questions never ask
    about these."""
    return frozenset(
        o.subject for o in story.observations if o.kind == ACTION_OBS
    )


def generate_queries(
    story: Story, domain: DomainSpec, n: int, m: int
) -> List[Query]:
    """Between n and m questions of each form, over ground physical actions
    the story leaves implicit.

    Candidates are ordered canonically and the first m are taken, so
    generation is deterministic for a given story. Raises QueryError when
    n exceeds m or a form cannot reach n candidates.
    """
    if n < 0 or m < 0:
        raise QueryError("bounds must be non-negative")
    if n > m:
        raise QueryError("lower bound %d exceeds upper bound %d" % (n, m))
    excluded = explicit_actions(story)
    actions = [
        a
        for a in sorted(domain.ground_physical_actions(), key=Term.render)
        if a not in excluded
    ]
    persons = sorted(domain.persons)
    fluents = sorted(domain.inertial_fluents(), key=Term.render)
    out: List[Query] = []
    for form in QUERY_FORMS:
        if form in _PERSON_FORMS:
            pool = [
                Query(form, a, person=p) for p in persons for a in actions
            ]
        elif form == "what":
            pool = [
                Query(form, a, fluent=f) for f in fluents for a in actions
            ]
        else:
            pool = [Query(form, a) for a in actions]
        if len(pool) < n:
            raise QueryError(
                "form %s has only %d candidates, %d required"
                % (form, len(pool), n)
            )
        out.extend(pool[:m])
    return out


# ============================================================================
# answering
# ============================================================================


def _steps_of(model: Model, action: Term) -> List[int]:
    return [o.step for o in model.occurrences if action in o.actions]


def _matches(candidate: Term, asked: Term, free: Sequence[int]) -> bool:
    if candidate.functor != asked.functor or len(candidate.args) != len(
        asked.args
    ):
        return False
    for idx, (c, a) in enumerate(zip(candidate.args, asked.args)):
        if idx in free:
            continue
        if c != a:
            return False
    return True


def _value_answer(form: str, values: Set[str]) -> Answer:
    ordered = tuple(sorted(values))
    if not ordered:
        return Answer(form, "unknown")
    verdict = "definite" if len(ordered) == 1 else "disjunctive"
    return Answer(form, verdict, ordered)


def _person_positions(action: Term, domain: Optional[DomainSpec]) -> List[int]:
    """Argument positions after the agent that name a person."""
    out = []
    for idx, arg in enumerate(action.args):
        if idx == 0 or arg.args:
            continue
        if domain is not None:
            if domain.is_person(arg.functor):
                out.append(idx)
    return out


def _activities_running(model: Model, person: str, step: int) -> List[Term]:
    """Started-and-not-yet-stopped activities of a goal-driven agent at a
    step, outermost first, reconstructed from the mental occurrences.

    Starts nest outward-in, so stopping an activity also closes everything
    started after it (deeper levels never get a stop of their own)."""
    running: List[Term] = []
    for occ in sorted(model.occurrences, key=lambda o: o.step):
        if occ.step > step:
            break
        for act in occ.actions:
            if len(act.args) != 2 or act.args[0].functor != person:
                continue
            if act.functor == "start":
                running.append(act.args[1])
            elif act.functor == "stop" and act.args[1] in running:
                running = running[: running.index(act.args[1])]
    return running


def answer(
    query: Query,
    models: Sequence[Model],
    domain: Optional[DomainSpec] = None,
) -> Answer:
    """The cautious answer to one query over a nonempty model set."""
    if not models:
        raise QueryError("cannot answer over an empty model set")
    form = query.form
    action = query.action

    if form == "yes_no":
        hits = [bool(_steps_of(m, action)) for m in models]
        if all(hits):
            return Answer(form, "yes")
        if not any(hits):
            return Answer(form, "no")
        return Answer(form, "unknown")

    if form == "when":
        details: Set[Tuple[int, Optional[int]]] = set()
        for m in models:
            back = {i: s for s, i in m.mapping}
            for step in _steps_of(m, action):
                details.add((step, back.get(step)))
        ordered = tuple(sorted(details, key=lambda p: (p[0], p[1] is None)))
        values = tuple(str(s) for s, _ in ordered)
        if not ordered:
            return Answer(form, "unknown")
        verdict = "definite" if len({s for s, _ in ordered}) == 1 else "disjunctive"
        return Answer(form, verdict, values, ordered)

    if form == "where":
        values: Set[str] = set()
        for m in models:
            for step in _steps_of(m, action):
                state = m.trajectory[step]
                for atom in state:
                    if (
                        atom.functor == "at"
                        and atom.args
                        and atom.args[0].functor == query.person
                    ):
                        values.add(atom.args[1].functor)
        return _value_answer(form, values)

    if form == "who":
        values = set()
        for m in models:
            for occ in m.occurrences:
                for cand in occ.actions:
                    if _matches(cand, action, free=[0]) and cand.args:
                        values.add(cand.args[0].functor)
        return _value_answer(form, values)

    if form == "who_whom":
        free = [0] + _person_positions(action, domain)
        values = set()
        for m in models:
            for occ in m.occurrences:
                for cand in occ.actions:
                    if not _matches(cand, action, free=free):
                        continue
                    agent = cand.args[0].functor if cand.args else "?"
                    whom = [
                        cand.args[i].functor
                        for i in free
                        if i != 0 and i < len(cand.args)
                    ]
                    values.add(
                        "%s to %s" % (agent, whom[0]) if whom else agent
                    )
        return _value_answer(form, values)

    if form == "what":
        if query.fluent is None:
            raise QueryError("what requires a fluent argument")
        values = set()
        for m in models:
            for step in _steps_of(m, action):
                state = m.trajectory[step]
                if domain is not None:
                    v = domain.holds(state, query.fluent)
                else:
                    v = query.fluent in state
                values.add("true" if v else "false")
        return _value_answer(form, values)

    if form == "goal":
        values = set()
        for m in models:
            for step in _steps_of(m, action):
                for ag, goal, start, end in m.goal_spans:
                    if ag != query.person or start > step:
                        continue
                    if end is not None and step > end:
                        continue
                    values.add(goal.render())
        return _value_answer(form, values)

    if form == "intended":
        values = set()
        for m in models:
            for step in _steps_of(m, action):
                stamped = [
                    name
                    for name, s in m.intends
                    if s <= step and name.args
                    and name.args[0].functor == query.person
                ]
                for name in stamped:
                    values.add(name.render())
                running = _activities_running(m, query.person, step)
                if running:
                    values.add(running[-1].render())
        return _value_answer(form, values)

    raise QueryError("unknown query form %s" % form)
