"""The cautious reader: every way a restaurant story can have unfolded.

A story pins down a handful of observed sentences; the reader fills in the
rest with stereotypical intentions. Each returned model lines the story's
sentences up with a reasoning timeline (a strictly increasing mapping),
schedules the physical and mental actions of every intentional agent, and
tracks the world state step by step. When no mishap-free reading fits the
observations, the reader abduces the fewest interference events that make
the story coherent.

Arbitration between what agents intend and what the story shows follows a
small law. An observed action that equals the actor's own due action simply
happens and advances the plan, even when a practice gate would have kept the
intended version waiting (the past is exempt from etiquette, not physics).
An actor with nothing runnable of their own may be observed doing anything
physically possible, without advancing any plan. An actor whose own next
action is runnable right now is not shown doing something else at that step;
the observation slides later instead. Mental actions are never displaced by
observations, with one exception: watching the agent perform the very action
they were about to give up on cancels the giving-up.
"""

import time
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from restaurant_reader.activities import (
    CUSTOMER_STRUCTURES,
    ActivitySpec,
    cook_activity,
    cook_sequence,
    customer_activity,
    waiter_sequence,
    waitress_activity,
)
from restaurant_reader.domain import DomainSpec, build_restaurant_domain
from restaurant_reader.intentions import (
    GoalAgentState,
    IntentionError,
    SequenceState,
    due_component,
    goal_advance,
    goal_next_action,
    simple_next,
    simple_advance,
)
from restaurant_reader.logicform import ACTION_OBS, FLUENT_OBS, Story
from restaurant_reader.terms import T, Term
from restaurant_reader.transition import (
    Occurrence,
    State,
    TransitionError,
    successor_states,
)

TI_MODES = ("mixed", "new_only")


class SolveTimeout(RuntimeError):
    """Raised when solve() exceeds the caller's wall-clock budget."""


# ============================================================================
# configuration
# ============================================================================


@dataclass
class Config:
    """Solver knobs.

    ti_mode chooses the theory of intentions for staff: "mixed" keeps the
    waitress and cook on bare intended sequences (no mental actions) while
    customers run goal-directed activities; "new_only" makes every
    intentional agent goal-directed. customer_structure picks how finely the
    customer plan is carved into sub-activities. max_steps bounds the
    reasoning timeline; None derives a bound that is long enough for every
    plan in play to run out. max_interferences caps how many unobserved
    mishaps the reader may posit while explaining a story.
    """

    ti_mode: str = "mixed"
    customer_structure: str = "s2"
    max_steps: Optional[int] = None
    max_interferences: int = 2

    def __post_init__(self) -> None:
        if self.ti_mode not in TI_MODES:
            raise ValueError("ti_mode must be one of %s" % (TI_MODES,))
        if self.customer_structure not in CUSTOMER_STRUCTURES:
            raise ValueError(
                "customer_structure must be one of %s" % (CUSTOMER_STRUCTURES,)
            )
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be non-negative")
        if self.max_interferences < 0:
            raise ValueError("max_interferences must be non-negative")


_STRUCTURE_ACTIVITY_COUNT = {"s_flat": 1, "s1": 2, "s2": 4}


def default_max_steps(domain: DomainSpec, story: Story, config: Config) -> int:
    """A step bound long enough for every plan the story can demand.

    Counts one slot per story sentence, two mental slots per activity that
    can be in play (start and stop), one slot per flattened plan action, and
    a little slack for selects and replans.
    """
    story_steps = len({o.story_step for o in story.observations})
    n_cust = len(domain.customers)
    acts = _STRUCTURE_ACTIVITY_COUNT[config.customer_structure] * n_cust
    if config.ti_mode == "new_only":
        acts += n_cust * (1 if domain.waitresses and domain.cooks else 0)
        acts += len(domain.cooks)
    flat = 12 * n_cust
    if domain.waitresses and domain.cooks:
        flat += 11 * n_cust
    flat += len(domain.cooks)
    return story_steps + 2 * acts + flat + 4


# ============================================================================
# models
# ============================================================================


@dataclass(frozen=True)
class Model:
    """One complete reading of a story.

    mapping: (story step, reasoning step) pairs, strictly increasing.
    occurrences: everything that happens, step by step.
    trajectory: the true inertial atoms at each reasoning step, starting
        at 0; trajectory[i] is the state the step-i occurrence fired in.
    intends: sequence intention stamps (name, step) for sequence-driven
        staff; empty when every agent is goal-driven.
    abduced: posited interference events as (step, disturbed action) pairs.
    goal_spans: (agent, goal, selected step, closed step or None) records,
        used to answer what an agent was after at a given moment.
    """

    mapping: Tuple[Tuple[int, int], ...]
    occurrences: Tuple[Occurrence, ...]
    trajectory: Tuple[FrozenSet[Term], ...]
    intends: Tuple[Tuple[Term, int], ...] = ()
    abduced: Tuple[Tuple[int, Term], ...] = ()
    goal_spans: Tuple[Tuple[str, Term, int, Optional[int]], ...] = ()

    @property
    def max_step(self) -> int:
        """The last step at which anything occurs (0 for an empty reading)."""
        last_occ = max((o.step for o in self.occurrences), default=0)
        last_map = max((i for _, i in self.mapping), default=0)
        return max(last_occ, last_map)

    def mapping_dict(self) -> Dict[int, int]:
        return dict(self.mapping)

    def occurs_atoms(self) -> List[str]:
        out: List[str] = []
        for occ in self.occurrences:
            out.extend(occ.render_atoms())
        return out

    def action_steps(self, action: Term) -> List[int]:
        return [o.step for o in self.occurrences if action in o.actions]

    def holds_atoms(self, domain: DomainSpec) -> List[str]:
        out: List[str] = []
        for step, atoms in enumerate(self.trajectory):
            shown = [a.render() for a in atoms]
            for c in domain.customers:
                for f in domain.STATIC_FLUENTS:
                    fl = T(f, c)
                    if domain.holds(atoms, fl):
                        shown.append(fl.render())
            for s in sorted(shown):
                out.append("holds(%s,%d)" % (s, step))
        return out

    def to_json(self, domain: DomainSpec) -> Dict[str, object]:
        return {
            "mapping": {str(s): i for s, i in self.mapping},
            "occurs": self.occurs_atoms(),
            "holds": self.holds_atoms(domain),
            "intend": [
                "intend(%s,%d)" % (name.render(), step)
                for name, step in self.intends
            ],
            "abduced": [
                {"step": step, "with": target.render()}
                for step, target in self.abduced
            ],
        }


@dataclass
class Result:
    """Everything solve() learned: the model set, or why it is empty."""

    models: List[Model]
    reason: Optional[str] = None


def enumerate_mappings(
    n_story_steps: int, n_reasoning_steps: int
) -> List[Tuple[int, ...]]:
    """All strictly increasing placements of the story steps onto the
    reasoning timeline; 2 into 3 gives (0,1), (0,2), (1,2)."""
    if n_story_steps < 0 or n_reasoning_steps < 0:
        raise ValueError("step counts must be non-negative")
    return [
        tuple(c) for c in combinations(range(n_reasoning_steps), n_story_steps)
    ]


# ============================================================================
# story preprocessing
# ============================================================================


@dataclass(frozen=True)
class _ObsGroup:
    story_step: int
    fluents: Tuple[Tuple[Term, bool], ...]
    true_actions: Tuple[Term, ...]
    false_actions: Tuple[Term, ...]


def _group_story(story: Story) -> List[_ObsGroup]:
    by_step: Dict[int, List] = {}
    for obs in story.observations:
        by_step.setdefault(obs.story_step, []).append(obs)
    groups = []
    for step in sorted(by_step):
        fl: List[Tuple[Term, bool]] = []
        ta: List[Term] = []
        fa: List[Term] = []
        for obs in sorted(by_step[step], key=lambda o: o.subject.render()):
            if obs.kind == FLUENT_OBS:
                fl.append((obs.subject, obs.value))
            elif obs.value:
                ta.append(obs.subject)
            else:
                fa.append(obs.subject)
        groups.append(_ObsGroup(step, tuple(fl), tuple(ta), tuple(fa)))
    return groups


# ============================================================================
# search nodes
# ============================================================================


class _Node:
    __slots__ = (
        "step",
        "state",
        "traj",
        "seqs",
        "goals",
        "spans",
        "triggered",
        "next_group",
        "mapping",
        "occs",
        "budget_used",
        "intends",
        "abduced",
    )

    def __init__(self, state: FrozenSet[Term]):
        self.step = 0
        self.state = state
        self.traj: List[FrozenSet[Term]] = [state]
        self.seqs: Dict[str, List[SequenceState]] = {}
        self.goals: Dict[str, GoalAgentState] = {}
        self.spans: List[List] = []
        self.triggered: Set[Tuple] = set()
        self.next_group = 0
        self.mapping: List[Tuple[int, int]] = []
        self.occs: List[Occurrence] = []
        self.budget_used = 0
        self.intends: List[Tuple[Term, int]] = []
        self.abduced: List[Tuple[int, Term]] = []


@dataclass
class _TriggerDelta:
    selects: Dict[str, Term] = field(default_factory=dict)
    new_asts: Dict[str, Tuple[Term, ActivitySpec]] = field(default_factory=dict)
    new_seqs: Dict[str, List[SequenceState]] = field(default_factory=dict)
    intends: List[Tuple[Term, int]] = field(default_factory=list)
    marks: FrozenSet = frozenset()


@dataclass
class _Admission:
    placed: Tuple[Term, ...] = ()
    fixed: Dict[str, Term] = field(default_factory=dict)
    deviations: Dict[str, FrozenSet[Term]] = field(default_factory=dict)
    suppressed: FrozenSet[str] = frozenset()


_EMPTY_ADMISSION = _Admission()


# ============================================================================
# the solver
# ============================================================================


class _Solver:
    def __init__(
        self,
        domain: DomainSpec,
        story: Story,
        config: Config,
        budget: int,
        deadline: Optional[float],
    ):
        self.domain = domain
        self.config = config
        self.budget = budget
        self.deadline = deadline
        self.groups = _group_story(story)
        self.max_steps = (
            config.max_steps
            if config.max_steps is not None
            else default_max_steps(domain, story, config)
        )
        observed_actors = {
            domain.agent_of(g)
            for grp in self.groups
            for g in grp.true_actions
        }
        self.story_customers = tuple(
            c for c in domain.customers if c in observed_actors
        )
        self.food_candidates: Dict[str, Tuple[str, ...]] = {}
        for c in self.story_customers:
            ordered = []
            for grp in self.groups:
                for a in grp.true_actions:
                    if (
                        a.functor == "order"
                        and a.args
                        and a.args[0].functor == c
                        and len(a.args) >= 2
                        and a.args[1].functor in domain.foods
                        and a.args[1].functor not in ordered
                    ):
                        ordered.append(a.args[1].functor)
            self.food_candidates[c] = tuple(ordered) if ordered else domain.foods
        self.models: Dict[Tuple, Model] = {}
        self.best_fail: Tuple[int, str] = (-1, "no consistent reading found")

    # -- bookkeeping ------------------------------------------------------

    def _fail(self, step: int, msg: str) -> None:
        if step > self.best_fail[0]:
            self.best_fail = (step, msg)

    def run(self) -> Tuple[List[Model], str]:
        stack = [_Node(frozenset(self.domain.initial_defaults()))]
        while stack:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise SolveTimeout("solve exceeded its time budget")
            node = stack.pop()
            stack.extend(self._expand(node))
        return list(self.models.values()), self.best_fail[1]

    # -- per-step expansion ------------------------------------------------

    def _expand(self, node: _Node) -> List[_Node]:
        dom = self.domain
        i = node.step
        children: List[_Node] = []
        if i > self.max_steps:
            if node.next_group < len(self.groups):
                self._fail(
                    i,
                    "story step %d cannot be placed within the step bound %d"
                    % (self.groups[node.next_group].story_step, self.max_steps),
                )
            else:
                self._finish(node)
            return children
        place_options = (
            [True, False] if node.next_group < len(self.groups) else [False]
        )
        for place in place_options:
            group = self.groups[node.next_group] if place else None
            ok, s_state = self._with_fluent_obs(group, node.state, i)
            if not ok:
                self._fail(
                    i,
                    "the observed values at story step %d fit no reasoning step"
                    % group.story_step,
                )
                continue
            deltas, conflict = self._trigger_options(node, s_state, i)
            if conflict is not None:
                self._fail(i, conflict)
                continue
            for delta in deltas:
                seqs_work = self._merge_seqs(node.seqs, delta.new_seqs)
                mentals, mreasons, own_due, forced, all_nexts = self._propose(
                    node, s_state, seqs_work, delta
                )
                if place:
                    adm = self._admit(
                        group, s_state, mentals, mreasons, own_due, forced,
                        all_nexts, node,
                    )
                    if adm is None:
                        self._fail(
                            i,
                            "the actions at story step %d cannot occur at "
                            "this point" % group.story_step,
                        )
                        continue
                else:
                    adm = _EMPTY_ADMISSION
                base_actions: Set[Term] = set(adm.placed)
                for ag, atom in mentals.items():
                    if ag not in adm.suppressed:
                        base_actions.add(atom)
                choice_lists: List[List[Tuple[str, Term]]] = []
                for ag in sorted(forced):
                    if ag in mentals and ag not in adm.suppressed:
                        continue
                    if ag in adm.fixed:
                        continue
                    opts = forced[ag]
                    if opts:
                        choice_lists.append([(ag, a) for a in opts])
                for combo in product(*choice_lists):
                    actions = set(base_actions)
                    for _, a in combo:
                        actions.add(a)
                    if place and any(
                        fa in actions for fa in group.false_actions
                    ):
                        continue
                    if not actions:
                        self._handle_quiet(node, i, s_state, place, group, delta)
                        continue
                    children.extend(
                        self._commit(
                            node, i, s_state, place, group, delta, adm, actions
                        )
                    )
        return children

    # -- observed-value handling -------------------------------------------

    def _with_fluent_obs(
        self, group: Optional[_ObsGroup], state: FrozenSet[Term], i: int
    ) -> Tuple[bool, FrozenSet[Term]]:
        if group is None or not group.fluents:
            return True, state
        dom = self.domain
        if i == 0:
            # values observed at the story's opening override the
            # stereotypical defaults; derived fluents cannot be set, only
            # checked against the overridden state
            working = set(state)
            checks: List[Tuple[Term, bool]] = []
            for f, v in group.fluents:
                if f.functor in dom.STATIC_FLUENTS:
                    checks.append((f, v))
                elif v:
                    working.add(f)
                else:
                    working.discard(f)
            out = frozenset(working)
            for f, v in checks:
                if dom.holds(out, f) != v:
                    return False, state
            return True, out
        for f, v in group.fluents:
            if dom.holds(state, f) != v:
                return False, state
        return True, state

    # -- goal positing -------------------------------------------------------

    def _trigger_options(
        self, node: _Node, s_state: FrozenSet[Term], i: int
    ) -> Tuple[List[_TriggerDelta], Optional[str]]:
        dom = self.domain
        new_only = self.config.ti_mode == "new_only"
        fired: List[Tuple[str, List[Tuple]]] = []
        marks: Set[Tuple] = set()
        if i == 0:
            for c in self.story_customers:
                key = ("cust", c)
                if key in node.triggered:
                    continue
                marks.add(key)
                goal = T("satiated_and_out", c)
                opts = []
                for f in self.food_candidates[c]:
                    spec = customer_activity(
                        dom, c, f, self.config.customer_structure
                    )
                    if spec is not None:
                        opts.append(("sel", c, T("select", c, goal), goal, spec))
                if opts:
                    fired.append((c, opts))
        for w in dom.waitresses:
            for c in dom.customers:
                key = ("w", w, c)
                if key in node.triggered or T("inside", c) not in s_state:
                    continue
                marks.add(key)
                bill = dom.bill_of[c]
                opts = []
                for f1 in dom.foods:
                    for f2 in dom.foods:
                        if new_only:
                            spec = waitress_activity(dom, w, c, f1, f2, bill)
                            if spec is not None:
                                opts.append(
                                    (
                                        "sel",
                                        w,
                                        T("select", w, T("served_and_billed", c)),
                                        T("served_and_billed", c),
                                        spec,
                                    )
                                )
                        else:
                            seq = waiter_sequence(dom, w, c, f1, f2, bill)
                            if seq is not None:
                                opts.append(
                                    ("seq", w, SequenceState(seq, 0, i), seq.name)
                                )
                if opts:
                    fired.append((w, opts))
        for ck in dom.cooks:
            for f in dom.foods:
                key = ("ck", ck, f)
                if key in node.triggered:
                    continue
                src = next(
                    (
                        w
                        for w in dom.waitresses
                        if T("informed", ck, f, w) in s_state
                    ),
                    None,
                )
                if src is None:
                    continue
                marks.add(key)
                if new_only:
                    spec = cook_activity(dom, ck, f, src)
                    opts = [
                        (
                            "sel",
                            ck,
                            T("select", ck, T("on", f, "kitchen")),
                            T("on", f, "kitchen"),
                            spec,
                        )
                    ]
                else:
                    seq = cook_sequence(dom, ck, f, src)
                    opts = [("seq", ck, SequenceState(seq, 0, i), seq.name)]
                fired.append((ck, opts))
        if not fired:
            delta = _TriggerDelta(marks=frozenset(marks))
            return [delta], None
        # one active goal per agent: a goal-driven agent cannot take on a
        # second pursuit while one is still underway
        goal_agents = [ag for ag, opts in fired if opts[0][0] == "sel"]
        for ag in goal_agents:
            if goal_agents.count(ag) > 1:
                return [], (
                    "%s would need two active goals at once (one goal per "
                    "agent)" % ag
                )
            ast = node.goals.get(ag)
            if ast is not None and goal_next_action(dom, s_state, ast).kind != "none":
                return [], (
                    "%s would need two active goals at once (one goal per "
                    "agent)" % ag
                )
        deltas = []
        for combo in product(*[opts for _, opts in fired]):
            delta = _TriggerDelta(marks=frozenset(marks))
            for opt in combo:
                if opt[0] == "sel":
                    _, ag, atom, goal, spec = opt
                    delta.selects[ag] = atom
                    delta.new_asts[ag] = (goal, spec)
                else:
                    _, ag, seq_state, name = opt
                    delta.new_seqs.setdefault(ag, []).append(seq_state)
                    delta.intends.append((name, i))
            deltas.append(delta)
        return deltas, None

    # -- step proposals ------------------------------------------------------

    @staticmethod
    def _merge_seqs(
        base: Dict[str, List[SequenceState]],
        extra: Dict[str, List[SequenceState]],
    ) -> Dict[str, List[SequenceState]]:
        if not extra:
            return base
        merged = {ag: list(lst) for ag, lst in base.items()}
        for ag, lst in extra.items():
            merged.setdefault(ag, []).extend(lst)
        return merged

    def _propose(
        self,
        node: _Node,
        s_state: FrozenSet[Term],
        seqs_work: Dict[str, List[SequenceState]],
        delta: _TriggerDelta,
    ):
        dom = self.domain
        mentals: Dict[str, Term] = {}
        mreasons: Dict[str, str] = {}
        own_due: Dict[str, Term] = {}
        forced: Dict[str, List[Term]] = {}
        all_nexts: Dict[str, List[Term]] = {}
        for ag, atom in delta.selects.items():
            mentals[ag] = atom
            mreasons[ag] = "select"
        for ag, ast in node.goals.items():
            if ag in mentals:
                continue
            prop = goal_next_action(dom, s_state, ast)
            if prop.kind in ("start", "stop", "replan"):
                mentals[ag] = prop.action
                mreasons[ag] = prop.reason or prop.kind
                due = due_component(ast)
                if due is not None and dom.agent_of(due) == ag:
                    own_due[ag] = due
            elif prop.kind == "physical":
                own_due[ag] = prop.action
                all_nexts.setdefault(ag, []).append(prop.action)
                if dom.executable(s_state, prop.action) and dom.protocol_ok(
                    s_state, prop.action
                ):
                    forced[ag] = [prop.action]
        for ag, lst in seqs_work.items():
            nexts: List[Term] = []
            ready: List[Term] = []
            for seq in lst:
                nxt = simple_next(seq)
                if nxt is None or nxt in nexts:
                    continue
                nexts.append(nxt)
                if dom.executable(s_state, nxt) and dom.protocol_ok(
                    s_state, nxt
                ):
                    ready.append(nxt)
            if nexts:
                all_nexts.setdefault(ag, []).extend(nexts)
            if ready:
                forced[ag] = ready
        return mentals, mreasons, own_due, forced, all_nexts

    # -- placing observed actions ---------------------------------------------

    def _admit(
        self,
        group: _ObsGroup,
        s_state: FrozenSet[Term],
        mentals: Dict[str, Term],
        mreasons: Dict[str, str],
        own_due: Dict[str, Term],
        forced: Dict[str, List[Term]],
        all_nexts: Dict[str, List[Term]],
        node: _Node,
    ) -> Optional[_Admission]:
        dom = self.domain
        fixed: Dict[str, Term] = {}
        devs: Dict[str, Set[Term]] = {}
        suppressed: Set[str] = set()
        seen_agents: Set[str] = set()
        for act in group.true_actions:
            ag = dom.agent_of(act)
            if ag is None:
                return None
            if ag in seen_agents:
                # one physical action per agent per step
                return None
            seen_agents.add(ag)
            runnable = dom.executable(s_state, act)
            if ag in mentals:
                if (
                    mreasons.get(ag) == "futile"
                    and own_due.get(ag) == act
                    and runnable
                ):
                    # seeing the agent take the very step they were about
                    # to despair of cancels the giving-up
                    suppressed.add(ag)
                    fixed[ag] = act
                    continue
                return None
            if forced.get(ag):
                if act in forced[ag]:
                    fixed[ag] = act
                    continue
                if act in all_nexts.get(ag, ()) and runnable:
                    # an intended step whose practice gate is shut can
                    # still be witnessed; the record outranks etiquette
                    fixed[ag] = act
                    continue
                return None
            if not runnable:
                return None
            if act == own_due.get(ag) or act in all_nexts.get(ag, ()):
                fixed[ag] = act
                continue
            # a free hand: nothing of their own to run, so any physically
            # possible action can be witnessed without advancing a plan;
            # but a sentence never describes a second performance of an
            # action the timeline already contains
            if any(act in occ.actions for occ in node.occs):
                return None
            if ag in node.goals:
                devs.setdefault(ag, set()).add(act)
        return _Admission(
            placed=group.true_actions,
            fixed=fixed,
            deviations={ag: frozenset(s) for ag, s in devs.items()},
            suppressed=frozenset(suppressed),
        )

    # -- committing a step ----------------------------------------------------

    def _commit(
        self,
        node: _Node,
        i: int,
        s_state: FrozenSet[Term],
        place: bool,
        group: Optional[_ObsGroup],
        delta: _TriggerDelta,
        adm: _Admission,
        actions: Set[Term],
    ) -> List[_Node]:
        dom = self.domain
        out: List[_Node] = []
        remaining = self.budget - node.budget_used
        eligible: List[Term] = []
        if remaining > 0:
            for a in sorted(actions, key=Term.render):
                rule = dom.rule(a)
                if rule is not None and rule.nondet:
                    eligible.append(a)
        subset_sizes = range(0, min(remaining, len(eligible)) + 1)
        frozen_actions = frozenset(actions)
        for size in subset_sizes:
            for subset in combinations(eligible, size):
                occ = Occurrence(i, frozen_actions, frozenset(subset))
                try:
                    succs = successor_states(dom, State(s_state), occ)
                except TransitionError:
                    continue
                for succ in succs:
                    child = self._apply(
                        node, i, s_state, place, group, delta, adm, occ, succ
                    )
                    if child is not None:
                        out.append(child)
        return out

    def _apply(
        self,
        node: _Node,
        i: int,
        s_state: FrozenSet[Term],
        place: bool,
        group: Optional[_ObsGroup],
        delta: _TriggerDelta,
        adm: _Admission,
        occ: Occurrence,
        succ: State,
    ) -> Optional[_Node]:
        dom = self.domain
        goals2: Dict[str, GoalAgentState] = {}
        for ag, ast in node.goals.items():
            filt = occ.actions - adm.deviations.get(ag, frozenset())
            try:
                goals2[ag] = goal_advance(dom, s_state, ast, filt)
            except IntentionError:
                return None
        spans2 = [list(s) for s in node.spans]
        for ag, ast2 in goals2.items():
            if ast2.achieved and not node.goals[ag].achieved:
                for span in reversed(spans2):
                    if span[0] == ag and span[3] is None:
                        span[3] = i
                        break
        seqs_work = self._merge_seqs(node.seqs, delta.new_seqs)
        seqs2 = {
            ag: [simple_advance(s, occ.actions) for s in lst]
            for ag, lst in seqs_work.items()
        }
        for ag, (goal, spec) in delta.new_asts.items():
            if ag in goals2:
                for span in reversed(spans2):
                    if span[0] == ag and span[3] is None:
                        span[3] = i
                        break
            goals2[ag] = GoalAgentState.create(ag, goal, spec, i)
            spans2.append([ag, goal, i, None])
        child = _Node(succ.true_atoms)
        child.step = i + 1
        child.traj = node.traj[:-1] + [s_state, succ.true_atoms]
        child.seqs = seqs2
        child.goals = goals2
        child.spans = spans2
        child.triggered = node.triggered | delta.marks
        child.next_group = node.next_group + (1 if place else 0)
        child.mapping = node.mapping + (
            [(group.story_step, i)] if place else []
        )
        child.occs = node.occs + [occ]
        child.budget_used = node.budget_used + len(occ.interfered)
        child.intends = node.intends + delta.intends
        child.abduced = node.abduced + [
            (i, t) for t in sorted(occ.interfered, key=Term.render)
        ]
        return child

    # -- silence ---------------------------------------------------------------

    def _handle_quiet(
        self,
        node: _Node,
        i: int,
        s_state: FrozenSet[Term],
        place: bool,
        group: Optional[_ObsGroup],
        delta: _TriggerDelta,
    ) -> None:
        remaining_after = node.next_group + (1 if place else 0)
        if remaining_after < len(self.groups):
            self._fail(
                i,
                "nothing occurs at step %d but story step %d is still "
                "unexplained"
                % (i, self.groups[remaining_after].story_step),
            )
            return
        if place and group.true_actions:
            return
        self._finish_quiet(node, i, s_state, place, group, delta)

    def _finish_quiet(
        self,
        node: _Node,
        i: int,
        s_state: FrozenSet[Term],
        place: bool,
        group: Optional[_ObsGroup],
        delta: _TriggerDelta,
    ) -> None:
        terminal = _Node(s_state)
        terminal.step = i
        terminal.traj = node.traj[:-1] + [s_state]
        terminal.seqs = self._merge_seqs(node.seqs, delta.new_seqs)
        terminal.goals = node.goals
        terminal.spans = node.spans
        terminal.next_group = node.next_group + (1 if place else 0)
        terminal.mapping = node.mapping + (
            [(group.story_step, i)] if place else []
        )
        terminal.occs = node.occs
        terminal.budget_used = node.budget_used
        terminal.intends = node.intends + delta.intends
        terminal.abduced = node.abduced
        self._finish(terminal)

    # -- recording models --------------------------------------------------------

    def _finish(self, node: _Node) -> None:
        mapping = tuple(node.mapping)
        occs = tuple(node.occs)
        traj = tuple(node.traj)
        intends = tuple(
            sorted(node.intends, key=lambda p: (p[1], p[0].render()))
        )
        abduced = tuple(node.abduced)
        spans = tuple(
            (ag, goal, start, end) for ag, goal, start, end in node.spans
        )
        model = Model(
            mapping=mapping,
            occurrences=occs,
            trajectory=traj,
            intends=intends,
            abduced=abduced,
            goal_spans=spans,
        )
        key = (
            tuple(m for occ in occs for m in occ.render_atoms()),
            traj,
            intends,
            tuple((s, t.render()) for s, t in abduced),
        )
        existing = self.models.get(key)
        if existing is None or mapping < existing.mapping:
            self.models[key] = model


# ============================================================================
# minimality and entry points
# ============================================================================


def _proper_submultiset(small: Counter, big: Counter) -> bool:
    if sum(small.values()) >= sum(big.values()):
        return False
    return all(small[k] <= big[k] for k in small)


def _minimal_models(models: List[Model]) -> List[Model]:
    """Drop readings whose posited mishaps strictly contain another
    reading's mishaps; the cautious reader blames as little as possible."""
    counters = [
        Counter((s, t.render()) for s, t in m.abduced) for m in models
    ]
    out = []
    for idx, m in enumerate(models):
        dominated = any(
            j != idx and _proper_submultiset(counters[j], counters[idx])
            for j in range(len(models))
        )
        if not dominated:
            out.append(m)
    return out


def _model_sort_key(model: Model) -> Tuple:
    return (
        model.mapping,
        tuple(m for occ in model.occurrences for m in occ.render_atoms()),
        tuple((n.render(), s) for n, s in model.intends),
        tuple((s, t.render()) for s, t in model.abduced),
    )


def solve(
    story: Story,
    config: Optional[Config] = None,
    domain: Optional[DomainSpec] = None,
    timeout_s: Optional[float] = None,
) -> Result:
    """Compute every cautious reading of a story.

    Models are unique up to occurrence content, state trajectory, and
    intention stamps; among placements that differ only in where silent
    sentences map, the earliest mapping is kept. Interference is abduced
    only when no mishap-free reading exists, and only minimal mishap sets
    survive. When no reading exists at all, the result carries a reason
    drawn from the deepest point the search reached.
    """
    cfg = config or Config()
    dom = domain or build_restaurant_domain(story.entities)
    deadline = time.monotonic() + timeout_s if timeout_s else None
    phase0 = _Solver(dom, story, cfg, 0, deadline)
    models, hint = phase0.run()
    if not models and cfg.max_interferences > 0:
        full = _Solver(dom, story, cfg, cfg.max_interferences, deadline)
        models, hint = full.run()
        models = _minimal_models(models)
    models.sort(key=_model_sort_key)
    return Result(models=models, reason=None if models else hint)


# ============================================================================
# grouping models into explanations
# ============================================================================


_MISHAP_WORDING = (
    ("order", "the waitress misheard the customer's order"),
    ("request", "the cook misheard the relayed order"),
    ("prepare", "the cook prepared a different dish than the one asked for"),
    ("pick_up_food", "the waitress picked up the wrong dish in the kitchen"),
    ("pick_up_bill", "the waitress picked up the wrong bill from the counter"),
)


@dataclass(frozen=True)
class Explanation:
    """One diagnosis class: which staff plans were in play, which mishaps
    are posited, and which models realize it."""

    label: str
    waiter: Optional[str]
    cook: Optional[str]
    interferences: Tuple[Tuple[int, str], ...]
    model_indices: Tuple[int, ...]


def _mishap_kind(domain: DomainSpec, target: Term) -> str:
    if target.functor == "pick_up" and len(target.args) >= 2:
        if target.args[1].functor in domain.bills:
            return "pick_up_bill"
        return "pick_up_food"
    return target.functor


def _mishap_label(domain: DomainSpec, abduced: Sequence[Tuple[int, Term]]) -> str:
    if not abduced:
        return "everything went according to plan"
    wording = dict(_MISHAP_WORDING)
    parts = []
    for _, target in abduced:
        kind = _mishap_kind(domain, target)
        parts.append(wording.get(kind, "an unobserved mishap disturbed %s" % target.render()))
    return "; ".join(parts)


def _staff_params(domain: DomainSpec, model: Model) -> Tuple[Optional[str], Optional[str]]:
    waiter_terms: List[Term] = []
    cook_terms: List[Term] = []
    for name, _ in model.intends:
        if name.functor == "w_seq":
            waiter_terms.append(name)
        elif name.functor == "ck_seq":
            cook_terms.append(name)
    for occ in model.occurrences:
        for a in occ.actions:
            if a.functor == "start" and len(a.args) == 2:
                act = a.args[1]
                if act.functor == "w_act":
                    waiter_terms.append(T("w_seq", *[x.functor for x in act.args]))
                elif act.functor == "ck_act":
                    cook_terms.append(T("ck_seq", *[x.functor for x in act.args]))
    served: Dict[str, Tuple[str, str]] = {}
    for occ in model.occurrences:
        for a in occ.actions:
            if a.functor == "put" and len(a.args) == 3 and a.args[2].functor == "t":
                who = a.args[0].functor
                thing = a.args[1].functor
                if who in domain.waitresses:
                    if thing in domain.foods:
                        served[who] = ("food", thing)
                    elif thing in domain.bills:
                        served.setdefault(who + "/bill", ("bill", thing))
    waiter_out = []
    for wt in waiter_terms:
        w, c, f1, f2 = [x.functor for x in wt.args]
        bill = domain.bill_of.get(c, "")
        sf = served.get(w)
        if sf is not None and sf[0] == "food":
            f2 = sf[1]
        sb = served.get(w + "/bill")
        if sb is not None:
            bill = sb[1]
        waiter_out.append("w_seq(%s,%s,%s,%s,%s)" % (w, c, f1, f2, bill))
    cook_out = [ct.render() for ct in cook_terms]
    return (
        "; ".join(sorted(set(waiter_out))) if waiter_out else None,
        "; ".join(sorted(set(cook_out))) if cook_out else None,
    )


def explain(domain: DomainSpec, models: Sequence[Model]) -> List[Explanation]:
    """Group a model set into diagnosis classes by staff plans in play and
    posited interference placements."""
    grouped: Dict[Tuple, List[int]] = {}
    meta: Dict[Tuple, Tuple] = {}
    for idx, model in enumerate(models):
        waiter, cook = _staff_params(domain, model)
        inter = tuple((s, t.render()) for s, t in model.abduced)
        key = (waiter, cook, inter)
        grouped.setdefault(key, []).append(idx)
        meta[key] = (waiter, cook, inter, model.abduced)
    out = []
    for key in sorted(grouped, key=lambda k: (k[2], k[0] or "", k[1] or "")):
        waiter, cook, inter, abduced = meta[key]
        out.append(
            Explanation(
                label=_mishap_label(domain, abduced),
                waiter=waiter,
                cook=cook,
                interferences=inter,
                model_indices=tuple(grouped[key]),
            )
        )
    return out
