"""Two theories of intended behavior.

Sequence-driven agents (the older reading) commit to a bare action sequence
and execute it action by action, without mental events, as soon as each step
becomes possible. Goal-driven agents (the newer reading) hold one active
goal realized by a hierarchy of activities; they start and stop activities
with explicit mental actions, stop early when a goal turns out to hold
already, give up when the next step can never work again, and replan when
the goal itself is still within reach.

Futility here is myopic and optimistic: an action (or a sub-activity goal)
is hopeless only when even a never-undo reading of the world cannot make it
possible again. Agents whose next step is merely blocked keep waiting.
"""

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from restaurant_reader.activities import ActivitySpec, SequenceSpec
from restaurant_reader.domain import DomainSpec
from restaurant_reader.terms import T, Term


class IntentionError(ValueError):
    """Raised when an occurrence contradicts an agent's tracked intention."""


# ============================================================================
# sequence-driven agents
# ============================================================================


@dataclass(frozen=True)
class SequenceState:
    """Progress through one intended sequence (a flattened index)."""

    spec: SequenceSpec
    index: int = 0
    intended_at: int = 0

    @property
    def done(self) -> bool:
        return self.index >= len(self.spec.actions)


def simple_next(seq: SequenceState) -> Optional[Term]:
    """The action the sequence calls for next; None once it is finished."""
    if seq.done:
        return None
    return seq.spec.actions[seq.index]


def simple_advance(seq: SequenceState, occurred: FrozenSet[Term]) -> SequenceState:
    """Advance past the next action if this step's occurrence contains it."""
    nxt = simple_next(seq)
    if nxt is not None and nxt in occurred:
        return replace(seq, index=seq.index + 1)
    return seq


# ============================================================================
# goal-driven agents
# ============================================================================


@dataclass(frozen=True)
class Proposal:
    """What a goal-driven agent is up to at a step.

    kind: "start" | "stop" | "replan" (mental, action holds the atom),
          "physical" (own next action), "await" (someone else's move),
          "none" (nothing to do or nothing left to try).
    target names the activity a mental action operates on. reason records
    why a stop was proposed ("goal", "finished", "cascade", "futile"); an
    observed occurrence of the due action may override a futile stop, since
    the evidence shows the agent pressing on rather than giving up.
    """

    kind: str
    action: Optional[Term] = None
    target: Optional[Term] = None
    reason: str = ""


@dataclass
class GoalAgentState:
    """One agent's single active goal and activity bookkeeping.

    statuses: -1 for not started (or no longer running), else the index of
    the component currently due. stopped remembers activities that already
    ran and were closed; failed marks the ones closed without their goal or
    completion, which is what makes a parent cascade its own stop.
    """

    agent: str
    goal: Term
    selected_at: int
    top: ActivitySpec
    registry: Dict[Term, ActivitySpec] = field(default_factory=dict)
    parents: Dict[Term, Term] = field(default_factory=dict)
    statuses: Dict[Term, int] = field(default_factory=dict)
    stopped: Set[Term] = field(default_factory=set)
    failed: Set[Term] = field(default_factory=set)
    replanned: bool = False
    achieved: bool = False

    @classmethod
    def create(cls, agent: str, goal: Term, top: ActivitySpec, selected_at: int):
        ast = cls(agent=agent, goal=goal, selected_at=selected_at, top=top)
        for spec in top.nested():
            ast.registry[spec.name] = spec
            ast.statuses[spec.name] = -1
            for comp in spec.components:
                if isinstance(comp, ActivitySpec):
                    ast.parents[comp.name] = spec.name
        return ast

    def clone(self) -> "GoalAgentState":
        return GoalAgentState(
            agent=self.agent,
            goal=self.goal,
            selected_at=self.selected_at,
            top=self.top,
            registry=self.registry,
            parents=self.parents,
            statuses=dict(self.statuses),
            stopped=set(self.stopped),
            failed=set(self.failed),
            replanned=self.replanned,
            achieved=self.achieved,
        )

    def snapshot(self) -> Tuple:
        return (
            self.agent,
            self.goal,
            tuple(sorted(self.statuses.items(), key=lambda kv: kv[0].render())),
            frozenset(self.stopped),
            frozenset(self.failed),
            self.replanned,
            self.achieved,
        )

    def chain(self) -> List[ActivitySpec]:
        """The in-progress nesting, outermost first; empty if none running."""
        out: List[ActivitySpec] = []
        spec = self.top
        if self.statuses[spec.name] < 0:
            return out
        while True:
            out.append(spec)
            k = self.statuses[spec.name]
            if k >= len(spec.components):
                return out
            comp = spec.components[k]
            if isinstance(comp, ActivitySpec) and self.statuses[comp.name] >= 0:
                spec = comp
                continue
            return out


def due_component(ast: GoalAgentState) -> Optional[Term]:
    """The physical action the running plan points at right now (own or
    another agent's), before any goal or hopelessness considerations.
    None when nothing is running or a mental move is due instead."""
    if ast.statuses[ast.top.name] < 0:
        return None
    chain = ast.chain()
    inner = chain[-1]
    k = ast.statuses[inner.name]
    if k >= len(inner.components):
        return None
    comp = inner.components[k]
    if isinstance(comp, ActivitySpec):
        return None
    return comp


def goal_next_action(
    domain: DomainSpec, true_set: FrozenSet[Term], ast: GoalAgentState
) -> Proposal:
    """The agent's move given the current state.

    Precedence: the outermost running activity whose goal already holds is
    stopped first; a finished innermost activity is stopped; a failed child
    cascades a stop one level up; a hopeless next component stops the
    activity that contains it; otherwise the due component is started,
    executed, or awaited. With everything closed, a still-reachable goal
    earns one replan, after which the cautious reader posits nothing new.
    """
    agent = ast.agent
    if ast.achieved:
        return Proposal("none")
    if ast.statuses[ast.top.name] < 0:
        if ast.top.name in ast.stopped:
            if (
                ast.top.name in ast.failed
                and not ast.replanned
                and domain.goal_reachable(true_set, ast.goal)
            ):
                return Proposal(
                    "replan", T("replan", agent, ast.goal), ast.top.name
                )
            return Proposal("none")
        if domain.holds(true_set, ast.goal):
            return Proposal("none")
        return Proposal("start", T("start", agent, ast.top.name), ast.top.name)

    chain = ast.chain()
    for spec in chain:
        if domain.holds(true_set, spec.goal):
            return Proposal("stop", T("stop", agent, spec.name), spec.name, "goal")
    inner = chain[-1]
    k = ast.statuses[inner.name]
    if k >= len(inner.components):
        return Proposal(
            "stop", T("stop", agent, inner.name), inner.name, "finished"
        )
    comp = inner.components[k]
    if isinstance(comp, ActivitySpec):
        if comp.name in ast.stopped:
            return Proposal(
                "stop", T("stop", agent, inner.name), inner.name, "cascade"
            )
        # entering a sub-activity: judge its goal while trusting any deeper
        # sub-plans to deliver theirs, so hopelessness is noticed exactly
        # when the hopeless stretch of the plan comes due and not before
        grants = frozenset(
            d.goal for d in comp.nested() if d.name != comp.name
        )
        if not domain.goal_reachable(true_set, comp.goal, grants):
            return Proposal(
                "stop", T("stop", agent, inner.name), inner.name, "futile"
            )
        return Proposal("start", T("start", agent, comp.name), comp.name)
    if not domain.action_reachable(true_set, comp):
        return Proposal(
            "stop", T("stop", agent, inner.name), inner.name, "futile"
        )
    owner = domain.agent_of(comp)
    if owner != agent:
        return Proposal("await", comp, inner.name)
    return Proposal("physical", comp, inner.name)


def goal_advance(
    domain: DomainSpec,
    true_set: FrozenSet[Term],
    ast: GoalAgentState,
    occurred: FrozenSet[Term],
) -> GoalAgentState:
    """Fold one step's occurrence into the agent's intention state.

    true_set is the state the occurrence happened in; stop outcomes (goal
    held, merely finished, or failed) are judged against it. A physical
    action of this agent that is not the due component raises IntentionError:
    goal-driven agents do not wander off their plan.
    """
    out = ast.clone()
    due = due_component(ast)
    inner_name = ast.chain()[-1].name if ast.statuses[ast.top.name] >= 0 else None
    for act in sorted(occurred, key=Term.render):
        if domain.is_mental(act):
            if not act.args or act.args[0].functor != ast.agent:
                continue
            if act.functor == "select":
                # goal selection creates a fresh agent state; an existing
                # one never folds it in
                continue
            _apply_mental(domain, true_set, out, act)
            continue
        actor = domain.agent_of(act)
        if due is not None and act == due:
            out.statuses[inner_name] += 1
            continue
        if actor == ast.agent:
            raise IntentionError(
                "%s is not %s's next intended action" % (act.render(), ast.agent)
            )
    return out


def _apply_mental(
    domain: DomainSpec, true_set: FrozenSet[Term], ast: GoalAgentState, act: Term
) -> None:
    if act.functor == "start":
        name = act.args[1]
        if name not in ast.registry:
            raise IntentionError("start of unknown activity %s" % name.render())
        ast.statuses[name] = 0
        return
    if act.functor == "stop":
        name = act.args[1]
        spec = ast.registry.get(name)
        if spec is None or ast.statuses[name] < 0:
            raise IntentionError("stop of inactive activity %s" % name.render())
        achieved = domain.holds(true_set, spec.goal)
        finished = ast.statuses[name] >= len(spec.components)
        for desc in spec.nested():
            if ast.statuses[desc.name] >= 0:
                ast.statuses[desc.name] = -1
                ast.stopped.add(desc.name)
        if achieved or finished:
            parent = ast.parents.get(name)
            if parent is not None:
                ast.statuses[parent] += 1
            elif achieved:
                ast.achieved = True
            else:
                # the whole plan ran its course without reaching the goal
                ast.failed.add(name)
        else:
            ast.failed.add(name)
        return
    if act.functor == "replan":
        ast.replanned = True
        return
    raise IntentionError("unexpected mental action %s" % act.render())


def classify_goal(
    domain: DomainSpec, true_set: FrozenSet[Term], goal: Term
) -> str:
    """achieved if the goal holds now, futile if no never-undo evolution can
    make it hold, in-progress otherwise."""
    if domain.holds(true_set, goal):
        return "achieved"
    if not domain.goal_reachable(true_set, goal):
        return "futile"
    return "in-progress"
