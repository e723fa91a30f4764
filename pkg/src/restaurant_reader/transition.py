"""States, step occurrences, and the successor-state function.

A state is the set of true inertial fluent atoms; derived fluents are
evaluated from it on demand. An occurrence bundles everything that happens
at one reasoning step: physical actions, mental actions, and any abduced
interference events together with the actions they disturb.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

from restaurant_reader.domain import EXOGENOUS, DomainSpec
from restaurant_reader.terms import Term


class TransitionError(ValueError):
    """Raised when an occurrence cannot be applied to a state."""


# ============================================================================
# state
# ============================================================================


@dataclass(frozen=True)
class State:
    """Total valuation: an inertial atom is true iff it is in true_atoms;
    derived fluents follow from their definitions."""

    true_atoms: FrozenSet[Term]

    def holds(self, domain: DomainSpec, fluent: Term) -> bool:
        return domain.holds(self.true_atoms, fluent)

    def with_changes(self, adds: Iterable[Term], dels: Iterable[Term]) -> "State":
        return State((self.true_atoms - frozenset(dels)) | frozenset(adds))


# ============================================================================
# occurrences
# ============================================================================


@dataclass(frozen=True)
class Occurrence:
    """Everything that happens at one step.

    `interfered` lists the physical actions (a subset of `actions`) whose
    effects an interference event disturbs; each contributes one exogenous
    interference atom to the step.
    """

    step: int
    actions: FrozenSet[Term]
    interfered: FrozenSet[Term] = frozenset()

    def physicals(self, domain: DomainSpec) -> List[Term]:
        return [
            a
            for a in sorted(self.actions, key=Term.render)
            if not domain.is_mental(a) and a != EXOGENOUS
        ]

    def mentals(self, domain: DomainSpec) -> List[Term]:
        return [a for a in sorted(self.actions, key=Term.render) if domain.is_mental(a)]

    def render_atoms(self) -> List[str]:
        out = [
            "occurs(%s,%d)" % (a.render(), self.step)
            for a in self.actions
        ]
        out.extend("occurs(interference,%d)" % self.step for _ in self.interfered)
        return sorted(out)


def check_occurrence(
    domain: DomainSpec, state: State, occ: Occurrence
) -> List[str]:
    """Violation messages; empty means the occurrence is admissible here.

    Enforced invariants: every physical action is well-formed and executable;
    an agent contributes at most one physical and at most one mental action,
    never both; interference only disturbs co-occurring actions that have a
    nondeterministic alternative.
    """
    out: List[str] = []
    phys_by_agent: Dict[str, List[Term]] = {}
    ment_by_agent: Dict[str, List[Term]] = {}
    for act in sorted(occ.actions, key=Term.render):
        if act == EXOGENOUS:
            continue
        if domain.is_mental(act):
            agent = act.args[0].functor if act.args else "?"
            ment_by_agent.setdefault(agent, []).append(act)
            continue
        rule = domain.rule(act)
        if rule is None:
            out.append("ill-formed action %s" % act.render())
            continue
        if not domain.executable(state.true_atoms, act):
            out.append("%s is not executable in this state" % act.render())
        agent = domain.agent_of(act)
        if agent is not None:
            phys_by_agent.setdefault(agent, []).append(act)
    for agent, acts in phys_by_agent.items():
        if len(acts) > 1:
            out.append(
                "%s performs two physical actions at step %d" % (agent, occ.step)
            )
        if agent in ment_by_agent:
            out.append(
                "%s mixes mental and physical action at step %d" % (agent, occ.step)
            )
    for agent, acts in ment_by_agent.items():
        if len(acts) > 1:
            out.append(
                "%s performs two mental actions at step %d" % (agent, occ.step)
            )
    for target in sorted(occ.interfered, key=Term.render):
        if target not in occ.actions:
            out.append(
                "interference at step %d pairs with absent %s"
                % (occ.step, target.render())
            )
            continue
        rule = domain.rule(target)
        if rule is None or not rule.nondet:
            out.append(
                "interference cannot disturb %s (no alternative outcome)"
                % target.render()
            )
    return out


# ============================================================================
# successor computation
# ============================================================================


def successor_states(
    domain: DomainSpec, state: State, occ: Occurrence
) -> List[State]:
    """All states the occurrence can lead to.

    Deterministic steps yield a singleton. Each interfered action opens one
    branch per alternative outcome, and branches multiply. Inexecutable or
    ill-formed physical actions raise TransitionError.
    """
    branch_sets: List[List[Tuple[Tuple[Term, ...], Tuple[Term, ...]]]] = []
    for act in sorted(occ.actions, key=Term.render):
        if act == EXOGENOUS or domain.is_mental(act):
            continue
        rule = domain.rule(act)
        if rule is None:
            raise TransitionError("ill-formed action %s" % act.render())
        if not domain.executable(state.true_atoms, act):
            raise TransitionError(
                "%s is not executable in the given state" % act.render()
            )
        if act in occ.interfered:
            if not rule.nondet:
                raise TransitionError(
                    "interference cannot disturb %s" % act.render()
                )
            branch_sets.append([(alt, rule.dels) for alt in rule.nondet])
        else:
            branch_sets.append([(rule.adds, rule.dels)])
    out: List[State] = []
    seen = set()
    for combo in product(*branch_sets) if branch_sets else [()]:
        adds: List[Term] = []
        dels: List[Term] = []
        for a, d in combo:
            adds.extend(a)
            dels.extend(d)
        clash = set(adds) & set(dels)
        if clash:
            raise TransitionError(
                "conflicting effects on %s"
                % ", ".join(sorted(t.render() for t in clash))
            )
        nxt = state.with_changes(adds, dels)
        if nxt.true_atoms not in seen:
            seen.add(nxt.true_atoms)
            out.append(nxt)
    return out


def project(
    domain: DomainSpec, trajectory: Sequence[State], fluent: Term, step: int
) -> bool:
    """Truth of a fluent (inertial or derived) at a step of a trajectory."""
    if step < 0 or step >= len(trajectory):
        raise IndexError(
            "step %d outside trajectory of length %d" % (step, len(trajectory))
        )
    return trajectory[step].holds(domain, fluent)
