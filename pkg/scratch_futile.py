"""Scratch: futility and serendipity walks through the intention layer."""
from restaurant_reader.activities import customer_activity, waiter_sequence
from restaurant_reader.domain import build_restaurant_domain
from restaurant_reader.intentions import (
    GoalAgentState, SequenceState, goal_advance, goal_next_action,
    simple_advance, simple_next,
)
from restaurant_reader.logicform import EntityDecl
from restaurant_reader.terms import T
from restaurant_reader.transition import Occurrence, State, successor_states

ENTS = [
    EntityDecl("nicole", "customer"),
    EntityDecl("veg_r", "restaurant"),
    EntityDecl("lentil_soup", "food"),
    EntityDecl("waitress", "waitress"),
    EntityDecl("cook1", "cook"),
]


def walk(tag, init_changes, extra=None):
    dom = build_restaurant_domain(ENTS)
    spec = customer_activity(dom, "nicole", "lentil_soup", "s2")
    base = set(dom.initial_defaults())
    for f, v in init_changes:
        if v:
            base.add(f)
        else:
            base.discard(f)
    state = State(frozenset(base))
    ast = None
    wseq = SequenceState(
        waiter_sequence(dom, "waitress", "nicole", "lentil_soup", "lentil_soup", "b")
    )
    w_on = False
    print("==== %s" % tag)
    for step in range(0, 28):
        acts = set()
        label = "-"
        if ast is not None:
            prop = goal_next_action(dom, state.true_atoms, ast)
            label = prop.kind + (":" + prop.reason if prop.reason else "")
            if prop.kind in ("start", "stop", "replan"):
                acts.add(prop.action)
            elif prop.kind == "physical":
                if dom.executable(state.true_atoms, prop.action) and dom.protocol_ok(
                    state.true_atoms, prop.action
                ):
                    acts.add(prop.action)
        if not w_on and dom.holds(state.true_atoms, T("inside", "nicole")):
            w_on = True
        if w_on:
            nxt = simple_next(wseq)
            if (
                nxt is not None
                and dom.executable(state.true_atoms, nxt)
                and dom.protocol_ok(state.true_atoms, nxt)
            ):
                acts.add(nxt)
        if extra and step in extra:
            acts.add(extra[step])
        if step == 0:
            acts.add(T("select", "nicole", T("satiated_and_out", "nicole")))
        if not acts:
            print("%2d: (quiescent) prop=%s" % (step, label))
            break
        occ = Occurrence(step, frozenset(acts))
        print("%2d: %s   [%s]" % (step, ", ".join(sorted(a.render() for a in acts)), label))
        succs = successor_states(dom, state, occ)
        if ast is not None:
            ast = goal_advance(dom, state.true_atoms, ast, frozenset(acts))
        wseq = simple_advance(wseq, frozenset(acts))
        state = succs[0]
        if step == 0:
            ast = GoalAgentState.create(
                "nicole", T("satiated_and_out", "nicole"), spec, 0
            )


walk("futile: lentil soup never available", [(T("available", "lentil_soup"), False)])

# serendipity mechanics: the bill is already paid before the customer gets
# to her payment sub-activity; it should start and then stop right away
walk("serendipity: bill somehow paid from the start", [(T("paid", "b"), True)])
