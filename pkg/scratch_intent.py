"""Scratch: drive GoalAgentState through hand-built traces."""
from restaurant_reader.activities import customer_activity, waiter_sequence, cook_sequence
from restaurant_reader.domain import build_restaurant_domain
from restaurant_reader.intentions import (
    GoalAgentState, SequenceState, due_component, goal_advance,
    goal_next_action, simple_advance, simple_next,
)
from restaurant_reader.logicform import EntityDecl
from restaurant_reader.terms import T, Term
from restaurant_reader.transition import Occurrence, State, successor_states

ENTS = [
    EntityDecl("nicole", "customer"),
    EntityDecl("veg_r", "restaurant"),
    EntityDecl("lentil_soup", "food"),
    EntityDecl("waitress", "waitress"),
    EntityDecl("cook1", "cook"),
]
dom = build_restaurant_domain(ENTS)
spec = customer_activity(dom, "nicole", "lentil_soup", "s2")
print("customer top:", spec.name.render(), "flat:", len(spec.flatten()))

ast = None
state = State(frozenset(dom.initial_defaults()))
wseq = SequenceState(waiter_sequence(dom, "waitress", "nicole", "lentil_soup", "lentil_soup", "b"))
ckseq = None
w_started = False
ck_started = False

# mixed-mode hand arbitration: customer goal-driven, staff sequence-driven
for step in range(0, 32):
    acts = set()
    label = "-"
    if ast is not None:
        prop = goal_next_action(dom, state.true_atoms, ast)
        label = prop.kind + (":" + prop.reason if prop.reason else "")
        if prop.kind in ("start", "stop", "replan"):
            acts.add(prop.action)
        elif prop.kind == "physical":
            if dom.executable(state.true_atoms, prop.action) and dom.protocol_ok(state.true_atoms, prop.action):
                acts.add(prop.action)
    # waitress triggered at step 4 (inside holds)
    if not w_started and dom.holds(state.true_atoms, T("inside", "nicole")):
        w_started = True
        print("  [w intend at %d]" % step)
    if w_started:
        nxt = simple_next(wseq)
        if nxt is not None and dom.executable(state.true_atoms, nxt) and dom.protocol_ok(state.true_atoms, nxt):
            acts.add(nxt)
    if not ck_started and any(
        T("informed", "cook1", f, "waitress") in state.true_atoms for f in dom.foods
    ):
        ck_started = True
        ckseq = SequenceState(cook_sequence(dom, "cook1", "lentil_soup", "waitress"))
        print("  [ck intend at %d]" % step)
    if ck_started and ckseq is not None:
        nxt = simple_next(ckseq)
        if nxt is not None and dom.executable(state.true_atoms, nxt) and dom.protocol_ok(state.true_atoms, nxt):
            acts.add(nxt)
    if step == 0:
        acts.add(T("select", "nicole", T("satiated_and_out", "nicole")))
    if not acts:
        print("%2d: (quiescent)  prop=%s" % (step, label))
        break
    occ = Occurrence(step, frozenset(acts))
    print("%2d: %s" % (step, ", ".join(sorted(a.render() for a in acts))))
    succs = successor_states(dom, state, occ)
    assert len(succs) == 1, succs
    filtered = frozenset(a for a in acts)
    if ast is not None:
        ast = goal_advance(dom, state.true_atoms, ast, filtered)
    wseq = simple_advance(wseq, filtered)
    if ckseq is not None:
        ckseq = simple_advance(ckseq, filtered)
    state = succs[0]
    if step == 0:
        ast = GoalAgentState.create(
            "nicole", T("satiated_and_out", "nicole"), spec, 0
        )

print("achieved:", ast.achieved, "| waitress index:", wseq.index)
