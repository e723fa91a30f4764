"""The stereotypical restaurant plans.

Customers pursue a dine-out activity in one of three shapes: one flat action
list (s_flat), one nesting that carves out payment (s1), and the full
nesting with a get-ready phase that itself nests ordering (s2). Staff run a
serving plan (the waitress) and a cooking plan (the cook), used either as
bare intended sequences or wrapped into goal-directed activities, depending
on how the reasoner is configured.

All shapes flatten to the same physical action list, which keeps the three
customer structures comparable in benchmarks.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from restaurant_reader.domain import MENU, DomainSpec
from restaurant_reader.terms import T, Term

Component = Union[Term, "ActivitySpec"]


@dataclass(frozen=True)
class ActivitySpec:
    """A named activity: components in execution order plus a goal fluent.

    Components are physical action terms or nested ActivitySpecs. The owner
    is the agent whose intention the activity realizes; individual physical
    components may still belong to another agent (the customer's plan expects
    the waitress to seat them).
    """

    name: Term
    owner: str
    goal: Term
    components: Tuple[Component, ...]

    def flatten(self) -> List[Term]:
        out: List[Term] = []
        for c in self.components:
            if isinstance(c, ActivitySpec):
                out.extend(c.flatten())
            else:
                out.append(c)
        return out

    def nested(self) -> List["ActivitySpec"]:
        """This activity and every descendant, outermost first."""
        out: List[ActivitySpec] = [self]
        for c in self.components:
            if isinstance(c, ActivitySpec):
                out.extend(c.nested())
        return out


@dataclass(frozen=True)
class SequenceSpec:
    """A bare intended action sequence (no goal, no mental actions)."""

    name: Term
    owner: str
    actions: Tuple[Term, ...]


CUSTOMER_STRUCTURES = ("s_flat", "s1", "s2")


# ============================================================================
# customer plans
# ============================================================================


def _customer_actions(c: str, r: str, w: str, f: str, b: str) -> List[Term]:
    return [
        T("enter", c, r),
        T("lead_to", w, c, "t"),
        T("sit", c),
        T("pick_up", c, MENU, "t"),
        T("put", c, MENU, "t"),
        T("order", c, f, w),
        T("eat", c, f),
        T("request", c, b, w),
        T("pay", c, b),
        T("stand_up", c),
        T("move", c, "t", "entrance"),
        T("leave", c),
    ]


def customer_activity(
    domain: DomainSpec, customer: str, food: str, structure: str
) -> Optional[ActivitySpec]:
    """The customer's dine-out activity, or None when the story lacks the
    participants the plan mentions (restaurant, waitress, or the food)."""
    if structure not in CUSTOMER_STRUCTURES:
        raise ValueError("unknown customer structure %r" % structure)
    if not domain.restaurants or not domain.waitresses or food not in domain.foods:
        return None
    r = domain.restaurants[0]
    w = domain.waitresses[0]
    b = domain.bill_of[customer]
    acts = _customer_actions(customer, r, w, food, b)
    name = T("c_act", customer, r, w, food)
    goal = T("satiated_and_out", customer)
    if structure == "s_flat":
        return ActivitySpec(name, customer, goal, tuple(acts))
    pay_part = ActivitySpec(
        T("c_subact_p", customer, w),
        customer,
        T("done_with_payment", customer),
        (acts[7], acts[8]),
    )
    if structure == "s1":
        comps: Tuple[Component, ...] = tuple(acts[:7]) + (pay_part,) + tuple(acts[9:])
        return ActivitySpec(name, customer, goal, comps)
    order_part = ActivitySpec(
        T("c_subact_o", customer, food, w),
        customer,
        T("order_transmitted", customer),
        (acts[3], acts[4], acts[5]),
    )
    ready_part = ActivitySpec(
        T("c_subact_r", customer, r, w, food),
        customer,
        T("ready_to_eat", customer),
        (acts[0], acts[1], acts[2], order_part),
    )
    return ActivitySpec(
        name,
        customer,
        goal,
        (ready_part, acts[6], pay_part, acts[9], acts[10], acts[11]),
    )


# ============================================================================
# staff plans
# ============================================================================


def waiter_sequence(
    domain: DomainSpec, w: str, c: str, f1: str, f2: str, b: str
) -> Optional[SequenceSpec]:
    """The waitress's eleven-step serving routine for one customer: seat,
    relay the order (f1), deliver a dish (f2), fetch and present the bill."""
    if not domain.cooks:
        return None
    ck = domain.cooks[0]
    actions = (
        T("greet", w, c),
        T("lead_to", w, c, "t"),
        T("move", w, "t", "kitchen"),
        T("request", w, f1, ck),
        T("pick_up", w, f2, "kitchen"),
        T("move", w, "kitchen", "t"),
        T("put", w, f2, "t"),
        T("move", w, "t", "counter"),
        T("pick_up", w, b, "counter"),
        T("move", w, "counter", "t"),
        T("put", w, b, "t"),
    )
    return SequenceSpec(T("w_seq", w, c, f1, f2), w, actions)


def cook_sequence(domain: DomainSpec, ck: str, f: str, w: str) -> SequenceSpec:
    return SequenceSpec(T("ck_seq", ck, f, w), ck, (T("prepare", ck, f, w),))


def waitress_activity(
    domain: DomainSpec, w: str, c: str, f1: str, f2: str, b: str
) -> Optional[ActivitySpec]:
    """The serving routine wrapped as a goal-directed activity: the customer
    ends up fed and either paid-up or holding a bill."""
    seq = waiter_sequence(domain, w, c, f1, f2, b)
    if seq is None:
        return None
    return ActivitySpec(
        T("w_act", w, c, f1, f2),
        w,
        T("served_and_billed", c),
        seq.actions,
    )


def cook_activity(domain: DomainSpec, ck: str, f: str, w: str) -> ActivitySpec:
    """The cooking routine wrapped as a goal-directed activity: the requested
    dish sits ready in the kitchen."""
    seq = cook_sequence(domain, ck, f, w)
    return ActivitySpec(T("ck_act", ck, f, w), ck, T("on", f, "kitchen"), seq.actions)


def candidate_staff_sequences(
    domain: DomainSpec,
) -> Tuple[Dict[str, List[SequenceSpec]], Dict[str, Dict[str, SequenceSpec]]]:
    """All staff plan candidates the reader may attribute.

    Returns (waiter candidates per customer, cook candidates per cook and
    food). Waiter candidates range over order-food and served-food pairs;
    the bill is the customer's canonical one. The cook's candidate for a
    food is unique once the requesting waitress is fixed.
    """
    waiter: Dict[str, List[SequenceSpec]] = {}
    if domain.waitresses:
        w = domain.waitresses[0]
        for c in domain.customers:
            cands: List[SequenceSpec] = []
            for f1 in domain.foods:
                for f2 in domain.foods:
                    seq = waiter_sequence(domain, w, c, f1, f2, domain.bill_of[c])
                    if seq is not None:
                        cands.append(seq)
            waiter[c] = cands
    cook: Dict[str, Dict[str, SequenceSpec]] = {}
    if domain.waitresses:
        w = domain.waitresses[0]
        for ck in domain.cooks:
            cook[ck] = {f: cook_sequence(domain, ck, f, w) for f in domain.foods}
    return waiter, cook
