"""Tests for the grounded restaurant knowledge base.

Covers construction (pools, bill assignment, error cases), the action rule
table, the relaxed reachability machinery, and static fluent evaluation.
"""

import pytest

from restaurant_reader.domain import (
    DEFAULT_BILL,
    LOCATIONS,
    MENU,
    DomainError,
    build_restaurant_domain,
)
from restaurant_reader.logicform import EntityDecl
from restaurant_reader.terms import T
from restaurant_reader.activities import (
    cook_sequence,
    customer_activity,
    waiter_sequence,
)


def decls(*pairs):
    return [EntityDecl(name, sort) for sort, name in pairs]


BASIC = decls(
    ("customer", "nicole"),
    ("restaurant", "texas"),
    ("waitress", "waitress"),
    ("cook", "cook1"),
    ("food", "miso_soup"),
)


@pytest.fixture
def dom():
    return build_restaurant_domain(BASIC)


# ============================================================================
# construction
# ============================================================================


def test_pools_populated(dom):
    assert dom.customers == ("nicole",)
    assert dom.waitresses == ("waitress",)
    assert dom.cooks == ("cook1",)
    assert dom.foods == ("miso_soup",)
    assert dom.restaurants == ("texas",)


def test_default_bill_inserted_first(dom):
    assert dom.bills[0] == DEFAULT_BILL
    assert dom.bill_of["nicole"] == DEFAULT_BILL


def test_declared_bill_kept():
    d = build_restaurant_domain(BASIC + decls(("bill", "b2")))
    assert d.bills == (DEFAULT_BILL, "b2")
    assert d.bill_of["nicole"] == DEFAULT_BILL


def test_declared_default_bill_not_duplicated():
    d = build_restaurant_domain(BASIC + decls(("bill", DEFAULT_BILL)))
    assert d.bills.count(DEFAULT_BILL) == 1


def test_second_customer_gets_fresh_bill():
    d = build_restaurant_domain(BASIC + decls(("customer", "mark")))
    assert d.bill_of["nicole"] == DEFAULT_BILL
    b2 = d.bill_of["mark"]
    assert b2 != DEFAULT_BILL
    assert b2 in d.bills


def test_bill_assignment_follows_declaration_order():
    d = build_restaurant_domain(
        decls(("customer", "zoe"), ("customer", "abe"))
        + BASIC[1:]
    )
    assert d.bill_of["zoe"] == DEFAULT_BILL
    assert d.bill_of["abe"] != DEFAULT_BILL


def test_no_customer_rejected():
    with pytest.raises(DomainError):
        build_restaurant_domain(BASIC[1:])


def test_two_waitresses_rejected():
    with pytest.raises(DomainError):
        build_restaurant_domain(BASIC + decls(("waitress", "w2")))


def test_unknown_sort_rejected():
    with pytest.raises(DomainError):
        build_restaurant_domain(BASIC + decls(("widget", "x")))


def test_sort_of_covers_builtins(dom):
    assert dom.sort_of("nicole") == "customer"
    assert dom.sort_of("kitchen") == "location"
    assert dom.sort_of(MENU) == "menu"
    assert dom.sort_of(DEFAULT_BILL) == "bill"
    assert dom.sort_of("nobody") is None


def test_persons_and_things(dom):
    assert set(dom.persons) == {"nicole", "waitress", "cook1"}
    assert MENU in dom.things
    assert DEFAULT_BILL in dom.things
    assert "miso_soup" in dom.things


# ============================================================================
# initial defaults
# ============================================================================


def test_initial_defaults_placements(dom):
    init = dom.initial_defaults()
    assert T("at", "nicole", "entrance") in init
    assert T("inside", "nicole") not in init
    assert T("at", "waitress", "t") in init
    assert T("inside", "waitress") in init
    assert T("at", "cook1", "kitchen") in init
    assert T("inside", "cook1") in init
    assert T("on", MENU, "t") in init
    assert T("open", "texas") in init
    assert T("available", "miso_soup") in init


def test_initial_defaults_people_sort():
    d = build_restaurant_domain(BASIC + decls(("people", "uncle")))
    init = d.initial_defaults()
    assert T("at", "uncle", "t") in init
    assert T("inside", "uncle") in init


# ============================================================================
# rule table
# ============================================================================


def test_enter_rule(dom):
    r = dom.rule(T("enter", "nicole", "texas"))
    assert T("at", "nicole", "entrance") in r.positive
    assert T("open", "texas") in r.positive
    assert T("inside", "nicole") in r.negative
    assert T("inside", "nicole") in r.adds


def test_pay_rule_has_protocol_only(dom):
    r = dom.rule(T("pay", "nicole", DEFAULT_BILL))
    assert r.positive == ()
    assert T("on", DEFAULT_BILL, "t") in r.protocol
    assert T("paid", DEFAULT_BILL) in r.adds


def test_order_rule_protocol_is_availability(dom):
    r = dom.rule(T("order", "nicole", "miso_soup", "waitress"))
    assert T("sitting", "nicole") in r.positive
    assert T("at", "waitress", "t") in r.positive
    assert T("available", "miso_soup") in r.protocol
    assert T("informed", "waitress", "miso_soup", "nicole") in r.adds


def test_leave_rule(dom):
    r = dom.rule(T("leave", "nicole"))
    assert T("at", "nicole", "entrance") in r.positive
    assert T("inside", "nicole") in r.positive
    assert T("inside", "nicole") in r.dels


def test_move_protocol_for_waitress(dom):
    to_kitchen = dom.rule(T("move", "waitress", "t", "kitchen"))
    assert any(p.functor == "informed" for p in to_kitchen.protocol)
    to_counter = dom.rule(T("move", "waitress", "t", "counter"))
    assert any(p.functor == "bill_generated" for p in to_counter.protocol)
    plain = dom.rule(T("move", "nicole", "t", "entrance"))
    assert plain.protocol == ()


def test_eat_rule(dom):
    r = dom.rule(T("eat", "nicole", "miso_soup"))
    assert T("sitting", "nicole") in r.positive
    assert T("on", "miso_soup", "t") in r.positive
    assert T("satiated", "nicole") in r.adds
    assert T("on", "miso_soup", "t") in r.dels


def test_unknown_action_has_no_rule(dom):
    assert dom.rule(T("fly", "nicole")) is None


def test_nondet_alternatives_scale_with_foods():
    d = build_restaurant_domain(
        BASIC + decls(("food", "rice"), ("food", "tea"))
    )
    order = d.rule(T("order", "nicole", "miso_soup", "waitress"))
    # interference may switch the informed food to either other dish
    assert len(order.nondet) == 2
    prepare = d.rule(T("prepare", "cook1", "miso_soup", "waitress"))
    assert len(prepare.nondet) == 2
    swapped = {alt[0].args[0].functor for alt in prepare.nondet}
    assert swapped == {"rice", "tea"}


def test_single_food_actions_are_interference_proof(dom):
    order = dom.rule(T("order", "nicole", "miso_soup", "waitress"))
    assert order.nondet == ()


def test_ground_actions_well_sorted(dom):
    actions = dom.ground_physical_actions()
    assert T("enter", "nicole", "texas") in actions
    assert T("prepare", "cook1", "miso_soup", "waitress") in actions
    for a in actions:
        assert dom.rule(a) is not None
        assert dom.check_term(a, "action-obs") == []


def test_activity_actions_all_declared(dom):
    """Every action a plan mentions must exist in the rule table."""
    act = customer_activity(dom, "nicole", "miso_soup", "s2")
    seqs = [
        waiter_sequence(
            dom, "waitress", "nicole", "miso_soup", "miso_soup", DEFAULT_BILL
        ),
        cook_sequence(dom, "cook1", "miso_soup", "waitress"),
    ]
    for a in act.flatten():
        assert dom.rule(a) is not None, a.render()
    for seq in seqs:
        for a in seq.actions:
            assert dom.rule(a) is not None, a.render()


# ============================================================================
# executability and protocol
# ============================================================================


def test_executable_checks_positive_and_negative(dom):
    init = frozenset(dom.initial_defaults())
    assert dom.executable(init, T("enter", "nicole", "texas"))
    inside = frozenset(init | {T("inside", "nicole")})
    assert not dom.executable(inside, T("enter", "nicole", "texas"))


def test_protocol_not_part_of_executability(dom):
    # paying with no bill on the table flouts practice but stays physically
    # possible, so a story may still report it
    init = frozenset(dom.initial_defaults())
    a = T("pay", "nicole", DEFAULT_BILL)
    assert dom.executable(init, a)
    assert not dom.protocol_ok(init, a)


def test_request_needs_informed_source(dom):
    at_kitchen = frozenset(
        {T("at", "waitress", "kitchen"), T("inside", "waitress")}
    )
    a = T("request", "waitress", "miso_soup", "cook1")
    assert not dom.executable(at_kitchen, a)
    told = frozenset(
        at_kitchen | {T("informed", "waitress", "miso_soup", "nicole")}
    )
    assert dom.executable(told, a)


# ============================================================================
# relaxed reachability
# ============================================================================


def test_relaxed_closure_grows_monotonically(dom):
    init = frozenset(dom.initial_defaults())
    closure = dom.relaxed_closure(init)
    assert init <= closure
    assert T("satiated", "nicole") in closure
    assert T("paid", DEFAULT_BILL) in closure


def test_unavailable_food_blocks_goal():
    ents = BASIC[:]
    d = build_restaurant_domain(ents)
    init = frozenset(d.initial_defaults() - {T("available", "miso_soup")})
    goal = T("satiated_and_out", "nicole")
    assert not d.goal_reachable(init, goal)
    assert d.goal_reachable(frozenset(d.initial_defaults()), goal)


def test_goal_reachable_honours_grants():
    d = build_restaurant_domain(BASIC)
    init = frozenset(d.initial_defaults() - {T("available", "miso_soup")})
    goal = T("ready_to_eat", "nicole")
    assert not d.goal_reachable(init, goal)
    granted = frozenset({T("order_transmitted", "nicole")})
    assert d.goal_reachable(init, goal, granted)


def test_action_reachable_includes_protocol(dom):
    init = frozenset(dom.initial_defaults())
    assert dom.action_reachable(init, T("order", "nicole", "miso_soup", "waitress"))
    no_food = frozenset(init - {T("available", "miso_soup")})
    assert not dom.action_reachable(
        no_food, T("order", "nicole", "miso_soup", "waitress")
    )
    # physically reachable actions without protocol constraints stay open
    assert dom.action_reachable(no_food, T("sit", "nicole"))


# ============================================================================
# static fluents
# ============================================================================


def test_statics_evaluate_from_base_fluents(dom):
    base = frozenset(
        {
            T("sitting", "nicole"),
            T("informed", "waitress", "miso_soup", "nicole"),
        }
    )
    assert dom.holds(base, T("order_transmitted", "nicole"))
    assert dom.holds(base, T("ready_to_eat", "nicole"))
    assert not dom.holds(base, T("done_with_payment", "nicole"))
    paid = frozenset(base | {T("paid", DEFAULT_BILL)})
    assert dom.holds(paid, T("done_with_payment", "nicole"))


def test_satiated_and_out_needs_both_parts(dom):
    sat = frozenset({T("satiated", "nicole")})
    assert dom.holds(sat, T("satiated_and_out", "nicole"))
    still_in = frozenset(sat | {T("inside", "nicole")})
    assert not dom.holds(still_in, T("satiated_and_out", "nicole"))


def test_served_and_billed_accepts_either_witness(dom):
    sat = T("satiated", "nicole")
    with_bill = frozenset({sat, T("on", DEFAULT_BILL, "t")})
    assert dom.holds(with_bill, T("served_and_billed", "nicole"))
    with_payment = frozenset({sat, T("paid", DEFAULT_BILL)})
    assert dom.holds(with_payment, T("served_and_billed", "nicole"))
    assert not dom.holds(frozenset({sat}), T("served_and_billed", "nicole"))


def test_plain_fluent_membership(dom):
    s = frozenset({T("sitting", "nicole")})
    assert dom.holds(s, T("sitting", "nicole"))
    assert not dom.holds(s, T("satiated", "nicole"))


# ============================================================================
# signature checking
# ============================================================================


def test_check_term_accepts_good_action(dom):
    assert dom.check_term(T("order", "nicole", "miso_soup", "waitress"), "action-obs") == []


def test_check_term_flags_unknown_symbol(dom):
    diags = dom.check_term(T("teleport", "nicole"), "action-obs")
    assert diags and diags[0].code == "unknown-symbol"


def test_check_term_flags_undeclared_entity(dom):
    diags = dom.check_term(T("enter", "ghost", "texas"), "action-obs")
    assert any(d.code == "undeclared-entity" for d in diags)


def test_check_term_flags_sort_mismatch(dom):
    # both entities exist but the argument sorts are swapped
    diags = dom.check_term(T("enter", "texas", "nicole"), "action-obs")
    assert any(d.code == "sort-mismatch" for d in diags)


def test_inertial_fluents_cover_locations(dom):
    fls = set(dom.inertial_fluents())
    for l in LOCATIONS:
        assert T("at", "nicole", l) in fls
    assert T("paid", DEFAULT_BILL) in fls
    assert T("available", "miso_soup") in fls
