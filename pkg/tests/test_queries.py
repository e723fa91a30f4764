"""Tests for question parsing, generation, and cautious answering."""

import pytest

from restaurant_reader.domain import build_restaurant_domain
from restaurant_reader.logicform import parse_story
from restaurant_reader.queries import (
    QUERY_FORMS,
    Query,
    QueryError,
    answer,
    explicit_actions,
    generate_queries,
    parse_query,
)
from restaurant_reader.reasoner import Config, solve
from restaurant_reader.terms import T

DINNER = """
customer(nicole).
restaurant(veg_r).
food(lentil_soup).
waitress(waitress).
cook(cook1).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(put(waitress,lentil_soup,t),true,2).
st_hpd(eat(nicole,lentil_soup),true,3).
st_hpd(leave(nicole),true,4).
"""

STRANGER_PAYS = """
customer(nicole).
restaurant(veg_r).
food(lentil_soup).
waitress(waitress).
cook(cook1).
people(owner).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(pay(owner,b),true,2).
st_hpd(put(waitress,lentil_soup,t),true,3).
"""

EARLY_PAY = """
customer(nicole).
restaurant(veg_r).
food(lentil_soup).
waitress(waitress).
cook(cook1).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
st_hpd(put(waitress,lentil_soup,t),true,2).
st_hpd(pay(nicole,b),true,3).
"""


@pytest.fixture(scope="module")
def dinner():
    story = parse_story(DINNER)
    dom = build_restaurant_domain(story.entities)
    models = solve(story, Config()).models
    return story, dom, models


@pytest.fixture(scope="module")
def stranger():
    story = parse_story(STRANGER_PAYS)
    dom = build_restaurant_domain(story.entities)
    models = solve(story, Config()).models
    return story, dom, models


# ============================================================================
# parsing and rendering
# ============================================================================


def test_render_parse_round_trip():
    eat = T("eat", "nicole", "lentil_soup")
    samples = [
        Query("yes_no", eat),
        Query("when", eat),
        Query("who", eat),
        Query("who_whom", T("greet", "waitress", "nicole")),
        Query("where", eat, person="nicole"),
        Query("goal", eat, person="nicole"),
        Query("intended", eat, person="nicole"),
        Query("what", eat, fluent=T("sitting", "nicole")),
    ]
    assert {q.form for q in samples} == set(QUERY_FORMS)
    for q in samples:
        assert parse_query(q.render()) == q


def test_parse_accepts_trailing_period():
    q = parse_query("query_yes_no(pay(nicole,b)).")
    assert q == Query("yes_no", T("pay", "nicole", "b"))


@pytest.mark.parametrize(
    "bad",
    [
        "pay(nicole,b)",
        "query_maybe(pay(nicole,b))",
        "query_yes_no(pay(nicole,b),extra)",
        "query_where(pay(nicole,b))",
        "query_what(pay(nicole,b))",
    ],
)
def test_parse_rejects_malformed(bad):
    with pytest.raises(QueryError):
        parse_query(bad)


# ============================================================================
# yes/no answers
# ============================================================================


def test_yes_when_every_model_agrees(dinner):
    _, dom, models = dinner
    a = answer(Query("yes_no", T("sit", "nicole")), models, dom)
    assert a.verdict == "yes"


def test_no_when_no_model_contains_it(stranger):
    _, dom, models = stranger
    a = answer(Query("yes_no", T("pay", "nicole", "b")), models, dom)
    assert a.verdict == "no"
    a2 = answer(Query("yes_no", T("leave", "nicole")), models, dom)
    assert a2.verdict == "yes"


def test_unknown_when_models_disagree():
    story = parse_story(EARLY_PAY)
    dom = build_restaurant_domain(story.entities)
    models = solve(story, Config(ti_mode="new_only")).models
    a = answer(
        Query("yes_no", T("pick_up", "waitress", "b", "counter")), models, dom
    )
    assert a.verdict == "unknown"


def test_answer_requires_models(dinner):
    _, dom, _ = dinner
    with pytest.raises(QueryError):
        answer(Query("yes_no", T("sit", "nicole")), [], dom)


# ============================================================================
# value answers
# ============================================================================


def test_when_observed_action_carries_story_step(dinner):
    _, dom, models = dinner
    a = answer(Query("when", T("eat", "nicole", "lentil_soup")), models, dom)
    assert a.verdict == "definite"
    assert a.when_details == ((17, 3),)


def test_when_implicit_action_has_no_story_step(dinner):
    _, dom, models = dinner
    a = answer(Query("when", T("sit", "nicole")), models, dom)
    assert a.verdict == "definite"
    assert a.when_details == ((6, None),)


def test_when_disjunctive_across_models(stranger):
    _, dom, models = stranger
    a = answer(Query("when", T("pay", "owner", "b")), models, dom)
    assert a.verdict == "disjunctive"
    assert a.values == ("11", "12", "13", "14", "15")
    assert all(story == 2 for _, story in a.when_details)


def test_where_person_at_action_time(dinner):
    _, dom, models = dinner
    a = answer(
        Query("where", T("eat", "nicole", "lentil_soup"), person="nicole"),
        models,
        dom,
    )
    assert (a.verdict, a.values) == ("definite", ("t",))


def test_who_and_who_whom(dinner):
    _, dom, models = dinner
    a = answer(Query("who", T("enter", "nicole", "veg_r")), models, dom)
    assert (a.verdict, a.values) == ("definite", ("nicole",))
    b = answer(
        Query("who_whom", T("greet", "waitress", "nicole")), models, dom
    )
    assert (b.verdict, b.values) == ("definite", ("waitress to nicole",))


def test_what_fluent_value_at_action_time(dinner):
    _, dom, models = dinner
    eat = T("eat", "nicole", "lentil_soup")
    a = answer(Query("what", eat, fluent=T("sitting", "nicole")), models, dom)
    assert (a.verdict, a.values) == ("definite", ("true",))
    b = answer(Query("what", eat, fluent=T("satiated", "nicole")), models, dom)
    assert (b.verdict, b.values) == ("definite", ("false",))


def test_what_for_unoccurring_action_is_unknown(dinner):
    _, dom, models = dinner
    a = answer(
        Query("what", T("eat", "cook1", "lentil_soup"), fluent=T("sitting", "nicole")),
        models,
        dom,
    )
    assert a.verdict == "unknown"
    assert a.values == ()


def test_goal_and_intended(dinner):
    _, dom, models = dinner
    eat = T("eat", "nicole", "lentil_soup")
    a = answer(Query("goal", eat, person="nicole"), models, dom)
    assert (a.verdict, a.values) == ("definite", ("satiated_and_out(nicole)",))
    b = answer(
        Query("intended", T("put", "waitress", "lentil_soup", "t"), person="waitress"),
        models,
        dom,
    )
    assert (b.verdict, b.values) == (
        "definite",
        ("w_seq(waitress,nicole,lentil_soup,lentil_soup)",),
    )
    c = answer(Query("intended", eat, person="nicole"), models, dom)
    assert (c.verdict, c.values) == (
        "definite",
        ("c_act(nicole,veg_r,waitress,lentil_soup)",),
    )


def test_answer_json_shape(dinner):
    _, dom, models = dinner
    a = answer(Query("when", T("sit", "nicole")), models, dom)
    js = a.to_json()
    assert js == {
        "form": "when",
        "verdict": "definite",
        "values": ["6"],
        "steps": [{"step": 6, "story_step": None}],
    }
    b = answer(Query("yes_no", T("sit", "nicole")), models, dom).to_json()
    assert "steps" not in b


# ============================================================================
# generation
# ============================================================================


def test_generation_is_deterministic(dinner):
    story, dom, _ = dinner
    first = generate_queries(story, dom, 1, 3)
    second = generate_queries(story, dom, 1, 3)
    assert first == second


def test_generation_counts_and_forms(dinner):
    story, dom, _ = dinner
    qs = generate_queries(story, dom, 2, 4)
    per_form = {}
    for q in qs:
        per_form.setdefault(q.form, []).append(q)
    assert set(per_form) == set(QUERY_FORMS)
    for form, group in per_form.items():
        assert 2 <= len(group) <= 4


def test_generation_skips_story_actions(dinner):
    story, dom, _ = dinner
    mentioned = explicit_actions(story)
    assert T("eat", "nicole", "lentil_soup") in mentioned
    qs = generate_queries(story, dom, 1, 50)
    assert all(q.action not in mentioned for q in qs)


def test_generation_bound_errors(dinner):
    story, dom, _ = dinner
    with pytest.raises(QueryError):
        generate_queries(story, dom, 3, 1)
    with pytest.raises(QueryError):
        generate_queries(story, dom, -1, 2)
    with pytest.raises(QueryError):
        generate_queries(story, dom, 10 ** 7, 10 ** 7)
