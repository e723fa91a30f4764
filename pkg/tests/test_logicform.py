"""Logic-form parsing, validation, and the serialize round trip."""

import random

import pytest

from restaurant_reader.domain import build_restaurant_domain
from restaurant_reader.logicform import (
    ACTION_OBS,
    FLUENT_OBS,
    Story,
    StorySyntaxError,
    parse_story,
    serialize_story,
    validate_story,
)
from restaurant_reader.terms import T

EX1 = """
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


# ============================================================================
# parsing
# ============================================================================


def test_parse_example_story():
    story = parse_story(EX1)
    assert story.of_sort("customer") == ["nicole"]
    assert story.of_sort("waitress") == ["waitress"]
    assert len(story.observations) == 5
    assert story.story_steps() == [0, 1, 2, 3, 4]
    first = story.observations[0]
    assert first.kind == ACTION_OBS
    assert first.subject == T("enter", "nicole", "veg_r")
    assert first.value is True
    assert first.story_step == 0


def test_parse_fluent_observation_and_comments():
    story = parse_story(
        "% a futile visit\n"
        "customer(nicole). restaurant(veg_r).\n"
        "st_obs(available(lentil_soup),false,0). % sold out\n"
    )
    obs = story.observations[0]
    assert obs.kind == FLUENT_OBS
    assert obs.value is False
    assert obs.predicate() == "st_obs"


def test_parse_empty_source():
    story = parse_story("")
    assert story.entities == [] and story.observations == []


@pytest.mark.parametrize(
    "bad",
    [
        "customer(nicole)",  # missing period
        "widget(nicole).",  # unknown predicate
        "st_hpd(enter(nicole,veg_r),yes,0).",  # bad boolean token
        "st_hpd(enter(nicole,veg_r),true,x).",  # non-numeric step
        "st_hpd(enter(nicole,veg_r),true).",  # arity
        "customer(nicole,sam).",  # sort fact arity
    ],
)
def test_parse_rejects(bad):
    with pytest.raises(StorySyntaxError):
        parse_story(bad)


def test_syntax_error_carries_position():
    try:
        parse_story("customer(nicole).\nwidget(bad).\n")
    except StorySyntaxError as exc:
        assert exc.line == 2
        assert "widget" in str(exc)
    else:
        pytest.fail("expected a syntax error")


# ============================================================================
# validation
# ============================================================================


def test_validate_clean_story():
    story = parse_story(EX1)
    domain = build_restaurant_domain(story.entities)
    assert validate_story(story, domain) == []


def test_validate_flags_unknown_symbol_and_bad_sort():
    story = parse_story(EX1 + "st_hpd(jump(nicole),true,5).")
    domain = build_restaurant_domain(parse_story(EX1).entities)
    codes = [d.code for d in validate_story(story, domain)]
    assert "unknown-symbol" in codes


def test_validate_flags_wrong_argument_sort():
    story = parse_story(EX1 + "st_hpd(eat(lentil_soup,nicole),true,5).")
    domain = build_restaurant_domain(parse_story(EX1).entities)
    assert validate_story(story, domain) != []


def test_validate_flags_duplicate_entity_across_sorts():
    story = parse_story("customer(x). restaurant(x). waitress(w). cook(k).")
    diags = validate_story(story)
    assert any(d.code == "duplicate-entity" for d in diags)


# ============================================================================
# round trip
# ============================================================================


def _random_story(rng: random.Random) -> Story:
    customers = ["nicole", "sam"][: rng.randint(1, 2)]
    foods = ["lentil_soup", "miso_soup"][: rng.randint(1, 2)]
    src = []
    for c in customers:
        src.append("customer(%s)." % c)
    src.append("restaurant(veg_r).")
    for f in foods:
        src.append("food(%s)." % f)
    src.append("waitress(waitress).")
    src.append("cook(cook1).")
    step = 0
    for _ in range(rng.randint(0, 5)):
        c = rng.choice(customers)
        f = rng.choice(foods)
        kind = rng.random()
        if kind < 0.5:
            src.append("st_hpd(enter(%s,veg_r),true,%d)." % (c, step))
        elif kind < 0.8:
            src.append(
                "st_hpd(order(%s,%s,waitress),%s,%d)."
                % (c, f, rng.choice(["true", "false"]), step)
            )
        else:
            src.append(
                "st_obs(available(%s),%s,%d)."
                % (f, rng.choice(["true", "false"]), step)
            )
        step += rng.randint(1, 2)
    return parse_story("\n".join(src))


def test_serialize_parse_roundtrip_random():
    """parse(serialize(s)) == s up to entity/observation set equality."""
    rng = random.Random(52110)
    for _ in range(100):
        story = _random_story(rng)
        again = parse_story(serialize_story(story))
        assert again.key() == story.key()


def test_serialize_is_canonical():
    a = parse_story(EX1)
    shuffled = EX1.strip().split("\n")
    random.Random(3).shuffle(shuffled)
    b = parse_story("\n".join(shuffled))
    assert serialize_story(a) == serialize_story(b)


def test_corpus_logic_forms_parse_clean():
    """Parsing is total on the bundled corpus."""
    from restaurant_reader.corpus import bundled_corpus_path, load_corpus

    for entry in load_corpus(bundled_corpus_path()):
        story = entry.story()
        domain = build_restaurant_domain(story.entities)
        assert validate_story(story, domain) == []
