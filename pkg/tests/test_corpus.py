"""Tests for the bundled story corpus: loading, validation diagnostics,
the distribution counts, and the run/bench helpers.
"""

import json

import pytest

from restaurant_reader.corpus import (
    SOURCES,
    BenchRow,
    CorpusError,
    bench,
    bench_csv,
    bench_json,
    bundled_corpus_path,
    CORPUS_PATH_ENV,
    distribution,
    load_corpus,
    run_entry,
)
from restaurant_reader.reasoner import Config


MINIMAL_LOGIC = """
customer(nicole).
restaurant(veg_r).
food(lentil_soup).
waitress(waitress).
cook(cook1).
st_hpd(enter(nicole,veg_r),true,0).
st_hpd(order(nicole,lentil_soup,waitress),true,1).
"""


def corpus_xml(*stories):
    body = "\n".join(stories)
    return '<corpus version="1">\n%s\n</corpus>\n' % body


def story_xml(sid, logic, source="hand_crafted", stype="normal", extra=""):
    return (
        '<story id="%s" source="%s" type="%s"%s>\n'
        "<excerpt>Somebody went out to eat.</excerpt>\n"
        "<logicform>\n%s\n</logicform>\n"
        "</story>" % (sid, source, stype, extra, logic)
    )


def write_corpus(tmp_path, text, name="corpus.xml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture(scope="module")
def bundled():
    return load_corpus(bundled_corpus_path())


# ============================================================================
# the bundled corpus
# ============================================================================


def test_bundled_corpus_size_and_types(bundled):
    assert len(bundled) == 40
    dist = distribution(bundled)
    assert dist["by_type"]["normal"] == 13
    assert dist["by_type"]["exception"] == 22
    assert dist["by_type"]["variation"] == 5


def test_bundled_corpus_source_grid(bundled):
    dist = distribution(bundled)["by_source_and_type"]
    assert dist[("youtube", "normal")] == 6
    assert dist[("youtube", "exception")] == 6
    assert dist[("google_books", "normal")] == 4
    assert dist[("google_books", "exception")] == 3
    assert dist[("google_books", "variation")] == 5
    assert dist[("gutenberg", "exception")] == 2
    assert dist[("mueller", "normal")] == 1
    assert dist[("hand_crafted", "normal")] == 2
    assert dist[("hand_crafted", "exception")] == 11
    assert sum(dist.values()) == 40


def test_bundled_ids_unique_and_sources_known(bundled):
    ids = [e.id for e in bundled]
    assert len(set(ids)) == len(ids)
    assert all(e.source in SOURCES for e in bundled)
    assert all(e.excerpt for e in bundled)


def test_bundled_stories_parse(bundled):
    for e in bundled:
        story = e.story()
        assert story.observations, e.id


def test_bundled_flags(bundled):
    by_id = {e.id: e for e in bundled}
    assert by_id["mueller-01"].reconstructed
    assert by_id["youtube-05"].limitation
    limits = sorted(e.id for e in bundled if e.limitation)
    assert limits == ["hand-02", "youtube-05"]


def test_env_override_changes_bundled_path(tmp_path, monkeypatch):
    path = write_corpus(tmp_path, corpus_xml(story_xml("only-01", MINIMAL_LOGIC)))
    monkeypatch.setenv(CORPUS_PATH_ENV, path)
    assert bundled_corpus_path() == path
    entries = load_corpus(bundled_corpus_path())
    assert [e.id for e in entries] == ["only-01"]


# ============================================================================
# validation diagnostics
# ============================================================================


def test_empty_corpus_loads(tmp_path):
    path = write_corpus(tmp_path, "<corpus></corpus>")
    assert load_corpus(path) == []


def test_malformed_xml(tmp_path):
    path = write_corpus(tmp_path, "<corpus><story id=")
    with pytest.raises(CorpusError, match="malformed corpus XML"):
        load_corpus(path)


def test_missing_id(tmp_path):
    text = corpus_xml(
        story_xml("x", MINIMAL_LOGIC).replace(' id="x"', "", 1)
    )
    with pytest.raises(CorpusError, match="missing its id"):
        load_corpus(write_corpus(tmp_path, text))


def test_duplicate_id_named(tmp_path):
    other = MINIMAL_LOGIC + "st_hpd(put(waitress,lentil_soup,t),true,2).\n"
    text = corpus_xml(
        story_xml("twin-01", MINIMAL_LOGIC), story_xml("twin-01", other)
    )
    with pytest.raises(CorpusError, match="duplicate corpus id: twin-01"):
        load_corpus(write_corpus(tmp_path, text))


def test_unknown_source_named(tmp_path):
    text = corpus_xml(story_xml("x-01", MINIMAL_LOGIC, source="tiktok"))
    with pytest.raises(CorpusError, match="entry x-01: unknown source"):
        load_corpus(write_corpus(tmp_path, text))


def test_unknown_type_named(tmp_path):
    text = corpus_xml(story_xml("x-01", MINIMAL_LOGIC, stype="weird"))
    with pytest.raises(CorpusError, match="entry x-01: unknown scenario type"):
        load_corpus(write_corpus(tmp_path, text))


def test_missing_excerpt_element(tmp_path):
    text = corpus_xml(
        '<story id="x-01" source="youtube" type="normal">'
        "<logicform>%s</logicform></story>" % MINIMAL_LOGIC
    )
    with pytest.raises(CorpusError, match="needs excerpt and logicform"):
        load_corpus(write_corpus(tmp_path, text))


def test_unparseable_logic_form_names_entry(tmp_path):
    text = corpus_xml(story_xml("bad-01", "customer(nicole"))
    with pytest.raises(CorpusError, match="entry bad-01: logic form does not parse"):
        load_corpus(write_corpus(tmp_path, text))


def test_invalid_logic_form_names_entry(tmp_path):
    bad = MINIMAL_LOGIC + "st_hpd(teleport(nicole),true,2).\n"
    text = corpus_xml(story_xml("bad-02", bad))
    with pytest.raises(CorpusError, match="entry bad-02: invalid logic form"):
        load_corpus(write_corpus(tmp_path, text))


def test_bad_boolean_attribute(tmp_path):
    text = corpus_xml(
        story_xml("x-01", MINIMAL_LOGIC, extra=' reconstructed="yes"')
    )
    with pytest.raises(CorpusError):
        load_corpus(write_corpus(tmp_path, text))


def test_renamed_duplicate_detected(tmp_path):
    renamed = (
        MINIMAL_LOGIC.replace("nicole", "marta")
        .replace("veg_r", "bistro")
        .replace("lentil_soup", "onion_soup")
        .replace("cook1", "chef")
    )
    text = corpus_xml(
        story_xml("orig-01", MINIMAL_LOGIC), story_xml("copy-01", renamed)
    )
    with pytest.raises(
        CorpusError, match="entries orig-01 and copy-01 coincide up to entity renaming"
    ):
        load_corpus(write_corpus(tmp_path, text))


def test_distinct_stories_pass_renaming_check(tmp_path):
    longer = MINIMAL_LOGIC + "st_hpd(put(waitress,lentil_soup,t),true,2).\n"
    text = corpus_xml(
        story_xml("a-01", MINIMAL_LOGIC), story_xml("b-01", longer)
    )
    entries = load_corpus(write_corpus(tmp_path, text))
    assert [e.id for e in entries] == ["a-01", "b-01"]


# ============================================================================
# running entries
# ============================================================================


def test_run_entry_models_found(bundled):
    by_id = {e.id: e for e in bundled}
    rr = run_entry(by_id["mueller-01"])
    assert rr.verdict == "models-found"
    assert rr.model_count == 1
    assert rr.max_step == 29
    assert rr.ti_mode == "mixed"
    assert rr.customer_structure == "s2"
    assert rr.wall_time > 0


def test_run_entry_no_models_on_limitation(bundled):
    by_id = {e.id: e for e in bundled}
    rr = run_entry(by_id["youtube-05"], Config(ti_mode="new_only"))
    assert rr.verdict == "no-models"
    assert rr.model_count == 0
    assert rr.reason


def test_run_entry_timeout(bundled):
    by_id = {e.id: e for e in bundled}
    rr = run_entry(by_id["youtube-05"], timeout_s=1e-4)
    assert rr.verdict == "timeout"
    assert rr.model_count == 0


# ============================================================================
# benchmarking
# ============================================================================


@pytest.fixture(scope="module")
def tiny_bench(bundled):
    by_id = {e.id: e for e in bundled}
    entries = [by_id["hand-05"]]
    configs = [Config(), Config(ti_mode="new_only")]
    return bench(entries, configs, repetitions=2)


def test_bench_rows(tiny_bench):
    rows = tiny_bench
    assert [r.config_label for r in rows] == ["mixed/s2", "new_only/s2"]
    assert rows[0].relative_increase is None
    assert rows[1].relative_increase is not None
    assert rows[0].verdict == "models-found"
    assert rows[0].max_step == 8
    assert rows[1].max_step == 10
    assert all(r.mean_time > 0 for r in rows)


def test_bench_rejects_zero_reps(bundled):
    with pytest.raises(ValueError):
        bench(bundled[:1], [Config()], repetitions=0)


def test_bench_csv_format(tiny_bench):
    text = bench_csv(tiny_bench)
    lines = text.strip().splitlines()
    assert lines[0] == (
        "entry_id,config_label,mean_time,max_step,model_count,"
        "verdict,relative_increase"
    )
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[0] == "hand-05"
    assert first[1] == "mixed/s2"
    float(first[2])
    assert first[6] == ""
    second = lines[2].split(",")
    float(second[6])


def test_bench_json_format(tiny_bench):
    payload = json.loads(bench_json(tiny_bench))
    assert len(payload) == 2
    assert payload[0]["entry_id"] == "hand-05"
    assert payload[0]["relative_increase"] is None
    assert isinstance(payload[1]["relative_increase"], float)
    keys = set(payload[0])
    assert keys == {
        "entry_id",
        "config_label",
        "mean_time",
        "max_step",
        "model_count",
        "verdict",
        "relative_increase",
    }
