import pytest

from helpers import make_query
from lexsent.index import NoCaseContextError, build_case_index, build_index, \
    build_sentence_index, load_index, save_index
from lexsent.textprep import AnalyzerConfig

CONFIG = AnalyzerConfig()


def test_build_index_postings_and_stats():
    idx = build_index([("d1", "alpha beta"), ("d2", "alpha alpha gamma")], CONFIG)
    assert idx.doc_count == 2
    assert idx.doc_lengths == {"d1": 2, "d2": 3}
    assert idx.avg_doc_length == pytest.approx(2.5)
    assert idx.doc_frequency("alpha") == 2
    assert idx.doc_frequency("beta") == 1
    assert idx.doc_frequency("missing") == 0
    assert idx.term_frequency("alpha", "d2") == 2
    assert idx.term_frequency("beta", "d2") == 0
    assert idx.postings["alpha"] == (("d1", 1), ("d2", 2))


def test_build_index_order_independent():
    docs = [("d1", "alpha beta"), ("d2", "beta beta"), ("d3", "gamma")]
    a = build_index(docs, CONFIG)
    b = build_index(list(reversed(docs)), CONFIG)
    assert a == b


def test_build_index_duplicate_doc_id_rejected():
    with pytest.raises(ValueError, match="duplicate document id"):
        build_index([("d1", "a"), ("d1", "b")], CONFIG)


def test_build_index_requires_documents():
    with pytest.raises(ValueError, match="at least one document"):
        build_index([], CONFIG)


def test_zero_length_documents_survive():
    idx = build_index([("d1", "..."), ("d2", "word")], CONFIG)
    assert idx.doc_lengths["d1"] == 0
    assert "d1" in idx


def test_sentence_index_one_doc_per_sentence():
    q = make_query("q1", labels=(0, 1, 2))
    idx = build_sentence_index(q, CONFIG)
    assert idx.doc_count == 3
    assert set(idx.doc_lengths) == set(q.sentence_ids())


def test_case_index_one_doc_per_case_first_text_wins():
    q = make_query("q1", labels=(0, 1, 2, 3),
                   case_ids=("c1", "c1", "c2", "c3"),
                   case_texts=("first text", "second text", "other", None))
    idx, uncovered = build_case_index(q, CONFIG)
    assert set(idx.doc_lengths) == {"c1", "c2"}
    assert idx.term_frequency("first", "c1") == 1
    assert idx.term_frequency("second", "c1") == 0
    assert uncovered == ("q1-s4",)


def test_case_index_without_any_case_text():
    q = make_query("q1", labels=(0, 1))
    with pytest.raises(NoCaseContextError, match="no context available"):
        build_case_index(q, CONFIG)


def test_index_save_load_round_trip(tmp_path):
    idx = build_index([("d1", "alpha beta"), ("d2", "alpha gamma")], CONFIG)
    path = tmp_path / "idx.json"
    save_index(idx, path)
    assert load_index(path) == idx


def test_index_cache_version_checked(tmp_path):
    idx = build_index([("d1", "alpha")], CONFIG)
    path = tmp_path / "idx.json"
    save_index(idx, path)
    payload = path.read_text(encoding="utf-8").replace('"version":1', '"version":99')
    path.write_text(payload, encoding="utf-8")
    with pytest.raises(ValueError, match="unsupported index cache version"):
        load_index(path)


def test_index_save_is_byte_deterministic(tmp_path):
    docs = [("d2", "beta alpha"), ("d1", "alpha alpha")]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_index(build_index(docs, CONFIG), p1)
    save_index(build_index(list(reversed(docs)), CONFIG), p2)
    assert p1.read_bytes() == p2.read_bytes()
