import itertools
import math

import pytest

from helpers import make_query
from lexsent.evaluation import dcg_at_k, ndcg, ndcg_from_rels, rel, richness, val
from lexsent.labels import ValueLabel
from lexsent.rankers import rank


def test_rel_is_the_ordinal_code():
    assert [rel(l) for l in ValueLabel] == [0, 1, 2, 3]


def test_val_weights():
    assert [val(l) for l in ValueLabel] == [0, 1, 5, 10]


def test_dcg_hand_computed():
    rels = [3, 2, 3, 0, 1, 2]
    expected = (3 / math.log2(2) + 2 / math.log2(3) + 3 / math.log2(4)
                + 0 / math.log2(5) + 1 / math.log2(6) + 2 / math.log2(7))
    assert dcg_at_k(rels, 6) == pytest.approx(expected, rel=1e-12)


def test_dcg_cutoff_and_empty():
    assert dcg_at_k([3, 2, 1], 1) == pytest.approx(3.0)
    assert dcg_at_k([3, 2, 1], 2) == pytest.approx(3.0 + 2 / math.log2(3))
    assert dcg_at_k([], 10) == 0.0
    assert dcg_at_k([2, 1], 100) == dcg_at_k([2, 1], 2)


def test_ndcg_hand_computed():
    rels = [3, 2, 3, 0, 1, 2]
    ideal = [3, 3, 2, 2, 1, 0]
    expected = dcg_at_k(rels, 6) / dcg_at_k(ideal, 6)
    assert ndcg_from_rels(rels, 6) == pytest.approx(expected, rel=1e-12)


def test_ndcg_ideal_order_is_one():
    assert ndcg_from_rels([3, 2, 1, 0], 4) == pytest.approx(1.0)
    assert ndcg_from_rels([2, 2, 2], 3) == pytest.approx(1.0)


def test_ndcg_all_zero_labels_defined_as_one():
    assert ndcg_from_rels([0, 0, 0], 10) == 1.0


def test_ndcg_k_must_be_positive():
    with pytest.raises(ValueError, match="k must be"):
        ndcg_from_rels([1, 0], 0)


def test_ndcg_at_one_is_first_gain_over_max():
    rels = [1, 3, 0, 2]
    assert ndcg_from_rels(rels, 1) == pytest.approx(1 / 3)


def test_ndcg_beyond_length_equals_full_length():
    rels = [0, 2, 1]
    assert ndcg_from_rels(rels, 100) == pytest.approx(ndcg_from_rels(rels, 3))


def _brute_dcg(rels, k):
    total = 0.0
    for i, g in enumerate(rels[:k], start=1):
        total += g / math.log2(i + 1)
    return total


def test_exhaustive_permutations_match_brute_force_oracle():
    """For every permutation of small label multisets and every cutoff, the
    implementation must match a plain-loop oracle, stay within [0, 1], and
    attain 1.0 exactly on the best permutation."""
    multisets = [
        (3, 2, 1, 0),
        (0, 0, 1),
        (2, 2, 1, 0, 0),
        (3, 0, 0, 0, 1, 2),
        (1, 1, 1, 1),
    ]
    for rels in multisets:
        perms = set(itertools.permutations(rels))
        for k in range(1, len(rels) + 1):
            ideal_brute = max(_brute_dcg(p, k) for p in perms)
            for p in perms:
                got = ndcg_from_rels(list(p), k)
                if ideal_brute == 0.0:
                    assert got == 1.0
                    continue
                expected = _brute_dcg(p, k) / ideal_brute
                assert got == pytest.approx(expected, rel=1e-12)
                assert 0.0 <= got <= 1.0 + 1e-12
            best = tuple(sorted(rels, reverse=True))
            assert ndcg_from_rels(list(best), k) == pytest.approx(1.0)


def test_moving_higher_gain_earlier_never_hurts():
    rels = [0, 3, 1, 2, 0, 1]
    for k in (1, 3, 6):
        current = list(rels)
        score = ndcg_from_rels(current, k)
        changed = True
        while changed:
            changed = False
            for i in range(len(current) - 1):
                if current[i] < current[i + 1]:
                    current[i], current[i + 1] = current[i + 1], current[i]
                    new_score = ndcg_from_rels(current, k)
                    assert new_score >= score - 1e-12
                    score = new_score
                    changed = True
        assert score == pytest.approx(1.0)


def test_ndcg_wrapper_uses_label_map():
    q = make_query("q1", labels=(0, 3, 1))
    worst_first = rank(q, {"q1-s1": 3.0, "q1-s2": 2.0, "q1-s3": 1.0})
    assert ndcg(worst_first, q.labels_by_id(), 3) == pytest.approx(
        ndcg_from_rels([0, 3, 1], 3))


def test_ndcg_wrapper_missing_label_rejected():
    q = make_query("q1", labels=(0, 3))
    ranked = rank(q, {"q1-s1": 1.0, "q1-s2": 0.5})
    labels = {"q1-s1": ValueLabel.NO_VALUE}
    with pytest.raises(KeyError, match="labels missing"):
        ndcg(ranked, labels, 2)


def test_richness_mean_of_val_weights():
    q = make_query("q1", labels=(0, 1, 2, 3))
    assert richness(q) == pytest.approx((0 + 1 + 5 + 10) / 4)


def test_richness_empty_query_rejected():
    q = make_query("q1", labels=())
    with pytest.raises(ValueError, match="no sentences"):
        richness(q)
