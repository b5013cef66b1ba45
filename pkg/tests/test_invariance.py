import pytest

from cayleygibbs.cosets import SubgroupSpec, label
from cayleygibbs.invariance import (
    IllDefinedSystemError,
    WeaklyPeriodicSystem,
    check_class_counts,
    check_invariance,
    derive_system,
    matches_reference,
    reference_counts,
    state_of,
    successor_labels,
)
from cayleygibbs.words import parent, word_from_str

STANDARD = SubgroupSpec(k=2, s=1, a1={1}, a2={2})
SPLIT = SubgroupSpec(k=2, s=1, a1={1, 3}, a2={2})


# === successor profiles ===


def test_successor_labels_of_witness_words():
    x = word_from_str("a2.a1.a2")
    y = word_from_str("a1.a3")
    assert label(x, SPLIT) == label(y, SPLIT)
    assert label(parent(x), SPLIT) == label(parent(y), SPLIT)
    profile_x = successor_labels(x, SPLIT)
    profile_y = successor_labels(y, SPLIT)
    assert [lab.rep for lab in profile_x] == [(2,), (2,)]
    assert [lab.rep for lab in profile_y] == [(1,), (2,)]


def test_state_of():
    assert state_of((1,), STANDARD) == (1, 0)
    assert state_of((1, 2), STANDARD) == (2, 1)
    assert state_of((1, 3), STANDARD) == (1, 1)


# === invariance dichotomy ===


def test_invariance_holds_for_singleton_specs():
    for k in (2, 3):
        for s in (1, 2):
            spec = SubgroupSpec(k=k, s=s, a1={1}, a2={2})
            report = check_invariance(spec, radius=5)
            assert report.holds, report.violations[:2]
            assert report.states_seen == 3 * (2 * s + 1)


def test_invariance_holds_for_shifted_singletons():
    report = check_invariance(SubgroupSpec(k=3, s=1, a1={3}, a2={2}), radius=5)
    assert report.holds


def test_invariance_fails_for_split_spec():
    report = check_invariance(SPLIT, radius=4)
    assert not report.holds
    witness = {word_from_str("a2.a1.a2"), word_from_str("a1.a3")}
    assert any({v.x, v.y} == witness for v in report.violations)
    bad = next(v for v in report.violations if {v.x, v.y} == witness)
    assert sorted(bad.profile_x) != sorted(bad.profile_y)


def test_invariance_radius_guard():
    with pytest.raises(ValueError):
        check_invariance(STANDARD, radius=1)


# === class count equality ===


def test_class_counts_pass_for_singletons():
    for k in (2, 3, 4):
        spec = SubgroupSpec(k=k, s=1, a1={1}, a2={2})
        report = check_class_counts(spec, radius=4)
        assert report.passed
        assert report.class_vectors[0] == (k - 1, 1, 1)
        assert report.class_vectors[1] == (1, k - 1, 1)
        assert report.class_vectors[2] == (1, 1, k - 1)


def test_class_counts_reject_nonsingleton():
    with pytest.raises(ValueError):
        check_class_counts(SPLIT, radius=4)


# === system derivation ===


def test_derive_standard_system():
    system = derive_system(STANDARD)
    assert len(system.states) == 9
    assert system.states == tuple((i, j) for i in range(3) for j in range(3))
    for row in system.counts:
        assert sum(row) == 2
    assert min(system.reps_checked) >= 3
    assert matches_reference(system)


def test_derived_counts_match_reference_table():
    for k in (2, 3, 4, 5):
        system = derive_system(SubgroupSpec(k=k, s=1, a1={1}, a2={2}))
        assert matches_reference(system)


def test_reference_table_literal():
    # Frozen copy of the nine successor-count rows, k left symbolic.
    k = 3
    expected = {
        (0, 0): {(0, 0): k - 2, (1, 0): 1, (2, 0): 1},
        (0, 1): {(0, 0): k - 1, (2, 0): 1},
        (0, 2): {(0, 0): k - 1, (1, 0): 1},
        (1, 0): {(1, 1): k - 1, (2, 1): 1},
        (1, 1): {(1, 1): k - 2, (0, 1): 1, (2, 1): 1},
        (1, 2): {(1, 1): k - 1, (0, 1): 1},
        (2, 0): {(2, 2): k - 1, (1, 2): 1},
        (2, 1): {(2, 2): k - 1, (0, 2): 1},
        (2, 2): {(2, 2): k - 2, (1, 2): 1, (0, 2): 1},
    }
    assert reference_counts(k) == expected


def test_state_count_law():
    # Reachable states number 3(2s+1): the parent class differs from the
    # vertex class by at most one residue step per appended letter.
    for k in (2, 3):
        for s in (1, 2, 3):
            system = derive_system(SubgroupSpec(k=k, s=s, a1={1}, a2={2}))
            n = 2 * s + 1
            assert len(system.states) == 3 * n
            expected = {
                (i, j) for i in range(n) for j in ((i - 1) % n, i, (i + 1) % n)
            }
            assert set(system.states) == expected


def test_successor_state_coherence():
    system = derive_system(SubgroupSpec(k=3, s=2, a1={1}, a2={2}))
    for st in system.states:
        for target in system.row(st):
            assert target[1] == st[0]


def test_derive_rejects_k1():
    with pytest.raises(ValueError):
        derive_system(SubgroupSpec(k=1, s=1, a1={1}, a2={2}))


def test_derive_rejects_nonsingleton_by_default():
    with pytest.raises(ValueError):
        derive_system(SPLIT)


def test_derive_detects_ill_defined_counts():
    with pytest.raises(IllDefinedSystemError):
        derive_system(SPLIT, allow_nonsingleton=True)


def test_derive_deterministic():
    a = derive_system(STANDARD)
    b = derive_system(STANDARD)
    assert a == b


# === serialization ===


def test_system_json_round_trip():
    for spec in (STANDARD, SubgroupSpec(k=3, s=2, a1={1}, a2={2})):
        system = derive_system(spec)
        loaded = WeaklyPeriodicSystem.from_json(system.to_json())
        assert loaded.k == system.k
        assert loaded.s == system.s
        assert loaded.states == system.states
        assert loaded.counts == system.counts
        assert loaded.spec is None and loaded.reps_checked is None


def test_system_json_shape():
    import json

    payload = json.loads(derive_system(STANDARD).to_json())
    assert sorted(payload) == ["counts", "k", "s", "states"]
    assert payload["k"] == 2 and payload["s"] == 1
    assert payload["counts"]["0,1"] == {"0,0": 1, "2,0": 1}
