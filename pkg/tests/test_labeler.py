"""Labeling rule vs an independently coded explicit state machine, plus
aggregation behavior."""

import itertools
import statistics

import pytest
from hypothesis import given, strategies as st

from spreaderkit.labeler import (
    EXP_F, EXP_M, SHARE_F, SHARE_M,
    BehaviorLabel, TimelineError, UserTimeline,
    aggregate_labels, aggregate_labels_mean, label_pair, label_sequence,
)

EM, EF, SM, SF = EXP_M, EXP_F, SHARE_M, SHARE_F

# Explicit transcription of the labeling state diagram (states A..U),
# completed with self-loops for repeated identical shares and the
# last-share-decides transitions out of the diagram's terminal states.
TRANSITIONS = {
    "A": {EM: "B", EF: "J"},
    "B": {SM: "C", EF: "G"},
    "C": {SM: "C", EF: "D"},
    "D": {SM: "F", SF: "E"},
    "E": {SF: "E", SM: "S"},
    "F": {SM: "F", SF: "T"},
    "G": {SM: "I", SF: "H"},
    "H": {SF: "H", SM: "S"},
    "I": {SM: "I", SF: "T"},
    "S": {SM: "S", SF: "E"},
    "T": {SF: "T", SM: "S"},
    "J": {SF: "K", EM: "O"},
    "K": {SF: "K", EM: "L"},
    "L": {SM: "M", SF: "N"},
    "M": {SM: "M", SF: "E"},
    "N": {SF: "N", SM: "M"},
    "O": {SM: "P", SF: "Q"},
    "P": {SM: "P", SF: "R"},
    "Q": {SF: "Q", SM: "U"},
    "R": {SF: "R", SM: "S"},
    "U": {SM: "U", SF: "E"},
}

STATE_CLASS = {
    "A": None, "B": None, "C": None, "J": None, "K": None,
    "G": BehaviorLabel.DISENGAGED, "O": BehaviorLabel.DISENGAGED,
    "F": BehaviorLabel.MALICIOUS, "I": BehaviorLabel.MALICIOUS,
    "P": BehaviorLabel.MALICIOUS,
    "D": BehaviorLabel.MAYBE_MALICIOUS, "S": BehaviorLabel.MAYBE_MALICIOUS,
    "M": BehaviorLabel.MAYBE_MALICIOUS, "U": BehaviorLabel.MAYBE_MALICIOUS,
    "E": BehaviorLabel.NAIVE_SELF_CORRECTOR, "T": BehaviorLabel.NAIVE_SELF_CORRECTOR,
    "R": BehaviorLabel.NAIVE_SELF_CORRECTOR,
    "H": BehaviorLabel.INFORMED_SHARER, "Q": BehaviorLabel.INFORMED_SHARER,
    "L": BehaviorLabel.INFORMED_SHARER, "N": BehaviorLabel.INFORMED_SHARER,
}


def state_machine_label(kinds):
    state = "A"
    for kind in kinds:
        state = TRANSITIONS[state][kind]
    return STATE_CLASS[state]


def valid_sequences(max_len):
    """All event sequences with each exposure at most once and shares only
    after their exposure."""
    def extend(seq, seen_m, seen_f):
        yield seq
        if len(seq) == max_len:
            return
        options = []
        if not seen_m:
            options.append((EM, True, seen_f))
        if not seen_f:
            options.append((EF, seen_m, True))
        if seen_m:
            options.append((SM, seen_m, seen_f))
        if seen_f:
            options.append((SF, seen_m, seen_f))
        for kind, m2, f2 in options:
            yield from extend(seq + (kind,), m2, f2)

    yield from extend((), False, False)


def test_rule_matches_state_machine_exhaustively():
    n = 0
    for seq in valid_sequences(8):
        assert label_sequence(list(seq)) == state_machine_label(seq), seq
        n += 1
    # 511 valid sequences exist up to length 8
    assert n == 511


# every behavior sequence explicitly walked through in the class definitions
DIAGRAM_SEQUENCES = [
    ([EM, EF, SM], BehaviorLabel.MALICIOUS),            # A-B-G-I
    ([EF, EM, SM], BehaviorLabel.MALICIOUS),            # A-J-O-P
    ([EM, SM, EF, SM], BehaviorLabel.MALICIOUS),        # A-B-C-D-F
    ([EM, SM, EF], BehaviorLabel.MAYBE_MALICIOUS),      # A-B-C-D
    ([EM, EF, SF, SM], BehaviorLabel.MAYBE_MALICIOUS),  # A-B-G-H-S
    ([EF, SF, EM, SM], BehaviorLabel.MAYBE_MALICIOUS),  # A-J-K-L-M
    ([EF, EM, SF, SM], BehaviorLabel.MAYBE_MALICIOUS),  # A-J-O-Q-U
    ([EM, SM, EF, SF], BehaviorLabel.NAIVE_SELF_CORRECTOR),  # A-B-C-D-E
    ([EM, EF, SM, SF], BehaviorLabel.NAIVE_SELF_CORRECTOR),  # A-B-G-I-T
    ([EF, EM, SM, SF], BehaviorLabel.NAIVE_SELF_CORRECTOR),  # A-J-O-P-R
    ([EM, EF, SF], BehaviorLabel.INFORMED_SHARER),      # A-B-G-H
    ([EF, EM, SF], BehaviorLabel.INFORMED_SHARER),      # A-J-O-Q
    ([EF, SF, EM], BehaviorLabel.INFORMED_SHARER),      # A-J-K-L
    ([EF, SF, EM, SF], BehaviorLabel.INFORMED_SHARER),  # A-J-K-L-N
    ([EM, EF], BehaviorLabel.DISENGAGED),               # A-B-G
    ([EF, EM], BehaviorLabel.DISENGAGED),               # A-J-O
]


@pytest.mark.parametrize("seq,expected", DIAGRAM_SEQUENCES)
def test_diagram_sequences(seq, expected):
    assert label_sequence(seq) == expected
    assert state_machine_label(seq) == expected


def test_ineligible_without_both_exposures():
    assert label_sequence([EM, SM]) is None
    assert label_sequence([EF, SF, SF]) is None
    assert label_sequence([]) is None


def test_share_before_exposure_raises():
    with pytest.raises(TimelineError):
        label_sequence([SM])
    with pytest.raises(TimelineError):
        label_sequence([EM, SF])


def test_repeated_shares_idempotent():
    base = [EM, EF, SM]
    assert label_sequence(base + [SM, SM]) == label_sequence(base)


def test_label_pair_on_timeline():
    tl = UserTimeline(user_id="u", news_id=0,
                      events=[(1, EM), (2, SM), (3, EF), (4, SF)])
    assert label_pair(tl) == BehaviorLabel.NAIVE_SELF_CORRECTOR


# aggregation

ALL_LABELS = list(BehaviorLabel)
NON_DIS = [l for l in ALL_LABELS if l is not BehaviorLabel.DISENGAGED]


def oracle_aggregate(labels):
    active = [l for l in labels if l is not BehaviorLabel.DISENGAGED]
    if not active:
        return BehaviorLabel.DISENGAGED
    code = statistics.median_high(sorted(l.code for l in active))
    return next(l for l in NON_DIS if l.code == code)


def test_aggregate_matches_oracle_for_all_small_multisets():
    for n in range(1, 6):
        for combo in itertools.combinations_with_replacement(ALL_LABELS, n):
            assert aggregate_labels(list(combo)) == oracle_aggregate(combo), combo


def test_odd_count_takes_middle_code():
    labels = [BehaviorLabel.MALICIOUS, BehaviorLabel.NAIVE_SELF_CORRECTOR,
              BehaviorLabel.INFORMED_SHARER]
    assert aggregate_labels(labels) == BehaviorLabel.NAIVE_SELF_CORRECTOR


def test_disengaged_dropped():
    assert aggregate_labels(
        [BehaviorLabel.DISENGAGED, BehaviorLabel.MALICIOUS]) == BehaviorLabel.MALICIOUS


def test_even_tie_takes_larger():
    assert aggregate_labels(
        [BehaviorLabel.MALICIOUS, BehaviorLabel.INFORMED_SHARER]
    ) == BehaviorLabel.INFORMED_SHARER


def test_empty_aggregate_raises():
    with pytest.raises(ValueError):
        aggregate_labels([])


@given(st.lists(st.sampled_from(ALL_LABELS), min_size=1, max_size=12),
       st.randoms())
def test_aggregate_permutation_invariant(labels, rnd):
    shuffled = list(labels)
    rnd.shuffle(shuffled)
    assert aggregate_labels(shuffled) == aggregate_labels(labels)


@given(st.sampled_from(ALL_LABELS))
def test_aggregate_singleton_identity(label):
    assert aggregate_labels([label]) == label


def test_mean_aggregation_exposed():
    # 1,1,4: median 1, mean 2 -> the two rules disagree and both are callable
    labels = [BehaviorLabel.MALICIOUS, BehaviorLabel.MALICIOUS,
              BehaviorLabel.INFORMED_SHARER]
    assert aggregate_labels(labels) == BehaviorLabel.MALICIOUS
    assert aggregate_labels_mean(labels) == BehaviorLabel.MAYBE_MALICIOUS
