"""Timeline, correlation and decision-procedure tests."""

import random

import pytest

from cloudtrace.errors import MissingJurisdictionError
from cloudtrace.records import (
    ArtifactRecord,
    CredentialFinding,
    SECRET_KEY_PAIR,
    SECRET_NONE,
    SECRET_PASSWORD,
    SECRET_SESSION_FILE,
)
from cloudtrace.timestamps import normalize_unix, parse_date_text
from cloudtrace.triage import (
    BRANCH_FULL,
    BRANCH_ID_IN,
    BRANCH_ID_OUT,
    BRANCH_NONE,
    BRANCH_RANK,
    build_timeline,
    correlate,
    decide_branch,
    summarize_timeline,
)


def _rec(device="windows-vista7:pc", source="a/b", kind="file-synced",
         subject=None, stamps=(), attributes=None):
    return ArtifactRecord(
        service="dropbox", device=device, source_path=source, kind=kind,
        subject=subject, timestamps=list(stamps),
        attributes=dict(attributes or {}),
    )


def test_build_timeline_orders_by_instant():
    r1 = _rec(source="z", stamps=[("m", normalize_unix(200))])
    r2 = _rec(source="a", stamps=[("m", normalize_unix(100))])
    events = build_timeline([r1, r2])
    assert [e.instant.raw_value for e in events] == [100, 200]


def test_build_timeline_tie_breaks_on_path():
    same = normalize_unix(100)
    r1 = _rec(source="bbb", stamps=[("m", same)])
    r2 = _rec(source="aaa", stamps=[("m", same)])
    events = build_timeline([r1, r2])
    assert [e.record.source_path for e in events] == ["aaa", "bbb"]


def test_build_timeline_one_event_per_labeled_timestamp():
    records = [
        _rec(stamps=[("created", normalize_unix(1)), ("modified", normalize_unix(2))]),
        _rec(stamps=[]),
        _rec(stamps=[("event", normalize_unix(3))]),
    ]
    events = build_timeline(records)
    assert len(events) == sum(len(r.timestamps) for r in records) == 3


def test_build_timeline_flags_ambiguous():
    ambiguous = parse_date_text("01/05/12 02:21 PM", "us-short")
    events = build_timeline([_rec(stamps=[("t", ambiguous)])])
    assert "timezone unknown" in events[0].label


def test_summarize_timeline():
    events = build_timeline([
        _rec(stamps=[("a", normalize_unix(5)), ("b", normalize_unix(9))]),
    ])
    stats = summarize_timeline(events)
    assert stats["event_count"] == 2
    assert stats["first_event_utc"] == "1970-01-01T00:00:05Z"
    assert stats["events_per_service"] == {"dropbox": 2}


# --- correlation -------------------------------------------------------------

def test_correlate_same_filename_across_devices():
    pc = _rec(device="windows-vista7:pc", subject="/abc.pdf", kind="recently-changed")
    phone = _rec(device="android-data:droid", subject="/mnt/sdcard/dropbox/abc.pdf",
                 kind="file-watch", source="log")
    matches = correlate([pc, phone])
    assert [(c.kind, c.evidence) for c in matches] == [("same-filename", "abc.pdf")]


def test_correlate_same_account():
    pc = _rec(device="windows-vista7:pc", kind="account-profile",
              attributes={"email": "foryou7187@yahoo.co.kr"})
    phone = _rec(device="android-data:droid", kind="account-profile",
                 source="prefs", attributes={"email": "FORYOU7187@yahoo.co.kr"})
    matches = correlate([pc, phone])
    assert [(c.kind, c.evidence) for c in matches] == \
        [("same-account", "foryou7187@yahoo.co.kr")]


def test_correlate_same_content_hash():
    left = _rec(device="windows-vista7:pc", subject="abc.pdf",
                kind="synced-file-present", attributes={"sha256": "aa" * 32})
    right = _rec(device="android-data:droid", subject="xyz.pdf", source="sd",
                 kind="file-present", attributes={"sha256": "aa" * 32})
    matches = correlate([left, right])
    kinds = {c.kind for c in matches}
    assert "same-content-hash" in kinds


def test_correlate_single_device_no_matches():
    a = _rec(subject="/abc.pdf")
    b = _rec(subject="dir/abc.pdf", source="other")
    assert correlate([a, b]) == []


def test_correlate_case_sensitivity_rules():
    mac1 = _rec(device="mac:mb", subject="Design.PDF")
    android = _rec(device="android-data:d", subject="design.pdf", source="x")
    # no windows party: exact comparison, no match
    assert correlate([mac1, android]) == []
    win = _rec(device="windows-vista7:pc", subject="Design.PDF")
    matches = correlate([win, android])
    assert [(c.kind, c.evidence) for c in matches] == [("same-filename", "design.pdf")]


def test_correlate_symmetric_under_swap():
    pc = _rec(device="windows-vista7:pc", subject="/abc.pdf")
    phone = _rec(device="android-data:droid", subject="/sd/abc.pdf", source="log")
    forward = correlate([pc, phone])
    backward = correlate([phone, pc])
    as_sets = lambda cs: {(c.kind, c.evidence,
                           frozenset((c.left.device, c.right.device)))
                          for c in cs}
    assert as_sets(forward) == as_sets(backward)


def test_correlate_emails_are_not_filenames():
    a = _rec(device="windows-vista7:pc", kind="account-profile",
             subject="user@example.com")
    b = _rec(device="android-data:droid", kind="account-profile",
             subject="user@example.com", source="y")
    assert all(c.kind != "same-filename" for c in correlate([a, b]))


def test_correlate_deduplicates():
    pc = _rec(device="windows-vista7:pc", subject="/abc.pdf")
    phone = _rec(device="android-data:droid", subject="/abc.pdf", source="log")
    matches = correlate([pc, phone, pc, phone])
    assert len([c for c in matches if c.kind == "same-filename"]) == 1


# --- decision procedure -------------------------------------------------------

def _finding(secret_kind, account="a@x.com"):
    remote = secret_kind in (SECRET_PASSWORD, SECRET_KEY_PAIR, SECRET_SESSION_FILE)
    return CredentialFinding(
        service="dropbox", account_id=account, secret_kind=secret_kind,
        source_path="p", secret_value="s" if remote else None,
        enables_remote_access=remote,
    )


SECRET_CASES = [SECRET_PASSWORD, SECRET_KEY_PAIR, SECRET_SESSION_FILE]


@pytest.mark.parametrize("secret_kind", SECRET_CASES)
@pytest.mark.parametrize("jurisdiction", [True, False, None])
@pytest.mark.parametrize("warrant", [True, False])
def test_decision_table_secret_material_dominates(secret_kind, jurisdiction, warrant):
    decision = decide_branch([_finding(secret_kind)], jurisdiction, warrant)
    assert decision.branch == BRANCH_FULL
    assert decision.recommendations
    joined = " ".join(decision.recommendations)
    if warrant:
        assert "collect data from the cloud storage remotely" in joined
    else:
        assert "remote collection" not in joined or "off the table" in joined
        assert any("only the artifacts" in r for r in decision.recommendations)


@pytest.mark.parametrize("warrant", [True, False])
def test_decision_table_id_only_in_jurisdiction(warrant):
    decision = decide_branch([_finding(SECRET_NONE)], True, warrant)
    assert decision.branch == BRANCH_ID_IN
    if warrant:
        assert any("collect the files" in r for r in decision.recommendations)
    else:
        assert not any("collect the files" in r for r in decision.recommendations)


@pytest.mark.parametrize("warrant", [True, False])
def test_decision_table_id_only_out_of_jurisdiction(warrant):
    decision = decide_branch([_finding(SECRET_NONE)], False, warrant)
    assert decision.branch == BRANCH_ID_OUT
    joined = " ".join(decision.recommendations)
    assert "international judicial assistance" in joined
    assert "delete files" in joined  # spoliation warning


def test_decision_table_id_only_demands_jurisdiction():
    with pytest.raises(MissingJurisdictionError):
        decide_branch([_finding(SECRET_NONE)], None, True)


@pytest.mark.parametrize("jurisdiction", [True, False, None])
@pytest.mark.parametrize("warrant", [True, False])
def test_decision_table_no_findings(jurisdiction, warrant):
    decision = decide_branch([], jurisdiction, warrant)
    assert decision.branch == BRANCH_NONE
    assert any("only the artifacts that remain in PCs and smartphones" in r
               for r in decision.recommendations)


def test_decision_is_deterministic():
    findings = [_finding(SECRET_NONE), _finding(SECRET_PASSWORD)]
    first = decide_branch(findings, True, True)
    second = decide_branch(findings, True, True)
    assert first.branch == second.branch == BRANCH_FULL
    assert first.recommendations == second.recommendations


def test_branch_monotonicity_1000_random_growths():
    rng = random.Random(31337)
    kinds = [SECRET_NONE, SECRET_PASSWORD, SECRET_KEY_PAIR, SECRET_SESSION_FILE]
    for _ in range(1000):
        jurisdiction = rng.choice([True, False])
        warrant = rng.choice([True, False])
        findings = []
        last_rank = BRANCH_RANK[decide_branch(findings, jurisdiction, warrant).branch]
        for _ in range(rng.randint(1, 6)):
            findings.append(_finding(rng.choice(kinds)))
            rank = BRANCH_RANK[decide_branch(findings, jurisdiction, warrant).branch]
            assert rank >= last_rank
            last_rank = rank


def test_recommendations_never_empty():
    for findings in ([], [_finding(SECRET_NONE)], [_finding(SECRET_KEY_PAIR)]):
        for jurisdiction in (True, False):
            for warrant in (True, False):
                assert decide_branch(findings, jurisdiction, warrant).recommendations
