import io

import pytest

from synthratings.data import stats
from synthratings.ingest import ParseError, SourceFormat, parse


def test_strict_threshold():
    raw = b"1\t10\t2\t100\n1\t11\t3\t101\n1\t12\t4\t102\n"
    ds = parse(raw, "ml100k", 3)
    assert stats(ds) == (1, 1, 1)
    assert ds.external_pairs() == [("1", "12")]


def test_default_thresholds():
    assert SourceFormat.from_name("ml100k").default_threshold == 3
    assert SourceFormat.from_name("ml1m").default_threshold == 3
    assert SourceFormat.from_name("lastfm").default_threshold == 0


def test_movielens_1m_format():
    raw = b"1::1193::5::978300760\n1::661::3::978302109\n2::1193::4::978298413\n3::1::1::0\n"
    ds = parse(io.BytesIO(raw), "ml1m")
    assert ds.external_pairs() == [("1", "1193"), ("2", "1193")]
    assert stats(ds) == (2, 1, 2)


def test_lastfm_header_and_zero_weight():
    raw = b"userID\tartistID\tweight\n2\t51\t13883\n2\t52\t0\n3\t51\t1\n"
    ds = parse(raw, "lastfm")
    assert ds.external_pairs() == [("2", "51"), ("3", "51")]


def test_lastfm_without_header():
    ds = parse(b"2\t51\t5\n", "lastfm")
    assert len(ds) == 1


def test_users_without_positives_dropped():
    raw = b"1\t10\t5\t0\n2\t10\t1\t0\n3\t11\t4\t0\n"
    ds = parse(raw, "ml100k")
    assert ds.user_ids == ("1", "3")


def test_canonical_ignores_threshold():
    ds = parse(b"a\tx\nb\ty\na\tx\n", "canonical", threshold=100)
    assert stats(ds) == (2, 2, 2)


def test_text_stream_and_path(tmp_path):
    p = tmp_path / "u.data"
    p.write_text("1\t2\t5\t0\n")
    assert len(parse(p, SourceFormat.MOVIELENS_100K)) == 1
    assert len(parse(str(p), "ml100k")) == 1
    assert len(parse(io.StringIO("1\t2\t5\t0\n"), "ml100k")) == 1


def test_malformed_line_number():
    raw = b"1\t2\t5\t0\n\n1\t3\t5\n"
    with pytest.raises(ParseError) as err:
        parse(raw, "ml100k")
    assert err.value.lineno == 3
    with pytest.raises(ParseError, match="line 1"):
        parse(b"1\t2\tfive\t0\n", "ml100k")


def test_unknown_format():
    with pytest.raises(ValueError, match="unknown format"):
        parse(b"", "netflix")
