import pytest

from nistt.timeutil import PS_PER_UNIT, TimeParseError, parse_time_ps, ps_to_seconds_str


@pytest.mark.parametrize(
    "text,ps",
    [
        ("0ps", 0),
        ("1ps", 1),
        ("7ns", 7_000),
        ("100us", 100_000_000),
        ("10ms", 10_000_000_000),
        ("2s", 2_000_000_000_000),
        (" 300 us ", 300_000_000),
    ],
)
def test_parse(text, ps):
    assert parse_time_ps(text) == ps


@pytest.mark.parametrize("text", ["", "100", "us", "1.5ms", "-3ns", "3 sec", "1e3ps"])
def test_parse_rejects(text):
    with pytest.raises(TimeParseError):
        parse_time_ps(text)


def test_parse_rejects_overflow():
    with pytest.raises(TimeParseError):
        parse_time_ps(f"{2**64}ps")
    with pytest.raises(TimeParseError):
        parse_time_ps("99999999999s")


def test_roundtrip_all_units():
    for unit, scale in PS_PER_UNIT.items():
        for n in (0, 1, 13, 2_000_000):
            assert parse_time_ps(f"{n}{unit}") == n * scale


def test_seconds_string_is_exact():
    assert ps_to_seconds_str(0) == "0.000000000000"
    assert ps_to_seconds_str(1) == "0.000000000001"
    assert ps_to_seconds_str(2_000_000_000_000) == "2.000000000000"
    assert ps_to_seconds_str(1_234_567_890_123_456) == "1234.567890123456"
    assert ps_to_seconds_str(1_500_000_000_000, digits=3) == "1.500"
