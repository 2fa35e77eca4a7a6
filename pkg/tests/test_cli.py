import pytest

from aotmpc.cli import (
    STATS_COLUMNS,
    ConfigError,
    bundled_scenarios,
    check_expectation,
    format_tsv,
    load_config,
    main,
    parse_config,
    run_scenario,
    stats,
    verify_transcript,
)
from aotmpc.core import EventRecord, Transcript, pack_bits, unpack_bits

SCENARIOS = {p.stem: p for p in bundled_scenarios()}

TINY = """\
[scenario]
name = tiny
n = 3
seeds = 0-1
circuit = majority3.txt

[inputs]
P0 = 1
P1 = 0
P2 = 1

[expect]
outcome = success
output = 1
"""


def test_bundled_scenarios_present():
    assert {"majority3", "adder2", "gcot_withhold", "broadcast_equivocate", "reveal_withhold", "dbc_helper",
            "bad_relay", "setup_flip", "uot", "ob_cover"} <= set(SCENARIOS)


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_bundled_scenario_meets_expectation(name):
    cfg = load_config(SCENARIOS[name])
    if cfg.protocol != "mpc":
        cfg.trials = 500
    transcript, outcome = run_scenario(cfg)
    assert check_expectation(cfg, outcome) == []
    assert verify_transcript(transcript, cfg) == []


def test_runs_are_deterministic():
    cfg = parse_config(TINY)
    a, _ = run_scenario(cfg, 1)
    b, _ = run_scenario(cfg, 1)
    c, _ = run_scenario(cfg, 0)
    assert a.dumps() == b.dumps() != c.dumps()


def test_transcript_round_trip_verifies():
    cfg = parse_config(TINY)
    t, _ = run_scenario(cfg, 0)
    assert verify_transcript(Transcript.loads(t.dumps(), range(3)), cfg) == []


def _tamper_open(text):
    lines = text.splitlines()
    for i, line in enumerate(lines):
        e = EventRecord.from_line(line)
        if e.kind == "GBC_OPEN" and "strings" in e.payload and len(e.visibility) > 3:
            s = unpack_bits(e.payload["strings"]).copy()
            s.reshape(-1)[0] ^= 1
            lines[i] = e._replace(payload={**e.payload, "strings": pack_bits(s)}).line()
            return "\n".join(lines) + "\n"
    raise AssertionError("no public opening in transcript")


def test_tampered_opening_found():
    cfg = parse_config(TINY)
    t, _ = run_scenario(cfg, 0)
    findings = verify_transcript(Transcript.loads(_tamper_open(t.dumps()), range(3)), cfg)
    assert any("unequal parity" in f for f in findings)


def test_tampered_outcome_found():
    cfg = parse_config(TINY)
    t, _ = run_scenario(cfg, 0)
    text = t.dumps().replace('"w7":1', '"w7":0')
    lines = text.splitlines()
    last = EventRecord.from_line(lines[-1])
    lines[-1] = last._replace(payload={"variant": "Success", "result": {"w7": 0}}).line()
    findings = verify_transcript(Transcript.loads("\n".join(lines), range(3)), cfg)
    assert any("differs from plaintext" in f for f in findings)


def test_stats_empty_batch_has_header_only():
    assert format_tsv(stats([])) == "\t".join(STATS_COLUMNS) + "\n"


def test_stats_uot_learn_rate():
    cfg = load_config(SCENARIOS["uot"])
    cfg.trials = 2000
    t, _ = run_scenario(cfg)
    (row,) = stats([t])
    assert row["uot_count"] == 2000 and abs(row["uot_learn_rate"] - 0.5) < 0.05
    assert abs(row["aot_delivery_rate"] - 0.5) < 0.01


def test_stats_ob_cover_columns():
    cfg = load_config(SCENARIOS["ob_cover"])
    cfg.trials = 2000
    t, _ = run_scenario(cfg)
    (row,) = stats([t])
    assert row["ob_cover_formula"] == pytest.approx((7 / 8) ** 8)
    assert abs(row["ob_cover_rate"] - row["ob_cover_formula"]) < 0.04


def test_stats_counts_identifications():
    cfg = load_config(SCENARIOS["reveal_withhold"])
    t, _ = run_scenario(cfg)
    (row,) = stats([t])
    assert (row["cheat_runs"], row["detected"], row["correct_identifications"], row["honest_accusations"]) == \
        (1, 1, 1, 0)


@pytest.mark.parametrize("text,line", [
    (TINY.replace("n = 3", "n = three"), 3),
    (TINY.replace("P1 = 0", "P1 = 2"), 9),
    (TINY + "\n[cheat x]\nactor = 1\nhook = NOWHERE\naction = withhold\n", 19),
    (TINY.replace("seeds = 0-1", "seeds = 0-1\nprotocol = tcp"), 5),
])
def test_config_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert info.value.line == line


def test_missing_circuit_is_config_error():
    with pytest.raises(ConfigError):
        parse_config(TINY.replace("majority3.txt", "nope.txt"))


def test_main_run_and_verify(tmp_path, capsys):
    cfg = tmp_path / "tiny.ini"
    cfg.write_text(TINY)
    assert main(["run", str(cfg), "--seed", "0", "--out", str(tmp_path / "out")]) == 0
    assert "tiny\t0\tSuccess\tw7=1\tok" in capsys.readouterr().out
    log = tmp_path / "out" / "tiny-0.log"
    assert main(["verify", str(log), str(cfg)]) == 0
    assert "0 finding(s)" in capsys.readouterr().out
    log.write_text(_tamper_open(log.read_text()))
    assert main(["verify", str(log), str(cfg)]) == 1


def test_main_failed_expectation_exit_code(tmp_path):
    cfg = tmp_path / "wrong.ini"
    cfg.write_text(TINY.replace("output = 1", "output = 0"))
    assert main(["run", str(cfg), "--seed", "0"]) == 1


def test_main_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(TINY.replace("n = 3", "n = x"))
    assert main(["run", str(cfg)]) == 2
    assert "bad.ini:3" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.ini")]) == 2


def test_main_stats_over_logs(tmp_path, capsys):
    cfg = tmp_path / "tiny.ini"
    cfg.write_text(TINY)
    main(["run", str(cfg), "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["stats", str(tmp_path / "*.log")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].split("\t") == list(STATS_COLUMNS)
    assert out[1].split("\t")[:2] == ["tiny", "2"]
