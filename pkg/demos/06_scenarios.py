"""Scenario files, transcript checks and statistics, as used by the ``aotmpc`` command."""

from aotmpc.cli import bundled_scenarios, format_tsv, load_config, run_scenario, stats, verify_transcript

transcripts = []
for path in bundled_scenarios():
    cfg = load_config(path)
    if cfg.protocol != "mpc":
        cfg.trials = 1000
    t, outcome = run_scenario(cfg)
    findings = verify_transcript(t, cfg)
    print(f"{cfg.name:22s} {type(outcome).__name__:18s} findings={len(findings)}")
    transcripts.append(t)

print()
print(format_tsv(stats(transcripts)))
