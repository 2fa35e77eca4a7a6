"""Scenario runner: declarative configs, simulation, transcript checks, statistics.

A scenario is an INI file::

    [scenario]
    name = majority3
    n = 3
    seeds = 0-19
    protocol = mpc          ; mpc | uot | ob
    circuit = majority3.txt ; relative to the config, or a bundled circuit

    [inputs]
    P0 = 1                  ; bits of P0's input wires, in circuit order

    [cheat dispute]
    actor = 1
    hook = GCOT_STEP4
    action = withhold

    [expect]
    outcome = cheater       ; success | cheater | split | aborted
    culprit = 1

Optional sections ``[gbc]``, ``[gcot]``, ``[broadcast]`` override the
parameter dataclasses field by field; ``[adversary] collusions = 0 1; 2``
lists the maximal tolerable collusions.

Subcommands: ``run <config>``, ``verify <transcript> <config>`` and
``stats <glob>...``.  Exit status 0 means every expectation was met.
"""

from __future__ import annotations

import argparse
import configparser
import glob
import math
import re
import sys
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .broadcast import BroadcastParams
from .codes import LinearCode, gcot_dimension
from .commit import GbcParams, check_linear_openings
from .core import (
    FUNC,
    Aborted,
    AdversaryStructure,
    CheatBook,
    CheaterIdentified,
    CheatScript,
    GroupSplit,
    Success,
    Transcript,
    monotone_close,
    outcome_to_payload,
    unpack_bits,
)
from .mpc import Circuit, CircuitError, MpcParams, run_protocol
from .ot import GcotParams, uot_batch
from .simnet import Network

PROTOCOLS = ("mpc", "uot", "ob")
EXPECTED = {"success": Success, "cheater": CheaterIdentified, "split": GroupSplit, "aborted": Aborted}


class ConfigError(ValueError):
    def __init__(self, msg: str, line: int | None = None, path: str | None = None):
        where = f"{path or '<config>'}:{line}: " if line is not None else f"{path}: " if path else ""
        super().__init__(where + msg)
        self.line = line


@dataclass
class ScenarioConfig:
    name: str
    n: int
    seeds: list
    protocol: str = "mpc"
    circuit: Circuit | None = None
    inputs: dict = field(default_factory=dict)
    structure: AdversaryStructure | None = None
    cheats: list = field(default_factory=list)
    mpc: MpcParams = field(default_factory=MpcParams)
    trials: int = 1000
    expect: dict = field(default_factory=dict)
    path: str = ""

    @property
    def collusion(self) -> frozenset:
        return frozenset(c.actor for c in self.cheats)

    def expected_outputs(self) -> dict | None:
        if self.protocol != "mpc" or self.collusion:
            return None
        return self.circuit.evaluate(self.inputs)


# ---------------------------------------------------------------------------
# parsing


def _line_index(text: str) -> dict:
    """(section, key) -> line number, and (section, None) -> header line."""
    idx, sec = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        mt = re.match(r"^\[(.+)\]$", line)
        if mt:
            sec = mt.group(1).strip()
            idx[(sec, None)] = no
        elif sec is not None and "=" in line and not line.startswith((";", "#")):
            idx[(sec, line.split("=", 1)[0].strip().lower())] = no
    return idx


def _convert(value: str, like):
    """Read ``value`` as the type of ``like``; fractions such as ``1/8`` are allowed for floats."""
    if isinstance(like, bool):
        if value.lower() not in ("true", "false", "yes", "no", "1", "0"):
            raise ValueError(f"cannot read {value!r} as a boolean")
        return value.lower() in ("true", "yes", "1")
    if isinstance(like, int) or like is None:
        return int(value)
    if isinstance(like, float):
        if "/" in value:
            num, den = value.split("/")
            return float(num) / float(den)
        return float(value)
    return value


def _override(obj, section, cp, lines, path):
    if not cp.has_section(section):
        return obj
    names = {f.name for f in fields(obj)}
    changes = {}
    for key, value in cp.items(section):
        line = lines.get((section, key))
        if key not in names:
            raise ConfigError(f"unknown key {key!r} in [{section}]", line, path)
        try:
            changes[key] = _convert(value, getattr(obj, key))
        except ValueError:
            raise ConfigError(f"cannot read {section}.{key} = {value!r}", line, path) from None
    return replace(obj, **changes)


def _seeds(spec: str) -> list:
    out = []
    for part in spec.replace(",", " ").split():
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _resolve_circuit(ref: str, base: Path) -> str:
    p = (base / ref) if not Path(ref).is_absolute() else Path(ref)
    if p.is_file():
        return p.read_text()
    bundled = resources.files("aotmpc") / "circuits" / Path(ref).name
    if bundled.is_file():
        return bundled.read_text()
    raise FileNotFoundError(ref)


def parse_config(text: str, base: str | Path = ".", path: str | None = None) -> ScenarioConfig:
    """Parse and validate a scenario; errors carry the offending line number."""
    base = Path(base)
    lines = _line_index(text)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=path or "<config>")
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None), path) from None

    def err(msg, sec, key=None):
        raise ConfigError(msg, lines.get((sec, key), lines.get((sec, None))), path)

    if not cp.has_section("scenario"):
        raise ConfigError("missing [scenario] section", 1, path)
    sc = cp["scenario"]
    known = {"name", "n", "seed", "seeds", "protocol", "circuit", "trials", "setup", "triples", "f"}
    for key in sc:
        if key not in known:
            err(f"unknown key {key!r} in [scenario]", "scenario", key)
    try:
        n = int(sc.get("n", ""))
    except ValueError:
        err("n must be an integer", "scenario", "n")
    if n < 2:
        err("a scenario needs at least two players", "scenario", "n")
    protocol = sc.get("protocol", "mpc")
    if protocol not in PROTOCOLS:
        err(f"protocol must be one of {', '.join(PROTOCOLS)}", "scenario", "protocol")
    try:
        seeds = _seeds(sc.get("seeds", sc.get("seed", "0")))
    except ValueError:
        err("cannot read seeds", "scenario", "seeds" if "seeds" in sc else "seed")
    cfg = ScenarioConfig(name=sc.get("name", Path(path).stem if path else "scenario"), n=n, seeds=seeds,
                         protocol=protocol, path=path or "")
    try:
        cfg.trials = int(sc.get("trials", "1000"))
    except ValueError:
        err("trials must be an integer", "scenario", "trials")

    gbc = _override(GbcParams(k=2, m=4, pairs=4) if protocol == "mpc" else GbcParams(), "gbc", cp, lines, path)
    gcot = _override(GcotParams(), "gcot", cp, lines, path)
    bcast = _override(BroadcastParams(), "broadcast", cp, lines, path)
    extra = {}
    for key, like in (("f", 0), ("setup", True), ("triples", 0)):
        if key in sc:
            try:
                extra[key] = _convert(sc[key], like)
            except ValueError:
                err(f"cannot read {key} = {sc[key]!r}", "scenario", key)
    if "f" in extra:
        bcast = replace(bcast, f=extra.pop("f"))
    cfg.mpc = MpcParams(gbc=gbc, gcot=gcot, bcast=bcast, **extra)
    if gcot_dimension(gcot.m, gcot.sigma) > gcot.m:
        err("sigma too large for the code length", "gcot", "sigma")

    if protocol == "mpc":
        if "circuit" not in sc:
            err("an mpc scenario needs a circuit", "scenario")
        try:
            cfg.circuit = Circuit.parse(_resolve_circuit(sc["circuit"], base))
        except FileNotFoundError:
            err(f"circuit file {sc['circuit']!r} not found", "scenario", "circuit")
        except CircuitError as exc:
            err(f"circuit {sc['circuit']}: {exc}", "scenario", "circuit")
        if any(p >= n for p in cfg.circuit.owners()):
            err("circuit names an input owner outside the player set", "scenario", "circuit")
        given = dict(cp.items("inputs")) if cp.has_section("inputs") else {}
        for key in given:
            if not re.fullmatch(r"p\d+", key) or int(key[1:]) >= n:
                err(f"unknown player {key!r}", "inputs", key)
        for p in sorted(cfg.circuit.owners()):
            wires = cfg.circuit.inputs_of(p)
            vals = given.get(f"p{p}", "").split()
            if len(vals) != len(wires) or any(v not in ("0", "1") for v in vals):
                err(f"P{p} needs {len(wires)} input bit(s)", "inputs", f"p{p}" if f"p{p}" in given else None)
            cfg.inputs.update({w: int(v) for w, v in zip(wires, vals)})

    for sec in cp.sections():
        if not sec.startswith("cheat"):
            continue
        body = dict(cp.items(sec))
        try:
            actor = int(body.pop("actor"))
            hook, action = body.pop("hook").upper(), body.pop("action")
        except (KeyError, ValueError):
            err("a cheat needs actor, hook and action", sec)
        if not 0 <= actor < n:
            err(f"actor {actor} is not a player", sec, "actor")
        params = {}
        for k, v in body.items():
            try:
                params[k] = _convert(v, 0.0 if "." in v else 0)
            except ValueError:
                err(f"cannot read cheat parameter {k} = {v!r}", sec, k)
        try:
            CheatBook([CheatScript(actor, hook, action, params)])
        except ValueError as exc:
            err(str(exc), sec, "action")
        cfg.cheats.append(CheatScript(actor, hook, action, params))

    players = range(n)
    if cp.has_section("adversary"):
        raw = cp["adversary"].get("collusions", "")
        try:
            sets = [[int(x) for x in part.split()] for part in raw.split(";") if part.strip()]
            cfg.structure = monotone_close(sets, players)
        except ValueError as exc:
            err(f"bad adversary structure: {exc}", "adversary", "collusions")
    else:
        cfg.structure = monotone_close([{p} for p in players] + ([cfg.collusion] if cfg.collusion else []), players)
    if cfg.collusion and cfg.collusion not in cfg.structure:
        first = next(s for s in cp.sections() if s.startswith("cheat"))
        err(f"collusion {sorted(cfg.collusion)} is not in the adversary structure", first, "actor")

    if cp.has_section("expect"):
        ex = dict(cp.items("expect"))
        if "outcome" in ex and ex["outcome"] not in EXPECTED:
            err(f"outcome must be one of {', '.join(EXPECTED)}", "expect", "outcome")
        if "culprit" in ex:
            try:
                ex["culprit"] = int(ex["culprit"])
            except ValueError:
                err("culprit must be a player index", "expect", "culprit")
        if "output" in ex:
            ex["output"] = [int(v) for v in ex["output"].split()]
        cfg.expect = ex
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(), path.parent, str(path))


def bundled_scenarios() -> list[Path]:
    root = resources.files("aotmpc") / "scenarios"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".ini"))


# ---------------------------------------------------------------------------
# running


def run_scenario(cfg: ScenarioConfig, seed: int | None = None, book: CheatBook | None = None):
    """One deterministic run; returns ``(transcript, outcome)``.

    ``book`` replaces the cheat book built from ``cfg`` (callers pass one
    to inspect which deviations fired).
    """
    seed = cfg.seeds[0] if seed is None else seed
    net = Network(cfg.n, seed=seed, cheats=book if book is not None else CheatBook(cfg.cheats))
    net.publish(FUNC, "HEADER", {"scenario": cfg.name, "protocol": cfg.protocol, "seed": seed,
                                 "collusion": sorted(cfg.collusion), "trials": cfg.trials})
    if cfg.protocol == "mpc":
        outcome = run_protocol(net, cfg.circuit, cfg.inputs, cfg.mpc, cfg.structure)
    elif cfg.protocol == "uot":
        bits = net.rng_stream("test/uot-bits").integers(0, 2, cfg.trials, dtype=np.uint8)
        u = uot_batch(net, 0, 1, bits, cfg.mpc.gbc)
        outcome = Success({"learned": int(u.learned.sum()), "trials": cfg.trials,
                           "correct": bool(np.all(u.values[u.learned] == bits[u.learned]))})
        net.publish(FUNC, "OUTCOME", outcome_to_payload(outcome))
    else:
        m = cfg.mpc.gbc.m
        bits = net.rng_stream("test/ob-bits").integers(0, 2, (cfg.trials, m), dtype=np.uint8)
        covered = 0
        for t in range(cfg.trials):
            got = net.ob_send(0, bits[t], ref=f"ob{t}")
            covered += bool(np.all(np.any([d.known for d in got.values()], axis=0)))
        outcome = Success({"covered": covered, "trials": cfg.trials})
        net.publish(FUNC, "OUTCOME", outcome_to_payload(outcome))
    return net.transcript, outcome


def check_expectation(cfg: ScenarioConfig, outcome) -> list[str]:
    """Mismatches between an outcome and the scenario's expectations."""
    problems = []
    want = cfg.expect.get("outcome")
    if want and not isinstance(outcome, EXPECTED[want]):
        problems.append(f"expected {want}, got {type(outcome).__name__}")
    if isinstance(outcome, CheaterIdentified):
        if "culprit" in cfg.expect and outcome.culprit != cfg.expect["culprit"]:
            problems.append(f"expected culprit P{cfg.expect['culprit']}, got P{outcome.culprit}")
        if outcome.culprit not in cfg.collusion:
            problems.append(f"honest P{outcome.culprit} accused")
    if isinstance(outcome, GroupSplit):
        honest = set(range(cfg.n)) - cfg.collusion
        if not any(honest <= set(b) for b in outcome.blocks):
            problems.append("honest players ended in different blocks")
    if isinstance(outcome, Success) and cfg.protocol == "mpc":
        plain = cfg.circuit.evaluate(cfg.inputs)
        if outcome.result != plain:
            problems.append(f"output {outcome.result} differs from plaintext {plain}")
        if "output" in cfg.expect and list(outcome.result.values()) != cfg.expect["output"]:
            problems.append(f"expected output {cfg.expect['output']}")
    return problems


def describe_outcome(outcome) -> str:
    if isinstance(outcome, Success):
        r = outcome.result
        return " ".join(f"{k}={v}" for k, v in r.items()) if isinstance(r, dict) else str(r)
    if isinstance(outcome, CheaterIdentified):
        return f"P{outcome.culprit}: {outcome.reason}"
    if isinstance(outcome, GroupSplit):
        return " | ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in outcome.blocks)
    return outcome.reason


# ---------------------------------------------------------------------------
# verification


def _proof_findings(transcript: Transcript) -> list[str]:
    out, pending = [], {}
    for e in transcript._events:
        if e.kind != "PROOF":
            continue
        if e.payload.get("stage") == "claim":
            pending[e.actor] = e
            continue
        claim = pending.pop(e.payload["prover"], None)
        if claim is None:
            out.append(f"round {e.round}: proof verdict without a claim")
            continue
        c = claim.payload
        ok = check_linear_openings(unpack_bits(c["A"]), unpack_bits(c["const"]), unpack_bits(c["e"]),
                                   unpack_bits(e.payload["challenges"]), unpack_bits(e.payload["openings"]))
        if bool(ok.all()) != bool(e.payload["ok"]):
            out.append(f"round {e.round}: {c['relation']} proof verdict disagrees with its openings")
    return out


def _parity_findings(transcript: Transcript) -> list[str]:
    out = []
    for e in transcript.of_kind("GBC_OPEN"):
        if e.visibility != transcript.everyone:
            continue
        s = unpack_bits(e.payload["strings"]).astype(np.int64)
        par = s.sum(-1) % 2
        flat = par.reshape(par.shape[0], -1)
        bad = np.nonzero(~np.all(flat == flat[:, :1], axis=1))[0]
        complained = any(c.ref == e.ref and c.round == e.round for c in transcript.of_kind("COMPLAINT"))
        if bad.size and not complained:
            out.append(f"round {e.round}: opening {e.ref} has strings of unequal parity (rows {bad.tolist()})")
    return out


def _gcot_findings(transcript: Transcript, cfg: ScenarioConfig) -> list[str]:
    out = []
    gp = cfg.mpc.gcot
    s = gp.s
    I, I2 = None, None
    for e in transcript._events:
        if not e.kind.startswith("GCOT_STEP") or e.visibility != transcript.everyone or "refuse" in e.payload:
            continue
        step = int(e.kind[-1])
        p = e.payload
        if step == 1:
            code = LinearCode.from_description(p["code"])
            if code.m != gp.m or code.k != gcot_dimension(gp.m, gp.sigma) or code.d <= gp.epsilon * gp.m:
                out.append(f"round {e.round}: agreed code [{code.m},{code.k},{code.d}] violates the parameters")
            I = I2 = None
        elif step == 4:
            I = set(p["I"])
            if len(I) != 2 * s:
                out.append(f"round {e.round}: |I| = {len(I)}, expected {2 * s}")
        elif step == 6:
            I2 = set(p["I2"])
            if len(I2) != s or (I and I2 & I):
                out.append(f"round {e.round}: I2 has size {len(I2)} or meets I")
        elif step == 8:
            h = set(p["h"])
            if not h or h & ((I or set()) | (I2 or set())):
                out.append(f"round {e.round}: amplification function touches opened positions")
    return out


def _trichotomy_findings(transcript: Transcript, cfg: ScenarioConfig) -> list[str]:
    outcome = transcript.outcome()
    if outcome is None:
        return ["transcript has no outcome"]
    if isinstance(outcome, Aborted):
        return [f"run aborted: {outcome.reason}"]
    out = []
    if isinstance(outcome, CheaterIdentified) and outcome.culprit not in cfg.collusion:
        out.append(f"honest P{outcome.culprit} identified as cheater")
    if isinstance(outcome, GroupSplit):
        honest = set(range(cfg.n)) - cfg.collusion
        if not any(honest <= set(b) for b in outcome.blocks):
            out.append("honest players ended in different blocks")
    if isinstance(outcome, Success) and cfg.protocol == "mpc":
        plain = cfg.circuit.evaluate(cfg.inputs)
        if outcome.result != plain:
            out.append(f"output {outcome.result} differs from plaintext {plain}")
    return out


def verify_transcript(transcript: Transcript, cfg: ScenarioConfig) -> list[str]:
    """Re-check every publicly checkable step; returns the findings (empty = clean)."""
    return (_parity_findings(transcript) + _proof_findings(transcript) + _gcot_findings(transcript, cfg)
            + _trichotomy_findings(transcript, cfg))


# ---------------------------------------------------------------------------
# statistics

STATS_COLUMNS = ("scenario", "runs", "aot_bits", "aot_delivery_rate", "uot_count", "uot_learn_rate",
                 "ob_strings", "ob_cover_rate", "ob_cover_formula", "cheat_runs", "detected",
                 "correct_identifications", "honest_accusations")


def run_stats(transcript: Transcript) -> dict:
    """Counters for one run, read off its transcript."""
    head = next((e.payload for e in transcript.of_kind("HEADER") if "scenario" in e.payload), {})
    row = {"scenario": head.get("scenario", "?"), "runs": 1, "aot_bits": 0, "aot_known": 0, "uot_count": 0,
           "uot_learned": 0, "ob_strings": 0, "ob_covered": 0, "ob_receivers": 0, "ob_m": 0,
           "cheat_runs": 0, "detected": 0, "correct_identifications": 0, "honest_accusations": 0}
    ob = {}
    for e in transcript._events:
        if e.actor == "ANON" and "known" in e.payload:
            k = unpack_bits(e.payload["known"])
            row["aot_bits"] += k.size
            row["aot_known"] += int(k.sum())
        elif e.kind == "UOT" and "learned" in e.payload:
            got = unpack_bits(e.payload["learned"])
            row["uot_count"] += got.size
            row["uot_learned"] += int(got.sum())
        elif e.kind == "OB" and "known" in e.payload:
            k = unpack_bits(e.payload["known"]).astype(bool)
            ob[e.ref] = k if e.ref not in ob else ob[e.ref] | k
            row["ob_m"] = k.size
    if ob:
        row["ob_strings"] = len(ob)
        row["ob_covered"] = sum(bool(v.all()) for v in ob.values())
        row["ob_receivers"] = len(transcript.players) - 1
    collusion = set(head.get("collusion", []))
    if collusion:
        row["cheat_runs"] = 1
        outcome = transcript.outcome()
        if isinstance(outcome, CheaterIdentified):
            row["detected"] = 1
            ok = outcome.culprit in collusion
            row["correct_identifications"] += ok
            row["honest_accusations"] += not ok
        elif isinstance(outcome, GroupSplit):
            row["detected"] = 1
            honest = set(transcript.players) - collusion
            ok = any(honest <= set(b) for b in outcome.blocks)
            row["correct_identifications"] += ok
            row["honest_accusations"] += not ok
    return row


def stats(transcripts) -> list[dict]:
    """One aggregated row per scenario; an empty batch gives an empty table."""
    acc = {}
    for t in transcripts:
        r = run_stats(t)
        a = acc.setdefault(r["scenario"], {k: 0 for k in r if k != "scenario"})
        for k, v in r.items():
            if k in ("ob_receivers", "ob_m"):
                a[k] = max(a[k], v)
            elif k != "scenario":
                a[k] += v
    rows = []
    for name, a in acc.items():
        rate = lambda num, den: (num / den) if den else math.nan  # noqa: E731
        formula = (1 - 2.0 ** -a["ob_receivers"]) ** a["ob_m"] if a["ob_strings"] else math.nan
        rows.append({
            "scenario": name, "runs": a["runs"], "aot_bits": a["aot_bits"],
            "aot_delivery_rate": rate(a["aot_known"], a["aot_bits"]), "uot_count": a["uot_count"],
            "uot_learn_rate": rate(a["uot_learned"], a["uot_count"]), "ob_strings": a["ob_strings"],
            "ob_cover_rate": rate(a["ob_covered"], a["ob_strings"]), "ob_cover_formula": formula,
            "cheat_runs": a["cheat_runs"], "detected": a["detected"],
            "correct_identifications": a["correct_identifications"],
            "honest_accusations": a["honest_accusations"],
        })
    return rows


def format_tsv(rows: list[dict], columns=STATS_COLUMNS) -> str:
    def cell(v):
        if isinstance(v, float):
            return "nan" if math.isnan(v) else f"{v:.4f}"
        return str(v)
    lines = ["\t".join(columns)]
    lines += ["\t".join(cell(r[c]) for c in columns) for r in rows]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# command line


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    seeds = [args.seed] if args.seed is not None else cfg.seeds
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    print("scenario\tseed\toutcome\tdetail\tstatus")
    failed = 0
    for seed in seeds:
        transcript, outcome = run_scenario(cfg, seed)
        problems = check_expectation(cfg, outcome)
        failed += bool(problems)
        if out_dir:
            (out_dir / f"{cfg.name}-{seed}.log").write_text(transcript.dumps())
        status = "ok" if not problems else "FAIL: " + "; ".join(problems)
        print(f"{cfg.name}\t{seed}\t{type(outcome).__name__}\t{describe_outcome(outcome)}\t{status}")
    return 1 if failed else 0


def _cmd_verify(args) -> int:
    cfg = load_config(args.config)
    transcript = Transcript.loads(Path(args.transcript).read_text(), range(cfg.n))
    findings = verify_transcript(transcript, cfg)
    for f in findings:
        print(f)
    print(f"{len(findings)} finding(s)")
    return 1 if findings else 0


def _cmd_stats(args) -> int:
    paths = sorted({p for pattern in args.patterns for p in glob.glob(pattern)})
    transcripts, failed = [], 0
    for p in paths:
        if p.endswith(".ini"):
            cfg = load_config(p)
            for seed in cfg.seeds:
                t, outcome = run_scenario(cfg, seed)
                failed += bool(check_expectation(cfg, outcome))
                transcripts.append(t)
        else:
            transcripts.append(Transcript.loads(Path(p).read_text()))
    sys.stdout.write(format_tsv(stats(transcripts)))
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="aotmpc", description="Run and check simulated MPC scenarios.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config over its seeds")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="run only this seed")
    r.add_argument("--out", help="directory for transcripts")
    r.set_defaults(func=_cmd_run)
    v = sub.add_parser("verify", help="re-check a saved transcript")
    v.add_argument("transcript")
    v.add_argument("config")
    v.set_defaults(func=_cmd_verify)
    s = sub.add_parser("stats", help="TSV statistics over configs and/or transcripts")
    s.add_argument("patterns", nargs="*")
    s.set_defaults(func=_cmd_stats)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
