"""Command-line front end: output lines, exit codes, determinism."""

import json
import shutil
import subprocess
import sys

from bucketforge.cli import run
from bucketforge.model import parse_cnf

from conftest import DIAG_TEXT

CHAIN_TEXT = """BAYES
3
2 2 2
3
1 0
2 0 1
2 1 2
2 0.7 0.3
4 0.7 0.3 0.3 0.7
4 0.7 0.3 0.3 0.7
"""

COPY_TEXT = """BAYES
2
2 2
2
1 0
2 0 1
2 0.5 0.5
4 1 0 0 1
"""

OFF_ROW_TEXT = """BAYES
1
2
1
1 0
2 0.8 0.4
"""

DIAGRAM_TEXT = """ID
2
2 2
1 0
1
2 0 1
4 0.2 0.8 0.9 0.1
1
1 1
2 10.0 1.0
"""

SAT_CNF = """p cnf 3 2
1 2 0
-1 3 0
"""

UNSAT_CNF = """p cnf 1 2
1 0
-1 0
"""


def lines_of(capsys):
    return capsys.readouterr().out.splitlines()


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_belief_lines(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["bel", net, "--query", "0"]) == 0
    assert lines_of(capsys) == ["belief=0.7 0.3", "evidence_mass=1"]


def test_belief_oracle_lines_agree(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    ev = write(tmp_path, "obs.ev", "1 2 1\n")
    assert run(["bel", net, "--query", "0", "--evidence", ev, "--oracle"]) == 0
    got = dict(line.split("=", 1) for line in lines_of(capsys))
    assert got["belief"] == got["oracle_belief"]
    assert got["evidence_mass"] == got["oracle_evidence_mass"]


def test_mpe_lines(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["mpe", net]) == 0
    assert lines_of(capsys) == ["value=0.343", "assignment=0=0 1=0 2=0"]


def test_map_accepts_variable_names(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["map", net, "--hyp", "X0,2", "--oracle"]) == 0
    got = dict(line.split("=", 1) for line in lines_of(capsys))
    assert got["value"] == got["oracle_value"]
    assert got["assignment"] == got["oracle_assignment"]


def test_meu_hand_value(tmp_path, capsys):
    diagram = write(tmp_path, "decide.id", DIAGRAM_TEXT)
    assert run(["meu", diagram]) == 0
    assert lines_of(capsys) == ["value=9.1", "assignment=0=1"]


def test_cond_mpe_matches_plain_mpe(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["mpe", net]) == 0
    plain = dict(line.split("=", 1) for line in lines_of(capsys))
    assert run(["cond-mpe", net, "--cutset", "0"]) == 0
    conditioned = dict(line.split("=", 1) for line in lines_of(capsys))
    assert conditioned["cutset"] == "0"
    assert conditioned["iterations"] == "2"
    assert conditioned["value"] == plain["value"]
    assert conditioned["assignment"] == plain["assignment"]


def test_cond_mpe_wbound_and_parallel_match_serial(tmp_path, capsys):
    net = write(tmp_path, "diag.net", DIAG_TEXT)
    assert run(["cond-mpe", net, "--wbound", "1", "--parallel", "1"]) == 0
    serial = capsys.readouterr().out
    assert run(["cond-mpe", net, "--wbound", "1", "--parallel", "4"]) == 0
    assert capsys.readouterr().out == serial


def test_repeated_runs_are_byte_identical(tmp_path, capsys):
    net = write(tmp_path, "diag.net", DIAG_TEXT)
    ev = write(tmp_path, "obs.ev", "1 5 1\n")
    argv = ["bel", net, "--query", "2", "--evidence", ev, "--trace", "--oracle"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first


def test_json_mode_holds_the_same_numbers(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["bel", net, "--query", "1", "--json"]) == 0
    payload = capsys.readouterr().out
    obj = json.loads(payload)
    assert payload == json.dumps(obj, sort_keys=True) + "\n"
    assert run(["bel", net, "--query", "1"]) == 0
    line_mode = dict(line.split("=", 1) for line in lines_of(capsys))
    assert " ".join(f"{p:.12g}" for p in obj["belief"]) == line_mode["belief"]
    assert f"{obj['evidence_mass']:.12g}" == line_mode["evidence_mass"]


def test_trace_lines_come_first(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    assert run(["bel", net, "--query", "0", "--trace"]) == 0
    out = lines_of(capsys)
    assert out[0].startswith("trace var=")
    # Two buckets are eliminated; the query bucket is read, not processed.
    assert sum(1 for line in out if line.startswith("trace ")) == 2
    assert out[-2].startswith("belief=")


def test_inline_and_file_orderings(tmp_path, capsys):
    net = write(tmp_path, "diag.net", DIAG_TEXT)
    order = write(tmp_path, "by-hand.ord", "0 1 2 4 3 5\n")
    assert run(["mpe", net, "--order", "given:X0,X1,X2,X4,X3,X5"]) == 0
    inline = capsys.readouterr().out
    assert run(["mpe", net, "--order", order]) == 0
    assert capsys.readouterr().out == inline
    assert run(["mpe", net, "--order", "min-degree"]) == 0
    heuristic = dict(line.split("=", 1) for line in lines_of(capsys))
    assert heuristic["value"] == dict(
        line.split("=", 1) for line in inline.splitlines())["value"]


def test_lax_mode_renormalizes_off_rows(tmp_path, capsys):
    net = write(tmp_path, "off.net", OFF_ROW_TEXT)
    assert run(["bel", net, "--query", "0"]) == 2
    capsys.readouterr()
    assert run(["bel", net, "--query", "0", "--lax"]) == 0
    out = lines_of(capsys)
    assert out[0].startswith("belief=0.666666666667 0.333333333333")


def test_usage_and_model_error_exit_codes(tmp_path, capsys):
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    bad = write(tmp_path, "bad.net", "BAYES\n1\n2\n1\n1 0\n3 0.5 0.5\n")
    short = write(tmp_path, "short.ord", "0 1\n")
    late_query = write(tmp_path, "late.ord", "0 1 2\n")
    assert run([]) == 1
    assert run(["bel", net]) == 1
    assert run(["bel", net, "--query", "9"]) == 1
    assert run(["bel", net, "--query", "1", "--order", late_query]) == 1
    assert run(["cond-mpe", net, "--wbound", "-1"]) == 1
    assert run(["cond-mpe", net, "--cutset", "0", "--parallel", "0"]) == 1
    assert run(["map", net, "--hyp", "bogus"]) == 1
    assert run(["bel", net, "--query", "1", "--order", short]) == 2
    assert run(["bel", str(tmp_path / "missing.net"), "--query", "0"]) == 2
    assert run(["bel", bad, "--query", "0"]) == 2
    capsys.readouterr()


def test_impossible_evidence_exit_codes(tmp_path, capsys):
    net = write(tmp_path, "copy.net", COPY_TEXT)
    ev = write(tmp_path, "conflict.ev", "2 0 0 1 1\n")
    assert run(["bel", net, "--query", "0", "--evidence", ev]) == 3
    assert lines_of(capsys) == ["IMPOSSIBLE EVIDENCE"]
    assert run(["mpe", net, "--evidence", ev]) == 3
    got = dict(line.split("=", 1) for line in lines_of(capsys))
    assert got["value"] == "0"
    assert "note" in got


def test_dr_model_satisfies_the_theory(tmp_path, capsys):
    cnf = write(tmp_path, "theory.cnf", SAT_CNF)
    out_path = str(tmp_path / "extension.cnf")
    assert run(["dr", cnf, "--extension", out_path, "--trace"]) == 0
    out = lines_of(capsys)
    got = dict(line.split("=", 1) for line in out if not line.startswith("trace "))
    assert got["sat"] == "1"
    model = {}
    for pair in got["model"].split():
        prop, val = pair.split("=")
        model[int(prop)] = bool(int(val))
    for clause in parse_cnf(SAT_CNF).clauses:
        assert any(model[abs(lit)] == (lit > 0) for lit in clause)
    extension = parse_cnf(open(out_path).read())
    assert extension.num_props == 3
    assert len(extension.clauses) == int(got["clauses"])
    assert sum(1 for line in out if line.startswith("trace prop=")) == 3


def test_dr_evidence_pins_unit_clauses(tmp_path, capsys):
    cnf = write(tmp_path, "theory.cnf", SAT_CNF)
    ev = write(tmp_path, "obs.ev", "1 1 1\n")
    assert run(["dr", cnf, "--evidence", ev]) == 0
    got = dict(line.split("=", 1) for line in lines_of(capsys))
    assert "1=1" in got["model"].split()
    assert "3=1" in got["model"].split()


def test_dr_unsat_exit_code(tmp_path, capsys):
    cnf = write(tmp_path, "clash.cnf", UNSAT_CNF)
    assert run(["dr", cnf]) == 3
    assert lines_of(capsys) == ["UNSAT"]
    assert run(["dr", cnf, "--json"]) == 3
    assert json.loads(capsys.readouterr().out) == {"sat": 0}


def test_stats_reports_both_heuristics(tmp_path, capsys):
    net = write(tmp_path, "diag.net", DIAG_TEXT)
    assert run(["stats", net]) == 0
    out = lines_of(capsys)
    assert out[0] == "kind=bayes"
    assert out[1] == "variables=6"
    labels = [line.split("=", 1)[1] for line in out if line.startswith("order=")]
    assert labels == ["min-degree", "min-fill"]
    reports = [line for line in out if line.startswith("w=")]
    assert reports == ["w=2 wstar=2 fill=0"] * 2


def test_stats_conditions_on_evidence(tmp_path, capsys):
    net = write(tmp_path, "diag.net", DIAG_TEXT)
    ev = write(tmp_path, "obs.ev", "1 4 0\n")
    assert run(["stats", net, "--evidence", ev]) == 0
    out = lines_of(capsys)
    for line in out:
        if line.startswith("sequence="):
            ids = line.split("=", 1)[1].split()
            assert "4" not in ids
            assert len(ids) == 5


def test_stats_cnf_uses_one_based_propositions(tmp_path, capsys):
    cnf = write(tmp_path, "theory.cnf", SAT_CNF)
    assert run(["stats", cnf]) == 0
    out = lines_of(capsys)
    assert out[0] == "kind=cnf"
    assert out[1] == "propositions=3"
    for line in out:
        if line.startswith("sequence="):
            assert sorted(line.split("=", 1)[1].split()) == ["1", "2", "3"]


def test_console_script_is_installed(tmp_path):
    exe = shutil.which("bucketforge")
    assert exe, "console script missing; install with pip install -e ."
    net = write(tmp_path, "chain.net", CHAIN_TEXT)
    proc = subprocess.run([exe, "bel", net, "--query", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["belief=0.7 0.3", "evidence_mass=1"]
    proc = subprocess.run([sys.executable, "-m", "bucketforge.cli", "bel", net,
                           "--query", "0"], capture_output=True, text=True)
    assert proc.returncode == 0
