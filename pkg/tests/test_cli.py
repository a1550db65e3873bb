"""Input parsing, CSV emission and end-to-end CLI runs."""

import math
import random

import pytest

from conftest import random_graph
from infmax import SeedRecord
from infmax.cli import (
    ConfigError,
    ParseError,
    RunConfig,
    emit_results,
    main,
    parse_alpha,
    parse_input,
    run,
    write_graph,
    write_matrix,
)


def write(path, text):
    path.write_text(text)
    return str(path)


# -- parsing ---------------------------------------------------------------------


def test_parse_matrix(tmp_path):
    p = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n1 0 1.0\n1 1 1.0\n")
    m = parse_input(p, "matrix")
    assert m.n_items == 2 and m.n_elements == 2 and m.m == 3


def test_parse_matrix_reports_line_numbers(tmp_path):
    p = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n1 0\n")
    with pytest.raises(ParseError, match=r":3"):
        parse_input(p, "matrix")


def test_parse_matrix_rejects_duplicates(tmp_path):
    p = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n0 0 1.0\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_input(p, "matrix")


def test_parse_matrix_rejects_nonpositive_utility(tmp_path):
    p = write(tmp_path / "m.txt", "2 2\n0 0 0\n")
    with pytest.raises(ParseError, match=r":2"):
        parse_input(p, "matrix")


def test_parse_graph(tmp_path):
    p = write(tmp_path / "g.txt", "2 2\n0 1 1.5\n1 0 0.5\n")
    g = parse_input(p, "graph")
    assert g.n == 2 and len(g.edges) == 2


def test_parse_graph_checks_edge_count(tmp_path):
    p = write(tmp_path / "g.txt", "2 3\n0 1 1.0\n")
    with pytest.raises(ParseError, match="promises 3"):
        parse_input(p, "graph")


def test_parse_graph_rejects_bad_weight(tmp_path):
    p = write(tmp_path / "g.txt", "2 1\n0 1 -2\n")
    with pytest.raises(ParseError, match=r":2"):
        parse_input(p, "graph")
    p2 = write(tmp_path / "g2.txt", "2 1\n0 1 inf\n")
    with pytest.raises(ParseError):
        parse_input(p2, "graph")


def test_graph_round_trip(tmp_path):
    rng = random.Random(3)
    g = random_graph(rng, 12)
    p = tmp_path / "g.txt"
    write_graph(str(p), g)
    back = parse_input(str(p), "graph")
    assert back.n == g.n
    assert list(back.edges) == list(g.edges)


def test_matrix_round_trip(tmp_path):
    p = write(tmp_path / "m.txt", "3 2\n0 0 0.25\n2 1 1.75\n1 0 0.5\n")
    m = parse_input(p, "matrix")
    q = tmp_path / "m2.txt"
    write_matrix(str(q), m)
    back = parse_input(str(q), "matrix")
    assert back.rows == m.rows and back.n_items == m.n_items


def test_parse_alpha_forms(tmp_path):
    assert parse_alpha("inverse")(2.0) == 0.5
    assert parse_alpha("threshold:1.5")(1.5) == 1.0
    assert parse_alpha("exp:2.0")(2.0) == pytest.approx(math.exp(-1))
    t = write(tmp_path / "alpha.txt", "0 1.0\n2 0.5\n4 0\n")
    tab = parse_alpha(f"table:{t}")
    assert tab(1.0) == 1.0 and tab(2.0) == 0.5 and tab(9.0) == 0.0
    with pytest.raises(ConfigError):
        parse_alpha("log:2")


# -- emission ---------------------------------------------------------------------


def test_emit_empty_sequence(tmp_path):
    out = tmp_path / "r.csv"
    emit_results([], str(out))
    assert out.read_text() == "rank,item,estimated_gain,exact_gain,cumulative_influence\n"


def test_emit_single_seed(tmp_path):
    out = tmp_path / "r.csv"
    emit_results([SeedRecord(3, None, 5.0, 5.0)], str(out))
    lines = out.read_text().splitlines()
    assert lines[1] == "1,3,,5,5"


def test_emit_skips_below_cutoff_and_keeps_prefix_sums(tmp_path):
    seq = [
        SeedRecord(1, 2.5, 2.0, 2.0),
        SeedRecord(0, 1.25, 1.0, 3.0),
        SeedRecord(2, 0.5, 0.1, 3.0, below_cutoff=True),
    ]
    out = tmp_path / "r.csv"
    emit_results(seq, str(out))
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    rows = [line.split(",") for line in lines[1:]]
    cumulative = 0.0
    for row in rows:
        cumulative += float(row[3])
        assert float(row[4]) == pytest.approx(cumulative)


def test_emit_uses_12_significant_digits(tmp_path):
    gain = 1.0 / 3.0
    out = tmp_path / "r.csv"
    emit_results([SeedRecord(0, gain, gain, gain)], str(out))
    assert "0.333333333333" in out.read_text()


# -- end-to-end runs ----------------------------------------------------------------


def test_exact_run_on_fixture(tmp_path):
    src = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n1 0 1.0\n1 1 1.0\n")
    out = tmp_path / "r.csv"
    status = run(RunConfig(input=src, kind="matrix", algorithm="exact", output=str(out)))
    assert status == 0
    lines = out.read_text().splitlines()
    assert lines[1].startswith("1,0,")
    assert lines[2].startswith("2,1,")


def test_skim_runs_are_byte_identical(tmp_path):
    rng = random.Random(7)
    base = random_graph(rng, 15)
    g = type(base)(base.n, tuple((s, d, min(w / 2.0, 1.0)) for s, d, w in base.edges))
    src = tmp_path / "g.txt"
    write_graph(str(src), g)
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        cfg = RunConfig(
            input=str(src),
            kind="graph",
            algorithm="skim",
            family="distance",
            alpha="exp:1.0",
            model="ic",
            instances=2,
            rng_seed=11,
            k=8,
            output=str(out),
        )
        assert run(cfg) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_ic_model_weights_must_be_probabilities(tmp_path):
    src = write(tmp_path / "g.txt", "2 1\n0 1 1.5\n")
    cfg = RunConfig(
        input=src, kind="graph", algorithm="skim", family="reachability", model="ic"
    )
    with pytest.raises(ValueError):
        run(cfg)


def test_matrix_kind_rejects_family():
    cfg = RunConfig(input="x", kind="matrix", family="distance")
    with pytest.raises(ConfigError):
        run(cfg)


def test_graph_kind_requires_family(tmp_path):
    src = write(tmp_path / "g.txt", "2 1\n0 1 1.0\n")
    with pytest.raises(ConfigError):
        run(RunConfig(input=src, kind="graph"))


def test_gamma_flag_builds_weighted_aggregation(tmp_path):
    src = write(tmp_path / "m.txt", "3 1\n0 0 1.0\n1 0 0.5\n2 0 0.2\n")
    out = tmp_path / "r.csv"
    cfg = RunConfig(
        input=src, kind="matrix", algorithm="exact", gamma=(1.0, 0.5), output=str(out)
    )
    run(cfg)
    rows = out.read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["0", "1", "2"]
    assert float(rows[-1].split(",")[4]) == pytest.approx(1.25)


def test_gamma_and_ell_must_agree():
    cfg = RunConfig(input="x", kind="matrix", gamma=(1.0, 0.5), ell=3)
    with pytest.raises(ConfigError):
        run(cfg)


def test_verify_reports_per_seed_ratios(tmp_path, capsys):
    rng = random.Random(13)
    g = random_graph(rng, 30)
    src = tmp_path / "g.txt"
    write_graph(str(src), g)
    cfg = RunConfig(
        input=str(src),
        kind="graph",
        algorithm="skim",
        family="distance",
        alpha="exp:1.0",
        rng_seed=5,
        epsilon=0.1,
        k=64,
        output=str(tmp_path / "r.csv"),
        verify=True,
    )
    assert run(cfg) == 0
    report = capsys.readouterr().out
    ratios = [
        float(line.split("ratio ")[1])
        for line in report.splitlines()
        if line.startswith("verify seed")
    ]
    assert ratios
    slack = 0.25
    assert all(r >= 1.0 - cfg.epsilon - slack for r in ratios)
    influence_lines = [l for l in report.splitlines() if l.startswith("verify influence")]
    assert len(influence_lines) == 1
    reported, recomputed = influence_lines[0].split()[2::2]
    assert float(reported) == pytest.approx(float(recomputed), rel=1e-9)


def test_main_exit_codes(tmp_path):
    src = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n1 0 1.0\n1 1 1.0\n")
    out = tmp_path / "r.csv"
    assert main([
        "--input", src, "--kind", "matrix", "--algorithm", "exact",
        "--output", str(out),
    ]) == 0
    bad = write(tmp_path / "bad.txt", "2 2\n0 0\n")
    assert main(["--input", bad, "--kind", "matrix"]) == 2


def test_env_var_provides_default_seed(tmp_path, monkeypatch, capsys):
    src = write(tmp_path / "m.txt", "2 2\n0 0 2.0\n1 0 1.0\n1 1 1.0\n")
    monkeypatch.setenv("INFMAX_SEED", "17")
    out1 = tmp_path / "a.csv"
    assert main(["--input", src, "--kind", "matrix", "--output", str(out1)]) == 0
    monkeypatch.delenv("INFMAX_SEED")
    out2 = tmp_path / "b.csv"
    assert main([
        "--input", src, "--kind", "matrix", "--rng-seed", "17", "--output", str(out2),
    ]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_stdout_output(tmp_path, capsys):
    src = write(tmp_path / "m.txt", "1 1\n0 0 5.0\n")
    assert main(["--input", src, "--kind", "matrix", "--algorithm", "exact"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "rank,item,estimated_gain,exact_gain,cumulative_influence"
    assert out.splitlines()[1] == "1,0,,5,5"
