import pytest

from fopkit import (
    decide_vcsat, encode_graph, eval_so2, make_graph, parse_fop, parse_graph,
    parse_qcnf, parse_vcsat,
)
from fopkit.cli import BUILTIN_VOCABS, main
from fopkit.reductions import PHI_TOY
from conftest import SAMPLES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# --- eval --------------------------------------------------------------------

def test_eval_first_order_sentence(capsys):
    code, out, _ = run(capsys, "eval", SAMPLES / "k3.structure",
                       SAMPLES / "complete.sentence")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "eval", SAMPLES / "c5.graph",
                       SAMPLES / "complete.sentence")
    assert (code, out) == (1, "false\n")


def test_eval_second_order_sentence(capsys):
    expected = eval_so2(encode_graph(make_graph(3, [(0, 1), (0, 2), (1, 2)])),
                        PHI_TOY)
    code, out, _ = run(capsys, "eval", SAMPLES / "triangle.graph",
                       SAMPLES / "toy.sentence")
    assert code == (0 if expected else 1)
    assert out.strip() == ("true" if expected else "false")


def test_eval_rejects_open_formulas_and_garbage(capsys, tmp_path):
    open_formula = tmp_path / "open.sentence"
    open_formula.write_text("E(x,y)\n")
    code, _, err = run(capsys, "eval", SAMPLES / "k3.structure", open_formula)
    assert code == 2 and "free variables" in err
    bad = tmp_path / "bad.sentence"
    bad.write_text("forall (\n")
    code, _, err = run(capsys, "eval", SAMPLES / "k3.structure", bad)
    assert code == 2 and "error:" in err


def test_eval_name_picks_among_several(capsys, tmp_path):
    f = tmp_path / "two.structure"
    f.write_text("structure a : sigma_g { size = 1 E = { } }\n"
                 "structure b : sigma_g { size = 2 E = { } }\n")
    code, out, _ = run(capsys, "eval", f, SAMPLES / "complete.sentence",
                       "--name", "a")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "eval", f, SAMPLES / "complete.sentence",
                       "--name", "b")
    assert (code, out) == (1, "false\n")
    code, _, err = run(capsys, "eval", f, SAMPLES / "complete.sentence")
    assert code == 2 and "--name" in err


# --- decide ------------------------------------------------------------------

def test_decide_qsat2_prints_witness(capsys):
    code, out, _ = run(capsys, "decide", "qsat2", SAMPLES / "phi1.qdnf")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "true"
    assert lines[1].startswith("witness: x0=") and "x1=" in lines[1]


def test_decide_cnf_problems(capsys):
    code, out, _ = run(capsys, "decide", "qunsat2", SAMPLES / "contra.qcnf")
    assert (code, out) == (0, "true\n")
    code, out, _ = run(capsys, "decide", "unique", SAMPLES / "contra.qcnf")
    assert code == 1 and out == "false\n"


def test_decide_2cc_and_padding(capsys):
    code, out, _ = run(capsys, "decide", "2cc", SAMPLES / "c5.graph")
    assert (code, out) == (1, "false\n")
    code, out, _ = run(capsys, "decide", "2cc", SAMPLES / "triangle.graph")
    assert code == 0
    assert out.splitlines()[0] == "true"
    assert out.splitlines()[1].startswith("coloring: ")
    code, out, _ = run(capsys, "decide", "2cc-n:6", SAMPLES / "c5.graph")
    assert (code, out) == (0, "true\n")
    code, _, err = run(capsys, "decide", "2cc-n:x", SAMPLES / "c5.graph")
    assert code == 2 and "2cc-n:<size>" in err


def test_decide_vcsat_matches_library(capsys):
    inst = parse_vcsat((SAMPLES / "small.vcsat").read_text())
    code, out, _ = run(capsys, "decide", "vcsat", SAMPLES / "small.vcsat")
    assert code == (0 if decide_vcsat(inst) else 1)
    assert out.splitlines()[0] == ("true" if decide_vcsat(inst) else "false")


def test_decide_node_cap(capsys, tmp_path):
    from fopkit import format_graph
    f = tmp_path / "path25.graph"
    f.write_text(format_graph(make_graph(25, [(i, i + 1) for i in range(24)])))
    code, _, err = run(capsys, "decide", "2cc", f)
    assert code == 3 and "budget exceeded" in err
    code, out, _ = run(capsys, "decide", "2cc", f, "--cap", "25")
    assert code == 0 and out.splitlines()[0] == "true"


def test_decide_unknown_tag(capsys):
    code, _, err = run(capsys, "decide", "nope", SAMPLES / "c5.graph")
    assert code == 2 and "unknown problem tag" in err


# --- reduce ------------------------------------------------------------------

def test_reduce_emits_image(capsys):
    code, out, _ = run(capsys, "reduce", "qsat2-qunsat2", SAMPLES / "phi1.qdnf")
    assert code == 0
    cnf = parse_qcnf(out)
    assert cnf.var_count == 4 and len(cnf.clauses) == 4


def test_reduce_fidelity_changes_image_size(capsys):
    code, out, _ = run(capsys, "reduce", "qsat2-2cc", SAMPLES / "phi1.qdnf")
    assert code == 0 and parse_graph(out)[1].node_count == 28
    code, out, _ = run(capsys, "reduce", "qsat2-2cc", SAMPLES / "phi1.qdnf",
                       "--fidelity", "verbatim")
    assert code == 0 and parse_graph(out)[1].node_count == 24


def test_reduce_emit_fop_round_trips(capsys, tmp_path):
    out_file = tmp_path / "neg.fop"
    code, out, _ = run(capsys, "reduce", "qsat2-qunsat2", "--emit", "fop",
                       "-o", out_file)
    assert code == 0 and out == ""
    name, query = parse_fop(out_file.read_text(), BUILTIN_VOCABS)
    assert name == "qsat2_qunsat2" and query.arity == 1


def test_reduce_usage_errors(capsys):
    code, _, err = run(capsys, "reduce", "qsat2-qunsat2")
    assert code == 2 and "instance file" in err
    code, _, err = run(capsys, "reduce", "no-such", SAMPLES / "phi1.qdnf")
    assert code == 2 and "unknown reduction" in err


def test_reduce_padding(capsys):
    code, out, _ = run(capsys, "reduce", "pad-2cc:6", SAMPLES / "triangle.graph")
    assert code == 0 and parse_graph(out)[1].node_count == 12


# --- compile -----------------------------------------------------------------

def test_compile_toy_sentence_and_verify(capsys):
    code, out, _ = run(capsys, "compile", SAMPLES / "toy.sentence",
                       "--verify-size", "2")
    assert code == 0
    assert "projection check: ok (bound 8)" in out
    assert "verify n=2: agreements=16 counterexamples=0" in out


def test_compile_writes_a_parseable_fop(capsys, tmp_path):
    out_file = tmp_path / "toy.fop"
    code, _, _ = run(capsys, "compile", SAMPLES / "toy.sentence",
                     "--verify-size", "0", "-o", out_file)
    assert code == 0
    name, query = parse_fop(out_file.read_text(), BUILTIN_VOCABS)
    assert name == "compiled" and query.source_vocab.name == "sigma_g"


def test_compile_rejects_non_normal_form(capsys, tmp_path):
    f = tmp_path / "odd.sentence"
    f.write_text("exists2 S/1 forall2 T/1 exists x1 (S(x1) (+) T(x1))\n")
    code, _, err = run(capsys, "compile", f)
    assert code == 2 and "error:" in err


def test_compile_tsv_is_deterministic(capsys):
    first = run(capsys, "compile", SAMPLES / "toy.sentence",
                "--verify-size", "2", "--format", "tsv")
    second = run(capsys, "compile", SAMPLES / "toy.sentence",
                 "--verify-size", "2", "--format", "tsv")
    assert first[0] == 0 and first[1] == second[1]
    rows = first[1].splitlines()  # the fop itself precedes the table
    assert "size\tindex\tsource\ttarget\tagree" in rows
    assert len([r for r in rows if r.startswith("2\t")]) == 16


# --- verify ------------------------------------------------------------------

def test_verify_negation_size_one(capsys):
    code, out, _ = run(capsys, "verify", "qsat2-qunsat2", "--sizes", "1")
    assert code == 0 and "agreements=8 counterexamples=0" in out


def test_verify_projection_gate_verbatim_fails(capsys):
    code, out, _ = run(capsys, "verify", "qunsat2-unique", "--sizes", "1",
                       "--check-projection", "--fidelity", "verbatim")
    assert code == 1 and "projection check: FAILED" in out
    code, out, _ = run(capsys, "verify", "qunsat2-unique", "--sizes", "2",
                       "--check-projection")
    assert code == 0 and "projection check: ok" in out
    assert "agreements=1024 counterexamples=0" in out


def test_verify_sampled_run_is_seeded(capsys):
    args = ("verify", "qsat2-vcsat", "--sizes", "2", "--sample", "25",
            "--seed", "9", "--format", "tsv")
    first = run(capsys, *args)
    second = run(capsys, *args)
    assert first[0] == 0 and first[1] == second[1]
    assert len(first[1].splitlines()) == 1 + 25 + 1  # header, rows, summary


def test_verify_padding_covers_tiny_sizes(capsys):
    code, out, _ = run(capsys, "verify", "pad-2cc:4", "--sizes", "1", "2")
    assert code == 0 and "counterexamples=0" in out


def test_verify_budget_exit(capsys):
    code, _, err = run(capsys, "verify", "qsat2-qunsat2", "--sizes", "3",
                       "--budget", "100")
    assert code == 3 and "budget exceeded" in err


# --- universality ------------------------------------------------------------

def test_universality_pass_and_fail(capsys):
    code, out, _ = run(capsys, "universality", "--problem", "2cc",
                       "--n", "3", "--k", "1", "--mmax", "3")
    assert code == 0 and out.splitlines()[-1] == "pass"
    code, out, _ = run(capsys, "universality", "--problem", "2cc-c",
                       "--n", "2", "--k", "1", "--mmax", "2")
    assert code == 1 and "fail at m=2: !E(0,0)" in out


def test_universality_no_witness_flag(capsys):
    code, out, _ = run(capsys, "universality", "--problem", "2cc",
                       "--n", "3", "--k", "1", "--mmax", "3", "--no-witness")
    assert code == 0 and "witnesses=0" in out


def test_universality_tsv(capsys):
    args = ("universality", "--problem", "2cc", "--n", "3", "--k", "1",
            "--mmax", "3", "--format", "tsv")
    first = run(capsys, *args)
    assert first[0] == 0
    header, row = first[1].splitlines()
    assert header.startswith("problem\tn\tk")
    assert row.split("\t")[4] == "pass"
    assert first[1] == run(capsys, *args)[1]


def test_universality_unknown_problem(capsys):
    code, _, err = run(capsys, "universality", "--problem", "nope",
                       "--n", "2", "--k", "1", "--mmax", "2")
    assert code == 2 and "unknown problem" in err


# --- witness -----------------------------------------------------------------

def test_witness_member(capsys):
    code, out, _ = run(capsys, "witness", "--problem", "2cc", "--m", "3",
                       "E(0,1)")
    assert code == 0
    _, g = parse_graph(out)  # the red comment line lexes away
    assert g == make_graph(3, [(0, 1), (0, 2), (1, 2)])
    assert "# red = 0" in out


def test_witness_complement(capsys):
    code, out, _ = run(capsys, "witness", "--problem", "2cc-c", "--m", "7",
                       "!E(0,1)")
    assert code == 0
    _, g = parse_graph(out)
    assert g.node_count == 7 and not g.has_edge(0, 1)


def test_witness_failures(capsys):
    code, _, err = run(capsys, "witness", "--problem", "2cc", "--m", "3",
                       "E(1,1)")
    assert code == 1 and "no witness" in err
    code, _, err = run(capsys, "witness", "--problem", "2cc", "--m", "2",
                       "E(0,1)")
    assert code == 1 and "no witness" in err
    code, _, err = run(capsys, "witness", "--problem", "2cc", "--m", "3",
                       "E(0")
    assert code == 2 and "error:" in err


# --- global flags ------------------------------------------------------------

def test_global_flag_validation(capsys):
    code, _, err = run(capsys, "verify", "qsat2-qunsat2", "--sizes", "1",
                       "--budget", "0")
    assert code == 2 and "budget must be positive" in err
    code, _, err = run(capsys, "universality", "--problem", "2cc", "--n", "3",
                       "--k", "1", "--mmax", "3", "--bound", "0")
    assert code == 2 and "bound must be at least 1" in err
