import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nidtopics import corpus_from_docs, gamma_family, invgauss_family
from nidtopics.cli import main
from nidtopics.decompose import TopicModel
from nidtopics.io import (
    FormatError, read_ground_truth, read_topic_model, read_uci,
    write_ground_truth, write_topic_model, write_uci,
)
from nidtopics.synth import TopicAssignment


# ---------------------------------------------------------------------------
# UCI format


def test_minimal_uci_file(tmp_path):
    p = tmp_path / "c.uci"
    p.write_text("2\n3\n3\n1 1 2\n1 3 1\n2 2 4\n")
    corpus = read_uci(p)
    assert corpus.n_docs == 2
    assert corpus.d == 3
    assert corpus.counts[0, 0] == 2
    assert corpus.counts[0, 2] == 1
    assert corpus.counts[1, 1] == 4


def test_uci_round_trip(tmp_path):
    corpus = corpus_from_docs([{0: 2, 2: 1}, {1: 5}, {0: 1, 1: 1, 2: 1}], d=3)
    p = tmp_path / "c.uci"
    write_uci(corpus, p)
    back = read_uci(p)
    assert (corpus.counts != back.counts).nnz == 0


@given(st.lists(st.dictionaries(st.integers(0, 7), st.integers(1, 9),
                                min_size=1, max_size=5),
                min_size=1, max_size=8))
@settings(max_examples=30, deadline=None)
def test_uci_round_trip_property(tmp_path_factory, docs):
    corpus = corpus_from_docs(docs, d=8)
    p = tmp_path_factory.mktemp("uci") / "c.uci"
    write_uci(corpus, p)
    back = read_uci(p)
    assert (corpus.counts != back.counts).nnz == 0


def test_uci_rejects_zero_word_id(tmp_path):
    p = tmp_path / "bad.uci"
    p.write_text("1\n3\n1\n1 0 2\n")
    with pytest.raises(FormatError) as exc:
        read_uci(p)
    assert ":4:" in str(exc.value)


def test_uci_rejects_bad_counts_and_headers(tmp_path):
    p = tmp_path / "bad.uci"
    p.write_text("1\n3\n1\n1 2 0\n")
    with pytest.raises(FormatError):
        read_uci(p)
    p.write_text("1\nx\n1\n1 2 1\n")
    with pytest.raises(FormatError) as exc:
        read_uci(p)
    assert ":2:" in str(exc.value)
    p.write_text("1\n3\n5\n1 2 1\n")
    with pytest.raises(FormatError):
        read_uci(p)


def test_uci_rejects_out_of_range_doc(tmp_path):
    p = tmp_path / "bad.uci"
    p.write_text("2\n3\n1\n3 1 1\n")
    with pytest.raises(FormatError):
        read_uci(p)


# ---------------------------------------------------------------------------
# model serialization


def _model():
    rng = np.random.default_rng(0)
    A = rng.dirichlet(np.ones(7) * 0.4, size=3).T
    return TopicModel(A=A, alpha=np.array([0.4, 0.25, 0.35]),
                      family=invgauss_family(4.0))


def test_model_round_trip(tmp_path):
    model = _model()
    p = tmp_path / "m.tsv"
    write_topic_model(model, p)
    back = read_topic_model(p)
    assert np.array_equal(back.A, model.A)
    assert np.array_equal(back.alpha, model.alpha)
    assert back.family.kind == "invgauss"
    assert back.family.param == 4.0


def test_model_requires_format_tag(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("d\t3\n")
    with pytest.raises(FormatError):
        read_topic_model(p)


def test_model_rejects_newer_version(tmp_path):
    model = _model()
    p = tmp_path / "m.tsv"
    write_topic_model(model, p)
    text = p.read_text().replace("v1", "v99")
    p.write_text(text)
    with pytest.raises(FormatError):
        read_topic_model(p)


def test_ground_truth_round_trip(tmp_path):
    assignments = [
        TopicAssignment(h=np.array([0.25, 0.75]), zeta=np.array([1, 0, 1])),
        TopicAssignment(h=np.array([0.5, 0.5]), zeta=np.array([0, 0, 0])),
    ]
    p = tmp_path / "t.tsv"
    write_ground_truth(assignments, p)
    back = read_ground_truth(p)
    for a, b in zip(assignments, back):
        assert np.array_equal(a.h, b.h)
        assert np.array_equal(a.zeta, b.zeta)


# ---------------------------------------------------------------------------
# CLI


def test_cli_no_arguments_is_usage_error(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_cli_unknown_flag_is_usage_error(capsys):
    assert main(["weights", "--no-such-flag"]) == 1


def test_cli_weights_row(capsys):
    assert main(["weights", "--family", "gamma:1", "--alpha0", "1"]) == 0
    out = capsys.readouterr().out
    assert "-0.333333" in out
    header, row = out.strip().splitlines()
    assert header.split("\t")[:3] == ["v", "v1", "v2"]
    assert row.split("\t")[0] == "-0.500000"


def test_cli_weights_bad_family(capsys):
    assert main(["weights", "--family", "nope:1", "--alpha0", "1"]) == 2


def test_cli_generate_learn_eval_round_trip(tmp_path, capsys):
    corpus_path = str(tmp_path / "c.uci")
    rc = main(["--seed", "7", "generate", "--family", "invgauss:4", "--k", "3",
               "--d", "40", "--docs", "800", "--len", "30", "--out", corpus_path])
    assert rc == 0
    model_path = str(tmp_path / "m.tsv")
    rc = main(["--seed", "7", "learn", "--corpus", corpus_path, "--family",
               "invgauss:4", "--k", "3", "--alpha0", "1.0", "--out", model_path])
    assert rc == 0
    vocab_path = tmp_path / "vocab.txt"
    vocab_path.write_text("".join(f"word{i}\n" for i in range(40)))
    rc = main(["eval", "--model", model_path, "--corpus", corpus_path, "--pmi",
               "--vocab", str(vocab_path)])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith("perplexity\t")
    assert "pmi\t" in out
    assert "topic\t0\tword" in out


def test_cli_learn_stage_error_exit_code(tmp_path, capsys):
    corpus_path = str(tmp_path / "c.uci")
    (tmp_path / "c.uci").write_text("1\n3\n1\n1 1 3\n")
    rc = main(["learn", "--corpus", corpus_path, "--family", "gamma:1",
               "--k", "9", "--alpha0", "1", "--out", str(tmp_path / "m.tsv")])
    assert rc == 2
    assert "[input]" in capsys.readouterr().err


def test_cli_infer_outputs_means(tmp_path, capsys):
    model = TopicModel(A=np.eye(2), alpha=np.array([1.0, 1.0]),
                       family=gamma_family(1.0))
    model_path = tmp_path / "m.tsv"
    write_topic_model(model, model_path)
    corpus_path = tmp_path / "c.uci"
    write_uci(corpus_from_docs([{0: 4, 1: 2}], d=2), corpus_path)
    rc = main(["infer", "--model", str(model_path), "--corpus", str(corpus_path),
               "--steps", "800", "--burn", "200"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "doc\th0\th1"
    h0 = float(lines[1].split("\t")[1])
    assert 0.45 < h0 < 0.85  # posterior mean around (1+4)/(2+6)


def test_cli_correlate_gamma_constant_zero(tmp_path):
    out = tmp_path / "corr.csv"
    rc = main(["correlate", "--family", "gamma", "--alpha", "1,2,3",
               "--sweep", "0.5:2:3", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "lambda_or_gamma,positive_proportion"
    assert len(lines) == 4
    assert all(line.endswith(",0") for line in lines[1:])


def test_cli_tune_report(tmp_path, capsys):
    corpus_path = str(tmp_path / "c.uci")
    main(["--seed", "3", "generate", "--family", "gamma:1", "--k", "2",
          "--d", "15", "--docs", "400", "--len", "20", "--out", corpus_path])
    capsys.readouterr()
    rc = main(["tune", "--corpus", corpus_path, "--k", "2",
               "--grid", "gamma:1@1", "--split", "0.8"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("family\talpha0")
    assert "best\tgamma:1" in out


def _run_twice(tmp_path, argv, out_name):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / f"{out_name}.{run}"
        assert main(argv + ["--out", str(out)]) == 0
        outs.append(out.read_bytes())
    return outs


def test_cli_weights_deterministic(tmp_path):
    a, b = _run_twice(tmp_path, ["weights", "--family", "stable:0.5",
                                 "--alpha0", "2"], "w")
    assert a == b


def test_cli_generate_deterministic(tmp_path):
    paths = []
    for run in ("a", "b"):
        out = tmp_path / f"c.{run}.uci"
        rc = main(["--seed", "9", "generate", "--family", "gamma:1", "--k", "2",
                   "--d", "10", "--docs", "50", "--len", "8",
                   "--out", str(out)])
        assert rc == 0
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert ((paths[0].parent / "c.a.uci.model.tsv").read_bytes()
            == (paths[1].parent / "c.b.uci.model.tsv").read_bytes())
