import json
import logging

import numpy as np
import pytest

from comment_updater import edit_script as es
from comment_updater.config import Config
from comment_updater.corpus import CorpusError, LoadReport, Sample, load_corpus, parse_field_map, write_corpus
from comment_updater.pipeline import CODE_FEATURES, SPAN_FEATURES, PreprocessError, preprocess, syntax_feature_width
from comment_updater.syntax.diff import Operation

FIXTURE = __file__.rsplit("/", 1)[0] + "/fixtures/three.jsonl"

NULL_CHECK = Sample(
    "String describe(String text) { return text.trim(); }",
    "String describe(String text) { if (text == null) { return null; } return text.trim(); }",
    "/** Returns the trimmed text */",
    "/** Returns the trimmed text or null if text is null */",
    "fig1",
)


# --------------------------------------------------------------------- config


def test_config_defaults():
    c = Config()
    assert (c.embed_dim, c.encoder_dim, c.decoder_dim, c.num_layers) == (64, 64, 128, 2)
    assert (c.dropout, c.lr, c.batch_size, c.beam_width, c.beta) == (0.6, 1e-3, 32, 5, 1.0)


@pytest.mark.parametrize("change", [{"embed_dim": 0}, {"dropout": 1.0}, {"dropout": -0.1}, {"lr": 0}, {"beta": -1}])
def test_config_validation(change):
    with pytest.raises(ValueError):
        Config().replace(**change)


def test_config_json_round_trip(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"embed_dim": 32, "seed": 3}))
    c = Config.load(path)
    assert (c.embed_dim, c.seed, c.decoder_dim) == (32, 3, 128)
    assert Config.from_dict(c.to_dict()) == c


def test_config_rejects_unknown_keys():
    with pytest.raises(ValueError, match="unknown"):
        Config.from_dict({"embedding": 3})


# --------------------------------------------------------------------- corpus


def test_three_valid_lines_in_order():
    samples = load_corpus(FIXTURE)
    assert [s.id for s in samples] == ["s1", "s2", "s3"]
    assert samples[0].new_code == "int getY() { return y; }"


def test_empty_file_warns(tmp_path, caplog):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    with caplog.at_level(logging.WARNING):
        assert load_corpus(path) == []
    assert "empty" in caplog.text


def test_malformed_lines_are_counted(tmp_path):
    good = json.loads(open(FIXTURE).readline())
    missing = {k: v for k, v in good.items() if k != "new_comment"}
    unchanged = {**good, "id": "u", "new_comment": "/**   Returns x */"}
    path = tmp_path / "c.jsonl"
    path.write_text("\n".join([json.dumps(missing), "not json", "[1]", json.dumps(unchanged), json.dumps(good)]))
    report = LoadReport()
    samples = load_corpus(path, report=report)
    assert [s.id for s in samples] == ["s1"]
    assert (report.loaded, report.skipped) == (1, 4)
    # predict mode does not need new_comment
    assert len(load_corpus(path, require_new_comment=False)) == 2


def test_duplicate_ids_dropped(tmp_path):
    line = open(FIXTURE).readline()
    path = tmp_path / "d.jsonl"
    path.write_text(line + line)
    report = LoadReport()
    assert len(load_corpus(path, report=report)) == 1
    assert report.duplicates == 1


def test_unreadable_file_is_fatal(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "missing.jsonl")


def test_field_map_renames(tmp_path):
    rec = json.loads(open(FIXTURE).readline())
    renamed = {"src_method": rec["old_code"], "dst_method": rec["new_code"], "src_desc": rec["old_comment"],
               "dst_desc": rec["new_comment"], "id": "r"}
    path = tmp_path / "r.jsonl"
    path.write_text(json.dumps(renamed))
    mapping = parse_field_map("src_method=old_code,dst_method=new_code,src_desc=old_comment,dst_desc=new_comment")
    assert load_corpus(path, field_map=mapping)[0].old_code == rec["old_code"]
    with pytest.raises(ValueError):
        parse_field_map("a=unknown_field")


def test_write_then_load(tmp_path):
    samples = load_corpus(FIXTURE)
    write_corpus(tmp_path / "o.jsonl", samples)
    assert load_corpus(tmp_path / "o.jsonl") == samples


# --------------------------------------------------------------------- preprocessing


def test_identical_code_is_all_keep():
    src = "int f(int a) { return a; }"
    e = preprocess(Sample(src, src, "/** a */", "/** b */", "same"), Config())
    assert e.code_tokens[0] == es.KEEP and e.code_tokens[-1] == es.KEEP_END
    assert sum(t in es.RESERVED for t in e.code_tokens) == 2
    assert e.change_graph.changed == set()
    assert (e.mask <= -1e8).all()


def test_inserted_condition_variables_in_syntax_stream():
    e = preprocess(NULL_CHECK, Config())
    inserted = [n.value for n in e.change_graph.nodes if n.operation is Operation.INSERT]
    assert "text" in inserted
    assert e.syntax_tokens == [n.value for n in e.change_graph.nodes]
    assert e.mask.shape == (len(e.syntax_tokens),) * 2
    assert e.target == es.serialize(es.build_comment_edit_seq(e.comment_tokens, e.new_comment_tokens))


def test_feature_layout():
    e = preprocess(NULL_CHECK, Config())
    assert e.code_features.shape == (len(e.code_tokens), CODE_FEATURES)
    assert e.syntax_features.shape == (len(e.syntax_tokens), syntax_feature_width(Config()))
    span = None
    for tok, row in zip(e.code_tokens, e.code_features):
        if tok in es.RESERVED:
            assert row[: len(SPAN_FEATURES)].sum() == 0
            span = tok if tok in SPAN_FEATURES else None
        else:
            assert row[SPAN_FEATURES.index(span)] == 1 and row[: len(SPAN_FEATURES)].sum() == 1
    # every syntax node has one operation bit and one type-class bit
    assert (e.syntax_features.sum(1) == 2).all()


def test_return_statement_flag():
    src_old = "int f(int a) { int b = a; return b + 1; }"
    src_new = "int f(int a) { int b = a; return b + 2; }"
    e = preprocess(Sample(src_old, src_new, "/** x */", "/** y */", "r"), Config())
    flagged = [t for t, row in zip(e.code_tokens, e.code_features) if row[-1] == 1]
    assert flagged == ["return", "b", "+", "1", "2", ";"]


def test_comment_match_feature():
    e = preprocess(Sample("int f(int text) { return text; }", "int f(int builder) { return builder; }",
                          "/** Returns the text */", "/** Returns the builder */", "m"), Config())
    flags = dict(zip(e.comment_tokens, e.comment_features[:, 0]))
    assert flags["text"] == 1 and flags["Returns"] == 0


def test_unparseable_code_falls_back_to_tokens():
    s = Sample("int f( {", "int g( {", "/** f */", "/** g */", "bad")
    e = preprocess(s, Config())
    assert e.light and e.change_graph is None
    assert e.mask.shape == (1, 1) and len(e.syntax_tokens) == 1
    with pytest.raises(PreprocessError):
        preprocess(s, Config(token_only_fallback=False))


def test_lexical_error_rejects_sample():
    with pytest.raises(PreprocessError):
        preprocess(Sample('String s = "open', "int x;", "/** a */", "/** b */", "lex"), Config())


def test_preprocessing_is_deterministic():
    a, b = preprocess(NULL_CHECK, Config()), preprocess(NULL_CHECK, Config())
    for field in ("code_tokens", "syntax_tokens", "comment_tokens", "target"):
        assert getattr(a, field) == getattr(b, field)
    for field in ("code_features", "syntax_features", "comment_features", "mask"):
        assert np.array_equal(getattr(a, field), getattr(b, field))


def test_long_streams_are_truncated(caplog):
    with caplog.at_level(logging.WARNING):
        e = preprocess(NULL_CHECK, Config(max_len=5))
    assert len(e.code_tokens) == 5 and len(e.syntax_tokens) <= 5
    assert e.mask.shape == (len(e.syntax_tokens),) * 2
    assert "truncated" in caplog.text


def test_predict_mode_sample_has_no_target():
    e = preprocess(Sample(NULL_CHECK.old_code, NULL_CHECK.new_code, NULL_CHECK.old_comment, None, "p"), Config())
    assert e.target is None and e.new_comment_tokens is None
