import struct
import subprocess
import sys

import numpy as np
import pytest
import torch

from neolexica_extractor.cli import main
from neolexica_extractor.extract import (
    ExtractionJob,
    extract_vectors,
    find_word_span,
    read_sentences,
)

VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "cat", "sat", "on", "mat", "a", "big", "red", "dog", "ran", "so",
    "bru", "##hh", "szn", "was", "lit", "##tt", "very", "good", "today",
]
HIDDEN = 32


@pytest.fixture(scope="module")
def tiny_model_dir(tmp_path_factory):
    from tokenizers import Tokenizer
    from tokenizers.models import WordPiece
    from tokenizers.normalizers import BertNormalizer
    from tokenizers.pre_tokenizers import BertPreTokenizer
    from tokenizers.processors import BertProcessing
    from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

    d = tmp_path_factory.mktemp("tinybert")
    vocab = {w: i for i, w in enumerate(VOCAB)}
    tk = Tokenizer(WordPiece(vocab, unk_token="[UNK]"))
    tk.normalizer = BertNormalizer(lowercase=True)
    tk.pre_tokenizer = BertPreTokenizer()
    tk.post_processor = BertProcessing(("[SEP]", vocab["[SEP]"]), ("[CLS]", vocab["[CLS]"]))
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=tk,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )
    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN,
        num_hidden_layers=2,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(0)
    model = BertModel(config)
    model_dir = d / "model"
    tokenizer.save_pretrained(model_dir)
    model.save_pretrained(model_dir)
    return model_dir


@pytest.fixture(scope="module")
def fixture_tsv(tmp_path_factory):
    """20 sentences: single-token words, a multi-subword word, and 2 bad rows."""
    d = tmp_path_factory.mktemp("sentences")
    rows = []
    for i in range(9):
        rows.append(("mat", i, f"the cat sat on the mat today" if i % 2 else "a big red mat"))
    for i in range(9):
        rows.append(("bruhh", i, "bruhh that szn was littt so good"))
    rows.append(("dog", 0, "the cat sat alone"))  # word absent -> skipped
    rows.append(("szn", 99, "nothing here matches"))  # word absent -> skipped
    path = d / "sentences.tsv"
    path.write_text("".join(f"{w}\t{i}\t{s}\n" for w, i, s in rows))
    return path


def read_ctx_binary(path):
    """Minimal independent CTX reader for the wire-format assertions."""
    with open(path, "rb") as fh:
        assert fh.read(4) == b"CTX1"
        count, dim = struct.unpack("<II", fh.read(8))
        records = []
        for _ in range(count):
            (wlen,) = struct.unpack("<H", fh.read(2))
            word = fh.read(wlen).decode("utf-8")
            (ctx_id,) = struct.unpack("<I", fh.read(4))
            vec = np.frombuffer(fh.read(4 * dim), dtype="<f4")
            records.append((word, ctx_id, vec))
        assert fh.read() == b""
    return count, dim, records


def test_find_word_span():
    assert find_word_span("the mat is here", "mat") == (4, 7)
    assert find_word_span("Mat sat", "mat") == (0, 3)
    assert find_word_span("formatting mat", "mat") == (11, 14)  # boundary match preferred
    assert find_word_span("no such word", "cat") is None
    assert find_word_span("see :p here", ":p") == (4, 6)  # fallback path


def test_read_sentences_validates(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("only_two_fields\t3\n")
    with pytest.raises(ValueError, match=":1:"):
        read_sentences(bad)


def test_extract_writes_valid_ctx(tiny_model_dir, fixture_tsv, tmp_path):
    out = tmp_path / "out.ctx"
    job = ExtractionJob(fixture_tsv, str(tiny_model_dir), out, batch_size=4)
    stats = extract_vectors(job)
    assert stats["read"] == 20
    assert stats["skipped"] == 2
    assert stats["written"] == 18
    count, dim, records = read_ctx_binary(out)
    assert count == 18
    assert dim == HIDDEN  # dim equals the model hidden size
    assert all(np.isfinite(v).all() for _, _, v in records)
    assert all(v.shape == (HIDDEN,) for _, _, v in records)


def test_single_token_pooling_identity(tiny_model_dir, fixture_tsv, tmp_path):
    """A single-model-token word's record equals that token's hidden state."""
    from transformers import AutoModel, AutoTokenizer

    out = tmp_path / "out.ctx"
    job = ExtractionJob(fixture_tsv, str(tiny_model_dir), out, batch_size=3)
    extract_vectors(job)
    _, _, records = read_ctx_binary(out)
    sentence = "a big red mat"
    got = next(v for w, i, v in records if w == "mat" and i == 0)

    tokenizer = AutoTokenizer.from_pretrained(tiny_model_dir)
    model = AutoModel.from_pretrained(tiny_model_dir)
    model.eval()
    encoded = tokenizer(sentence, return_tensors="pt")
    tokens = tokenizer.convert_ids_to_tokens(encoded["input_ids"][0])
    position = tokens.index("mat")
    with torch.no_grad():
        expected = model(**encoded).last_hidden_state[0, position].numpy()
    assert np.abs(got - expected).max() < 1e-5


def test_mean_pooling_matches_debug_dump(tiny_model_dir, fixture_tsv, tmp_path):
    """The record is the hand-average of the dumped per-subword vectors."""
    out = tmp_path / "out.ctx"
    dump = tmp_path / "dump.tsv"
    job = ExtractionJob(fixture_tsv, str(tiny_model_dir), out, debug_dump_path=dump)
    extract_vectors(job)
    _, _, records = read_ctx_binary(out)
    by_record = {}
    for line in dump.read_text().splitlines():
        word, ctx_id, _row, comps = line.split("\t")
        by_record.setdefault((word, int(ctx_id)), []).append(
            np.array([float(x) for x in comps.split(" ")])
        )
    # bruhh tokenizes to two subwords; every record must average its dump rows
    assert len(by_record[("bruhh", 0)]) == 2
    for (word, ctx_id), subwords in by_record.items():
        got = next(v for w, i, v in records if w == word and i == ctx_id)
        hand_average = np.mean(subwords, axis=0)
        assert np.abs(got - hand_average).max() < 1e-5


def test_rerun_reproducible(tiny_model_dir, fixture_tsv, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"out{k}.ctx"
        extract_vectors(ExtractionJob(fixture_tsv, str(tiny_model_dir), out))
        outs.append(read_ctx_binary(out)[2])
    for (w1, i1, v1), (w2, i2, v2) in zip(*outs):
        assert (w1, i1) == (w2, i2)
        assert np.abs(v1 - v2).max() < 1e-5


def test_text_format_option(tiny_model_dir, fixture_tsv, tmp_path):
    out = tmp_path / "out.ctxt"
    extract_vectors(
        ExtractionJob(fixture_tsv, str(tiny_model_dir), out, output_format="text")
    )
    header = out.read_text().splitlines()[0]
    assert header == f"18 {HIDDEN}"


def test_downstream_decontextualized_space(tiny_model_dir, fixture_tsv, tmp_path):
    """The consumer library loads the CTX file and builds a space from it."""
    ctxvec = pytest.importorskip("neolexica.ctxvec")
    out = tmp_path / "out.ctx"
    extract_vectors(ExtractionJob(fixture_tsv, str(tiny_model_dir), out))
    loaded = ctxvec.load_context_vectors(out)
    assert loaded.dim == HIDDEN
    zscored, _stats = ctxvec.zscore_vectors(loaded)
    space, missing = ctxvec.build_decontextualized_space(
        zscored, "decontextualized-modern", expected_words=["mat", "bruhh", "ghost"]
    )
    assert sorted(space.words) == ["bruhh", "mat"]
    assert missing == ["ghost"]
    assert space.dim == HIDDEN


def test_cli_end_to_end(tiny_model_dir, fixture_tsv, tmp_path, capsys):
    out = tmp_path / "cli.ctx"
    code = main(
        ["--model", str(tiny_model_dir), "--in", str(fixture_tsv), "--out", str(out)]
    )
    assert code == 0
    assert "wrote 18 of 20" in capsys.readouterr().out
    assert out.exists()


def test_cli_model_load_failure(tmp_path, fixture_tsv, capsys):
    code = main(
        ["--model", str(tmp_path / "no-model"), "--in", str(fixture_tsv),
         "--out", str(tmp_path / "x.ctx")]
    )
    assert code == 1
    assert "error" in capsys.readouterr().err
