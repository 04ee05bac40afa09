"""Extract one vector per (word, context sentence) from an MLM encoder.

For every input record the target word is located in the raw sentence by
character offsets (first word-boundary occurrence, case-insensitive, with
a plain substring fallback for words regular expressions cannot bound).
The sentence runs through the encoder and the hidden states of the
subword tokens overlapping the word's span are mean-pooled from the
requested layer (default: last). Records whose word cannot be aligned to
any subword token are skipped and counted, not fatal.

Output is the CTX wire format consumed downstream: binary (magic
``CTX1``, u32 LE count and dim, then per record a u16 LE word byte
length, UTF-8 word bytes, u32 LE context id, dim float32 LE components)
or the equivalent text variant.
"""

from __future__ import annotations

import logging
import re
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

logger = logging.getLogger(__name__)

_CTX_MAGIC = b"CTX1"


@dataclass(frozen=True)
class ExtractionJob:
    sentences_path: str | Path
    model_id: str
    output_path: str | Path
    layer: int = -1
    batch_size: int = 16
    output_format: str = "binary"
    debug_dump_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.output_format not in ("binary", "text"):
            raise ValueError("output_format must be binary or text")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def read_sentences(path: str | Path) -> list[tuple[str, int, str]]:
    """Parse the input TSV: word, context_id, sentence text."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected word<TAB>context_id<TAB>sentence")
            word, context_id, sentence = parts
            records.append((word, int(context_id), sentence))
    return records


def find_word_span(sentence: str, word: str) -> tuple[int, int] | None:
    """Character span of the first occurrence of ``word`` in ``sentence``.

    Prefers a word-boundary match (case-insensitive); falls back to a
    plain substring search for words that regex boundaries cannot frame
    (leading punctuation, emoticon-like forms).
    """
    pattern = re.compile(rf"(?<!\w){re.escape(word)}(?!\w)", re.IGNORECASE)
    match = pattern.search(sentence)
    if match:
        return match.start(), match.end()
    start = sentence.casefold().find(word.casefold())
    if start < 0:
        return None
    return start, start + len(word)


def _pool_record(hidden, offsets, special_mask, span):
    """Mean of non-special subword vectors overlapping the word span."""
    start, end = span
    rows = [
        i
        for i in range(offsets.shape[0])
        if not special_mask[i]
        and offsets[i, 1] > offsets[i, 0]  # padding / zero-width entries
        and offsets[i, 0] < end
        and offsets[i, 1] > start
    ]
    if not rows:
        return None, []
    vectors = hidden[rows]
    return vectors.mean(dim=0), rows


def extract_vectors(job: ExtractionJob) -> dict:
    """Run the encoder over all records and write a CTX file.

    Returns counters: records read, written, and skipped (word not
    found in the sentence or not aligned to any subword token).
    """
    from transformers import AutoModel, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(job.model_id)
    if not tokenizer.is_fast:
        raise RuntimeError("a fast tokenizer is required for character offsets")
    model = AutoModel.from_pretrained(job.model_id)
    model.eval()
    need_all_layers = job.layer != -1

    records = read_sentences(job.sentences_path)
    written: list[tuple[str, int, np.ndarray]] = []
    skipped = 0
    debug_rows: list[str] = []
    with torch.no_grad():
        for base in range(0, len(records), job.batch_size):
            batch = records[base : base + job.batch_size]
            encoded = tokenizer(
                [sentence for _, _, sentence in batch],
                return_offsets_mapping=True,
                return_special_tokens_mask=True,
                padding=True,
                truncation=True,
                return_tensors="pt",
            )
            offsets = encoded.pop("offset_mapping")
            special = encoded.pop("special_tokens_mask")
            output = model(**encoded, output_hidden_states=need_all_layers)
            if need_all_layers:
                hidden = output.hidden_states[job.layer]
            else:
                hidden = output.last_hidden_state
            for i, (word, context_id, sentence) in enumerate(batch):
                span = find_word_span(sentence, word)
                if span is None:
                    logger.warning("word %r not found in its sentence; skipped", word)
                    skipped += 1
                    continue
                pooled, rows = _pool_record(hidden[i], offsets[i], special[i], span)
                if pooled is None:
                    logger.warning("word %r not aligned to any subword token; skipped", word)
                    skipped += 1
                    continue
                written.append((word, context_id, pooled.numpy().astype(np.float32)))
                if job.debug_dump_path is not None:
                    for row in rows:
                        comps = " ".join(repr(float(x)) for x in hidden[i, row])
                        debug_rows.append(f"{word}\t{context_id}\t{row}\t{comps}")

    dim = int(model.config.hidden_size)
    if job.output_format == "binary":
        write_ctx_binary(written, dim, job.output_path)
    else:
        write_ctx_text(written, dim, job.output_path)
    if job.debug_dump_path is not None:
        with open(job.debug_dump_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(debug_rows) + ("\n" if debug_rows else ""))
    return {"read": len(records), "written": len(written), "skipped": skipped, "dim": dim}


def write_ctx_binary(records, dim: int, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(_CTX_MAGIC)
        fh.write(struct.pack("<II", len(records), dim))
        for word, context_id, vector in records:
            raw = word.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", context_id))
            fh.write(np.asarray(vector, dtype="<f4").tobytes())


def write_ctx_text(records, dim: int, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(records)} {dim}\n")
        for word, context_id, vector in records:
            comps = " ".join(repr(float(x)) for x in np.asarray(vector, dtype=np.float32))
            fh.write(f"{word} {context_id} {comps}\n")
