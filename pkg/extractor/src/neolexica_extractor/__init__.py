"""Per-context word vectors from a pretrained masked-language-model encoder."""

from .extract import ExtractionJob, extract_vectors, find_word_span

__version__ = "0.1.0"
