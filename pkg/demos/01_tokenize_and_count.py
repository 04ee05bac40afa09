"""Tokenize a tiny corpus and build per-timestep frequency tables.

Shows the built-in rule set (URLs, hashtags, emoticons, and
character-class-only tokens are removed), time binning, and the drop
statistics recorded in the ingestion manifest.
"""

import tempfile
from pathlib import Path

from neolexica import TimeBinning, build_frequency_table, ingest_corpus, tokenize_text

print("tokenizer on social-media-style text:")
for text in (
    "Get updates <URL>",
    "I :P love #tags 2023 !!",
    "Bruhhhhh that szn was littttt",
):
    print(f"  {text!r:45} -> {tokenize_text(text)}")

rows = [
    ("t1", 2007, "the old word szn appears once"),
    ("t2", 2008, "more of the old word usage https://t.co/x"),
    ("t3", 2011, "szn szn szn is suddenly everywhere"),
    ("t4", 2012, "szn keeps growing #winning"),
    ("t5", 2012, ":) :P <3"),  # nothing survives: dropped and counted
]
corpus_file = Path(tempfile.mkdtemp()) / "corpus.tsv"
corpus_file.write_text("".join(f"{i}\t{y}\t{t}\n" for i, y, t in rows))

binning = TimeBinning(granularity="year", first_year=2007, last_year=2012, historical_cutoff=2010)
corpus = ingest_corpus(corpus_file, binning)
print(f"\nretained {len(corpus.documents)} of {corpus.manifest['documents_read']} documents")
print("drop statistics:", corpus.manifest["documents_dropped_per_rule"])

table = build_frequency_table(corpus, "full")
print(f"\nfull-span counts for 'szn' (t = year - 2006): {table.row('szn').tolist()}")
print(f"tokens per timestep: {table.totals_per_timestep.tolist()}")
