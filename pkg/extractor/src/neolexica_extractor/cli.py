"""Command line front end: ``extract --model <id> --in <tsv> --out <ctx>``."""

from __future__ import annotations

import argparse
import sys

from .extract import ExtractionJob, extract_vectors


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="extract",
        description="extract per-context word vectors from an MLM encoder",
    )
    parser.add_argument("--model", required=True, help="model identifier or local path")
    parser.add_argument("--in", dest="input", required=True, help="TSV: word, context_id, sentence")
    parser.add_argument("--out", required=True, help="output CTX file")
    parser.add_argument("--layer", type=int, default=-1, help="hidden layer (default: last)")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--format", choices=("binary", "text"), default="binary")
    parser.add_argument("--debug-dump", help="TSV dump of pooled subword vectors")
    args = parser.parse_args(argv)
    job = ExtractionJob(
        sentences_path=args.input,
        model_id=args.model,
        output_path=args.out,
        layer=args.layer,
        batch_size=args.batch_size,
        output_format=args.format,
        debug_dump_path=args.debug_dump,
    )
    try:
        stats = extract_vectors(job)
    except Exception as exc:  # model load failures must exit nonzero with a message
        print(f"extract: error: {exc}", file=sys.stderr)
        return 1
    print(
        f"extract: wrote {stats['written']} of {stats['read']} records "
        f"(dim {stats['dim']}, {stats['skipped']} skipped)"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
