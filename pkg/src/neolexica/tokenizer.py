"""Rule-based tokenizer for time-stamped social-media-style text.

Tokenization is whitespace splitting after lowercasing, followed by an
ordered list of removal rules applied to each whole token: URL-shaped
tokens, phone-number-shaped tokens, hashtags, angle-bracket placeholder
tokens (``<url>``, ``<username>``), emoticon units, tokens without a
single letter (emoji / digits / punctuation / special characters only),
single-character tokens, and tokens longer than a configurable maximum.
Edge punctuation inside a surviving token is preserved; the rules act on
whole tokens only.

A pre-tokenized mode accepts space-separated token streams verbatim: the
external tokenizer owns casing and filtering, so a corpus prepared with a
different rule set round-trips through ingestion unchanged.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

__all__ = ["TokenizerRules", "tokenize_text", "classify_token", "DROP_RULES"]

# Attribution order: the first matching rule claims the token.
DROP_RULES = (
    "url",
    "phone",
    "hashtag",
    "placeholder",
    "emoticon",
    "charclass",
    "single_char",
    "too_long",
)

_URL_RE = re.compile(
    r"^(?:https?://\S+|www\.\S+"
    r"|\S+\.(?:com|org|net|edu|gov|mil|io|co|me|tv|ly|gl|be|info|biz)(?:/\S*)?)$"
)
# Token-level only: phone fragments split by whitespace fall to the
# no-letter rule instead.
_PHONE_RE = re.compile(r"^\+?[\d()\-.]{6,18}$")
_PLACEHOLDER_RE = re.compile(r"^<[^<>\s]+>$")
# Punctuation-eyed emoticons plus a few letter-bearing faces. Letter-only
# forms like "xd" are indistinguishable from words and stay.
_EMOTICON_RE = re.compile(
    r"^(?:[<>]?[:;=8][\-'^*~]?[)(\]\[}{dpbo3/\\|*$@0]+"
    r"|<+/?3+"
    r"|\^_+\^|-_+-|>_+<|>\.<|[o0][._][o0]|t_t|x_x|\._+\.)$"
)


@dataclass(frozen=True)
class TokenizerRules:
    """Configuration for :func:`tokenize_text`.

    With ``pretokenized`` the text is split on whitespace and taken as-is,
    no lowercasing and no removal rules; the external tokenizer that
    produced it owns both. ``max_token_length`` is the inclusive upper
    bound on surviving token length in the built-in mode.
    """

    pretokenized: bool = False
    max_token_length: int = 50

    def __post_init__(self) -> None:
        if self.max_token_length < 1:
            raise ValueError("max_token_length must be >= 1")


DEFAULT_RULES = TokenizerRules()


def classify_token(token: str, rules: TokenizerRules = DEFAULT_RULES) -> str | None:
    """Return the name of the removal rule claiming ``token``, or None to keep.

    ``token`` is expected to be lowercased already; :func:`tokenize_text`
    guarantees that.
    """
    if _URL_RE.match(token):
        return "url"
    if _PHONE_RE.match(token) and sum(c.isdigit() for c in token) >= 7:
        return "phone"
    if token.startswith("#") and len(token) > 1:
        return "hashtag"
    if _PLACEHOLDER_RE.match(token):
        return "placeholder"
    if _EMOTICON_RE.match(token):
        return "emoticon"
    if not any(c.isalpha() for c in token):
        return "charclass"
    if len(token) == 1:
        return "single_char"
    if len(token) > rules.max_token_length:
        return "too_long"
    return None


def tokenize_text(text: str, rules: TokenizerRules = DEFAULT_RULES) -> list[str]:
    """Lowercase, split, and filter ``text`` into a token list.

    Total on valid str input: never raises, returns ``[]`` for empty or
    fully filtered text. Idempotent on its own space-joined output.
    """
    tokens, _ = tokenize_with_stats(text, rules)
    return tokens


def tokenize_with_stats(
    text: str, rules: TokenizerRules = DEFAULT_RULES
) -> tuple[list[str], Counter]:
    """Like :func:`tokenize_text` but also count dropped tokens per rule."""
    if rules.pretokenized:
        return text.split(), Counter()
    raw = text.lower().split()
    kept: list[str] = []
    dropped: Counter = Counter()
    for token in raw:
        rule = classify_token(token, rules)
        if rule is None:
            kept.append(token)
        else:
            dropped[rule] += 1
    return kept, dropped
