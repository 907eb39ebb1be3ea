"""Text preparation: cleanup primitives, sentence splitting and query building.

The query builder mirrors a fixed decision procedure. Given a text with
quotation marks already removed:

* 20 words or fewer: the whole text is the query (``full_text``);
* otherwise the first sentence, when it has at least 7 words
  (``first_sentence``);
* otherwise the first paragraph, when it has at least 20 words
  (``first_paragraph``);
* otherwise the first 20 words joined by single spaces (``first_20_words``).

Words are maximal runs of non-whitespace characters throughout.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from . import resources

_WS_RE = re.compile(r"\s+")
_PARAGRAPH_RE = re.compile(r"\n+")
# Scheme-prefixed URLs plus bare www. hosts; adjacent horizontal whitespace is
# consumed so removal does not leave double spaces behind.
_URL_CORE = r"(?:https?://\S+|www\.\S+)"
_URL_STRIP_RE = re.compile(rf"[ \t]*{_URL_CORE}[ \t]*", re.IGNORECASE)
_URL_FIND_RE = re.compile(_URL_CORE, re.IGNORECASE)

_EMOJI_RE = None  # built lazily from the shipped ranges


@dataclass(frozen=True)
class QueryConfig:
    """Thresholds of the query decision procedure."""

    passthrough_max_words: int = 20
    min_sentence_words: int = 7
    min_paragraph_words: int = 20


@dataclass(frozen=True)
class LlmInputConfig:
    """How much of a text is handed to the claim-extraction model."""

    max_paragraphs: int = 3
    max_words: int = 75


def word_tokens(text: str) -> list[str]:
    """Maximal runs of non-whitespace characters, in order."""
    return text.split()


def trim_punct(token: str) -> str:
    """Strip punctuation characters from both ends of a token."""
    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


def strip_quotes(text: str) -> str:
    """Remove quotation-mark code points; everything else is kept in order."""
    quotes = resources.quote_chars()
    return "".join(ch for ch in text if ch not in quotes)


def _emoji_re() -> re.Pattern[str]:
    global _EMOJI_RE
    if _EMOJI_RE is None:
        parts = []
        for start, end in resources.emoji_ranges():
            if start == end:
                parts.append(re.escape(chr(start)))
            else:
                parts.append(f"{re.escape(chr(start))}-{re.escape(chr(end))}")
        _EMOJI_RE = re.compile("[" + "".join(parts) + "]")
    return _EMOJI_RE


def strip_emoji(text: str) -> str:
    """Remove pictographic code points; everything else is kept in order."""
    return _emoji_re().sub("", text)


def strip_urls(text: str) -> str:
    """Remove URLs; whitespace around each removal collapses to one space."""
    new, n = _URL_STRIP_RE.subn(" ", text)
    if not n:
        return text
    return re.sub(r" {2,}", " ", new).strip()


def find_urls(text: str) -> list[str]:
    """URLs mentioned in the text, trailing sentence punctuation trimmed."""
    found = []
    for raw in _URL_FIND_RE.findall(text):
        found.append(raw.rstrip(").,;:!?'\"”’»"))
    return found


def split_sentences(text: str) -> list[str]:
    """Rule-based Portuguese sentence splitting.

    A sentence boundary is a run of ``.!?…`` (plus closing quotes or brackets)
    followed by whitespace, unless the period ends a known abbreviation or a
    single-letter initial. Returned sentences are trimmed and non-empty.
    """
    boundary_re = re.compile(r"[.!?…]+[\)\]»”’\"']*(?=\s)")
    abbrevs = resources.abbreviations()
    sentences = []
    start = 0
    for m in boundary_re.finditer(text):
        run = m.group()
        if run[0] == "." and "!" not in run and "?" not in run and "…" not in run and run.count(".") == 1:
            before = text[start:m.start()]
            tail = re.search(r"\S+$", before)
            word = (tail.group() if tail else "") + "."
            if word.lower() in abbrevs:
                continue
            bare = word[:-1]
            if len(bare) == 1 and bare.isalpha() and bare.isupper():
                continue
        chunk = text[start:m.end()].strip()
        if chunk:
            sentences.append(chunk)
        start = m.end()
    chunk = text[start:].strip()
    if chunk:
        sentences.append(chunk)
    return sentences


def build_query(text: str, cfg: QueryConfig = QueryConfig()) -> tuple[str, str]:
    """Derive the search query for a text. Returns (query, kind).

    The input must already be quote- and emoji-stripped; it must contain at
    least one word.
    """
    text = text.strip()
    if not text:
        raise ValueError("build_query requires a non-empty text")
    words = word_tokens(text)
    if len(words) <= cfg.passthrough_max_words:
        return text, "full_text"
    first_sentence = split_sentences(text)[0]
    if len(word_tokens(first_sentence)) >= cfg.min_sentence_words:
        return first_sentence, "first_sentence"
    first_paragraph = _PARAGRAPH_RE.split(text)[0].strip()
    if len(word_tokens(first_paragraph)) >= cfg.min_paragraph_words:
        return first_paragraph, "first_paragraph"
    return " ".join(words[: cfg.passthrough_max_words]), "first_20_words"


def llm_input(text: str, cfg: LlmInputConfig = LlmInputConfig()) -> str:
    """Head of a text for claim extraction: first paragraphs, word-capped.

    Keeps at most ``max_paragraphs`` paragraphs, then cuts after
    ``max_words`` words. The result's word sequence is a prefix of the
    text's word sequence.
    """
    text = text.strip()
    paragraphs = [p for p in _PARAGRAPH_RE.split(text) if p.strip()]
    head = "\n".join(paragraphs[: cfg.max_paragraphs])
    tokens = list(re.finditer(r"\S+", head))
    if len(tokens) <= cfg.max_words:
        return head
    return head[: tokens[cfg.max_words - 1].end()]


def content_token_count(text: str) -> int:
    """Number of content tokens: emoji and URLs removed, then stopwords and
    punctuation-only tokens dropped."""
    cleaned = strip_urls(strip_emoji(text))
    stop = resources.stopwords()
    count = 0
    for token in word_tokens(cleaned):
        token = trim_punct(token).lower()
        if token and token not in stop:
            count += 1
    return count
