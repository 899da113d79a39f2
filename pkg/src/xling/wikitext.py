"""Wiki markup handling and dump extraction.

Markup stripping is a pragmatic rule set, not a full wikitext grammar: the
goal is that words survive and syntax does not. Unbalanced constructs are
dropped to end-of-input rather than reported.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterator, Sequence

from .errors import TruncatedStreamError

__all__ = [
    "WikiArticle",
    "parse_interlanguage_links",
    "strip_wiki_markup",
    "extract_comparable_articles",
]


# Language codes are 2-3 lowercase ASCII letters, which keeps namespaced
# links such as [[Category:...]] or [[File:...]] from matching.
_INTERLANGUAGE_RE = re.compile(r"\[\[([a-z]{2,3}):([^\[\]]+)\]\]")


def parse_interlanguage_links(wikitext: str) -> list[tuple[str, str]]:
    """Extract every ``[[xx:Title]]`` link, in document order.

    Titles are returned verbatim (no case folding or trimming). Ordinary
    links ``[[Title]]`` and namespaced links are excluded.
    """
    return [(m.group(1), m.group(2)) for m in _INTERLANGUAGE_RE.finditer(wikitext)]


@dataclass(frozen=True)
class WikiArticle:
    """A dump page: title, raw wikitext and its interlanguage links.

    Links keep at most one entry per language code; the first occurrence in
    the wikitext wins.
    """

    title: str
    wikitext: str
    interlanguage_links: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        deduped: dict[str, str] = {}
        for code, title in self.interlanguage_links:
            deduped.setdefault(code, title)
        object.__setattr__(
            self, "interlanguage_links", tuple(deduped.items())
        )

    @classmethod
    def from_wikitext(cls, title: str, wikitext: str) -> "WikiArticle":
        return cls(title, wikitext, tuple(parse_interlanguage_links(wikitext)))

    def link_map(self) -> dict[str, str]:
        return dict(self.interlanguage_links)

    def plain_text(self) -> str:
        return strip_wiki_markup(self.wikitext)


# --------------------------------------------------------------------------
# Markup stripping
# --------------------------------------------------------------------------

_COMMENT_RE = re.compile(r"<!--.*?(?:-->|$)", re.DOTALL)
_REF_RE = re.compile(r"<ref[^<>]*/\s*>|<ref[^<>]*>.*?(?:</ref\s*>|$)", re.DOTALL | re.IGNORECASE)
_TAG_RE = re.compile(r"</?[a-zA-Z][^<>]*>")
_QUOTES_RE = re.compile(r"''+")
_EXTERNAL_LINK_RE = re.compile(r"\[(?:https?|ftp)://\S*(?:\s+([^\]]*))?\]")
_INNER_LINK_RE = re.compile(r"\[\[([^\[\]]*)\]\]")
_WS_RE = re.compile(r"\s+")


def _drop_delimited(text: str, opener: str, closer: str) -> str:
    """Remove (possibly nested) opener...closer regions.

    Content after an unmatched opener is dropped to end-of-input; an
    unmatched closer at depth zero passes through as ordinary characters.
    """
    out: list[str] = []
    depth = 0
    i = 0
    n = len(text)
    while i < n:
        if text.startswith(opener, i):
            depth += 1
            i += len(opener)
        elif depth and text.startswith(closer, i):
            depth -= 1
            i += len(closer)
        elif depth == 0:
            out.append(text[i])
            i += 1
        else:
            i += 1
    return "".join(out)


def _replace_link(m: re.Match) -> str:
    body = m.group(1)
    target, _, display = body.partition("|")
    if ":" in target:
        # Namespaced (File:, Image:, Category:, xx: ...) - drop entirely.
        return ""
    if display:
        # Keep the last pipe segment; extra pipes occur in image-style links.
        return display.rsplit("|", 1)[-1]
    return target


def strip_wiki_markup(wikitext: str) -> str:
    """Reduce wikitext to plain text.

    Removes comments, ref tags, templates (nested), tables, namespaced and
    file/image links; rewrites ``[[A|B]]`` to ``B`` and ``[[A]]`` to ``A``;
    keeps external-link labels; collapses whitespace.
    """
    text = _COMMENT_RE.sub(" ", wikitext)
    text = _REF_RE.sub(" ", text)
    text = _drop_delimited(text, "{{", "}}")
    text = _drop_delimited(text, "{|", "|}")

    # Inner-first so nested links (e.g. inside captions) resolve before the
    # enclosing [[File:...]] is judged namespaced. An unmatched '[[' drops
    # the remainder, matching the lenient contract.
    while True:
        replaced = _INNER_LINK_RE.sub(_replace_link, text)
        if replaced == text:
            break
        text = replaced
    if "[[" in text:
        text = text[: text.index("[[")]

    text = _EXTERNAL_LINK_RE.sub(lambda m: m.group(1) or " ", text)
    text = _TAG_RE.sub(" ", text)
    text = _QUOTES_RE.sub("", text)
    return _WS_RE.sub(" ", text).strip()


# --------------------------------------------------------------------------
# Dump extraction
# --------------------------------------------------------------------------


def _localname(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _iter_pages(stream: IO[bytes]) -> Iterator[tuple[str, str]]:
    """Yield (title, wikitext) for each main-namespace, non-redirect page."""
    try:
        for _, elem in ET.iterparse(stream, events=("end",)):
            if _localname(elem.tag) != "page":
                continue
            title = None
            text = ""
            ns = None
            redirect = False
            for child in elem.iter():
                name = _localname(child.tag)
                if name == "title" and title is None:
                    title = child.text or ""
                elif name == "ns" and ns is None:
                    ns = (child.text or "").strip()
                elif name == "text":
                    text = child.text or ""
                elif name == "redirect":
                    redirect = True
            elem.clear()
            if title is None:
                raise TruncatedStreamError("page element without a title")
            if redirect or (ns is not None and ns != "0"):
                continue
            yield title, text
    except ET.ParseError as exc:
        raise TruncatedStreamError(f"malformed or truncated dump: {exc}") from exc


def _open_twice(source):
    """Return a callable producing a fresh binary stream per pass."""
    if isinstance(source, (str, Path)):
        path = Path(source)

        def reopen() -> IO[bytes]:
            return path.open("rb")

        return reopen, True
    if hasattr(source, "seek") and hasattr(source, "read"):

        def rewind() -> IO[bytes]:
            source.seek(0)
            return source

        return rewind, False
    raise TypeError("dump source must be a path or a seekable binary stream")


def extract_comparable_articles(
    source,
    pivot_language: str,
    required_languages: Sequence[str] | set[str],
    *,
    stats: dict | None = None,
) -> Iterator[tuple[WikiArticle, ...]]:
    """Stream aligned article tuples out of a page-wise XML dump.

    A pivot page qualifies when its interlanguage links cover every code in
    ``required_languages``; its linked titles are then resolved against the
    title index built in a first pass over the dump. Tuples are emitted in
    pivot page order as ``(pivot, linked...)`` with the linked articles in
    sorted language-code order. Pivots whose linked titles do not resolve
    are skipped and counted in ``stats["skipped_unresolved"]``.
    """
    required = sorted(set(required_languages) - {pivot_language})
    if stats is None:
        stats = {}
    stats.setdefault("skipped_unresolved", 0)
    stats.setdefault("pivot_candidates", 0)
    reopen, close_after = _open_twice(source)

    # Pass 1: title index + qualifying pivot records (title, links).
    titles: set[str] = set()
    pivots: list[tuple[str, dict[str, str]]] = []
    stream = reopen()
    try:
        for title, text in _iter_pages(stream):
            titles.add(title)
            links = WikiArticle.from_wikitext(title, text).link_map()
            if all(code in links for code in required):
                stats["pivot_candidates"] += 1
                pivots.append((title, links))
    finally:
        if close_after:
            stream.close()

    resolved: list[tuple[str, dict[str, str]]] = []
    needed: set[str] = set()
    for title, links in pivots:
        wanted = {code: links[code] for code in required}
        if all(t in titles for t in wanted.values()):
            resolved.append((title, wanted))
            needed.add(title)
            needed.update(wanted.values())
        else:
            stats["skipped_unresolved"] += 1
    if not resolved:
        return

    # Pass 2: collect wikitext for the needed titles only.
    pages: dict[str, WikiArticle] = {}
    stream = reopen()
    try:
        for title, text in _iter_pages(stream):
            if title in needed and title not in pages:
                pages[title] = WikiArticle.from_wikitext(title, text)
    finally:
        if close_after:
            stream.close()

    for title, wanted in resolved:
        yield (pages[title],) + tuple(pages[wanted[code]] for code in sorted(wanted))
