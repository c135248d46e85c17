"""CoNLL-style NER text: ``token<TAB>tag`` per line, blank line between sentences.

A NER record holds one instance per sentence; each instance has the
full-image box of a 1x1 record and parallel ``tokens`` / ``tags`` lists.
"""

from __future__ import annotations

from ..errors import ConversionError, MissingRequiredKey, TokenTagLengthMismatch
from ..geometry import GeoBox
from ..schema import ContentAnn, ImageRecord

FULL_BOX = GeoBox((0, 0, 1, 1))


def ner_to_conll(record: ImageRecord) -> str:
    content = record.content_ann
    tokens = content.extras.get("tokens")
    tags = content.extras.get("tags")
    if tokens is None:
        raise MissingRequiredKey("tokens", "ner")
    if tags is None:
        raise MissingRequiredKey("tags", "ner")
    if len(tokens) != len(tags):
        raise TokenTagLengthMismatch(f"{len(tokens)} token sentences but {len(tags)} tag sentences")
    blocks = []
    for s, (toks, tgs) in enumerate(zip(tokens, tags)):
        if len(toks) != len(tgs):
            raise TokenTagLengthMismatch(f"sentence {s}: {len(toks)} tokens but {len(tgs)} tags")
        if not toks:
            raise ConversionError(f"sentence {s} is empty")
        lines = []
        for tok, tag in zip(toks, tgs):
            if not tok.strip() or not tag.strip() or tok == "-DOCSTART-" or any(
                c in field for field in (tok, tag) for c in "\t\r\n"
            ):
                raise ConversionError(f"sentence {s}: token {tok!r} / tag {tag!r} is not representable")
            lines.append(f"{tok}\t{tag}\n")
        blocks.append("".join(lines))
    return "\n".join(blocks)


def conll_from(text: str) -> ImageRecord:
    """Parse CoNLL text into a NER record.

    Lines without a tab fall back to whitespace columns (first = token,
    last = tag) so CoNLL-2003 files load too; ``-DOCSTART-`` lines are skipped.
    """
    sentences: list[tuple[list[str], list[str]]] = []
    toks: list[str] = []
    tags: list[str] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.removesuffix("\r")
        if not raw.strip():
            if toks:
                sentences.append((toks, tags))
                toks, tags = [], []
            continue
        cols = raw.split("\t") if "\t" in raw else raw.split()
        if len(cols) < 2:
            raise ConversionError(f"line {lineno}: expected a token and a tag")
        if cols[0] == "-DOCSTART-":
            continue
        toks.append(cols[0])
        tags.append(cols[-1])
    if toks:
        sentences.append((toks, tags))
    content = ContentAnn(
        bboxes=(FULL_BOX,) * len(sentences),
        extras={"tokens": tuple(tuple(t) for t, _ in sentences),
                "tags": tuple(tuple(g) for _, g in sentences)},
    )
    return ImageRecord(height=1, width=1, content_ann=content)
