from __future__ import annotations

import gzip
import io
import json
import re
from pathlib import Path
from typing import IO, Any, Iterable, Iterator

from loguru import logger

from dialogue_summarization.application.errors import TranscriptError
from dialogue_summarization.application.schemas import Tag, Transcript, Utterance

# "Speaker: utterance"; the colon must come before the first whitespace and be followed by one
_SPEAKER_LINE = re.compile(r"^(?P<speaker>[^\s:]+):(?=\s|$)\s*(?P<text>.*)$")
_TERMINAL = re.compile(r"[.!?]+(?=\s|$)")

ABBREVIATIONS = frozenset({
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "vs.",
    "etc.", "e.g.", "i.e.", "approx.", "dept.", "inc.", "ltd.", "co.", "no.",
    "jan.", "feb.", "aug.", "sept.", "oct.", "nov.", "dec.", "a.m.", "p.m.",
})

# Penn Treebank -> coarse tags, for pre-tagged input produced by external taggers
PENN_TO_COARSE: dict[str, Tag] = {
    **{t: Tag.NOUN for t in ("NN", "NNS", "NNP", "NNPS")},
    **{t: Tag.VERB for t in ("VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD")},
    **{t: Tag.ADJ for t in ("JJ", "JJR", "JJS")},
    **{t: Tag.ADV for t in ("RB", "RBR", "RBS", "WRB")},
    **{t: Tag.PRON for t in ("PRP", "PRP$", "WP", "WP$", "EX")},
    **{t: Tag.DET for t in ("DT", "PDT", "WDT")},
    "IN": Tag.ADP,
    "CD": Tag.NUM,
    **{t: Tag.PART for t in ("RP", "TO", "POS")},
    "CC": Tag.CONJ,
    **{t: Tag.PUNCT for t in (".", ",", ":", "``", "''", "-LRB-", "-RRB-", "#", "$", "HYPH")},
    **{t: Tag.X for t in ("FW", "LS", "SYM", "UH")},
}


def _coerce_tag(raw: str) -> Tag:
    if raw in Tag.__members__:
        return Tag[raw]
    return PENN_TO_COARSE.get(raw, Tag.X)


def open_text(path: Path | str) -> IO[str]:
    """Open a UTF-8 text file, transparently gunzipping *.gz."""
    path = Path(path)
    if path.suffix == ".gz":
        return io.TextIOWrapper(gzip.open(path, "rb"), encoding="utf-8")
    return path.open("r", encoding="utf-8")


def _decode_lines(stream: IO[bytes] | IO[str] | Iterable[bytes | str]) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(stream, start=1):
        line = raw.decode("utf-8") if isinstance(raw, (bytes, bytearray)) else raw
        line = line.strip()
        if line:
            yield lineno, line


def _load_json_line(line: str, lineno: int) -> dict[str, Any]:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as e:
        raise TranscriptError(f"malformed JSON: {e.msg}", line=lineno) from e
    if not isinstance(obj, dict):
        raise TranscriptError("expected a JSON object", line=lineno)
    return obj


def _require(obj: dict[str, Any], field: str, lineno: int) -> Any:
    if field not in obj:
        raise TranscriptError(f"missing field '{field}'", line=lineno)
    return obj[field]


def _utterance_from_record(obj: dict[str, Any], index: int, lineno: int) -> Utterance:
    speaker = _require(obj, "speaker", lineno)
    if not isinstance(speaker, str) or not speaker.strip():
        raise TranscriptError("field 'speaker' must be a non-empty string", line=lineno)

    tokens = None
    if "tokens" in obj:
        pairs = obj["tokens"]
        if not isinstance(pairs, list) or not all(isinstance(p, list) and len(p) == 2 for p in pairs):
            raise TranscriptError("field 'tokens' must be a list of [surface, tag] pairs", line=lineno)
        tokens = tuple((str(surface), _coerce_tag(str(tag))) for surface, tag in pairs)
        bad = next((s for s, _ in tokens if not s or any(ch.isspace() for ch in s)), None)
        if bad is not None:
            raise TranscriptError(f"token surface must be non-empty without whitespace, got {bad!r}", line=lineno)
        text = obj.get("text") or " ".join(s for s, _ in tokens)
    else:
        text = _require(obj, "text", lineno)
        if not isinstance(text, str):
            raise TranscriptError("field 'text' must be a string", line=lineno)

    segment = obj.get("segment")
    return Utterance(
        speaker=speaker,
        text=text,
        index=index,
        tokens=tokens,
        segment=int(segment) if segment is not None else None,
    )


def parse_jsonl(stream: IO[bytes] | IO[str] | Iterable[bytes | str], doc_id: str | None = None) -> Transcript:
    """
    Parse one transcript from utterance-per-line JSONL.

    Each line: {"speaker": ..., "text": ...} (or "tokens": [[surface, tag], ...]),
    optionally "id" (the document id), "segment" and "summary".
    """
    utterances: list[Utterance] = []
    summary: str | None = None
    for lineno, line in _decode_lines(stream):
        obj = _load_json_line(line, lineno)
        if doc_id is None and obj.get("id") is not None:
            doc_id = str(obj["id"])
        if summary is None and isinstance(obj.get("summary"), str):
            summary = obj["summary"]
        utterances.append(_utterance_from_record(obj, len(utterances), lineno))

    if not utterances:
        raise TranscriptError("empty transcript")
    return Transcript(doc_id=doc_id or "doc-0", utterances=tuple(utterances), summary=summary)


def parse_colon_dialogue(text: str, doc_id: str = "doc-0", summary: str | None = None) -> Transcript:
    """Parse "Name: utterance" lines; lines that don't open with a speaker continue the previous turn."""
    speakers: list[str] = []
    texts: list[list[str]] = []

    for line in (text or "").replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        line = line.strip()
        if not line:
            continue
        m = _SPEAKER_LINE.match(line)
        if m:
            speakers.append(m.group("speaker"))
            texts.append([m.group("text").strip()])
        elif texts:
            texts[-1].append(line)
        else:
            logger.debug("Dropping leading line without speaker in '{}': {!r}", doc_id, line[:60])

    if not speakers:
        raise TranscriptError("no utterances found")

    utterances = tuple(
        Utterance(speaker=speaker, text=" ".join(p for p in parts if p), index=i)
        for i, (speaker, parts) in enumerate(zip(speakers, texts))
    )
    return Transcript(doc_id=doc_id, utterances=utterances, summary=summary)


def split_sentences(u: Utterance | str) -> list[str]:
    """Split on terminal punctuation followed by whitespace or end of text."""
    text = u.text if isinstance(u, Utterance) else u
    sentences: list[str] = []
    start = 0
    for m in _TERMINAL.finditer(text):
        head = text[start:m.end()].split()
        if head and head[-1].lower() in ABBREVIATIONS:
            continue
        piece = text[start:m.end()].strip()
        if piece:
            sentences.append(piece)
        start = m.end()

    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def attribute_sentences(text: str, speaker: str | None = None) -> list[tuple[str | None, str]]:
    """
    Sentences of a summary text, each with the speaker it belongs to.

    A sentence opening with "Name:" starts that speaker's run; later sentences
    without a prefix stay with the same speaker. Before the first prefix the
    given default speaker (possibly None) applies.
    """
    out: list[tuple[str | None, str]] = []
    for sentence in split_sentences(text):
        m = _SPEAKER_LINE.match(sentence)
        if m and m.group("text"):
            speaker, sentence = m.group("speaker"), m.group("text")
        out.append((speaker, sentence))
    return out


def to_jsonl(transcript: Transcript) -> str:
    """Serialize as utterance-per-line JSONL; parse_jsonl reads it back to an equal Transcript."""
    lines = []
    for u in transcript.utterances:
        rec: dict[str, Any] = {"id": transcript.doc_id, "speaker": u.speaker, "text": u.text}
        if u.tokens is not None:
            rec["tokens"] = [[surface, tag.value] for surface, tag in u.tokens]
        if u.segment is not None:
            rec["segment"] = u.segment
        if transcript.summary is not None and u.index == 0:
            rec["summary"] = transcript.summary
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "\n".join(lines) + "\n"


def _is_jsonl(path: Path) -> bool:
    suffixes = [s for s in path.suffixes if s != ".gz"]
    return bool(suffixes) and suffixes[-1] in (".jsonl", ".json", ".ndjson")


def iter_documents(path: Path | str) -> Iterator[Transcript]:
    """
    Stream transcripts from a file.

    - *.txt: one colon-format dialogue
    - *.jsonl: document records ({"id", "dialogue", "summary"?}) and/or utterance
      lines, where consecutive utterance lines sharing an "id" form one transcript
    """
    path = Path(path)
    if not path.is_file():
        raise TranscriptError(f"input not found: {path}")

    if not _is_jsonl(path):
        with open_text(path) as fh:
            stem = path.name.split(".")[0]
            yield parse_colon_dialogue(fh.read(), doc_id=stem)
        return

    count = 0
    pending: list[tuple[int, dict[str, Any]]] = []
    pending_id: str | None = None

    def flush() -> Transcript | None:
        nonlocal pending, pending_id, count
        if not pending:
            return None
        utterances = tuple(
            _utterance_from_record(obj, i, lineno) for i, (lineno, obj) in enumerate(pending)
        )
        summary = next((o["summary"] for _, o in pending if isinstance(o.get("summary"), str)), None)
        tr = Transcript(doc_id=pending_id or f"doc-{count}", utterances=utterances, summary=summary)
        count += 1
        pending, pending_id = [], None
        return tr

    with open_text(path) as fh:
        for lineno, line in _decode_lines(fh):
            obj = _load_json_line(line, lineno)
            if "dialogue" in obj:
                tr = flush()
                if tr is not None:
                    yield tr
                dialogue = obj["dialogue"]
                if not isinstance(dialogue, str):
                    raise TranscriptError("field 'dialogue' must be a string", line=lineno)
                doc_id = str(obj["id"]) if obj.get("id") is not None else f"doc-{count}"
                try:
                    tr = parse_colon_dialogue(dialogue, doc_id=doc_id, summary=obj.get("summary"))
                except TranscriptError as e:
                    raise TranscriptError(f"document '{doc_id}': {e}", line=lineno) from e
                count += 1
                yield tr
                continue

            line_id = str(obj["id"]) if obj.get("id") is not None else None
            if pending and line_id != pending_id:
                tr = flush()
                if tr is not None:
                    yield tr
            pending_id = line_id
            pending.append((lineno, obj))

        tr = flush()
        if tr is not None:
            yield tr

    if count == 0:
        raise TranscriptError(f"empty transcript: {path}")


def load_references(path: Path | str) -> dict[str, list[str]]:
    """Read {"id", "summary"} JSONL; "summary" may be a string or a list of references."""
    refs: dict[str, list[str]] = {}
    with open_text(path) as fh:
        for lineno, line in _decode_lines(fh):
            obj = _load_json_line(line, lineno)
            doc_id = str(_require(obj, "id", lineno))
            summary = _require(obj, "summary", lineno)
            if isinstance(summary, str):
                summary = [summary]
            if not isinstance(summary, list) or not all(isinstance(s, str) for s in summary):
                raise TranscriptError("field 'summary' must be a string or list of strings", line=lineno)
            refs.setdefault(doc_id, []).extend(summary)
    return refs
