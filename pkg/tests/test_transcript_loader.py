import gzip
import io
import json

import pytest

from dialogue_summarization.application.errors import TranscriptError
from dialogue_summarization.application.schemas import Tag
from dialogue_summarization.application.services.transcript_loader import (
    iter_documents,
    load_references,
    parse_colon_dialogue,
    parse_jsonl,
    split_sentences,
    to_jsonl,
)


def test_parse_jsonl_single_record():
    tr = parse_jsonl(io.BytesIO(b'{"speaker":"A","text":"hi"}\n'))
    assert len(tr.utterances) == 1
    assert tr.utterances[0].speaker == "A"
    assert tr.utterances[0].index == 0


def test_parse_jsonl_empty_file_is_rejected():
    with pytest.raises(TranscriptError, match="empty transcript"):
        parse_jsonl(io.BytesIO(b""))


def test_parse_jsonl_reports_line_of_malformed_json():
    data = b'{"speaker":"A","text":"hi"}\n{"speaker": "B", "text": \n'
    with pytest.raises(TranscriptError, match="line 2") as exc:
        parse_jsonl(io.BytesIO(data))
    assert exc.value.line == 2


@pytest.mark.parametrize("field", ["speaker", "text"])
def test_parse_jsonl_names_missing_field(field):
    record = {"speaker": "A", "text": "hi"}
    del record[field]
    with pytest.raises(TranscriptError, match=f"missing field '{field}'"):
        parse_jsonl([json.dumps(record)])


def test_parse_jsonl_indices_follow_file_order():
    lines = [json.dumps({"id": "d1", "speaker": s, "text": t}) for s, t in [("A", "x"), ("B", "y"), ("A", "z")]]
    tr = parse_jsonl(lines)
    assert tr.doc_id == "d1"
    assert [u.index for u in tr.utterances] == [0, 1, 2]
    assert [u.speaker for u in tr.utterances] == ["A", "B", "A"]


def test_parse_jsonl_pretagged_tokens_and_segments():
    line = json.dumps({"speaker": "A", "tokens": [["I", "PRP"], ["run", "VERB"], [".", "."]], "segment": 3})
    u = parse_jsonl([line]).utterances[0]
    assert u.tokens == (("I", Tag.PRON), ("run", Tag.VERB), (".", Tag.PUNCT))
    assert u.text == "I run ."
    assert u.segment == 3


@pytest.mark.parametrize("surface", ["new york", "", " ", "a\tb"])
def test_parse_jsonl_rejects_unusable_token_surfaces(surface):
    line = json.dumps({"speaker": "A", "tokens": [["I", "PRP"], ["love", "VERB"], [surface, "NOUN"]]})
    with pytest.raises(TranscriptError, match="token surface") as exc:
        parse_jsonl([line])
    assert exc.value.line == 1


def test_parse_jsonl_keeps_speaker_string_verbatim():
    lines = [json.dumps({"speaker": s, "text": "hi"}) for s in (" Anne ", "Mary Ann")]
    assert [u.speaker for u in parse_jsonl(lines).utterances] == [" Anne ", "Mary Ann"]


def test_parse_colon_dialogue_two_speakers():
    tr = parse_colon_dialogue(
        "Megan: Are we going to take a taxi to the opera?\nJoseph: No, I'll take my car."
    )
    assert [u.speaker for u in tr.utterances] == ["Megan", "Joseph"]
    assert tr.utterances[1].text == "No, I'll take my car."


def test_parse_colon_dialogue_preserves_order():
    tr = parse_colon_dialogue("A: x\nB: y\nA: z")
    assert [(u.speaker, u.text) for u in tr.utterances] == [("A", "x"), ("B", "y"), ("A", "z")]


def test_continuation_line_is_appended_to_previous_turn():
    tr = parse_colon_dialogue("A: hi\nsee you at 5:30")
    assert len(tr.utterances) == 1
    assert tr.utterances[0].text == "hi see you at 5:30"


def test_parse_colon_dialogue_without_speakers():
    with pytest.raises(TranscriptError, match="no utterances found"):
        parse_colon_dialogue("just some text\nwithout names")


def test_speaker_labels_are_kept_verbatim():
    tr = parse_colon_dialogue("mcKenzie_2: hello there")
    assert tr.utterances[0].speaker == "mcKenzie_2"


@pytest.mark.parametrize(
    "text, expected",
    [
        ("Oh no, what happened?", ["Oh no, what happened?"]),
        ("he lied to me. he's 40", ["he lied to me.", "he's 40"]),
        ("", []),
        ("no terminal punctuation", ["no terminal punctuation"]),
        ("Dr. Smith is here. Great!", ["Dr. Smith is here.", "Great!"]),
        ("Really?! Yes...", ["Really?!", "Yes..."]),
    ],
)
def test_split_sentences(text, expected):
    assert split_sentences(text) == expected


def test_sentence_count_never_below_non_empty_utterances():
    tr = parse_colon_dialogue("A: one. two\nB: three\nC: ")
    non_empty = [u for u in tr.utterances if u.text.strip()]
    assert sum(len(split_sentences(u)) for u in tr.utterances) >= len(non_empty)


def test_jsonl_serialization_reparses_to_equal_transcript():
    tr = parse_colon_dialogue("A: x y.\nB: z?\nA: done", doc_id="d9", summary="a summary")
    assert parse_jsonl(io.StringIO(to_jsonl(tr))) == tr


def test_iter_documents_reads_document_records_and_groups_utterances(tmp_path):
    path = tmp_path / "mixed.jsonl"
    lines = [
        {"id": "doc-a", "dialogue": "A: hi\nB: hello", "summary": "greetings"},
        {"id": "doc-b", "speaker": "C", "text": "one"},
        {"id": "doc-b", "speaker": "D", "text": "two"},
        {"id": "doc-c", "speaker": "E", "text": "three"},
    ]
    path.write_text("\n".join(json.dumps(x) for x in lines) + "\n", encoding="utf-8")

    docs = list(iter_documents(path))
    assert [d.doc_id for d in docs] == ["doc-a", "doc-b", "doc-c"]
    assert docs[0].summary == "greetings"
    assert [u.speaker for u in docs[1].utterances] == ["C", "D"]


def test_iter_documents_reads_gzip_and_txt(tmp_path):
    gz = tmp_path / "dialogues.jsonl.gz"
    with gzip.open(gz, "wt", encoding="utf-8") as fh:
        fh.write(json.dumps({"id": "z", "dialogue": "A: hi"}) + "\n")
    txt = tmp_path / "meeting.txt"
    txt.write_text("A: hello\nB: bye\n", encoding="utf-8")

    assert [d.doc_id for d in iter_documents(gz)] == ["z"]
    (doc,) = iter_documents(txt)
    assert doc.doc_id == "meeting"
    assert len(doc.utterances) == 2


def test_load_references_accepts_lists(tmp_path):
    path = tmp_path / "refs.jsonl"
    path.write_text(
        json.dumps({"id": "1", "summary": "one"}) + "\n" + json.dumps({"id": "2", "summary": ["a", "b"]}) + "\n",
        encoding="utf-8",
    )
    assert load_references(path) == {"1": ["one"], "2": ["a", "b"]}
