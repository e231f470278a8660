import pytest

from dialogue_summarization.application.errors import ConfigError, TaggingError
from dialogue_summarization.application.schemas import BOS, EOS, Tag
from dialogue_summarization.application.services.pos_tagger import (
    from_pretagged,
    get_tagger,
    load_stopwords,
    tag,
    tokenize,
    wrap_meta,
)


@pytest.mark.parametrize(
    "sentence, expected",
    [
        ("I'll take my car.", ["I", "'ll", "take", "my", "car", "."]),
        ("hello", ["hello"]),
        ("he's 40", ["he", "'s", "40"]),
        ("I can't go", ["I", "can", "n't", "go"]),
        ("we don't know", ["we", "do", "n't", "know"]),
        ("great :) see you", ["great", ":)", "see", "you"]),
        ("ok :/", ["ok", ":/"]),
        ('"quoted," she said', ['"', "quoted", ",", '"', "she", "said"]),
        ("Mr. Brown is late!", ["Mr.", "Brown", "is", "late", "!"]),
        ("   ", []),
    ],
)
def test_tokenize(sentence, expected):
    assert tokenize(sentence) == expected


@pytest.mark.parametrize(
    "word, expected",
    [
        ("take", Tag.VERB),
        ("the", Tag.DET),
        ("40", Tag.NUM),
        ("can", Tag.VERB),
        ("may", Tag.VERB),
        ("must", Tag.VERB),
        ("I", Tag.PRON),
        ("quickly", Tag.ADV),
        ("running", Tag.VERB),
        ("happiness", Tag.NOUN),
        ("zorblax", Tag.NOUN),
        ("?", Tag.PUNCT),
        (":)", Tag.X),
        ("'ll", Tag.VERB),
        ("celebrate", Tag.VERB),
        ("shopping", Tag.NOUN),
        ("yummy", Tag.ADJ),
        ("seldom", Tag.ADV),
    ],
)
def test_tag_lookup_order(word, expected):
    (token,) = tag([word]).tokens
    assert token.tag is expected
    assert token.lower == word.lower()


def test_tagging_is_deterministic():
    tokens = tokenize("Bring home the clothes that are hanging outside.")
    assert tag(tokens) == tag(tokens)


def test_wrap_meta_shifts_positions():
    ts = wrap_meta(tag(["a", "b", "c", "d", "e"]))
    assert len(ts.tokens) == 7
    assert [t.position for t in ts.tokens] == list(range(7))
    assert (ts.tokens[0].surface, ts.tokens[0].tag) == (BOS, Tag.META)
    assert (ts.tokens[-1].surface, ts.tokens[-1].tag) == (EOS, Tag.META)


def test_wrap_meta_single_word():
    ts = wrap_meta(tag(["hi"]))
    assert [t.surface for t in ts.tokens] == [BOS, "hi", EOS]


def test_wrap_meta_rejects_empty_and_double_wrap():
    with pytest.raises(TaggingError):
        wrap_meta(tag([]))
    with pytest.raises(TaggingError, match="already wrapped"):
        wrap_meta(wrap_meta(tag(["hi"])))


def test_only_meta_tokens_carry_meta_tag():
    ts = wrap_meta(tag(tokenize("bos and eos are ordinary words here")))
    metas = [t.surface for t in ts.tokens if t.tag is Tag.META]
    assert metas == [BOS, EOS]


def test_from_pretagged_rejects_meta():
    with pytest.raises(TaggingError):
        from_pretagged([("x", Tag.META)])
    ts = from_pretagged([("Dogs", Tag.NOUN), ("bark", Tag.VERB)])
    assert [t.lower for t in ts.tokens] == ["dogs", "bark"]


def test_bundled_stopwords(tmp_path):
    words = load_stopwords()
    assert {"i", "you", "the", "a", "is"} <= words
    assert 150 <= len(words) <= 250

    custom = tmp_path / "stop.txt"
    custom.write_text("Foo\nbar\n", encoding="utf-8")
    assert load_stopwords(custom) == {"foo", "bar"}

    with pytest.raises(TaggingError):
        load_stopwords(tmp_path / "missing.txt")


def test_bundled_lexicon_knows_common_base_verbs(tagger):
    assert {"celebrate", "invest", "apologize", "need"} <= {w for w in tagger.open_class if tagger.is_base_verb(w)}
    assert len(tagger.open_class) > 1500


def test_external_lexicon_extends_bundled_one(tmp_path):
    path = tmp_path / "extra.tsv"
    path.write_text("# comment\nzorble\tVERB\tbase\ncall\tNOUN\n", encoding="utf-8")
    tagger = get_tagger(path)
    assert tagger.tag_word("zorble") is Tag.VERB
    assert tagger.is_base_verb("zorble")
    # bundled entries win
    assert tagger.tag_word("call") is Tag.VERB
    assert not get_tagger().is_base_verb("zorble")


def test_external_lexicon_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        get_tagger(tmp_path / "absent.tsv")
    bad = tmp_path / "bad.tsv"
    bad.write_text("zorble\tVERBISH\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid lexicon"):
        get_tagger(bad)
