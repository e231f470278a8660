import json

import pytest

from dialogue_summarization.application.errors import ConfigError
from dialogue_summarization.application.schemas import Tag
from dialogue_summarization.application.services.path_scoring import PathScore
from dialogue_summarization.application.services.pov import PovRuleSet, convert, convert_summary, fix_agreement
from dialogue_summarization.application.services.summarizer import SummaryPath


def _summary_path(text: str, tags: list[Tag], speaker: str = "Anne") -> SummaryPath:
    return SummaryPath(
        nodes=(),
        text=text,
        words=tuple(text.split()),
        tags=tuple(tags),
        score=PathScore(path=(), score=0.0, covered=frozenset()),
        total_weight=0.0,
        speaker=speaker,
        segment=0,
    )


@pytest.mark.parametrize(
    "speaker, sentence, expected",
    [
        ("Boris", "I'll tell Brian to take care of that", "boris 'll tell brian to take care of that"),
        ("Anne", "I can go", "anne could go"),
        ("Anne", "I may come", "anne might come"),
        ("Anne", "I must go", "anne had to go"),
        ("Anne", "I am tired", "anne is tired"),
        ("Anne", "I'm sure", "anne 's sure"),
        ("Anne", "I've left", "anne 's left"),
        ("Anne", "I have a car", "anne has a car"),
        ("Anne", "I were late", "anne was late"),
        ("Anne", "I need help", "anne needs help"),
        ("Anne", "I watch tv", "anne watches tv"),
        ("Anne", "I try again", "anne tries again"),
        ("Anne", "I pass the ball", "anne passes the ball"),
        ("Anne", "I buy bread", "anne buys bread"),
        ("Anne", "I go home", "anne goes home"),
        ("Anne", "I do it", "anne does it"),
        ("Anne", "I love you", "anne loves you"),
        ("Anne", "Give it to me", "give it to anne"),
        ("Anne", "That is mine", "that is anne's"),
        ("Anne", "We are late", "they are late"),
        ("Anne", "We love our dog", "they love their dog"),
        ("Anne", "Come with us", "come with them"),
        ("Anne", "It is ours", "it is theirs"),
        ("Joseph", "I'll take my car.", "joseph 'll take joseph's car ."),
        (" Anne ", "I can go", "anne could go"),
        ("Anne", "I think we can go", "anne thinks they could go"),
        ("Anne", "My dog likes me", "anne's dog likes anne"),
        ("Anne", "I know our plan", "anne knows their plan"),
        ("Anne", "Tell us", "tell them"),
        ("Anne", "I bake a cake for my mom", "anne bakes a cake for anne's mom"),
        ("Anne", "I want to eat", "anne wants to eat"),
        ("Anne", "I feed the dog", "anne feeds the dog"),
        ("Anne", "I celebrate today", "anne celebrates today"),
        ("Mary Ann", "I'll take my car.", "mary ann 'll take mary ann's car ."),
        ("Mary Ann", "I need my keys", "mary ann needs mary ann's keys"),
        ("Mary  Ann ", "Tell me", "tell mary ann"),
    ],
)
def test_first_person_statements(speaker, sentence, expected):
    assert convert(sentence, speaker) == expected
    assert convert(expected, speaker) == expected


@pytest.mark.parametrize(
    "sentence",
    ["She likes cats", "They have left", "He told him about it", "Their car is theirs"],
)
def test_third_person_is_untouched(sentence):
    assert convert(sentence, "Anne") == sentence.lower()


@pytest.mark.parametrize(
    "speaker, sentence, expected",
    [
        ("Megan", "Are we going to take a taxi to the opera?", "megan asks are we going to take a taxi to the opera ?"),
        ("Anne", "Can I come?", "anne asks can i come ?"),
        ("Jerry", "Do you want some?", "jerry asks do you want some ?"),
        ("Mary Ann", "Can I come?", "mary ann asks can i come ?"),
    ],
)
def test_questions_are_wrapped_verbatim(speaker, sentence, expected):
    assert convert(sentence, speaker) == expected
    assert convert(expected, speaker) == expected


def test_keep_possessives():
    assert convert("I'll take my car.", "Joseph", keep_possessives=True) == "joseph 'll take my car ."
    assert convert("We love our dog", "Anne", keep_possessives=True) == "they love our dog"


def test_empty_sentence():
    assert convert("", "Anne") == ""


def test_summary_path_input_uses_its_tags():
    # "can" tagged as a noun is not a modal
    path = _summary_path("i need the can", [Tag.PRON, Tag.VERB, Tag.DET, Tag.NOUN])
    assert convert(path, path.speaker) == "anne needs the can"
    modal = _summary_path("i can go", [Tag.PRON, Tag.VERB, Tag.VERB])
    assert convert(modal, modal.speaker) == "anne could go"


def test_summary_path_and_string_agree():
    path = _summary_path("i 'll take my car .", [Tag.PRON, Tag.VERB, Tag.VERB, Tag.PRON, Tag.NOUN, Tag.PUNCT], "Joseph")
    assert convert(path, "Joseph") == convert("I'll take my car.", "Joseph")


@pytest.mark.parametrize(
    "tokens, subjects, expected",
    [
        ([("anne", Tag.NOUN), ("am", Tag.VERB), ("tired", Tag.ADJ)], [0], ["anne", "is", "tired"]),
        ([("anne", Tag.NOUN), ("'m", Tag.VERB), ("sure", Tag.ADJ)], [0], ["anne", "'s", "sure"]),
        ([("they", Tag.PRON), ("have", Tag.VERB), ("left", Tag.VERB)], [], ["they", "have", "left"]),
        ([("anne", Tag.NOUN), ("needs", Tag.VERB)], [0], ["anne", "needs"]),
        ([("anne", Tag.NOUN), ("could", Tag.VERB), ("go", Tag.VERB)], [0], ["anne", "could", "go"]),
        ([("anne", Tag.NOUN), ("help", Tag.NOUN)], [0], ["anne", "help"]),
        ([("anne", Tag.NOUN)], [0], ["anne"]),
    ],
)
def test_fix_agreement(tokens, subjects, expected):
    assert [w for w, _ in fix_agreement(tokens, subjects)] == expected


def test_rules_from_json(tmp_path):
    path = tmp_path / "rules.json"
    path.write_text(json.dumps({"question_template": "{speaker} wonders {utterance}"}), encoding="utf-8")
    rules = PovRuleSet.from_json(path)
    assert convert("Can I come?", "Anne", rules) == "anne wonders can i come ?"
    # the other tables keep their defaults
    assert convert("I can go", "Anne", rules) == "anne could go"


@pytest.mark.parametrize(
    "payload",
    [
        {"pronoun_map": {"he": "{speaker}"}},
        {"question_template": "{speaker} asks"},
        {"modal_map": "not a mapping"},
    ],
)
def test_invalid_rules_raise_config_error(tmp_path, payload):
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(payload), encoding="utf-8")
    with pytest.raises(ConfigError, match="invalid POV rules"):
        PovRuleSet.from_json(path)


def test_missing_rules_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        PovRuleSet.from_json(tmp_path / "absent.json")


def test_summary_path_words_may_hold_spaces():
    path = SummaryPath(
        nodes=(),
        text="i love new york",
        words=("i", "love", "new york"),
        tags=(Tag.PRON, Tag.VERB, Tag.NOUN),
        score=PathScore(path=(), score=0.0, covered=frozenset()),
        total_weight=0.0,
        speaker="Anne",
        segment=0,
    )
    assert convert(path, path.speaker) == "anne loves new york"


def test_convert_summary_follows_speaker_prefixes():
    text = "The opera starts at 8. Joseph: I'll take my car. I need the keys. Megan: Can we go?"
    assert convert_summary(text) == [
        "The opera starts at 8.",
        "joseph 'll take joseph's car .",
        "joseph needs the keys .",
        "megan asks can we go ?",
    ]


def test_convert_summary_default_speaker():
    assert convert_summary("I can go.", speaker="Anne") == ["anne could go ."]
    assert convert_summary("") == []
