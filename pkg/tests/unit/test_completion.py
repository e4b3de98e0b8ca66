#!/usr/bin/env python3
"""Test tab completion functionality."""

import pytest
from prompt_toolkit.document import Document

from nerf_stego.completion import StegoCompleter
from nerf_stego.handlers import Handlers
from nerf_stego.registry import CommandRegistry


@pytest.fixture
def completer():
    return StegoCompleter(CommandRegistry(Handlers()))


def complete(completer, text):
    return [c.text for c in completer.get_completions(Document(text, len(text)), None)]


def test_command_names(completer):
    assert complete(completer, "ex") == ["exit", "extract"]
    assert "train-nerf" in complete(completer, "")


def test_command_meta_is_help_text(completer):
    doc = Document("key", 3)
    (completion,) = list(completer.get_completions(doc, None))
    assert "keygen" in completion.display_meta_text


def test_flags_of_a_command(completer):
    flags = complete(completer, "embed ")
    for option in ("--model", "--key", "--message", "--depth", "--out", "--rs", "--seed"):
        assert option in flags
    assert "--axis" not in flags


def test_flag_prefix(completer):
    assert complete(completer, "sweep --ax") == ["--axis"]


def test_used_flags_are_not_offered_again(completer):
    flags = complete(completer, "keygen --theta 30 ")
    assert "--theta" not in flags
    assert "--phi" in flags


def test_flag_choices(completer):
    assert complete(completer, "sweep --axis ") == ["theta", "phi", "both"]
    assert complete(completer, "sweep --axis p") == ["phi"]
    assert complete(completer, "embed --profile ") == ["desk", "paper"]


def test_path_values(completer, tmp_path, monkeypatch):
    (tmp_path / "field.nrsg").write_bytes(b"")
    monkeypatch.chdir(tmp_path)
    assert "field.nrsg" in complete(completer, "inspect --model ")


def test_free_values_get_nothing(completer):
    assert complete(completer, "keygen --theta ") == []


def test_help_targets(completer):
    assert complete(completer, "help sw") == ["sweep"]
