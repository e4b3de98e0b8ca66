#!/usr/bin/env python3
"""Test line parsing, flag resolution, profiles and the shell loop."""

import json

import pytest
from prompt_toolkit.application import create_app_session
from prompt_toolkit.input import create_pipe_input
from prompt_toolkit.output import DummyOutput

from nerf_stego.config import PROFILES, apply_overrides, load_profile
from nerf_stego.errors import ConfigError, FormatError, UsageError, exit_code_for
from nerf_stego.handlers import Handlers
from nerf_stego.models import RsParams
from nerf_stego.parser import ParsedCommand, flag_key, parse_command
from nerf_stego.pipeline import DEFAULT_OFFSETS
from nerf_stego.registry import EXIT, CommandRegistry, float_list, int_list, rs_params
from nerf_stego.shell import StegoShell


@pytest.fixture
def registry():
    return CommandRegistry(Handlers())


# Parsing


def test_parse_flags_and_args():
    parsed = parse_command("keygen --theta 30 --phi -30 --out key.json")
    assert parsed == ParsedCommand("keygen", [], {"theta": "30", "phi": "-30", "out": "key.json"})
    assert parse_command("help embed") == ParsedCommand("help", ["embed"], {})


def test_parse_equals_form_and_quotes():
    parsed = parse_command("embed --out='my bundle.nrsg' --depth=2")
    assert parsed.kwargs == {"out": "my bundle.nrsg", "depth": "2"}


def test_dashes_become_underscores():
    assert flag_key("--out-dir") == "out_dir"
    assert parse_command("x --train-views 3").kwargs == {"train_views": "3"}


@pytest.mark.parametrize("line", ["", "   ", "# a comment"])
def test_blank_lines(line):
    assert parse_command(line) is None


def test_parse_errors():
    with pytest.raises(UsageError):
        parse_command("embed --out 'unterminated")
    with pytest.raises(UsageError, match="needs a value"):
        parse_command("embed --out")


# Flag resolution


def test_resolve_fills_defaults(registry):
    values = registry.resolve(ParsedCommand("sweep", kwargs={"model": "b", "key": "k"}))
    assert values["axis"] == "theta"
    assert values["offsets"] == DEFAULT_OFFSETS
    assert values["out"] is None
    assert values["profile"] is None


def test_resolve_converts_strings(registry):
    values = registry.resolve(parse_command(
        "embed --model f --key k --message m --out b --depth 3 --lr 1e-3 --rs 15,11"
    ))
    assert values["depth"] == 3
    assert values["lr"] == 1e-3
    assert values["rs"] == RsParams(n=15, k=11)


def test_resolve_negative_offsets_in_both_forms(registry):
    for line in ("sweep --model b --key k --offsets -5,0,5",
                 "sweep --model b --key k --offsets=-5,0,5"):
        assert registry.resolve(parse_command(line))["offsets"] == [-5.0, 0.0, 5.0]


def test_resolve_errors(registry):
    with pytest.raises(UsageError, match="--colour"):
        registry.resolve(parse_command("inspect --model f --colour red"))
    with pytest.raises(UsageError, match="--model is required"):
        registry.resolve(parse_command("inspect"))
    with pytest.raises(UsageError, match="unexpected argument"):
        registry.resolve(parse_command("inspect stray --model f"))
    with pytest.raises(UsageError, match="--depth"):
        registry.resolve(parse_command("embed --model f --key k --message m --out b --depth two"))
    with pytest.raises(UsageError, match="must be one of"):
        registry.resolve(parse_command("sweep --model b --key k --axis roll"))
    with pytest.raises(UsageError, match="--rs"):
        registry.resolve(parse_command("embed --model f --key k --message m --out b --rs 10,20"))


def test_unknown_command(registry):
    with pytest.raises(UsageError, match="Unknown command"):
        registry.execute(ParsedCommand("teleport"))


def test_value_parsers():
    assert float_list("0, 0.1,1") == [0.0, 0.1, 1.0]
    assert int_list("1,2,3,") == [1, 2, 3]
    assert rs_params("255,223") == RsParams()
    with pytest.raises(ValueError):
        rs_params("255")


def test_help(registry):
    overview = registry.execute(parse_command("help"))
    for name in ("train-nerf", "keygen", "embed", "extract", "sweep", "capacity", "inspect"):
        assert name in overview
    detail = registry.execute(parse_command("help sweep"))
    assert "--axis" in detail and "--workers" in detail
    assert "(required)" in detail
    assert "No help" in registry.execute(parse_command("help teleport"))
    assert registry.execute(parse_command("quit")) == EXIT


# Profiles


def test_named_profiles():
    assert load_profile().name == "desk"
    paper = load_profile("paper")
    assert (paper.resolution, paper.n_fine, paper.epochs) == (180, 128, 1000)
    assert paper.extractor_lr == 1e-5
    with pytest.raises(ConfigError):
        load_profile("laptop")


def test_overrides():
    profile = apply_overrides(PROFILES["desk"], {"resolution": 32, "field": {"width": 16},
                                                 "epochs": 10.0})
    assert profile.resolution == 32
    assert profile.field.width == 16
    assert profile.field.depth == PROFILES["desk"].field.depth
    assert profile.epochs == 10 and isinstance(profile.epochs, int)


@pytest.mark.parametrize("overrides", [
    {"colour": 1},
    {"field": {"height": 3}},
    {"field": 3},
    {"epochs": 2.5},
    {"epochs": "many"},
    {"epochs": True},
])
def test_bad_overrides(overrides):
    with pytest.raises(ConfigError):
        apply_overrides(PROFILES["desk"], overrides)


def test_config_file(tmp_path, tiny_profile):
    assert load_profile("desk", tiny_profile).n_coarse == 8
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_profile("desk", bad)
    with pytest.raises(ConfigError, match="not found"):
        load_profile("desk", tmp_path / "missing.json")


def test_exit_codes():
    assert exit_code_for(UsageError("x")) == 2
    assert exit_code_for(FormatError("x")) == 1
    assert exit_code_for(RuntimeError("x")) == 1


# Shell


@pytest.fixture
def shell(registry):
    with create_pipe_input() as pipe:
        with create_app_session(input=pipe, output=DummyOutput()):
            yield StegoShell(registry)


def test_shell_runs_commands(shell, capsys, tmp_path):
    key_path = tmp_path / "key.json"
    assert shell.handle_line(f"keygen --theta 10 --phi -20 --res 16 --out {key_path}")
    assert json.loads(key_path.read_text())["theta_deg"] == 10.0
    assert shell.handle_line("help keygen")
    assert "--theta" in capsys.readouterr().out


def test_shell_reports_errors_and_continues(shell, capsys, tmp_path):
    assert shell.handle_line("teleport")
    assert shell.handle_line(f"inspect --model {tmp_path / 'missing.nrsg'}")
    assert shell.handle_line("embed --out")
    err = capsys.readouterr().err
    assert "Unknown command" in err
    assert "not found" in err


def test_shell_exit(shell):
    assert shell.handle_line("")
    assert not shell.handle_line("exit")
    assert not shell.handle_line("quit")
