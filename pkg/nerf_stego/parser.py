"""Command parsing logic for shell lines."""

import shlex
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import UsageError


@dataclass
class ParsedCommand:
    """Parsed command structure."""
    command: str
    args: list[str] = field(default_factory=list)
    kwargs: dict[str, Any] = field(default_factory=dict)


def flag_key(flag: str) -> str:
    """'--out-dir' -> 'out_dir'."""
    return flag.lstrip("-").replace("-", "_")


def parse_command(line: str) -> Optional[ParsedCommand]:
    """
    Parse a shell line into command, positional args and --flag values.

    Args:
        line: Raw command line string

    Returns:
        ParsedCommand or None if empty

    Raises:
        UsageError: On unbalanced quotes or a flag without a value

    Examples:
        >>> parse_command("keygen --theta 30 --phi -30 --out key.json")
        ParsedCommand(command='keygen', args=[], kwargs={'theta': '30', 'phi': '-30', 'out': 'key.json'})

        >>> parse_command("help embed")
        ParsedCommand(command='help', args=['embed'], kwargs={})
    """
    line = line.strip()
    if not line or line.startswith("#"):
        return None

    try:
        tokens = shlex.split(line)
    except ValueError as e:
        raise UsageError(f"Cannot parse line: {e}") from e
    if not tokens:
        return None

    command = tokens[0]
    args: list[str] = []
    kwargs: dict[str, Any] = {}
    i = 1
    while i < len(tokens):
        token = tokens[i]
        if token.startswith("--"):
            if "=" in token:
                name, value = token.split("=", 1)
            elif i + 1 < len(tokens):
                name, value = token, tokens[i + 1]
                i += 1
            else:
                raise UsageError(f"Flag {token} needs a value")
            kwargs[flag_key(name)] = value
        else:
            args.append(token)
        i += 1

    return ParsedCommand(command=command, args=args, kwargs=kwargs)


__all__ = ["ParsedCommand", "flag_key", "parse_command"]
