"""Tab completion for shell commands."""

from typing import Iterable

from prompt_toolkit.completion import Completer, Completion, PathCompleter
from prompt_toolkit.document import Document

# flags whose value is a local path
PATH_FLAGS = {"--model", "--key", "--message", "--out", "--config", "--scene"}


class StegoCompleter(Completer):
    """Completes command names, their flags, flag choices and file paths."""

    def __init__(self, registry):
        """Initialize with command registry."""
        self.registry = registry
        self._paths = PathCompleter(expanduser=True)

    def _flag_options(self, command: str) -> dict[str, tuple[str, ...]]:
        return {f.option: f.choices or () for f in self.registry.get_flags(command)}

    def get_completions(self, document, complete_event) -> Iterable[Completion]:
        """Generate completions for the current input."""
        text = document.text_before_cursor
        words = text.split()

        # No input yet - show all commands
        if not words or (len(words) == 1 and not text.endswith(" ")):
            prefix = words[0] if words else ""
            for command in self.registry.get_commands():
                if command.startswith(prefix):
                    yield Completion(
                        command,
                        start_position=-len(prefix),
                        display=command,
                        display_meta=self.registry.get_command_help(command),
                    )
            return

        command = words[0]
        flags = self._flag_options(command)
        current = "" if text.endswith(" ") else words[-1]
        previous = words[-1] if text.endswith(" ") else (words[-2] if len(words) > 1 else "")

        # Value of the flag just typed
        if previous in flags:
            if flags[previous]:
                for choice in flags[previous]:
                    if choice.startswith(current):
                        yield Completion(choice, start_position=-len(current))
            elif previous in PATH_FLAGS:
                yield from self._paths.get_completions(Document(current), complete_event)
            return

        # help <command>
        if command == "help" and len(words) <= 2:
            for name in self.registry.get_commands():
                if name.startswith(current):
                    yield Completion(name, start_position=-len(current))
            return

        used = set(words[1:])
        for option in flags:
            if option.startswith(current) and option not in used:
                yield Completion(option, start_position=-len(current), display=option)


__all__ = ["StegoCompleter", "PATH_FLAGS"]
