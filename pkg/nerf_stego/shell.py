"""Interactive REPL shell."""

from prompt_toolkit import PromptSession
from prompt_toolkit.auto_suggest import AutoSuggestFromHistory
from prompt_toolkit.history import InMemoryHistory

from . import __version__
from .completion import StegoCompleter
from .errors import StegoError
from .parser import parse_command
from .registry import EXIT, CommandRegistry
from .render import console, print_error, render_result


class StegoShell:
    """Interactive shell running the same commands as the CLI."""

    def __init__(self, registry: CommandRegistry):
        """
        Initialize shell.

        Args:
            registry: Command registry
        """
        self.registry = registry
        self.history = InMemoryHistory()
        self.completer = StegoCompleter(registry)
        self.session = PromptSession(
            history=self.history,
            auto_suggest=AutoSuggestFromHistory(),
            completer=self.completer,
            complete_while_typing=True,
        )

    def handle_line(self, line: str) -> bool:
        """
        Run one line. Errors are printed, never raised.

        Returns:
            False when the line asked to leave the shell
        """
        try:
            parsed = parse_command(line)
            if not parsed:
                return True
            result = self.registry.execute(parsed)
        except StegoError as e:
            print_error(str(e))
            return True
        except Exception as e:
            print_error(f"Command failed: {e}")
            return True

        if result == EXIT:
            return False
        render_result(result)
        if result is not None:
            console.print()
        return True

    def run(self):
        """Run the interactive shell loop."""
        console.print(f"[bold green]nerf-stego v{__version__}[/bold green]")
        console.print("Type 'help' for available commands, 'exit' to quit.\n")

        while True:
            try:
                line = self.session.prompt("nerf-stego> ")
            except KeyboardInterrupt:
                # Ctrl+C - cancel current line
                continue
            except EOFError:
                break
            if not self.handle_line(line):
                break
        console.print("[dim]Goodbye![/dim]")


__all__ = ["StegoShell"]
