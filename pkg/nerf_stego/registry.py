"""Command registry and dispatcher."""

from dataclasses import dataclass
from typing import Any, Callable, Optional

from .config import PROFILES, load_profile
from .errors import RsParameterError, UsageError
from .handlers import PROCEDURAL, Handlers
from .models import RsParams
from .parser import ParsedCommand
from .pipeline import AXES, DEFAULT_OFFSETS

EXIT = "__EXIT__"


def float_list(value: str) -> list[float]:
    """'0,0.1,1' -> [0.0, 0.1, 1.0]."""
    return [float(v) for v in value.split(",") if v.strip()]


def int_list(value: str) -> list[int]:
    return [int(v) for v in value.split(",") if v.strip()]


def rs_params(value: str) -> RsParams:
    """'255,223' -> RsParams(n=255, k=223)."""
    parts = value.split(",")
    if len(parts) != 2:
        raise ValueError("expected n,k")
    try:
        return RsParams(n=int(parts[0]), k=int(parts[1]))
    except RsParameterError as e:
        raise ValueError(str(e)) from e


@dataclass(frozen=True)
class Flag:
    """One --flag of a command."""
    name: str
    type: Callable[[str], Any] = str
    help: str = ""
    required: bool = False
    default: Any = None
    choices: Optional[tuple[str, ...]] = None

    @property
    def option(self) -> str:
        return "--" + self.name.replace("_", "-")


COMMON_FLAGS = (
    Flag("profile", help="Preset: desk or paper (default: desk)", choices=tuple(PROFILES)),
    Flag("config", help="JSON file overriding profile values"),
    Flag("seed", int, "Seed for every random draw (default: 0)"),
    Flag("workers", int, "Render threads (default: 1)"),
)

_MODEL = Flag("model", help="Model container (.nrsg)", required=True)
_KEY = Flag("key", help="View key file (JSON)", required=True)
_EPOCHS = Flag("epochs", int, "Extractor epoch budget (profile default)")
_LR = Flag("lr", float, "Adam learning rate (profile default)")
_RS = Flag("rs", rs_params, "Reed-Solomon protect the payload: n,k (e.g. 255,223)")

COMMANDS: dict[str, tuple[str, tuple[Flag, ...]]] = {
    "train-nerf": (
        "Train a radiance field: train-nerf --scene procedural|<dir> --out field.nrsg",
        (
            Flag("scene", help="'procedural' or a NeRF-Synthetic directory", default=PROCEDURAL),
            Flag("out", help="Output container", required=True),
            Flag("iters", int, "Training iterations (profile default)"),
            Flag("res", int, "Square image resolution (profile default)"),
            Flag("holdout", int, "Views held out and scored by PSNR", default=0),
            Flag("views", int, "Procedural view count (profile default)"),
            _LR,
        ),
    ),
    "keygen": (
        "Write a view key: keygen --theta 30 --phi -30 --out key.json",
        (
            Flag("theta", float, "Azimuth in degrees, [-180, 180]", required=True),
            Flag("phi", float, "Elevation in degrees, [-180, 0]", required=True),
            Flag("out", help="Key file to write", required=True),
            Flag("res", int, "Square image resolution (profile default)"),
            Flag("radius", float, "Camera distance (profile default)"),
        ),
    ),
    "render": (
        "Render a key's view: render --model f.nrsg --key key.json --out view.ppm",
        (_MODEL, _KEY, Flag("out", help="Image file (.ppm or .png)", required=True)),
    ),
    "embed": (
        "Hide a message: embed --model f.nrsg --key key.json --message m.bin --depth 1 --out x.nrsg",
        (
            _MODEL,
            _KEY,
            Flag("message", help="Message file", required=True),
            Flag("depth", int, "Bits per pixel D", default=1),
            Flag("out", help="Bundle to write", required=True),
            _EPOCHS,
            _LR,
            _RS,
        ),
    ),
    "extract": (
        "Recover a message: extract --model x.nrsg --key key.json [--out m.bin]",
        (_MODEL, _KEY, Flag("out", help="File receiving the message (printed if omitted)")),
    ),
    "sweep": (
        "Viewpoint sweep: sweep --model x.nrsg --key key.json --axis theta --offsets 0,1,5",
        (
            _MODEL,
            _KEY,
            Flag("axis", help="theta, phi or both", default="theta", choices=AXES),
            Flag("offsets", float_list,
                 "Comma-separated degrees; use --offsets=-5,5 when the list starts negative",
                 default=DEFAULT_OFFSETS),
            Flag("out", help="CSV or .json report"),
        ),
    ),
    "capacity": (
        "Capacity table: capacity --model f.nrsg --key key.json --message m.bin --depths 1,2,3",
        (
            _MODEL,
            _KEY,
            Flag("message", help="Message file", required=True),
            Flag("depths", int_list, "Comma-separated depths", default=(1, 2, 3)),
            Flag("out", help="CSV or .json report"),
            _EPOCHS,
            _LR,
            _RS,
            Flag("scene", help="NeRF-Synthetic directory whose poses are the off-key views"),
        ),
    ),
    "inspect": (
        "Show a container header: inspect --model x.nrsg",
        (_MODEL,),
    ),
}


class CommandRegistry:
    """Registry for console commands."""

    def __init__(self, handlers: Handlers):
        """Initialize registry with handlers."""
        self.handlers = handlers
        self._commands: dict[str, Callable] = {}
        self._descriptions: dict[str, str] = {}
        self._flags: dict[str, tuple[Flag, ...]] = {}
        self._register_builtin_commands()

    def _register_builtin_commands(self):
        """Register all built-in commands."""
        targets = {
            "train-nerf": self._train_nerf,
            "keygen": self._keygen,
            "render": self._render,
            "embed": self._embed,
            "extract": self._extract,
            "sweep": self._sweep,
            "capacity": self._capacity,
            "inspect": self._inspect,
        }
        for name, (description, flags) in COMMANDS.items():
            self.register(name, targets[name], description, flags + COMMON_FLAGS)

        # Shell built-ins
        self.register("help", self._help, "Show available commands: help [command]")
        self.register("exit", self._exit, "Exit the shell")
        self.register("quit", self._exit, "Exit the shell")

    def register(self, name: str, handler: Callable, description: str = "",
                 flags: tuple[Flag, ...] = ()):
        """Register a command."""
        self._commands[name] = handler
        if description:
            self._descriptions[name] = description
        self._flags[name] = flags

    def get_commands(self) -> list[str]:
        """Get list of registered command names."""
        return sorted(self._commands.keys())

    def get_command_help(self, command: str) -> Optional[str]:
        """Get help text for a command."""
        return self._descriptions.get(command)

    def get_flags(self, command: str) -> tuple[Flag, ...]:
        return self._flags.get(command, ())

    def execute(self, parsed: ParsedCommand) -> Any:
        """
        Execute a parsed command.

        Args:
            parsed: ParsedCommand object

        Returns:
            Command result

        Raises:
            UsageError: On unknown commands, flags or values
        """
        handler = self._commands.get(parsed.command)
        if not handler:
            raise UsageError(f"Unknown command: {parsed.command}")
        return handler(parsed)

    def resolve(self, parsed: ParsedCommand) -> dict[str, Any]:
        """
        Typed option values for a command, defaults filled in.

        Shell values arrive as strings and are converted here; values already
        converted by argparse pass through.
        """
        flags = {f.name: f for f in self.get_flags(parsed.command)}
        unknown = sorted(set(parsed.kwargs) - set(flags))
        if unknown:
            raise UsageError(
                f"{parsed.command}: unknown flag(s) " + ", ".join(flags_of(unknown))
            )
        if parsed.args:
            raise UsageError(f"{parsed.command}: unexpected argument '{parsed.args[0]}'")
        values: dict[str, Any] = {}
        for name, flag in flags.items():
            value = parsed.kwargs.get(name)
            if value is None:
                if flag.required:
                    raise UsageError(f"{parsed.command}: {flag.option} is required")
                values[name] = flag.default
                continue
            if isinstance(value, str) and flag.type is not str:
                try:
                    value = flag.type(value)
                except ValueError as e:
                    raise UsageError(f"{parsed.command}: invalid value for {flag.option}: {e}") from e
            if flag.choices and value not in flag.choices:
                raise UsageError(
                    f"{parsed.command}: {flag.option} must be one of {', '.join(flag.choices)}"
                )
            values[name] = value
        return values

    def _bind(self, parsed: ParsedCommand) -> tuple[Handlers, dict[str, Any]]:
        """Split common settings off the options and configure handlers with them."""
        values = self.resolve(parsed)
        profile_name = values.pop("profile")
        config_path = values.pop("config")
        seed = values.pop("seed")
        workers = values.pop("workers")
        profile = None
        if profile_name is not None or config_path is not None:
            profile = load_profile(profile_name or self.handlers.profile.name, config_path)
        return self.handlers.configured(profile=profile, seed=seed, workers=workers), values

    # Command handlers

    def _train_nerf(self, cmd: ParsedCommand) -> Any:
        """Train a field."""
        handlers, opts = self._bind(cmd)
        return handlers.train_nerf(**opts)

    def _keygen(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.keygen(**opts)

    def _render(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.render(**opts)

    def _embed(self, cmd: ParsedCommand) -> Any:
        """Embed a message into a bundle."""
        handlers, opts = self._bind(cmd)
        return handlers.embed(**opts)

    def _extract(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.extract(**opts)

    def _sweep(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.sweep(**opts)

    def _capacity(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.capacity(**opts)

    def _inspect(self, cmd: ParsedCommand) -> Any:
        handlers, opts = self._bind(cmd)
        return handlers.inspect(**opts)

    # Utility command handlers

    def _help(self, cmd: ParsedCommand) -> str:
        """Show help."""
        if cmd.args:
            command = cmd.args[0]
            help_text = self.get_command_help(command)
            if not help_text:
                return f"No help available for: {command}"
            lines = [f"{command}: {help_text}"]
            for flag in self.get_flags(command):
                marker = " (required)" if flag.required else ""
                lines.append(f"  {flag.option:12s} {flag.help}{marker}")
            return "\n".join(lines)

        lines = ["Available commands:"]
        for command in self.get_commands():
            help_text = self.get_command_help(command)
            if help_text:
                lines.append(f"  {command:12s} - {help_text}")
            else:
                lines.append(f"  {command}")
        return "\n".join(lines)

    def _exit(self, cmd: ParsedCommand) -> str:
        """Exit signal."""
        return EXIT


def flags_of(names: list[str]) -> list[str]:
    return ["--" + n.replace("_", "-") for n in names]


__all__ = [
    "EXIT",
    "Flag",
    "COMMON_FLAGS",
    "COMMANDS",
    "CommandRegistry",
    "float_list",
    "int_list",
    "rs_params",
    "flags_of",
]
