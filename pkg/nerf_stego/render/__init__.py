"""Output rendering and formatting."""

import math
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Optional

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import BarColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from ..models import (
    CapacityRow,
    EmbedReport,
    ExtractedMessage,
    FieldSummary,
    SweepReport,
    ViewKey,
)
from ..pipeline import key_tolerance, keyspace_bits
from ..storage import Container


console = Console()
err_console = Console(stderr=True)


def render_result(result: Any) -> None:
    """
    Render command result to console.

    Args:
        result: Command result to render
    """
    if result is None:
        return

    if isinstance(result, str):
        console.print(result)
    elif isinstance(result, list):
        if not result:
            console.print("[dim]No items[/dim]")
        elif isinstance(result[0], CapacityRow):
            _render_capacity(result)
        else:
            for item in result:
                console.print(item)
    elif isinstance(result, ViewKey):
        _render_key(result)
    elif isinstance(result, FieldSummary):
        _render_field_summary(result)
    elif isinstance(result, EmbedReport):
        _render_embed_report(result)
    elif isinstance(result, ExtractedMessage):
        _render_extracted(result)
    elif isinstance(result, SweepReport):
        _render_sweep(result)
    elif isinstance(result, Container):
        _render_container(result)
    else:
        console.print(result)


def _fmt(value: Optional[float], digits: int = 6) -> str:
    if value is None:
        return "-"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.{digits}f}"


def _render_key(key: ViewKey) -> None:
    """Render a view key."""
    console.print("[cyan]View key[/cyan]")
    console.print(f"  theta: {key.theta_deg:g} deg   phi: {key.phi_deg:g} deg   radius: {key.radius:g}")
    console.print(f"  {key.width}x{key.height}, focal {key.focal_px:.3f} px, near {key.near:g}, "
                  f"far {key.far:g}")
    console.print("[dim]Share this file only with the receiver.[/dim]")


def _render_field_summary(summary: FieldSummary) -> None:
    console.print(f"[green]Field trained[/green] on {summary.n_views} views: "
                  f"{summary.iters} iterations, final loss {summary.final_loss:.6f}, "
                  f"{summary.total_time:.1f}s")
    if summary.holdout_psnr:
        table = Table(title="Held-out views")
        table.add_column("View", justify="right", style="cyan")
        table.add_column("PSNR (dB)", justify="right")
        for i, value in enumerate(summary.holdout_psnr):
            table.add_row(str(i), _fmt(value, 2))
        console.print(table)
    console.print(f"  Saved: {summary.out}")


def _render_embed_report(report: EmbedReport) -> None:
    """Render an embed report as a panel."""
    lines = [
        f"Depth D: {report.depth}",
        f"Epochs to 100%: {report.epochs_to_100 if report.epochs_to_100 is not None else '-'}",
        f"Time to 100%: {_fmt(report.wall_time, 2)}s",
        f"Epochs run: {report.full_epochs} ({report.full_wall_time:.2f}s)",
        f"Final loss: {report.final_loss:.3e}",
    ]
    console.print(Panel("\n".join(lines), title="Embedded", border_style="green"))


def _render_extracted(result: ExtractedMessage) -> None:
    if result.out:
        console.print(f"[green]Extracted[/green] {len(result.message)} bytes to {result.out}")
        return
    try:
        text = result.message.decode("utf-8")
    except UnicodeDecodeError:
        text = result.message.hex()
    console.print(text, markup=False, highlight=False)


def _render_sweep(report: SweepReport) -> None:
    """Render sweep rows, then the tolerance and keyspace estimate."""
    table = Table(title=f"Viewpoint sweep ({report.axis}, D={report.depth})")
    table.add_column("Offset", justify="right", style="cyan")
    table.add_column("Theta", justify="right", style="dim")
    table.add_column("Phi", justify="right", style="dim")
    table.add_column("Accuracy", justify="right")
    table.add_column("RS-BPP", justify="right")

    for row in report.rows:
        style = "green" if row.acc == 1.0 else ("yellow" if row.rs_bpp >= report.depth / 2 else "")
        table.add_row(
            f"{row.offset_deg:g}",
            f"{row.theta_deg:g}",
            f"{row.phi_deg:g}",
            f"[{style}]{row.acc:.6f}[/{style}]" if style else f"{row.acc:.6f}",
            f"{row.rs_bpp:.6f}",
        )
    console.print(table)

    tolerance = key_tolerance(report)
    if tolerance is None:
        console.print("[yellow]RS-BPP never fell below D/2 in this sweep[/yellow]")
    elif tolerance > 0:
        bits = keyspace_bits(tolerance, tolerance)
        console.print(f"Key tolerance: {tolerance:g} deg -> keyspace about {bits:.1f} bits "
                      "(same tolerance on both axes)")
    else:
        console.print("[yellow]RS-BPP is below D/2 at the key itself[/yellow]")


def _render_capacity(rows: list[CapacityRow]) -> None:
    """Render capacity rows as table."""
    table = Table(title="Capacity")
    table.add_column("D", justify="right", style="cyan")
    table.add_column("Epochs to 100%", justify="right")
    table.add_column("Time (s)", justify="right")
    table.add_column("Epochs", justify="right", style="dim")
    table.add_column("Full time (s)", justify="right", style="dim")
    table.add_column("Secret acc", justify="right")
    table.add_column("Off-key acc", justify="right")
    table.add_column("Off-key RS-BPP", justify="right")
    table.add_column("Max off-key", justify="right")
    table.add_column("Measured RS", justify="right")

    for row in rows:
        table.add_row(
            str(row.depth),
            str(row.epochs_to_100) if row.epochs_to_100 is not None else "-",
            _fmt(row.wall_time, 2),
            str(row.full_epochs),
            _fmt(row.full_wall_time, 2),
            _fmt(row.secret_acc),
            _fmt(row.offkey_mean_acc),
            _fmt(row.offkey_mean_rsbpp),
            _fmt(row.offkey_max_acc),
            _fmt(row.measured_rs_rate),
        )
    console.print(table)


def _render_container(container: Container) -> None:
    """Render a container header and its tensor table."""
    config = ", ".join(f"{k}={v}" for k, v in sorted(container.config.items()))
    console.print(f"[cyan]{container.model_type}[/cyan] container")
    console.print(f"  Config: {config}")
    manifest = container.header.get("manifest")
    if isinstance(manifest, dict):
        console.print(Panel(
            "\n".join(f"{k}: {v}" for k, v in sorted(manifest.items())),
            title="Manifest",
            border_style="dim",
        ))

    table = Table(title=f"Tensors ({len(container.tensors)})")
    table.add_column("Name", style="cyan")
    table.add_column("Shape", justify="right")
    table.add_column("Parameters", justify="right", style="dim")
    total = 0
    for name, array in container.tensors.items():
        total += array.size
        table.add_row(name, "x".join(str(s) for s in array.shape), f"{array.size:,}")
    console.print(table)
    console.print(f"  Total parameters: {total:,}")


@contextmanager
def training_progress(total: int, description: str) -> Iterator[Callable[..., None]]:
    """
    Transient progress bar on stderr.

    Yields:
        Callback accepting (step, loss, *rest) that advances the bar
    """
    progress = Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("{task.completed}/{task.total}"),
        TextColumn("loss {task.fields[loss]}"),
        TimeElapsedColumn(),
        console=err_console,
        transient=True,
    )
    task = progress.add_task(description, total=total, loss="-")

    def _advance(step: int, loss: float, *rest: Any) -> None:
        progress.update(task, completed=min(step + 1, total), loss=f"{loss:.4e}")

    with progress:
        yield _advance


def print_error(message: str) -> None:
    """Print error message."""
    err_console.print(f"[red]Error:[/red] {escape(message)}", highlight=False)


def print_warning(message: str) -> None:
    """Print warning message."""
    err_console.print(f"[yellow]Warning:[/yellow] {escape(message)}", highlight=False)


__all__ = [
    "console",
    "err_console",
    "render_result",
    "training_progress",
    "print_error",
    "print_warning",
]
