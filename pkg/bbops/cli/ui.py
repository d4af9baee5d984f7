"""UI components for the bbops CLI."""

from typing import Dict, Optional, Sequence

from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

from bbops.report_models import ModulusFit, RateReport, Report
from bbops.report_writer import summary_row

console = Console()
err_console = Console(stderr=True)


def create_progress_bar(description: str, total: Optional[int] = None) -> Progress:
    """Spinner when the step count is unknown, a bar otherwise; drawn on stderr."""
    if total is None:
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=err_console,
            transient=True,
        )
    return Progress(
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        TimeElapsedColumn(),
        console=err_console,
        transient=False,
    )


def show_operation_summary(operation: str, details: Dict) -> None:
    """Key/value summary of a finished run; a non-zero Failed count is red."""
    table = Table(title=f"{operation} summary", show_header=False, box=None)
    table.add_column(style="cyan")
    table.add_column(justify="right")
    for key, value in details.items():
        style = "bold red" if key == "Failed" and value else None
        table.add_row(key, str(value), style=style)
    console.print(table)


def show_config_panel(config_json: str, source: str) -> None:
    """Merged configuration as JSON, with the file it came from underneath."""
    console.print(
        Panel(config_json, title="bbops configuration", border_style="blue", expand=False)
    )
    console.print(f"[dim]Source: {source}[/dim]")


def show_error(message: str) -> None:
    err_console.print(f"[bold red]Error: {message}[/bold red]", highlight=False)


def show_reports_table(reports: Sequence[Report], title: str = "Reports") -> None:
    """One row per report: kind, anchor, name, pass/fail and headline value."""
    table = Table(title=title, show_header=True, header_style="bold blue")
    table.add_column("Kind", style="cyan")
    table.add_column("Anchor", style="white")
    table.add_column("Name", style="white")
    table.add_column("Result")
    table.add_column("Value", justify="right")

    for report in reports:
        kind, anchor, name, passed, value = summary_row(report)
        if passed == "true":
            result = "[green]pass[/green]"
        elif passed == "false":
            gating = getattr(report, "gating", True)
            result = "[red]FAIL[/red]" if gating else "[yellow]info[/yellow]"
        else:
            result = "[dim]-[/dim]"
        table.add_row(kind, anchor, name, result, value)

    console.print(table)


def show_rate_table(report: RateReport) -> None:
    table = Table(
        title=f"Convergence of {report.f.label}", show_header=True, header_style="bold blue"
    )
    table.add_column("n", justify="right", style="cyan")
    table.add_column("sup error", justify="right")
    for i, row in enumerate(report.rows):
        style = "dim" if i < report.fit_start else None
        table.add_row(str(row.n), f"{row.sup_error:.6e}", style=style)
    console.print(table)
    if report.slope is not None:
        console.print(f"slope [bold]{report.slope:.4f}[/bold] (r2 {report.r2:.4f})")
    else:
        console.print("[yellow]No slope fit: fewer than two positive errors[/yellow]")


def show_modulus_table(fit: ModulusFit) -> None:
    table = Table(
        title=f"Modulus of {fit.f.label} (lambda={fit.lam:g})",
        show_header=True,
        header_style="bold blue",
    )
    table.add_column("t", justify="right", style="cyan")
    table.add_column("omega", justify="right")
    for row in fit.rows:
        table.add_row(f"{row.t:.6e}", f"{row.omega:.6e}")
    console.print(table)
    if fit.gamma_hat is not None:
        console.print(f"exponent [bold]{fit.gamma_hat:.4f}[/bold] (r2 {fit.r2:.4f})")
