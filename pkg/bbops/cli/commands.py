"""CLI command definitions for bbops."""

import os
import sys
from typing import Optional

import typer
from typing_extensions import Annotated

from bbops.bbops_config import DEFAULT_CONFIG_FILE, BbopsSettings
from bbops.cli.ui import console, show_config_panel, show_error
from bbops.config_models import AppConfig, OperatorVariant
from bbops.core import runs
from bbops.core.suites import SUITE_NAMES
from bbops.version import __version__

ConfigOption = Annotated[
    Optional[str],
    typer.Option("--config", "-c", help="Path to custom configuration file"),
]
VerboseOption = Annotated[
    Optional[bool],
    typer.Option("--verbose", "-v", help="Enable verbose logging"),
]
OpOption = Annotated[
    OperatorVariant,
    typer.Option("--op", help="Operator variant", case_sensitive=False),
]
AlphaOption = Annotated[float, typer.Option("--alpha", help="Shape parameter alpha >= 1")]
BetaOption = Annotated[float, typer.Option("--beta", help="Smoothing parameter beta in [0, 1]")]
FnOption = Annotated[
    str,
    typer.Option(
        "--fn",
        help="Function: poly:c0,c1,... | holder:g | abs_half | sin_pi | exp_x | csv:PATH",
    ),
]
LambdaOption = Annotated[
    float, typer.Option("--lambda", help="Weight exponent lambda in [0, 1]")
]
NListOption = Annotated[
    Optional[str],
    typer.Option("--n", help="Degrees: a:b:x2 (geometric), a:b:+d (arithmetic) or a,b,c"),
]
TListOption = Annotated[
    Optional[str],
    typer.Option("--t", help="Step sizes: a:b:xr (geometric) or a,b,c"),
]
GridOption = Annotated[
    Optional[int], typer.Option("--grid", help="Number of evaluation grid points")
]
TolOption = Annotated[Optional[float], typer.Option("--tol", help="Tolerance override")]
JsonOption = Annotated[
    Optional[str],
    typer.Option("--json", help="Write the run document as JSON", rich_help_panel="Output"),
]
CsvOption = Annotated[
    Optional[str],
    typer.Option("--csv", help="Write the results as CSV", rich_help_panel="Output"),
]
SvgOption = Annotated[
    Optional[str],
    typer.Option("--svg", help="Write a log-log SVG plot", rich_help_panel="Output"),
]


def version_callback(value: bool):
    if value:
        console.print(f"bbops Version: [bold green]{__version__}[/bold green]")
        raise typer.Exit()


def setup_commands(app: typer.Typer):
    """Set up all CLI commands for the application."""

    @app.callback()
    def main(
        ctx: typer.Context,
        version: Annotated[
            Optional[bool],
            typer.Option(
                "--version",
                "-V",
                help="Show the application's version and exit.",
                callback=version_callback,
                is_eager=True,
            ),
        ] = None,
    ):
        """Entry point for the bbops CLI."""
        pass

    @app.command(name="eval", help="Evaluate an operator (and its derivative) at points x.")
    def eval_command(
        fn: FnOption,
        op: OpOption = OperatorVariant.GENERALIZED,
        n: Annotated[int, typer.Option("--n", help="Degree n >= 2")] = 10,
        alpha: AlphaOption = 1.0,
        beta: BetaOption = 0.0,
        x: Annotated[str, typer.Option("--x", help="Points in [0, 1], comma separated")] = "0.5",
        deriv: Annotated[
            bool, typer.Option("--deriv", help="Also print the first derivative")
        ] = False,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        svg_path: SvgOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_eval(
            op,
            n,
            alpha,
            beta,
            fn,
            x,
            deriv,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path, svg_path=svg_path),
            config_path,
            verbose,
        )

    @app.command(name="moments", help="Compare closed-form moments with direct summation.")
    def moments_command(
        op: OpOption = OperatorVariant.GENERALIZED,
        n: Annotated[int, typer.Option("--n", help="Degree n >= 2")] = 10,
        alpha: AlphaOption = 1.0,
        beta: BetaOption = 0.0,
        x: Annotated[
            str, typer.Option("--x", help="Points in [0, 1], comma separated")
        ] = "0.25,0.5,0.75",
        tol: TolOption = None,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_moments(
            op,
            n,
            alpha,
            beta,
            x,
            tol,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path),
            config_path,
            verbose,
        )

    @app.command(name="rate", help="Tabulate sup |L f - f| over n and fit its log-log slope.")
    def rate_command(
        fn: FnOption,
        op: OpOption = OperatorVariant.GENERALIZED,
        n: NListOption = None,
        alpha: AlphaOption = 1.0,
        beta: BetaOption = 0.0,
        grid: GridOption = None,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        svg_path: SvgOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_rate(
            op,
            n,
            alpha,
            beta,
            fn,
            grid,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path, svg_path=svg_path),
            config_path,
            verbose,
        )

    @app.command(name="modulus", help="Tabulate the weighted modulus of smoothness over t.")
    def modulus_command(
        fn: FnOption,
        lam: LambdaOption = 0.0,
        t: TListOption = None,
        grid: GridOption = None,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        svg_path: SvgOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_modulus(
            fn,
            lam,
            t,
            grid,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path, svg_path=svg_path),
            config_path,
            verbose,
        )

    @app.command(name="verify", help="Run a verification suite.")
    def verify_command(
        suite: Annotated[
            str, typer.Option("--suite", help=f"One of: {', '.join(SUITE_NAMES)}")
        ] = "all",
        tol: TolOption = None,
        grid: GridOption = None,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        svg_path: SvgOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_verify(
            suite,
            tol,
            grid,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path, svg_path=svg_path),
            config_path,
            verbose,
        )

    @app.command(name="equiv", help="Check the rate/modulus exponent equivalence.")
    def equiv_command(
        fn: FnOption,
        lam: LambdaOption = 1.0,
        alpha: AlphaOption = 1.0,
        beta: BetaOption = 0.5,
        n: NListOption = None,
        t: TListOption = None,
        tol: TolOption = None,
        grid: GridOption = None,
        json_path: JsonOption = None,
        csv_path: CsvOption = None,
        svg_path: SvgOption = None,
        config_path: ConfigOption = None,
        verbose: VerboseOption = None,
    ):
        runs.run_equiv(
            fn,
            lam,
            alpha,
            beta,
            n,
            t,
            tol,
            grid,
            runs.OutputPaths(json_path=json_path, csv_path=csv_path, svg_path=svg_path),
            config_path,
            verbose,
        )

    # Config commands
    config_app = typer.Typer(
        name="config",
        help="Manage bbops configuration",
        rich_markup_mode="rich",
    )
    app.add_typer(config_app, name="config")

    @config_app.command(name="show", help="Show the current configuration")
    def show_config(config_path: ConfigOption = None):
        """Show the merged configuration in a formatted display."""
        try:
            config = BbopsSettings.load_config(config_path)
        except (FileNotFoundError, ValueError) as e:
            show_error(f"Error loading configuration: {e}")
            sys.exit(runs.EXIT_USAGE)
        config_file = config_path or DEFAULT_CONFIG_FILE
        show_config_panel(
            config.model_dump_json(indent=2),
            config_file if os.path.exists(config_file) else "default configuration",
        )

    @app.command(name="init", help="Initialize a new .bbops.yaml configuration file")
    def init_config(
        output_path: Annotated[
            str,
            typer.Argument(
                help="Path to output the default configuration file (default: .bbops.yaml)"
            ),
        ] = DEFAULT_CONFIG_FILE,
        force: Annotated[
            bool, typer.Option("--force", "-f", help="Overwrite without asking")
        ] = False,
    ):
        """Initialize a new configuration file."""
        if os.path.exists(output_path) and not force:
            typer.confirm(f"File '{output_path}' already exists. Overwrite?", abort=True)
        try:
            with open(output_path, "w", encoding="utf-8") as f:
                f.write(AppConfig().to_yaml())
        except OSError as e:
            show_error(f"Error initializing configuration: {e}")
            sys.exit(runs.EXIT_USAGE)
        console.print(f"[bold green]Default configuration written to {output_path}[/bold green]")
