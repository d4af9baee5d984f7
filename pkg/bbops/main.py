import typer

from bbops.cli.commands import setup_commands

app = typer.Typer(
    name="bbops",
    help="Generalized Bernstein-Bezier operators: evaluation, rates and verification",
    no_args_is_help=True,
    add_completion=False,
    rich_markup_mode="rich",
)

# Set up all commands
setup_commands(app)


if __name__ == "__main__":
    app()
