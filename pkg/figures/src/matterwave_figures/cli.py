"""``figures render --recipe <id> --in <csv...> --out <path>``."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .csvio import EmptyInputError, MissingColumnError
from .recipes import RECIPES, FigureRecipe, RecipeError, render


@click.group()
def cli():
    """Render plots from matterwave CSV files."""


@cli.command("render")
@click.option("--recipe", "recipe_id", required=True,
              type=click.Choice(sorted(RECIPES)),
              help="Figure recipe id.")
@click.option("--in", "inputs", multiple=True, required=True,
              help="Input CSV path (repeatable).")
@click.option("--out", "output", required=True,
              help="Output image path (.png/.svg/...).")
def render_cmd(recipe_id, inputs, output):
    """Render one figure and its min/max sidecar JSON."""
    recipe = FigureRecipe(figure_id=recipe_id,
                          inputs=tuple(Path(p) for p in inputs),
                          output=Path(output))
    path = render(recipe)
    click.echo(f"wrote {path} and {path}.json")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as err:
        return 0 if err.exit_code == 0 else 1
    except (click.UsageError, click.ClickException) as err:
        err.show(file=sys.stderr)
        return 1
    except (RecipeError, MissingColumnError, EmptyInputError,
            FileNotFoundError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
