"""Plot rendering from the CSV files written by the matterwave CLI."""

from .csvio import EmptyInputError, MissingColumnError, Table, read_table
from .recipes import RECIPES, FigureRecipe, RecipeError, render

__all__ = [
    "EmptyInputError",
    "FigureRecipe",
    "MissingColumnError",
    "RECIPES",
    "RecipeError",
    "Table",
    "read_table",
    "render",
]

__version__ = "0.1.0"
