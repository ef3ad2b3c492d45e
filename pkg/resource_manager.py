"""
Resource Manager for the nonlocal fermion entanglement toolkit

This module locates bundled recipe configs and the output directory
relative to the application directory.
"""

import os
from pathlib import Path
from typing import List, Optional

from constants import DEFAULT_OUTPUT_DIR, RECIPE_EXTENSIONS, RECIPES_DIR


def _get_base_path() -> Path:
    """
    Get the base path for resources.

    Returns:
        Path object pointing to the application directory
    """
    return Path(__file__).parent.absolute()


def get_recipe_path(filename: str) -> str:
    """
    Get full path to a recipe file as string.

    Args:
        filename: Recipe filename (e.g., 'doubling.cfg')

    Returns:
        String path to the recipe file
    """
    return str(_get_base_path() / RECIPES_DIR / filename)


def recipe_exists(filename: str) -> bool:
    """Check if a recipe file exists."""
    return os.path.exists(get_recipe_path(filename))


def find_recipe(name: str, extensions: Optional[List[str]] = None) -> Optional[str]:
    """
    Find a bundled recipe by name, trying each known extension.

    Args:
        name: Recipe name with or without extension (e.g., 'crossover')
        extensions: Extensions to try, defaults to RECIPE_EXTENSIONS

    Returns:
        String path to the first match, or None
    """
    if recipe_exists(name):
        return get_recipe_path(name)
    for ext in extensions or RECIPE_EXTENSIONS:
        filename = f"{name}{ext}"
        if recipe_exists(filename):
            return get_recipe_path(filename)
    return None


def list_recipes() -> List[str]:
    """
    List bundled recipe names.

    Returns:
        Sorted recipe names without extension
    """
    recipes_path = _get_base_path() / RECIPES_DIR
    if not recipes_path.exists():
        return []
    return sorted(f.stem for f in recipes_path.iterdir() if f.is_file() and f.suffix in RECIPE_EXTENSIONS)


def get_output_path(filename: str, directory: Optional[str] = None) -> Path:
    """
    Resolve an output file, creating its directory.

    Relative names land in the configured output directory under the
    current working directory.
    """
    path = Path(filename)
    if not path.is_absolute() and path.parent == Path("."):
        path = Path(directory or DEFAULT_OUTPUT_DIR) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    return path

