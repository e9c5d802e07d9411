"""File management utilities for the MB engine."""

import os
import json
import logging
from pathlib import Path
from typing import Any

from ..config.constants import DEFAULT_OUTPUT_DIR
from ..errors import CodecError

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def data_path(name: str) -> Path:
    """
    Path of a file shipped with the package.

    Args:
        name: file name relative to the data directory (e.g. "seeds.v1.json")

    Returns:
        Absolute path inside mbhf/data
    """
    return DATA_DIR / name


def read_json(path: str) -> Any:
    """
    Load a JSON document.

    Raises:
        CodecError: the file is missing or is not valid JSON
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except FileNotFoundError:
        raise CodecError(f"no such file: {path}")
    except json.JSONDecodeError as e:
        raise CodecError(f"{path} is not valid JSON: {e}")


def write_json(path: str, data: Any) -> None:
    """Write a JSON document with stable key order, creating parent directories."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write('\n')
    logger.info(f"Wrote {output_path}")


class FileManager:
    """Resolves input files and output locations for the command-line tools."""

    def __init__(self, base_output_dir: str = DEFAULT_OUTPUT_DIR):
        self.base_output_dir = base_output_dir

    def output_path(self, filename: str) -> str:
        """
        Path of an output file, creating the output directory.

        Absolute paths and paths with a directory part are returned unchanged.

        Args:
            filename: e.g. "map_H_C_2.json"

        Returns:
            Full path to the file
        """
        if os.path.isabs(filename) or os.path.dirname(filename):
            self.ensure_directory_exists(os.path.dirname(filename) or '.')
            return filename
        self.ensure_directory_exists(self.base_output_dir)
        return os.path.join(self.base_output_dir, filename)

    def resolve_input(self, name: str) -> str:
        """
        Locate an input document: an existing path first, then the shipped data files.

        Raises:
            CodecError: the file exists nowhere
        """
        if os.path.exists(name):
            return name
        shipped = data_path(name)
        if shipped.exists():
            return str(shipped)
        raise CodecError(f"no such file: {name}")

    def file_exists_and_has_content(self, file_path: str) -> bool:
        """True if the file exists and is not empty."""
        return os.path.exists(file_path) and os.path.getsize(file_path) > 0

    def ensure_directory_exists(self, directory_path: str) -> None:
        os.makedirs(directory_path, exist_ok=True)
