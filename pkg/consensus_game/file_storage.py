"""
Output storage for simulation and sweep results
Stages CSV and JSON files in a temporary directory and moves them into place together
"""
import csv
import io
import logging
import os
import shutil
import tempfile
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence

from .models import dump_json

logger = logging.getLogger(__name__)


class StagedOutput:
    """Files written into a staging directory, published only on commit"""

    def __init__(self, staging_dir: Path):
        self.staging_dir = staging_dir
        self.filenames: List[str] = []

    def _target(self, filename: str) -> Path:
        safe = OutputManager.sanitize_filename(filename)
        if not safe:
            raise ValueError(f"Invalid output filename: {filename!r}")
        if safe not in self.filenames:
            self.filenames.append(safe)
        return self.staging_dir / safe

    def write_csv(self, filename: str, columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
        """
        Write rows as CSV with a header line

        Args:
            filename: Output file name
            columns: Column order
            rows: Mappings from column name to value

        Returns:
            Staged file path
        """
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        path = self._target(filename)
        path.write_text(buffer.getvalue(), encoding="utf-8")
        return path

    def write_json(self, filename: str, payload: Any) -> Path:
        path = self._target(filename)
        path.write_text(dump_json(payload) + "\n", encoding="utf-8")
        return path


class OutputManager:
    """
    Manages one output directory

    Features:
    - Automatic directory creation
    - Filename sanitizing against path traversal
    - All-or-nothing publication of a run's files
    """

    def __init__(self, output_dir: str):
        """
        Initialize output manager

        Args:
            output_dir: Directory receiving the result files
        """
        self.output_dir = Path(output_dir)
        self._ensure_output_dir()

    def _ensure_output_dir(self):
        """Ensure output directory exists"""
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            logger.debug(f"Output directory: {self.output_dir}")
        except Exception as e:
            logger.error(f"Failed to create output directory: {e}")
            raise

    @staticmethod
    def sanitize_filename(filename: str) -> str:
        """
        Strip directory components and parent references from a file name

        Args:
            filename: Requested file name

        Returns:
            Sanitized file name (may be empty)
        """
        filename = os.path.basename(filename)
        filename = filename.replace("..", "")
        filename = filename.replace("/", "")
        filename = filename.replace("\\", "")
        return filename

    @contextmanager
    def stage(self) -> Iterator[StagedOutput]:
        """
        Stage files and publish them when the block completes

        Nothing is published if the block raises; the staging directory is
        always removed.
        """
        staging_dir = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.output_dir))
        staged = StagedOutput(staging_dir)
        try:
            yield staged
            for filename in staged.filenames:
                os.replace(staging_dir / filename, self.output_dir / filename)
                logger.info(f"Wrote {self.output_dir / filename}")
        finally:
            shutil.rmtree(staging_dir, ignore_errors=True)

    def file_path(self, filename: str) -> Optional[Path]:
        """Path of a published file, or None if it does not exist"""
        path = self.output_dir / self.sanitize_filename(filename)
        return path if path.exists() else None


def get_output_manager(output_dir: Optional[str] = None) -> OutputManager:
    """Output manager for an explicit directory or the configured default"""
    if output_dir is None:
        from .settings import get_settings

        output_dir = get_settings().output_dir
    return OutputManager(output_dir)
