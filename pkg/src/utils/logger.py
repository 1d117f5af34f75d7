"""
Logging System - Record unit selection runs
Created: 2026-10-18
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import List, Optional

from src.config import Config


class StudyLogger:
    """Logger for tracking one CLI / pipeline run"""

    def __init__(self, command: str, log_dir: Optional[str] = None, level: Optional[str] = None):
        """
        Initialize study logger

        Args:
            command: Subcommand being run (bounds, compare, simulate, verify, decompose)
            log_dir: Directory for a timestamped log file; console only when None
            level: Logging level name; Config.LOG_LEVEL when None
        """
        self.command = command
        self.log_file: Optional[Path] = None

        self.logger = logging.getLogger("unitselect")
        self.logger.setLevel((level or Config.LOG_LEVEL).upper())
        self.logger.propagate = False

        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # Replace handlers from an earlier run in the same process so output
        # goes to the current stderr and log file.
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        self.logger.addHandler(console_handler)

        if log_dir:
            directory = Path(log_dir)
            directory.mkdir(parents=True, exist_ok=True)
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            self.log_file = directory / f"unitselect_{command}_{timestamp}.log"
            file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

    def log_start(self, source: str):
        """Log run start"""
        self.logger.info("=" * 60)
        self.logger.info(f"UNITSELECT {self.command.upper()} STARTED")
        self.logger.info(f"Input: {source}")

    def log_group_bounds(self, group_id: str, lower: float, upper: float, estimate: float):
        self.logger.info(
            f"[{group_id}] bounds=[{lower:.6g}, {upper:.6g}] estimate={estimate:.6g}"
        )

    def log_incompatible(self, group_id: str, violations: List[str]):
        """Log a group whose data admit no model"""
        self.logger.warning(f"[{group_id}] INCOMPATIBLE data")
        for violation in violations:
            self.logger.warning(f"    {violation}")

    def log_verification(self, group_id: str, verdict: str, deviation: Optional[float], tolerance: float):
        if deviation is None:
            self.logger.info(f"[{group_id}] {verdict}")
        else:
            self.logger.info(
                f"[{group_id}] {verdict} (max deviation {deviation:.3g}, tolerance {tolerance:.3g})"
            )

    def log_simulation(self, n_groups: int, seed: int, exact: bool, out_path: str):
        mode = "expected counts" if exact else f"seed={seed}"
        self.logger.info(f"Simulated {n_groups} group(s) ({mode}) -> {out_path}")

    def log_error(self, error: Exception, context: str = ""):
        """Log error"""
        if context:
            self.logger.error(f"[{context}] Error: {str(error)}")
        else:
            self.logger.error(f"Error: {str(error)}")

    def log_completion(self, exit_code: int, filepath: Optional[str] = None):
        """Log run completion"""
        status = "COMPLETED" if exit_code == 0 else f"COMPLETED WITH EXIT CODE {exit_code}"
        self.logger.info(f"UNITSELECT {self.command.upper()} {status}")
        if filepath:
            self.logger.info(f"Report saved to: {filepath}")
        if self.log_file:
            self.logger.info(f"Log file: {self.log_file}")
        self.logger.info("=" * 60)

    def get_log_file_path(self) -> Optional[str]:
        """Get path to current log file"""
        return str(self.log_file) if self.log_file else None
