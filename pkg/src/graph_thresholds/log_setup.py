"""Configure stdlib logging to also write JSON lines to a log file."""
import json
import logging
from datetime import datetime, timezone
from pathlib import Path

from .config import settings

LOG_SOURCE = "graphthresholds"


class JsonLineHandler(logging.Handler):
    """Append stdlib log records as one JSON object per line."""

    def __init__(self, log_file: Path):
        super().__init__()
        log_file.parent.mkdir(parents=True, exist_ok=True)
        self.log_file = log_file

    def emit(self, record: logging.LogRecord) -> None:
        try:
            entry = {
                "timestamp": datetime.fromtimestamp(record.created, tz=timezone.utc).strftime(
                    "%Y-%m-%dT%H:%M:%S.%f"
                )[:-3] + "Z",
                "level": record.levelname,
                "source": LOG_SOURCE,
                "message": self.format(record),
                "module": record.module,
            }
            with open(self.log_file, "a", encoding="utf-8") as f:
                f.write(json.dumps(entry) + "\n")
        except Exception:
            self.handleError(record)


def setup_json_logging(log_dir: Path | None = None) -> JsonLineHandler:
    """Attach the JSON handler to the root logger (idempotent) and return it."""
    root_logger = logging.getLogger()
    for handler in root_logger.handlers:
        if isinstance(handler, JsonLineHandler):
            return handler

    level = logging.DEBUG if settings.debug else logging.INFO
    handler = JsonLineHandler(Path(log_dir or settings.log_dir) / "graph_thresholds.log")
    handler.setLevel(level)
    root_logger.addHandler(handler)
    if root_logger.level == logging.NOTSET or root_logger.level > level:
        root_logger.setLevel(level)
    return handler
