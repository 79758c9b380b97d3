# coldstart_kode/app/utilities/logging_config.py

import os
import sys

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"
LOG_FILE = "coldstart.log"

# 🔹 Sink padrão ao importar: só console. O arquivo é ligado pela CLI.
logger.remove()
logger.add(sys.stderr, format=CONSOLE_FORMAT, level="INFO")


def configure_logging(level: str = "INFO", log_dir: str = "logs") -> None:
    """
    Reconfigura os sinks a partir da CLI: console no nível pedido e,
    se `log_dir` não for vazio, arquivo rotativo em DEBUG.
    """
    logger.remove()
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level.upper())

    if not log_dir:
        return
    os.makedirs(log_dir, exist_ok=True)
    logger.add(
        os.path.join(log_dir, LOG_FILE),
        rotation="10 MB",
        retention="10 days",
        compression="zip",  # rotações antigas
        level="DEBUG",
        format=FILE_FORMAT,
    )


__all__ = ["logger", "configure_logging", "CONSOLE_FORMAT", "FILE_FORMAT"]
