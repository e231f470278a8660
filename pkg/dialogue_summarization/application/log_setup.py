import sys

from loguru import logger

from dialogue_summarization.application.settings import get_config

_FORMAT = "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan> - <level>{message}</level>"


def setup_logging(debug: bool | None = None) -> None:
    """One stderr sink; the level follows PipelineConfig.debug unless given."""
    if debug is None:
        debug = get_config().debug

    logger.remove()
    # stdout carries JSONL records
    logger.add(sys.stderr, level="DEBUG" if debug else "INFO", format=_FORMAT, backtrace=False, diagnose=False)
