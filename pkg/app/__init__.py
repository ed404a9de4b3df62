from app.exceptions import ConfigurationError
from app.utils.logger import logger, set_console_level


def create_app():
    """
    Application factory.

    Validates the runtime configuration (Fail Fast), aligns the console
    log level with it and returns the CLI entry point.

    Returns:
        Callable taking an argv list and returning a process exit code

    Raises:
        ConfigurationError: If configuration is invalid
    """
    try:
        from app.config import config
        logger.debug("Configuration validated successfully")
        logger.debug(f"Seed: {config.seed}, jet-order cap: {config.max_order}")
    except ConfigurationError as e:
        logger.error(f"Configuration validation failed: {e.message}")
        raise

    set_console_level(config.log_level)

    from app.cli import main
    return main
