import logging

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logger(log_file=None, level=logging.INFO):
    logger = logging.getLogger()
    logger.setLevel(level)
    # re-running the CLI in one process must not stack handlers
    for handler in list(logger.handlers):
        if getattr(handler, '_cosponsor_influence', False):
            logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(formatter)
        handler._cosponsor_influence = True
        logger.addHandler(handler)
    return logger
