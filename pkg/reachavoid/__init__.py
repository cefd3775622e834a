import os
import logging
from contextlib import contextmanager
from logging.handlers import RotatingFileHandler
from celery import Celery
from config import Config
from .celery_utils import configure_celery


# Initialize extensions globally, configured later by create_app
celery = Celery('reachavoid')
logger = logging.getLogger('reachavoid')

_current_app = None


class ReachAvoidApp:
    """Holds the resolved configuration and logger of one process."""

    def __init__(self, config):
        self.config = config
        self.logger = logger

    @property
    def testing(self):
        return bool(self.config.get('TESTING'))

    @contextmanager
    def app_context(self):
        global _current_app
        previous = _current_app
        _current_app = self
        try:
            yield self
        finally:
            _current_app = previous


def current_app():
    """Return the active app, creating a default one on first use."""
    global _current_app
    if _current_app is None:
        _current_app = create_app()
    return _current_app


def create_app(overrides=None):
    global _current_app

    config = {key: getattr(Config, key) for key in dir(Config) if key.isupper()}
    config.setdefault('TESTING', False)
    if overrides:
        config.update(overrides)

    app = ReachAvoidApp(config)
    configure_celery(app, celery)

    # Logging configuration
    if not app.testing and not logger.handlers:
        log_dir = config['LOG_DIR']
        if not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(os.path.join(log_dir, 'reachavoid.log'), maxBytes=10240, backupCount=10)
        log_format = '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        file_handler.setFormatter(logging.Formatter(log_format))
        file_handler.setLevel(config['LOG_LEVEL'])
        logger.addHandler(file_handler)
        logger.setLevel(config['LOG_LEVEL'])
        logger.info('reachavoid startup')

    _current_app = app
    return app
