"""
Decorators for command-line entry points
"""

import logging
import os
from functools import wraps

import click

from constants import ExitCode
from .errors import RockSegError, LayoutError

logger = logging.getLogger(__name__)


def handle_errors(f):
    """Decorator to log errors and turn them into the matching exit code"""

    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except RockSegError as e:
            logger.error(f"Error in {f.__name__}: [{e.code}] {e.message}")
            raise click.exceptions.Exit(e.exit_code)
        except OSError as e:
            logger.error(f"I/O error in {f.__name__}: {str(e)}")
            raise click.exceptions.Exit(ExitCode.IO)
        except Exception as e:
            logger.exception(f"Unexpected error in {f.__name__}: {str(e)}")
            raise click.exceptions.Exit(ExitCode.UNEXPECTED)

    return decorated_function


def validate_paths(*names):
    """Decorator to check that the named path arguments exist"""

    def decorator(f):
        @wraps(f)
        def decorated_function(*args, **kwargs):
            for name in names:
                path = kwargs.get(name)
                # Optional paths that were not given are skipped
                if path is not None and not os.path.exists(path):
                    raise LayoutError(f"Path for '{name}' does not exist: {path}")
            return f(*args, **kwargs)

        return decorated_function

    return decorator
