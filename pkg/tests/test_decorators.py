"""
Unit Tests for Decorators (utils/decorators.py)
This module tests the command decorators for error handling and path validation
"""

# Import pytest framework for testing
import pytest

# Import click to build throwaway test commands
import click
from click.testing import CliRunner

# Import the exit codes the decorators map errors to
from constants import ExitCode

# Import the decorators to be tested
from utils.decorators import handle_errors, validate_paths

# Import error types to raise from the test commands
from utils.errors import (
    ChecksumError,
    DivergenceError,
    LayoutError,
    MissingWeightsError,
    ValidationError,
)


def run(command, args=None):
    """Invoke a click command and return the Result"""
    return CliRunner().invoke(command, args or [])


def raising(error):
    """Build a decorated command that raises error"""

    @click.command()
    @handle_errors
    def command():
        raise error

    return command


class TestHandleErrorsDecorator:
    """
    Test Suite for handle_errors Decorator

    This class contains all test cases for the handle_errors decorator
    which wraps commands to log exceptions and set the exit code.
    """

    def test_handle_errors_with_successful_function(self):
        """
        Test handle_errors decorator with a successful function

        Verifies that when a decorated command executes successfully,
        the decorator does not interfere with its output or exit code.
        """

        # Define a test command decorated with handle_errors
        @click.command()
        @handle_errors
        def ok():
            click.echo("done")

        # Invoke the command
        result = run(ok)

        # Assert success
        assert result.exit_code == ExitCode.SUCCESS, "Exit code should be 0"
        assert result.output.strip() == "done", "Output should pass through"

    @pytest.mark.parametrize(
        "error,expected",
        [
            (ValidationError("bad value"), ExitCode.VALIDATION),
            (LayoutError("no images/"), ExitCode.LAYOUT),
            (ChecksumError("digest"), ExitCode.INCOMPATIBLE),
            (DivergenceError("nan"), ExitCode.DIVERGENCE),
            (MissingWeightsError("absent"), ExitCode.MISSING_WEIGHTS),
        ],
    )
    def test_pipeline_errors_map_to_exit_codes(self, error, expected):
        """
        Test each pipeline error type

        Verifies that every error class carries its own exit code
        through the decorator.
        """
        result = run(raising(error))

        assert result.exit_code == expected, f"{type(error).__name__} should exit {expected}"

    def test_os_error_is_io_failure(self):
        result = run(raising(PermissionError("read-only")))

        assert result.exit_code == ExitCode.IO

    def test_unexpected_error(self):
        """
        Test handle_errors with an unexpected exception

        Anything that is not a pipeline error exits with the generic code.
        """
        result = run(raising(RuntimeError("Unexpected")))

        assert result.exit_code == ExitCode.UNEXPECTED

    def test_click_usage_errors_pass_through(self):
        result = run(raising(click.BadParameter("nope")))

        assert result.exit_code == 2

    def test_preserves_function_name(self):
        """
        Test that handle_errors preserves the function name

        Verifies that functools.wraps keeps the wrapped function's
        metadata, which the log messages rely on.
        """

        @handle_errors
        def my_test_function():
            """Test function docstring"""
            return "ok"

        # Assert that the function name is preserved
        assert my_test_function.__name__ == "my_test_function", "Function name should be preserved"
        assert my_test_function.__doc__ == "Test function docstring"


class TestValidatePathsDecorator:
    """
    Test Suite for validate_paths Decorator
    """

    @staticmethod
    def command():
        @click.command()
        @click.option("--dataset", default=None)
        @handle_errors
        @validate_paths("dataset")
        def show(dataset):
            click.echo(f"dataset={dataset}")

        return show

    def test_existing_path(self, tmp_path):
        result = run(self.command(), ["--dataset", str(tmp_path)])

        assert result.exit_code == ExitCode.SUCCESS
        assert str(tmp_path) in result.output

    def test_missing_path(self, tmp_path):
        """
        Test validate_paths with a path that does not exist

        Verifies that the command stops with the layout exit code
        before its body runs.
        """
        result = run(self.command(), ["--dataset", str(tmp_path / "absent")])

        assert result.exit_code == ExitCode.LAYOUT
        assert "dataset=" not in result.output

    def test_optional_path_not_given(self):
        result = run(self.command())

        assert result.exit_code == ExitCode.SUCCESS
        assert "dataset=None" in result.output
