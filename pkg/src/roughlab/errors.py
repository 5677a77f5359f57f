"""Exception taxonomy and the process exit codes the CLI maps them to."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class RoughlabError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = EXIT_NUMERICAL


class InvalidArgumentError(RoughlabError, ValueError):
    """A parameter violates an operation's preconditions."""

    exit_code = EXIT_USAGE


class DegenerateBlockError(RoughlabError):
    """A normalization block has zero p-th variation in its denominator."""

    def __init__(self, block_index, message=None):
        self.block_index = int(block_index)
        super().__init__(
            message
            or f"block {self.block_index} has zero p-th variation in the denominator; "
            "the path is constant there (pass zero_denominator_guard=True to add a "
            "1e-300 floor for real data with repeated values)"
        )


class NoCrossingError(RoughlabError):
    """log W(1/h) - log T has no sign change on the candidate grid."""

    def __init__(self, curve=None, message=None):
        self.curve = curve
        if message is None:
            message = "statistic curve does not cross the target level on the h grid"
            if curve is not None:
                import numpy as np

                finite = np.isfinite(curve.log_w_values)
                if finite.any():
                    lo = float(np.min(curve.log_w_values[finite]))
                    hi = float(np.max(curve.log_w_values[finite]))
                    message += (
                        f"; log W ranges over [{lo:.6g}, {hi:.6g}] for h in "
                        f"[{curve.h_grid[0]:g}, {curve.h_grid[-1]:g}]"
                    )
        super().__init__(message)


class NoValidKError(RoughlabError):
    """No divisor of L lies in the admissible window around sqrt(L)."""

    exit_code = EXIT_USAGE


class InsufficientDataError(RoughlabError):
    """Too few usable lag points to run a log-log regression."""

    def __init__(self, q, message=None):
        self.q = q
        super().__init__(
            message or f"fewer than 3 usable lag points for q={q:g} (zero moments excluded)"
        )


class DegenerateSeriesError(RoughlabError):
    """A series has zero variance where variation structure is required."""


class SimulationFailureError(RoughlabError):
    """A sampling scheme cannot produce the requested path."""


class ExperimentFailureError(RoughlabError):
    """More than the tolerated share of Monte Carlo paths failed."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class CSVFormatError(RoughlabError):
    """An input CSV row cannot be parsed."""

    exit_code = EXIT_IO

    def __init__(self, path, line_number, message):
        self.path = str(path)
        self.line_number = int(line_number)
        super().__init__(f"{path}:{line_number}: {message}")
