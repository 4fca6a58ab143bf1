"""Exception types shared across the package."""


class NHLocError(Exception):
    """Base class for package errors."""


class ParameterError(NHLocError, ValueError):
    """An argument is outside its documented domain."""


class SizeLimitError(ParameterError):
    """A requested object would exceed a configured size cap."""


class ConfigError(NHLocError):
    """Invalid experiment configuration (CLI exit code 2)."""


class NonConvergenceError(NHLocError, ArithmeticError):
    """The QR iteration failed to deflate an eigenvalue.

    ``index`` is the position in the Schur form that did not deflate;
    ``context`` carries task coordinates when raised from a sweep.
    """

    def __init__(self, index, sweeps=None, context=None):
        self.index = index
        self.sweeps = sweeps
        self.context = dict(context or {})
        msg = f"QR iteration did not deflate eigenvalue index {index}"
        if sweeps is not None:
            msg += f" after {sweeps} sweeps"
        if self.context:
            coords = ", ".join(f"{k}={v}" for k, v in self.context.items())
            msg += f" ({coords})"
        super().__init__(msg)

    def with_context(self, **context):
        merged = {**self.context, **context}
        return NonConvergenceError(self.index, self.sweeps, merged)


class EmitError(NHLocError, OSError):
    """Writing an output file failed (CLI exit code 4)."""
