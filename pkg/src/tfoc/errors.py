class ConfigurationError(ValueError):
    """Invalid grid, config file, descriptor or parameter."""


class HypothesisError(RuntimeError):
    """A theorem's hypotheses (Hessian or weight conditions) failed on the sampled nodes."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
