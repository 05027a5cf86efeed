class NumericalError(ArithmeticError):
    """An iterative numerical routine failed to meet its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")
        self.residual = residual
