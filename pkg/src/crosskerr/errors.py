class IntegrityError(RuntimeError):
    """A computed quantity violates a sum rule or positivity it must satisfy."""


class QuadratureError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual
