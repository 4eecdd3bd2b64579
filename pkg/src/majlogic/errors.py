class DomainError(ValueError):
    """Input outside the domain of an operation (bad probability, degree, size...)."""


class AlistError(DomainError):
    def __init__(self, message: str, line: int | None = None, node: str | None = None):
        self.line = line
        self.node = node
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class InfeasibleError(DomainError):
    """Exact computation refused because it exceeds its enumeration budget."""
