"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: parse errors -> 2, numerical failures -> 3,
precondition violations -> 4.
"""


class FracError(Exception):
    pass


class ExprSyntaxError(FracError, ValueError):
    def __init__(self, offset: int, expected: str, found: str = ""):
        self.offset = offset
        self.expected = expected
        self.found = found
        msg = f"syntax error at offset {offset}: expected {expected}"
        if found:
            msg += f", found {found!r}"
        super().__init__(msg)


class NumericalError(FracError, ArithmeticError):
    """Numerical failure: domain error, non-convergence, non-finite values."""


class DomainError(NumericalError, ValueError):
    pass


class EvalError(NumericalError):
    pass


class UnboundVariableError(EvalError):
    pass


class ConvergenceError(NumericalError):
    pass


class NonFiniteError(NumericalError):
    pass


class NoWitnessError(NumericalError):
    pass


class DifferentiationError(FracError):
    pass


class PreconditionError(FracError, ValueError):
    pass


class SignChangeError(PreconditionError):
    pass


class MeshMismatchError(PreconditionError):
    pass
