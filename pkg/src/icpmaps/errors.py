"""Exception types shared across the package."""


class AlgebraMismatchError(ValueError):
    """Operands belong to different algebras (or wrong grid sizes)."""


class ArityError(ValueError):
    """Wrong number of arguments for a multilinear map."""


class SpecFormatError(ValueError):
    """A JSON spec is malformed or internally inconsistent."""


class NonHermitianGramError(ValueError):
    """Gram matrix is not Hermitian beyond tolerance; source map is malformed
    or not symmetric."""


class NotCompletelyPositiveError(RuntimeError):
    """Dilation refused: the Gram kernel has a genuinely negative eigenvalue."""

    def __init__(self, min_eigenvalue, witness=None):
        super().__init__(
            f"Gram kernel is not positive semidefinite (min eigenvalue "
            f"{min_eigenvalue:.3e}); map is not dilatable / not CP"
        )
        self.min_eigenvalue = min_eigenvalue
        self.witness = witness


class QuotientDescentError(RuntimeError):
    """Left multiplication does not descend to the quotient space: the kernel
    of the Gram matrix is not invariant under some basis multiplier."""

    def __init__(self, factor, basis_index, residual):
        super().__init__(
            f"multiplication does not descend to quotient: factor {factor}, "
            f"basis index {basis_index}, residual {residual:.3e}"
        )
        self.factor = factor
        self.basis_index = basis_index
        self.residual = residual
