"""Exception hierarchy.  Every error carries a stable ``code`` string."""


class MfblowError(Exception):
    code = "error"

    def to_dict(self):
        return {"code": self.code, "message": str(self)}


class ParseError(MfblowError, ValueError):
    code = "parse_error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position

    def to_dict(self):
        d = super().to_dict()
        d["position"] = self.position
        return d


class RingMismatchError(MfblowError, ValueError):
    code = "ring_mismatch"


class DomainError(MfblowError):
    """Input is well formed but the mathematics rejects it."""

    code = "domain_error"


class DimensionError(DomainError):
    code = "dimension_mismatch"


class NotAMatrixFactorization(DomainError):
    code = "not_a_matrix_factorization"


class NotPowerOfF(DomainError):
    code = "determinant_not_power_of_f"


class DegenerateChoice(DomainError):
    code = "degenerate_section_choice"


class BlowupError(DomainError):
    code = "all_generators_vanish"


class NotZeroDimensional(DomainError):
    code = "not_zero_dimensional"


class GraphError(DomainError):
    code = "invalid_graph"


class NonContractible(GraphError):
    code = "non_contractible_component"


class NothingKept(GraphError):
    code = "nothing_kept"


class JobError(MfblowError):
    """Malformed job file."""

    code = "invalid_job"
