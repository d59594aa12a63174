"""Exception types and numerical tolerances shared across the package."""

from dataclasses import dataclass, fields, replace


class SubSchmidtError(Exception):
    """Base class for all errors raised by this package."""


class StateFormatError(SubSchmidtError, ValueError):
    """A state document or amplitude array is malformed."""


class DimensionalityError(SubSchmidtError, ValueError):
    """The state's local supports are not of the form (n, n, 2).

    ``kind`` names the case: ``"product"``, ``"bipartite"`` or
    ``"unsupported dimensionality"``.
    """

    def __init__(self, message, kind, ranks=None):
        super().__init__(message)
        self.kind = kind
        self.ranks = ranks


class QubitUnentangled(DimensionalityError):
    """The qubit factors out: R0 and R1 are linearly dependent."""

    def __init__(self, message="qubit unentangled: bipartite or product state", ranks=None):
        kind = "product" if ranks is not None and max(ranks) == 1 else "bipartite"
        super().__init__(message, kind, ranks)


class UnsupportedDimensionality(DimensionalityError):
    def __init__(self, message="unsupported dimensionality", ranks=None):
        super().__init__(message, "unsupported dimensionality", ranks)


class SingularPencilError(SubSchmidtError, ArithmeticError):
    """No combination of R0 and R1 is numerically invertible."""


class NumericalError(SubSchmidtError, ArithmeticError):
    """A numerical step did not reach a consistent answer."""


class CertificateError(NumericalError):
    """A constructed SLOCC certificate failed verification."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds.

    rank
        Relative singular-value threshold for numerical rank.
    cluster
        Eigenvalues closer than ``cluster * ||M||_F`` are always merged.
    recon
        Allowed infidelity of a reconstruction.
    cert
        Allowed infidelity of a certificate verification.
    sys
        Relative residual accepted for the Moebius linear system.
    norm
        Slack for norm and trace checks.
    """

    rank: float = 1e-9
    cluster: float = 1e-6
    recon: float = 1e-9
    cert: float = 1e-8
    sys: float = 1e-8
    norm: float = 1e-10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (0 < v < 1):
                raise ValueError(f"tolerance {f.name}={v!r} must lie in (0, 1)")

    def replace(self, **changes):
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


DEFAULT_TOL = Tolerances()
