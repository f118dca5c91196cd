"""Exception hierarchy shared by all patchot modules."""


class PatchotError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(PatchotError, ValueError):
    """A caller violated a documented precondition (shapes, ranges, pairing)."""


class DataFormatError(PatchotError, ValueError):
    """A file, manifest or config is malformed, truncated or unsupported."""


class NumericalError(PatchotError, ArithmeticError):
    """A numerical routine failed or produced an invalid result."""


class CertificateError(NumericalError):
    """A transport operator does not satisfy its moment-matching certificates."""
