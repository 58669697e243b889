import os


class IsospecError(Exception):
    """Base class for toolkit errors."""


class CapExceeded(IsospecError):
    """An exhaustive computation would exceed the configured enumeration cap."""


class FieldMismatch(IsospecError, ValueError):
    pass


#: default bound on the size of any set enumerated exhaustively
DEFAULT_CAP = 2**16

CAP_ENV_VAR = "ISOSPEC_CAP"


def enumeration_cap(cap=None):
    """Resolve an explicit cap, falling back to ``$ISOSPEC_CAP`` and then the default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV_VAR)
    if env:
        return int(env)
    return DEFAULT_CAP


def check_cap(size, cap=None, what="enumeration"):
    limit = enumeration_cap(cap)
    if size > limit:
        raise CapExceeded(f"{what} of size {size} exceeds cap {limit}")
