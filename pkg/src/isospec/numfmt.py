from decimal import Decimal


def decimal_str(n: int) -> str:
    """Exact decimal digits of an integer of any size.

    ``str(int)`` refuses very long integers on recent Pythons; ``Decimal``
    conversion of an int is exact and has no such limit.
    """
    return str(Decimal(int(n)))
