"""Weight semirings over float costs.

Weights are stored as plain floats in the cost (negative-log) domain.
The tropical semiring takes the cheapest path (plus = min); the log
semiring accumulates probability mass (plus = -log(e^-a + e^-b)).
Both share times = + with identities zero = +inf and one = 0.
"""

import math


class Semiring:
    """A (plus, times, zero, one) algebra over float costs."""

    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def plus(self, a, b):
        raise NotImplementedError

    def times(self, a, b):
        if a == math.inf or b == math.inf:
            return math.inf
        return a + b

    @property
    def zero(self):
        return math.inf

    @property
    def one(self):
        return 0.0

    def __repr__(self):
        return f"Semiring({self.name})"

    def __reduce__(self):
        # Preserve identity of the two singletons across pickling.
        return (_semiring_by_name, (self.name,))


class _Tropical(Semiring):
    __slots__ = ()

    def plus(self, a, b):
        return a if a <= b else b


class _Log(Semiring):
    __slots__ = ()

    def plus(self, a, b):
        return log_add(a, b)


def log_add(a, b):
    """-log(e^-a + e^-b), computed stably.  Identity: +inf."""
    if a == math.inf:
        return b
    if b == math.inf:
        return a
    if a <= b:
        return a - math.log1p(math.exp(a - b))
    return b - math.log1p(math.exp(b - a))


TROPICAL = _Tropical("tropical")
LOG = _Log("log")

_BY_NAME = {"tropical": TROPICAL, "log": LOG}


def _semiring_by_name(name):
    return _BY_NAME[name]
