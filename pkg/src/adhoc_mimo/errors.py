"""Exception types raised across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """A physical parameter lies outside its valid range."""


class InfeasibleEpsilonError(ValueError):
    """Target outage is at or below the interference-free (noise-only) floor."""

    def __init__(self, epsilon: float, floor: float):
        self.epsilon = epsilon
        self.floor = floor
        super().__init__(
            f"target outage {epsilon!r} is not above the noise-limited floor {floor!r}"
        )


class ConsistencyError(ArithmeticError):
    """A computed quantity violates a property it must satisfy."""


class NumericalError(ArithmeticError):
    """A factorization or solve broke down (e.g. a non-PD covariance)."""


class BracketError(ValueError):
    def __init__(self, target: float, f_lo: float, f_hi: float, lo: float, hi: float):
        self.target, self.f_lo, self.f_hi, self.lo, self.hi = target, f_lo, f_hi, lo, hi
        super().__init__(
            f"target {target!r} not bracketed: f({lo!r})={f_lo!r}, f({hi!r})={f_hi!r}"
        )
