"""Root-of-unity context and shared numeric configuration."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import mpmath

from .errors import DomainError

EPS = 2.220446049250313e-16


@dataclass(frozen=True)
class NumericConfig:
    """Tolerances shared by every module.

    ``cut_tol`` is the distance from a branch cut below which an input is
    rejected; ``boundary_tol`` plays the same role for the phase-region
    boundaries of the 2phi1 summation, which are located less sharply.
    """

    cut_tol: float = 1e-12
    boundary_tol: float = 1e-9
    cyclic_tol: float = 1e-10
    identity_rtol: float = 1e-10
    pole_tol: float = 1e-14
    k_infer_tol: float = 1e-8
    phase_tol: float = 1e-8

    def as_dict(self) -> dict:
        return {
            "cut_tol": self.cut_tol,
            "boundary_tol": self.boundary_tol,
            "cyclic_tol": self.cyclic_tol,
            "identity_rtol": self.identity_rtol,
            "pole_tol": self.pole_tol,
            "k_infer_tol": self.k_infer_tol,
            "phase_tol": self.phase_tol,
        }


DEFAULT_CONFIG = NumericConfig()


@dataclass(frozen=True)
class UnityContext:
    """The integer N together with omega = exp(2 pi i / N).

    With ``dps`` set, arithmetic runs in a private mpmath context at that many
    decimal digits; otherwise in double-precision ``complex``.  Functions that
    accept a context never touch mpmath's global precision.
    """

    N: int
    config: NumericConfig = DEFAULT_CONFIG
    dps: int | None = None
    _mp: object = field(default=None, init=False, repr=False, compare=False)
    _roots: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 2:
            raise DomainError(f"N must be an integer >= 2, got {self.N!r}")
        if self.dps is not None:
            mp = mpmath.MPContext()
            mp.dps = self.dps
            object.__setattr__(self, "_mp", mp)
        object.__setattr__(self, "_roots", tuple(self._make_root(j) for j in range(self.N)))

    @property
    def extended(self) -> bool:
        return self._mp is not None

    @property
    def omega(self):
        return self.root(1)

    def root(self, j: int):
        """omega**j, reduced mod N (tabulated)."""
        return self._roots[j % self.N]

    def _make_root(self, j: int):
        if self._mp is not None:
            return self._mp.expjpi(self._mp.mpf(2 * j) / self.N)
        if 4 * j == self.N:
            return 1j
        if 2 * j == self.N:
            return -1 + 0j
        if 4 * j == 3 * self.N:
            return -1j
        return cmath.exp(2j * math.pi * j / self.N)

    def num(self, z):
        """Convert a scalar into this context's number type."""
        if self._mp is not None:
            return self._mp.mpc(z)
        return complex(z)

    def log(self, z):
        if self._mp is not None:
            return self._mp.log(z)
        return cmath.log(z)

    def exp(self, z):
        if self._mp is not None:
            return self._mp.exp(z)
        return cmath.exp(z)

    def frac(self, p: int, q: int):
        """The rational p/q as a real in this context."""
        if self._mp is not None:
            return self._mp.mpf(p) / q
        return p / q

    def pi(self):
        if self._mp is not None:
            return self._mp.pi
        return math.pi

    def fsum(self, terms):
        """Sum complex terms; exact rounding of the real and imaginary parts in double."""
        if self._mp is not None:
            return self._mp.fsum(terms)
        terms = list(terms)
        return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))

    def with_dps(self, dps: int | None) -> "UnityContext":
        return UnityContext(self.N, self.config, dps)


def phase(z) -> float:
    """Argument normalized to [0, 2 pi)."""
    a = cmath.phase(complex(z))
    if a < 0:
        a += 2 * math.pi
    if a >= 2 * math.pi:
        a = 0.0
    return a


def as_complex(z) -> complex:
    return complex(z)
