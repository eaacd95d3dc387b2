"""Base interface for closed-form soliton families."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional, Tuple

from lbcv.errors import PreconditionError, WrongCaseError
from lbcv.models import CoefficientSet, SolitonCandidate, SpaceParams, VectorField
from lbcv.solitons import CASE_TOL


def is_zero(value: float) -> bool:
    """Exact-case test used for every case boundary."""
    return abs(value) <= CASE_TOL


class SolitonFamily(ABC):
    """Abstract base class for the soliton families of the classification."""

    #: Case label ("1a", "1b", "2", "3").
    label: str = ""
    #: Statement of the parameter case, used in wrong-case errors.
    requirement: str = ""
    #: Number of free coefficients a1, a2, ...
    coefficient_count: int = 0
    #: True when gamma is a free parameter of the family.
    free_gamma: bool = False

    @abstractmethod
    def matches(self, params: SpaceParams) -> bool:
        """Whether the family exists on these parameters."""
        ...

    @abstractmethod
    def gamma(self, params: SpaceParams) -> Optional[float]:
        """The soliton constant the family forces (None when free)."""
        ...

    @abstractmethod
    def fields(self, params: SpaceParams, a: Tuple[float, ...], gamma: float) -> VectorField:
        """Frame components of the family member with coefficients ``a``."""
        ...

    def check_case(self, params: SpaceParams) -> None:
        if not self.matches(params):
            raise WrongCaseError(
                f"Case {self.label} requires {self.requirement}; "
                f"got lambda={params.lam}, mu={params.mu}"
            )

    def build(
        self,
        params: SpaceParams,
        coeffs: Optional[CoefficientSet] = None,
        gamma: Optional[float] = None,
    ) -> SolitonCandidate:
        """Construct the family member for ``coeffs`` (missing coefficients are zero)."""
        self.check_case(params)
        a = (coeffs or CoefficientSet(())).padded(self.coefficient_count)
        forced = self.gamma(params)
        if forced is None:
            g = 0.0 if gamma is None else float(gamma)
        else:
            if gamma is not None and gamma != forced:
                raise PreconditionError(f"Case {self.label} forces gamma={forced}, got {gamma}")
            g = forced
        return SolitonCandidate(self.fields(params, a, g), g, self.label, a)

