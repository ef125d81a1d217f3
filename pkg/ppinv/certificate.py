from typing import Any, Dict, List, Optional

import json
import logging
from dataclasses import dataclass, field
from enum import Enum

logger = logging.getLogger(__name__)


class Verdict(Enum):
    PERMUTATION = "PERMUTATION"
    """The polynomial induces a bijection of the field onto itself."""
    NOT_PERMUTATION = "NOT"
    """At least two field elements share an image."""

    @classmethod
    def of(cls, bijective: bool) -> "Verdict":
        return cls.PERMUTATION if bijective else cls.NOT_PERMUTATION


def render(value):
    """Plain JSON form of certificate values: elements become coefficient lists."""
    if value is None or isinstance(value, (bool, int, str, float)):
        return value
    if isinstance(value, Enum):
        return value.value
    if hasattr(value, "coeffs") and hasattr(value, "index"):
        return list(value.coeffs)
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    return str(value)


@dataclass
class PermutationCertificate:
    """
    Verdict of one family instance: the criterion's inputs and derived quantities,
    the oracle's independent verdict and the result of validating the closed-form
    inverse.
    """

    family: str
    field: str
    parameters: Dict[str, Any]
    criterion: Dict[str, Any] = field(default_factory=dict)
    derived: Dict[str, Any] = field(default_factory=dict)
    verdict: Optional[Verdict] = None
    oracle: Optional[Verdict] = None
    inverse_valid: Optional[bool] = None
    inverse: Dict[str, Any] = field(default_factory=dict)
    identities: Dict[str, bool] = field(default_factory=dict)
    modulus: Optional[List[int]] = None
    generator: Optional[List[int]] = None
    wall_time: Optional[float] = None

    @classmethod
    def for_field(cls, ctx, **kwargs) -> "PermutationCertificate":
        """A certificate over ctx, recording its modulus and generator for audit."""
        return cls(
            field=ctx.spec,
            modulus=list(ctx.modulus),
            generator=list(ctx.g.coeffs),
            **kwargs,
        )

    @property
    def consistent(self) -> bool:
        if self.verdict != self.oracle:
            return False
        if self.inverse_valid is False:
            return False
        return all(self.identities.values())

    def to_dict(self, with_timing=False) -> Dict[str, Any]:
        d = {
            "family": self.family,
            "field": self.field,
            "modulus": self.modulus,
            "generator": self.generator,
            "parameters": render(self.parameters),
            "criterion": render(self.criterion),
            "derived": render(self.derived),
            "verdict": render(self.verdict),
            "oracle": render(self.oracle),
            "inverse_valid": self.inverse_valid,
            "inverse": render(self.inverse),
            "identities": dict(sorted(self.identities.items())),
        }
        if with_timing:
            d["wall_time"] = self.wall_time
        return d

    def check(self):
        if self.verdict != self.oracle:
            logger.warning(
                "%s over %s: criterion says %s, oracle says %s",
                self.family,
                self.field,
                self.verdict,
                self.oracle,
            )
            raise VerificationException(
                dict(self.to_dict(), reason="criterion and oracle disagree")
            )
        if self.inverse_valid is False:
            raise VerificationException(
                dict(self.to_dict(), reason="closed-form inverse failed validation")
            )
        failed = sorted(name for name, holds in self.identities.items() if not holds)
        if failed:
            logger.warning(
                "%s over %s: identities failed: %s", self.family, self.field, failed
            )
            raise VerificationException(
                dict(self.to_dict(), reason="identity failed: " + ", ".join(failed))
            )
        return self


def dumps(obj) -> str:
    return json.dumps(obj, indent=4, sort_keys=True)


class VerificationException(Exception):
    """
    Raised when a closed form disagrees with the brute-force oracle or an internal
    identity fails. ``certificate`` holds every intermediate quantity of the failed
    instance.
    """

    def __init__(self, certificate):
        reason = certificate.get("reason") if isinstance(certificate, dict) else None
        super().__init__(reason or "verification failed")
        self.certificate = certificate
