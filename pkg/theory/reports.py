"""
Reports produced by the spectral checks.

Every claim is reduced to one inequality lhs <= rhs. A report passes when
lhs <= rhs + 1e-9 * max(1, |rhs|). Inputs that make a claim vacuous are
reported with status "degenerate" and count as passed.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np

from core.utils import VerificationFailed, ensure_parent_dir

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-9

PASSED = "passed"
FAILED = "failed"
DEGENERATE = "degenerate"


class ClaimId(str, Enum):
    RANK_LIFT_IC = "rank_lift_ic"
    GERSHGORIN_DIRICHLET = "gershgorin_dirichlet"
    LDE_RANK_LIFT = "lde_rank_lift"
    INDEFINITENESS_LDE = "indefiniteness_lde"
    AMPLITUDE_SCALING = "amplitude_scaling_bounds"
    CONDITION_NUMBER = "condition_number"
    GERSHGORIN_DISCS_IC = "gershgorin_discs_ic"
    PARSEVAL = "parseval"


def within_tolerance(lhs: float, rhs: float) -> bool:
    return bool(lhs <= rhs + RELATIVE_SLACK * max(1.0, abs(rhs)))


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class SpectralBoundReport:
    claim_id: ClaimId
    lhs: float
    rhs: float
    status: str
    n: int
    details: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Dict[str, Any]] = None
    seed: Optional[int] = None
    trial: Optional[int] = None

    @classmethod
    def compare(
        cls,
        claim_id: ClaimId,
        lhs: float,
        rhs: float,
        n: int,
        inputs: Dict[str, Any],
        details: Optional[Dict[str, Any]] = None,
        holds: bool = True,
    ) -> "SpectralBoundReport":
        """
        Build a report for lhs <= rhs.

        Args:
            inputs: Arrays the check was run on; kept as the witness on failure
            holds: Extra side condition that must also be true to pass
        """
        ok = holds and within_tolerance(lhs, rhs)
        return cls(
            claim_id=claim_id,
            lhs=float(lhs),
            rhs=float(rhs),
            status=PASSED if ok else FAILED,
            n=n,
            details=_jsonable(details or {}),
            witness=None if ok else _jsonable(inputs),
        )

    @classmethod
    def degenerate(cls, claim_id: ClaimId, n: int, reason: str) -> "SpectralBoundReport":
        return cls(
            claim_id=claim_id,
            lhs=0.0,
            rhs=0.0,
            status=DEGENERATE,
            n=n,
            details={"reason": reason},
        )

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.status != FAILED

    def with_origin(self, seed: int, trial: int) -> "SpectralBoundReport":
        self.seed = seed
        self.trial = trial
        if self.witness is not None:
            self.witness = {"seed": seed, "trial": trial, **self.witness}
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "claim_id": self.claim_id.value,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "passed": self.passed,
            "status": self.status,
            "n": self.n,
            "seed": self.seed,
            "trial": self.trial,
            "details": self.details,
            "witness": self.witness,
        }


def summarize(reports: Iterable[SpectralBoundReport]) -> Dict[str, Dict[str, int]]:
    """Counts per claim and status."""
    counts: Dict[str, Counter] = {}
    for report in reports:
        counts.setdefault(report.claim_id.value, Counter())[report.status] += 1
    return {claim: dict(sorted(c.items())) for claim, c in sorted(counts.items())}


def failures(reports: Iterable[SpectralBoundReport]) -> List[SpectralBoundReport]:
    return [r for r in reports if not r.passed]


def require_all_passed(reports: List[SpectralBoundReport]) -> None:
    failed = failures(reports)
    if failed:
        first = failed[0]
        raise VerificationFailed(
            f"{len(failed)} of {len(reports)} checks failed; first: {first.claim_id.value} "
            f"(n={first.n}, trial={first.trial}, lhs={first.lhs:.6e}, rhs={first.rhs:.6e})"
        )


def write_reports_json(
    path: Union[str, Path],
    reports: List[SpectralBoundReport],
    stamp: Optional[Dict[str, Any]] = None,
) -> Path:
    path = ensure_parent_dir(path)
    payload = dict(stamp or {})
    payload["summary"] = summarize(reports)
    payload["all_passed"] = not failures(reports)
    payload["reports"] = [r.to_dict() for r in reports]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"Wrote {len(reports)} check reports to {path}")
    return path
