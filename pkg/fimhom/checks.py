from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    SKIPPED = "SKIPPED(boundary)"


@dataclass
class CheckResult:
    name: str
    verdict: Verdict
    detail: str = ""
    location: str = ""  # object/coordinate locating a failure
    case: int = 0

    @property
    def failed(self) -> bool:
        return self.verdict is Verdict.FAIL

    def to_dict(self) -> Dict[str, object]:
        return {
            "case": self.case,
            "name": self.name,
            "verdict": self.verdict.value,
            "location": self.location,
            "detail": self.detail,
        }


@dataclass
class CheckReport:
    """Several named results gathered by one check routine."""

    results: List[CheckResult] = field(default_factory=list)

    def add(self, name: str, verdict: Verdict, detail: str = "", location: str = "") -> CheckResult:
        result = CheckResult(name=name, verdict=verdict, detail=detail, location=location)
        self.results.append(result)
        return result

    def passed(self, name: str, detail: str = "") -> CheckResult:
        return self.add(name, Verdict.PASS, detail)

    def failed(self, name: str, detail: str, location: str = "") -> CheckResult:
        return self.add(name, Verdict.FAIL, detail, location)

    def skipped(self, name: str, detail: str = "") -> CheckResult:
        return self.add(name, Verdict.SKIPPED, detail)

    def extend(self, other: "CheckReport") -> None:
        self.results.extend(other.results)

    @property
    def ok(self) -> bool:
        return not any(r.failed for r in self.results)


def from_violations(name: str, violations: List[str], detail: str = "") -> CheckResult:
    """PASS on an empty violation list, else FAIL located at the first violation."""
    if not violations:
        return CheckResult(name, Verdict.PASS, detail)
    extra = f" (+{len(violations) - 1} more)" if len(violations) > 1 else ""
    return CheckResult(name, Verdict.FAIL, violations[0] + extra, violations[0].split(":")[0])


__all__ = ["CheckReport", "CheckResult", "Verdict", "from_violations"]
