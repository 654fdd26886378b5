"""
Check reports.

Report-style operations never raise for a failed property. They collect
``CheckRecord`` events into a ``ValidationReport`` that callers inspect or
serialize.
"""

import json
import logging
from dataclasses import dataclass, field, asdict
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


@dataclass
class CheckRecord:
    """One verified property"""
    name: str
    passed: bool
    value: Optional[float] = None
    threshold: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), default=str, sort_keys=True)


class ValidationReport:
    def __init__(self, name: str = 'report'):
        self.name = name
        self.errors: List[str] = []
        self.warnings: List[str] = []
        self.info: List[str] = []
        self.checks: List[CheckRecord] = []

    def add_error(self, msg: str):
        self.errors.append(msg)

    def add_warning(self, msg: str):
        self.warnings.append(msg)

    def add_info(self, msg: str):
        self.info.append(msg)

    def add_check(
        self,
        name: str,
        passed: bool,
        value: Optional[float] = None,
        threshold: Optional[float] = None,
        **details: Any,
    ) -> bool:
        record = CheckRecord(
            name=name,
            passed=bool(passed),
            value=None if value is None else float(value),
            threshold=None if threshold is None else float(threshold),
            details=details,
        )
        self.checks.append(record)
        if record.passed:
            logger.debug(f"✅ {self.name}: {name} (value={value})")
        else:
            msg = f"{name} failed"
            if value is not None:
                msg += f": value={value:.6g}"
            if threshold is not None:
                msg += f", threshold={threshold:.3g}"
            self.add_error(msg)
            logger.warning(f"❌ {self.name}: {msg}")
        return record.passed

    def check(self, name: str) -> CheckRecord:
        for record in self.checks:
            if record.name == name:
                return record
        raise KeyError(name)

    def merge(self, other: 'ValidationReport') -> 'ValidationReport':
        prefix = f"{other.name}."
        self.errors.extend(prefix + msg for msg in other.errors)
        self.warnings.extend(prefix + msg for msg in other.warnings)
        self.info.extend(prefix + msg for msg in other.info)
        for record in other.checks:
            self.checks.append(CheckRecord(
                name=prefix + record.name,
                passed=record.passed,
                value=record.value,
                threshold=record.threshold,
                details=dict(record.details),
            ))
        return self

    def is_valid(self) -> bool:
        return len(self.errors) == 0

    def has_warnings(self) -> bool:
        return len(self.warnings) > 0

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'valid': self.is_valid(),
            'errors': list(self.errors),
            'warnings': list(self.warnings),
            'info': list(self.info),
            'checks': [record.to_dict() for record in self.checks],
        }
