"""Shared result container for the validation scripts."""

from typing import List


class ValidationResult:
    """Container for validation results."""

    def __init__(self):
        self.passed = 0
        self.failed = 0
        self.errors: List[str] = []
        self.details: List[str] = []

    def add_success(self, test_name: str):
        """Record a successful check."""
        self.passed += 1
        self.details.append(f"✅ {test_name}")

    def add_failure(self, test_name: str, error: str):
        """Record a failed check."""
        self.failed += 1
        self.errors.append(f"❌ {test_name}: {error}")
        self.details.append(f"❌ {test_name}")

    def check(self, test_name: str, condition: bool, error: str = ""):
        if condition:
            self.add_success(test_name)
        else:
            self.add_failure(test_name, error or "condition not met")

    def merge(self, other: "ValidationResult"):
        self.passed += other.passed
        self.failed += other.failed
        self.errors.extend(other.errors)
        self.details.extend(other.details)

    @property
    def total(self) -> int:
        """Total number of checks."""
        return self.passed + self.failed

    @property
    def success_rate(self) -> float:
        """Success rate as percentage."""
        if self.total == 0:
            return 0.0
        return (self.passed / self.total) * 100

    def print_summary(self, title: str, duration: float):
        print("\n" + "=" * 60)
        print(f"📊 {title}")
        print("=" * 60)
        for line in self.details:
            print(f"   {line}")
        for error in self.errors:
            print(f"   {error}")
        print(f"Total Checks: {self.total}")
        print(f"Passed: {self.passed}")
        print(f"Failed: {self.failed}")
        print(f"Success Rate: {self.success_rate:.1f}%")
        print(f"Duration: {duration:.2f} seconds")
