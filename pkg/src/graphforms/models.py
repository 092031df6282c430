"""Data models for graphforms: run configuration and result records."""

from dataclasses import dataclass, field
from enum import Enum

from .errors import UsageError

H_REQUIRED = 6
H_FLAGGED = 7


class Sampler(str, Enum):
    """Monte Carlo sampler."""

    UNIFORM = "uniform"
    HEPP = "hepp"


class OutputFormat(str, Enum):
    """Report output format."""

    JSON = "json"
    TABLE = "table"


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run."""

    command: str
    graph_source: str | None = None
    spec: tuple[int, ...] = ()
    sampler: Sampler = Sampler.HEPP
    samples: int = 100_000
    seed: int = 0
    workers: int = 1
    h_max: int = H_REQUIRED
    e_max: int | None = None
    allow_h7: bool = False
    cache_dir: str | None = None
    output_format: OutputFormat = OutputFormat.TABLE

    def validate(self) -> None:
        """Reject inconsistent settings.

        Raises:
            UsageError: On the first inconsistency found.
        """
        if self.samples < 0:
            raise UsageError(f"samples must be nonnegative, got {self.samples}")
        if self.workers < 1:
            raise UsageError(f"workers must be at least 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise UsageError(f"seed must fit in 64 bits, got {self.seed}")
        if self.h_max < 1:
            raise UsageError(f"h_max must be at least 1, got {self.h_max}")
        if self.h_max > H_FLAGGED or (self.h_max > H_REQUIRED and not self.allow_h7):
            raise UsageError(
                f"h_max={self.h_max} is beyond the budget; loop order 7 needs --allow-h7"
            )
        if self.e_max is not None and self.e_max < 0:
            raise UsageError(f"e_max must be nonnegative, got {self.e_max}")
        if any(k < 1 for k in self.spec) or any(
            a >= b for a, b in zip(self.spec, self.spec[1:], strict=False)
        ):
            raise UsageError(f"spec must be strictly increasing and >= 1, got {list(self.spec)}")

    def to_dict(self) -> dict:
        """Convert config to dictionary."""
        return {
            "command": self.command,
            "graph_source": self.graph_source,
            "spec": list(self.spec),
            "sampler": self.sampler.value,
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
            "h_max": self.h_max,
            "e_max": self.e_max,
            "allow_h7": self.allow_h7,
            "cache_dir": self.cache_dir,
            "output_format": self.output_format.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        """Create config from dictionary."""
        return cls(
            command=data["command"],
            graph_source=data.get("graph_source"),
            spec=tuple(data.get("spec", ())),
            sampler=Sampler(data.get("sampler", Sampler.HEPP.value)),
            samples=data.get("samples", 100_000),
            seed=data.get("seed", 0),
            workers=data.get("workers", 1),
            h_max=data.get("h_max", H_REQUIRED),
            e_max=data.get("e_max"),
            allow_h7=data.get("allow_h7", False),
            cache_dir=data.get("cache_dir"),
            output_format=OutputFormat(data.get("output_format", OutputFormat.TABLE.value)),
        )


@dataclass
class CheckResult:
    """Outcome of one property check over randomized instances."""

    name: str
    instances: int
    failures: int = 0
    detail: str = ""
    informational: bool = False

    @property
    def passed(self) -> bool:
        return self.informational or self.failures == 0

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "instances": self.instances,
            "failures": self.failures,
            "detail": self.detail,
            "informational": self.informational,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CheckResult":
        return cls(
            name=data["name"],
            instances=data["instances"],
            failures=data.get("failures", 0),
            detail=data.get("detail", ""),
            informational=data.get("informational", False),
        )


@dataclass
class IntegralEstimate:
    """Monte Carlo estimate of a canonical integral."""

    value: float
    std_error: float
    samples: int
    sampler: Sampler
    seed: int
    resampled: int = 0
    exact_zero: bool = False
    abs_mean: float = 0.0

    @classmethod
    def zero(cls, sampler: Sampler, seed: int) -> "IntegralEstimate":
        """An integral known to vanish without sampling."""
        return cls(0.0, 0.0, 0, sampler, seed, exact_zero=True)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "samples": self.samples,
            "sampler": self.sampler.value,
            "seed": self.seed,
            "resampled": self.resampled,
            "exact_zero": self.exact_zero,
            "abs_mean": self.abs_mean,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IntegralEstimate":
        return cls(
            value=float(data["value"]),
            std_error=float(data["std_error"]),
            samples=int(data["samples"]),
            sampler=Sampler(data["sampler"]),
            seed=int(data["seed"]),
            resampled=int(data.get("resampled", 0)),
            exact_zero=bool(data.get("exact_zero", False)),
            abs_mean=float(data.get("abs_mean", 0.0)),
        )


@dataclass
class CheckOutcome:
    """Comparison of an estimate with a reference value."""

    passed: bool
    sigmas: float
    relative_error: float
    target: float

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "sigmas": self.sigmas,
            "relative_error": self.relative_error,
            "target": self.target,
        }


@dataclass
class HomologyReport:
    """Homology dimensions per (degree n, loop order h) and stratum sizes per (h, e)."""

    h_max: int
    dimensions: dict[tuple[int, int], int] = field(default_factory=dict)
    stratum_sizes: dict[tuple[int, int], int] = field(default_factory=dict)

    def dimension(self, h: int, n: int) -> int:
        return self.dimensions.get((n, h), 0)

    def rows(self) -> list[list[int]]:
        """Grid with rows n = 0..h_max-2 and columns h = 1..h_max."""
        return [
            [self.dimension(h, n) for h in range(1, self.h_max + 1)]
            for n in range(max(self.h_max - 1, 1))
        ]

    def to_dict(self) -> dict:
        return {
            "h_max": self.h_max,
            "dimensions": [
                {"n": n, "h": h, "dim": d} for (n, h), d in sorted(self.dimensions.items())
            ],
            "strata": [
                {"h": h, "e": e, "size": s} for (h, e), s in sorted(self.stratum_sizes.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "HomologyReport":
        return cls(
            h_max=data["h_max"],
            dimensions={(r["n"], r["h"]): r["dim"] for r in data.get("dimensions", [])},
            stratum_sizes={(r["h"], r["e"]): r["size"] for r in data.get("strata", [])},
        )


@dataclass
class StokesTerm:
    """One signed boundary contribution."""

    label: str
    sign: int
    estimate: IntegralEstimate
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "sign": self.sign,
            "reason": self.reason,
            **self.estimate.to_dict(),
        }


@dataclass
class StokesReport:
    """Signed sum of the boundary integrals of one graph."""

    graph: str
    spec: str
    value: float
    std_error: float
    terms: list[StokesTerm] = field(default_factory=list)

    @property
    def exact_zero(self) -> bool:
        return all(t.estimate.exact_zero for t in self.terms)

    def to_dict(self) -> dict:
        return {
            "graph": self.graph,
            "spec": self.spec,
            "value": self.value,
            "std_error": self.std_error,
            "exact_zero": self.exact_zero,
            "terms": [t.to_dict() for t in self.terms if not t.estimate.exact_zero],
        }
