import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..errors import ConfigError

logger = logging.getLogger(__name__)


class Suite(Enum):
    """
    Named verification suites.
    Each suite runs the invariant checks of one part of the engine.
    """
    SYMMETRY = "symmetry"          # symmetry families, Lie point fields, brackets
    COSYMMETRY = "cosymmetry"      # cosymmetry families
    CONSERVATION = "conservation"  # currents, characteristics, physical laws
    HAMILTONIAN = "hamiltonian"    # operator family, metric, densities, Casimirs
    RECURSION = "recursion"        # action tables, decomposition, R4
    SOLUTIONS = "solutions"        # exact families on grids
    ALL = "all"                    # every suite above

    def expand(self) -> List["Suite"]:
        if self == Suite.ALL:
            return [s for s in Suite if s != Suite.ALL]
        return [self]


class Extra(Enum):
    """Optional checks enabled through the include list."""
    R4 = "r4"                    # numeric R4 on a sampled regular solution
    WORDS2 = "words2"            # action tables for words of length two
    CONVERGENCE = "convergence"  # grid refinement studies


# Parameters that have to be given together for a suite to use them
_PARAMETER_GROUPS = {
    Suite.HAMILTONIAN: {"theta", "xi", "c0"},
}

_R4_CONVENTIONS = {"printed", "half_b", "double_c", "neg_y"}


@dataclass
class SuiteConfig:
    """
    Settings of one verification run.
    Values come from a JSON file and command-line overrides.
    """
    suite: Suite = Suite.ALL
    seed: int = 0
    max_order: int = 5  # operator word budget and family order cap
    numeric_points: int = 20
    numeric_tolerance: float = 1e-9
    workers: int = 1
    theta: Optional[str] = None
    xi: Optional[str] = None
    c0: Optional[str] = None
    include: List[str] = field(default_factory=list)
    grid_sizes: List[int] = field(default_factory=lambda: [51, 101, 201])
    r4_threshold: float = 5e-2
    r4_convention: str = "half_b"
    quadrature_tolerance: float = 1e-2
    db_path: Optional[str] = None

    def __post_init__(self):
        """Validates the configuration after initialization."""
        if isinstance(self.suite, str):
            try:
                self.suite = Suite(self.suite)
            except ValueError:
                raise ConfigError(f"Unknown suite '{self.suite}'; choose from "
                                  f"{', '.join(s.value for s in Suite)}")
        if self.max_order < 1:
            raise ConfigError("max_order must be at least 1")
        if self.numeric_points < 1:
            raise ConfigError("numeric_points must be at least 1")
        if not 0 < self.numeric_tolerance < 1:
            raise ConfigError("numeric_tolerance must lie in (0, 1)")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if len(self.grid_sizes) < 2 or any(n < 5 for n in self.grid_sizes):
            raise ConfigError("grid_sizes needs at least two sizes of 5 or more nodes")
        if self.r4_threshold <= 0 or self.quadrature_tolerance <= 0:
            raise ConfigError("Thresholds must be positive")
        if self.r4_convention not in _R4_CONVENTIONS:
            raise ConfigError(f"Unknown R4 convention '{self.r4_convention}'")
        unknown = set(self.include) - {e.value for e in Extra}
        if unknown:
            raise ConfigError(f"Unknown include entries: {', '.join(sorted(unknown))}")
        self._validate_parameters()

    def _validate_parameters(self):
        """Parameter groups are either complete or absent."""
        for suite in self.suite.expand():
            group = _PARAMETER_GROUPS.get(suite, set())
            given = {name for name in group if getattr(self, name) is not None}
            if given and given != group:
                raise ConfigError(f"Missing parameters for {suite.value}: "
                                  f"{', '.join(sorted(group - given))}")

    def includes(self, extra: Extra) -> bool:
        return extra.value in self.include

    @property
    def custom_hamiltonian(self) -> bool:
        return self.theta is not None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["suite"] = self.suite.value
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as e:
            raise ConfigError(f"Invalid configuration: {str(e)}")

    @classmethod
    def load(cls, path, overrides: Optional[Dict[str, Any]] = None) -> "SuiteConfig":
        """Read a JSON file and apply non-None overrides on top."""
        data: Dict[str, Any] = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"Cannot read configuration {path}: {str(e)}")
            if not isinstance(data, dict):
                raise ConfigError("The configuration file must hold a JSON object")
        for key, value in (overrides or {}).items():
            if value is not None:
                data[key] = value
        config = cls.from_dict(data)
        logger.debug("Configuration: %s", config.to_dict())
        return config
