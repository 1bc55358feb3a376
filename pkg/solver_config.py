from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING
import logging
import os

from dotenv import load_dotenv

from errors import ConfigError
from inner import InnerMethod
from linalg import MethodKind

if TYPE_CHECKING:
    from omega import OmegaSearchSpec

load_dotenv()

DEFAULT_EPS1 = float(os.environ.get('NGSOR_EPS1', '1e-6'))
DEFAULT_EPS2 = float(os.environ.get('NGSOR_EPS2', '1e-8'))
DEFAULT_MAX_OUTER = int(os.environ.get('NGSOR_MAX_OUTER', '200'))
DEFAULT_MAX_INNER = int(os.environ.get('NGSOR_MAX_INNER', '10000'))
DEFAULT_SEED = int(os.environ.get('NGSOR_SEED', '0'))
LOG_LEVEL = os.environ.get('NGSOR_LOG_LEVEL', 'WARNING')

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class OuterCriterion(str, Enum):
    GRADIENT_NORM = "grad"
    FUNCTION_VALUE = "fval"


@dataclass(frozen=True)
class SolverConfig:
    method: InnerMethod = InnerMethod(MethodKind.GSOR, 1.0)
    m: int = 0
    eps1: float = DEFAULT_EPS1
    eps2: float = DEFAULT_EPS2
    # when set, omega-tuner picks omega before the outer loop and method.omega is ignored
    omega_auto: bool = False
    omega_search: OmegaSearchSpec | None = None
    max_outer: int = DEFAULT_MAX_OUTER
    max_inner: int = DEFAULT_MAX_INNER
    outer_criterion: OuterCriterion = OuterCriterion.GRADIENT_NORM
    step_norm: float = 2
    warm_start: bool = False
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        object.__setattr__(self, 'outer_criterion', OuterCriterion(self.outer_criterion))
        if self.eps1 <= 0 or self.eps2 <= 0:
            raise ConfigError(f"tolerances must be positive (eps1={self.eps1}, eps2={self.eps2})")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ConfigError("max_outer and max_inner must be at least 1")
        if self.m < 0:
            raise ConfigError(f"bandwidth must be non-negative, got {self.m}")
        if self.step_norm not in (1, 2, float('inf')):
            raise ConfigError(f"unsupported step norm {self.step_norm}")
        if self.method.kind is MethodKind.GSOR and not self.omega_auto \
                and not self.method.omega_in_default_range and self.method.omega != 1.0:
            logging.getLogger(__name__).warning(
                "omega=%.3f lies outside the usual (1, 2] range", self.method.omega)


def init_logging(level: str | None = None):
    logging.basicConfig(level=(level or LOG_LEVEL).upper(), format=LOG_FORMAT)
