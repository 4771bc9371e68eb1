"""Test package."""

import glob
import logging
import os
from functools import lru_cache

from soliton_forge.config import ForgeConfig
from soliton_forge.model import PsiProfile, SolitonProfile
from soliton_forge.psi import extract_psi
from soliton_forge.solver import solve_bryant

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def bryant() -> SolitonProfile:
    """Default solve, shared by every test module."""
    return solve_bryant(ForgeConfig().solver_config())


@lru_cache(maxsize=None)
def bryant_psi() -> PsiProfile:
    """psi of the default solve on the default s grid."""
    config = ForgeConfig()
    return extract_psi(bryant(), config.s_grid(), rel_tol=config.rel_tol)


def cleanup_output(output_path):
    """Delete files we wrote."""
    for pattern in ['*.csv', '*.json', 'plots/*.csv']:
        for path in glob.glob(f"{output_path}/{pattern}"):
            os.remove(path)
            logger.debug(f"Removed {path}")
