"""
Shared dependencies of the command handlers: seed and worker resolution,
logging setup and the text templates.
"""
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from distinguisher.errors import ParameterSpaceError
from distinguisher.schemas import format_rational

logger = logging.getLogger(__name__)

SEED_ENV = "DISTINGUISHER_SEED"
TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def default_seed() -> int:
    """Seed used when --seed is omitted: DISTINGUISHER_SEED, else 0."""
    raw = os.getenv(SEED_ENV)
    if raw is None or not raw.strip():
        return 0
    try:
        return int(raw.strip())
    except ValueError:
        logger.warning("ignoring unparsable %s=%r, using seed 0", SEED_ENV, raw)
        return 0


def resolve_seed(seed: Optional[int]) -> int:
    return default_seed() if seed is None else seed


def resolve_workers(workers: int) -> int:
    if workers < 1:
        raise ParameterSpaceError("--workers must be at least 1")
    return workers


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _rational(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


def _params(value: Dict[str, Any]) -> str:
    return " ".join(f"{k}={v}" for k, v in value.items())


templates = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    trim_blocks=True,
    lstrip_blocks=True,
    undefined=StrictUndefined,
)
templates.filters["rational"] = _rational
templates.filters["params"] = _params


def render(name: str, **context: Any) -> str:
    return templates.get_template(name).render(**context).rstrip("\n")
