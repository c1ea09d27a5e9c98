"""Parameter-file loading and bundled defaults.

Params JSON schema (same short keys as the moments file):

    {"lambda": 2.1, "delta": 17.8, "H": 40, "phi": 0.9, "Pi": 4623.0}

``lambda`` is the marginal value of public funds, ``delta`` the shifting-cost
parameter, ``H`` the haven count, ``phi`` the coverage rate and ``Pi``
aggregate profits in billion USD. The real-response variant additionally
needs ``Pi_b`` (baseline profits) and accepts ``profit_response``
(``inverse`` | ``linear`` | ``none``). Validation errors name the field.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import DomainError
from .extensions import RealResponseParams
from .model import ModelParams

__all__ = [
    "load_params_file",
    "bundled_path",
    "DEFAULT_PARAMS_FILE",
    "DEFAULT_REAL_RESPONSE_PARAMS_FILE",
    "DEFAULT_MOMENTS_FILE",
]

DEFAULT_PARAMS_FILE = "params_published.json"
DEFAULT_REAL_RESPONSE_PARAMS_FILE = "params_published_real_response.json"
DEFAULT_MOMENTS_FILE = "moments_default.json"

_NUMERIC = {
    "lambda": "marginal value of public funds, > 1",
    "delta": "profit-shifting cost, in (0, 3H/2)",
    "H": "haven count, positive integer",
    "phi": "coverage rate in (0, 1]",
    "Pi": "aggregate profits, billion USD",
}


def bundled_path(name: str) -> Path:
    """Filesystem path of a data file shipped with the package."""
    return Path(resources.files("gmtcomp.data").joinpath(name))


def load_params_file(path, variant: str = "baseline"):
    """Read a params JSON file into a parameter object for ``variant``."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise DomainError(f"{path}: expected a JSON object at top level")

    values = {}
    for field, desc in _NUMERIC.items():
        if field not in raw:
            raise DomainError(f"{path}: missing required field '{field}' ({desc})")
        v = raw[field]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise DomainError(f"{path}: field '{field}' must be a number ({desc})")
        values[field] = v
    allowed = set(_NUMERIC) | {"Pi_b", "profit_response"}
    unknown = set(raw) - allowed
    if unknown:
        raise DomainError(f"{path}: unknown field(s) {sorted(unknown)}")

    try:
        if variant == "real_response":
            if "Pi_b" not in raw:
                raise DomainError(
                    f"{path}: the real-response variant needs field 'Pi_b' "
                    "(baseline profits, billion USD)")
            return RealResponseParams(
                mvpf=float(values["lambda"]),
                shifting_cost=float(values["delta"]),
                havens=int(values["H"]),
                coverage=float(values["phi"]),
                baseline_profits=float(raw["Pi_b"]),
                profit_response=raw.get("profit_response", "inverse"),
            )
        return ModelParams(
            mvpf=float(values["lambda"]),
            shifting_cost=float(values["delta"]),
            havens=int(values["H"]),
            coverage=float(values["phi"]),
            total_profits=float(values["Pi"]),
        )
    except DomainError as exc:
        raise DomainError(f"{path}: {exc}") from exc
