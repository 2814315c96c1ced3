"""Python front end to the bnls library.

Fields are numpy complex arrays of shape (M,) * dim sampled on the periodic box
[-L, L)^dim; ``half_width`` is L.
"""

import json as _json

from ._bnls import (  # noqa: F401
    DegenerateFixedPointError,
    DomainError,
    Error,
    FormatError,
    IoError,
    Params,
    PoisonedStateError,
    PreconditionError,
    RegimeError,
    StructuralError,
    ValidationError,
    evolve,
    functionals,
    ground_state,
    presets,
    read_snapshot,
    write_snapshot,
)
from ._bnls import _instability_json

__version__ = "0.1.0"


def instability(preset, points=None, half_width=None, t_end=None, lam=None):
    """Runs a named instability experiment and returns its report as a dict."""
    return _json.loads(_instability_json(preset, points, half_width, t_end, lam))
