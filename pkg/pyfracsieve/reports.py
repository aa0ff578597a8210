# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Serialisation of the results and of the run manifests.

JSON documents have the layout ``{"command", "manifest", "result"}`` and are
described by the schemas shipped in ``pyfracsieve/schemas``. Floats are
written with their shortest round-tripping representation and rationals as
``"a/b"`` strings.

"""

import csv
import dataclasses
import json
import logging
import math
import os
from datetime import datetime, timezone
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import PyFracSieveError

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one command."""

    command: str
    parameters: dict
    tool_version: str
    table_build_params: dict
    quad_settings: dict
    seed: int | None
    timestamp: str


def tool_version():
    """Installed version of the package."""
    try:
        from .version import __version__
    except ImportError:  # pragma: no cover
        __version__ = "unknown"
    return __version__


def make_manifest(command, parameters, tables=None, quad_settings=None, seed=None):
    """Build the manifest of a run.

    Parameters
    ----------
    command : str
        Name of the sub-command.
    parameters : dict
        Parameters as actually used (rationals included).
    tables : SieveTables, optional
        Tables the run relied on.
    quad_settings : QuadSpec, optional
        Quadrature settings the run relied on.
    seed : int, optional
        Seed of the randomised computations.

    """
    table_params = {}
    if tables is not None:
        table_params = {
            "grid_end": tables.grid_end,
            "step": tables.step,
            "tolerance": tables.tolerance,
            "c2": tables.constants.c2,
            "c2_error": tables.constants.c2_error,
        }
    quad = {}
    if quad_settings is not None:
        quad = dataclasses.asdict(quad_settings)
        quad.pop("threads", None)
    return RunManifest(
        command,
        to_jsonable(parameters),
        tool_version(),
        table_params,
        quad,
        seed,
        datetime.now(timezone.utc).isoformat(),
    )


def to_jsonable(obj):
    """Convert results to JSON compatible builtins.

    Dataclasses and named tuples become objects (a trailing underscore being
    dropped from field names), rationals strings, tuple keys "a:b" strings
    and non finite floats null.

    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name.rstrip("_"): to_jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, tuple) and hasattr(obj, "_asdict"):
        return to_jsonable(obj._asdict())
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else None
    return obj


def _key(key):
    if isinstance(key, tuple):
        return ":".join(str(k) for k in key)
    return str(key)


def document(command, manifest, result):
    """Assemble the JSON document of a command."""
    return {
        "command": command,
        "manifest": to_jsonable(manifest),
        "result": to_jsonable(result),
    }


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False)


def write_json(path, doc):
    """Write a JSON document to path."""
    logger.debug("Writing '{}'".format(path))
    with open(path, "w", encoding="utf-8") as fp:
        fp.write(dumps(doc))
        fp.write("\n")


def write_csv(path, rows):
    """Append flat rows to a CSV file, writing the header for a new file.

    Nested values are stored as compact JSON.

    """
    rows = [_flatten(to_jsonable(row)) for row in rows]
    if not rows:
        return
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    logger.debug("Writing {} rows to '{}'".format(len(rows), path))
    with open(path, "a", newline="", encoding="utf-8") as fp:
        writer = csv.DictWriter(fp, fieldnames=list(rows[0]))
        if new:
            writer.writeheader()
        writer.writerows(rows)


def _flatten(row):
    return {
        k: json.dumps(v, separators=(",", ":")) if isinstance(v, (dict, list)) else v
        for k, v in row.items()
    }


def load_schema(command):
    """Return the JSON schema describing the output of a command."""
    name = "{}.schema.json".format(command)
    try:
        schemas = resources.files("pyfracsieve").joinpath("schemas")
        text = schemas.joinpath(name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise PyFracSieveError("No schema for the command {}".format(command))
    return json.loads(text)
