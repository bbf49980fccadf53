"""Cavity-ancilla polariton readout simulator.

Frequencies and rates are angular (rad/s); times are in seconds.
"""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import MapArtifact, __version__  # noqa: F401


def artifact_metadata(artifact):
    """Metadata of a map artifact as a dict."""
    return _json.loads(artifact.to_json())["metadata"]
