"""Palette completion and generation toolkit.

Thin Python layer over the native ``_colorgpt`` module. Colors are ``#rrggbb``
strings except where a function says otherwise.
"""

import json
import os
from pathlib import Path

from . import _colorgpt
from ._colorgpt import (
    ColorNamer,
    ConfigError,
    Error,
    IoError,
    ParseError,
    ProviderError,
    ValidationError,
    bin_accuracy,
    delta_e,
    distribution,
    extract_palette,
    hex_to_rgb,
    lab_to_rgb,
    palette_diversity,
    palette_similarity,
    rgb_to_hex,
    rgb_to_lab,
    set_log_level,
)

__all__ = [
    "ColorNamer", "ConfigError", "Error", "IoError", "ParseError", "ProviderError", "Service",
    "ValidationError", "bin_accuracy", "default_dictionary", "delta_e", "distribution",
    "extract_json", "extract_palette", "hex_to_rgb", "lab_to_rgb", "mask_document",
    "normalize_document", "palette_diversity", "palette_similarity", "rgb_to_hex", "rgb_to_lab",
    "run_benchmark", "set_log_level",
]


def default_dictionary():
    """Path of the bundled xkcd color list (``COLORGPT_DICT`` overrides it)."""
    if os.environ.get("COLORGPT_DICT"):
        return Path(os.environ["COLORGPT_DICT"])
    here = Path(__file__).resolve().parent
    for candidate in (here / "data" / "xkcd_rgb.txt", here.parents[1] / "data" / "xkcd_rgb.txt"):
        if candidate.exists():
            return candidate
    raise FileNotFoundError("xkcd_rgb.txt not found; set COLORGPT_DICT")


def normalize_document(document):
    """Canonical JSON text of a document given as text or a dict."""
    text = document if isinstance(document, str) else json.dumps(document)
    return json.loads(_colorgpt.normalize_document(text))


def mask_document(document, k, seed=0):
    """Returns (masked document, mask record) as dicts."""
    text = document if isinstance(document, str) else json.dumps(document)
    masked, record = _colorgpt.mask_document(text, k, seed)
    return json.loads(masked), json.loads(record)


def extract_json(reply):
    """First JSON object or array in an LLM reply, or None."""
    text = _colorgpt.extract_json(reply)
    return None if text is None else json.loads(text)


def run_benchmark(config, out=None):
    """Runs the benchmark described by a config file and returns the report dict."""
    return json.loads(_colorgpt.run_benchmark(str(config), "" if out is None else str(out)))


class Service:
    """In-process recommendation service; each call returns (status, body dict)."""

    def __init__(self, config):
        self._impl = _colorgpt.Service(str(config))

    def complete(self, document, **overrides):
        body = {"document": document}
        if overrides:
            body["overrides"] = overrides
        status, text = self._impl.complete(json.dumps(body))
        return status, json.loads(text)

    def generate(self, text, **overrides):
        body = {"text": text}
        if overrides:
            body["overrides"] = overrides
        status, reply = self._impl.generate(json.dumps(body))
        return status, json.loads(reply)

    def health(self):
        status, text = self._impl.health()
        return status, json.loads(text)
