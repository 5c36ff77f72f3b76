"""
Reading and writing presentation files.

Schema (JSON, UTF-8)::

    {"field": 3, "m": 1, "bounds": [5],
     "generators": [[0]],
     "relations": [{"object": [1],
                    "terms": [{"gen": 0, "maps": [[]], "coeff": 1}]}]}

``maps[i]`` lists the 1-based images of the injection in coordinate i; its
length is the i-th entry of the generator degree.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List

from .category import Morphism, Obj
from .linalg import is_prime
from .module import FreeElement, Presentation, PresentationError, Term, check_presentation


logger = logging.getLogger(__name__)


class PresentationFileError(ValueError):
    """A malformed presentation document; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise PresentationFileError(path, f"expected an integer, got {value!r}")
    return value


def _list(value: Any, path: str) -> List[Any]:
    if not isinstance(value, list):
        raise PresentationFileError(path, f"expected a list, got {type(value).__name__}")
    return value


def _obj(value: Any, m: int, path: str) -> Obj:
    items = _list(value, path)
    if len(items) != m:
        raise PresentationFileError(path, f"expected {m} coordinates, got {len(items)}")
    out = tuple(_int(x, f"{path}[{k}]") for k, x in enumerate(items))
    if any(x < 0 for x in out):
        raise PresentationFileError(path, f"coordinates must be non-negative, got {list(out)}")
    return out


def _within(n: Obj, bounds: Obj, path: str) -> None:
    if any(x > b for x, b in zip(n, bounds)):
        raise PresentationFileError(path, f"object {list(n)} is out of bounds {list(bounds)}")


def presentation_from_dict(data: Any) -> Presentation:
    """Validate a decoded document and build the Presentation it describes."""
    if not isinstance(data, dict):
        raise PresentationFileError("$", "top level must be an object")
    for key in ("field", "m", "bounds", "generators"):
        if key not in data:
            raise PresentationFileError(key, "missing key")

    p = _int(data["field"], "field")
    if not is_prime(p):
        raise PresentationFileError("field", f"field must be prime, got {p}")
    if p >= 2**31:
        raise PresentationFileError("field", f"field must be < 2^31, got {p}")
    m = _int(data["m"], "m")
    if m < 1:
        raise PresentationFileError("m", f"m must be >= 1, got {m}")
    bounds = _obj(data["bounds"], m, "bounds")

    generators = []
    for g, raw in enumerate(_list(data["generators"], "generators")):
        d = _obj(raw, m, f"generators[{g}]")
        _within(d, bounds, f"generators[{g}]")
        generators.append(d)

    relations = []
    for r, raw in enumerate(_list(data.get("relations", []), "relations")):
        where = f"relations[{r}]"
        if not isinstance(raw, dict):
            raise PresentationFileError(where, "relation must be an object")
        if "object" not in raw:
            raise PresentationFileError(f"{where}.object", "missing key")
        n = _obj(raw["object"], m, f"{where}.object")
        _within(n, bounds, f"{where}.object")
        coeffs: Dict[tuple, int] = {}
        for t, term in enumerate(_list(raw.get("terms", []), f"{where}.terms")):
            tw = f"{where}.terms[{t}]"
            if not isinstance(term, dict):
                raise PresentationFileError(tw, "term must be an object")
            for key in ("gen", "maps", "coeff"):
                if key not in term:
                    raise PresentationFileError(f"{tw}.{key}", "missing key")
            gen = _int(term["gen"], f"{tw}.gen")
            if not 0 <= gen < len(generators):
                raise PresentationFileError(f"{tw}.gen", f"no generator with index {gen}")
            d = generators[gen]
            maps = _list(term["maps"], f"{tw}.maps")
            if len(maps) != m:
                raise PresentationFileError(f"{tw}.maps", f"expected {m} image lists, got {len(maps)}")
            parts = []
            for i, images in enumerate(maps):
                ip = f"{tw}.maps[{i}]"
                images = [_int(x, f"{ip}[{k}]") for k, x in enumerate(_list(images, ip))]
                if len(images) != d[i]:
                    raise PresentationFileError(ip, f"image list has length {len(images)}, generator degree needs {d[i]}")
                if len(set(images)) != len(images):
                    raise PresentationFileError(ip, f"duplicate image in {images}")
                if any(not 1 <= x <= n[i] for x in images):
                    raise PresentationFileError(ip, f"image out of range [1, {n[i]}] in {images}")
                parts.append(tuple(images))
            f = Morphism(d, n, tuple(parts))
            coeff = _int(term["coeff"], f"{tw}.coeff") % p
            coeffs[(gen, f)] = (coeffs.get((gen, f), 0) + coeff) % p
        terms = tuple(Term(gen, f, c) for (gen, f), c in coeffs.items() if c)
        if terms:
            relations.append(FreeElement(n, terms))

    presentation = Presentation(p, m, bounds, tuple(generators), tuple(relations))
    try:
        check_presentation(presentation)
    except PresentationError as e:
        raise PresentationFileError("$", str(e)) from e
    return presentation


def parse_presentation(text: str) -> Presentation:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise PresentationFileError("$", f"not valid JSON: {e.msg} at line {e.lineno} column {e.colno}") from e
    return presentation_from_dict(data)


def load_presentation(path: Path | str) -> Presentation:
    path = Path(path)
    logger.info("Reading presentation from %s", path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise PresentationFileError("$", f"cannot read {path}: {e.strerror}") from e
    return parse_presentation(text)


def presentation_to_dict(P: Presentation) -> Dict[str, Any]:
    return {
        "field": P.p,
        "m": P.m,
        "bounds": list(P.bounds),
        "generators": [list(d) for d in P.generators],
        "relations": [
            {
                "object": list(rel.object),
                "terms": [
                    {"gen": t.gen, "maps": [list(part) for part in t.morphism.parts], "coeff": t.coeff}
                    for t in rel.terms
                ],
            }
            for rel in P.relations
        ],
    }


def dump_presentation(P: Presentation) -> str:
    return json.dumps(presentation_to_dict(P), indent=2)


__all__ = [
    "PresentationFileError",
    "dump_presentation",
    "load_presentation",
    "parse_presentation",
    "presentation_from_dict",
    "presentation_to_dict",
]
