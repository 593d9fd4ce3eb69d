"""
JSON documents read and written by the command line: SPS documents, abstract
lattice documents and sphere-model configs.

Properties are written as the sorted list of state names in their Cartan image.
"""
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator

from core.errors import ParseError
from core.lattice import FiniteLattice, OrthoMap, covering_pairs, lattice_from_covers
from core.sps import FiniteSps, TestPair
from core.utils import names_of
from model.builder import SphereModelConfig

NamePair = Tuple[List[str], List[str]]


class SpsDocument(BaseModel):
    states: List[str]
    closed_sets: List[List[str]]
    ortho: Optional[List[NamePair]] = None
    tests: Optional[List[NamePair]] = None
    order: Optional[List[Tuple[str, str]]] = None

    @field_validator("states")
    @classmethod
    def unique_states(cls, value):
        if len(set(value)) != len(value):
            raise ValueError("state names must be unique")
        return value


class LatticeDocument(BaseModel):
    elements: List[str]
    covers: List[Tuple[str, str]]
    ortho: Optional[List[Tuple[str, str]]] = None

    @field_validator("elements")
    @classmethod
    def unique_elements(cls, value):
        if len(set(value)) != len(value):
            raise ValueError("element names must be unique")
        return value


Document = Union[SpsDocument, LatticeDocument, SphereModelConfig]


# ------------------------- Reading -------------------------
def parse_text(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, line=e.lineno, column=e.colno)
    if not isinstance(data, dict):
        raise ParseError("A document must be a JSON object.", line=1, column=1)
    return data


def _validated(model, data: Dict[str, Any]):
    try:
        return model.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"])
        raise ParseError(f"{where}: {first['msg']}")


def read_document(path: Union[str, Path]) -> Tuple[Document, bytes]:
    """Parse a document file; the kind is chosen by its keys. Returns the raw bytes for digests."""
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e.strerror}")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not UTF-8 text.")
    return parse_document(text), raw


def parse_document(text: str) -> Document:
    data = parse_text(text)
    if "states" in data:
        return _validated(SpsDocument, data)
    if "elements" in data:
        return _validated(LatticeDocument, data)
    return _validated(SphereModelConfig, data)


def _state_mask(doc: SpsDocument, names: List[str]) -> int:
    index = {n: i for i, n in enumerate(doc.states)}
    mask = 0
    for n in names:
        if n not in index:
            raise ParseError(f"Unknown state {n!r}.")
        mask |= 1 << index[n]
    return mask


def to_sps(doc: SpsDocument) -> Tuple[FiniteSps, Optional[OrthoMap], List[TestPair]]:
    """
    Build the SPS of a document. The empty set is adjoined; the full state set is
    not, so a document that omits it fails axiom 1. A closed set listed twice is
    kept twice and fails axiom 3; ortho and tests are then left unresolved.
    """
    entries = [_state_mask(doc, c) for c in doc.closed_sets]
    images = entries if 0 in entries else [0] + entries
    order = None
    if doc.order is not None:
        index = {n: i for i, n in enumerate(doc.states)}
        for p, q in doc.order:
            if p not in index or q not in index:
                raise ParseError(f"Order pair ({p!r}, {q!r}) names an unknown state.")
        order = [(index[p], index[q]) for p, q in doc.order]
    s = FiniteSps.from_images(doc.states, images, declared_order=order, keep_duplicates=True)
    if s.has_duplicates:
        return s, None, []

    ortho = None
    if doc.ortho is not None:
        image = [-1] * s.size
        for left, right in doc.ortho:
            a = s.property_index(_state_mask(doc, left))
            b = s.property_index(_state_mask(doc, right))
            image[a], image[b] = b, a
        ortho = OrthoMap(tuple(image))

    tests = []
    for yes, no in doc.tests or []:
        tests.append(TestPair(s.property_index(_state_mask(doc, yes)), s.property_index(_state_mask(doc, no))))
    return s, ortho, tests


def to_lattice(doc: LatticeDocument) -> Tuple[FiniteLattice, Optional[OrthoMap]]:
    l = lattice_from_covers(doc.elements, doc.covers)
    ortho = None
    if doc.ortho is not None:
        image = [-1] * l.size
        for x, y in doc.ortho:
            if x not in doc.elements or y not in doc.elements:
                raise ParseError(f"Ortho pair ({x!r}, {y!r}) names an unknown element.")
            a, b = l.index(x), l.index(y)
            image[a], image[b] = b, a
        ortho = OrthoMap(tuple(image))
    return l, ortho


# ------------------------- Writing -------------------------
def _prop(s: FiniteSps, a: int) -> List[str]:
    return names_of(s.images[a], s.states)


def sps_document(s: FiniteSps, ortho: Optional[OrthoMap] = None,
                 tests: Optional[List[TestPair]] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "states": list(s.states),
        "closed_sets": [_prop(s, a) for a in range(s.size) if s.images[a]],
    }
    if ortho is not None:
        doc["ortho"] = [[_prop(s, a), _prop(s, ortho(a))] for a in range(s.size) if a <= ortho(a)]
    if tests:
        doc["tests"] = [[_prop(s, t.yes_property), _prop(s, t.no_property)] for t in tests]
    if s.declared_order is not None:
        doc["order"] = [[s.states[p], s.states[q]] for p, q in s.declared_order]
    return doc


def lattice_document(l: FiniteLattice, ortho: Optional[OrthoMap] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "elements": list(l.names),
        "covers": [[l.names[i], l.names[j]] for i, j in covering_pairs(l)],
    }
    if ortho is not None:
        doc["ortho"] = [[l.names[a], l.names[ortho(a)]] for a in range(l.size) if a <= ortho(a)]
    return doc


def dump_document(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_document(path: Union[str, Path], doc: Dict[str, Any]) -> None:
    Path(path).write_text(dump_document(doc), encoding="utf-8")
