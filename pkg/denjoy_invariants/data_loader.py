# denjoy_invariants/data_loader.py
"""Action specification documents: load, validate, build and dump."""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Optional, Tuple, Union

import sympy

from . import SPEC_SCHEMA
from .circle_core import as_real
from .config import DEFAULT_SETTINGS, PrecisionSettings
from .denjoy_model import LENGTH_FAMILIES, BlowUpData, DenjoyAction, RotationVector
from .errors import DenjoyError, InvalidActionError, SpecParseError

logger = logging.getLogger(__name__)

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"

TOP_LEVEL_KEYS = {"schema", "d", "gamma", "blowups", "precision"}
BLOWUP_KEYS = {"base_point", "family", "parameters"}
PRECISION_KEYS = {"working_bits", "max_bits", "enum_budget"}


# =========================================================================
# Document types
# =========================================================================
@dataclass(frozen=True)
class BlowUpSpec:
    base_point: str
    family: str = "geometric"
    parameters: Tuple[Tuple[str, str], ...] = ()

    def to_json(self) -> dict:
        return {"base_point": self.base_point, "family": self.family, "parameters": dict(self.parameters)}


@dataclass(frozen=True)
class ActionSpecDocument:
    d: int
    gamma: Tuple[str, ...]
    blowups: Tuple[BlowUpSpec, ...] = ()
    precision: Tuple[Tuple[str, int], ...] = ()
    positions: Tuple[Tuple[str, Tuple[int, int]], ...] = field(default=(), compare=False, repr=False)

    def to_json(self) -> dict:
        doc = {
            "schema": SPEC_SCHEMA,
            "d": self.d,
            "gamma": list(self.gamma),
            "blowups": [b.to_json() for b in self.blowups],
        }
        if self.precision:
            doc["precision"] = dict(self.precision)
        return doc

    def settings(self, base: PrecisionSettings = DEFAULT_SETTINGS) -> PrecisionSettings:
        return base.with_overrides(**dict(self.precision))

    def located(self, key: str, error: Exception) -> InvalidActionError:
        """Re-raise-ready copy of `error` at the source position recorded for `key`."""
        line, col = dict(self.positions).get(key, (0, 0))
        return InvalidActionError(str(error), line, col)


# =========================================================================
# Parsing
# =========================================================================
def _locate(text: str, needle: str) -> Tuple[int, int]:
    """1-based line/column of the first occurrence of `needle`, or (0, 0)."""
    if not text:
        return 0, 0
    pos = text.find(needle)
    if pos < 0:
        return 0, 0
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _fail(text: str, message: str, needle: Optional[str] = None) -> SpecParseError:
    line, col = _locate(text, needle) if needle else (0, 0)
    return SpecParseError(message, line, col)


def _expression(text: str, value: Any, what: str) -> str:
    if not isinstance(value, (str, int)) or isinstance(value, bool):
        raise _fail(text, f"{what} must be an expression string", json.dumps(value))
    try:
        return str(as_real(str(value)))
    except (DenjoyError, ValueError, TypeError, sympy.SympifyError) as e:
        raise _fail(text, f"{what} {value!r}: {e}", json.dumps(value)) from None


def _check_keys(text: str, obj: Mapping, allowed: set, where: str) -> None:
    extra = sorted(set(obj) - allowed)
    if extra:
        raise _fail(text, f"unknown key {extra[0]!r} in {where}", f'"{extra[0]}"')


def parse_action_spec(text: str) -> ActionSpecDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecParseError(e.msg, e.lineno, e.colno) from None
    if not isinstance(raw, dict):
        raise SpecParseError("an action specification is a JSON object", 1, 1)
    _check_keys(text, raw, TOP_LEVEL_KEYS, "the document")
    schema = raw.get("schema", SPEC_SCHEMA)
    if schema != SPEC_SCHEMA:
        raise _fail(text, f"unsupported schema {schema!r}, expected {SPEC_SCHEMA!r}", '"schema"')

    d = raw.get("d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise _fail(text, "d must be a positive integer", '"d"')
    gamma = raw.get("gamma")
    if not isinstance(gamma, list) or len(gamma) != d:
        raise _fail(text, f"gamma must list exactly d = {d} expressions", '"gamma"')
    positions = {"gamma": _locate(text, '"gamma"'), "blowups": _locate(text, '"blowups"')}
    for i, g in enumerate(gamma):
        positions[f"gamma[{i}]"] = _locate(text, json.dumps(g))
    gamma = tuple(_expression(text, g, f"gamma[{i}]") for i, g in enumerate(gamma))

    blowups = []
    for i, b in enumerate(raw.get("blowups", [])):
        if not isinstance(b, dict) or "base_point" not in b:
            raise _fail(text, f"blow-up {i} needs a base_point", '"blowups"')
        _check_keys(text, b, BLOWUP_KEYS, f"blow-up {i}")
        family = b.get("family", "geometric")
        if family not in LENGTH_FAMILIES:
            raise _fail(text, f"unknown length family {family!r}; known: {sorted(LENGTH_FAMILIES)}",
                        json.dumps(family))
        params = b.get("parameters", {})
        if not isinstance(params, dict):
            raise _fail(text, f"parameters of blow-up {i} must be an object", '"parameters"')
        try:
            params = tuple(sorted((str(k), str(Fraction(str(v)))) for k, v in params.items()))
        except (ValueError, ZeroDivisionError) as e:
            raise _fail(text, f"blow-up {i} parameter: {e}", '"parameters"') from None
        positions[f"blowups[{i}]"] = _locate(text, json.dumps(b["base_point"]))
        blowups.append(BlowUpSpec(_expression(text, b["base_point"], f"base point {i}"), family, params))

    precision = raw.get("precision", {})
    if not isinstance(precision, dict):
        raise _fail(text, "precision must be an object", '"precision"')
    _check_keys(text, precision, PRECISION_KEYS, "precision")
    for key, value in precision.items():
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise _fail(text, f"precision.{key} must be a positive integer", f'"{key}"')
    return ActionSpecDocument(d, gamma, tuple(blowups), tuple(sorted(precision.items())),
                              tuple(sorted(positions.items())))


def load_action_spec(path: Union[str, Path]) -> ActionSpecDocument:
    """Loads a spec file; bare names are looked up in the bundled specs/ directory."""
    path = Path(path)
    if not path.exists() and (SPEC_DIR / path).exists():
        path = SPEC_DIR / path
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise SpecParseError(f"cannot read {path}: {e.strerror}") from None
    logger.info("loaded action spec %s", path)
    return parse_action_spec(text)


# =========================================================================
# Building and dumping
# =========================================================================
def build_action(doc: ActionSpecDocument, settings: Optional[PrecisionSettings] = None) -> DenjoyAction:
    """Errors of the action itself are reported at the entry of the source document they concern."""
    settings = settings or doc.settings()
    for i, g in enumerate(doc.gamma):
        try:
            RotationVector((g,))
        except InvalidActionError as e:
            raise doc.located(f"gamma[{i}]", e) from None
    rho = RotationVector(tuple(doc.gamma))
    blowups = []
    for i, b in enumerate(doc.blowups):
        try:
            blowups.append(BlowUpData(b.base_point, LENGTH_FAMILIES[b.family](doc.d, dict(b.parameters))))
        except InvalidActionError as e:
            raise doc.located(f"blowups[{i}]", e) from None
    try:
        certificate = rho.certify_independence(settings=settings) if blowups else None
    except InvalidActionError as e:
        raise doc.located("gamma", e) from None
    try:
        return DenjoyAction(rho, tuple(blowups), certificate)
    except InvalidActionError as e:
        raise doc.located("blowups", e) from None


def document_for(action: DenjoyAction, precision: Optional[Mapping[str, int]] = None) -> ActionSpecDocument:
    blowups = tuple(
        BlowUpSpec(str(b.base_point), b.family.name, tuple(sorted(b.family.parameters().items())))
        for b in action.blowups
    )
    return ActionSpecDocument(action.d, tuple(str(g) for g in action.rho.gamma), blowups,
                              tuple(sorted((precision or {}).items())))


def dump_action_spec(doc: ActionSpecDocument) -> str:
    """Canonical serialization: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc.to_json(), indent=2, sort_keys=True) + "\n"
