"""Run configuration: a TOML document with [curve], [points], [bundle] and
[verify] tables.

    [curve]
    p = 5
    A = 0
    B = 1

    [points]
    P = "O"
    Q = [2, 2]

    [bundle]
    kind = "split"
    a = 2
    b = 2

    [verify]
    fields = [5]
    sample = 50

A split bundle without a [curve] table is symbolic and needs ``equiv``
when a = b.  Non-split bundles use ``kind = "nonsplit"`` and ``degree``.
"""

from __future__ import annotations

import sys
from dataclasses import asdict, dataclass, field
from typing import Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
import tomli_w

from .classifier import BundleDescriptor, NonSplit, Split
from .curve import Curve, CurveError, CurvePoint
from .field import FieldError
from .resonance import DEFAULT_BUDGET


class ConfigError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


Point = Union[str, tuple]


@dataclass(frozen=True)
class CurveBlock:
    p: int
    A: int
    B: int


@dataclass(frozen=True)
class BundleBlock:
    kind: str
    a: Optional[int] = None
    b: Optional[int] = None
    degree: Optional[int] = None
    equiv: Optional[bool] = None


@dataclass(frozen=True)
class VerifyBlock:
    fields: tuple = ()
    projective_budget: int = DEFAULT_BUDGET
    plane_budget: int = DEFAULT_BUDGET
    sample: int = 50
    seed: int = 0
    workers: Optional[int] = None
    timing: bool = False


@dataclass(frozen=True)
class RunConfig:
    bundle: BundleBlock
    curve: Optional[CurveBlock] = None
    P: Optional[Point] = None
    Q: Optional[Point] = None
    verify: VerifyBlock = field(default_factory=VerifyBlock)

    # -- derived objects ---------------------------------------------------
    def curve_obj(self) -> Optional[Curve]:
        if self.curve is None:
            return None
        return Curve(self.curve.p, self.curve.A, self.curve.B)

    def points(self) -> tuple:
        E = self.curve_obj()
        return _point(E, self.P), _point(E, self.Q)

    def descriptor(self) -> BundleDescriptor:
        bb = self.bundle
        if bb.kind == "nonsplit":
            return NonSplit(bb.degree)
        E = self.curve_obj()
        if E is None:
            return Split(bb.a, bb.b, bb.equiv)
        P, Q = self.points()
        desc = Split.from_points(E, bb.a, P, bb.b, Q)
        if bb.equiv is not None and desc.equiv is not None and bb.equiv != desc.equiv:
            raise ConfigError(f"bundle.equiv = {bb.equiv} contradicts the points ({desc.equiv})")
        return desc

    @property
    def concrete(self) -> bool:
        return self.curve is not None and self.bundle.kind == "split"

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict:
        doc: dict = {}
        if self.curve is not None:
            doc["curve"] = asdict(self.curve)
        if self.P is not None or self.Q is not None:
            doc["points"] = {k: (v if isinstance(v, str) else list(v))
                             for k, v in (("P", self.P), ("Q", self.Q)) if v is not None}
        doc["bundle"] = {k: v for k, v in asdict(self.bundle).items() if v is not None}
        ver = {k: v for k, v in asdict(self.verify).items() if v is not None}
        ver["fields"] = list(self.verify.fields)
        doc["verify"] = ver
        return doc

    def to_toml(self) -> str:
        return tomli_w.dumps(self.to_dict())


def _point(E: Optional[Curve], value: Optional[Point]) -> Optional[CurvePoint]:
    if value is None or E is None:
        return None
    if value == "O":
        return E.infinity()
    return E.point(*value)


def _line_of(text: str, table: str, key: Optional[str] = None) -> Optional[int]:
    current = None
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line.strip("[] ")
            if key is None and current == table:
                return n
        elif current == table and key is not None and line.split("=")[0].strip() == key:
            return n
    return None


def _int(tables: dict, text: str, table: str, key: str, required: bool = True) -> Optional[int]:
    value = tables.get(table, {}).get(key)
    if value is None:
        if required:
            raise ConfigError(f"missing {table}.{key}", _line_of(text, table))
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{table}.{key} must be an integer", _line_of(text, table, key))
    return value


def _parse_point(value, text: str, key: str) -> Point:
    if value == "O":
        return "O"
    if isinstance(value, list) and len(value) == 2 and all(isinstance(c, int) and not isinstance(c, bool) for c in value):
        return tuple(value)
    raise ConfigError(f'points.{key} must be "O" or [x, y]', _line_of(text, "points", key))


def parse_config(text: str) -> RunConfig:
    try:
        tables = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(str(exc)) from exc
    known = {"curve", "points", "bundle", "verify"}
    for name in tables:
        if name not in known:
            raise ConfigError(f"unknown table [{name}]", _line_of(text, name))

    curve = None
    if "curve" in tables:
        curve = CurveBlock(*(_int(tables, text, "curve", k) for k in ("p", "A", "B")))

    pts = tables.get("points", {})
    P = _parse_point(pts["P"], text, "P") if "P" in pts else None
    Q = _parse_point(pts["Q"], text, "Q") if "Q" in pts else None

    if "bundle" not in tables:
        raise ConfigError("missing [bundle] table")
    bt = tables["bundle"]
    kind = bt.get("kind", "split")
    if kind == "split":
        equiv = bt.get("equiv")
        if equiv is not None and not isinstance(equiv, bool):
            raise ConfigError("bundle.equiv must be true or false", _line_of(text, "bundle", "equiv"))
        bundle = BundleBlock("split", _int(tables, text, "bundle", "a"), _int(tables, text, "bundle", "b"), None, equiv)
        if bundle.a > bundle.b:
            raise ConfigError("bundle needs a <= b", _line_of(text, "bundle", "a"))
    elif kind == "nonsplit":
        bundle = BundleBlock("nonsplit", degree=_int(tables, text, "bundle", "degree"))
    else:
        raise ConfigError(f"bundle.kind must be split or nonsplit, got {kind!r}", _line_of(text, "bundle", "kind"))

    vt = tables.get("verify", {})
    fields = vt.get("fields", [curve.p] if curve else [])
    if not isinstance(fields, list) or not all(isinstance(q, int) for q in fields):
        raise ConfigError("verify.fields must be a list of integers", _line_of(text, "verify", "fields"))
    workers = _int(tables, text, "verify", "workers", required=False)
    verify = VerifyBlock(
        fields=tuple(fields),
        projective_budget=_int(tables, text, "verify", "projective_budget", False) or DEFAULT_BUDGET,
        plane_budget=_int(tables, text, "verify", "plane_budget", False) or DEFAULT_BUDGET,
        sample=vt.get("sample", 50),
        seed=vt.get("seed", 0),
        workers=workers,
        timing=bool(vt.get("timing", False)),
    )
    cfg = RunConfig(bundle, curve, P, Q, verify)
    _validate(cfg, text)
    return cfg


def _validate(cfg: RunConfig, text: str) -> None:
    try:
        E = cfg.curve_obj()
    except (CurveError, FieldError) as exc:
        raise ConfigError(str(exc), _line_of(text, "curve")) from exc
    if E is not None and cfg.bundle.kind == "split":
        for key in ("P", "Q"):
            if getattr(cfg, key) is None:
                raise ConfigError(f"points.{key} is required with a [curve] table", _line_of(text, "points"))
        try:
            cfg.points()
        except (CurveError, FieldError) as exc:
            raise ConfigError(str(exc), _line_of(text, "points")) from exc
        for q in cfg.verify.fields:
            if q != E.p:
                raise ConfigError(f"verification field {q} must equal the curve characteristic {E.p}",
                                  _line_of(text, "verify", "fields"))
    try:
        cfg.descriptor()
    except ConfigError as exc:
        if exc.line is not None:
            raise
        raise ConfigError(str(exc), _line_of(text, "bundle", "equiv") or _line_of(text, "bundle")) from exc
    except ValueError as exc:
        raise ConfigError(str(exc), _line_of(text, "bundle")) from exc


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
