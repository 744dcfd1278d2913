"""Symbolic space descriptors and fundamental-group classes.

A descriptor names a space up to the structure the bounds engine can use:
spheres, tori, real projective spaces, aspherical spaces with a known
group, products, skeleta, and explicit simplicial complexes with
user-asserted attributes.  Nothing here computes a fundamental group;
group information is always declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidInputError
from .intervals import INF, Interval
from .simplicial import SimplicialComplex, complex_from_json, complex_to_json


@dataclass(frozen=True)
class GroupClass:
    """A fundamental-group class with tabulated cohomological dimension and TC.

    kind is one of trivial, free_abelian, cyclic_two, free, abstract.  For
    abstract groups the caller supplies the data (with their own sources);
    the built-in classes carry classical values.
    """

    kind: str
    n: int = 0
    abstract_cd: object = None
    abstract_tc: tuple = None

    KINDS = ("trivial", "free_abelian", "cyclic_two", "free", "abstract")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidInputError(f"unknown group class {self.kind!r}")
        if self.kind in ("free_abelian", "free") and self.n < 1:
            raise InvalidInputError(f"group class {self.kind} needs rank n >= 1")
        if self.kind == "abstract" and self.abstract_cd is None:
            raise InvalidInputError("abstract group class needs a cohomological dimension")

    def cd(self):
        """Cohomological dimension (an exact value or inf)."""
        return {
            "trivial": 0,
            "free_abelian": self.n,
            "cyclic_two": INF,
            "free": 1,
            "abstract": self.abstract_cd,
        }[self.kind]

    def tc_interval(self) -> Interval:
        """TC of the group = TC of an aspherical model (normalized)."""
        if self.kind == "trivial":
            return Interval.exactly(0)
        if self.kind == "free_abelian":
            return Interval.exactly(self.n)
        if self.kind == "cyclic_two":
            return Interval.exactly(INF)
        if self.kind == "free":
            return Interval.exactly(1 if self.n == 1 else 2)
        if self.abstract_tc is None:
            return Interval()
        return Interval(*self.abstract_tc)

    def tc_citation(self) -> str:
        return {
            "trivial": "the trivial group: its aspherical model is a point, TC = 0",
            "free_abelian": "TC of the n-torus, the aspherical model of Z^n, equals n",
            "cyclic_two": "a group with torsion admits no finite-dimensional aspherical model, so its TC is infinite",
            "free": "TC over a free group: 1 for the circle, 2 for a wedge of two or more circles",
            "abstract": "user-supplied group data",
        }[self.kind]

    def cd_citation(self) -> str:
        return {
            "trivial": "the trivial group has cohomological dimension 0",
            "free_abelian": "Z^n has cohomological dimension n",
            "cyclic_two": "a group with torsion has infinite cohomological dimension",
            "free": "free groups have cohomological dimension 1",
            "abstract": "user-supplied group data",
        }[self.kind]

    def label(self) -> str:
        return {
            "trivial": "1",
            "free_abelian": f"Z^{self.n}",
            "cyclic_two": "Z/2",
            "free": f"F_{self.n}",
            "abstract": "pi",
        }[self.kind]

    def to_json(self) -> dict:
        out = {"class": self.kind}
        if self.kind in ("free_abelian", "free"):
            out["n"] = self.n
        if self.kind == "abstract":
            out["cd"] = "inf" if self.abstract_cd == INF else self.abstract_cd
            if self.abstract_tc is not None:
                out["tc"] = Interval(*self.abstract_tc).to_json()
        return out

    @staticmethod
    def from_json(doc: dict) -> "GroupClass":
        kind = doc.get("class")
        if kind == "abstract":
            cd = doc.get("cd")
            cd = INF if cd == "inf" else cd
            tc = None
            if "tc" in doc:
                iv = Interval.from_json(doc["tc"])
                tc = (iv.lower, iv.upper)
            return GroupClass("abstract", abstract_cd=cd, abstract_tc=tc)
        return GroupClass(kind, n=doc.get("n", 0))


TRISTATE_ATTRS = ("simply_connected", "aspherical", "h_space")


@dataclass(frozen=True)
class AttributeSet:
    """User-asserted attributes of an explicit complex (tri-state: True/False/None)."""

    dim: int | None = None
    univ_cover_connectivity: int | None = None
    simply_connected: bool | None = None
    aspherical: bool | None = None
    h_space: bool | None = None

    def __post_init__(self):
        if self.univ_cover_connectivity is not None and self.univ_cover_connectivity < 1:
            raise InvalidInputError(
                "the universal cover is simply connected, so its connectivity is at least 1"
            )

    def to_json(self) -> dict:
        out = {}
        for key in ("dim", "univ_cover_connectivity") + TRISTATE_ATTRS:
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        return out

    @staticmethod
    def from_json(doc: dict) -> "AttributeSet":
        known = {"dim", "univ_cover_connectivity", *TRISTATE_ATTRS}
        bad = set(doc) - known
        if bad:
            raise InvalidInputError(f"unknown assertion keys: {sorted(bad)}")
        return AttributeSet(**doc)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Sphere:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("sphere dimension must be >= 1")

    def label(self) -> str:
        return f"S^{self.n}"


@dataclass(frozen=True)
class Torus:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("torus rank must be >= 1")

    def label(self) -> str:
        return f"T^{self.n}"


@dataclass(frozen=True)
class RealProjective:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInputError("projective space dimension must be >= 1")

    def label(self) -> str:
        return f"RP^{self.n}"


@dataclass(frozen=True)
class AsphericalSpace:
    group: GroupClass
    dim: object = None  # int, INF, or None for unknown

    def label(self) -> str:
        return f"K({self.group.label()},1)[dim={self.dim}]"


@dataclass(frozen=True)
class EilenbergMacLane:
    group: GroupClass

    def label(self) -> str:
        return f"K({self.group.label()},1)"


@dataclass(frozen=True)
class ProductSpace:
    factors: tuple

    def __post_init__(self):
        if len(self.factors) < 2:
            raise InvalidInputError("a product needs at least two factors")

    def label(self) -> str:
        return " x ".join(f.label() for f in self.factors)


@dataclass(frozen=True)
class SkeletonSpace:
    space: object
    r: int

    def __post_init__(self):
        if self.r < 0:
            raise InvalidInputError("skeleton dimension must be >= 0")

    def label(self) -> str:
        return f"{self.space.label()}^({self.r})"


@dataclass(frozen=True)
class ExplicitSpace:
    complex: SimplicialComplex
    assertions: AttributeSet = field(default_factory=AttributeSet)

    def label(self) -> str:
        return self.complex.name or f"complex({self.complex.vertex_count} vertices)"


SpaceDescriptor = object  # union of the dataclasses above


def descriptor_to_json(d) -> dict:
    if isinstance(d, Sphere):
        return {"type": "sphere", "n": d.n}
    if isinstance(d, Torus):
        return {"type": "torus", "n": d.n}
    if isinstance(d, RealProjective):
        return {"type": "real_projective", "n": d.n}
    if isinstance(d, AsphericalSpace):
        out = {"type": "aspherical", "group": d.group.to_json()}
        if d.dim is not None:
            out["dim"] = "inf" if d.dim == INF else d.dim
        return out
    if isinstance(d, EilenbergMacLane):
        return {"type": "eilenberg_maclane", "group": d.group.to_json()}
    if isinstance(d, ProductSpace):
        return {"type": "product", "factors": [descriptor_to_json(f) for f in d.factors]}
    if isinstance(d, SkeletonSpace):
        return {"type": "skeleton", "space": descriptor_to_json(d.space), "r": d.r}
    if isinstance(d, ExplicitSpace):
        return {
            "type": "explicit",
            "complex": complex_to_json(d.complex),
            "assertions": d.assertions.to_json(),
        }
    raise InvalidInputError(f"not a descriptor: {d!r}")


def descriptor_from_json(doc: dict):
    if not isinstance(doc, dict) or "type" not in doc:
        raise InvalidInputError('descriptor JSON needs a "type" key')
    t = doc["type"]
    if t == "sphere":
        return Sphere(_int_field(doc, "n"))
    if t == "torus":
        return Torus(_int_field(doc, "n"))
    if t == "real_projective":
        return RealProjective(_int_field(doc, "n"))
    if t == "aspherical":
        dim = doc.get("dim")
        dim = INF if dim == "inf" else dim
        return AsphericalSpace(GroupClass.from_json(doc["group"]), dim)
    if t == "eilenberg_maclane":
        return EilenbergMacLane(GroupClass.from_json(doc["group"]))
    if t == "product":
        return ProductSpace(tuple(descriptor_from_json(f) for f in doc["factors"]))
    if t == "skeleton":
        return SkeletonSpace(descriptor_from_json(doc["space"]), _int_field(doc, "r"))
    if t == "explicit":
        assertions = AttributeSet.from_json(doc.get("assertions", {}))
        return ExplicitSpace(complex_from_json(doc["complex"]), assertions)
    raise InvalidInputError(f"unknown descriptor type {t!r}")


def _int_field(doc: dict, key: str) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise InvalidInputError(f"descriptor field {key!r} must be an integer")
    return v
