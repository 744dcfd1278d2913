"""Interval-propagation engine for motion-planning invariants.

Every space gets an interval per invariant (cat, cat1, tc, tcd, tctilde,
cattilde, dim, conn, zcl, cuplen).  Seeds come from a citation-carrying
knowledge base, from structural facts of the descriptor, and from exact
cohomology-ring computations; rules then shrink intervals monotonically to
a least fixpoint.  Every tightening is logged with the rule, its source
statement, and its inputs, so a derivation can be replayed or audited.
Inconsistent inputs surface as conflicts carrying both derivations.

Invariant semantics (all normalized so the point has value 0):
  tc       topological complexity of X
  tcd      diagonal topological complexity (sections of the diagonal cover)
  tctilde  path-fibration sections over preimages of the diagonal cover
  cat      LS-category; cat1: sectional category of the universal cover
  cattilde universal-cover category
  dim      dimension of the carrying complex
  conn     connectivity of the universal cover (>= 1 by definition)
  zcl      zero-divisor cup-length (max over Z/2 and Q)
  cuplen   cup-length (max over Z/2 and Q)
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .descriptors import (
    AsphericalSpace,
    AttributeSet,
    EilenbergMacLane,
    ExplicitSpace,
    GroupClass,
    ProductSpace,
    RealProjective,
    SkeletonSpace,
    Sphere,
    Torus,
    descriptor_to_json,
)
from .errors import ConflictError, InternalInvariantError, InvalidInputError
from .homology import CONTRACTIBLE, Q, Z2, betti, connectivity
from .intervals import INF, Interval
from .rings import (
    cohomology_ring,
    cup_length,
    exterior_ring,
    point_ring,
    sphere_ring,
    tensor_ring,
    truncated_polynomial_ring,
    zero_divisor_cup_length,
)

INVARIANTS = ("cat", "cat1", "tc", "tcd", "tctilde", "cattilde", "dim", "conn", "zcl", "cuplen")
TRISTATES = ("simply_connected", "aspherical", "h_space")


# ---------------------------------------------------------------------------
# ceiling formulas


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def secat_tilde_bound(dim: int, k: int) -> int:
    """ceil((dim - k)/(k+1)), floored at 0.

    Upper bound for sectioning a fibration with (k-1)-connected fibre over
    the preimages of skeletal differences of a dim-dimensional base.
    """
    if dim < 0 or k < 0:
        raise InvalidInputError("dim and k must be non-negative")
    return max(0, _ceil_div(dim - k, k + 1))


def tc_ceiling_bound(dim: int, k: int) -> int:
    """ceil((2*dim - k)/(k+1)), floored at 0.

    The same bound applied over the square of the base; requires k >= 1,
    which always holds since the universal cover is simply connected.
    """
    if dim < 0:
        raise InvalidInputError("dim must be non-negative")
    if k < 1:
        raise InvalidInputError("k must be >= 1 (the universal cover is simply connected)")
    return max(0, _ceil_div(2 * dim - k, k + 1))


# ---------------------------------------------------------------------------
# knowledge base


KB_PROVENANCES = ("rule-base", "classical")


@dataclass(frozen=True)
class KBEntry:
    space: dict
    invariant: str
    lower: object
    upper: object
    citation: str
    provenance: str


def _load_kb_doc(doc: dict, origin: str) -> list[KBEntry]:
    entries = []
    for raw in doc.get("entries", []):
        citation = raw.get("citation")
        provenance = raw.get("provenance")
        if not citation or not isinstance(citation, str):
            raise InvalidInputError(f"knowledge-base entry in {origin} lacks a citation")
        if provenance not in KB_PROVENANCES:
            raise InvalidInputError(
                f"knowledge-base entry in {origin} needs provenance in {KB_PROVENANCES}, "
                f"got {provenance!r}"
            )
        if raw.get("invariant") not in INVARIANTS:
            raise InvalidInputError(f"unknown invariant {raw.get('invariant')!r} in {origin}")
        entries.append(KBEntry(
            space=raw["space"],
            invariant=raw["invariant"],
            lower=raw.get("lower", 0),
            upper=raw.get("upper", "inf"),
            citation=citation,
            provenance=provenance,
        ))
    return entries


def load_kb(path: str | None = None) -> list[KBEntry]:
    """Load the shipped knowledge base, optionally extended by a user file."""
    text = resources.files("tcbounds").joinpath("data/kb.json").read_text()
    entries = _load_kb_doc(json.loads(text), "builtin kb.json")
    if path is not None:
        with open(path) as fh:
            entries += _load_kb_doc(json.load(fh), path)
    return entries


def _kb_value(raw, n: int | None):
    if raw == "inf":
        return INF
    if isinstance(raw, int) and not isinstance(raw, bool):
        return raw
    if isinstance(raw, dict) and "affine" in raw:
        a, b = raw["affine"]
        if n is None:
            raise InvalidInputError("affine knowledge-base value needs a descriptor with n")
        return a * n + b
    raise InvalidInputError(f"bad knowledge-base value {raw!r}")


def _kb_matches(entry: KBEntry, descriptor) -> bool:
    pattern = entry.space
    type_map = {"sphere": Sphere, "torus": Torus, "real_projective": RealProjective}
    cls = type_map.get(pattern.get("type"))
    if cls is None or not isinstance(descriptor, cls):
        return False
    n = descriptor.n
    if "n" in pattern and n != pattern["n"]:
        return False
    if "min_n" in pattern and n < pattern["min_n"]:
        return False
    if "max_n" in pattern and n > pattern["max_n"]:
        return False
    if "n_in" in pattern and n not in pattern["n_in"]:
        return False
    if pattern.get("n_parity") == "even" and n % 2 != 0:
        return False
    if pattern.get("n_parity") == "odd" and n % 2 != 1:
        return False
    if "n_power_of_two" in pattern:
        is_pow = n >= 1 and (n & (n - 1)) == 0
        if bool(pattern["n_power_of_two"]) != is_pow:
            return False
    return True


# ---------------------------------------------------------------------------
# state


@dataclass
class LogEntry:
    step: int
    kind: str  # "seed" or "rule"
    rule_id: str
    node: str
    target: str  # invariant name, "tcd_pi"/"cd_pi", or "attr:<name>"
    before: str
    after: str
    value: object  # Interval or bool, for replay
    citation: str
    inputs: dict

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "kind": self.kind,
            "rule": self.rule_id,
            "node": self.node,
            "target": self.target,
            "before": self.before,
            "after": self.after,
            "citation": self.citation,
            "inputs": self.inputs,
        }


@dataclass
class Node:
    path: str
    descriptor: object
    intervals: dict = field(default_factory=dict)
    attrs: dict = field(default_factory=dict)
    group: GroupClass | None = None
    group_intervals: dict = field(default_factory=dict)
    children: dict = field(default_factory=dict)
    r14_parts: tuple | None = None
    rings: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in INVARIANTS:
            self.intervals.setdefault(name, Interval(1, INF) if name == "conn" else Interval())
        for name in TRISTATES:
            self.attrs.setdefault(name, None)

    def interval(self, name: str) -> Interval:
        if name in ("tcd_pi", "cd_pi"):
            return self.group_intervals.get(name, Interval())
        return self.intervals[name]


class InvariantState:
    """Nodes keyed by path (pre-order), plus the derivation log."""

    def __init__(self):
        self.nodes: dict[str, Node] = {}
        self.log: list[LogEntry] = []
        self._provenance: dict = {}  # (path, target, side) -> LogEntry

    @property
    def root(self) -> Node:
        return self.nodes["X"]

    def child(self, node: Node, role: str) -> Node | None:
        path = node.children.get(role)
        return self.nodes.get(path) if path else None

    def _describe(self, entry: LogEntry | None) -> str:
        if entry is None:
            return "initial state"
        return f"{entry.rule_id} ({entry.citation})"

    def tighten(self, node: Node, target: str, value, rule_id: str, citation: str,
                inputs: dict | None = None, kind: str = "rule") -> bool:
        """Meet the target with value; log if it shrank; conflict if empty."""
        inputs = inputs or {}
        if target.startswith("attr:"):
            name = target.split(":", 1)[1]
            current = node.attrs[name]
            if current is not None:
                if current == value:
                    return False
                prev = self._provenance.get((node.path, target, "set"))
                raise ConflictError(
                    node.path, target,
                    f"{rule_id} ({citation}) proposes {value}",
                    f"{self._describe(prev)} set {current}",
                )
            node.attrs[name] = value
            entry = LogEntry(len(self.log), kind, rule_id, node.path, target,
                             "unknown", str(value), value, citation, inputs)
            self.log.append(entry)
            self._provenance[(node.path, target, "set")] = entry
            return True

        store = node.group_intervals if target in ("tcd_pi", "cd_pi") else node.intervals
        current = store.get(target, Interval())
        new = current.meet(value)
        if new is None:
            if value.lower > current.upper:
                lower_d = f"{rule_id} ({citation}) proposes lower {value.lower}"
                upper_d = self._describe(self._provenance.get((node.path, target, "upper")))
            else:
                lower_d = self._describe(self._provenance.get((node.path, target, "lower")))
                upper_d = f"{rule_id} ({citation}) proposes upper {value.upper}"
            raise ConflictError(node.path, target, lower_d, upper_d)
        if new == current:
            return False
        entry = LogEntry(len(self.log), kind, rule_id, node.path, target,
                         str(current), str(new), new, citation, inputs)
        self.log.append(entry)
        if new.lower > current.lower:
            self._provenance[(node.path, target, "lower")] = entry
        if new.upper < current.upper:
            self._provenance[(node.path, target, "upper")] = entry
        store[target] = new
        return True


# ---------------------------------------------------------------------------
# structural classification helpers


def _static_aspherical(d) -> bool | None:
    if isinstance(d, (Torus, AsphericalSpace, EilenbergMacLane)):
        return True
    if isinstance(d, (Sphere, RealProjective)):
        return True if d.n == 1 else False
    if isinstance(d, ProductSpace):
        flags = [_static_aspherical(f) for f in d.factors]
        if all(f is True for f in flags):
            return True
        if any(f is False for f in flags):
            return False
        return None
    if isinstance(d, ExplicitSpace):
        return d.assertions.aspherical
    return None


def _static_simply_connected(d) -> bool | None:
    if isinstance(d, Sphere):
        return d.n >= 2
    if isinstance(d, (Torus, RealProjective)):
        return False
    if isinstance(d, (AsphericalSpace, EilenbergMacLane)):
        return d.group.kind == "trivial"
    if isinstance(d, ProductSpace):
        flags = [_static_simply_connected(f) for f in d.factors]
        if all(f is True for f in flags):
            return True
        if any(f is False for f in flags):
            return False
        return None
    if isinstance(d, SkeletonSpace) and d.r >= 2:
        return _static_simply_connected(d.space)
    if isinstance(d, ExplicitSpace):
        return d.assertions.simply_connected
    return None


def _combine_groups(groups: list[GroupClass | None]) -> GroupClass | None:
    if any(g is None for g in groups):
        return None
    nontrivial = [g for g in groups if g.kind != "trivial"]
    if not nontrivial:
        return GroupClass("trivial")
    if all(g.kind == "free_abelian" for g in nontrivial):
        return GroupClass("free_abelian", n=sum(g.n for g in nontrivial))
    return None


def _static_group(d) -> GroupClass | None:
    if isinstance(d, Sphere):
        return GroupClass("free_abelian", n=1) if d.n == 1 else GroupClass("trivial")
    if isinstance(d, Torus):
        return GroupClass("free_abelian", n=d.n)
    if isinstance(d, RealProjective):
        return GroupClass("free_abelian", n=1) if d.n == 1 else GroupClass("cyclic_two")
    if isinstance(d, (AsphericalSpace, EilenbergMacLane)):
        return d.group
    if isinstance(d, ProductSpace):
        return _combine_groups([_static_group(f) for f in d.factors])
    if isinstance(d, SkeletonSpace):
        if d.r >= 2:
            return _static_group(d.space)
        return None
    if isinstance(d, ExplicitSpace):
        return GroupClass("trivial") if d.assertions.simply_connected else None
    return None


def _model_rings(d) -> dict:
    """Closed-form cohomology models per field, or {} when unknown."""
    if isinstance(d, Sphere):
        return {Q: sphere_ring(d.n, Q), Z2: sphere_ring(d.n, Z2)}
    if isinstance(d, Torus):
        return {Q: exterior_ring(d.n, Q), Z2: exterior_ring(d.n, Z2)}
    if isinstance(d, RealProjective):
        rational = sphere_ring(d.n, Q) if d.n % 2 == 1 else point_ring(Q)
        return {Q: rational, Z2: truncated_polynomial_ring(d.n, Z2)}
    if isinstance(d, ProductSpace):
        factor_rings = [_model_rings(f) for f in d.factors]
        if any(not r for r in factor_rings):
            return {}
        out = {}
        for coeff in (Q, Z2):
            ring = factor_rings[0][coeff]
            for fr in factor_rings[1:]:
                ring = tensor_ring(ring, fr[coeff])
            out[coeff] = ring
        return out
    if isinstance(d, ExplicitSpace):
        return {Q: cohomology_ring(d.complex, Q), Z2: cohomology_ring(d.complex, Z2)}
    return {}


# ---------------------------------------------------------------------------
# building and seeding


def _build_node(state: InvariantState, descriptor, path: str) -> Node:
    node = Node(path, descriptor)
    state.nodes[path] = node
    if isinstance(descriptor, ProductSpace):
        factor_paths = []
        for i, f in enumerate(descriptor.factors):
            child = _build_node(state, f, f"{path}.factor{i}")
            factor_paths.append(child.path)
            node.children[f"factor{i}"] = child.path
        asph, sc = [], []
        classified = True
        for i, f in enumerate(descriptor.factors):
            if _static_aspherical(f) is True:
                asph.append(i)
            elif _static_simply_connected(f) is True:
                sc.append(i)
            else:
                classified = False
        if classified and asph and sc:
            def part_path(indices, role):
                if len(indices) == 1:
                    return factor_paths[indices[0]]
                part = ProductSpace(tuple(descriptor.factors[i] for i in indices))
                child = _build_node(state, part, f"{path}.{role}")
                node.children[role] = child.path
                return child.path
            node.r14_parts = (part_path(asph, "asph_part"), part_path(sc, "sc_part"))
    elif isinstance(descriptor, SkeletonSpace):
        child = _build_node(state, descriptor.space, f"{path}.base")
        node.children["base"] = child.path
    elif isinstance(descriptor, RealProjective) and descriptor.n >= 2:
        child = _build_node(state, Sphere(descriptor.n), f"{path}.cover")
        node.children["cover"] = child.path
    node.group = _static_group(descriptor)
    return node


def _seed(state: InvariantState, node: Node, target: str, value, citation: str,
          inputs: dict | None = None) -> None:
    state.tighten(node, target, value, "seed", citation, inputs, kind="seed")


def _seed_group(state: InvariantState, node: Node) -> None:
    g = node.group
    if g is None:
        return
    _seed(state, node, "tcd_pi", g.tc_interval(),
          f"diagonal TC of a group equals its TC: {g.tc_citation()}")
    cd = g.cd()
    _seed(state, node, "cd_pi", Interval.exactly(cd), g.cd_citation())
    _seed(state, node, "tcd_pi", Interval.at_least(cd),
          "the cohomological dimension of the group bounds its diagonal TC from below")


ZCL_AUTO_LIMIT = 12  # skip the tensor-square search when the ring is larger than this


def _seed_rings(state: InvariantState, node: Node) -> None:
    rings = _model_rings(node.descriptor)
    node.rings = rings
    if not rings:
        return
    cup_by = {c: cup_length(r) for c, r in sorted(rings.items())}
    _seed(state, node, "cuplen", Interval.exactly(max(cup_by.values())),
          "exhaustive cup-product search in the cohomology ring "
          "(larger of the Z/2 and Q values)",
          {f"cuplen[{c}]": str(v) for c, v in sorted(cup_by.items())})
    zcl_by = {}
    for coeff, ring in sorted(rings.items()):
        if sum(ring.dim(d) for d in ring.degrees()) <= ZCL_AUTO_LIMIT:
            zcl_by[coeff] = zero_divisor_cup_length(ring)
    if not zcl_by:
        return
    inputs = {f"zcl[{c}]": str(v) for c, v in sorted(zcl_by.items())}
    if len(zcl_by) == len(rings):
        _seed(state, node, "zcl", Interval.exactly(max(zcl_by.values())),
              "exhaustive zero-divisor product search in the cohomology ring "
              "(larger of the Z/2 and Q values)", inputs)
    else:
        _seed(state, node, "zcl", Interval.at_least(max(zcl_by.values())),
              "exhaustive zero-divisor product search in the cohomology ring "
              "(one coefficient field skipped for size, so only a lower bound)", inputs)


def _seed_node(state: InvariantState, node: Node, kb: list[KBEntry]) -> None:
    d = node.descriptor
    if isinstance(d, Sphere):
        _seed(state, node, "dim", Interval.exactly(d.n), "the n-sphere is n-dimensional")
        if d.n >= 2:
            _seed(state, node, "attr:simply_connected", True,
                  "spheres of dimension >= 2 are simply connected")
            _seed(state, node, "conn", Interval.exactly(d.n - 1),
                  "the n-sphere is (n-1)-connected and has nontrivial pi_n")
            _seed(state, node, "attr:aspherical", False,
                  "pi_n of the n-sphere is nonzero for n >= 2")
        else:
            _seed(state, node, "attr:simply_connected", False,
                  "the circle has fundamental group Z")
            _seed(state, node, "attr:aspherical", True, "the circle is aspherical")
        if d.n in (1, 3, 7):
            _seed(state, node, "attr:h_space", True,
                  "unit complex numbers, quaternions and octonions make S^1, S^3, S^7 H-spaces")
    elif isinstance(d, Torus):
        _seed(state, node, "dim", Interval.exactly(d.n), "the n-torus is n-dimensional")
        _seed(state, node, "attr:simply_connected", False,
              "the torus has fundamental group Z^n")
        _seed(state, node, "attr:aspherical", True, "the torus is aspherical")
        _seed(state, node, "attr:h_space", True, "the torus is a topological group")
    elif isinstance(d, RealProjective):
        _seed(state, node, "dim", Interval.exactly(d.n),
              "real projective n-space is n-dimensional")
        if d.n == 1:
            _seed(state, node, "attr:simply_connected", False,
                  "RP^1 is a circle with fundamental group Z")
            _seed(state, node, "attr:aspherical", True, "RP^1 is a circle, hence aspherical")
            _seed(state, node, "attr:h_space", True, "RP^1 is a circle, a topological group")
        else:
            _seed(state, node, "attr:simply_connected", False,
                  "real projective space has fundamental group of order 2")
            _seed(state, node, "attr:aspherical", False,
                  "the universal cover of RP^n is the non-contractible sphere S^n")
            _seed(state, node, "conn", Interval.exactly(d.n - 1),
                  "the universal cover of RP^n is the (n-1)-connected sphere S^n")
            if d.n in (3, 7):
                _seed(state, node, "attr:h_space", True,
                      "RP^3 is the group SO(3); RP^7 inherits an H-structure from the octonions")
    elif isinstance(d, (AsphericalSpace, EilenbergMacLane)):
        _seed(state, node, "attr:aspherical", True, "declared aspherical")
        _seed(state, node, "attr:simply_connected", d.group.kind == "trivial",
              "an aspherical space is simply connected iff its group is trivial")
        if isinstance(d, AsphericalSpace) and d.dim is not None:
            _seed(state, node, "dim", Interval.exactly(d.dim), "declared dimension")
        if isinstance(d, EilenbergMacLane):
            model_dims = {
                "trivial": Interval.exactly(0),
                "free_abelian": Interval.exactly(d.group.n),
                "free": Interval.exactly(1),
                "cyclic_two": Interval.exactly(INF),
            }
            if d.group.kind in model_dims:
                _seed(state, node, "dim", model_dims[d.group.kind],
                      "minimal aspherical model: point / torus / wedge of circles; "
                      "none of finite dimension when the group has torsion")
            else:
                cd = d.group.cd()
                if cd == INF:
                    _seed(state, node, "dim", Interval.exactly(INF),
                          "no finite-dimensional aspherical model: infinite cohomological dimension")
                else:
                    _seed(state, node, "dim", Interval.at_least(cd),
                          "an aspherical model has dimension at least the cohomological dimension")
    elif isinstance(d, SkeletonSpace):
        _seed(state, node, "dim", Interval.at_most(d.r),
              "an r-skeleton has dimension at most r")
    elif isinstance(d, ExplicitSpace):
        _seed_explicit(state, node)
    # products: attributes arrive via structural rules

    if node.group is not None:
        _seed_group(state, node)
    _seed_rings(state, node)
    for entry in kb:
        if _kb_matches(entry, d):
            n = getattr(d, "n", None)
            iv = Interval(_kb_value(entry.lower, n), _kb_value(entry.upper, n))
            _seed(state, node, entry.invariant, iv,
                  f"{entry.citation} [{entry.provenance}]")


def _seed_explicit(state: InvariantState, node: Node) -> None:
    d: ExplicitSpace = node.descriptor
    K = d.complex
    if not K.simplices:
        raise InvalidInputError("explicit descriptor needs a nonempty complex")
    b0 = betti(K, Q)[0]
    if b0 != 1:
        raise InvalidInputError("explicit descriptor spaces must be path-connected")
    _seed(state, node, "dim", Interval.exactly(K.dim),
          "dimension of the given complex")
    a = d.assertions
    if a.dim is not None and a.dim != K.dim:
        raise InvalidInputError(
            f"asserted dim {a.dim} disagrees with the complex dimension {K.dim}")
    if a.simply_connected is True:
        _seed(state, node, "attr:simply_connected", True, "asserted by the caller")
        conn = connectivity(K, simply_connected_asserted=True)
        if conn == CONTRACTIBLE:
            _seed(state, node, "attr:aspherical", True,
                  "reduced homology vanishes, so the asserted simply connected "
                  "complex is contractible")
            _seed(state, node, "conn", Interval.exactly(INF),
                  "contractible: connected through every degree")
        else:
            _seed(state, node, "conn", Interval.exactly(conn),
                  "first nonzero reduced homology degree of a simply connected "
                  "complex locates its first nonzero homotopy group")
    elif a.simply_connected is False:
        _seed(state, node, "attr:simply_connected", False, "asserted by the caller")
    if a.aspherical is not None:
        _seed(state, node, "attr:aspherical", a.aspherical, "asserted by the caller")
    if a.h_space is not None:
        _seed(state, node, "attr:h_space", a.h_space, "asserted by the caller")
    if a.univ_cover_connectivity is not None:
        _seed(state, node, "conn", Interval.at_least(a.univ_cover_connectivity),
              "asserted connectivity of the universal cover")


def seed_facts(descriptor, kb: list[KBEntry] | None = None) -> InvariantState:
    """Build the node tree and install every seeded fact, all logged."""
    state = InvariantState()
    _build_node(state, descriptor, "X")
    kb = load_kb() if kb is None else kb
    for node in list(state.nodes.values()):
        _seed_node(state, node, kb)
    return state


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class Rule:
    id: str
    citation: str
    provenance: str
    fn: object

    def apply(self, state: InvariantState, node: Node) -> bool:
        changed = False
        for path, target, value, inputs in self.fn(state, node):
            target_node = state.nodes[path]
            if state.tighten(target_node, target, value, self.id, self.citation, inputs):
                changed = True
        return changed


def _fmt(v) -> str:
    return "inf" if v == INF else str(v)


def _r1(state, node):
    cat, tc = node.interval("cat"), node.interval("tc")
    return [(node.path, "tc", Interval.at_least(cat.lower), {"cat.lower": _fmt(cat.lower)}),
            (node.path, "cat", Interval.at_most(tc.upper), {"tc.upper": _fmt(tc.upper)})]


def _r2(state, node):
    if node.group is None:
        return []
    tc_pi = node.interval("tcd_pi")
    dim = node.interval("dim")
    if tc_pi.upper == INF or dim.upper == INF:
        return []
    bound = tc_pi.upper + dim.upper
    return [(node.path, "tc", Interval.at_most(bound),
             {"tc_pi.upper": _fmt(tc_pi.upper), "dim.upper": _fmt(dim.upper)})]


def _r3(state, node):
    tcd, tct = node.interval("tcd"), node.interval("tctilde")
    if tcd.upper == INF or tct.upper == INF:
        return []
    return [(node.path, "tc", Interval.at_most(tcd.upper + tct.upper),
             {"tcd.upper": _fmt(tcd.upper), "tctilde.upper": _fmt(tct.upper)})]


def _ceiling_term(dim_upper, k_lower, doubled: bool):
    if dim_upper == INF:
        return None
    if k_lower == INF:
        return 0
    k = max(1, int(k_lower))
    d = int(dim_upper)
    return tc_ceiling_bound(d, k) if doubled else secat_tilde_bound(d, k)


def _r4(state, node):
    tcd = node.interval("tcd")
    term = _ceiling_term(node.interval("dim").upper, node.interval("conn").lower, True)
    if term is None or tcd.upper == INF:
        return []
    return [(node.path, "tc", Interval.at_most(tcd.upper + term),
             {"tcd.upper": _fmt(tcd.upper), "dim.upper": _fmt(node.interval("dim").upper),
              "conn.lower": _fmt(node.interval("conn").lower), "ceiling": _fmt(term)})]


def _r5(state, node):
    tcd, tc = node.interval("tcd"), node.interval("tc")
    return [(node.path, "tcd", Interval.at_most(tc.upper), {"tc.upper": _fmt(tc.upper)}),
            (node.path, "tc", Interval.at_least(tcd.lower), {"tcd.lower": _fmt(tcd.lower)})]


def _r6(state, node):
    if node.attrs["aspherical"] is not True:
        return []
    tcd, tc = node.interval("tcd"), node.interval("tc")
    return [(node.path, "tcd", tc, {"tc": str(tc)}),
            (node.path, "tc", tcd, {"tcd": str(tcd)})]


def _r6g(state, node):
    if node.attrs["aspherical"] is not True or node.group is None:
        return []
    tc_pi = node.interval("tcd_pi")
    return [(node.path, "tc", tc_pi, {"tc_pi": str(tc_pi)}),
            (node.path, "tcd", tc_pi, {"tc_pi": str(tc_pi)})]


def _r7(state, node):
    if node.group is None:
        return []
    tcd_pi = node.interval("tcd_pi")
    if tcd_pi.upper == INF:
        return []
    return [(node.path, "tcd", Interval.at_most(tcd_pi.upper),
             {"tcd_pi.upper": _fmt(tcd_pi.upper)})]


def _r8(state, node):
    if node.group is None:
        return []
    cd = node.group.cd()
    if cd == INF:
        return []
    k = max(int(cd), 2)
    if node.interval("conn").lower < k - 1:
        return []
    tcd_pi = node.interval("tcd_pi")
    return [(node.path, "tcd", tcd_pi,
             {"cd": _fmt(cd), "conn.lower": _fmt(node.interval("conn").lower),
              "tcd_pi": str(tcd_pi)})]


def _r9(state, node):
    cat1, tcd = node.interval("cat1"), node.interval("tcd")
    return [(node.path, "tcd", Interval.at_least(cat1.lower), {"cat1.lower": _fmt(cat1.lower)}),
            (node.path, "cat1", Interval.at_most(tcd.upper), {"tcd.upper": _fmt(tcd.upper)})]


def _r10(state, node):
    if node.attrs["h_space"] is not True:
        return []
    tcd, cat1 = node.interval("tcd"), node.interval("cat1")
    return [(node.path, "tcd", cat1, {"cat1": str(cat1)}),
            (node.path, "cat1", tcd, {"tcd": str(tcd)})]


def _r11(state, node):
    term = _ceiling_term(node.interval("dim").upper, node.interval("conn").lower, True)
    if term is None:
        return []
    return [(node.path, "tctilde", Interval.at_most(term),
             {"dim.upper": _fmt(node.interval("dim").upper),
              "conn.lower": _fmt(node.interval("conn").lower)})]


def _r12(state, node):
    cover = state.child(node, "cover")
    if cover is None:
        return []
    lo = cover.interval("tc").lower
    if lo == 0:
        return []
    return [(node.path, "tctilde", Interval.at_least(lo),
             {"tc(cover).lower": _fmt(lo), "cover": cover.path})]


def _r13(state, node):
    out = []
    tct = node.interval("tctilde")
    if node.attrs["aspherical"] is True:
        out.append((node.path, "tctilde", Interval.exactly(0), {}))
    elif node.attrs["aspherical"] is False:
        out.append((node.path, "tctilde", Interval.at_least(1), {}))
    if tct.upper == 0:
        out.append((node.path, "attr:aspherical", True, {"tctilde.upper": "0"}))
    if tct.lower >= 1:
        out.append((node.path, "attr:aspherical", False, {"tctilde.lower": _fmt(tct.lower)}))
    return out


def _r14(state, node):
    if node.r14_parts is None:
        return []
    asph_path, sc_path = node.r14_parts
    asph, sc = state.nodes[asph_path], state.nodes[sc_path]
    return [
        (node.path, "tcd", asph.interval("tc"), {"tc(aspherical part)": str(asph.interval("tc"))}),
        (asph_path, "tc", node.interval("tcd"), {"tcd(product)": str(node.interval("tcd"))}),
        (node.path, "tctilde", sc.interval("tc"),
         {"tc(simply connected part)": str(sc.interval("tc"))}),
        (sc_path, "tc", node.interval("tctilde"), {"tctilde(product)": str(node.interval("tctilde"))}),
    ]


def _r14a(state, node):
    if node.attrs["simply_connected"] is not True:
        return []
    tc, tct = node.interval("tc"), node.interval("tctilde")
    return [(node.path, "tctilde", tc, {"tc": str(tc)}),
            (node.path, "tc", tct, {"tctilde": str(tct)})]


def _r15(state, node):
    lo = node.interval("zcl").lower
    if lo == 0:
        return []
    return [(node.path, "tc", Interval.at_least(lo), {"zcl.lower": _fmt(lo)})]


def _r16(state, node):
    out = []
    cup = node.interval("cuplen").lower
    if cup > 0:
        out.append((node.path, "cat", Interval.at_least(cup), {"cuplen.lower": _fmt(cup)}))
    dim_u = node.interval("dim").upper
    if dim_u != INF:
        out.append((node.path, "cat", Interval.at_most(dim_u), {"dim.upper": _fmt(dim_u)}))
    return out


def _r17(state, node):
    out = []
    term = _ceiling_term(node.interval("dim").upper, node.interval("conn").lower, False)
    if term is not None:
        out.append((node.path, "cattilde", Interval.at_most(term),
                    {"dim.upper": _fmt(node.interval("dim").upper),
                     "conn.lower": _fmt(node.interval("conn").lower)}))
    cat1_u, cattilde_u = node.interval("cat1").upper, node.interval("cattilde").upper
    if cat1_u != INF and cattilde_u != INF:
        out.append((node.path, "cat", Interval.at_most(cat1_u + cattilde_u),
                    {"cat1.upper": _fmt(cat1_u), "cattilde.upper": _fmt(cattilde_u)}))
    return out


def _r18(state, node):
    out = []
    tcd = node.interval("tcd")
    sc = node.attrs["simply_connected"]
    if sc is True:
        out.append((node.path, "tcd", Interval.exactly(0), {}))
    elif sc is False:
        out.append((node.path, "tcd", Interval.at_least(1), {}))
    if tcd.upper == 0:
        out.append((node.path, "attr:simply_connected", True, {"tcd.upper": "0"}))
    if tcd.lower >= 1:
        out.append((node.path, "attr:simply_connected", False, {"tcd.lower": _fmt(tcd.lower)}))
    return out


def _r19(state, node):
    if not isinstance(node.descriptor, ProductSpace):
        return []
    total = 0
    inputs = {}
    for i in range(len(node.descriptor.factors)):
        f = state.child(node, f"factor{i}")
        if f.interval("tc").upper == INF:
            return []
        total += f.interval("tc").upper
        inputs[f"tc({f.path}).upper"] = _fmt(f.interval("tc").upper)
    return [(node.path, "tc", Interval.at_most(total), inputs)]


def _torus_rank(state, node) -> int | None:
    d = node.descriptor
    if isinstance(d, Torus):
        return d.n
    if isinstance(d, (Sphere, RealProjective)) and d.n == 1:
        return 1
    if node.attrs["simply_connected"] is True:
        return 0
    if isinstance(d, ProductSpace):
        total = 0
        for i in range(len(d.factors)):
            r = _torus_rank(state, state.child(node, f"factor{i}"))
            if r is None:
                return None
            total += r
        return total
    return None


def _r20(state, node):
    rank = _torus_rank(state, node)
    if rank is None:
        return []
    return [(node.path, "cat1", Interval.exactly(rank), {"torus rank": str(rank)})]


def _r21(state, node):
    dim_u = node.interval("dim").upper
    if dim_u == INF:
        return []
    return [(node.path, "tc", Interval.at_most(2 * dim_u), {"dim.upper": _fmt(dim_u)})]


def _r22(state, node):
    if not isinstance(node.descriptor, RealProjective):
        return []
    tcd, tc = node.interval("tcd"), node.interval("tc")
    return [(node.path, "tcd", tc, {"tc": str(tc)}),
            (node.path, "tc", tcd, {"tcd": str(tcd)})]


def _product_children(state, node):
    if not isinstance(node.descriptor, ProductSpace):
        return None
    return [state.child(node, f"factor{i}") for i in range(len(node.descriptor.factors))]


def _s1(state, node):
    kids = _product_children(state, node)
    if kids is None:
        return []
    lo = sum(k.interval("dim").lower for k in kids)
    hi = sum(k.interval("dim").upper for k in kids)
    return [(node.path, "dim", Interval(lo, hi),
             {k.path: str(k.interval("dim")) for k in kids})]


def _tristate_product(state, node, attr):
    kids = _product_children(state, node)
    if kids is None:
        return []
    flags = [k.attrs[attr] for k in kids]
    if node.attrs[attr] is None:
        if all(f is True for f in flags):
            return [(node.path, f"attr:{attr}", True, {})]
        if any(f is False for f in flags):
            return [(node.path, f"attr:{attr}", False, {})]
    return []


def _s2(state, node):
    return _tristate_product(state, node, "simply_connected")


def _s3(state, node):
    return _tristate_product(state, node, "aspherical")


def _s4(state, node):
    kids = _product_children(state, node)
    if kids is None:
        return []
    lo = min(k.interval("conn").lower for k in kids)
    hi = min(k.interval("conn").upper for k in kids)
    return [(node.path, "conn", Interval(lo, hi),
             {k.path: str(k.interval("conn")) for k in kids})]


def _s5(state, node):
    kids = _product_children(state, node)
    if kids is None or node.attrs["h_space"] is not None:
        return []
    if all(k.attrs["h_space"] is True for k in kids):
        return [(node.path, "attr:h_space", True, {})]
    return []


def _s7(state, node):
    if not isinstance(node.descriptor, SkeletonSpace):
        return []
    base = state.child(node, "base")
    r = node.descriptor.r
    lo = min(r, base.interval("dim").lower)
    hi = min(r, base.interval("dim").upper)
    return [(node.path, "dim", Interval(lo, hi), {"r": str(r), "dim(base)": str(base.interval("dim"))})]


def _s8(state, node):
    if not isinstance(node.descriptor, SkeletonSpace) or node.descriptor.r < 2:
        return []
    base = state.child(node, "base")
    out = []
    if node.attrs["simply_connected"] is None and base.attrs["simply_connected"] is not None:
        out.append((node.path, "attr:simply_connected", base.attrs["simply_connected"], {}))
    if base.attrs["simply_connected"] is None and node.attrs["simply_connected"] is not None:
        out.append((base.path, "attr:simply_connected", node.attrs["simply_connected"], {}))
    return out


def _s9(state, node):
    out = []
    if node.attrs["aspherical"] is True:
        out.append((node.path, "conn", Interval.exactly(INF), {}))
    if node.interval("conn").upper != INF:
        out.append((node.path, "attr:aspherical", False,
                    {"conn.upper": _fmt(node.interval("conn").upper)}))
    return out


def _s10(state, node):
    dim_u = node.interval("dim").upper
    if dim_u == INF:
        return []
    return [(node.path, "cuplen", Interval.at_most(dim_u), {"dim.upper": _fmt(dim_u)}),
            (node.path, "zcl", Interval.at_most(2 * dim_u), {"dim.upper": _fmt(dim_u)})]


RULES: tuple[Rule, ...] = (
    Rule("R1", "cat(X) <= TC(X): a motion planner restricted to the diagonal "
               "contracts each set", "rule-base", _r1),
    Rule("R2", "TC(X) <= TC(pi_1 X) + dim X when the group has a "
               "finite-dimensional aspherical model", "rule-base", _r2),
    Rule("R3", "TC(X) <= TCD(X) + TCtilde(X): combine a diagonal cover with "
               "path sections over its preimages", "rule-base", _r3),
    Rule("R4", "TC(X) <= TCD(X) + ceil((2 dim X - k)/(k+1)) for a k-connected "
               "universal cover", "rule-base", _r4),
    Rule("R5", "TCD(X) <= TC(X): path sections project to diagonal-cover sections",
         "rule-base", _r5),
    Rule("R6", "for an aspherical complex, TCD(X) = TC(X)", "rule-base", _r6),
    Rule("R6G", "invariants of an aspherical complex depend only on its "
                "fundamental group", "classical", _r6g),
    Rule("R7", "TCD(X) <= TCD(pi_1 X): attach cells to reach the aspherical model",
         "rule-base", _r7),
    Rule("R8", "TCD(X) = TCD(pi) when cd(pi) <= k and the homotopy of X vanishes "
               "strictly between degrees 1 and k", "rule-base", _r8),
    Rule("R9", "cat_1(X) <= TCD(X) <= cat_1(X x X); the slice restriction gives "
               "the left inequality", "rule-base", _r9),
    Rule("R10", "for a connected CW H-space, TCD(X) = cat_1(X)", "rule-base", _r10),
    Rule("R11", "TCtilde(X) <= ceil((2 dim X - k)/(k+1)): section the path "
                "fibration over skeletal differences of the square", "rule-base", _r11),
    Rule("R12", "TCtilde(X) >= TC of the universal cover", "rule-base", _r12),
    Rule("R13", "X is aspherical iff TCtilde(X) = 0", "rule-base", _r13),
    Rule("R14", "for X aspherical and Y simply connected: TCD(X x Y) = TC(X) and "
                "TCtilde(X x Y) = TC(Y)", "rule-base", _r14),
    Rule("R14a", "for simply connected X, TCtilde(X) = TC(X) (product rule with a "
                 "point factor)", "rule-base", _r14a),
    Rule("R15", "a nonzero n-fold product of diagonal zero-divisors forces TC(X) >= n",
         "classical", _r15),
    Rule("R16", "cup-length <= cat(X) <= dim X", "classical", _r16),
    Rule("R17", "cat(X) <= cat_1(X) + cattilde(X), with cattilde(X) <= "
                "ceil((dim X - k)/(k+1))", "rule-base", _r17),
    Rule("R18", "TCD(X) = 0 iff X is simply connected", "rule-base", _r18),
    Rule("R19", "TC of a product is at most the sum of the factors' TC", "classical", _r19),
    Rule("R20", "cat_1(T^n x Y) = n for simply connected Y", "rule-base", _r20),
    Rule("R21", "TC(X) <= 2 dim X", "rule-base", _r21),
    Rule("R22", "for real projective spaces, TCD = TC", "rule-base", _r22),
    Rule("S1", "the dimension of a product is the sum of the dimensions", "classical", _s1),
    Rule("S2", "a product is simply connected iff every factor is", "classical", _s2),
    Rule("S3", "a product is aspherical iff every factor is", "classical", _s3),
    Rule("S4", "the universal cover of a product is the product of the covers, so "
               "its connectivity is the minimum over the factors", "classical", _s4),
    Rule("S5", "a product of H-spaces is an H-space", "classical", _s5),
    Rule("S7", "the dimension of an r-skeleton is min(r, dim)", "classical", _s7),
    Rule("S8", "for r >= 2, an r-skeleton has the same fundamental group as the space",
         "classical", _s8),
    Rule("S9", "aspherical means the universal cover is contractible, hence "
               "k-connected for every k", "classical", _s9),
    Rule("S10", "a product of n positive-degree classes lives in degree >= n, so "
                "cup-length <= dim and zero-divisor cup-length <= 2 dim", "classical", _s10),
)

RULES_BY_ID = {r.id: r for r in RULES}


def propagate(state: InvariantState) -> InvariantState:
    """Run all rules to the least fixpoint (deterministic order)."""
    for _ in range(100000):
        changed = False
        for path in list(state.nodes):
            node = state.nodes[path]
            for rule in RULES:
                if rule.apply(state, node):
                    changed = True
        if not changed:
            return state
    raise InternalInvariantError("interval propagation did not reach a fixpoint")


def analyze(descriptor, kb: list[KBEntry] | None = None) -> InvariantState:
    return propagate(seed_facts(descriptor, kb))


def analyze_complex(K, assertions: AttributeSet | None = None,
                    kb: list[KBEntry] | None = None) -> InvariantState:
    """Seed the engine from an explicit complex plus assertions, then propagate."""
    return analyze(ExplicitSpace(K, assertions or AttributeSet()), kb)


# ---------------------------------------------------------------------------
# replay and reporting


def replay(descriptor, log: list[LogEntry]) -> InvariantState:
    """Re-apply a derivation log to a fresh unseeded state."""
    state = InvariantState()
    _build_node(state, descriptor, "X")
    for entry in log:
        node = state.nodes[entry.node]
        state.tighten(node, entry.target, entry.value, entry.rule_id,
                      entry.citation, entry.inputs, kind=entry.kind)
    return state


def states_agree(a: InvariantState, b: InvariantState) -> bool:
    if set(a.nodes) != set(b.nodes):
        return False
    for path in a.nodes:
        na, nb = a.nodes[path], b.nodes[path]
        if na.intervals != nb.intervals or na.attrs != nb.attrs:
            return False
        if na.group_intervals != nb.group_intervals:
            return False
    return True


def compute_bindings(state: InvariantState, node: Node) -> dict:
    """Rules (and seeds) whose conclusion achieves each final bound."""
    out = {}
    proposals: dict[tuple[str, str], list[tuple]] = {}
    for rule in RULES:
        for path, target, value, _inputs in rule.fn(state, node):
            if path != node.path or target.startswith("attr:"):
                continue
            proposals.setdefault((target, "lower"), []).append((rule.id, value))
            proposals.setdefault((target, "upper"), []).append((rule.id, value))
    for name in INVARIANTS:
        final = node.interval(name)
        lower_rules, upper_rules = [], []
        for rule_id, value in proposals.get((name, "lower"), []):
            if value.lower == final.lower and final.lower > 0:
                lower_rules.append(rule_id)
        for rule_id, value in proposals.get((name, "upper"), []):
            if value.upper == final.upper and final.upper != INF:
                upper_rules.append(rule_id)
        for entry in state.log:
            if entry.kind != "seed" or entry.node != node.path or entry.target != name:
                continue
            if entry.value.lower == final.lower and final.lower > 0 and "seed" not in lower_rules:
                lower_rules.append("seed")
            if entry.value.upper == final.upper and final.upper != INF and "seed" not in upper_rules:
                upper_rules.append("seed")
        out[name] = {
            "lower": sorted(set(lower_rules)),
            "upper": sorted(set(upper_rules)),
        }
    return out


def _gap_statement(node: Node):
    if node.group is None:
        return None
    tcd_u = node.interval("tcd").upper
    pi_l = node.interval("tcd_pi").lower
    if tcd_u == INF or tcd_u >= pi_l:
        return None
    return {
        "statement": f"TC^D(X) <= {tcd_u} < {_fmt(pi_l)} <= TC^D(pi)",
        "tcd_upper": tcd_u,
        "tcd_pi_lower": "inf" if pi_l == INF else pi_l,
        "group": node.group.label(),
    }


def report(state: InvariantState, fmt: str = "json", explain: bool = False):
    """Render intervals plus (optionally) the full derivation chain."""
    root = state.root
    doc: dict = {
        "space": root.descriptor.label(),
        "descriptor": descriptor_to_json(root.descriptor),
        "invariants": {name: root.interval(name).to_json() for name in INVARIANTS},
        "attributes": {
            name: ("unknown" if root.attrs[name] is None else root.attrs[name])
            for name in TRISTATES
        },
    }
    if root.group is not None:
        doc["group"] = {
            "class": root.group.label(),
            "tcd_pi": root.interval("tcd_pi").to_json(),
            "cd_pi": root.interval("cd_pi").to_json(),
        }
    gap = _gap_statement(root)
    if gap is not None:
        doc["gap"] = gap
    others = {
        path: {name: n.interval(name).to_json() for name in INVARIANTS}
        for path, n in state.nodes.items() if path != "X"
    }
    if others:
        doc["nodes"] = others
    if explain:
        doc["derivations"] = [e.to_json() for e in state.log]
        doc["binding"] = compute_bindings(state, root)
    if fmt == "json":
        return doc
    if fmt != "text":
        raise InvalidInputError(f"unknown report format {fmt!r}")
    lines = [f"space: {doc['space']}"]
    for name in INVARIANTS:
        lines.append(f"  {name:<9} {root.interval(name)}")
    if "group" in doc:
        lines.append(f"group {doc['group']['class']}: TC^D(pi) {root.interval('tcd_pi')}, "
                     f"cd(pi) {root.interval('cd_pi')}")
    if gap is not None:
        lines.append(f"gap: {gap['statement']}")
    if explain:
        lines.append("derivations:")
        for e in state.log:
            inputs = ", ".join(f"{k}={v}" for k, v in e.inputs.items())
            suffix = f" [{inputs}]" if inputs else ""
            lines.append(f"  [{e.rule_id}] {e.node}.{e.target}: {e.before} -> {e.after}"
                         f"{suffix}  # {e.citation}")
    return "\n".join(lines)


def parse_report(doc: dict) -> dict:
    """Intervals of a JSON report, for round-trip checks."""
    return {name: Interval.from_json(iv) for name, iv in doc["invariants"].items()}
