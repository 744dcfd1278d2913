"""Command-line front end.

Subcommands cover the four computational layers: homology/ring/zcl for the
exact cohomology machinery, complement/skeleton/subdivide/product for the
complex constructions, cover for the cover combinatorics (including the
seeded fuzz harnesses), and bounds/analyze for the interval engine.

Exit codes: 0 success, 1 invalid input (with a diagnostic), 2 violated
internal invariant.  Output is deterministic: identical inputs and flags
produce byte-identical JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from . import covers, engine, homology, rings, simplicial
from .descriptors import AttributeSet, ExplicitSpace, descriptor_from_json
from .errors import ConflictError, InternalInvariantError, InvalidInputError

BUILTIN_DATA = ("circle", "s2", "rp2", "torus7", "t2xs2", "t5_skeleton2")


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        name = path.removesuffix(".json")
        if name in BUILTIN_DATA:
            text = resources.files("tcbounds").joinpath(f"data/{name}.json").read_text()
            return json.loads(text)
        raise InvalidInputError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON in {path}: {exc}")


def _load_complex(path: str) -> simplicial.SimplicialComplex:
    return simplicial.complex_from_json(_load_json(path))


def _load_subcomplex(K: simplicial.SimplicialComplex, path: str) -> simplicial.SimplicialComplex:
    """Load L in K's original vertex labels and map it into K's id space."""
    doc = _load_json(path)
    if "maximal_simplices" not in doc:
        raise InvalidInputError('subcomplex JSON needs a "maximal_simplices" key')
    names = K.vertex_names or tuple(range(K.vertex_count))
    to_id = {name: i for i, name in enumerate(names)}
    mapped = []
    for face in doc["maximal_simplices"]:
        try:
            mapped.append([to_id[v] for v in face])
        except KeyError as exc:
            raise InvalidInputError(f"subcomplex vertex {exc.args[0]!r} is not a vertex of K")
    return simplicial.subcomplex_from_faces(K, mapped)


def _emit(doc, fmt: str = "json") -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(str(doc) + "\n")


def _coeff(value: str) -> str:
    if value not in homology.COEFFICIENTS:
        raise InvalidInputError(f"--coeff must be one of z2, q, z; got {value!r}")
    return value


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_homology(args) -> None:
    K = _load_complex(args.complex)
    coeff = _coeff(args.coeff)
    out = {"complex": K.name or args.complex, "coeff": coeff}
    if coeff == homology.Z:
        summary = homology.integral_homology(K)
        out["betti"] = list(summary.free_ranks)
        out["torsion"] = [list(t) for t in summary.torsion]
    else:
        b = homology.betti(K, coeff)
        out["betti"] = list(b)
        out["torsion"] = [[] for _ in b]
    out["euler_characteristic"] = K.euler_characteristic
    _emit(out)


def _cmd_ring(args) -> None:
    K = _load_complex(args.complex)
    coeff = _coeff(args.coeff)
    if coeff == homology.Z:
        raise InvalidInputError("ring computation needs field coefficients (z2 or q)")
    ring = rings.cohomology_ring(K, coeff)
    _emit({
        "complex": K.name or args.complex,
        "coeff": coeff,
        "betti": list(ring.betti_numbers()),
        "basis": {str(d): list(ring.basis[d]) for d in sorted(ring.basis) if ring.basis[d]},
        "cup_length": rings.cup_length(ring),
    })


def _cmd_zcl(args) -> None:
    K = _load_complex(args.complex)
    coeff = _coeff(args.coeff)
    if coeff == homology.Z:
        raise InvalidInputError("zero-divisor cup-length needs field coefficients (z2 or q)")
    ring = rings.cohomology_ring(K, coeff)
    value, witness = rings.zero_divisor_cup_length(ring, with_witness=True)
    _emit({
        "complex": K.name or args.complex,
        "coeff": coeff,
        "betti": list(ring.betti_numbers()),
        "cup_length": rings.cup_length(ring),
        "zcl": value,
        "zcl_witness": witness,
    })


def _cmd_complement(args) -> None:
    K = _load_complex(args.complex)
    L = _load_subcomplex(K, args.subcomplex)
    if args.model == "nerve":
        result = simplicial.complement_nerve(K, L)
    else:
        result = simplicial.complement_complex(K, L)
    _emit({"model": args.model, "complex": simplicial.complex_to_json(result),
           "f_vector": list(result.f_vector)})


def _cmd_skeleton(args) -> None:
    K = _load_complex(args.complex)
    result = simplicial.skeleton(K, args.r)
    _emit({"complex": simplicial.complex_to_json(result), "f_vector": list(result.f_vector)})


def _cmd_subdivide(args) -> None:
    K = _load_complex(args.complex)
    bary = simplicial.barycentric_subdivision(K)
    doc = simplicial.complex_to_json(bary.complex)
    doc["labels"] = [list(lab) for lab in bary.labels]
    _emit({"complex": doc, "f_vector": list(bary.complex.f_vector)})


def _cmd_product(args) -> None:
    K = _load_complex(args.complex)
    L = _load_complex(args.other)
    result = simplicial.product(K, L)
    _emit({"complex": simplicial.complex_to_json(result),
           "f_vector": list(result.f_vector),
           "euler_characteristic": result.euler_characteristic})


def _cmd_cover(args) -> None:
    def load_cover(path, what):
        if path is None:
            raise InvalidInputError(f"cover {args.action} needs {what}")
        return covers.cover_from_json(_load_json(path))

    if args.action == "check":
        cover = load_cover(args.cover, "a cover file")
        out = {"sets": len(cover.sets), "multiplicity": covers.multiplicity(cover)}
        if args.n is not None:
            out["n"] = args.n
            out["is_n_cover"] = covers.is_n_cover(cover, args.n)
        if args.m is not None:
            out["m"] = args.m
            out["lemma_holds"] = covers.check_multiplicity_lemma(cover, args.m)
        _emit(out)
    elif args.action == "extend":
        cover = load_cover(args.cover, "a cover file")
        if args.m is None:
            raise InvalidInputError("cover extend needs --m, the index of the last new set")
        extended = covers.extend_cover(cover, args.m)
        _emit({"cover": covers.cover_to_json(extended),
               "multiplicity": covers.multiplicity(extended)})
    elif args.action == "combine":
        cover_a = load_cover(args.cover, "two cover files")
        cover_b = load_cover(args.other, "two cover files")
        combined = covers.combine_covers(cover_a, cover_b)
        covers.verify_combination(combined, cover_a, cover_b)
        _emit({"cover": covers.cover_to_json(combined)})
    elif args.action == "fuzz":
        if args.kind == "lemma":
            _emit(covers.fuzz_multiplicity_lemma(args.trials, args.seed))
        else:
            _emit(covers.fuzz_combine(args.trials, args.seed))
    else:
        raise InvalidInputError(f"unknown cover action {args.action!r}")


def _parse_assertions(args) -> AttributeSet:
    tri = {}
    for key in ("simply_connected", "aspherical", "h_space"):
        v = getattr(args, key)
        if v is not None:
            tri[key] = v == "true"
    if args.univ_cover_connectivity is not None:
        tri["univ_cover_connectivity"] = args.univ_cover_connectivity
    return AttributeSet(**tri)


def _cmd_bounds(args) -> None:
    doc = _load_json(args.descriptor)
    descriptor = descriptor_from_json(doc)
    kb = engine.load_kb(args.kb)
    state = engine.analyze(descriptor, kb)
    _emit(engine.report(state, fmt=args.format, explain=args.explain), fmt=args.format)


def _cmd_analyze(args) -> None:
    K = _load_complex(args.complex)
    assertions = _parse_assertions(args)
    kb = engine.load_kb(args.kb)
    state = engine.analyze(ExplicitSpace(K, assertions), kb)
    _emit(engine.report(state, fmt=args.format, explain=args.explain), fmt=args.format)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcbounds",
        description="Certified bounds for topological complexity and LS-category "
                    "type invariants on finite simplicial complexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_complex_cmd(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("complex", help="complex JSON file (or builtin name)")
        return p

    p = add_complex_cmd("homology", "Betti numbers / integral homology of a complex")
    p.add_argument("--coeff", default="q", help="z2, q, or z")
    p.set_defaults(fn=_cmd_homology)

    p = add_complex_cmd("ring", "cohomology ring basis and cup-length")
    p.add_argument("--coeff", default="q", help="z2 or q")
    p.set_defaults(fn=_cmd_ring)

    p = add_complex_cmd("zcl", "zero-divisor cup-length with witness")
    p.add_argument("--coeff", default="q", help="z2 or q (the value is field-sensitive)")
    p.set_defaults(fn=_cmd_zcl)

    p = add_complex_cmd("complement", "complement construction for a subcomplex")
    p.add_argument("subcomplex", help="subcomplex JSON (vertex ids in K's labels)")
    p.add_argument("--model", choices=("nerve", "chain"), default="chain",
                   help="nerve needs a full subcomplex; chain works for any subcomplex")
    p.set_defaults(fn=_cmd_complement)

    p = add_complex_cmd("skeleton", "r-skeleton of a complex")
    p.add_argument("r", type=int)
    p.set_defaults(fn=_cmd_skeleton)

    p = add_complex_cmd("subdivide", "barycentric subdivision (labelled)")
    p.set_defaults(fn=_cmd_subdivide)

    p = add_complex_cmd("product", "staircase triangulation of a product")
    p.add_argument("other", help="second complex JSON file")
    p.set_defaults(fn=_cmd_product)

    p = sub.add_parser("cover", help="cover combinatorics")
    p.add_argument("action", choices=("check", "extend", "combine", "fuzz"))
    p.add_argument("cover", nargs="?", help="cover JSON file")
    p.add_argument("other", nargs="?", help="second cover (combine)")
    p.add_argument("--n", type=int, help="check: test the n-cover property")
    p.add_argument("--m", type=int, help="check: lemma parameter / extend: target index")
    p.add_argument("--kind", choices=("lemma", "combine"), default="lemma")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="fuzz seed (u64)")
    p.set_defaults(fn=_cmd_cover)

    p = sub.add_parser("bounds", help="invariant intervals for a space descriptor")
    p.add_argument("descriptor", help="descriptor JSON file (or builtin name)")
    p.add_argument("--explain", action="store_true", help="include derivations and citations")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--kb", help="extra knowledge-base JSON file")
    p.set_defaults(fn=_cmd_bounds)

    p = add_complex_cmd("analyze", "full pipeline: complex -> rings -> bounds")
    for key in ("simply-connected", "aspherical", "h-space"):
        p.add_argument(f"--{key}", dest=key.replace("-", "_"),
                       choices=("true", "false"), default=None)
    p.add_argument("--univ-cover-connectivity", type=int, default=None)
    p.add_argument("--explain", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--kb", help="extra knowledge-base JSON file")
    p.set_defaults(fn=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        args.fn(args)
        return 0
    except (InvalidInputError, ConflictError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except InternalInvariantError as exc:
        sys.stderr.write(f"internal invariant violated: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
