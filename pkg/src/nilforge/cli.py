"""Command-line frontend.

Every command reads exact rational data, runs one pipeline and emits a
deterministic report (JSON or text) embedding the tool version and the
input hash.  Exit status: 0 on success, 1 on verdict-level rejections
(reconstruction rejected, witness check false, membership not found),
2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from ._util import TOOL_NAME, parallel_map, sha256_bytes, sha256_file
from .algebra import (AlgebraError, NilAlgebra, Pointing, Grading,
                      algebra_from_json, algebra_to_json, derivation_algebra,
                      smash_product)
from .exactlin import Matrix, rat
from .homogeneity import (grading_necessary_test, homogeneity_report,
                          jacobi_membership, transitivity_witness)
from .milnor import MilnorError, milnor_algebra
from .mpoly import MPolyParseError, parse
from .nilpoly import (NilPolyError, NilPolynomial, EquivalenceWitness,
                      binary_quartic_invariants, e6_family,
                      equivalence_witness_check, family_degree3,
                      family_degree4, leading_form_analysis, nil_polynomial,
                      nilpoly_from_json, nilpoly_to_json, reconstruct_algebra,
                      regenerate_from_2_3)

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2


class CliError(Exception):
    pass


def _read_json(path):
    try:
        if path == "-":
            return json.loads(sys.stdin.read()), sha256_bytes(b"<stdin>")
        with open(path, "rb") as fh:
            raw = fh.read()
        return json.loads(raw.decode("utf-8")), sha256_bytes(raw)
    except OSError as exc:
        raise CliError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise CliError("%s is not valid JSON: %s" % (path, exc))


def _load_nilpoly(path):
    data, digest = _read_json(path)
    if "poly" not in data:
        raise CliError("%s does not look like a nil-polynomial file" % path)
    try:
        return nilpoly_from_json(data), digest
    except (MPolyParseError, NilPolyError) as exc:
        raise CliError("bad nil-polynomial input: %s" % exc)


def _load_algebra(path):
    data, digest = _read_json(path)
    if "products" not in data:
        raise CliError("%s does not look like an algebra file" % path)
    try:
        return algebra_from_json(data), digest
    except (AlgebraError, ValueError) as exc:
        raise CliError("bad algebra input: %s" % exc)


def _emit(report: dict, args, default_text=None) -> None:
    out = sys.stdout
    close = False
    if getattr(args, "output", None):
        out = open(args.output, "w", encoding="utf-8")
        close = True
    try:
        if getattr(args, "format", "json") == "json":
            json.dump(report, out, indent=2, sort_keys=True)
            out.write("\n")
        else:
            text = default_text if default_text is not None else \
                json.dumps(report, indent=2, sort_keys=True)
            out.write(text)
            if not text.endswith("\n"):
                out.write("\n")
    finally:
        if close:
            out.close()


def _envelope(digest: str, payload: dict, t0: float) -> dict:
    payload = dict(payload)
    payload["tool"] = TOOL_NAME
    payload["version"] = __version__
    payload["input_sha256"] = digest
    payload.setdefault("timings_ms", {})
    payload["timings_ms"]["total"] = int(1000 * (time.perf_counter() - t0))
    return payload


# ---------------------------------------------------------------------------
# commands

def cmd_milnor(args) -> int:
    t0 = time.perf_counter()
    if args.poly:
        text = args.poly
        digest = sha256_bytes(text.encode())
    elif args.input:
        data, digest = _read_json(args.input)
        text = data["poly"] if isinstance(data, dict) else str(data)
    else:
        raise CliError("milnor needs --poly or --input")
    try:
        F = parse(text)
        result = milnor_algebra(F, trunc_max=args.trunc_max)
    except (MPolyParseError, MilnorError) as exc:
        raise CliError(str(exc))
    A = result.algebra
    payload = {
        "germ": str(F),
        "dim": A.dim,
        "nil_index": A.nil_index,
        "hilbert": list(A.hilbert_function),
        "admissible": A.is_admissible,
        "basis_monomials": result.monomial_labels,
        "truncation_degree": result.truncation_degree,
        "residue_of_F": [str(c) for c in result.residue_of_F],
        "F_in_jacobi": result.F_in_jacobi,
        "algebra": algebra_to_json(A),
    }
    lines = ["germ: %s" % payload["germ"],
             "dim %(dim)d, nil index %(nil_index)d" % payload,
             "hilbert: %s" % payload["hilbert"],
             "admissible: %s" % payload["admissible"],
             "basis: %s" % ", ".join(result.monomial_labels),
             "residue of F: %s" % _residue_text(result),
             "F in J(F): %s" % payload["F_in_jacobi"]]
    _emit(_envelope(digest, payload, t0), args, "\n".join(lines))
    return EXIT_OK


def _residue_text(result) -> str:
    parts = []
    for c, label in zip(result.residue_of_F, result.monomial_labels):
        if c:
            parts.append("%s*%s" % (c, label))
    return " + ".join(parts) if parts else "0"


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    A, digest = _load_algebra(args.input)
    rep = A.verify()
    payload = {
        "associative": rep.associative,
        "nilpotent": rep.nilpotent,
        "nil_index": rep.nil_index,
        "admissible": rep.admissible,
        "failing_triples": [list(f) for f in rep.failures],
    }
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK if rep.ok else EXIT_REJECTED


def cmd_invariants(args) -> int:
    t0 = time.perf_counter()
    A, digest = _load_algebra(args.input)
    gr = A.gr()
    payload = {
        "dim": A.dim,
        "nil_index": A.nil_index,
        "hilbert": list(A.hilbert_function),
        "hilbert_symmetric": A.hilbert_symmetric,
        "power_chain_dims": [s.dim for s in A.power_chain],
        "socle_chain_dims": [s.dim for s in A.socle_chain],
        "annihilator_dim": A.annihilator.dim,
        "annihilator_basis": [[str(c) for c in v]
                              for v in A.annihilator.basis],
        "admissible": A.is_admissible,
        "gr_annihilator_dim": gr.annihilator.dim,
        "gr_hilbert": list(gr.hilbert_function),
    }
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


def cmd_nilpoly(args) -> int:
    t0 = time.perf_counter()
    A, digest = _load_algebra(args.input)
    try:
        P = nil_polynomial(A)
    except (NilPolyError, AlgebraError) as exc:
        raise CliError(str(exc))
    payload = dict(nilpoly_to_json(P))
    payload["degree"] = (P.degree if P.degree != float("-inf") else "-inf")
    _emit(_envelope(digest, payload, t0), args, str(P.poly))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    t0 = time.perf_counter()
    P, digest = _load_nilpoly(args.input)
    res = reconstruct_algebra(P.quadratic, P.cubic)
    payload = {"accepted": res.accepted}
    if res.accepted:
        payload["algebra"] = algebra_to_json(res.algebra)
        payload["dim"] = res.algebra.dim
        payload["nil_index"] = res.algebra.nil_index
    else:
        payload["reason"] = res.reason
        if res.witness_triple:
            payload["witness_triple"] = list(res.witness_triple)
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK if res.accepted else EXIT_REJECTED


def cmd_regenerate(args) -> int:
    t0 = time.perf_counter()
    data, digest = _read_json(args.input)
    try:
        if "poly" in data:
            P = nilpoly_from_json(data)
            q, c = P.quadratic, P.cubic
        elif "products" in data:
            A = algebra_from_json(data)
            P = nil_polynomial(A)
            q, c = P.quadratic, P.cubic
        elif "algebra" in data:  # output of `reconstruct` or `milnor`
            A = algebra_from_json(data["algebra"])
            P = nil_polynomial(A)
            q, c = P.quadratic, P.cubic
        else:
            raise CliError("regenerate needs a nil-polynomial or algebra file")
        reg = regenerate_from_2_3(q, c)
    except (NilPolyError, AlgebraError) as exc:
        raise CliError(str(exc))
    payload = dict(nilpoly_to_json(reg))
    payload["degree"] = reg.degree
    _emit(_envelope(digest, payload, t0), args, str(reg.poly))
    return EXIT_OK


def cmd_homogeneity(args) -> int:
    t0 = time.perf_counter()
    P, digest = _load_nilpoly(args.input)

    checkpoint = None
    if args.checkpoint:
        def checkpoint(ell, ok):
            sys.stderr.write("ell=%d solvable=%s\n" % (ell, ok))
            sys.stderr.flush()

    rep = homogeneity_report(P, cross_check=not args.no_cross_check,
                             checkpoint=checkpoint)
    payload = rep.to_json()
    if not _is_shipped_fixture(digest):
        payload["rationality_note"] = (
            "solvability decided over the rationals; for inputs outside the "
            "shipped fixture corpus real/complex solvability may differ")
    text = "verdict: %s\norbit dim at origin: %d\naff(S) dim: %d\n" % (
        rep.verdict, rep.orbit_dim_at_origin, rep.aff_dim)
    _emit(_envelope(digest, payload, t0), args, text)
    return EXIT_OK


def _is_shipped_fixture(digest: str) -> bool:
    from . import fixtures
    try:
        for name in ("uv", "sr", "gh", "gr"):
            path = fixtures.fixture_path(name)
            if sha256_bytes(path.read_bytes()) == digest:
                return True
    except Exception:
        return False
    return False


def cmd_grading(args) -> int:
    t0 = time.perf_counter()
    P, digest = _load_nilpoly(args.input)
    witness = None
    if args.witness:
        wdata, _ = _read_json(args.witness)
        A = reconstruct_algebra(P.quadratic, P.cubic)
        if not A.accepted:
            raise CliError("cannot verify witness: reconstruction rejected")
        witness = Grading(A.algebra,
                          [[rat(x) for x in row] for row in wdata["basis"]],
                          wdata["weights"])
    rep = grading_necessary_test(P, witness=witness)
    _emit(_envelope(digest, rep.to_json(), t0), args)
    return EXIT_OK


def cmd_derivations(args) -> int:
    t0 = time.perf_counter()
    A, digest = _load_algebra(args.input)
    pointing = Pointing.default(A) if (args.aff and A.is_admissible) else None
    rep = derivation_algebra(A, pointing)
    payload = {
        "dim": rep.dim,
        "ty_lower_bound": rep.ty_lower_bound,
        "quarter_lower_bound": rep.quarter_lower_bound,
        "bounds_hold": (rep.dim >= rep.ty_lower_bound
                        and rep.dim >= rep.quarter_lower_bound),
    }
    if args.basis:
        payload["basis"] = [[[str(D.entry(i, j)) for j in range(A.dim)]
                             for i in range(A.dim)] for D in rep.basis]
    if rep.aff_generators is not None:
        payload["aff_dim"] = len(rep.aff_generators)
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


def cmd_smash(args) -> int:
    t0 = time.perf_counter()
    A, da = _load_algebra(args.left)
    B, db = _load_algebra(args.right)
    try:
        N, pointing = smash_product(Pointing.default(A), Pointing.default(B))
    except AlgebraError as exc:
        raise CliError(str(exc))
    payload = {
        "dim": N.dim,
        "nil_index": N.nil_index,
        "hilbert": list(N.hilbert_function),
        "algebra": algebra_to_json(N),
    }
    _emit(_envelope(sha256_bytes((da + db).encode()), payload, t0), args)
    return EXIT_OK


def cmd_witness(args) -> int:
    t0 = time.perf_counter()
    if args.kind == "equivalence":
        P, dp = _load_nilpoly(args.p)
        Q, dq = _load_nilpoly(args.q)
        wdata, dw = _read_json(args.witness)
        alpha = Matrix.from_rows([[rat(x) for x in row]
                                  for row in wdata["alpha"]])
        w = EquivalenceWitness(alpha=alpha, epsilon=rat(wdata["epsilon"]))
        try:
            ok = equivalence_witness_check(P, Q, w)
        except NilPolyError as exc:
            raise CliError(str(exc))
        payload = {"kind": "equivalence", "verified": ok}
        _emit(_envelope(sha256_bytes((dp + dq + dw).encode()), payload, t0), args)
        return EXIT_OK if ok else EXIT_REJECTED
    # transitivity
    A, digest = _load_algebra(args.input)
    pointing = Pointing.default(A)
    point = tuple(rat(x) for x in args.point.split(","))
    grading = None
    if args.grading:
        gdata, _ = _read_json(args.grading)
        grading = Grading(A, [[rat(x) for x in row] for row in gdata["basis"]],
                          gdata["weights"])
    try:
        wit = transitivity_witness(A, pointing, point, args.mode,
                                   grading=grading)
    except AlgebraError as exc:
        raise CliError(str(exc))
    payload = {
        "kind": "transitivity",
        "mode": wit.mode,
        "steps": len(wit.steps),
        "f_preserved": wit.f_preserved,
        "maps_point_to_origin": wit.maps_point_to_origin,
        "linear": [[str(wit.map.linear.entry(i, j)) for j in range(A.dim)]
                   for i in range(A.dim)],
        "translation": [str(x) for x in wit.map.translation],
    }
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


def cmd_family(args) -> int:
    t0 = time.perf_counter()
    digest = sha256_bytes(repr((args.kind, args.cubic, args.t, args.eps)).encode())
    try:
        if args.kind == "degree3":
            if not args.cubic:
                raise CliError("degree3 family needs --cubic")
            inst = family_degree3(parse(args.cubic))
        elif args.kind == "e6":
            inst = e6_family(rat(args.t if args.t is not None else "1"))
        else:
            if args.t is None or args.eps is None:
                raise CliError("degree4 family needs --t and --eps")
            inst = family_degree4(rat(args.t), rat(args.eps))
    except (NilPolyError, MPolyParseError) as exc:
        raise CliError(str(exc))
    payload = dict(nilpoly_to_json(inst.nilpoly))
    payload["dim"] = inst.algebra.dim
    payload["nil_index"] = inst.algebra.nil_index
    payload["grading_weights"] = list(inst.grading.weights)
    if inst.reduced is not None:
        payload["reduced"] = inst.reduced
    if inst.extras:
        for k in ("phi", "g2", "g3", "t", "eps"):
            if k in inst.extras and inst.extras[k] is not None:
                payload[k] = str(inst.extras[k])
    if args.algebra_out:
        with open(args.algebra_out, "w", encoding="utf-8") as fh:
            json.dump(algebra_to_json(inst.algebra), fh, indent=2,
                      sort_keys=True)
            fh.write("\n")
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


def cmd_analyze_leading(args) -> int:
    t0 = time.perf_counter()
    P, digest = _load_nilpoly(args.input)
    rep = leading_form_analysis(P)
    payload = {
        "degree": P.degree,
        "essential_variable_count": rep.essential_variable_count,
        "binary_profile": [list(e) for e in rep.binary_profile]
        if rep.binary_profile is not None else None,
        "leading_form": str(rep.leading_form),
    }
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


def cmd_jacobi(args) -> int:
    t0 = time.perf_counter()
    P, digest = _load_nilpoly(args.input)
    found = None
    degrees = range(0, args.degree + 1) if args.search else [args.degree]
    for d in degrees:
        lambdas = jacobi_membership(P, d)
        if lambdas is not None:
            found = (d, lambdas)
            break
    if found is None:
        payload = {"found": False, "degree_bound": args.degree}
        _emit(_envelope(digest, payload, t0), args)
        return EXIT_REJECTED
    d, lambdas = found
    payload = {"found": True, "degree": d,
               "coefficients": [str(l) for l in lambdas]}
    _emit(_envelope(digest, payload, t0), args)
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nilforge",
        description="Exact-arithmetic toolkit for commutative nilpotent "
                    "algebras and affinely homogeneous nil-hypersurfaces")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--output", help="write the report to a file")

    p = sub.add_parser("milnor", help="Milnor algebra of a polynomial germ")
    p.add_argument("--poly", help="germ in the polynomial grammar")
    p.add_argument("--input", help="JSON file with a 'poly' field")
    p.add_argument("--trunc-max", type=int, default=30)
    common(p)
    p.set_defaults(fn=cmd_milnor)

    p = sub.add_parser("verify", help="verify algebra axioms")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("invariants", help="chains, Hilbert function, gr")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("nilpoly", help="extract the nil-polynomial")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_nilpoly)

    p = sub.add_parser("reconstruct",
                       help="algebra from quadratic+cubic parts")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_reconstruct)

    p = sub.add_parser("regenerate",
                       help="full nil-polynomial from quadratic+cubic parts")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_regenerate)

    p = sub.add_parser("homogeneity", help="local affine homogeneity report")
    p.add_argument("--input", required=True)
    p.add_argument("--no-cross-check", action="store_true")
    p.add_argument("--checkpoint", action="store_true",
                   help="emit per-direction verdicts as they complete")
    common(p)
    p.set_defaults(fn=cmd_homogeneity)

    p = sub.add_parser("grading", help="gradability necessary test")
    p.add_argument("--input", required=True)
    p.add_argument("--witness", help="grading witness JSON (basis + weights)")
    common(p)
    p.set_defaults(fn=cmd_grading)

    p = sub.add_parser("derivations", help="derivation Lie algebra")
    p.add_argument("--input", required=True)
    p.add_argument("--basis", action="store_true")
    p.add_argument("--aff", action="store_true",
                   help="also map derivations to tangent affine maps")
    common(p)
    p.set_defaults(fn=cmd_derivations)

    p = sub.add_parser("smash", help="smash product of two pointed algebras")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    common(p)
    p.set_defaults(fn=cmd_smash)

    p = sub.add_parser("witness", help="verify equivalence / build transitivity witnesses")
    p.add_argument("--kind", choices=("equivalence", "transitivity"),
                   required=True)
    p.add_argument("--p", help="first nil-polynomial (equivalence)")
    p.add_argument("--q", help="second nil-polynomial (equivalence)")
    p.add_argument("--witness", help="witness JSON with alpha and epsilon")
    p.add_argument("--input", help="algebra JSON (transitivity)")
    p.add_argument("--point", help="comma separated rational coordinates")
    p.add_argument("--mode", choices=("socle3", "socle4", "graded"))
    p.add_argument("--grading", help="grading JSON for graded mode")
    common(p)
    p.set_defaults(fn=cmd_witness)

    p = sub.add_parser("family", help="parametric nil-polynomial families")
    p.add_argument("--kind", choices=("degree3", "e6", "degree4"),
                   required=True)
    p.add_argument("--cubic", help="cubic form for the degree3 family")
    p.add_argument("--t")
    p.add_argument("--eps")
    p.add_argument("--algebra-out", help="also write the algebra JSON here")
    common(p)
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("analyze-leading", help="leading form invariants")
    p.add_argument("--input", required=True)
    common(p)
    p.set_defaults(fn=cmd_analyze_leading)

    p = sub.add_parser("jacobi", help="degree-bounded Jacobi ideal membership")
    p.add_argument("--input", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--search", action="store_true",
                   help="try all degrees up to --degree")
    common(p)
    p.set_defaults(fn=cmd_jacobi)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except CliError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
