"""Partition functions, KMS states and symmetries of the Bost-Connes system.

Exit status: 0 on success, 1 on invalid input, 2 when a numerical check fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import __version__
from .arith import ResidueClass
from .dirichlet import (characters_mod, dirichlet_L, kronecker_character, twisted_trace)
from .envelope import (SymplecticSpace, as_matrix, gl2_envelope_check, msp_membership,
                       msp_membership_by_pairs)
from .gl2 import enumerate_hnf, gl2_coefficients, gl2_partition
from .groupoid import (HeckeElement, SymmetryElement, adjoint, coarse_orbits, convolve, inner_mu,
                       presentation_isomorphism_check, symmetry_act)
from .numberfield import (QuadraticField, class_group, dedekind_zeta, hilbert_coefficients,
                          hilbert_partition)
from .report import csv_text, dumps, record_csv
from .spectral import (GibbsState, commutant_dimensions, generator_suite, gibbs_evaluate,
                       gns_check, interior_size, kms_check, norm_bound, partition_function,
                       represent)

EXIT_OK, EXIT_INVALID, EXIT_CHECK_FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --- argument types ---------------------------------------------------------

def cutoff_arg(text: str) -> int:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoff must be a positive integer, got {text!r}")
    if not math.isfinite(x) or x != int(x) or x < 1:
        raise argparse.ArgumentTypeError(f"cutoff must be a positive integer, got {text!r}")
    return int(x)


def positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def finite_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return x


def load_element(source: str) -> HeckeElement:
    """Inline JSON, a path to a JSON file, or ``delta:G`` for the indicator of g = G."""
    if source.startswith("delta:"):
        g = Fraction(source[len("delta:"):])
        if g <= 0:
            raise UsageError(f"group element must be positive, got {g}")
        return HeckeElement.delta(g)
    text = source if source.lstrip().startswith("{") else Path(source).read_text()
    try:
        return HeckeElement.from_json(json.loads(text))
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read Hecke element: {exc}")


def base_point(args) -> int | ResidueClass:
    if args.base_modulus is None:
        return args.base_point
    return ResidueClass.of(args.base_point, args.base_modulus)


def parse_matrix(text: str) -> List[List[Fraction]]:
    try:
        raw = json.loads(text if text.lstrip().startswith("[") else Path(text).read_text())
        return as_matrix(raw)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read matrix: {exc}")


def _complex_fields(prefix: str, z: complex) -> dict:
    return {f"{prefix}_re": z.real, f"{prefix}_im": z.imag}


def _series(command: str, s, **extra) -> dict:
    z = complex(s.value)
    out = {"command": command, "beta": s.beta, "cutoff": s.cutoff, "value": z.real,
           "value_re": z.real, "value_im": z.imag, "tail_bound": s.tail_bound}
    out.update(extra)
    return out


Result = Tuple[dict, Optional[Tuple[List[str], List[list]]], bool]


# --- commands ---------------------------------------------------------------

def cmd_zeta(args) -> Result:
    s = partition_function(args.beta, args.cutoff)
    return _series("zeta", s), None, True


def cmd_dedekind(args) -> Result:
    F = QuadraticField(args.disc)
    s = dedekind_zeta(F, args.beta, args.cutoff)
    a = F.coefficient_table(args.cutoff)
    table = (["n", "a_n"], [[n, int(a[n])] for n in range(1, args.cutoff + 1)])
    return _series("dedekind", s, d=args.disc, tail=s.tail_bound), table, True


def _character(args):
    if args.disc is not None:
        return kronecker_character(args.disc, args.modulus)
    if args.modulus is None:
        raise UsageError("give --modulus (with --index) or --disc")
    chars = characters_mod(args.modulus)
    if not 0 <= args.index < len(chars):
        raise UsageError(f"--index must lie in [0, {len(chars)}) for modulus {args.modulus}")
    return chars[args.index]


def cmd_dirichlet_l(args) -> Result:
    chi = _character(args)
    s = dirichlet_L(chi, args.beta, args.cutoff)
    trace = twisted_trace(chi, args.beta, args.cutoff)
    diff = abs(complex(s.value) - trace)
    tol = 1e-12 if args.tolerance is None else args.tolerance
    z = complex(s.value)
    report = {"command": "dirichlet-l", "beta": s.beta, "cutoff": s.cutoff,
              "value_re": z.real, "value_im": z.imag, "tail_bound": s.tail_bound,
              "trace_re": trace.real, "trace_im": trace.imag, "path_difference": diff,
              "tolerance": tol, "ok": diff <= tol, "character": chi.to_json()}
    return report, None, diff <= tol


def cmd_gl2_partition(args) -> Result:
    s = gl2_partition(args.beta, args.cutoff, args.config)
    hnf = gl2_coefficients(args.cutoff, "hnf")
    sig = gl2_coefficients(args.cutoff, "sigma")
    agree = bool((hnf == sig).all())
    table = (["n", "sigma1", "hnf_count"],
             [[n, int(sig[n]), int(hnf[n])] for n in range(1, args.cutoff + 1)])
    return (_series("gl2-partition", s, config=args.config, coefficients_agree=agree),
            table, agree)


def cmd_hilbert_partition(args) -> Result:
    F = QuadraticField(args.disc)
    s = hilbert_partition(F, args.beta, args.cutoff)
    c = hilbert_coefficients(F, args.cutoff)
    table = (["n", "c_n"], [[n, int(c[n])] for n in range(1, args.cutoff + 1)])
    return _series("hilbert-partition", s, d=args.disc, tail=s.tail_bound), table, True


def _elements(args, default: Sequence[HeckeElement]) -> List[HeckeElement]:
    if args.element:
        return [load_element(e) for e in args.element]
    return list(default)


def cmd_gibbs(args) -> Result:
    state = GibbsState(args.beta, base_point(args), args.cutoff)
    (f,) = _elements(args, [HeckeElement.identity()])[:1]
    v = gibbs_evaluate(state, f)
    report = {"command": "gibbs", "beta": args.beta, "cutoff": args.cutoff,
              **_complex_fields("value", v.value), "error_bound": v.error_bound}
    return report, None, True


def cmd_kms_check(args) -> Result:
    state = GibbsState(args.beta, base_point(args), args.cutoff)
    d2 = HeckeElement.delta(2)
    fs = _elements(args, [d2, adjoint(d2)])
    if len(fs) != 2:
        raise UsageError("kms-check needs exactly two --element values")
    r = kms_check(state, fs[0], fs[1])
    tol = r.tolerance if args.tolerance is None else args.tolerance
    report = {"command": "kms-check", "beta": args.beta, "cutoff": args.cutoff,
              **_complex_fields("lhs", r.lhs), **_complex_fields("rhs", r.rhs),
              "residual": r.residual, "truncation_tolerance": r.tolerance,
              "tolerance": tol, "ok": r.residual <= tol}
    return report, None, r.residual <= tol


def cmd_symmetry_check(args) -> Result:
    (f,) = _elements(args, [HeckeElement.indicator(3, 1, 4) + HeckeElement.delta(2)])[:1]
    n = args.index
    mu = inner_mu(n, f.level)
    inner = convolve(convolve(mu, f), adjoint(mu))
    theta = symmetry_act(f, SymmetryElement(n))
    structural = inner == theta
    block = interior_size(args.cutoff, mu, f, mu)
    a = represent(theta, base_point(args), args.cutoff).dense()[:block, :block]
    b = represent(inner, base_point(args), args.cutoff).dense()[:block, :block]
    dev = float(abs(a - b).max()) if block else 0.0
    tol = 1e-12 if args.tolerance is None else args.tolerance
    ok = structural and dev <= tol
    report = {"command": "symmetry-check", "n": n, "cutoff": args.cutoff,
              "interior_block": block, "structural_equal": structural,
              "max_deviation": dev, "tolerance": tol, "ok": ok}
    return report, None, ok


def cmd_orbit(args) -> Result:
    orbits = coarse_orbits(args.level, args.bound)
    report = {"command": "orbit", "level": args.level, "bound": args.bound,
              "orbit_count": len(orbits), "orbits": [[list(p) for p in o] for o in orbits]}
    rows = [[i, r, z] for i, o in enumerate(orbits) for r, z in o]
    return report, (["orbit", "residue", "sign"], rows), True


def cmd_iso_check(args) -> Result:
    r = presentation_isomorphism_check(args.level, args.bound)
    return {"command": "iso-check", **r.to_json()}, None, r.ok


def cmd_class_group(args) -> Result:
    data = class_group(args.disc)
    report = {"command": "class-group", **data.to_json()}
    return report, (["a", "b", "c"], [list(f) for f in data.forms]), True


def cmd_msp_check(args) -> Result:
    m = parse_matrix(args.matrix)
    if args.envelope == "gl2":
        v = gl2_envelope_check(m)
        report = {"command": "msp-check", "envelope": "gl2", "size": len(m), **v.to_json(),
                  "paths_agree": True}
        return report, None, True
    if len(m) % 2:
        raise UsageError(f"matrix size {len(m)} is odd; MSp needs an even size 2g")
    space = SymplecticSpace(len(m) // 2)
    v = msp_membership(space, m)
    w = msp_membership_by_pairs(space, m)
    agree = v == w
    report = {"command": "msp-check", "envelope": "msp", "size": len(m), **v.to_json(),
              "paths_agree": agree}
    return report, None, agree


def cmd_gns_check(args) -> Result:
    state = GibbsState(args.beta, base_point(args), args.cutoff)
    (f,) = _elements(args, [HeckeElement.indicator(1, 0, 2)])[:1]
    r = gns_check(state, f, args.cutoff, args.exponent)
    tol = 1e-10 if args.tolerance is None else args.tolerance
    report = {"command": "gns-check", "beta": args.beta, "cutoff": args.cutoff,
              "weight_exponent": -args.beta / 2 if args.exponent is None else args.exponent,
              **r.to_json(), "tolerance": tol, "ok": r.deviation <= tol}
    return report, None, r.deviation <= tol


def cmd_norm_bound(args) -> Result:
    (f,) = _elements(args, [HeckeElement.delta(2)])[:1]
    r = norm_bound(f, base_point(args), args.cutoff)
    ok = r.estimate <= r.bound * (1 + 1e-12)
    return {"command": "norm-bound", "cutoff": args.cutoff, **r.to_json()}, None, ok


def cmd_commutant(args) -> Result:
    if args.element:
        names = list(args.element)
        fs = [load_element(e) for e in args.element]
    else:
        suite = generator_suite(args.cutoff, args.modulus)
        names = [n for n, _ in suite]
        fs = [f for _, f in suite]
    dims = commutant_dimensions(fs, base_point(args), args.cutoff)
    monotone = all(a >= b for a, b in zip(dims, dims[1:]))
    report = {"command": "commutant", "cutoff": args.cutoff, "generators": ["none"] + names,
              "dimensions": dims, "final_dimension": dims[-1], "monotone": monotone}
    rows = [[name, d] for name, d in zip(["none"] + names, dims)]
    return report, (["generator", "dimension"], rows), monotone


# --- parser -----------------------------------------------------------------

def _add_common(p, *names: str, cutoff: int = 10**4):
    if "beta" in names:
        p.add_argument("--beta", type=finite_float, required=True, help="inverse temperature")
    if "cutoff" in names:
        p.add_argument("--cutoff", type=cutoff_arg, default=cutoff,
                       help=f"truncation (default {cutoff}; accepts 1e6)")
    if "disc" in names:
        p.add_argument("-d", "--disc", type=int, required=True, help="fundamental discriminant")
    if "level" in names:
        p.add_argument("--level", type=positive_int, required=True, help="level M")
    if "bound" in names:
        p.add_argument("--bound", type=positive_int, required=True, help="height bound B")
    if "element" in names:
        p.add_argument("--element", action="append",
                       help="Hecke element: inline JSON, JSON file, or delta:G (repeatable)")
    if "base" in names:
        p.add_argument("--base-point", type=int, default=1, help="base point residue (default 1)")
        p.add_argument("--base-modulus", type=positive_int, default=None,
                       help="modulus of the base point class")
    if "tolerance" in names:
        p.add_argument("--tolerance", type=finite_float, default=None,
                       help="override the check tolerance")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default=None, help="output file (default standard output)")


COMMANDS: Dict[str, Tuple[Callable[..., Result], str]] = {
    "zeta": (cmd_zeta, "partial Riemann zeta = Trace(e^{-beta H})"),
    "dedekind": (cmd_dedekind, "Dedekind zeta of a quadratic field"),
    "dirichlet-l": (cmd_dirichlet_l, "Dirichlet L-series and the twisted trace"),
    "gl2-partition": (cmd_gl2_partition, "partition function sum sigma1(n) n^-beta"),
    "hilbert-partition": (cmd_hilbert_partition, "Hilbert-modular partition function"),
    "kms-check": (cmd_kms_check, "KMS residual of a pair of Hecke elements"),
    "gibbs": (cmd_gibbs, "evaluate the truncated Gibbs state"),
    "symmetry-check": (cmd_symmetry_check, "compare mu_n f mu_n^* with theta_n(f)"),
    "orbit": (cmd_orbit, "orbits on (Z/M) x {+-1}"),
    "iso-check": (cmd_iso_check, "compare the two groupoid presentations"),
    "class-group": (cmd_class_group, "reduced forms of an imaginary quadratic discriminant"),
    "msp-check": (cmd_msp_check, "enveloping-semigroup membership"),
    "gns-check": (cmd_gns_check, "GNS vector against the Gibbs state"),
    "norm-bound": (cmd_norm_bound, "operator norm estimate and l1 bound"),
    "commutant": (cmd_commutant, "joint commutant dimensions along a generator suite"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bostconnes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name):
        func, text = COMMANDS[name]
        p = sub.add_parser(name, help=text, description=text)
        p.set_defaults(func=func)
        return p

    _add_common(add("zeta"), "beta", "cutoff")
    _add_common(add("dedekind"), "beta", "cutoff", "disc")
    p = add("dirichlet-l")
    _add_common(p, "beta", "cutoff", "tolerance")
    p.add_argument("--modulus", type=positive_int, default=None, help="character modulus")
    p.add_argument("--index", type=int, default=0, help="position in the list of characters")
    p.add_argument("-d", "--disc", type=int, default=None, help="use the Kronecker character of d")
    p = add("gl2-partition")
    _add_common(p, "beta", "cutoff")
    p.add_argument("--config", choices=("hnf", "sigma"), default="hnf",
                   help="coefficient source (default hnf)")
    _add_common(add("hilbert-partition"), "beta", "cutoff", "disc")
    _add_common(add("kms-check"), "beta", "cutoff", "element", "base", "tolerance")
    _add_common(add("gibbs"), "beta", "cutoff", "element", "base")
    p = add("symmetry-check")
    _add_common(p, "cutoff", "element", "base", "tolerance", cutoff=64)
    p.add_argument("--index", type=positive_int, default=2, help="n of theta_(n,n) (default 2)")
    _add_common(add("orbit"), "level", "bound")
    _add_common(add("iso-check"), "level", "bound")
    _add_common(add("class-group"), "disc")
    p = add("msp-check")
    _add_common(p)
    p.add_argument("--matrix", required=True, help='JSON rows of rationals, e.g. [["2","0"],["0","3"]]')
    p.add_argument("--envelope", choices=("msp", "gl2"), default="msp")
    p = add("gns-check")
    _add_common(p, "beta", "cutoff", "element", "base", "tolerance", cutoff=512)
    p.add_argument("--exponent", type=finite_float, default=None,
                   help="weight exponent of the GNS vector (default -beta/2)")
    _add_common(add("norm-bound"), "cutoff", "element", "base", cutoff=64)
    p = add("commutant")
    _add_common(p, "cutoff", "element", "base", cutoff=16)
    p.add_argument("--modulus", type=positive_int, default=4,
                   help="modulus of the diagonal classes in the default suite")
    return parser


def render(report: dict, table, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    if table is not None:
        return csv_text(*table)
    flat = {k: v for k, v in report.items() if not isinstance(v, (dict, list))}
    return record_csv(flat)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, table, ok = args.func(args)
    except (UsageError, ValueError, OverflowError, ZeroDivisionError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = render(report, table, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if not ok:
        print(f"{parser.prog} {args.command}: check failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
