"""Command-line front end: ``htensor <verb> ...``.

Exit codes: 0 success, 1 usage error, 2 unreadable or malformed input
file, 3 numerical failure (singular tensor, non-convergence, failed
precondition such as antisymmetry).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from htensor import core, cp, inversion, io, products, spectra, symmetry
from htensor.core import NormalizationMode
from htensor.errors import (
    FormatError,
    NotAntisymmetricError,
    ShapeMismatchError,
    SingularError,
    SizeLimitError,
)
from htensor.permutation import Permutation

TENSOR_SUFFIXES = (".ht", ".htb")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class NumericalError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt(x: float) -> str:
    return io.format_float(x)


def _vec(x) -> str:
    return "[" + " ".join(_fmt(v) for v in np.asarray(x).tolist()) + "]"


def _load(path: str, allow_nonfinite: bool = False) -> core.DenseTensor:
    try:
        return io.read_tensor(path, allow_nonfinite=allow_nonfinite)
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror or exc})") from None
    except FormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_vectors(paths) -> list[np.ndarray]:
    vectors = []
    for p in paths:
        t = _load(p)
        if t.order != 1:
            raise InputError(f"{p}: expected a vector file (order 1), got order {t.order}")
        vectors.append(np.array(t.data))
    return vectors


def _check_output(path: str | None, flag: str = "-o/--output", suffixes=TENSOR_SUFFIXES):
    if path is None:
        return
    if Path(path).suffix.lower() not in suffixes:
        raise UsageError(f"{flag}: {path!r} must end in one of {', '.join(suffixes)}")


def _save(args, tensor: core.DenseTensor):
    io.write_tensor(args.output, tensor)
    print(f"wrote {args.output}: order {tensor.order}, dims {' '.join(map(str, tensor.shape))}")


def _perm(text: str, m: int | None = None, flag: str = "--perm") -> Permutation:
    try:
        return Permutation.parse(text, m)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _norm(text: str) -> NormalizationMode:
    try:
        return NormalizationMode.parse(text)
    except ValueError as exc:
        raise UsageError(f"--norm: {exc}") from None


# ---------------------------------------------------------------- make


def cmd_make(args):
    _check_output(args.output)
    kind = args.kind
    if kind == "identity":
        t = core.identity_tensor(args.half_order, args.dim)
    elif kind == "zero":
        t = core.zeros(args.dims)
    elif kind == "sas":
        t = symmetry.standard_sas(args.dim)
    else:
        norm = _norm(args.norm) if kind in ("wedge", "vee") else None
        vectors = _load_vectors(args.vectors)
        if kind == "wedge":
            t = symmetry.wedge(vectors, norm)
        elif kind == "vee":
            t = symmetry.vee(vectors, norm)
        else:
            t = products.outer_chain(vectors)
    _save(args, t)
    return 0


# ---------------------------------------------------------------- product


def _parse_pairs(text: str):
    pairs = []
    for chunk in filter(None, (c.strip() for c in text.split(","))):
        try:
            a, b = chunk.split(":")
            pairs.append((int(a), int(b)))
        except ValueError:
            raise UsageError(f"--pairs: cannot parse {chunk!r}; expected A:B[,A:B...]") from None
    return tuple(pairs)


def _parse_ints(text: str, flag: str):
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"{flag}: expected integers, got {text!r}") from None


def cmd_product(args):
    _check_output(args.output)
    kind = args.kind
    if kind == "s":
        spec = products.ContractionSpec(
            _parse_pairs(args.pairs),
            None if args.placement is None else _parse_ints(args.placement, "--placement"),
        )
    if kind == "bowtie":
        norm = _norm(args.norm)
    A = _load(args.a)
    B = _load(args.b)
    if kind == "outer":
        t = products.outer_product(A, B)
    elif kind == "mode":
        t = products.mode_product(A, B.data, args.mode)
    elif kind == "t":
        t = products.t_product(A, B, circular=not args.literal)
    elif kind == "s":
        t = products.s_product(A, B, spec)
    elif kind == "contract":
        t = products.contract_k(A, B, args.k)
    else:
        t = products.bowtie(A, B, signed=args.signed, normalization=norm)
    _save(args, t)
    return 0


# ---------------------------------------------------------------- inversion


def cmd_invert(args):
    _check_output(args.output)
    A = _load(args.input)
    inv = inversion.invert(A, pivot_tol=args.pivot_tol)
    k = A.order // 2
    residual = core.max_abs_diff(products.contract_k(A, inv, k), core.identity_tensor(k, A.shape[0]))
    _save(args, inv)
    print(f"residual max|A B - I| = {_fmt(residual)}")
    return 0


def cmd_det(args):
    A = _load(args.input)
    d = inversion.ns_det(A)
    pivots = inversion.ns_pivots(A)
    print(f"ns_det = {_fmt(d)}")
    print(f"smallest pivot = {_fmt(float(pivots.min()))}")
    return 0


def cmd_unfold(args):
    _check_output(args.output)
    ns = inversion.normal_unfold(_load(args.input))
    _save(args, core.DenseTensor(ns.data))
    return 0


# ---------------------------------------------------------------- symmetry


def cmd_classify(args):
    if args.kind == "sigma":
        _perm(args.perm)  # syntax check before touching files
    A = _load(args.input)
    if args.kind == "symmetric":
        rep = symmetry.is_symmetric(A, args.tol)
    elif args.kind == "antisymmetric":
        rep = symmetry.is_antisymmetric(A, args.tol)
    else:
        sigma = _perm(args.perm, A.order)
        check = symmetry.is_sign_symmetric if args.signed else symmetry.is_sigma_symmetric
        rep = check(A, sigma, args.tol)
    print(f"{args.kind}: {'yes' if rep.holds else 'no'}")
    print(f"max violation = {_fmt(rep.violation)}")
    if rep.witness is not None and not rep.holds:
        print(f"worst permutation = {rep.witness}")
    return 0


def cmd_decompose(args):
    _check_output(args.output)
    A = _load(args.input)
    try:
        if args.kind == "antisym-matrix":
            res = symmetry.antisym_matrix_separability(A, args.tol)
            print(f"separable: {'yes' if res.separable else 'no'}")
            print(f"rank = {res.rank}")
            return 0
        res = symmetry.sas_decompose(A, args.tol)
    except NotAntisymmetricError as exc:
        raise NumericalError(f"{args.input}: {exc}") from None
    if isinstance(res, symmetry.NotDecomposable):
        print("separable: no")
        print(f"residual = {_fmt(res.residual)} (threshold {_fmt(res.threshold)})")
        return 0
    print("separable: yes")
    print(f"scale = {_fmt(res.scale)}")
    print(f"residual = {_fmt(res.residual)}")
    for j, v in enumerate(res.vectors, start=1):
        print(f"v{j} = {_vec(v)}")
    if args.output:
        cols = np.array(res.vectors).T.copy()
        cols[:, 0] *= res.scale
        _save(args, core.DenseTensor(cols))
    return 0


def cmd_subspace_dim(args):
    sigma = _perm(args.perm, args.order)
    d = symmetry.fixed_subspace_dim(args.order, args.dim, sigma, signed=args.signed)
    label = "sign-symmetric" if args.signed else "symmetric"
    print(f"dim of {label} subspace for sigma={sigma} (m={args.order}, n={args.dim}) = {d}")
    return 0


# ---------------------------------------------------------------- spectra


def cmd_eig(args):
    _check_output(args.output)
    A = _load(args.input)
    if args.symmetrize:
        A = symmetry.symmetrize(A, NormalizationMode.PROJECTOR)
    try:
        pair = spectra.sshopm(A, args.shift, args.seed, args.max_iter, args.tol)
    except ValueError as exc:
        raise NumericalError(f"{args.input}: {exc}") from None
    print(f"lambda = {_fmt(pair.lam)}")
    print(f"u = {_vec(pair.u)}")
    print(f"residual = {_fmt(pair.residual)}")
    print(f"iterations = {pair.iterations}")
    if args.output:
        _save(args, core.DenseTensor(pair.u))
    if not pair.converged:
        raise NumericalError(f"non-convergence after {pair.iterations} iterations")
    return 0


def cmd_probe(args):
    A = _load(args.input)
    rep = spectra.definiteness_probe(A, args.samples, args.seed)
    print(f"verdict = {rep.verdict}")
    print(f"f_min = {_fmt(rep.f_min)}")
    print(f"f_max = {_fmt(rep.f_max)}")
    for x, f in rep.witnesses:
        print(f"witness f = {_fmt(f)} at x = {_vec(x)}")
    return 0


def cmd_rank(args):
    if args.kind == "family":
        vectors = _load_vectors(args.vectors)
        r = spectra.permuted_family_rank(vectors, args.tol)
        print(f"rank of permuted family = {r} (of {len(vectors)}! members)")
        return 0
    _check_output(args.output, suffixes=(".json",))
    A = _load(args.input)
    ev = cp.rank_estimate(
        A, args.max_rank, args.restarts, args.iters, args.seed, args.fit_tol
    )
    print(f"matricization lower bound = {ev.lower_bound}")
    print("R  best_fit  best_restart  restarts_used  reached")
    for row in ev.rows:
        print(
            f"{row.rank}  {_fmt(row.best_fit)}  {row.best_restart}  "
            f"{row.restarts_used}  {'yes' if row.reached else 'no'}"
        )
    print(f"estimate = {ev.estimate}")
    if args.output:
        Path(args.output).write_text(json.dumps(ev.to_dict(), indent=2, sort_keys=True) + "\n")
        print(f"wrote {args.output}")
    return 0


def cmd_convert(args):
    _check_output(args.output)
    _save(args, _load(args.input, allow_nonfinite=args.allow_nonfinite))
    return 0


# ---------------------------------------------------------------- parser


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="htensor", description="Dense hypercubic tensor algebra.")
    verbs = parser.add_subparsers(dest="verb", required=True, metavar="VERB")

    def out(p, required=True):
        p.add_argument("-o", "--output", required=required, help="output tensor file (.ht/.htb)")

    norm_help = "normalization: unit, sqrt or projector"

    make = verbs.add_parser("make", help="construct a tensor")
    kinds = make.add_subparsers(dest="kind", required=True, metavar="KIND")
    p = kinds.add_parser("identity")
    p.add_argument("--half-order", type=_positive, required=True)
    p.add_argument("--dim", type=_positive, required=True)
    out(p)
    p = kinds.add_parser("zero")
    p.add_argument("--dims", type=_positive, nargs="+", required=True)
    out(p)
    p = kinds.add_parser("sas")
    p.add_argument("--dim", type=_positive, required=True)
    out(p)
    for name in ("wedge", "vee"):
        p = kinds.add_parser(name)
        p.add_argument("vectors", nargs="+")
        p.add_argument("--norm", default="sqrt", help=norm_help)
        out(p)
    p = kinds.add_parser("from-vectors")
    p.add_argument("vectors", nargs="+")
    out(p)
    make.set_defaults(func=cmd_make)

    prod = verbs.add_parser("product", help="multiply two tensors")
    kinds = prod.add_subparsers(dest="kind", required=True, metavar="KIND")
    p = kinds.add_parser("outer")
    p.add_argument("a")
    p.add_argument("b")
    out(p)
    p = kinds.add_parser("mode")
    p.add_argument("a")
    p.add_argument("b", help="matrix (order 2) or vector (order 1) file")
    p.add_argument("--mode", type=_positive, required=True)
    out(p)
    p = kinds.add_parser("t")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--literal", action="store_true", help="drop out-of-range third indices")
    out(p)
    p = kinds.add_parser("s")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--pairs", default="", help="contracted mode pairs, e.g. 2:1,3:2")
    p.add_argument("--placement", default=None, help="output position of each surviving mode")
    out(p)
    p = kinds.add_parser("contract")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--k", type=_nonneg, required=True)
    out(p)
    p = kinds.add_parser("bowtie")
    p.add_argument("a")
    p.add_argument("b", help="vector file")
    p.add_argument("--signed", action="store_true")
    p.add_argument("--norm", default="projector", help=norm_help)
    out(p)
    prod.set_defaults(func=cmd_product)

    p = verbs.add_parser("invert", help="invert an even-order tensor")
    p.add_argument("input")
    p.add_argument("--pivot-tol", type=float, default=1e-12)
    out(p)
    p.set_defaults(func=cmd_invert)

    p = verbs.add_parser("det", help="determinant of the normal-square matrix")
    p.add_argument("input")
    p.set_defaults(func=cmd_det)

    p = verbs.add_parser("unfold", help="normal unfolding to an n^k x n^k matrix")
    p.add_argument("input")
    out(p)
    p.set_defaults(func=cmd_unfold)

    cls = verbs.add_parser("classify", help="symmetry checks")
    kinds = cls.add_subparsers(dest="kind", required=True, metavar="KIND")
    for name in ("symmetric", "antisymmetric", "sigma"):
        p = kinds.add_parser(name)
        p.add_argument("input")
        p.add_argument("--tol", type=float, default=1e-10)
        if name == "sigma":
            p.add_argument("--perm", required=True, help='"2,3,4,1" or "(1 2 3 4)"')
            p.add_argument("--signed", action="store_true")
    cls.set_defaults(func=cmd_classify)

    dec = verbs.add_parser("decompose", help="separability tests")
    kinds = dec.add_subparsers(dest="kind", required=True, metavar="KIND")
    p = kinds.add_parser("sas")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    out(p, required=False)
    p = kinds.add_parser("antisym-matrix")
    p.add_argument("input")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(output=None)
    dec.set_defaults(func=cmd_decompose)

    p = verbs.add_parser("eig", help="H-eigenpair by shifted power iteration")
    p.add_argument("input")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--shift", type=float, default=None)
    p.add_argument("--max-iter", type=_positive, default=5000)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--symmetrize", action="store_true")
    out(p, required=False)
    p.set_defaults(func=cmd_eig)

    p = verbs.add_parser("probe", help="definiteness evidence by sampling")
    p.add_argument("input")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--samples", type=_positive, default=1000)
    p.set_defaults(func=cmd_probe)

    rank = verbs.add_parser("rank", help="CP rank evidence")
    kinds = rank.add_subparsers(dest="kind", required=True, metavar="KIND")
    p = kinds.add_parser("estimate")
    p.add_argument("input")
    p.add_argument("--max-rank", type=_positive, required=True)
    p.add_argument("--restarts", type=_positive, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--iters", type=_positive, default=500)
    p.add_argument("--fit-tol", type=float, default=1e-6)
    p.add_argument("-o", "--output", default=None, help="evidence table (.json)")
    p = kinds.add_parser("family")
    p.add_argument("vectors", nargs="+")
    p.add_argument("--tol", type=float, default=1e-10)
    rank.set_defaults(func=cmd_rank)

    p = verbs.add_parser("subspace-dim", help="dimension of a sigma-(sign-)symmetric subspace")
    p.add_argument("--order", type=_positive, required=True)
    p.add_argument("--dim", type=_positive, required=True)
    p.add_argument("--perm", required=True)
    p.add_argument("--signed", action="store_true")
    p.set_defaults(func=cmd_subspace_dim)

    p = verbs.add_parser("convert", help="convert between .ht and .htb")
    p.add_argument("input")
    p.add_argument("--allow-nonfinite", action="store_true")
    out(p)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ShapeMismatchError, SizeLimitError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SingularError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
