"""Command-line front end.

Every report is a JSON object with ``"schema": 1``, the rule name and hash,
the approximant level and the evidence parameters used.  Exit codes: 0 on
success, 1 on a domain error (a JSON error document is printed), 2 on a usage
error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import language, seqdyn, spectra, subst
from .errors import ResourceLimit, TilingError
from .exactnum import FieldElement, frac_str, sign
from .render import RenderSpec, render_svg
from .tiling import CanonicalPatch, Patch, patch_from_csv, patch_to_csv

SCHEMA = 1
MAX_AUTO_LEVEL = 12


class UsageError(Exception):
    pass


# serialisation

def ser(x):
    if isinstance(x, FieldElement):
        return frac_str(x.c[0]) if x.field.degree == 1 else [frac_str(c) for c in x.c]
    if isinstance(x, Fraction):
        return frac_str(x)
    if isinstance(x, CanonicalPatch):
        return {"anchor": ser(x.anchor_shift), "tiles": ser(x.patch)}
    if isinstance(x, Patch):
        return [[t.proto] + [ser(e) for e in t.shift] for t in x.sorted_tiles()]
    if isinstance(x, dict):
        return {str(k): ser(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [ser(v) for v in items]
    return x


def dumps(doc) -> str:
    return json.dumps(ser(doc), indent=1, sort_keys=True) + "\n"


def csv_rows(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([ser(v) if not isinstance(v, (list, tuple)) else " ".join(map(str, ser(v))) for v in r])
    return buf.getvalue()


# argument parsing

def parse_scalar(field, text: str):
    try:
        if ":" in text:
            return field.element([Fraction(c) for c in text.split(":")])
        return field.coerce(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot read number {text!r}: {exc}") from None


def parse_vector(field, text: str, dim: int):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != dim:
        raise UsageError(f"expected {dim} comma-separated components, got {text!r}")
    return tuple(parse_scalar(field, p) for p in parts)


def parse_tol(text: str) -> Fraction:
    t = text.replace(" ", "")
    if t.startswith("2^"):
        try:
            return Fraction(2) ** int(t[2:])
        except ValueError:
            raise UsageError(f"bad tolerance {text!r}") from None
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad tolerance {text!r}") from None


def _tile_rule(ref: str):
    rule = subst.load_rule(ref)
    if isinstance(rule, seqdyn.WordSubstitution):
        raise UsageError(f"{ref} is a word substitution; use the seq commands")
    return rule


def _word_rule(ref: str):
    rule = subst.load_rule(ref)
    if not isinstance(rule, seqdyn.WordSubstitution):
        raise UsageError(f"{ref} is a tile substitution; seq commands need kind 'word'")
    return rule


def _approx(rule, level, need2=None, interior=False):
    seed = subst.find_seed(rule, interior=interior)
    if level is not None:
        return subst.grow(rule, seed, level)
    last = None
    for m in range(1, MAX_AUTO_LEVEL + 1):
        try:
            last = subst.grow(rule, seed, m)
        except ResourceLimit:
            if last is None:
                raise
            return last
        if need2 is None or sign(last.coverage_radius2 - need2) > 0:
            return last
    return last


def _sq(field, text):
    r = parse_scalar(field, text)
    return r * r


def _entry(approx, args, which="entry"):
    """A patch given either by index into the language at --R or by a CSV file."""
    path = getattr(args, which.replace("entry", "patch"), None)
    if path:
        with open(path) as fh:
            return patch_from_csv(fh.read(), approx.rule.protos)
    idx = getattr(args, which)
    if idx is None:
        raise UsageError(f"--{which} or --{which.replace('entry', 'patch')} is required")
    r2 = _sq(approx.rule.field, args.R)
    lang = language.language_at(approx, r2, stabilized_check=False)
    if not 0 <= idx < len(lang.entries):
        raise UsageError(f"--{which} {idx} out of range (language has {len(lang.entries)} entries)")
    return lang.entries[idx]


def _base(args, rule, approx=None, **evidence) -> dict:
    doc = {"schema": SCHEMA, "command": args.command_name, "rule": rule.name, "rule_hash": rule.digest()}
    if approx is not None:
        doc["level"] = approx.level
        doc["coverage_radius2"] = approx.coverage_radius2
    doc["evidence"] = evidence
    return doc


# commands

def cmd_rule_validate(args):
    rule = subst.load_rule(args.rule)
    if isinstance(rule, seqdyn.WordSubstitution):
        doc = {"schema": SCHEMA, "command": args.command_name, "rule": rule.name, "rule_hash": rule.digest(),
               "kind": "word", "alphabet": list(rule.alphabet), "primitive": seqdyn.seq_primitive(rule),
               "valid": True, "evidence": {}}
        return doc, None
    ok, k = subst.primitivity_check(rule)
    doc = _base(args, rule)
    doc.update(kind=rule.kind, dim=rule.dim, prototiles=len(rule.protos), valid=True,
               primitive={"primitive": ok, "power": k}, support_L=rule.support_L,
               incidence=rule.incidence_matrix())
    return doc, None


def cmd_rule_seed(args):
    rule = _tile_rule(args.rule)
    seed = subst.find_seed(rule, max_n=args.max_n, interior=args.interior)
    doc = _base(args, rule, max_n=args.max_n, interior=args.interior)
    doc.update(seed={"proto": seed.proto, "x": seed.x, "n": seed.n})
    return doc, None


def cmd_rule_grow(args):
    rule = _tile_rule(args.rule)
    approx = _approx(rule, args.level if args.level is not None else 3)
    doc = _base(args, rule, approx)
    doc.update(tiles=len(approx), center=approx.center)
    if args.format == "csv":
        return doc, patch_to_csv(approx.patch)
    if args.format == "svg":
        return doc, render_svg(approx.patch, RenderSpec())
    doc["patch"] = approx.patch
    return doc, None


def cmd_lang(args):
    rule = _tile_rule(args.rule)
    r2 = _sq(rule.field, args.R)
    approx = _approx(rule, args.level, 4 * r2)
    lang = language.language_at(approx, r2, stabilized_check=not args.no_stability)
    doc = _base(args, rule, approx, R2=r2)
    doc.update(count=len(lang.entries), stabilized=lang.stabilized)
    if args.format == "csv":
        rows = [(i, len(e.patch), e.anchor_shift) for i, e in enumerate(lang.entries)]
        return doc, csv_rows(["entry", "tiles", "anchor"], rows)
    doc["entries"] = lang.entries
    return doc, None


def _window_need(rule, args):
    """Squared window, and the coverage needed to hold it plus the patch radius."""
    w = parse_scalar(rule.field, args.window)
    r = parse_scalar(rule.field, args.R) if args.R else rule.field.zero
    reach = w + 2 * r
    return w * w, reach * reach


def cmd_occ(args):
    rule = _tile_rule(args.rule)
    w2, need = _window_need(rule, args)
    approx = _approx(rule, args.level, need)
    p = _entry(approx, args)
    occ = language.occurrences(approx, p, w2)
    doc = _base(args, rule, approx, window2=w2, R2=_sq(rule.field, args.R) if args.R else None)
    doc.update(count=len(occ))
    if args.format == "csv":
        return doc, csv_rows(["shift"], [(t,) for t in occ])
    doc["occurrences"] = occ
    return doc, None


def cmd_disp(args):
    rule = _tile_rule(args.rule)
    w2, need = _window_need(rule, args)
    approx = _approx(rule, args.level, need)
    p1 = _entry(approx, args, "entry")
    p2 = _entry(approx, args, "entry2")
    D = language.displacement_set(approx, p1, p2, w2)
    doc = _base(args, rule, approx, window2=w2, R2=_sq(rule.field, args.R) if args.R else None)
    doc.update(count=len(D.shifts))
    if args.format == "csv":
        return doc, csv_rows(["displacement"], [(d,) for d in D.shifts])
    doc["displacements"] = D.shifts
    return doc, None


def cmd_legal(args):
    rule = _tile_rule(args.rule)
    if not args.patch:
        raise UsageError("--patch is required")
    with open(args.patch) as fh:
        p = patch_from_csv(fh.read(), rule.protos)
    seed = subst.find_seed(rule)
    v = language.is_legal(rule, seed, p, args.max_level)
    doc = _base(args, rule, max_level=args.max_level, searched_window2=v.searched_window2)
    doc.update(status=v.status, witness=v.witness, level=v.level)
    return doc, None


def cmd_returns(args):
    rule = _tile_rule(args.rule)
    w2 = _sq(rule.field, args.window)
    approx = _approx(rule, args.level, w2)
    zs = language.return_vectors(approx, w2)
    doc = _base(args, rule, approx, max_norm2=w2)
    doc.update(count=len(zs))
    if args.format == "csv":
        return doc, csv_rows(["z"], [(z,) for z in zs])
    doc["returns"] = zs
    return doc, None


def cmd_spec_analyze(args):
    rule = _tile_rule(args.rule)
    rep = spectra.spectrum_analyze(rule)
    doc = _base(args, rule, root_width="2^-20")
    doc.update(rep.to_json())
    return doc, None


def _eigen_doc(rep):
    return {"a": rep.a, "verdict": rep.verdict, "returns": len(rep.returns), "return_norm2": rep.return_norm2}


def cmd_eigen_verify(args):
    rule = _tile_rule(args.rule)
    if not args.a:
        raise UsageError("--a is required")
    a = parse_vector(rule.field, args.a, rule.dim)
    w2 = _sq(rule.field, args.window)
    approx = _approx(rule, args.level, w2)
    rep = spectra.eigen_verify(approx, a, w2, N=args.N, tol=parse_tol(args.tol))
    doc = _base(args, rule, approx, return_norm2=w2, N=args.N, tol=args.tol)
    doc.update(_eigen_doc(rep))
    return doc, None


def cmd_eigen_scan(args):
    rule = _tile_rule(args.rule)
    if not args.target:
        raise UsageError("--target is required (one or more vectors)")
    F = [parse_vector(rule.field, t, rule.dim) for t in args.target]
    eps = parse_scalar(rule.field, args.eps)
    w2 = _sq(rule.field, args.window)
    approx = _approx(rule, args.level, w2)
    found = spectra.eigen_candidates(approx, F, eps, k_max=args.k_max, return_norm2=w2)
    doc = _base(args, rule, approx, eps=eps, k_max=args.k_max, return_norm2=w2)
    doc.update(matches=found)
    return doc, None


def cmd_forbidden_verify(args):
    rule = _tile_rule(args.rule)
    if not args.a:
        raise UsageError("--a is required")
    a = parse_vector(rule.field, args.a, rule.dim)
    w2, need = _window_need(rule, args)
    approx = _approx(rule, args.level, need)
    p1 = _entry(approx, args, "entry")
    p2 = _entry(approx, args, "entry2")
    r0_2 = _sq(rule.field, args.R0)
    v = spectra.forbidden_verify(approx, a, p1, p2, r0_2, w2, scale_m=args.m)
    doc = _base(args, rule, approx, window2=w2, R0_2=r0_2, scale_m=args.m,
                R2=_sq(rule.field, args.R) if args.R else None, displacements=v.displacements)
    doc.update(status=v.status, witness=v.witness, reason=v.reason, anchors=v.anchors, a=a)
    return doc, None


def cmd_forbidden_search(args):
    rule = _tile_rule(args.rule)
    if not args.a or not args.x:
        raise UsageError("--a and --x are required")
    a = parse_vector(rule.field, args.a, rule.dim)
    x = parse_vector(rule.field, args.x, rule.dim)
    w2, need = _window_need(rule, args)
    approx = _approx(rule, args.level, need)
    p = _entry(approx, args)
    u2 = _sq(rule.field, args.U)
    r2 = _sq(rule.field, args.R)
    found = spectra.forbidden_patch_search(approx, p, x, u2, a, r2, w2)
    doc = _base(args, rule, approx, window2=w2, U2=u2, R2=r2)
    doc.update(found=found is not None, entry=found, a=a, x=x)
    return doc, None


def cmd_seq_lang(args):
    z = _word_rule(args.rule)
    words = sorted(seqdyn.seq_language(z, args.m))
    doc = {"schema": SCHEMA, "command": args.command_name, "rule": z.name, "rule_hash": z.digest(),
           "evidence": {"m": args.m}, "count": len(words)}
    if args.format == "csv":
        return doc, csv_rows(["word"], [(w,) for w in words])
    doc["words"] = words
    return doc, None


def _corr(args):
    z = _word_rule(args.rule)
    c = seqdyn.correlation_set(z, args.w1, args.w2, args.N)
    doc = {"schema": SCHEMA, "command": args.command_name, "rule": z.name, "rule_hash": z.digest(),
           "evidence": {"N": args.N, "exact": True}, "w1": args.w1, "w2": args.w2}
    return z, c, doc


def cmd_seq_corr(args):
    _, c, doc = _corr(args)
    doc["count"] = len(c.hits)
    if args.format == "csv":
        return doc, csv_rows(["n"], [(n,) for n in c.sorted_hits()])
    doc["hits"] = c.sorted_hits()
    return doc, None


def cmd_seq_density(args):
    _, c, doc = _corr(args)
    prof = seqdyn.gap_profile(c)
    doc.update(density=prof.density, limsup_estimate=prof.tail_max[len(prof.tail_max) // 2])
    return doc, None


def cmd_render(args):
    rule = _tile_rule(args.rule)
    approx = _approx(rule, args.level if args.level is not None else 2)
    overlays = []
    if args.a:
        if rule.dim != 2:
            raise UsageError("band overlays need a 2-dimensional rule")
        a = parse_vector(rule.field, args.a, 2)
        anchor = parse_vector(rule.field, args.anchor, 2) if args.anchor else (rule.field.zero, rule.field.zero)
        overlays.append({"a": a, "r0_2": _sq(rule.field, args.R0), "anchor": anchor})
    svg = render_svg(approx.patch, RenderSpec(overlays=overlays, scale=Fraction(args.scale)))
    doc = _base(args, rule, approx, overlays=len(overlays))
    doc["tiles"] = len(approx)
    return doc, svg


# parser

def _common(p, window="8", R=None):
    p.add_argument("rule", help="catalog name (e.g. catalog/chair) or rule file path")
    p.add_argument("--level", type=int, default=None, help="approximant level (default: smallest that covers)")
    p.add_argument("--window", default=window, help="window radius")
    p.add_argument("--R", default=R, help="language radius")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv", "svg"], default="json")


def _entries(p, two=False):
    p.add_argument("--entry", type=int, default=None, help="index into the language at --R")
    p.add_argument("--patch", default=None, help="patch CSV file (proto_index, shift columns)")
    if two:
        p.add_argument("--entry2", type=int, default=None)
        p.add_argument("--patch2", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tilinglab", description="Exact experiments on self-affine tilings.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    rule = sub.add_parser("rule").add_subparsers(dest="sub", required=True)
    p = rule.add_parser("validate")
    _common(p)
    p.set_defaults(func=cmd_rule_validate)
    p = rule.add_parser("seed")
    _common(p)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--interior", action="store_true")
    p.set_defaults(func=cmd_rule_seed)
    p = rule.add_parser("grow")
    _common(p)
    p.set_defaults(func=cmd_rule_grow)

    p = sub.add_parser("lang")
    _common(p, R="2")
    p.add_argument("--no-stability", action="store_true", help="skip the comparison with the previous level")
    p.set_defaults(func=cmd_lang)

    p = sub.add_parser("occ")
    _common(p, R="2")
    _entries(p)
    p.set_defaults(func=cmd_occ)

    p = sub.add_parser("disp")
    _common(p, R="2")
    _entries(p, two=True)
    p.set_defaults(func=cmd_disp)

    p = sub.add_parser("legal")
    _common(p)
    p.add_argument("--patch", default=None)
    p.add_argument("--max-level", type=int, default=6)
    p.set_defaults(func=cmd_legal)

    p = sub.add_parser("returns")
    _common(p)
    p.set_defaults(func=cmd_returns)

    spec = sub.add_parser("spec").add_subparsers(dest="sub", required=True)
    p = spec.add_parser("analyze")
    _common(p)
    p.set_defaults(func=cmd_spec_analyze)

    eig = sub.add_parser("eigen").add_subparsers(dest="sub", required=True)
    p = eig.add_parser("verify")
    _common(p)
    p.add_argument("--a", default=None)
    p.add_argument("--N", type=int, default=spectra.DEFAULT_N)
    p.add_argument("--tol", default="2^-20")
    p.set_defaults(func=cmd_eigen_verify)
    p = eig.add_parser("scan")
    _common(p)
    p.add_argument("--target", action="append", default=[], help="vector to approximate (repeatable)")
    p.add_argument("--eps", default="1/8")
    p.add_argument("--k-max", type=int, default=4)
    p.set_defaults(func=cmd_eigen_scan)

    fb = sub.add_parser("forbidden").add_subparsers(dest="sub", required=True)
    p = fb.add_parser("verify")
    _common(p, window="32", R="2")
    _entries(p, two=True)
    p.add_argument("--a", default=None)
    p.add_argument("--R0", default="1/8")
    p.add_argument("--m", type=int, default=0)
    p.set_defaults(func=cmd_forbidden_verify)
    p = fb.add_parser("search")
    _common(p, window="32", R="2")
    _entries(p)
    p.add_argument("--a", default=None)
    p.add_argument("--x", default=None)
    p.add_argument("--U", default="2")
    p.set_defaults(func=cmd_forbidden_search)

    seq = sub.add_parser("seq").add_subparsers(dest="sub", required=True)
    for name, func in (("lang", cmd_seq_lang), ("corr", cmd_seq_corr), ("density", cmd_seq_density)):
        p = seq.add_parser(name)
        p.add_argument("rule")
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if name == "lang":
            p.add_argument("--m", type=int, default=2)
        else:
            p.add_argument("--w1", required=True)
            p.add_argument("--w2", required=True)
            p.add_argument("--N", type=int, default=100)
        p.set_defaults(func=func)

    p = sub.add_parser("render")
    _common(p)
    p.add_argument("--a", default=None, help="draw the band grid of this eigenvalue")
    p.add_argument("--R0", default="1/8")
    p.add_argument("--anchor", default=None)
    p.add_argument("--scale", default="20")
    p.set_defaults(func=cmd_render, format="svg")
    return ap


def _emit(text: str, out: str | None, stream):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        stream.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.command_name = args.cmd + (f" {args.sub}" if getattr(args, "sub", None) else "")
    try:
        doc, body = args.func(args)
    except UsageError as exc:
        parser.print_usage(stderr)
        stderr.write(f"tilinglab: error: {exc}\n")
        return 2
    except TilingError as exc:
        err = {"schema": SCHEMA, "command": args.command_name, **exc.payload()}
        stdout.write(dumps(err))
        return 1
    except (OSError, ValueError, KeyError, ZeroDivisionError) as exc:
        code = "io_error" if isinstance(exc, OSError) else "invalid_input"
        err = {"schema": SCHEMA, "command": args.command_name, "error": code, "message": str(exc)}
        stdout.write(dumps(err))
        return 1
    if body is not None and args.format in ("csv", "svg"):
        _emit(body, args.out, stdout)
        if args.out is None:
            return 0
        stderr.write(dumps(doc))
        return 0
    _emit(dumps(doc), args.out, stdout)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
