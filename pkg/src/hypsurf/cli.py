"""Command-line front end.

Exit status: 0 when every emitted certificate passes, 1 when one fails,
2 on bad arguments, 3 on a numerical error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from . import acceptance, construct, fricke, genus2, halfplane, hypmath
from .certificate import Certificate, _round
from .errors import ConfigError, DomainError, HypSurfError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
SURFACES = ("smax", "bolza")


@dataclass
class RunConfig:
    command: str
    tol: hypmath.Tol = hypmath.DEFAULT_TOL
    word_cutoff: int | None = None
    samples: int = 200
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.word_cutoff is not None and self.word_cutoff < 1:
            raise ConfigError("--words must be >= 1")
        if self.samples < 1:
            raise ConfigError("--samples must be >= 1")


def _emit(text: str, cfg: RunConfig) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_round(obj), sort_keys=True, indent=2)


def _emit_certs(certs: list, cfg: RunConfig) -> int:
    if cfg.fmt == "text":
        lines = []
        for c in certs:
            lines.append(c.summary())
            for k in sorted(c.values):
                lines.append(f"  {k} = {_round(c.values[k])}")
            for k in sorted(c.residuals):
                lines.append(f"  residual {k} = {c.residuals[k]:.3e}")
            lines += [f"  caveat: {m}" for m in c.caveats]
        _emit("\n".join(lines), cfg)
    elif len(certs) == 1:
        _emit(certs[0].to_json(), cfg)
    else:
        _emit(json.dumps([c.to_dict() for c in certs], sort_keys=True, indent=2), cfg)
    return EXIT_OK if all(c.passed for c in certs) else EXIT_FAIL


def _surface(name: str, words: int | None):
    if name == "smax":
        return genus2.smax(word_cutoff=words or 8)
    return genus2.bolza(word_cutoff=words or 10)


def cmd_extremal(args, cfg):
    sigma, beta, h, cert = fricke.extremal_11(cfg.tol)
    if cfg.fmt == "text":
        r = cert.residuals
        lines = [f"sigma = {sigma:.12g}", f"beta = {beta:.12g}", f"h = {h:.12g}"]
        for k in ("boundary_vs_systole", "systole_quadratic", "cubic_minus_sign", "fricke_identity"):
            lines.append(f"residual {k} = {r[k]:.3e}")
        lines.append(f"verdict {cert.verdict}")
        _emit("\n".join(lines), cfg)
        return EXIT_OK if cert.passed else EXIT_FAIL
    return _emit_certs([cert], cfg)


def cmd_smax(args, cfg):
    return _emit_certs([_surface("smax", cfg.word_cutoff)[1]], cfg)


def cmd_bolza(args, cfg):
    return _emit_certs([_surface("bolza", cfg.word_cutoff)[1]], cfg)


def cmd_displacement(args, cfg):
    if args.surface == "smax":
        s, _ = genus2.smax()
    else:
        s = genus2.build(genus2.bolza_piece(), name="Bolza piece, aligned double")
    exact = genus2.displacement_aligned(s)
    oracle, word = genus2.displacement_oracle(s)
    sampled = genus2.displacement_sampled(s, cfg.samples, cfg.word_cutoff or 8)
    cert = Certificate(
        claim_id=f"displacement_{args.surface}",
        values={"displacement": exact, "oracle": oracle, "oracle_word": halfplane.format_word(word),
                "sampled_min": sampled, "samples": cfg.samples, "bound": hypmath.ARCCOSH_BOUND},
        residuals={"oracle": oracle - exact,
                   "sampled_not_below": max(0.0, exact - sampled - 1e-9),
                   "within_bound": float(exact > hypmath.ARCCOSH_BOUND + 1e-9)},
        tolerance=cfg.tol.abs_res,
    )
    return _emit_certs([cert], cfg)


def cmd_spectrum(args, cfg):
    if args.surface == "smax":
        sigma, beta, _, _ = fricke.extremal_11()
        s = genus2.build(fricke.maximal_torus(beta))
    else:
        piece = genus2.bolza_piece()
        s = genus2.build(piece, genus2.Alignment.twisted(piece.beta / 12.0))
    sp = genus2.spectrum(s, args.cutoff, cfg.word_cutoff or 10)
    if cfg.fmt == "json":
        _emit(_dump({"length_cutoff": args.cutoff, "word_cutoff": sp.word_cutoff,
                     "cutoff_warning": sp.cutoff_warning,
                     "entries": [{"length": e.length, "multiplicity": e.multiplicity,
                                  "word": e.word} for e in sp.entries]}), cfg)
    else:
        _emit(sp.to_csv(), cfg)
    if sp.cutoff_warning:
        print("warning: word cutoff reached before the length cutoff", file=sys.stderr)
    return EXIT_OK


def cmd_odd_genus(args, cfg):
    x = construct.solve_x_for_k(args.k, args.safety)
    s = construct.build_odd_genus(args.gtilde, x, args.flavor)
    cert = construct.certify_displacement(s, args.k, oracle=args.oracle)
    certs = [cert]
    if args.check_k is not None:
        certs.append(construct.certify_displacement(s, args.check_k))
    if args.gluing:
        with open(args.gluing, "w", encoding="utf-8") as fh:
            fh.write(_dump(s.to_dict()) + "\n")
    return _emit_certs(certs, cfg)


def _parse_sides(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok in ("", "_", "?"):
            out.append(None)
        else:
            try:
                out.append(float(tok))
            except ValueError:
                raise ConfigError(f"bad side length {tok!r}") from None
    return out


def cmd_polygon(args, cfg):
    if args.sides:
        poly = construct.solve_right_angled_polygon(construct.PolygonSpec(_parse_sides(args.sides)))
    else:
        poly = construct.hyperelliptic_polygon(args.gtilde, args.a1)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(polygon_svg(poly))
    cert = Certificate(
        "right_angled_polygon",
        values={"sides": poly.sides, "vertices": [[v.x, v.y] for v in poly.vertices]},
        residuals={"closure": poly.closure_residual, "angles": poly.angle_residual},
        tolerance=1e-8,
    )
    return _emit_certs([cert], cfg)


def polygon_svg(poly, size: int = 400) -> str:
    """Polygon drawn in the disk model, edges as straight chords."""
    zs = [(v.z - 1j) / (v.z + 1j) for v in poly.vertices]
    pts = " ".join(f"{size / 2 * (1 + z.real):.3f},{size / 2 * (1 - z.imag):.3f}" for z in zs)
    r = size / 2
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}">'
            f'<circle cx="{r}" cy="{r}" r="{r}" fill="none" stroke="black"/>'
            f'<polygon points="{pts}" fill="none" stroke="blue"/></svg>\n')


def cmd_hyperelliptic(args, cfg):
    if args.a1 is None and args.k is None:
        raise ConfigError("give --a1 or --k")
    a1 = args.a1 if args.a1 is not None else construct.solve_x_for_k(args.k, args.safety) / 2.0
    (s_o, _), cert = construct.build_hyperelliptic_example(args.gtilde, a1, k=args.k)
    if args.gluing:
        with open(args.gluing, "w", encoding="utf-8") as fh:
            fh.write(_dump(s_o.to_dict()) + "\n")
    return _emit_certs([cert], cfg)


def cmd_verify_all(args, cfg):
    results = acceptance.run_all()
    if cfg.fmt == "json":
        _emit(json.dumps([{"criterion": r.number, "title": r.title, **r.cert.to_dict()}
                          for r in results], sort_keys=True, indent=2), cfg)
    else:
        _emit("\n".join(r.line() for r in results), cfg)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="residual tolerance")
    common.add_argument("--words", type=int, default=None, help="word length cutoff")
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--out", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=None)
    common.add_argument("--safety", type=float, default=0.99)

    p = argparse.ArgumentParser(prog="hypsurf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("extremal-genus2", parents=[common]).set_defaults(fn=cmd_extremal, fmt_default="text")
    sub.add_parser("smax", parents=[common]).set_defaults(fn=cmd_smax)
    sub.add_parser("bolza", parents=[common]).set_defaults(fn=cmd_bolza)

    q = sub.add_parser("displacement", parents=[common])
    q.add_argument("--surface", choices=SURFACES, default="smax")
    q.set_defaults(fn=cmd_displacement)

    q = sub.add_parser("spectrum", parents=[common])
    q.add_argument("--surface", choices=SURFACES, default="smax")
    q.add_argument("--cutoff", type=float, required=True, help="length cutoff")
    q.set_defaults(fn=cmd_spectrum, fmt_default="csv")

    q = sub.add_parser("odd-genus", parents=[common])
    q.add_argument("--k", type=float, required=True)
    q.add_argument("--flavor", choices=(construct.PRESERVING, construct.REVERSING), default=construct.REVERSING)
    q.add_argument("--gtilde", type=int, default=1)
    q.add_argument("--oracle", action="store_true", help="also run the exact displacement search")
    q.add_argument("--check-k", type=float, default=None, help="certify a second target k with the same surface")
    q.add_argument("--gluing", default=None, help="write the gluing description as JSON")
    q.set_defaults(fn=cmd_odd_genus)

    q = sub.add_parser("polygon", parents=[common])
    q.add_argument("--sides", default=None, help="comma separated, '_' for unknown sides")
    q.add_argument("--gtilde", type=int, default=3)
    q.add_argument("--a1", type=float, default=0.1)
    q.add_argument("--svg", default=None)
    q.set_defaults(fn=cmd_polygon)

    q = sub.add_parser("hyperelliptic-example", parents=[common])
    q.add_argument("--gtilde", type=int, default=3)
    q.add_argument("--a1", type=float, default=None)
    q.add_argument("--k", type=float, default=None)
    q.add_argument("--gluing", default=None)
    q.set_defaults(fn=cmd_hyperelliptic)

    sub.add_parser("verify-all", parents=[common]).set_defaults(fn=cmd_verify_all, fmt_default="text")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        tol = hypmath.DEFAULT_TOL if args.tol is None else hypmath.Tol(
            abs_res=args.tol, domain_eps=min(hypmath.DEFAULT_TOL.domain_eps, args.tol))
        if not (math.isfinite(args.safety) and 0.0 < args.safety < 1.0):
            raise ConfigError("--safety must lie in (0, 1)")
        fmt = args.fmt or getattr(args, "fmt_default", "json")
        cfg = RunConfig(args.command, tol, args.words, args.samples, args.out, fmt)
    except (ConfigError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.fn(args, cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except HypSurfError as e:
        print(f"numerical error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
