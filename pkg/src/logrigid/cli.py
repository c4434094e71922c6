"""Command-line front end: ``logrigid <subcommand> [flags]``.

Exit codes: 0 success, 1 invariant failure, 2 invalid input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import gsunit, selftest
from .lfun import desmooth, lp_at, lp_derivative0
from .measure import (MeasureError, build_auxiliary_measure, build_measure, default_ideal,
                      refine_consistency)
from .padic import (PAdic, PrecisionError, RamifiedPrimeError, SplitPrimeError, format_padic,
                    require_inert)
from .quadfield import Form, InvalidDiscriminant, QuadraticField
from .zeta import class_zeta, delta_c, dirichlet_oracle

EXIT_OK, EXIT_INVARIANT, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    disc: int | None
    p: int | None
    c: int
    d: int
    level: int | None
    precision: int | None
    cache_dir: str | None
    json: bool
    cls: str | None
    quick: bool
    poly: list[int] | None

    @classmethod
    def from_args(cls, a) -> "RunConfig":
        poly = None
        if getattr(a, "poly", None):
            try:
                poly = [int(t) for t in a.poly.split(",")]
            except ValueError:
                raise InputError(f"--poly expects comma-separated integers, got {a.poly!r}")
        cfg = cls(a.disc, a.prime, a.smooth, a.smooth2, a.level, a.precision, a.cache_dir,
                  a.json, getattr(a, "class_", None), getattr(a, "quick", False), poly)
        if cfg.level is not None and cfg.level < 1:
            raise InputError("--level must be at least 1")
        if cfg.precision is not None and cfg.level is not None and cfg.precision < cfg.level:
            raise InputError("--precision must be at least --level")
        if cfg.c == cfg.d:
            raise InputError("--smooth and --smooth2 must differ")
        if cfg.p is not None and (cfg.p < 3 or any(cfg.p % k == 0 for k in range(2, int(cfg.p ** 0.5) + 1))):
            raise InputError(f"--prime must be an odd prime, got {cfg.p}")
        return cfg

    @property
    def N(self) -> int:
        if self.precision is not None:
            return self.precision
        return (self.level or 2) + 6

    def need(self, *names):
        for n in names:
            if getattr(self, n) is None:
                flag = {"disc": "--disc", "p": "--prime", "level": "--level"}[n]
                raise InputError(f"{flag} is required")

    def field(self) -> QuadraticField:
        self.need("disc")
        return QuadraticField(self.disc)

    def smoothings(self) -> tuple[int, int]:
        """User smoothings, or the defaults moved off p."""
        if (self.c, self.d) == (5, 7) and self.p is not None:
            return selftest.default_smoothings(self.p, 5, 7)
        for c in (self.c, self.d):
            if self.p is not None and c % self.p == 0:
                raise InputError(f"smoothing {c} is divisible by p = {self.p}")
        return self.c, self.d

    def classes(self, F: QuadraticField) -> list[int]:
        G = F.class_group
        if self.cls is None:
            return list(range(G.order))
        text = self.cls.strip()
        if text.lstrip("-").isdigit():
            i = int(text)
            if not 0 <= i < G.order:
                raise InputError(f"class index {i} out of range 0..{G.order - 1}")
            return [i]
        try:
            return [G.class_of_form(Form.parse(text))]
        except (ValueError, KeyError) as exc:
            raise InputError(f"bad class {text!r}: {exc}")


def _emit(cfg: RunConfig, doc, human: str):
    if cfg.json:
        print(json.dumps(doc, indent=2))
    else:
        print(human)


# -- subcommands ------------------------------------------------------------

def cmd_classgroup(cfg: RunConfig) -> int:
    F = cfg.field()
    G = F.class_group
    rows = []
    for i in range(G.order):
        I = G.ideal(i)
        rows.append({
            "index": i, "form": str(G.cycles[i][0]), "order": G.element_order(i),
            "two_torsion": G.element_order(i) <= 2,
            "ideal": [[str(x), str(y)] for x, y in I.basis],
        })
    doc = {"disc": F.D, "order": G.order, "cyclic": G.is_cyclic(),
           "eps": [str(x) for x in F.eps], "eps_norm": F.eps_norm,
           "eps_plus": [str(x) for x in F.eps_plus], "classes": rows}
    lines = [f"D = {F.D}: narrow class number {G.order}" + (", cyclic" if G.is_cyclic() else "")]
    lines.append(f"eps_plus = {F.eps_plus[0]} + {F.eps_plus[1]}*sqrt{F.D}")
    for r in rows:
        basis = ", ".join(f"{x} + {y}*sqrt{F.D}" for x, y in r["ideal"])
        lines.append(f"  {r['index']}: {r['form']:>16}  order {r['order']}"
                     f"{'  2-torsion' if r['two_torsion'] else ''}  ideal <{basis}>")
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_OK


def cmd_zeta(cfg: RunConfig) -> int:
    F = cfg.field()
    G = F.class_group
    rows = []
    for i in cfg.classes(F):
        vals = {str(s): str(class_zeta(F, i, s)) for s in (0, -1, -2)}
        row = {"class": str(G.cycles[i][0]), "zeta": vals}
        row["delta_c0"] = str(delta_c(F, G.ideal(i), 0, cfg.c))
        if cfg.p is not None:
            require_inert(F.D, cfg.p)
            row["padic"] = {s: format_padic(PAdic.from_rational(cfg.p, Fraction(v), cfg.N))
                            for s, v in vals.items()}
        rows.append(row)
    oracle = {str(1 - k): str(dirichlet_oracle(F.D, 1 - k)) for k in (1, 2, 3)}
    total = {str(s): str(sum((class_zeta(F, i, s) for i in range(G.order)), Fraction(0)))
             for s in (0, -1, -2)}
    ok = oracle == total
    doc = {"disc": F.D, "c": cfg.c, "classes": rows, "dirichlet_oracle": oracle,
           "class_sum": total, "oracle_agrees": ok}
    lines = [f"D = {F.D}, partial zeta values at s = 0, -1, -2"]
    for r in rows:
        z = r["zeta"]
        lines.append(f"  {r['class']:>16}  {z['0']:>8}  {z['-1']:>10}  {z['-2']:>12}")
    lines.append(f"sum over classes {total}; Dirichlet oracle {oracle}: "
                 f"{'agree' if ok else 'DISAGREE'}")
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_measure(cfg: RunConfig) -> int:
    cfg.need("disc", "p", "level")
    F = cfg.field()
    require_inert(F.D, cfg.p)
    c, _ = cfg.smoothings()
    out, ok = [], True
    for i in cfg.classes(F):
        I = default_ideal(F, i, cfg.p, c)
        m = build_measure(F.D, cfg.p, c, i, cfg.level, field=F, ideal=I,
                          exact=cfg.level <= 3, cache_dir=cfg.cache_dir)
        mass = m.total_mass()
        info = {**m.header(), "balls": len(m.units()), "total_mass": str(mass)}
        ok &= mass == 0
        if cfg.level > 1 and m.exact:
            lower = build_measure(F.D, cfg.p, c, i, cfg.level - 1, field=F, ideal=I,
                                  exact=True, cache_dir=cfg.cache_dir)
            info["refines"] = refine_consistency(lower, m)
            ok &= info["refines"]
        out.append(info)
    human = "\n".join(f"{d['class']:>16}  level {d['level']}  balls {d['balls']}  "
                      f"mass {d['total_mass']}" + (f"  refines {d['refines']}" if "refines" in d else "")
                      + f"  provenance {d['provenance']}" for d in out)
    _emit(cfg, {"measures": out}, human)
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_lp(cfg: RunConfig) -> int:
    cfg.need("disc", "p", "level")
    F = cfg.field()
    require_inert(F.D, cfg.p)
    c, d = cfg.smoothings()
    out = []
    for i in cfg.classes(F):
        I = default_ideal(F, i, cfg.p, c * d)
        m = build_measure(F.D, cfg.p, c, i, cfg.level, field=F, ideal=I, exact=False,
                          cache_dir=cfg.cache_dir)
        res = desmooth(lp_derivative0(m), c)
        s2 = lp_at(m, -2)
        out.append({"derivative0": res.to_dict(), "value_at_minus2": s2.to_dict()})
    human = "\n".join(f"{o['derivative0']['class']:>16}  L_p'(0) = {o['derivative0']['value']}"
                      f"  [mod {o['derivative0']['certified_mod']}]" for o in out)
    _emit(cfg, out[0] if len(out) == 1 else out, human)
    return EXIT_OK


def _pipeline(cfg: RunConfig) -> gsunit.Pipeline:
    cfg.need("disc", "p", "level")
    F = cfg.field()
    require_inert(F.D, cfg.p)
    c, d = cfg.smoothings()
    return gsunit.Pipeline(F.D, cfg.p, cfg.level, c=c, d=d, cache_dir=cfg.cache_dir)


def _record_line(r: gsunit.GrossStarkRecord) -> str:
    d = r.to_dict()
    return (f"{d['class']:>16}  ord {d['order']}  v {d['valuation']:>3}  k {d['k']}  "
            f"{d['status']:<9}  log {d['log']}"
            + (f"\n{'':>18}unit {d['unit']}" if d["unit"] else ""))


def cmd_unit(cfg: RunConfig) -> int:
    pipe = _pipeline(cfg)
    recs = pipe.records(cfg.classes(pipe.field))
    recs = gsunit.reconstruct_all(recs, pipe.field, target=cfg.poly)
    ok = all(r.trace_check for r in recs)
    doc = gsunit.report(pipe, recs)
    _emit(cfg, doc, "\n".join(_record_line(r) for r in recs))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_table(cfg: RunConfig) -> int:
    pipe = _pipeline(cfg)
    recs = pipe.records()
    recs = gsunit.reconstruct_all(recs, pipe.field, target=cfg.poly)
    poly = gsunit.unit_min_poly(recs)
    ok = all(r.trace_check for r in recs)
    doc = gsunit.report(pipe, recs, poly)
    lines = [f"D = {pipe.disc}, p = {pipe.p}, level {pipe.level}, c = {pipe.c}, "
             f"smoothing prime {pipe.ell[0]}, certified mod {doc['certified_mod']}"]
    lines += [_record_line(r) for r in recs]
    lines.append(f"valuations {doc['valuations']} (normalization {pipe.normalization})")
    if poly.coefficients is not None:
        lines.append(f"polynomial {poly.coefficients}")
    else:
        lines.append(f"polynomial: {poly.message}")
    for r in recs:
        if r.status != gsunit.STATUS_MATCHED:
            print(f"warning: class {r.form}: {r.status} {r.notes}".rstrip(), file=sys.stderr)
    _emit(cfg, doc, "\n".join(lines))
    return EXIT_OK if ok else EXIT_INVARIANT


def cmd_selftest(cfg: RunConfig) -> int:
    checks = selftest.run(quick=cfg.quick, cache_dir=cfg.cache_dir,
                          echo=None if cfg.json else print)
    bad = [c.name for c in checks if not c.ok]
    if cfg.json:
        print(json.dumps({"passed": len(checks) - len(bad), "total": len(checks),
                          "failed": bad,
                          "checks": [{"name": c.name, "ok": c.ok, "detail": c.detail}
                                     for c in checks]}, indent=2))
    elif bad:
        print("failed: " + "; ".join(bad))
    return EXIT_INVARIANT if bad else EXIT_OK


COMMANDS = {
    "classgroup": cmd_classgroup, "zeta": cmd_zeta, "measure": cmd_measure, "lp": cmd_lp,
    "unit": cmd_unit, "table": cmd_table, "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--disc", type=int, help="fundamental discriminant D > 0")
    common.add_argument("--prime", type=int, help="odd prime inert in Q(sqrt D)")
    common.add_argument("--smooth", type=int, default=5, help="smoothing c (default 5)")
    common.add_argument("--smooth2", type=int, default=7, help="second smoothing d (default 7)")
    common.add_argument("--level", type=int, help="measure level r")
    common.add_argument("--precision", type=int, help="working p-adic precision N (default r+6)")
    common.add_argument("--class", dest="class_", help="class as a form [a,b,c] or an index")
    common.add_argument("--cache-dir", help="directory for measure tables")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--quick", action="store_true", help="selftest: skip D = 689")
    common.add_argument("--poly", help="target polynomial for unit recognition, "
                                       "comma-separated coefficients from the leading term")
    ap = argparse.ArgumentParser(prog="logrigid", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = RunConfig.from_args(args)
        return COMMANDS[args.command](cfg)
    except (InputError, InvalidDiscriminant, RamifiedPrimeError, SplitPrimeError,
            MeasureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PrecisionError as exc:
        print(f"precision: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
