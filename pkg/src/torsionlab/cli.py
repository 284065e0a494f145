"""Command-line front end: ``torsionlab <group> <verb> [options]``.

Every command prints one sorted-key JSON document.  Exit codes: 0 success,
1 domain error (JSON body ``{"error", "message", "context"}``), 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile

import mpmath

from . import experiments
from .config import Config, load_config
from .elliptic import (
    family_curve,
    family_point,
    parse_curve_point,
    torsion_order,
    torsion_parameters,
)
from .errors import TorsionLabError
from .exactalg import QQ, number_field, parse_nf_elem, parse_poly
from .lattice import elog, periods, wp, wsigma, wzeta
from .numfmt import fmt_complex, fmt_real, parse_complex
from .pell import cf_expand, pell_fundamental, pell_power, pell_square_factor, squared_factor_solution
from .semiabelian import (
    GLog,
    GPoint,
    betti_g,
    extension_make,
    g_log,
    g_torsion_test,
    ribet_delta,
    ribet_order_check,
)

DIGITS = 30


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- helpers --------------------------------------------------------------------


def _field(args):
    if getattr(args, "field", None):
        return number_field(tuple(parse_poly(args.field, QQ, "t").coeffs), "t")
    return QQ


def _poly(text, K):
    return parse_poly(text, K, "x")


def _pair(text):
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 'X,Y', got {text!r}")
    return parse_complex(parts[0]), parse_complex(parts[1])


def _c(z):
    return fmt_complex(z, DIGITS)


def _lattice(args, cfg):
    return periods(parse_complex(args.g2), parse_complex(args.g3), cfg.precision_digits)


# -- pell -----------------------------------------------------------------------


def cmd_pell_solve(args, cfg):
    K = _field(args)
    D = _poly(args.D, K)
    cf = cf_expand(D, cfg.cf_max_steps, bit_cap=cfg.coeff_bit_cap)
    out = {"D": str(D), "periodic": cf.periodic, "trace": cf.trace()}
    if cf.periodic:
        sol = pell_fundamental(D, cfg.cf_max_steps, bit_cap=cfg.coeff_bit_cap)
        out.update(sol.to_dict())
    else:
        out["verdict"] = f"inconclusive (budget {cfg.cf_max_steps})"
    return out


def cmd_pell_power(args, cfg):
    K = _field(args)
    D = _poly(args.D, K)
    sol = pell_fundamental(D, cfg.cf_max_steps, bit_cap=cfg.coeff_bit_cap)
    if sol is None:
        return {"D": str(D), "verdict": f"inconclusive (budget {cfg.cf_max_steps})"}
    return {"D": str(D), "n": args.n, **pell_power(sol, D, args.n).to_dict()}


def cmd_pell_squared(args, cfg):
    K = _field(args)
    Q = _poly(args.Q, K)
    rho = parse_nf_elem(args.rho) if ":" in args.rho else K(parse_poly(args.rho, K, "x")[0])
    sol = pell_fundamental(Q, cfg.cf_max_steps, bit_cap=cfg.coeff_bit_cap)
    n = pell_square_factor(rho, Q, args.n_max, cfg.cf_max_steps, solution=sol)
    out = {"Q": str(Q), "rho": args.rho, "n": n}
    if n is not None:
        out["solution"] = squared_factor_solution(rho, Q, n, sol).to_dict()
    return out


# -- torsion --------------------------------------------------------------------


def cmd_torsion_params(args, cfg):
    tps = torsion_parameters(args.order, prec=cfg.precision_digits)
    return {"order": args.order, "count": sum(tp.degree for tp in tps),
            "parameters": [tp.to_dict() for tp in tps]}


def cmd_torsion_order(args, cfg):
    if args.lam is not None:
        lam = parse_nf_elem(args.lam)
        E, P = family_curve(lam), family_point(lam)
    elif args.curve is not None:
        E, P = parse_curve_point(args.curve, _field(args))
        if P is None:
            raise UsageError("the curve text needs a point: 'a=..,b=..; P=(X,Y)'")
    else:
        raise UsageError("give --lam or --curve")
    return {"curve": E.format(), "P": P.format(), "n_max": args.n_max, "order": torsion_order(E, P, args.n_max)}


# -- lattice --------------------------------------------------------------------


def cmd_lattice_periods(args, cfg):
    L = _lattice(args, cfg)
    return {"lattice": L.to_dict(), "legendre_residual": fmt_real(L.legendre_residual(), 5)}


def cmd_lattice_eval(args, cfg):
    L = _lattice(args, cfg)
    if args.function == "elog":
        if args.point is None:
            raise UsageError("elog needs --point X,Y")
        return {"fn": "elog", "z": _c(elog(L, _pair(args.point)))}
    if args.z is None:
        raise UsageError(f"{args.function} needs --z")
    z = parse_complex(args.z)
    if args.function == "wp":
        p, dp = wp(L, z)
        return {"fn": "wp", "z": _c(z), "wp": _c(p), "wp_prime": _c(dp)}
    f = {"zeta": wzeta, "sigma": wsigma}[args.function]
    return {"fn": args.function, "z": _c(z), "value": _c(f(L, z))}


# -- semi-abelian ---------------------------------------------------------------


def _ext(args, cfg):
    return extension_make(_lattice(args, cfg), parse_complex(args.v))


def _gpoint(args):
    return GPoint(parse_complex(args.delta), _pair(args.point))


def cmd_gext_make(args, cfg):
    return {"extension": _ext(args, cfg).to_dict(DIGITS)}


def cmd_gext_log(args, cfg):
    ext = _ext(args, cfg)
    hint = parse_complex(args.u_hint) if args.u_hint else None
    U = g_log(ext, _gpoint(args), hint)
    return {"t": _c(U.t), "z": _c(U.z)}


def cmd_gext_betti(args, cfg):
    ext = _ext(args, cfg)
    return {"betti": betti_g(ext, GLog(parse_complex(args.t), parse_complex(args.z))).to_dict(DIGITS)}


def cmd_gext_torsion(args, cfg):
    ext = _ext(args, cfg)
    hint = parse_complex(args.u_hint) if args.u_hint else None
    return {"m_max": args.m_max, "order": g_torsion_test(ext, _gpoint(args), hint, args.m_max)}


# -- ribet ----------------------------------------------------------------------


def cmd_ribet_delta(args, cfg):
    rv = ribet_delta(_lattice(args, cfg), parse_complex(args.alpha), parse_complex(args.u))
    return {"u": _c(rv.u), "v": _c(rv.v), "delta": _c(rv.delta), "log_t": _c(rv.log_t), "s2": _c(rv.s2)}


def cmd_ribet_check(args, cfg):
    chk = ribet_order_check(_lattice(args, cfg), parse_complex(args.alpha), args.k1, args.k2, args.n)
    return {"n": chk.n, "k": list(chk.k), "m": chk.m, "divides_n2": chk.divides_n2,
            "full_agrees": chk.full_agrees, "betti": chk.betti.to_dict(DIGITS)}


# -- scans and replay -----------------------------------------------------------


def _cache_path(cfg: Config, exp_id: str, key: dict) -> str:
    blob = json.dumps(key, sort_keys=True, separators=(",", ":")).encode()
    return os.path.join(cfg.cache_dir, exp_id, hashlib.sha256(blob).hexdigest() + ".json")


def _atomic_write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _scan(args, cfg, exp_id, params, runner):
    key = {"experiment": exp_id, "parameters": params, "config": cfg.provenance()}
    path = _cache_path(cfg, exp_id, key)
    if not args.no_cache and os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        data["cached"] = True
        report = experiments.ScanReport.from_dict(data)
    else:
        report = runner()
        data = report.to_dict()
        if not args.no_cache:
            _atomic_write(path, json.dumps(data, sort_keys=True))
        data["cached"] = False
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())
    return data


def _jobs(args):
    return args.jobs or os.cpu_count() or 1


def cmd_scan_pell(args, cfg):
    params = {"n_max": args.n_max, "cf_budget": args.cf_budget}
    return _scan(args, cfg, "pell-torsion", params, lambda: experiments.pell_torsion_scan(
        args.n_max, args.cf_budget, cfg, _jobs(args)))


def cmd_scan_theorem4(args, cfg):
    params = {"case": args.case, "n_max": args.n_max, "k_max": args.k_max}
    return _scan(args, cfg, "theorem4", params, lambda: experiments.theorem4_scan(
        args.case, args.n_max, args.k_max, cfg, _jobs(args)))


def cmd_scan_ribet(args, cfg):
    params = {"n_max": args.n_max}
    return _scan(args, cfg, "ribet", params, lambda: experiments.ribet_scan(args.n_max, cfg, _jobs(args)))


def cmd_scan_surface(args, cfg):
    params = {"family_id": args.family, "m_max": args.m_max}
    return _scan(args, cfg, "surface", params, lambda: experiments.surface_count(
        args.family, args.m_max, cfg, _jobs(args)))


def cmd_replay(args, cfg):
    """Replay one certificate, one row, or every row of a report."""
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    if isinstance(data, dict) and "rows" in data:
        results = [experiments.replay(r) for r in data["rows"] if "certificate" in r]
        return {"replayed": len(results), "ok": all(r["ok"] for r in results), "results": results}
    return experiments.replay(data)


# -- grammar --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="torsionlab", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--precision", type=int, dest="precision_digits")
    p.add_argument("--cf-max-steps", type=int, dest="cf_max_steps")
    p.add_argument("--coeff-bit-cap", type=int, dest="coeff_bit_cap")
    p.add_argument("--cache-dir", dest="cache_dir")
    p.add_argument("--seed", type=lambda s: int(s, 0))
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def verbs(name):
        g = groups.add_parser(name)
        return g.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def cmd(sub, name, fn, *opts):
        c = sub.add_parser(name)
        for flags, kw in opts:
            c.add_argument(*flags, **kw)
        c.set_defaults(fn=fn)
        return c

    field = (("--field",), {"help": "minimal polynomial in t of a number field (default QQ)"})
    g2g3 = [(("--g2",), {"required": True}), (("--g3",), {"required": True})]
    lem = [(("--g2",), {"default": "4"}), (("--g3",), {"default": "0"})]

    pell = verbs("pell")
    cmd(pell, "solve", cmd_pell_solve, (("--D",), {"required": True}), field)
    cmd(pell, "power", cmd_pell_power, (("--D",), {"required": True}), (("--n",), {"type": int, "required": True}), field)
    cmd(pell, "squared", cmd_pell_squared, (("--Q",), {"required": True}), (("--rho",), {"required": True}),
        (("--n-max",), {"type": int, "default": 20}), field)

    tor = verbs("torsion")
    cmd(tor, "params", cmd_torsion_params, (("--order",), {"type": int, "required": True}))
    cmd(tor, "order", cmd_torsion_order, (("--lam",), {}), (("--curve",), {}),
        (("--n-max",), {"type": int, "default": 30}), field)

    lat = verbs("lattice")
    cmd(lat, "periods", cmd_lattice_periods, *g2g3)
    cmd(lat, "eval", cmd_lattice_eval, *g2g3, (("--fn",), {"dest": "function", "choices": ["wp", "zeta", "sigma", "elog"], "default": "wp"}),
        (("--z",), {}), (("--point",), {"help": "X,Y on y^2 = 4x^3 - g2 x - g3"}))

    gext = verbs("gext")
    v = (("--v",), {"required": True})
    pt = [(("--delta",), {"required": True}), (("--point",), {"required": True}), (("--u-hint",), {})]
    cmd(gext, "make", cmd_gext_make, *g2g3, v)
    cmd(gext, "log", cmd_gext_log, *g2g3, v, *pt)
    cmd(gext, "betti", cmd_gext_betti, *g2g3, v, (("--t",), {"required": True}), (("--z",), {"required": True}))
    cmd(gext, "torsion", cmd_gext_torsion, *g2g3, v, *pt, (("--m-max",), {"type": int, "default": 50}))

    rib = verbs("ribet")
    alpha = (("--alpha",), {"default": "2i"})
    cmd(rib, "delta", cmd_ribet_delta, *lem, alpha, (("--u",), {"required": True}))
    cmd(rib, "check", cmd_ribet_check, *lem, alpha, (("--n",), {"type": int, "required": True}),
        (("--k1",), {"type": int, "default": 1}), (("--k2",), {"type": int, "default": 0}))

    scan = verbs("scan")
    common = [(("--jobs",), {"type": int, "help": "worker processes (default: logical cores)"}),
              (("--csv",), {"help": "also write rows as CSV"}),
              (("--no-cache",), {"action": "store_true"})]
    cmd(scan, "pell-torsion", cmd_scan_pell, (("--n-max",), {"type": int, "default": 6}),
        (("--cf-budget",), {"type": int}), *common)
    cmd(scan, "theorem4", cmd_scan_theorem4, (("--case",), {"choices": ["i", "ii"], "default": "i"}),
        (("--n-max",), {"type": int, "default": 6}), (("--k-max",), {"type": int, "default": 20}), *common)
    cmd(scan, "ribet", cmd_scan_ribet, (("--n-max",), {"type": int, "default": 6}), *common)
    cmd(scan, "surface", cmd_scan_surface, (("--family",), {"choices": ["lemniscatic", "quartic"], "default": "lemniscatic"}),
        (("--m-max",), {"type": int, "default": 8}), *common)

    rp = groups.add_parser("replay")
    rp.add_argument("certificate", help="JSON file: a certificate, a row, or a whole report")
    rp.set_defaults(fn=cmd_replay)
    return p


def _emit(obj, stream) -> None:
    stream.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        overrides = {k: getattr(args, k) for k in ("precision_digits", "cf_max_steps", "coeff_bit_cap", "cache_dir", "seed")}
        cfg = load_config(args.config, **overrides)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, ValueError) as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    try:
        with mpmath.workdps(cfg.precision_digits):
            result = args.fn(args, cfg)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return 2
    except TorsionLabError as exc:
        _emit({**exc.to_dict(), "provenance": cfg.provenance()}, stdout)
        return 1
    if "provenance" not in result:
        result["provenance"] = cfg.provenance()
    _emit(result, stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
