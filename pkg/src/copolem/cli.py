"""Command-line front end emitting reproducible CSV/JSON artifacts.

Every subcommand renders one CSV table: to stdout by default, or to the
file given by --out together with a JSON run manifest of the same
basename.  Columns are fixed per subcommand and listed in the
subcommand's --help.  Floats are printed with 12 significant digits and
rows come in a canonical order, so a repeated invocation reproduces the
file byte for byte.  Subcommands that consume randomness refuse to run
without an explicit --seed.

Exit codes: 0 success, 1 parameter error, 2 convergence failure, 3 when
--strict is set and a phase query resolves to Undecided only.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import List, Optional, Sequence, Tuple

from . import __version__
from . import phase as phase_mod
from .block_fe import DIAG_KINDS, psi_diag, psi_offdiag
from .deloc_var import A_STAR, DelocParams, solve_deloc
from .interface_fe import InterfaceParams, phi_interface
from .lattice_entropy import LOG95_HALF, kappa, kappa_hat, model_constants
from .path_oracle import interface_rate, verify_kacomb_asymptotics
from .percolation import estimate_pc, rho_star


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on bad usage."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print("%s: error: %s" % (self.prog, message), file=sys.stderr)
        raise SystemExit(1)


# =====================================================================
# Output plumbing
# =====================================================================

def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, bool):
        return str(v)
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def _emit(columns: Sequence[str], rows: Sequence[Sequence], args,
          t0: float) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    data = buf.getvalue()
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(data)
        manifest = {
            "command": args.command,
            "params": {k: v for k, v in sorted(vars(args).items())
                       if k != "command"},
            "seed": getattr(args, "seed", None),
            "version": __version__,
            "elapsed_s": round(time.time() - t0, 3),
        }
        base, _ = os.path.splitext(args.out)
        with open(base + ".json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(data)


def _need_seed(args) -> None:
    if args.seed is None:
        raise ValueError("--seed is required for randomized runs; "
                         "there is no wall-clock default")


def _count(lo: float, hi: float, step: float) -> int:
    if step <= 0.0:
        raise ValueError("--res must be positive")
    if hi < lo:
        raise ValueError("range must be ordered (min <= max)")
    if hi == lo:
        return 1
    return int(round((hi - lo) / step)) + 1


def _grid(lo: float, hi: float, step: float) -> List[float]:
    n = _count(lo, hi, step)
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


# =====================================================================
# Subcommand handlers; each returns (columns, rows, exit_code)
# =====================================================================

def _run_constants(args) -> Tuple[list, list, int]:
    mc = model_constants()
    rows = [
        ("kappa_star", mc.kappa_star),
        ("a_star", mc.a_star),
        ("threshold", LOG95_HALF),
        ("mu_sup", mc.mu_sup),
        ("mu_sup_value", mc.mu_sup_value),
        ("alpha0", mc.alpha0),
        ("alpha1", mc.alpha1),
    ]
    return ["name", "value"], rows, 0


def _run_entropy(args) -> Tuple[list, list, int]:
    cols = ["kind", "a", "b", "mu", "value"]
    rows: list = []
    if (args.a is None) == (args.mu is None):
        raise ValueError("pass exactly one of --a (crossing) or "
                         "--mu (interface)")
    if args.a is not None:
        b = 1.0 if args.b is None else args.b
        pts = [args.a] if args.a_max is None else _grid(
            args.a, args.a_max, args.res or 0.1)
        for a in pts:
            rows.append(("crossing", a, b, "", kappa(a, b)))
    else:
        pts = [args.mu] if args.mu_max is None else _grid(
            args.mu, args.mu_max, args.res or 0.1)
        for m in pts:
            rows.append(("interface", "", "", m, kappa_hat(m)))
    return cols, rows, 0


def _run_oracle(args) -> Tuple[list, list, int]:
    cols = ["kind", "a", "b", "mu", "L", "rate", "extrapolated",
            "closed_form", "rel_err"]
    L = args.L or 80
    if L < 8 or L % 4:
        raise ValueError("--L must be a multiple of 4, at least 8")
    # quarter/half rungs rounded to multiples of 4 so the step total
    # keeps the parity every whole crossing ratio admits
    ladder = sorted({max(8, L // 4 // 4 * 4), max(8, L // 2 // 4 * 4), L})
    rows: list = []
    if (args.a is None) == (args.mu is None):
        raise ValueError("pass exactly one of --a (crossing) or "
                         "--mu (interface)")
    if args.a is not None:
        b = 1.0 if args.b is None else args.b
        res = verify_kacomb_asymptotics(
            args.a, b, L_values=tuple(ladder),
            restricted=not args.unrestricted)
        rel = abs(res.extrapolated - res.kappa_closed_form) / abs(
            res.kappa_closed_form)
        for Lk, rk in zip(ladder, res.rates):
            rows.append(("crossing", args.a, b, "", Lk, rk,
                         res.extrapolated, res.kappa_closed_form, rel))
    else:
        kh = kappa_hat(args.mu)
        for Lk in ladder:
            r = interface_rate(args.mu, Lk)
            rel = abs(r - kh) / abs(kh) if kh != 0.0 else ""
            rows.append(("interface", "", "", args.mu, Lk, r, "", kh, rel))
    return cols, rows, 0


def _run_interface(args) -> Tuple[list, list, int]:
    _need_seed(args)
    q = phi_interface(InterfaceParams(args.alpha, args.beta, args.mu),
                      L=args.L, replicas=args.replicas, seed=args.seed,
                      estimator=args.estimator)
    cols = ["alpha", "beta", "mu", "mu_realized", "L", "steps", "replicas",
            "seed", "estimator", "mean", "stderr", "lower_bound",
            "upper_bound"]
    rows = [(args.alpha, args.beta, args.mu, q.mu_realized, q.L, q.steps,
             q.replicas, args.seed, args.estimator, q.mean, q.stderr,
             q.lower_bound, q.upper_bound)]
    return cols, rows, 0


def _run_blocks(args) -> Tuple[list, list, int]:
    a = A_STAR if args.a is None else args.a
    kinds = [args.kind] if args.kind else ["AA", "AB", "BA", "BB"]
    cols = ["kind", "a", "alpha", "beta", "value", "lower", "upper",
            "b_star", "a1_star", "boundary_attained"]
    rows: list = []
    for kind in kinds:
        if kind in DIAG_KINDS:
            v = psi_diag(kind, a, args.alpha, args.beta)
            rows.append((kind, a, args.alpha, args.beta, v, v, v,
                         "", "", ""))
        else:
            bf = psi_offdiag(kind, a, args.alpha, args.beta)
            rows.append((kind, a, args.alpha, args.beta, bf.value,
                         bf.lower, bf.upper, bf.b_star, bf.a1_star,
                         bf.boundary_attained))
    return cols, rows, 0


def _run_deloc(args) -> Tuple[list, list, int]:
    sol = solve_deloc(DelocParams(args.alpha, args.beta, args.rho))
    cols = ["alpha", "beta", "rho", "x_bar", "y_bar", "F",
            "residual1", "residual2"]
    rows = [(args.alpha, args.beta, args.rho, sol.x_bar, sol.y_bar,
             sol.F, sol.residual1, sol.residual2)]
    return cols, rows, 0


def _run_percolation(args) -> Tuple[list, list, int]:
    _need_seed(args)
    cols = ["mode", "p", "steps", "replicas", "mean", "stderr",
            "extrapolated", "value", "uncertainty"]
    rows: list = []
    if args.pc:
        pvals = _grid(args.p_min, args.p_max, args.p_step)
        est = estimate_pc(pvals, steps=args.steps, replicas=args.replicas,
                          seed=args.seed)
        for pv, ex in zip(est.p_values, est.extrapolated):
            rows.append(("grid", pv, args.steps, args.replicas, "", "",
                         ex, "", ""))
        rows.append(("estimate", "", args.steps, args.replicas, "", "",
                     "", est.value, est.uncertainty))
    else:
        if args.p is None:
            raise ValueError("pass --p for a single-density run or --pc "
                             "for a threshold scan")
        r = rho_star(args.p, steps=args.steps, replicas=args.replicas,
                     seed=args.seed)
        rows.append(("rho_star", args.p, r.steps, r.replicas, r.mean,
                     r.stderr, "", "", ""))
    return cols, rows, 0


_PHASE_COLS = ["mode", "alpha", "beta", "p", "rho", "regime", "state",
               "evidence", "gap", "value", "is_bound", "beta_lower",
               "beta_upper", "beta_estimate", "beta_estimate_err",
               "alpha_star"]


def _phase_row(**kw) -> tuple:
    return tuple(kw.get(c, "") for c in _PHASE_COLS)


def _run_phase(args) -> Tuple[list, list, int]:
    rows: list = []
    code = 0

    if args.curve:
        if args.curve in ("envelope", "second") and args.alpha_max is None:
            raise ValueError("--curve %s needs --alpha-max" % args.curve)
        if args.curve == "envelope":
            mc = None
            if args.mc_L is not None:
                _need_seed(args)
                mc = dict(L=args.mc_L, replicas=args.mc_replicas)
            for al in _grid(args.alpha_min, args.alpha_max,
                            args.res or 0.1):
                cp = phase_mod.beta_c_envelope(al, mc=mc,
                                               seed=args.seed or 0)
                rows.append(_phase_row(
                    mode="envelope", alpha=al, beta_lower=cp.beta_lower,
                    beta_upper=cp.beta_upper,
                    beta_estimate=cp.beta_estimate,
                    beta_estimate_err=cp.beta_estimate_err))
        elif args.curve == "alpha-star":
            for r in _grid(args.rho_min, args.rho_max, args.res or 0.05):
                rows.append(_phase_row(mode="alpha-star", rho=r,
                                       alpha_star=phase_mod.alpha_star_p(r)))
        else:
            for al in _grid(args.alpha_min, args.alpha_max,
                            args.res or 0.1):
                rows.append(_phase_row(
                    mode="second", alpha=al,
                    beta_lower=phase_mod.second_curve_lower(al)))
        return _PHASE_COLS, rows, code

    if args.alpha_max is not None or args.beta_max is not None:
        if args.alpha_max is None or args.beta_max is None:
            raise ValueError("a sweep needs both --alpha-max and "
                             "--beta-max")
        if args.p is None:
            raise ValueError("a sweep needs --p")
        if args.res is None:
            raise ValueError("a sweep needs --res (grid step)")
        n_a = _count(args.alpha_min, args.alpha_max, args.res)
        n_b = _count(args.beta_min, args.beta_max, args.res)
        rho = args.rho
        if rho is None:
            _need_seed(args)
        cells = phase_mod.sweep(
            (args.alpha_min, args.alpha_max),
            (args.beta_min, args.beta_max), (n_a, n_b), args.p,
            rho=rho, threads=args.threads, seed=args.seed or 0)
        for c in cells:
            rows.append(_phase_row(mode="sweep", alpha=c.alpha,
                                   beta=c.beta, p=args.p, regime=c.regime,
                                   state=c.state, evidence=c.evidence,
                                   gap=c.gap))
        if args.strict and {c.state for c in cells} == {"Undecided"}:
            code = 3
        return _PHASE_COLS, rows, code

    if args.alpha is None or args.beta is None or args.p is None:
        raise ValueError("a point query needs --alpha, --beta and --p "
                         "(or use --alpha-max/--beta-max/--res for a "
                         "sweep, --curve for a curve)")
    folded = phase_mod.fold_phase_point(
        phase_mod.PhasePoint(args.alpha, args.beta, args.p))
    rho = args.rho
    rho_shown = args.rho
    if folded.regime == "subcritical" and rho is None:
        _need_seed(args)
        rho = phase_mod._auto_rho(args.seed)
        rho_shown = rho(folded.p)
    mc_phi = None
    if args.mc_L is not None:
        _need_seed(args)
        mc_phi = dict(L=args.mc_L, replicas=args.mc_replicas,
                      seed=args.seed)
    fe = phase_mod.free_energy(args.alpha, args.beta, args.p, rho=rho,
                               mc_phi=mc_phi, gamma=args.gamma)
    v = fe.verdict
    rows.append(_phase_row(
        mode="point", alpha=args.alpha, beta=args.beta, p=args.p,
        rho=rho_shown, regime=fe.regime, state=v.state,
        evidence=v.evidence, gap=v.gap, value=fe.value,
        is_bound=fe.is_bound))
    if args.strict and v.state == "Undecided":
        code = 3
    return _PHASE_COLS, rows, code


# =====================================================================
# Parser
# =====================================================================

def _build_parser() -> _Parser:
    p = _Parser(prog="copolem",
                description="Copolymer-in-emulsion numerics: entropies, "
                            "free energies, percolation and phase "
                            "diagram, emitted as CSV (+ JSON manifest "
                            "with --out).")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True,
                           parser_class=_Parser)

    def out_flag(sp):
        sp.add_argument("--out", help="write CSV here and a JSON run "
                                      "manifest beside it")

    sp = sub.add_parser("constants",
                        help="model constants",
                        description="Columns: name,value.  Rows: "
                                    "kappa_star, a_star, threshold, "
                                    "mu_sup, mu_sup_value, alpha0, "
                                    "alpha1.")
    out_flag(sp)

    sp = sub.add_parser("entropy",
                        help="closed-form path entropies",
                        description="Columns: kind,a,b,mu,value.  Pass "
                                    "--a [--b] for a crossing row or "
                                    "--mu for an interface row; add "
                                    "--a-max/--mu-max with --res for an "
                                    "inclusive grid.")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--a-max", type=float, dest="a_max")
    sp.add_argument("--mu-max", type=float, dest="mu_max")
    sp.add_argument("--res", type=float, help="grid step")
    out_flag(sp)

    sp = sub.add_parser("oracle",
                        help="exact path counts vs closed forms",
                        description="Columns: kind,a,b,mu,L,rate,"
                                    "extrapolated,closed_form,rel_err.  "
                                    "Counts run at L/4, L/2 and L.")
    sp.add_argument("--a", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--mu", type=float)
    sp.add_argument("--L", type=int, default=80)
    sp.add_argument("--unrestricted", action="store_true",
                    help="drop the corridor restriction on crossings")
    out_flag(sp)

    sp = sub.add_parser("interface",
                        help="quenched single-interface free energy",
                        description="Columns: alpha,beta,mu,mu_realized,"
                                    "L,steps,replicas,seed,estimator,"
                                    "mean,stderr,lower_bound,"
                                    "upper_bound.")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--L", type=int, default=400)
    sp.add_argument("--replicas", type=int, default=100)
    sp.add_argument("--estimator", default="extrapolated",
                    choices=["extrapolated", "corrected", "paired"])
    sp.add_argument("--seed", type=int)
    out_flag(sp)

    sp = sub.add_parser("blocks",
                        help="block-crossing free energies",
                        description="Columns: kind,a,alpha,beta,value,"
                                    "lower,upper,b_star,a1_star,"
                                    "boundary_attained.  One row per "
                                    "kind (AA,AB,BA,BB unless --kind).")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--a", type=float, help="crossing time ratio "
                                            "(default 5/2)")
    sp.add_argument("--kind", choices=["AA", "AB", "BA", "BB"])
    out_flag(sp)

    sp = sub.add_parser("deloc",
                        help="delocalized variational solve",
                        description="Columns: alpha,beta,rho,x_bar,"
                                    "y_bar,F,residual1,residual2.")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    out_flag(sp)

    sp = sub.add_parser("percolation",
                        help="directed-percolation crossing frequency",
                        description="Columns: mode,p,steps,replicas,"
                                    "mean,stderr,extrapolated,value,"
                                    "uncertainty.  --p gives one "
                                    "rho_star row; --pc scans "
                                    "[--p-min,--p-max] and appends the "
                                    "threshold estimate row.")
    sp.add_argument("--p", type=float)
    sp.add_argument("--pc", action="store_true")
    sp.add_argument("--p-min", type=float, default=0.55, dest="p_min")
    sp.add_argument("--p-max", type=float, default=0.75, dest="p_max")
    sp.add_argument("--p-step", type=float, default=0.01, dest="p_step")
    sp.add_argument("--steps", type=int, default=2000)
    sp.add_argument("--replicas", type=int, default=20)
    sp.add_argument("--seed", type=int)
    out_flag(sp)

    sp = sub.add_parser("phase",
                        help="phase classification, sweeps and curves",
                        description="Columns: " + ",".join(_PHASE_COLS)
                                    + ".  Modes: point (--alpha --beta "
                                    "--p), sweep (--alpha-max "
                                    "--beta-max --res --p), curve "
                                    "(--curve envelope|alpha-star|"
                                    "second).  Unused columns stay "
                                    "empty.")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--p", type=float)
    sp.add_argument("--rho", type=float,
                    help="crossing frequency; measured at --seed when "
                         "omitted in the subcritical regime")
    sp.add_argument("--gamma", type=float,
                    help="interface-pair fraction for the localized "
                         "mixture bound")
    sp.add_argument("--alpha-min", type=float, default=0.0,
                    dest="alpha_min")
    sp.add_argument("--alpha-max", type=float, dest="alpha_max")
    sp.add_argument("--beta-min", type=float, default=0.0,
                    dest="beta_min")
    sp.add_argument("--beta-max", type=float, dest="beta_max")
    sp.add_argument("--res", type=float, help="grid step")
    sp.add_argument("--curve", choices=["envelope", "alpha-star",
                                        "second"])
    sp.add_argument("--rho-min", type=float, default=0.05,
                    dest="rho_min")
    sp.add_argument("--rho-max", type=float, default=0.95,
                    dest="rho_max")
    sp.add_argument("--mc-L", type=int, dest="mc_L",
                    help="enable Monte Carlo point values at this "
                         "system size")
    sp.add_argument("--mc-replicas", type=int, default=20,
                    dest="mc_replicas")
    sp.add_argument("--threads", type=int, default=1)
    sp.add_argument("--strict", action="store_true",
                    help="exit 3 when the query resolves to Undecided "
                         "only")
    sp.add_argument("--seed", type=int)
    out_flag(sp)

    return p


_HANDLERS = {
    "constants": _run_constants,
    "entropy": _run_entropy,
    "oracle": _run_oracle,
    "interface": _run_interface,
    "blocks": _run_blocks,
    "deloc": _run_deloc,
    "percolation": _run_percolation,
    "phase": _run_phase,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    t0 = time.time()
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:  # usage error (1) or --help/--version (0)
        return int(exc.code or 0)
    try:
        cols, rows, code = _HANDLERS[args.command](args)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print("failed to converge: %s" % exc, file=sys.stderr)
        return 2
    _emit(cols, rows, args, t0)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
