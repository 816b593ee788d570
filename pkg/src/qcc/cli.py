"""``qcc`` command-line front end.

Every command writes exactly one JSON document to stdout. Exit status is 0
on success, 2 for invalid input (unreadable or invalid state files, bad
flags) and 3 when an optimiser gate fails (no symmetric extension passed the
residual gate, or convergence was required and not reached).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as qio
from .coherence import l1_coherence
from .correlated import (
    DEFAULT_CC_CONFIG,
    CanonicalBasisMode,
    asymmetric_discord_delta,
    correlated_coherence_canonical,
    local_eigenbasis,
)
from .errors import NoSymmetricCandidateFound, OptimizerDidNotConverge, QccError
from .extensions import (
    DEFAULT_EXTENSION_CONFIG,
    SYMMETRY_GATE,
    eoc_upper_bound,
    pad_to_equal_sides,
    symmetry_certificate,
)
from .state import DensityMatrix, ProductBasisChoice, frobenius_distance, ptrace
from . import stategen

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_GATE = 3

EXTENSION_TOL = 1e-8
RANDOM_FAMILIES = {"random-pure", "random-mixed", "random-separable", "cc-state", "cq-state"}


class _UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, allow_nan=True) + "\n")


def _fail(code: int, message: str, **extra) -> int:
    sys.stderr.write(json.dumps({"error": message, **extra}) + "\n")
    return code


def _need_seed(args) -> None:
    if args.strict and args.seed is None:
        raise _UsageError(f"--strict requires --seed for '{args.command}'")


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


# --------------------------------------------------------------------------- #
#                                 commands                                     #
# --------------------------------------------------------------------------- #

def cmd_coherence(args) -> int:
    rho = qio.read_state(args.file)
    if args.basis == "eigen":
        basis = ProductBasisChoice(local_eigenbasis(rho, "A"), local_eigenbasis(rho, "B"))
        value = l1_coherence(rho, basis)
    else:
        value = l1_coherence(rho)
    _emit({"c_l1": value})
    return EXIT_OK


def _cc_config(args):
    cfg = DEFAULT_CC_CONFIG.replace(seed=_seed(args))
    if args.restarts is not None:
        cfg = cfg.replace(restarts=args.restarts)
    return cfg


def cmd_cc(args) -> int:
    if args.mode == "min":
        _need_seed(args)
    rho = qio.read_state(args.file)
    res = correlated_coherence_canonical(rho, CanonicalBasisMode(args.mode), _cc_config(args))
    out = {
        "value": res.value,
        "mode": res.mode.value,
        "basis_a": qio.complex_matrix_obj(res.basis.basis_a.vectors),
        "basis_b": qio.complex_matrix_obj(res.basis.basis_b.vectors),
    }
    if res.optimizer_report is not None:
        out["optimizer"] = res.optimizer_report.as_dict()
    _emit(out)
    return EXIT_OK


def cmd_discord(args) -> int:
    _need_seed(args)
    rho = qio.read_state(args.file)
    cfg = _cc_config(args)
    if args.asym is not None:
        delta, zero = asymmetric_discord_delta(rho, args.asym, args.tol, cfg)
        _emit({"kind": "asymmetric", "side": args.asym.upper(), "value": delta, "zero": zero})
    else:
        res = correlated_coherence_canonical(rho, CanonicalBasisMode.MINIMIZED, cfg)
        _emit({"kind": "symmetric", "value": res.value, "zero": bool(res.value <= args.tol)})
    return EXIT_OK


def cmd_eoc(args) -> int:
    _need_seed(args)
    rho = qio.read_state(args.file)
    decomp = qio.read_decomposition(args.decomposition) if args.decomposition else None
    cfg = DEFAULT_EXTENSION_CONFIG.replace(seed=_seed(args))
    if args.restarts is not None:
        cfg = cfg.replace(restarts=args.restarts)
    if args.mu is not None:
        cfg = cfg.replace(penalty_weight=args.mu)
    if args.max_iters is not None:
        cfg = cfg.replace(max_iters=args.max_iters)
    anc = tuple(args.ancilla) if args.ancilla else None
    res = eoc_upper_bound(rho, anc, cfg, decomposition=decomp)
    if args.save_extension:
        qio.write_state(res.state, args.save_extension)
    _emit(res.summary())
    return EXIT_OK


def _gen_state(args) -> tuple[DensityMatrix, object]:
    fam = args.family
    seed = _seed(args)
    dims = tuple(args.dims) if args.dims else (2, 2)
    if len(dims) != 2:
        raise _UsageError("--dims takes exactly two integers (d_A d_B)")
    if fam == "bell":
        return stategen.bell(args.which), None
    if fam == "werner":
        if args.p is None:
            raise _UsageError("werner needs --p")
        return stategen.werner(args.p), None
    if fam == "random-pure":
        return stategen.random_pure(dims, seed), None
    if fam == "random-mixed":
        return stategen.random_mixed(dims, args.rank, seed), None
    if fam == "random-separable":
        return stategen.random_separable(args.terms, dims, seed)
    if fam == "cc-state":
        return stategen.random_cc_state(dims, seed), None
    if fam == "cq-state":
        return stategen.random_cq_state(dims, seed, commuting=args.commuting), None
    raise _UsageError(f"unknown family {fam!r}")


def cmd_gen(args) -> int:
    if args.family in RANDOM_FAMILIES:
        _need_seed(args)
    rho, decomp = _gen_state(args)
    if args.decomposition_out:
        if decomp is None:
            raise _UsageError("--decomposition-out only applies to random-separable")
        Path(args.decomposition_out).write_text(qio.decomposition_to_json(decomp))
    if args.output:
        qio.write_state(rho, args.output)
        _emit({"written": str(args.output), "dims_a": list(rho.dims_a), "dims_b": list(rho.dims_b)})
    else:
        sys.stdout.write(qio.state_to_json(rho))
    return EXIT_OK


def cmd_check_extension(args) -> int:
    ext = qio.read_state(args.ext_file)
    rho = qio.read_state(args.marginal)
    if len(ext.dims_a) < 2 or len(ext.dims_b) < 2:
        raise _UsageError("extension file needs an ancilla as the last subsystem of each side")
    if ext.dims_a[:-1] != rho.dims_a or ext.dims_b[:-1] != rho.dims_b:
        _emit({"is_extension": False, "marginal_residual": None, "symmetry_residual": None,
               "reason": "system dimensions do not match"})
        return EXIT_OK
    s = ext.bipartition()
    keep = [i for i in range(ext.n_subsystems) if i not in (s - 1, ext.n_subsystems - 1)]
    marg = ptrace(ext.data, ext.dims, keep)
    residual = frobenius_distance(marg, rho.data)
    cert = symmetry_certificate(pad_to_equal_sides(ext))
    _emit({
        "is_extension": bool(residual <= args.tol),
        "marginal_residual": residual,
        "symmetry_residual": cert.residual,
        "symmetry_lower_bound": cert.lower_bound,
        "symmetric": bool(not cert.lower_bound and cert.residual <= SYMMETRY_GATE),
    })
    return EXIT_OK


# --------------------------------------------------------------------------- #
#                                  parser                                      #
# --------------------------------------------------------------------------- #

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep stderr machine readable, exit 2 like argparse
        self.exit(EXIT_INVALID, json.dumps({"error": message}) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcc", description="Coherence and correlated-coherence measures for bipartite states.")
    p.add_argument("--strict", action="store_true", help="require --seed for every randomised command")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("--strict", action="store_true", default=argparse.SUPPRESS)
        return sp

    c = add("coherence", cmd_coherence, "l1 coherence of a state file")
    c.add_argument("file")
    c.add_argument("--basis", choices=["computational", "eigen"], default="computational")

    c = add("cc", cmd_cc, "correlated coherence in the local eigenbases")
    c.add_argument("file")
    c.add_argument("--mode", choices=["fixed", "min"], default="min")
    c.add_argument("--seed", type=int)
    c.add_argument("--restarts", type=int)

    c = add("discord", cmd_discord, "discord-zero classifiers")
    c.add_argument("file")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--sym", action="store_true", help="symmetric (classical-classical) test (default)")
    g.add_argument("--asym", choices=["A", "B", "a", "b"], help="asymmetric test measuring this side")
    c.add_argument("--tol", type=float, default=1e-7)
    c.add_argument("--seed", type=int)
    c.add_argument("--restarts", type=int)

    c = add("eoc", cmd_eoc, "entanglement-of-coherence upper bound")
    c.add_argument("file")
    c.add_argument("--ancilla", nargs=2, type=int, metavar=("DA", "DB"))
    c.add_argument("--restarts", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--mu", type=float)
    c.add_argument("--max-iters", type=int)
    c.add_argument("--decomposition", help="separable decomposition sidecar (JSON) used as a witness seed")
    c.add_argument("--save-extension", help="write the accepted extension state to this file")

    c = add("gen", cmd_gen, "generate a state file")
    c.add_argument("family", choices=["bell", "werner", *sorted(RANDOM_FAMILIES)])
    c.add_argument("which", nargs="?", default="phi+", help="Bell state label (phi+, phi-, psi+, psi-)")
    c.add_argument("--p", type=float)
    c.add_argument("--dims", nargs=2, type=int, metavar=("DA", "DB"))
    c.add_argument("--rank", type=int)
    c.add_argument("--terms", type=int, default=4)
    c.add_argument("--commuting", action="store_true")
    c.add_argument("--seed", type=int)
    c.add_argument("-o", "--output")
    c.add_argument("--decomposition-out")

    c = add("check-extension", cmd_check_extension, "check an extension against its marginal")
    c.add_argument("ext_file")
    c.add_argument("--marginal", required=True)
    c.add_argument("--tol", type=float, default=EXTENSION_TOL)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "seed"):
        args.seed = None
    try:
        return args.func(args)
    except _UsageError as exc:
        return _fail(EXIT_INVALID, str(exc))
    except (NoSymmetricCandidateFound, OptimizerDidNotConverge) as exc:
        best = getattr(exc, "best_residual", getattr(exc, "best_value", None))
        return _fail(EXIT_GATE, str(exc), best=best)
    except (QccError, ValueError, OSError) as exc:
        report = {"type": type(exc).__name__}
        violations = getattr(exc, "violations", None)
        if violations:
            report["violations"] = [{"kind": v.kind, "residual": v.residual} for v in violations]
        return _fail(EXIT_INVALID, str(exc), **report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
