"""``pfc`` command line: analyze | perron | jentzsch | kr-harness.

Writes a JSON report to stdout and diagnostics to stderr. Exit status is
0 on success, 2 for bad input and 3 when a solver does not converge.
"""

import argparse
import logging
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import krein_rutman as kr
from .errors import ConvergenceError, InputError, PFCError
from .io import parse_kernel, parse_matrix
from .jentzsch import gauss_legendre, jentzsch_analyze, schaefer_check
from .perron import DEFAULT_MAX_ITER, DEFAULT_TOL, is_nilpotent, perron_fixed_point, perron_irreducible
from .report import build_report, dumps
from .structure import cyclic_normal_form, is_irreducible, is_primitive, reducible_block_form

log = logging.getLogger("pfc")

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE = 0, 2, 3


class _Stages:
    def __init__(self, enabled):
        self.enabled = enabled
        self.times = {}

    @contextmanager
    def __call__(self, name):
        t0 = time.perf_counter()
        yield
        self.times[name] = time.perf_counter() - t0

    def report(self):
        return self.times if self.enabled else None


def _structure(A):
    irr = is_irreducible(A)
    out = {"n": A.n, "irreducible": irr, "nilpotent": is_nilpotent(A)}
    prim, exponent = is_primitive(A)
    out["primitive"] = prim
    out["primitivity_exponent"] = exponent
    if irr.irreducible:
        out["cyclic"] = cyclic_normal_form(A)
    elif A.n >= 2:
        perm, sizes = reducible_block_form(A)
        out["block_form"] = {"permutation": perm, "block_sizes": sizes}
    return out


def run_analyze(args, stages, warnings):
    with stages("parse"):
        A = parse_matrix(args.path, args.format)
    if A.clamped:
        warnings.append("entries in [-1e-12, 0) were clamped to zero")
    with stages("structure"):
        res = _structure(A)
        res["schaefer"] = schaefer_check(A)
    return res


def run_perron(args, stages, warnings):
    with stages("parse"):
        A = parse_matrix(args.path, args.format)
    if A.clamped:
        warnings.append("entries in [-1e-12, 0) were clamped to zero")
    with stages("structure"):
        irr = is_irreducible(A).irreducible
        period = cyclic_normal_form(A).period if irr else None
    with stages("solve"):
        if irr:
            cert = perron_irreducible(A, args.tol, args.max_iter)
        else:
            cert = perron_fixed_point(A, args.tol, args.max_iter)
    if not cert.converged:
        raise ConvergenceError(f"no convergence in {cert.iterations} iterations", best=cert)
    return {
        "irreducible": irr,
        "period": period,
        "rho": cert.rho,
        "vector": cert.vector,
        "cw_lower": cert.cw_lower,
        "cw_upper": cert.cw_upper,
        "residual": cert.residual,
        "iterations": cert.iterations,
        "strictly_positive": cert.strictly_positive,
        "nilpotent": cert.nilpotent,
        "simple": cert.simplicity.simple if cert.simplicity else None,
        "simplicity": cert.simplicity,
    }


def run_jentzsch(args, stages, warnings):
    if args.path:
        warnings.append("jentzsch ignores PATH; the kernel comes from --kernel")
    kernel = parse_kernel(args.kernel)
    with stages("solve"):
        rep = jentzsch_analyze(kernel, gauss_legendre(args.nodes))
    return {"kernel": kernel.description, "nodes": args.nodes, "report": rep}


def run_harness(args, stages, warnings):
    name = args.path
    if name not in kr.SCENARIOS:
        raise InputError(f"unknown scenario {name!r}; choose from {sorted(kr.SCENARIOS)}")
    builder = kr.SCENARIOS[name]
    sc = builder(args.theta) if name.startswith("lorentz") else builder()
    out = {"scenario": name, "A": sc.A}
    if sc.theta is not None:
        with stages("sequence"):
            seq = kr.nearly_eigenvector_sequence(sc.A, sc.cone, sc.theta, sc.u, sc.v, args.K)
            split = kr.spectral_split(sc.A)
            decay = kr.peripheral_decay(split, seq)
        if seq.approximants.near_rational:
            warnings.append("theta is numerically near-rational")
        if len(seq.entries) < args.K:
            warnings.append(f"only {len(seq.entries)} usable approximants")
        out["sequence"] = {
            "B_norm1": seq.B_norm1,
            "entries": [
                {"p": e.p, "eps": e.eps, "lambda": e.lam, "cos_eps": e.cos_eps,
                 "w": e.w, "z_norm1": float(np.abs(e.z).sum()), "method": e.method}
                for e in seq.entries
            ],
            "checks": seq.checks,
        }
        out["split"] = {"peripheral_dim": split.peripheral_dim, "r_prime": split.r_prime}
        out["decay"] = decay
    with stages("driver"):
        res = kr.positive_eigenvector_compact(sc.A, sc.cone, K=args.K)
    out["result"] = {"kind": res.kind, "rho": res.rho, "vector": res.vector,
                     "branch": res.branch, "evidence": res.evidence}
    return out


COMMANDS = {
    "analyze": run_analyze,
    "perron": run_perron,
    "jentzsch": run_jentzsch,
    "kr-harness": run_harness,
}


def build_parser():
    p = argparse.ArgumentParser(prog="pfc", description="Perron-Frobenius and Krein-Rutman analyses")
    p.add_argument("command", choices=list(COMMANDS))
    p.add_argument("path", nargs="?", help="matrix file, or scenario name for kr-harness")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--nodes", type=int, default=32)
    p.add_argument("--kernel", default="poly:1,1")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--format", choices=["mm", "csv"])
    p.add_argument("--timing", action="store_true", help="include wall-clock stage timings")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _validate(args):
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    if args.max_iter < 1:
        raise InputError("--max-iter must be >= 1")
    if not 2 <= args.nodes <= 512:
        raise InputError("--nodes must be in [2, 512]")
    if args.K < 1:
        raise InputError("--K must be >= 1")
    if args.command != "jentzsch" and not args.path:
        raise InputError(f"{args.command} needs a PATH argument")


def run(args, out=None):
    """Execute a parsed request; returns the exit code."""
    out = sys.stdout if out is None else out
    stages = _Stages(args.timing)
    warnings = []
    try:
        _validate(args)
        results = COMMANDS[args.command](args, stages, warnings)
    except InputError as exc:
        log.error("input error: %s", exc)
        return EXIT_INPUT
    except ConvergenceError as exc:
        log.error("convergence failure: %s", exc)
        return EXIT_CONVERGENCE
    except PFCError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    request = {k: getattr(args, k) for k in ("command", "path", "tol", "max_iter", "nodes",
                                             "kernel", "theta", "K", "format")}
    for w in warnings:
        log.warning("%s", w)
    out.write(dumps(build_report(request, results, warnings, stages.report())))
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    # fresh handler per call so the current stderr is used
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("pfc: %(levelname)s: %(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
