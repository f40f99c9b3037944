"""Command-line front end: solve / generate / verify / strategy / pitfall.

Exit codes: 0 success, 2 usage error, 3 rank failure, 4 non-convergence,
5 I/O or file-format error.  All outputs are deterministic in the flags and
the input bytes; sigma values are written as tab-separated text with 17
significant digits, which round-trips binary64 exactly.
"""

import argparse
import os
import sys

import numpy as np

from .blocked import preprocess_tall, solve
from .core import MatrixPlanePair, ProblemPair, read_matrix, write_matrix
from .errors import FileFormatError, RankError
from .harness import (accuracy_report, gen_pair, pitfall_report,
                      random_genspec, write_pitfall_tsv)
from .pointwise import SolverConfig
from .strategies import comm_mapping, dump_table, gen_table

EXIT_OK = 0
EXIT_RANK = 3
EXIT_NOCONV = 4
EXIT_IO = 5


def parse_args(argv):
    ap = argparse.ArgumentParser(prog="hzgsvd", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    so = sub.add_parser("solve", help="solve a GSVD problem from matrix files")
    so.add_argument("--f", required=True, help="F matrix file (sidecar at <path>.hdr)")
    so.add_argument("--g", required=True, help="G matrix file (sidecar at <path>.hdr)")
    so.add_argument("--out", required=True, help="output directory")
    _solver_flags(so)

    ge = sub.add_parser("generate", help="generate a pair with known sigma")
    ge.add_argument("--n", type=int, required=True)
    ge.add_argument("--seed", type=int, default=1)
    ge.add_argument("--field", choices=["real", "complex"], default="real")
    ge.add_argument("--out", required=True)

    ve = sub.add_parser("verify", help="accuracy report for a solved problem")
    ve.add_argument("--f", required=True)
    ve.add_argument("--g", required=True)
    ve.add_argument("--solution", required=True, help="directory written by solve")
    ve.add_argument("--ref", help="optional reference sigma TSV")
    ve.add_argument("--out", required=True, help="report TSV path")

    st = sub.add_parser("strategy", help="dump a strategy table")
    st.add_argument("--kind", choices=["me", "mm"], required=True)
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--dump", action="store_true")
    st.add_argument("--mapping", action="store_true",
                    help="also dump the communication mapping")

    pf = sub.add_parser("pitfall", help="factored vs assembled-Grammian accuracy sweep")
    pf.add_argument("--n", type=int, default=64)
    pf.add_argument("--exponents", default="1,2,3,4,5,6,7,8,9,10,11,12,13,14,16")
    pf.add_argument("--seed", type=int, default=1)
    pf.add_argument("--out", required=True)

    return ap.parse_args(argv)


def _solver_flags(ap):
    ap.add_argument("--variant", type=int, choices=range(8), default=0)
    ap.add_argument("--outer", choices=["me", "mm"], default="me")
    ap.add_argument("--inner", choices=["me", "mm"], default="me")
    ap.add_argument("--blocking", choices=["fb", "bo"], default="fb")
    sg = ap.add_mutually_exclusive_group()
    sg.add_argument("--sort", dest="sort", action="store_true", default=True)
    sg.add_argument("--no-sort", dest="sort", action="store_false")
    ap.add_argument("-w", "--block-width", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--worker-sweeps", type=int, default=1,
                    help="sweep cap per worker per outermost step")
    ap.add_argument("--shorten", choices=["grammian", "qr"], default="grammian")
    ap.add_argument("--shorten-tall", action="store_true",
                    help="pre-shorten a tall pair by pivoted QR before solving")
    ap.add_argument("--pool", type=int, default=1,
                    help="thread pool size for independent block tasks")


def _config_from(ns):
    return SolverConfig(variant_id=ns.variant, outer_kind=ns.outer,
                        inner_kind=ns.inner, blocking=ns.blocking,
                        sorting=ns.sort, block_width=ns.block_width,
                        shorten=ns.shorten, pool=ns.pool)


def _write_sigma_tsv(path, sigF, sigG, sig):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("sigma_f\tsigma_g\tsigma\n")
        for a, b, c in zip(sigF, sigG, sig):
            fh.write("%.17g\t%.17g\t%.17g\n" % (a, b, c))


def _read_sigma_tsv(path):
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split("\t")
        for line in fh:
            rows.append([float(x) for x in line.split("\t")])
    cols = np.asarray(rows).T
    return dict(zip(header, cols))


def _cmd_solve(ns):
    F = read_matrix(ns.f, ns.f + ".hdr")
    G = read_matrix(ns.g, ns.g + ".hdr")
    if ns.shorten_tall and (F.rows > F.cols or G.rows > G.cols):
        Fs, Gs, piv = preprocess_tall(F, G)
        r = solve(Fs, Gs, _config_from(ns), workers=ns.workers,
                  worker_sweeps=ns.worker_sweeps)
        zd = r.Z.to_dense()
        zfull = np.empty_like(zd)
        zfull[piv, :] = zd
        r.Z = MatrixPlanePair.from_dense(zfull)
    else:
        r = solve(F, G, _config_from(ns), workers=ns.workers,
                  worker_sweeps=ns.worker_sweeps)
    os.makedirs(ns.out, exist_ok=True)
    write_matrix(r.U, os.path.join(ns.out, "U.bin"))
    write_matrix(r.V, os.path.join(ns.out, "V.bin"))
    write_matrix(r.Z, os.path.join(ns.out, "Z.bin"))
    _write_sigma_tsv(os.path.join(ns.out, "sigma.tsv"), r.sigmaF, r.sigmaG,
                     r.sigma)
    stats = "sweeps=%d total=%d big=%d converged=%d" % (
        r.sweeps, r.total_transforms, r.big_transforms, 1 if r.converged else 0)
    with open(os.path.join(ns.out, "stats.txt"), "w", encoding="utf-8") as fh:
        fh.write(stats + "\n")
        fh.write("workers=%d\n" % r.workers)
    print(stats)
    return EXIT_OK if r.converged else EXIT_NOCONV


def _cmd_generate(ns):
    spec = random_genspec(ns.n, ns.seed, ns.field)
    pair, ref = gen_pair(spec)
    os.makedirs(ns.out, exist_ok=True)
    write_matrix(pair.F, os.path.join(ns.out, "F.bin"))
    write_matrix(pair.G, os.path.join(ns.out, "G.bin"))
    with open(os.path.join(ns.out, "sigma_ref.tsv"), "w", encoding="utf-8") as fh:
        fh.write("sigma\n")
        for v in ref:
            fh.write("%.17g\n" % v)
    print("generated n=%d field=%s seed=%d" % (ns.n, ns.field, ns.seed))
    return EXIT_OK


def _cmd_verify(ns):
    from .core import GsvdResult
    F = read_matrix(ns.f, ns.f + ".hdr")
    G = read_matrix(ns.g, ns.g + ".hdr")
    U = read_matrix(os.path.join(ns.solution, "U.bin"),
                    os.path.join(ns.solution, "U.bin.hdr"))
    V = read_matrix(os.path.join(ns.solution, "V.bin"),
                    os.path.join(ns.solution, "V.bin.hdr"))
    Z = read_matrix(os.path.join(ns.solution, "Z.bin"),
                    os.path.join(ns.solution, "Z.bin.hdr"))
    sig = _read_sigma_tsv(os.path.join(ns.solution, "sigma.tsv"))
    r = GsvdResult(U, V, Z, sig["sigma_f"], sig["sigma_g"], sig["sigma"],
                   sweeps=0, total_transforms=0, big_transforms=0)
    ref = None
    if ns.ref:
        ref = _read_sigma_tsv(ns.ref)["sigma"]
    rep = accuracy_report(ProblemPair(F, G), r, ref)
    with open(ns.out, "w", encoding="utf-8") as fh:
        fh.write("resF\tresG\torthU\torthV\tmax_rel_sigma\tavg_rel_sigma\n")
        fh.write("%.17g\t%.17g\t%.17g\t%.17g\t%s\t%s\n" % (
            rep.resF, rep.resG, rep.orthU, rep.orthV,
            "%.17g" % rep.max_rel_sigma if rep.max_rel_sigma is not None else "nan",
            "%.17g" % rep.avg_rel_sigma if rep.avg_rel_sigma is not None else "nan"))
    print("resF=%.3e resG=%.3e orthU=%.3e orthV=%.3e" %
          (rep.resF, rep.resG, rep.orthU, rep.orthV))
    return EXIT_OK


def _cmd_strategy(ns):
    t = gen_table(ns.kind, ns.n)
    mapping = comm_mapping(t) if ns.mapping else None
    sys.stdout.write(dump_table(t, mapping))
    return EXIT_OK


def _cmd_pitfall(ns):
    exponents = [int(x) for x in ns.exponents.split(",") if x.strip()]
    rows = pitfall_report(ns.n, exponents, ns.seed)
    write_pitfall_tsv(rows, ns.out)
    for (kb, mg, me_) in rows:
        print("kappaB=%g mre_gsvd=%.3e mre_gevd=%.3e" % (kb, mg, me_))
    return EXIT_OK


def run(ns):
    handler = {"solve": _cmd_solve, "generate": _cmd_generate,
               "verify": _cmd_verify, "strategy": _cmd_strategy,
               "pitfall": _cmd_pitfall}[ns.command]
    return handler(ns)


def main(argv=None):
    ns = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return run(ns)
    except FileFormatError as exc:
        print("file error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except RankError as exc:
        print("rank failure: %s" % exc, file=sys.stderr)
        return EXIT_RANK


if __name__ == "__main__":
    sys.exit(main())
