"""Command line entry point: ``pinncert run|replay|plot|constants``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .. import consts
from . import config as cfgmod
from . import plots, run

EXIT_CONFIG = 2
EXIT_UNSOUND = 3


def _params(items) -> dict:
    out = {}
    for it in items:
        if "=" not in it:
            raise ValueError(f"expected key=value, got {it!r}")
        k, v = it.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _floats(s) -> list:
    return [float(x) for x in str(s).split(",") if x.strip()]


def _ints(s) -> list:
    return [int(x) for x in str(s).split(",") if x.strip()]


def constants_table(table: str, params: dict) -> str:
    """CSV text for one of the constant tables."""
    extra = set(params)
    lines = []
    if table == "poincare":
        ps = _floats(params.get("p", "1,1.25,1.5,2,3,4,5"))
        extra -= {"p"}
        lines.append("p,pi_p")
        lines += [f"{p!r},{consts.poincare_const(p)!r}" for p in ps]
    elif table == "bramble_hilbert":
        sig = _ints(params.get("sigma", "0,1,2,3,4"))
        nus = _ints(params.get("nu", "0"))
        ps = _floats(params.get("p", "2"))
        ms = _ints(params.get("m", "1,2"))
        extra -= {"sigma", "nu", "p", "m"}
        lines.append("sigma,nu,p,m,c")
        for m in ms:
            for p in ps:
                for nu in nus:
                    for s in sig:
                        if s >= nu:
                            lines.append(f"{s},{nu},{p!r},{m},{consts.bramble_hilbert_const(s, nu, p, m)!r}")
    elif table == "tanh_size":
        sig = _ints(params.get("sigma", "3,4,5"))
        m = int(params.get("m", "2"))
        Ns = _ints(params.get("N", "6,8,16"))
        lo, hi = _floats(params.get("box", "0,1"))
        extra -= {"sigma", "m", "N", "box"}
        box = [(lo, hi)] * m
        lines.append("sigma,m,N,width1,width2,weight_exponent")
        for s in sig:
            for N in Ns:
                r = consts.tanh_size_bounds(s, m, box, N)
                lines.append(f"{s},{m},{N},{r.width1},{r.width2},{r.weight_exponent!r}")
        lines.append("# width2 uses the general formula; at m = 2, sigma = 3 it equals 60 N^2 * area "
                     "(a 60 N^3 variant quoted for the heat setup does not follow from it)")
    elif table == "aux":
        p = params.get("p", "2")
        L = params.get("L", "1")
        extra -= {"p", "L"}
        lines.append("lemma,p,L,value")
        for lid in ("poincare_gradient", "poincare_boundary", "trace", "pc2"):
            for pv in _floats(p):
                for Lv in _floats(L):
                    if lid == "pc2" and pv < 2:
                        continue
                    lines.append(f"{lid},{pv!r},{Lv!r},{consts.aux_lemma_consts(lid, p=pv, L=Lv)!r}")
    else:
        raise ValueError(f"unknown table {table!r}; choose poincare, bramble_hilbert, tanh_size or aux")
    if extra:
        raise ValueError(f"unknown parameters for {table}: {sorted(extra)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pinncert", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true", help="log every checkpoint")
    sub = ap.add_subparsers(dest="cmd", required=True)

    r = sub.add_parser("run", help="train and certify one configured experiment")
    r.add_argument("config")
    r.add_argument("--outdir", help="overrides the config and PINNCERT_OUTDIR")
    r.add_argument("--no-plots", action="store_true")

    rp = sub.add_parser("replay", help="recompute the CSV row of a checkpoint")
    rp.add_argument("checkpoint")
    rp.add_argument("config")
    rp.add_argument("--csv", help="record to compare the recomputed row against")

    pl = sub.add_parser("plot", help="write the two SVG plots of a record")
    pl.add_argument("csv")
    pl.add_argument("--outdir")

    c = sub.add_parser("constants", help="tabulate constants as CSV")
    c.add_argument("table", choices=["poincare", "bramble_hilbert", "tanh_size", "aux"])
    c.add_argument("params", nargs="*", help="key=value, lists comma separated")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.cmd == "run":
            cfg = cfgmod.load(args.config)
            res = run.run_experiment(cfg, args.outdir)
            if not args.no_plots and res.rows:
                plots.emit_plots(res.csv_path)
            sys.stdout.write((res.outdir / "summary.txt").read_text(encoding="utf-8"))
            print(f"record: {res.csv_path}")
            return 0 if res.sound else EXIT_UNSOUND
        if args.cmd == "replay":
            cfg = cfgmod.load(args.config)
            row = run.replay(args.checkpoint, cfg)
            line = row.csv_line()
            print(",".join(run.HEADER))
            print(line)
            if args.csv:
                lines = Path(args.csv).read_text(encoding="utf-8").splitlines()[1:]
                if line not in lines:
                    print("replayed row does not match the record", file=sys.stderr)
                    return 1
                print("replayed row matches the record")
            return 0
        if args.cmd == "plot":
            for p in plots.emit_plots(args.csv, args.outdir):
                print(p)
            return 0
        if args.cmd == "constants":
            sys.stdout.write(constants_table(args.table, _params(args.params)))
            return 0
    except cfgmod.ConfigError as e:
        print(str(e), file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
