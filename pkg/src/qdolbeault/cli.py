"""Command line entry point.

    qdolbeault all --type A3 --node 2 --module omega1 --module omega2 --out out/
    qdolbeault diff-golden out/report.json --fixture gr24_symmetric_rules
"""
import argparse
import csv
import json
import sys
from pathlib import Path

from .golden import FixtureError, diff_golden, load_fixture
from .pipeline import ConfigError
from .report import STAGES, JobConfig, run

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _caps(text):
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        k, _, v = part.partition("=")
        if k.strip() not in ("sym", "koszul") or not v.strip().isdigit():
            raise ConfigError(f"bad cap {part!r}; expected sym=N or koszul=N")
        out[k.strip()] = int(v)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="qdolbeault", description=__doc__.split("\n")[0])
    p.add_argument("stage", choices=list(STAGES) + ["all", "diff-golden"])
    p.add_argument("report", nargs="?", help="report.json (diff-golden only)")
    p.add_argument("--type", default="A3", help="root system, e.g. A3, C4, E6")
    p.add_argument("--node", type=int, default=2, help="crossed node (1-based, Bourbaki)")
    p.add_argument("--caps", default="sym=4,koszul=4")
    p.add_argument("--module", action="append", help="auxiliary module: omegaK, trivial or a weight '1,0,0'")
    p.add_argument("--q0", action="append", type=float, help="numeric q > 1 (repeatable)")
    p.add_argument("--out", default="qdolbeault-out")
    p.add_argument("--fixture-dir")
    p.add_argument("--fixture", action="append", help="fixture name or path (diff-golden)")
    p.add_argument("--allow-e7", action="store_true")
    p.add_argument("--no-plots", action="store_true")
    return p


def _write_outputs(rep, out):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    doc = rep.to_json()
    (out / "report.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    files = ["report.json"]
    if rep.spectra:
        with open(out / "spectra.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["module", "q0", "eigenvalue", "multiplicity"])
            for row in rep.spectra:
                w.writerow([row[0], f"{row[1]:g}", f"{row[2]:.10g}", row[3]])
        files.append("spectra.csv")
        if rep.cfg.plots:
            from .plotting import plot_spectra
            plot_spectra(rep.spectra_raw, rep.flag.name, out / "spectra.png")
            files.append("spectra.png")
    return files


def _diff_command(args):
    if not args.report:
        raise ConfigError("diff-golden needs a report.json path")
    doc = json.loads(Path(args.report).read_text())
    names = args.fixture or []
    if not names:
        raise ConfigError("diff-golden needs at least one --fixture")
    ok_all = True
    for name in names:
        fx = load_fixture(name, args.fixture_dir)
        ok, diffs = diff_golden(doc, fx)
        print(f"{fx['name']}: {'pass' if ok else 'FAIL'}")
        for d in diffs:
            print(f"  {d}")
        ok_all &= ok
    return EXIT_OK if ok_all else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.stage == "diff-golden":
            return _diff_command(args)
        caps = _caps(args.caps)
        cfg = JobConfig(type=args.type, node=args.node, sym_cap=caps.get("sym", 4),
                        koszul_cap=caps.get("koszul", 4), modules=args.module or ["omega1"],
                        q0s=args.q0 or [1.1, 2.0], out=args.out, fixture_dir=args.fixture_dir,
                        allow_e7=args.allow_e7, plots=not args.no_plots)
        rep = run(args.stage, cfg)
    except (ConfigError, FixtureError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    files = _write_outputs(rep, args.out)
    n_ok = sum(v["holds"] for v in rep.verdicts)
    print(f"{rep.flag.name}: {n_ok}/{len(rep.verdicts)} checks passed; "
          f"golden {sum(g['passed'] for g in rep.golden)}/{len(rep.golden)}; wrote {', '.join(files)} to {args.out}")
    for line in rep.failures():
        print(f"FAIL {line}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
