"""Command line front end: ``bcurrents run <scenario>`` and ``bcurrents list``."""

import argparse
import csv
import inspect
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor

from .config import ScenarioError, list_builtins, load_scenario
from .verify import CHECKS, CheckReport


def _slug(text):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", text).strip("_")


def run_check(sc, name, params, label, f, seed=None, tol_scale=1.0):
    fn = CHECKS[name]
    kw = dict(params)
    if seed is not None and "seed" in inspect.signature(fn).parameters:
        kw["seed"] = seed
    if name == "check_tensor_ce":
        if not f.tensor_factors:
            rep = CheckReport(name, f"f = {f.name}; domain = {sc.domain.describe()}")
            rep.fail("input", ValueError(f"{label} is not a tensor product"))
            return rep
        return fn(list(f.tensor_factors), sc.domain, cfg=sc.cfg, tol_scale=tol_scale, **kw)
    return fn(f, sc.domain, cfg=sc.cfg, tol_scale=tol_scale, **kw)


def _write(out, sc, jobs):
    os.makedirs(out, exist_ok=True)
    summary = {"scenario": sc.name, "seed": sc.seed, "tol_scale": sc.tol_scale, "checks": []}
    with open(os.path.join(out, "ladders.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "function", "pairing", "step", "re", "im", "correction"])
        for (name, label), rep in jobs:
            payload = rep.to_dict(timings=False)
            payload["function"] = label
            with open(os.path.join(out, f"{_slug(name)}__{_slug(label)}.json"), "w", encoding="utf-8") as jf:
                json.dump(payload, jf, indent=2, sort_keys=True)
                jf.write("\n")
            for row in rep.ladder_rows():
                w.writerow([name, label, row[0], row[1], repr(row[2]), repr(row[3]),
                            row[4] if row[4] == "" else repr(row[4])])
            summary["checks"].append({"check": name, "function": label, "passed": rep.passed,
                                      "worst_ratio": rep.worst, "wall_time": round(rep.wall_time, 3)})
    summary["passed"] = all(c["passed"] for c in summary["checks"])
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_run(args):
    try:
        sc = load_scenario(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    only = None
    if args.only:
        only = [c.strip() for c in args.only.split(",") if c.strip()]
        bad = [c for c in only if c not in CHECKS]
        if bad:
            print(f"error: --only names unknown check(s) {', '.join(bad)}", file=sys.stderr)
            return 2
    if args.seed is not None:
        sc.seed = args.seed
    tol_scale = sc.tol_scale * (args.tol_scale if args.tol_scale is not None else 1.0)
    tasks = [(name, params, label, f) for name, params in sc.checks if only is None or name in only
             for label, f in sc.functions]
    if not tasks:
        print("error: no checks selected", file=sys.stderr)
        return 2

    def work(t):
        name, params, label, f = t
        return run_check(sc, name, params, label, f, sc.seed, tol_scale)

    if args.jobs > 1:
        with ThreadPoolExecutor(args.jobs) as ex:
            reports = list(ex.map(work, tasks))
    else:
        reports = [work(t) for t in tasks]
    jobs = [((t[0], t[2]), r) for t, r in zip(tasks, reports)]
    print(f"scenario {sc.name}: {sc.domain.describe()}, seed {sc.seed}, tol scale {tol_scale:g}")
    for (name, label), rep in jobs:
        status = "PASS" if rep.passed else "FAIL"
        print(f"  {status}  {name:24s} {label:32s} worst {rep.worst:9.3g}  {rep.wall_time:7.2f}s")
        if not rep.passed:
            for lab, r, t in rep.residuals:
                if r > t:
                    print(f"        {lab}: {r:.3g} > {t:.3g}")
            for n in rep.notes[1:]:
                print(f"        note: {n}")
    out = args.out or sc.output
    if out:
        _write(out, sc, jobs)
        print(f"reports written to {out}")
    ok = all(r.passed for _, r in jobs)
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


def cmd_list(args):
    print(list_builtins())
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="bcurrents",
                                description="Run numerical checks of boundary currents of holomorphic functions.")
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the checks of a scenario file")
    r.add_argument("file")
    r.add_argument("--only", help="comma separated check names")
    r.add_argument("--tol-scale", type=float, help="multiply every tolerance")
    r.add_argument("--seed", type=int, help="override the scenario seed")
    r.add_argument("--out", help="report directory")
    r.add_argument("--jobs", type=int, default=1, help="worker threads")
    r.set_defaults(func=cmd_run)
    ls = sub.add_parser("list", help="list built-in domains, functions, form constructors and checks")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
