"""Command-line interface.

Exit codes: 0 on success, 1 on data errors (unreadable or inconsistent
datasets), 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .dataset import arff_nominal_attributes, parse_arff, parse_csv, to_multilabel, write_arff, write_csv
from .errors import ConfigError, DataError
from .experiment import CvPlan, ModelSpec, StudyConfig, run_cv, run_rq1, run_rq2, run_rq3
from .learners import BASE_NAMES, make_base
from .ops import build_multilabel, detect_disparity, merge_single_label, remove_disparity
from .report import render_rq1, render_rq2, render_rq3, render_stats, to_json
from .stats import compute_stats

log = logging.getLogger("smellml")

# config key -> parser for its value
CONFIG_KEYS = {
    "k": int,
    "reps": int,
    "seed": int,
    "n_jobs": int,
    "forest_size": int,
    "bag_size": int,
    "stratification": str,
    "chain_order": str,
    "lm_label": str,
    "fe_label": str,
    "labels": str,
    "method": str,
    "base": str,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment.

    ``positive.<label> = <value>`` names the nominal value counted as 1 for
    that label.
    """
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key.startswith("positive."):
            out.setdefault("positive", {})[key[len("positive."):]] = value
            continue
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = CONFIG_KEYS[key](value)
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from None
    return out


def _settings(args) -> dict:
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    return cfg


def _split(value):
    return [v.strip() for v in value.split(",") if v.strip()] if value else None


def load_dataset(path, labels=None, positive=None):
    """Read an ARFF or CSV file (by extension).

    Without explicit ``labels`` an ARFF file uses its nominal attributes and a
    CSV file its last column.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if path.suffix.lower() == ".csv":
        if labels is None:
            header = text.splitlines()[0] if text.strip() else ""
            labels = [header.split(",")[-1].strip()] if header else []
        return parse_csv(text, labels, positive_values=positive, name=path.stem)
    if labels is None:
        labels = arff_nominal_attributes(text)
    return parse_arff(text, labels, positive_values=positive)


def _write(d, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if hasattr(d, "to_tabular"):
        d = d.to_tabular()
    path.write_text(write_csv(d) if path.suffix.lower() == ".csv" else write_arff(d))


def _plan(cfg):
    return CvPlan(k=cfg.get("k", 10), repetitions=cfg.get("reps", 10), seed=cfg.get("seed", 0),
                  stratification=cfg.get("stratification", "by-labelset"))


def _study(cfg, label_names=None):
    order = None
    if cfg.get("chain_order"):
        names = _split(cfg["chain_order"])
        aliases = {"lm": 0, "fe": 1}
        try:
            order = tuple(aliases[n.lower()] if n.lower() in aliases else
                          (label_names.index(n) if label_names and n in label_names else int(n)) for n in names)
        except ValueError:
            raise ConfigError(f"cannot interpret chain order {cfg['chain_order']!r}") from None
    return StudyConfig(plan=_plan(cfg), forest_size=cfg.get("forest_size", 100), bag_size=cfg.get("bag_size", 10),
                       n_jobs=cfg.get("n_jobs", 1), chain_order=order)


# ---------------------------------------------------------------- commands

def cmd_stats(args):
    cfg = _settings(args)
    d = load_dataset(args.mld, _split(cfg.get("labels")), cfg.get("positive"))
    stats = compute_stats(to_multilabel(d))
    if args.json:
        sys.stdout.write(to_json(stats.to_dict()))
    else:
        sys.stdout.write(render_stats(stats))


def cmd_build_mld(args):
    cfg = _settings(args)
    a = load_dataset(args.a, _split(cfg.get("lm_label")), cfg.get("positive"))
    b = load_dataset(args.b, _split(cfg.get("fe_label")), cfg.get("positive"))
    mld = build_multilabel(a, b)
    _write(mld, args.output)
    print(f"wrote {mld.n_instances} instances with labels {list(mld.label_names)} to {args.output}")


def cmd_merge(args):
    cfg = _settings(args)
    a = load_dataset(args.a, _split(cfg.get("lm_label")), cfg.get("positive"))
    b = load_dataset(args.b, _split(cfg.get("fe_label")), cfg.get("positive"))
    merged = merge_single_label(a, b, skip_present=args.skip_present)
    _write(merged, args.output)
    print(f"wrote {merged.n_instances} instances to {args.output}")


def cmd_detect(args):
    cfg = _settings(args)
    d = load_dataset(args.dataset, _split(cfg.get("labels")), cfg.get("positive"))
    rep = detect_disparity(d)
    out = rep.to_dict()
    if not args.groups:
        out.pop("groups")
    sys.stdout.write(to_json(out))


def cmd_remove(args):
    cfg = _settings(args)
    d = load_dataset(args.dataset, _split(cfg.get("labels")), cfg.get("positive"))
    clean = remove_disparity(d)
    _write(clean, args.output)
    y = clean.Y[:, 0]
    print(f"removed {d.n_instances - clean.n_instances} rows; {clean.n_instances} remain "
          f"({int(y.sum())} positive / {int(len(y) - y.sum())} negative)")


def cmd_cv(args):
    cfg = _settings(args)
    d = load_dataset(args.dataset, _split(cfg.get("labels")), cfg.get("positive"))
    method = cfg.get("method", "cc")
    code = cfg.get("base", "rf")
    study = _study(cfg, list(d.label_names))
    base = make_base(code, seed=study.plan.seed, forest_size=study.forest_size, bag_size=study.bag_size)
    spec = ModelSpec(method, base, order=study.chain_order if method == "cc" else None, name=code)
    result = run_cv(d, spec, study.plan, study.n_jobs)
    doc = result.to_dict()
    if args.output:
        Path(args.output).parent.mkdir(parents=True, exist_ok=True)
        Path(args.output).write_text(to_json(doc))
    summary = {k: v["mean"] for k, v in result.aggregate.items()}
    sys.stdout.write(to_json({"method": method, "base": code, "mean": summary}))


def _rq(args, runner, renderer, name):
    cfg = _settings(args)
    lm = load_dataset(args.lm, _split(cfg.get("lm_label")), cfg.get("positive"))
    fe = load_dataset(args.fe, _split(cfg.get("fe_label")), cfg.get("positive"))
    if runner is run_rq1:
        rep = runner(lm, fe, skip_present=args.skip_present)
    else:
        rep = runner(lm, fe, _study(cfg, [lm.label_names[0], fe.label_names[0]]))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = renderer(rep)
    (out / f"{name}.json").write_text(to_json(rep))
    (out / f"{name}.txt").write_text(text)
    sys.stdout.write(text)


def cmd_synth(args):
    from .synthetic import reference_like

    lm, fe = reference_like(args.seed)
    out = Path(args.out_dir)
    _write(lm, out / "long-method.arff")
    _write(fe, out / "feature-envy.arff")
    print(f"wrote synthetic datasets to {out}")


def build_parser():
    p = argparse.ArgumentParser(prog="smellml", description="Multilabel code smell detection experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value settings file (flags win)")
        return sp

    def labels(sp):
        sp.add_argument("--labels", help="comma-separated label column names")

    def pair(sp):
        sp.add_argument("--lm-label", dest="lm_label", help="label column of the first dataset")
        sp.add_argument("--fe-label", dest="fe_label", help="label column of the second dataset")

    def cv_opts(sp):
        sp.add_argument("--k", type=int)
        sp.add_argument("--reps", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n-jobs", dest="n_jobs", type=int)
        sp.add_argument("--forest-size", dest="forest_size", type=int)
        sp.add_argument("--bag-size", dest="bag_size", type=int)
        sp.add_argument("--stratification", choices=["by-labelset", "by-class"])
        sp.add_argument("--chain-order", dest="chain_order", help="e.g. 'lm,fe' or '1,0'")

    sp = common(sub.add_parser("stats", help="multilabel dataset statistics"))
    sp.add_argument("mld")
    labels(sp)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = common(sub.add_parser("build-mld", help="combine two single-label datasets"))
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("-o", "--output", required=True)
    pair(sp)
    sp.set_defaults(func=cmd_build_mld)

    sp = common(sub.add_parser("merge", help="append b's rows to a as negatives"))
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--skip-present", action="store_true", help="skip rows already present in a")
    pair(sp)
    sp.set_defaults(func=cmd_merge)

    sp = common(sub.add_parser("detect-disparity", help="report conflicting duplicates"))
    sp.add_argument("dataset")
    sp.add_argument("--groups", action="store_true", help="list every conflicting group")
    labels(sp)
    sp.set_defaults(func=cmd_detect)

    sp = common(sub.add_parser("remove-disparity", help="drop negative copies of conflicting rows"))
    sp.add_argument("dataset")
    sp.add_argument("-o", "--output", required=True)
    labels(sp)
    sp.set_defaults(func=cmd_remove)

    sp = common(sub.add_parser("cv", help="repeated stratified cross-validation"))
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--method", choices=["br", "cc", "lp", "single"])
    sp.add_argument("--base", choices=sorted(BASE_NAMES))
    sp.add_argument("-o", "--output", help="write the full JSON report here")
    labels(sp)
    cv_opts(sp)
    sp.set_defaults(func=cmd_cv)

    for name, runner, renderer in (("rq1", run_rq1, render_rq1), ("rq2", run_rq2, render_rq2),
                                   ("rq3", run_rq3, render_rq3)):
        sp = common(sub.add_parser(name, help=f"run the {name} pipeline"))
        sp.add_argument("--lm", required=True)
        sp.add_argument("--fe", required=True)
        sp.add_argument("--out-dir", dest="out_dir", required=True)
        pair(sp)
        if name == "rq1":
            sp.add_argument("--skip-present", action="store_true", help="merge only rows the target lacks")
        else:
            cv_opts(sp)
        sp.set_defaults(func=lambda a, r=runner, f=renderer, n=name: _rq(a, r, f, n))

    sp = sub.add_parser("synth", help="write the synthetic stand-in datasets")
    sp.add_argument("--out-dir", dest="out_dir", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
