"""Aligned plain-text tables for statistics and study reports."""
from __future__ import annotations

import json


def table(headers, rows, title=None) -> str:
    cells = [list(map(str, headers))] + [[("-" if c is None else str(c)) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    rule = "-+-".join("-" * w for w in widths)

    def line(r):
        return " | ".join(c.ljust(w) if i == 0 else c.rjust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip()

    out = []
    if title:
        out.append(title)
    out += [line(cells[0]), rule] + [line(r) for r in cells[1:]]
    return "\n".join(out) + "\n"


def pct(x):
    return "-" if x is None else f"{100 * x:.1f}%"


def dec(x, places=3):
    return "-" if x is None else f"{x:.{places}f}"


def to_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def render_stats(stats) -> str:
    rows = stats.display_rows()
    return table([r[0] for r in rows], [[r[1] for r in rows]], title="Multilabel dataset statistics")


def render_rq1(rep) -> str:
    m = rep["merged"]
    out = [table(
        ["Merged dataset", "Instances", "Smelly", "Non smelly", "Conflicting smelly", "Conflicting non smelly"],
        [[f"{k.upper()} ({v['label']})", v["n_instances"], v["smelly"], v["non_smelly"],
          v["disparity_smelly"], v["disparity_non_smelly"]] for k, v in m.items()],
        title="Merged single-label datasets and disparity",
    )]
    out.append(f"\nCommon instances between the input datasets: {rep['common_instances']}\n")
    return "".join(out)


def render_rq2(rep) -> str:
    parts = []
    for key, d in rep["datasets"].items():
        title = (f"{key.upper()} ({d['label']}): {d['clean']['n_instances']} instances after removing "
                 f"{d['removed']} ({d['clean']['smelly']} smelly / {d['clean']['non_smelly']} non smelly)")
        rows = [[r["name"], pct(r["accuracy"]), pct(r["f_measure"]), pct(r["f_measure_weighted"]), pct(r["roc_area"])]
                for r in d["rows"]]
        parts.append(table(["Classifier", "Accuracy", "F-Measure", "F-Measure (weighted)", "ROC Area"], rows, title))
    return "\n".join(parts)


def render_rq3(rep) -> str:
    mld = rep["mld"]
    names = mld["label_names"]
    parts = []
    ls_rows = []
    for bits, v in sorted(mld["label_sets"].items(), reverse=True):
        ls_rows.append(["Yes" if bits[0] == "1" else "No", "Yes" if bits[-1] == "1" else "No", v["count"],
                        f"{v['percent']:.2f}%"])
    if len(names) == 2:
        parts.append(table([f"{names[0]} affected", f"{names[1]} affected", "Instances", "% of instances"],
                           ls_rows, "Label sets in the multilabel dataset"))
    st = mld["stats"]
    stat_rows = [[st["n_instances"], st["n_features"], st["n_labels"], st["n_label_sets"],
                  dec(st["cardinality"]), dec(st["density"]), dec(st["mean_ir"], 1)]]
    parts.append(table(["Instances", "Features", "Labels", "Label sets", "Cardinality", "Density", "MeanIR"],
                       stat_rows, "Multilabel dataset statistics"))
    for method, m in rep["methods"].items():
        label = {"cc": "CC", "lp": "LC"}.get(method, method.upper())
        rows = [[r["name"], pct(r["accuracy"]), dec(r["hamming_loss"]), pct(r["exact_match"])] for r in m["rows"]]
        parts.append(table(["Classifier", "Accuracy (Jaccard)", "Hamming Loss", "Exact Match"], rows,
                           f"{label}: example-based metrics"))
        rows = [[r["name"], pct(r["micro_precision"]), pct(r["micro_recall"]), pct(r["micro_f1"]),
                 pct(r["macro_precision"]), pct(r["macro_recall"]), pct(r["macro_f1"])] for r in m["rows"]]
        parts.append(table(["Classifier", "Micro P", "Micro R", "F1-Micro", "Macro P", "Macro R", "F1-Macro"], rows,
                           f"{label}: label-based metrics"))
    s = rep["summary"]
    parts.append(f"Mean accuracy over every method/classifier: {pct(s['mean_accuracy_all'])}\n"
                 f"Mean of each method's best accuracy: {pct(s['mean_accuracy_best_per_method'])}\n")
    return "\n".join(parts)
