"""Analysis orchestration and artifact emission.

Runs the full pipeline (ingest, missing policy, scoring, abilities,
bandwidths, grid, curves, requested analytics) and writes machine-readable
CSV/JSON artifacts plus SVG plots into an output directory, finishing with
a manifest that lists every file and its checksum. Given the same
configuration and seed, reruns are byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import svgplot
from .ability import AbilityEstimates, LatentDistribution, estimate_abilities
from .curves import (ConfidenceConfig, CurveSet, confidence_band,
                     conditional_score_sd, credibility_all, estimate_curves,
                     expected_item_score, eis_stderr, expected_test_score,
                     item_total_correlation, score_density)
from .data import (MissingMode, MissingPolicy, ResponseMatrix,
                   ScoringScheme, apply_missing_policy, build_scoring,
                   ingest_responses, parse_format_tag, read_counts_sidecar,
                   read_key_sidecar, read_weights_sidecar, scoring_from_weights)
from .dif import dif_estimate
from .errors import InputError
from .geometry import pca_summary, simplex_coords
from .kernel import (EvaluationGrid, Kernel, KernelConfig, build_grid,
                     cv_bandwidth, default_cv_candidates, grid_from_points,
                     resolve_bandwidths, rule_of_thumb_bandwidth)
from .simulate import load_items, scoring_for_items, simulate_responses
from .svgplot import Series

SCHEMA_VERSION = 1
SCHEMA_LINE = f"# schema irtsmooth/{SCHEMA_VERSION}"

SUMMARY_PROBS = (0.05, 0.25, 0.50, 0.75, 0.95)

PLOT_KINDS = ("occ", "eis", "ets", "sd", "density", "rcc", "triangle",
              "tetrahedron", "pca")
DIF_PLOT_KINDS = ("expected", "density", "occ", "eis")

_MODULE = "cli-io"


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything a run needs beyond the dataset files."""

    out_dir: str
    kernel: Kernel = Kernel.GAUSSIAN
    bandwidth: str = "rot"                  # "rot" | "cv" | comma list of floats
    theta_dist: str = "normal:0,1"
    n_eval_points: int = 51
    eval_points: tuple[float, ...] | None = None
    miss: MissingMode = MissingMode.TREAT_AS_OPTION
    na_weight: float = 0.0
    seed: int = 0
    alpha: float = 0.05
    axis: str = "scores"                    # "scores" | "distribution"
    plots: tuple[str, ...] = ()
    items: tuple[int, ...] | None = None    # 1-based selection for plots
    subjects: tuple[int, ...] | None = None
    rank_stat: str = "total"
    exact: bool = False
    min_group_size: int = 30

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InputError("alpha must lie in (0, 1)",
                             module=_MODULE, operation="AnalysisConfig")
        if self.n_eval_points < 2:
            raise InputError("need at least 2 evaluation points",
                             module=_MODULE, operation="AnalysisConfig")
        if self.axis not in ("scores", "distribution"):
            raise InputError(f"unknown axis type {self.axis!r}",
                             module=_MODULE, operation="AnalysisConfig")
        for kind in self.plots:
            if kind not in PLOT_KINDS and kind not in DIF_PLOT_KINDS:
                raise InputError(f"unknown plot kind {kind!r}",
                                 module=_MODULE, operation="AnalysisConfig")


@dataclass
class ArtifactWriter:
    """Writes artifacts under one directory and records their checksums."""

    root: Path
    entries: list[dict] = field(default_factory=list)

    def write_text(self, rel: str, text: str) -> Path:
        path = self.root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = text.encode("utf-8")
        path.write_bytes(payload)
        self.entries.append({
            "path": rel,
            "sha256": hashlib.sha256(payload).hexdigest(),
            "bytes": len(payload),
        })
        return path

    def write_csv(self, rel: str, header: list[str], rows: list[list]) -> Path:
        lines = [SCHEMA_LINE, ",".join(header)]
        for row in rows:
            lines.append(",".join(_cell(v) for v in row))
        return self.write_text(rel, "\n".join(lines) + "\n")

    def write_json(self, rel: str, obj) -> Path:
        payload = {"schema_version": SCHEMA_VERSION}
        payload.update(obj)
        return self.write_text(rel, json.dumps(_jsonable(payload), indent=2) + "\n")

    def finish(self, command: str) -> dict:
        manifest = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "artifacts": sorted(self.entries, key=lambda e: e["path"]),
        }
        path = self.root / "manifest.json"
        path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
        return manifest


def _cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


@dataclass(frozen=True)
class PreparedAnalysis:
    """Pipeline state shared by the analyze/dif/cv-curve commands."""

    data: ResponseMatrix
    scheme: ScoringScheme
    ability: AbilityEstimates
    grid: EvaluationGrid
    kernel_config: KernelConfig
    curves: CurveSet


def build_scheme(data: ResponseMatrix, formats: str | None, key_path: str | None,
                 weights_path: str | None, na_weight: float) -> ScoringScheme:
    """Scoring from --weights (explicit table) or --format/--key."""
    if weights_path is not None:
        rows = read_weights_sidecar(weights_path)
        scheme = scoring_from_weights(rows, missing_weight=na_weight)
        scheme.validate_lengths(data)
        return scheme
    if formats is None:
        raise InputError("need --format (with --key) or --weights",
                         module=_MODULE, operation="build_scheme")
    tokens = [t for t in formats.split(",") if t.strip()]
    if len(tokens) == 1:
        tags: object = parse_format_tag(tokens[0])
    else:
        tags = [parse_format_tag(t) for t in tokens]
    key = None
    if key_path is not None:
        values = read_key_sidecar(key_path)
        key = values[0] if len(values) == 1 else values
    scheme = build_scoring(tags, key, data.option_counts,
                           missing_weight=na_weight)
    scheme.validate_formats(data)
    return scheme


def prepare(config: AnalysisConfig, dataset, formats: str | None = None,
            key_path: str | None = None, weights_path: str | None = None,
            counts_path: str | None = None, missing_token: str = "NA",
            ) -> PreparedAnalysis:
    """Run the pipeline up to the estimated curve set.

    ``dataset`` is a CSV path or an open text stream.
    """
    counts = read_counts_sidecar(counts_path) if counts_path else None
    data = ingest_responses(dataset, missing_token=missing_token,
                            option_counts=counts)
    scheme = build_scheme(data, formats, key_path, weights_path,
                          config.na_weight)
    policy = MissingPolicy(mode=config.miss, rng_seed=config.seed)
    data, scheme = apply_missing_policy(data, scheme, policy)
    dist = LatentDistribution.parse(config.theta_dist)
    ability = estimate_abilities(data, scheme, dist, stat=config.rank_stat)
    if config.eval_points is not None:
        grid = grid_from_points(np.asarray(config.eval_points), ability.thetas)
    else:
        grid = build_grid(ability.thetas, config.n_eval_points)
    kconfig = _kernel_config(config, data, ability)
    curves = estimate_curves(data, scheme, ability, grid, kconfig.bandwidths,
                             config.kernel, exact=config.exact)
    return PreparedAnalysis(data=data, scheme=scheme, ability=ability,
                            grid=grid, kernel_config=kconfig, curves=curves)


def _kernel_config(config: AnalysisConfig, data: ResponseMatrix,
                   ability: AbilityEstimates) -> KernelConfig:
    if config.bandwidth in ("rot", "cv"):
        kc = KernelConfig(kernel=config.kernel, bandwidth_policy=config.bandwidth)
    else:
        values = np.array([float(tok) for tok in config.bandwidth.split(",")])
        kc = KernelConfig(kernel=config.kernel, bandwidth_policy="fixed",
                          bandwidths=values)
    return resolve_bandwidths(kc, data.selections, data.total_options(),
                              ability.thetas, ability.distribution.sigma_theta)


def _selected(indices: tuple[int, ...] | None, count: int, what: str) -> list[int]:
    """Validated 0-based indices from a 1-based selection (default: all)."""
    if indices is None:
        return list(range(count))
    out = []
    for i in indices:
        if not 1 <= i <= count:
            raise InputError(f"{what} {i} outside 1..{count}",
                             module=_MODULE, operation="run_analysis")
        out.append(i - 1)
    return out


def run_analysis(config: AnalysisConfig, dataset: str, **dataset_kwargs) -> dict:
    """Full analyze command; returns the manifest."""
    prep = prepare(config, dataset, **dataset_kwargs)
    writer = ArtifactWriter(root=Path(config.out_dir))
    conf = ConfidenceConfig(alpha=config.alpha)
    curves = prep.curves
    grid = prep.grid
    ability = prep.ability

    ets = expected_test_score(curves)
    sd = conditional_score_sd(curves)
    density_x, density_y = score_density(ability.total_scores)
    itemcor = item_total_correlation(prep.data, prep.scheme)
    rcc, degenerate = credibility_all(curves, prep.data, ets)
    theta_ml = np.array([r.theta_ml if r is not None else np.nan for r in rcc])
    score_ml = np.array([r.score_ml if r is not None else np.nan for r in rcc])
    ability = dataclasses.replace(ability, theta_ml=theta_ml)

    axis_x = ets if config.axis == "scores" else grid.points
    axis_label = ("expected total score" if config.axis == "scores"
                  else "ability quantile")
    if config.axis == "scores":
        guides = list(np.quantile(ability.total_scores, SUMMARY_PROBS,
                                  method="linear"))
    else:
        guides = list(np.quantile(ability.thetas, SUMMARY_PROBS,
                                  method="linear"))

    # -- data artifacts ----------------------------------------------------
    item_idx = _selected(config.items, curves.n_items, "item")
    for j in item_idx:
        item = curves.items[j]
        rows = []
        for s in range(grid.size):
            for l in range(item.n_options):
                rows.append([grid.points[s], l + 1, item.weights[l],
                             item.occ[s, l], item.stderr[s, l]])
        writer.write_csv(f"items/occ_{item.label}.csv",
                         ["grid_point", "option", "weight", "estimate", "stderr"],
                         rows)

    subj_records = []
    for i in range(prep.data.n_subjects):
        rec = {
            "subject": i + 1,
            "total_score": ability.total_scores[i],
            "rank": ability.ranks[i],
            "theta": ability.thetas[i],
        }
        if rcc[i] is None:
            rec["degenerate"] = True
        else:
            rec.update({
                "theta_ml": rcc[i].theta_ml,
                "score_ml": rcc[i].score_ml,
                "floored": rcc[i].floored,
                "rcc": rcc[i].curve,
            })
        subj_records.append(rec)
    writer.write_json("subjects.json", {"subjects": subj_records})

    writer.write_json("summary.json", {
        "config": _config_echo(config),
        "n_subjects": prep.data.n_subjects,
        "n_items": prep.data.n_items,
        "bandwidths": prep.kernel_config.bandwidths,
        "item_correlations": [None if np.isnan(v) else v for v in itemcor],
        "score_quantiles": dict(zip(map(str, SUMMARY_PROBS),
                                    np.quantile(ability.total_scores,
                                                SUMMARY_PROBS, method="linear"))),
        "theta_quantiles": dict(zip(map(str, SUMMARY_PROBS),
                                    np.quantile(ability.thetas, SUMMARY_PROBS,
                                                method="linear"))),
        "grid": grid.points,
        "ets": ets,
        "conditional_sd": sd,
        "density": {"x": density_x, "y": density_y},
        "degenerate_subjects": [i + 1 for i in degenerate],
    })

    # -- plots ---------------------------------------------------------------
    plots = config.plots
    if "occ" in plots:
        for j in item_idx:
            item = curves.items[j]
            synthetic = bool(prep.data.missing_option[j])
            series = []
            for l in range(item.n_options):
                keyed = item.keyed_option == l + 1
                if synthetic and l == item.n_options - 1:
                    label = "no answer"
                else:
                    label = f"option {l + 1}"
                series.append(Series(y=item.occ[:, l],
                                     color=(svgplot.KEYED_COLOR if keyed
                                            else svgplot.OTHER_COLOR),
                                     dashed=not keyed, label=label))
            svg = svgplot.curve_chart(
                f"Option characteristic curves, item {item.label}",
                axis_label, "probability", axis_x, series,
                vlines=guides, y_range=(0.0, 1.0))
            writer.write_text(f"plots/occ_{item.label}.svg", svg)
    if "eis" in plots:
        for j in item_idx:
            item = curves.items[j]
            eis = expected_item_score(item)
            se = eis_stderr(curves.thetas, item, grid, curves.kernel)
            lower, upper = confidence_band(eis, se, conf)
            observed = _grouped_observed_scores(prep, j, axis_x)
            svg = svgplot.curve_chart(
                f"Expected item score, item {item.label}", axis_label,
                "expected score", axis_x,
                [Series(y=eis, color="#000000", label="EIS"),
                 Series(y=lower, color=svgplot.OTHER_COLOR, dashed=True,
                        label=f"{100 * (1 - config.alpha):g}% CI"),
                 Series(y=upper, color=svgplot.OTHER_COLOR, dashed=True)],
                points=observed, vlines=guides,
                y_range=item.eis_bounds())
            writer.write_text(f"plots/eis_{item.label}.svg", svg)
    if "ets" in plots:
        svg = svgplot.curve_chart("Expected test score", axis_label,
                                  "expected total score", axis_x,
                                  [Series(y=ets)], vlines=guides)
        writer.write_text("plots/ets.svg", svg)
    if "sd" in plots:
        svg = svgplot.curve_chart("Conditional score standard deviation",
                                  axis_label, "standard deviation", axis_x,
                                  [Series(y=sd)], vlines=guides)
        writer.write_text("plots/sd.svg", svg)
    if "density" in plots:
        svg = svgplot.curve_chart("Total score density", "total score",
                                  "density", density_x, [Series(y=density_y)])
        writer.write_text("plots/density.svg", svg)
    if "rcc" in plots:
        for i in _selected(config.subjects, prep.data.n_subjects, "subject"):
            if rcc[i] is None:
                continue
            marker = (ability.total_scores[i] if config.axis == "scores"
                      else ability.thetas[i])
            svg = svgplot.curve_chart(
                f"Relative credibility, subject {i + 1}", axis_label,
                "relative credibility", axis_x, [Series(y=rcc[i].curve)],
                vlines=[float(marker)], y_range=(0.0, 1.0))
            writer.write_text(f"plots/rcc_subject_{i + 1}.svg", svg)
    if "triangle" in plots or "tetrahedron" in plots:
        for kind in ("triangle", "tetrahedron"):
            if kind not in plots:
                continue
            dims = 3 if kind == "triangle" else 4
            for j in item_idx:
                item = curves.items[j]
                if item.n_options < dims:
                    continue
                traj = simplex_coords(item, dims)
                writer.write_json(f"simplex/{kind}_{item.label}.json", {
                    "item": item.label,
                    "vertex_options": list(traj.vertex_options),
                    "barycentric": traj.barycentric,
                    "cartesian": traj.cartesian,
                    "trait_band": list(traj.trait_band),
                })
                if kind == "triangle":
                    svg = svgplot.simplex_triangle_chart(
                        traj, f"Probability triangle, item {item.label}")
                else:
                    svg = svgplot.simplex_tetrahedron_chart(
                        traj, f"Probability tetrahedron, item {item.label}")
                writer.write_text(f"plots/{kind}_{item.label}.svg", svg)
    if "pca" in plots:
        summary = pca_summary(curves)
        labels = [item.label for item in curves.items]
        writer.write_csv("pca.csv", ["item", "component1", "component2"],
                         [[labels[j], summary.scores[j, 0], summary.scores[j, 1]]
                          for j in range(curves.n_items)])
        writer.write_text("plots/pca.svg",
                          svgplot.pca_chart(summary, labels,
                                            "Principal components of the items"))

    return writer.finish("analyze")


def _grouped_observed_scores(prep: PreparedAnalysis, j: int,
                             axis_x: np.ndarray) -> list[tuple[float, float, str]]:
    """Mean observed item score of each occupied grid bin, on the plot axis."""
    item_scores = prep.scheme.weights[j][prep.data.selections[:, j] - 1]
    sums = np.bincount(prep.grid.bin_index, weights=item_scores,
                       minlength=prep.grid.size)
    points = []
    for s in range(prep.grid.size):
        if prep.grid.bin_counts[s] > 0:
            points.append((float(axis_x[s]),
                           float(sums[s] / prep.grid.bin_counts[s]),
                           "#555555"))
    return points


def _config_echo(config: AnalysisConfig) -> dict:
    echo = dataclasses.asdict(config)
    echo["kernel"] = config.kernel.value
    echo["miss"] = config.miss.value
    del echo["out_dir"]  # run placement, not analysis configuration
    return echo


def split_group_column(dataset: str, column: str,
                       ) -> tuple[str, np.ndarray] | None:
    """When ``column`` names a dataset header, peel it off as group labels.

    Returns the response-only CSV text and the label vector, or None when no
    such column exists (the value is then treated as a label-file path).
    """
    with open(dataset, "r", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows or column not in rows[0]:
        return None
    idx = rows[0].index(column)
    labels = np.asarray([row[idx].strip() for row in rows[1:]])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row[:idx] + row[idx + 1:])
    return buf.getvalue(), labels


def run_dif(config: AnalysisConfig, dataset: str, groups: str | None = None,
            groups_column: np.ndarray | None = None, **dataset_kwargs) -> dict:
    """DIF command: per-group curves, QQ pairs, densities, and plots.

    ``groups`` is either a column name inside the dataset CSV or the path of
    a label file (one label per subject).
    """
    labels = groups_column
    if labels is None:
        if groups is None:
            raise InputError("DIF needs group labels (--groups)",
                             module=_MODULE, operation="run_dif")
        peeled = split_group_column(dataset, groups)
        if peeled is not None:
            response_text, labels = peeled
            prep = prepare(config, io.StringIO(response_text), **dataset_kwargs)
        else:
            labels = np.asarray(
                Path(groups).read_text(encoding="utf-8").split())
            prep = prepare(config, dataset, **dataset_kwargs)
    else:
        labels = np.asarray(labels)
        prep = prepare(config, dataset, **dataset_kwargs)
    kc = KernelConfig(kernel=config.kernel,
                      bandwidth_policy=prep.kernel_config.bandwidth_policy
                      if config.bandwidth in ("rot", "cv") else "fixed",
                      bandwidths=(prep.kernel_config.bandwidths
                                  if config.bandwidth not in ("rot", "cv")
                                  else None))
    analysis = dif_estimate(prep.data, prep.scheme, prep.ability, labels, kc,
                            grid=prep.grid,
                            min_group_size=config.min_group_size)
    writer = ArtifactWriter(root=Path(config.out_dir))
    item_idx = _selected(config.items, analysis.pooled.n_items, "item")

    for group in analysis.groups:
        for j in item_idx:
            item = group.curves.items[j]
            rows = []
            for s in range(group.curves.grid.size):
                for l in range(item.n_options):
                    rows.append([group.curves.grid.points[s], l + 1,
                                 item.weights[l], item.occ[s, l],
                                 item.stderr[s, l]])
            writer.write_csv(f"groups/{group.label}/occ_{item.label}.csv",
                             ["grid_point", "option", "weight", "estimate",
                              "stderr"], rows)

    for (a, b), (qa, qb, probs) in sorted(analysis.qq_pairs.items()):
        writer.write_csv(f"qq/qq_{a}_vs_{b}.csv",
                         ["prob", f"quantile_{a}", f"quantile_{b}"],
                         [[probs[i], qa[i], qb[i]] for i in range(probs.size)])

    writer.write_json("densities.json", {
        "groups": [{
            "label": g.label,
            "size": g.size,
            "density": None if g.density is None else
            {"x": g.density[0], "y": g.density[1]},
        } for g in analysis.groups],
    })
    writer.write_json("dif_summary.json", {
        "config": _config_echo(config),
        "groups": [{"label": g.label, "size": g.size,
                    "bandwidths": [it.bandwidth for it in g.curves.items]}
                   for g in analysis.groups],
        "dropped_groups": [{"label": lbl, "size": size}
                           for lbl, size in analysis.dropped],
    })

    plots = config.plots
    palette = svgplot.GROUP_PALETTE
    if "expected" in plots:
        for (a, b), (qa, qb, probs) in sorted(analysis.qq_pairs.items()):
            ga = next(g for g in analysis.groups if g.label == a)
            gb = next(g for g in analysis.groups if g.label == b)
            guide_a = np.quantile(ga.expected_scores, SUMMARY_PROBS,
                                  method="linear")
            guide_b = np.quantile(gb.expected_scores, SUMMARY_PROBS,
                                  method="linear")
            points = [(float(qa[i]), float(qb[i]), "", "#1f4fd6")
                      for i in range(probs.size)]
            svg = svgplot.scatter_chart(
                f"Expected score QQ: {a} vs {b}", f"expected score ({a})",
                f"expected score ({b})", points, diagonal=True,
                vlines=[float(v) for v in guide_a],
                hlines=[float(v) for v in guide_b])
            writer.write_text(f"plots/qq_{a}_vs_{b}.svg", svg)
    if "density" in plots:
        series = []
        xs = None
        for g, color in zip(analysis.groups, palette):
            if g.density is None:
                continue
            gx, gy = g.density
            if xs is None:
                xs = gx
            series.append(Series(y=np.interp(xs, gx, gy, left=0.0, right=0.0),
                                 color=color, label=g.label))
        if series and xs is not None:
            svg = svgplot.curve_chart("Total score densities by group",
                                      "total score", "density", xs, series)
            writer.write_text("plots/density_groups.svg", svg)
    if "occ" in plots:
        for j in item_idx:
            pooled_item = analysis.pooled.items[j]
            for l in range(pooled_item.n_options):
                series = [Series(y=pooled_item.occ[:, l], color="#000000",
                                 dashed=True, label="pooled")]
                for g, color in zip(analysis.groups, palette):
                    series.append(Series(y=g.curves.items[j].occ[:, l],
                                         color=color, label=g.label))
                svg = svgplot.curve_chart(
                    f"OCC by group, item {pooled_item.label}, option {l + 1}",
                    "ability quantile", "probability",
                    analysis.pooled.grid.points, series, y_range=(0.0, 1.0))
                writer.write_text(
                    f"plots/occdif_{pooled_item.label}_option{l + 1}.svg", svg)
    if "eis" in plots:
        for j in item_idx:
            pooled_item = analysis.pooled.items[j]
            series = [Series(y=expected_item_score(pooled_item),
                             color="#000000", dashed=True, label="pooled")]
            for g, color in zip(analysis.groups, palette):
                series.append(Series(y=expected_item_score(g.curves.items[j]),
                                     color=color, label=g.label))
            svg = svgplot.curve_chart(
                f"EIS by group, item {pooled_item.label}", "ability quantile",
                "expected score", analysis.pooled.grid.points, series,
                y_range=pooled_item.eis_bounds())
            writer.write_text(f"plots/eisdif_{pooled_item.label}.svg", svg)

    return writer.finish("dif")


def run_cv_curve(config: AnalysisConfig, dataset: str, **dataset_kwargs) -> dict:
    """Emit the cross-validation profile CV(h) per item."""
    prep = prepare(config, dataset, **dataset_kwargs)
    writer = ArtifactWriter(root=Path(config.out_dir))
    h_rot = rule_of_thumb_bandwidth(prep.data.n_subjects,
                                    prep.ability.distribution.sigma_theta)
    candidates = default_cv_candidates(h_rot)
    rows = []
    totals = prep.data.total_options()
    for j in _selected(config.items, prep.data.n_items, "item"):
        best, scores = cv_bandwidth(prep.ability.thetas,
                                    prep.data.selections[:, j],
                                    int(totals[j]), candidates, config.kernel)
        label = prep.data.item_labels[j]
        for h, cv in zip(candidates, scores):
            rows.append([label, h, cv, best])
        # infeasible candidates (CV = inf under compact kernels) are listed
        # in the CSV but left off the plot
        feasible = np.isfinite(scores)
        svg = svgplot.curve_chart(
            f"Cross-validation profile, item {label}", "bandwidth", "CV",
            candidates[feasible], [Series(y=scores[feasible])], vlines=[best])
        writer.write_text(f"plots/cv_{label}.svg", svg)
    writer.write_csv("cv_profile.csv", ["item", "bandwidth", "cv", "best"],
                     rows)
    return writer.finish("cv-curve")


def run_simulate(items_path: str, n: int, seed: int, out_csv: str,
                 key_out: str | None = None, truth_out: str | None = None) -> None:
    """Simulate responses to a parametric item bank and write them as CSV."""
    items = load_items(items_path)
    data, thetas, _ = simulate_responses(items, n, seed)
    lines = [",".join(data.item_labels)]
    for i in range(data.n_subjects):
        lines.append(",".join(str(int(v)) for v in data.selections[i]))
    Path(out_csv).parent.mkdir(parents=True, exist_ok=True)
    Path(out_csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
    if key_out is not None:
        formats, key = scoring_for_items(items)
        Path(key_out).write_text(
            "\n".join(str(v) for v in key) + "\n", encoding="utf-8")
    if truth_out is not None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "seed": seed,
            "thetas": thetas,
            "items": [{"kind": it.kind, "a": it.discrimination,
                       "locations": list(it.locations)} for it in items],
        }
        Path(truth_out).write_text(json.dumps(_jsonable(payload), indent=2) + "\n",
                                   encoding="utf-8")
