"""Command-line entry point: one subcommand per analysis stage plus ``pipeline``.

Every stage writes machine-readable results (JSON with 12 significant digits,
CSV) and SVG figures into ``--out``. Failures exit with status 2 and a single
``regionlab: <stage>: <reason>`` line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bayes, classify, esda, gwr, ingest, pca, plotting, regionalize, synth, weights
from .geometry import RegionGeometry, ipq

STAGES = ("weights", "moran", "localmoran", "jenks", "pca", "regionalize", "bayes", "gwr", "synth", "pipeline")
VARIANTS = tuple(v.value for v in bayes.ModelVariant)


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


# --------------------------------------------------------------------------
# serialization


def _clean(obj):
    """Recursively convert numpy values and round floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.12g}") if math.isfinite(x) else None
    return obj


def write_json(obj, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(obj), fh, indent=1, sort_keys=False)
        fh.write("\n")
    return path


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def write_csv(rows, header, path) -> Path:
    """``rows`` are sequences in ``header`` order or dicts keyed by ``header``."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            vals = [row[h] for h in header] if isinstance(row, dict) else row
            w.writerow([_fmt(v) for v in vals])
    return path


# --------------------------------------------------------------------------
# configuration


def _region_range(text: str) -> range:
    for sep in ("..", ":", "-"):
        if sep in text:
            lo, hi = text.split(sep, 1)
            break
    else:
        raise argparse.ArgumentTypeError("expected LO..HI, e.g. 2..9")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError("region range bounds must be integers") from None
    if not 2 <= lo <= hi:
        raise argparse.ArgumentTypeError("region range needs 2 <= LO <= HI")
    return range(lo, hi + 1)


@dataclass
class PipelineConfig:
    geometry: Path | None = None
    attributes: Path | None = None
    households: Path | None = None
    k: int = 5
    n_perm: int = 999
    alpha: float = 0.05
    classes: int = 5
    region_range: range = field(default_factory=lambda: range(2, 10))
    regions: int = 6
    variant: str = "all"
    seed: int = 0
    out: Path = Path("regionlab_out")
    columns: list[str] | None = None
    income_column: str = "monthly_income"
    education_column: str = "years_of_education"
    region_file: Path | None = None
    n_warmup: int = 2000
    n_draws: int = 2000
    n_chains: int = 4

    def validate(self, needs_geometry: bool = True, needs_attributes: bool = True) -> None:
        if needs_geometry:
            if self.geometry is None:
                raise ValueError("--geometry is required")
            if not Path(self.geometry).is_file():
                raise ValueError(f"geometry file not found: {self.geometry}")
        if self.attributes is not None and self.households is not None:
            raise ValueError("give only one of --attributes or --households")
        if needs_attributes and self.attributes is None and self.households is None:
            raise ValueError("one of --attributes or --households is required")
        src = self.attributes or self.households
        if src is not None and not Path(src).is_file():
            raise ValueError(f"attribute file not found: {src}")
        if self.k < 1:
            raise ValueError("--k must be at least 1")
        if self.n_perm < 1:
            raise ValueError("--n-perm must be at least 1")
        if not 0 < self.alpha < 1:
            raise ValueError("--alpha must lie in (0, 1)")
        if self.classes < 1:
            raise ValueError("--classes must be at least 1")
        if self.regions < 2:
            raise ValueError("--regions must be at least 2")
        if min(self.n_warmup, self.n_draws, self.n_chains) < 1:
            raise ValueError("MCMC sizes must be positive")
        if self.variant != "all":
            bayes.ModelVariant.parse(self.variant)


@dataclass
class Inputs:
    geometries: list[RegionGeometry]
    features: ingest.FeatureTable | None
    w: weights.SpatialWeights

    @property
    def ids(self) -> tuple:
        return tuple(g.id for g in self.geometries)


# --------------------------------------------------------------------------
# stages


class Runner:
    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self._inputs: Inputs | None = None
        self._assignment = None

    # ---- shared loading
    def _stage(self, name, fn, *args):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                return fn(*args)
        except StageError:
            raise
        except (ValueError, KeyError, RuntimeError, OSError, np.linalg.LinAlgError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            raise StageError(name, str(msg)) from exc

    def inputs(self, stage: str) -> Inputs:
        if self._inputs is None:
            def load():
                geoms = ingest.load_geometry(self.cfg.geometry)
                ids = [g.id for g in geoms]
                table = None
                if self.cfg.households is not None:
                    records = ingest.read_households(self.cfg.households)
                    table = ingest.aggregate_households(records, province_ids=ids)
                elif self.cfg.attributes is not None:
                    table = ingest.FeatureTable.from_csv(self.cfg.attributes).reorder(ids)
                if len(geoms) < 3:
                    raise ValueError("the analysis needs at least 3 provinces")
                w = weights.knn_weights(np.array([g.centroid for g in geoms]), self.cfg.k, ids=ids)
                return Inputs(geoms, table, w)

            self._inputs = self._stage(stage, load)
        return self._inputs

    def columns(self, inp: Inputs) -> list[str]:
        cols = self.cfg.columns or inp.features.names
        missing = [c for c in cols if c not in inp.features.names]
        if missing:
            raise ValueError(f"unknown column(s): {', '.join(missing)}")
        return cols

    # ---- individual stages
    def weights(self):
        inp = self.inputs("weights")

        def run():
            inp.w.to_json(self.out / "weights.json")
            plotting.network_map(inp.geometries, inp.w, self.out / "weights_network.svg")
            return {"n": inp.w.n, "k": inp.w.k, "components": inp.w.n_components()}

        return self._stage("weights", run)

    def moran(self):
        inp = self.inputs("moran")

        def run():
            out = {"k": inp.w.k, "n_perm": self.cfg.n_perm, "seed": self.cfg.seed, "columns": {}}
            for col in self.columns(inp):
                try:
                    res = esda.global_moran(inp.features.column(col), inp.w, self.cfg.n_perm, self.cfg.seed)
                except ValueError as exc:
                    raise ValueError(f"column {col!r}: {exc}") from None
                out["columns"][col] = res.to_dict(reference=False)
                plotting.reference_histogram(res, self.out / f"moran_reference_{col}.svg", title=col)
                plotting.moran_scatter(esda.moran_plot_data(inp.features.column(col), inp.w),
                                       self.out / f"moran_scatter_{col}.svg", title=col)
            write_json(out, self.out / "moran.json")
            return out

        return self._stage("moran", run)

    def localmoran(self):
        inp = self.inputs("localmoran")

        def run():
            out = {"k": inp.w.k, "n_perm": self.cfg.n_perm, "alpha": self.cfg.alpha, "seed": self.cfg.seed,
                   "columns": {}}
            for col in self.columns(inp):
                y = inp.features.column(col)
                try:
                    res = esda.local_moran(y, inp.w, self.cfg.n_perm, self.cfg.seed, self.cfg.alpha)
                except ValueError as exc:
                    raise ValueError(f"column {col!r}: {exc}") from None
                doc = res.to_dict(inp.ids)
                doc["counts"] = {q: int(np.sum(res.cluster == q)) for q in plotting.CLUSTER_COLORS}
                out["columns"][col] = doc
                plotting.local_moran_panels(inp.geometries, y, res, self.out / f"localmoran_{col}.svg", name=col)
            write_json(out, self.out / "localmoran.json")
            return out

        return self._stage("localmoran", run)

    def jenks(self):
        inp = self.inputs("jenks")

        def run():
            cols = self.columns(inp)
            results = {c: classify.fisher_jenks(inp.features.column(c), self.cfg.classes) for c in cols}
            rows = [[pid, *(int(results[c].labels[i]) for c in cols)] for i, pid in enumerate(inp.ids)]
            write_csv(rows, ["province_id", *cols], self.out / "jenks.csv")
            write_json({c: r.to_dict() for c, r in results.items()}, self.out / "jenks_breaks.json")
            for c in cols:
                plotting.choropleth(inp.geometries, inp.features.column(c), c, self.out / f"jenks_{c}.svg")
            return results

        return self._stage("jenks", run)

    def pca(self):
        inp = self.inputs("pca")

        def run():
            z = pca.standardize(inp.features)
            res = pca.pca(z, names=inp.features.names)
            doc = res.to_dict()
            doc["ids"] = list(inp.ids)
            pc1 = esda.global_moran(res.scores[:, 0], inp.w, self.cfg.n_perm, self.cfg.seed)
            doc["pc1_moran"] = pc1.to_dict(reference=False)
            write_json(doc, self.out / "pca.json")
            plotting.biplot(res, self.out / "pca_biplot.svg")
            plotting.choropleth(inp.geometries, res.scores[:, 0], "PC1 score", self.out / "pca_pc1.svg")
            return res

        return self._stage("pca", run)

    def regionalize(self):
        inp = self.inputs("regionalize")

        def run():
            z = pca.standardize(inp.features)
            scores = regionalize.sweep_regions(z, inp.w, inp.geometries, self.cfg.region_range)
            if self.cfg.regions in scores.assignments:
                chosen = scores.assignments[self.cfg.regions]
            else:
                chosen = regionalize.constrained_ward(z, inp.w, self.cfg.regions, inp.geometries)
            self._assignment = chosen
            rows = [[pid, int(chosen.labels[i])] for i, pid in enumerate(inp.ids)]
            write_csv(rows, ["province_id", "region"], self.out / "regions.csv")
            means = pca.region_means(inp.features, chosen.labels)
            doc = scores.to_dict()
            doc["chosen"] = {
                "n_regions": chosen.n_regions,
                "sizes": [len(m) for m in chosen.members],
                "ipq": [ipq(g) for g in chosen.geometries],
                "factor_means": {n: means[:, c].tolist() for c, n in enumerate(inp.features.names)},
                "profile": pca.region_profile(inp.features, chosen).tolist(),
            }
            write_json(doc, self.out / "regions.json")
            plotting.coherence_plot(scores, self.out / "regions_scores.svg")
            plotting.region_map(inp.geometries, chosen.labels, self.out / "regions_map.svg",
                                title=f"{chosen.n_regions} regions")
            plotting.radar(pca.region_profile(inp.features, chosen), inp.features.names,
                           self.out / "regions_radar.svg")
            return chosen

        return self._stage("regionalize", run)

    def _region_labels(self, inp: Inputs) -> np.ndarray:
        if self.cfg.region_file is not None:
            with open(self.cfg.region_file, newline="", encoding="utf-8") as fh:
                rec = {r["province_id"]: r["region"] for r in csv.DictReader(fh)}
            missing = [pid for pid in inp.ids if pid not in rec]
            if missing:
                raise ValueError(f"region file lacks province(s): {', '.join(missing[:5])}")
            return np.array([rec[pid] for pid in inp.ids])
        if self._assignment is None:
            z = pca.standardize(inp.features)
            self._assignment = regionalize.constrained_ward(z, inp.w, self.cfg.regions)
        return self._assignment.labels

    def bayes(self):
        inp = self.inputs("bayes")

        def run():
            data = bayes.RegressionData(
                y=inp.features.column(self.cfg.income_column),
                x=inp.features.column(self.cfg.education_column),
                region=self._region_labels(inp),
                ids=inp.ids,
            )
            variants = list(bayes.ModelVariant) if self.cfg.variant == "all" else [
                bayes.ModelVariant.parse(self.cfg.variant)]
            fc = bayes.FitConfig(self.cfg.n_chains, self.cfg.n_warmup, self.cfg.n_draws, self.cfg.seed)
            fits = {v.value: bayes.fit(v, data, fc) for v in variants}
            self._write_draws(fits)
            summary, intervals = {}, {}
            for name, dr in fits.items():
                wa = bayes.waic(dr)
                summary[name] = {**wa.to_dict(), "status": dr.status, "max_rhat": max(dr.rhat.values()),
                                 "min_ess": min(dr.ess.values())}
                intervals[name] = {k: {"low": lo, "mean": m, "high": hi}
                                   for k, (lo, m, hi) in bayes.credible_interval(dr).items()}
                plotting.interval_forest(bayes.credible_interval(dr), self.out / f"bayes_intervals_{name}.svg",
                                         title=f"95% credible intervals ({name})")
                if dr.variant is not bayes.ModelVariant.POOLED:
                    plotting.fitted_lines(data, dr, self.out / f"bayes_fit_{name}.svg")
            write_json({"config": {"n_chains": fc.n_chains, "n_warmup": fc.n_warmup, "n_draws": fc.n_draws,
                                   "seed": fc.seed, "regions": list(data.region_names)},
                        "variants": summary}, self.out / "waic.json")
            write_json(intervals, self.out / "bayes_intervals.json")
            plotting.waic_bars({k: v["waic"] for k, v in summary.items()}, self.out / "waic.svg",
                               errors={k: v["se"] for k, v in summary.items()})
            return summary

        return self._stage("bayes", run)

    def _write_draws(self, fits: dict) -> None:
        names: list[str] = []
        for dr in fits.values():
            names += [n for n in dr.names if n not in names]
        with open(self.out / "bayes_draws.csv", "w", encoding="utf-8") as fh:
            fh.write(",".join(["variant", "chain", "draw", *names]) + "\n")
            for vname, dr in fits.items():
                cols = [dr.samples.get(n) for n in names]
                for c in range(dr.n_chains):
                    for d in range(dr.n_draws):
                        vals = ["" if col is None else f"{col[c, d]:.12g}" for col in cols]
                        fh.write(",".join([vname, str(c), str(d), *vals]) + "\n")

    def gwr(self):
        inp = self.inputs("gwr")

        def run():
            x = inp.features.column(self.cfg.education_column)
            y = inp.features.column(self.cfg.income_column)
            res = gwr.gwr_fit(x, y, inp.w)
            diag = gwr.residual_moran(res, inp.w, self.cfg.n_perm, self.cfg.seed)
            header = ["province_id", "education", "income", "intercept", "slope", "slope_se", "fitted", "residual"]
            write_csv(list(res.rows()), header, self.out / "gwr.csv")
            doc = diag.to_dict() if isinstance(diag, gwr.ExactFit) else {"status": "ok",
                                                                          **diag.to_dict(reference=False)}
            write_json(doc, self.out / "gwr_residual_moran.json")
            plotting.gwr_maps(inp.geometries, res, weights.spatial_lag(inp.w, res.residual),
                              self.out / "gwr_maps.svg")
            return res

        return self._stage("gwr", run)

    def pipeline(self):
        for stage in ("weights", "moran", "localmoran", "jenks", "pca", "regionalize", "bayes", "gwr"):
            getattr(self, stage)()


# --------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser, analysis: bool = True) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--out", type=Path, default=Path("regionlab_out"), help="output directory")
    if not analysis:
        return
    p.add_argument("--geometry", type=Path, help="GeoJSON FeatureCollection of province polygons")
    p.add_argument("--attributes", type=Path, help="province-level CSV keyed by province_id")
    p.add_argument("--households", type=Path, help="household-level CSV, aggregated per province")
    p.add_argument("--k", type=int, default=5, help="nearest neighbours (default 5)")
    p.add_argument("--n-perm", type=int, default=999, help="permutations (default 999)")
    p.add_argument("--alpha", type=float, default=0.05, help="local significance level (default 0.05)")
    p.add_argument("--classes", type=int, default=5, help="Fisher-Jenks classes (default 5)")
    p.add_argument("--regions", type=int, default=6, help="chosen number of regions (default 6)")
    p.add_argument("--region-range", type=_region_range, default=range(2, 10), help="sweep range, e.g. 2..9")
    p.add_argument("--variant", choices=[*VARIANTS, "all"], default="all", help="regression variant(s)")
    p.add_argument("--columns", type=lambda s: [c for c in s.split(",") if c], help="comma-separated factors")
    p.add_argument("--income-column", default="monthly_income")
    p.add_argument("--education-column", default="years_of_education")
    p.add_argument("--region-file", type=Path, help="CSV province_id,region used by bayes instead of Ward")
    p.add_argument("--n-warmup", type=int, default=2000)
    p.add_argument("--n-draws", type=int, default=2000)
    p.add_argument("--n-chains", type=int, default=4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regionlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "weights": "k-nearest-neighbour weights",
        "moran": "global Moran's I with permutation test",
        "localmoran": "local Moran's I and cluster maps",
        "jenks": "Fisher-Jenks classes",
        "pca": "principal components of the standardized factors",
        "regionalize": "constrained Ward regions and coherence sweep",
        "bayes": "Laplace regression variants and WAIC",
        "gwr": "geographically weighted regression",
        "pipeline": "run every analysis stage in order",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text))
    s = sub.add_parser("synth", help="write a synthetic scenario as GeoJSON + CSV")
    _common(s, analysis=False)
    s.add_argument("--layout", choices=["voronoi", "grid"], default="voronoi")
    s.add_argument("--n", type=int, default=77, help="provinces for the voronoi layout")
    s.add_argument("--rows", type=int, default=12)
    s.add_argument("--cols", type=int, default=12)
    s.add_argument("--regions", type=int, default=6, help="planted regions")
    s.add_argument("--households", type=int, default=0, help="also write this many households per province")
    return parser


def _synth(args) -> None:
    out = Path(args.out)
    if args.layout == "voronoi":
        scen = synth.thailand_like(n=args.n, n_regions=args.regions, seed=args.seed)
    else:
        blocks = {6: (2, 3)}.get(args.regions, (1, args.regions))
        scen = synth.block_scenario(args.rows, args.cols, blocks=blocks, seed=args.seed)
    scen.write(out)
    if args.households > 0:
        if args.layout != "voronoi":
            raise ValueError("households are only generated for the voronoi layout")
        ingest.write_households(synth.synthetic_households(scen, args.households, args.seed),
                                out / "households.csv")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "synth":
            try:
                _synth(args)
            except (ValueError, OSError) as exc:
                raise StageError("synth", str(exc)) from exc
            return 0
        cfg = PipelineConfig(
            geometry=args.geometry, attributes=args.attributes, households=args.households, k=args.k,
            n_perm=args.n_perm, alpha=args.alpha, classes=args.classes, region_range=args.region_range,
            regions=args.regions, variant=args.variant, seed=args.seed, out=out, columns=args.columns,
            income_column=args.income_column, education_column=args.education_column,
            region_file=args.region_file, n_warmup=args.n_warmup, n_draws=args.n_draws, n_chains=args.n_chains,
        )
        try:
            cfg.validate(needs_attributes=args.command != "weights")
        except ValueError as exc:
            raise StageError("config", str(exc)) from exc
        getattr(Runner(cfg), args.command)()
    except StageError as exc:
        print(f"regionlab: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
