"""Command line interface: dataset synthesis, clustering runs, evaluation, diagnostics.

Exit codes: 0 success, 1 validation error (bad parameters, unreadable/unwritable
paths, shape mismatches), 2 runtime failure (solver breakdown and other errors).
"""

from __future__ import annotations

import functools
import json
import sys
import time
from pathlib import Path

import click
import numpy as np

from . import fileio
from .clustering import align_sequence, static_sc, tv_cluster_multi_detailed, tv_cluster_two
from .generators import SbmTvParams, sbm_tv_sequence
from .graphs import build_laplacian
from .metrics import eigengap_profile, mismatch_count, pair_accuracy
from .pointcloud import downsample, knn_graph, load_frames
from .graphs import TVGraphSequence
from .solver import SolverConfig, SolverError

_SBM_DEFAULTS = {
    "n_per_cluster": 50,
    "k": 3,
    "t_len": 100,
    "p_intra": 0.3,
    "p_inter": 0.2,
    "flip_prob": 0.01,
    "seed": 0,
}

_SOLVER_DEFAULTS = {
    "alpha": 1.0,
    "gamma1": None,
    "gamma2": None,
    "epsilon": None,
    "sigma": 1e-5,
    "max_iters": 20000,
    "restarts": 1,
    "seed": 0,
}


def _guarded(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except click.ClickException:
            raise
        except (ValueError, OSError) as exc:
            raise click.ClickException(str(exc))  # exit code 1
        except SolverError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)
        except Exception as exc:  # pragma: no cover - unexpected failure path
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _load_config(path) -> dict:
    if path is None:
        return {}
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must contain a JSON object of flat keys")
    return data


def _pick(flag, config: dict, key: str, default):
    """Explicit CLI flag first, then config file, then the built-in default."""
    if flag is not None:
        return flag
    if key in config:
        return config[key]
    return default


def _trial_seeds(seed: int, trials: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)]


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solver_config(config: dict, seed: int, **flags) -> SolverConfig:
    kwargs = {}
    for key, default in _SOLVER_DEFAULTS.items():
        if key == "seed":
            continue
        kwargs[key] = _pick(flags.get(key), config, key, default)
    kwargs["max_iters"] = int(kwargs["max_iters"])
    kwargs["restarts"] = int(kwargs["restarts"])
    return SolverConfig(seed=seed, **kwargs)


@click.group()
@click.version_option(package_name="tvclust")
def main():
    """Cluster the nodes of time-varying graphs with temporal label smoothness."""


@main.command("generate-sbm")
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
@click.option("--n-per-cluster", type=int, default=None, help="nodes per planted cluster")
@click.option("--k", type=int, default=None, help="number of planted clusters")
@click.option("--t-len", type=int, default=None, help="number of time slots")
@click.option("--p-intra", type=float, default=None, help="intra-cluster edge probability")
@click.option("--p-inter", type=float, default=None, help="inter-cluster edge probability")
@click.option("--flip-prob", type=float, default=None, help="per-node per-frame label change probability")
@click.option("--seed", type=int, default=None)
@click.option("--trials", type=int, default=None, help="independent sequences to generate")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_generate_sbm(out_path, config_path, trials, **flags):
    """Write seeded block-model graph sequences plus their ground-truth labels."""
    config = _load_config(config_path)
    params = {k: _pick(flags.get(k), config, k, v) for k, v in _SBM_DEFAULTS.items()}
    trials = int(_pick(trials, config, "trials", 1))
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = _outdir(out_path)
    seeds = _trial_seeds(int(params["seed"]), trials)
    for idx in range(trials):
        p = SbmTvParams(
            n_per_cluster=int(params["n_per_cluster"]),
            k=int(params["k"]),
            t_len=int(params["t_len"]),
            p_intra=float(params["p_intra"]),
            p_inter=float(params["p_inter"]),
            flip_prob=float(params["flip_prob"]),
            seed=seeds[idx],
        )
        seq, truth = sbm_tv_sequence(p)
        fileio.write_tvg(out / f"graph_{idx:03d}.tvg", seq)
        fileio.write_labels(out / f"truth_{idx:03d}.lbl", truth)
        edges = sum(g.num_edges for g in seq.graphs)
        click.echo(f"trial {idx:03d}: N={p.n} T={p.t_len} K={p.k} edges={edges}")


def _graph_inputs(path) -> list[Path]:
    p = Path(path)
    if p.is_file():
        return [p]
    files = sorted(p.glob("*.tvg"))
    if not files:
        raise ValueError(f"no .tvg files found in {p}")
    return files


@main.command("cluster")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--method", type=click.Choice(["static-sc", "tv-pds"]), required=True)
@click.option("--k", type=int, default=None, help="number of clusters (default 2)")
@click.option("--alpha", type=float, default=None)
@click.option("--gamma1", type=float, default=None)
@click.option("--gamma2", type=float, default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--max-iters", "max_iters", type=int, default=None)
@click.option("--restarts", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@_guarded
def cmd_cluster(graph_path, method, k, seed, out_path, config_path, **flags):
    """Estimate cluster labels for one or many graph sequence files."""
    config = _load_config(config_path)
    k = int(_pick(k, config, "k", 2))
    if k < 2:
        raise ValueError("k must be >= 2")
    seed = int(_pick(seed, config, "seed", 0))
    inputs = _graph_inputs(graph_path)
    out = _outdir(out_path)
    seeds = _trial_seeds(seed, len(inputs))
    for idx, path in enumerate(inputs):
        seq = fileio.read_tvg(path)
        started = time.perf_counter()
        report = {"method": method, "k": k, "graph": path.name, "seed": seeds[idx]}
        if method == "static-sc":
            labels = static_sc(seq, k, seed=seeds[idx])
        else:
            cfg = _solver_config(config, seeds[idx], **flags)
            if k == 2:
                labels, res = tv_cluster_two(seq, cfg)
                results = [res]
            else:
                labels, _, results = tv_cluster_multi_detailed(seq, k, cfg)
            report.update(
                iterations=[r.iters for r in results],
                converged=all(r.converged for r in results),
                final_objective=[float(r.objective_trace[-1]) for r in results],
            )
        report["wall_time_s"] = time.perf_counter() - started
        fileio.write_labels(out / f"est_{path.stem}.lbl", labels)
        report_path = out / f"report_{path.stem}.json"
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        click.echo(f"{path.name}: wrote est_{path.stem}.lbl ({method}, k={k})")


def _label_inputs(path) -> list[Path]:
    p = Path(path)
    if p.is_file():
        return [p]
    files = sorted(p.glob("*.lbl"))
    if not files:
        raise ValueError(f"no .lbl files found in {p}")
    return files


def _accuracy_svg(path, mean_curve: np.ndarray) -> None:
    """Minimal deterministic SVG line chart of accuracy against time."""
    w, h, pad = 640, 360, 45
    t_len = mean_curve.size
    xs = [pad + (w - 2 * pad) * (i / max(t_len - 1, 1)) for i in range(t_len)]
    ys = [h - pad - (h - 2 * pad) * float(v) for v in mean_curve]
    points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<text x="{w // 2}" y="{h - 10}" text-anchor="middle" font-size="12">t</text>',
        f'<text x="12" y="{h // 2}" font-size="12" transform="rotate(-90 12 {h // 2})" '
        f'text-anchor="middle">mean accuracy</text>',
        f'<text x="{pad - 6}" y="{h - pad + 4}" text-anchor="end" font-size="10">0</text>',
        f'<text x="{pad - 6}" y="{pad + 4}" text-anchor="end" font-size="10">1</text>',
        f'<polyline fill="none" stroke="#1f6fb2" stroke-width="1.5" points="{points}"/>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


@main.command("evaluate")
@click.option("--est", "est_path", required=True, type=click.Path(exists=True))
@click.option("--truth", "truth_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
@click.option("--svg", is_flag=True, help="also emit an SVG chart of mean accuracy vs t")
@_guarded
def cmd_evaluate(est_path, truth_path, out_path, svg):
    """Score estimated label files against ground truth, one column per trial."""
    est_files = _label_inputs(est_path)
    truth_files = _label_inputs(truth_path)
    if len(est_files) != len(truth_files):
        raise ValueError(
            f"got {len(est_files)} estimate files but {len(truth_files)} truth files"
        )
    out = _outdir(out_path)
    columns = []
    mismatch_total = 0
    for ef, tf in zip(est_files, truth_files):
        est = fileio.read_labels(ef)
        truth = fileio.read_labels(tf)
        if est.t_len != truth.t_len or est.n != truth.n:
            raise ValueError(f"shape mismatch between {ef.name} and {tf.name}")
        columns.append(
            [pair_accuracy(est.frame(t), truth.frame(t)) for t in range(est.t_len)]
        )
        aligned = align_sequence(est)
        mismatch_total += sum(
            mismatch_count(aligned.frame(t), aligned.frame(t - 1))
            for t in range(1, aligned.t_len)
        )
    acc = np.asarray(columns).T  # (t_len, trials)
    mean_col = acc.mean(axis=1)
    header = "t," + ",".join(f"acc_{i:03d}" for i in range(acc.shape[1])) + ",mean"
    rows = [header]
    for t in range(acc.shape[0]):
        cells = ",".join(repr(float(v)) for v in acc[t])
        rows.append(f"{t},{cells},{float(mean_col[t])!r}")
    with open(out / "accuracy.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows))
        fh.write("\n")
    summary = (
        f"mean={float(acc.mean())!r} min={float(acc.min())!r} "
        f"mismatch_total={mismatch_total} trials={acc.shape[1]} frames={acc.shape[0]}"
    )
    (out / "summary.txt").write_text(summary + "\n", encoding="utf-8")
    click.echo(summary)
    if svg:
        _accuracy_svg(out / "accuracy.svg", mean_col)


@main.command("build-knn")
@click.option("--cloud", "cloud_path", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--k", type=int, default=8, show_default=True, help="neighbors per point")
@click.option("--target-n", "target_n", type=int, default=None, help="downsample to this many points")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
@_guarded
def cmd_build_knn(cloud_path, k, target_n, seed, out_path):
    """Convert a registered point-cloud directory into a kNN graph sequence."""
    seq = load_frames(cloud_path)
    if target_n is not None:
        seq = downsample(seq, target_n, seed)
    if k >= seq.n_points:
        raise ValueError(f"k={k} must be smaller than the point count {seq.n_points}")
    graphs = TVGraphSequence(tuple(knn_graph(seq.frame(t), k) for t in range(seq.t_len)))
    out = _outdir(out_path)
    fileio.write_tvg(out / "graph.tvg", graphs)
    edges = sum(g.num_edges for g in graphs.graphs)
    click.echo(f"wrote graph.tvg: N={graphs.n} T={graphs.t_len} k={k} edges={edges}")


@main.command("eigengap")
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--m", type=int, default=4, show_default=True, help="number of smallest eigenvalues")
@click.option("--out", "out_path", required=True, type=click.Path(file_okay=False))
@_guarded
def cmd_eigengap(graph_path, m, out_path):
    """Write per-frame gaps between consecutive smallest Laplacian eigenvalues."""
    seq = fileio.read_tvg(graph_path)
    if m < 2:
        raise ValueError("m must be >= 2")
    if m > seq.n:
        raise ValueError(f"m={m} exceeds the node count {seq.n}")
    out = _outdir(out_path)
    rows = ["t," + ",".join(f"gap_{i}" for i in range(1, m))]
    for t, g in enumerate(seq.graphs):
        gaps = eigengap_profile(build_laplacian(g), m)
        rows.append(f"{t}," + ",".join(repr(float(x)) for x in gaps))
    with open(out / "eigengap.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows))
        fh.write("\n")
    click.echo(f"wrote eigengap.csv: T={seq.t_len} gaps={m - 1}")


if __name__ == "__main__":
    main()
