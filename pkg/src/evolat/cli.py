"""Command line front end.

Subcommands: gen (build a model and store its spectrum), bound (complexity
trace over a time grid), qspec (nonlocality-matrix spectrum), stats (level
spacing statistics), plateau (late-time mean against the Gram-Schmidt
estimate), cvp (solver ladder on a stored instance).

Configurations are JSON files; a handful of named presets cover the standard
desk-scale runs.  Outputs are CSV/JSON with a schema line and the hash of the
resolved configuration, written atomically; a fixed config and seed
reproduce output files byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__, engine, lattice, linalg, resonant, spectral, syk

SCHEMA = 1


# ---------------------------------------------------------------- presets

PRESETS = {
    # bi-invariant plateau of a featureless spectrum
    "biinv-plateau-desk": {
        "model": {"family": "synthetic", "kind": "uniform", "dim": 1000, "seed": 11},
        "chain": "biinvariant",
        "times": {"start": 20000.0, "stop": 24000.0, "count": 201},
        "window": [20000.0, 24000.0],
    },
    # nonlocality spectra of the Majorana models
    "syk-free-qspec-desk": {
        "model": {"family": "syk", "variant": "free", "n_modes": 12, "seed": 7},
        "threshold": 2,
    },
    "syk-integrable-qspec-desk": {
        "model": {
            "family": "syk", "variant": "integrable", "n_modes": 12,
            "epsilon": 1.0, "seed": 7,
        },
        "threshold": 4,
    },
    # truncated vs random separation, one block
    "resonant-truncated-bound-desk": {
        "model": {"family": "resonant", "kind": "truncated",
                  "n_particles": 12, "total_level": 12},
        "threshold": 4,
        "mu": "dim",
        "times": {"start": 20000.0, "stop": 24000.0, "count": 41},
        "window": [20000.0, 24000.0],
    },
    "resonant-random-bound-desk": {
        "model": {"family": "resonant", "kind": "random",
                  "n_particles": 12, "total_level": 12, "seed": 5},
        "threshold": 4,
        "mu": "dim",
        "times": {"start": 20000.0, "stop": 24000.0, "count": 41},
        "window": [20000.0, 24000.0],
    },
    # level statistics references
    "stats-goe-desk": {
        "model": {"family": "synthetic", "kind": "goe", "dim": 1000, "seed": 3},
    },
    "stats-truncated-desk": {
        "model": {"family": "resonant", "kind": "truncated",
                  "n_particles": 12, "total_level": 12},
    },
    # full-scale runs from the desk presets; expect hours, not minutes
    "resonant-truncated-bound-full": {
        "long_running": True,
        "model": {"family": "resonant", "kind": "truncated",
                  "n_particles": 30, "total_level": 30},
        "threshold": 4,
        "mu": "dim",
        "times": {"start": 50000.0, "stop": 54000.0, "count": 41},
        "window": [50000.0, 54000.0],
    },
}


# ---------------------------------------------------------------- plumbing

def _config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _atomic_write(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _fmt(x) -> str:
    return repr(float(x))


def _csv_text(cfg_hash: str, kind: str, header: str, rows) -> str:
    lines = [f"# evolat schema={SCHEMA} kind={kind} config={cfg_hash} version={__version__}"]
    lines.append(header)
    lines.extend(rows)
    return "\n".join(lines) + "\n"


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _meta(cfg: dict, **extra) -> dict:
    return {
        "schema": SCHEMA,
        "version": __version__,
        "config_hash": _config_hash(cfg),
        "config": cfg,
        **extra,
    }


# ---------------------------------------------------------------- models

class ModelBundle:
    def __init__(self, name, spectrum, hamiltonian=None, classifier=None, extras=None):
        self.name = name
        self.spectrum = spectrum  # normalized
        self.hamiltonian = hamiltonian
        self.classifier = classifier  # callable threshold -> classifier, or None
        self.extras = extras or {}


def _build_syk(mc: dict) -> ModelBundle:
    n = int(mc["n_modes"])
    variant = mc["variant"]
    eps = float(mc.get("epsilon", 1.0))
    rng = np.random.default_rng(int(mc.get("seed", 0)))
    rep = syk.build_clifford(n)
    j2 = syk.sample_quadratic_couplings(n, rng)
    if variant == "free":
        h = syk.free_syk(rep, j2)
    elif variant == "integrable":
        omegas, frame = syk.antisymmetric_canonical_form(j2)
        pair = syk.sample_pair_couplings(n, rng)
        h = syk.integrable_syk(rep, omegas, pair, eps, frame=frame)
    elif variant in ("chaotic4", "chaotic3"):
        body = 4 if variant == "chaotic4" else 3
        many = syk.sample_many_body_couplings(n, body, rng)
        h = syk.chaotic_syk(rep, j2, many, eps, body=body)
    else:
        raise SystemExit(f"unknown syk variant {variant!r}")
    spec = linalg.normalize_spectrum(linalg.eigendecompose(h))
    return ModelBundle(
        f"syk-{variant}-n{n}",
        spec,
        hamiltonian=h,
        classifier=lambda k: syk.syk_locality_classifier(rep, k),
    )


def _build_resonant(mc: dict) -> ModelBundle:
    n, m = int(mc["n_particles"]), int(mc["total_level"])
    kind = mc["kind"]
    if kind == "alpha":
        scheme = resonant.coupling_alpha(float(mc.get("alpha", 1.0)))
    elif kind == "delta":
        scheme = resonant.coupling_delta(float(mc.get("delta_coeff", 1.0)))
    elif kind == "random":
        scheme = resonant.coupling_random(int(mc.get("seed", 0)))
    elif kind == "gg":
        scheme = resonant.coupling_gg()
    elif kind == "truncated":
        scheme = resonant.coupling_truncated()
    else:
        raise SystemExit(f"unknown resonant coupling kind {kind!r}")
    block = resonant.enumerate_block(n, m)
    h = resonant.build_block_hamiltonian(block, scheme)
    spec = linalg.normalize_spectrum(linalg.eigendecompose(h))
    return ModelBundle(
        f"resonant-{kind}-{n}-{m}",
        spec,
        hamiltonian=h,
        classifier=lambda k: resonant.resonant_locality_classifier(block, k),
        extras={"block_states.csv": resonant.block_states_csv(block)},
    )


def _build_synthetic(mc: dict) -> ModelBundle:
    dim = int(mc["dim"])
    rng = np.random.default_rng(int(mc.get("seed", 0)))
    kind = mc.get("kind", "uniform")
    if kind == "uniform":
        energies = np.sort(rng.uniform(0.0, 1.0, size=dim))
    elif kind == "goe":
        a = rng.normal(size=(dim, dim))
        energies = np.linalg.eigvalsh((a + a.T) / np.sqrt(8.0 * dim))
    else:
        raise SystemExit(f"unknown synthetic kind {kind!r}")
    spec = linalg.Spectrum(linalg.normalize_energies(energies), np.eye(dim, dtype=complex))
    return ModelBundle(f"synthetic-{kind}-{dim}", spec)


def _build_model(cfg: dict) -> ModelBundle:
    mc = cfg.get("model")
    if not isinstance(mc, dict) or "family" not in mc:
        raise SystemExit("config needs a model object with a family field")
    builders = {"syk": _build_syk, "resonant": _build_resonant, "synthetic": _build_synthetic}
    builder = builders.get(mc["family"])
    if builder is None:
        raise SystemExit(f"unknown model family {mc['family']!r}")
    return builder(mc)


def _default_threshold(cfg: dict) -> int:
    family = cfg.get("model", {}).get("family")
    if family == "syk":
        return 2 if cfg["model"].get("variant") == "free" else 4
    return 2


def _metric_for(cfg: dict, bundle: ModelBundle):
    """Resolve (metric, q or None) from mu/nu/threshold settings."""
    dim = bundle.spectrum.dim
    mu = cfg.get("mu", 1.0)
    mu = float(dim) if mu == "dim" else float(mu)
    nu = cfg.get("nu", 0.0)
    nu = 1e3 * mu if nu == "su" else float(nu)
    if mu == 1.0 and nu == 0.0:
        return engine.ComplexityMetric(), None
    if bundle.classifier is None:
        raise SystemExit(f"model {bundle.name} has no locality structure; use mu = 1")
    thr = int(cfg.get("threshold", _default_threshold(cfg)))
    q = engine.nonlocality_matrix(bundle.spectrum, bundle.classifier(thr))
    return engine.ComplexityMetric(mu=mu, nu=nu, q=q), q


def _times(cfg: dict) -> np.ndarray:
    tc = cfg.get("times")
    if tc is None:
        raise SystemExit("config needs a times object (start/stop/count or grid)")
    if "grid" in tc:
        return np.asarray(tc["grid"], dtype=float)
    return np.linspace(float(tc["start"]), float(tc["stop"]), int(tc["count"]))


def _load_config(args) -> dict:
    if args.preset and args.config:
        raise SystemExit("give either --preset or --config, not both")
    if args.preset:
        if args.preset not in PRESETS:
            raise SystemExit(
                f"unknown preset {args.preset!r}; available: {', '.join(sorted(PRESETS))}"
            )
        cfg = json.loads(json.dumps(PRESETS[args.preset]))
        if cfg.pop("long_running", False):
            print(f"note: preset {args.preset} is a full-scale run and may take hours",
                  file=sys.stderr)
    elif args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
    else:
        raise SystemExit("a --config file or --preset name is required")
    if args.seed is not None:
        cfg.setdefault("model", {})["seed"] = args.seed
    if args.threads is not None:
        cfg["threads"] = args.threads
    return cfg


# ---------------------------------------------------------------- commands

def cmd_gen(cfg: dict, outdir: Path) -> int:
    bundle = _build_model(cfg)
    meta = _meta(cfg, model=bundle.name, dim=bundle.spectrum.dim, normalized=True)
    if bundle.hamiltonian is not None:
        path = outdir / "hamiltonian.evlm"
        entries = bundle.hamiltonian.entries
        if np.abs(entries.imag).max() == 0.0:
            entries = entries.real
        linalg.save_matrix(path, entries)
        meta["hamiltonian_file"] = path.name
        print(f"wrote {path}")
    if bundle.spectrum.dim <= 256:
        _atomic_write(outdir / "spectrum.json", linalg.spectrum_to_json(bundle.spectrum))
        print(f"wrote {outdir / 'spectrum.json'}")
    _atomic_write(
        outdir / "energies.json",
        _json_text({"energies": bundle.spectrum.energies.tolist()}),
    )
    print(f"wrote {outdir / 'energies.json'}")
    for name, text in bundle.extras.items():
        _atomic_write(outdir / name, text)
        print(f"wrote {outdir / name}")
    _atomic_write(outdir / "gen_meta.json", _json_text(meta))
    print(f"wrote {outdir / 'gen_meta.json'}")
    return 0


def _run_sweep(cfg: dict, bundle: ModelBundle):
    times = _times(cfg)
    chain = cfg.get("chain", engine.DEFAULT_CHAIN)
    threads = int(cfg.get("threads", 1))
    if chain == "biinvariant":
        return engine.bi_invariant_trace(bundle.spectrum.energies, times), None
    metric, _ = _metric_for(cfg, bundle)
    pipeline = engine.ComplexityPipeline(bundle.spectrum.energies, metric, chain)
    return pipeline.sweep(times, threads=threads), pipeline


def cmd_bound(cfg: dict, outdir: Path) -> int:
    bundle = _build_model(cfg)
    trace, pipeline = _run_sweep(cfg, bundle)
    h = _config_hash(cfg)
    rows = [
        f"{_fmt(t)},{_fmt(v)},{trace.method}"
        for t, v in zip(trace.times, trace.values)
    ]
    _atomic_write(outdir / "bound.csv", _csv_text(h, "trace", "t,c_bound,method", rows))
    mu = pipeline.metric.mu if pipeline is not None else 1.0
    meta = _meta(
        cfg,
        model=bundle.name,
        dim=bundle.spectrum.dim,
        method=trace.method,
        ceiling=engine.complexity_ceiling(mu, bundle.spectrum.dim),
        max_value=float(trace.values.max()),
    )
    _atomic_write(outdir / "bound_meta.json", _json_text(meta))
    print(f"wrote {outdir / 'bound.csv'} ({trace.values.size} samples, method {trace.method})")
    return 0


def cmd_qspec(cfg: dict, outdir: Path) -> int:
    bundle = _build_model(cfg)
    if bundle.classifier is None:
        raise SystemExit(f"model {bundle.name} has no locality structure")
    thr = int(cfg.get("threshold", _default_threshold(cfg)))
    q = engine.nonlocality_matrix(bundle.spectrum, bundle.classifier(thr))
    h = _config_hash(cfg)
    rows = [f"{i},{_fmt(v)}" for i, v in enumerate(q.eigenvalues)]
    _atomic_write(outdir / "qspec.csv", _csv_text(h, "qspec", "index,eigenvalue", rows))
    meta = _meta(
        cfg,
        model=bundle.name,
        threshold=thr,
        null_residual=q.null_residual(bundle.spectrum.energies),
        null_count=int(np.sum(q.eigenvalues < 1e-8)),
    )
    _atomic_write(outdir / "qspec_meta.json", _json_text(meta))
    print(f"wrote {outdir / 'qspec.csv'} ({q.dim} eigenvalues, threshold {thr})")
    return 0


def cmd_stats(cfg: dict, outdir: Path) -> int:
    bundle = _build_model(cfg)
    spacings = spectral.unfold(bundle.spectrum.energies)
    h = _config_hash(cfg)
    _atomic_write(
        outdir / "spacings.csv",
        _csv_text(h, "spacings", "s,count,wigner_ref,poisson_ref",
                  spectral.histogram_rows(spacings)),
    )
    ks_w = spectral.ks_distance(spacings, "wigner")
    ks_p = spectral.ks_distance(spacings, "poisson")
    meta = _meta(
        cfg,
        model=bundle.name,
        levels=bundle.spectrum.dim,
        spacing_count=spacings.values.size,
        ks_wigner=ks_w,
        ks_poisson=ks_p,
        closer="wigner" if ks_w < ks_p else "poisson",
    )
    _atomic_write(outdir / "stats.json", _json_text(meta))
    print(f"wrote {outdir / 'stats.json'} (KS wigner {ks_w:.4f}, poisson {ks_p:.4f})")
    return 0


def cmd_plateau(cfg: dict, outdir: Path) -> int:
    bundle = _build_model(cfg)
    trace, pipeline = _run_sweep(cfg, bundle)
    window = tuple(cfg.get("window", (trace.times[0], trace.times[-1])))
    stats = engine.plateau_stats(trace, window)
    if pipeline is not None:
        gs = lattice.gram_schmidt(lattice.lll_reduce(pipeline.basis))
        estimate = lattice.plateau_estimate(gs)
    else:
        estimate = float(np.pi * np.sqrt(bundle.spectrum.dim / 3.0))
    meta = _meta(
        cfg,
        model=bundle.name,
        window=list(window),
        mean=stats.mean,
        variance=stats.variance,
        count=stats.count,
        estimate=estimate,
        ratio=stats.mean / estimate,
    )
    _atomic_write(outdir / "plateau.json", _json_text(meta))
    print(f"wrote {outdir / 'plateau.json'} (mean {stats.mean:.4f}, estimate {estimate:.4f})")
    return 0


def cmd_cvp(cfg: dict, outdir: Path) -> int:
    if "basis" not in cfg or "target" not in cfg:
        raise SystemExit("cvp config must hold a basis (list of columns) and a target")
    basis = lattice.LatticeBasis(np.array(cfg["basis"], dtype=float).T)
    instance = lattice.CvpInstance(basis, np.array(cfg["target"], dtype=float))
    radius = cfg.get("radius")
    entries = lattice.method_ladder(instance, radius=radius)
    meta = _meta(
        cfg,
        dim=basis.dim,
        methods=[
            {
                "method": e.method,
                "coeffs": e.coeffs.tolist(),
                "distance": e.distance,
                "wall_time_s": e.seconds,
            }
            for e in entries
        ],
    )
    _atomic_write(outdir / "cvp.json", _json_text(meta))
    best = min(entries, key=lambda e: e.distance)
    print(f"wrote {outdir / 'cvp.json'} (best {best.method}: {best.distance:.6f})")
    return 0


COMMANDS = {
    "gen": (cmd_gen, "build a model, store Hamiltonian and spectrum"),
    "bound": (cmd_bound, "complexity-bound trace over a time grid"),
    "qspec": (cmd_qspec, "eigenvalues of the nonlocality matrix"),
    "stats": (cmd_stats, "level-spacing statistics and KS distances"),
    "plateau": (cmd_plateau, "late-time plateau vs Gram-Schmidt estimate"),
    "cvp": (cmd_cvp, "solver ladder on a stored lattice instance"),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="evolat",
        description="complexity bounds for quantum evolution via lattice optimization",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--preset", help=f"named preset ({', '.join(sorted(PRESETS))})")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the model seed")
        p.add_argument("--threads", type=int, default=None, help="sweep worker threads")
    args = parser.parse_args(argv)
    cfg = _load_config(args)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    return COMMANDS[args.command][0](cfg, outdir)


if __name__ == "__main__":
    sys.exit(main())
