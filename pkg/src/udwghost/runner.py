"""Run scenarios through the full pipeline and write reports."""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError, ProtocolError
from .protocol import Projector, contrast, ghost_image, negativity, partial_trace, post_select
from .register import RegisterState, assemble_rho, check_density, g_table
from .scenario import Scenario
from .spdc import GexpCache

CSV_HEADER = (
    "tau,p_g_given_gprep,p_e_given_gprep,p_g_given_eprep,p_e_given_eprep,"
    "intensity_gprep,intensity_eprep,contrast,negativity,quad_rel_err"
)


@dataclass
class Preparation:
    label: str
    initial: tuple
    rho: np.ndarray
    trace: float
    postselect_prob: float
    rho_bob: np.ndarray | None  # None when Alice's post-selection can never succeed
    image: object
    negativity: float


@dataclass
class Evaluation:
    """Everything computed for one scenario at one coupling instant."""

    tau: float
    cache: GexpCache
    gtable: np.ndarray
    preps: dict  # "g"/"e" -> Preparation


@dataclass
class ReportRow:
    tau: float
    p_g_given_gprep: float
    p_e_given_gprep: float
    p_g_given_eprep: float
    p_e_given_eprep: float
    intensity_gprep: float
    intensity_eprep: float
    contrast: float
    negativity: float
    quad_rel_err: float
    images: dict = field(default_factory=dict, compare=False)  # prep -> Bob's pixel intensities

    def csv_line(self) -> str:
        return ",".join(_fmt(getattr(self, f.name)) for f in fields(self) if f.name != "images")


def _fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _bob_state(s: Scenario, rho: np.ndarray):
    """Post-select every Alice detector, highest index first so indices stay valid."""
    prob = 1.0
    proto = s.protocol
    for idx, outcome in sorted(zip(proto.alice, proto.postselect), reverse=True):
        rho, p = post_select(rho, Projector(idx, outcome))
        prob *= p
    return rho, prob


def evaluate(s: Scenario, tau: float | None = None) -> Evaluation:
    tau = s.tau if tau is None else float(tau)
    if len(s.detectors) > 8:
        raise ConfigError("at most 8 detectors are supported")
    cache = GexpCache(s.model, s.spdc, s.detectors, tau, s.quadrature).warm()
    gt = g_table(s.n, cache)
    proto = s.protocol
    preps = {}
    for label, prep in (("g", proto.prep_g), ("e", proto.prep_e)):
        init = proto.initial_state(prep, s.n)
        rho, tr = assemble_rho(RegisterState(init, tau), gt, s.detectors, return_trace=True)
        try:
            rho_b, prob = _bob_state(s, rho)
        except ProtocolError:
            rho_b, prob = None, 0.0
        preps[label] = Preparation(
            label=label,
            initial=init,
            rho=rho,
            trace=tr,
            postselect_prob=prob,
            rho_bob=rho_b,
            image=None if rho_b is None else ghost_image(rho_b),
            negativity=negativity(rho, proto.bob),
        )
    return Evaluation(tau, cache, gt, preps)


def _probe_marginal(s: Scenario, rho_b: np.ndarray) -> np.ndarray:
    """Reduced 2x2 state of the reported Bob detector."""
    bob = list(s.protocol.bob)
    pos = bob.index(s.protocol.probe)
    return partial_trace(rho_b, [i for i in range(len(bob)) if i != pos])


def row_from_evaluation(s: Scenario, ev: Evaluation) -> ReportRow:
    probs = {}
    images = {}
    for label, prep in ev.preps.items():
        if prep.rho_bob is None:
            # empty post-selection branch: Bob never gets data for this preparation
            probs[label] = (math.nan, math.nan)
            images[label] = [math.nan] * len(s.protocol.bob)
            continue
        m = np.real(np.diag(_probe_marginal(s, prep.rho_bob)))
        probs[label] = (float(m[0]), float(m[1]))
        images[label] = [float(x) for x in prep.image.pixels]
    i_g, i_e = probs["g"][1], probs["e"][1]
    try:
        con = contrast(i_g, i_e)
    except ProtocolError:
        con = math.nan  # also covers nan intensities, since nan > 0 is false
    return ReportRow(
        tau=ev.tau,
        p_g_given_gprep=probs["g"][0],
        p_e_given_gprep=probs["g"][1],
        p_g_given_eprep=probs["e"][0],
        p_e_given_eprep=probs["e"][1],
        intensity_gprep=i_g,
        intensity_eprep=i_e,
        contrast=con,
        negativity=max(p.negativity for p in ev.preps.values()),
        quad_rel_err=ev.cache.max_rel_err,
        images=images,
    )


def run_single(s: Scenario, tau: float | None = None) -> ReportRow:
    return row_from_evaluation(s, evaluate(s, tau))


def _run_at(args):
    s, tau = args
    return run_single(s, tau)


def _sweep_taus(s: Scenario):
    if not s.sweep:
        raise ConfigError(f"scenario {s.name!r} has no [sweep] tau list")
    return sorted(s.sweep)


def evaluate_sweep(s: Scenario) -> list[Evaluation]:
    return [evaluate(s, t) for t in _sweep_taus(s)]


def run_sweep(s: Scenario, workers: int = 1) -> list[ReportRow]:
    """One row per sweep tau, in increasing tau; rows are independent so they may run in parallel."""
    taus = _sweep_taus(s)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_at, [(s, t) for t in taus]))
    return [row_from_evaluation(s, ev) for ev in evaluate_sweep(s)]


def density_checks(ev: Evaluation) -> dict:
    return {label: check_density(p.rho, p.trace) for label, p in ev.preps.items()}


def format_csv(rows) -> str:
    return "\n".join([CSV_HEADER, *(r.csv_line() for r in rows)]) + "\n"


def format_images_csv(s: Scenario, rows) -> str:
    cols = [f"pixel_{b + 1}" for b in s.protocol.bob]
    lines = ["tau,prep,alice_image," + ",".join(cols)]
    for r in rows:
        for label, prep in (("g", s.protocol.prep_g), ("e", s.protocol.prep_e)):
            lines.append(",".join([_fmt(r.tau), label, prep, *(_fmt(x) for x in r.images[label])]))
    return "\n".join(lines) + "\n"


def _write(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def plot_contrast(rows, path: Path, title: str = ""):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot([r.tau for r in rows], [r.contrast for r in rows], "o-", color="k")
    ax.set_xlabel("coupling time tau")
    ax.set_ylabel("contrast")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    # fixed hash salt and no date, so the SVG is byte-stable
    try:
        with matplotlib.rc_context({"svg.hashsalt": "udwghost"}):
            fig.savefig(path, format="svg", metadata={"Date": None})
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None
    finally:
        plt.close(fig)


def emit_report(rows, s: Scenario, out_dir, stem: str | None = None, plot: bool = False) -> list[Path]:
    """Write ``<stem>.csv``, ``<stem>.json`` (resolved config) and optional extras."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from None
    stem = stem or s.output.stem or s.name
    paths = [out / f"{stem}.csv", out / f"{stem}.json"]
    _write(paths[0], format_csv(rows))
    meta = {"scenario": s.resolved(), "csv_header": CSV_HEADER, "rows": len(rows)}
    _write(paths[1], json.dumps(meta, indent=2, sort_keys=True) + "\n")
    if len(s.protocol.bob) > 1:
        paths.append(out / f"{stem}.images.csv")
        _write(paths[-1], format_images_csv(s, rows))
    if plot:
        paths.append(out / f"{stem}.svg")
        plot_contrast(rows, paths[-1], s.name)
    return paths
