"""Command-line front end.

Every sub-command reads an optional JSON job file (``--config``), runs one
pipeline and writes ``<command>_report.json`` (plus CSV/SVG side files)
into ``--out``.  Exit codes: 0 pass, 1 quantitative failure, 2 input error,
3 inconclusive.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .complex_core import AnalyticModel, MonicPoly, Path as CPath, cauchy_derivative
from .errors import ConfigError, SchwarzLabError
from .expr import ExpressionError, compile_expression
from .io import read_json, to_complex, write_json
from .svg import Sketch
from .tolerances import DEFAULTS, Tolerances

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

COMMANDS = ("verify", "classify", "wprep", "trace", "inner", "ktheta", "nevanlinna", "uv", "fixtures")
CONFIG_KEYS = {"format_version", "command", "fixture", "inputs", "model", "params", "samples", "seed",
               "tolerances", "svg"}
INPUT_KEYS = {"arc", "inner", "pencil", "u", "v"}
PARAM_KEYS = {
    "verify": set(),
    "classify": {"z0", "r", "eta"},
    "wprep": {"grid_center", "grid_radius", "rho"},
    "trace": {"center", "radius", "turns"},
    "inner": set(),
    "ktheta": {"lambda"},
    "nevanlinna": {"lambda", "alpha", "H_power"},
    "uv": {"eta"},
    "fixtures": set(),
}


@dataclass
class JobConfig:
    command: str
    fixture: str | None = None
    inputs: dict = field(default_factory=dict)
    model: dict | None = None
    params: dict = field(default_factory=dict)
    samples: int | None = None
    seed: int = 0
    tolerances: Tolerances = DEFAULTS
    threshold: float | None = None
    out: Path = Path(".")
    svg: bool = False

    @classmethod
    def from_sources(cls, command: str, config_path: str | None, args) -> "JobConfig":
        raw: dict = {}
        base = Path(".")
        if config_path is not None:
            p = Path(config_path)
            if not p.is_file():
                raise ConfigError(f"config file {config_path} does not exist", "config")
            try:
                raw = read_json(p)
            except json.JSONDecodeError as e:
                raise ConfigError(f"config is not valid JSON: {e}", "config")
            if not isinstance(raw, dict):
                raise ConfigError("config must be a JSON object", "config")
            base = p.parent
        unknown = set(raw) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}", sorted(unknown)[0])
        if raw.get("format_version", 1) != 1:
            raise ConfigError("unsupported format_version", "format_version")
        if "command" in raw and raw["command"] != command:
            raise ConfigError(f"config is for command {raw['command']!r}, not {command!r}", "command")
        inputs = raw.get("inputs", {})
        if not isinstance(inputs, dict):
            raise ConfigError("inputs must be an object", "inputs")
        for k, v in inputs.items():
            if k not in INPUT_KEYS:
                raise ConfigError(f"unknown input {k!r}", f"inputs.{k}")
            path = (base / v) if not Path(v).is_absolute() else Path(v)
            if not path.is_file():
                raise ConfigError(f"input file {v} does not exist", f"inputs.{k}")
            inputs[k] = path
        params = raw.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("params must be an object", "params")
        for k in params:
            if k not in PARAM_KEYS[command]:
                raise ConfigError(f"unknown parameter {k!r} for {command}", f"params.{k}")
        tol_over = raw.get("tolerances", {})
        fields = {f.name for f in dataclasses.fields(Tolerances)}
        for k, v in tol_over.items():
            if k not in fields:
                raise ConfigError(f"unknown tolerance {k!r}", f"tolerances.{k}")
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {k} must be positive", f"tolerances.{k}")
        tol = DEFAULTS.with_overrides(**tol_over) if tol_over else DEFAULTS
        samples = args.samples if args.samples is not None else raw.get("samples")
        if samples is not None and (not isinstance(samples, int) or samples < 3):
            raise ConfigError("samples must be an integer >= 3", "samples")
        seed = args.seed if args.seed is not None else raw.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError("seed must be an integer", "seed")
        if args.tol is not None and not args.tol > 0:
            raise ConfigError("--tol must be positive", "tol")
        svg = raw.get("svg", False) if args.svg is None else args.svg == "on"
        fixture = args.fixture if args.fixture is not None else raw.get("fixture")
        return cls(command, fixture, inputs, raw.get("model"), params, samples, seed, tol, args.tol,
                   Path(args.out), bool(svg))


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _model_from_spec(spec: dict, variables=("z",)) -> AnalyticModel:
    if not isinstance(spec, dict):
        raise ConfigError("model must be an object", "model")
    extra = set(spec) - {"expr", "params", "center", "radius", "series"}
    if extra:
        raise ConfigError(f"unknown model key {sorted(extra)[0]!r}", f"model.{sorted(extra)[0]}")
    center = to_complex(spec.get("center", 0.0))
    radius = float(spec.get("radius", 10.0))
    if "series" in spec:
        coeffs = [to_complex(c) for c in spec["series"]]
        return AnalyticModel.series(coeffs, center, radius, name="series")
    if "expr" not in spec:
        raise ConfigError("model needs 'expr' or 'series'", "model.expr")
    try:
        f = compile_expression(spec["expr"], variables, spec.get("params"))
    except ExpressionError as e:
        raise ConfigError(str(e), "model.expr")
    return AnalyticModel.black_box(f, center, radius, name=spec["expr"])


def _need_fixture(job: JobConfig, allowed):
    if job.fixture not in allowed:
        raise ConfigError(f"fixture must be one of {sorted(allowed)}, got {job.fixture!r}", "fixture")


def _polygon_omega(arc):
    import shapely
    from .schwarz import OmegaSampling

    poly = shapely.Polygon(np.c_[arc.samples.real, arc.samples.imag])
    xs = np.linspace(arc.samples.real.min(), arc.samples.real.max(), 60)
    ys = np.linspace(arc.samples.imag.min(), arc.samples.imag.max(), 60)
    X, Y = np.meshgrid(xs, ys)
    pts = (X + 1j * Y).reshape(-1)

    def member(z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return shapely.contains_xy(poly, z.real, z.imag)

    pts = pts[member(pts)]
    return OmegaSampling(pts, float(xs[1] - xs[0]), member)


def _arc_sketch(samples, label: str, marks=(), closed=False) -> str:
    sk = Sketch()
    sk.polyline(samples, closed=closed)
    if len(marks):
        sk.points(marks)
    sk.text(label)
    return sk.render()


# ---------------------------------------------------------------------------
# Commands: each returns (exit code, report dict, side files {name: text})
# ---------------------------------------------------------------------------


def cmd_schwarz_verify(job: JobConfig):
    """Check the Schwarz identity S(zeta) = conj(zeta) on a sampled arc."""
    from .fixtures import circle_fixture, unit_circle_arc, identity_model
    from .schwarz import BoundaryArc, SchwarzCandidate, schwarz_residuals

    n = job.samples or 512
    if "arc" in job.inputs:
        arc = BoundaryArc.from_json(read_json(job.inputs["arc"]))
        if job.model is None:
            raise ConfigError("verify with an arc file needs a model", "model")
        cand = SchwarzCandidate(_model_from_spec(job.model))
    elif job.model is not None:
        raise ConfigError("a model needs inputs.arc to be checked against", "model")
    elif job.fixture == "circle":
        cand, arc, _ = circle_fixture(n=n)
    elif job.fixture == "identity-on-circle":
        arc, cand = unit_circle_arc(n), SchwarzCandidate(identity_model())
    else:
        raise ConfigError("verify needs inputs.arc + model or fixture circle/identity-on-circle", "fixture")
    res = schwarz_residuals(cand, arc)
    thr = job.threshold or job.tolerances.verify_threshold
    residual = float(np.max(res))
    report = {"residual": residual, "threshold": thr, "per_sample_residuals": res, "n_samples": arc.n}
    side = {}
    if job.svg:
        side["verify.svg"] = _arc_sketch(arc.samples, f"residual {residual:.3e}", closed=arc.closed)
    return (EXIT_PASS if residual <= thr else EXIT_FAIL), report, side


def cmd_classify(job: JobConfig):
    """Classify a boundary point as regular, two-sided, double or cusp."""
    from .fixtures import circle_fixture, slit_fixture, cusp_T, tangent_circles_fixture
    from .schwarz import BoundaryArc, SchwarzCandidate, build_cusp_domain, classify_boundary

    n = job.samples
    twin = None
    if "arc" in job.inputs:
        arc = BoundaryArc.from_json(read_json(job.inputs["arc"]))
        if job.model is None:
            raise ConfigError("classify with an arc file needs a model", "model")
        if not arc.closed:
            raise ConfigError("arc-file classification needs a closed arc (the domain is its interior)", "inputs.arc")
        cand, omega = SchwarzCandidate(_model_from_spec(job.model)), _polygon_omega(arc)
    else:
        if job.model is not None:
            raise ConfigError("a model needs inputs.arc to be classified against", "model")
        _need_fixture(job, {"circle", "slit", "cusp", "tangent-circles"})
        if job.fixture == "circle":
            cand, arc, omega = circle_fixture(to_complex(job.params.get("z0", [0.2, 0.1])),
                                              float(job.params.get("r", 0.7)), n or 512)
        elif job.fixture == "slit":
            cand, arc, omega = slit_fixture(n or 401)
        elif job.fixture == "cusp":
            dom = build_cusp_domain(cusp_T(), float(job.params.get("eta", 0.25)), n or 401, job.tolerances)
            cand, arc, omega = dom.candidate, dom.arc, dom.omega
        else:
            (cand, arc, omega), twin = tangent_circles_fixture(n or 512)
    rep = classify_boundary(cand, arc, omega, twin=twin, tol=job.tolerances)
    report = rep.to_dict()
    side = {}
    if job.svg:
        side["classify.svg"] = _arc_sketch(arc.samples, f"label {rep.label} ({rep.case_name})",
                                           [arc.base_point], closed=arc.closed)
    code = EXIT_INCONCLUSIVE if rep.label in ("inconclusive", "excluded") else EXIT_PASS
    return code, report, side


def _fixture_psi(name: str):
    from .weierstrass import BivariateModel

    if name == "w2-z":
        return BivariateModel(lambda z, w: w**2 - z, lambda z, w: 2 * w + 0 * z, 0, 1, 0, 1, "w^2-z"), 0.04, 0.3
    if name == "product":
        return BivariateModel(lambda z, w: (w - z) * (2 + w), lambda z, w: 2 * w + 2 - z, 0, 1, 0, 1,
                              "(w-z)(2+w)"), 0.04, 0.5
    if name == "exp":
        return BivariateModel(lambda z, w: np.exp(w) - 1 + 0 * z, lambda z, w: np.exp(w) + 0 * z, 0, 1, 0, 1,
                              "exp(w)-1"), 0.04, 0.5
    raise ConfigError(f"unknown wprep fixture {name!r}", "fixture")


def cmd_wprep(job: JobConfig):
    """Weierstrass-prepare a bivariate model and locate its branch points."""
    from .weierstrass import BivariateModel, circle_grid, discriminant_field, order_in_w, weierstrass_prepare

    if job.model is not None:
        m = job.model
        if "expr" not in m:
            raise ConfigError("wprep model needs 'expr' in z and w", "model.expr")
        try:
            f = compile_expression(m["expr"], ("z", "w"), m.get("params"))
        except ExpressionError as e:
            raise ConfigError(str(e), "model.expr")
        Psi = BivariateModel(f, None, 0, float(m.get("radius", 1.0)), 0, float(m.get("radius", 1.0)), m["expr"])
        gr, rho = 0.04, 0.3
    else:
        _need_fixture(job, {"w2-z", "product", "exp"})
        Psi, gr, rho = _fixture_psi(job.fixture)
    gr = float(job.params.get("grid_radius", gr))
    rho = float(job.params.get("rho", rho))
    gc = to_complex(job.params.get("grid_center", 0.0))
    grid = circle_grid(gc, gr, job.samples or job.tolerances.pencil_nodes)
    k = order_in_w(Psi, tol=job.tolerances)
    pencil, c = weierstrass_prepare(Psi, grid, rho, job.tolerances)
    D = discriminant_field(pencil, job.tolerances)
    # consistency: roots of P are roots of Psi
    cons = max(float(np.max(np.abs(Psi(z, pencil.roots(z))))) for z in grid)
    report = {
        "order": k,
        "degree": pencil.k,
        "rho": rho,
        "grid": {"center": gc, "radius": gr, "nodes": int(grid.size)},
        "c00": complex(c(gc, 0.0)),
        "coefficient_max_abs": [float(np.max(np.abs(pencil.coefficients[:, j]))) for j in range(pencil.k)],
        "root_consistency": cons,
        "discriminant": D.to_dict(),
        "derivative_check": Psi.derivative_check(seed=job.seed),
    }
    side = {"pencil.json": json.dumps(pencil.to_json(), sort_keys=True, indent=2) + "\n"}
    return EXIT_PASS if cons <= 1e-7 else EXIT_FAIL, report, side


def cmd_trace(job: JobConfig):
    """Continue the roots of a prepared pencil around a loop and report monodromy."""
    from .weierstrass import MonicPolyPencil, monodromy

    if "pencil" in job.inputs:
        pen = MonicPolyPencil.from_json(read_json(job.inputs["pencil"]))
        sl = pen.slice
    else:
        if job.model is not None:
            coeffs = job.model.get("coefficients")
            if not isinstance(coeffs, list) or not coeffs:
                raise ConfigError("trace model needs 'coefficients' (a_0..a_{k-1} in z)", "model.coefficients")
            try:
                fs = [compile_expression(c, ("z",), job.model.get("params")) for c in coeffs]
            except ExpressionError as e:
                raise ConfigError(str(e), "model.coefficients")
        else:
            _need_fixture(job, {"w2-z", "w3-z"})
            k = 2 if job.fixture == "w2-z" else 3
            fs = [lambda z: -np.asarray(z, dtype=complex)] + [lambda z: 0 * np.asarray(z, dtype=complex)] * (k - 1)

        def sl(z):
            return MonicPoly([complex(f(z)) for f in fs])

    center = to_complex(job.params.get("center", 0.0))
    radius = float(job.params.get("radius", 0.5))
    turns = int(job.params.get("turns", 1))
    loop = CPath.circle(center, radius, job.samples or 64, turns=turns)
    mono = monodromy(sl, loop, tol=job.tolerances)
    report = {"permutation": list(mono.permutation), "cycles": mono.cycles, "base_roots": mono.base_roots,
              "end_values": mono.end_values, "loop": {"center": center, "radius": radius, "turns": turns}}
    rows = ["root,re,im,end_re,end_im"] + [
        f"{i + 1},{b.real!r},{b.imag!r},{e.real!r},{e.imag!r}"
        for i, (b, e) in enumerate(zip(mono.base_roots, mono.end_values))]
    return EXIT_PASS, report, {"trace.csv": "\n".join(rows) + "\n"}


def _inner_spec(job: JobConfig):
    from .model_spaces import InnerFunctionSpec

    if "inner" in job.inputs:
        try:
            return InnerFunctionSpec.from_json(read_json(job.inputs["inner"]))
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"bad inner spec: {e}", "inputs.inner")
    if job.fixture in (None, "single-atom"):
        return InnerFunctionSpec.single_atom(1.0)
    raise ConfigError(f"unknown inner fixture {job.fixture!r}", "fixture")


def cmd_inner(job: JobConfig):
    """Sample an inner function on the circle and report unimodularity."""
    from .model_spaces import CircleFunction, atom_mask, eval_inner

    spec = _inner_spec(job)
    N = job.samples or job.tolerances.spectral_samples
    if N & (N - 1):
        raise ConfigError("samples must be a power of two", "samples")
    tr = CircleFunction.from_function(lambda z: eval_inner(spec, z), N, 0.5)
    keep = atom_mask(spec, tr.t, job.tolerances.atom_window)
    uni = float(np.max(np.abs(np.abs(tr.values[keep]) - 1)))
    thr = job.threshold or job.tolerances.unimodular
    report = {"spec": spec.to_json(), "theta_at_0": eval_inner(spec, 0.0), "unimodularity": uni,
              "threshold": thr, "roundtrip_error": tr.roundtrip_error(), "N": N}
    return (EXIT_PASS if uni <= thr else EXIT_FAIL), report, {"trace.csv": tr.to_csv()}


def cmd_ktheta(job: JobConfig):
    """Test membership of a boundary trace in the model space K_theta."""
    from .model_spaces import CircleFunction, ktheta_membership, reproducing_kernel

    spec = _inner_spec(job)
    N = job.samples or job.tolerances.spectral_samples
    if N & (N - 1):
        raise ConfigError("samples must be a power of two", "samples")
    if job.model is not None:
        phi = _model_from_spec(job.model)
        what = job.model.get("expr", "series")
    else:
        lam = to_complex(job.params.get("lambda", 0.3))
        phi = reproducing_kernel(spec, lam)
        what = f"kernel lambda={lam}"
    tol = job.tolerances if job.threshold is None else job.tolerances.with_overrides(leak=job.threshold)
    res = ktheta_membership(CircleFunction.from_function(phi, N, 0.5), spec, tol)
    report = {"phi": what, "member": res.member, "leak": res.leak, "negative_leak": res.negative_leak,
              "threshold": tol.leak, "coefficient_1": res.coefficient(1), "weight_power": res.weight_power,
              "N": N}
    return (EXIT_PASS if res.member else EXIT_FAIL), report, {}


def cmd_nevanlinna(job: JobConfig):
    """Run the aggregate construction and its boundary identity checks."""
    from .model_spaces import aggregate_pipeline, shirokov_multiplier, multiplier_lipschitz, InnerFunctionSpec

    spec = _inner_spec(job)
    lam = to_complex(job.params.get("lambda", 0.3))
    alpha = job.params.get("alpha")
    rep = aggregate_pipeline(spec, lam, int(job.params.get("H_power", 3)), job.tolerances,
                             None if alpha is None else float(alpha))
    thr = job.threshold or 1e-5
    report = rep.to_dict()
    H = shirokov_multiplier(InnerFunctionSpec((), spec.atoms), int(job.params.get("H_power", 3)))
    report["multiplier_lipschitz"] = multiplier_lipschitz(spec, H)
    report["threshold"] = thr
    ok = (rep.membership.member and rep.univalence.univalent and rep.identity_residual <= thr
          and rep.nevanlinna_residual <= thr)
    side = {}
    if job.svg:
        from .model_spaces import CircleFunction

        t = CircleFunction.angles(2048, 0.5)  # half-step grid avoids the atoms
        side["nevanlinna.svg"] = _arc_sketch(rep.phi(np.exp(1j * t)), f"phi(T), alpha={rep.alpha:.4f}",
                                             closed=True)
    return (EXIT_PASS if ok else EXIT_FAIL), report, side


def cmd_uv(job: JobConfig):
    """Compare a U-V harmonic pair and classify the transplanted boundary."""
    from .fixtures import cusp_T
    from .harmonic import HalfDiskHarmonic, uv_classify, uv_cusp_example

    if "u" in job.inputs or "v" in job.inputs:
        if not ("u" in job.inputs and "v" in job.inputs):
            raise ConfigError("uv needs both inputs.u and inputs.v", "inputs")
        try:
            u = HalfDiskHarmonic.from_json(read_json(job.inputs["u"]))
            v = HalfDiskHarmonic.from_json(read_json(job.inputs["v"]))
        except (ValueError, KeyError, TypeError) as e:
            raise ConfigError(f"bad harmonic input: {e}", "inputs")
    else:
        u, v = HalfDiskHarmonic((1.0, 0.5)), HalfDiskHarmonic((1.0,))
    if job.fixture not in (None, "cusp"):
        raise ConfigError("uv supports the cusp fixture", "fixture")
    ex = uv_cusp_example(cusp_T(), u, v, float(job.params.get("eta", 0.25)), job.tolerances)
    rep = uv_classify(ex.R, ex.A, ex.arc, ex.omega, job.tolerances)
    thr = job.threshold or 1e-6
    report = {"ratio_residual": ex.ratio_residual, "R_residual": ex.R_residual, "threshold": thr,
              "positivity_min": ex.positivity_min, "ratio": ex.ratio.to_dict(), "classification": rep.to_dict()}
    side = {}
    if job.svg:
        side["uv.svg"] = _arc_sketch(ex.arc.samples, f"label {rep.label}", [ex.arc.base_point])
    if ex.ratio_residual > thr:
        return EXIT_FAIL, report, side
    code = EXIT_INCONCLUSIVE if rep.label in ("inconclusive", "excluded") else EXIT_PASS
    return code, report, side


def cmd_fixtures(job: JobConfig):
    """Write the built-in fixture files and matching job configs."""
    from .fixtures import circle_arc, real_segment_arc
    from .harmonic import HalfDiskHarmonic
    from .model_spaces import InnerFunctionSpec

    files = {
        "circle_arc.json": circle_arc(n=job.samples or 512).to_json(),
        "segment_arc.json": real_segment_arc().to_json(),
        "inner_single_atom.json": InnerFunctionSpec.single_atom(1.0).to_json(),
        "harmonic_u.json": HalfDiskHarmonic((1.0, 0.5)).to_json(),
        "harmonic_v.json": HalfDiskHarmonic((1.0,)).to_json(),
        "verify_circle.json": {
            "command": "verify", "inputs": {"arc": "circle_arc.json"},
            "model": {"expr": "conj(z0) + r**2/(z - z0)", "params": {"z0": [0.2, 0.1], "r": 0.7}},
        },
        "ktheta_kernel.json": {"command": "ktheta", "inputs": {"inner": "inner_single_atom.json"},
                               "params": {"lambda": 0.3}},
        "uv_cusp.json": {"command": "uv", "inputs": {"u": "harmonic_u.json", "v": "harmonic_v.json"}},
    }
    side = {name: json.dumps(obj, sort_keys=True, indent=2) + "\n" for name, obj in files.items()}
    return EXIT_PASS, {"written": sorted(side)}, side


HANDLERS = {
    "verify": cmd_schwarz_verify,
    "classify": cmd_classify,
    "wprep": cmd_wprep,
    "trace": cmd_trace,
    "inner": cmd_inner,
    "ktheta": cmd_ktheta,
    "nevanlinna": cmd_nevanlinna,
    "uv": cmd_uv,
    "fixtures": cmd_fixtures,
}

STATUS = {EXIT_PASS: "pass", EXIT_FAIL: "fail", EXIT_INPUT: "input-error", EXIT_INCONCLUSIVE: "inconclusive"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schwarzlab", description="Schwarz-function boundary laboratory")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=HANDLERS[name].__doc__)
        s.add_argument("--config", help="JSON job file")
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--fixture", help="built-in fixture name")
        s.add_argument("--samples", type=int, help="sample count (meaning depends on the command)")
        s.add_argument("--tol", type=float, help="pass/fail threshold override")
        s.add_argument("--seed", type=int, help="random seed")
        s.add_argument("--svg", choices=("on", "off"), help="write an SVG sketch")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = JobConfig.from_sources(args.command, args.config, args)
    except ConfigError as e:
        print(f"input error [{e.field}]: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, report, side = HANDLERS[args.command](job)
    except ConfigError as e:
        print(f"input error [{e.field}]: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, TypeError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except SchwarzLabError as e:
        code = EXIT_FAIL
        report = {"error": type(e).__name__, "message": str(e)}
        side = {}
        witness = getattr(e, "witness", None)
        if witness:
            report["witness"] = witness
    full = {
        "format_version": 1,
        "command": args.command,
        "fixture": job.fixture,
        "seed": job.seed,
        "tolerances": job.tolerances.as_dict(),
        "exit_code": code,
        "status": STATUS[code],
        "result": report,
    }
    out = job.out
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / f"{args.command}_report.json", full)
    for name, text in side.items():
        (out / name).write_text(text)
    print(f"{args.command}: {STATUS[code]} (exit {code}) -> {out / (args.command + '_report.json')}")
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
