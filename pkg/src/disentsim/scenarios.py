"""Named simulation scenarios behind the command-line front end.

Each scenario owns a flat key/value parameter map whose defaults reproduce one
of the package's reference set-ups.  A run writes one or more CSV files plus a
``run.meta`` file listing every resolved parameter; feeding ``run.meta`` back
via ``--config`` reproduces the run byte for byte.  All randomness comes from
``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from . import __version__
from .engine import (
    BlochSingularValueProbe,
    BlochVectorProbe,
    FreeEnergyProbe,
    ExpectationProbe,
    MmeModel,
    PurityProbe,
    TauProbe,
    ThetaSpec,
    integrate,
)
from .linalg import DensityMatrix, random_mixed_state
from .mfa import MfaParams, decoupled_start, detect_limit_cycle, integrate_mfa, detuning_scan
from .observables import EntanglementConfig, ThermalConfig
from .schmidt import SchmidtModel, integrate_schmidt
from .twospin import P_BELL, BellModelParams, TruncationParams, bell_model, integrate_trunc

RNG_KIND = "numpy.random.default_rng (PCG64)"


class ConfigError(ValueError):
    """Bad scenario name, unknown key, or unparsable value."""


class VerdictUndecided(RuntimeError):
    """A steady-state verdict was required but the detector could not decide."""


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def resolve_params(name: str, defaults: dict, overrides: dict[str, str]) -> dict:
    params = dict(defaults)
    for key, raw in overrides.items():
        if key not in defaults:
            raise ConfigError(f"unknown key {key!r} for scenario {name!r}")
        default = defaults[key]
        try:
            if isinstance(default, bool):
                params[key] = raw.strip().lower() in ("1", "true", "yes") if isinstance(raw, str) else bool(raw)
            elif isinstance(default, int):
                params[key] = int(raw)
            elif isinstance(default, float):
                params[key] = float(raw)
            else:
                params[key] = str(raw)
        except ValueError as exc:
            raise ConfigError(f"key {key!r}: cannot parse {raw!r}: {exc}") from None
    return params


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(float(x)) for x in row))
    atomic_write(path, "\n".join(lines) + "\n")


def write_meta(path: str, scenario: str, params: dict, extra_comments=()) -> None:
    lines = [
        f"# disentsim {__version__} run record; valid as --config input",
        f"# scenario: {scenario}",
        f"# rng: {RNG_KIND}",
    ]
    lines += [f"# {c}" for c in extra_comments]
    lines += [f"{k}={_fmt(v)}" for k, v in sorted(params.items())]
    atomic_write(path, "\n".join(lines) + "\n")


@dataclass
class RunResult:
    scenario: str
    params: dict
    outputs: list[str]
    notes: list[str]


# ---------------------------------------------------------------------------
# scenario implementations


def _run_schmidt(params: dict, outdir: str) -> RunResult:
    rng = np.random.default_rng(params["seed"])
    d_m = params["d_m"]
    if d_m < 2:
        raise ConfigError("d_m must be >= 2")
    q0 = rng.uniform(0.1, 1.0, d_m)
    q0 /= np.linalg.norm(q0)
    model = SchmidtModel(gamma_eta=params["gamma_eta"], m=params["m"])
    ts, qs = integrate_schmidt(
        q0, model, params["t_end"], n_samples=params["n_samples"],
        rtol=params["rtol"], atol=params["atol"],
    )
    path = os.path.join(outdir, "schmidt_q.csv")
    header = ["t"] + [f"q{i + 1}" for i in range(d_m)]
    write_csv(path, header, ((ts[i], *qs[i]) for i in range(len(ts))))
    l0 = int(np.argmax(q0))
    return RunResult("schmidt", params, [path], [f"largest initial coefficient: q{l0 + 1}"])


SCHMIDT_DEFAULTS = {
    "d_m": 10,
    "gamma_eta": 1.0,
    "m": 3,
    "t_end": 40.0,
    "n_samples": 400,
    "seed": 1,
    "rtol": 1e-9,
    "atol": 1e-11,
}


def _bloch_product_state(ka, kb) -> DensityMatrix:
    from .engine import SIGMA_X, SIGMA_Y, SIGMA_Z

    def qubit(k):
        if np.linalg.norm(k) >= 1.0:
            raise ConfigError("initial Bloch vectors must have norm < 1 (mixed state)")
        return 0.5 * (np.eye(2, dtype=complex) + k[0] * SIGMA_X + k[1] * SIGMA_Y + k[2] * SIGMA_Z)

    return DensityMatrix.product([qubit(ka), qubit(kb)])


def _run_bell(params: dict, outdir: str) -> RunResult:
    bp = BellModelParams(
        omega_B=params["omega_B"], beta=params["beta"],
        gamma_D=params["gamma_D"], gamma_H=params["gamma_H"],
    )
    model = bell_model(bp, log_floor=params["log_floor"])
    rho0 = _bloch_product_state(
        (params["kax0"], params["kay0"], params["kaz0"]),
        (params["kbx0"], params["kby0"], params["kbz0"]),
    )
    thermal = ThermalConfig(beta=params["beta"], log_floor=params["log_floor"])
    probes = [
        BlochVectorProbe(0, "ka"),
        BlochVectorProbe(1, "kb"),
        PurityProbe(),
        TauProbe(),
        ExpectationProbe("PB", P_BELL),
        FreeEnergyProbe(model.hamiltonian, thermal),
    ]
    traj = integrate(
        rho0, model, params["t_end"], n_samples=params["n_samples"],
        rtol=params["rtol"], atol=params["atol"], probes=probes,
    )
    path = os.path.join(outdir, "bell_traj.csv")
    header = ["t", "kax", "kay", "kaz", "kbx", "kby", "kbz", "purity", "tau", "PB", "UH"]
    cols = [traj.columns[h] for h in header[1:]]
    write_csv(path, header, ((traj.times[i], *(c[i] for c in cols)) for i in range(len(traj.times))))
    return RunResult("bell", params, [path],
                     [f"max |Tr rho - 1| = {traj.diagnostics.max_trace_dev:.3e}"])


BELL_DEFAULTS = {
    "omega_B": 1.0,
    "beta": 10.0,
    "gamma_D": 0.05,
    "gamma_H": 0.005,
    "kax0": 0.7, "kay0": 0.0, "kaz0": 0.2,
    "kbx0": -0.5, "kby0": 0.4, "kbz0": -0.6,
    "t_end": 2000.0,
    "n_samples": 4000,
    "log_floor": 1e-12,
    "seed": 1,
    "rtol": 1e-8,
    "atol": 1e-10,
}


def _run_trunc(params: dict, outdir: str) -> RunResult:
    w = np.array([params["wEx"], params["wEy"], params["wEz"]])
    norm = float(np.linalg.norm(w))
    if norm == 0:
        raise ConfigError("omega_E must be nonzero")
    beta = params["beta_omega_E"] / norm
    tp = TruncationParams(
        omega_E=tuple(w), omega_s=params["omega_s_beta"] / beta if beta > 0 else 0.0,
        beta=beta, gamma_D=params["gamma_D"], gamma_H=params["gamma_H"],
    )
    k0 = np.array([params["kx0"], params["ky0"], params["kz0"]])
    if np.linalg.norm(k0) > 1.0:
        raise ConfigError("initial Bloch vector must have norm <= 1")
    ts, ks = integrate_trunc(
        k0, tp, params["t_end"], n_samples=params["n_samples"],
        rtol=params["rtol"], atol=params["atol"],
    )
    path = os.path.join(outdir, "trunc_traj.csv")
    write_csv(path, ["t", "kx", "ky", "kz"], ((ts[i], *ks[i]) for i in range(len(ts))))
    return RunResult("trunc", params, [path], [])


TRUNC_DEFAULTS = {
    "gamma_D": 1.0,
    "gamma_H": 1.0,
    "wEx": 100.0, "wEy": 100.0, "wEz": 100.0,
    "beta_omega_E": 1.0,
    "omega_s_beta": 50.0,  # omega_s in units of 1/beta; only sets outer-level phase
    "kx0": 0.54, "ky0": -0.54, "kz0": 0.27,
    "t_end": 8.0,
    "n_samples": 4000,
    "seed": 1,
    "rtol": 1e-9,
    "atol": 1e-12,
}


def _run_mfa(params: dict, outdir: str) -> RunResult:
    mp = MfaParams.from_lindblad(
        omega_a=params["omega_a"], Delta=params["Delta"], omega_1=params["omega_1"],
        g=params["g"],
        gamma_1a=params["Gamma1a"], gamma_phia=params["Gammaphia"], n_0a=params["n0a"],
        gamma_1b=params["Gamma1b"], gamma_phib=params["Gammaphib"], n_0b=params["n0b"],
    )
    outputs, notes = [], []
    state0 = decoupled_start(mp, kick=params["kick"])
    if params["mode"] == "single":
        ts, ys = integrate_mfa(
            state0, mp, params["t_end"], n_samples=params["n_samples"],
            rtol=params["rtol"], atol=params["atol"],
        )
        path = os.path.join(outdir, "mfa_traj.csv")
        write_csv(path, ["t", "kax", "kay", "kaz", "kbx", "kby", "kbz"],
                  ((ts[i], *ys[i]) for i in range(len(ts))))
        outputs.append(path)
        verdict = detect_limit_cycle(
            ts, ys, settle_fraction=params["settle_fraction"], tol=params["cycle_tol"]
        )
        vpath = os.path.join(outdir, "mfa_verdict.csv")
        write_verdict_csv(vpath, [(mp.Delta, mp.g, verdict)])
        outputs.append(vpath)
        notes.append(f"steady-state verdict: {verdict}")
        if params["require_verdict"] and verdict.kind == "undecided":
            raise VerdictUndecided(f"steady-state classification undecided: {verdict}")
    elif params["mode"] == "scan":
        deltas = np.linspace(params["scan_delta_min"], params["scan_delta_max"],
                             params["scan_delta_count"])
        rows = detuning_scan(
            mp, deltas, policy=params["scan_policy"], t_end=params["t_end"],
            n_samples=params["n_samples"], settle_fraction=params["settle_fraction"],
            tol=params["cycle_tol"],
        )
        path = os.path.join(outdir, "mfa_scan.csv")
        write_verdict_csv(path, rows)
        outputs.append(path)
        notes.extend(f"Delta={d:+.6g}: {v}" for d, _, v in rows)
        if params["require_verdict"] and any(v.kind == "undecided" for _, _, v in rows):
            raise VerdictUndecided("one or more scan points undecided")
    else:
        raise ConfigError(f"mode must be 'single' or 'scan', got {params['mode']!r}")
    return RunResult("mfa", params, outputs, notes)


def write_verdict_csv(path: str, rows) -> None:
    lines = ["Delta,g,verdict,period,amplitude"]
    for delta, g, verdict in rows:
        period = "" if verdict.period is None else _fmt(verdict.period)
        amplitude = "" if verdict.amplitude is None else _fmt(verdict.amplitude)
        lines.append(f"{_fmt(delta)},{_fmt(g)},{verdict.kind},{period},{amplitude}")
    atomic_write(path, "\n".join(lines) + "\n")


MFA_DEFAULTS = {
    "omega_a": 1.0,
    "Delta": float(np.sin(np.pi / 8)),
    "omega_1": float(np.cos(np.pi / 8)),
    "g": 0.1,
    "Gamma1a": 1e-2, "Gammaphia": 1e-3, "n0a": 0.005,
    "Gamma1b": 1e-1, "Gammaphib": 1e-2, "n0b": 1e-4,
    "kick": 0.02,
    "t_end": 3000.0,
    "n_samples": 6000,
    "settle_fraction": 0.5,
    "cycle_tol": 1e-3,
    "require_verdict": True,
    "mode": "single",
    "scan_policy": "fixed_omega1",
    "scan_delta_min": -0.5,
    "scan_delta_max": 0.5,
    "scan_delta_count": 5,
    "seed": 1,
    "rtol": 1e-8,
    "atol": 1e-10,
}


def _run_bloch_svd(params: dict, outdir: str) -> RunResult:
    rng = np.random.default_rng(params["seed"])
    dims = (params["d_a"], params["d_b"])
    rho0 = random_mixed_state(rng, dims)
    theta = ThetaSpec(gamma_D=params["gamma_D"], entanglement=(EntanglementConfig(),))
    model = MmeModel(np.zeros((rho0.dim, rho0.dim)), theta)
    probes = [PurityProbe(), TauProbe(), BlochSingularValueProbe()]
    traj = integrate(
        rho0, model, params["t_end"], n_samples=params["n_samples"],
        rtol=params["rtol"], atol=params["atol"], probes=probes,
    )
    path = os.path.join(outdir, "bloch_svd.csv")
    sv_names = [n for n in traj.columns if n.startswith("sv")]
    header = ["t", "purity", "tau"] + sv_names
    cols = [traj.columns[h] for h in header[1:]]
    write_csv(path, header, ((traj.times[i], *(c[i] for c in cols)) for i in range(len(traj.times))))
    return RunResult("bloch-svd", params, [path],
                     [f"final tau = {traj.columns['tau'][-1]:.3e}",
                      f"max |Tr rho - 1| = {traj.diagnostics.max_trace_dev:.3e}"])


BLOCH_SVD_DEFAULTS = {
    "d_a": 3,
    "d_b": 4,
    "gamma_D": 1.0,
    "t_end": 400.0,
    "n_samples": 800,
    "seed": 1,
    "rtol": 1e-8,
    "atol": 1e-12,
}


SCENARIOS = {
    "schmidt": (SCHMIDT_DEFAULTS, _run_schmidt),
    "bell": (BELL_DEFAULTS, _run_bell),
    "trunc": (TRUNC_DEFAULTS, _run_trunc),
    "mfa": (MFA_DEFAULTS, _run_mfa),
    "bloch-svd": (BLOCH_SVD_DEFAULTS, _run_bloch_svd),
}


def run_scenario(name: str, overrides: dict[str, str], outdir: str) -> RunResult:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    defaults, runner = SCENARIOS[name]
    params = resolve_params(name, defaults, overrides)
    os.makedirs(outdir, exist_ok=True)
    result = runner(params, outdir)
    meta = os.path.join(outdir, "run.meta")
    write_meta(meta, name, params, extra_comments=result.notes)
    result.outputs.append(meta)
    return result
