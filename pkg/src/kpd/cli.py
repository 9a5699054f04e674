"""Command-line interface: reproducible runs with machine-readable reports.

Subcommands map one-to-one onto the library modules:

    gram       Gram matrix + PD verdict at an explicit point set
    cnd        zero-sum distance-form test at an explicit configuration
    boundary   closed-form two-point boundary (optionally: violation search)
    witness    binomial witness, moment table, z^t coefficient, certificate
    identities exact combinatorial identity suite
    fracpow    fractional-power integral representation validation
    spectrum   Nystrom spectral probe at one (t, a)
    sweep      evidence sweep over weights a at fixed t
    verify     replay a stored certificate using kernel arithmetic only

Every run emits a JSON record {version, config, metadata, payload}; the
payload is a pure function of the config (seed included), so identical
configs produce byte-identical payloads.  Timestamps and wall time live
only in the metadata block.  Numeric payload values carry both a decimal
string at full working precision and a binary64 convenience field.
Negative/FAIL verdicts embed replayable certificates: points,
coefficients, and the value, checkable by ``kpd verify``.

Exit status: 0 for a completed analysis (a mathematical FAIL is still a
completed analysis), 2 for configuration errors, 3 for numerical
diagnostics or a failed certificate replay.  The environment variable
KPD_THREADS caps worker parallelism; the current implementation is
single-threaded, so any cap is trivially honored (it is echoed in the
metadata for reproducibility).
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np

from . import __version__
from .errors import KpdError
from .kernel import (
    KernelParams,
    PointConfig,
    abs_term_scale,
    gram_matrix,
    kernel_matrix,
    quadratic_form,
    resolve_form_sign,
)
from .definiteness import cnd_check, pd_check
from .boundary import boundary_report, find_schwarz_violation
from .witness import (
    build_binomial_witness,
    check_moments,
    difference_power_sum,
    find_negative_scale,
    predict_t_coefficient_sign,
    subset_product_identity,
    t_power_coefficient,
)
from .fracpow import validate_representation
from .spectral import (
    NEGATIVE_FOUND,
    build_scheme,
    cell_quadrature,
    min_operator_eigenvalue,
    nystrom_matrix,
    open_problem_sweep,
    sweep_rows,
)

SCHEMA_VERSION = 1
CSV_HEADER = ["t", "a", "level", "node_count", "L", "min_eigenvalue", "verdict"]
CERTIFICATE_KINDS = ("gram", "g", "f", "cnd")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; echoed verbatim into every record."""

    command: str
    params: dict
    seed: int = 0
    precision: int = 50
    tolerance: float = 1e-10
    output_path: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise KpdError(f"tolerance must be > 0, got {self.tolerance}")
        if self.precision < 15:
            raise KpdError(f"precision must be >= 15 digits, got {self.precision}")
        if self.format not in ("json", "csv"):
            raise KpdError(f"format must be json or csv, got {self.format!r}")

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "precision": self.precision,
            "tolerance": self.tolerance,
            "output_path": self.output_path,
            "format": self.format,
        }


@dataclass
class RunRecord:
    """A completed run: config echo, metadata, and the payload."""

    config: RunConfig
    payload: dict
    wall_ms: float
    timestamp: str
    threads: int | None = None
    version: str = field(default=__version__)

    def as_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config.as_dict(),
            "metadata": {
                "wall_ms": self.wall_ms,
                "timestamp": self.timestamp,
                "threads": self.threads,
            },
            "payload": self.payload,
        }

    def payload_json(self) -> str:
        return json.dumps(self.payload, sort_keys=True, separators=(",", ":"))

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2)


def _num(x, dps: int | None = None) -> dict:
    """Encode a number as {dec, f64}: full-precision decimal plus binary64."""
    if isinstance(x, mp.mpf):
        dec = mp.nstr(x, dps or int(mp.mp.dps), strip_zeros=False)
    elif isinstance(x, Fraction):
        dec = f"{x.numerator}/{x.denominator}"
    else:
        dec = repr(float(x))
    return {"dec": dec, "f64": float(x)}


def _dec(x, dps: int = 30) -> str:
    if isinstance(x, mp.mpf):
        return mp.nstr(x, dps, strip_zeros=False)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return repr(float(x))


def _certificate(kind: str, config: PointConfig, value, dps: int = 30, **extra) -> dict:
    cert = {
        "kind": kind,
        "points": [_dec(p, dps) for p in config.points],
        "coeffs": [_dec(c, dps) for c in config.coeffs],
        "value": _dec(value, dps),
    }
    cert.update(extra)
    return cert


def _verdict_dict(verdict) -> dict:
    return {
        "verdict": verdict.verdict,
        "statistic": _num(verdict.statistic),
        "tolerance": _num(verdict.tolerance),
        "boundary": verdict.boundary,
    }


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise KpdError(f"could not parse float list {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Command payload builders.  Each is a pure function of the RunConfig.


def _cmd_gram(cfg: RunConfig) -> dict:
    p = cfg.params
    params = KernelParams(t=p["t"], a=p["a"])
    points = _parse_floats(p["points"])
    coeffs = _parse_floats(p["coeffs"]) if p.get("coeffs") else (1.0,) * len(points)
    config = PointConfig(points, coeffs)
    gram = gram_matrix(params, config)
    verdict = pd_check(gram, tolerance=cfg.tolerance)
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(params.t),
        "a": _num(params.a),
        "points": [_num(x) for x in points],
        "entries": [[float(v) for v in row] for row in gram.entries],
        "entries_dec": [[repr(float(v)) for v in row] for row in gram.entries],
        "pd": _verdict_dict(verdict),
        "certificate": None,
    }
    if p.get("coeffs"):
        payload["quadratic_form"] = _num(quadratic_form(params, config))
    if verdict.failed and verdict.worst_config is not None:
        payload["certificate"] = _certificate(
            "gram", verdict.worst_config, verdict.statistic
        )
    return payload


def _cmd_cnd(cfg: RunConfig) -> dict:
    p = cfg.params
    params = KernelParams(t=p["t"], a=p["a"])
    config = PointConfig(_parse_floats(p["points"]), _parse_floats(p["coeffs"]))
    verdict = cnd_check(params, config, tolerance=cfg.tolerance)
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(params.t),
        "a": _num(params.a),
        "cnd": _verdict_dict(verdict),
        "form_value": _num(-verdict.statistic),
        "certificate": None,
    }
    if verdict.failed:
        payload["certificate"] = _certificate("cnd", config, -verdict.statistic)
    return payload


def _cmd_boundary(cfg: RunConfig) -> dict:
    p = cfg.params
    report = boundary_report(p["t"])
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(report.t),
        "z_tangent": _num(report.z_tangent),
        "a_threshold": _num(report.a_threshold),
        "violation": None,
    }
    if p.get("a") is not None:
        result = find_schwarz_violation(p["t"], p["a"])
        violation = {
            "found": result.found,
            "scan": {
                "lo": _num(result.scan_lo),
                "hi": _num(result.scan_hi),
                "points": result.scan_points,
                "min_g": _num(result.scan_min_g),
                "argmin_z": _num(result.scan_argmin_z),
            },
        }
        if result.found:
            violation["z"] = _num(result.z)
            violation["g_value"] = _num(result.g_value)
            violation["min_eigenvalue"] = _num(result.min_eigenvalue)
            violation["certificate"] = _certificate(
                "g", result.config, result.g_value, z=_dec(result.z)
            )
        payload["violation"] = violation
    return payload


def _cmd_witness(cfg: RunConfig) -> dict:
    p = cfg.params
    params = KernelParams(t=p["t"], a=p["a"])
    order = p.get("order")
    if order is None:
        order = int(math.floor(params.t))
    w = build_binomial_witness(order)
    moments = check_moments(w, max(order, int(math.floor(params.t))))
    kappa = t_power_coefficient(params, w, dps=cfg.precision)
    sign = predict_t_coefficient_sign(params.t)
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(params.t),
        "a": _num(params.a),
        "witness": {
            "n": w.n,
            "moment_order": w.moment_order,
            "y": [_dec(v) for v in w.y],
            "c": [_dec(v) for v in w.c],
        },
        "moments": [_dec(m) for m in moments],
        "t_power_coefficient": _num(kappa, dps=cfg.precision),
        "predicted_sign": sign,
        "certificate": None,
    }
    if kappa < 0:
        cert = find_negative_scale(params, w, dps_start=cfg.precision)
        payload["negativity"] = "certified"
        payload["certificate"] = _certificate(
            "f",
            cert.config,
            cert.f_value,
            dps=cert.dps,
            z=repr(cert.z),
            q_value=_dec(cert.q_value, cert.dps),
            dps_used=cert.dps,
        )
    else:
        # Even integer part: the coefficient is nonnegative and this route
        # draws no conclusion about definiteness.
        payload["negativity"] = "inconclusive"
    return payload


def _cmd_identities(cfg: RunConfig) -> dict:
    p = cfg.params
    n_max = p.get("n_max", 3)
    m_max = p.get("m_max", 3)
    samples = p.get("samples", 3)
    rng = np.random.default_rng(cfg.seed)
    subset_cases = 0
    subset_failures = []
    for n in range(1, n_max + 1):
        for m in range(0, min(m_max, n * n - 1) + 1):
            for _ in range(samples):
                y = [
                    Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 10)))
                    for _ in range(n)
                ]
                for j in range(n):
                    for k in range(n):
                        lhs, rhs = subset_product_identity(n, m, j, k, y)
                        subset_cases += 1
                        if lhs != rhs:
                            subset_failures.append(
                                {"n": n, "m": m, "j": j, "k": k, "y": [str(v) for v in y]}
                            )
    diff_cases = 0
    diff_failures = []
    for order in range(0, p.get("t_max", 6) + 1):
        w = build_binomial_witness(order)
        for v in range(order + 1):
            diff_cases += 1
            if difference_power_sum(v, w) != 0:
                diff_failures.append({"order": order, "v": v})
    moment_cases = 0
    moment_failures = []
    for order in range(0, p.get("moment_max", 12) + 1):
        w = build_binomial_witness(order)
        for ell, m_val in enumerate(check_moments(w, order)):
            moment_cases += 1
            if m_val != 0:
                moment_failures.append({"order": order, "ell": ell})
    return {
        "schema": SCHEMA_VERSION,
        "subset_identity": {"cases": subset_cases, "failures": subset_failures},
        "difference_power_sums": {"cases": diff_cases, "failures": diff_failures},
        "moments": {"cases": moment_cases, "failures": moment_failures},
        "all_passed": not (subset_failures or diff_failures or moment_failures),
    }


def _cmd_fracpow(cfg: RunConfig) -> dict:
    p = cfg.params
    s_grid = p.get("s_grid") or (0.5, 1.5, 2.5, 3.7)
    w_grid = p.get("w_grid") or (0.1, 1.0, 4.0, 10.0, 1.0 + 1.0j)
    pairs = [(w, s) for s in s_grid for w in w_grid]
    report = validate_representation(pairs, tol=cfg.tolerance)
    entries = []
    for e in report.entries:
        entries.append(
            {
                "w": [e["w"].real, e["w"].imag],
                "s": e["s"],
                "rel_err": _num(e["rel_err"]),
                "derivative_rel_err": _num(e.get("derivative_rel_err", 0.0)),
                "l1_norm_upper": _num(e.get("l1_norm_upper", 0.0)),
                "l1_bound": _num(e.get("l1_bound", 0.0)),
            }
        )
    return {
        "schema": SCHEMA_VERSION,
        "tol": _num(cfg.tolerance),
        "entries": entries,
        "failures": [[repr(w), s, msg] for (w, s, msg) in report.failures],
        "passed": report.passed,
    }


def _report_dict(report) -> dict:
    out = {
        "levels": [
            {
                "level": i,
                "node_count": n,
                "L": L,
                "min_eigenvalue": _num(me),
            }
            for i, (n, L, me) in enumerate(report.levels)
        ],
        "smallest_eigenvalues": [_num(v) for v in report.smallest_eigenvalues],
        "verdict": report.verdict,
        "tail_bound": _num(report.tail_bound),
        "certificate": None,
    }
    if report.certificate is not None:
        out["certificate_value"] = _num(report.certificate.value)
        out["certificate_error_bound"] = _num(report.certificate.error_bound)
        out["certificate_conclusive"] = report.certificate.conclusive
    return out


def _spectral_point_certificate(params: KernelParams, node_count: int, half_width: float) -> dict:
    """Re-derive the refined direction as an explicit point/coefficient
    quadratic form so the record's certificate replays through kernel
    arithmetic alone."""
    scheme = build_scheme(node_count, half_width)
    matrix = nystrom_matrix(params, scheme)
    _, vecs = np.linalg.eigh(matrix)
    u = vecs[:, 0] / np.sqrt(scheme.weights)
    pts, wts = cell_quadrature(scheme, u, degree=4)
    config = PointConfig(tuple(float(x) for x in pts), tuple(float(v) for v in wts))
    value = float(wts @ kernel_matrix(params, pts, pts) @ wts)
    return _certificate("gram", config, value, dps=17, t=params.t, a=params.a)


def _cmd_spectrum(cfg: RunConfig) -> dict:
    p = cfg.params
    params = KernelParams(t=p["t"], a=p["a"])
    nodes = p.get("nodes") or (100, 200, 400)
    half_width = p.get("half_width", 20.0)
    ladder = [(n, half_width) for n in nodes]
    report = min_operator_eigenvalue(params, ladder)
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(params.t),
        "a": _num(params.a),
        **_report_dict(report),
    }
    if report.verdict == NEGATIVE_FOUND:
        payload["certificate"] = _spectral_point_certificate(
            params, *ladder[-1]
        )
    return payload


def _cmd_sweep(cfg: RunConfig) -> dict:
    p = cfg.params
    t = p.get("t", 2.0)
    a_grid = p.get("a_grid") or (1.0, 3.0, 6.0, 9.0, 12.0)
    nodes = p.get("nodes") or (100, 200, 400)
    half_width = p.get("half_width", 20.0)
    ladder = [(n, half_width) for n in nodes]
    results = open_problem_sweep(a_grid, ladder, t=t)
    rows = sweep_rows(results)
    payload = {
        "schema": SCHEMA_VERSION,
        "t": _num(t),
        "rows": [
            {
                "t": r["t"],
                "a": r["a"],
                "level": r["level"],
                "node_count": r["node_count"],
                "L": r["L"],
                "min_eigenvalue": _num(r["min_eigenvalue"]),
                "verdict": r["verdict"],
            }
            for r in rows
        ],
        "reports": [],
    }
    for entry in results:
        rec = {"a": entry["a"], "control": entry["control"], "certificate": None}
        if "error" in entry:
            rec["error"] = entry["error"]
        else:
            rec.update(_report_dict(entry["report"]))
            if entry["report"].verdict == NEGATIVE_FOUND:
                rec["certificate"] = _spectral_point_certificate(
                    KernelParams(t=t, a=entry["a"]), *ladder[-1]
                )
        payload["reports"].append(rec)
    return payload


_COMMANDS = {
    "gram": _cmd_gram,
    "cnd": _cmd_cnd,
    "boundary": _cmd_boundary,
    "witness": _cmd_witness,
    "identities": _cmd_identities,
    "fracpow": _cmd_fracpow,
    "spectrum": _cmd_spectrum,
    "sweep": _cmd_sweep,
}


def run(config: RunConfig) -> RunRecord:
    """Dispatch a validated config to its command and wrap the payload."""
    if config.command not in _COMMANDS:
        raise KpdError(f"unknown command {config.command!r}")
    start = time.perf_counter()
    with mp.workdps(max(config.precision, 15)):
        payload = _COMMANDS[config.command](config)
    wall_ms = (time.perf_counter() - start) * 1000.0
    threads = os.environ.get("KPD_THREADS")
    return RunRecord(
        config=config,
        payload=payload,
        wall_ms=wall_ms,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        threads=int(threads) if threads else None,
    )


# ---------------------------------------------------------------------------
# Certificate replay.


def _find_certificates(node, path="payload"):
    found = []
    if isinstance(node, dict):
        if node.get("kind") in CERTIFICATE_KINDS and "points" in node:
            found.append((path, node))
        else:
            for key, child in node.items():
                found.extend(_find_certificates(child, f"{path}.{key}"))
    elif isinstance(node, list):
        for i, child in enumerate(node):
            found.extend(_find_certificates(child, f"{path}[{i}]"))
    return found


def _replay_quadratic_form(params: KernelParams, config: PointConfig):
    """Float-first replay with noise gating; escalate to mpmath only when
    the float value cannot be distinguished from rounding noise."""
    value = quadratic_form(params, config)
    noise = 1e-13 * abs_term_scale(params, config)
    if abs(value) > noise:
        return value
    resolved, _ = resolve_form_sign(params, config, dps_start=50)
    return resolved


def _replay_cnd_form(params: KernelParams, config: PointConfig):
    from .definiteness import _cnd_form_mp

    return _cnd_form_mp(params, config, dps=50)


def verify_certificate(record_path: str) -> dict:
    """Re-evaluate every certificate stored in a run record.

    The stored quadratic form (kinds gram/f), distance-form value (cnd),
    or two-point margin configuration (g) is recomputed from the raw
    points and coefficients using kernel arithmetic only, and the sign is
    compared with the stored value.  Any disagreement is flagged loudly
    as MISMATCH; it would indicate a numerical bug, not a math result.
    """
    with open(record_path, "r", encoding="utf-8") as fh:
        record = json.load(fh)
    try:
        cmd_params = record["config"]["params"]
        payload = record["payload"]
    except (KeyError, TypeError) as exc:
        raise KpdError(f"record at {record_path} lacks config/payload: {exc}") from exc
    certificates = _find_certificates(payload)
    if not certificates:
        raise KpdError(f"no certificate payload found in {record_path}")

    results = []
    for path, cert in certificates:
        # certificate-level parameters win (sweep records carry one per a)
        t = cert.get("t", cmd_params.get("t"))
        a = cert.get("a", cmd_params.get("a"))
        if t is None or a is None:
            raise KpdError(f"certificate at {path} lacks kernel parameters")
        params = KernelParams(t=float(t), a=float(a))
        with mp.workdps(60):
            points = tuple(mp.mpf(p) for p in cert["points"])
            coeffs = tuple(mp.mpf(c) for c in cert["coeffs"])
            stored = mp.mpf(cert["value"])
        config = PointConfig(points, coeffs)
        if cert["kind"] == "cnd":
            replayed = _replay_cnd_form(params, config)
        else:
            replayed = _replay_quadratic_form(params, config)
        same_sign = (float(replayed) < 0) == (float(stored) < 0)
        results.append(
            {
                "path": path,
                "kind": cert["kind"],
                "stored_value": float(stored),
                "replayed_value": float(replayed),
                "verdict": "CONFIRMED" if same_sign else "MISMATCH",
            }
        )
    overall = "CONFIRMED" if all(r["verdict"] == "CONFIRMED" for r in results) else "MISMATCH"
    return {"record": record_path, "results": results, "verdict": overall}


# ---------------------------------------------------------------------------
# Argument parsing and entry point.


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (recorded)")
    common.add_argument(
        "--precision", type=int, default=50, help="working precision, decimal digits"
    )
    common.add_argument("--tol", type=float, default=1e-10, help="tolerance")
    common.add_argument("--out", type=str, default=None, help="output file path")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )

    parser = argparse.ArgumentParser(
        prog="kpd",
        description="positive-definiteness analysis of the anisotropic kernel family",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gram", parents=[common], help="Gram matrix + PD verdict")
    g.add_argument("--t", type=float, required=True)
    g.add_argument("--a", type=float, required=True)
    g.add_argument("--points", type=str, required=True, help="comma-separated")
    g.add_argument("--coeffs", type=str, default=None, help="comma-separated")

    c = sub.add_parser("cnd", parents=[common], help="zero-sum distance-form test")
    c.add_argument("--t", type=float, required=True)
    c.add_argument("--a", type=float, required=True)
    c.add_argument("--points", type=str, required=True)
    c.add_argument("--coeffs", type=str, required=True)

    b = sub.add_parser("boundary", parents=[common], help="two-point boundary")
    b.add_argument("--t", type=float, required=True)
    b.add_argument("--a", type=float, default=None, help="also search a violation")

    w = sub.add_parser("witness", parents=[common], help="vanishing-moment witness")
    w.add_argument("--t", type=float, required=True)
    w.add_argument("--a", type=float, required=True)
    w.add_argument("--order", type=int, default=None, help="moment order (default floor t)")

    i = sub.add_parser("identities", parents=[common], help="exact identity suite")
    i.add_argument("--n-max", type=int, default=3, dest="n_max")
    i.add_argument("--m-max", type=int, default=3, dest="m_max")
    i.add_argument("--samples", type=int, default=3)

    f = sub.add_parser("fracpow", parents=[common], help="integral representation checks")
    f.add_argument("--validate", action="store_true", help="run the validation grid")
    f.add_argument("--s-grid", type=str, default=None, dest="s_grid")
    f.add_argument("--w-grid", type=str, default=None, dest="w_grid")

    s = sub.add_parser("spectrum", parents=[common], help="Nystrom spectral probe")
    s.add_argument("--t", type=float, required=True)
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--nodes", type=str, default="100,200,400")
    s.add_argument("--half-width", type=float, default=20.0, dest="half_width")

    sw = sub.add_parser("sweep", parents=[common], help="weight sweep at fixed t")
    sw.add_argument("--t", type=float, default=2.0)
    sw.add_argument("--a-grid", type=str, default="1,3,6,9,12", dest="a_grid")
    sw.add_argument("--nodes", type=str, default="100,200,400")
    sw.add_argument("--half-width", type=float, default=20.0, dest="half_width")

    v = sub.add_parser("verify", parents=[common], help="replay a stored certificate")
    v.add_argument("record", type=str, help="path to a run record JSON")
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    params: dict = {}
    for key in (
        "t",
        "a",
        "points",
        "coeffs",
        "order",
        "n_max",
        "m_max",
        "samples",
        "validate",
        "half_width",
    ):
        if hasattr(args, key) and getattr(args, key) is not None:
            params[key] = getattr(args, key)
    for key in ("nodes", "a_grid", "s_grid", "w_grid"):
        if hasattr(args, key) and getattr(args, key) is not None:
            raw = getattr(args, key)
            params[key] = (
                tuple(int(float(v)) for v in raw.split(","))
                if key == "nodes"
                else tuple(float(v) for v in raw.split(","))
            )
    return RunConfig(
        command=args.command,
        params=params,
        seed=args.seed,
        precision=args.precision,
        tolerance=args.tol,
        output_path=args.out,
        format=args.format,
    )


def _emit_csv(record: RunRecord) -> str:
    rows = record.payload.get("rows")
    if rows is None:
        raise KpdError("CSV output is only defined for sweep evidence tables")
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [
                r["t"],
                r["a"],
                r["level"],
                r["node_count"],
                r["L"],
                r["min_eigenvalue"]["f64"],
                r["verdict"],
            ]
        )
    return buf.getvalue()


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "verify":
        try:
            outcome = verify_certificate(args.record)
        except (KpdError, OSError, json.JSONDecodeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 3
        for r in outcome["results"]:
            print(
                f"{r['path']}: kind={r['kind']} stored={r['stored_value']:.6e} "
                f"replayed={r['replayed_value']:.6e} -> {r['verdict']}"
            )
        print(outcome["verdict"])
        return 0 if outcome["verdict"] == "CONFIRMED" else 3

    try:
        config = _config_from_args(args)
    except KpdError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        record = run(config)
    except KpdError as exc:
        print(f"error [{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 3

    if config.format == "csv":
        try:
            text = _emit_csv(record)
        except KpdError as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return 2
    else:
        text = record.to_json()
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    print(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
