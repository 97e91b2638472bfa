"""Command-line interface.

Exit codes: 0 success (and certified); 1 a certification ran cleanly but the
verdict is NOT_CERTIFIED; 2 parse errors and unsupported modes; 3 validation
and numerical-consistency failures; 4 unknown catalog name.

Artifacts are deterministic: rerunning a command on the same input produces
byte-identical JSON/CSV files (wall-clock timings are reported on stderr
only and never serialized).
"""
from __future__ import annotations

import functools
import json
import os
import re
import sys

import click
import numpy as np

from . import __version__
from ._serialize import (
    canonical_dumps,
    ensure_dir,
    fmt_float,
    matrix_csv_rows,
    matrix_to_lists,
    write_csv,
    write_json,
)
from .bundle import (
    BundleVector,
    induced_orbit_tensor,
    induced_reparam_operator,
    ricci_asymptotic_lower,
    ricci_ht_lower,
    sectional_lower,
)
from .catalog import CATALOG, catalog_names, load_scenario
from .certify import (
    certify as run_certify,
    coords_to_vector,
    frame_dim,
    sweep as run_sweep,
)
from .cheeger import ct_vertical_matrix
from .errors import (
    CertificationError,
    MalformedInputError,
    NumericalError,
    ScenarioValidationError,
    UnknownScenarioError,
    UnsupportedModeError,
)
from .lie_core import validate_algebra

SCHEMA_VERSION = 1

LOWER_BOUND = "LOWER-BOUND"
EXACT = "EXACT"


def _err(message) -> None:
    click.echo(f"error: {message}", err=True)


def _guarded(fn):
    """Map library exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            code = fn(*args, **kwargs) or 0
        except UnsupportedModeError as exc:
            _err(exc)
            code = 2
        except json.JSONDecodeError as exc:
            _err(f"parse error: {exc}")
            code = 2
        except UnknownScenarioError as exc:
            _err(exc)
            code = 4
        except ScenarioValidationError as exc:
            _err(f"validation error: {exc}")
            for p in exc.paths:
                click.echo(f"  at {p}", err=True)
            code = 3
        except (MalformedInputError, NumericalError, CertificationError) as exc:
            _err(exc)
            code = 3
        except OSError as exc:
            _err(exc)
            code = 2
        sys.exit(code)

    return wrapper


def _output_options(fn):
    fn = click.option(
        "--out",
        type=click.Path(file_okay=False),
        default=None,
        help="directory for artifacts (default: print JSON to stdout)",
    )(fn)
    fn = click.option(
        "--format",
        "fmt",
        type=click.Choice(["json", "csv", "both"]),
        default="both",
        show_default=True,
        help="artifact formats to write under --out",
    )(fn)
    return fn


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "-", name)


def _emit(payload: dict, csv_spec, out: str | None, fmt: str, stem: str) -> None:
    """Write artifacts (or print canonical JSON when no --out is given)."""
    payload = {"schema_version": SCHEMA_VERSION, **payload}
    if out is None:
        click.echo(canonical_dumps(payload), nl=False)
        return
    ensure_dir(out)
    written = []
    if fmt in ("json", "both"):
        path = os.path.join(out, stem + ".json")
        write_json(path, payload)
        written.append(path)
    if fmt in ("csv", "both") and csv_spec is not None:
        header, rows = csv_spec
        path = os.path.join(out, stem + ".csv")
        write_csv(path, header, rows)
        written.append(path)
    for path in written:
        click.echo(f"wrote {path}")


def _parse_grid(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    if not parts:
        raise click.UsageError("the time grid is empty")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise click.UsageError(f"could not parse time grid {text!r}") from None


def _parse_vector(text: str, bundle, flag: str) -> BundleVector:
    parts = [p.strip() for p in text.split(",") if p.strip() != ""]
    try:
        coords = np.array([float(p) for p in parts], dtype=float)
    except ValueError:
        raise click.UsageError(
            f"could not parse {flag} coordinates {text!r}"
        ) from None
    return coords_to_vector(bundle, coords)


@click.group()
@click.version_option(version=__version__, prog_name="curvforge")
def main() -> None:
    """Deform invariant metrics, bound their curvature, certify positivity.

    SCENARIO arguments accept a built-in name (see ``curvforge catalog``) or
    a path to a scenario JSON file.
    """


@main.command("catalog")
@_guarded
def catalog_cmd() -> int:
    """List the built-in scenarios."""
    width = max(len(n) for n in catalog_names())
    for entry in CATALOG.values():
        click.echo(f"{entry.name:<{width}}  {entry.description}")
    return 0


@main.command("validate")
@click.argument("scenario")
@_output_options
@click.option(
    "--tol",
    type=float,
    default=1e-10,
    show_default=True,
    help="residual tolerance for the algebra checks",
)
@_guarded
def validate_cmd(scenario: str, out, fmt: str, tol: float) -> int:
    """Check a scenario's algebraic consistency and report residuals."""
    s = load_scenario(scenario)
    report = validate_algebra(s.bundle.algebra, tol=tol)
    b = s.bundle
    payload = {
        "command": "validate",
        "scenario": s.name,
        "ok": report.ok,
        "capabilities": sorted(s.capabilities),
        "dims": {
            "algebra": b.algebra_dim,
            "fiber_vertical": b.fiber_vertical_dim,
            "p_horizontal": b.p_horizontal_dim,
            "f_horizontal": b.f_horizontal_dim,
        },
        "checks": [
            {
                "name": item.name,
                "passed": bool(item.passed),
                "residual": float(item.residual),
                "worst_index": list(item.worst_index),
            }
            for item in report.items
        ],
    }
    csv_rows = [
        [item.name, str(bool(item.passed)).lower(), fmt_float(item.residual)]
        for item in report.items
    ]
    _emit(
        payload,
        (["check", "passed", "residual"], csv_rows),
        out,
        fmt,
        f"validate-{_slug(s.name)}",
    )
    return 0 if report.ok else 3


@main.command("deform")
@click.argument("scenario")
@click.option(
    "--t",
    "t_text",
    default="0,1",
    show_default=True,
    help="comma-separated deformation times",
)
@_output_options
@_guarded
def deform_cmd(scenario: str, t_text: str, out, fmt: str) -> int:
    """Tabulate the deformed tensors P_t, C_t, ptilde_t, ctilde_t."""
    s = load_scenario(scenario)
    B = s.bundle
    grid = _parse_grid(t_text)
    rows = []
    csv_rows: list[list[str]] = []
    for t in grid:
        state = B.state_P(t)
        ptilde = induced_orbit_tensor(B, t)
        ctilde = induced_reparam_operator(B, t)
        ct = ct_vertical_matrix(state)
        rows.append(
            {
                "t": t,
                "P_t": matrix_to_lists(state.matrix),
                "C_t_vertical": matrix_to_lists(ct),
                "ptilde": matrix_to_lists(ptilde),
                "ctilde": matrix_to_lists(ctilde),
                "eigenvalues_P": matrix_to_lists(state.eigenvalues),
            }
        )
        for name, mat in (
            ("P_t", state.matrix),
            ("C_t_vertical", ct),
            ("ptilde", ptilde),
            ("ctilde", ctilde),
            ("eigenvalues_P", state.eigenvalues.reshape(-1, 1)),
        ):
            csv_rows.extend(matrix_csv_rows(t, name, mat))
    payload = {"command": "deform", "scenario": s.name, "rows": rows}
    _emit(
        payload,
        (["t", "block", "i", "j", "value"], csv_rows),
        out,
        fmt,
        f"deform-{_slug(s.name)}",
    )
    return 0


@main.command("curvature")
@click.argument("scenario")
@click.option(
    "--t",
    "t_text",
    default="0,1",
    show_default=True,
    help="comma-separated deformation times",
)
@click.option(
    "--mode",
    type=click.Choice(["lower", "exact"]),
    default="lower",
    show_default=True,
    help="plane-curvature evaluation mode",
)
@click.option(
    "--x",
    "x_text",
    required=True,
    help="comma-separated product-frame coordinates [X | X_F | U]",
)
@click.option(
    "--y",
    "y_text",
    default=None,
    help="second plane vector; omit to get the Ricci lower bound of --x",
)
@_output_options
@_guarded
def curvature_cmd(
    scenario: str, t_text: str, mode: str, x_text: str, y_text, out, fmt: str
) -> int:
    """Evaluate plane curvature (with --y) or the Ricci bound (without)."""
    s = load_scenario(scenario)
    B = s.bundle
    grid = _parse_grid(t_text)
    if mode == "exact" and not s.exact_available:
        raise UnsupportedModeError(
            f"scenario {s.name!r} does not declare the exact_kappa "
            "capability; use --mode lower"
        )
    x = _parse_vector(x_text, B, "--x")
    payload: dict = {
        "command": "curvature",
        "scenario": s.name,
        "mode": mode,
        "x": matrix_to_lists(np.concatenate([x.X, x.X_F, x.U])),
    }
    if y_text is not None:
        y = _parse_vector(y_text, B, "--y")
        values = [
            {"t": t, "value": sectional_lower(B, t, x, y, mode=mode)}
            for t in grid
        ]
        payload.update(
            {
                "kind": "sectional",
                "y": matrix_to_lists(np.concatenate([y.X, y.X_F, y.U])),
                "bound": EXACT if mode == "exact" else LOWER_BOUND,
                "rows": values,
            }
        )
        csv_rows = [[fmt_float(r["t"]), fmt_float(r["value"])] for r in values]
    else:
        if mode == "exact":
            raise UnsupportedModeError(
                "exact mode applies to plane curvature (--y) only; the Ricci "
                "aggregate is always a certified lower bound"
            )
        values = [{"t": t, "value": ricci_ht_lower(B, t, x)} for t in grid]
        payload.update(
            {
                "kind": "ricci",
                "bound": LOWER_BOUND,
                "rows": values,
                "asymptotic": {"value": ricci_asymptotic_lower(B, x)},
            }
        )
        csv_rows = [[fmt_float(r["t"]), fmt_float(r["value"])] for r in values]
        csv_rows.append(
            ["asymptotic", fmt_float(payload["asymptotic"]["value"])]
        )
    _emit(
        payload,
        (["t", "value"], csv_rows),
        out,
        fmt,
        f"curvature-{payload['kind']}-{_slug(s.name)}",
    )
    return 0


@main.command("sweep")
@click.argument("scenario")
@click.option(
    "--t",
    "t_text",
    default="0,0.5,1,2,4,8,16,32,64,128",
    show_default=True,
    help="strictly ascending comma-separated deformation times",
)
@click.option(
    "--threads",
    type=int,
    default=None,
    help="worker threads (default: CURVFORGE_THREADS or one per core)",
)
@_output_options
@_guarded
def sweep_cmd(scenario: str, t_text: str, threads, out, fmt: str) -> int:
    """Tabulate the Ricci lower-bound minimum over a time grid."""
    s = load_scenario(scenario)
    B = s.bundle
    grid = _parse_grid(t_text)
    result = run_sweep(B, grid, threads=threads)
    cert = result.certificate
    n = frame_dim(B)
    json_rows = [
        {
            "t": row.t,
            "min_ricci_lower": row.min_lower,
            "residual_deformation": row.residual_deformation,
            "residual_reparam": row.residual_reparam,
            "witness": matrix_to_lists(row.witness),
        }
        for row in result.rows
    ]
    payload = {
        "command": "sweep",
        "scenario": s.name,
        "bound": LOWER_BOUND,
        "rows": json_rows,
        "asymptotic": {
            "verdict": cert.verdict,
            "min": cert.asymptotic_min,
            "r_P": cert.r_P,
            "r_F": cert.r_F,
            "C": cert.C,
            "witness": matrix_to_lists(cert.witness)
            if cert.witness is not None
            else None,
        },
    }
    header = [
        "t",
        "min_ricci_lower",
        "residual_deformation",
        "residual_reparam",
    ] + [f"witness_{i}" for i in range(n)]
    csv_rows = [
        [
            fmt_float(row.t),
            fmt_float(row.min_lower),
            fmt_float(row.residual_deformation),
            fmt_float(row.residual_reparam),
        ]
        + [fmt_float(w) for w in row.witness]
        for row in result.rows
    ]
    asym_cells = [
        "asymptotic",
        "" if cert.asymptotic_min is None else fmt_float(cert.asymptotic_min),
        "",
        "",
    ]
    asym_cells += (
        [fmt_float(w) for w in cert.witness]
        if cert.witness is not None
        else [""] * n
    )
    csv_rows.append(asym_cells)
    for row in result.rows:
        click.echo(f"t={row.t:g}: {row.wall_time_s * 1e3:.2f} ms", err=True)
    _emit(payload, (header, csv_rows), out, fmt, f"sweep-{_slug(s.name)}")
    return 0


@main.command("certify")
@click.argument("scenario")
@click.option(
    "--t-max",
    type=float,
    default=1e6,
    show_default=True,
    help="largest deformation time tried in the threshold search",
)
@click.option(
    "--tol",
    type=float,
    default=1e-3,
    show_default=True,
    help="relative precision of the threshold search",
)
@click.option(
    "--asymptotic-tol",
    type=float,
    default=1e-10,
    show_default=True,
    help="strict-positivity margin for the limiting constants",
)
@_output_options
@_guarded
def certify_cmd(
    scenario: str, t_max: float, tol: float, asymptotic_tol: float, out, fmt: str
) -> int:
    """Certify Ricci positivity of the deformed metrics."""
    s = load_scenario(scenario)
    cert = run_certify(s.bundle, t_max=t_max, t_tol=tol, tol=asymptotic_tol)
    payload = {
        "command": "certify",
        "scenario": s.name,
        "verdict": cert.verdict,
        "r_P": cert.r_P,
        "r_F": cert.r_F,
        "C": cert.C,
        "asymptotic_min": cert.asymptotic_min,
        "min_t": cert.min_t,
        "min_at_t": cert.min_at_t,
        "witness": matrix_to_lists(cert.witness)
        if cert.witness is not None
        else None,
        "reasons": list(cert.reasons),
        "notes": list(cert.notes),
        "tol": cert.tol,
    }
    csv_rows = [
        ["verdict", cert.verdict],
        ["r_P", "" if cert.r_P is None else fmt_float(cert.r_P)],
        ["r_F", "" if cert.r_F is None else fmt_float(cert.r_F)],
        ["C", "" if cert.C is None else fmt_float(cert.C)],
        [
            "asymptotic_min",
            "" if cert.asymptotic_min is None else fmt_float(cert.asymptotic_min),
        ],
        ["min_t", "" if cert.min_t is None else fmt_float(cert.min_t)],
        ["min_at_t", "" if cert.min_at_t is None else fmt_float(cert.min_at_t)],
        ["tol", fmt_float(cert.tol)],
    ]
    _emit(payload, (["key", "value"], csv_rows), out, fmt, f"certify-{_slug(s.name)}")
    if out is not None:
        click.echo(f"{s.name}: {cert.verdict}")
        for reason in cert.reasons:
            click.echo(f"  reason: {reason}")
    return 0 if cert.certified else 1


if __name__ == "__main__":
    main()
