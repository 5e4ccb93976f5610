"""Command-line front end: model inspection, analysis, plots, verification."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import aircraft, criteria, pipeline, svgplot
from .criteria import CRITERIA
from .errors import CgMarginError

FIGURES = ("nyquist_smallgain", "nyquist_circle", "nyquist_posreal", "popov")


def _parse_complex_list(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(complex(tok.strip()) for tok in value.split(",") if tok.strip())
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers: {exc}")


def _common_options(fn):
    opts = [
        click.option(
            "--model",
            "model_path",
            type=click.Path(exists=True, dir_okay=False, path_type=Path),
            default=None,
            help="Model-definition file (default: bundled aircraft data).",
        ),
        click.option("--kq", type=float, default=pipeline.DEFAULT_KQ,
                     show_default=True, help="Inner-loop pitch-rate gain."),
        click.option("--kalpha", type=float, default=pipeline.DEFAULT_KALPHA,
                     show_default=True, help="Inner-loop angle-of-attack gain."),
        click.option("--controller-zeros", callback=_parse_complex_list,
                     default=None, help="Controller zeros, comma separated."),
        click.option("--controller-poles", callback=_parse_complex_list,
                     default=None, help="Controller poles, comma separated."),
        click.option("--controller-gain", type=float, default=None,
                     help="Controller gain."),
        click.option("--wmin", type=float, default=1e-4, show_default=True),
        click.option("--wmax", type=float, default=1e4, show_default=True),
        click.option("--npoints", type=int, default=4000, show_default=True),
        click.option("--stability-margin", type=float, default=0.0,
                     show_default=True,
                     help="Eigenvalue real-part margin for the stability predicate."),
        click.option("--optimize-center/--midpoint-center", "optimize_center",
                     default=True, show_default=True,
                     help="Circle criterion center: smallest enclosing circle "
                          "vs midpoint of the extreme real parts."),
        click.option("--out", "out_dir",
                     type=click.Path(file_okay=False, path_type=Path),
                     default=Path("cgmargin_out"), show_default=True),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _make_config(criteria_names=CRITERIA, **kw) -> pipeline.AnalysisConfig:
    zeros = kw["controller_zeros"] or pipeline.DEFAULT_CONTROLLER_ZEROS
    poles = kw["controller_poles"] or pipeline.DEFAULT_CONTROLLER_POLES
    gain = kw["controller_gain"]
    if gain is None:
        gain = pipeline.DEFAULT_CONTROLLER_GAIN
    try:
        return pipeline.AnalysisConfig(
            model_path=kw["model_path"],
            controller_zeros=zeros,
            controller_poles=poles,
            controller_gain=gain,
            kq=kw["kq"],
            kalpha=kw["kalpha"],
            wmin=kw["wmin"],
            wmax=kw["wmax"],
            npoints=kw["npoints"],
            criteria=tuple(criteria_names),
            stability_margin=kw["stability_margin"],
            circle_center="optimal" if kw["optimize_center"] else "midpoint",
        )
    except ValueError as exc:
        raise click.ClickException(str(exc))


def _build_session(config) -> pipeline.AnalysisSession:
    try:
        return pipeline.build_session(config)
    except CgMarginError as exc:
        raise click.ClickException(str(exc))


@click.group()
def main():
    """Robust stability bounds for an aircraft with uncertain c.g. location."""


@main.command("model")
@_common_options
def cmd_model(out_dir: Path, **kw):
    """Print the model matrices and write a machine-readable dump."""
    config = _make_config(**kw)
    session = _build_session(config)
    dump = pipeline.format_model_dump(session)
    click.echo(dump)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "model_dump.txt").write_text(dump)
    (out_dir / "model_echo.cfg").write_text(
        aircraft.format_model_text(session.fc, session.dl)
    )
    click.echo(f"wrote {out_dir / 'model_dump.txt'} and {out_dir / 'model_echo.cfg'}")


@main.command("analyze")
@click.option(
    "--criteria",
    "criteria_list",
    default=",".join(CRITERIA),
    show_default=True,
    help="Comma-separated subset of: " + ", ".join(CRITERIA),
)
@click.option("--n-verify", type=int, default=50, show_default=True,
              help="Interior stability samples per interval.")
@_common_options
def cmd_analyze(criteria_list: str, n_verify: int, out_dir: Path, **kw):
    """Compute stability bounds and render the report table.

    Exit code 0 only if every produced interval passes interior-stability
    verification.
    """
    names = tuple(tok.replace("smallgain", "small_gain")
                  .replace("posreal", "positive_real")
                  for tok in (t.strip() for t in criteria_list.split(","))
                  if tok)
    config = _make_config(criteria_names=names, **kw)
    config.n_verify = n_verify
    session = _build_session(config)
    result = pipeline.run_analysis(config, session=session)
    table = pipeline.format_report_table(result.intervals)
    click.echo(table)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(table)
    (out_dir / "report.csv").write_text(pipeline.format_report_csv(result.intervals))
    click.echo(f"wrote {out_dir / 'report.txt'} and {out_dir / 'report.csv'}")
    for name, report in result.reports.items():
        status = "ok" if report.passed else "FAILED"
        click.echo(f"verify {name}: {status} ({report.n_checked} interior samples)")
    if not result.all_sound:
        sys.exit(1)


@main.command("plot")
@click.argument("figure", type=click.Choice(FIGURES))
@click.option("--format", "fmt", type=click.Choice(["csv", "svg", "both"]),
              default="both", show_default=True)
@_common_options
def cmd_plot(figure: str, fmt: str, out_dir: Path, **kw):
    """Emit locus data (CSV) and a rendered figure (SVG)."""
    config = _make_config(**kw)
    session = _build_session(config)
    rows, title, xlabel, ylabel, equal = _figure_rows(session, config, figure)
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt in ("csv", "both"):
        path = out_dir / f"locus_{figure}.csv"
        path.write_text(svgplot.rows_to_csv(rows))
        click.echo(f"wrote {path}")
    if fmt in ("svg", "both"):
        path = out_dir / f"fig_{figure}.svg"
        path.write_text(
            svgplot.render_svg(rows, title, xlabel, ylabel, equal_aspect=equal)
        )
        click.echo(f"wrote {path}")


def _figure_rows(session, config, figure: str):
    s = session.summary
    if figure == "popov":
        samples = [
            ("sample", w, v.real, oy)
            for w, v, oy in zip(s.omegas, s.values, s.popov_ordinate)
        ]
    else:
        samples = [
            ("sample", w, v.real, v.imag) for w, v in zip(s.omegas, s.values)
        ]
    if figure == "nyquist_smallgain":
        iv = criteria.small_gain_bounds(s)
        r = iv.witnesses["r_sg"]
        rows = samples + [
            ("circle", 0.0, r, 0.0),
            ("marker", r, 0.0, 0.0),
            ("marker", -r, 0.0, 0.0),
        ]
        return rows, "Small gain criterion", "Re M(jω)", "Im M(jω)", True
    if figure == "nyquist_circle":
        iv = criteria.circle_bounds(s, center=config.circle_center)
        xc, rc = iv.witnesses["x_c"], iv.witnesses["r_c"]
        rows = samples + [
            ("circle", xc, rc, 0.0),
            ("marker", xc + rc, 0.0, 0.0),
            ("marker", xc - rc, 0.0, 0.0),
        ]
        return rows, "Circle criterion", "Re M(jω)", "Im M(jω)", True
    if figure == "nyquist_posreal":
        iv = criteria.positive_real_bounds(s)
        xmax, xmin = iv.witnesses["x_max"], iv.witnesses["x_min"]
        rows = samples + [
            ("vline", xmax, 0.0, 0.0),
            ("vline", xmin, 0.0, 0.0),
            ("marker", xmax, 0.0, 0.0),
            ("marker", xmin, 0.0, 0.0),
        ]
        return rows, "Positive real criterion", "Re M(jω)", "Im M(jω)", True
    # popov
    iv = criteria.popov_bounds(s)
    w = iv.witnesses
    rows = samples + [
        ("line", w["q_plus"], w["c_plus"], 0.0),
        ("line", w["q_minus"], w["c_minus"], 0.0),
        ("marker", w["c_plus"], 0.0, 0.0),
        ("marker", w["c_minus"], 0.0, 0.0),
    ]
    return rows, "Popov criterion", "Re M(jω)", "ω Im M(jω)", False


@main.command("verify")
@click.option("--n-samples", type=int, default=100, show_default=True)
@click.option(
    "--results",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Re-verify intervals from a previously written report.csv.",
)
@_common_options
def cmd_verify(n_samples: int, results: Path, out_dir: Path, **kw):
    """Interior-stability audit of every criterion interval."""
    config = _make_config(**kw)
    session = _build_session(config)
    if results is not None:
        intervals = pipeline.parse_report_csv(results.read_text())
    else:
        result = pipeline.run_analysis(config, session=session)
        intervals = result.intervals
    any_failed = False
    for name in CRITERIA:
        if name not in intervals:
            continue
        iv = intervals[name]
        if iv.lower_unbounded or iv.upper_unbounded:
            click.echo(f"{name:<14} SKIP (unbounded side)")
            continue
        report = criteria.verify_interval(
            session.model, iv, n_samples, margin=config.stability_margin
        )
        status = "PASS" if report.passed else "FAIL"
        detail = ""
        if report.failures:
            d, mr = report.failures[0]
            detail = f"  first failure at delta={d:.6g} (max Re eig {mr:.3e})"
        click.echo(f"{name:<14} {status} ({report.n_checked} samples){detail}")
        any_failed = any_failed or not report.passed
    if any_failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
