use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crosscov::compare::{compare, CompareConfig, Comparison};
use crosscov::detection::{detect_outliers, DetectionReport};
use crosscov::edges::{closed_form, edges, find_edges_numeric, limit_regime, EdgeMode, Regime, ADVISORY_LARGE};
use crosscov::ensemble::{block_size_for_budget, memory_estimate, run_ensemble, EnsembleConfig, EnsembleResult};
use crosscov::spectral::{delta_mass, Variable};
use crosscov::spectral::{AspectRatios, ProblemShape, Representation, SpectralBand, ZeroMass};
use crosscov::stieltjes::{density_curve, density_curve_for_shape, CurveOptions};

use crate::format::{g12, nums, write_csv, write_json};
use crate::manifest::RunManifest;
use crate::{
    Command, CompareArgs, DensityArgs, DetectArgs, EdgesArgs, EnsembleArgs, Format, InputArgs, Mode, OutputArgs, Rep,
    ShapeArgs, SimulateArgs,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] crosscov::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        fn core(e: &crosscov::Error) -> u8 {
            match e {
                crosscov::Error::InvalidParameter { .. } => 2,
                crosscov::Error::MemoryBudget { .. } => 4,
                crosscov::Error::Realization { source, .. } => core(source),
                _ => 3,
            }
        }
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Core(e) => core(e),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Density(a) => density(a),
        Command::Edges(a) => edges_cmd(a),
        Command::Simulate(a) => simulate(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Detect(a) => detect(a),
        Command::Replay(a) => replay(a),
    }
}

/// Pulls the manifest out of a JSON document or a CSV `# manifest:` line.
pub fn read_manifest(text: &str) -> Result<RunManifest> {
    let bad = |e: serde_json::Error| CliError::Usage(format!("unreadable manifest: {e}"));
    if let Some(rest) = text.strip_prefix("# manifest: ") {
        let line = rest.lines().next().unwrap_or_default();
        return serde_json::from_str(line).map_err(bad);
    }
    #[derive(serde::Deserialize)]
    struct Doc {
        manifest: RunManifest,
    }
    Ok(serde_json::from_str::<Doc>(text).map_err(bad)?.manifest)
}

fn replay(a: crate::ReplayArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.from)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.from.display())))?;
    let manifest = read_manifest(&text)?;
    if manifest.command == "replay" {
        return Err(CliError::Usage("a replay manifest cannot be replayed".into()));
    }
    let mut argv = vec!["crosscov".to_string()];
    argv.extend(manifest.to_args());
    if let Some(out) = &a.output {
        argv.push("--output".into());
        argv.push(out.display().to_string());
    }
    let cli = <crate::Cli as clap::Parser>::try_parse_from(&argv)
        .map_err(|e| CliError::Usage(format!("manifest does not form a valid command: {e}")))?;
    run(cli.command)
}

enum Input {
    Ratios(AspectRatios),
    Shape(ProblemShape),
}

impl Input {
    fn ratios(&self) -> AspectRatios {
        match self {
            Input::Ratios(r) => *r,
            Input::Shape(s) => s.to_ratios(),
        }
    }
}

fn resolve_input(a: &InputArgs, m: &mut RunManifest) -> Result<Input> {
    match (a.px, a.py, a.t, a.nx, a.ny) {
        (Some(px), Some(py), None, None, None) => {
            m.px = Some(px);
            m.py = Some(py);
            Ok(Input::Ratios(AspectRatios::new(px, py)?))
        }
        (None, None, Some(t), Some(nx), Some(ny)) => {
            let sx = a.sigma_x.unwrap_or(1.0);
            let sy = a.sigma_y.unwrap_or(1.0);
            let shape = ProblemShape::new(t, nx, ny, sx, sy)?;
            record_shape(m, &shape);
            Ok(Input::Shape(shape))
        }
        _ => Err(CliError::Usage(
            "give either --px and --py, or --t, --nx and --ny".into(),
        )),
    }
}

fn record_shape(m: &mut RunManifest, s: &ProblemShape) {
    m.t = Some(s.t);
    m.nx = Some(s.nx);
    m.ny = Some(s.ny);
    m.sigma_x = Some(s.sigma_x);
    m.sigma_y = Some(s.sigma_y);
}

fn shape_of(a: &ShapeArgs, m: &mut RunManifest) -> Result<ProblemShape> {
    let shape = ProblemShape::new(a.t, a.nx, a.ny, a.sigma_x, a.sigma_y)?;
    record_shape(m, &shape);
    Ok(shape)
}

fn edge_mode(mode: Mode) -> EdgeMode {
    match mode {
        Mode::Numeric => EdgeMode::Numeric,
        Mode::AutoLimit => EdgeMode::AutoLimit,
    }
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Numeric => "numeric",
        Mode::AutoLimit => "auto_limit",
    }
}

fn representation(rep: Rep) -> (Representation, &'static str) {
    match rep {
        Rep::Ctc => (Representation::CtC, "ctc"),
        Rep::Cct => (Representation::CCt, "cct"),
        Rep::H => (Representation::H, "h"),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit<T: Serialize>(
    out: &OutputArgs,
    format: Format,
    manifest: &RunManifest,
    body: &T,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = open_output(out.output.as_deref())?;
    match format {
        Format::Csv => write_csv(&mut w, manifest, header, rows)?,
        Format::Json => write_json(&mut w, manifest, body)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DensityBody<'a> {
    /// Support in the output variable.
    band: SpectralBand,
    zero_mass: f64,
    eta_abs: f64,
    negative_points: usize,
    gamma: &'a [f64],
    density: &'a [f64],
}

fn density(a: DensityArgs) -> Result<()> {
    let format = a.out.format.unwrap_or(Format::Csv);
    let mut m = RunManifest::new("density", format.name());
    let input = resolve_input(&a.input, &mut m)?;
    let (rep, rep_name) = representation(a.representation);
    m.representation = Some(rep_name.into());
    m.grid_points = Some(a.grid_points);
    m.eta = Some(a.eta);
    m.scaled = a.out.scaled;
    m.regime = Some(Regime::Numeric.label().into());
    let options = CurveOptions {
        grid_points: a.grid_points,
        eta: a.eta,
        variable: Variable::SingularValue,
        scaled: a.out.scaled,
    };
    let tc = match &input {
        Input::Ratios(r) => density_curve(*r, rep, &options)?,
        Input::Shape(s) => density_curve_for_shape(s, rep, &options)?,
    };
    if tc.negative_points > 0 {
        log::warn!(
            "{} grid points had negative raw density and were clipped",
            tc.negative_points
        );
    }
    let factor = if a.out.scaled {
        input.ratios().scale_factor()
    } else {
        1.0
    };
    let curve = &tc.curve;
    let body = DensityBody {
        band: tc.band.scaled(factor),
        zero_mass: curve.zero_mass,
        eta_abs: tc.eta_abs,
        negative_points: tc.negative_points,
        gamma: &curve.abscissa,
        density: &curve.density,
    };
    let rows = curve.abscissa.iter().zip(&curve.density).map(|(&g, &d)| nums(&[g, d]));
    emit(&a.out, format, &m, &body, &["gamma", "density"], rows)
}

#[derive(Serialize)]
struct EdgeRow {
    regime: &'static str,
    formula: &'static str,
    lower: f64,
    upper: f64,
    /// Relative to the numeric edge; absent when that edge is zero.
    rel_gap_lower: Option<f64>,
    rel_gap_upper: f64,
    in_advisory_range: bool,
}

#[derive(Serialize)]
struct EdgesBody {
    px: f64,
    py: f64,
    variable: Variable,
    scale_factor: f64,
    selected: EdgeRow,
    numeric: EdgeRow,
    closed_forms: Vec<EdgeRow>,
}

/// Closed forms whose expressions are defined at these ratios.
fn applicable_forms(r: AspectRatios) -> Vec<Regime> {
    let (hi, lo) = (r.larger(), r.smaller());
    let mut out = Vec::new();
    if r.is_equal() {
        out.push(Regime::EqualRatio);
        if 2.0 * hi < 1.0 {
            out.push(Regime::TinyEqual);
        }
        if hi > 1.0 {
            out.push(Regime::OversampledLimit);
        }
    } else {
        out.push(Regime::Disparate);
        if hi + lo < 1.0 {
            out.push(Regime::BothTiny);
        }
    }
    out
}

fn edges_cmd(a: EdgesArgs) -> Result<()> {
    let format = a.out.format.unwrap_or(Format::Json);
    let mut m = RunManifest::new("edges", format.name());
    let input = resolve_input(&a.input, &mut m)?;
    let r = input.ratios();
    let mode = edge_mode(a.mode);
    m.mode = Some(mode_name(a.mode).into());
    m.scaled = a.out.scaled;

    let factor = if a.out.scaled { r.scale_factor() } else { 1.0 };
    let numeric = find_edges_numeric(r)?.to_singular();
    let advisory = limit_regime(r);
    let row = |regime: Regime, band: SpectralBand| EdgeRow {
        regime: regime.label(),
        formula: regime.formula(),
        lower: band.lower * factor,
        upper: band.upper * factor,
        rel_gap_lower: (numeric.lower > 0.0).then(|| band.lower / numeric.lower - 1.0),
        rel_gap_upper: band.upper / numeric.upper - 1.0,
        in_advisory_range: match regime {
            Regime::Numeric | Regime::EqualRatio => true,
            Regime::OversampledLimit => r.larger() > ADVISORY_LARGE,
            other => advisory == Some(other),
        },
    };
    let closed_forms = applicable_forms(r)
        .into_iter()
        .map(|regime| Ok(row(regime, closed_form(r, regime)?)))
        .collect::<Result<Vec<_>>>()?;
    let report = edges(r, mode)?;
    m.regime = Some(report.regime.label().into());
    let body = EdgesBody {
        px: r.px(),
        py: r.py(),
        variable: Variable::SingularValue,
        scale_factor: r.scale_factor(),
        selected: row(report.regime, report.band),
        numeric: row(Regime::Numeric, numeric),
        closed_forms,
    };
    let mut table = vec![&body.numeric];
    table.extend(&body.closed_forms);
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|e| {
            vec![
                e.regime.to_string(),
                g12(e.lower),
                g12(e.upper),
                e.rel_gap_lower.map_or_else(String::new, g12),
                g12(e.rel_gap_upper),
                e.in_advisory_range.to_string(),
            ]
        })
        .collect();
    emit(
        &a.out,
        format,
        &m,
        &body,
        &[
            "regime",
            "lower",
            "upper",
            "rel_gap_lower",
            "rel_gap_upper",
            "in_advisory_range",
        ],
        rows,
    )
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("CROSSCOV_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!(
                "CROSSCOV_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Picks the block size and configures the worker pool. The block size
/// depends only on the shape and budget, never on the worker count, so
/// results do not change with `CROSSCOV_THREADS`; the budget is met by
/// running fewer realizations at once instead.
fn plan_resources(t: usize, e: &EnsembleArgs) -> Result<usize> {
    let mut threads =
        threads_from_env()?.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut block = e.block_size;
    if let Some(budget) = e.max_mem {
        block = block_size_for_budget(t, e.block_size, 1, budget)?;
        let per_worker = memory_estimate(t, block);
        let fit = (budget / per_worker).max(1);
        if fit < threads {
            log::info!("memory budget allows {fit} concurrent realizations");
            threads = fit;
        }
        if block < e.block_size {
            log::info!("block size reduced to {block} to fit the memory budget");
        }
    }
    // Fails only if a pool already exists, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(block)
}

fn ensemble_config(
    shape: ProblemShape,
    e: &EnsembleArgs,
    scaled: bool,
    block_size: usize,
    m: &mut RunManifest,
) -> EnsembleConfig {
    let mut cfg = EnsembleConfig::new(shape, e.realizations, e.seed);
    cfg.bins = e.bins;
    cfg.scale_by_sqrt_pxpy = scaled;
    cfg.block_size = block_size;
    m.realizations = Some(e.realizations);
    m.seed = Some(e.seed);
    m.bins = Some(e.bins);
    m.block_size = Some(block_size);
    m.scaled = scaled;
    m.regime = Some(Regime::Numeric.label().into());
    cfg
}

fn histogram_rows(res: &EnsembleResult, extra: Option<&[f64]>) -> Vec<Vec<String>> {
    (0..res.counts.len())
        .map(|i| {
            let mut row = nums(&[res.bin_edges[i], res.bin_edges[i + 1], res.histogram.density[i]]);
            row.push(res.counts[i].to_string());
            if let Some(x) = extra {
                row.push(g12(x[i]));
            }
            row
        })
        .collect()
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let format = a.out.format.unwrap_or(Format::Csv);
    let mut m = RunManifest::new("simulate", format.name());
    let shape = shape_of(&a.shape, &mut m)?;
    let block = plan_resources(shape.t, &a.ensemble)?;
    let mut cfg = ensemble_config(shape, &a.ensemble, a.out.scaled, block, &mut m);
    cfg.keep_sample = a.values_out.is_some();
    m.values_out = a.values_out.as_ref().map(|p| p.display().to_string());
    let res = run_ensemble(&cfg)?;

    if let (Some(path), Some(sample)) = (&a.values_out, &res.sample) {
        let factor = if a.out.scaled {
            shape.to_ratios().scale_factor()
        } else {
            1.0
        };
        let mut w = BufWriter::new(File::create(path)?);
        for v in sample {
            writeln!(w, "{}", g12(v * factor))?;
        }
        w.flush()?;
    }
    let rows = histogram_rows(&res, None);
    emit(
        &a.out,
        format,
        &m,
        &res,
        &["bin_lo", "bin_hi", "density", "count"],
        rows,
    )
}

#[derive(Serialize)]
struct CompareBody<'a> {
    verdict: &'static str,
    comparison: &'a Comparison,
    ensemble: &'a EnsembleResult,
}

fn compare_cmd(a: CompareArgs) -> Result<()> {
    let format = a.out.format.unwrap_or(Format::Json);
    let mut m = RunManifest::new("compare", format.name());
    let shape = shape_of(&a.shape, &mut m)?;
    let block = plan_resources(shape.t, &a.ensemble)?;
    let ens = ensemble_config(shape, &a.ensemble, a.out.scaled, block, &mut m);
    let theory = match (a.theory_px, a.theory_py) {
        (Some(px), Some(py)) => Some(AspectRatios::new(px, py)?),
        _ => None,
    };
    m.theory_px = a.theory_px;
    m.theory_py = a.theory_py;
    m.grid_points = Some(a.grid_points);
    m.eta = Some(a.eta);
    m.tol = Some(a.tol);
    let cfg = CompareConfig {
        ensemble: ens,
        theory,
        grid_points: a.grid_points,
        eta: a.eta,
        tol: a.tol,
    };
    let (res, cmp) = compare(&cfg)?;
    let body = CompareBody {
        verdict: if cmp.pass { "pass" } else { "fail" },
        comparison: &cmp,
        ensemble: &res,
    };
    let rows = histogram_rows(&res, Some(&cmp.theory_histogram));
    emit(
        &a.out,
        format,
        &m,
        &body,
        &["bin_lo", "bin_hi", "density", "count", "theory"],
        rows,
    )
}

/// Parses comma- or newline-separated nonnegative reals. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let v: f64 = token
                .parse()
                .map_err(|_| CliError::Usage(format!("line {}: `{token}` is not a number", i + 1)))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(CliError::Usage(format!(
                    "line {}: `{token}` is not a finite nonnegative value",
                    i + 1
                )));
            }
            out.push(v);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct DetectBody<'a> {
    observed: usize,
    zero_modes: ZeroMass,
    report: &'a DetectionReport,
}

fn detect(a: DetectArgs) -> Result<()> {
    let format = a.out.format.unwrap_or(Format::Json);
    let mut m = RunManifest::new("detect", format.name());
    let shape = shape_of(&a.shape, &mut m)?;
    let mut text = String::new();
    if a.values == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(&a.values)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.values)))?
            .read_to_string(&mut text)?;
    }
    let values = parse_values(&text)?;
    m.values = Some(a.values.clone());
    m.margin = Some(a.margin);
    m.mode = Some(mode_name(a.mode).into());
    m.scaled = a.out.scaled;
    let report = detect_outliers(&values, &shape, a.margin, edge_mode(a.mode), a.out.scaled)?;
    m.regime = Some(report.regime.label().into());
    let body = DetectBody {
        observed: values.len(),
        zero_modes: delta_mass(&shape, Representation::CtC),
        report: &report,
    };
    let rows = report.outliers_above.iter().map(|o| {
        let mut row = vec![o.index.to_string()];
        row.extend(nums(&[o.value, o.ratio]));
        row
    });
    emit(&a.out, format, &m, &body, &["index", "value", "ratio"], rows)
}
