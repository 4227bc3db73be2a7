//! `carpetlab` command-line front end. [`run`] does all the work so tests can
//! drive it in-process; the binary only forwards `argv` and the exit code.

mod plot;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use carpetlab_core::classify::{class_membership, compare, CompareConfig};
use carpetlab_core::geometry::{
    box_count, component_stats, render_pieces, render_svg, scaled_mass, square_components,
    BasicRectangle, GeometryError, PieceKind, RenderOptions,
};
use carpetlab_core::measure::{gamma_table, MeasureError};
use carpetlab_core::spectrum::{alpha_range, dimensions, spectrum_curve, SpectrumError};
use carpetlab_core::{Carpet, CarpetSpec, Digit, SpecError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "carpetlab", version, about = "Lipschitz invariants of Bedford-McMullen carpets")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Working precision in bits for real-valued quantities.
    #[arg(long, global = true, env = "CARPETLAB_PRECISION", default_value_t = 256)]
    pub precision: usize,
    /// Largest rank accepted by `components` and `render`.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_rank: u64,
    /// Cap on the number of pieces any enumeration may produce.
    #[arg(long, global = true, default_value_t = 5_000_000)]
    pub budget: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// SVG pixels per rank-1 cell.
    #[arg(long, global = true, default_value_t = 24)]
    pub cell_px: u32,
    /// Omit the rank-1 grid from SVG output.
    #[arg(long, global = true)]
    pub no_grid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Tilde,
    Square,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single-carpet report: profile, classes, dimensions, alpha range.
    Analyze { file: PathBuf },
    /// Runs the invariant battery on two carpets.
    Compare { first: PathBuf, second: PathBuf },
    /// Samples the multifractal spectrum.
    Spectrum {
        file: PathBuf,
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Also plot (alpha, h) to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Connected components of the rank-K approximation.
    Components {
        file: PathBuf,
        #[arg(long)]
        rank: u64,
        #[arg(long, value_enum, default_value_t = Kind::Tilde)]
        kind: Kind,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Mesh-box count of the rank-Q cover at delta = n^-Q.
    Boxcount {
        file: PathBuf,
        #[arg(long)]
        depth: u64,
        /// Restrict to a basic rectangle given as digits, e.g. `1:1,3:4`.
        #[arg(long)]
        rect: Option<String>,
    },
    /// Table of gamma_k and its p-adic valuation.
    Gamma {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 10)]
        kmax: u64,
        #[arg(long)]
        prime: u64,
    },
    /// Draws the rank-K approximation as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        rank: u64,
        #[arg(long)]
        out: PathBuf,
        /// Colour connected components.
        #[arg(long)]
        components: bool,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files; exit 1.
    Invalid { kind: &'static str, message: String },
    /// An enumeration would exceed the budget; exit 2.
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } => 1,
            CliError::Budget(_) => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Invalid { kind, message } => (*kind, message.as_str()),
            CliError::Budget(message) => ("budget_exceeded", message.as_str()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

fn invalid(kind: &'static str, message: impl ToString) -> CliError {
    CliError::Invalid {
        kind,
        message: message.to_string(),
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        invalid("invalid_carpet", e)
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => invalid("geometry", other),
        }
    }
}

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        invalid("spectrum", e)
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        invalid("measure", e)
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

/// Parses `argv` (program name first) and runs one command.
pub fn run<I, T>(argv: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = Output {
        code: 0,
        stdout: Vec::new(),
        stderr: Vec::new(),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            out.stdout = e.render().to_string().into_bytes();
            return out;
        }
        Err(e) => {
            let err = invalid("usage", e.render().to_string().trim_end());
            return fail(out, &err);
        }
    };
    match execute(&cli) {
        Ok(value) => {
            out.stdout = render(&value, cli.config.format).into_bytes();
            out
        }
        Err(err) => fail(out, &err),
    }
}

fn fail(mut out: Output, err: &CliError) -> Output {
    out.code = err.exit_code();
    let mut text = serde_json::to_string_pretty(&err.to_json()).expect("error documents serialize");
    text.push('\n');
    out.stderr = text.into_bytes();
    out
}

fn render(value: &Value, format: Format) -> String {
    let mut text = match format {
        Format::Json => serde_json::to_string_pretty(value).expect("reports serialize"),
        Format::Text => {
            let mut lines = Vec::new();
            flatten("", value, &mut lines);
            lines.join("\n")
        }
    };
    text.push('\n');
    text
}

/// `path = value` lines, objects in key order.
fn flatten(prefix: &str, value: &Value, lines: &mut Vec<String>) {
    let join = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&join(k), v, lines)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&join(&i.to_string()), v, lines)),
        Value::String(s) => lines.push(format!("{prefix} = {s}")),
        other => lines.push(format!("{prefix} = {other}")),
    }
}

fn load(path: &Path) -> Result<Carpet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid("io", format!("cannot read {}: {e}", path.display())))?;
    Ok(Carpet::new(CarpetSpec::from_json(&text)?))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(contents.as_bytes()))
        .map_err(|e| invalid("io", format!("cannot write {}: {e}", path.display())))
}

fn to_value(x: impl serde::Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn execute(cli: &Cli) -> Result<Value, CliError> {
    let cfg = &cli.config;
    if cfg.precision < 64 {
        return Err(invalid("config", format!("precision must be at least 64 bits, got {}", cfg.precision)));
    }
    if cfg.max_rank < 1 {
        return Err(invalid("config", "max-rank must be at least 1"));
    }
    let bits = cfg.precision;
    let check_rank = |k: u64| {
        if k > cfg.max_rank {
            Err(invalid("config", format!("rank {k} exceeds max-rank {}", cfg.max_rank)))
        } else {
            Ok(())
        }
    };
    let options = RenderOptions {
        cell_px: cfg.cell_px,
        show_grid: !cfg.no_grid,
        color_components: false,
    };

    match &cli.command {
        Command::Analyze { file } => {
            let c = load(file)?;
            let p = c.profile();
            let (lo, hi) = alpha_range(p, bits)?;
            Ok(json!({
                "carpet": to_value(c.spec().to_raw()),
                "profile": {
                    "n": p.n(),
                    "m": p.m(),
                    "distribution": p.distribution(),
                    "digit_count": p.digit_count(),
                    "occupied_count": p.occupied_count(),
                    "distinct_counts": p.distinct_counts(),
                    "multiplicities": p.multiplicities(),
                    "has_vacant_row": p.has_vacant_row(),
                    "sigma": to_value(p.sigma_class()),
                },
                "class_flags": to_value(class_membership(p)),
                "dimensions": to_value(dimensions(p, bits)?),
                "alpha_range": { "min": to_value(lo), "max": to_value(hi) },
                "doubling": p.is_doubling(),
                "regular": p.is_regular(),
                "precision_bits": bits,
            }))
        }
        Command::Compare { first, second } => {
            let (e, f) = (load(first)?, load(second)?);
            let report = compare(&e, &f, &CompareConfig { precision_bits: bits })?;
            let mut value = to_value(report);
            value["precision_bits"] = json!(bits);
            Ok(value)
        }
        Command::Spectrum { file, grid, svg } => {
            if *grid < 2 {
                return Err(invalid("config", "grid must be at least 2"));
            }
            let c = load(file)?;
            let curve = spectrum_curve(c.profile(), *grid, bits)?;
            if let Some(path) = svg {
                write_file(path, &plot::spectrum_svg(&curve))?;
            }
            Ok(to_value(curve))
        }
        Command::Components { file, rank, kind, svg } => {
            check_rank(*rank)?;
            let c = load(file)?;
            let kind = match kind {
                Kind::Tilde => PieceKind::TildeApprox,
                Kind::Square => PieceKind::SquareApprox,
            };
            let stats = component_stats(&c, *rank, kind, cfg.budget)?;
            let partition = carpetlab_core::geometry::components(&c, *rank, kind, cfg.budget)?;
            let mut sizes: Vec<usize> = partition.components().iter().map(Vec::len).collect();
            sizes.sort_unstable_by(|a, b| b.cmp(a));
            if let Some(path) = svg {
                let options = RenderOptions {
                    color_components: true,
                    ..options.clone()
                };
                let picture = match kind {
                    PieceKind::TildeApprox => render_svg(&c, *rank, &options, cfg.budget)?,
                    PieceKind::SquareApprox => {
                        let (pieces, partition) = square_components(&c, *rank, cfg.budget)?;
                        let cells: Vec<_> = pieces
                            .iter()
                            .zip(partition.labels())
                            .map(|(q, label)| {
                                let (x, y) = q.cell().ok_or(GeometryError::CoordinateOverflow { rank: *rank })?;
                                Ok((x, y, Some(label)))
                            })
                            .collect::<Result<_, GeometryError>>()?;
                        let grid = (
                            u128::from(c.spec().n()).pow(*rank as u32),
                            u128::from(c.spec().m()).pow(c.ell(*rank) as u32),
                        );
                        render_pieces(&c, &cells, grid, *rank, &options)
                    }
                };
                write_file(path, &picture)?;
            }
            Ok(json!({
                "rank": rank,
                "kind": to_value(kind),
                "pieces": partition.piece_count(),
                "components": partition.len(),
                "max_cardinality": partition.max_cardinality(),
                "component_sizes": sizes,
                "per_rank": to_value(stats),
            }))
        }
        Command::Boxcount { file, depth, rect } => {
            let c = load(file)?;
            let restrict = rect
                .as_deref()
                .map(|word| parse_rect(&c, word))
                .transpose()?;
            let b = box_count(&c, *depth, restrict.as_ref(), cfg.budget)?;
            let scaled = scaled_mass(&c, b.restrict_rank, *depth);
            let c2 = b.c2 as f64;
            let (lower, upper) = (scaled / c2, scaled * c2);
            let count = b.count as f64;
            let mut value = to_value(&b);
            value["counting"] = json!("cover");
            value["scaled_mass"] = json!(scaled.to_string());
            value["lower_bound"] = json!(lower.to_string());
            value["upper_bound"] = json!(upper.to_string());
            value["within_bounds"] = json!(lower <= count && count <= upper);
            Ok(value)
        }
        Command::Gamma { first, second, kmax, prime } => {
            let (e, f) = (load(first)?, load(second)?);
            let rows = gamma_table(*kmax, e.profile(), f.profile(), *prime)?;
            Ok(json!({ "prime": prime, "rows": to_value(rows) }))
        }
        Command::Render { file, rank, out, components } => {
            check_rank(*rank)?;
            let c = load(file)?;
            let options = RenderOptions {
                color_components: *components,
                ..options
            };
            let svg = render_svg(&c, *rank, &options, cfg.budget)?;
            write_file(out, &svg)?;
            Ok(json!({ "rank": rank, "bytes": svg.len(), "out": out.display().to_string() }))
        }
    }
}

/// `"i:j,i:j,..."`; the empty string is the rank-0 rectangle.
fn parse_rect(carpet: &Carpet, word: &str) -> Result<BasicRectangle, CliError> {
    let digits = word
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|d| {
            let (i, j) = d
                .split_once(':')
                .ok_or_else(|| invalid("usage", format!("digit {d:?} is not of the form i:j")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<u32>()
                    .map_err(|e| invalid("usage", format!("digit {d:?}: {e}")))
            };
            Ok((parse(i)?, parse(j)?))
        })
        .collect::<Result<Vec<Digit>, CliError>>()?;
    Ok(BasicRectangle::from_digits(carpet, &digits)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_words() {
        let c = Carpet::new(CarpetSpec::new(3, 2, [(0, 0), (2, 1)]).unwrap());
        assert_eq!(parse_rect(&c, "0:0, 2:1").unwrap().rank(), 2);
        assert_eq!(parse_rect(&c, "").unwrap().rank(), 0);
        assert!(parse_rect(&c, "1:1").is_err());
        assert!(parse_rect(&c, "x").is_err());
    }

    #[test]
    fn text_format_flattens() {
        let v = json!({ "b": [1, { "c": "x" }], "a": true });
        assert_eq!(render(&v, Format::Text), "a = true\nb.0 = 1\nb.1.c = x\n");
    }
}
