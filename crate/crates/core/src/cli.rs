//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 corrupt cache, 4 resource
//! guard, 5 mathematical precondition (rank-deficient series).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cache;
use crate::invariants::{self, Count, InvariantsError, JClass, RecursionTable};
use crate::series::{Point, PolySeries, SeriesError};
use crate::strata::{
    self, EnumerationConfig, GraphKind, Listing, StrataError, Stratum, StratumDimension,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CACHE: i32 = 3;
pub const EXIT_GUARD: i32 = 4;
pub const EXIT_MATH: i32 = 5;

/// Default upper bound for `nd --max`.
pub const DEFAULT_ND_CEILING: i64 = 200;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "jcount",
    version,
    about = "Exact counts of rational and fixed-j elliptic plane curves"
)]
pub struct Cli {
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Plain)]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rational curve counts N_1 ..= N_max.
    Nd {
        #[arg(long = "max", allow_negative_numbers = true)]
        max: i64,
        /// Recursion cache file, read if present and extended as needed.
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_ND_CEILING)]
        ceiling: i64,
    },
    /// Elliptic curve counts with fixed j-invariant, plus Z.T.
    Ed {
        #[arg(long = "d", allow_negative_numbers = true)]
        d: i64,
        /// generic, 0, 1728 or all.
        #[arg(long = "j", default_value = "all")]
        j: String,
    },
    /// Stable strata with dimensions, deformation bounds and survivor tags.
    Strata {
        #[arg(long = "d")]
        d: u32,
        #[arg(long = "max-extra", default_value_t = 2)]
        max_extra: usize,
        /// List every marked class instead of shapes with multiplicities.
        #[arg(long)]
        full: bool,
        /// Include graphs with one circuit.
        #[arg(long)]
        circuits: bool,
        #[arg(long = "survivors-only")]
        survivors_only: bool,
        #[arg(long, default_value_t = strata::DEFAULT_CEILING)]
        ceiling: u64,
    },
    /// Vanishing sequence and root-sum relation of a net read from JSON.
    Series {
        file: PathBuf,
        #[arg(long = "at-infinity", conflicts_with = "at")]
        at_infinity: bool,
        /// Finite point as "p/q".
        #[arg(long = "at", allow_hyphen_values = true)]
        at: Option<String>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<String, Failure>;

fn invariants_failure(e: InvariantsError) -> Failure {
    match e {
        InvariantsError::Inconsistent(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
        _ => Failure::new(EXIT_USAGE, e.to_string()),
    }
}

fn strata_failure(e: StrataError) -> Failure {
    match e {
        StrataError::TooManyVertices { .. } | StrataError::CeilingExceeded { .. } => {
            Failure::new(EXIT_GUARD, e.to_string())
        }
        StrataError::DegreeTooSmall(_) | StrataError::Invalid(_) => {
            Failure::new(EXIT_USAGE, e.to_string())
        }
        StrataError::Unstable => Failure::new(EXIT_INTERNAL, e.to_string()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

/// Columns separated by two spaces; those named in `left` are left-aligned,
/// the rest right-aligned.
fn aligned(header: &[&str], left: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let flush_left: Vec<bool> = header.iter().map(|h| left.contains(h)).collect();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let text = cells
            .zip(widths.iter().zip(&flush_left))
            .map(|(c, (w, l))| {
                if *l {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(
            &row.iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
    }
    out
}

fn cmd_nd(
    max: i64,
    cache_path: Option<PathBuf>,
    ceiling: i64,
    format: OutputFormat,
    err: &mut dyn Write,
) -> Outcome {
    if max < 1 || max > ceiling {
        return Err(Failure::new(
            EXIT_USAGE,
            format!("--max must lie in 1..={ceiling}, got {max}"),
        ));
    }
    let mut table = match &cache_path {
        Some(path) => match cache::load(path) {
            Ok(Some(t)) => {
                let _ = writeln!(
                    err,
                    "cache: loaded {} entries from {}",
                    t.max_degree(),
                    path.display()
                );
                t
            }
            Ok(None) => RecursionTable::new(),
            Err(cache::CacheError::Io(e)) => {
                return Err(Failure::new(EXIT_USAGE, format!("cannot read cache: {e}")))
            }
            Err(e) => return Err(Failure::new(EXIT_CACHE, e.to_string())),
        },
        None => RecursionTable::new(),
    };
    let before = table.max_degree();
    invariants::rational_count(max, &mut table).map_err(invariants_failure)?;
    if let Some(path) = &cache_path {
        if table.max_degree() > before {
            cache::save(path, &table)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot write cache: {e}")))?;
        }
    }

    let values = &table.values()[..max as usize];
    Ok(match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Row<'a> {
                d: usize,
                #[serde(rename = "N")]
                n: &'a Count,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                rows: Vec<Row<'a>>,
            }
            to_json(&Doc {
                rows: values
                    .iter()
                    .enumerate()
                    .map(|(i, n)| Row { d: i + 1, n })
                    .collect(),
            })
        }
        _ => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .enumerate()
                .map(|(i, n)| vec![(i + 1).to_string(), n.to_string()])
                .collect();
            if format == OutputFormat::Csv {
                csv(&["d", "N"], &rows)
            } else {
                aligned(&["d", "N_d"], &[], &rows)
            }
        }
    })
}

fn cmd_ed(d: i64, selector: &str, format: OutputFormat) -> Outcome {
    let classes: Vec<JClass> = match selector {
        "all" => JClass::ALL.to_vec(),
        other => vec![other
            .parse::<JClass>()
            .map_err(|e| Failure::new(EXIT_USAGE, e))?],
    };
    if d < 3 {
        return Err(Failure::new(
            EXIT_USAGE,
            format!("E_{{d,j}} is defined only for d >= 3, got d = {d}"),
        ));
    }
    let mut table = RecursionTable::new();
    let zt = invariants::zt_invariant(d, &mut table).map_err(invariants_failure)?;
    let values = classes
        .iter()
        .map(|&j| invariants::elliptic_count(d, j, &mut table).map(|e| (j, e)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(invariants_failure)?;

    Ok(match format {
        OutputFormat::Json if selector != "all" => {
            #[derive(Serialize)]
            struct Single<'a> {
                d: i64,
                j: &'static str,
                #[serde(rename = "E")]
                e: &'a Count,
            }
            let (j, e) = &values[0];
            to_json(&Single { d, j: j.label(), e })
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Entry<'a> {
                j: &'static str,
                #[serde(rename = "E")]
                e: &'a Count,
            }
            #[derive(Serialize)]
            struct All<'a> {
                d: i64,
                values: Vec<Entry<'a>>,
                #[serde(rename = "ZT")]
                zt: &'a Count,
            }
            to_json(&All {
                d,
                values: values
                    .iter()
                    .map(|(j, e)| Entry { j: j.label(), e })
                    .collect(),
                zt: &zt,
            })
        }
        OutputFormat::Csv => {
            let rows: Vec<Vec<String>> = values
                .iter()
                .map(|(j, e)| {
                    vec![
                        d.to_string(),
                        j.label().into(),
                        e.to_string(),
                        zt.to_string(),
                    ]
                })
                .collect();
            csv(&["d", "j", "E", "ZT"], &rows)
        }
        OutputFormat::Plain => {
            let mut rows: Vec<Vec<String>> = values
                .iter()
                .map(|(j, e)| vec![format!("E_{{{d},{}}}", j.label()), e.to_string()])
                .collect();
            rows.push(vec!["Z.T".into(), zt.to_string()]);
            aligned(&["quantity", "value"], &["quantity"], &rows)
        }
    })
}

#[derive(Serialize)]
struct StrataRow {
    kind: GraphKind,
    k: usize,
    e: u32,
    weights: Vec<u32>,
    legs: Vec<usize>,
    dim: StratumDimension,
    bound: StratumDimension,
    survivor: bool,
    note: &'static str,
    multiplicity: Count,
    shape: String,
}

#[derive(Serialize)]
struct StrataSummary {
    shapes: usize,
    classes: Count,
    single_tail: Count,
    survivors: usize,
}

fn strata_row<S: Stratum>(
    s: &S,
    threshold: i64,
    note: Option<&'static str>,
    multiplicity: Count,
    shape: String,
) -> Result<StrataRow, Failure> {
    let dim = s.dimension().map_err(strata_failure)?;
    let bound = s.deformation_bound().map_err(strata_failure)?;
    let survivor = bound.value().is_some_and(|b| b >= threshold);
    Ok(StrataRow {
        kind: s.kind(),
        k: s.extra_vertices(),
        e: s.core_weight(),
        weights: s.weights().to_vec(),
        legs: (0..s.vertex_count()).map(|v| s.leg_count(v)).collect(),
        dim,
        bound,
        survivor,
        note: note.unwrap_or(if survivor { "survivor" } else { "avoided" }),
        multiplicity,
        shape,
    })
}

fn join_nums<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_strata(
    d: u32,
    max_extra: usize,
    full: bool,
    circuits: bool,
    survivors_only: bool,
    ceiling: u64,
    format: OutputFormat,
) -> Outcome {
    let mut config = EnumerationConfig::new(d, max_extra).with_circuits(circuits);
    config.collapsed = !full;
    config.ceiling = ceiling;
    let threshold = 6 * i64::from(d) - 2;

    let mut rows = match strata::enumerate(&config).map_err(strata_failure)? {
        Listing::Collapsed(_) => {
            let report = strata::classify_survivors(&config).map_err(strata_failure)?;
            if let Some(bad) = report.mismatches().next() {
                return Err(Failure::new(
                    EXIT_INTERNAL,
                    format!(
                        "classification disagrees with the predicted survivor list at {}",
                        bad.shape.canonical_form()
                    ),
                ));
            }
            report
                .entries
                .iter()
                .map(|c| {
                    strata_row(
                        &c.shape,
                        threshold,
                        Some(c.note.label()),
                        c.shape.multiplicity().clone(),
                        c.shape.canonical_form().to_string(),
                    )
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        Listing::Full(classes) => classes
            .iter()
            .map(|c| strata_row(&c.graph, threshold, None, Count::one(), c.canonical.clone()))
            .collect::<Result<Vec<_>, _>>()?,
    };
    rows.sort_by(|a, b| (a.kind, a.k, a.e, &a.shape).cmp(&(b.kind, b.k, b.e, &b.shape)));

    let mut single_tail = Count::zero();
    let mut classes = Count::zero();
    for r in &rows {
        classes = Count::new(classes.into_inner() + r.multiplicity.value());
        if r.kind == GraphKind::Tree && r.k == 1 && r.e == 0 {
            single_tail = Count::new(single_tail.into_inner() + r.multiplicity.value());
        }
    }
    let summary = StrataSummary {
        shapes: rows.len(),
        classes,
        single_tail,
        survivors: rows.iter().filter(|r| r.survivor).count(),
    };
    if survivors_only {
        rows.retain(|r| r.survivor);
    }

    Ok(match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                d: u32,
                mode: &'static str,
                threshold: i64,
                rows: &'a [StrataRow],
                summary: &'a StrataSummary,
            }
            to_json(&Doc {
                d,
                mode: if full { "full" } else { "collapsed" },
                threshold,
                rows: &rows,
                summary: &summary,
            })
        }
        _ => {
            let header = [
                "kind",
                "k",
                "e",
                "weights",
                "legs",
                "dim",
                "bound",
                "survivor",
                "note",
                "multiplicity",
                "shape",
            ];
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.kind.to_string(),
                        r.k.to_string(),
                        r.e.to_string(),
                        join_nums(&r.weights),
                        join_nums(&r.legs),
                        r.dim.to_string(),
                        r.bound.to_string(),
                        r.survivor.to_string(),
                        r.note.to_string(),
                        r.multiplicity.to_string(),
                        r.shape.clone(),
                    ]
                })
                .collect();
            if format == OutputFormat::Csv {
                csv(&header, &table)
            } else {
                let mut out = aligned(
                    &header,
                    &["kind", "weights", "legs", "note", "shape"],
                    &table,
                );
                out.push_str(&format!(
                    "shapes: {}  classes: {}  single-tail family (e=0, k=1): {}  survivors: {}\n",
                    summary.shapes, summary.classes, summary.single_tail, summary.survivors
                ));
                out
            }
        }
    })
}

fn series_failure(e: SeriesError) -> Failure {
    match e {
        SeriesError::RankDeficient(_) => Failure::new(EXIT_MATH, e.to_string()),
        SeriesError::CriterionContradiction(_) => Failure::new(EXIT_INTERNAL, e.to_string()),
        _ => Failure::new(EXIT_USAGE, e.to_string()),
    }
}

fn cmd_series(
    file: PathBuf,
    at_infinity: bool,
    at: Option<String>,
    format: OutputFormat,
) -> Outcome {
    let point = match (at_infinity, at) {
        (_, Some(p)) => Point::Finite(
            crate::series::parse_rational(&p)
                .map_err(|e| Failure::new(EXIT_USAGE, format!("bad --at value {p:?}: {e}")))?,
        ),
        _ => Point::Infinity,
    };
    let text = fs::read_to_string(&file)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", file.display())))?;
    let series = PolySeries::from_json(&text).map_err(series_failure)?;
    let sequence = series.vanishing_sequence(&point);
    let check = series.check_lemma1_criterion().map_err(series_failure)?;
    let k = check.relation.as_ref().map(|r| r.k.to_string());
    let degenerate = check.relation.as_ref().is_some_and(|r| r.degenerate);

    Ok(match format {
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc {
                point: String,
                sequence: [usize; 3],
                #[serde(rename = "K")]
                k: Option<String>,
                degenerate: bool,
                criterion: bool,
                sequence_at_infinity: [usize; 3],
            }
            to_json(&Doc {
                point: point.to_string(),
                sequence: sequence.orders(),
                k,
                degenerate,
                criterion: check.holds,
                sequence_at_infinity: check.at_infinity.orders(),
            })
        }
        OutputFormat::Csv => {
            let [a0, a1, a2] = sequence.orders();
            csv(
                &["point", "a0", "a1", "a2", "K", "degenerate", "criterion"],
                &[vec![
                    point.to_string(),
                    a0.to_string(),
                    a1.to_string(),
                    a2.to_string(),
                    k.unwrap_or_default(),
                    degenerate.to_string(),
                    check.holds.to_string(),
                ]],
            )
        }
        OutputFormat::Plain => {
            let mut out = format!("point: {point}\nvanishing sequence: {sequence}\n");
            if point != Point::Infinity {
                out.push_str(&format!(
                    "vanishing sequence at infinity: {}\n",
                    check.at_infinity
                ));
            }
            match (&k, degenerate) {
                (Some(k), false) => out.push_str(&format!("K: {k}\n")),
                (Some(k), true) => out.push_str(&format!("K: {k} (degenerate, any K fits)\n")),
                (None, _) => out.push_str("K: none\n"),
            }
            out.push_str(&format!("criterion: {}\n", check.holds));
            out
        }
    })
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let format = cli.format;
    let outcome = match cli.command {
        Command::Nd {
            max,
            cache,
            ceiling,
        } => cmd_nd(max, cache, ceiling, format, err),
        Command::Ed { d, j } => cmd_ed(d, &j, format),
        Command::Strata {
            d,
            max_extra,
            full,
            circuits,
            survivors_only,
            ceiling,
        } => cmd_strata(
            d,
            max_extra,
            full,
            circuits,
            survivors_only,
            ceiling,
            format,
        ),
        Command::Series {
            file,
            at_infinity,
            at,
        } => cmd_series(file, at_infinity, at, format),
    };
    match outcome {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
