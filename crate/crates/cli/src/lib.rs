//! Command implementations behind the `scheffers` binary.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scheffers::chron::{
    draw_rng, integrate_cascade_with, random_controls, ControlFamily, ControlSpec, Record, TimeGrid, WordSet,
};
use scheffers::hall::{check_degree, main_series_fixpoint, z_series, HallKind, HallTable};
use scheffers::riccati::{
    riccati_from_path, riccati_rk4_on, verify_suite, wei_norman_path_from, VerifyConfig, VerifyReport,
};
use scheffers::{NcSeries, Word};

#[derive(Debug, Parser)]
#[command(
    name = "scheffers",
    version,
    about = "Series solution of the sl(2) Lie-Scheffers system and the Riccati equation"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Truncation degree.
    #[arg(long, global = true, default_value_t = 8)]
    pub degree: usize,
    /// Allow degrees above 12.
    #[arg(long, global = true)]
    pub allow_large_degree: bool,
    /// RK4 intervals on [0, T].
    #[arg(long, global = true, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub output: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "S")]
    S,
    #[value(name = "Za")]
    Za,
    #[value(name = "Zb")]
    Zb,
    #[value(name = "Zc")]
    Zc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    A,
    B,
    C,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print S, Z_a, Z_b or Z_c up to the truncation degree.
    Series { which: Which },
    /// List Hall words of one kind, one line per length.
    Hall {
        kind: Kind,
        #[arg(long, default_value_t = 5)]
        max_length: usize,
    },
    /// Iterated integrals of every word up to the degree, or of the given words.
    Upsilon {
        #[arg(long)]
        controls: PathBuf,
        /// Report times; defaults to the horizon.
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true)]
        times: Vec<f64>,
        #[arg(long = "word", value_delimiter = ',')]
        words: Vec<String>,
    },
    /// Solve the Riccati equation from the series.
    Riccati {
        #[arg(long)]
        controls: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        y0: f64,
        /// Report times; defaults to the horizon.
        #[arg(long = "t", value_delimiter = ',')]
        times: Vec<f64>,
        /// Also report the RK4 solution and the difference.
        #[arg(long)]
        oracle: bool,
    },
    /// Run the invariant suite on a controls file or on random draws.
    Verify {
        #[arg(long, conflicts_with = "random")]
        controls: Option<PathBuf>,
        /// Number of random control draws.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Horizon of random draws.
        #[arg(long, default_value_t = 0.3)]
        horizon: f64,
        /// Initial values for the Riccati check.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.5, -0.5])]
        y0: Vec<f64>,
        #[arg(long, default_value_t = 1e-5)]
        riccati_tolerance: f64,
        /// Word pairs for the shuffle homomorphism check.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

/// Text printed by a command and whether every check in it passed.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, success: true }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let c = &cli.common;
    if c.steps == 0 {
        bail!("--steps must be at least 1");
    }
    match &cli.command {
        Command::Series { which } => {
            check_degree(c.degree, c.allow_large_degree)?;
            Ok(Outcome::ok(cmd_series(*which, c.degree, c.output)))
        }
        Command::Hall { kind, max_length } => {
            check_degree(*max_length, c.allow_large_degree)?;
            Ok(Outcome::ok(cmd_hall(*kind, *max_length, c.output)))
        }
        Command::Upsilon { controls, times, words } => {
            check_degree(c.degree, c.allow_large_degree)?;
            let spec = load(controls)?;
            cmd_upsilon(&spec, c, times, words).map(Outcome::ok)
        }
        Command::Riccati {
            controls,
            y0,
            times,
            oracle,
        } => {
            check_degree(c.degree, c.allow_large_degree)?;
            let spec = load(controls)?;
            cmd_riccati(&spec, *y0, c, times, *oracle).map(Outcome::ok)
        }
        Command::Verify {
            controls,
            random,
            seed,
            horizon,
            y0,
            riccati_tolerance,
            pairs,
        } => {
            check_degree(c.degree, c.allow_large_degree)?;
            let draws = match (controls, random) {
                (Some(path), _) => vec![load(path)?],
                (None, Some(n)) => (0..*n as u64)
                    .map(|i| random_controls(&mut draw_rng(*seed, i), *horizon, 1.0, ControlFamily::Mixed))
                    .collect(),
                (None, None) => bail!("verify needs --controls FILE or --random N"),
            };
            let config = VerifyConfig {
                degree: c.degree,
                steps: c.steps,
                y0: y0.clone(),
                seed: *seed,
                homomorphism_pairs: *pairs,
                riccati_tolerance: *riccati_tolerance,
                ..VerifyConfig::default()
            };
            let report = verify_suite(&draws, &config)?;
            Ok(Outcome {
                success: report.passed,
                text: render_report(&report, c.output),
            })
        }
    }
}

fn load(path: &PathBuf) -> Result<ControlSpec> {
    ControlSpec::load(path).with_context(|| format!("reading controls from {}", path.display()))
}

pub fn cmd_series(which: Which, degree: usize, format: Format) -> String {
    let s = match which {
        Which::S | Which::Zb => main_series_fixpoint(degree),
        Which::Za => z_series(degree).za,
        Which::Zc => z_series(degree).zc,
    };
    match format {
        Format::Text => s.to_string(),
        Format::Json => s.to_json(),
    }
}

#[derive(Serialize)]
struct HallListing {
    kind: &'static str,
    max_length: usize,
    lengths: Vec<Vec<String>>,
}

pub fn cmd_hall(kind: Kind, max_length: usize, format: Format) -> String {
    let table = HallTable::generate(max_length.max(1));
    let (hk, name) = match kind {
        Kind::A => (HallKind::A, "a"),
        Kind::B => (HallKind::B, "b"),
        Kind::C => (HallKind::C, "c"),
    };
    let lengths: Vec<Vec<String>> = (1..=max_length)
        .map(|n| table.listing(hk, n).iter().map(|w| w.to_string()).collect())
        .collect();
    match format {
        Format::Text => lengths.iter().map(|l| l.join(", ")).collect::<Vec<_>>().join("\n"),
        Format::Json => json(&HallListing {
            kind: name,
            max_length,
            lengths,
        }),
    }
}

fn report_times(spec: &ControlSpec, times: &[f64]) -> Vec<f64> {
    if times.is_empty() {
        vec![spec.horizon]
    } else {
        times.to_vec()
    }
}

#[derive(Serialize)]
struct UpsilonTable {
    degree: usize,
    times: Vec<f64>,
    words: Vec<String>,
    /// One row per time, one entry per word.
    values: Vec<Vec<f64>>,
}

fn cmd_upsilon(spec: &ControlSpec, c: &Common, times: &[f64], words: &[String]) -> Result<String> {
    let times = report_times(spec, times);
    let word_set = if words.is_empty() {
        WordSet::All(c.degree)
    } else {
        let parsed = words
            .iter()
            .map(|w| w.parse::<Word>())
            .collect::<scheffers::Result<Vec<_>>>()?;
        WordSet::Closure(parsed)
    };
    let table = integrate_cascade_with(spec, c.steps, word_set, Record::Times(times.clone()))?;
    let listed: Vec<Word> = if words.is_empty() {
        table.words().to_vec()
    } else {
        words.iter().map(|w| w.parse()).collect::<scheffers::Result<_>>()?
    };
    let mut values = Vec::new();
    for &t in &times {
        values.push(
            listed
                .iter()
                .map(|&w| table.value(w, t))
                .collect::<scheffers::Result<Vec<_>>>()?,
        );
    }
    let names: Vec<String> = listed
        .iter()
        .map(|w| if w.is_empty() { "1".into() } else { w.to_string() })
        .collect();
    Ok(match c.output {
        Format::Text => {
            let mut out = String::new();
            for (t, row) in times.iter().zip(&values) {
                for (name, v) in names.iter().zip(row) {
                    writeln!(out, "{t}\t{name}\t{v:.17e}").unwrap();
                }
            }
            out.trim_end().to_string()
        }
        Format::Json => json(&UpsilonTable {
            degree: table.degree(),
            times,
            words: names,
            values,
        }),
    })
}

#[derive(Serialize)]
struct RiccatiRow {
    t: f64,
    y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    difference: Option<f64>,
}

#[derive(Serialize)]
struct RiccatiTable {
    y0: f64,
    degree: usize,
    steps: usize,
    rows: Vec<RiccatiRow>,
}

fn cmd_riccati(spec: &ControlSpec, y0: f64, c: &Common, times: &[f64], oracle: bool) -> Result<String> {
    let times = report_times(spec, times);
    let grid = TimeGrid::with_times(spec, c.steps, &times)?;
    let path = wei_norman_path_from(&z_series(c.degree), spec, &grid);
    let y = riccati_from_path(&path, spec, y0)?;
    let reference = if oracle {
        Some(riccati_rk4_on(spec, y0, &grid)?)
    } else {
        None
    };
    let mut rows = Vec::new();
    for &t in &times {
        let v = y.at(t)?;
        let o = reference.as_ref().map(|r| r.at(t)).transpose()?;
        rows.push(RiccatiRow {
            t,
            y: v,
            oracle: o,
            difference: o.map(|o| (v - o).abs()),
        });
    }
    Ok(match c.output {
        Format::Text => rows
            .iter()
            .map(|r| match (r.oracle, r.difference) {
                (Some(o), Some(d)) => format!("t={}\ty={:.15}\toracle={o:.15}\tdiff={d:.3e}", r.t, r.y),
                _ => format!("t={}\ty={:.15}", r.t, r.y),
            })
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Json => json(&RiccatiTable {
            y0,
            degree: c.degree,
            steps: c.steps,
            rows,
        }),
    })
}

pub fn render_report(report: &VerifyReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => {
            let mut out = String::new();
            for check in &report.checks {
                write!(
                    out,
                    "[{}] {}: {:.3e} (tolerance {:.1e})",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.max_error,
                    check.tolerance
                )
                .unwrap();
                if let Some(d) = &check.detail {
                    write!(out, " {d}").unwrap();
                }
                out.push('\n');
            }
            write!(
                out,
                "{} draws, degree {}, {} steps: {}",
                report.draws,
                report.degree,
                report.steps,
                if report.passed { "all checks passed" } else { "FAILED" }
            )
            .unwrap();
            out
        }
    }
}

/// Parses a series JSON document back, for round-trip checks.
pub fn parse_series_json(text: &str) -> Result<NcSeries> {
    Ok(NcSeries::from_json(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_text() {
        assert_eq!(cmd_series(Which::S, 2, Format::Text), "b - ac");
        assert_eq!(
            cmd_series(Which::Zb, 4, Format::Text),
            cmd_series(Which::S, 4, Format::Text)
        );
        assert_eq!(cmd_series(Which::Za, 2, Format::Text), "a + 2ab");
    }

    #[test]
    fn series_json_round_trips() {
        let text = cmd_series(Which::Zc, 5, Format::Json);
        assert_eq!(parse_series_json(&text).unwrap(), z_series(5).zc);
    }

    #[test]
    fn hall_listings() {
        assert_eq!(cmd_hall(Kind::B, 4, Format::Text), "b\nac\nabc\nabbc, aacc");
        assert_eq!(cmd_hall(Kind::C, 3, Format::Text), "c\nbc\nbbc, acc");
        assert_eq!(cmd_hall(Kind::A, 2, Format::Text), "a\nab");
    }

    #[test]
    fn degree_cap_is_enforced() {
        let cli = Cli::parse_from(["scheffers", "series", "S", "--degree", "13"]);
        assert!(run(&cli).is_err());
        let cli = Cli::parse_from([
            "scheffers",
            "hall",
            "c",
            "--max-length",
            "2",
            "--degree",
            "13",
            "--allow-large-degree",
        ]);
        assert!(run(&cli).is_ok());
    }
}
