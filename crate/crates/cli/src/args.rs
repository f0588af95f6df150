//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ringchain::rational::{Length, Ratio};
use ringchain::Variant;

#[derive(Debug, Parser)]
#[command(name = "chaincli", version, about = "Band structure and spectral probability of magnetic ring chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positive-energy bands in momentum k.
    Bands(BandsArgs),
    /// Negative-energy bands in κ, energy −κ².
    Negbands(NegbandsArgs),
    /// Flat bands: predicted by parameter relations and detected numerically.
    Flatbands(FlatbandsArgs),
    /// Probability that an energy belongs to the spectrum.
    Prob(ProbArgs),
    /// Band lists along a swept parameter.
    Sweep(SweepArgs),
    /// Compare the cell determinant with the reduced spectral condition.
    OracleCheck(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Loose,
    Tight,
    Merged,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Loose => Variant::Loose,
            VariantArg::Tight => Variant::Tight,
            VariantArg::Merged => Variant::Merged,
        }
    }
}

/// Chain parameters. Lengths accept decimals or multiples of π such as
/// `2pi/3`.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    /// Coupling length ℓ.
    #[arg(long, default_value = "1", value_parser = parse_length)]
    pub ell: Length,
    /// Link length ℓ₁ (loose and merged chains).
    #[arg(long, value_parser = parse_length)]
    pub l1: Option<Length>,
    /// Arc length ℓ₃ (loose and tight chains); the other arc is 2π − ℓ₃.
    #[arg(long, value_parser = parse_length)]
    pub l3: Option<Length>,
    /// Magnetic potential A; decimals or fractions such as `1/5`.
    #[arg(long = "A", visible_alias = "flux", value_parser = parse_number, allow_hyphen_values = true)]
    pub flux: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file, written atomically. Without it the table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; defaults to json for a `.json` output file, csv otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write a gnuplot script next to the CSV output.
    #[arg(long)]
    pub plot: bool,
}

impl OutputArgs {
    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Grid points per unit of momentum; the scan default when absent.
    #[arg(long)]
    pub points_per_unit: Option<f64>,
    /// Bisection tolerance of band edges.
    #[arg(long, default_value_t = 1e-10)]
    pub edge_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub kmax: f64,
    #[arg(long, default_value_t = 0.0)]
    pub kmin: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NegbandsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub kappa_max: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FlatbandsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub kmax: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Band coverage of [0, K] from the full spectral condition.
    Scan,
    /// Leading indicator over one exact period (commensurate lengths).
    Periodic,
    /// Area fraction on the phase torus (incommensurate lengths).
    Torus,
    /// Closed forms (incommensurate lengths, or the symmetric tight chain).
    Closed,
}

#[derive(Debug, Clone, Args)]
pub struct ProbArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Evaluate on a flux grid `lo:hi:n` instead of a single `--A`.
    #[arg(long)]
    pub flux_range: Option<String>,
    /// Upper momentum of the scan route.
    #[arg(long)]
    pub kmax: Option<f64>,
    /// Quadrature cells per torus axis.
    #[arg(long, default_value_t = 4000)]
    pub resolution: usize,
    /// Monte Carlo samples of the torus cross-check; 0 skips it.
    #[arg(long, default_value_t = 10_000_000)]
    pub samples: u64,
    #[arg(long, default_value_t = ringchain::probability::DEFAULT_SEED)]
    pub seed: u64,
    /// Length ratio of the periodic route: ℓ₂/ℓ₃ (tight) or ℓ₁/π (merged).
    /// Derived from the lengths when they are rational multiples of π.
    #[arg(long, value_parser = parse_ratio)]
    pub ratio: Option<Ratio>,
    /// Closed form of the symmetric tight chain, ℓ₃ = π.
    #[arg(long)]
    pub symmetric: bool,
    /// Declares the lengths incommensurate, which the closed forms assume.
    #[arg(long)]
    pub incommensurate: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    #[value(name = "A")]
    Flux,
    Ell,
    L1,
    L3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// `lo:hi:n`, endpoints included; lengths may be multiples of π.
    #[arg(long)]
    pub range: String,
    /// Upper momentum (k, or κ on the negative branch).
    #[arg(long)]
    pub kmax: f64,
    #[arg(long, value_enum, default_value = "positive")]
    pub branch: BranchArg,
    /// Grid points per unit of momentum.
    #[arg(long, default_value_t = 2000.0)]
    pub points_per_unit: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub edge_tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Location tolerance for θ-roots.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    /// Random quasimomenta per sample for the proportionality estimate.
    #[arg(long, default_value_t = 4)]
    pub theta_samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_length(s: &str) -> Result<Length, String> {
    s.parse::<Length>().map_err(|e| e.to_string())
}

/// Decimal or `p/q`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let v = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("cannot parse {s:?}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("cannot parse {s:?}"))?;
            p / q
        }
        None => t.parse().map_err(|_| format!("cannot parse {s:?}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not a finite number"))
    }
}

fn parse_ratio(s: &str) -> Result<Ratio, String> {
    let bad = || format!("expected a ratio p/q of positive integers, got {s:?}");
    let (p, q) = s.split_once('/').unwrap_or((s, "1"));
    let p: i64 = p.trim().parse().map_err(|_| bad())?;
    let q: u64 = q.trim().parse().map_err(|_| bad())?;
    if p <= 0 || q == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(p, q))
}

/// `lo:hi:n` with `n ≥ 1` points, endpoints included. Endpoints go through
/// `parse` so lengths may be written as multiples of π.
pub fn parse_grid(s: &str, parse: impl Fn(&str) -> Result<f64, String>) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("range {s:?} must look like lo:hi:n"));
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    let n: usize = n.trim().parse().map_err(|_| format!("bad sample count in {s:?}"))?;
    if n == 0 {
        return Err("sample count must be at least 1".into());
    }
    if hi < lo || (n > 1 && hi == lo) {
        return Err(format!("range {s:?} is empty"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect())
}

pub fn parse_length_value(s: &str) -> Result<f64, String> {
    parse_length(s).map(|l| l.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grids_include_both_ends() {
        let g = parse_grid("0:1:5", parse_number).unwrap();
        assert_eq!(g, [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("0.3:0.3:1", parse_number).unwrap(), [0.3]);
        let g = parse_grid("pi/3:5pi/3:3", parse_length_value).unwrap();
        assert_eq!(g[2], 5.0 * PI / 3.0);
        assert!((g[1] - PI).abs() < 1e-15);
        for bad in ["1:0:3", "0:1", "0:1:0", "1:1:2", "a:1:2"] {
            assert!(parse_grid(bad, parse_number).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers_and_ratios() {
        assert_eq!(parse_number("1/5").unwrap(), 0.2);
        assert_eq!(parse_number("-0.7").unwrap(), -0.7);
        assert!(parse_number("1/0").is_err());
        assert_eq!(parse_ratio("6/4").unwrap(), Ratio::new(3, 2));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::new(3, 1));
        assert!(parse_ratio("-1/2").is_err());
    }

    #[test]
    fn format_follows_the_extension() {
        let mut o = OutputArgs { out: Some("x.JSON".into()), format: None, plot: false };
        assert_eq!(o.format(), Format::Json);
        o.out = Some("x.dat".into());
        assert_eq!(o.format(), Format::Csv);
        o.format = Some(Format::Json);
        assert_eq!(o.format(), Format::Json);
    }
}
