//! `zicr <mode> [--config <path>] [--out <path>] [--seed <u64>] [overrides]`

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::capacity::{
    cutset_bounds, genie_sum_upper_bound, relay_condition_holds, sum_capacity_zic, sum_capacity_zicr, wi_feasible,
    Bound, CutSetBounds,
};
use crate::error::{Error, Result};
use crate::gdof::{gdof_report, sweep_alpha};
use crate::geometry::{relay_region_with, NodeLayout, RegionGrid, DEFAULT_PATHLOSS_EXPONENT};
use crate::model::{GdofExponents, SnrSextet, WiCertificate};
use crate::verify;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Capacity,
    Gdof,
    SweepFig3,
    SweepFig5,
    RelayRegion,
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "zicr", about = "Z-interference channel with a relay: capacity, GDoF and bounds")]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// JSON scenario file; command-line overrides take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub overrides: Config,
}

/// Scenario parameters. Every link SNR can be given linearly or in dB (`_db`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[arg(long)]
    pub snr11: Option<f64>,
    #[arg(long)]
    pub snr21: Option<f64>,
    #[arg(long)]
    pub snr31: Option<f64>,
    #[arg(long)]
    pub snr22: Option<f64>,
    #[arg(long)]
    pub snr32: Option<f64>,
    #[arg(long)]
    pub snr13: Option<f64>,
    #[arg(long = "snr11_db", allow_hyphen_values = true)]
    pub snr11_db: Option<f64>,
    #[arg(long = "snr21_db", allow_hyphen_values = true)]
    pub snr21_db: Option<f64>,
    #[arg(long = "snr31_db", allow_hyphen_values = true)]
    pub snr31_db: Option<f64>,
    #[arg(long = "snr22_db", allow_hyphen_values = true)]
    pub snr22_db: Option<f64>,
    #[arg(long = "snr32_db", allow_hyphen_values = true)]
    pub snr32_db: Option<f64>,
    #[arg(long = "snr13_db", allow_hyphen_values = true)]
    pub snr13_db: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Direct-link SNR for the interference sweep.
    #[arg(long)]
    pub snrd: Option<f64>,
    #[arg(long = "snrc_db_min", allow_hyphen_values = true)]
    pub snrc_db_min: Option<f64>,
    #[arg(long = "snrc_db_max", allow_hyphen_values = true)]
    pub snrc_db_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Relay-region cells per side.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(skip)]
    pub bbox: Option<[f64; 4]>,
    #[arg(skip)]
    pub layout: Option<NodeLayout>,
    #[arg(long = "pathloss_exponent")]
    pub pathloss_exponent: Option<f64>,
    #[arg(skip)]
    pub seed: Option<u64>,
}

macro_rules! merge {
    ($base:expr, $over:expr, $($f:ident),*) => {
        $( if $over.$f.is_some() { $base.$f = $over.$f.clone(); } )*
    };
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn overlay(mut self, o: &Config) -> Self {
        merge!(
            self, o, snr11, snr21, snr31, snr22, snr32, snr13, snr11_db, snr21_db, snr31_db, snr22_db, snr32_db,
            snr13_db, alpha, beta, gamma, lambda, snrd, snrc_db_min, snrc_db_max, points, grid, bbox, layout,
            pathloss_exponent, seed
        );
        self
    }

    fn link(name: &str, lin: Option<f64>, db: Option<f64>, default: f64) -> Result<f64> {
        match (lin, db) {
            (Some(_), Some(_)) => Err(Error::Config(format!("{name} given both linearly and in dB"))),
            (Some(v), None) => Ok(v),
            (None, Some(d)) => Ok(db_to_linear(d)),
            (None, None) => Ok(default),
        }
    }

    /// Defaults to the symmetric point snrd = 1, snrc = 0.01 with a strong relay link.
    pub fn sextet(&self) -> Result<SnrSextet> {
        SnrSextet::new(
            Self::link("snr11", self.snr11, self.snr11_db, 1.0)?,
            Self::link("snr21", self.snr21, self.snr21_db, 0.01)?,
            Self::link("snr31", self.snr31, self.snr31_db, 1.0)?,
            Self::link("snr22", self.snr22, self.snr22_db, 1.0)?,
            Self::link("snr32", self.snr32, self.snr32_db, 0.01)?,
            Self::link("snr13", self.snr13, self.snr13_db, 1e6)?,
        )
    }

    pub fn exponents(&self) -> Result<GdofExponents> {
        GdofExponents::new(
            self.alpha.unwrap_or(0.3),
            self.beta.unwrap_or(2.0),
            self.gamma.unwrap_or(2.0),
            self.lambda.unwrap_or(0.3),
        )
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Shortest decimal with 15 significant digits, like C's `%.15g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.14e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let s = format!("{:.*}", (14 - exp) as usize, x);
        trim_zeros(&s)
    } else {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn flag(b: bool) -> String {
    b.to_string()
}

#[derive(Debug, Serialize)]
pub struct CapacityReport {
    pub sum_capacity: f64,
    pub certified: bool,
    pub certificate: Option<WiCertificate>,
    pub relay_condition: bool,
    pub genie_ub: Bound,
    pub cutset: CutSetBounds,
}

pub fn capacity_report(snr: &SnrSextet) -> CapacityReport {
    let cap = sum_capacity_zicr(snr);
    CapacityReport {
        sum_capacity: cap.value,
        certified: cap.certified(),
        certificate: wi_feasible(snr),
        relay_condition: relay_condition_holds(snr),
        genie_ub: genie_sum_upper_bound(snr),
        cutset: cutset_bounds(snr),
    }
}

pub fn sweep_fig3_csv(cfg: &Config) -> Result<String> {
    let n = cfg.points.unwrap_or(71);
    if n < 2 {
        return Err(Error::Config("sweep needs at least 2 points".into()));
    }
    let lo = cfg.snrc_db_min.unwrap_or(-30.0);
    let hi = cfg.snrc_db_max.unwrap_or(5.0);
    let snrd = cfg.snrd.unwrap_or(1.0);
    let snr13 = Config::link("snr13", cfg.snr13, cfg.snr13_db, 1e6)?;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let db = lo + k as f64 * (hi - lo) / (n - 1) as f64;
        let s = SnrSextet::symmetric(snrd, db_to_linear(db), snr13)?;
        let zicr = sum_capacity_zicr(&s);
        let zic = sum_capacity_zic(&s.without_relay());
        rows.push(vec![fmt_sig(db), fmt_sig(zicr.value), fmt_sig(zic.value), flag(zicr.certified()), flag(zic.certified())]);
    }
    Ok(csv(&["snrc_db", "sum_zicr", "sum_zic", "wi_certified_zicr", "wi_certified_zic"], rows.into_iter()))
}

/// `gdof_upper` is the bound expression itself; `upper_valid` marks where its derivation applies.
pub fn sweep_fig5_csv(cfg: &Config) -> Result<String> {
    let rows = sweep_alpha(cfg.beta.unwrap_or(2.0), cfg.gamma.unwrap_or(2.0), cfg.points.unwrap_or(101))?;
    Ok(csv(
        &["alpha", "gdof_lower", "gdof_upper", "upper_valid", "zic_bound", "max_certified"],
        rows.into_iter().map(|r| {
            vec![
                fmt_sig(r.alpha),
                fmt_sig(r.lower),
                fmt_sig(r.upper.formula()),
                flag(r.upper.valid),
                fmt_sig(r.zic_bound),
                r.max_certified.map(fmt_sig).unwrap_or_default(),
            ]
        }),
    ))
}

pub fn relay_region_csv(cfg: &Config) -> Result<String> {
    let mut grid = RegionGrid::default();
    if let Some([x0, x1, y0, y1]) = cfg.bbox {
        grid = RegionGrid { x_min: x0, x_max: x1, y_min: y0, y_max: y1, ..grid };
    }
    if let Some(n) = cfg.grid {
        grid.resolution = n;
    }
    let layout = cfg.layout.unwrap_or_default();
    let mask = relay_region_with(&layout, &grid, cfg.pathloss_exponent.unwrap_or(DEFAULT_PATHLOSS_EXPONENT))?;
    Ok(csv(&["x", "y", "inside"], mask.cells().map(|(p, inside)| vec![fmt_sig(p.x), fmt_sig(p.y), flag(inside)])))
}

pub fn verify_table(seed: u64) -> (String, bool) {
    let checks = verify::run_all(seed);
    let mut out = String::new();
    for c in &checks {
        let _ = writeln!(out, "{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} passed, {failed} failed", checks.len() - failed);
    (out, failed == 0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one invocation and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let base = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let cfg = base.overlay(&cli.overrides);
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.out.as_deref();
    match cli.mode {
        Mode::Capacity => emit(out, &(serde_json::to_string_pretty(&capacity_report(&cfg.sextet()?))? + "\n"))?,
        Mode::Gdof => emit(out, &(serde_json::to_string_pretty(&gdof_report(&cfg.exponents()?))? + "\n"))?,
        Mode::SweepFig3 => emit(out, &sweep_fig3_csv(&cfg)?)?,
        Mode::SweepFig5 => emit(out, &sweep_fig5_csv(&cfg)?)?,
        Mode::RelayRegion => emit(out, &relay_region_csv(&cfg)?)?,
        Mode::Verify => {
            let (table, ok) = verify_table(seed);
            emit(out, &table)?;
            return Ok(if ok { 0 } else { 1 });
        }
    }
    Ok(0)
}
