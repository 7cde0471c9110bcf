//! Analytic energy / step / memristor model of a partially approximated
//! serial ripple-carry adder.
//!
//! An `n`-bit adder with its `k` low bits approximated costs
//! `e_approx * k + 4.8250 * (n - k)` nJ and `s_approx * k + 22 * (n - k)`
//! steps. Exact designs apply their per-bit figure to all `n` bits.

use std::io::Write;

use serde::Serialize;

use crate::adders::AdderKind;
use crate::error::{Error, Result};
use crate::rca::RcaConfig;

/// Mean energy of one exact serial full-adder evaluation, nJ.
pub const EXACT_ENERGY_PER_BIT_NJ: f64 = 4.8250;
/// Steps of one exact serial full-adder evaluation.
pub const EXACT_STEPS_PER_BIT: u64 = 22;
/// Duration of one IMPLY/FALSE pulse in the reference device setup.
pub const STEP_DURATION_US: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MemristorRule {
    /// `2n + 3`: work cells are reused for every bit.
    TwoNPlus3,
    /// `2n + k + 3`: one extra work cell per approximated bit.
    TwoNPlusKPlus3,
}

impl MemristorRule {
    pub fn count(self, n: u32, k: u32) -> u64 {
        let n = u64::from(n);
        match self {
            MemristorRule::TwoNPlus3 => 2 * n + 3,
            MemristorRule::TwoNPlusKPlus3 => 2 * n + u64::from(k) + 3,
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            MemristorRule::TwoNPlus3 => "2n+3",
            MemristorRule::TwoNPlusKPlus3 => "2n+k+3",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostEntry {
    pub kind: AdderKind,
    pub energy_per_approx_bit_nj: f64,
    pub energy_per_exact_bit_nj: f64,
    pub steps_per_approx_bit: u64,
    pub steps_per_exact_bit: u64,
    pub memristor_rule: MemristorRule,
}

pub fn entry(kind: AdderKind) -> CostEntry {
    let (energy, steps, rule) = match kind {
        AdderKind::Exact => (
            EXACT_ENERGY_PER_BIT_NJ,
            EXACT_STEPS_PER_BIT,
            MemristorRule::TwoNPlus3,
        ),
        AdderKind::ExactKarimi => (4.0772, 23, MemristorRule::TwoNPlus3),
        AdderKind::Siafa13 => (1.7090, 8, MemristorRule::TwoNPlus3),
        AdderKind::Siafa2 => (2.5131, 10, MemristorRule::TwoNPlus3),
        AdderKind::Siafa4 => (1.7066, 8, MemristorRule::TwoNPlus3),
        AdderKind::Safan => (1.6628, 7, MemristorRule::TwoNPlus3),
        AdderKind::Sappi1 => (0.7980, 4, MemristorRule::TwoNPlusKPlus3),
        AdderKind::Sappi2 => (1.0919, 5, MemristorRule::TwoNPlus3),
    };
    CostEntry {
        kind,
        energy_per_approx_bit_nj: energy,
        energy_per_exact_bit_nj: EXACT_ENERGY_PER_BIT_NJ,
        steps_per_approx_bit: steps,
        steps_per_exact_bit: EXACT_STEPS_PER_BIT,
        memristor_rule: rule,
    }
}

impl CostEntry {
    pub fn energy_formula(&self) -> String {
        if self.kind.is_exact() {
            format!("{:.4}n", self.energy_per_approx_bit_nj)
        } else {
            format!(
                "{:.4}k + {:.4}(n-k)",
                self.energy_per_approx_bit_nj, self.energy_per_exact_bit_nj
            )
        }
    }

    pub fn steps_formula(&self) -> String {
        if self.kind.is_exact() {
            format!("{}n", self.steps_per_approx_bit)
        } else {
            format!(
                "{}k + {}(n-k)",
                self.steps_per_approx_bit, self.steps_per_exact_bit
            )
        }
    }
}

fn check_degree(n: u32, k: u32) -> Result<()> {
    if n == 0 || k > n {
        return Err(Error::Range(format!(
            "approximation degree k={k} must satisfy 0 <= k <= n with n={n} > 0"
        )));
    }
    Ok(())
}

/// Number of (approximated, exact) bit positions.
fn split(kind: AdderKind, n: u32, k: u32) -> (u64, u64) {
    if kind.is_exact() {
        (u64::from(n), 0)
    } else {
        (u64::from(k), u64::from(n - k))
    }
}

/// Energy of one `n`-bit addition in nJ.
pub fn energy(kind: AdderKind, n: u32, k: u32) -> Result<f64> {
    check_degree(n, k)?;
    let e = entry(kind);
    let (approx, exact) = split(kind, n, k);
    Ok(e.energy_per_approx_bit_nj * approx as f64 + e.energy_per_exact_bit_nj * exact as f64)
}

/// Serial steps of one `n`-bit addition.
pub fn steps(kind: AdderKind, n: u32, k: u32) -> Result<u64> {
    check_degree(n, k)?;
    let e = entry(kind);
    let (approx, exact) = split(kind, n, k);
    Ok(e.steps_per_approx_bit * approx + e.steps_per_exact_bit * exact)
}

pub fn memristors(kind: AdderKind, n: u32, k: u32) -> Result<u64> {
    check_degree(n, k)?;
    Ok(entry(kind).memristor_rule.count(n, k))
}

/// One line of the circuit-level comparison. Improvements are fractions
/// relative to the exact baseline (`0.42` means 42 % lower cost).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub kind: AdderKind,
    pub n: u32,
    pub k: u32,
    pub energy_formula: String,
    pub energy_nj: f64,
    pub energy_improvement: f64,
    pub steps_formula: String,
    pub steps: u64,
    pub steps_improvement: f64,
    pub memristor_formula: &'static str,
    pub memristors: u64,
}

impl ComparisonRow {
    pub fn energy_improvement_pct(&self) -> i64 {
        (self.energy_improvement * 100.0).round() as i64
    }

    pub fn steps_improvement_pct(&self) -> i64 {
        (self.steps_improvement * 100.0).round() as i64
    }
}

pub fn comparison_table(n: u32, k: u32) -> Result<Vec<ComparisonRow>> {
    check_degree(n, k)?;
    let base_energy = energy(AdderKind::Exact, n, k)?;
    let base_steps = steps(AdderKind::Exact, n, k)? as f64;
    AdderKind::ALL
        .into_iter()
        .map(|kind| {
            let e = entry(kind);
            let energy_nj = energy(kind, n, k)?;
            let step_count = steps(kind, n, k)?;
            Ok(ComparisonRow {
                kind,
                n,
                k,
                energy_formula: e.energy_formula(),
                energy_nj,
                energy_improvement: 1.0 - energy_nj / base_energy,
                steps_formula: e.steps_formula(),
                steps: step_count,
                steps_improvement: 1.0 - step_count as f64 / base_steps,
                memristor_formula: e.memristor_rule.formula(),
                memristors: memristors(kind, n, k)?,
            })
        })
        .collect()
}

pub fn write_comparison_csv<W: Write>(out: W, rows: &[ComparisonRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

/// Savings of running `additions` approximate additions instead of exact ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GainReport {
    pub application: String,
    pub additions: u64,
    pub kind: AdderKind,
    pub n: u32,
    pub k: u32,
    pub exact_energy_per_addition_nj: f64,
    pub approx_energy_per_addition_nj: f64,
    pub exact_steps_per_addition: u64,
    pub approx_steps_per_addition: u64,
    pub energy_saved_nj: f64,
    pub steps_saved: i64,
    pub energy_saved_pct: f64,
    pub steps_saved_pct: f64,
}

impl GainReport {
    pub fn energy_saved_j(&self) -> f64 {
        self.energy_saved_nj * 1e-9
    }

    pub fn energy_saved_mj(&self) -> f64 {
        self.energy_saved_nj * 1e-6
    }
}

pub fn application_gains(label: &str, additions: u64, cfg: &RcaConfig) -> Result<GainReport> {
    let (n, k, kind) = (cfg.width(), cfg.approx_degree(), cfg.kind());
    let exact_e = energy(AdderKind::Exact, n, k)?;
    let approx_e = energy(kind, n, k)?;
    let exact_s = steps(AdderKind::Exact, n, k)?;
    let approx_s = steps(kind, n, k)?;
    Ok(GainReport {
        application: label.to_string(),
        additions,
        kind,
        n,
        k,
        exact_energy_per_addition_nj: exact_e,
        approx_energy_per_addition_nj: approx_e,
        exact_steps_per_addition: exact_s,
        approx_steps_per_addition: approx_s,
        energy_saved_nj: (exact_e - approx_e) * additions as f64,
        steps_saved: (exact_s as i64 - approx_s as i64) * additions as i64,
        energy_saved_pct: 100.0 * (1.0 - approx_e / exact_e),
        steps_saved_pct: 100.0 * (1.0 - approx_s as f64 / exact_s as f64),
    })
}
