//! Exhaustive error statistics of a partially approximated adder.

use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::adders::AdderKind;
use crate::error::{Error, Result};
use crate::rca::RcaConfig;

/// Widest adder [`exhaustive_metrics`] will enumerate (`2^24` pairs).
pub const MAX_EXHAUSTIVE_WIDTH: u32 = 12;

/// Error distance `|approx(a + b) - (a + b)|` with carry in 0.
pub fn ed(cfg: &RcaConfig, a: u64, b: u64) -> Result<u64> {
    Ok(cfg.add(a, b, false)?.abs_diff(a + b))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: AdderKind,
    pub n: u32,
    pub k: u32,
    pub pairs: u64,
    pub med: f64,
    /// MED divided by the largest exact sum, `2 * (2^n - 1)`.
    pub nmed: f64,
    /// Mean of `ED / (a + b)` over pairs with a non-zero exact sum.
    pub mred: f64,
    pub max_ed: u64,
    /// Fraction of pairs with non-zero ED.
    pub error_rate: f64,
    pub ed_histogram: BTreeMap<u64, u64>,
}

/// The CSV projection of an [`ErrorReport`].
#[derive(Serialize)]
struct MetricsRow {
    kind: AdderKind,
    n: u32,
    k: u32,
    med: f64,
    nmed: f64,
    mred: f64,
    max_ed: u64,
    error_rate: f64,
}

impl ErrorReport {
    pub fn write_csv<W: Write>(reports: &[ErrorReport], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in reports {
            w.serialize(MetricsRow {
                kind: r.kind,
                n: r.n,
                k: r.k,
                med: r.med,
                nmed: r.nmed,
                mred: r.mred,
                max_ed: r.max_ed,
                error_rate: r.error_rate,
            })?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

#[derive(Default)]
struct Partial {
    ed_sum: u64,
    rel_sum: f64,
    rel_count: u64,
    erroneous: u64,
    max_ed: u64,
    histogram: BTreeMap<u64, u64>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.ed_sum += other.ed_sum;
        self.rel_sum += other.rel_sum;
        self.rel_count += other.rel_count;
        self.erroneous += other.erroneous;
        self.max_ed = self.max_ed.max(other.max_ed);
        for (ed, count) in other.histogram {
            *self.histogram.entry(ed).or_default() += count;
        }
        self
    }
}

/// Enumerates every `(a, b)` in `[0, 2^n)^2` with carry in 0.
pub fn exhaustive_metrics(cfg: &RcaConfig) -> Result<ErrorReport> {
    let n = cfg.width();
    if n > MAX_EXHAUSTIVE_WIDTH {
        return Err(Error::ResourceGuard {
            bits: 2 * n,
            limit: MAX_EXHAUSTIVE_WIDTH,
        });
    }
    let side = 1u64 << n;
    // one partial per `a`, merged in order so float sums are reproducible
    let rows = (0..side)
        .into_par_iter()
        .map(|a| {
            let mut p = Partial::default();
            for b in 0..side {
                let exact = a + b;
                let e = cfg.add(a, b, false)?.abs_diff(exact);
                p.ed_sum += e;
                if e != 0 {
                    p.erroneous += 1;
                }
                p.max_ed = p.max_ed.max(e);
                if exact > 0 {
                    p.rel_sum += e as f64 / exact as f64;
                    p.rel_count += 1;
                }
                *p.histogram.entry(e).or_default() += 1;
            }
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()?;
    let total = rows.into_iter().fold(Partial::default(), Partial::merge);

    let pairs = side * side;
    let med = total.ed_sum as f64 / pairs as f64;
    Ok(ErrorReport {
        kind: cfg.kind(),
        n,
        k: cfg.approx_degree(),
        pairs,
        med,
        nmed: med / (2.0 * (side - 1) as f64),
        mred: if total.rel_count == 0 {
            0.0
        } else {
            total.rel_sum / total.rel_count as f64
        },
        max_ed: total.max_ed,
        error_rate: total.erroneous as f64 / pairs as f64,
        ed_histogram: total.histogram,
    })
}
