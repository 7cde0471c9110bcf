mod common;

use sappi::metrics::{ed, exhaustive_metrics};
use sappi::{AdderKind, Error, RcaConfig};

/// Straightforward double loop over the gate-level oracle.
fn naive(kind: AdderKind, n: u32, k: u32) -> (f64, f64, f64, u64) {
    let side = 1u64 << n;
    let (mut sum, mut rel, mut rel_n, mut max) = (0u64, 0.0, 0u64, 0u64);
    for a in 0..side {
        for b in 0..side {
            let e = common::ripple(kind.as_str(), n, k, a, b).abs_diff(a + b);
            sum += e;
            max = max.max(e);
            if a + b > 0 {
                rel += e as f64 / (a + b) as f64;
                rel_n += 1;
            }
        }
    }
    let med = sum as f64 / (side * side) as f64;
    (med, med / (2 * (side - 1)) as f64, rel / rel_n as f64, max)
}

#[test]
fn agrees_with_naive_enumeration() {
    for kind in [AdderKind::Sappi1, AdderKind::Sappi2] {
        for n in 1..=6 {
            for k in 0..=n {
                let r = exhaustive_metrics(&RcaConfig::new(n, k, kind).unwrap()).unwrap();
                let (med, nmed, mred, max) = naive(kind, n, k);
                assert_eq!(r.med, med, "{kind} {k}/{n}");
                assert!((r.nmed - nmed).abs() < 1e-15);
                assert!((r.mred - mred).abs() < 1e-12);
                assert_eq!(r.max_ed, max);
                assert_eq!(r.ed_histogram.values().sum::<u64>(), 1 << (2 * n));
            }
        }
    }
}

#[test]
fn med_grows_with_k() {
    for kind in [AdderKind::Sappi1, AdderKind::Sappi2] {
        let meds: Vec<f64> = (0..=8)
            .map(|k| {
                exhaustive_metrics(&RcaConfig::new(8, k, kind).unwrap())
                    .unwrap()
                    .med
            })
            .collect();
        assert_eq!(meds[0], 0.0);
        assert!(meds.windows(2).all(|w| w[1] > w[0]), "{kind}: {meds:?}");
    }
}

#[test]
fn single_pair_distance() {
    let cfg = RcaConfig::new(8, 1, AdderKind::Sappi1).unwrap();
    // 0 + 0 sets the low sum bit: ED 1
    assert_eq!(ed(&cfg, 0, 0).unwrap(), 1);
    assert_eq!(ed(&RcaConfig::exact(8).unwrap(), 255, 255).unwrap(), 0);
}

#[test]
fn large_widths_are_refused() {
    let cfg = RcaConfig::new(13, 2, AdderKind::Sappi2).unwrap();
    assert!(matches!(
        exhaustive_metrics(&cfg),
        Err(Error::ResourceGuard {
            bits: 26,
            limit: 12
        })
    ));
}
