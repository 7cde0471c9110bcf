//! Partially approximated ripple-carry adders and a shift-and-add multiplier.
//!
//! Bit positions `0..k` use the configured adder kind, positions `k..n` use
//! the exact adder. Results keep the carry out, so an `n`-bit addition
//! yields an `n + 1`-bit value.

use serde::Serialize;

use crate::adders::{build_program, AdderKind, CELL_A, CELL_B, CELL_C, CELL_M1};
use crate::cost;
use crate::error::{Error, Result};
use crate::imply::{LogicLevel, OutputRole, StepMachine, TraceEntry, WORK_CELL_INITIAL};

/// Widest supported adder; `n + 1` result bits must fit a `u64`.
pub const MAX_WIDTH: u32 = 62;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RcaConfig {
    width: u32,
    approx_degree: u32,
    kind: AdderKind,
    #[serde(skip)]
    steps_per_add: u64,
    #[serde(skip)]
    energy_per_add_nj: f64,
}

impl RcaConfig {
    pub fn new(width: u32, approx_degree: u32, kind: AdderKind) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::Range(format!(
                "adder width {width} outside 1..={MAX_WIDTH}"
            )));
        }
        if approx_degree > width {
            return Err(Error::Range(format!(
                "approximation degree {approx_degree} exceeds width {width}"
            )));
        }
        Ok(RcaConfig {
            width,
            approx_degree,
            kind,
            steps_per_add: cost::steps(kind, width, approx_degree)?,
            energy_per_add_nj: cost::energy(kind, width, approx_degree)?,
        })
    }

    pub fn exact(width: u32) -> Result<Self> {
        Self::new(width, 0, AdderKind::Exact)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn approx_degree(&self) -> u32 {
        self.approx_degree
    }

    pub fn kind(&self) -> AdderKind {
        self.kind
    }

    /// Same degree and kind at a different width.
    pub fn with_width(&self, width: u32) -> Result<Self> {
        Self::new(width, self.approx_degree, self.kind)
    }

    pub fn steps_per_add(&self) -> u64 {
        self.steps_per_add
    }

    pub fn energy_per_add_nj(&self) -> f64 {
        self.energy_per_add_nj
    }

    /// Number of bit positions that actually run approximate logic.
    fn approx_bits(&self) -> u32 {
        if self.kind == AdderKind::Exact {
            0
        } else {
            self.approx_degree
        }
    }

    pub fn max_operand(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    fn check_operands(&self, a: u64, b: u64) -> Result<()> {
        let max = self.max_operand();
        if a > max || b > max {
            return Err(Error::Range(format!(
                "operands ({a}, {b}) exceed {}-bit range",
                self.width
            )));
        }
        if self.approx_bits() > 0 && !self.kind.is_executable() {
            return Err(Error::UnsupportedKind(self.kind));
        }
        Ok(())
    }

    /// Value-only addition on the word-parallel path.
    #[inline]
    pub fn add(&self, a: u64, b: u64, cin: bool) -> Result<u64> {
        self.check_operands(a, b)?;
        Ok(add_unchecked(self.kind, self.approx_bits(), a, b, cin))
    }
}

/// Word-parallel evaluation of the approximate low region plus an exact
/// integer add for the high region.
///
/// Both approximate adders propagate `c' = a & b | c`, so the carry into
/// bit `i` is `cin` or any generate bit below `i`.
#[inline]
fn add_unchecked(kind: AdderKind, k: u32, a: u64, b: u64, cin: bool) -> u64 {
    if k == 0 {
        return a + b + u64::from(cin);
    }
    let mask = (1u64 << k) - 1;
    let (al, bl) = (a & mask, b & mask);
    let generate = al & bl;
    let carries = if cin {
        mask
    } else if generate == 0 {
        0
    } else {
        let lowest = generate & generate.wrapping_neg();
        mask & !(lowest | (lowest - 1))
    };
    let carry_out = cin || generate != 0;
    let low = match kind {
        AdderKind::Sappi1 => !generate & mask,
        AdderKind::Sappi2 => (!(generate | carries) | al) & mask,
        _ => unreachable!("operands checked for executable kind"),
    };
    let high = ((a >> k) + (b >> k) + u64::from(carry_out)) << k;
    high | low
}

/// Bit-serial reference: evaluates every full adder in turn through
/// [`AdderKind::eval_bits`].
pub fn ripple_bitwise(cfg: &RcaConfig, a: u64, b: u64, cin: bool) -> Result<u64> {
    cfg.check_operands(a, b)?;
    let mut carry = cin;
    let mut value = 0u64;
    for i in 0..cfg.width {
        let kind = if i < cfg.approx_bits() {
            cfg.kind
        } else {
            AdderKind::Exact
        };
        let (s, c) = kind.eval_bits((a >> i) & 1 == 1, (b >> i) & 1 == 1, carry)?;
        value |= u64::from(s) << i;
        carry = c;
    }
    Ok(value | (u64::from(carry) << cfg.width))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AddResult {
    /// `n + 1`-bit sum including carry out.
    pub value: u64,
    pub steps: u64,
    pub energy_nj: f64,
}

pub fn rca_add(cfg: &RcaConfig, a: u64, b: u64, cin: LogicLevel) -> Result<AddResult> {
    Ok(AddResult {
        value: cfg.add(a, b, cin.is_one())?,
        steps: cfg.steps_per_add,
        energy_nj: cfg.energy_per_add_nj,
    })
}

/// Runs the approximated bits as IMPLY programs on a private step machine.
///
/// Cells `A[i]`/`B[i]` hold the operands, `C[0]` is the shared carry cell.
/// SAPPI-1 keeps its sum in a dedicated `M1[i]` per bit; SAPPI-2 reuses
/// `M1[0]` and leaves its sum in `A[i]`. Exact bits are evaluated
/// functionally and accounted at 22 steps each without tracing.
pub fn rca_add_stepwise(
    cfg: &RcaConfig,
    a: u64,
    b: u64,
    cin: LogicLevel,
) -> Result<(AddResult, Vec<TraceEntry>)> {
    let (machine, value) = run_stepwise(cfg, a, b, cin)?;
    let (_, trace) = machine.into_parts();
    Ok((
        AddResult {
            value,
            steps: cfg.steps_per_add,
            energy_nj: cfg.energy_per_add_nj,
        },
        trace,
    ))
}

/// As [`rca_add_stepwise`] but returns the whole machine, for inspecting
/// the final cell state and register-file size.
pub fn run_stepwise(
    cfg: &RcaConfig,
    a: u64,
    b: u64,
    cin: LogicLevel,
) -> Result<(StepMachine, u64)> {
    cfg.check_operands(a, b)?;
    let k = cfg.approx_bits();
    let bit = |x: u64, i: u32| LogicLevel::from((x >> i) & 1 == 1);

    let mut machine = StepMachine::new(
        (0..cfg.width)
            .flat_map(|i| [(CELL_A.at(i), bit(a, i)), (CELL_B.at(i), bit(b, i))])
            .chain([(CELL_C, cin)]),
    )?;

    let mut value = 0u64;
    if k > 0 {
        let program = build_program(cfg.kind)?;
        let per_bit_work = cfg.kind == AdderKind::Sappi1;
        if per_bit_work {
            for i in 0..k {
                machine.allocate(CELL_M1.at(i), WORK_CELL_INITIAL)?;
            }
        } else {
            machine.allocate(CELL_M1, WORK_CELL_INITIAL)?;
        }
        for i in 0..k {
            let placed = program.relocate(|cell| {
                if cell == CELL_C || (cell == CELL_M1 && !per_bit_work) {
                    cell
                } else {
                    cell.at(i)
                }
            });
            machine.run(&placed)?;
            let sum_cell = placed
                .output_cell(OutputRole::Sum)
                .ok_or_else(|| Error::Consistency("program without sum output".into()))?;
            value |= u64::from(machine.level(sum_cell)?.as_u8()) << i;
        }
    }

    let mut carry = machine.level(CELL_C)?.is_one();
    for i in k..cfg.width {
        let (s, c) = AdderKind::Exact.eval_bits((a >> i) & 1 == 1, (b >> i) & 1 == 1, carry)?;
        value |= u64::from(s) << i;
        carry = c;
    }
    Ok((machine, value | (u64::from(carry) << cfg.width)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MulConfig {
    pub rca: RcaConfig,
    pub multiplicand_bits: u32,
    pub multiplier_bits: u32,
}

impl MulConfig {
    pub fn new(rca: RcaConfig, multiplicand_bits: u32, multiplier_bits: u32) -> Result<Self> {
        if multiplicand_bits + multiplier_bits > rca.width {
            return Err(Error::Range(format!(
                "{multiplicand_bits}x{multiplier_bits}-bit product does not fit a {}-bit adder",
                rca.width
            )));
        }
        Ok(MulConfig {
            rca,
            multiplicand_bits,
            multiplier_bits,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MulResult {
    pub product: u64,
    /// Additions actually executed (one per set multiplier bit).
    pub additions: u64,
}

/// Adds `multiplicand << i` into an accumulator for every set bit `i` of
/// `multiplier`, using the configured adder. Zero multiplier bits cost
/// nothing.
pub fn shift_add_multiply(
    cfg: &MulConfig,
    multiplicand: u64,
    multiplier: u64,
) -> Result<MulResult> {
    if multiplicand >> cfg.multiplicand_bits != 0 || multiplier >> cfg.multiplier_bits != 0 {
        return Err(Error::Range(format!(
            "operands ({multiplicand}, {multiplier}) exceed {}x{} bits",
            cfg.multiplicand_bits, cfg.multiplier_bits
        )));
    }
    let rca = &cfg.rca;
    let mut acc = 0u64;
    let mut additions = 0u64;
    let mut bits = multiplier;
    while bits != 0 {
        let i = bits.trailing_zeros();
        bits &= bits - 1;
        acc = rca.add(acc, multiplicand << i, false)?;
        if acc > rca.max_operand() {
            return Err(Error::Range(format!(
                "product accumulator overflowed {} bits",
                rca.width
            )));
        }
        additions += 1;
    }
    Ok(MulResult {
        product: acc,
        additions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(n: u32, k: u32, kind: AdderKind) -> RcaConfig {
        RcaConfig::new(n, k, kind).unwrap()
    }

    /// Independent model: explicit boolean formulas per bit position.
    fn oracle(n: u32, k: u32, kind: AdderKind, a: u64, b: u64) -> u64 {
        let mut c = false;
        let mut v = 0;
        for i in 0..n {
            let (x, y) = ((a >> i) & 1 == 1, (b >> i) & 1 == 1);
            let (s, co) = if i >= k || kind == AdderKind::Exact {
                (x ^ y ^ c, (x && y) || (x && c) || (y && c))
            } else if kind == AdderKind::Sappi1 {
                (!(x && y), (x && y) || c)
            } else {
                let co = (x && y) || c;
                (!co || x, co)
            };
            v |= u64::from(s) << i;
            c = co;
        }
        v | (u64::from(c) << n)
    }

    #[test]
    fn examples() {
        let add = |c: &RcaConfig, a, b| rca_add(c, a, b, LogicLevel::Zero).unwrap().value;
        assert_eq!(add(&cfg(8, 0, AdderKind::Exact), 200, 100), 300);
        assert_eq!(add(&cfg(8, 4, AdderKind::Sappi1), 0, 0), 15);
        assert_eq!(add(&cfg(8, 4, AdderKind::Sappi1), 255, 255), 496);
        assert_eq!(add(&cfg(8, 4, AdderKind::Sappi2), 0, 0), 15);
    }

    #[test]
    fn range_and_kind_errors() {
        let c = cfg(8, 4, AdderKind::Sappi1);
        assert!(matches!(c.add(256, 0, false), Err(Error::Range(_))));
        assert!(RcaConfig::new(8, 9, AdderKind::Sappi1).is_err());
        assert!(RcaConfig::new(0, 0, AdderKind::Exact).is_err());
        assert!(RcaConfig::new(63, 0, AdderKind::Exact).is_err());
        let safan = cfg(8, 4, AdderKind::Safan);
        assert!(matches!(
            safan.add(1, 2, false),
            Err(Error::UnsupportedKind(_))
        ));
        // without approximated bits every kind is the exact adder
        assert_eq!(cfg(8, 0, AdderKind::Safan).add(1, 2, false).unwrap(), 3);
    }

    #[test]
    fn word_path_matches_bit_serial_exhaustively_small() {
        for n in 1..=5u32 {
            for k in 0..=n {
                for kind in [AdderKind::Exact, AdderKind::Sappi1, AdderKind::Sappi2] {
                    let c = cfg(n, k, kind);
                    for a in 0..1u64 << n {
                        for b in 0..1u64 << n {
                            for cin in [false, true] {
                                let fast = c.add(a, b, cin).unwrap();
                                assert_eq!(fast, ripple_bitwise(&c, a, b, cin).unwrap());
                                if !cin {
                                    assert_eq!(fast, oracle(n, k, kind, a, b));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_for_k_zero_small_widths() {
        for n in 1..=4u32 {
            let c = cfg(n, 0, AdderKind::Sappi1);
            for a in 0..1u64 << n {
                for b in 0..1u64 << n {
                    assert_eq!(c.add(a, b, false).unwrap(), a + b);
                    assert_eq!(c.add(a, b, true).unwrap(), a + b + 1);
                }
            }
        }
    }

    #[test]
    fn stepwise_examples() {
        for (kind, ops) in [(AdderKind::Sappi1, 16), (AdderKind::Sappi2, 20)] {
            let c = cfg(8, 4, kind);
            let (res, trace) = rca_add_stepwise(&c, 77, 142, LogicLevel::Zero).unwrap();
            assert_eq!(trace.len(), ops);
            assert_eq!(res.value, c.add(77, 142, false).unwrap());
            assert_eq!(res.steps, cost::steps(kind, 8, 4).unwrap());
        }
    }

    #[test]
    fn stepwise_register_file_size() {
        // SAPPI-1 needs a work cell per approximated bit, SAPPI-2 reuses one.
        let (m1, _) = run_stepwise(&cfg(8, 8, AdderKind::Sappi1), 3, 5, LogicLevel::Zero).unwrap();
        assert_eq!(m1.cell_count(), 3 * 8 + 1);
        let (m2, _) = run_stepwise(&cfg(8, 8, AdderKind::Sappi2), 3, 5, LogicLevel::Zero).unwrap();
        assert_eq!(m2.cell_count(), 2 * 8 + 2);
    }

    #[test]
    fn stepwise_rejects_cost_only_kinds() {
        assert!(matches!(
            rca_add_stepwise(&cfg(8, 2, AdderKind::Siafa4), 1, 1, LogicLevel::Zero),
            Err(Error::UnsupportedKind(AdderKind::Siafa4))
        ));
    }

    #[test]
    fn multiply_examples() {
        let exact = MulConfig::new(cfg(20, 0, AdderKind::Exact), 10, 10).unwrap();
        let r = shift_add_multiply(&exact, 181, 4).unwrap();
        assert_eq!(
            r,
            MulResult {
                product: 724,
                additions: 1
            }
        );

        // zero multiplicand: each executed addition adds 0 approximately
        let s1 = MulConfig::new(cfg(20, 8, AdderKind::Sappi1), 8, 8).unwrap();
        let r = shift_add_multiply(&s1, 0, 0b1011).unwrap();
        let mut acc = 0;
        for i in [0, 1, 3] {
            acc = oracle(20, 8, AdderKind::Sappi1, acc, 0 << i);
        }
        assert_eq!(r.product, acc);
        assert_eq!(r.additions, 3);

        let s2 = MulConfig::new(cfg(20, 8, AdderKind::Sappi2), 8, 8).unwrap();
        let r = shift_add_multiply(&s2, 255, 16).unwrap();
        assert_eq!(r.product, oracle(20, 8, AdderKind::Sappi2, 0, 255 << 4));
        assert!(r.product.abs_diff(4080) <= (1 << 9) * r.additions);
    }

    #[test]
    fn multiply_range_checks() {
        assert!(MulConfig::new(cfg(20, 0, AdderKind::Exact), 12, 9).is_err());
        let m = MulConfig::new(cfg(16, 0, AdderKind::Exact), 8, 8).unwrap();
        assert!(matches!(
            shift_add_multiply(&m, 256, 1),
            Err(Error::Range(_))
        ));
        assert_eq!(shift_add_multiply(&m, 255, 255).unwrap().product, 65025);
    }

    proptest! {
        #[test]
        fn word_path_matches_oracle(
            n in 1u32..=24,
            k_frac in 0.0f64..=1.0,
            sappi2 in any::<bool>(),
            a in any::<u64>(),
            b in any::<u64>(),
        ) {
            let k = (k_frac * n as f64) as u32;
            let kind = if sappi2 { AdderKind::Sappi2 } else { AdderKind::Sappi1 };
            let c = cfg(n, k, kind);
            let (a, b) = (a & c.max_operand(), b & c.max_operand());
            prop_assert_eq!(c.add(a, b, false).unwrap(), oracle(n, k, kind, a, b));
        }

        #[test]
        fn single_add_error_bound(
            n in 1u32..=20,
            k_frac in 0.0f64..=1.0,
            sappi2 in any::<bool>(),
            a in any::<u64>(),
            b in any::<u64>(),
        ) {
            let k = (k_frac * n as f64) as u32;
            let kind = if sappi2 { AdderKind::Sappi2 } else { AdderKind::Sappi1 };
            let c = cfg(n, k, kind);
            let (a, b) = (a & c.max_operand(), b & c.max_operand());
            let ed = c.add(a, b, false).unwrap().abs_diff(a + b);
            prop_assert!(ed < 1u64 << (k + 1));
        }

        #[test]
        fn multiply_error_bound(a in 0u64..256, b in 0u64..256, k in 0u32..=8, sappi2 in any::<bool>()) {
            let kind = if sappi2 { AdderKind::Sappi2 } else { AdderKind::Sappi1 };
            let m = MulConfig::new(cfg(20, k, kind), 8, 8).unwrap();
            let r = shift_add_multiply(&m, a, b).unwrap();
            prop_assert_eq!(r.additions, u64::from(b.count_ones()));
            prop_assert!(r.product.abs_diff(a * b) <= r.additions * ((1 << (k + 1)) - 1));
        }
    }
}
