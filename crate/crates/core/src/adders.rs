//! Full-adder catalogue: the exact adder, the two approximate IMPLY adders
//! with their step programs, and cost-only entries for other serial designs.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::cost::{self, CostEntry};
use crate::error::{Error, Result};
use crate::imply::{run_program, CellId, LogicLevel, MicroOp, OutputRole, StepProgram};

pub const CELL_A: CellId = CellId::new("A");
pub const CELL_B: CellId = CellId::new("B");
pub const CELL_C: CellId = CellId::new("C");
pub const CELL_M1: CellId = CellId::new("M1");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdderKind {
    /// Exact serial adder, 22 steps per bit. Baseline for all comparisons.
    Exact,
    /// Alternative exact serial adder, 23 steps per bit. Cost only.
    ExactKarimi,
    Sappi1,
    Sappi2,
    /// SIAFA1 and SIAFA3 share one cost row. Cost only.
    Siafa13,
    Siafa2,
    Siafa4,
    Safan,
}

impl AdderKind {
    pub const ALL: [AdderKind; 8] = [
        AdderKind::Exact,
        AdderKind::ExactKarimi,
        AdderKind::Siafa13,
        AdderKind::Siafa2,
        AdderKind::Siafa4,
        AdderKind::Safan,
        AdderKind::Sappi1,
        AdderKind::Sappi2,
    ];

    /// Whether the kind has boolean semantics that can be simulated.
    pub fn is_executable(self) -> bool {
        matches!(
            self,
            AdderKind::Exact | AdderKind::Sappi1 | AdderKind::Sappi2
        )
    }

    /// Whether the kind has a published IMPLY step program.
    pub fn has_program(self) -> bool {
        matches!(self, AdderKind::Sappi1 | AdderKind::Sappi2)
    }

    /// Exact designs ignore the approximation degree.
    pub fn is_exact(self) -> bool {
        matches!(self, AdderKind::Exact | AdderKind::ExactKarimi)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AdderKind::Exact => "exact",
            AdderKind::ExactKarimi => "exact_karimi",
            AdderKind::Sappi1 => "sappi1",
            AdderKind::Sappi2 => "sappi2",
            AdderKind::Siafa13 => "siafa13",
            AdderKind::Siafa2 => "siafa2",
            AdderKind::Siafa4 => "siafa4",
            AdderKind::Safan => "safan",
        }
    }

    /// Evaluates one full-adder cell on plain booleans: `(sum, cout)`.
    #[inline]
    pub fn eval_bits(self, a: bool, b: bool, c: bool) -> Result<(bool, bool)> {
        let ab = a && b;
        match self {
            AdderKind::Exact => Ok((a ^ b ^ c, ab || (c && (a || b)))),
            AdderKind::Sappi1 => Ok((!ab, ab || c)),
            AdderKind::Sappi2 => {
                let cout = ab || c;
                Ok((!cout || a, cout))
            }
            other => Err(Error::UnsupportedKind(other)),
        }
    }
}

impl fmt::Display for AdderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AdderKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown adder kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FaOutcome {
    pub sum: LogicLevel,
    pub cout: LogicLevel,
}

impl FaOutcome {
    fn from_bits((sum, cout): (bool, bool)) -> Self {
        FaOutcome {
            sum: sum.into(),
            cout: cout.into(),
        }
    }
}

pub fn exact_fa(a: LogicLevel, b: LogicLevel, c: LogicLevel) -> FaOutcome {
    FaOutcome {
        sum: a ^ b ^ c,
        cout: (a & b) | (b & c) | (a & c),
    }
}

/// `sum = !(a & b)`, `cout = a & b | c`.
pub fn sappi1_fa(a: LogicLevel, b: LogicLevel, c: LogicLevel) -> FaOutcome {
    FaOutcome {
        sum: !(a & b),
        cout: (a & b) | c,
    }
}

/// `sum = !(a & b | c) | a`, `cout = a & b | c`.
pub fn sappi2_fa(a: LogicLevel, b: LogicLevel, c: LogicLevel) -> FaOutcome {
    let cout = (a & b) | c;
    FaOutcome {
        sum: !cout | a,
        cout,
    }
}

/// Returns the one-bit IMPLY program for `kind`, over cells `A`, `B`, `C`
/// (carry in, overwritten with carry out) and work cell `M1`.
pub fn build_program(kind: AdderKind) -> Result<StepProgram> {
    use MicroOp::{False, Imply};

    let mut ops = vec![
        False { target: CELL_M1 },
        Imply {
            source: CELL_A,
            target: CELL_M1,
        },
        Imply {
            source: CELL_B,
            target: CELL_M1,
        },
        Imply {
            source: CELL_M1,
            target: CELL_C,
        },
    ];
    let inputs = vec![CELL_A, CELL_B, CELL_C];
    let work = vec![CELL_M1];
    match kind {
        AdderKind::Sappi1 => StepProgram::new(
            "sappi1",
            inputs,
            work,
            ops,
            vec![(OutputRole::Sum, CELL_M1), (OutputRole::Cout, CELL_C)],
            vec![CELL_A, CELL_B],
        ),
        AdderKind::Sappi2 => {
            ops.push(Imply {
                source: CELL_C,
                target: CELL_A,
            });
            StepProgram::new(
                "sappi2",
                inputs,
                work,
                ops,
                vec![(OutputRole::Sum, CELL_A), (OutputRole::Cout, CELL_C)],
                vec![CELL_B],
            )
        }
        other => Err(Error::UnsupportedKind(other)),
    }
}

/// Everything known about one adder kind.
#[derive(Clone, Debug)]
pub struct FullAdderSpec {
    pub kind: AdderKind,
    pub program: Option<StepProgram>,
    pub logic: Option<fn(LogicLevel, LogicLevel, LogicLevel) -> FaOutcome>,
    pub cost: CostEntry,
}

impl FullAdderSpec {
    pub fn of(kind: AdderKind) -> Self {
        let logic: Option<fn(_, _, _) -> _> = match kind {
            AdderKind::Exact => Some(exact_fa),
            AdderKind::Sappi1 => Some(sappi1_fa),
            AdderKind::Sappi2 => Some(sappi2_fa),
            _ => None,
        };
        FullAdderSpec {
            kind,
            program: build_program(kind).ok(),
            logic,
            cost: cost::entry(kind),
        }
    }

    pub fn steps_per_bit(&self) -> u64 {
        self.cost.steps_per_approx_bit
    }

    pub fn memristors(&self, n: u32, k: u32) -> Result<u64> {
        cost::memristors(self.kind, n, k)
    }
}

fn bool_as_int<S: Serializer>(v: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u8(u8::from(*v))
}

/// One row of a full-adder truth table against the exact adder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TruthRow {
    #[serde(rename = "A")]
    pub a: LogicLevel,
    #[serde(rename = "B")]
    pub b: LogicLevel,
    #[serde(rename = "C")]
    pub c: LogicLevel,
    pub sum: LogicLevel,
    pub cout: LogicLevel,
    pub sum_exact: LogicLevel,
    pub cout_exact: LogicLevel,
    #[serde(serialize_with = "bool_as_int")]
    pub sum_ok: bool,
    #[serde(serialize_with = "bool_as_int")]
    pub cout_ok: bool,
}

/// All 8 input combinations in `ABC` binary order. For kinds with a step
/// program, every row is checked against the program's execution.
pub fn truth_table(kind: AdderKind) -> Result<Vec<TruthRow>> {
    let spec = FullAdderSpec::of(kind);
    let logic = spec.logic.ok_or(Error::UnsupportedKind(kind))?;
    let mut rows = Vec::with_capacity(8);
    for bits in 0u8..8 {
        let a = LogicLevel::from(bits & 0b100 != 0);
        let b = LogicLevel::from(bits & 0b010 != 0);
        let c = LogicLevel::from(bits & 0b001 != 0);
        let out = logic(a, b, c);
        if let Some(program) = &spec.program {
            let run = run_program(program, &[(CELL_A, a), (CELL_B, b), (CELL_C, c)])?;
            let executed = FaOutcome {
                sum: run.output(OutputRole::Sum),
                cout: run.output(OutputRole::Cout),
            };
            if executed != out {
                return Err(Error::Consistency(format!(
                    "{kind} program gives {executed:?} but closed form gives {out:?} at ({a},{b},{c})"
                )));
            }
        }
        debug_assert_eq!(
            FaOutcome::from_bits(kind.eval_bits(a.into(), b.into(), c.into())?),
            out
        );
        let exact = exact_fa(a, b, c);
        rows.push(TruthRow {
            a,
            b,
            c,
            sum: out.sum,
            cout: out.cout,
            sum_exact: exact.sum,
            cout_exact: exact.cout,
            sum_ok: out.sum == exact.sum,
            cout_ok: out.cout == exact.cout,
        });
    }
    Ok(rows)
}

pub fn write_truth_table_csv<W: Write>(out: W, rows: &[TruthRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}
