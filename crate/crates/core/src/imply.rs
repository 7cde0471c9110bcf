//! Serial IMPLY step machine.
//!
//! A set of binary memristor cells evolves only through two micro-operations:
//! `FALSE(q)` resets `q` to 0 and `IMPLY(p, q)` stores `!p | q` into `q`.
//! Exactly one micro-op executes per step, and every executed op is logged.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::ops::Not;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary memristor state: `Zero` is the high-resistance state, `One` the
/// low-resistance state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum LogicLevel {
    Zero,
    One,
}

impl LogicLevel {
    pub fn is_one(self) -> bool {
        self == LogicLevel::One
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

impl From<bool> for LogicLevel {
    fn from(b: bool) -> Self {
        if b {
            LogicLevel::One
        } else {
            LogicLevel::Zero
        }
    }
}

impl From<LogicLevel> for bool {
    fn from(l: LogicLevel) -> Self {
        l.is_one()
    }
}

impl From<LogicLevel> for u8 {
    fn from(l: LogicLevel) -> Self {
        l.as_u8()
    }
}

impl TryFrom<u8> for LogicLevel {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            0 => Ok(LogicLevel::Zero),
            1 => Ok(LogicLevel::One),
            other => Err(Error::Range(format!(
                "logic level must be 0 or 1, got {other}"
            ))),
        }
    }
}

impl Not for LogicLevel {
    type Output = LogicLevel;

    fn not(self) -> LogicLevel {
        match self {
            LogicLevel::Zero => LogicLevel::One,
            LogicLevel::One => LogicLevel::Zero,
        }
    }
}

impl fmt::Display for LogicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Symbolic cell name plus bit position, e.g. `A[3]` or `M1[0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    name: &'static str,
    bit: u32,
}

impl CellId {
    pub const fn new(name: &'static str) -> Self {
        CellId { name, bit: 0 }
    }

    pub const fn at(self, bit: u32) -> Self {
        CellId {
            name: self.name,
            bit,
        }
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn bit(&self) -> u32 {
        self.bit
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.bit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MicroOp {
    False { target: CellId },
    Imply { source: CellId, target: CellId },
}

impl MicroOp {
    pub fn target(&self) -> CellId {
        match *self {
            MicroOp::False { target } | MicroOp::Imply { target, .. } => target,
        }
    }

    pub fn source(&self) -> Option<CellId> {
        match *self {
            MicroOp::False { .. } => None,
            MicroOp::Imply { source, .. } => Some(source),
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            MicroOp::False { .. } => "FALSE",
            MicroOp::Imply { .. } => "IMPLY",
        }
    }

    fn map_cells(self, f: &impl Fn(CellId) -> CellId) -> MicroOp {
        match self {
            MicroOp::False { target } => MicroOp::False { target: f(target) },
            MicroOp::Imply { source, target } => MicroOp::Imply {
                source: f(source),
                target: f(target),
            },
        }
    }
}

impl fmt::Display for MicroOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MicroOp::False { target } => write!(f, "FALSE({target})"),
            MicroOp::Imply { source, target } => write!(f, "{source} -> {target}"),
        }
    }
}

/// Semantic role of a program output cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputRole {
    Sum,
    Cout,
}

/// One executed micro-op and the level it left in its target cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    /// 1-based step index.
    pub step: usize,
    pub op: MicroOp,
    pub result: LogicLevel,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let src = match self.op.source() {
            Some(cell) => cell.to_string(),
            None => "-".to_string(),
        };
        write!(
            f,
            "step={} op={} src={} dst={} result={}",
            self.step,
            self.op.mnemonic(),
            src,
            self.op.target(),
            self.result
        )
    }
}

/// Writes one `step=.. op=.. src=.. dst=.. result=..` line per entry.
pub fn write_trace<W: Write>(mut out: W, trace: &[TraceEntry]) -> io::Result<()> {
    for entry in trace {
        writeln!(out, "{entry}")?;
    }
    Ok(())
}

/// An ordered FALSE/IMPLY instruction stream over declared cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepProgram {
    name: &'static str,
    inputs: Vec<CellId>,
    work: Vec<CellId>,
    ops: Vec<MicroOp>,
    outputs: Vec<(OutputRole, CellId)>,
    preserved: Vec<CellId>,
}

impl StepProgram {
    /// Validates that every operand, output and preserved cell is declared,
    /// that IMPLY operands are distinct, and that no cell is declared twice.
    pub fn new(
        name: &'static str,
        inputs: Vec<CellId>,
        work: Vec<CellId>,
        ops: Vec<MicroOp>,
        outputs: Vec<(OutputRole, CellId)>,
        preserved: Vec<CellId>,
    ) -> Result<Self> {
        let mut declared = inputs.clone();
        declared.extend(work.iter().copied());
        let mut sorted = declared.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config(format!("{name}: cell declared twice")));
        }
        let is_declared = |c: &CellId| declared.contains(c);
        for (i, op) in ops.iter().enumerate() {
            if let MicroOp::Imply { source, target } = op {
                if source == target {
                    return Err(Error::Operand(format!(
                        "{name} step {}: IMPLY operands must differ ({source})",
                        i + 1
                    )));
                }
            }
            for cell in op.source().into_iter().chain([op.target()]) {
                if !is_declared(&cell) {
                    return Err(Error::Operand(format!(
                        "{name} step {}: undeclared cell {cell}",
                        i + 1
                    )));
                }
            }
        }
        if let Some((_, cell)) = outputs.iter().find(|(_, c)| !is_declared(c)) {
            return Err(Error::Config(format!(
                "{name}: undeclared output cell {cell}"
            )));
        }
        if let Some(cell) = preserved.iter().find(|c| !inputs.contains(c)) {
            return Err(Error::Config(format!(
                "{name}: preserved cell {cell} is not an input"
            )));
        }
        Ok(StepProgram {
            name,
            inputs,
            work,
            ops,
            outputs,
            preserved,
        })
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn inputs(&self) -> &[CellId] {
        &self.inputs
    }

    pub fn work_cells(&self) -> &[CellId] {
        &self.work
    }

    pub fn ops(&self) -> &[MicroOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn outputs(&self) -> &[(OutputRole, CellId)] {
        &self.outputs
    }

    pub fn output_cell(&self, role: OutputRole) -> Option<CellId> {
        self.outputs
            .iter()
            .find(|(r, _)| *r == role)
            .map(|&(_, c)| c)
    }

    /// Input cells whose level the program leaves untouched.
    pub fn preserved(&self) -> &[CellId] {
        &self.preserved
    }

    /// Renames every cell through `f`, e.g. to place a one-bit program at
    /// bit position `i` of a wider register file.
    pub fn relocate(&self, f: impl Fn(CellId) -> CellId) -> StepProgram {
        StepProgram {
            name: self.name,
            inputs: self.inputs.iter().map(|&c| f(c)).collect(),
            work: self.work.iter().map(|&c| f(c)).collect(),
            ops: self.ops.iter().map(|op| op.map_cells(&f)).collect(),
            outputs: self.outputs.iter().map(|&(r, c)| (r, f(c))).collect(),
            preserved: self.preserved.iter().map(|&c| f(c)).collect(),
        }
    }
}

/// Mutable register file of memristor cells with an always-on trace.
#[derive(Clone, Debug, Default)]
pub struct StepMachine {
    cells: BTreeMap<CellId, LogicLevel>,
    trace: Vec<TraceEntry>,
}

impl StepMachine {
    pub fn new(cells: impl IntoIterator<Item = (CellId, LogicLevel)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, level) in cells {
            if map.insert(id, level).is_some() {
                return Err(Error::Config(format!("cell {id} defined twice")));
            }
        }
        Ok(StepMachine {
            cells: map,
            trace: Vec::new(),
        })
    }

    /// Adds a cell in its initial state. Not a micro-op: allocation happens
    /// before execution, so nothing is traced.
    pub fn allocate(&mut self, id: CellId, level: LogicLevel) -> Result<()> {
        if self.cells.contains_key(&id) {
            return Err(Error::Config(format!("cell {id} defined twice")));
        }
        self.cells.insert(id, level);
        Ok(())
    }

    pub fn level(&self, id: CellId) -> Result<LogicLevel> {
        self.cells
            .get(&id)
            .copied()
            .ok_or_else(|| Error::Operand(format!("unknown cell {id}")))
    }

    pub fn cells(&self) -> &BTreeMap<CellId, LogicLevel> {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn into_parts(self) -> (BTreeMap<CellId, LogicLevel>, Vec<TraceEntry>) {
        (self.cells, self.trace)
    }

    pub fn apply_false(&mut self, target: CellId) -> Result<LogicLevel> {
        self.execute(MicroOp::False { target })
    }

    pub fn apply_imply(&mut self, source: CellId, target: CellId) -> Result<LogicLevel> {
        self.execute(MicroOp::Imply { source, target })
    }

    pub fn execute(&mut self, op: MicroOp) -> Result<LogicLevel> {
        let result = match op {
            MicroOp::False { target } => {
                self.level(target)?;
                LogicLevel::Zero
            }
            MicroOp::Imply { source, target } => {
                if source == target {
                    return Err(Error::Operand(format!(
                        "IMPLY source and target are both {source}"
                    )));
                }
                let p = self.level(source)?;
                let q = self.level(target)?;
                !p | q
            }
        };
        self.cells.insert(op.target(), result);
        self.trace.push(TraceEntry {
            step: self.trace.len() + 1,
            op,
            result,
        });
        Ok(result)
    }

    /// Executes every op of `program` in order against this machine's cells.
    pub fn run(&mut self, program: &StepProgram) -> Result<()> {
        for &op in program.ops() {
            self.execute(op)?;
        }
        Ok(())
    }
}

impl std::ops::BitOr for LogicLevel {
    type Output = LogicLevel;

    fn bitor(self, rhs: LogicLevel) -> LogicLevel {
        LogicLevel::from(self.is_one() || rhs.is_one())
    }
}

impl std::ops::BitAnd for LogicLevel {
    type Output = LogicLevel;

    fn bitand(self, rhs: LogicLevel) -> LogicLevel {
        LogicLevel::from(self.is_one() && rhs.is_one())
    }
}

impl std::ops::BitXor for LogicLevel {
    type Output = LogicLevel;

    fn bitxor(self, rhs: LogicLevel) -> LogicLevel {
        LogicLevel::from(self.is_one() != rhs.is_one())
    }
}

/// Outcome of running a [`StepProgram`] on a fresh machine.
#[derive(Clone, Debug)]
pub struct ProgramRun {
    pub outputs: BTreeMap<OutputRole, LogicLevel>,
    pub final_state: BTreeMap<CellId, LogicLevel>,
    pub trace: Vec<TraceEntry>,
}

impl ProgramRun {
    pub fn output(&self, role: OutputRole) -> LogicLevel {
        self.outputs[&role]
    }
}

/// Work cells start at 1 so a program that forgets its reset is caught.
pub const WORK_CELL_INITIAL: LogicLevel = LogicLevel::One;

/// Runs `program` on a fresh machine holding the bound inputs plus the
/// program's work cells.
pub fn run_program(program: &StepProgram, inputs: &[(CellId, LogicLevel)]) -> Result<ProgramRun> {
    for (cell, _) in inputs {
        if !program.inputs().contains(cell) {
            return Err(Error::Config(format!(
                "{}: {cell} is not a declared input",
                program.name()
            )));
        }
    }
    let mut cells = Vec::with_capacity(program.inputs().len() + program.work_cells().len());
    for &cell in program.inputs() {
        let level = inputs
            .iter()
            .find(|(c, _)| *c == cell)
            .map(|&(_, l)| l)
            .ok_or_else(|| Error::Config(format!("{}: input {cell} is unbound", program.name())))?;
        cells.push((cell, level));
    }
    cells.extend(program.work_cells().iter().map(|&c| (c, WORK_CELL_INITIAL)));

    let mut machine = StepMachine::new(cells)?;
    machine.run(program)?;
    let outputs = program
        .outputs()
        .iter()
        .map(|&(role, cell)| machine.level(cell).map(|l| (role, l)))
        .collect::<Result<_>>()?;
    let (final_state, trace) = machine.into_parts();
    Ok(ProgramRun {
        outputs,
        final_state,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use LogicLevel::{One, Zero};

    const P: CellId = CellId::new("P");
    const Q: CellId = CellId::new("Q");

    fn machine(p: LogicLevel, q: LogicLevel) -> StepMachine {
        StepMachine::new([(P, p), (Q, q)]).unwrap()
    }

    #[test]
    fn imply_truth_table() {
        for (p, q, expected) in [
            (Zero, Zero, One),
            (Zero, One, One),
            (One, Zero, Zero),
            (One, One, One),
        ] {
            let mut m = machine(p, q);
            assert_eq!(m.apply_imply(P, Q).unwrap(), expected);
            assert_eq!(m.level(Q).unwrap(), expected);
            assert_eq!(m.level(P).unwrap(), p, "source must not change");
        }
    }

    #[test]
    fn false_resets_only_the_target() {
        for start in [Zero, One] {
            let mut m = machine(One, start);
            m.apply_false(Q).unwrap();
            assert_eq!(m.level(Q).unwrap(), Zero);
            assert_eq!(m.level(P).unwrap(), One);
        }
    }

    #[test]
    fn operand_errors() {
        let mut m = machine(One, Zero);
        assert!(matches!(m.apply_imply(P, P), Err(Error::Operand(_))));
        assert!(matches!(
            m.apply_false(CellId::new("X")),
            Err(Error::Operand(_))
        ));
        assert!(matches!(
            m.apply_imply(CellId::new("X"), Q),
            Err(Error::Operand(_))
        ));
        assert!(m.trace().is_empty(), "failed ops must not be traced");
    }

    #[test]
    fn trace_records_every_step() {
        let mut m = machine(One, One);
        m.apply_false(Q).unwrap();
        m.apply_imply(P, Q).unwrap();
        m.apply_imply(Q, P).unwrap();
        assert_eq!(m.trace().len(), 3);
        let mut buf = Vec::new();
        write_trace(&mut buf, m.trace()).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "step=1 op=FALSE src=- dst=Q[0] result=0\n\
             step=2 op=IMPLY src=P[0] dst=Q[0] result=0\n\
             step=3 op=IMPLY src=Q[0] dst=P[0] result=1\n"
        );
    }

    #[test]
    fn duplicate_cells_rejected() {
        assert!(StepMachine::new([(P, One), (P, Zero)]).is_err());
    }

    #[test]
    fn program_validation() {
        let undeclared = StepProgram::new(
            "bad",
            vec![P],
            vec![],
            vec![MicroOp::Imply {
                source: P,
                target: Q,
            }],
            vec![],
            vec![],
        );
        assert!(matches!(undeclared, Err(Error::Operand(_))));

        let self_imply = StepProgram::new(
            "bad",
            vec![P],
            vec![],
            vec![MicroOp::Imply {
                source: P,
                target: P,
            }],
            vec![],
            vec![],
        );
        assert!(matches!(self_imply, Err(Error::Operand(_))));
    }

    #[test]
    fn unbound_input_is_a_config_error() {
        let prog = StepProgram::new(
            "nand",
            vec![P, Q],
            vec![],
            vec![MicroOp::Imply {
                source: P,
                target: Q,
            }],
            vec![(OutputRole::Sum, Q)],
            vec![P],
        )
        .unwrap();
        assert!(matches!(
            run_program(&prog, &[(P, One)]),
            Err(Error::Config(_))
        ));
        let run = run_program(&prog, &[(P, One), (Q, Zero)]).unwrap();
        assert_eq!(run.output(OutputRole::Sum), Zero);
        assert_eq!(run.final_state[&P], One);
    }

    #[test]
    fn relocate_moves_every_cell() {
        let prog = StepProgram::new(
            "p",
            vec![P],
            vec![Q],
            vec![
                MicroOp::False { target: Q },
                MicroOp::Imply {
                    source: P,
                    target: Q,
                },
            ],
            vec![(OutputRole::Sum, Q)],
            vec![P],
        )
        .unwrap();
        let moved = prog.relocate(|c| c.at(5));
        assert_eq!(moved.output_cell(OutputRole::Sum), Some(Q.at(5)));
        assert!(moved.ops().iter().all(|op| op.target().bit() == 5));
    }
}
