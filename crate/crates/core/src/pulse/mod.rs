//! X-pulse decoupling schedules that turn a uniform lattice Ising resource
//! (`+Z Z` on every lattice bond) into a target lattice Hamiltonian.
//!
//! Each of four subroutines conjugates the resource by bit flips chosen from
//! the columns of a 4×4 Hadamard matrix. A bond between sites carrying
//! columns `v` and `v'` picks up the coefficient `Σ_s d_s v_s v'_s`, so
//! equal columns keep it and orthogonal columns cancel it.
//!
//! | # | selects            | column parity | propagation    | step length |
//! |---|--------------------|---------------|----------------|-------------|
//! | 1 | horizontal `+1`    | row           | left to right  | 1/4         |
//! | 2 | vertical `+1`      | column        | top to bottom  | 1/4         |
//! | 3 | horizontal `−c`    | row           | left to right  | c/4, sign `(−1)^col` |
//! | 4 | vertical `−c`      | column        | top to bottom  | c/4, sign `(−1)^row` |
//!
//! The field-free resource cannot produce the `+1` vertex fields; a separate
//! local-field epoch applies them directly.

mod engine;
mod program;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::GridPoint;
use crate::hamiltonian::LatticeHamiltonian;
use crate::Rational;

pub use engine::{average_hamiltonian, verify_schedule, BondMismatch, EffectiveCoupling, FieldMismatch, ScheduleReport};
pub use program::{pulse_level_evolve, PulseOp, PulseProgram, Propagator, MAX_PROPAGATOR_SITES};

pub const STEPS_PER_SUBROUTINE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PulseError {
    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),
    #[error("flip mask references {at} outside the {rows}x{cols} grid")]
    SiteOutsideGrid { at: GridPoint, rows: usize, cols: usize },
    #[error("{sites} sites exceed the propagator limit of {limit}")]
    TooManySites { sites: usize, limit: usize },
    #[error("compiled schedule does not reproduce the Hamiltonian: {0}")]
    VerificationFailed(String),
    #[error("malformed schedule: {0}")]
    Malformed(String),
}

/// Column `W(a, b)` of the 4×4 Sylvester–Hadamard matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HadamardColumn {
    pub a: u8,
    pub b: u8,
    pub entries: [i8; 4],
}

impl HadamardColumn {
    pub fn dot(&self, other: &HadamardColumn) -> i64 {
        self.entries.iter().zip(other.entries).map(|(&x, y)| (x * y) as i64).sum()
    }
}

pub fn hadamard_column(a: u8, b: u8) -> HadamardColumn {
    let (a, b) = (a & 1, b & 1);
    // Entry s = (s1, s0) is (-1)^(a·s1 + b·s0).
    let entries = [0u8, 1, 2, 3].map(|s| if (a & (s >> 1)) ^ (b & s & 1) == 1 { -1 } else { 1 });
    HadamardColumn { a, b, entries }
}

/// Signed column `sign · W(a, b)` held by one site during a subroutine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SiteColumn {
    pub a: u8,
    pub b: u8,
    pub sign: i8,
}

impl SiteColumn {
    pub fn entries(&self) -> [i8; 4] {
        hadamard_column(self.a, self.b).entries.map(|e| e * self.sign)
    }
}

impl fmt::Display for SiteColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign < 0 { "-" } else { "" };
        write!(f, "{}W({},{})", sign, self.a, self.b)
    }
}

impl FromStr for SiteColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (sign, rest) = match s.strip_prefix('-') {
            Some(r) => (-1, r),
            None => (1, s),
        };
        let bad = || format!("column must look like \"W(a,b)\" or \"-W(a,b)\", got {:?}", s);
        let inner = rest.strip_prefix("W(").and_then(|r| r.strip_suffix(')')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(',').ok_or_else(bad)?;
        let bit = |t: &str| match t.trim() {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(bad()),
        };
        Ok(SiteColumn { a: bit(a)?, b: bit(b)?, sign })
    }
}

impl TryFrom<String> for SiteColumn {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SiteColumn> for String {
    fn from(c: SiteColumn) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubroutineKind {
    HorizontalAntiferromagnetic,
    VerticalAntiferromagnetic,
    HorizontalFerromagnetic,
    VerticalFerromagnetic,
}

impl SubroutineKind {
    pub const ALL: [SubroutineKind; 4] = [
        SubroutineKind::HorizontalAntiferromagnetic,
        SubroutineKind::VerticalAntiferromagnetic,
        SubroutineKind::HorizontalFerromagnetic,
        SubroutineKind::VerticalFerromagnetic,
    ];

    /// 1-based position in the schedule.
    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i.wrapping_sub(1)).copied()
    }

    fn vertical(self) -> bool {
        matches!(self, SubroutineKind::VerticalAntiferromagnetic | SubroutineKind::VerticalFerromagnetic)
    }

    fn ferromagnetic(self) -> bool {
        matches!(self, SubroutineKind::HorizontalFerromagnetic | SubroutineKind::VerticalFerromagnetic)
    }

    pub fn step_duration(self, c: i64) -> Rational {
        if self.ferromagnetic() {
            Rational::new(c, 4)
        } else {
            Rational::new(1, 4)
        }
    }
}

/// Per-site columns for one subroutine over the full grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnAssignment {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<SiteColumn>,
}

impl ColumnAssignment {
    pub fn get(&self, p: GridPoint) -> SiteColumn {
        self.columns[p.row * self.cols + p.col]
    }

    /// Sites flipped around step `s`: those whose signed entry is `−1`.
    pub fn flip_mask(&self, s: usize) -> BTreeSet<GridPoint> {
        (0..self.rows)
            .flat_map(|r| (0..self.cols).map(move |c| GridPoint::new(r, c)))
            .filter(|&p| self.get(p).entries()[s] < 0)
            .collect()
    }
}

/// Columns for subroutine `kind`.
///
/// Parity of the row (columns for vertical kinds) fixes `a`, which makes
/// every bond across the propagation direction cancel. Along the
/// propagation direction `b` stays equal over bonds the subroutine must
/// keep and flips over every other bond, unused sites included.
pub fn assign_columns(h: &LatticeHamiltonian, kind: SubroutineKind) -> ColumnAssignment {
    let (rows, cols) = (h.grid_rows, h.grid_cols);
    let weights = h.bond_weights();
    let target = if kind.ferromagnetic() { -h.c } else { 1 };
    let keep = |p: GridPoint, q: GridPoint| weights.get(&(p.min(q), p.max(q))) == Some(&target);
    let mut columns = vec![SiteColumn { a: 0, b: 0, sign: 1 }; rows * cols];
    let (lines, len) = if kind.vertical() { (cols, rows) } else { (rows, cols) };
    let at = |line: usize, i: usize| if kind.vertical() { GridPoint::new(i, line) } else { GridPoint::new(line, i) };
    for line in 0..lines {
        let a = (line % 2) as u8;
        let mut b = 0u8;
        for i in 0..len {
            if i > 0 && !keep(at(line, i - 1), at(line, i)) {
                b ^= 1;
            }
            let sign = if kind.ferromagnetic() && i % 2 == 1 { -1 } else { 1 };
            let p = at(line, i);
            columns[p.row * cols + p.col] = SiteColumn { a, b, sign };
        }
    }
    ColumnAssignment { rows, cols, columns }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseStep {
    /// Sites receiving an X pulse at the start and at the end of the step.
    pub flip_mask: BTreeSet<GridPoint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subroutine {
    pub index: usize,
    pub kind: SubroutineKind,
    #[serde(with = "ratio_text")]
    pub step_duration: Rational,
    pub steps: Vec<PulseStep>,
    /// Column per site, one row of the grid per entry.
    pub columns: Vec<Vec<SiteColumn>>,
}

impl Subroutine {
    pub fn from_columns(kind: SubroutineKind, step_duration: Rational, assignment: &ColumnAssignment) -> Self {
        Subroutine {
            index: kind.index(),
            kind,
            step_duration,
            steps: (0..STEPS_PER_SUBROUTINE).map(|s| PulseStep { flip_mask: assignment.flip_mask(s) }).collect(),
            columns: assignment.columns.chunks(assignment.cols.max(1)).map(<[SiteColumn]>::to_vec).collect(),
        }
    }

    pub fn duration(&self) -> Rational {
        self.step_duration * Rational::from_integer(self.steps.len() as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldTerm {
    pub at: GridPoint,
    pub z: i64,
}

/// Direct application of the vertex fields; not reachable by flips of a field-free resource.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFieldEpoch {
    #[serde(with = "ratio_text")]
    pub duration: Rational,
    pub fields: Vec<FieldTerm>,
    pub requires_native_local_control: bool,
}

/// Row-parity column sets in use, and how they differ from the alternative listing.
pub const ROW_PARITY_NOTE: &str = "even lines use W(0,0)/W(0,1) and odd lines W(1,0)/W(1,1); \
the listing {W(0,0),W(1,0)} / {W(1,0),W(1,1)} would leave two vertically adjacent W(1,0) sites coupled";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub grid: [usize; 2],
    pub c: i64,
    pub subroutines: Vec<Subroutine>,
    pub local_field_epoch: LocalFieldEpoch,
    pub row_parity_note: String,
}

impl PulseSchedule {
    pub fn rows(&self) -> usize {
        self.grid[0]
    }

    pub fn cols(&self) -> usize {
        self.grid[1]
    }

    pub fn step_count(&self) -> usize {
        self.subroutines.iter().map(|s| s.steps.len()).sum()
    }

    /// Time spent in the coupling subroutines.
    pub fn coupling_duration(&self) -> Rational {
        self.subroutines.iter().map(Subroutine::duration).sum()
    }

    pub fn total_duration(&self) -> Rational {
        self.coupling_duration() + self.local_field_epoch.duration
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("schedule serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, PulseError> {
        let s: PulseSchedule = serde_json::from_str(text).map_err(|e| PulseError::Malformed(e.to_string()))?;
        for sub in &s.subroutines {
            if sub.columns.len() != s.rows() || sub.columns.iter().any(|r| r.len() != s.cols()) {
                return Err(PulseError::Malformed(format!("subroutine {} columns do not cover the grid", sub.index)));
            }
        }
        Ok(s)
    }
}

/// Compiles `h` into the four-subroutine schedule and checks it with the exact engine.
pub fn compile_schedule(h: &LatticeHamiltonian) -> Result<PulseSchedule, PulseError> {
    if let Some(p) = h.problems().into_iter().next() {
        return Err(PulseError::InvalidHamiltonian(p));
    }
    let subroutines = SubroutineKind::ALL
        .iter()
        .map(|&kind| Subroutine::from_columns(kind, kind.step_duration(h.c), &assign_columns(h, kind)))
        .collect();
    let schedule = PulseSchedule {
        grid: [h.grid_rows, h.grid_cols],
        c: h.c,
        subroutines,
        local_field_epoch: LocalFieldEpoch {
            duration: Rational::from_integer(1),
            fields: h.sites().iter().filter(|s| s.z_field != 0).map(|s| FieldTerm { at: s.at, z: s.z_field }).collect(),
            requires_native_local_control: true,
        },
        row_parity_note: ROW_PARITY_NOTE.into(),
    };
    let report = verify_schedule(&schedule, h);
    if !report.passes() {
        return Err(PulseError::VerificationFailed(report.summary()));
    }
    Ok(schedule)
}

/// Rationals as `"p/q"` strings (`"1"` when integral).
mod ratio_text {
    use crate::Rational;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse::<Rational>().map_err(|e| D::Error::custom(format!("bad rational {:?}: {}", text, e)))
    }
}
