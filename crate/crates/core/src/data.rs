//! Domain types: labeled points, judged pairs, and joint distributions.

use std::fmt;

use crate::error::Error;

/// Label domain of a point set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Labels and predictions are 0/1 class indicators.
    Binary,
    /// Labels and predictions are real-valued scores.
    Continuous,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Binary => write!(f, "binary"),
            Mode::Continuous => write!(f, "continuous"),
        }
    }
}

/// Sensitive group of a data point. Everything in this crate is stated for
/// exactly two groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Group {
    Zero,
    One,
}

impl Group {
    pub const BOTH: [Group; 2] = [Group::Zero, Group::One];

    pub fn from_bit(bit: u8) -> Option<Group> {
        match bit {
            0 => Some(Group::Zero),
            1 => Some(Group::One),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Group::Zero => 0,
            Group::One => 1,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Ordered pair of sensitive groups `(a_i, a_j)` of a compared item pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupPair {
    pub first: Group,
    pub second: Group,
}

impl GroupPair {
    /// All four group pairs, in the order reports present them.
    pub const ALL: [GroupPair; 4] = [
        GroupPair {
            first: Group::One,
            second: Group::One,
        },
        GroupPair {
            first: Group::One,
            second: Group::Zero,
        },
        GroupPair {
            first: Group::Zero,
            second: Group::One,
        },
        GroupPair {
            first: Group::Zero,
            second: Group::Zero,
        },
    ];

    pub fn new(first: Group, second: Group) -> GroupPair {
        GroupPair { first, second }
    }

    /// Swap the two sides; an involution.
    pub fn reversed(self) -> GroupPair {
        GroupPair {
            first: self.second,
            second: self.first,
        }
    }
}

impl fmt::Display for GroupPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// One test instance: ground truth `y`, model prediction `c`, group `a`.
/// Feature vectors are never stored; they play no role in evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledPoint {
    pub y: f64,
    pub c: f64,
    pub a: Group,
}

impl LabeledPoint {
    pub fn new(y: f64, c: f64, a: Group) -> LabeledPoint {
        LabeledPoint { y, c, a }
    }

    /// True when both label and prediction are 0/1.
    pub fn is_binary(&self) -> bool {
        (self.y == 0.0 || self.y == 1.0) && (self.c == 0.0 || self.c == 1.0)
    }
}

/// A nonempty, validated collection of labeled points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<LabeledPoint>,
    mode: Mode,
}

impl PointSet {
    /// Validates that the set is nonempty and, in binary mode, that every
    /// point carries 0/1 labels and predictions.
    pub fn new(points: Vec<LabeledPoint>, mode: Mode) -> Result<PointSet, Error> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        if mode == Mode::Binary {
            for (index, p) in points.iter().enumerate() {
                if !p.is_binary() {
                    return Err(Error::NonBinaryPoint {
                        index,
                        y: p.y,
                        c: p.c,
                    });
                }
            }
        }
        Ok(PointSet { points, mode })
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Comparative ground truth: the sign of `y_i - y_j`. Ties are not
/// representable; tied draws are discarded at pairing time and counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairLabel {
    Pos,
    Neg,
}

impl PairLabel {
    pub fn value(self) -> i8 {
        match self {
            PairLabel::Pos => 1,
            PairLabel::Neg => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<PairLabel> {
        match v {
            1 => Some(PairLabel::Pos),
            -1 => Some(PairLabel::Neg),
            _ => None,
        }
    }

    /// Sign of a difference; `None` when the difference is zero.
    pub fn from_sign_of(diff: f64) -> Option<PairLabel> {
        if diff > 0.0 {
            Some(PairLabel::Pos)
        } else if diff < 0.0 {
            Some(PairLabel::Neg)
        } else {
            None
        }
    }

    pub fn flipped(self) -> PairLabel {
        match self {
            PairLabel::Pos => PairLabel::Neg,
            PairLabel::Neg => PairLabel::Pos,
        }
    }
}

/// Comparative prediction: the sign of `c_i - c_j`. Prediction ties are
/// allowed and count as non-positive outcomes in every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairPrediction {
    Pos,
    Tie,
    Neg,
}

impl PairPrediction {
    pub fn value(self) -> i8 {
        match self {
            PairPrediction::Pos => 1,
            PairPrediction::Tie => 0,
            PairPrediction::Neg => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<PairPrediction> {
        match v {
            1 => Some(PairPrediction::Pos),
            0 => Some(PairPrediction::Tie),
            -1 => Some(PairPrediction::Neg),
            _ => None,
        }
    }

    pub fn from_sign_of(diff: f64) -> PairPrediction {
        if diff > 0.0 {
            PairPrediction::Pos
        } else if diff < 0.0 {
            PairPrediction::Neg
        } else {
            PairPrediction::Tie
        }
    }

    pub fn flipped(self) -> PairPrediction {
        match self {
            PairPrediction::Pos => PairPrediction::Neg,
            PairPrediction::Tie => PairPrediction::Tie,
            PairPrediction::Neg => PairPrediction::Pos,
        }
    }
}

/// One comparative judgment between two items.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JudgedPair {
    pub groups: GroupPair,
    pub label: PairLabel,
    pub prediction: PairPrediction,
}

impl JudgedPair {
    pub fn new(groups: GroupPair, label: PairLabel, prediction: PairPrediction) -> JudgedPair {
        JudgedPair {
            groups,
            label,
            prediction,
        }
    }

    /// The same judgment seen from the other side: groups swapped, label and
    /// prediction negated. Estimators are invariant under this flip.
    pub fn reversed(self) -> JudgedPair {
        JudgedPair {
            groups: self.groups.reversed(),
            label: self.label.flipped(),
            prediction: self.prediction.flipped(),
        }
    }
}

/// A collection of judged pairs plus the count of sampled pairs that were
/// dropped because their ground truths tied. Dropped pairs still cost
/// annotation budget, so the count is kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSet {
    pairs: Vec<JudgedPair>,
    discarded_ties: u64,
}

impl PairSet {
    pub fn new(pairs: Vec<JudgedPair>, discarded_ties: u64) -> PairSet {
        PairSet {
            pairs,
            discarded_ties,
        }
    }

    pub fn pairs(&self) -> &[JudgedPair] {
        &self.pairs
    }

    pub fn discarded_ties(&self) -> u64 {
        self.discarded_ties
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Canonical cell order for an 8-cell `(c, y, a)` probability table: the
/// serialization order of distribution files.
pub const CELL_ORDER: [(u8, u8, u8); 8] = [
    (1, 1, 1),
    (0, 1, 1),
    (1, 0, 1),
    (0, 0, 1),
    (1, 1, 0),
    (0, 1, 0),
    (1, 0, 0),
    (0, 0, 0),
];

/// Absolute tolerance on the cell sum of a joint distribution. Cells in
/// distribution files are short decimals; this only absorbs their parsing.
pub const PROB_SUM_TOLERANCE: f64 = 1e-9;

/// Ground-truth joint distribution over `(C, Y, A)`: eight probabilities
/// that fully determine a simulated classifier's fairness behavior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    /// Stored in `CELL_ORDER`.
    cells: [f64; 8],
}

impl JointDistribution {
    /// Builds a distribution from cells given in `CELL_ORDER`.
    ///
    /// Every cell must be finite and nonnegative, the cells must sum to 1
    /// within `PROB_SUM_TOLERANCE`, and every marginal `P(Y=y, A=a)` must be
    /// positive so that conditional rates exist.
    pub fn from_cells(cells: [f64; 8]) -> Result<JointDistribution, Error> {
        for (i, &v) in cells.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                let (c, y, a) = CELL_ORDER[i];
                return Err(Error::Distribution(format!(
                    "cell p(c={c},y={y},a={a}) = {v} is not a probability"
                )));
            }
        }
        let sum: f64 = cells.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
            return Err(Error::Distribution(format!(
                "cells sum to {sum}, expected 1 within {PROB_SUM_TOLERANCE:e}"
            )));
        }
        let d = JointDistribution { cells };
        for y in [0u8, 1u8] {
            for a in [0u8, 1u8] {
                if d.marginal_ya(y, a) <= 0.0 {
                    return Err(Error::Distribution(format!(
                        "marginal P(Y={y}, A={a}) must be positive"
                    )));
                }
            }
        }
        Ok(d)
    }

    /// Skips all validation. Only for constructing degenerate tables in
    /// tests; every public code path goes through `from_cells`.
    #[doc(hidden)]
    pub fn from_cells_unchecked(cells: [f64; 8]) -> JointDistribution {
        JointDistribution { cells }
    }

    /// `P(C=c, Y=y, A=a)`.
    pub fn cell(&self, c: u8, y: u8, a: u8) -> f64 {
        debug_assert!(c <= 1 && y <= 1 && a <= 1);
        let idx = (1 - a as usize) * 4 + (1 - y as usize) * 2 + (1 - c as usize);
        self.cells[idx]
    }

    /// Cells in `CELL_ORDER`.
    pub fn cells(&self) -> [f64; 8] {
        self.cells
    }

    /// `P(Y=y, A=a)`.
    pub fn marginal_ya(&self, y: u8, a: u8) -> f64 {
        self.cell(0, y, a) + self.cell(1, y, a)
    }
}
