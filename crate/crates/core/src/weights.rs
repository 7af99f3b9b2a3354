//! Per-(group, label) training sample weights for the two discrete
//! bias-mitigation preprocessors.
//!
//! Reweighing assigns `w(a,y) = |A=a| * |Y=y| / |A=a, Y=y|` so that the
//! weighted joint mass is proportional to the product of the marginals.
//! This is the unnormalized form (no division by the dataset size); any
//! global scaling of weights leaves weighted empirical distributions
//! proportionally identical. FairBalance assigns `w(a,y) = |A=a| / |A=a,
//! Y=y|`, which makes the weighted class distribution within every group
//! 1:1.

use std::collections::BTreeMap;
use std::fmt;

use crate::data::{Group, Mode, PointSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    None,
    Reweighing,
    FairBalance,
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::None => write!(f, "none"),
            WeightScheme::Reweighing => write!(f, "reweighing"),
            WeightScheme::FairBalance => write!(f, "fairbalance"),
        }
    }
}

/// One weight per populated `(a, y)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub scheme: WeightScheme,
    entries: BTreeMap<(u8, u8), f64>,
}

impl WeightTable {
    pub fn weight(&self, a: Group, y: u8) -> Option<f64> {
        self.entries.get(&(a.bit(), y)).copied()
    }

    /// Entries as `((a, y), weight)` in deterministic order.
    pub fn entries(&self) -> impl Iterator<Item = ((u8, u8), f64)> + '_ {
        self.entries.iter().map(|(&k, &v)| (k, v))
    }

    /// The weight column for a point set: one weight per point, in row
    /// order. Errors if a point falls in a cell the table has no entry for.
    pub fn per_point(&self, set: &PointSet) -> Result<Vec<f64>> {
        set.points()
            .iter()
            .map(|p| {
                let y = p.y as u8;
                self.weight(p.a, y)
                    .ok_or(Error::EmptyWeightCell { a: p.a.bit(), y })
            })
            .collect()
    }
}

/// Computes the weight table for a binary point set. Only ground-truth
/// labels and groups are consulted; predictions are ignored.
///
/// Reweighing and FairBalance require every `(a, y)` cell to be populated;
/// scheme `none` assigns weight 1 to each populated cell.
pub fn compute_weights(set: &PointSet, scheme: WeightScheme) -> Result<WeightTable> {
    if set.mode() != Mode::Binary {
        return Err(Error::BinaryModeRequired);
    }
    let mut cell = [[0u64; 2]; 2]; // [a][y]
    for p in set.points() {
        cell[p.a.bit() as usize][p.y as usize] += 1;
    }
    let n_a = [cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]];
    let n_y = [cell[0][0] + cell[1][0], cell[0][1] + cell[1][1]];

    let mut entries = BTreeMap::new();
    for (a, y) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1)] {
        match scheme {
            WeightScheme::None => {
                if cell[a][y] > 0 {
                    entries.insert((a as u8, y as u8), 1.0);
                }
            }
            WeightScheme::Reweighing | WeightScheme::FairBalance => {
                if cell[a][y] == 0 {
                    return Err(Error::EmptyWeightCell {
                        a: a as u8,
                        y: y as u8,
                    });
                }
                let w = match scheme {
                    WeightScheme::Reweighing => (n_a[a] * n_y[y]) as f64 / cell[a][y] as f64,
                    WeightScheme::FairBalance => n_a[a] as f64 / cell[a][y] as f64,
                    WeightScheme::None => unreachable!(),
                };
                entries.insert((a as u8, y as u8), w);
            }
        }
    }
    Ok(WeightTable { scheme, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabeledPoint;
    use approx::assert_abs_diff_eq;

    fn set_with_counts(counts: [[u64; 2]; 2]) -> PointSet {
        // counts[a][y]
        let mut pts = Vec::new();
        for a in 0..2u8 {
            for y in 0..2u8 {
                for _ in 0..counts[a as usize][y as usize] {
                    pts.push(LabeledPoint::new(
                        y as f64,
                        y as f64,
                        Group::from_bit(a).unwrap(),
                    ));
                }
            }
        }
        PointSet::new(pts, Mode::Binary).unwrap()
    }

    #[test]
    fn fairbalance_from_stated_counts() {
        // |A=1| = 100 with 80 positives and 20 negatives; group 0 arbitrary.
        let s = set_with_counts([[50, 50], [20, 80]]);
        let t = compute_weights(&s, WeightScheme::FairBalance).unwrap();
        assert_eq!(t.weight(Group::One, 1), Some(1.25));
        assert_eq!(t.weight(Group::One, 0), Some(5.0));
    }

    #[test]
    fn balanced_set_gives_flat_weights() {
        let n = 48u64;
        let s = set_with_counts([[n / 4, n / 4], [n / 4, n / 4]]);
        let rw = compute_weights(&s, WeightScheme::Reweighing).unwrap();
        let fb = compute_weights(&s, WeightScheme::FairBalance).unwrap();
        for (_, w) in rw.entries() {
            assert_eq!(w, n as f64); // (n/2)(n/2)/(n/4)
        }
        for (_, w) in fb.entries() {
            assert_eq!(w, 2.0);
        }
    }

    #[test]
    fn scheme_none_is_all_ones() {
        let s = set_with_counts([[3, 0], [2, 5]]);
        let t = compute_weights(&s, WeightScheme::None).unwrap();
        assert_eq!(t.entries().count(), 3); // only populated cells
        assert!(t.entries().all(|(_, w)| w == 1.0));
        assert_eq!(t.per_point(&s).unwrap(), vec![1.0; s.len()]);
    }

    #[test]
    fn empty_cell_is_an_error_for_real_schemes() {
        let s = set_with_counts([[3, 0], [2, 5]]);
        match compute_weights(&s, WeightScheme::Reweighing).unwrap_err() {
            Error::EmptyWeightCell { a: 0, y: 1 } => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fairbalance_equalizes_class_mass_within_groups() {
        let s = set_with_counts([[37, 11], [5, 93]]);
        let t = compute_weights(&s, WeightScheme::FairBalance).unwrap();
        // count(a,y) * w(a,y) = |A=a| for both y.
        assert_abs_diff_eq!(
            37.0 * t.weight(Group::Zero, 0).unwrap(),
            48.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            11.0 * t.weight(Group::Zero, 1).unwrap(),
            48.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            5.0 * t.weight(Group::One, 0).unwrap(),
            98.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            93.0 * t.weight(Group::One, 1).unwrap(),
            98.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn reweighing_mass_matches_marginal_product() {
        let s = set_with_counts([[7, 21], [13, 3]]);
        let t = compute_weights(&s, WeightScheme::Reweighing).unwrap();
        let n_a = [28.0, 16.0];
        let n_y = [20.0, 24.0];
        let cell = [[7.0, 21.0], [13.0, 3.0]];
        for a in 0..2usize {
            for y in 0..2usize {
                let mass = cell[a][y]
                    * t.weight(Group::from_bit(a as u8).unwrap(), y as u8)
                        .unwrap();
                assert_abs_diff_eq!(mass, n_a[a] * n_y[y], epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn fairbalance_is_invariant_under_duplication() {
        let base = [[37, 11], [5, 93]];
        let doubled = [[74, 22], [10, 186]];
        let t1 = compute_weights(&set_with_counts(base), WeightScheme::FairBalance).unwrap();
        let t2 = compute_weights(&set_with_counts(doubled), WeightScheme::FairBalance).unwrap();
        for ((k1, w1), (k2, w2)) in t1.entries().zip(t2.entries()) {
            assert_eq!(k1, k2);
            // IEEE division of exactly-scaled integers rounds identically.
            assert_eq!(w1, w2);
        }
    }
}
