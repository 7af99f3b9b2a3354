//! Group-conditional rate estimators on pointwise test data, and their
//! analytic counterparts on a joint distribution.

use crate::data::{Group, JointDistribution, Mode, PointSet};
use crate::error::{Error, Result};

/// Group-conditional true/false positive rates plus the supporting stratum
/// sizes. Estimated tables carry whole-number counts; analytic tables carry
/// the marginal probabilities `P(Y=y, A=a)` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupRates {
    pub tpr_a1: f64,
    pub tpr_a0: f64,
    pub fpr_a1: f64,
    pub fpr_a0: f64,
    /// |{Y=1, A=1}|
    pub n_t1: f64,
    /// |{Y=1, A=0}|
    pub n_t0: f64,
    /// |{Y=0, A=1}|
    pub n_f1: f64,
    /// |{Y=0, A=0}|
    pub n_f0: f64,
}

impl GroupRates {
    pub fn tpr(&self, a: Group) -> f64 {
        match a {
            Group::One => self.tpr_a1,
            Group::Zero => self.tpr_a0,
        }
    }

    pub fn fpr(&self, a: Group) -> f64 {
        match a {
            Group::One => self.fpr_a1,
            Group::Zero => self.fpr_a0,
        }
    }

    pub fn tnr(&self, a: Group) -> f64 {
        1.0 - self.fpr(a)
    }

    /// Positive-stratum size |{Y=1, A=a}|.
    pub fn n_t(&self, a: Group) -> f64 {
        match a {
            Group::One => self.n_t1,
            Group::Zero => self.n_t0,
        }
    }

    /// Negative-stratum size |{Y=0, A=a}|.
    pub fn n_f(&self, a: Group) -> f64 {
        match a {
            Group::One => self.n_f1,
            Group::Zero => self.n_f0,
        }
    }
}

/// Counts exact rate ratios on a binary point set.
///
/// Every `(y, a)` stratum must be populated; an empty stratum is an error
/// naming the cell, because rates (and everything downstream) are undefined
/// there.
pub fn estimate_group_rates(set: &PointSet) -> Result<GroupRates> {
    if set.mode() != Mode::Binary {
        return Err(Error::BinaryModeRequired);
    }
    // positives[y][a], totals[y][a]
    let mut positives = [[0u64; 2]; 2];
    let mut totals = [[0u64; 2]; 2];
    for p in set.points() {
        let y = p.y as usize;
        let a = p.a.bit() as usize;
        totals[y][a] += 1;
        if p.c == 1.0 {
            positives[y][a] += 1;
        }
    }
    for y in [1u8, 0u8] {
        for a in [1u8, 0u8] {
            if totals[y as usize][a as usize] == 0 {
                return Err(Error::DegenerateStratum { y, a });
            }
        }
    }
    let rate = |y: usize, a: usize| positives[y][a] as f64 / totals[y][a] as f64;
    Ok(GroupRates {
        tpr_a1: rate(1, 1),
        tpr_a0: rate(1, 0),
        fpr_a1: rate(0, 1),
        fpr_a0: rate(0, 0),
        n_t1: totals[1][1] as f64,
        n_t0: totals[1][0] as f64,
        n_f1: totals[0][1] as f64,
        n_f0: totals[0][0] as f64,
    })
}

/// Equal-opportunity difference and average odds difference:
/// `eod = tpr_a1 - tpr_a0`, `aod = (eod + fpr_a1 - fpr_a0) / 2`.
pub fn eod_aod(rates: &GroupRates) -> (f64, f64) {
    let eod = rates.tpr_a1 - rates.tpr_a0;
    let aod = 0.5 * (eod + rates.fpr_a1 - rates.fpr_a0);
    (eod, aod)
}

/// Exact conditional rates of a joint distribution; the count fields hold
/// the marginals `P(Y=y, A=a)`.
pub fn analytic_group_rates(d: &JointDistribution) -> GroupRates {
    let rate = |y: u8, a: u8| d.cell(1, y, a) / d.marginal_ya(y, a);
    GroupRates {
        tpr_a1: rate(1, 1),
        tpr_a0: rate(1, 0),
        fpr_a1: rate(0, 1),
        fpr_a0: rate(0, 0),
        n_t1: d.marginal_ya(1, 1),
        n_t0: d.marginal_ya(1, 0),
        n_f1: d.marginal_ya(0, 1),
        n_f0: d.marginal_ya(0, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabeledPoint;
    use approx::assert_abs_diff_eq;

    fn point(y: f64, c: f64, a: u8) -> LabeledPoint {
        LabeledPoint::new(y, c, Group::from_bit(a).unwrap())
    }

    #[test]
    fn four_point_example_hits_degenerate_stratum() {
        // No (Y=0, A=1) point, so FPR(A=1) is undefined.
        let s = PointSet::new(
            vec![
                point(1.0, 1.0, 1),
                point(1.0, 0.0, 1),
                point(1.0, 1.0, 0),
                point(0.0, 0.0, 0),
            ],
            Mode::Binary,
        )
        .unwrap();
        match estimate_group_rates(&s).unwrap_err() {
            Error::DegenerateStratum { y: 0, a: 1 } => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn counting_matches_hand_enumeration() {
        // Same as above plus one (Y=0, A=1) point to populate every stratum.
        let s = PointSet::new(
            vec![
                point(1.0, 1.0, 1),
                point(1.0, 0.0, 1),
                point(1.0, 1.0, 0),
                point(0.0, 0.0, 0),
                point(0.0, 1.0, 1),
            ],
            Mode::Binary,
        )
        .unwrap();
        let r = estimate_group_rates(&s).unwrap();
        assert_eq!(r.tpr_a1, 0.5);
        assert_eq!(r.tpr_a0, 1.0);
        assert_eq!(r.fpr_a0, 0.0);
        assert_eq!(r.fpr_a1, 1.0);
        assert_eq!(r.n_t1 + r.n_t0 + r.n_f1 + r.n_f0, s.len() as f64);
    }

    #[test]
    fn perfect_predictor_has_unit_tpr_zero_fpr() {
        let mut pts = Vec::new();
        for y in [0.0, 1.0] {
            for a in [0, 1] {
                for _ in 0..3 {
                    pts.push(point(y, y, a));
                }
            }
        }
        let r = estimate_group_rates(&PointSet::new(pts, Mode::Binary).unwrap()).unwrap();
        assert_eq!(
            (r.tpr_a1, r.tpr_a0, r.fpr_a1, r.fpr_a0),
            (1.0, 1.0, 0.0, 0.0)
        );
        let (eod, aod) = eod_aod(&r);
        assert_eq!((eod, aod), (0.0, 0.0));
    }

    #[test]
    fn continuous_mode_is_rejected() {
        let s = PointSet::new(vec![point(1.0, 1.0, 1)], Mode::Continuous).unwrap();
        assert!(matches!(
            estimate_group_rates(&s),
            Err(Error::BinaryModeRequired)
        ));
    }

    #[test]
    fn analytic_rates_of_reference_distributions() {
        let fair =
            JointDistribution::from_cells([0.220, 0.055, 0.090, 0.135, 0.180, 0.045, 0.110, 0.165])
                .unwrap();
        let r = analytic_group_rates(&fair);
        assert_abs_diff_eq!(r.tpr_a1, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tpr_a0, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(r.fpr_a1 - r.fpr_a0, 0.0, epsilon = 1e-15);

        let fpr_gap =
            JointDistribution::from_cells([0.220, 0.055, 0.081, 0.144, 0.180, 0.045, 0.121, 0.154])
                .unwrap();
        let r = analytic_group_rates(&fpr_gap);
        assert_abs_diff_eq!(r.fpr_a1 - r.fpr_a0, -0.080, epsilon = 1e-12);
        let (eod, aod) = eod_aod(&r);
        assert_abs_diff_eq!(eod, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(aod, -0.040, epsilon = 1e-12);

        let uniform = JointDistribution::from_cells([0.125; 8]).unwrap();
        let r = analytic_group_rates(&uniform);
        for v in [r.tpr_a1, r.tpr_a0, r.fpr_a1, r.fpr_a0] {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn tpr_gap_distribution_matches_expected_gaps() {
        let d =
            JointDistribution::from_cells([0.231, 0.044, 0.081, 0.144, 0.171, 0.054, 0.121, 0.154])
                .unwrap();
        let r = analytic_group_rates(&d);
        assert_abs_diff_eq!(r.tpr_a1, 0.84, epsilon = 1e-12);
        assert_abs_diff_eq!(r.tpr_a0, 0.76, epsilon = 1e-12);
        let (eod, _) = eod_aod(&r);
        assert_abs_diff_eq!(eod, 0.080, epsilon = 1e-12);
    }
}
