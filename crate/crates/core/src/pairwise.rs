//! Comparative-rate estimators: pair construction from pointwise data, the
//! pooled per-bucket comparative TPR, and its analytic counterpart.
//!
//! Reversed orientations carry the same information — a pair seen from the
//! other side has groups swapped and label/prediction negated — so each
//! stored pair is pooled into exactly one `GroupPair` bucket: its own groups
//! when the label is positive, the reversed groups when negative.
//!
//! Prediction ties (`c_ij = 0`) are not positive predictions: they enter
//! bucket denominators but never numerators.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{
    GroupPair, JointDistribution, JudgedPair, PairLabel, PairPrediction, PairSet, PointSet,
};
use crate::error::{Error, Result};
use crate::pointwise::analytic_group_rates;

/// Comparative TPR per group-pair bucket.
///
/// `support` is the pooled bucket size: positive-label pairs with these
/// groups plus negative-label pairs with the reversed groups. Estimated
/// tables carry whole-number supports; analytic tables carry the expected
/// bucket fraction per sampled pair instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketRate {
    pub tpr: f64,
    pub support: f64,
}

/// Comparative rates for the populated buckets.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparativeRates {
    buckets: BTreeMap<GroupPair, BucketRate>,
}

impl ComparativeRates {
    pub fn get(&self, groups: GroupPair) -> Option<BucketRate> {
        self.buckets.get(&groups).copied()
    }

    /// Like `get`, but an absent bucket is an error naming it.
    pub fn require(&self, groups: GroupPair) -> Result<BucketRate> {
        self.get(groups).ok_or(Error::EmptyBucket(groups))
    }

    /// Populated buckets in report order (`GroupPair::ALL`).
    pub fn iter(&self) -> impl Iterator<Item = (GroupPair, BucketRate)> + '_ {
        GroupPair::ALL
            .iter()
            .filter_map(|gp| self.get(*gp).map(|b| (*gp, b)))
    }

    pub fn total_support(&self) -> f64 {
        self.buckets.values().map(|b| b.support).sum()
    }
}

/// Samples `n_p` index pairs `(i, j)` independently and uniformly with
/// replacement from `set`, redrawing `j` while `j = i`. Tied ground truths
/// are dropped into the discard count; stored pairs carry
/// `y_ij = sgn(y_i - y_j)` and `c_ij = sgn(c_i - c_j)`.
///
/// Deterministic for a given `seed`.
pub fn build_pairs(set: &PointSet, n_p: u64, seed: u64) -> Result<PairSet> {
    if set.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: set.len(),
        });
    }
    let points = set.points();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    let mut discarded = 0u64;
    for _ in 0..n_p {
        let i = rng.random_range(0..points.len());
        let mut j = rng.random_range(0..points.len());
        while j == i {
            j = rng.random_range(0..points.len());
        }
        match judge(&points[i], &points[j]) {
            Some(pair) => pairs.push(pair),
            None => discarded += 1,
        }
    }
    Ok(PairSet::new(pairs, discarded))
}

/// Enumerates every unordered index pair `i < j` exactly once. Deterministic
/// and exhaustive, but the resulting pairs share underlying points, so the
/// i.i.d. sampling model behind the variance formulas does not apply; meant
/// for small sets.
pub fn enumerate_pairs(set: &PointSet) -> Result<PairSet> {
    if set.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: set.len(),
        });
    }
    let points = set.points();
    let mut pairs = Vec::new();
    let mut discarded = 0u64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            match judge(&points[i], &points[j]) {
                Some(pair) => pairs.push(pair),
                None => discarded += 1,
            }
        }
    }
    Ok(PairSet::new(pairs, discarded))
}

fn judge(pi: &crate::data::LabeledPoint, pj: &crate::data::LabeledPoint) -> Option<JudgedPair> {
    let label = PairLabel::from_sign_of(pi.y - pj.y)?;
    Some(JudgedPair::new(
        GroupPair::new(pi.a, pj.a),
        label,
        PairPrediction::from_sign_of(pi.c - pj.c),
    ))
}

/// Pooled comparative TPR per bucket.
///
/// For bucket `a_ij` the numerator counts positive-label pairs with groups
/// `a_ij` predicted positive plus negative-label pairs with groups `a_ji`
/// predicted negative; the denominator counts those pairs regardless of
/// prediction. Only populated buckets are reported.
pub fn estimate_comparative_rates(set: &PairSet) -> ComparativeRates {
    let mut hits: BTreeMap<GroupPair, u64> = BTreeMap::new();
    let mut totals: BTreeMap<GroupPair, u64> = BTreeMap::new();
    for pair in set.pairs() {
        // Canonical orientation: flip negative-label pairs so every pair
        // reads as a positive judgment.
        let canon = match pair.label {
            PairLabel::Pos => *pair,
            PairLabel::Neg => pair.reversed(),
        };
        *totals.entry(canon.groups).or_insert(0) += 1;
        if canon.prediction == PairPrediction::Pos {
            *hits.entry(canon.groups).or_insert(0) += 1;
        }
    }
    let buckets = totals
        .into_iter()
        .map(|(gp, total)| {
            let hit = hits.get(&gp).copied().unwrap_or(0);
            (
                gp,
                BucketRate {
                    tpr: hit as f64 / total as f64,
                    support: total as f64,
                },
            )
        })
        .collect();
    ComparativeRates { buckets }
}

/// Analytic comparative rates of a joint distribution:
/// `tpr(a_i, a_j) = TPR(A=a_i) * TNR(A=a_j)`, with the expected bucket
/// fraction `2 * P(Y=1, A=a_i) * P(Y=0, A=a_j)` as support.
pub fn analytic_comparative_rates(d: &JointDistribution) -> ComparativeRates {
    let rates = analytic_group_rates(d);
    let buckets = GroupPair::ALL
        .iter()
        .map(|&gp| {
            let tpr = rates.tpr(gp.first) * rates.tnr(gp.second);
            let support = 2.0 * rates.n_t(gp.first) * rates.n_f(gp.second);
            (gp, BucketRate { tpr, support })
        })
        .collect();
    ComparativeRates { buckets }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Group, LabeledPoint, Mode};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn gp(i: u8, j: u8) -> GroupPair {
        GroupPair::new(Group::from_bit(i).unwrap(), Group::from_bit(j).unwrap())
    }

    fn pair(ai: u8, aj: u8, y: i8, c: i8) -> JudgedPair {
        JudgedPair::new(
            gp(ai, aj),
            PairLabel::from_value(y).unwrap(),
            PairPrediction::from_value(c).unwrap(),
        )
    }

    #[test]
    fn pooling_matches_hand_enumeration() {
        let sp = PairSet::new(
            vec![pair(1, 0, 1, 1), pair(0, 1, -1, -1), pair(1, 0, 1, -1)],
            0,
        );
        let rates = estimate_comparative_rates(&sp);
        let b = rates.require(gp(1, 0)).unwrap();
        assert_abs_diff_eq!(b.tpr, 2.0 / 3.0, epsilon = 1e-15);
        assert_eq!(b.support, 3.0);
        assert!(rates.get(gp(0, 1)).is_none());
    }

    #[test]
    fn prediction_ties_enter_denominator_only() {
        let sp = PairSet::new(vec![pair(1, 1, 1, 1), pair(1, 1, 1, 0)], 0);
        let b = estimate_comparative_rates(&sp).require(gp(1, 1)).unwrap();
        assert_eq!(b.support, 2.0);
        assert_eq!(b.tpr, 0.5);
    }

    #[test]
    fn perfect_comparative_predictor_scores_one_everywhere() {
        let pairs = vec![
            pair(1, 1, 1, 1),
            pair(1, 0, -1, -1),
            pair(0, 1, 1, 1),
            pair(0, 0, -1, -1),
        ];
        let rates = estimate_comparative_rates(&PairSet::new(pairs, 0));
        for (_, b) in rates.iter() {
            assert_eq!(b.tpr, 1.0);
        }
    }

    #[test]
    fn two_point_build_gives_the_single_possible_pair() {
        let s = PointSet::new(
            vec![
                LabeledPoint::new(1.0, 1.0, Group::One),
                LabeledPoint::new(0.0, 0.0, Group::Zero),
            ],
            Mode::Binary,
        )
        .unwrap();
        let sp = build_pairs(&s, 1, 99).unwrap();
        assert_eq!(sp.len(), 1);
        assert_eq!(sp.discarded_ties(), 0);
        let p = sp.pairs()[0];
        // Either orientation of the same judgment; prediction tracks label.
        assert_eq!(p.prediction.value(), p.label.value());
        match p.label {
            PairLabel::Pos => assert_eq!(p.groups, gp(1, 0)),
            PairLabel::Neg => assert_eq!(p.groups, gp(0, 1)),
        }
    }

    #[test]
    fn all_tied_labels_discard_everything() {
        let pts = (0..10)
            .map(|i| LabeledPoint::new(1.0, (i % 2) as f64, Group::from_bit(i % 2).unwrap()))
            .collect();
        let s = PointSet::new(pts, Mode::Binary).unwrap();
        let sp = build_pairs(&s, 100, 5).unwrap();
        assert_eq!(sp.len(), 0);
        assert_eq!(sp.discarded_ties(), 100);
    }

    #[test]
    fn build_pairs_requires_two_points() {
        let s = PointSet::new(vec![LabeledPoint::new(1.0, 1.0, Group::One)], Mode::Binary).unwrap();
        assert!(matches!(
            build_pairs(&s, 1, 0),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn build_pairs_is_deterministic() {
        let pts = (0u32..40)
            .map(|i| {
                LabeledPoint::new(
                    ((i * 7) % 3) as f64,
                    ((i * 5) % 2) as f64,
                    Group::from_bit((i % 2) as u8).unwrap(),
                )
            })
            .collect::<Vec<_>>();
        let s = PointSet::new(pts, Mode::Continuous).unwrap();
        let a = build_pairs(&s, 500, 1234).unwrap();
        let b = build_pairs(&s, 500, 1234).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, build_pairs(&s, 500, 1235).unwrap());
    }

    #[test]
    fn enumerate_pairs_covers_every_combination() {
        let pts = vec![
            LabeledPoint::new(3.0, 1.0, Group::One),
            LabeledPoint::new(2.0, 2.0, Group::Zero),
            LabeledPoint::new(2.0, 0.0, Group::One),
        ];
        let s = PointSet::new(pts, Mode::Continuous).unwrap();
        let sp = enumerate_pairs(&s).unwrap();
        assert_eq!(sp.len() as u64 + sp.discarded_ties(), 3);
        assert_eq!(sp.discarded_ties(), 1); // the two y = 2.0 points tie
    }

    #[test]
    fn analytic_rates_factorize() {
        let fair =
            JointDistribution::from_cells([0.220, 0.055, 0.090, 0.135, 0.180, 0.045, 0.110, 0.165])
                .unwrap();
        let rates = analytic_comparative_rates(&fair);
        assert_abs_diff_eq!(rates.require(gp(1, 0)).unwrap().tpr, 0.48, epsilon = 1e-12);
        // Expected usable fraction of sampled pairs across buckets:
        // 2 P(Y=1) P(Y=0) = 0.5 for this distribution.
        assert_abs_diff_eq!(rates.total_support(), 0.5, epsilon = 1e-12);

        let fpr_gap =
            JointDistribution::from_cells([0.220, 0.055, 0.081, 0.144, 0.180, 0.045, 0.121, 0.154])
                .unwrap();
        let r = analytic_comparative_rates(&fpr_gap);
        let diff = r.require(gp(1, 0)).unwrap().tpr - r.require(gp(0, 1)).unwrap().tpr;
        assert_abs_diff_eq!(diff, -0.064, epsilon = 1e-12);

        let tpr_fpr_gap =
            JointDistribution::from_cells([0.231, 0.044, 0.081, 0.144, 0.171, 0.054, 0.121, 0.154])
                .unwrap();
        let r = analytic_comparative_rates(&tpr_fpr_gap);
        let diff = r.require(gp(1, 1)).unwrap().tpr - r.require(gp(0, 0)).unwrap().tpr;
        assert_abs_diff_eq!(diff, 0.112, epsilon = 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1024))]

        // Reversing every stored pair must leave the estimates untouched.
        #[test]
        fn orientation_flip_invariance(
            raw in proptest::collection::vec((0u8..2, 0u8..2, prop_oneof![Just(1i8), Just(-1i8)],
                                              -1i8..=1), 1..200)
        ) {
            let pairs: Vec<JudgedPair> =
                raw.iter().map(|&(ai, aj, y, c)| pair(ai, aj, y, c)).collect();
            let flipped: Vec<JudgedPair> = pairs.iter().map(|p| p.reversed()).collect();
            let a = estimate_comparative_rates(&PairSet::new(pairs, 0));
            let b = estimate_comparative_rates(&PairSet::new(flipped, 0));
            prop_assert_eq!(a, b);
        }

        // Analytic product identity over random valid distributions.
        #[test]
        fn product_identity(cells in proptest::collection::vec(0.01f64..1.0, 8)) {
            let sum: f64 = cells.iter().sum();
            let normalized: Vec<f64> = cells.iter().map(|v| v / sum).collect();
            let d = JointDistribution::from_cells(normalized.try_into().unwrap()).unwrap();
            let point = analytic_group_rates(&d);
            let comp = analytic_comparative_rates(&d);
            for gpair in GroupPair::ALL {
                let want = point.tpr(gpair.first) * point.tnr(gpair.second);
                let got = comp.require(gpair).unwrap().tpr;
                prop_assert!((got - want).abs() < 1e-14);
            }
        }
    }
}
