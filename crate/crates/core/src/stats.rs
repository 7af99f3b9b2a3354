//! Two-proportion z-tests for the four null hypotheses and the composed
//! verdicts.
//!
//! Both criteria compose two hypotheses and are declared violated when
//! either is rejected, so under a fair model the family-wise false-positive
//! rate is `1 - (1 - alpha)^2` (0.0975 at the default alpha).

use crate::data::{GroupPair, Mode, PairSet, PointSet};
use crate::error::{Error, Result};
use crate::normal::normal_cdf;
use crate::pairwise::estimate_comparative_rates;
use crate::pointwise::estimate_group_rates;

/// Two-tailed significance level used when nothing else is configured.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Stratum/bucket sizes below this trigger a small-sample warning: the
/// normal approximation behind the z-test becomes questionable, but the
/// arithmetic stays well-defined, so this warns rather than fails.
pub const SMALL_SAMPLE: f64 = 30.0;

/// The four null hypotheses of equal rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// TPR(A=1) = TPR(A=0)
    Tpr,
    /// FPR(A=1) = FPR(A=0)
    Fpr,
    /// TPR(1,0) = TPR(0,1), cross-group pairs
    CrossPairTpr,
    /// TPR(1,1) = TPR(0,0), within-group pairs
    WithinPairTpr,
}

impl Hypothesis {
    /// Stable identifier used in machine-readable reports.
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Tpr => "tpr",
            Hypothesis::Fpr => "fpr",
            Hypothesis::CrossPairTpr => "tpr_cross_pairs",
            Hypothesis::WithinPairTpr => "tpr_within_pairs",
        }
    }

    /// The equality under test, for human-readable reports.
    pub fn statement(self) -> &'static str {
        match self {
            Hypothesis::Tpr => "TPR(A=1) = TPR(A=0)",
            Hypothesis::Fpr => "FPR(A=1) = FPR(A=0)",
            Hypothesis::CrossPairTpr => "TPR(1,0) = TPR(0,1)",
            Hypothesis::WithinPairTpr => "TPR(1,1) = TPR(0,0)",
        }
    }
}

/// Outcome of one two-proportion z-test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisResult {
    pub hypothesis: Hypothesis,
    pub z: f64,
    pub p_value: f64,
    pub rejected: bool,
    pub s2_left: f64,
    pub s2_right: f64,
    pub n_left: f64,
    pub n_right: f64,
}

/// A stratum or bucket whose size is below `SMALL_SAMPLE`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallSampleWarning {
    pub stratum: String,
    pub n: f64,
}

/// Composed verdict of the two hypothesis tests for one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVerdict {
    pub results: [HypothesisResult; 2],
    /// True when at least one hypothesis is rejected.
    pub violated: bool,
    pub alpha: f64,
    pub warnings: Vec<SmallSampleWarning>,
}

/// Unpooled two-proportion z-test: `z = (p_l - p_r) / sqrt(s2_l + s2_r)`
/// with `s2 = p (1 - p) / n` estimated per side, two-tailed decision at
/// `alpha`.
///
/// This is deliberately the unpooled statistic, not the pooled-proportion
/// textbook variant. When an estimated rate is exactly 0 or 1 its variance
/// term vanishes; if both vanish, equal rates give `z = 0` (accepted) and
/// differing rates give an infinite `z` with `p = 0` (rejected).
pub fn two_proportion_z(
    hypothesis: Hypothesis,
    p_left: f64,
    n_left: f64,
    p_right: f64,
    n_right: f64,
    alpha: f64,
) -> HypothesisResult {
    debug_assert!(n_left >= 1.0 && n_right >= 1.0);
    debug_assert!((0.0..=1.0).contains(&p_left) && (0.0..=1.0).contains(&p_right));
    let s2_left = p_left * (1.0 - p_left) / n_left;
    let s2_right = p_right * (1.0 - p_right) / n_right;
    let denom = (s2_left + s2_right).sqrt();
    let diff = p_left - p_right;
    let z = if denom > 0.0 {
        diff / denom
    } else if diff == 0.0 {
        0.0
    } else if diff > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    };
    let p_value = 2.0 * (1.0 - normal_cdf(z.abs()));
    HypothesisResult {
        hypothesis,
        z,
        p_value,
        rejected: p_value < alpha,
        s2_left,
        s2_right,
        n_left,
        n_right,
    }
}

/// Tests the separation criterion on a binary point set: equal-TPR and
/// equal-FPR z-tests, violated when either is rejected.
pub fn test_separation(set: &PointSet, alpha: f64) -> Result<TestVerdict> {
    if set.mode() != Mode::Binary {
        return Err(Error::BinaryModeRequired);
    }
    let rates = estimate_group_rates(set)?;
    let tpr = two_proportion_z(
        Hypothesis::Tpr,
        rates.tpr_a1,
        rates.n_t1,
        rates.tpr_a0,
        rates.n_t0,
        alpha,
    );
    let fpr = two_proportion_z(
        Hypothesis::Fpr,
        rates.fpr_a1,
        rates.n_f1,
        rates.fpr_a0,
        rates.n_f0,
        alpha,
    );
    let mut warnings = Vec::new();
    for (label, n) in [
        ("(Y=1, A=1)", rates.n_t1),
        ("(Y=1, A=0)", rates.n_t0),
        ("(Y=0, A=1)", rates.n_f1),
        ("(Y=0, A=0)", rates.n_f0),
    ] {
        if n < SMALL_SAMPLE {
            warnings.push(SmallSampleWarning {
                stratum: label.to_string(),
                n,
            });
        }
    }
    Ok(TestVerdict {
        violated: tpr.rejected || fpr.rejected,
        results: [tpr, fpr],
        alpha,
        warnings,
    })
}

/// Tests the comparative-separation criterion on a pair set: z-tests on the
/// cross-pair buckets (1,0) vs (0,1) and the within-pair buckets (1,1) vs
/// (0,0), violated when either is rejected. All four buckets must be
/// populated.
pub fn test_comparative_separation(set: &PairSet, alpha: f64) -> Result<TestVerdict> {
    let rates = estimate_comparative_rates(set);
    let bucket = |i: u8, j: u8| rates.require(pair_of(i, j));
    let b10 = bucket(1, 0)?;
    let b01 = bucket(0, 1)?;
    let b11 = bucket(1, 1)?;
    let b00 = bucket(0, 0)?;

    let cross = two_proportion_z(
        Hypothesis::CrossPairTpr,
        b10.tpr,
        b10.support,
        b01.tpr,
        b01.support,
        alpha,
    );
    let within = two_proportion_z(
        Hypothesis::WithinPairTpr,
        b11.tpr,
        b11.support,
        b00.tpr,
        b00.support,
        alpha,
    );
    let mut warnings = Vec::new();
    for (gp, b) in [
        (pair_of(1, 0), b10),
        (pair_of(0, 1), b01),
        (pair_of(1, 1), b11),
        (pair_of(0, 0), b00),
    ] {
        if b.support < SMALL_SAMPLE {
            warnings.push(SmallSampleWarning {
                stratum: gp.to_string(),
                n: b.support,
            });
        }
    }
    Ok(TestVerdict {
        violated: cross.rejected || within.rejected,
        results: [cross, within],
        alpha,
        warnings,
    })
}

fn pair_of(i: u8, j: u8) -> GroupPair {
    use crate::data::Group;
    GroupPair::new(Group::from_bit(i).unwrap(), Group::from_bit(j).unwrap())
}
