//! Analytic Type II error and statistical power for both criteria.
//!
//! For a two-tailed z-test of `H0: P(W=1) = P(V=1)` at level `alpha`, the
//! acceptance probability is
//!
//! ```text
//! beta = Phi(z_crit - mu/sigma) - Phi(-z_crit - mu/sigma)
//! ```
//!
//! where `mu` is the true rate difference and `sigma` the standard error of
//! the estimated difference. Each criterion composes two such tests; its
//! Type II error is the product of the per-hypothesis betas.
//!
//! Stratum and bucket sizes enter the sigmas as exact expectations
//! (real-valued, never rounded): the model is asymptotic and rounding would
//! only add spurious steps.

use crate::data::{Group, GroupPair, JointDistribution};
use crate::error::{Error, Result};
use crate::normal::{normal_cdf, normal_quantile};
use crate::pairwise::analytic_comparative_rates;
use crate::pointwise::analytic_group_rates;
use crate::stats::Hypothesis;

/// Search cap for `matched_pair_budget`.
pub const BUDGET_CAP: u64 = 10_000_000;

/// Analytic power report for one criterion at given sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerReport {
    /// Per-hypothesis acceptance probability beta.
    pub betas: [(Hypothesis, f64); 2],
    /// Composed Type II error: the product of the two betas.
    pub beta_composed: f64,
    /// 1 - beta_composed.
    pub power: f64,
    /// Expected stratum/bucket sizes the sigmas were computed from.
    pub effective_counts: Vec<(String, f64)>,
}

/// Two-tailed critical value `Phi^-1(1 - alpha/2)`.
pub fn critical_z(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Parameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    Ok(normal_quantile(1.0 - alpha / 2.0))
}

/// Probability of accepting the null given the true difference `mu` and the
/// standard error `sigma` of the estimated difference.
pub fn beta_accept(mu: f64, sigma: f64, alpha: f64) -> Result<f64> {
    if sigma <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma));
    }
    Ok(beta_at(mu, sigma, critical_z(alpha)?))
}

/// Like `beta_accept` with a precomputed critical value; `sigma = 0` takes
/// the exact limit (a constant estimator is always accepted when `mu = 0`,
/// always rejected otherwise), which keeps the power operations total for
/// valid distributions whose true rates sit at 0 or 1.
fn beta_at(mu: f64, sigma: f64, z_crit: f64) -> f64 {
    if sigma == 0.0 {
        return if mu == 0.0 { 1.0 } else { 0.0 };
    }
    let shift = mu / sigma;
    normal_cdf(z_crit - shift) - normal_cdf(-z_crit - shift)
}

fn binomial_var(p: f64) -> f64 {
    p * (1.0 - p)
}

/// Analytic power of the separation test on `n` points drawn from `d`.
pub fn separation_power(d: &JointDistribution, n: u64, alpha: f64) -> Result<PowerReport> {
    if n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let z_crit = critical_z(alpha)?;
    let rates = analytic_group_rates(d);
    let n = n as f64;
    let n_t1 = rates.n_t1 * n;
    let n_t0 = rates.n_t0 * n;
    let n_f1 = rates.n_f1 * n;
    let n_f0 = rates.n_f0 * n;

    let sigma_t = (binomial_var(rates.tpr_a1) / n_t1 + binomial_var(rates.tpr_a0) / n_t0).sqrt();
    let sigma_f = (binomial_var(rates.fpr_a1) / n_f1 + binomial_var(rates.fpr_a0) / n_f0).sqrt();
    let beta_t = beta_at(rates.tpr_a1 - rates.tpr_a0, sigma_t, z_crit);
    let beta_f = beta_at(rates.fpr_a1 - rates.fpr_a0, sigma_f, z_crit);
    let beta_composed = beta_t * beta_f;
    Ok(PowerReport {
        betas: [(Hypothesis::Tpr, beta_t), (Hypothesis::Fpr, beta_f)],
        beta_composed,
        power: 1.0 - beta_composed,
        effective_counts: vec![
            ("n_t1".into(), n_t1),
            ("n_t0".into(), n_t0),
            ("n_f1".into(), n_f1),
            ("n_f0".into(), n_f0),
        ],
    })
}

/// Analytic power of the comparative-separation test on `n_p` pairs drawn
/// from `d`. Bucket sizes are the expectations of the i.i.d. pair model,
/// `n_(a_i,a_j) = 2 P(Y=1,A=a_i) P(Y=0,A=a_j) n_p`.
pub fn comparative_power(d: &JointDistribution, n_p: u64, alpha: f64) -> Result<PowerReport> {
    if n_p < 1 {
        return Err(Error::Parameter("n_p must be at least 1".into()));
    }
    let z_crit = critical_z(alpha)?;
    let comp = analytic_comparative_rates(d);
    let n_p = n_p as f64;

    let bucket = |i: u8, j: u8| {
        let gp = GroupPair::new(Group::from_bit(i).unwrap(), Group::from_bit(j).unwrap());
        comp.require(gp)
            .expect("analytic rates populate all buckets")
    };
    let b10 = bucket(1, 0);
    let b01 = bucket(0, 1);
    let b11 = bucket(1, 1);
    let b00 = bucket(0, 0);
    let count = |b: crate::pairwise::BucketRate| b.support * n_p;

    let sigma_c = (binomial_var(b10.tpr) / count(b10) + binomial_var(b01.tpr) / count(b01)).sqrt();
    let sigma_w = (binomial_var(b11.tpr) / count(b11) + binomial_var(b00.tpr) / count(b00)).sqrt();
    let beta_c = beta_at(b10.tpr - b01.tpr, sigma_c, z_crit);
    let beta_w = beta_at(b11.tpr - b00.tpr, sigma_w, z_crit);
    let beta_composed = beta_c * beta_w;
    Ok(PowerReport {
        betas: [
            (Hypothesis::CrossPairTpr, beta_c),
            (Hypothesis::WithinPairTpr, beta_w),
        ],
        beta_composed,
        power: 1.0 - beta_composed,
        effective_counts: vec![
            ("n_(1,1)".into(), count(b11)),
            ("n_(1,0)".into(), count(b10)),
            ("n_(0,1)".into(), count(b01)),
            ("n_(0,0)".into(), count(b00)),
        ],
    })
}

/// Result of matching the comparative budget to a pointwise test size.
#[derive(Debug, Clone, PartialEq)]
pub struct PairBudget {
    /// Smallest pair count whose comparative power reaches the target.
    pub n_p: u64,
    /// `n_p / n`.
    pub ratio: f64,
    /// Power of the separation test at `n`, the matching target.
    pub separation_power: f64,
    /// Comparative power at the returned `n_p`.
    pub comparative_power: f64,
    /// Set when the distribution satisfies separation: power does not depend
    /// on the sample size, so the minimum budget of 1 is returned.
    pub no_detectable_effect: bool,
}

/// Finds the smallest `n_p` with
/// `comparative_power(d, n_p) >= separation_power(d, n)` by monotone search
/// (power is nondecreasing in `n_p`). Errors when no budget up to
/// `BUDGET_CAP` reaches the target.
pub fn matched_pair_budget(d: &JointDistribution, n: u64, alpha: f64) -> Result<PairBudget> {
    if n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let target = separation_power(d, n, alpha)?.power;
    let comp_power = |n_p: u64| -> Result<f64> { Ok(comparative_power(d, n_p, alpha)?.power) };

    let rates = analytic_group_rates(d);
    let comp = analytic_comparative_rates(d);
    let gaps = [
        rates.tpr_a1 - rates.tpr_a0,
        rates.fpr_a1 - rates.fpr_a0,
        comp.require(GroupPair::ALL[1])?.tpr - comp.require(GroupPair::ALL[2])?.tpr,
        comp.require(GroupPair::ALL[0])?.tpr - comp.require(GroupPair::ALL[3])?.tpr,
    ];
    let no_detectable_effect = gaps.iter().all(|g| g.abs() < 1e-12);

    let budget = if comp_power(1)? >= target {
        1
    } else {
        let mut lo = 1u64;
        let mut hi = 2u64;
        while comp_power(hi)? < target {
            lo = hi;
            if hi >= BUDGET_CAP {
                return Err(Error::BudgetUnreachable {
                    cap: BUDGET_CAP,
                    target,
                });
            }
            hi = (hi * 2).min(BUDGET_CAP);
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if comp_power(mid)? >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };

    Ok(PairBudget {
        n_p: budget,
        ratio: budget as f64 / n as f64,
        separation_power: target,
        comparative_power: comp_power(budget)?,
        no_detectable_effect,
    })
}
