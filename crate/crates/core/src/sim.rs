//! Monte Carlo engine: sample point sets and pair sets from a joint
//! distribution and measure detection frequencies and estimator moments
//! over seeded replicates.
//!
//! Replicate `i` of a study draws from its own ChaCha stream
//! (`seed_from_u64(seed)` + `set_stream(i)`), so results are bit-identical
//! for a given config regardless of how replicates are scheduled across
//! threads. Aggregation walks the collected per-replicate outcomes in
//! replicate order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::data::{
    Group, GroupPair, JointDistribution, JudgedPair, LabeledPoint, Mode, PairLabel, PairPrediction,
    PairSet, PointSet, CELL_ORDER,
};
use crate::error::{Error, Result};
use crate::pairwise::estimate_comparative_rates;
use crate::pointwise::estimate_group_rates;
use crate::stats::{test_comparative_separation, test_separation};

/// Which criterion a detection study exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Separation,
    Comparative,
}

/// Estimators a moment study can track.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorId {
    TprA1,
    TprA0,
    FprA1,
    FprA0,
    Comparative(GroupPair),
}

impl std::fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimatorId::TprA1 => write!(f, "tpr_a1"),
            EstimatorId::TprA0 => write!(f, "tpr_a0"),
            EstimatorId::FprA1 => write!(f, "fpr_a1"),
            EstimatorId::FprA0 => write!(f, "fpr_a0"),
            EstimatorId::Comparative(gp) => write!(f, "tpr{gp}"),
        }
    }
}

/// Configuration of one study.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub distribution: JointDistribution,
    /// Pointwise sample size per replicate.
    pub n: u64,
    /// Pair sample size per replicate.
    pub n_p: u64,
    pub replicates: u64,
    pub alpha: f64,
    pub seed: u64,
}

/// Sample mean and variance of one estimator across replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorMoments {
    pub metric: EstimatorId,
    pub mean: f64,
    pub variance: f64,
}

/// Outcome of a study. Detection studies populate `detection_frequency`;
/// moment studies populate `moments`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub replicates: u64,
    pub seed: u64,
    /// Fraction of non-errored replicates whose test reported a violation.
    pub detection_frequency: Option<f64>,
    pub moments: Vec<EstimatorMoments>,
    /// Replicates excluded because their test errored (degenerate stratum or
    /// empty bucket at small sizes). Retrying would bias the sampling
    /// distribution, so they are excluded and counted.
    pub errored_replicates: u64,
}

impl SimResult {
    /// Renders the result as `key = value` lines, the same structured-text
    /// shape distribution files use.
    pub fn to_key_value_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("replicates = {}\n", self.replicates));
        out.push_str(&format!("seed = {}\n", self.seed));
        if let Some(f) = self.detection_frequency {
            out.push_str(&format!("detection_frequency = {f}\n"));
        }
        for m in &self.moments {
            out.push_str(&format!("mean({}) = {}\n", m.metric, m.mean));
            out.push_str(&format!("variance({}) = {}\n", m.metric, m.variance));
        }
        out.push_str(&format!(
            "errored_replicates = {}\n",
            self.errored_replicates
        ));
        out
    }
}

/// The RNG for one replicate: an independent ChaCha stream per index.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Cumulative-probability walker over the eight cells.
struct CellSampler {
    cum: [f64; 8],
}

impl CellSampler {
    fn new(d: &JointDistribution) -> CellSampler {
        let mut cum = [0.0; 8];
        let mut running = 0.0;
        for (slot, v) in cum.iter_mut().zip(d.cells()) {
            running += v;
            *slot = running;
        }
        CellSampler { cum }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> (u8, u8, u8) {
        let u: f64 = rng.random();
        for (i, &c) in self.cum.iter().enumerate() {
            if u < c {
                return CELL_ORDER[i];
            }
        }
        // u landed beyond the final cumulative value (fp slack); the last
        // cell owns the remainder.
        CELL_ORDER[7]
    }
}

/// Draws `n` i.i.d. points from the 8-cell categorical distribution.
pub fn sample_point_set<R: Rng>(d: &JointDistribution, n: u64, rng: &mut R) -> PointSet {
    assert!(n >= 1, "need at least one point");
    let sampler = CellSampler::new(d);
    let mut points = Vec::with_capacity(n as usize);
    for _ in 0..n {
        let (c, y, a) = sampler.draw(rng);
        points.push(LabeledPoint::new(
            y as f64,
            c as f64,
            Group::from_bit(a).unwrap(),
        ));
    }
    PointSet::new(points, Mode::Binary).expect("sampled points are valid binary points")
}

/// Draws `n_p` pairs of two independent points each; tied ground truths are
/// discarded into the tie count.
pub fn sample_pair_set<R: Rng>(d: &JointDistribution, n_p: u64, rng: &mut R) -> PairSet {
    assert!(n_p >= 1, "need at least one pair");
    let sampler = CellSampler::new(d);
    let mut pairs = Vec::with_capacity(n_p as usize);
    let mut discarded = 0u64;
    for _ in 0..n_p {
        let (c_i, y_i, a_i) = sampler.draw(rng);
        let (c_j, y_j, a_j) = sampler.draw(rng);
        match PairLabel::from_sign_of(y_i as f64 - y_j as f64) {
            Some(label) => pairs.push(JudgedPair::new(
                GroupPair::new(Group::from_bit(a_i).unwrap(), Group::from_bit(a_j).unwrap()),
                label,
                PairPrediction::from_sign_of(c_i as f64 - c_j as f64),
            )),
            None => discarded += 1,
        }
    }
    PairSet::new(pairs, discarded)
}

fn validate(cfg: &SimConfig, needs_points: bool, needs_pairs: bool) -> Result<()> {
    if cfg.replicates < 1 {
        return Err(Error::Parameter("replicates must be at least 1".into()));
    }
    if needs_points && cfg.n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if needs_pairs && cfg.n_p < 1 {
        return Err(Error::Parameter("n_p must be at least 1".into()));
    }
    Ok(())
}

/// Collects per-replicate outcomes, enforcing the 1% errored-replicate
/// limit, and returns the kept values in replicate order.
fn run_replicates<T: Send>(
    cfg: &SimConfig,
    per_replicate: impl Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
) -> Result<(Vec<T>, u64)> {
    let outcomes: Vec<Result<T>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = replicate_rng(cfg.seed, i);
            per_replicate(&mut rng)
        })
        .collect();

    let errored = outcomes.iter().filter(|r| r.is_err()).count() as u64;
    if errored * 100 > cfg.replicates {
        let first = outcomes
            .iter()
            .find_map(|r| r.as_ref().err().map(|e| e.to_string()))
            .unwrap_or_default();
        return Err(Error::DegenerateReplicates {
            errored,
            replicates: cfg.replicates,
            first,
        });
    }
    let kept: Vec<T> = outcomes.into_iter().filter_map(|r| r.ok()).collect();
    Ok((kept, errored))
}

/// Runs the chosen hypothesis test on fresh samples for every replicate and
/// reports the violation frequency.
pub fn run_detection_study(cfg: &SimConfig, criterion: Criterion) -> Result<SimResult> {
    validate(
        cfg,
        criterion == Criterion::Separation,
        criterion == Criterion::Comparative,
    )?;
    let d = &cfg.distribution;
    let (verdicts, errored) = run_replicates(cfg, |rng| match criterion {
        Criterion::Separation => {
            let s = sample_point_set(d, cfg.n, rng);
            Ok(test_separation(&s, cfg.alpha)?.violated)
        }
        Criterion::Comparative => {
            let sp = sample_pair_set(d, cfg.n_p, rng);
            Ok(test_comparative_separation(&sp, cfg.alpha)?.violated)
        }
    })?;

    let violated = verdicts.iter().filter(|&&v| v).count();
    Ok(SimResult {
        replicates: cfg.replicates,
        seed: cfg.seed,
        detection_frequency: Some(violated as f64 / verdicts.len() as f64),
        moments: Vec::new(),
        errored_replicates: errored,
    })
}

/// Measures the sample mean and variance of one estimator across replicates.
pub fn run_moment_study(cfg: &SimConfig, metric: EstimatorId) -> Result<SimResult> {
    let comparative = matches!(metric, EstimatorId::Comparative(_));
    validate(cfg, !comparative, comparative)?;
    let d = &cfg.distribution;
    let (values, errored) = run_replicates(cfg, |rng| match metric {
        EstimatorId::TprA1 | EstimatorId::TprA0 | EstimatorId::FprA1 | EstimatorId::FprA0 => {
            let rates = estimate_group_rates(&sample_point_set(d, cfg.n, rng))?;
            Ok(match metric {
                EstimatorId::TprA1 => rates.tpr_a1,
                EstimatorId::TprA0 => rates.tpr_a0,
                EstimatorId::FprA1 => rates.fpr_a1,
                EstimatorId::FprA0 => rates.fpr_a0,
                EstimatorId::Comparative(_) => unreachable!(),
            })
        }
        EstimatorId::Comparative(gp) => {
            let rates = estimate_comparative_rates(&sample_pair_set(d, cfg.n_p, rng));
            Ok(rates.require(gp)?.tpr)
        }
    })?;

    let count = values.len() as f64;
    let mean = values.iter().sum::<f64>() / count;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    Ok(SimResult {
        replicates: cfg.replicates,
        seed: cfg.seed,
        detection_frequency: None,
        moments: vec![EstimatorMoments {
            metric,
            mean,
            variance,
        }],
        errored_replicates: errored,
    })
}
