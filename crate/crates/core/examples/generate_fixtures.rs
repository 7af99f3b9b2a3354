//! Regenerates every committed fixture under `fixtures/` deterministically.
//!
//! The sampled fixtures are pinned by seed; the asserts at the bottom keep
//! the committed audit verdicts stable, so a seed change here must be
//! deliberate.

use std::fs::{self, File};
use std::path::PathBuf;

use sepaudit_core::data::{Group, JointDistribution, LabeledPoint, Mode, PointSet};
use sepaudit_core::io::{save_distribution, save_pair_set, save_point_set};
use sepaudit_core::pairwise::build_pairs;
use sepaudit_core::sim::{replicate_rng, sample_pair_set, sample_point_set};
use sepaudit_core::stats::{test_comparative_separation, test_separation, DEFAULT_ALPHA};

/// Reference distributions used across the tests and docs. Same marginals
/// P(Y=y, A=a), different conditional rate gaps:
/// fair — no gaps; fpr_gap — FPR gap -0.08; tpr_fpr_gap — TPR gap 0.08 and
/// FPR gap -0.08; mixed_gap — TPR gap -0.053 and FPR gap 0.103.
const DISTRIBUTIONS: [(&str, [f64; 8]); 4] = [
    (
        "fair",
        [0.220, 0.055, 0.090, 0.135, 0.180, 0.045, 0.110, 0.165],
    ),
    (
        "fpr_gap",
        [0.220, 0.055, 0.081, 0.144, 0.180, 0.045, 0.121, 0.154],
    ),
    (
        "tpr_fpr_gap",
        [0.231, 0.044, 0.081, 0.144, 0.171, 0.054, 0.121, 0.154],
    ),
    (
        "mixed_gap",
        [0.230, 0.045, 0.105, 0.120, 0.200, 0.025, 0.100, 0.175],
    ),
];

const POINTS_FAIR_SEED: u64 = 102;
const POINTS_BIASED_SEED: u64 = 202;
const PAIRS_BIASED_SEED: u64 = 303;
const PAIRS_PERFECT_SEED: u64 = 404;
const CONTINUOUS_SEED: u64 = 505;

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(root.join("distributions")).unwrap();

    for (name, cells) in DISTRIBUTIONS {
        let d = JointDistribution::from_cells(cells).unwrap();
        let path = root.join("distributions").join(format!("{name}.dist"));
        save_distribution(File::create(&path).unwrap(), &d).unwrap();
        println!("wrote {}", path.display());
    }
    let fair = JointDistribution::from_cells(DISTRIBUTIONS[0].1).unwrap();
    let fpr_gap = JointDistribution::from_cells(DISTRIBUTIONS[1].1).unwrap();
    let mixed_gap = JointDistribution::from_cells(DISTRIBUTIONS[3].1).unwrap();

    // A perfect predictor with every stratum at the small-sample threshold.
    let mut perfect = Vec::new();
    for y in [1.0, 0.0] {
        for a in [Group::One, Group::Zero] {
            for _ in 0..30 {
                perfect.push(LabeledPoint::new(y, y, a));
            }
        }
    }
    let perfect = PointSet::new(perfect, Mode::Binary).unwrap();
    save_point_set(
        File::create(root.join("points_perfect.csv")).unwrap(),
        &perfect,
    )
    .unwrap();
    assert!(!test_separation(&perfect, DEFAULT_ALPHA).unwrap().violated);

    // Prediction fixtures: 10,000 points each from a satisfying and a
    // violating distribution, sized like a real prediction dump so that
    // judgment pairs sampled over them are effectively independent.
    let fair_points = sample_point_set(&fair, 10_000, &mut replicate_rng(POINTS_FAIR_SEED, 0));
    save_point_set(
        File::create(root.join("points_fair.csv")).unwrap(),
        &fair_points,
    )
    .unwrap();
    assert!(
        !test_separation(&fair_points, DEFAULT_ALPHA)
            .unwrap()
            .violated
    );

    let biased_points = sample_point_set(
        &mixed_gap,
        10_000,
        &mut replicate_rng(POINTS_BIASED_SEED, 0),
    );
    save_point_set(
        File::create(root.join("points_biased.csv")).unwrap(),
        &biased_points,
    )
    .unwrap();
    assert!(
        test_separation(&biased_points, DEFAULT_ALPHA)
            .unwrap()
            .violated
    );

    // Pair fixtures: all-correct comparative judgments, and 4000 pairs from
    // the FPR-gap distribution.
    let perfect_pairs = build_pairs(&perfect, 400, PAIRS_PERFECT_SEED).unwrap();
    save_pair_set(
        File::create(root.join("pairs_perfect.csv")).unwrap(),
        &perfect_pairs,
    )
    .unwrap();
    assert!(
        !test_comparative_separation(&perfect_pairs, DEFAULT_ALPHA)
            .unwrap()
            .violated
    );

    let biased_pairs = sample_pair_set(&fpr_gap, 4000, &mut replicate_rng(PAIRS_BIASED_SEED, 0));
    save_pair_set(
        File::create(root.join("pairs_biased.csv")).unwrap(),
        &biased_pairs,
    )
    .unwrap();
    assert!(
        test_comparative_separation(&biased_pairs, DEFAULT_ALPHA)
            .unwrap()
            .violated
    );

    // A small regression-mode score file: noisy score predictions over two
    // groups, one group systematically underestimated.
    let mut rng = replicate_rng(CONTINUOUS_SEED, 0);
    let mut continuous = Vec::new();
    for i in 0..60u32 {
        use rand::Rng;
        let a = Group::from_bit((i % 2) as u8).unwrap();
        let y: f64 = 1.0 + 12.0 * rng.random::<f64>();
        let noise = rng.random::<f64>() - 0.5;
        let shift = if a == Group::One { -1.5 } else { 0.0 };
        continuous.push(LabeledPoint::new(
            (y * 4.0).round() / 4.0,
            ((y + noise + shift) * 4.0).round() / 4.0,
            a,
        ));
    }
    let continuous = PointSet::new(continuous, Mode::Continuous).unwrap();
    save_point_set(
        File::create(root.join("points_continuous.csv")).unwrap(),
        &continuous,
    )
    .unwrap();

    println!("wrote point/pair fixtures under {}", root.display());
}
