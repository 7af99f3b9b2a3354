//! Standard-normal kernel: CDF via a rational approximation of the error
//! function, and the quantile via bisection on the CDF.
//!
//! The error function uses Cody's three-region rational Chebyshev
//! approximations (the classic CALERF scheme), giving relative accuracy near
//! machine precision. The CDF contract everywhere in this crate is absolute
//! accuracy better than 1e-10.

// Coefficients and reference values are kept at their full published
// precision even where f64 rounds them.
#![allow(clippy::excessive_precision)]

use std::f64::consts::FRAC_1_SQRT_2;

/// Region split points of the erf/erfc approximation.
const THRESH: f64 = 0.46875;
/// erfc underflows to zero past this point.
const XBIG: f64 = 26.543;

// Rational coefficients for erf on |x| <= THRESH.
const ERF_A: [f64; 5] = [
    3.16112374387056560e0,
    1.13864154151050156e2,
    3.77485237685302021e2,
    3.20937758913846947e3,
    1.85777706184603153e-1,
];
const ERF_B: [f64; 4] = [
    2.36012909523441209e1,
    2.44024637934444173e2,
    1.28261652607737228e3,
    2.84423683343917062e3,
];

// Rational coefficients for erfc on THRESH < x <= 4.
const ERFC_C: [f64; 9] = [
    5.64188496988670089e-1,
    8.88314979438837594e0,
    6.61191906371416295e1,
    2.98635138197400131e2,
    8.81952221241769090e2,
    1.71204761263407058e3,
    2.05107837782607147e3,
    1.23033935479799725e3,
    2.15311535474403846e-8,
];
const ERFC_D: [f64; 8] = [
    1.57449261107098347e1,
    1.17693950891312499e2,
    5.37181101862009858e2,
    1.62138957456669019e3,
    3.29079923573345963e3,
    4.36261909014324716e3,
    3.43936767414372164e3,
    1.23033935480374942e3,
];

// Rational coefficients for the x > 4 tail.
const ERFC_P: [f64; 6] = [
    3.05326634961232344e-1,
    3.60344899949804439e-1,
    1.25781726111229246e-1,
    1.60837851487422766e-2,
    6.58749161529837803e-4,
    1.63153871373020978e-2,
];
const ERFC_Q: [f64; 5] = [
    2.56852019228982242e0,
    1.87295284992346047e0,
    5.27905102951428412e-1,
    6.05183413124413191e-2,
    2.33520497626869185e-3,
];

/// 1/sqrt(pi).
const SQRPI: f64 = 5.6418958354775628695e-1;

/// erf on the central region |x| <= THRESH.
fn erf_small(x: f64) -> f64 {
    let y = x.abs();
    let ysq = if y > 1.11e-16 { y * y } else { 0.0 };
    let mut xnum = ERF_A[4] * ysq;
    let mut xden = ysq;
    for i in 0..3 {
        xnum = (xnum + ERF_A[i]) * ysq;
        xden = (xden + ERF_B[i]) * ysq;
    }
    x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
}

/// exp(-y^2) * R(y), split so the exponential keeps full accuracy.
fn scaled(y: f64, raw: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * raw
}

/// erfc(y) for THRESH < y <= 4.
fn erfc_mid(y: f64) -> f64 {
    let mut xnum = ERFC_C[8] * y;
    let mut xden = y;
    for i in 0..7 {
        xnum = (xnum + ERFC_C[i]) * y;
        xden = (xden + ERFC_D[i]) * y;
    }
    scaled(y, (xnum + ERFC_C[7]) / (xden + ERFC_D[7]))
}

/// erfc(y) for y > 4.
fn erfc_tail(y: f64) -> f64 {
    if y >= XBIG {
        return 0.0;
    }
    let ysq = 1.0 / (y * y);
    let mut xnum = ERFC_P[5] * ysq;
    let mut xden = ysq;
    for i in 0..4 {
        xnum = (xnum + ERFC_P[i]) * ysq;
        xden = (xden + ERFC_Q[i]) * ysq;
    }
    let r = ysq * (xnum + ERFC_P[4]) / (xden + ERFC_Q[4]);
    scaled(y, (SQRPI - r) / y)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let y = x.abs();
    if y <= THRESH {
        return 1.0 - erf_small(x);
    }
    let r = if y <= 4.0 { erfc_mid(y) } else { erfc_tail(y) };
    if x < 0.0 {
        2.0 - r
    } else {
        r
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() <= THRESH {
        erf_small(x)
    } else {
        1.0 - erfc(x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// One bisection pass to 1e-10. With `strict` the predicate is
/// `cdf(mid) < p` (converges onto the left edge of the preimage of `p`),
/// otherwise `cdf(mid) <= p` (right edge).
fn bisect_edge(p: f64, strict: bool) -> f64 {
    let mut lo = -40.0;
    let mut hi = 40.0;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let c = normal_cdf(mid);
        let below = if strict { c < p } else { c <= p };
        if below {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Standard normal quantile, computed by bisection on `normal_cdf` to 1e-10.
///
/// Both edges of the CDF's preimage of `p` are located and their midpoint is
/// returned, so far-tail quantiles stay centered where the CDF is flat at
/// f64 resolution.
///
/// # Panics
///
/// Panics unless `0 < p < 1`.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    0.5 * (bisect_edge(p, true) + bisect_edge(p, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // High-precision reference values (mpmath, 40 digits).
    const CDF_REFS: [(f64, f64); 30] = [
        (0.1, 0.53982783727702898147),
        (0.3, 0.61791142218895263731),
        (0.46875, 0.68037582848288237396),
        (0.5, 0.69146246127401310364),
        (1.0, 0.84134474606854294859),
        (1.5, 0.933192798731141934),
        (1.96, 0.97500210485177956586),
        (2.0, 0.9772498680518207928),
        (2.5, 0.99379033467422386483),
        (3.0, 0.99865010196836990547),
        (4.0, 0.99996832875816688008),
        (5.0, 0.99999971334842812081),
        (6.0, 0.99999999901341235496),
        (8.0, 0.9999999999999993779),
        (10.0, 1.0),
        (-0.1, 0.46017216272297101853),
        (-0.3, 0.38208857781104736269),
        (-0.46875, 0.31962417151711762604),
        (-0.5, 0.30853753872598689636),
        (-1.0, 0.15865525393145705141),
        (-1.5, 0.066807201268858066004),
        (-1.96, 0.024997895148220434137),
        (-2.0, 0.0227501319481792072),
        (-2.5, 0.006209665325776135167),
        (-3.0, 0.0013498980316300945267),
        (-4.0, 0.000031671241833119921254),
        (-5.0, 2.8665157187919391167e-7),
        (-6.0, 9.865876450376981407e-10),
        (-8.0, 6.2209605742717841235e-16),
        (-10.0, 7.619853024160526066e-24),
    ];

    #[test]
    fn cdf_matches_reference_within_1e10() {
        assert_eq!(normal_cdf(0.0), 0.5);
        for &(x, want) in &CDF_REFS {
            let got = normal_cdf(x);
            assert!((got - want).abs() < 1e-10, "Phi({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn cdf_tail_relative_accuracy() {
        // The lower tail is computed as a small number directly; relative
        // accuracy should hold there, not just absolute.
        for &(x, want) in CDF_REFS.iter().filter(|(x, _)| *x <= -2.0) {
            let got = normal_cdf(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "Phi({x}) relative error too large: {got} vs {want}"
            );
        }
    }

    #[test]
    fn cdf_symmetry_and_monotonicity() {
        let mut prev = 0.0;
        let mut x = -8.0;
        while x <= 8.0 {
            let c = normal_cdf(x);
            assert!(c >= prev, "cdf not monotone at {x}");
            assert_abs_diff_eq!(c + normal_cdf(-x), 1.0, epsilon = 1e-14);
            prev = c;
            x += 0.0625;
        }
    }

    #[test]
    fn cdf_handles_non_finite_input() {
        assert_eq!(normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(normal_cdf(f64::NEG_INFINITY), 0.0);
        assert!(normal_cdf(f64::NAN).is_nan());
    }

    #[test]
    fn quantile_hits_standard_critical_values() {
        // mpmath: Phi^-1(0.975) = 1.959963984540054235525
        assert_abs_diff_eq!(normal_quantile(0.975), 1.959963984540054, epsilon = 1e-9);
        assert_abs_diff_eq!(normal_quantile(0.5), 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(normal_quantile(0.995), 2.5758293035489004, epsilon = 1e-9);
        assert_abs_diff_eq!(normal_quantile(0.95), 1.6448536269514722, epsilon = 1e-9);
    }

    #[test]
    fn quantile_round_trips_through_cdf() {
        // x -> Phi(x) -> Phi^-1, over the range where f64 keeps enough of
        // the CDF to invert; includes +/-6 per the kernel contract.
        for &(x, _) in &CDF_REFS {
            if x.abs() > 6.0 {
                continue;
            }
            let back = normal_quantile(normal_cdf(x));
            assert!(
                (back - x).abs() < 1e-8,
                "round trip at {x} came back as {back}"
            );
        }
        // p -> Phi^-1(p) -> Phi.
        let mut p = 0.0005;
        while p < 1.0 {
            let fwd = normal_cdf(normal_quantile(p));
            assert!((fwd - p).abs() < 1e-8, "p round trip at {p} gave {fwd}");
            p += 0.0125;
        }
    }
}
