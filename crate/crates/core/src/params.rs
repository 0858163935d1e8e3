//! Problem parameters, λ-regime thresholds and the three-branch coefficient bound.
//!
//! Every quantity here is a closed-form function of the coefficient index `n`
//! and the weight `lambda`. Thresholds are evaluated in the working scalar
//! type; no rational arithmetic is involved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Smallest admissible coefficient index.
pub const MIN_INDEX: u32 = 3;

/// Largest admissible coefficient index. Keeps `n^4`-sized intermediates finite.
pub const MAX_INDEX: u32 = 1_000_000;

/// Validates a raw coefficient index.
pub fn validate_index(n: u64) -> Result<u32> {
    if n < MIN_INDEX as u64 {
        return Err(Error::IndexTooSmall(n));
    }
    if n > MAX_INDEX as u64 {
        return Err(Error::IndexTooLarge {
            n,
            max: MAX_INDEX as u64,
        });
    }
    Ok(n as u32)
}

/// The pair `(n, lambda)` every formula is indexed by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams<T> {
    n: u32,
    lambda: T,
}

impl<T: Scalar> ProblemParams<T> {
    pub fn new(n: u32, lambda: T) -> Result<Self> {
        let n = validate_index(n as u64)?;
        if !(lambda.is_finite() && lambda > T::zero()) {
            return Err(Error::InvalidLambda(lambda.as_f64()));
        }
        Ok(Self { n, lambda })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `n` converted to the scalar type.
    #[inline]
    pub fn nf(&self) -> T {
        T::from_index(self.n)
    }

    /// Same `n`, different weight.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.n, lambda)
    }

    pub fn thresholds(&self) -> RegimeThresholds<T> {
        RegimeThresholds::for_valid_index(self.n)
    }

    /// Index of the odd coefficient paired with `a_n`.
    #[inline]
    pub fn odd_index(&self) -> u32 {
        2 * self.n - 1
    }
}

/// `A(n) = (10n - 2) / (n + 1)^2`.
pub fn aux_a<T: Scalar>(n: T) -> T {
    let one = T::one();
    (T::lit(10.0) * n - T::lit(2.0)) / ((n + one) * (n + one))
}

/// `B(n) = 2 / n`.
pub fn aux_b<T: Scalar>(n: T) -> T {
    T::lit(2.0) / n
}

/// All `n`-dependent λ thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds<T> {
    pub n: u32,
    /// `2n / (n^2 - n + 1)`, upper end of the small-λ regime (closed).
    pub lambda_small_max: T,
    /// `(3n + sqrt(5n^2 - 4n)) / (n^2 + n)`, lower end of the large-λ regime (closed).
    pub lambda_large_min: T,
    /// `A(n) = (10n - 2) / (n + 1)^2`.
    pub aux_a: T,
    /// `B(n - 1) = 2 / (n - 1)`.
    pub aux_b_nminus: T,
    /// `B(n + 1) = 2 / (n + 1)`.
    pub aux_b_nplus: T,
    /// `B(n) = 2 / n`.
    pub aux_b: T,
    /// `(6n - 2) / (n^2 + n)`.
    pub t_6n2: T,
    /// `(5n - 1) / (n^2 + n)`.
    pub t_5n1: T,
    /// `(4n - 2) / n^2`.
    pub t_4n2: T,
    /// `8n / (n + 1)^2`.
    pub t_8n: T,
    /// `(3n - sqrt(5n^2 - 4n)) / (n^2 + n)`, the other root of `n(n+1)λ^2 - 6nλ + 4`.
    pub t_small_mirror: T,
}

impl<T: Scalar> RegimeThresholds<T> {
    fn for_valid_index(n: u32) -> Self {
        let nf = T::from_index(n);
        let one = T::one();
        let two = T::lit(2.0);
        let n2n = nf * nf + nf;
        let root = (T::lit(5.0) * nf * nf - T::lit(4.0) * nf).sqrt();
        Self {
            n,
            lambda_small_max: two * nf / (nf * nf - nf + one),
            lambda_large_min: (T::lit(3.0) * nf + root) / n2n,
            aux_a: aux_a(nf),
            aux_b_nminus: aux_b(nf - one),
            aux_b_nplus: aux_b(nf + one),
            aux_b: aux_b(nf),
            t_6n2: (T::lit(6.0) * nf - two) / n2n,
            t_5n1: (T::lit(5.0) * nf - one) / n2n,
            t_4n2: (T::lit(4.0) * nf - two) / (nf * nf),
            t_8n: T::lit(8.0) * nf / ((nf + one) * (nf + one)),
            t_small_mirror: (T::lit(3.0) * nf - root) / n2n,
        }
    }

    /// The nine-term chain
    /// `2/(n+1) < 2/n < 2n/(n^2-n+1) < 2/(n-1) < (4n-2)/n^2 < (5n-1)/(n^2+n)
    ///  < (6n-2)/(n^2+n) < 8n/(n+1)^2 < (10n-2)/(n+1)^2`.
    pub fn full_chain(&self) -> Vec<(&'static str, T)> {
        vec![
            ("2/(n+1)", self.aux_b_nplus),
            ("2/n", self.aux_b),
            ("2n/(n^2-n+1)", self.lambda_small_max),
            ("2/(n-1)", self.aux_b_nminus),
            ("(4n-2)/n^2", self.t_4n2),
            ("(5n-1)/(n^2+n)", self.t_5n1),
            ("(6n-2)/(n^2+n)", self.t_6n2),
            ("8n/(n+1)^2", self.t_8n),
            ("(10n-2)/(n+1)^2", self.aux_a),
        ]
    }

    /// The five-term chain bounding the window below `A(n)`.
    pub fn short_chain(&self) -> Vec<(&'static str, T)> {
        vec![
            ("2/(n+1)", self.aux_b_nplus),
            ("2n/(n^2-n+1)", self.lambda_small_max),
            ("(4n-2)/n^2", self.t_4n2),
            ("(6n-2)/(n^2+n)", self.t_6n2),
            ("(10n-2)/(n+1)^2", self.aux_a),
        ]
    }

    /// Ordering of the roots of the cubic that decides the interior critical pair.
    pub fn root_chain(&self) -> Vec<(&'static str, T)> {
        let nf = T::from_index(self.n);
        vec![
            ("(3n-sqrt(5n^2-4n))/(n^2+n)", self.t_small_mirror),
            ("2/(n-1)", self.aux_b_nminus),
            ("(5n-1)/(n^2+n)", self.t_5n1),
            ("(3n+sqrt(5n^2-4n))/(n^2+n)", self.lambda_large_min),
            ("(6n-2)/(n^2+n)", self.t_6n2),
            ("2n/(n+1)", T::lit(2.0) * nf / (nf + T::one())),
        ]
    }
}

/// Computes every threshold for index `n`.
pub fn thresholds<T: Scalar>(n: u32) -> Result<RegimeThresholds<T>> {
    let n = validate_index(n as u64)?;
    Ok(RegimeThresholds::for_valid_index(n))
}

/// Returns true when every adjacent pair is strictly increasing.
pub fn strictly_increasing<T: Scalar>(chain: &[(&str, T)]) -> bool {
    chain.windows(2).all(|w| w[0].1 < w[1].1)
}

/// The three λ-intervals of the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Regime {
    /// `0 < λ <= 2n/(n^2-n+1)`
    SmallLambda,
    /// `2n/(n^2-n+1) < λ < (3n+sqrt(5n^2-4n))/(n^2+n)`
    MiddleLambda,
    /// `λ >= (3n+sqrt(5n^2-4n))/(n^2+n)`
    LargeLambda,
}

impl Regime {
    pub const ALL: [Regime; 3] = [
        Regime::SmallLambda,
        Regime::MiddleLambda,
        Regime::LargeLambda,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SmallLambda => "SmallLambda",
            Regime::MiddleLambda => "MiddleLambda",
            Regime::LargeLambda => "LargeLambda",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify<T: Scalar>(params: &ProblemParams<T>) -> Regime {
    let th = params.thresholds();
    let lambda = params.lambda();
    if lambda <= th.lambda_small_max {
        Regime::SmallLambda
    } else if lambda < th.lambda_large_min {
        Regime::MiddleLambda
    } else {
        Regime::LargeLambda
    }
}

/// `λ n^2 - (2n - 1)`, the value at the Koebe function.
pub fn large_branch_bound<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    params.lambda() * n * n - (T::lit(2.0) * n - T::one())
}

/// `2n - 1`.
pub fn small_branch_bound<T: Scalar>(params: &ProblemParams<T>) -> T {
    T::lit(2.0) * params.nf() - T::one()
}

/// The middle-branch closed form, evaluated for any `0 < λ < 2` where the
/// denominator does not vanish.
///
/// `(λ[4n(n+1) - (3n^2+1)λ] + 4n(2-λ)sqrt(nλ(2-λ))) / (λ[8n - λ(n+1)^2])`
pub fn middle_branch_bound<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let root = (n * l * (two - l)).sqrt();
    let num =
        l * (four * n * (n + one) - (T::lit(3.0) * n * n + one) * l) + four * n * (two - l) * root;
    let den = l * (T::lit(8.0) * n - l * (n + one) * (n + one));
    num / den
}

/// Upper bound on `|λ a_n^2 - a_{2n-1}|` over the close-to-convex family.
pub fn theorem_bound<T: Scalar>(params: &ProblemParams<T>) -> T {
    match classify(params) {
        Regime::LargeLambda => large_branch_bound(params),
        Regime::MiddleLambda => middle_branch_bound(params),
        Regime::SmallLambda => small_branch_bound(params),
    }
}

/// Specialised bound formulas for `n = 3` and `n = 4`, written in their
/// reduced integer form rather than through the general expression.
pub mod corollary {
    use crate::scalar::Scalar;

    /// Lower end of the `n = 4` middle range as it is commonly printed. It is
    /// the reciprocal of the general threshold `2n/(n^2-n+1) = 8/13`.
    pub const N4_PRINTED_MIDDLE_LOWER: f64 = 13.0 / 8.0;

    pub fn bound_n3<T: Scalar>(lambda: T) -> T {
        let l = lambda;
        let two = T::lit(2.0);
        let large_min = (T::lit(9.0) + T::lit(33.0).sqrt()) / T::lit(12.0);
        if l >= large_min {
            T::lit(9.0) * l - T::lit(5.0)
        } else if l > T::lit(6.0) / T::lit(7.0) {
            (l * (T::lit(12.0) - T::lit(7.0) * l)
                + T::lit(3.0) * (two - l) * (T::lit(3.0) * l * (two - l)).sqrt())
                / (l * (T::lit(6.0) - T::lit(4.0) * l))
        } else {
            T::lit(5.0)
        }
    }

    /// Uses `8/13` as the lower end of the middle range.
    pub fn bound_n4<T: Scalar>(lambda: T) -> T {
        let l = lambda;
        let two = T::lit(2.0);
        if l >= T::one() {
            T::lit(16.0) * l - T::lit(7.0)
        } else if l > T::lit(8.0) / T::lit(13.0) {
            (l * (T::lit(80.0) - T::lit(49.0) * l)
                + T::lit(32.0) * (two - l) * (l * (two - l)).sqrt())
                / (l * (T::lit(32.0) - T::lit(25.0) * l))
        } else {
            T::lit(7.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, lambda: f64) -> ProblemParams<f64> {
        ProblemParams::new(n, lambda).unwrap()
    }

    #[test]
    fn rejects_small_index_and_bad_lambda() {
        assert_eq!(ProblemParams::new(2, 1.0_f64), Err(Error::IndexTooSmall(2)));
        assert!(matches!(
            ProblemParams::new(3, 0.0_f64),
            Err(Error::InvalidLambda(_))
        ));
        assert!(ProblemParams::new(3, -1.0_f64).is_err());
        assert!(ProblemParams::new(3, f64::NAN).is_err());
        assert!(ProblemParams::new(3, f64::INFINITY).is_err());
        assert!(ProblemParams::new(MAX_INDEX + 1, 1.0_f64).is_err());
        assert!(thresholds::<f64>(2).is_err());
    }

    #[test]
    fn thresholds_n3() {
        let th = thresholds::<f64>(3).unwrap();
        assert!((th.lambda_small_max - 6.0 / 7.0).abs() < 1e-15);
        assert!((th.lambda_large_min - (9.0 + 33f64.sqrt()) / 12.0).abs() < 1e-15);
        assert!((th.lambda_large_min - 1.228714).abs() < 1e-6);
        assert_eq!(th.aux_a, 1.75);
        assert_eq!(th.aux_b_nplus, 0.5);
        assert!((th.t_6n2 - 16.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn thresholds_n4() {
        let th = thresholds::<f64>(4).unwrap();
        assert!((th.lambda_small_max - 8.0 / 13.0).abs() < 1e-15);
        assert!((th.lambda_large_min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chains_hold_for_small_n() {
        for n in 3..=50 {
            let th = thresholds::<f64>(n).unwrap();
            assert!(strictly_increasing(&th.full_chain()), "n = {n}");
            assert!(strictly_increasing(&th.short_chain()), "n = {n}");
            assert!(strictly_increasing(&th.root_chain()), "n = {n}");
        }
    }

    #[test]
    fn aux_functions_decrease() {
        for n in 3..200 {
            let (a, b) = (n as f64, (n + 1) as f64);
            assert!(aux_a(b) < aux_a(a));
            assert!(aux_b(b) < aux_b(a));
            assert!(aux_a(a) > aux_b(a - 1.0));
        }
    }

    #[test]
    fn classify_endpoints() {
        assert_eq!(classify(&p(3, 0.8)), Regime::SmallLambda);
        assert_eq!(classify(&p(3, 1.0)), Regime::MiddleLambda);
        assert_eq!(classify(&p(3, 6.0 / 7.0)), Regime::SmallLambda);
        let th = thresholds::<f64>(3).unwrap();
        assert_eq!(classify(&p(3, th.lambda_large_min)), Regime::LargeLambda);
        assert_eq!(classify(&p(4, 1.0)), Regime::LargeLambda);
    }

    #[test]
    fn bound_examples() {
        let b = theorem_bound(&p(3, 1.0));
        assert!((b - (5.0 + 3.0 * 3f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((b - 5.09808).abs() < 1e-5);
        assert_eq!(theorem_bound(&p(3, 2.0)), 13.0);
        assert_eq!(theorem_bound(&p(3, 0.5)), 5.0);
        assert_eq!(theorem_bound(&p(4, 1.0)), 9.0);
    }

    #[test]
    fn unit_weight_gives_square() {
        for n in 4..=200u32 {
            let expected = ((n - 1) * (n - 1)) as f64;
            assert_eq!(classify(&p(n, 1.0)), Regime::LargeLambda);
            assert_eq!(theorem_bound(&p(n, 1.0)), expected);
        }
    }

    #[test]
    fn adjacent_branches_meet_at_thresholds() {
        for n in 3..=12 {
            let th = thresholds::<f64>(n).unwrap();
            let at_small = p(n, th.lambda_small_max);
            let at_large = p(n, th.lambda_large_min);
            assert!((middle_branch_bound(&at_small) - small_branch_bound(&at_small)).abs() < 1e-9);
            assert!((middle_branch_bound(&at_large) - large_branch_bound(&at_large)).abs() < 1e-9);
        }
    }

    // A one-sided step of 1e-6 moves the large branch by n^2 * 1e-6, which
    // exceeds 1e-4 once n >= 8; 1e-8 keeps the drift well inside it.
    #[test]
    fn bound_is_continuous_across_regimes() {
        let eps = 1e-8;
        for n in 3..=12 {
            let th = thresholds::<f64>(n).unwrap();
            for lam0 in [th.lambda_small_max, th.lambda_large_min] {
                let lo = theorem_bound(&p(n, lam0 - eps));
                let hi = theorem_bound(&p(n, lam0 + eps));
                assert!((lo - hi).abs() < 1e-4, "n = {n}, lambda0 = {lam0}");
            }
        }
    }

    #[test]
    fn corollaries_match_general_bound() {
        for i in 1..400 {
            let lambda = i as f64 * 0.01;
            let b3 = theorem_bound(&p(3, lambda));
            let b4 = theorem_bound(&p(4, lambda));
            assert!(
                (corollary::bound_n3(lambda) - b3).abs() < 1e-12,
                "lambda = {lambda}"
            );
            assert!(
                (corollary::bound_n4(lambda) - b4).abs() < 1e-12,
                "lambda = {lambda}"
            );
        }
    }

    #[test]
    fn single_precision_agrees() {
        let b32 = theorem_bound(&ProblemParams::new(3, 1.0_f32).unwrap());
        let b64 = theorem_bound(&p(3, 1.0));
        assert!((b32 as f64 - b64).abs() < 1e-5);
    }
}
