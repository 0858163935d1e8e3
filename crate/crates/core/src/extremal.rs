//! Extreme points of the closed convex hull of the close-to-convex family,
//! their Taylor coefficients, and the coefficient functionals evaluated on them.
//!
//! An extreme point is fixed by two unimodular numbers `x = e^{is}` and
//! `y = e^{it}` with `x != y`; its coefficients are
//! `a_k = ((k+1)/2) y^{k-1} - ((k-1)/2) x y^{k-2}` for `k >= 2`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::scalar::Scalar;

pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let tau = T::TAU();
    let r = a % tau;
    let r = if r < T::zero() { r + tau } else { r };
    // `-tiny % tau + tau` rounds to tau itself
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// Torus parameters `(s, t)` of an extreme point, both reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremePoint<T> {
    s: T,
    t: T,
}

impl<T: Scalar> ExtremePoint<T> {
    pub fn new(s: T, t: T) -> Result<Self> {
        let (s, t) = (wrap_angle(s), wrap_angle(t));
        if s == t {
            return Err(Error::CoincidentArguments(s.as_f64()));
        }
        Ok(Self { s, t })
    }

    /// `x = -1, y = 1`: the Koebe function `z / (1 - z)^2`.
    pub fn koebe() -> Self {
        Self {
            s: T::PI(),
            t: T::zero(),
        }
    }

    #[inline]
    pub fn s(&self) -> T {
        self.s
    }

    #[inline]
    pub fn t(&self) -> T {
        self.t
    }

    pub fn x(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.s)
    }

    pub fn y(&self) -> Complex<T> {
        Complex::from_polar(T::one(), self.t)
    }

    /// Coefficient `a_k`, `k >= 2`.
    pub fn coefficient(&self, k: u32) -> Result<Complex<T>> {
        if k < 2 {
            return Err(Error::CoefficientIndex(k));
        }
        Ok(coeff_unchecked(self.s, self.t, k))
    }

    /// `a_1 ..= a_len` with `a_1 = 1`.
    pub fn coefficients(&self, len: usize) -> CoefficientVector<T> {
        let mut coefficients = Vec::with_capacity(len.max(1));
        coefficients.push(Complex::new(T::one(), T::zero()));
        for k in 2..=len as u32 {
            coefficients.push(coeff_unchecked(self.s, self.t, k));
        }
        CoefficientVector { coefficients }
    }
}

#[inline]
fn coeff_unchecked<T: Scalar>(s: T, t: T, k: u32) -> Complex<T> {
    let half = T::lit(0.5);
    let kf = T::from_index(k);
    let lead = (kf + T::one()) * half;
    let trail = (kf - T::one()) * half;
    let y_pow = Complex::from_polar(T::one(), T::from_index(k - 1) * t);
    let xy_pow = Complex::from_polar(T::one(), s + T::from_index(k - 2) * t);
    y_pow * lead - xy_pow * trail
}

/// `a_k` of the extreme point `p`.
pub fn extreme_coeff<T: Scalar>(p: &ExtremePoint<T>, k: u32) -> Result<Complex<T>> {
    p.coefficient(k)
}

/// Taylor coefficients `a_1, a_2, ..., a_N` of a normalized function, `a_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector<T> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Scalar> CoefficientVector<T> {
    /// `coefficients[0]` is `a_1` and must equal 1 up to rounding.
    pub fn new(coefficients: Vec<Complex<T>>) -> Result<Self> {
        let Some(first) = coefficients.first() else {
            return Err(Error::TooFewCoefficients { have: 0, need: 1 });
        };
        let tol = T::epsilon() * T::lit(16.0);
        if (first.re - T::one()).abs() > tol || first.im.abs() > tol {
            return Err(Error::NotNormalized(format!("{first}")));
        }
        Ok(Self { coefficients })
    }

    /// `z / (1 - z)^2`, `a_k = k`.
    pub fn koebe(len: usize) -> Self {
        let coefficients = (1..=len.max(1) as u32)
            .map(|k| Complex::new(T::from_index(k), T::zero()))
            .collect();
        Self { coefficients }
    }

    /// `f(z) = z`.
    pub fn identity(len: usize) -> Self {
        let mut coefficients = vec![Complex::new(T::zero(), T::zero()); len.max(1)];
        coefficients[0] = Complex::new(T::one(), T::zero());
        Self { coefficients }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// One-based access: `get(k)` is `a_k`.
    pub fn get(&self, k: u32) -> Option<Complex<T>> {
        if k == 0 {
            return None;
        }
        self.coefficients.get(k as usize - 1).copied()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    fn pair(&self, params: &ProblemParams<T>) -> Result<(Complex<T>, Complex<T>)> {
        let need = params.odd_index() as usize;
        if self.len() < need {
            return Err(Error::TooFewCoefficients {
                have: self.len(),
                need,
            });
        }
        Ok((
            self.coefficients[params.n() as usize - 1],
            self.coefficients[need - 1],
        ))
    }

    /// Convex combination `t * self + (1 - t) * other`, truncated to the shorter length.
    pub fn mix(&self, other: &Self, t: T) -> Self {
        let s = T::one() - t;
        let coefficients = self
            .coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(g, h)| g * t + h * s)
            .collect();
        Self { coefficients }
    }
}

/// `λ a_n^2 - a_{2n-1}`, its modulus, and `J = λ (Re a_n)^2 - Re a_{2n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue<T> {
    pub z_complex: Complex<T>,
    pub z_modulus: T,
    pub j_value: T,
}

pub fn zalcman_functional<T: Scalar>(
    c: &CoefficientVector<T>,
    params: &ProblemParams<T>,
) -> Result<FunctionalValue<T>> {
    let (an, odd) = c.pair(params)?;
    let lambda = params.lambda();
    let z_complex = an * an * lambda - odd;
    Ok(FunctionalValue {
        z_complex,
        z_modulus: z_complex.norm(),
        j_value: lambda * an.re * an.re - odd.re,
    })
}

/// `J(f) = λ (Re a_n)^2 - Re a_{2n-1}`.
pub fn j_functional<T: Scalar>(c: &CoefficientVector<T>, params: &ProblemParams<T>) -> Result<T> {
    zalcman_functional(c, params).map(|v| v.j_value)
}

/// Coefficients of `e^{-iθ} f(e^{iθ} z)`: `a_k -> a_k e^{i(k-1)θ}`.
pub fn rotate<T: Scalar>(c: &CoefficientVector<T>, theta: T) -> CoefficientVector<T> {
    let coefficients = c
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i == 0 {
                *a
            } else {
                a * Complex::from_polar(T::one(), T::from_index(i as u32) * theta)
            }
        })
        .collect();
    CoefficientVector { coefficients }
}

/// Amount by which `J` of a mixture falls below the mixture of `J`:
/// `λ t (1 - t) (b_n - c_n)^2`, with `b_n`, `c_n` the real parts of the two `a_n`.
pub fn j_convexity_remainder<T: Scalar>(b_n: T, c_n: T, t_mix: T, lambda: T) -> T {
    let d = b_n - c_n;
    lambda * t_mix * (T::one() - t_mix) * d * d
}

/// Which real functional a torus sweep maximizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepObjective {
    /// `Re(λ a_n^2 - a_{2n-1})`; its maximum over the torus equals the maximum modulus.
    RealPart,
    /// `J = λ (Re a_n)^2 - Re a_{2n-1}`, the convex majorant of the real part.
    SurrogateJ,
}

/// Objective evaluated straight from `(s, t)` without materializing a coefficient vector.
#[derive(Debug, Clone, Copy)]
pub struct TorusObjective<T> {
    n: u32,
    lambda: T,
    objective: SweepObjective,
}

impl<T: Scalar> TorusObjective<T> {
    pub fn new(params: &ProblemParams<T>, objective: SweepObjective) -> Self {
        Self {
            n: params.n(),
            lambda: params.lambda(),
            objective,
        }
    }

    #[inline]
    pub fn eval(&self, s: T, t: T) -> T {
        let an = coeff_unchecked(s, t, self.n);
        let odd = coeff_unchecked(s, t, 2 * self.n - 1);
        match self.objective {
            SweepObjective::RealPart => self.lambda * (an.re * an.re - an.im * an.im) - odd.re,
            SweepObjective::SurrogateJ => self.lambda * an.re * an.re - odd.re,
        }
    }
}

/// Result of a torus sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepResult<T> {
    pub value: T,
    pub argmax: ExtremePoint<T>,
    /// Value at the best lattice point before refinement.
    pub lattice_value: T,
    pub evaluations: usize,
}

pub const SWEEP_MIN_GRID: usize = 8;
const SWEEP_ROUNDS: usize = 6;
const SWEEP_ZOOM: usize = 10;
/// Lattice peaks refined independently.
const SWEEP_STARTS: usize = 32;
const POLISH_MAX_STEPS: usize = 2_000;

#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    value: T,
    s: T,
    t: T,
}

impl<T: Scalar> Candidate<T> {
    fn none() -> Self {
        Self {
            value: T::neg_infinity(),
            s: T::zero(),
            t: T::zero(),
        }
    }

    // Larger value wins; equal values go to the lexicographically smaller (s, t).
    fn better(self, other: Self) -> Self {
        if other.value > self.value {
            return other;
        }
        if other.value == self.value && (other.s, other.t) < (self.s, self.t) {
            return other;
        }
        self
    }
}

fn off_diagonal<T: Scalar>(s: T, t: T) -> bool {
    let d = wrap_angle(s - t);
    let guard = T::epsilon() * T::lit(64.0);
    d > guard && T::TAU() - d > guard
}

fn refine<T: Scalar>(f: &TorusObjective<T>, start: Candidate<T>, step: T) -> (Candidate<T>, usize) {
    let mut best = start;
    let mut evaluations = 0;
    let mut half = step;
    for _ in 0..SWEEP_ROUNDS {
        let sub = half * T::lit(2.0) / T::from_index(2 * SWEEP_ZOOM as u32);
        let (cs, ct) = (best.s, best.t);
        let side = 2 * SWEEP_ZOOM + 1;
        let round = (0..side)
            .into_par_iter()
            .map(|i| {
                let s = wrap_angle(cs - half + T::from_index(i as u32) * sub);
                (0..side)
                    .filter_map(|j| {
                        let t = wrap_angle(ct - half + T::from_index(j as u32) * sub);
                        off_diagonal(s, t).then(|| Candidate {
                            value: f.eval(s, t),
                            s,
                            t,
                        })
                    })
                    .fold(Candidate::none(), Candidate::better)
            })
            .reduce(Candidate::none, Candidate::better);
        evaluations += side * side;
        best = best.better(round);
        half = half / T::from_index(SWEEP_ZOOM as u32);
    }
    let (best, count) = polish(f, best, step);
    (best, evaluations + count)
}

/// Nelder-Mead ascent from the refined incumbent; follows narrow ridges the
/// zoom boxes cannot leave.
fn polish<T: Scalar>(f: &TorusObjective<T>, start: Candidate<T>, step: T) -> (Candidate<T>, usize) {
    let mut evaluations = 0;
    let mut eval = |s: T, t: T| -> Candidate<T> {
        let (s, t) = (wrap_angle(s), wrap_angle(t));
        if !off_diagonal(s, t) {
            return Candidate {
                value: T::neg_infinity(),
                s,
                t,
            };
        }
        evaluations += 1;
        Candidate {
            value: f.eval(s, t),
            s,
            t,
        }
    };
    let h = step / T::from_index(SWEEP_ZOOM as u32);
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    // vertices are kept unwrapped so the simplex stays contiguous
    let mut simplex = [
        (start.s, start.t, start.value),
        (start.s + h, start.t, eval(start.s + h, start.t).value),
        (start.s, start.t + h, eval(start.s, start.t + h).value),
    ];
    for _ in 0..POLISH_MAX_STEPS {
        simplex.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap_or(std::cmp::Ordering::Equal));
        let [best, mid, worst] = simplex;
        let size = (mid.0 - best.0)
            .abs()
            .max((mid.1 - best.1).abs())
            .max((worst.0 - best.0).abs())
            .max((worst.1 - best.1).abs());
        if size < T::epsilon() * T::lit(16.0) {
            break;
        }
        let (cs, ct) = ((best.0 + mid.0) * half, (best.1 + mid.1) * half);
        let at = |k: T| (cs + k * (worst.0 - cs), ct + k * (worst.1 - ct));
        let (rs, rt) = at(-T::one());
        let r = eval(rs, rt).value;
        if r > best.2 {
            let (es, et) = at(-two);
            let e = eval(es, et).value;
            simplex[2] = if e > r { (es, et, e) } else { (rs, rt, r) };
        } else if r > mid.2 {
            simplex[2] = (rs, rt, r);
        } else {
            let (ks, kt) = if r > worst.2 { at(-half) } else { at(half) };
            let k = eval(ks, kt).value;
            if k > worst.2.max(r) {
                simplex[2] = (ks, kt, k);
            } else {
                for v in simplex.iter_mut().skip(1) {
                    let (s, t) = (
                        best.0 + (v.0 - best.0) * half,
                        best.1 + (v.1 - best.1) * half,
                    );
                    *v = (s, t, eval(s, t).value);
                }
            }
        }
    }
    let top = simplex
        .iter()
        .map(|&(s, t, value)| Candidate {
            value,
            s: wrap_angle(s),
            t: wrap_angle(t),
        })
        .fold(start, Candidate::better);
    (top, evaluations)
}

/// Maximizes `Re(λ a_n^2 - a_{2n-1})` over the extreme points on a
/// `grid x grid` lattice of `[0, 2π)^2`, then refines around the best lattice peaks.
pub fn sweep_extreme_points<T: Scalar>(
    params: &ProblemParams<T>,
    grid: usize,
) -> Result<SweepResult<T>> {
    sweep_extreme_points_with(params, grid, SweepObjective::RealPart)
}

pub fn sweep_extreme_points_with<T: Scalar>(
    params: &ProblemParams<T>,
    grid: usize,
    objective: SweepObjective,
) -> Result<SweepResult<T>> {
    if grid < SWEEP_MIN_GRID {
        return Err(Error::GridTooCoarse {
            got: grid,
            min: SWEEP_MIN_GRID,
        });
    }
    let f = TorusObjective::new(params, objective);
    let step = T::TAU() / T::from_index(grid as u32);

    let rows: Vec<Vec<T>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let s = T::from_index(i as u32) * step;
            (0..grid)
                .map(|j| {
                    if i == j {
                        T::neg_infinity()
                    } else {
                        f.eval(s, T::from_index(j as u32) * step)
                    }
                })
                .collect()
        })
        .collect();
    let mut evaluations = grid * (grid - 1);

    // lattice local maxima on the torus, best first
    let mut peaks: Vec<Candidate<T>> = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let rows = &rows;
            (0..grid).filter_map(move |j| {
                let value = rows[i][j];
                if i == j {
                    return None;
                }
                let wrap = |k: usize, d: isize| (k as isize + d).rem_euclid(grid as isize) as usize;
                let is_peak =
                    (-1..=1).all(|di| (-1..=1).all(|dj| rows[wrap(i, di)][wrap(j, dj)] <= value));
                is_peak.then(|| Candidate {
                    value,
                    s: T::from_index(i as u32) * step,
                    t: T::from_index(j as u32) * step,
                })
            })
        })
        .collect();
    peaks.sort_by(|a, b| {
        b.value
            .partial_cmp(&a.value)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.s.partial_cmp(&b.s).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.t.partial_cmp(&b.t).unwrap_or(std::cmp::Ordering::Equal))
    });
    peaks.truncate(SWEEP_STARTS);
    let lattice = peaks.first().copied().unwrap_or_else(Candidate::none);

    let mut best = Candidate::none();
    for start in peaks {
        let (refined, count) = refine(&f, start, step);
        evaluations += count;
        best = best.better(refined);
    }

    Ok(SweepResult {
        value: best.value,
        argmax: ExtremePoint::new(best.s, best.t)?,
        lattice_value: lattice.value,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(n: u32, lambda: f64) -> ProblemParams<f64> {
        ProblemParams::new(n, lambda).unwrap()
    }

    #[test]
    fn rejects_coincident_arguments() {
        assert!(ExtremePoint::new(1.0_f64, 1.0).is_err());
        assert!(ExtremePoint::new(0.0_f64, 2.0 * PI).is_err());
        assert!(ExtremePoint::new(0.5_f64, 0.5 + 4.0 * PI).is_err());
    }

    #[test]
    fn koebe_coefficients_are_integers() {
        let k = ExtremePoint::<f64>::koebe();
        for idx in 2..=50u32 {
            let a = k.coefficient(idx).unwrap();
            assert!((a.re - idx as f64).abs() < 1e-12, "k = {idx}: {a}");
            assert!(a.im.abs() < 1e-12);
        }
        let flipped = ExtremePoint::new(0.0, PI).unwrap();
        for idx in 2..=50u32 {
            let a = flipped.coefficient(idx).unwrap();
            let sign = if idx % 2 == 1 { 1.0 } else { -1.0 };
            assert!((a.re - sign * idx as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn hand_substituted_coefficient() {
        let e = ExtremePoint::new(PI / 2.0, 0.0).unwrap();
        let a3 = e.coefficient(3).unwrap();
        assert!((a3 - Complex::new(2.0, -1.0)).norm() < 1e-15);
        assert!(matches!(e.coefficient(1), Err(Error::CoefficientIndex(1))));
    }

    #[test]
    fn functional_on_koebe() {
        let k = CoefficientVector::<f64>::koebe(5);
        let v = zalcman_functional(&k, &p(3, 1.0)).unwrap();
        assert_eq!(v.z_complex, Complex::new(4.0, 0.0));
        assert_eq!(v.z_modulus, 4.0);
        let k7 = CoefficientVector::<f64>::koebe(7);
        let v = zalcman_functional(&k7, &p(4, 2.0)).unwrap();
        assert_eq!(v.z_modulus, 25.0);
        let id = CoefficientVector::<f64>::identity(9);
        let v = zalcman_functional(&id, &p(5, 0.7)).unwrap();
        assert_eq!(v.z_modulus, 0.0);
    }

    #[test]
    fn functional_needs_enough_coefficients() {
        let k = CoefficientVector::<f64>::koebe(4);
        assert_eq!(
            zalcman_functional(&k, &p(3, 1.0)),
            Err(Error::TooFewCoefficients { have: 4, need: 5 })
        );
    }

    #[test]
    fn normalization_enforced() {
        let bad = vec![Complex::new(2.0_f64, 0.0), Complex::new(1.0, 0.0)];
        assert!(matches!(
            CoefficientVector::new(bad),
            Err(Error::NotNormalized(_))
        ));
        assert!(CoefficientVector::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn rotation_by_pi_alternates_koebe() {
        let k = CoefficientVector::<f64>::koebe(9);
        let r = rotate(&k, PI);
        let e = ExtremePoint::new(0.0, PI).unwrap().coefficients(9);
        for (a, b) in r.as_slice().iter().zip(e.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(rotate(&k, 0.0), k);
    }

    #[test]
    fn convexity_remainder_examples() {
        assert_eq!(j_convexity_remainder(2.0, 2.0, 0.5, 1.0), 0.0);
        assert_eq!(j_convexity_remainder(3.0, 1.0, 0.5, 1.0), 1.0);
        assert_eq!(j_convexity_remainder(3.0, 1.0, 0.25, 2.0), 1.5);
    }

    #[test]
    fn convexity_remainder_matches_mixture() {
        // explicit vectors with Re a_3 = 3 and 1, lambda = 2, t = 0.25
        let params = p(3, 2.0);
        let g = CoefficientVector::new(vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(3.0, 0.5),
            Complex::new(0.0, 0.0),
            Complex::new(-1.0, 2.0),
        ])
        .unwrap();
        let h = CoefficientVector::new(vec![
            Complex::new(1.0, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, -0.5),
            Complex::new(0.0, 0.0),
            Complex::new(4.0, 0.0),
        ])
        .unwrap();
        let t = 0.25;
        let jm = j_functional(&g.mix(&h, t), &params).unwrap();
        let jg = j_functional(&g, &params).unwrap();
        let jh = j_functional(&h, &params).unwrap();
        let gap = t * jg + (1.0 - t) * jh - jm;
        assert!((gap - 1.5).abs() < 1e-12);
    }

    #[test]
    fn sweep_finds_koebe_value_in_large_regime() {
        let r = sweep_extreme_points(&p(3, 2.0), 64).unwrap();
        assert!((r.value - 13.0).abs() < 1e-9);
        // maximizers are the rotations (π + θ, θ), θ = jπ/(n-1)
        let d = wrap_angle(r.argmax.s() - r.argmax.t() - PI);
        assert!(d.min(2.0 * PI - d) < 1e-6);
    }

    #[test]
    fn sweep_rejects_coarse_grid() {
        assert!(sweep_extreme_points(&p(3, 1.0), 7).is_err());
    }

    #[test]
    fn sweep_stays_below_bound_for_small_lambda() {
        let r = sweep_extreme_points(&p(3, 0.5), 128).unwrap();
        assert!(r.value <= 5.0 + 1e-6);
        assert!(r.value >= r.lattice_value);
    }

    #[test]
    fn surrogate_sweep_reaches_middle_bound() {
        let r = sweep_extreme_points_with(&p(3, 1.0), 128, SweepObjective::SurrogateJ).unwrap();
        assert!((r.value - (5.0 + 3.0 * 3f64.sqrt()) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn torus_objective_matches_coefficient_path() {
        let params = p(4, 0.9);
        let f = TorusObjective::new(&params, SweepObjective::RealPart);
        let g = TorusObjective::new(&params, SweepObjective::SurrogateJ);
        let e = ExtremePoint::new(1.3, 4.1).unwrap();
        let v = zalcman_functional(&e.coefficients(7), &params).unwrap();
        assert!((f.eval(1.3, 4.1) - v.z_complex.re).abs() < 1e-12);
        assert!((g.eval(1.3, 4.1) - v.j_value).abs() < 1e-12);
    }
}
