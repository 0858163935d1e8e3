//! Brute-force global maximization on rectangles and intervals.
//!
//! A dense lattice (endpoints included) is evaluated in parallel, then a
//! fixed number of zoom rounds refine around the incumbent. The reductions
//! pick the larger value and break exact ties toward the lexicographically
//! smaller location, so results do not depend on the thread schedule.
//!
//! `certified_gap` is `L * (half the lattice cell diagonal)`: for an
//! `L`-Lipschitz objective no point of the domain can exceed the best
//! lattice value by more than that.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MIN_RESOLUTION: usize = 8;

/// Lattice size and refinement schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Lattice points per axis, endpoints included.
    pub resolution: usize,
    pub refinement_rounds: usize,
    /// Shrink factor of the refinement box per round.
    pub zoom: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 512,
            refinement_rounds: 6,
            zoom: 8.0,
        }
    }
}

impl GridSpec {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < MIN_RESOLUTION {
            return Err(Error::GridTooCoarse {
                got: self.resolution,
                min: MIN_RESOLUTION,
            });
        }
        if !(self.zoom.is_finite() && self.zoom > 1.0) {
            return Err(Error::InvalidGridSpec(format!(
                "zoom must be finite and > 1, got {}",
                self.zoom
            )));
        }
        Ok(())
    }

    /// Intervals per axis inside one refinement box.
    fn refine_intervals(&self) -> usize {
        (2.0 * self.zoom).ceil() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::DegenerateDomain(format!("[{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn unit() -> Self {
        Self {
            lo: -T::one(),
            hi: T::one(),
        }
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    fn clamp(&self, x: T) -> T {
        x.max(self.lo).min(self.hi)
    }

    /// `count` evenly spaced points, the last one exactly `hi`.
    fn point(&self, i: usize, count: usize) -> T {
        if i + 1 == count {
            self.hi
        } else {
            self.lo + self.width() * T::from_index(i as u32) / T::from_index(count as u32 - 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect<T> {
    pub u: Interval<T>,
    pub v: Interval<T>,
}

impl<T: Scalar> Rect<T> {
    pub fn new(u_min: T, u_max: T, v_min: T, v_max: T) -> Result<Self> {
        Ok(Self {
            u: Interval::new(u_min, u_max)?,
            v: Interval::new(v_min, v_max)?,
        })
    }

    /// `[-1, 1] x [-1, 1]`
    pub fn unit_square() -> Self {
        Self {
            u: Interval::unit(),
            v: Interval::unit(),
        }
    }
}

/// Where the slope bound behind `certified_gap` comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lipschitz<T> {
    Known(T),
    /// Largest difference quotient between neighbouring lattice points.
    Estimate,
}

/// Outcome of a two-dimensional search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxResult<T> {
    pub value: T,
    pub location: (T, T),
    pub certified_gap: T,
    pub lipschitz: T,
    /// Incumbent value after the lattice pass and after each refinement round.
    pub refinement_trace: Vec<T>,
    pub evaluations: usize,
}

/// Outcome of a one-dimensional search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMaxResult<T> {
    pub value: T,
    pub location: T,
    pub certified_gap: T,
    pub lipschitz: T,
    pub refinement_trace: Vec<T>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Best<T> {
    value: T,
    u: T,
    v: T,
}

impl<T: Scalar> Best<T> {
    fn none() -> Self {
        Self {
            value: T::neg_infinity(),
            u: T::zero(),
            v: T::zero(),
        }
    }

    fn better(self, other: Self) -> Self {
        if other.value > self.value
            || (other.value == self.value && (other.u, other.v) < (self.u, self.v))
        {
            other
        } else {
            self
        }
    }
}

struct RowScan<T> {
    best: Best<T>,
    values: Vec<T>,
}

/// Maximizes `f` over the closed rectangle `domain`.
pub fn grid_max<T, F>(
    f: F,
    domain: &Rect<T>,
    spec: &GridSpec,
    lipschitz: Lipschitz<T>,
) -> Result<MaxResult<T>>
where
    T: Scalar,
    F: Fn(T, T) -> T + Sync,
{
    spec.validate()?;
    let res = spec.resolution;
    let keep_rows = matches!(lipschitz, Lipschitz::Estimate);

    let rows: Vec<RowScan<T>> = (0..res)
        .into_par_iter()
        .map(|i| {
            let u = domain.u.point(i, res);
            let mut best = Best::none();
            let mut values = Vec::with_capacity(if keep_rows { res } else { 0 });
            for j in 0..res {
                let v = domain.v.point(j, res);
                let value = f(u, v);
                best = best.better(Best { value, u, v });
                if keep_rows {
                    values.push(value);
                }
            }
            RowScan { best, values }
        })
        .collect();

    let mut best = rows.iter().map(|r| r.best).fold(Best::none(), Best::better);

    let step_u = domain.u.width() / T::from_index(res as u32 - 1);
    let step_v = domain.v.width() / T::from_index(res as u32 - 1);
    let slope = match lipschitz {
        Lipschitz::Known(l) => l,
        Lipschitz::Estimate => estimate_slope(&rows, step_u, step_v),
    };
    let certified_gap = slope * (step_u * step_u + step_v * step_v).sqrt() / T::lit(2.0);

    let mut trace = vec![best.value];
    let mut evaluations = res * res;
    let m = spec.refine_intervals();
    let (mut hu, mut hv) = (step_u, step_v);
    for _ in 0..spec.refinement_rounds {
        let bu = Interval {
            lo: domain.u.clamp(best.u - hu),
            hi: domain.u.clamp(best.u + hu),
        };
        let bv = Interval {
            lo: domain.v.clamp(best.v - hv),
            hi: domain.v.clamp(best.v + hv),
        };
        let round = (0..=m)
            .into_par_iter()
            .map(|i| {
                let u = bu.point(i, m + 1);
                (0..=m)
                    .map(|j| {
                        let v = bv.point(j, m + 1);
                        Best {
                            value: f(u, v),
                            u,
                            v,
                        }
                    })
                    .fold(Best::none(), Best::better)
            })
            .reduce(Best::none, Best::better);
        evaluations += (m + 1) * (m + 1);
        best = best.better(round);
        trace.push(best.value);
        hu = T::lit(2.0) * hu / T::from_index(m as u32);
        hv = T::lit(2.0) * hv / T::from_index(m as u32);
    }

    Ok(MaxResult {
        value: best.value,
        location: (best.u, best.v),
        certified_gap,
        lipschitz: slope,
        refinement_trace: trace,
        evaluations,
    })
}

fn estimate_slope<T: Scalar>(rows: &[RowScan<T>], step_u: T, step_v: T) -> T {
    let mut slope = T::zero();
    for (i, row) in rows.iter().enumerate() {
        for j in 1..row.values.len() {
            slope = slope.max((row.values[j] - row.values[j - 1]).abs() / step_v);
        }
        if i > 0 {
            for (a, b) in rows[i - 1].values.iter().zip(&row.values) {
                slope = slope.max((*b - *a).abs() / step_u);
            }
        }
    }
    slope
}

/// Maximizes `f` over the closed interval `domain`.
pub fn edge_max<T, F>(
    f: F,
    domain: &Interval<T>,
    spec: &GridSpec,
    lipschitz: Lipschitz<T>,
) -> Result<EdgeMaxResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T + Sync,
{
    spec.validate()?;
    let res = spec.resolution;
    let values: Vec<(T, T)> = (0..res)
        .into_par_iter()
        .map(|i| {
            let x = domain.point(i, res);
            (x, f(x))
        })
        .collect();
    let pick = |a: (T, T), b: (T, T)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    let mut best = values
        .iter()
        .copied()
        .fold((T::zero(), T::neg_infinity()), pick);

    let step = domain.width() / T::from_index(res as u32 - 1);
    let slope = match lipschitz {
        Lipschitz::Known(l) => l,
        Lipschitz::Estimate => values
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs() / step)
            .fold(T::zero(), T::max),
    };
    let certified_gap = slope * step / T::lit(2.0);

    let mut trace = vec![best.1];
    let mut evaluations = res;
    let m = spec.refine_intervals();
    let mut h = step;
    for _ in 0..spec.refinement_rounds {
        let b = Interval {
            lo: domain.clamp(best.0 - h),
            hi: domain.clamp(best.0 + h),
        };
        best = (0..=m)
            .map(|i| {
                let x = b.point(i, m + 1);
                (x, f(x))
            })
            .fold(best, pick);
        evaluations += m + 1;
        trace.push(best.1);
        h = T::lit(2.0) * h / T::from_index(m as u32);
    }

    Ok(EdgeMaxResult {
        value: best.1,
        location: best.0,
        certified_gap,
        lipschitz: slope,
        refinement_trace: trace,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::ProblemParams;
    use crate::surface::{boundary_restrictions, Surface};

    #[test]
    fn f_maximum_at_corner_for_large_lambda() {
        let params = ProblemParams::new(3, 2.0_f64).unwrap();
        let s = Surface::new(&params);
        let r = grid_max(
            |u, v| s.f(u, v),
            &Rect::unit_square(),
            &GridSpec::default(),
            Lipschitz::Known(s.lipschitz_f(1e-3)),
        )
        .unwrap();
        assert!((r.value - 40.0).abs() < 1e-9);
        // tie between (-1, 1) and (1, -1) goes to the smaller u
        assert_eq!(r.location, (-1.0, 1.0));
    }

    #[test]
    fn g_maximum_at_origin_for_small_lambda() {
        let params = ProblemParams::new(3, 0.5_f64).unwrap();
        let s = Surface::new(&params);
        let r = grid_max(
            |u, v| s.g(u, v),
            &Rect::unit_square(),
            &GridSpec::default(),
            Lipschitz::Known(s.lipschitz_g()),
        )
        .unwrap();
        assert!(r.value.abs() < 1e-9);
        assert!(r.location.0.abs() < 1e-3 && r.location.1.abs() < 1e-3);
    }

    #[test]
    fn f_interior_maximum_for_middle_lambda() {
        let params = ProblemParams::new(3, 1.0_f64).unwrap();
        let s = Surface::new(&params);
        let r = grid_max(
            |u, v| s.f(u, v),
            &Rect::unit_square(),
            &GridSpec::default(),
            Lipschitz::Estimate,
        )
        .unwrap();
        assert!((r.value - (-2.0 + 6.0 * 3f64.sqrt())).abs() < 1e-9);
        assert!((r.location.0.abs() - 0.25882).abs() < 1e-4);
        assert!((r.location.1.abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
        assert!(r.location.0 * r.location.1 < 0.0);
    }

    #[test]
    fn edge_maxima_n3_unit_weight() {
        let params = ProblemParams::new(3, 1.0_f64).unwrap();
        let b = boundary_restrictions(&params);
        let spec = GridSpec::default();
        let phi = edge_max(
            |u| b.f_on_v1.eval(u),
            &Interval::unit(),
            &spec,
            Lipschitz::Known(b.f_on_v1.quadratic.lipschitz()),
        )
        .unwrap();
        assert!((phi.value - 6.0).abs() < 1e-9);
        assert!((phi.location + 0.5).abs() < 1e-4);
        let psi = edge_max(
            |v| b.f_on_u1.eval(v),
            &Interval::unit(),
            &spec,
            Lipschitz::Estimate,
        )
        .unwrap();
        assert_eq!(psi.location, -1.0);
        assert!((psi.value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn edge_of_g_nonpositive_at_small_threshold() {
        let params = ProblemParams::new(3, 6.0_f64 / 7.0).unwrap();
        let b = boundary_restrictions(&params);
        let r = edge_max(
            |v| b.g_on_u1.eval(v),
            &Interval::unit(),
            &GridSpec::default(),
            Lipschitz::Estimate,
        )
        .unwrap();
        assert!(r.value <= 1e-12);
    }

    #[test]
    fn refinement_is_monotone_and_deterministic() {
        let f = |u: f64, v: f64| (3.0 * u).sin() * (2.0 * v).cos() - 0.1 * u * v;
        let spec = GridSpec {
            resolution: 33,
            refinement_rounds: 8,
            zoom: 4.0,
        };
        let a = grid_max(f, &Rect::unit_square(), &spec, Lipschitz::Estimate).unwrap();
        assert!(a.refinement_trace.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(a.refinement_trace.len(), 9);
        let b = grid_max(f, &Rect::unit_square(), &spec, Lipschitz::Estimate).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_domains_and_specs() {
        assert!(Rect::new(1.0, 1.0, -1.0, 1.0).is_err());
        assert!(Interval::new(2.0, -2.0).is_err());
        let coarse = GridSpec::with_resolution(4);
        assert!(grid_max(
            |u: f64, v: f64| u + v,
            &Rect::unit_square(),
            &coarse,
            Lipschitz::Estimate
        )
        .is_err());
        let bad_zoom = GridSpec {
            zoom: 1.0,
            ..GridSpec::default()
        };
        assert!(edge_max(
            |x: f64| x,
            &Interval::unit(),
            &bad_zoom,
            Lipschitz::Estimate
        )
        .is_err());
    }

    #[test]
    fn certified_gap_bounds_the_error() {
        // the maximum sits between lattice points of a 9-point grid
        let f = |x: f64| -(x - 0.1234).abs();
        let spec = GridSpec {
            resolution: 9,
            refinement_rounds: 0,
            zoom: 8.0,
        };
        let r = edge_max(f, &Interval::unit(), &spec, Lipschitz::Known(1.0)).unwrap();
        assert!(-r.value <= r.certified_gap);
        assert!(r.certified_gap >= 0.0);
    }
}
