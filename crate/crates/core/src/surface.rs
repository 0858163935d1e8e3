//! The reduction surfaces `F` and `G` on the square `R = [-1, 1]^2`.
//!
//! ```text
//! F(u,v) = [(n+1)^2 λ - 8n] u^2 - 2(n-1)[(n+1)λ - 2] uv
//!          + 4(n-1) sqrt(1-u^2) sqrt(1-v^2) + (n-1)^2 λ v^2
//! G(u,v) = [λ(n+1)^2 - 10n + 2] u^2 - 2(n-1)[λ(n+1) - 2] uv + (n-1)[λ(n-1) - 2] v^2
//! ```
//!
//! `F - G = 2(n-1)[u^2 + v^2 + 2 sqrt(1-u^2) sqrt(1-v^2)] <= 4(n-1)`, and
//! `max_R F` plus `4n` bounds four times the maximum of the real-part
//! functional over the extreme points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{classify, ProblemParams, Regime};
use crate::scalar::Scalar;

/// Interior pairs with `v^2` in `[1 - VSQ_BOUNDARY_GUARD, 1]` count as boundary-touching.
pub const VSQ_BOUNDARY_GUARD: f64 = 1e-12;

fn check_square<T: Scalar>(u: T, v: T) -> Result<()> {
    let inside = |x: T| x.abs() <= T::one();
    if inside(u) && inside(v) {
        Ok(())
    } else {
        Err(Error::OutsideSquare {
            u: u.as_f64(),
            v: v.as_f64(),
        })
    }
}

/// Precomputed coefficients of `F` and `G` for one `(n, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface<T> {
    n: T,
    lambda: T,
    /// `(n+1)^2 λ - 8n`
    f_uu: T,
    /// `(n+1)λ - 2`
    cross: T,
    /// `λ(n+1)^2 - 10n + 2`
    g_uu: T,
    /// `(n-1)[λ(n-1) - 2]`
    g_vv: T,
}

impl<T: Scalar> Surface<T> {
    pub fn new(params: &ProblemParams<T>) -> Self {
        let n = params.nf();
        let l = params.lambda();
        let one = T::one();
        let two = T::lit(2.0);
        let np1 = n + one;
        let nm1 = n - one;
        Self {
            n,
            lambda: l,
            f_uu: np1 * np1 * l - T::lit(8.0) * n,
            cross: np1 * l - two,
            g_uu: l * np1 * np1 - T::lit(10.0) * n + two,
            g_vv: nm1 * (l * nm1 - two),
        }
    }

    #[inline]
    fn nm1(&self) -> T {
        self.n - T::one()
    }

    /// `F(u, v)` without the domain check.
    #[inline]
    pub fn f(&self, u: T, v: T) -> T {
        let nm1 = self.nm1();
        let one = T::one();
        let roots = ((one - u * u).max(T::zero()) * (one - v * v).max(T::zero())).sqrt();
        self.f_uu * u * u - T::lit(2.0) * nm1 * self.cross * u * v
            + T::lit(4.0) * nm1 * roots
            + nm1 * nm1 * self.lambda * v * v
    }

    /// `G(u, v)` in expanded form, without the domain check.
    #[inline]
    pub fn g(&self, u: T, v: T) -> T {
        self.g_uu * u * u - T::lit(2.0) * self.nm1() * self.cross * u * v + self.g_vv * v * v
    }

    /// `G(u, v)` through `A(n)`, `B(n-1)`, `B(n+1)`:
    /// `(n+1)^2[λ - A(n)]u^2 - 2(n^2-1)[λ - B(n+1)]uv + (n-1)^2[λ - B(n-1)]v^2`.
    pub fn g_shifted(&self, u: T, v: T) -> T {
        use crate::params::{aux_a, aux_b};
        let one = T::one();
        let (n, l) = (self.n, self.lambda);
        let np1 = n + one;
        let nm1 = n - one;
        np1 * np1 * (l - aux_a(n)) * u * u - T::lit(2.0) * (n * n - one) * (l - aux_b(np1)) * u * v
            + nm1 * nm1 * (l - aux_b(nm1)) * v * v
    }

    /// `F - G = 2(n-1)[u^2 + v^2 + 2 sqrt(1-u^2) sqrt(1-v^2)]`.
    pub fn envelope_gap(&self, u: T, v: T) -> T {
        let one = T::one();
        let roots = ((one - u * u).max(T::zero()) * (one - v * v).max(T::zero())).sqrt();
        T::lit(2.0) * self.nm1() * (u * u + v * v + T::lit(2.0) * roots)
    }

    /// Partial derivatives of `F` on the open square.
    #[inline]
    pub fn gradient_f(&self, u: T, v: T) -> (T, T) {
        let nm1 = self.nm1();
        let one = T::one();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let su = (one - u * u).sqrt();
        let sv = (one - v * v).sqrt();
        let du = two * self.f_uu * u - two * nm1 * self.cross * v - four * nm1 * u * sv / su;
        let dv = -two * nm1 * self.cross * u + two * nm1 * nm1 * self.lambda * v
            - four * nm1 * v * su / sv;
        (du, dv)
    }

    /// Sum of absolute values of the terms of the gradient; the scale against
    /// which a gradient residual is judged.
    pub fn gradient_scale(&self, u: T, v: T) -> T {
        let nm1 = self.nm1();
        let one = T::one();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let su = (one - u * u).sqrt();
        let sv = (one - v * v).sqrt();
        (two * self.f_uu * u).abs()
            + (two * nm1 * self.cross * v).abs()
            + (four * nm1 * u * sv / su).abs()
            + (two * nm1 * self.cross * u).abs()
            + (two * nm1 * nm1 * self.lambda * v).abs()
            + (four * nm1 * v * su / sv).abs()
    }

    /// Slope bound for `F` on `[-1+collar, 1-collar]^2` (Euclidean norm of the
    /// per-axis bounds).
    pub fn lipschitz_f(&self, collar: T) -> T {
        let nm1 = self.nm1();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let edge = T::one() - collar;
        let steep = edge / (T::one() - edge * edge).sqrt();
        let lu = two * self.f_uu.abs() + two * nm1 * self.cross.abs() + four * nm1 * steep;
        let lv =
            two * nm1 * self.cross.abs() + two * nm1 * nm1 * self.lambda.abs() + four * nm1 * steep;
        (lu * lu + lv * lv).sqrt()
    }

    /// Slope bound for `G` on `R`.
    pub fn lipschitz_g(&self) -> T {
        let nm1 = self.nm1();
        let two = T::lit(2.0);
        let lu = two * self.g_uu.abs() + two * nm1 * self.cross.abs();
        let lv = two * nm1 * self.cross.abs() + two * self.g_vv.abs();
        (lu * lu + lv * lv).sqrt()
    }
}

pub fn eval_f<T: Scalar>(params: &ProblemParams<T>, u: T, v: T) -> Result<T> {
    check_square(u, v)?;
    Ok(Surface::new(params).f(u, v))
}

pub fn eval_g<T: Scalar>(params: &ProblemParams<T>, u: T, v: T) -> Result<T> {
    check_square(u, v)?;
    Ok(Surface::new(params).g(u, v))
}

/// `G` evaluated through the shifted-threshold form.
pub fn eval_g_shifted<T: Scalar>(params: &ProblemParams<T>, u: T, v: T) -> Result<T> {
    check_square(u, v)?;
    Ok(Surface::new(params).g_shifted(u, v))
}

/// Analytic gradient of `F`; only defined on the open square.
pub fn gradient_f<T: Scalar>(params: &ProblemParams<T>, u: T, v: T) -> Result<(T, T)> {
    check_square(u, v)?;
    if u.abs() >= T::one() || v.abs() >= T::one() {
        return Err(Error::OnBoundary {
            u: u.as_f64(),
            v: v.as_f64(),
        });
    }
    Ok(Surface::new(params).gradient_f(u, v))
}

/// A point of `R` with both surface values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint<T> {
    pub u: T,
    pub v: T,
    pub f_value: T,
    pub g_value: T,
}

impl<T: Scalar> SurfacePoint<T> {
    pub fn at(params: &ProblemParams<T>, u: T, v: T) -> Result<Self> {
        check_square(u, v)?;
        let s = Surface::new(params);
        Ok(Self {
            u,
            v,
            f_value: s.f(u, v),
            g_value: s.g(u, v),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalKind {
    Origin,
    InteriorPair,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint<T> {
    pub u: T,
    pub v: T,
    pub f_value: T,
    /// Euclidean norm of the analytic gradient at `(u, v)`.
    pub gradient_residual: T,
    pub kind: CriticalKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointSet<T> {
    pub points: Vec<CriticalPoint<T>>,
    pub regime_note: String,
}

impl<T> CriticalPointSet<T> {
    pub fn interior_pair(&self) -> impl Iterator<Item = &CriticalPoint<T>> {
        self.points
            .iter()
            .filter(|p| p.kind == CriticalKind::InteriorPair)
    }

    pub fn has_interior_pair(&self) -> bool {
        self.interior_pair().next().is_some()
    }
}

/// Closed-form ingredients of the nonzero critical points, with their raw
/// sub-expressions. Defined for `0 < λ < 2` away from vanishing denominators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorClosedForm<T> {
    /// `sqrt(λ n (2 - λ))`
    pub root: T,
    /// `λ(n-1) - 2 sqrt(λn(2-λ))`
    pub denom: T,
    /// `(n-1)λ - sqrt(λn(2-λ))`
    pub shifted: T,
    pub v_sq: T,
    pub uv: T,
    pub u_sq: T,
    /// `u / v` from the linear relation between the two coordinates.
    pub u_over_v: T,
    /// `sqrt((1-u^2)/(1-v^2))` from the second stationarity equation.
    pub root_ratio: T,
}

pub fn interior_closed_form<T: Scalar>(params: &ProblemParams<T>) -> InteriorClosedForm<T> {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let nm1 = n - one;
    let root = (l * n * (two - l)).sqrt();
    let denom = l * nm1 - two * root;
    let shifted = nm1 * l - root;
    let cross = (n + one) * l - two;
    let lead = (n * l).sqrt() + (two - l).sqrt();
    InteriorClosedForm {
        root,
        denom,
        shifted,
        v_sq: lead * lead * shifted / (nm1 * nm1 * l * l),
        uv: cross * shifted / (nm1 * l * denom),
        u_sq: (denom + two) * shifted / (denom * denom),
        u_over_v: nm1 * l * (denom + two) / (cross * denom),
        root_ratio: nm1 * l / (two * root - l * nm1),
    }
}

/// The window `2n/(n^2-n+1) < λ < (6n-2)/(n^2+n)` in which the closed forms apply.
pub fn in_critical_window<T: Scalar>(params: &ProblemParams<T>) -> bool {
    let th = params.thresholds();
    let l = params.lambda();
    l > th.lambda_small_max && l < th.t_6n2
}

/// Critical points of `F` in the open square.
///
/// Always contains the origin. Inside the window the nonzero pair
/// `±(u_1, v_1)` is added when `v^2 < 1`; the first listed point has `v_1 > 0`.
pub fn critical_points<T: Scalar>(params: &ProblemParams<T>) -> CriticalPointSet<T> {
    let surface = Surface::new(params);
    let nm1 = params.nf() - T::one();
    let origin = CriticalPoint {
        u: T::zero(),
        v: T::zero(),
        f_value: T::lit(4.0) * nm1,
        gradient_residual: T::zero(),
        kind: CriticalKind::Origin,
    };
    let mut points = vec![origin];

    if !in_critical_window(params) {
        return CriticalPointSet {
            points,
            regime_note: "lambda outside the window (2n/(n^2-n+1), (6n-2)/(n^2+n)); origin only"
                .to_string(),
        };
    }

    let cf = interior_closed_form(params);
    let limit = T::one() - T::lit(VSQ_BOUNDARY_GUARD);
    let regime_note = if cf.v_sq > T::zero() && cf.v_sq < limit && cf.u_sq < limit {
        let v1 = cf.v_sq.sqrt();
        let u1 = cf.u_sq.max(T::zero()).sqrt() * cf.uv.signum();
        for (u, v) in [(u1, v1), (-u1, -v1)] {
            let (du, dv) = surface.gradient_f(u, v);
            points.push(CriticalPoint {
                u,
                v,
                f_value: surface.f(u, v),
                gradient_residual: (du * du + dv * dv).sqrt(),
                kind: CriticalKind::InteriorPair,
            });
        }
        "three critical points: origin and an interior pair".to_string()
    } else {
        "v^2 >= 1: the nonzero stationary pair leaves the open square; origin only".to_string()
    };
    CriticalPointSet {
        points,
        regime_note,
    }
}

/// Closed-form value of `F` at the interior critical pair (middle regime only).
///
/// `(4λ(n-1)[λ(n^2+1) - 4n] + 16n(2-λ) sqrt(nλ(2-λ))) / (λ[8n - λ(n+1)^2])`
pub fn f_at_interior_critical<T: Scalar>(params: &ProblemParams<T>) -> Result<T> {
    if classify(params) != Regime::MiddleLambda {
        return Err(Error::OutsideWindow {
            lambda: params.lambda().as_f64(),
            window: "(2n/(n^2-n+1), (3n+sqrt(5n^2-4n))/(n^2+n))".to_string(),
        });
    }
    Ok(f_interior_formula(params))
}

/// The same closed form without the regime check.
pub fn f_interior_formula<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let root = (n * l * (two - l)).sqrt();
    let num =
        four * l * (n - one) * (l * (n * n + one) - four * n) + T::lit(16.0) * n * (two - l) * root;
    num / (l * (T::lit(8.0) * n - l * (n + one) * (n + one)))
}

/// `c2 x^2 + c1 x + c0` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadratic<T> {
    pub c2: T,
    pub c1: T,
    pub c0: T,
}

impl<T: Scalar> Quadratic<T> {
    #[inline]
    pub fn eval(&self, x: T) -> T {
        (self.c2 * x + self.c1) * x + self.c0
    }

    /// Stationary point `-c1 / (2 c2)`, if the quadratic is not affine.
    pub fn vertex(&self) -> Option<T> {
        (self.c2 != T::zero()).then(|| -self.c1 / (T::lit(2.0) * self.c2))
    }

    /// Maximizer and maximum on `[-1, 1]`; ties go to the smaller location.
    pub fn max_on_unit_interval(&self) -> (T, T) {
        let mut best = (-T::one(), self.eval(-T::one()));
        let mut consider = |x: T| {
            let y = self.eval(x);
            if y > best.1 || (y == best.1 && x < best.0) {
                best = (x, y);
            }
        };
        if let Some(x) = self.vertex() {
            if x.abs() <= T::one() {
                consider(x);
            }
        }
        consider(T::one());
        best
    }

    pub fn lipschitz(&self) -> T {
        T::lit(2.0) * self.c2.abs() + self.c1.abs()
    }
}

/// One boundary restriction with its maximum over `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeRestriction<T> {
    pub quadratic: Quadratic<T>,
    pub argmax: T,
    pub max: T,
}

impl<T: Scalar> EdgeRestriction<T> {
    fn from_quadratic(quadratic: Quadratic<T>) -> Self {
        let (argmax, max) = quadratic.max_on_unit_interval();
        Self {
            quadratic,
            argmax,
            max,
        }
    }

    #[inline]
    pub fn eval(&self, x: T) -> T {
        self.quadratic.eval(x)
    }
}

/// The four edge functions and the stationary points that decide their maxima.
///
/// On `u = ±1` or `v = ±1` the square-root term of `F` vanishes, so every
/// restriction is a quadratic polynomial. The edges `u = -1` and `v = -1`
/// follow from `u = 1`, `v = 1` by the symmetry `(u, v) -> (-u, -v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRestrictions<T> {
    /// `G(1, v)`
    pub g_on_u1: EdgeRestriction<T>,
    /// `G(u, 1)`
    pub g_on_v1: EdgeRestriction<T>,
    /// `F(1, v)`
    pub f_on_u1: EdgeRestriction<T>,
    /// `F(u, 1)`
    pub f_on_v1: EdgeRestriction<T>,
    /// `v_0 = (λ(n+1) - 2) / (λ(n-1) - 2)`, stationary point of `G(1, v)`.
    pub g_v0: T,
    /// `G(1, v_0) = 8[2n - λ(n^2-n+1)] / (λ(n-1) - 2)`.
    pub g_at_v0: T,
    /// `|v_0| <= 1`, which holds exactly for `0 < λ <= 2/n`.
    pub g_v0_inside: bool,
    /// `u_0 = (n-1)[λ(n+1) - 2] / (λ(n+1)^2 - 10n + 2)`, stationary point of `G(u, 1)`.
    pub g_u0: T,
    /// `G(u_0, 1) = 8(n-1)[λ(n^2-n+1) - 2n] / (10n - 2 - λ(n+1)^2)`.
    pub g_at_u0: T,
    /// `u_0 = (n-1)[λ(n+1) - 2] / (λ(n+1)^2 - 8n)`, stationary point of `F(u, 1)`.
    pub f_u0: T,
    /// `F(u_0, 1) = 4(n-1)^2[λ(n-1) + 1] / (8n - (n+1)^2 λ)`.
    pub f_at_u0: T,
    /// `[(n^2+n)λ - (5n-1)][(n+1)λ - (3n+1)]`; nonnegative iff `|u_0| <= 1` for `F(u, 1)`.
    pub f_u0_criterion: T,
}

impl<T: Scalar> BoundaryRestrictions<T> {
    /// Largest value of `F` on the boundary of `R`.
    pub fn f_boundary_max(&self) -> T {
        self.f_on_u1.max.max(self.f_on_v1.max)
    }

    /// Largest value of `G` on the boundary of `R`.
    pub fn g_boundary_max(&self) -> T {
        self.g_on_u1.max.max(self.g_on_v1.max)
    }
}

pub fn boundary_restrictions<T: Scalar>(params: &ProblemParams<T>) -> BoundaryRestrictions<T> {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let eight = T::lit(8.0);
    let np1 = n + one;
    let nm1 = n - one;
    let cross = l * np1 - two;
    let g_uu = l * np1 * np1 - T::lit(10.0) * n + two;
    let g_vv = nm1 * (l * nm1 - two);
    let f_uu = np1 * np1 * l - eight * n;
    let f_vv = nm1 * nm1 * l;

    let g_on_u1 = Quadratic {
        c2: g_vv,
        c1: -two * nm1 * cross,
        c0: g_uu,
    };
    let g_on_v1 = Quadratic {
        c2: g_uu,
        c1: -two * nm1 * cross,
        c0: g_vv,
    };
    let f_on_u1 = Quadratic {
        c2: f_vv,
        c1: -two * nm1 * cross,
        c0: f_uu,
    };
    let f_on_v1 = Quadratic {
        c2: f_uu,
        c1: -two * nm1 * cross,
        c0: f_vv,
    };

    let g_v0 = cross / (l * nm1 - two);
    let ab = n * n - n + one;
    BoundaryRestrictions {
        g_on_u1: EdgeRestriction::from_quadratic(g_on_u1),
        g_on_v1: EdgeRestriction::from_quadratic(g_on_v1),
        f_on_u1: EdgeRestriction::from_quadratic(f_on_u1),
        f_on_v1: EdgeRestriction::from_quadratic(f_on_v1),
        g_v0,
        g_at_v0: eight * (two * n - l * ab) / (l * nm1 - two),
        g_v0_inside: g_v0.abs() <= one,
        g_u0: nm1 * cross / g_uu,
        g_at_u0: eight * nm1 * (l * ab - two * n) / (T::lit(10.0) * n - two - l * np1 * np1),
        f_u0: nm1 * cross / f_uu,
        f_at_u0: four * nm1 * nm1 * (l * nm1 + one) / (eight * n - np1 * np1 * l),
        f_u0_criterion: ((n * n + n) * l - (T::lit(5.0) * n - one))
            * (np1 * l - (T::lit(3.0) * n + one)),
    }
}

/// Two-branch closed form for the maximum of `F` on the boundary, valid for
/// `2n/(n^2-n+1) < λ < (6n-2)/(n^2+n)`; the branches split at `(5n-1)/(n^2+n)`.
pub fn boundary_max_f<T: Scalar>(params: &ProblemParams<T>) -> Result<T> {
    if !in_critical_window(params) {
        return Err(Error::OutsideWindow {
            lambda: params.lambda().as_f64(),
            window: "(2n/(n^2-n+1), (6n-2)/(n^2+n))".to_string(),
        });
    }
    let th = params.thresholds();
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    Ok(if l <= th.t_5n1 {
        T::lit(4.0) * (n - one) * (n - one) * (l * (n - one) + one)
            / (T::lit(8.0) * n - (n + one) * (n + one) * l)
    } else {
        corner_value_f(params)
    })
}

/// `F(1, -1) = F(-1, 1) = 4λn^2 - 12n + 4`.
pub fn corner_value_f<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    T::lit(4.0) * params.lambda() * n * n - T::lit(12.0) * n + T::lit(4.0)
}

/// `G(1, -1) = G(-1, 1) = 4λn^2 - 16n + 8`.
pub fn corner_value_g<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    T::lit(4.0) * params.lambda() * n * n - T::lit(16.0) * n + T::lit(8.0)
}

/// Both sides of `Φ(-1) - Φ(u_0) = -4[n(n+1)λ - (5n-1)]^2 / (8n - (n+1)^2 λ)`
/// where `Φ(u) = F(u, 1)`: `(difference of evaluations, closed form)`.
pub fn boundary_branch_gap<T: Scalar>(params: &ProblemParams<T>) -> (T, T) {
    let b = boundary_restrictions(params);
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let lhs = b.f_on_v1.eval(-one) - b.f_on_v1.eval(b.f_u0);
    let k = n * (n + one) * l - (T::lit(5.0) * n - one);
    let rhs = -T::lit(4.0) * k * k / (T::lit(8.0) * n - (n + one) * (n + one) * l);
    (lhs, rhs)
}

/// The quadratic in `u / v` satisfied by nonzero critical points and its discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discriminant<T> {
    /// `[(n+1)^2 λ - 8n][(n+1)λ - 2]`
    pub a: T,
    /// `-2λ(n-1)[(n+1)^2 λ - 2(3n+1)]`
    pub b: T,
    /// `λ(n-1)^2[(n+1)λ - 2]`
    pub c: T,
    /// `b^2 - 4ac`
    pub from_coefficients: T,
    /// `64(n-1)^2 λ n (2-λ)`
    pub closed_form: T,
}

impl<T: Scalar> Discriminant<T> {
    pub fn relative_mismatch(&self) -> T {
        let scale = self.closed_form.abs().max(T::one());
        (self.from_coefficients - self.closed_form).abs() / scale
    }

    /// `a r^2 + b r + c`.
    pub fn eval(&self, ratio: T) -> T {
        (self.a * ratio + self.b) * ratio + self.c
    }
}

pub fn discriminant<T: Scalar>(params: &ProblemParams<T>) -> Discriminant<T> {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let np1 = n + one;
    let nm1 = n - one;
    let cross = np1 * l - two;
    let a = (np1 * np1 * l - T::lit(8.0) * n) * cross;
    let b = -two * l * nm1 * (np1 * np1 * l - two * (T::lit(3.0) * n + one));
    let c = l * nm1 * nm1 * cross;
    Discriminant {
        a,
        b,
        c,
        from_coefficients: b * b - T::lit(4.0) * a * c,
        closed_form: T::lit(64.0) * nm1 * nm1 * l * n * (two - l),
    }
}

/// The cubic in λ whose sign decides `v^2 < 1` above `2/(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicA<T> {
    /// `n(n+1)^2 λ^3 - 2n(n+1)(n+3)λ^2 + 4(3n^2+n+1)λ - 8n`
    pub value: T,
    /// `[n(n+1)λ^2 - 6nλ + 4][(n+1)λ - 2n]`
    pub factored: T,
    /// `4λ[nλ - (n+1)]^2 - [(n-1)λ - 2]^2 n (2-λ)`
    pub defining: T,
}

pub fn cubic_a<T: Scalar>(params: &ProblemParams<T>) -> CubicA<T> {
    let n = params.nf();
    let l = params.lambda();
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let np1 = n + one;
    let value = n * np1 * np1 * l * l * l - two * n * np1 * (n + three) * l * l
        + four * (three * n * n + n + one) * l
        - T::lit(8.0) * n;
    let factored = (n * np1 * l * l - T::lit(6.0) * n * l + four) * (np1 * l - two * n);
    let p = n * l - np1;
    let q = (n - one) * l - two;
    let defining = four * l * p * p - q * q * n * (two - l);
    CubicA {
        value,
        factored,
        defining,
    }
}

/// Left side of the condition `2λ[nλ - (n+1)] + [(n-1)λ - 2] sqrt(λn(2-λ)) < 0`,
/// equivalent to `v^2 < 1` for the nonzero stationary pair.
pub fn interior_condition<T: Scalar>(params: &ProblemParams<T>) -> T {
    let n = params.nf();
    let l = params.lambda();
    let two = T::lit(2.0);
    two * l * (n * l - (n + T::one())) + ((n - T::one()) * l - two) * (l * n * (two - l)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, lambda: f64) -> ProblemParams<f64> {
        ProblemParams::new(n, lambda).unwrap()
    }

    #[test]
    fn f_examples() {
        for (n, l) in [(3, 0.4), (5, 1.3), (9, 2.5)] {
            let params = p(n, l);
            let nf = n as f64;
            assert!((eval_f(&params, 0.0, 0.0).unwrap() - 4.0 * (nf - 1.0)).abs() < 1e-12);
            let corner = 4.0 * l * nf * nf - 12.0 * nf + 4.0;
            assert!((eval_f(&params, 1.0, -1.0).unwrap() - corner).abs() < 1e-12);
            assert!((eval_f(&params, 1.0, 1.0).unwrap() - 4.0 * (l - nf - 1.0)).abs() < 1e-12);
            let b = boundary_restrictions(&params);
            assert!((b.f_on_v1.eval(1.0) - 4.0 * (l - nf - 1.0)).abs() < 1e-12);
        }
        assert!(matches!(
            eval_f(&p(3, 1.0), 1.5, 0.0),
            Err(Error::OutsideSquare { .. })
        ));
    }

    #[test]
    fn g_examples() {
        let g = eval_g(&p(3, 0.5), 1.0, 1.0).unwrap();
        assert!((g + 22.0).abs() < 1e-12);
        // -(2(n-1)/(n^2-n+1)) [(2n-1)u + v]^2 at u = 1, v = -1 is -(4/7) * 16
        let g = eval_g(&p(3, 6.0 / 7.0), 1.0, -1.0).unwrap();
        assert!((g + 64.0 / 7.0).abs() < 1e-12);
        for (n, l) in [(3, 0.9), (6, 1.7)] {
            let params = p(n, l);
            let nf = n as f64;
            let want = 4.0 * l * nf * nf - 16.0 * nf + 8.0;
            assert!((eval_g(&params, 1.0, -1.0).unwrap() - want).abs() < 1e-12);
            assert_eq!(corner_value_g(&params), want);
        }
        assert!(eval_g(&p(3, 1.0), 0.0, -1.01).is_err());
    }

    #[test]
    fn g_forms_agree() {
        let params = p(7, 0.83);
        for (u, v) in [(0.3, -0.2), (1.0, 1.0), (-0.9, 0.4)] {
            let a = eval_g(&params, u, v).unwrap();
            let b = eval_g_shifted(&params, u, v).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_vanishes_at_origin_and_rejects_boundary() {
        let (du, dv) = gradient_f(&p(3, 1.0), 0.0, 0.0).unwrap();
        assert_eq!((du, dv), (0.0, 0.0));
        assert!(matches!(
            gradient_f(&p(3, 1.0), 1.0, 0.0),
            Err(Error::OnBoundary { .. })
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let params = p(3, 1.0);
        let s = Surface::new(&params);
        let (du, dv) = s.gradient_f(0.5, 0.5);
        let h = 1e-6;
        let fu = (s.f(0.5 + h, 0.5) - s.f(0.5 - h, 0.5)) / (2.0 * h);
        let fv = (s.f(0.5, 0.5 + h) - s.f(0.5, 0.5 - h)) / (2.0 * h);
        assert!((du - fu).abs() <= 1e-6 * du.abs().max(1.0));
        assert!((dv - fv).abs() <= 1e-6 * dv.abs().max(1.0));
        assert!(du.abs() + dv.abs() > 1e-3);
    }

    #[test]
    fn critical_points_n3_unit_weight() {
        let params = p(3, 1.0);
        let set = critical_points(&params);
        assert_eq!(set.points.len(), 3);
        let cf = interior_closed_form(&params);
        let r3 = 3f64.sqrt();
        assert!((cf.v_sq - 0.5).abs() < 1e-14);
        assert!((cf.u_sq - (14.0 - 8.0 * r3) / (16.0 - 8.0 * r3)).abs() < 1e-14);
        assert!((cf.u_sq - 0.06699).abs() < 1e-5);
        assert!((cf.uv + 0.18301).abs() < 1e-5);
        let first = set.interior_pair().next().unwrap();
        assert!(first.v > 0.0);
        assert!((first.u + 0.25882).abs() < 1e-5);
        assert!((first.v - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-5);
        assert!(first.gradient_residual < 1e-12);
        assert!((first.f_value - (-2.0 + 6.0 * r3)).abs() < 1e-12);
        let f1 = f_at_interior_critical(&params).unwrap();
        assert!((f1 - 8.39230).abs() < 1e-5);
        assert!((3.0 + f1 / 4.0 - (5.0 + 3.0 * r3) / 2.0).abs() < 1e-12);
        assert!(f1 > 8.0);
    }

    #[test]
    fn literal_point_is_nearly_critical() {
        let (du, dv) = gradient_f(&p(3, 1.0), 0.2588, -std::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!((du * du + dv * dv).sqrt() < 1e-3);
    }

    #[test]
    fn no_interior_pair_above_large_threshold() {
        let set = critical_points(&p(3, 1.25));
        assert_eq!(set.points.len(), 1);
        assert_eq!(set.points[0].kind, CriticalKind::Origin);
        let set = critical_points(&p(3, 3.0));
        assert_eq!(set.points.len(), 1);
        assert!(set.regime_note.contains("outside"));
        assert!(f_at_interior_critical(&p(3, 1.25)).is_err());
    }

    #[test]
    fn interior_value_tends_to_origin_value() {
        let f = f_at_interior_critical(&p(3, 6.0 / 7.0 + 1e-6)).unwrap();
        assert!((f - 8.0).abs() < 1e-2);
    }

    #[test]
    fn boundary_examples_n3() {
        let b = boundary_restrictions(&p(3, 1.0));
        assert!((b.f_u0 + 0.5).abs() < 1e-15);
        assert!((b.f_at_u0 - 6.0).abs() < 1e-12);
        assert!((b.f_on_v1.max - 6.0).abs() < 1e-12);
        assert!((b.f_on_v1.argmax + 0.5).abs() < 1e-12);
        assert!((b.f_on_u1.eval(-1.0) - 4.0).abs() < 1e-12);
        assert_eq!(b.f_on_u1.argmax, -1.0);
        assert!(b.f_u0_criterion >= 0.0);

        let b = boundary_restrictions(&p(3, 0.5));
        assert!(b.g_v0_inside);
        assert!((b.g_on_u1.argmax - b.g_v0).abs() < 1e-15);
        let want = 8.0 * (6.0 - 0.5 * 7.0) / (0.5 * 2.0 - 2.0);
        assert!((b.g_at_v0 - want).abs() < 1e-12);
        assert!((b.g_on_u1.max - want).abs() < 1e-12);
    }

    #[test]
    fn boundary_max_branches() {
        assert!((boundary_max_f(&p(3, 1.0)).unwrap() - 6.0).abs() < 1e-12);
        assert!((boundary_max_f(&p(3, 1.2)).unwrap() - 11.2).abs() < 1e-12);
        assert!(boundary_max_f(&p(3, 0.5)).is_err());
        assert!(boundary_max_f(&p(3, 1.4)).is_err());
        for l in [0.9, 1.0, 1.1, 1.2, 1.3] {
            let params = p(3, l);
            let b = boundary_restrictions(&params);
            let a = boundary_max_f(&params).unwrap();
            assert!((a - b.f_boundary_max()).abs() < 1e-9, "lambda = {l}");
            let (lhs, rhs) = boundary_branch_gap(&params);
            assert!((lhs - rhs).abs() < 1e-12);
            assert!(rhs <= 0.0);
        }
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant(&p(3, 1.0));
        assert_eq!(d.closed_form, 768.0);
        assert!(d.relative_mismatch() < 1e-12);
        assert_eq!(discriminant(&p(3, 2.0)).closed_form, 0.0);
        let d = discriminant(&p(5, 0.5));
        assert_eq!(d.closed_form, 3840.0);
        assert!(d.relative_mismatch() < 1e-12);
    }

    #[test]
    fn cubic_examples() {
        let c = cubic_a(&p(3, 1.5));
        assert_eq!(c.factored, 0.0);
        assert!(c.value.abs() < 1e-12);
        let c = cubic_a(&p(3, 1.0));
        assert!((c.value - c.factored).abs() < 1e-12);
        assert!((c.value - c.defining).abs() < 1e-12);
        let c = cubic_a(&p(4, 1.0));
        assert!(c.value.abs() < 1e-12 && c.factored.abs() < 1e-12);
    }

    #[test]
    fn quadratic_maximum_on_interval() {
        let q = Quadratic {
            c2: -1.0,
            c1: 0.0,
            c0: 2.0,
        };
        assert_eq!(q.max_on_unit_interval(), (0.0, 2.0));
        let q = Quadratic {
            c2: 1.0,
            c1: 0.0,
            c0: 0.0,
        };
        assert_eq!(q.max_on_unit_interval(), (-1.0, 1.0));
        let q = Quadratic {
            c2: 0.0,
            c1: 3.0,
            c0: 0.0,
        };
        assert_eq!(q.max_on_unit_interval(), (1.0, 3.0));
    }
}
