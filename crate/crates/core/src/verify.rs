//! Claim-by-claim numerical verification.
//!
//! Each checker compares a closed form against an independent route (a
//! brute-force oracle, a second algebraic form, or a finite difference) and
//! returns a [`CheckRecord`]. [`run_full`] sweeps the checkers over a sample
//! of `(n, λ)` and assembles a [`VerificationReport`].
//!
//! Every sub-condition contributes a slack that must stay above minus its own
//! tolerance. The record margin is the smallest slack, shifted so that
//! `passed == (margin >= -tolerance)` against the record's tolerance.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::{
    sweep_extreme_points_with, zalcman_functional, CoefficientVector, SweepObjective,
    TorusObjective,
};
use crate::optimize::{edge_max, grid_max, GridSpec, Interval, Lipschitz, Rect};
use crate::params::{classify, corollary, theorem_bound, thresholds, ProblemParams, Regime};
use crate::surface::{
    boundary_branch_gap, boundary_max_f, boundary_restrictions, corner_value_f, corner_value_g,
    critical_points, cubic_a, discriminant, f_at_interior_critical, interior_closed_form,
    interior_condition, Surface,
};

type Params = ProblemParams<f64>;
type EdgeFn<'a> = dyn Fn(f64) -> f64 + Sync + 'a;

/// Tolerances used by the checkers.
pub mod tol {
    /// Algebraic identities: factorizations, alternative forms, symmetry.
    pub const IDENTITY: f64 = 1e-12;
    /// Closed-form maximum against a grid oracle, on top of the certified gap.
    pub const ORACLE: f64 = 1e-6;
    /// Torus sweep against the bound.
    pub const SWEEP: f64 = 1e-6;
    /// Closed form against direct evaluation at a computed point.
    pub const CLOSED_FORM: f64 = 1e-9;
    /// Norm of the analytic gradient at a closed-form critical point.
    pub const GRADIENT: f64 = 1e-8;
    /// Upper bound on `max G` in the small-λ regime.
    pub const G_NONPOSITIVE: f64 = 1e-9;
    /// Distance from an oracle argmax to the claimed maximizer.
    pub const LOCATION: f64 = 1e-3;
    /// Location of the switch in the interior critical-pair count.
    pub const FLIP: f64 = 1e-9;
    /// Offset that moves samples off the regime endpoints.
    pub const ENDPOINT_NUDGE: f64 = 1e-6;
    /// Width of the boundary collar excluded from the slope bound of `F`.
    pub const COLLAR: f64 = 1e-3;

    pub fn table() -> Vec<(&'static str, f64)> {
        vec![
            ("identity", IDENTITY),
            ("oracle", ORACLE),
            ("sweep", SWEEP),
            ("closed_form", CLOSED_FORM),
            ("gradient", GRADIENT),
            ("g_nonpositive", G_NONPOSITIVE),
            ("location", LOCATION),
            ("flip", FLIP),
            ("endpoint_nudge", ENDPOINT_NUDGE),
            ("collar", COLLAR),
        ]
    }
}

/// Name of the flag raised for the inverted `n = 4` middle range.
pub const COROLLARY_N4_FLAG: &str = "corollary_n4_range";

/// Outcome of one checker on one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    pub n: u32,
    /// Absent for checks that depend on `n` alone.
    pub lambda: Option<f64>,
    pub passed: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// `check_id=<id> n=<n> lambda=<float> passed=<bool> margin=<float>`
    pub fn to_line(&self) -> String {
        format!(
            "check_id={} n={} lambda={} passed={} margin={}",
            self.check_id,
            self.n,
            self.lambda.map_or_else(|| "NaN".to_string(), fmt_float),
            self.passed,
            fmt_float(self.margin)
        )
    }
}

/// Seventeen significant digits, decimal point, no grouping.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

struct Check {
    id: String,
    n: u32,
    lambda: Option<f64>,
    tolerance: f64,
    margin: f64,
    details: BTreeMap<String, f64>,
    note: Option<String>,
}

impl Check {
    fn new(id: &str, n: u32, lambda: Option<f64>, tolerance: f64) -> Self {
        Self {
            id: id.to_string(),
            n,
            lambda,
            tolerance,
            margin: f64::MAX,
            details: BTreeMap::new(),
            note: None,
        }
    }

    fn detail(&mut self, key: &str, value: f64) -> &mut Self {
        // JSON has no representation for non-finite numbers
        let value = if value.is_finite() {
            value
        } else if value.is_nan() {
            -f64::MAX
        } else {
            value.signum() * f64::MAX
        };
        self.details.insert(key.to_string(), value);
        self
    }

    /// Requires `slack >= -tol`.
    fn require(&mut self, name: &str, slack: f64, tol: f64) -> &mut Self {
        let slack = if slack.is_nan() { -f64::MAX } else { slack };
        self.detail(&format!("{name}.slack"), slack);
        self.detail(&format!("{name}.tol"), tol);
        let shifted = slack + tol - self.tolerance;
        self.margin = self.margin.min(if shifted.is_finite() {
            shifted
        } else {
            -f64::MAX
        });
        self
    }

    /// Requires `|a - b| <= tol * max(1, |b|)`.
    fn require_close(&mut self, name: &str, a: f64, b: f64, tol: f64) -> &mut Self {
        let scale = b.abs().max(1.0);
        self.detail(&format!("{name}.lhs"), a);
        self.detail(&format!("{name}.rhs"), b);
        self.require(name, tol * scale - (a - b).abs(), 0.0)
    }

    fn require_true(&mut self, name: &str, ok: bool) -> &mut Self {
        self.require(name, if ok { 0.0 } else { -1.0 }, 0.0)
    }

    fn note(&mut self, text: &str) -> &mut Self {
        self.note = Some(text.to_string());
        self
    }

    fn finish(&mut self) -> CheckRecord {
        CheckRecord {
            check_id: self.id.clone(),
            n: self.n,
            lambda: self.lambda,
            passed: self.margin >= -self.tolerance,
            margin: self.margin,
            tolerance: self.tolerance,
            details: std::mem::take(&mut self.details),
            note: self.note.take(),
        }
    }
}

fn window_error(lambda: f64, window: String) -> Error {
    Error::OutsideWindow { lambda, window }
}

/// Checker configuration. `bound` is pluggable so the harness can be tested
/// against a deliberately wrong formula.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    pub grid: GridSpec,
    pub sweep_grid: usize,
    pub bound: fn(&Params) -> f64,
}

impl Default for Verifier {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            sweep_grid: 512,
            bound: theorem_bound::<f64>,
        }
    }
}

impl Verifier {
    pub fn with_grid(grid: usize) -> Self {
        Self {
            grid: GridSpec::with_resolution(grid),
            sweep_grid: grid,
            ..Self::default()
        }
    }

    fn f_oracle(&self, params: &Params) -> Result<crate::optimize::MaxResult<f64>> {
        let s = Surface::new(params);
        grid_max(
            |u, v| s.f(u, v),
            &Rect::unit_square(),
            &self.grid,
            Lipschitz::Known(s.lipschitz_f(tol::COLLAR)),
        )
    }

    fn g_oracle(&self, params: &Params) -> Result<crate::optimize::MaxResult<f64>> {
        let s = Surface::new(params);
        grid_max(
            |u, v| s.g(u, v),
            &Rect::unit_square(),
            &self.grid,
            Lipschitz::Known(s.lipschitz_g()),
        )
    }

    /// Strict ordering of the three threshold chains.
    pub fn check_chain(&self, n: u32) -> Result<CheckRecord> {
        let th = thresholds::<f64>(n)?;
        let mut c = Check::new("chain", n, None, 0.0);
        for (label, chain) in [
            ("full", th.full_chain()),
            ("short", th.short_chain()),
            ("roots", th.root_chain()),
        ] {
            for (i, (name, value)) in chain.iter().enumerate() {
                c.detail(&format!("{label}.{i}:{name}"), *value);
            }
            let gap = chain
                .windows(2)
                .map(|w| w[1].1 - w[0].1)
                .fold(f64::INFINITY, f64::min);
            c.require(&format!("{label}.min_step"), gap, 0.0);
        }
        Ok(c.finish())
    }

    /// `λ >= A(n)`: `max_R F = 4λn^2 - 12n + 4`, attained only at `(1,-1)`, `(-1,1)`.
    pub fn check_lemma5(&self, params: &Params) -> Result<CheckRecord> {
        let th = params.thresholds();
        let l = params.lambda();
        if l < th.aux_a {
            return Err(window_error(l, format!("[{}, inf)", th.aux_a)));
        }
        let mut c = Check::new("lemma5", params.n(), Some(l), tol::ORACLE);
        self.corner_maximum(&mut c, params)?;
        Ok(c.finish())
    }

    /// `(6n-2)/(n^2+n) <= λ < A(n)`: same conclusion through the edge analysis of `G`.
    pub fn check_lemma6(&self, params: &Params) -> Result<CheckRecord> {
        let th = params.thresholds();
        let l = params.lambda();
        if !(l >= th.t_6n2 && l < th.aux_a) {
            return Err(window_error(l, format!("[{}, {})", th.t_6n2, th.aux_a)));
        }
        let mut c = Check::new("lemma6", params.n(), Some(l), tol::ORACLE);
        self.corner_maximum(&mut c, params)?;
        let b = boundary_restrictions(params);
        // G(1, v) peaks at v = -1 and G(u, 1) at u = -1
        c.require(
            "g_on_u1_peaks_at_minus_one",
            b.g_on_u1.eval(-1.0) - b.g_on_u1.max,
            tol::IDENTITY,
        );
        c.require(
            "g_on_v1_peaks_at_minus_one",
            b.g_on_v1.eval(-1.0) - b.g_on_v1.max,
            tol::IDENTITY,
        );
        c.detail("g_u0", b.g_u0);
        Ok(c.finish())
    }

    fn corner_maximum(&self, c: &mut Check, params: &Params) -> Result<()> {
        let closed = corner_value_f(params);
        let oracle = self.f_oracle(params)?;
        c.detail("closed_form", closed)
            .detail("oracle", oracle.value)
            .detail("certified_gap", oracle.certified_gap)
            .detail("argmax_u", oracle.location.0)
            .detail("argmax_v", oracle.location.1);
        c.require("oracle_below_closed", closed - oracle.value, tol::ORACLE);
        c.require(
            "oracle_reaches_closed",
            oracle.value - closed + oracle.certified_gap,
            tol::ORACLE,
        );
        let (u, v) = oracle.location;
        let dist = ((u.abs() - 1.0).powi(2) + (v.abs() - 1.0).powi(2)).sqrt();
        c.require("argmax_at_corner", tol::LOCATION - dist, 0.0);
        c.require_true("argmax_antidiagonal", u * v < 0.0);

        let g_closed = corner_value_g(params);
        let g = self.g_oracle(params)?;
        c.detail("g_closed_form", g_closed)
            .detail("g_oracle", g.value);
        c.require("g_below_corner", g_closed - g.value, tol::ORACLE);
        Ok(())
    }

    /// `0 < λ <= 2n/(n^2-n+1)`: `G <= 0` on `R`, hence `max_R F = F(0,0) = 4(n-1)`.
    pub fn check_lemma7(&self, params: &Params) -> Result<CheckRecord> {
        let th = params.thresholds();
        let n = params.n();
        let nf = n as f64;
        let l = params.lambda();
        if l > th.lambda_small_max {
            return Err(window_error(l, format!("(0, {}]", th.lambda_small_max)));
        }
        let mut c = Check::new("lemma7", n, Some(l), tol::G_NONPOSITIVE);
        let g = self.g_oracle(params)?;
        c.detail("g_oracle", g.value)
            .detail("g_argmax_u", g.location.0)
            .detail("g_argmax_v", g.location.1)
            .detail("certified_gap", g.certified_gap);
        c.require("g_nonpositive", -g.value, tol::G_NONPOSITIVE);
        let s = Surface::new(params);
        c.require("g_origin_zero", -s.g(0.0, 0.0).abs(), tol::IDENTITY);

        let f = self.f_oracle(params)?;
        let origin = 4.0 * (nf - 1.0);
        c.detail("f_oracle", f.value).detail("f_origin", origin);
        c.require("f_below_origin", origin - f.value, tol::ORACLE);

        let b = boundary_restrictions(params);
        c.detail("g_v0", b.g_v0).detail("g_u0", b.g_u0);
        if l <= th.aux_b {
            c.require_true("g_v0_inside", b.g_v0_inside);
            c.require_close("g_at_v0", b.g_on_u1.eval(b.g_v0), b.g_at_v0, tol::IDENTITY);
            c.require("g_at_v0_nonpositive", -b.g_at_v0, tol::IDENTITY);
        } else {
            c.require_true("g_v0_outside", !b.g_v0_inside);
        }
        c.require("g_u0_inside", 1.0 - b.g_u0.abs(), 0.0);
        c.require_close("g_at_u0", b.g_on_v1.eval(b.g_u0), b.g_at_u0, tol::IDENTITY);
        c.require("g_at_u0_nonpositive", -b.g_at_u0, tol::IDENTITY);

        let (case1, case2) = factored_g_residuals(n)?;
        c.require("case_2_over_n_plus_1_identity", -case1, tol::IDENTITY);
        c.require("case_small_max_identity", -case2, tol::IDENTITY);
        Ok(c.finish())
    }

    /// `2n/(n^2-n+1) < λ < (6n-2)/(n^2+n)`: the maximum of `F` on the boundary.
    pub fn check_lemma8(&self, params: &Params) -> Result<CheckRecord> {
        let l = params.lambda();
        let closed = boundary_max_f(params)?;
        let th = params.thresholds();
        let mut c = Check::new("lemma8", params.n(), Some(l), tol::ORACLE);
        let s = Surface::new(params);
        let edges: [(&str, &EdgeFn); 4] = [
            ("u_plus", &|v| s.f(1.0, v)),
            ("u_minus", &|v| s.f(-1.0, v)),
            ("v_plus", &|u| s.f(u, 1.0)),
            ("v_minus", &|u| s.f(u, -1.0)),
        ];
        let mut best = f64::NEG_INFINITY;
        let mut gap = 0.0_f64;
        for (name, edge) in &edges {
            let r = edge_max(edge, &Interval::unit(), &self.grid, Lipschitz::Estimate)?;
            c.detail(&format!("edge_{name}"), r.value);
            best = best.max(r.value);
            gap = gap.max(r.certified_gap);
        }
        c.detail("closed_form", closed)
            .detail("oracle", best)
            .detail("certified_gap", gap);
        c.require("oracle_below_closed", closed - best, tol::ORACLE);
        c.require("oracle_reaches_closed", best - closed + gap, tol::ORACLE);

        let b = boundary_restrictions(params);
        c.require(
            "f_on_u1_peaks_at_minus_one",
            b.f_on_u1.eval(-1.0) - b.f_on_u1.max,
            tol::IDENTITY,
        );
        let (lhs, rhs) = boundary_branch_gap(params);
        c.require_close("branch_gap_identity", lhs, rhs, tol::IDENTITY);
        c.require("branch_gap_nonpositive", -rhs, 0.0);
        c.detail("u0", b.f_u0)
            .detail("u0_criterion", b.f_u0_criterion);
        c.require_true(
            "u0_criterion_consistent",
            (b.f_u0.abs() <= 1.0) == (b.f_u0_criterion >= 0.0),
        );
        c.require_true("u0_branch_split", (b.f_u0.abs() <= 1.0) == (l <= th.t_5n1));
        Ok(c.finish())
    }

    /// Closed-form critical points: stationarity and the algebra behind them.
    pub fn check_lemma9(&self, params: &Params) -> Result<CheckRecord> {
        let l = params.lambda();
        let th = params.thresholds();
        if !(l > th.lambda_small_max && l < th.t_6n2) {
            return Err(window_error(
                l,
                format!("({}, {})", th.lambda_small_max, th.t_6n2),
            ));
        }
        let nf = params.nf();
        let mut c = Check::new("lemma9", params.n(), Some(l), tol::GRADIENT);
        let d = discriminant(params);
        c.detail("disc_closed", d.closed_form)
            .detail("disc_coefficients", d.from_coefficients);
        c.require(
            "discriminant_identity",
            -d.relative_mismatch(),
            tol::IDENTITY,
        );
        c.require("discriminant_positive", d.closed_form, 0.0);

        let cf = interior_closed_form(params);
        c.detail("v_sq", cf.v_sq)
            .detail("u_sq", cf.u_sq)
            .detail("uv", cf.uv)
            .detail("denom", cf.denom);
        // λ[(n+1)^2 λ - 8n] = [λ(n-1) + 2S][λ(n-1) - 2S] < 0
        let lhs = l * ((nf + 1.0).powi(2) * l - 8.0 * nf);
        let rhs = (l * (nf - 1.0) + 2.0 * cf.root) * cf.denom;
        c.require_close("denominator_factorization", lhs, rhs, tol::IDENTITY);
        c.require("denominator_negative", -cf.denom, 0.0);
        c.require("v_sq_positive", cf.v_sq, 0.0);
        c.require_close(
            "uv_squared",
            cf.uv * cf.uv,
            cf.u_sq * cf.v_sq,
            tol::CLOSED_FORM,
        );
        c.require_close("ratio", cf.u_over_v * cf.v_sq, cf.uv, tol::CLOSED_FORM);
        let quad = d.eval(cf.u_over_v);
        let quad_scale =
            d.a.abs() * cf.u_over_v.powi(2) + d.b.abs() * cf.u_over_v.abs() + d.c.abs();
        c.require(
            "ratio_solves_quadratic",
            -(quad.abs() / quad_scale),
            tol::IDENTITY,
        );

        let set = critical_points(params);
        let s = Surface::new(params);
        for (i, p) in set.interior_pair().enumerate() {
            // near the edge the cancelling terms grow like 1/sqrt(1-u^2)
            let scale = s.gradient_scale(p.u, p.v).max(1.0);
            c.detail(&format!("point{i}.u"), p.u)
                .detail(&format!("point{i}.v"), p.v)
                .detail(&format!("point{i}.residual"), p.gradient_residual)
                .detail(&format!("point{i}.term_scale"), scale);
            c.require(
                &format!("point{i}.stationary"),
                tol::GRADIENT - p.gradient_residual / scale,
                0.0,
            );
            let ratio = ((1.0 - p.u * p.u) / (1.0 - p.v * p.v)).sqrt();
            c.require_close(&format!("point{i}.root_ratio"), ratio, cf.root_ratio, 1e-6);
        }
        c.require("origin_stationary", -set.points[0].gradient_residual, 0.0);
        Ok(c.finish())
    }

    /// The interior pair exists exactly below the large threshold, and beats the origin.
    pub fn check_lemma10(&self, params: &Params) -> Result<CheckRecord> {
        let l = params.lambda();
        let th = params.thresholds();
        if !(l > th.lambda_small_max && l < th.t_6n2) {
            return Err(window_error(
                l,
                format!("({}, {})", th.lambda_small_max, th.t_6n2),
            ));
        }
        let nf = params.nf();
        let mut c = Check::new("lemma10", params.n(), Some(l), tol::CLOSED_FORM);
        let set = critical_points(params);
        let count = set.interior_pair().count();
        let middle = classify(params) == Regime::MiddleLambda;
        c.detail("interior_count", count as f64);
        c.require_true("count_matches_regime", (count == 2) == middle);

        if let Some(p) = set.interior_pair().next() {
            let closed = f_at_interior_critical(params)?;
            c.detail("f_interior", closed)
                .detail("f_at_point", p.f_value);
            c.require_close("interior_value", p.f_value, closed, tol::CLOSED_FORM);
            c.require("beats_origin", closed - 4.0 * (nf - 1.0), 0.0);
            c.require("v_sq_exceeds_u_sq", p.v * p.v - p.u * p.u, 0.0);
        }

        let a = cubic_a(params);
        c.detail("cubic", a.value);
        let scale = (nf + 1.0).powi(3) * nf * l.powi(3).max(1.0);
        c.require(
            "cubic_factorization",
            -(a.value - a.factored).abs() / scale,
            tol::IDENTITY,
        );
        c.require(
            "cubic_definition",
            -(a.value - a.defining).abs() / scale,
            tol::IDENTITY,
        );
        let below_one = interior_condition(params) < 0.0;
        if l > th.aux_b_nminus {
            c.require_true("cubic_sign_decides", (a.value > 0.0) == below_one);
        } else {
            c.require_true("condition_holds_below_2_over_n_minus_1", below_one);
        }

        let flip = interior_pair_flip(params.n())?;
        c.detail("flip", flip)
            .detail("lambda_large_min", th.lambda_large_min);
        c.require(
            "flip_at_large_min",
            tol::FLIP - (flip - th.lambda_large_min).abs(),
            0.0,
        );
        Ok(c.finish())
    }

    /// Global maximum of `F` is the larger of the boundary and interior candidates.
    pub fn check_lemma11(&self, params: &Params) -> Result<CheckRecord> {
        let l = params.lambda();
        let th = params.thresholds();
        if !(l > th.lambda_small_max && l < th.t_6n2) {
            return Err(window_error(
                l,
                format!("({}, {})", th.lambda_small_max, th.t_6n2),
            ));
        }
        let nf = params.nf();
        let mut c = Check::new("lemma11", params.n(), Some(l), tol::ORACLE);
        let boundary = boundary_max_f(params)?;
        let corner = corner_value_f(params);
        let root = (nf * l * (2.0 - l)).sqrt();
        let den = 8.0 * nf - (nf + 1.0).powi(2) * l;
        let claimed = match classify(params) {
            Regime::MiddleLambda => {
                let f1 = f_at_interior_critical(params)?;
                if l > th.t_5n1 {
                    c.require("interior_beats_corner", f1 - corner, 0.0);
                    let lhs = l * den / (4.0 * nf) * (f1 - corner);
                    let rhs = l
                        * (nf * (nf + 1.0).powi(2) * l * l - 2.0 * nf * (5.0 * nf + 3.0) * l
                            + 4.0 * (5.0 * nf - 1.0))
                        + 4.0 * (2.0 - l) * root;
                    c.require_close("corner_comparison_identity", lhs, rhs, tol::IDENTITY);
                } else {
                    c.require("interior_beats_edge_peak", f1 - boundary, 0.0);
                    let lhs = l * den / 4.0 * (f1 - boundary);
                    let rhs = l * (nf - 1.0) * (2.0 * nf * l - 5.0 * nf + 1.0)
                        + 4.0 * nf * (2.0 - l) * root;
                    c.require_close("edge_comparison_identity", lhs, rhs, tol::IDENTITY);
                }
                f1.max(boundary)
            }
            _ => {
                c.require("corner_beats_origin", corner - 4.0 * (nf - 1.0), 0.0);
                boundary.max(4.0 * (nf - 1.0))
            }
        };
        let oracle = self.f_oracle(params)?;
        c.detail("claimed", claimed)
            .detail("oracle", oracle.value)
            .detail("certified_gap", oracle.certified_gap)
            .detail("boundary", boundary);
        c.require("oracle_below_claim", claimed - oracle.value, tol::ORACLE);
        c.require(
            "oracle_reaches_claim",
            oracle.value - claimed + oracle.certified_gap,
            tol::ORACLE,
        );
        Ok(c.finish())
    }

    /// The bound dominates the extreme-point sweep; in the large regime the
    /// Koebe point attains it.
    pub fn check_theorem(&self, params: &Params) -> Result<CheckRecord> {
        let l = params.lambda();
        let n = params.n();
        let regime = classify(params);
        let bound = (self.bound)(params);
        let mut c = Check::new("theorem", n, Some(l), tol::SWEEP);
        let sweep = sweep_extreme_points_with(params, self.sweep_grid, SweepObjective::RealPart)?;
        c.detail("bound", bound)
            .detail("sweep", sweep.value)
            .detail("sweep_s", sweep.argmax.s())
            .detail("sweep_t", sweep.argmax.t())
            .detail("sharpness_gap", bound - sweep.value);
        c.require("sweep_below_bound", bound - sweep.value, tol::SWEEP);

        // the convex majorant J reaches the bound in every regime
        let majorant =
            sweep_extreme_points_with(params, self.sweep_grid, SweepObjective::SurrogateJ)?;
        c.detail("majorant_sweep", majorant.value);
        c.require("majorant_below_bound", bound - majorant.value, tol::SWEEP);
        c.require("majorant_reaches_bound", majorant.value - bound, tol::SWEEP);

        match regime {
            Regime::LargeLambda => {
                let koebe = CoefficientVector::<f64>::koebe(params.odd_index() as usize);
                let at_koebe = zalcman_functional(&koebe, params)?.z_modulus;
                let on_torus = TorusObjective::new(params, SweepObjective::RealPart)
                    .eval(std::f64::consts::PI, 0.0);
                let nf = params.nf();
                let closed = l * nf * nf - (2.0 * nf - 1.0);
                c.detail("koebe", at_koebe).detail("koebe_torus", on_torus);
                c.require_close("koebe_closed_form", at_koebe, closed, tol::CLOSED_FORM);
                c.require_close("koebe_torus", on_torus, closed, tol::CLOSED_FORM);
                c.require_close("koebe_attains_bound", at_koebe, bound, tol::CLOSED_FORM);
                c.note("sharp: attained at the Koebe function");
            }
            Regime::MiddleLambda => {
                c.note("empirical: sharpness gap recorded, no attainment asserted");
            }
            Regime::SmallLambda => {
                c.note("informational: sharpness gap recorded, no target value");
            }
        }
        Ok(c.finish())
    }

    /// The specialised `n = 3` and `n = 4` formulas agree with the general bound.
    pub fn check_corollaries(&self) -> Vec<CheckRecord> {
        let grid: Vec<f64> = (1..=400).map(|i| i as f64 * 0.005).collect();
        [
            (3u32, corollary::bound_n3::<f64> as fn(f64) -> f64),
            (4, corollary::bound_n4::<f64>),
        ]
        .into_iter()
        .map(|(n, specialised)| {
            let mut worst = 0.0_f64;
            for &l in &grid {
                let general = theorem_bound(&Params::new(n, l).expect("valid grid"));
                worst = worst.max((specialised(l) - general).abs() / general.abs().max(1.0));
            }
            let mut c = Check::new(&format!("corollary.n{n}"), n, None, tol::IDENTITY);
            c.detail("samples", grid.len() as f64);
            c.require("max_relative_mismatch", -worst, tol::IDENTITY);
            c.finish()
        })
        .collect()
    }

    /// Runs every checker whose hypothesis window contains `λ`.
    pub fn checks_for(&self, params: &Params) -> Result<Vec<CheckRecord>> {
        let th = params.thresholds();
        let l = params.lambda();
        let mut out = Vec::new();
        if l >= th.aux_a {
            out.push(self.check_lemma5(params)?);
        }
        if l >= th.t_6n2 && l < th.aux_a {
            out.push(self.check_lemma6(params)?);
        }
        if l <= th.lambda_small_max {
            out.push(self.check_lemma7(params)?);
        }
        if l > th.lambda_small_max && l < th.t_6n2 {
            out.push(self.check_lemma8(params)?);
            out.push(self.check_lemma9(params)?);
            out.push(self.check_lemma10(params)?);
            out.push(self.check_lemma11(params)?);
        }
        out.push(self.check_theorem(params)?);
        Ok(out)
    }
}

/// Closed-form `max_R F` for any `λ > 0`.
pub fn claimed_max_f(params: &Params) -> Result<f64> {
    let th = params.thresholds();
    let l = params.lambda();
    let origin = 4.0 * (params.nf() - 1.0);
    if l <= th.lambda_small_max {
        Ok(origin)
    } else if l >= th.t_6n2 {
        Ok(corner_value_f(params))
    } else if classify(params) == Regime::MiddleLambda {
        Ok(f_at_interior_critical(params)?.max(boundary_max_f(params)?))
    } else {
        Ok(boundary_max_f(params)?.max(origin))
    }
}

/// Largest absolute deviation of `G` from its two factored forms on a 101x101
/// grid, at `λ = 2/(n+1)` and `λ = 2n/(n^2-n+1)`.
pub fn factored_g_residuals(n: u32) -> Result<(f64, f64)> {
    let nf = n as f64;
    let at_b = Surface::new(&Params::new(n, 2.0 / (nf + 1.0))?);
    let small_max = thresholds::<f64>(n)?.lambda_small_max;
    let at_small = Surface::new(&Params::new(n, small_max)?);
    let ab = nf * nf - nf + 1.0;
    let mut worst = (0.0_f64, 0.0_f64);
    for i in 0..101 {
        let u = -1.0 + 2.0 * i as f64 / 100.0;
        for j in 0..101 {
            let v = -1.0 + 2.0 * j as f64 / 100.0;
            let f1 = -4.0 * (2.0 * nf - 1.0) * u * u - 4.0 * (nf - 1.0) / (nf + 1.0) * v * v;
            let f2 = -2.0 * (nf - 1.0) / ab * ((2.0 * nf - 1.0) * u + v).powi(2);
            worst.0 = worst.0.max((at_b.g(u, v) - f1).abs());
            worst.1 = worst.1.max((at_small.g(u, v) - f2).abs());
        }
    }
    Ok(worst)
}

/// Locates by bisection the λ at which the interior critical pair disappears,
/// searching the window `(2n/(n^2-n+1), (6n-2)/(n^2+n))`.
pub fn interior_pair_flip(n: u32) -> Result<f64> {
    let th = thresholds::<f64>(n)?;
    let has_pair =
        |l: f64| -> Result<bool> { Ok(critical_points(&Params::new(n, l)?).has_interior_pair()) };
    let mut lo = th.lambda_small_max + tol::ENDPOINT_NUDGE;
    let mut hi = th.t_6n2 - tol::ENDPOINT_NUDGE;
    if !has_pair(lo)? || has_pair(hi)? {
        return Err(Error::OutsideWindow {
            lambda: lo,
            window: "interior pair must exist at the lower end and vanish at the upper end"
                .to_string(),
        });
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if has_pair(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed λ-interval sampled for a regime; the large regime is capped at 2.
pub fn regime_interval(n: u32, regime: Regime) -> Result<(f64, f64)> {
    let th = thresholds::<f64>(n)?;
    Ok(match regime {
        Regime::SmallLambda => (0.0, th.lambda_small_max),
        Regime::MiddleLambda => (th.lambda_small_max, th.lambda_large_min),
        Regime::LargeLambda => (th.lambda_large_min, 2.0),
    })
}

/// `k` Chebyshev-Lobatto samples of a regime, endpoints pulled inward by
/// [`tol::ENDPOINT_NUDGE`]; a single sample sits at the midpoint.
pub fn regime_samples(n: u32, regime: Regime, k: usize) -> Result<Vec<f64>> {
    let (lo, hi) = regime_interval(n, regime)?;
    let (a, b) = (lo + tol::ENDPOINT_NUDGE, hi - tol::ENDPOINT_NUDGE);
    Ok(match k {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..k)
            .map(|j| {
                let x = (std::f64::consts::PI * j as f64 / (k - 1) as f64).cos();
                match j {
                    0 => b,
                    j if j + 1 == k => a,
                    _ => 0.5 * (a + b) + 0.5 * (b - a) * x,
                }
            })
            .rev()
            .collect(),
    })
}

/// What [`run_full`] sweeps over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub n_min: u32,
    pub n_max: u32,
    /// Samples per regime.
    pub lambda_samples: usize,
    /// Lattice resolution of the surface oracles and the torus sweep.
    pub grid: usize,
    /// Extra uniformly drawn `λ` in `(0, 2)` per `n`.
    pub random_samples: usize,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5A4C_434D_414E_0001;

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            n_min: 3,
            n_max: 10,
            lambda_samples: 15,
            grid: 512,
            random_samples: 2,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCounts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSettings {
    pub config: ReportConfig,
    pub grid_spec: GridSpec,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFlag {
    pub name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
    pub summary: BTreeMap<String, CheckCounts>,
    pub totals: CheckCounts,
    pub config: ReportSettings,
    pub flags: Vec<ReportFlag>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    /// One `key=value` line per record.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let _ = writeln!(out, "{}", r.to_line());
        }
        out
    }
}

/// The `n = 4` middle range is commonly printed as `13/8 < λ < 1`, an empty
/// interval; the general threshold gives `8/13`.
pub fn corollary_n4_flag() -> ReportFlag {
    let general = thresholds::<f64>(4)
        .expect("n = 4 is valid")
        .lambda_small_max;
    ReportFlag {
        name: COROLLARY_N4_FLAG.to_string(),
        message: format!(
            "n=4 middle range stated as {} < lambda < 1 is empty; 2n/(n^2-n+1) = 8/13 = {} is used",
            fmt_float(corollary::N4_PRINTED_MIDDLE_LOWER),
            fmt_float(general)
        ),
    }
}

fn summarize(records: &[CheckRecord]) -> (BTreeMap<String, CheckCounts>, CheckCounts) {
    let mut summary: BTreeMap<String, CheckCounts> = BTreeMap::new();
    let mut totals = CheckCounts::default();
    for r in records {
        for counts in [summary.entry(r.check_id.clone()).or_default(), &mut totals] {
            counts.total += 1;
            if r.passed {
                counts.passed += 1;
            } else {
                counts.failed += 1;
            }
        }
    }
    (summary, totals)
}

pub fn run_full(config: &ReportConfig) -> Result<VerificationReport> {
    run_with(&Verifier::with_grid(config.grid), config)
}

/// [`run_full`] with an explicit checker configuration.
pub fn run_with(verifier: &Verifier, config: &ReportConfig) -> Result<VerificationReport> {
    if config.n_min > config.n_max {
        return Err(Error::DegenerateDomain(format!(
            "n range [{}, {}]",
            config.n_min, config.n_max
        )));
    }
    verifier.grid.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tasks: Vec<(u32, f64)> = Vec::new();
    let mut records = Vec::new();
    for n in config.n_min..=config.n_max {
        records.push(verifier.check_chain(n)?);
        if config.lambda_samples == 0 {
            continue;
        }
        for regime in Regime::ALL {
            for l in regime_samples(n, regime, config.lambda_samples)? {
                tasks.push((n, l));
            }
        }
        for _ in 0..config.random_samples {
            tasks.push((n, rng.gen_range(tol::ENDPOINT_NUDGE..2.0)));
        }
    }
    if !tasks.is_empty() {
        records.extend(verifier.check_corollaries());
    }
    let per_task: Vec<Result<Vec<CheckRecord>>> = tasks
        .par_iter()
        .map(|&(n, l)| verifier.checks_for(&Params::new(n, l)?))
        .collect();
    for r in per_task {
        records.extend(r?);
    }
    records.sort_by(|a, b| {
        a.check_id.cmp(&b.check_id).then(a.n.cmp(&b.n)).then(
            a.lambda
                .unwrap_or(f64::NEG_INFINITY)
                .total_cmp(&b.lambda.unwrap_or(f64::NEG_INFINITY)),
        )
    });
    let (summary, totals) = summarize(&records);
    Ok(VerificationReport {
        records,
        summary,
        totals,
        config: ReportSettings {
            config: config.clone(),
            grid_spec: verifier.grid,
            tolerances: tol::table()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        },
        flags: vec![corollary_n4_flag()],
    })
}
