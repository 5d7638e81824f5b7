//! Fidelity/entanglement trade-off of the improved technique.
//!
//! For a resource with parameters `(n, b)` and a gate angle `ξ`, the improved
//! technique fails with probability
//! `P(n, b, ξ) = (1 + n⁴t) / ((1 + n²t)(1 + n)(1 + nb))`, `t = tan²ξ`.
//! The sign of `∂P/∂n` equals the sign of `C0·t² + C1·t + C2`, so the `ξ`
//! at which a given `n` is stationary is the positive root of that quadratic
//! in `t`. Sweeping `n` traces the improved cost `E0 = h(n/(1+n))` against
//! the FPT cost `E_FPT = h(F/2)` at the same fidelity `F = 1 − P`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::binary_entropy;
use crate::protocol::{entanglement_parameter, failure_probability_closed};
use crate::tolerance::{BISECTION_TOL, EPS_ALG};

/// Upper end of the default curve grid.
pub const DEFAULT_GRID_END: f64 = 20.0;
/// Number of points in the default curve grid.
pub const DEFAULT_GRID_POINTS: usize = 2000;

/// Coefficients of the stationarity quadratic `C0·t² + C1·t + C2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CCoeffs {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CCoeffs {
    pub fn eval(&self, t: f64) -> f64 {
        (self.c0 * t + self.c1) * t + self.c2
    }

    /// The unique positive root. `C0 > 0` and `C2 < 0`, so the product of
    /// the roots is negative and exactly one of them is positive.
    pub fn positive_root(&self) -> f64 {
        let disc = (self.c1 * self.c1 - 4.0 * self.c0 * self.c2).sqrt();
        // Pick the form that adds like-signed terms.
        if self.c1 >= 0.0 {
            -2.0 * self.c2 / (self.c1 + disc)
        } else {
            (disc - self.c1) / (2.0 * self.c0)
        }
    }
}

fn check_nb(n: f64, b: f64) -> Result<()> {
    if !(n > 0.0 && n.is_finite()) || !(b >= 1.0 && b.is_finite()) {
        return Err(Error::param(format!(
            "need n > 0 and b ≥ 1, got ({n}, {b})"
        )));
    }
    Ok(())
}

pub fn c_coefficients(n: f64, b: f64) -> Result<CCoeffs> {
    check_nb(n, b)?;
    let (n2, n3) = (n * n, n * n * n);
    Ok(CCoeffs {
        c0: (2.0 + n + n * b) * n2 * n3,
        c1: (2.0 * n3 + 3.0 * n2 - 4.0 * n - 3.0) * n2 * b
            + (3.0 * n3 + 4.0 * n2 - 3.0 * n - 2.0) * n,
        c2: -1.0 - b - 2.0 * n * b,
    })
}

/// `tan²ξ` at which the failure probability is stationary in `n`.
pub fn optimal_tan_squared(n: f64, b: f64) -> Result<f64> {
    Ok(c_coefficients(n, b)?.positive_root())
}

/// The gate angle for which `n` is the stationary resource parameter.
///
/// Fails with [`Error::NoRoot`] when the root lies beyond `ξ = π/4`, which
/// happens for `n` somewhat below 1.
pub fn optimal_xi(n: f64, b: f64) -> Result<f64> {
    let t = optimal_tan_squared(n, b)?;
    if t > 1.0 + EPS_ALG {
        return Err(Error::NoRoot(format!(
            "stationary tan²ξ = {t} at n = {n}, b = {b} is outside (0, 1]"
        )));
    }
    Ok(t.min(1.0).sqrt().atan())
}

/// `n⁶ + 2n⁵ + 3n⁴ − 4n³ − 3n² − 2n − 1`.
pub fn n0_polynomial(n: f64) -> f64 {
    [1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]
        .iter()
        .fold(0.0, |acc, c| acc * n + c)
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > BISECTION_TOL * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The root of [`n0_polynomial`] in `(1, 2)`, where the polynomial changes
/// sign exactly once. The polynomial carries no `b`.
pub fn find_n0() -> f64 {
    bisect(1.0, 2.0, n0_polynomial).expect("n0 polynomial changes sign on (1, 2)")
}

/// One row of the trade-off curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: f64,
    pub xi_opt: f64,
    /// `h(n/(1+n))`, the `b → 1` cost of the improved technique.
    pub e0: f64,
    /// `h(H(n, b))` at the actual `b`.
    pub e0_exact: f64,
    /// FPT cost at the same fidelity, `h(F/2)`.
    pub e_fpt: f64,
    pub f: f64,
}

pub fn curve_point(n: f64, b: f64) -> Result<CurvePoint> {
    let xi_opt = optimal_xi(n, b)?;
    let f = 1.0 - failure_probability_closed(n, b, xi_opt)?;
    Ok(CurvePoint {
        n,
        xi_opt,
        e0: binary_entropy(n / (1.0 + n))?,
        e0_exact: binary_entropy(entanglement_parameter(n, b)?)?,
        e_fpt: binary_entropy(f / 2.0)?,
        f,
    })
}

/// A grid value for which no curve point exists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub n: f64,
    pub reason: String,
}

/// Monotonicity of the curve quantities along increasing `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveDiagnostics {
    pub xi_decreasing: bool,
    pub e0_decreasing: bool,
    pub f_increasing: bool,
    /// Number of sign changes of `E0 − E_FPT` between neighbouring points.
    pub crossings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub b: f64,
    pub points: Vec<CurvePoint>,
    pub skipped: Vec<SkippedPoint>,
    pub diagnostics: CurveDiagnostics,
}

/// `DEFAULT_GRID_POINTS` log-spaced values from `find_n0()` to
/// `DEFAULT_GRID_END`, both ends included.
pub fn default_grid() -> Vec<f64> {
    log_grid(find_n0(), DEFAULT_GRID_END, DEFAULT_GRID_POINTS)
}

pub fn log_grid(start: f64, end: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && start > 0.0 && end > start);
    let (l0, l1) = (start.ln(), end.ln());
    let step = (l1 - l0) / (points - 1) as f64;
    (0..points)
        .map(|i| match i {
            0 => start,
            i if i == points - 1 => end,
            i => (l0 + step * i as f64).exp(),
        })
        .collect()
}

/// Evaluates the curve on `grid`, which must be strictly increasing and
/// start no lower than `find_n0()`. Points where [`optimal_xi`] has no
/// admissible root are recorded in `skipped`.
pub fn generate_curve(b: f64, grid: &[f64]) -> Result<Curve> {
    check_nb(1.0, b)?;
    let n0 = find_n0();
    if grid
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
    {
        return Err(Error::param("curve grid must be strictly increasing"));
    }
    if let Some(&first) = grid.first() {
        if first < n0 - EPS_ALG {
            return Err(Error::param(format!(
                "curve grid starts at {first} < n0 = {n0}"
            )));
        }
    }

    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for &n in grid {
        match curve_point(n, b) {
            Ok(p) => points.push(p),
            Err(e) => skipped.push(SkippedPoint {
                n,
                reason: e.to_string(),
            }),
        }
    }

    let pairs = || points.windows(2);
    let diagnostics = CurveDiagnostics {
        xi_decreasing: pairs().all(|w| w[1].xi_opt < w[0].xi_opt),
        e0_decreasing: pairs().all(|w| w[1].e0 < w[0].e0),
        f_increasing: pairs().all(|w| w[1].f > w[0].f),
        crossings: pairs()
            .filter(|w| (w[0].e0 - w[0].e_fpt).signum() != (w[1].e0 - w[1].e_fpt).signum())
            .count(),
    };
    Ok(Curve {
        b,
        points,
        skipped,
        diagnostics,
    })
}

/// The point where the two entanglement costs meet, read three ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossings {
    /// `(n1, E)` with `E0 = E_FPT = E`.
    pub m0: (f64, f64),
    /// `(n1, F)`.
    pub m1: (f64, f64),
    /// `(n1, ξ)`.
    pub m2: (f64, f64),
}

fn cost_gap(n: f64, b: f64) -> f64 {
    match curve_point(n, b) {
        Ok(p) => p.e0 - p.e_fpt,
        Err(_) => f64::NAN,
    }
}

/// Locates the single sign change of `E0 − E_FPT` on the curve and refines it
/// by bisection on `n`, so the result does not depend on the grid spacing.
pub fn find_crossings(curve: &Curve) -> Result<Crossings> {
    let brackets: Vec<(f64, f64)> = curve
        .points
        .windows(2)
        .filter(|w| (w[0].e0 - w[0].e_fpt).signum() != (w[1].e0 - w[1].e_fpt).signum())
        .map(|w| (w[0].n, w[1].n))
        .collect();
    let (lo, hi) = match brackets.as_slice() {
        [one] => *one,
        [] => return Err(Error::Crossing("E0 − E_FPT never changes sign".into())),
        many => {
            return Err(Error::Crossing(format!(
                "E0 − E_FPT changes sign {} times",
                many.len()
            )))
        }
    };
    let n1 = bisect(lo, hi, |n| cost_gap(n, curve.b))?;
    let p = curve_point(n1, curve.b)?;
    Ok(Crossings {
        m0: (n1, 0.5 * (p.e0 + p.e_fpt)),
        m1: (n1, p.f),
        m2: (n1, p.xi_opt),
    })
}

/// Crossings on the default grid.
pub fn default_crossings(b: f64) -> Result<Crossings> {
    find_crossings(&generate_curve(b, &default_grid())?)
}

/// How to implement a gate of a given angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "technique", rename_all = "lowercase")]
pub enum Plan {
    /// The improved technique with resource parameter `n`.
    Improved {
        xi: f64,
        n: f64,
        #[serde(rename = "E0")]
        e0: f64,
        #[serde(rename = "E0_exact")]
        e0_exact: f64,
        #[serde(rename = "F")]
        f: f64,
    },
    /// The FPT technique at the crossing fidelity, used above the
    /// crossing angle where it is the cheaper option.
    Fpt {
        xi: f64,
        #[serde(rename = "F")]
        f: f64,
        #[serde(rename = "E")]
        e: f64,
    },
}

impl Plan {
    pub fn fidelity(&self) -> f64 {
        match *self {
            Plan::Improved { f, .. } | Plan::Fpt { f, .. } => f,
        }
    }

    pub fn entanglement(&self) -> f64 {
        match *self {
            Plan::Improved { e0, .. } => e0,
            Plan::Fpt { e, .. } => e,
        }
    }
}

/// Largest `n` the plan inversion will search before giving up.
const PLAN_N_MAX: f64 = 1e12;

pub fn plan_for_xi(xi: f64, b: f64) -> Result<Plan> {
    if !(xi > 0.0 && xi <= std::f64::consts::FRAC_PI_4 + EPS_ALG) {
        return Err(Error::param(format!("ξ = {xi} outside (0, π/4]")));
    }
    let c = default_crossings(b)?;
    let (n1, xi_m2) = c.m2;
    if xi > xi_m2 {
        let f = c.m1.1;
        return Ok(Plan::Fpt {
            xi,
            f,
            e: binary_entropy(f / 2.0)?,
        });
    }

    // optimal_xi decreases in n, so grow the bracket until it drops below ξ.
    let mut hi = 2.0 * n1;
    while optimal_xi(hi, b)? > xi {
        hi *= 2.0;
        if hi > PLAN_N_MAX {
            return Err(Error::NoRoot(format!(
                "no n ≤ {PLAN_N_MAX} reaches ξ = {xi}"
            )));
        }
    }
    let n = bisect(n1, hi, |n| optimal_xi(n, b).map_or(f64::NAN, |x| x - xi))?;
    let p = curve_point(n, b)?;
    Ok(Plan::Improved {
        xi,
        n,
        e0: p.e0,
        e0_exact: p.e0_exact,
        f: p.f,
    })
}

/// The printed-polynomial root next to the cost-comparison threshold, which
/// is where `E0 − E_FPT` changes sign for `n > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct N0Comparison {
    pub polynomial_root: f64,
    pub empirical_threshold: f64,
    /// Same threshold with `E0` replaced by the finite-`b` cost.
    pub empirical_threshold_exact: f64,
}

pub fn n0_comparison(b: f64) -> Result<N0Comparison> {
    let grid = log_grid(1.0 + 1e-6, DEFAULT_GRID_END, DEFAULT_GRID_POINTS);
    let threshold = |gap: &dyn Fn(f64) -> f64| -> Result<f64> {
        let w = grid
            .windows(2)
            .find(|w| {
                let (g0, g1) = (gap(w[0]), gap(w[1]));
                !g0.is_nan() && !g1.is_nan() && g0.signum() != g1.signum()
            })
            .ok_or_else(|| Error::Crossing("no cost crossing above n = 1".into()))?;
        bisect(w[0], w[1], gap)
    };
    let exact_gap = |n: f64| match curve_point(n, b) {
        Ok(p) => p.e0_exact - p.e_fpt,
        Err(_) => f64::NAN,
    };
    Ok(N0Comparison {
        polynomial_root: find_n0(),
        empirical_threshold: threshold(&|n| cost_gap(n, b))?,
        empirical_threshold_exact: threshold(&exact_gap)?,
    })
}
