//! Shrinking annuli, the error functions Theta_j, the decomposition and
//! L^p measurement of the ansatz residuals, decay-slope fits against the
//! predicted exponent, and mass-concentration quadratures.
//!
//! The residual of the tower ansatz W splits as
//!   R = rho f(W) + Lap W = E+ - E-,     S = rho f'(W) - sum_i V_i = E+ + gamma E-,
//! and on the j-th annulus the diagonal part of E+/E- collapses to
//! bubble_j (e^{Theta_j} - 1): the whole parameter choice exists to make
//! Theta_j small. Everything here evaluates those objects pointwise from
//! exact disk projections and integrates them adaptively in log radius.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Ansatz, FieldKind, RadialField, RadialGrid};
use crate::params::{rat_f64, rat_str, TowerSpec};
use crate::quad::{integrate_split, sign_change_points, QuadratureConfig};
use std::sync::Arc;

/// Geometric rho-ladder ratio, 10^{-1/2}.
pub const LADDER_RATIO: f64 = 0.316_227_766_016_837_94;
/// Quadrature tail below the innermost scale, in log radius.
const INNER_TAIL: f64 = 46.0;
/// Scan density for locating integrand sign changes inside one annulus.
const SIGN_SCAN_POINTS: usize = 256;

/// Sentinel-aware annulus boundary: delta_0 = 0 and delta_{k+1} = infinity
/// never enter arithmetic, they mark the origin and the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleBound {
    Origin,
    /// Interior cut at ln r = value (geometric mean of adjacent scales).
    Cut(f64),
    /// The domain boundary r = 1.
    Boundary,
}

/// The k shrinking annuli A_j = { sqrt(delta_{j-1} delta_j) <= |x| < sqrt(delta_j delta_{j+1}) }.
#[derive(Debug, Clone)]
pub struct AnnulusSet {
    /// k+1 boundaries; bounds[0] = Origin, bounds[k] = Boundary.
    pub bounds: Vec<ScaleBound>,
    delta_logs: Vec<f64>,
}

impl AnnulusSet {
    pub fn build(ansatz: &Ansatz) -> Self {
        let delta_logs: Vec<f64> = ansatz.bubbles.iter().map(|b| b.delta_log).collect();
        let k = delta_logs.len();
        let mut bounds = Vec::with_capacity(k + 1);
        bounds.push(ScaleBound::Origin);
        for j in 1..k {
            bounds.push(ScaleBound::Cut(0.5 * (delta_logs[j - 1] + delta_logs[j])));
        }
        bounds.push(ScaleBound::Boundary);
        AnnulusSet { bounds, delta_logs }
    }

    pub fn k(&self) -> usize {
        self.bounds.len() - 1
    }

    /// Log-radius interval of annulus j (1-based) for quadrature; the origin
    /// sentinel becomes a tail far below the innermost scale.
    pub fn quad_bounds(&self, j: usize) -> (f64, f64) {
        let lo = match self.bounds[j - 1] {
            ScaleBound::Origin => self.delta_logs[0] - INNER_TAIL,
            ScaleBound::Cut(c) => c,
            ScaleBound::Boundary => unreachable!("boundary is the outermost cut"),
        };
        let hi = match self.bounds[j] {
            ScaleBound::Cut(c) => c,
            ScaleBound::Boundary => 0.0,
            ScaleBound::Origin => unreachable!("origin is the innermost cut"),
        };
        (lo, hi)
    }

    /// 1-based index of the annulus containing ln r = t (t <= 0).
    pub fn annulus_of(&self, t: f64) -> usize {
        for j in 1..self.k() {
            if let ScaleBound::Cut(c) = self.bounds[j] {
                if t < c {
                    return j;
                }
            }
        }
        self.k()
    }
}

/// Pointwise evaluator for every residual component of one ansatz.
pub struct ResidualEval<'a> {
    pub ansatz: &'a Ansatz,
    pub annuli: AnnulusSet,
}

impl<'a> ResidualEval<'a> {
    pub fn new(ansatz: &'a Ansatz) -> Self {
        ResidualEval { ansatz, annuli: AnnulusSet::build(ansatz) }
    }

    fn k(&self) -> usize {
        self.ansatz.k()
    }

    /// rho e^{W(t)}.
    pub fn plus_term(&self, t: f64) -> f64 {
        (self.ansatz.ln_rho + self.ansatz.eval(t)).exp()
    }

    /// rho tau e^{-gamma W(t)}.
    pub fn minus_term(&self, t: f64) -> f64 {
        (self.ansatz.ln_rho + self.ansatz.tau().ln() - self.ansatz.gamma() * self.ansatz.eval(t)).exp()
    }

    /// |x|^{alpha_i - 2} e^{w_i}, the i-th Liouville source (1-based).
    pub fn source(&self, i: usize, t: f64) -> f64 {
        self.ansatz.bubbles[i - 1].source_log(t).exp()
    }

    fn sum_sources_parity(&self, t: f64, odd: bool, skip: usize) -> f64 {
        (1..=self.k())
            .filter(|&i| (i % 2 == 1) == odd && i != skip)
            .map(|i| self.source(i, t))
            .sum()
    }

    /// E+ = rho e^W - sum_{i odd} source_i.
    pub fn e_plus(&self, t: f64) -> f64 {
        self.plus_term(t) - self.sum_sources_parity(t, true, 0)
    }

    /// E- = rho tau e^{-gamma W} - (1/gamma) sum_{i even} source_i.
    pub fn e_minus(&self, t: f64) -> f64 {
        self.minus_term(t) - self.sum_sources_parity(t, false, 0) / self.ansatz.gamma()
    }

    /// Diagonal part of E+ (odd annuli).
    pub fn e_plus1(&self, t: f64) -> f64 {
        let j = self.annuli.annulus_of(t);
        if j % 2 == 1 {
            self.plus_term(t) - self.source(j, t)
        } else {
            0.0
        }
    }

    /// rho e^W on even annuli.
    pub fn e_plus2(&self, t: f64) -> f64 {
        if self.annuli.annulus_of(t) % 2 == 0 {
            self.plus_term(t)
        } else {
            0.0
        }
    }

    /// Off-annulus odd bubbles (enters E+ with a minus sign).
    pub fn e_plus3(&self, t: f64) -> f64 {
        -self.sum_sources_parity(t, true, self.annuli.annulus_of(t))
    }

    /// Diagonal part of E- (even annuli); the bubble carries its tower
    /// weight 1/gamma so that E- = E-^1 + E-^2 + E-^3 holds exactly.
    pub fn e_minus1(&self, t: f64) -> f64 {
        let j = self.annuli.annulus_of(t);
        if j % 2 == 0 {
            self.minus_term(t) - self.source(j, t) / self.ansatz.gamma()
        } else {
            0.0
        }
    }

    /// rho tau e^{-gamma W} on odd annuli.
    pub fn e_minus2(&self, t: f64) -> f64 {
        if self.annuli.annulus_of(t) % 2 == 1 {
            self.minus_term(t)
        } else {
            0.0
        }
    }

    /// Off-annulus even bubbles over gamma (enters E- with a minus sign).
    pub fn e_minus3(&self, t: f64) -> f64 {
        -self.sum_sources_parity(t, false, self.annuli.annulus_of(t)) / self.ansatz.gamma()
    }

    /// R = rho f(W) + Lap W, assembled independently of the E components.
    pub fn r_rho(&self, t: f64) -> f64 {
        let signed: f64 =
            (1..=self.k()).map(|i| self.ansatz.coefficient(i) * self.source(i, t)).sum();
        self.plus_term(t) - self.minus_term(t) - signed
    }

    /// S = rho f'(W) - sum_i source_i.
    pub fn s_rho(&self, t: f64) -> f64 {
        let total: f64 = (1..=self.k()).map(|i| self.source(i, t)).sum();
        self.plus_term(t) + self.ansatz.gamma() * self.ansatz.tau()
            * (self.ansatz.ln_rho - self.ansatz.gamma() * self.ansatz.eval(t)).exp()
            - total
    }

    /// Theta_j at x with ln|x| = t, via the projection-sum form.
    pub fn theta_at(&self, j: usize, t: f64) -> f64 {
        let a = self.ansatz;
        let bj = &a.bubbles[j - 1];
        let mut theta = bj.project(t) - bj.eval(t) - (bj.alpha - 2.0) * t;
        let cross: f64 =
            (1..=self.k()).filter(|&i| i != j).map(|i| a.coefficient(i) * a.bubbles[i - 1].project(t)).sum();
        if j % 2 == 1 {
            theta += a.ln_rho + cross;
        } else {
            theta += a.ln_rho + (a.tau() * a.gamma()).ln() - a.gamma() * cross;
        }
        theta
    }

    /// Theta_j at the rescaled coordinate y = x / delta_j; errors when y is
    /// outside A_j / delta_j.
    pub fn theta(&self, j: usize, log_y: f64) -> Result<f64> {
        let dj = self.ansatz.bubbles[j - 1].delta_log;
        let t = dj + log_y;
        let (lo, hi) = self.annuli.quad_bounds(j);
        if t < lo - 1e-12 || t > hi + 1e-12 {
            return Err(Error::OutOfAnnulus { j, log_y, lo: lo - dj, hi: hi - dj });
        }
        Ok(self.theta_at(j, t))
    }

    /// Relative defect of the diagonal identity
    /// (rho e^W - bubble_j) = bubble_j (e^{Theta_j} - 1) on odd annuli
    /// (gamma rho tau e^{-gamma W} - bubble_j on even ones), measured
    /// against the bubble scale.
    pub fn thjmasses_rel(&self, j: usize, t: f64) -> f64 {
        let b = self.source(j, t);
        let lhs = if j % 2 == 1 {
            self.plus_term(t) - b
        } else {
            self.ansatz.gamma() * self.minus_term(t) - b
        };
        let em1 = self.theta_at(j, t).exp_m1();
        let rhs = b * em1;
        (lhs - rhs).abs() / (b * em1.abs().max(1.0)).max(f64::MIN_POSITIVE)
    }

    /// Dense scan of |Theta_j| over the rescaled annulus.
    pub fn theta_sup_scan(&self, j: usize, n: usize) -> ThetaScan {
        let dj = self.ansatz.bubbles[j - 1].delta_log;
        let (lo, hi) = self.annuli.quad_bounds(j);
        let lo = lo.max(dj - 20.0);
        let mut sup = 0.0;
        let mut argmax = lo;
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let v = self.theta_at(j, t).abs();
            if v > sup {
                sup = v;
                argmax = t;
            }
        }
        ThetaScan { j, sup, argmax_log_y: argmax - dj, outer_log_y: hi - dj }
    }

    /// All eight component fields sampled on a grid.
    pub fn sample_components(&self, grid: &Arc<RadialGrid>) -> Vec<(String, RadialField)> {
        let comps: Vec<(&str, Box<dyn Fn(f64) -> f64 + '_>)> = vec![
            ("E+1", Box::new(|t| self.e_plus1(t))),
            ("E+2", Box::new(|t| self.e_plus2(t))),
            ("E+3", Box::new(|t| self.e_plus3(t))),
            ("E-1", Box::new(|t| self.e_minus1(t))),
            ("E-2", Box::new(|t| self.e_minus2(t))),
            ("E-3", Box::new(|t| self.e_minus3(t))),
            ("R", Box::new(|t| self.r_rho(t))),
            ("S", Box::new(|t| self.s_rho(t))),
        ];
        comps
            .into_iter()
            .map(|(name, f)| {
                (name.to_string(), RadialField::from_fn(grid, f, 0, FieldKind::Residual))
            })
            .collect()
    }

    /// Max relative defect over the grid of the pointwise identities
    /// R = E+ - E-, S = E+ + gamma E-, and the component completeness
    /// E+- = E+-^1 + E+-^2 + E+-^3. Denominator: sum of constituent sizes.
    pub fn identity_check(&self, grid: &RadialGrid) -> IdentityCheck {
        let g = self.ansatz.gamma();
        let mut out = IdentityCheck::default();
        for &t in &grid.t {
            let scale: f64 = self.plus_term(t)
                + self.minus_term(t)
                + (1..=self.k()).map(|i| self.source(i, t) * self.ansatz.coefficient(i).abs()).sum::<f64>()
                + f64::MIN_POSITIVE;
            let ep = self.e_plus(t);
            let em = self.e_minus(t);
            let r = (self.r_rho(t) - (ep - em)).abs() / scale;
            let s = (self.s_rho(t) - (ep + g * em)).abs() / scale;
            let cp = (ep - (self.e_plus1(t) + self.e_plus2(t) + self.e_plus3(t))).abs() / scale;
            let cm = (em - (self.e_minus1(t) + self.e_minus2(t) + self.e_minus3(t))).abs() / scale;
            out.r_max_rel = out.r_max_rel.max(r);
            out.s_max_rel = out.s_max_rel.max(s);
            out.completeness_max_rel = out.completeness_max_rel.max(cp.max(cm));
        }
        out
    }

    /// Quadrature breakpoints for one annulus: interior bubble scales plus
    /// the sign structure of the integrand.
    fn breakpoints<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self
            .ansatz
            .bubbles
            .iter()
            .map(|b| b.delta_log)
            .filter(|&d| d > lo && d < hi)
            .collect();
        pts.extend(sign_change_points(f, lo, hi, SIGN_SCAN_POINTS));
        pts
    }

    /// Per-annulus integrals of |f|^p against 2 pi r dr and the total norm.
    ///
    /// `mag` bounds the sum of the absolute constituent terms of f; the
    /// roundoff of a cancelling difference is eps * mag, so the quadrature
    /// tolerance is floored at the integral of that noise profile. The floor
    /// is reported so callers can detect noise-dominated norms.
    pub fn lp_norm<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(
        &self,
        f: &F,
        mag: &G,
        p: f64,
    ) -> Result<LpNorm> {
        assert!(p >= 1.0, "L^p norms need p >= 1");
        let mag_cfg = QuadratureConfig { rel_tol: 1e-6, ..Default::default() };
        let mut integrals = Vec::with_capacity(self.k());
        let mut floors = Vec::with_capacity(self.k());
        for j in 1..=self.k() {
            let (lo, hi) = self.annuli.quad_bounds(j);
            let scale_pts: Vec<f64> = self
                .ansatz
                .bubbles
                .iter()
                .map(|b| b.delta_log)
                .filter(|&d| d > lo && d < hi)
                .collect();
            // Noise profile of |f|^p: p mag^{p-1} (eps mag) ~ p eps mag^p.
            let noise = integrate_split(
                &|t: f64| mag(t).powf(p) * 2.0 * PI * (2.0 * t).exp(),
                lo,
                hi,
                &scale_pts,
                &mag_cfg,
            )? * p
                * f64::EPSILON
                * 8.0;
            let pts = self.breakpoints(f, lo, hi);
            let cfg = QuadratureConfig { rel_tol: 1e-9, abs_tol: noise, ..Default::default() };
            let integrand = |t: f64| f(t).abs().powf(p) * 2.0 * PI * (2.0 * t).exp();
            integrals.push(integrate_split(&integrand, lo, hi, &pts, &cfg)?);
            floors.push(noise);
        }
        let integral_total: f64 = integrals.iter().sum();
        Ok(LpNorm {
            p,
            per_annulus: integrals,
            noise_floor: floors.iter().sum(),
            integral_total,
            total: integral_total.powf(1.0 / p),
        })
    }

    /// Mass inside the ball of radius r_ball: (plus, minus) quadratures of
    /// rho e^W and rho tau e^{-gamma W}.
    pub fn mass_concentration(&self, r_ball: f64) -> Result<(f64, f64)> {
        assert!(r_ball > 0.0 && r_ball <= 1.0);
        let cfg = QuadratureConfig { rel_tol: 1e-9, ..Default::default() };
        let hi = r_ball.ln();
        let lo = self.ansatz.bubbles[0].delta_log - INNER_TAIL;
        let pts: Vec<f64> =
            self.ansatz.bubbles.iter().map(|b| b.delta_log).filter(|&d| d < hi).collect();
        let plus = integrate_split(
            &|t: f64| self.plus_term(t) * 2.0 * PI * (2.0 * t).exp(),
            lo,
            hi,
            &pts,
            &cfg,
        )?;
        let minus = integrate_split(
            &|t: f64| self.minus_term(t) * 2.0 * PI * (2.0 * t).exp(),
            lo,
            hi,
            &pts,
            &cfg,
        )?;
        Ok((plus, minus))
    }
}

/// The measurable residual components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Component {
    EPlus,
    EMinus,
    EPlus1,
    EPlus2,
    EPlus3,
    EMinus1,
    EMinus2,
    EMinus3,
    R,
    S,
}

impl Component {
    pub const ALL: [Component; 10] = [
        Component::EPlus,
        Component::EMinus,
        Component::EPlus1,
        Component::EPlus2,
        Component::EPlus3,
        Component::EMinus1,
        Component::EMinus2,
        Component::EMinus3,
        Component::R,
        Component::S,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Component::EPlus => "E+",
            Component::EMinus => "E-",
            Component::EPlus1 => "E+1",
            Component::EPlus2 => "E+2",
            Component::EPlus3 => "E+3",
            Component::EMinus1 => "E-1",
            Component::EMinus2 => "E-2",
            Component::EMinus3 => "E-3",
            Component::R => "R",
            Component::S => "S",
        }
    }
}

impl<'a> ResidualEval<'a> {
    /// Pointwise value of a named component.
    pub fn component_value(&self, c: Component, t: f64) -> f64 {
        match c {
            Component::EPlus => self.e_plus(t),
            Component::EMinus => self.e_minus(t),
            Component::EPlus1 => self.e_plus1(t),
            Component::EPlus2 => self.e_plus2(t),
            Component::EPlus3 => self.e_plus3(t),
            Component::EMinus1 => self.e_minus1(t),
            Component::EMinus2 => self.e_minus2(t),
            Component::EMinus3 => self.e_minus3(t),
            Component::R => self.r_rho(t),
            Component::S => self.s_rho(t),
        }
    }

    /// Sum of the absolute constituent terms of a component: the scale whose
    /// roundoff limits how accurately the (possibly cancelling) value can be
    /// evaluated.
    pub fn component_magnitude(&self, c: Component, t: f64) -> f64 {
        let g = self.ansatz.gamma();
        let j = self.annuli.annulus_of(t);
        match c {
            Component::EPlus => self.plus_term(t) + self.sum_sources_parity(t, true, 0),
            Component::EMinus => self.minus_term(t) + self.sum_sources_parity(t, false, 0) / g,
            Component::EPlus1 => {
                if j % 2 == 1 {
                    self.plus_term(t) + self.source(j, t)
                } else {
                    0.0
                }
            }
            Component::EPlus2 => self.e_plus2(t),
            Component::EPlus3 => -self.e_plus3(t),
            Component::EMinus1 => {
                if j % 2 == 0 {
                    self.minus_term(t) + self.source(j, t) / g
                } else {
                    0.0
                }
            }
            Component::EMinus2 => self.e_minus2(t),
            Component::EMinus3 => -self.e_minus3(t),
            Component::R => {
                self.plus_term(t)
                    + self.minus_term(t)
                    + (1..=self.k())
                        .map(|i| self.ansatz.coefficient(i).abs() * self.source(i, t))
                        .sum::<f64>()
            }
            Component::S => {
                self.plus_term(t)
                    + g * self.minus_term(t)
                    + (1..=self.k()).map(|i| self.source(i, t)).sum::<f64>()
            }
        }
    }

    /// L^p data for a named component.
    pub fn component_lp(&self, c: Component, p: f64) -> Result<LpNorm> {
        self.lp_norm(&|t| self.component_value(c, t), &|t| self.component_magnitude(c, t), p)
    }
}

/// Result of a Theta_j sup scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThetaScan {
    pub j: usize,
    pub sup: f64,
    pub argmax_log_y: f64,
    pub outer_log_y: f64,
}

/// Pointwise identity defects over a grid.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct IdentityCheck {
    pub r_max_rel: f64,
    pub s_max_rel: f64,
    pub completeness_max_rel: f64,
}

/// Per-annulus L^p data for one component.
#[derive(Debug, Clone, Serialize)]
pub struct LpNorm {
    pub p: f64,
    /// Integrals of |f|^p over each annulus (not yet rooted).
    pub per_annulus: Vec<f64>,
    /// Roundoff floor of the integral given the constituent magnitudes;
    /// values at or below this are noise.
    pub noise_floor: f64,
    pub integral_total: f64,
    /// (sum of integrals)^{1/p}.
    pub total: f64,
}

impl LpNorm {
    /// The measured integral is dominated by evaluation roundoff.
    pub fn at_noise_floor(&self) -> bool {
        self.integral_total <= 4.0 * self.noise_floor
    }
}

/// Least-squares fit of ln(value) against ln(rho).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Fit a power law after rejecting samples at the quadrature noise floor.
pub fn decay_fit_checked(points: &[(f64, f64)], floors: &[f64]) -> Result<FitResult> {
    assert_eq!(points.len(), floors.len());
    if points.iter().zip(floors).any(|(&(_, v), &f)| v <= 4.0 * f) {
        return Err(Error::DegenerateFit(
            "ladder value at the quadrature noise floor".into(),
        ));
    }
    decay_fit(points)
}

/// Fit a power law value = c rho^slope from ladder samples.
pub fn decay_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!("ladder of {} < 4 points", points.len())));
    }
    if points.iter().any(|&(rho, v)| !(rho > 0.0) || !(v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit("non-positive or non-finite ladder values".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all rho values identical".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(FitResult { slope, intercept: ym - slope * xm, r2 })
}

/// Largest rho of the form initial * ratio^i that passes scale separation.
pub fn ladder_start(spec: &TowerSpec, initial: f64, ratio: f64) -> Result<f64> {
    assert!(ratio > 0.0 && ratio < 1.0);
    let mut rho = initial;
    for _ in 0..256 {
        match Ansatz::new(spec, rho) {
            Ok(_) => return Ok(rho),
            Err(Error::ScaleCollapse(_)) => rho *= ratio,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ScaleCollapse(format!(
        "no separated rho found down to {rho:.3e} for k = {}",
        spec.k
    )))
}

/// Geometric ladder rho_i = start * ratio^i, i = 0..count.
pub fn rho_ladder(start: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * ratio.powi(i as i32)).collect()
}

/// Machine-readable residual measurement at one rho.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub rho: f64,
    pub k: usize,
    pub gamma: String,
    pub beta_bar: f64,
    pub beta_bar_exact: String,
    pub theta_sup: Vec<f64>,
    pub identities: IdentityCheck,
    pub thjmasses_max_rel: f64,
    pub norms: Vec<ComponentNorm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentNorm {
    pub component: String,
    pub p: f64,
    pub per_annulus: Vec<f64>,
    pub noise_floor: f64,
    pub total: f64,
}

/// Measure every component at one rho for the given exponents.
pub fn residual_report(spec: &TowerSpec, rho: f64, ps: &[f64]) -> Result<ResidualReport> {
    let ansatz = Ansatz::new(spec, rho)?;
    let eval = ResidualEval::new(&ansatz);
    let grid = ansatz.grid();
    let identities = eval.identity_check(&grid);

    let theta_sup: Vec<f64> =
        (1..=spec.k).map(|j| eval.theta_sup_scan(j, 2048).sup).collect();

    let mut thjmasses_max_rel: f64 = 0.0;
    for j in 1..=spec.k {
        let (lo, hi) = eval.annuli.quad_bounds(j);
        let lo = lo.max(ansatz.bubbles[j - 1].delta_log - 20.0);
        for i in 0..512 {
            let t = lo + (hi - lo) * i as f64 / 511.0;
            thjmasses_max_rel = thjmasses_max_rel.max(eval.thjmasses_rel(j, t));
        }
    }

    let mut norms = Vec::new();
    for &p in ps {
        for c in Component::ALL {
            let n = eval.component_lp(c, p)?;
            norms.push(ComponentNorm {
                component: c.name().to_string(),
                p,
                per_annulus: n.per_annulus,
                noise_floor: n.noise_floor,
                total: n.total,
            });
        }
    }

    let fam = &ansatz.family;
    Ok(ResidualReport {
        rho,
        k: spec.k,
        gamma: spec.gamma.to_string(),
        beta_bar: fam.beta_bar_f64(),
        beta_bar_exact: rat_str(&fam.beta_bar),
        theta_sup,
        identities,
        thjmasses_max_rel,
        norms,
    })
}

/// Expected L^p decay exponent of the diagonal residual:
/// beta_bar - 2 s_1 (p - 1)/p.
pub fn diagonal_decay_exponent(spec: &TowerSpec, p: f64) -> f64 {
    let fam = crate::params::concentration_params(spec);
    fam.beta_bar_f64() - 2.0 * rat_f64(&fam.entries[0].s) * (p - 1.0) / p
}

/// q-moments of the ansatz nonlinearities: integrals of (rho e^W)^q and
/// (rho tau e^{-gamma W})^q over the disk.
pub fn q_moments(eval: &ResidualEval, q: f64) -> Result<(f64, f64)> {
    let plus = eval.lp_norm(&|t| eval.plus_term(t), &|t| eval.plus_term(t), q)?;
    let minus = eval.lp_norm(&|t| eval.minus_term(t), &|t| eval.minus_term(t), q)?;
    Ok((plus.integral_total, minus.integral_total))
}

/// Sharp growth exponent of the q-moment: the innermost (fastest) scale
/// dominates, so the integral behaves like delta_1^{2(1-q)} = rho^{2 s_1 (1-q)}.
pub fn q_moment_exponent(spec: &TowerSpec, q: f64) -> f64 {
    let fam = crate::params::concentration_params(spec);
    2.0 * rat_f64(&fam.entries[0].s) * (1.0 - q)
}
