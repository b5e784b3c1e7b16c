//! Singular Liouville bubbles, their exact projections onto the unit disk,
//! the Z kernel functions, the Green's function, and assembly of the
//! bubble-tower ansatz.
//!
//! Every radial quantity lives in the log-radius variable t = ln r, and
//! concentration scales are carried as ln(delta): nothing is exponentiated
//! until a pointwise value is actually needed, so delta down to 1e-300 in
//! log representation never under/overflows.

use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{concentration_params, rat_f64, BubbleFamily, TowerSpec};
use crate::quad::{integrate, QuadratureConfig};

/// Minimum separation factor between consecutive concentration scales.
pub const SCALE_SEPARATION_FACTOR: f64 = 10.0;
/// The outermost scale must stay below this radius so the outer annulus
/// keeps a full core of bubble k inside the disk.
pub const BOUNDARY_SEPARATION_RADIUS: f64 = 0.316227766016838; // 10^{-1/2}
/// Base grid density of 48 points per decade, refined 4x: bubble profiles
/// concentrate the quadratures, so the refined density is used everywhere.
pub const GRID_POINTS_PER_DECADE: usize = 192;
/// The grid starts two decades below the innermost scale.
pub const GRID_MARGIN_FACTOR: f64 = 100.0;
/// Values below this magnitude are treated as zero when counting sign changes.
pub const SIGN_NOISE_FLOOR: f64 = 1e-12;

/// ln(delta^alpha + r^alpha) from ln(delta) and ln(r), stable for any scale.
#[inline]
pub fn log_pow_sum(alpha: f64, delta_log: f64, log_r: f64) -> f64 {
    let a = alpha * delta_log;
    let b = alpha * log_r;
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Shared logarithmic radius grid, t = ln r, ending at t = 0 (r = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub t: Vec<f64>,
}

impl RadialGrid {
    /// Uniform grid over [t_min, t_max] at the requested density.
    pub fn uniform(t_min: f64, t_max: f64, points_per_decade: usize) -> Self {
        assert!(t_max > t_min);
        let decades = (t_max - t_min) / std::f64::consts::LN_10;
        let n = ((decades * points_per_decade as f64).ceil() as usize).max(16) + 1;
        let h = (t_max - t_min) / (n - 1) as f64;
        let mut t: Vec<f64> = (0..n).map(|i| t_min + i as f64 * h).collect();
        *t.last_mut().unwrap() = t_max;
        RadialGrid { t }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Node spacing of a uniform grid.
    pub fn spacing(&self) -> f64 {
        (self.t[self.t.len() - 1] - self.t[0]) / (self.t.len() - 1) as f64
    }
}

/// Provenance tag for a sampled radial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Bubble,
    Projection,
    Ansatz,
    Residual,
    Potential,
    Correction,
    Solution,
}

/// Radial function sampled on a shared log-radius grid with a Fourier-mode tag.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
    pub mode: u32,
    pub kind: FieldKind,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, mode: u32, kind: FieldKind) -> Self {
        assert_eq!(grid.len(), values.len());
        RadialField { grid, values, mode, kind }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<RadialGrid>, f: F, mode: u32, kind: FieldKind) -> Self {
        let values = grid.t.iter().map(|&t| f(t)).collect();
        RadialField { grid: Arc::clone(grid), values, mode, kind }
    }

    /// CSV rows `log_r,value,mode` (RFC 4180, numeric columns).
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "log_r,value,mode")?;
        for (t, v) in self.grid.t.iter().zip(&self.values) {
            writeln!(w, "{t:.17e},{v:.17e},{}", self.mode)?;
        }
        Ok(())
    }
}

/// Strict sign alternations between adjacent nodes, ignoring magnitudes
/// below the noise floor.
pub fn count_sign_changes(values: &[f64], floor: f64) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for &v in values {
        if v.abs() < floor {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// One singular Liouville bubble w_delta^alpha with its tower sign and weight.
#[derive(Debug, Clone, Copy)]
pub struct BubbleInstance {
    /// Singularity exponent, >= 2.
    pub alpha: f64,
    /// ln(delta).
    pub delta_log: f64,
    /// Tower alternation (-1)^{i-1}.
    pub sign: i8,
    /// 1 for odd tower index, 1/gamma for even.
    pub weight: f64,
}

impl BubbleInstance {
    pub fn new(alpha: f64, delta_log: f64) -> Self {
        assert!(alpha >= 2.0);
        BubbleInstance { alpha, delta_log, sign: 1, weight: 1.0 }
    }

    /// w(r) = ln(2 alpha^2 delta^alpha / (delta^alpha + r^alpha)^2).
    pub fn eval(&self, log_r: f64) -> f64 {
        (2.0 * self.alpha * self.alpha).ln() + self.alpha * self.delta_log
            - 2.0 * log_pow_sum(self.alpha, self.delta_log, log_r)
    }

    /// ln(|x|^{alpha-2} e^{w}), the Liouville source density in log form.
    pub fn source_log(&self, log_r: f64) -> f64 {
        (2.0 * self.alpha * self.alpha).ln() + self.alpha * self.delta_log
            + (self.alpha - 2.0) * log_r
            - 2.0 * log_pow_sum(self.alpha, self.delta_log, log_r)
    }

    /// Exact projection onto the disk: Pw(r) = w(r) - w(1), since the
    /// boundary trace of a radial function is the constant w(1).
    pub fn project(&self, log_r: f64) -> f64 {
        2.0 * (log_pow_sum(self.alpha, self.delta_log, 0.0) - log_pow_sum(self.alpha, self.delta_log, log_r))
    }

    /// Z(r) = (delta^alpha - r^alpha)/(delta^alpha + r^alpha)
    ///      = -tanh(alpha (ln r - ln delta)/2).
    pub fn z_eval(&self, log_r: f64) -> f64 {
        -(0.5 * self.alpha * (log_r - self.delta_log)).tanh()
    }

    /// PZ(r) = Z(r) - Z(1), the exact disk projection of Z.
    pub fn pz_eval(&self, log_r: f64) -> f64 {
        self.z_eval(log_r) - self.z_eval(0.0)
    }
}

/// Unit-disk Green's function with pole at the origin: G(x, 0) = -ln|x| / 2 pi,
/// regular part H identically zero.
pub fn greens_disk(log_r: f64) -> (f64, f64) {
    (-log_r / (2.0 * PI), 0.0)
}

/// Sampled disk projection Pw of one bubble.
pub fn project_disk(b: &BubbleInstance, grid: &Arc<RadialGrid>) -> RadialField {
    RadialField::from_fn(grid, |t| b.project(t), 0, FieldKind::Projection)
}

/// Sampled disk projection PZ of one Z kernel function.
pub fn pz_disk(b: &BubbleInstance, grid: &Arc<RadialGrid>) -> RadialField {
    RadialField::from_fn(grid, |t| b.pz_eval(t), 0, FieldKind::Projection)
}

/// 2 pi Int r^{alpha-1} e^w dr up to ln(outer radius), by adaptive quadrature
/// in log radius. Converges to 4 pi alpha as the outer radius grows.
pub fn liouville_mass_quad(b: &BubbleInstance, outer_log_r: f64) -> Result<f64> {
    if outer_log_r < b.delta_log + SCALE_SEPARATION_FACTOR.ln() {
        return Err(Error::InvalidParameter(
            "liouville_mass_quad requires outer radius >= 10 delta".into(),
        ));
    }
    // Below t_lo the integrand carries < 1e-26 of the total mass.
    let t_lo = b.delta_log - 60.0 / b.alpha;
    let f = |t: f64| 2.0 * PI * (b.source_log(t) + 2.0 * t).exp();
    integrate(&f, t_lo, outer_log_r, &QuadratureConfig::default())
}

/// The bubble-tower ansatz: signed, weighted sum of projected bubbles.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub family: BubbleFamily,
    pub rho: f64,
    pub ln_rho: f64,
    pub bubbles: Vec<BubbleInstance>,
    /// Algebraic total mass M_k, the far-field Green coefficient.
    pub m_k: f64,
}

impl Ansatz {
    /// Build the ansatz at a given rho, enforcing scale separation:
    /// delta_{j+1}/delta_j >= 10 for all j and delta_k <= 1/10.
    pub fn new(spec: &TowerSpec, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidParameter(format!("rho = {rho} outside (0, 1)")));
        }
        let family = concentration_params(spec);
        Self::from_family(family, rho)
    }

    pub fn from_family(family: BubbleFamily, rho: f64) -> Result<Self> {
        let k = family.k;
        let ln_rho = rho.ln();
        let ln_sep = SCALE_SEPARATION_FACTOR.ln();
        let delta_logs: Vec<f64> = (1..=k).map(|j| family.delta_log(j, rho)).collect();
        for j in 0..k - 1 {
            if delta_logs[j + 1] - delta_logs[j] < ln_sep {
                return Err(Error::ScaleCollapse(format!(
                    "rho = {rho:.3e}: ln delta_{} = {:.3} and ln delta_{} = {:.3} closer than ln 10",
                    j + 1,
                    delta_logs[j],
                    j + 2,
                    delta_logs[j + 1],
                )));
            }
        }
        if delta_logs[k - 1] > BOUNDARY_SEPARATION_RADIUS.ln() {
            return Err(Error::ScaleCollapse(format!(
                "rho = {rho:.3e}: outermost scale delta_{k} = {:.3e} too close to the boundary",
                delta_logs[k - 1].exp(),
            )));
        }
        let gamma = family.gamma_f64;
        let bubbles = (1..=k)
            .map(|j| BubbleInstance {
                alpha: rat_f64(&family.entries[j - 1].alpha),
                delta_log: delta_logs[j - 1],
                sign: if j % 2 == 1 { 1 } else { -1 },
                weight: if j % 2 == 1 { 1.0 } else { 1.0 / gamma },
            })
            .collect();
        let sums = crate::params::alpha_sums(k, &family.gamma);
        let m_k = -4.0 * PI * rat_f64(&sums.a_k);
        Ok(Ansatz { family, rho, ln_rho, bubbles, m_k })
    }

    pub fn k(&self) -> usize {
        self.family.k
    }

    pub fn gamma(&self) -> f64 {
        self.family.gamma_f64
    }

    pub fn tau(&self) -> f64 {
        self.family.tau
    }

    /// Signed weight (-1)^{i-1} / gamma^{sigma(i)} of bubble i (1-based).
    pub fn coefficient(&self, i: usize) -> f64 {
        let b = &self.bubbles[i - 1];
        b.sign as f64 * b.weight
    }

    /// W_rho(t) = sum of coefficient(i) * Pw_i(t). Exactly zero at t = 0.
    pub fn eval(&self, t: f64) -> f64 {
        (1..=self.k()).map(|i| self.coefficient(i) * self.bubbles[i - 1].project(t)).sum()
    }

    /// Default shared grid: two decades below the innermost scale up to r = 1.
    pub fn grid(&self) -> Arc<RadialGrid> {
        self.grid_with_density(GRID_POINTS_PER_DECADE)
    }

    pub fn grid_with_density(&self, points_per_decade: usize) -> Arc<RadialGrid> {
        let t_min = self.bubbles[0].delta_log - GRID_MARGIN_FACTOR.ln();
        Arc::new(RadialGrid::uniform(t_min, 0.0, points_per_decade))
    }

    pub fn sample(&self, grid: &Arc<RadialGrid>) -> RadialField {
        RadialField::from_fn(grid, |t| self.eval(t), 0, FieldKind::Ansatz)
    }

    /// Max over the given radii of |W_rho(r) - M_k G(r, 0)|.
    pub fn far_field_deviation(&self, radii: &[f64]) -> f64 {
        radii
            .iter()
            .map(|&r| {
                let t = r.ln();
                (self.eval(t) - self.m_k * greens_disk(t).0).abs()
            })
            .fold(0.0, f64::max)
    }
}
