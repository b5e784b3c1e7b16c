//! Machine-readable report emission: CSV tables (RFC 4180, numeric columns)
//! and versioned JSON documents. Reports embed the resolved run
//! configuration so a file is reproducible from its own header.

use serde::Serialize;
use std::io::Write;

use crate::error::Result;
use crate::geometry::RadialField;
use crate::params::{
    blowup_masses, concentration_params, physics_params, rat_f64, rat_str, TowerSpec,
};

/// Bumped on breaking JSON layout changes.
pub const SCHEMA_VERSION: u32 = 1;

/// Versioned wrapper for every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: u32,
    pub artifact_version: &'static str,
    pub config: serde_json::Value,
    pub payload: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(config: serde_json::Value, payload: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION"),
            config,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// One parameter-table row per (gamma, k, j).
#[derive(Debug, Clone, Serialize)]
pub struct ParamRow {
    pub gamma: String,
    pub k: usize,
    pub j: usize,
    pub alpha: f64,
    pub alpha_exact: String,
    pub s: f64,
    pub s_exact: String,
    pub r: f64,
    pub r_exact: String,
    pub q: Option<f64>,
    pub q_exact: Option<String>,
    pub kappa_log: f64,
    pub c_log: f64,
    pub d_log: f64,
}

/// One summary row per (gamma, k); masses normalized by 4 pi, lambda by 2 pi.
#[derive(Debug, Clone, Serialize)]
pub struct ParamSummary {
    pub gamma: String,
    pub k: usize,
    pub m_plus_over_4pi: f64,
    pub m_minus_over_4pi: f64,
    pub m_k_over_4pi: f64,
    pub lambda_over_2pi: f64,
    pub p_bar: f64,
    pub identity_residual: f64,
    pub beta_bar: f64,
    pub beta_bar_exact: String,
    pub a_k: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamsTable {
    pub rows: Vec<ParamRow>,
    pub summary: ParamSummary,
}

/// Assemble the full parameter table for one spec.
pub fn params_table(spec: &TowerSpec) -> ParamsTable {
    let fam = concentration_params(spec);
    let masses = blowup_masses(spec);
    let physics = physics_params(spec);
    let gamma = spec.gamma.to_string();
    let rows = fam
        .entries
        .iter()
        .enumerate()
        .map(|(i0, e)| ParamRow {
            gamma: gamma.clone(),
            k: spec.k,
            j: i0 + 1,
            alpha: rat_f64(&e.alpha),
            alpha_exact: rat_str(&e.alpha),
            s: rat_f64(&e.s),
            s_exact: rat_str(&e.s),
            r: rat_f64(&e.r),
            r_exact: rat_str(&e.r),
            q: e.q.as_ref().map(rat_f64),
            q_exact: e.q.as_ref().map(rat_str),
            kappa_log: e.kappa_log,
            c_log: e.c_log,
            d_log: e.d_log,
        })
        .collect();
    let summary = ParamSummary {
        gamma,
        k: spec.k,
        m_plus_over_4pi: rat_f64(&masses.m_plus_norm),
        m_minus_over_4pi: rat_f64(&masses.m_minus_norm),
        m_k_over_4pi: rat_f64(&masses.m_k_norm),
        lambda_over_2pi: rat_f64(&physics.lambda_norm),
        p_bar: rat_f64(&physics.p_bar),
        identity_residual: masses.identity_residual(),
        beta_bar: fam.beta_bar_f64(),
        beta_bar_exact: rat_str(&fam.beta_bar),
        a_k: rat_f64(&fam.a_k),
    };
    ParamsTable { rows, summary }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.17e}")).unwrap_or_default()
}

/// Per-bubble parameter CSV. Header documents normalization-free columns.
pub fn write_params_csv<W: Write>(w: &mut W, table: &ParamsTable) -> Result<()> {
    writeln!(w, "gamma,k,j,alpha,s,r,q,kappa_log,c_log,d_log")?;
    for r in &table.rows {
        writeln!(
            w,
            "{},{},{},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e}",
            r.gamma, r.k, r.j, r.alpha, r.s, r.r, fmt_opt(r.q), r.kappa_log, r.c_log, r.d_log
        )?;
    }
    Ok(())
}

/// Summary CSV: masses over 4 pi, lambda over 2 pi.
pub fn write_summary_csv<W: Write>(w: &mut W, s: &ParamSummary) -> Result<()> {
    writeln!(
        w,
        "gamma,k,m_plus_over_4pi,m_minus_over_4pi,m_k_over_4pi,lambda_over_2pi,p_bar,identity_residual"
    )?;
    writeln!(
        w,
        "{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
        s.gamma,
        s.k,
        s.m_plus_over_4pi,
        s.m_minus_over_4pi,
        s.m_k_over_4pi,
        s.lambda_over_2pi,
        s.p_bar,
        s.identity_residual
    )?;
    Ok(())
}

/// JSON header for a serialized radial field.
#[derive(Debug, Clone, Serialize)]
pub struct FieldHeader {
    pub rho: f64,
    pub gamma: String,
    pub k: usize,
    pub mode: u32,
    pub kind: crate::geometry::FieldKind,
    pub alpha: Vec<f64>,
    pub delta_log: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FieldDocument {
    pub header: FieldHeader,
    pub log_r: Vec<f64>,
    pub values: Vec<f64>,
}

impl FieldDocument {
    pub fn new(field: &RadialField, ansatz: &crate::geometry::Ansatz) -> Self {
        FieldDocument {
            header: FieldHeader {
                rho: ansatz.rho,
                gamma: format!("{}", ansatz.family.gamma),
                k: ansatz.k(),
                mode: field.mode,
                kind: field.kind,
                alpha: ansatz.bubbles.iter().map(|b| b.alpha).collect(),
                delta_log: ansatz.bubbles.iter().map(|b| b.delta_log).collect(),
            },
            log_r: field.grid.t.clone(),
            values: field.values.clone(),
        }
    }
}

/// Decay-series CSV row set: (rho, component, p, norm), plot-ready.
pub fn write_decay_csv<W: Write>(w: &mut W, rows: &[(f64, String, f64, f64)]) -> Result<()> {
    writeln!(w, "rho,component,p,norm")?;
    for (rho, comp, p, norm) in rows {
        writeln!(w, "{rho:.17e},{comp},{p},{norm:.17e}")?;
    }
    Ok(())
}

/// Linear probe series CSV.
pub fn write_probe_csv<W: Write>(w: &mut W, rows: &[crate::linear::LinearProbePoint]) -> Result<()> {
    writeln!(w, "rho,abs_ln_rho,mode,smallest_singular_value,inv_norm_estimate")?;
    for r in rows {
        writeln!(
            w,
            "{:.17e},{:.17e},{},{:.17e},{:.17e}",
            r.rho, r.abs_ln_rho, r.mode, r.smallest_eigenvalue, r.inv_norm_estimate
        )?;
    }
    Ok(())
}
