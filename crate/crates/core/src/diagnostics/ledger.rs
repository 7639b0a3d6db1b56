//! Energy ledger: every term of the a-priori inequalities, sampled along a
//! trajectory, with time integrals accumulated by the trapezoid rule.

use std::f64::consts::E;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::config::SolverConfig;
use crate::damping::DampingSpec;
use crate::error::{Error, Result};
use crate::field::{inverse_many, SpectralVectorField};
use crate::operators::{derivative, horizontal_wavenumber_sq};

pub const N_INSTANT: usize = 11;
pub const N_CUMULATIVE: usize = 11;

/// Instantaneous functionals, in CSV column order.
pub mod instant {
    pub const KINETIC: usize = 0;
    pub const DZ_KINETIC: usize = 1;
    pub const GRAD_H_U: usize = 2;
    pub const GRAD_H_DZ_U: usize = 3;
    pub const DAMPING: usize = 4;
    pub const FRAC_DZ_U2_SQ: usize = 5;
    pub const LOG_DZ_U2_SQ: usize = 6;
    pub const LOG_U2_DZ_U_SQ: usize = 7;
    pub const U_BM3_DZ_U2_SQ: usize = 8;
    pub const U_BM1_DZ_U2: usize = 9;
    pub const U2_DZ_U2: usize = 10;
}

/// Cumulative integrals, in CSV column order.
pub mod cumulative {
    pub const HORIZ_DISSIPATION: usize = 0;
    pub const DAMPING_DISSIPATION: usize = 1;
    pub const DZ_DISSIPATION: usize = 2;
    pub const LOG_FRAC: usize = 3;
    pub const LOG_DZ: usize = 4;
    pub const LOG_U2_DZ: usize = 5;
    pub const POW_DZ_SQ: usize = 6;
    pub const POW_DZ: usize = 7;
    pub const CAND_SIXTEEN_U2: usize = 8;
    pub const CAND_SIXTEEN_BETA: usize = 9;
    pub const CAND_EIGHT_U2: usize = 10;
}

pub const INSTANT_NAMES: [&str; N_INSTANT] = [
    "kinetic_L2sq",
    "dz_kinetic_L2sq",
    "grad_h_u_L2sq",
    "grad_h_dz_u_L2sq",
    "damping_density_L1",
    "frac_u2_dz_u2_sq_L1",
    "log_dz_u2_sq_L1",
    "log_u2_dz_u_sq_L1",
    "u_beta_minus_3_dz_u2_sq_L1",
    "u_beta_minus_1_dz_u2_L1",
    "u2_dz_u2_L1",
];

pub const CUMULATIVE_NAMES: [&str; N_CUMULATIVE] = [
    "two_nu_int_grad_h_u_L2sq",
    "two_alpha_int_damping_L1",
    "two_nu_int_grad_h_dz_u_L2sq",
    "alpha_int_frac_u2_dz_u2_sq_L1",
    "alpha_int_log_dz_u2_sq_L1",
    "alpha_int_log_u2_dz_u_sq_L1",
    "alpha_beta_minus_1_int_u_beta_minus_3_dz_u2_sq_L1",
    "two_alpha_int_u_beta_minus_1_dz_u2_L1",
    "sixteen_int_u2_dz_u2_L1",
    "sixteen_int_u_beta_minus_1_dz_u2_L1",
    "eight_int_u2_dz_u2_L1",
];

/// Integrand feeding each cumulative column.
const SOURCES: [usize; N_CUMULATIVE] = [
    instant::GRAD_H_U,
    instant::DAMPING,
    instant::GRAD_H_DZ_U,
    instant::FRAC_DZ_U2_SQ,
    instant::LOG_DZ_U2_SQ,
    instant::LOG_U2_DZ_U_SQ,
    instant::U_BM3_DZ_U2_SQ,
    instant::U_BM1_DZ_U2,
    instant::U2_DZ_U2,
    instant::U_BM1_DZ_U2,
    instant::U2_DZ_U2,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LedgerMeta {
    pub damping: DampingSpec,
    pub viscosity: f64,
    pub dt: f64,
    pub initial_kinetic: f64,
    pub initial_dz_kinetic: f64,
}

impl LedgerMeta {
    fn weights(&self) -> [f64; N_CUMULATIVE] {
        let nu = self.viscosity;
        let alpha = self.damping.alpha();
        let (log_a, pow_a, beta) = match self.damping {
            DampingSpec::Logarithmic { alpha } => (alpha, 0.0, 3.0),
            DampingSpec::PowerLaw { alpha, beta, .. } => (0.0, alpha, beta),
            DampingSpec::None => (0.0, 0.0, 3.0),
        };
        [
            2.0 * nu,
            2.0 * alpha,
            2.0 * nu,
            log_a,
            log_a,
            log_a,
            pow_a * (beta - 1.0),
            2.0 * pow_a,
            16.0,
            16.0,
            8.0,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerRow {
    pub t: f64,
    pub step: u64,
    pub instant: [f64; N_INSTANT],
    pub cumulative: [f64; N_CUMULATIVE],
}

impl LedgerRow {
    pub fn kinetic(&self) -> f64 {
        self.instant[instant::KINETIC]
    }

    pub fn dz_kinetic(&self) -> f64 {
        self.instant[instant::DZ_KINETIC]
    }
}

/// Evaluates every instantaneous functional of `u`.
pub fn evaluate_integrands(u: &SpectralVectorField, damping: &DampingSpec) -> [f64; N_INSTANT] {
    let g = u.grid();
    let mut out = [0.0; N_INSTANT];
    let dz_hat = derivative(u, 2);
    out[instant::KINETIC] = u.l2_norm_squared();
    out[instant::DZ_KINETIC] = dz_hat.l2_norm_squared();
    let mut gh = 0.0;
    let mut ghz = 0.0;
    for idx in 0..g.len() {
        let kh2 = horizontal_wavenumber_sq(g, idx);
        if kh2 == 0.0 {
            continue;
        }
        let m: f64 = (0..3).map(|c| u.component(c)[idx].norm_sqr()).sum();
        let mz: f64 = (0..3).map(|c| dz_hat.component(c)[idx].norm_sqr()).sum();
        gh += kh2 * m;
        ghz += kh2 * mz;
    }
    out[instant::GRAD_H_U] = gh;
    out[instant::GRAD_H_DZ_U] = ghz;

    let sets: Vec<&[Complex64]> = (0..3)
        .map(|c| u.component(c))
        .chain((0..3).map(|c| dz_hat.component(c)))
        .collect();
    let phys = inverse_many(g, &sets);
    let beta = damping.beta();
    let mut acc = [0.0; N_INSTANT];
    for idx in 0..g.len() {
        let v = [phys[0][idx], phys[1][idx], phys[2][idx]];
        let w = [phys[3][idx], phys[4][idx], phys[5][idx]];
        let s = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let dz_s = 2.0 * (v[0] * w[0] + v[1] * w[1] + v[2] * w[2]);
        let dz_u_sq = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
        let log = (E + s).ln();
        acc[instant::DAMPING] += damping.dissipation_density(s);
        acc[instant::FRAC_DZ_U2_SQ] += s / (E + s) * dz_s * dz_s;
        acc[instant::LOG_DZ_U2_SQ] += log * dz_s * dz_s;
        acc[instant::LOG_U2_DZ_U_SQ] += log * s * dz_u_sq;
        acc[instant::U_BM3_DZ_U2_SQ] += s.powf(0.5 * (beta - 3.0)) * dz_s * dz_s;
        acc[instant::U_BM1_DZ_U2] += s.powf(0.5 * (beta - 1.0)) * dz_s.abs();
        acc[instant::U2_DZ_U2] += s * dz_s.abs();
    }
    let dv = g.cell_volume();
    for k in instant::DAMPING..N_INSTANT {
        out[k] = acc[k] * dv;
    }
    out
}

/// Append-only time series; rows strictly increase in `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    meta: LedgerMeta,
    rows: Vec<LedgerRow>,
}

impl EnergyLedger {
    /// Starts a ledger whose first row is the initial state at `t`.
    pub fn start(
        t: f64,
        step: u64,
        u0: &SpectralVectorField,
        damping: DampingSpec,
        viscosity: f64,
        dt: f64,
    ) -> Self {
        let inst = evaluate_integrands(u0, &damping);
        Self {
            meta: LedgerMeta {
                damping,
                viscosity,
                dt,
                initial_kinetic: inst[instant::KINETIC],
                initial_dz_kinetic: inst[instant::DZ_KINETIC],
            },
            rows: vec![LedgerRow {
                t,
                step,
                instant: inst,
                cumulative: [0.0; N_CUMULATIVE],
            }],
        }
    }

    /// Rebuilds a ledger from stored rows (e.g. a checkpoint trailer or CSV).
    pub fn from_parts(meta: LedgerMeta, rows: Vec<LedgerRow>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter(
                "ledger needs at least one row".into(),
            ));
        }
        for w in rows.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::NonMonotoneTime {
                    prev: w[0].t,
                    next: w[1].t,
                });
            }
        }
        Ok(Self { meta, rows })
    }

    pub fn meta(&self) -> &LedgerMeta {
        &self.meta
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn last(&self) -> &LedgerRow {
        self.rows.last().expect("ledger is never empty")
    }

    /// Appends integrand values sampled at `t`, extending every cumulative
    /// integral by one trapezoid panel.
    pub fn append_integrands(
        &mut self,
        t: f64,
        step: u64,
        inst: [f64; N_INSTANT],
    ) -> Result<&LedgerRow> {
        let prev = self.last();
        if !(t > prev.t) {
            return Err(Error::NonMonotoneTime {
                prev: prev.t,
                next: t,
            });
        }
        let h = t - prev.t;
        let weights = self.meta.weights();
        let mut cum = prev.cumulative;
        for k in 0..N_CUMULATIVE {
            let src = SOURCES[k];
            cum[k] += weights[k] * 0.5 * h * (prev.instant[src] + inst[src]);
        }
        self.rows.push(LedgerRow {
            t,
            step,
            instant: inst,
            cumulative: cum,
        });
        Ok(self.last())
    }

    /// Drops rows after `step`.
    pub fn truncate_after(&mut self, step: u64) {
        let keep = self
            .rows
            .iter()
            .take_while(|r| r.step <= step)
            .count()
            .max(1);
        self.rows.truncate(keep);
    }

    pub fn csv_header() -> String {
        let mut s = String::from("t,step");
        for n in INSTANT_NAMES.iter().chain(CUMULATIVE_NAMES.iter()) {
            s.push(',');
            s.push_str(n);
        }
        s
    }

    pub fn csv_row(row: &LedgerRow) -> String {
        let mut s = format!("{},{}", row.t, row.step);
        for v in row.instant.iter().chain(row.cumulative.iter()) {
            write!(s, ",{v}").expect("write to string");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = Self::csv_header();
        s.push('\n');
        for r in &self.rows {
            s.push_str(&Self::csv_row(r));
            s.push('\n');
        }
        s
    }

    /// Parses rows written by [`EnergyLedger::to_csv`]; values round-trip
    /// bit-exactly.
    pub fn rows_from_csv(text: &str) -> Result<Vec<LedgerRow>> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if header != Self::csv_header() {
            return Err(Error::InvalidParameter("ledger CSV header mismatch".into()));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let bad =
                |what: &str| Error::InvalidParameter(format!("ledger CSV line {}: {what}", n + 2));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 2 + N_INSTANT + N_CUMULATIVE {
                return Err(bad("wrong column count"));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            let mut instant = [0.0; N_INSTANT];
            let mut cumulative = [0.0; N_CUMULATIVE];
            for k in 0..N_INSTANT {
                instant[k] = num(fields[2 + k])?;
            }
            for k in 0..N_CUMULATIVE {
                cumulative[k] = num(fields[2 + N_INSTANT + k])?;
            }
            rows.push(LedgerRow {
                t: num(fields[0])?,
                step: fields[1].parse().map_err(|_| bad("bad step"))?,
                instant,
                cumulative,
            });
        }
        Ok(rows)
    }
}

/// Appends the current state of a run to its ledger.
pub fn ledger_append<'a>(
    ledger: &'a mut EnergyLedger,
    u: &SpectralVectorField,
    t: f64,
    step: u64,
    cfg: &SolverConfig,
) -> Result<&'a LedgerRow> {
    let inst = evaluate_integrands(u, &cfg.damping);
    ledger.append_integrands(t, step, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn zero_state_gives_zero_row() {
        let g = Grid::cubic(8).unwrap();
        let z = SpectralVectorField::zeros(&g);
        let mut l =
            EnergyLedger::start(0.0, 0, &z, DampingSpec::logarithmic(1.0).unwrap(), 1.0, 0.1);
        l.append_integrands(0.1, 1, evaluate_integrands(&z, &l.meta.damping))
            .unwrap();
        for r in l.rows() {
            assert!(r
                .instant
                .iter()
                .chain(r.cumulative.iter())
                .all(|&v| v == 0.0));
        }
    }

    #[test]
    fn time_must_increase() {
        let g = Grid::cubic(4).unwrap();
        let z = SpectralVectorField::zeros(&g);
        let mut l = EnergyLedger::start(1.0, 0, &z, DampingSpec::None, 1.0, 0.1);
        assert!(matches!(
            l.append_integrands(1.0, 1, [0.0; N_INSTANT]),
            Err(Error::NonMonotoneTime { .. })
        ));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let g = Grid::cubic(8).unwrap();
        let u = SpectralVectorField::cosine_mode(&g, [1, 0, 2], [0.0, 0.3, 0.0]).unwrap();
        let spec = DampingSpec::power_law(1.5, 3.7).unwrap();
        let mut l = EnergyLedger::start(0.0, 0, &u, spec, 1.0, 0.1);
        l.append_integrands(0.1, 1, evaluate_integrands(&u.scaled(0.9), &spec))
            .unwrap();
        let rows = EnergyLedger::rows_from_csv(&l.to_csv()).unwrap();
        assert_eq!(rows, l.rows);
    }

    #[test]
    fn log_terms_match_pointwise_formulas() {
        // u = (0, 0, a cos x3): |u|² = a² cos², ∂₃|u|² = -a² sin(2x3)
        let g = Grid::new([4, 4, 32], [2.0 * std::f64::consts::PI; 3]).unwrap();
        let a = 0.7;
        let u = SpectralVectorField::cosine_mode(&g, [0, 0, 1], [0.0, 0.0, a]).unwrap();
        let inst = evaluate_integrands(&u, &DampingSpec::logarithmic(1.0).unwrap());
        let n = 4096;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let area = (2.0 * std::f64::consts::PI).powi(2);
        let (mut d, mut l, mut lu) = (0.0, 0.0, 0.0);
        for j in 0..n {
            let x = j as f64 * h;
            let s = a * a * x.cos().powi(2);
            let ds = -a * a * (2.0 * x).sin();
            let dzu2 = (a * x.sin()).powi(2);
            d += (E + s).ln() * s * s * h * area;
            l += (E + s).ln() * ds * ds * h * area;
            lu += (E + s).ln() * s * dzu2 * h * area;
        }
        assert!((inst[instant::DAMPING] - d).abs() < 1e-12 * d);
        assert!((inst[instant::LOG_DZ_U2_SQ] - l).abs() < 1e-12 * l);
        assert!((inst[instant::LOG_U2_DZ_U_SQ] - lu).abs() < 1e-12 * lu);
        assert_eq!(inst[instant::GRAD_H_U], 0.0);
    }
}
