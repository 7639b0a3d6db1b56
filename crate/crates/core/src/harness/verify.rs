//! Property and oracle suites behind `nsdamp verify`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::{EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use crate::config::Dealias;
use crate::config::InitialCondition;
use crate::diagnostics::monotonicity_check;
use crate::dynamics::{make_initial_condition, nonlinear_term};
use crate::error::{Error, Result};
use crate::field::{
    forward_transform, inverse_transform, PhysicalVectorField, SpectralVectorField,
};
use crate::grid::Grid;
use crate::norms::{h01_norm, lebesgue_norm, mixed_norm, product_law_ratio, sobolev_norm};
use crate::operators::{
    derivative, friedrichs_cutoff, gradient, horizontal_laplacian, leray_project,
};
use crate::oracle::{convolution_nonlinear, naive_dft, OracleBudget};
use crate::random::{random_field, random_scalar, substream, Band};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Norms,
    Projectors,
    Monotonicity,
    Oracle,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norms" => Ok(Suite::Norms),
            "projectors" => Ok(Suite::Projectors),
            "monotonicity" => Ok(Suite::Monotonicity),
            "oracle" => Ok(Suite::Oracle),
            "all" => Ok(Suite::All),
            other => Err(Error::Config(format!(
                "unknown suite {other:?} (expected norms, projectors, monotonicity, oracle or all)"
            ))),
        }
    }
}

/// One measured quantity and its threshold; passes when `value <= threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyLine {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub threshold: f64,
}

impl VerifyLine {
    fn new(suite: &'static str, name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            value,
            threshold,
        }
    }

    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }

    /// `value / threshold`; larger is worse.
    pub fn severity(&self) -> f64 {
        if self.value.is_nan() {
            f64::INFINITY
        } else if self.threshold > 0.0 {
            self.value / self.threshold
        } else if self.value > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }
}

impl fmt::Display for VerifyLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<13} {:<44} {:>11.3e} <= {:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.threshold
        )
    }
}

fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
    let s = a.max_abs().max(b.max_abs());
    if s == 0.0 {
        0.0
    } else {
        a.sub(b).max_abs() / s
    }
}

fn random_div_free(grid: &Grid, rng: &mut impl rand::Rng) -> SpectralVectorField {
    leray_project(&random_field(grid, Band::TwoThirds, rng)).symmetrized()
}

/// Leray, gradient and cutoff identities on `fields` random fields.
pub fn projector_lines(grid: &Grid, fields: usize, seed: u64) -> Vec<VerifyLine> {
    const S: &str = "projectors";
    let mut rng = substream(seed, "verify/projectors");
    let radius = {
        let mut r: Vec<f64> = (0..grid.len())
            .map(|i| {
                let x = grid.wavevector(i);
                (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
            })
            .collect();
        r.sort_by(f64::total_cmp);
        r[r.len() / 2]
    };
    let mut idem: f64 = 0.0;
    let mut div: f64 = 0.0;
    let mut grad: f64 = 0.0;
    let mut cut_idem: f64 = 0.0;
    let mut commute: f64 = 0.0;
    let mut contraction: f64 = 0.0;
    for _ in 0..fields {
        let f = random_field(grid, Band::Full, &mut rng).symmetrized();
        let p = leray_project(&f);
        idem = idem.max(rel(&leray_project(&p), &p));
        div = div.max(p.divergence_residual() / p.max_abs());
        contraction = contraction.max((p.l2_norm() - f.l2_norm()).max(0.0) / f.l2_norm());
        let phi = random_scalar(grid, Band::Full, 0.0, &mut rng);
        let g = gradient(grid, &phi);
        grad = grad.max(leray_project(&g).l2_norm() / g.l2_norm());
        let c = friedrichs_cutoff(&f, radius);
        cut_idem = cut_idem.max(rel(&friedrichs_cutoff(&c, radius), &c));
        commute = commute
            .max(rel(&friedrichs_cutoff(&p, radius), &leray_project(&c)))
            .max(rel(
                &friedrichs_cutoff(&derivative(&f, 2), radius),
                &derivative(&c, 2),
            ))
            .max(rel(
                &friedrichs_cutoff(&horizontal_laplacian(&f), radius),
                &horizontal_laplacian(&c),
            ));
    }
    vec![
        VerifyLine::new(
            S,
            format!("leray idempotence ({fields} fields)"),
            idem,
            tolerance::EXACT,
        ),
        VerifyLine::new(S, "leray divergence residual", div, tolerance::EXACT),
        VerifyLine::new(
            S,
            "leray L2 contraction excess",
            contraction,
            tolerance::EXACT,
        ),
        VerifyLine::new(S, "leray of gradient / |gradient|", grad, tolerance::EXACT),
        VerifyLine::new(S, "cutoff idempotence", cut_idem, tolerance::EXACT),
        VerifyLine::new(
            S,
            "cutoff commutes with multipliers",
            commute,
            tolerance::EXACT,
        ),
    ]
}

/// Homogeneity, Parseval, Fubini and triangle identities of the norms, and
/// the homogeneity of the product-law ratio.
pub fn norm_lines(grid: &Grid, trials: usize, seed: u64) -> Result<Vec<VerifyLine>> {
    const S: &str = "norms";
    let mut rng = substream(seed, "verify/norms");
    let mut homog: f64 = 0.0;
    let mut parseval: f64 = 0.0;
    let mut fubini: f64 = 0.0;
    let mut triangle: f64 = 0.0;
    let mut product: f64 = 0.0;
    for _ in 0..trials {
        let a = random_field(grid, Band::TwoThirds, &mut rng).symmetrized();
        let b = random_field(grid, Band::TwoThirds, &mut rng).symmetrized();
        let ap = inverse_transform(&a)?;
        let bp = inverse_transform(&b)?;
        let lam = -2.75;
        let scaled = ap.scaled(lam);
        for p in [1.0, 2.0, 3.0, 4.5, f64::INFINITY] {
            let n = lebesgue_norm(&ap, p)?;
            homog = homog.max((lebesgue_norm(&scaled, p)? - lam.abs() * n).abs() / (lam.abs() * n));
            fubini = fubini.max((mixed_norm(&ap, p, p)? - n).abs() / n);
        }
        for s in [-0.5, 0.5, 1.0] {
            let n = sobolev_norm(&a, s, true)?;
            homog = homog.max(
                (sobolev_norm(&a.scaled(lam), s, true)? - lam.abs() * n).abs() / (lam.abs() * n),
            );
        }
        let h = h01_norm(&a);
        homog = homog.max((h01_norm(&a.scaled(lam)) - lam.abs() * h).abs() / (lam.abs() * h));
        parseval = parseval
            .max((sobolev_norm(&a, 0.0, true)? - lebesgue_norm(&ap, 2.0)?).abs() / a.l2_norm());
        let sum = PhysicalVectorField::new(
            grid.clone(),
            std::array::from_fn(|c| {
                ap.component(c)
                    .iter()
                    .zip(bp.component(c))
                    .map(|(x, y)| x + y)
                    .collect()
            }),
        )?;
        for p in [1.0, 2.0, 4.0] {
            let excess = lebesgue_norm(&sum, p)? - lebesgue_norm(&ap, p)? - lebesgue_norm(&bp, p)?;
            triangle = triangle.max(excess / lebesgue_norm(&sum, p)?);
        }
        let f = random_scalar(grid, Band::Half, 0.0, &mut rng);
        let g = random_scalar(grid, Band::Half, 0.0, &mut rng);
        let r = product_law_ratio(grid, &f, &g, 0.5, 0.5);
        let f2: Vec<Complex64> = f.iter().map(|v| v * 2.0).collect();
        product = product.max((product_law_ratio(grid, &f2, &g, 0.5, 0.5) - r).abs() / r);
    }
    Ok(vec![
        VerifyLine::new(S, "absolute homogeneity", homog, tolerance::EXACT),
        VerifyLine::new(S, "Parseval (H^0 vs L^2)", parseval, tolerance::EXACT),
        VerifyLine::new(S, "mixed(p,p) vs L^p", fubini, 1e-12),
        VerifyLine::new(S, "triangle inequality excess", triangle.max(0.0), 1e-12),
        VerifyLine::new(
            S,
            "product-law ratio homogeneity",
            product,
            tolerance::EXACT,
        ),
    ])
}

/// Minimum normalised pairing over `pairs` samples per dimension, reported
/// as `max(0, -min)`.
pub fn monotonicity_lines(pairs: usize, seed: u64) -> Result<Vec<VerifyLine>> {
    (1..=3)
        .map(|d| {
            let r = monotonicity_check(d, pairs, seed)?;
            Ok(VerifyLine::new(
                "monotonicity",
                format!("d={d}: -min <a(x)x-a(y)y,x-y>/max|.|^4 ({pairs} pairs)"),
                (-r.min_normalized).max(0.0),
                1e-12,
            ))
        })
        .collect()
}

/// Fast transforms and the pseudo-spectral nonlinear term against the
/// brute-force oracles.
pub fn oracle_lines(random_fields: usize, seed: u64) -> Result<Vec<VerifyLine>> {
    const S: &str = "oracle";
    let grid = Grid::cubic(8)?;
    let budget = OracleBudget::default();
    let mut rng = substream(seed, "verify/oracle");

    let mut dft: f64 = 0.0;
    for _ in 0..4 {
        let f = inverse_transform(&random_field(&grid, Band::Full, &mut rng).symmetrized())?;
        dft = dft.max(rel(&forward_transform(&f), &naive_dft(&f, &budget)?));
    }

    let tg = make_initial_condition(
        &InitialCondition::TaylorGreen {
            amplitude: 1.0,
            perturbation: 0.0,
        },
        &grid,
        0,
    )?;
    let mut fields = vec![tg];
    for _ in 0..random_fields {
        fields.push(random_div_free(&grid, &mut rng));
    }
    let mut conv: f64 = 0.0;
    let mut neutral: f64 = 0.0;
    for u in &fields {
        let fast = nonlinear_term(u, Dealias::TwoThirds);
        let exact = convolution_nonlinear(u, &budget)?;
        let scale = fast.max_abs();
        for idx in 0..grid.len() {
            if !grid.dealias_keeps(grid.position(idx)) {
                continue;
            }
            let e = exact.get(grid.signed_mode(idx));
            for c in 0..3 {
                conv = conv.max((fast.component(c)[idx] - e[c]).norm() / scale);
            }
        }
        neutral = neutral.max(fast.inner(u).abs() / (fast.l2_norm() * u.l2_norm()));
    }
    Ok(vec![
        VerifyLine::new(S, "forward transform vs naive DFT (8^3)", dft, 1e-12),
        VerifyLine::new(
            S,
            format!("nonlinear term vs convolution ({} fields)", fields.len()),
            conv,
            1e-12,
        ),
        VerifyLine::new(
            S,
            "energy neutrality <u.grad u, u>/(|N||u|)",
            neutral,
            1e-11,
        ),
    ])
}

/// Runs one suite (or all) and returns its lines sorted worst-first.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<VerifyLine>> {
    let grid16 = Grid::cubic(16)?;
    let mut lines = Vec::new();
    if matches!(suite, Suite::Norms | Suite::All) {
        lines.extend(norm_lines(&grid16, 20, seed)?);
    }
    if matches!(suite, Suite::Projectors | Suite::All) {
        lines.extend(projector_lines(&grid16, 1000, seed));
    }
    if matches!(suite, Suite::Monotonicity | Suite::All) {
        lines.extend(monotonicity_lines(1_000_000, seed)?);
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        lines.extend(oracle_lines(20, seed)?);
    }
    lines.sort_by(|a, b| b.severity().total_cmp(&a.severity()));
    Ok(lines)
}

pub fn cmd_verify(suite: &str, seed: Option<u64>) -> i32 {
    let suite = match suite.parse::<Suite>() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match run_suite(suite, seed.unwrap_or(0)) {
        Ok(lines) => {
            for l in &lines {
                println!("{l}");
            }
            if lines.iter().all(VerifyLine::passed) {
                EXIT_OK
            } else {
                EXIT_NUMERICAL
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            super::exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_a_usage_error() {
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!(cmd_verify("bogus", None), EXIT_USAGE);
    }

    #[test]
    fn small_suites_pass() {
        let g = Grid::cubic(8).unwrap();
        for l in projector_lines(&g, 10, 1)
            .into_iter()
            .chain(norm_lines(&g, 3, 1).unwrap())
            .chain(monotonicity_lines(1000, 1).unwrap())
            .chain(oracle_lines(2, 1).unwrap())
        {
            assert!(l.passed(), "{l}");
        }
    }

    #[test]
    fn worst_first_ordering() {
        let a = VerifyLine::new("x", "a", 1.0, 10.0);
        let b = VerifyLine::new("x", "b", 5.0, 1.0);
        let mut v = [a, b];
        v.sort_by(|a, b| b.severity().total_cmp(&a.severity()));
        assert_eq!(v[0].name, "b");
    }
}
