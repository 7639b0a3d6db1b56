//! Binary checkpoints.
//!
//! Layout, all little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 8     | magic `NSDCKPT\0` |
//! | 4     | format version (`u32`) |
//! | 24    | mode counts `N₁ N₂ N₃` (`u64`) |
//! | 24    | box lengths `L₁ L₂ L₃` (`f64`) |
//! | 8     | time `t` (`f64`) |
//! | 8     | step index (`u64`) |
//! | 8     | trajectory hash of the writing config (`u64`) |
//! | 48·N  | coefficients: component-major, `re, im` interleaved (`f64`) |
//! | 16    | initial `‖u⁰‖²`, `‖∂₃u⁰‖²` (`f64`) |
//! | 8     | ledger row count `M` (`u64`) |
//! | M·(16+8·22) | rows: `t` (`f64`), step (`u64`), instantaneous and cumulative columns |
//!
//! Every value is stored with its exact bit pattern, so a read after a write
//! reproduces the state bit for bit.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::config::SolverConfig;
use crate::diagnostics::ledger::{EnergyLedger, LedgerMeta, LedgerRow, N_CUMULATIVE, N_INSTANT};
use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;

const MAGIC: &[u8; 8] = b"NSDCKPT\0";
const VERSION: u32 = 1;

/// Everything needed to continue a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub t: f64,
    pub step: u64,
    pub config_hash: u64,
    pub field: SpectralVectorField,
    pub initial_kinetic: f64,
    pub initial_dz_kinetic: f64,
    pub rows: Vec<LedgerRow>,
}

impl Checkpoint {
    /// Rebuilds the ledger under `cfg`, which supplies damping, viscosity and
    /// time step.
    pub fn ledger(&self, cfg: &SolverConfig) -> Result<EnergyLedger> {
        EnergyLedger::from_parts(
            LedgerMeta {
                damping: cfg.damping,
                viscosity: cfg.viscosity,
                dt: cfg.dt,
                initial_kinetic: self.initial_kinetic,
                initial_dz_kinetic: self.initial_dz_kinetic,
            },
            self.rows.clone(),
        )
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let g = self.field.grid();
        let n = g.len();
        let mut out = Vec::with_capacity(
            100 + 48 * n + self.rows.len() * (16 + 8 * (N_INSTANT + N_CUMULATIVE)),
        );
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        for m in g.modes() {
            out.extend_from_slice(&(m as u64).to_le_bytes());
        }
        for l in g.lengths() {
            out.extend_from_slice(&l.to_le_bytes());
        }
        out.extend_from_slice(&self.t.to_le_bytes());
        out.extend_from_slice(&self.step.to_le_bytes());
        out.extend_from_slice(&self.config_hash.to_le_bytes());
        for c in self.field.components() {
            for z in c {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out.extend_from_slice(&self.initial_kinetic.to_le_bytes());
        out.extend_from_slice(&self.initial_dz_kinetic.to_le_bytes());
        out.extend_from_slice(&(self.rows.len() as u64).to_le_bytes());
        for r in &self.rows {
            out.extend_from_slice(&r.t.to_le_bytes());
            out.extend_from_slice(&r.step.to_le_bytes());
            for v in r.instant.iter().chain(&r.cumulative) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let mut r = Reader {
            bytes,
            pos: 0,
            path,
        };
        if r.take(8)? != MAGIC {
            return Err(r.fail("not a checkpoint (bad magic)"));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(r.fail(&format!("unsupported version {version}")));
        }
        let mut modes = [0usize; 3];
        for m in &mut modes {
            *m = usize::try_from(r.u64()?).map_err(|_| r.fail("mode count overflow"))?;
        }
        let lengths = [r.f64()?, r.f64()?, r.f64()?];
        let grid = Grid::new(modes, lengths).map_err(|e| r.fail(&e.to_string()))?;
        let t = r.f64()?;
        let step = r.u64()?;
        let config_hash = r.u64()?;
        let n = grid.len();
        if bytes.len() < r.pos + 48 * n {
            return Err(r.fail("truncated coefficient block"));
        }
        let coeffs: [Vec<Complex64>; 3] = std::array::from_fn(|_| {
            (0..n)
                .map(|_| {
                    let re = r.f64().expect("length checked");
                    let im = r.f64().expect("length checked");
                    Complex64::new(re, im)
                })
                .collect()
        });
        let field = SpectralVectorField::new(grid, coeffs)?;
        let initial_kinetic = r.f64()?;
        let initial_dz_kinetic = r.f64()?;
        let count = r.u64()?;
        let row_bytes = 16 + 8 * (N_INSTANT + N_CUMULATIVE) as u64;
        if (bytes.len() - r.pos) as u64 != count.saturating_mul(row_bytes) {
            return Err(r.fail("ledger trailer length does not match its row count"));
        }
        let mut rows = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let t = r.f64()?;
            let step = r.u64()?;
            let mut instant = [0.0; N_INSTANT];
            let mut cumulative = [0.0; N_CUMULATIVE];
            for v in instant.iter_mut().chain(cumulative.iter_mut()) {
                *v = r.f64()?;
            }
            rows.push(LedgerRow {
                t,
                step,
                instant,
                cumulative,
            });
        }
        if rows.last().map(|row| row.step) != Some(step) {
            return Err(r.fail("last ledger row does not match the checkpoint step"));
        }
        Ok(Self {
            t,
            step,
            config_hash,
            field,
            initial_kinetic,
            initial_dz_kinetic,
            rows,
        })
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn write(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes, path)
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Reader<'_> {
    fn fail(&self, reason: &str) -> Error {
        Error::Format {
            path: self.path.to_path_buf(),
            reason: format!("{reason} (at byte {})", self.pos),
        }
    }

    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(self.fail("unexpected end of file"));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(
            self.take(8)?.try_into().expect("8 bytes"),
        ))
    }
}
