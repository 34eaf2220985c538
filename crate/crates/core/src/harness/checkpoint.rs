//! Binary checkpoints.
//!
//! Layout, all little-endian: magic `MHD2`, format `u32 = 1`, `n1 u32`,
//! `n2 u32`, `mu f64`, `lambda f64`, `gamma f64`, `time f64`, then the five
//! coefficient arrays `(ρ, u₁, u₂, b₁, b₂)` as interleaved `(re, im)` pairs in
//! storage order. The linear pressure law is stored as `gamma = 1`, which
//! has the same dynamics.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::{PhysParams, PressureLaw, State};
use crate::spectral::{Grid, ScalarField, VectorField};

pub const MAGIC: &[u8; 4] = b"MHD2";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 3 * 4 + 4 * 8;

pub fn encode_checkpoint(state: &State, params: &PhysParams) -> Vec<u8> {
    let g = state.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 5 * 16 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(g.n1() as u32).to_le_bytes());
    out.extend_from_slice(&(g.n2() as u32).to_le_bytes());
    out.extend_from_slice(&params.mu.to_le_bytes());
    out.extend_from_slice(&params.lambda.to_le_bytes());
    out.extend_from_slice(&params.pressure.exponent().to_le_bytes());
    out.extend_from_slice(&state.time.to_le_bytes());
    for f in state.fields() {
        for c in f.coeffs() {
            out.extend_from_slice(&c.re.to_le_bytes());
            out.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    out
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

fn f64_at(b: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(b[at..at + 8].try_into().unwrap())
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<(State, PhysParams)> {
    if bytes.len() < 8 {
        return Err(Error::Checkpoint(format!("file too short ({} bytes)", bytes.len())));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::Checkpoint("truncated header".into()));
    }
    let (n1, n2) = (u32_at(bytes, 8) as usize, u32_at(bytes, 12) as usize);
    let grid = Grid::new(n1, n2).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let expected = HEADER_LEN + 5 * 16 * grid.len();
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "length {} does not match {n1}x{n2} grid ({expected} bytes)",
            bytes.len()
        )));
    }
    let gamma = f64_at(bytes, 32);
    let pressure = if gamma == 1.0 {
        PressureLaw::Linear
    } else {
        PressureLaw::gamma(gamma).map_err(|e| Error::Checkpoint(e.to_string()))?
    };
    let params = PhysParams::new(f64_at(bytes, 16), f64_at(bytes, 24), pressure)
        .map_err(|e| Error::Checkpoint(e.to_string()))?;
    let time = f64_at(bytes, 40);

    let mut fields = Vec::with_capacity(5);
    let mut at = HEADER_LEN;
    for _ in 0..5 {
        let coeffs: Vec<Complex64> = (0..grid.len())
            .map(|i| Complex64::new(f64_at(bytes, at + 16 * i), f64_at(bytes, at + 16 * i + 8)))
            .collect();
        at += 16 * grid.len();
        fields.push(ScalarField::from_coeffs(&grid, coeffs)?);
    }
    let mut it = fields.into_iter();
    let mut next = || it.next().unwrap();
    let rho = next();
    let u = VectorField::new(next(), next())?;
    let b = VectorField::new(next(), next())?;
    Ok((State::new(rho, u, b, time)?, params))
}

pub fn save_checkpoint(state: &State, params: &PhysParams, path: &Path) -> Result<()> {
    // Write to a sibling file first so a crash never leaves a partial checkpoint.
    let tmp = path.with_extension("partial");
    fs::write(&tmp, encode_checkpoint(state, params))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(State, PhysParams)> {
    decode_checkpoint(&fs::read(path)?)
}

/// Load and require the checkpoint to live on `grid`.
pub fn load_checkpoint_on(path: &Path, grid: &Grid) -> Result<(State, PhysParams)> {
    let (s, p) = load_checkpoint(path)?;
    if !s.grid().same_as(grid) {
        return Err(Error::Checkpoint(format!(
            "checkpoint grid {}x{} does not match {}x{}",
            s.grid().n1(),
            s.grid().n2(),
            grid.n1(),
            grid.n2()
        )));
    }
    Ok((s, p))
}
