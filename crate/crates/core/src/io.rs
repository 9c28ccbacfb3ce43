//! Text field dumps and trajectory checkpoints.
//!
//! A field dump is one header line
//!
//!   nx ny x0 x1 y0 y1 bc
//!
//! followed by the node values in row-major (y-outer) order, one grid row
//! per line; vector fields store the x-component block then the y-component
//! block. Values are written with 17 significant digits so every f64
//! round-trips exactly. A checkpoint is a one-line header
//! `step_index t q cfg_hash [s]` followed by a velocity dump and a pressure
//! dump.

use crate::error::{Result, SolverError};
use crate::fields::{Bc, Disc, Grid, ScalarField, VectorField};
use crate::psav::FlowState;
use std::io::{BufRead, Write};

fn bc_token(bc: Bc) -> &'static str {
    match bc {
        Bc::Periodic => "periodic",
        Bc::DirichletHomogeneous => "dirichlet",
    }
}

fn parse_bc(token: &str) -> Result<Bc> {
    match token {
        "periodic" => Ok(Bc::Periodic),
        "dirichlet" => Ok(Bc::DirichletHomogeneous),
        other => Err(SolverError::Parse(format!("unknown bc token '{other}'"))),
    }
}

/// Natural discretization for a boundary kind (spectral on periodic grids).
pub fn default_disc(bc: Bc) -> Disc {
    match bc {
        Bc::Periodic => Disc::Spectral,
        Bc::DirichletHomogeneous => Disc::FiniteDifference,
    }
}

fn write_header(w: &mut impl Write, grid: &Grid) -> Result<()> {
    writeln!(
        w,
        "{} {} {:.16e} {:.16e} {:.16e} {:.16e} {}",
        grid.nx,
        grid.ny,
        grid.x0,
        grid.x1,
        grid.y0,
        grid.y1,
        bc_token(grid.bc)
    )?;
    Ok(())
}

fn read_header(line: &str, disc: Option<Disc>) -> Result<Grid> {
    let tok: Vec<&str> = line.split_whitespace().collect();
    if tok.len() != 7 {
        return Err(SolverError::Parse(format!(
            "field header needs 7 tokens, got {}",
            tok.len()
        )));
    }
    let nx: usize = tok[0]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad nx: {e}")))?;
    let ny: usize = tok[1]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad ny: {e}")))?;
    let mut ext = [0.0f64; 4];
    for (slot, t) in ext.iter_mut().zip(&tok[2..6]) {
        *slot = t
            .parse()
            .map_err(|e| SolverError::Parse(format!("bad extent: {e}")))?;
    }
    let bc = parse_bc(tok[6])?;
    Grid::new(
        nx,
        ny,
        (ext[0], ext[1], ext[2], ext[3]),
        bc,
        disc.unwrap_or(default_disc(bc)),
    )
}

fn write_block(w: &mut impl Write, grid: &Grid, data: &[f64]) -> Result<()> {
    for j in 0..grid.ny {
        let mut line = String::with_capacity(grid.nx * 24);
        for i in 0..grid.nx {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{:.16e}", data[grid.idx(i, j)]));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

fn read_block(lines: &mut impl Iterator<Item = std::io::Result<String>>, grid: &Grid) -> Result<Vec<f64>> {
    let mut data = vec![0.0; grid.len()];
    for j in 0..grid.ny {
        let line = lines
            .next()
            .ok_or_else(|| SolverError::Parse("truncated field block".into()))??;
        let mut count = 0;
        for (i, tok) in line.split_whitespace().enumerate() {
            if i >= grid.nx {
                return Err(SolverError::Parse(format!("row {j} too long")));
            }
            data[grid.idx(i, j)] = tok
                .parse()
                .map_err(|e| SolverError::Parse(format!("bad value: {e}")))?;
            count += 1;
        }
        if count != grid.nx {
            return Err(SolverError::Parse(format!(
                "row {j}: expected {} values, got {count}",
                grid.nx
            )));
        }
    }
    Ok(data)
}

pub fn write_scalar_field(w: &mut impl Write, f: &ScalarField) -> Result<()> {
    write_header(w, &f.grid)?;
    write_block(w, &f.grid, &f.data)
}

pub fn read_scalar_field(r: impl BufRead, disc: Option<Disc>) -> Result<ScalarField> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SolverError::Parse("empty field file".into()))??;
    let grid = read_header(&header, disc)?;
    let data = read_block(&mut lines, &grid)?;
    Ok(ScalarField { grid, data })
}

pub fn write_vector_field(w: &mut impl Write, f: &VectorField) -> Result<()> {
    write_header(w, &f.grid)?;
    write_block(w, &f.grid, &f.x)?;
    write_block(w, &f.grid, &f.y)
}

pub fn read_vector_field(r: impl BufRead, disc: Option<Disc>) -> Result<VectorField> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SolverError::Parse("empty field file".into()))??;
    let grid = read_header(&header, disc)?;
    let x = read_block(&mut lines, &grid)?;
    let y = read_block(&mut lines, &grid)?;
    Ok(VectorField { grid, x, y })
}

/// FNV-1a hash of a canonical configuration string.
pub fn config_hash(text: &str) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

pub fn write_checkpoint(
    w: &mut impl Write,
    state: &FlowState,
    cfg_hash: u64,
    sr_iterations: Option<usize>,
) -> Result<()> {
    match sr_iterations {
        Some(s) => writeln!(
            w,
            "{} {:.16e} {:.16e} {cfg_hash} {s}",
            state.step_index, state.t, state.q
        )?,
        None => writeln!(
            w,
            "{} {:.16e} {:.16e} {cfg_hash}",
            state.step_index, state.t, state.q
        )?,
    }
    write_vector_field(w, &state.u)?;
    write_scalar_field(w, &state.p)
}

pub fn read_checkpoint(
    r: impl BufRead,
    disc: Option<Disc>,
) -> Result<(FlowState, u64, Option<usize>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SolverError::Parse("empty checkpoint".into()))??;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 4 && tok.len() != 5 {
        return Err(SolverError::Parse(format!(
            "checkpoint header needs 4 or 5 tokens, got {}",
            tok.len()
        )));
    }
    let step_index: u64 = tok[0]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad step index: {e}")))?;
    let t: f64 = tok[1]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad time: {e}")))?;
    let q: f64 = tok[2]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad q: {e}")))?;
    let cfg_hash: u64 = tok[3]
        .parse()
        .map_err(|e| SolverError::Parse(format!("bad config hash: {e}")))?;
    let sr = match tok.get(4) {
        Some(s) => Some(
            s.parse()
                .map_err(|e| SolverError::Parse(format!("bad iteration count: {e}")))?,
        ),
        None => None,
    };

    // the rest is a velocity dump then a pressure dump; re-buffer the lines
    let mut remaining = String::new();
    for line in lines {
        remaining.push_str(&line?);
        remaining.push('\n');
    }
    let mut cursor = std::io::Cursor::new(remaining.as_bytes());
    let u = read_vector_field(&mut cursor, disc)?;
    let grid = u.grid;
    let consumed = cursor.position() as usize;
    let mut cursor = std::io::Cursor::new(&remaining.as_bytes()[consumed..]);
    let p = read_scalar_field(&mut cursor, Some(grid.disc))?;
    grid.check_same(&p.grid)?;
    Ok((
        FlowState {
            u,
            p,
            q,
            t,
            step_index,
        },
        cfg_hash,
        sr,
    ))
}
