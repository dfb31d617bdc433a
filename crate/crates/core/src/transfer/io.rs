//! Text series files, residue run files, and binary layer checkpoints.

use std::io::{self, BufRead, Write};

use dashu_int::UBig;
use thiserror::Error;

use crate::linkpattern::catalan_u64;
use crate::residues::{crt, ResidueError};

use super::layer::{k_max, Layer, Residue};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("run files disagree on n ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("{0}")]
    Residue(#[from] ResidueError),
}

fn malformed(line: usize, message: impl Into<String>) -> FileError {
    FileError::Malformed {
        line,
        message: message.into(),
    }
}

/// One decimal integer per line; line `i` holds `p_i`.
pub fn write_series(mut w: impl Write, values: &[UBig]) -> io::Result<()> {
    for v in values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

/// Reads a series file; blank lines and `#` comments are skipped.
pub fn read_series(r: impl BufRead) -> Result<Vec<UBig>, FileError> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let s = line.trim();
        if s.is_empty() || s.starts_with('#') {
            continue;
        }
        out.push(
            s.parse()
                .map_err(|_| malformed(i + 1, format!("not an integer: {s:?}")))?,
        );
    }
    Ok(out)
}

/// Residues of `p_1..p_n` modulo a single modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueRun {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl ResidueRun {
    pub fn write(&self, mut w: impl Write) -> io::Result<()> {
        writeln!(w, "modulus {} n {}", self.modulus, self.residues.len())?;
        for r in &self.residues {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }

    pub fn read(r: impl BufRead) -> Result<Self, FileError> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| malformed(1, "missing header"))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (modulus, n) = match fields.as_slice() {
            ["modulus", m, "n", n] => (
                m.parse::<u64>().map_err(|_| malformed(1, "bad modulus"))?,
                n.parse::<usize>().map_err(|_| malformed(1, "bad n"))?,
            ),
            _ => return Err(malformed(1, "expected \"modulus <m> n <n>\"")),
        };
        let mut residues = Vec::with_capacity(n);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let s = line.trim();
            if s.is_empty() {
                continue;
            }
            let v: u64 = s.parse().map_err(|_| malformed(i + 2, "bad residue"))?;
            if v >= modulus {
                return Err(malformed(i + 2, "residue not below modulus"));
            }
            residues.push(v);
        }
        if residues.len() != n {
            return Err(malformed(
                n + 1,
                format!("expected {n} residues, found {}", residues.len()),
            ));
        }
        Ok(ResidueRun { modulus, residues })
    }
}

/// Combines runs for different moduli coefficient by coefficient.
pub fn combine_runs(runs: &[ResidueRun]) -> Result<Vec<UBig>, FileError> {
    let n = runs.first().map_or(0, |r| r.residues.len());
    for r in runs {
        if r.residues.len() != n {
            return Err(FileError::LengthMismatch(n, r.residues.len()));
        }
    }
    let moduli: Vec<u64> = runs.iter().map(|r| r.modulus).collect();
    (0..n)
        .map(|t| {
            let residues: Vec<u64> = runs.iter().map(|r| r.residues[t]).collect();
            Ok(crt(&residues, &moduli)?)
        })
        .collect()
}

/// Writes a layer: a text header per section followed by little-endian
/// residues, `lanes` per state in rank order.
pub fn write_checkpoint<R: Residue>(layer: &Layer<R>, mut w: impl Write) -> io::Result<()> {
    let moduli: Vec<String> = layer.moduli().iter().map(u64::to_string).collect();
    writeln!(
        w,
        "layer t {} n {} moduli {} width {}",
        layer.t(),
        layer.n(),
        moduli.join(","),
        R::BYTES
    )?;
    for k in 0..=layer.k_max() {
        writeln!(w, "sector k {} count {}", k, catalan_u64(k))?;
        let mut buf = Vec::with_capacity(layer.sector(k).len() * R::BYTES);
        for r in layer.sector(k) {
            buf.extend_from_slice(&r.get().to_le_bytes()[..R::BYTES]);
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

fn read_header_line(r: &mut impl BufRead, line_no: usize) -> Result<Vec<String>, FileError> {
    let mut s = String::new();
    r.read_line(&mut s)?;
    if s.is_empty() {
        return Err(malformed(line_no, "unexpected end of file"));
    }
    Ok(s.split_whitespace().map(str::to_string).collect())
}

pub fn read_checkpoint<R: Residue>(mut r: impl BufRead) -> Result<Layer<R>, FileError> {
    let h = read_header_line(&mut r, 1)?;
    let parse = |s: &str| s.parse::<usize>().map_err(|_| malformed(1, "bad number in header"));
    if h.len() != 9 || h[0] != "layer" || h[1] != "t" || h[3] != "n" || h[5] != "moduli" || h[7] != "width" {
        return Err(malformed(1, "bad layer header"));
    }
    let t = parse(&h[2])?;
    let n = parse(&h[4])?;
    if t > n {
        return Err(malformed(1, "t exceeds n"));
    }
    let moduli: Vec<u64> = h[6]
        .split(',')
        .map(|m| m.parse().map_err(|_| malformed(1, "bad modulus")))
        .collect::<Result<_, _>>()?;
    if parse(&h[8])? != R::BYTES {
        return Err(malformed(1, "residue width does not match"));
    }
    if moduli.is_empty() || moduli.iter().any(|&m| m < 2 || m > R::MAX_MODULUS) {
        return Err(malformed(1, "modulus out of range"));
    }
    let mut layer = Layer::<R>::zeroed(t, n, &moduli);
    let lanes = moduli.len();
    for k in 0..=k_max(t, n) {
        let s = read_header_line(&mut r, k + 2)?;
        if s.len() != 5 || s[0] != "sector" || s[1] != "k" || s[3] != "count" {
            return Err(malformed(k + 2, "bad sector header"));
        }
        if s[2] != k.to_string() || s[4] != catalan_u64(k).to_string() {
            return Err(malformed(k + 2, "sector size mismatch"));
        }
        let cells = &mut layer.sectors[k];
        let mut buf = vec![0u8; cells.len() * R::BYTES];
        r.read_exact(&mut buf)?;
        for (i, (cell, bytes)) in cells.iter_mut().zip(buf.chunks(R::BYTES)).enumerate() {
            let mut le = [0u8; 8];
            le[..R::BYTES].copy_from_slice(bytes);
            let v = u64::from_le_bytes(le);
            if v >= moduli[i % lanes] {
                return Err(malformed(k + 2, "residue not below modulus"));
            }
            *cell = R::new(v);
        }
    }
    Ok(layer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::{step, MoveSet, StepMode};

    #[test]
    fn series_round_trip() {
        let v: Vec<UBig> = [1u64, 2, 6, 23].into_iter().map(UBig::from).collect();
        let mut buf = Vec::new();
        write_series(&mut buf, &v).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1\n2\n6\n23\n");
        assert_eq!(read_series(&buf[..]).unwrap(), v);
        assert!(read_series(&b"1\nx\n"[..]).is_err());
    }

    #[test]
    fn run_files_combine() {
        let p: Vec<u64> = vec![1, 2, 6, 23, 103, 513, 2762, 15793, 94776, 591950];
        let runs: Vec<ResidueRun> = [65521u64, 65519]
            .iter()
            .map(|&m| ResidueRun {
                modulus: m,
                residues: p.iter().map(|v| v % m).collect(),
            })
            .collect();
        let parsed: Vec<ResidueRun> = runs
            .iter()
            .map(|r| {
                let mut buf = Vec::new();
                r.write(&mut buf).unwrap();
                assert!(buf.starts_with(format!("modulus {} n 10\n", r.modulus).as_bytes()));
                ResidueRun::read(&buf[..]).unwrap()
            })
            .collect();
        assert_eq!(parsed, runs);
        let want: Vec<UBig> = p.into_iter().map(UBig::from).collect();
        assert_eq!(combine_runs(&parsed).unwrap(), want);
        assert!(ResidueRun::read(&b"modulus 7 n 2\n1\n"[..]).is_err());
        assert!(ResidueRun::read(&b"mod 7\n"[..]).is_err());
    }

    #[test]
    fn checkpoint_round_trip_and_resume() {
        let n = 9;
        let moduli = [65521u64, 65519];
        let mut layer = Layer::<u16>::initial(n, &moduli);
        for _ in 0..4 {
            layer = step(&layer, MoveSet::ALL, StepMode::DestinationDriven);
        }
        let mut buf = Vec::new();
        write_checkpoint(&layer, &mut buf).unwrap();
        let mut resumed: Layer<u16> = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(resumed, layer);
        for _ in 4..n {
            resumed = step(&resumed, MoveSet::ALL, StepMode::DestinationDriven);
        }
        assert_eq!(
            resumed.residues_of(&crate::linkpattern::LinkPattern::EMPTY),
            vec![94776 % 65521, 94776 % 65519]
        );
        assert!(read_checkpoint::<u64>(&buf[..]).is_err());
        assert!(read_checkpoint::<u16>(&buf[..buf.len() - 1]).is_err());
    }
}
