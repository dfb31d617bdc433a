//! `enumerate` and `alternating`: exact series files.

use std::path::PathBuf;
use std::time::Instant;

use av1324_core::residues::{select_moduli, ModulusSet};
use av1324_core::transfer::io::write_series;
use av1324_core::transfer::{count_alternating_series, live_state_estimate, run_exact, Residue, SweepOptions};
use dashu_int::UBig;

use crate::manifest::{manifest_path_for, RunManifest};
use crate::{write_file, CliError};

#[derive(Debug, Clone)]
pub struct EnumerateArgs {
    pub n: usize,
    /// Reconstruction moduli; chosen from `n` when absent.
    pub moduli: Option<Vec<u64>>,
    pub threads: usize,
    pub out: PathBuf,
    pub max_memory: Option<u128>,
}

/// Bytes per stored residue for a modulus list, as the sweep will store them.
fn residue_width(moduli: &[u64]) -> usize {
    if moduli.iter().all(|&m| m <= <u16 as Residue>::MAX_MODULUS) {
        <u16 as Residue>::BYTES
    } else {
        <u64 as Residue>::BYTES
    }
}

/// Refuses a sweep whose two live layers would not fit under `cap`.
pub fn check_memory(n: usize, moduli: &[u64], cap: Option<u128>) -> Result<(), CliError> {
    let Some(cap) = cap else { return Ok(()) };
    let states = live_state_estimate(n);
    let width = residue_width(moduli);
    let bytes = &states * UBig::from(moduli.len()) * UBig::from(width);
    if bytes > UBig::from(cap) {
        return Err(CliError::MemoryCapExceeded {
            states,
            lanes: moduli.len(),
            width,
            bytes,
            cap,
        });
    }
    Ok(())
}

/// Writes `p_1..p_n` to `args.out` and its manifest next to it.
pub fn enumerate(args: &EnumerateArgs) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let set = match &args.moduli {
        Some(m) => ModulusSet::new(m.clone(), None)?,
        None => select_moduli(args.n),
    };
    check_memory(args.n, &set.all(), args.max_memory)?;
    let opts = SweepOptions {
        threads: args.threads,
        max_memory: args.max_memory,
        ..SweepOptions::default()
    };
    let run = run_exact(args.n, &set, &opts)?;
    let mut text = Vec::new();
    write_series(&mut text, &run.values).expect("write to memory");
    write_file(&args.out, &text)?;

    let mut m = RunManifest::new("enumerate");
    m.param("n", args.n).param("threads", args.threads);
    if let Some(cap) = args.max_memory {
        m.param("max_memory", cap.to_string());
    }
    m.moduli = set.moduli.clone();
    m.verification_modulus = set.verification;
    m.peak_states = Some(run.sweep.peak_states);
    m.record(&args.out).map_err(crate::io_error(&args.out))?;
    m.finish(start.elapsed());
    let path = manifest_path_for(&args.out);
    m.write(&path).map_err(crate::io_error(&path))?;
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct AlternatingArgs {
    pub n: usize,
    pub out: PathBuf,
}

/// Alternating 1324-avoiders of lengths `1..=n`; `n = 0` writes an empty file.
pub fn alternating(args: &AlternatingArgs) -> Result<RunManifest, CliError> {
    let start = Instant::now();
    let values = count_alternating_series(args.n);
    let mut text = Vec::new();
    write_series(&mut text, &values).expect("write to memory");
    write_file(&args.out, &text)?;

    let mut m = RunManifest::new("alternating");
    m.param("n", args.n);
    m.record(&args.out).map_err(crate::io_error(&args.out))?;
    m.finish(start.elapsed());
    let path = manifest_path_for(&args.out);
    m.write(&path).map_err(crate::io_error(&path))?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_check_counts_both_live_layers() {
        // n = 4: layers hold 1, 2, 4, 2, 1 states; the peak pair is 6.
        assert_eq!(live_state_estimate(4), UBig::from(6u8));
        assert!(check_memory(4, &[65521, 65519], Some(24)).is_ok());
        match check_memory(4, &[65521, 65519], Some(23)) {
            Err(CliError::MemoryCapExceeded { bytes, .. }) => assert_eq!(bytes, UBig::from(24u8)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wide_moduli_cost_eight_bytes() {
        assert_eq!(residue_width(&[65521]), 2);
        assert_eq!(residue_width(&[(1 << 31) - 1]), 8);
    }
}
