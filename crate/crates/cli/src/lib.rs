//! Batch workflows over the enumeration and analysis crates. Every command
//! that writes files also writes a manifest with their digests.

pub mod analysis;
pub mod enumerate;
pub mod manifest;
pub mod verify;

use std::fs;
use std::path::{Path, PathBuf};

use av1324_analysis::diffapprox::DaError;
use av1324_analysis::series::{Series, SeriesFileError};
use av1324_analysis::seriesanalysis::AnalysisError;
use av1324_core::residues::ResidueError;
use av1324_core::TransferError;
use dashu_int::UBig;

pub use manifest::RunManifest;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for a failed verification or consistency check, or any
/// other failure during a run.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for rejected arguments or unusable input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed series file {path}: {source}")]
    MalformedSeriesFile { path: PathBuf, source: SeriesFileError },
    #[error(
        "estimated peak memory {bytes} bytes ({states} live states x {lanes} moduli x {width} bytes) \
         exceeds the cap of {cap} bytes"
    )]
    MemoryCapExceeded {
        states: UBig,
        lanes: usize,
        width: usize,
        bytes: UBig,
        cap: u128,
    },
    #[error("need at least {needed} exact terms to fit approximants, got {got}")]
    TooFewApproximants { got: usize, needed: usize },
    #[error("{0} verification check(s) failed")]
    VerificationFailed(usize),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Da(#[from] DaError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<ResidueError> for CliError {
    fn from(e: ResidueError) -> Self {
        CliError::Transfer(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::MalformedSeriesFile { .. }
            | CliError::MemoryCapExceeded { .. }
            | CliError::TooFewApproximants { .. }
            | CliError::Transfer(
                TransferError::ModuliNotCoprime(..)
                | TransferError::InsufficientModuli { .. }
                | TransferError::ModulusTooLarge(_)
                | TransferError::LengthTooLarge(_)
                | TransferError::NoModuli,
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

pub(crate) fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_series_file(path: &Path, precision: usize) -> Result<Series, CliError> {
    let file = fs::File::open(path).map_err(io_error(path))?;
    Series::read(std::io::BufReader::new(file), precision).map_err(|source| match source {
        SeriesFileError::Io(e) => CliError::Io {
            path: path.to_path_buf(),
            source: e,
        },
        source => CliError::MalformedSeriesFile {
            path: path.to_path_buf(),
            source,
        },
    })
}

pub(crate) fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
    }
    fs::write(path, data).map_err(io_error(path))
}

/// Runs `f` on a pool of `threads` workers; `0` means one per core.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Transfer(TransferError::ThreadPool(e.to_string())))?;
    Ok(pool.install(f))
}

/// Three quarters of `MemTotal`, or `None` where it cannot be read.
pub fn default_memory_cap() -> Option<u128> {
    let info = fs::read_to_string("/proc/meminfo").ok()?;
    let line = info.lines().find(|l| l.starts_with("MemTotal:"))?;
    let kib: u128 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib * 1024 / 4 * 3)
}

/// Byte counts with an optional binary suffix: `4096`, `512M`, `4G`, `1.5GiB`.
pub fn parse_bytes(s: &str) -> Result<u128, String> {
    let t = s.trim();
    let split = t.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let shift = match unit
        .trim()
        .to_ascii_uppercase()
        .trim_end_matches("IB")
        .trim_end_matches('B')
    {
        "" => 0,
        "K" => 10,
        "M" => 20,
        "G" => 30,
        "T" => 40,
        _ => return Err(format!("unknown size unit in {s:?}")),
    };
    let value: f64 = num.parse().map_err(|_| format!("not a size: {s:?}"))?;
    if !value.is_finite() || value < 0.0 {
        return Err(format!("not a size: {s:?}"));
    }
    Ok((value * (1u128 << shift) as f64) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse_with_binary_suffixes() {
        assert_eq!(parse_bytes("4096"), Ok(4096));
        assert_eq!(parse_bytes("1G"), Ok(1 << 30));
        assert_eq!(parse_bytes("512MiB"), Ok(512 << 20));
        assert_eq!(parse_bytes("1.5k"), Ok(1536));
        assert!(parse_bytes("3 parsecs").is_err());
        assert!(parse_bytes("").is_err());
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::VerificationFailed(1).exit_code(), EXIT_FAILURE);
        let e = CliError::Transfer(TransferError::ConsistencyFailure {
            t: 3,
            modulus: 7,
            expected: 1,
            actual: 2,
        });
        assert_eq!(e.exit_code(), EXIT_FAILURE);
    }
}
