use dashu_int::UBig;
use rayon::prelude::*;

use crate::linkpattern::{rank_bits, unrank_bits, LinkPattern, MAX_HALF_SIZE};
use crate::residues::{check_coprime, crt, magnitude_bound, reduce, ModulusSet};

use super::layer::{estimate_sweep_bytes, Layer, Residue};
use super::moves::{for_each_child, for_each_parent, MoveSet};
use super::TransferError;

/// Destination states handled by one parallel task.
const CHUNK: usize = 4096;
/// Upper bound on lanes per sweep; sized for the accumulator array.
pub const MAX_LANES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepMode {
    /// Pull: each destination sums over its parents. Parallel and deterministic.
    #[default]
    DestinationDriven,
    /// Push: each source scatters into its children. Sequential.
    SourceDriven,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub mode: StepMode,
    pub threads: usize,
    pub moves: MoveSet,
    /// Refuse to start when the estimated peak exceeds this many bytes.
    pub max_memory: Option<u128>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            mode: StepMode::DestinationDriven,
            threads: 1,
            moves: MoveSet::ALL,
            max_memory: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepOutput {
    pub moduli: Vec<u64>,
    /// `series[lane][t - 1]` is the residue of `p_t` modulo `moduli[lane]`.
    pub series: Vec<Vec<u64>>,
    pub peak_states: u64,
    pub peak_bytes: usize,
}

/// Advances one layer. Both modes produce identical layers.
pub fn step<R: Residue>(src: &Layer<R>, moves: MoveSet, mode: StepMode) -> Layer<R> {
    match mode {
        StepMode::DestinationDriven => step_pull(src, moves),
        StepMode::SourceDriven => step_push(src, moves),
    }
}

fn step_pull<R: Residue>(src: &Layer<R>, moves: MoveSet) -> Layer<R> {
    let lanes = src.lanes();
    assert!(lanes <= MAX_LANES);
    let mut dst = Layer::<R>::zeroed(src.t + 1, src.n, &src.moduli);
    let src_kmax = src.k_max();
    let moduli = &src.moduli;
    let sectors = &src.sectors;
    for (k, sector) in dst.sectors.iter_mut().enumerate() {
        sector
            .par_chunks_mut(CHUNK * lanes)
            .enumerate()
            .for_each(|(chunk, cells)| {
                let first = (chunk * CHUNK) as u64;
                for (i, cell) in cells.chunks_mut(lanes).enumerate() {
                    let c = LinkPattern::from_raw(unrank_bits(first + i as u64, k), k);
                    let mut acc = [0u64; MAX_LANES];
                    for_each_parent(c, moves, src_kmax, |p, _, _| {
                        let base = rank_bits(p.bits(), p.k()) as usize * lanes;
                        let from = &sectors[p.k()][base..base + lanes];
                        for lane in 0..lanes {
                            R::accumulate(&mut acc[lane], from[lane], moduli[lane]);
                        }
                    });
                    for lane in 0..lanes {
                        cell[lane] = R::new(acc[lane] % moduli[lane]);
                    }
                }
            });
    }
    dst
}

fn step_push<R: Residue>(src: &Layer<R>, moves: MoveSet) -> Layer<R> {
    let lanes = src.lanes();
    let mut dst = Layer::<R>::zeroed(src.t + 1, src.n, &src.moduli);
    let dst_kmax = dst.k_max();
    for (k, sector) in src.sectors.iter().enumerate() {
        for (rank, from) in sector.chunks(lanes).enumerate() {
            if from.iter().all(|r| r.get() == 0) {
                continue;
            }
            let p = LinkPattern::from_raw(unrank_bits(rank as u64, k), k);
            for_each_child(p, moves, dst_kmax, |c, _, _| {
                let base = rank_bits(c.bits(), c.k()) as usize * lanes;
                let to = &mut dst.sectors[c.k()][base..base + lanes];
                for lane in 0..lanes {
                    let m = src.moduli[lane];
                    to[lane] = R::new((to[lane].get() + from[lane].get()) % m);
                }
            });
        }
    }
    dst
}

fn validate_moduli<R: Residue>(n: usize, moduli: &[u64], opts: &SweepOptions) -> Result<(), TransferError> {
    if moduli.is_empty() {
        return Err(TransferError::NoModuli);
    }
    if moduli.len() > MAX_LANES {
        return Err(TransferError::Residue(crate::residues::ResidueError::LengthMismatch {
            residues: MAX_LANES,
            moduli: moduli.len(),
        }));
    }
    if n > 2 * MAX_HALF_SIZE {
        return Err(TransferError::LengthTooLarge(n));
    }
    for &m in moduli {
        if m > R::MAX_MODULUS {
            return Err(TransferError::ModulusTooLarge(m));
        }
    }
    check_coprime(moduli)?;
    if let Some(limit) = opts.max_memory {
        let needed = estimate_sweep_bytes(n, moduli.len(), R::BYTES);
        if needed > limit {
            return Err(TransferError::MemoryLimit { needed, limit });
        }
    }
    Ok(())
}

/// Runs `n` steps from `{∅ → 1}`, calling `on_layer` after each step.
pub fn sweep<R: Residue>(
    n: usize,
    moduli: &[u64],
    opts: &SweepOptions,
    mut on_layer: impl FnMut(&Layer<R>),
) -> Result<SweepOutput, TransferError> {
    validate_moduli::<R>(n, moduli, opts)?;
    let pool = if opts.mode == StepMode::DestinationDriven && opts.threads != 0 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.threads)
                .build()
                .map_err(|e| TransferError::ThreadPool(e.to_string()))?,
        )
    } else {
        None
    };
    let mut layer = Layer::<R>::initial(n, moduli);
    let mut series = vec![Vec::with_capacity(n); moduli.len()];
    let mut peak_states = layer.state_count();
    let mut peak_bytes = layer.bytes();
    for _ in 0..n {
        let next = match &pool {
            Some(pool) => pool.install(|| step(&layer, opts.moves, opts.mode)),
            None => step(&layer, opts.moves, opts.mode),
        };
        peak_states = peak_states.max(next.state_count());
        peak_bytes = peak_bytes.max(layer.bytes() + next.bytes());
        layer = next;
        for (lane, r) in layer.residues_at(LinkPattern::EMPTY.rank()).into_iter().enumerate() {
            series[lane].push(r);
        }
        on_layer(&layer);
    }
    Ok(SweepOutput {
        moduli: moduli.to_vec(),
        series,
        peak_states,
        peak_bytes,
    })
}

fn sweep_auto(n: usize, moduli: &[u64], opts: &SweepOptions) -> Result<SweepOutput, TransferError> {
    if moduli.iter().all(|&m| m <= u16::MAX_MODULUS) {
        sweep::<u16>(n, moduli, opts, |_| {})
    } else {
        sweep::<u64>(n, moduli, opts, |_| {})
    }
}

/// Residues of `p_1..p_n` modulo one modulus.
pub fn count_series(n: usize, modulus: u64) -> Result<Vec<u64>, TransferError> {
    count_series_multi(n, &[modulus], &SweepOptions::default()).map(|mut v| v.remove(0))
}

/// Residues of `p_1..p_n` for every modulus, from a single multi-lane sweep.
pub fn count_series_multi(n: usize, moduli: &[u64], opts: &SweepOptions) -> Result<Vec<Vec<u64>>, TransferError> {
    Ok(sweep_auto(n, moduli, opts)?.series)
}

/// Exact `p_1..p_n`: CRT over the set's moduli, each value checked against
/// the verification modulus when one is given.
pub fn count_series_exact(n: usize, set: &ModulusSet, opts: &SweepOptions) -> Result<Vec<UBig>, TransferError> {
    run_exact(n, set, opts).map(|r| r.values)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactRun {
    pub values: Vec<UBig>,
    pub sweep: SweepOutput,
}

/// `count_series_exact` together with the sweep's residues and peak sizes.
pub fn run_exact(n: usize, set: &ModulusSet, opts: &SweepOptions) -> Result<ExactRun, TransferError> {
    let all = set.all();
    if set.moduli.is_empty() {
        return Err(TransferError::NoModuli);
    }
    check_coprime(&all)?;
    if set.product() <= magnitude_bound(n) {
        return Err(TransferError::InsufficientModuli { n });
    }
    let sweep = sweep_auto(n, &all, opts)?;
    let values = combine(&sweep.series, set)?;
    Ok(ExactRun { values, sweep })
}

pub(crate) fn combine(series: &[Vec<u64>], set: &ModulusSet) -> Result<Vec<UBig>, TransferError> {
    let lanes = set.moduli.len();
    let n = series.first().map_or(0, Vec::len);
    let mut values = Vec::with_capacity(n);
    for t in 0..n {
        let residues: Vec<u64> = series[..lanes].iter().map(|s| s[t]).collect();
        let x = crt(&residues, &set.moduli)?;
        if let Some(v) = set.verification {
            let expected = series[lanes][t];
            let actual = reduce(&x, v);
            if expected != actual {
                return Err(TransferError::ConsistencyFailure {
                    t: t + 1,
                    modulus: v,
                    expected,
                    actual,
                });
            }
        }
        values.push(x);
    }
    Ok(values)
}

/// The sweep restricted to moves 1 and 4, counted exactly.
pub fn count_alternating_series(n: usize) -> Vec<UBig> {
    super::direct::count_series_direct(n, MoveSet::ALTERNATING, true)
}
