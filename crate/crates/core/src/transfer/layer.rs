use dashu_int::UBig;

use crate::linkpattern::{catalan, catalan_u64, LinkPattern, StateIndex};

/// Storage type of one residue cell.
pub trait Residue: Copy + Default + Send + Sync + 'static {
    const BYTES: usize;
    /// Largest modulus whose residues fit.
    const MAX_MODULUS: u64;
    fn get(self) -> u64;
    fn new(v: u64) -> Self;
    /// Adds `r` into an accumulator that is reduced modulo `m` at the end.
    fn accumulate(acc: &mut u64, r: Self, m: u64);
}

impl Residue for u16 {
    const BYTES: usize = 2;
    const MAX_MODULUS: u64 = 1 << 16;
    #[inline]
    fn get(self) -> u64 {
        self as u64
    }
    #[inline]
    fn new(v: u64) -> Self {
        v as u16
    }
    #[inline]
    fn accumulate(acc: &mut u64, r: Self, _m: u64) {
        // at most 2^48 additions before overflow
        *acc += r as u64;
    }
}

impl Residue for u64 {
    const BYTES: usize = 8;
    const MAX_MODULUS: u64 = 1 << 63;
    #[inline]
    fn get(self) -> u64 {
        self
    }
    #[inline]
    fn new(v: u64) -> Self {
        v
    }
    #[inline]
    fn accumulate(acc: &mut u64, r: Self, m: u64) {
        // acc < m ≤ 2^63 is kept throughout
        *acc += r;
        if *acc >= m {
            *acc -= m;
        }
    }
}

/// Largest half-size a layer at time `t` of an `n`-step run may hold.
#[inline]
pub fn k_max(t: usize, n: usize) -> usize {
    t.min(n - t)
}

/// Multiplicities of every state after `t` insertions, one lane per modulus.
///
/// Sector `k` is a dense array over the Catalan(k) ranks; the residues of a
/// state for all moduli are stored next to each other.
#[derive(Clone, PartialEq, Eq)]
pub struct Layer<R: Residue = u16> {
    pub(crate) t: usize,
    pub(crate) n: usize,
    pub(crate) moduli: Vec<u64>,
    pub(crate) sectors: Vec<Vec<R>>,
}

impl<R: Residue> Layer<R> {
    /// The zero layer at time `t`, sized for the pruning bound.
    pub fn zeroed(t: usize, n: usize, moduli: &[u64]) -> Self {
        assert!(t <= n);
        assert!(!moduli.is_empty());
        for &m in moduli {
            assert!(
                m >= 2 && m <= R::MAX_MODULUS,
                "modulus {m} does not fit the residue type"
            );
        }
        let lanes = moduli.len();
        let sectors = (0..=k_max(t, n))
            .map(|k| vec![R::default(); catalan_u64(k) as usize * lanes])
            .collect();
        Layer {
            t,
            n,
            moduli: moduli.to_vec(),
            sectors,
        }
    }

    /// `{∅ → 1}` at `t = 0`.
    pub fn initial(n: usize, moduli: &[u64]) -> Self {
        let mut layer = Self::zeroed(0, n, moduli);
        for lane in 0..moduli.len() {
            layer.sectors[0][lane] = R::new(1);
        }
        layer
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn lanes(&self) -> usize {
        self.moduli.len()
    }

    pub fn k_max(&self) -> usize {
        self.sectors.len() - 1
    }

    pub fn state_count(&self) -> u64 {
        (0..self.sectors.len()).map(catalan_u64).sum()
    }

    pub fn sector(&self, k: usize) -> &[R] {
        &self.sectors[k]
    }

    /// Residues of `p` for every modulus, or zeros when `p` is pruned.
    pub fn residues_of(&self, p: &LinkPattern) -> Vec<u64> {
        self.residues_at(p.rank())
    }

    pub fn residues_at(&self, idx: StateIndex) -> Vec<u64> {
        let lanes = self.lanes();
        match self.sectors.get(idx.k) {
            Some(sector) => sector[idx.rank as usize * lanes..(idx.rank as usize + 1) * lanes]
                .iter()
                .map(|r| r.get())
                .collect(),
            None => vec![0; lanes],
        }
    }

    /// Residue of `p` for the first modulus.
    pub fn get(&self, p: &LinkPattern) -> u64 {
        self.residues_of(p)[0]
    }

    /// Sets the residues of a state; values are reduced modulo each lane.
    ///
    /// Panics if `p` exceeds the layer's pruning bound.
    pub fn set(&mut self, p: &LinkPattern, values: &[u64]) {
        let lanes = self.lanes();
        assert_eq!(values.len(), lanes);
        assert!(p.k() <= self.k_max(), "state {p} violates the pruning bound");
        let base = p.rank().rank as usize * lanes;
        for (lane, v) in values.iter().enumerate() {
            self.sectors[p.k()][base + lane] = R::new(v % self.moduli[lane]);
        }
    }

    /// Non-zero states in rank order, with their residues.
    pub fn nonzero(&self) -> Vec<(LinkPattern, Vec<u64>)> {
        let lanes = self.lanes();
        let mut out = Vec::new();
        for (k, sector) in self.sectors.iter().enumerate() {
            for (rank, cell) in sector.chunks(lanes).enumerate() {
                if cell.iter().any(|r| r.get() != 0) {
                    let p = LinkPattern::unrank(StateIndex { k, rank: rank as u64 }).expect("rank in range");
                    out.push((p, cell.iter().map(|r| r.get()).collect()));
                }
            }
        }
        out
    }

    /// Bytes held by the residue arrays.
    pub fn bytes(&self) -> usize {
        self.sectors.iter().map(|s| s.len() * R::BYTES).sum()
    }
}

impl<R: Residue> std::fmt::Debug for Layer<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Layer")
            .field("t", &self.t)
            .field("n", &self.n)
            .field("moduli", &self.moduli)
            .field("states", &self.state_count())
            .finish()
    }
}

/// Number of states a layer at `t` stores: `Σ_{k ≤ k_max} Catalan(k)`.
pub fn layer_state_count(t: usize, n: usize) -> u64 {
    (0..=k_max(t, n)).map(catalan_u64).sum()
}

/// Largest layer over a whole `n`-step sweep.
pub fn peak_state_count(n: usize) -> u64 {
    (0..=n).map(|t| layer_state_count(t, n)).max().unwrap_or(1)
}

/// States held at once during a sweep: the largest sum of two adjacent
/// layers. Exact for any `n`.
pub fn live_state_estimate(n: usize) -> UBig {
    let layer = |t: usize| (0..=k_max(t, n)).map(catalan).fold(UBig::ZERO, |a, c| a + c);
    (0..n).map(|t| layer(t) + layer(t + 1)).max().unwrap_or(UBig::ZERO)
}

/// Peak bytes for a sweep, saturating at `u128::MAX`.
pub fn estimate_sweep_bytes(n: usize, lanes: usize, bytes_per_residue: usize) -> u128 {
    let bytes = live_state_estimate(n) * UBig::from(lanes) * UBig::from(bytes_per_residue);
    u128::try_from(bytes).unwrap_or(u128::MAX)
}
