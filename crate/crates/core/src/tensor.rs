//! Dense complex multi-index tensors over `C^{2n}` and the symplectic machinery
//! used to build curvature-like tensors.
//!
//! Everything here is dense and double precision. The vector space always has
//! even dimension `2n`; the standard symplectic form pairs basis vector `i`
//! with basis vector `n + i`. A curvature tensor is a totally symmetric rank-4
//! tensor fixed by the quaternionic conjugation `tau`, and random such tensors
//! are produced by [`random_curvature`].
//!
//! Contraction always happens against the symplectic form. The kernels exploit
//! the fact that the standard form is a signed permutation: a contracted index
//! pair costs `2n` multiply-adds, never `(2n)^2`.

use num_complex::Complex64;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: n = {left} vs n = {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("slot {slot} out of range for rank {rank}")]
    InvalidSlot { slot: usize, rank: usize },
    #[error("slot {slot} used more than once in contraction")]
    DuplicateSlot { slot: usize },
    #[error("entry count {got} does not match (2n)^rank = {expected}")]
    EntryCount { expected: usize, got: usize },
    #[error("non-finite entry at linear index {index}")]
    NonFinite { index: usize },
    #[error("tensor is not totally symmetric at linear index {index}")]
    NotSymmetric { index: usize },
}

/// Half-dimension `n >= 1`; the underlying vector space is `C^{2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension {
    n: usize,
}

impl Dimension {
    /// Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "half-dimension n must be at least 1");
        Dimension { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The dimension `2n` of the vector space.
    pub fn size(&self) -> usize {
        2 * self.n
    }
}

/// Dense rank-`r` tensor over `C^{2n}`, row-major in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiTensor {
    dim: Dimension,
    rank: usize,
    entries: Vec<Complex64>,
}

impl MultiTensor {
    pub fn zeros(dim: Dimension, rank: usize) -> Self {
        let len = dim.size().pow(rank as u32);
        MultiTensor {
            dim,
            rank,
            entries: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn from_entries(
        dim: Dimension,
        rank: usize,
        entries: Vec<Complex64>,
    ) -> Result<Self, TensorError> {
        let expected = dim.size().pow(rank as u32);
        if entries.len() != expected {
            return Err(TensorError::EntryCount {
                expected,
                got: entries.len(),
            });
        }
        let t = MultiTensor { dim, rank, entries };
        t.check_finite()?;
        Ok(t)
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    /// Stride of `slot` in the row-major layout.
    pub fn stride(&self, slot: usize) -> usize {
        debug_assert!(slot < self.rank);
        self.dim.size().pow((self.rank - 1 - slot) as u32)
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        let size = self.dim.size();
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < size);
            acc * size + i
        })
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.entries[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: Complex64) {
        let lin = self.linear_index(idx);
        self.entries[lin] = value;
    }

    pub fn scaled(&self, c: Complex64) -> MultiTensor {
        MultiTensor {
            dim: self.dim,
            rank: self.rank,
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    pub fn check_finite(&self) -> Result<(), TensorError> {
        for (index, z) in self.entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(TensorError::NonFinite { index });
            }
        }
        Ok(())
    }

    /// Squared Frobenius norm, `sum |entry|^2`.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Iterate all multi-indices in row-major order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.dim.size(), self.rank)
    }
}

/// Odometer over `{0..size}^rank` in row-major order.
pub struct MultiIndexIter {
    size: usize,
    current: Vec<usize>,
    done: bool,
}

impl MultiIndexIter {
    pub fn new(size: usize, rank: usize) -> Self {
        MultiIndexIter {
            size,
            current: vec![0; rank],
            done: false,
        }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let mut carried = true;
        for d in (0..self.current.len()).rev() {
            self.current[d] += 1;
            if self.current[d] < self.size {
                carried = false;
                break;
            }
            self.current[d] = 0;
        }
        if carried {
            self.done = true;
        }
        Some(out)
    }
}

/// The standard skew form on `C^{2n}`: `eps(i, n+i) = +1`, `eps(n+i, i) = -1`
/// (0-based), all other entries zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    dim: Dimension,
}

impl SymplecticForm {
    pub fn standard(dim: Dimension) -> Self {
        SymplecticForm { dim }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Matrix entry `eps^{rc}` (0-based).
    pub fn entry(&self, r: usize, c: usize) -> i8 {
        let n = self.dim.n();
        if c == r + n {
            1
        } else if r == c + n {
            -1
        } else {
            0
        }
    }

    /// Dense `2n x 2n` matrix of the form.
    pub fn matrix(&self) -> Vec<Vec<i8>> {
        let s = self.dim.size();
        (0..s)
            .map(|r| (0..s).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    /// The unique column with a nonzero entry in row `i`.
    ///
    /// `sum_{A,B} eps^{AB} f(A) g(B) = sum_A pairing_sign(A) f(A) g(partner(A))`.
    pub fn partner(&self, i: usize) -> usize {
        let n = self.dim.n();
        if i < n {
            i + n
        } else {
            i - n
        }
    }

    /// Sign of the nonzero entry in row `i`: `eps^{i, partner(i)}`.
    pub fn pairing_sign(&self, i: usize) -> f64 {
        if i < self.dim.n() {
            1.0
        } else {
            -1.0
        }
    }
}

/// The standard quaternionic structure `J` with `J e_i = e_{n+i}`,
/// `J e_{n+i} = -e_i`; satisfies `J^2 = -Id` and `J^T eps J = eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuaternionicStructure {
    dim: Dimension,
}

impl QuaternionicStructure {
    pub fn standard(dim: Dimension) -> Self {
        QuaternionicStructure { dim }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Matrix entry `J[r][c]` (0-based): `+1` at `(i+n, i)`, `-1` at `(i, i+n)`.
    pub fn entry(&self, r: usize, c: usize) -> i8 {
        let n = self.dim.n();
        if r == c + n {
            1
        } else if c == r + n {
            -1
        } else {
            0
        }
    }

    pub fn matrix(&self) -> Vec<Vec<i8>> {
        let s = self.dim.size();
        (0..s)
            .map(|r| (0..s).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    /// Row of the single nonzero entry in column `a`.
    fn source(&self, a: usize) -> usize {
        let n = self.dim.n();
        if a < n {
            a + n
        } else {
            a - n
        }
    }

    /// Value of that entry, `J[source(a)][a]`.
    fn source_sign(&self, a: usize) -> f64 {
        if a < self.dim.n() {
            1.0
        } else {
            -1.0
        }
    }
}

/// Totally symmetric rank-4 tensor; symmetry is exact by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor4 {
    inner: MultiTensor,
}

impl SymTensor4 {
    /// Wrap a rank-4 tensor after verifying exact total symmetry.
    pub fn try_new(t: MultiTensor) -> Result<Self, TensorError> {
        if t.rank() != 4 {
            return Err(TensorError::RankMismatch {
                expected: 4,
                got: t.rank(),
            });
        }
        let size = t.dim().size();
        for idx in MultiIndexIter::new(size, 4) {
            let v = t.get(&idx);
            for perm in permutations4(&idx) {
                if t.get(&perm) != v {
                    return Err(TensorError::NotSymmetric {
                        index: t.linear_index(&idx),
                    });
                }
            }
        }
        Ok(SymTensor4 { inner: t })
    }

    pub fn zeros(dim: Dimension) -> Self {
        SymTensor4 {
            inner: MultiTensor::zeros(dim, 4),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.inner.dim()
    }

    pub fn as_tensor(&self) -> &MultiTensor {
        &self.inner
    }

    pub fn into_tensor(self) -> MultiTensor {
        self.inner
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.inner.get(idx)
    }

    pub fn scaled(&self, c: f64) -> SymTensor4 {
        SymTensor4 {
            inner: self.inner.scaled(Complex64::new(c, 0.0)),
        }
    }
}

/// All 24 permutations of a 4-index tuple.
fn permutations4(idx: &[usize]) -> Vec<[usize; 4]> {
    debug_assert_eq!(idx.len(), 4);
    let mut out = Vec::with_capacity(24);
    let mut order = [0usize, 1, 2, 3];
    // Heap's algorithm, iterative.
    let mut c = [0usize; 4];
    out.push([idx[0], idx[1], idx[2], idx[3]]);
    let mut i = 0;
    while i < 4 {
        if c[i] < i {
            if i % 2 == 0 {
                order.swap(0, i);
            } else {
                order.swap(c[i], i);
            }
            out.push([
                idx[order[0]],
                idx[order[1]],
                idx[order[2]],
                idx[order[3]],
            ]);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Project a rank-4 tensor onto its totally symmetric part:
/// `out(I) = (1/24) sum_{sigma in S4} raw(sigma(I))`.
///
/// The average for every permutation of a multiset is computed once, from the
/// sorted representative, so the output is bitwise symmetric. Already-symmetric
/// inputs are returned unchanged.
pub fn symmetrize4(raw: &MultiTensor) -> Result<SymTensor4, TensorError> {
    if raw.rank() != 4 {
        return Err(TensorError::RankMismatch {
            expected: 4,
            got: raw.rank(),
        });
    }
    let dim = raw.dim();
    let size = dim.size();
    let mut out = MultiTensor::zeros(dim, 4);
    for idx in MultiIndexIter::new(size, 4) {
        let mut canon = [idx[0], idx[1], idx[2], idx[3]];
        canon.sort_unstable();
        if canon != [idx[0], idx[1], idx[2], idx[3]] {
            continue; // handled from the sorted representative
        }
        let perms = permutations4(&canon);
        let first = raw.get(&perms[0]);
        let all_equal = perms.iter().all(|p| raw.get(p) == first);
        let avg = if all_equal {
            // exact idempotence on symmetric input
            first
        } else {
            let mut sum = Complex64::new(0.0, 0.0);
            for p in &perms {
                sum += raw.get(p);
            }
            sum / 24.0
        };
        for p in &perms {
            out.set(p, avg);
        }
    }
    Ok(SymTensor4 { inner: out })
}

/// Quaternionic conjugate: `(tau t)(A1..Ar) = conj(t(E1..Er)) prod_j J[E_j][A_j]`,
/// which for the standard `J` is a signed permutation plus complex conjugation,
/// hence exact. Satisfies `tau(tau t) = t` for even rank.
pub fn tau_conjugate(t: &MultiTensor, j: &QuaternionicStructure) -> Result<MultiTensor, TensorError> {
    if t.dim() != j.dim() {
        return Err(TensorError::DimensionMismatch {
            left: t.dim().n(),
            right: j.dim().n(),
        });
    }
    let mut out = MultiTensor::zeros(t.dim(), t.rank());
    let mut src = vec![0usize; t.rank()];
    for idx in t.indices() {
        let mut sign = 1.0;
        for (d, &a) in idx.iter().enumerate() {
            src[d] = j.source(a);
            sign *= j.source_sign(a);
        }
        let v = t.get(&src).conj() * sign;
        out.set(&idx, v);
    }
    Ok(out)
}

/// Impose the quaternionic reality condition: `Omega = R + tau R`.
///
/// The output is totally symmetric and a fixed point of `tau`, exactly.
pub fn reality_project(
    r: &SymTensor4,
    j: &QuaternionicStructure,
) -> Result<SymTensor4, TensorError> {
    let tau = tau_conjugate(r.as_tensor(), j)?;
    let mut inner = r.as_tensor().clone();
    for (a, b) in inner.entries_mut().iter_mut().zip(tau.entries().iter()) {
        *a += b;
    }
    Ok(SymTensor4 { inner })
}

/// Seeded random curvature tensor: i.i.d. entries with real and imaginary
/// parts uniform on `[-range, range]`, drawn in linear index order from a
/// ChaCha8 stream, then symmetrized and reality-projected.
///
/// A pure function of `(dim, seed, range)`: identical arguments give bitwise
/// identical tensors.
pub fn random_curvature(dim: Dimension, seed: u64, range: f64) -> SymTensor4 {
    assert!(range > 0.0, "entry range must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uni = Uniform::new_inclusive(-range, range);
    let len = dim.size().pow(4);
    let entries: Vec<Complex64> = (0..len)
        .map(|_| {
            let re = uni.sample(&mut rng);
            let im = uni.sample(&mut rng);
            Complex64::new(re, im)
        })
        .collect();
    let raw = MultiTensor::from_entries(dim, 4, entries).expect("entry count by construction");
    let sym = symmetrize4(&raw).expect("rank 4 by construction");
    reality_project(&sym, &QuaternionicStructure::standard(dim)).expect("dims match")
}

/// One signed perfect matching of the index positions `{0..2k-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMatching {
    /// Pairs `(a, b)` with `a < b`, sorted by first element.
    pub pairs: Vec<(usize, usize)>,
    /// Parity of the permutation `(0..2k) -> concatenated pairs`.
    pub sign: i8,
}

/// The totally antisymmetric `2k`-index extension of the symplectic form,
/// represented implicitly as its `(2k-1)!!` signed perfect matchings:
///
/// `eps^{I1..I2k} = sum_matchings sign * prod_pairs eps^{Ia Ib}`.
///
/// For `k = 1` this is the symplectic form itself, and the three-term `k = 2`
/// expansion reads `eps^{DHLP} = eps^{DH}eps^{LP} + eps^{DL}eps^{PH} + eps^{DP}eps^{HL}`.
/// Whenever `2k > 2n` the implied array vanishes identically.
#[derive(Debug, Clone)]
pub struct MatchingEpsilon {
    dim: Dimension,
    k: usize,
    matchings: Vec<SignedMatching>,
}

impl MatchingEpsilon {
    pub fn new(dim: Dimension, k: usize) -> Self {
        assert!(k >= 1, "k must be at least 1");
        let mut matchings = Vec::new();
        let mut pairs = Vec::with_capacity(k);
        let mut used = vec![false; 2 * k];
        enumerate_matchings(2 * k, &mut used, &mut pairs, &mut matchings);
        MatchingEpsilon { dim, k, matchings }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matchings(&self) -> &[SignedMatching] {
        &self.matchings
    }

    /// True when `2k` exceeds the space dimension `2n`, forcing the implied
    /// antisymmetric array to vanish identically.
    pub fn vanishes_identically(&self) -> bool {
        2 * self.k > self.dim.size()
    }

    /// Evaluate at a concrete multi-index (length `2k`).
    pub fn evaluate(&self, indices: &[usize]) -> f64 {
        assert_eq!(indices.len(), 2 * self.k);
        let eps = SymplecticForm::standard(self.dim);
        let mut total = 0.0;
        for m in &self.matchings {
            let mut prod = m.sign as f64;
            for &(a, b) in &m.pairs {
                prod *= eps.entry(indices[a], indices[b]) as f64;
                if prod == 0.0 {
                    break;
                }
            }
            total += prod;
        }
        total
    }
}

fn enumerate_matchings(
    count: usize,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    out: &mut Vec<SignedMatching>,
) {
    let first = match (0..count).find(|&i| !used[i]) {
        Some(i) => i,
        None => {
            let sign = matching_parity(pairs);
            out.push(SignedMatching {
                pairs: pairs.clone(),
                sign,
            });
            return;
        }
    };
    used[first] = true;
    for second in first + 1..count {
        if used[second] {
            continue;
        }
        used[second] = true;
        pairs.push((first, second));
        enumerate_matchings(count, used, pairs, out);
        pairs.pop();
        used[second] = false;
    }
    used[first] = false;
}

/// Parity of the permutation sending `(0..2k)` to the concatenated pairs.
fn matching_parity(pairs: &[(usize, usize)]) -> i8 {
    let seq: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// One contracted index pair in a pairwise contraction.
///
/// `flip` reverses the orientation of the symplectic pairing for this pair
/// (i.e. contracts with `eps^{BA}` instead of `eps^{AB}`), negating its sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContractPair {
    pub a_slot: usize,
    pub b_slot: usize,
    pub flip: bool,
}

impl ContractPair {
    pub fn new(a_slot: usize, b_slot: usize) -> Self {
        ContractPair {
            a_slot,
            b_slot,
            flip: false,
        }
    }
}

fn check_slots(rank: usize, slots: impl Iterator<Item = usize>) -> Result<(), TensorError> {
    let mut seen = vec![false; rank];
    for slot in slots {
        if slot >= rank {
            return Err(TensorError::InvalidSlot { slot, rank });
        }
        if seen[slot] {
            return Err(TensorError::DuplicateSlot { slot });
        }
        seen[slot] = true;
    }
    Ok(())
}

/// Linear offsets of every combination of the given slots, in row-major order
/// of those slots.
fn remainder_offsets(t: &MultiTensor, slots: &[usize]) -> Vec<usize> {
    let size = t.dim().size();
    let mut offsets = vec![0usize];
    for &slot in slots {
        let stride = t.stride(slot);
        let mut next = Vec::with_capacity(offsets.len() * size);
        for &base in &offsets {
            for v in 0..size {
                next.push(base + v * stride);
            }
        }
        offsets = next;
    }
    offsets
}

/// Contract `a` and `b` along several `(slot, slot)` pairs at once, each pair
/// against the symplectic form:
///
/// `out(a_rem, b_rem) = sum a(..A_j..) b(..B_j..) prod_j eps^{A_j B_j}`.
///
/// Free indices are ordered: remaining slots of `a` in order, then remaining
/// slots of `b`. An empty pair list is the outer product.
pub fn multi_contract(
    a: &MultiTensor,
    b: &MultiTensor,
    pairs: &[ContractPair],
    eps: &SymplecticForm,
) -> Result<MultiTensor, TensorError> {
    if a.dim() != b.dim() || a.dim() != eps.dim() {
        return Err(TensorError::DimensionMismatch {
            left: a.dim().n(),
            right: b.dim().n().max(eps.dim().n()),
        });
    }
    check_slots(a.rank(), pairs.iter().map(|p| p.a_slot))?;
    check_slots(b.rank(), pairs.iter().map(|p| p.b_slot))?;

    let dim = a.dim();
    let size = dim.size();
    let c = pairs.len();

    let a_rem: Vec<usize> = (0..a.rank())
        .filter(|s| pairs.iter().all(|p| p.a_slot != *s))
        .collect();
    let b_rem: Vec<usize> = (0..b.rank())
        .filter(|s| pairs.iter().all(|p| p.b_slot != *s))
        .collect();

    // One entry per assignment of the contracted pairs: offsets into a and b
    // plus the product of pairing signs.
    let mut pair_table: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
    for p in pairs {
        let sa = a.stride(p.a_slot);
        let sb = b.stride(p.b_slot);
        let mut next = Vec::with_capacity(pair_table.len() * size);
        for &(oa, ob, sgn) in &pair_table {
            for v in 0..size {
                let s = if p.flip {
                    -eps.pairing_sign(v)
                } else {
                    eps.pairing_sign(v)
                };
                next.push((oa + v * sa, ob + eps.partner(v) * sb, sgn * s));
            }
        }
        pair_table = next;
    }
    debug_assert_eq!(pair_table.len(), size.pow(c as u32));

    let a_bases = remainder_offsets(a, &a_rem);
    let b_bases = remainder_offsets(b, &b_rem);

    let mut out = MultiTensor::zeros(dim, a_rem.len() + b_rem.len());
    let ae = a.entries();
    let be = b.entries();
    let oe = out.entries_mut();
    let mut w = 0;
    for &abase in &a_bases {
        for &bbase in &b_bases {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(oa, ob, sgn) in &pair_table {
                acc += ae[abase + oa] * be[bbase + ob] * sgn;
            }
            oe[w] = acc;
            w += 1;
        }
    }
    Ok(out)
}

/// Contract pairs of slots within a single tensor against the symplectic form
/// (a trace). Free indices keep their original order.
pub fn self_contract(
    a: &MultiTensor,
    pairs: &[ContractPair],
    eps: &SymplecticForm,
) -> Result<MultiTensor, TensorError> {
    if a.dim() != eps.dim() {
        return Err(TensorError::DimensionMismatch {
            left: a.dim().n(),
            right: eps.dim().n(),
        });
    }
    check_slots(
        a.rank(),
        pairs.iter().flat_map(|p| [p.a_slot, p.b_slot]),
    )?;

    let dim = a.dim();
    let size = dim.size();

    let rem: Vec<usize> = (0..a.rank())
        .filter(|s| pairs.iter().all(|p| p.a_slot != *s && p.b_slot != *s))
        .collect();

    let mut pair_table: Vec<(usize, f64)> = vec![(0, 1.0)];
    for p in pairs {
        let sa = a.stride(p.a_slot);
        let sb = a.stride(p.b_slot);
        let mut next = Vec::with_capacity(pair_table.len() * size);
        for &(off, sgn) in &pair_table {
            for v in 0..size {
                let s = if p.flip {
                    -eps.pairing_sign(v)
                } else {
                    eps.pairing_sign(v)
                };
                next.push((off + v * sa + eps.partner(v) * sb, sgn * s));
            }
        }
        pair_table = next;
    }

    let bases = remainder_offsets(a, &rem);
    let mut out = MultiTensor::zeros(dim, rem.len());
    let ae = a.entries();
    let oe = out.entries_mut();
    for (w, &base) in bases.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(off, sgn) in &pair_table {
            acc += ae[base + off] * sgn;
        }
        oe[w] = acc;
    }
    Ok(out)
}

/// Contract one slot of `a` against one slot of `b` via the symplectic form:
/// the result has rank `rank(a) + rank(b) - 2`, free indices ordered
/// `a`-remainder then `b`-remainder.
pub fn contract_pair(
    a: &MultiTensor,
    slot_a: usize,
    b: &MultiTensor,
    slot_b: usize,
    eps: &SymplecticForm,
) -> Result<MultiTensor, TensorError> {
    multi_contract(a, b, &[ContractPair::new(slot_a, slot_b)], eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn standard_symplectic_n1() {
        let eps = SymplecticForm::standard(Dimension::new(1));
        assert_eq!(eps.entry(0, 1), 1);
        assert_eq!(eps.entry(1, 0), -1);
        assert_eq!(eps.entry(0, 0), 0);
        assert_eq!(eps.entry(1, 1), 0);
    }

    #[test]
    fn standard_symplectic_n3_block_pattern() {
        // 1-based entry(2,5) = +1 is 0-based entry(1,4).
        let eps = SymplecticForm::standard(Dimension::new(3));
        assert_eq!(eps.entry(1, 4), 1);
        assert_eq!(eps.entry(4, 1), -1);
    }

    #[test]
    fn standard_symplectic_antisymmetric() {
        for n in 1..=4 {
            let eps = SymplecticForm::standard(Dimension::new(n));
            let m = eps.matrix();
            for r in 0..2 * n {
                for c in 0..2 * n {
                    assert_eq!(m[r][c] + m[c][r], 0, "n={n} r={r} c={c}");
                }
            }
        }
    }

    #[test]
    fn matching_epsilon_counts() {
        let dim = Dimension::new(3);
        assert_eq!(MatchingEpsilon::new(dim, 1).matchings().len(), 1);
        assert_eq!(MatchingEpsilon::new(dim, 2).matchings().len(), 3);
        assert_eq!(MatchingEpsilon::new(dim, 3).matchings().len(), 15);
        assert_eq!(MatchingEpsilon::new(dim, 4).matchings().len(), 105);
    }

    #[test]
    fn matching_epsilon_k2_signs_match_three_term_expansion() {
        // eps^{DHLP} = eps^{DH}eps^{LP} + eps^{DL}eps^{PH} + eps^{DP}eps^{HL};
        // on matchings {(0,1),(2,3)}, {(0,2),(1,3)}, {(0,3),(1,2)} the signs
        // are +1, -1, +1 (the middle term is -eps^{DL}eps^{HP}).
        let me = MatchingEpsilon::new(Dimension::new(2), 2);
        let expect = [
            (vec![(0, 1), (2, 3)], 1),
            (vec![(0, 2), (1, 3)], -1),
            (vec![(0, 3), (1, 2)], 1),
        ];
        for (pairs, sign) in expect {
            let found = me
                .matchings()
                .iter()
                .find(|m| m.pairs == pairs)
                .expect("matching present");
            assert_eq!(found.sign, sign, "pairs {pairs:?}");
        }
    }

    #[test]
    fn matching_epsilon_k2_example_value() {
        // k=2, n=2, 1-based index (1,3,2,4) is 0-based (0,2,1,3) -> +1.
        let me = MatchingEpsilon::new(Dimension::new(2), 2);
        assert_eq!(me.evaluate(&[0, 2, 1, 3]), 1.0);
    }

    #[test]
    fn matching_epsilon_vanishes_when_too_many_indices() {
        let me = MatchingEpsilon::new(Dimension::new(1), 2);
        assert!(me.vanishes_identically());
        for idx in MultiIndexIter::new(2, 4) {
            assert_eq!(me.evaluate(&idx), 0.0, "index {idx:?}");
        }
        let me = MatchingEpsilon::new(Dimension::new(2), 3);
        assert!(me.vanishes_identically());
        for idx in MultiIndexIter::new(4, 6) {
            assert_eq!(me.evaluate(&idx), 0.0, "index {idx:?}");
        }
    }

    #[test]
    fn matching_epsilon_k1_equals_symplectic_form() {
        for n in 1..=3 {
            let dim = Dimension::new(n);
            let me = MatchingEpsilon::new(dim, 1);
            let eps = SymplecticForm::standard(dim);
            for a in 0..dim.size() {
                for b in 0..dim.size() {
                    assert_eq!(me.evaluate(&[a, b]), eps.entry(a, b) as f64);
                }
            }
        }
    }

    #[test]
    fn matching_epsilon_totally_antisymmetric_full_scan() {
        for (n, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (2, 3)] {
            let dim = Dimension::new(n);
            let me = MatchingEpsilon::new(dim, k);
            for idx in MultiIndexIter::new(dim.size(), 2 * k) {
                let v = me.evaluate(&idx);
                for i in 0..2 * k {
                    for j in i + 1..2 * k {
                        let mut swapped = idx.clone();
                        swapped.swap(i, j);
                        assert_eq!(me.evaluate(&swapped), -v, "n={n} k={k} idx={idx:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn symmetrize_single_entry_example() {
        // raw(1,2,1,1) = 24 (1-based) -> value 6 at each permutation of (1,1,1,2).
        let dim = Dimension::new(1);
        let mut raw = MultiTensor::zeros(dim, 4);
        raw.set(&[0, 1, 0, 0], c(24.0, 0.0));
        let sym = symmetrize4(&raw).unwrap();
        for idx in [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]] {
            assert_eq!(sym.get(&idx), c(6.0, 0.0), "idx {idx:?}");
        }
        assert_eq!(sym.get(&[0, 0, 0, 0]), c(0.0, 0.0));
        assert_eq!(sym.get(&[1, 1, 1, 1]), c(0.0, 0.0));
        assert_eq!(sym.get(&[0, 1, 1, 0]), c(0.0, 0.0));
    }

    #[test]
    fn symmetrize_idempotent_bitwise() {
        let omega = random_curvature(Dimension::new(2), 99, 1.0);
        let again = symmetrize4(omega.as_tensor()).unwrap();
        assert_eq!(again.as_tensor().entries(), omega.as_tensor().entries());
    }

    #[test]
    fn symmetrize_zero() {
        let dim = Dimension::new(2);
        let raw = MultiTensor::zeros(dim, 4);
        let sym = symmetrize4(&raw).unwrap();
        assert!(sym.as_tensor().entries().iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn symmetrize_rejects_wrong_rank() {
        let raw = MultiTensor::zeros(Dimension::new(1), 3);
        assert_eq!(
            symmetrize4(&raw).unwrap_err(),
            TensorError::RankMismatch { expected: 4, got: 3 }
        );
    }

    #[test]
    fn reality_project_single_entry_example() {
        // n=1, R_1111 = 1 -> Omega_1111 = Omega_2222 = 1, all else 0.
        let dim = Dimension::new(1);
        let mut raw = MultiTensor::zeros(dim, 4);
        raw.set(&[0, 0, 0, 0], c(1.0, 0.0));
        let r = symmetrize4(&raw).unwrap();
        let j = QuaternionicStructure::standard(dim);
        let omega = reality_project(&r, &j).unwrap();
        for idx in MultiIndexIter::new(2, 4) {
            let expect = if idx == [0, 0, 0, 0] || idx == [1, 1, 1, 1] {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            };
            assert_eq!(omega.get(&idx), expect, "idx {idx:?}");
        }
    }

    #[test]
    fn reality_projected_tensor_is_tau_fixed_point() {
        for n in 1..=3 {
            let dim = Dimension::new(n);
            let omega = random_curvature(dim, 7 + n as u64, 1.0);
            let j = QuaternionicStructure::standard(dim);
            let tau = tau_conjugate(omega.as_tensor(), &j).unwrap();
            assert_eq!(tau.entries(), omega.as_tensor().entries(), "n={n}");
        }
    }

    #[test]
    fn tau_is_an_involution() {
        let dim = Dimension::new(2);
        let j = QuaternionicStructure::standard(dim);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let uni = Uniform::new_inclusive(-1.0, 1.0);
        let entries: Vec<Complex64> = (0..dim.size().pow(4))
            .map(|_| c(uni.sample(&mut rng), uni.sample(&mut rng)))
            .collect();
        let t = MultiTensor::from_entries(dim, 4, entries).unwrap();
        let twice = tau_conjugate(&tau_conjugate(&t, &j).unwrap(), &j).unwrap();
        assert_eq!(twice.entries(), t.entries());
    }

    #[test]
    fn quaternionic_structure_squares_to_minus_identity() {
        for n in 1..=3 {
            let j = QuaternionicStructure::standard(Dimension::new(n));
            let m = j.matrix();
            let s = 2 * n;
            for r in 0..s {
                for cc in 0..s {
                    let mut acc = 0i32;
                    for k in 0..s {
                        acc += m[r][k] as i32 * m[k][cc] as i32;
                    }
                    let expect = if r == cc { -1 } else { 0 };
                    assert_eq!(acc, expect, "n={n} ({r},{cc})");
                }
            }
        }
    }

    #[test]
    fn random_curvature_is_replay_identical() {
        let dim = Dimension::new(3);
        let a = random_curvature(dim, 42, 1.0);
        let b = random_curvature(dim, 42, 1.0);
        assert_eq!(a.as_tensor().entries(), b.as_tensor().entries());
        let c2 = random_curvature(dim, 43, 1.0);
        assert_ne!(a.as_tensor().entries(), c2.as_tensor().entries());
    }

    #[test]
    fn contract_pair_basis_vectors() {
        // e0 contract e1 via eps -> eps^{01} = 1 at n=1.
        let dim = Dimension::new(1);
        let eps = SymplecticForm::standard(dim);
        let mut e0 = MultiTensor::zeros(dim, 1);
        e0.set(&[0], c(1.0, 0.0));
        let mut e1 = MultiTensor::zeros(dim, 1);
        e1.set(&[1], c(1.0, 0.0));
        let s = contract_pair(&e0, 0, &e1, 0, &eps).unwrap();
        assert_eq!(s.rank(), 0);
        assert_eq!(s.entries()[0], c(1.0, 0.0));
        // reversed order picks up the sign
        let s = contract_pair(&e1, 0, &e0, 0, &eps).unwrap();
        assert_eq!(s.entries()[0], c(-1.0, 0.0));
    }

    #[test]
    fn contract_with_zero_tensor_is_zero() {
        let dim = Dimension::new(2);
        let eps = SymplecticForm::standard(dim);
        let omega = random_curvature(dim, 11, 1.0);
        let zero = MultiTensor::zeros(dim, 2);
        let out = contract_pair(omega.as_tensor(), 2, &zero, 0, &eps).unwrap();
        assert!(out.entries().iter().all(|z| *z == c(0.0, 0.0)));
    }

    #[test]
    fn contract_rank2_matches_matrix_algebra() {
        // result(i,j) = sum_{A,B} a(i,A) b(j,B) eps^{AB}  ==  (a eps b^T)(i,j)
        let dim = Dimension::new(2);
        let size = dim.size();
        let eps = SymplecticForm::standard(dim);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let uni = Uniform::new_inclusive(-1.0, 1.0);
        let mut mk = || {
            let entries: Vec<Complex64> = (0..size * size)
                .map(|_| c(uni.sample(&mut rng), uni.sample(&mut rng)))
                .collect();
            MultiTensor::from_entries(dim, 2, entries).unwrap()
        };
        let a = mk();
        let b = mk();
        let got = contract_pair(&a, 1, &b, 1, &eps).unwrap();
        for i in 0..size {
            for j in 0..size {
                let mut expect = c(0.0, 0.0);
                for aa in 0..size {
                    for bb in 0..size {
                        expect += a.get(&[i, aa]) * b.get(&[j, bb]) * eps.entry(aa, bb) as f64;
                    }
                }
                let d = (got.get(&[i, j]) - expect).norm();
                assert!(d < 1e-12, "({i},{j}) diff {d}");
            }
        }
    }

    #[test]
    fn contract_invalid_slot_errors() {
        let dim = Dimension::new(1);
        let eps = SymplecticForm::standard(dim);
        let a = MultiTensor::zeros(dim, 2);
        let b = MultiTensor::zeros(dim, 2);
        assert_eq!(
            contract_pair(&a, 2, &b, 0, &eps).unwrap_err(),
            TensorError::InvalidSlot { slot: 2, rank: 2 }
        );
    }

    #[test]
    fn multi_contract_empty_pairs_is_outer_product() {
        let dim = Dimension::new(1);
        let eps = SymplecticForm::standard(dim);
        let mut a = MultiTensor::zeros(dim, 1);
        a.set(&[0], c(2.0, 0.0));
        a.set(&[1], c(3.0, 0.0));
        let out = multi_contract(&a, &a, &[], &eps).unwrap();
        assert_eq!(out.rank(), 2);
        assert_eq!(out.get(&[0, 1]), c(6.0, 0.0));
        assert_eq!(out.get(&[1, 1]), c(9.0, 0.0));
    }

    #[test]
    fn self_contract_traces_identity_like() {
        // T(a,b) = delta_{a,partner(b)} style check: trace of eps itself.
        // Build T(a,b) = eps^{ab} as a tensor; self-contract its two slots:
        // sum_{A,B} eps^{AB} eps^{AB} ... with pairing = sum_A sign(A) T(A, partner(A))
        let dim = Dimension::new(2);
        let eps = SymplecticForm::standard(dim);
        let size = dim.size();
        let mut t = MultiTensor::zeros(dim, 2);
        for a in 0..size {
            for b in 0..size {
                t.set(&[a, b], c(eps.entry(a, b) as f64, 0.0));
            }
        }
        let out = self_contract(&t, &[ContractPair::new(0, 1)], &eps).unwrap();
        // sum_A sign(A) * eps^{A, partner(A)} = sum_A sign(A)^2 = 2n
        assert_eq!(out.rank(), 0);
        assert_eq!(out.entries()[0], c(size as f64, 0.0));
    }
}
