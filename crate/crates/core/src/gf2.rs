//! Dense bit vectors and bit matrices over GF(2).
//!
//! Rows are packed into 64-bit words. Matrix columns carry labels (qubit or
//! term identifiers) so that column-selective operations such as
//! [`BitMatrix::eliminate_columns`] can be expressed in domain terms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    /// Vector of length `len` with ones at `indices`. Repeated indices toggle.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(
            bits.len(),
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        )
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    fn xor_in(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// Copy of `self` with columns re-indexed: bit `i` moves to `map[i]` in a
    /// vector of length `new_len`. Bits whose map entry is `None` are dropped.
    pub fn remap(&self, map: &[Option<usize>], new_len: usize) -> BitVector {
        let mut out = BitVector::zeros(new_len);
        for i in self.ones() {
            if let Some(j) = map[i] {
                out.set(j, true);
            }
        }
        out
    }
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        self.xor_in(rhs);
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-reduced form with the pivot column of every row recorded.
#[derive(Debug, Clone)]
pub struct Echelon {
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
    width: usize,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Clears every pivot column of `v` by adding the matching rows.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut out = v.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if out.get(p) {
                out ^= row;
            }
        }
        out
    }

    pub fn contains(&self, v: &BitVector) -> Result<bool> {
        if v.len() != self.width {
            return Err(Error::LengthMismatch {
                expected: self.width,
                found: v.len(),
            });
        }
        Ok(self.reduce(v).is_zero())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    labels: Vec<usize>,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    /// Empty matrix with columns labelled `0..width`.
    pub fn with_width(width: usize) -> Self {
        Self {
            labels: (0..width).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_labels(labels: Vec<usize>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &l in &labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }
        Ok(Self {
            labels,
            rows: Vec::new(),
        })
    }

    pub fn from_rows(labels: Vec<usize>, rows: Vec<BitVector>) -> Result<Self> {
        let mut m = Self::with_labels(labels)?;
        for r in rows {
            m.push_row(r)?;
        }
        Ok(m)
    }

    /// Matrix whose rows are given as sets of column indices.
    pub fn from_index_rows(width: usize, rows: &[&[usize]]) -> Self {
        let mut m = Self::with_width(width);
        for r in rows {
            m.rows
                .push(BitVector::from_indices(width, r.iter().copied()));
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::with_width(n);
        for i in 0..n {
            m.rows.push(BitVector::from_indices(n, [i]));
        }
        m
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.ncols() {
            return Err(Error::LengthMismatch {
                expected: self.ncols(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row].get(col)
    }

    pub fn column_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn label_index(&self) -> HashMap<usize, usize> {
        self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect()
    }

    /// Vector over this matrix's columns with ones at the given labels.
    pub fn vector_from_labels(&self, labels: impl IntoIterator<Item = usize>) -> Result<BitVector> {
        let index = self.label_index();
        let mut v = BitVector::zeros(self.ncols());
        for l in labels {
            let &i = index.get(&l).ok_or(Error::UnknownLabel(l))?;
            v.flip(i);
        }
        Ok(v)
    }

    pub fn labels_of(&self, v: &BitVector) -> Vec<usize> {
        v.ones().map(|i| self.labels[i]).collect()
    }

    /// Gauss-Jordan elimination choosing pivots in `column_order`. Columns
    /// not listed are never pivoted on. Ties go to the lowest eligible row.
    pub fn echelon(&self, column_order: &[usize]) -> Echelon {
        let mut rows: Vec<BitVector> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for &col in column_order {
            if rank == rows.len() {
                break;
            }
            let Some(found) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(rank, found);
            let (head, tail) = rows.split_at_mut(rank);
            let (pivot_row, rest) = tail.split_first_mut().expect("pivot row exists");
            for r in head.iter_mut().chain(rest.iter_mut()) {
                if r.get(col) {
                    r.xor_in(pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Echelon {
            rows,
            pivots,
            width: self.ncols(),
        }
    }

    /// Reduced row-echelon form with pivots taken in `column_order`; zero rows
    /// are dropped.
    pub fn rref(&self, column_order: &[usize]) -> BitMatrix {
        let e = self.echelon(column_order);
        BitMatrix {
            labels: self.labels.clone(),
            rows: e.rows,
        }
    }

    fn natural_order(&self) -> Vec<usize> {
        (0..self.ncols()).collect()
    }

    pub fn rank(&self) -> usize {
        self.echelon(&self.natural_order()).rank()
    }

    pub fn in_rowspace(&self, v: &BitVector) -> Result<bool> {
        self.echelon(&self.natural_order()).contains(v)
    }

    /// Adds rows of `self` to `v` so that every row's leading column is
    /// cleared. Assumes `self` is already in reduced form.
    pub fn reduce_vector(&self, v: &BitVector) -> BitVector {
        let mut out = v.clone();
        for row in &self.rows {
            if let Some(p) = row.first_one() {
                if out.get(p) {
                    out ^= row;
                }
            }
        }
        out
    }

    pub fn rowspace_equal(&self, other: &BitMatrix) -> Result<bool> {
        if self.labels != other.labels {
            return Err(Error::LabelMismatch);
        }
        let a = self.echelon(&self.natural_order());
        let b = other.echelon(&other.natural_order());
        if a.rank() != b.rank() {
            return Ok(false);
        }
        for r in b.rows() {
            if !a.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The subspace of the rowspace that vanishes on `cols`, projected onto
    /// the remaining columns (in their original order).
    pub fn eliminate_columns(&self, cols: &BTreeSet<usize>) -> Result<BitMatrix> {
        let index = self.label_index();
        let mut first = Vec::with_capacity(cols.len());
        for l in cols {
            first.push(*index.get(l).ok_or(Error::UnknownLabel(*l))?);
        }
        first.sort_unstable();
        let eliminated: BTreeSet<usize> = first.iter().copied().collect();
        let mut order = first;
        order.extend((0..self.ncols()).filter(|i| !eliminated.contains(i)));
        let e = self.echelon(&order);

        let mut map = vec![None; self.ncols()];
        let mut kept = Vec::new();
        for (i, &l) in self.labels.iter().enumerate() {
            if !eliminated.contains(&i) {
                map[i] = Some(kept.len());
                kept.push(l);
            }
        }
        let width = kept.len();
        let rows = e
            .rows()
            .iter()
            .zip(e.pivots())
            .filter(|(_, p)| !eliminated.contains(p))
            .map(|(r, _)| r.remap(&map, width))
            .collect();
        Ok(BitMatrix { labels: kept, rows })
    }

    /// Restricts the matrix to the given labels, in that order.
    pub fn select_columns(&self, labels: &[usize]) -> Result<BitMatrix> {
        let index = self.label_index();
        let mut map = vec![None; self.ncols()];
        for (j, l) in labels.iter().enumerate() {
            let &i = index.get(l).ok_or(Error::UnknownLabel(*l))?;
            map[i] = Some(j);
        }
        let rows = self.rows.iter().map(|r| r.remap(&map, labels.len())).collect();
        BitMatrix::from_rows(labels.to_vec(), rows)
    }

    /// Basis of `{x : every row · x = 0}`, one vector per non-pivot column.
    pub fn nullspace(&self) -> Vec<BitVector> {
        let e = self.echelon(&self.natural_order());
        let mut pivot = vec![false; self.ncols()];
        for &p in e.pivots() {
            pivot[p] = true;
        }
        (0..self.ncols())
            .filter(|&f| !pivot[f])
            .map(|f| {
                let mut v = BitVector::zeros(self.ncols());
                v.set(f, true);
                for (row, &p) in e.rows().iter().zip(e.pivots()) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Re-expresses the matrix over a new label set: columns are matched by
    /// label, labels absent from `self` become zero columns. Every label of
    /// `self` must appear in `labels`.
    pub fn relabel_onto(&self, labels: &[usize]) -> Result<BitMatrix> {
        let target: HashMap<usize, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let mut map = vec![None; self.ncols()];
        for (i, l) in self.labels.iter().enumerate() {
            map[i] = Some(*target.get(l).ok_or(Error::UnknownLabel(*l))?);
        }
        let rows = self.rows.iter().map(|r| r.remap(&map, labels.len())).collect();
        BitMatrix::from_rows(labels.to_vec(), rows)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {:?}", self.labels)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Brute-force rowspace: every XOR combination of the rows.
    fn span(m: &BitMatrix) -> BTreeSet<BitVector> {
        let n = m.nrows();
        assert!(n <= 16);
        (0u32..1 << n)
            .map(|mask| {
                let mut v = BitVector::zeros(m.ncols());
                for i in 0..n {
                    if mask >> i & 1 == 1 {
                        v ^= &m.rows()[i];
                    }
                }
                v
            })
            .collect()
    }

    fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_cols, 0..=max_rows).prop_flat_map(|(c, r)| {
            proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r).prop_map(move |rows| {
                let mut m = BitMatrix::with_width(c);
                for r in rows {
                    m.push_row(BitVector::from_bools(&r)).unwrap();
                }
                m
            })
        })
    }

    #[test]
    fn ones_iterates_across_words() {
        let v = BitVector::from_indices(200, [0, 63, 64, 130, 199]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 130, 199]);
        assert_eq!(v.count_ones(), 5);
    }

    #[test]
    fn identity_is_its_own_rref() {
        let m = BitMatrix::identity(5);
        assert_eq!(m.rref(&[0, 1, 2, 3, 4]), m);
        assert_eq!(m.rank(), 5);
    }

    #[test]
    fn zero_and_empty_matrices() {
        let mut z = BitMatrix::with_width(4);
        z.push_row(BitVector::zeros(4)).unwrap();
        z.push_row(BitVector::zeros(4)).unwrap();
        assert_eq!(z.rank(), 0);
        assert_eq!(z.rref(&[0, 1, 2, 3]).nrows(), 0);
        let e = BitMatrix::with_width(0);
        assert!(e.rowspace_equal(&BitMatrix::with_width(0)).unwrap());
        assert!(z.in_rowspace(&BitVector::zeros(4)).unwrap());
    }

    #[test]
    fn length_mismatch_is_reported() {
        let m = BitMatrix::identity(3);
        assert_eq!(
            m.in_rowspace(&BitVector::zeros(4)),
            Err(Error::LengthMismatch { expected: 3, found: 4 })
        );
    }

    #[test]
    fn label_mismatch_is_reported() {
        let a = BitMatrix::identity(3);
        let b = BitMatrix::with_labels(vec![0, 1, 7]).unwrap();
        assert_eq!(a.rowspace_equal(&b), Err(Error::LabelMismatch));
        assert_eq!(
            a.eliminate_columns(&[9].into_iter().collect()),
            Err(Error::UnknownLabel(9))
        );
    }

    #[test]
    fn pivot_order_is_respected() {
        let m = BitMatrix::from_index_rows(3, &[&[0, 1], &[1, 2]]);
        let e = m.echelon(&[2, 1, 0]);
        assert_eq!(e.pivots(), &[2, 1]);
        for (r, &p) in e.rows().iter().zip(e.pivots()) {
            assert!(r.get(p));
            for (r2, &p2) in e.rows().iter().zip(e.pivots()) {
                if p2 != p {
                    assert!(!r2.get(p));
                }
            }
        }
    }

    #[test]
    fn reduce_vector_clears_leading_columns() {
        let m = BitMatrix::from_index_rows(4, &[&[0, 2], &[1, 3]]);
        let v = BitVector::from_indices(4, [0, 1]);
        assert_eq!(m.reduce_vector(&v), BitVector::from_indices(4, [2, 3]));
        let untouched = BitVector::from_indices(4, [2]);
        assert_eq!(m.reduce_vector(&untouched), untouched);
    }

    #[test]
    fn eliminate_nothing_keeps_rowspace() {
        let m = BitMatrix::from_index_rows(4, &[&[0, 2], &[1, 3], &[0, 1, 2, 3]]);
        let e = m.eliminate_columns(&BTreeSet::new()).unwrap();
        assert!(e.rowspace_equal(&m).unwrap());
    }

    proptest! {
        #[test]
        fn nullspace_is_orthogonal_and_complete(m in matrix_strategy(12, 12)) {
            let basis = m.nullspace();
            prop_assert_eq!(basis.len(), m.ncols() - m.rank());
            let kernel: BTreeSet<BitVector> = (0u32..1 << m.ncols())
                .map(|x| BitVector::from_indices(m.ncols(), (0..m.ncols()).filter(|i| x >> i & 1 == 1)))
                .filter(|x| m.rows().iter().all(|r| r.ones().filter(|&i| x.get(i)).count() % 2 == 0))
                .collect();
            let b = BitMatrix::from_rows((0..m.ncols()).collect(), basis).unwrap();
            prop_assert_eq!(b.rank(), b.nrows());
            prop_assert_eq!(span(&b), kernel);
        }
    }

    proptest! {
        #[test]
        fn rref_preserves_rowspace(m in matrix_strategy(64, 64)) {
            let order: Vec<usize> = (0..m.ncols()).rev().collect();
            let r = m.rref(&order);
            for row in r.rows() {
                prop_assert!(m.in_rowspace(row).unwrap());
            }
            for row in m.rows() {
                prop_assert!(r.in_rowspace(row).unwrap());
            }
            prop_assert_eq!(r.rank(), m.rank());
            prop_assert_eq!(r.nrows(), m.rank());
        }

        #[test]
        fn rank_invariant_under_row_updates(m in matrix_strategy(12, 20), i in 0usize..12, j in 0usize..12) {
            let n = m.nrows();
            prop_assume!(n >= 2);
            let (i, j) = (i % n, j % n);
            prop_assume!(i != j);
            let mut rows = m.rows().to_vec();
            let rj = rows[j].clone();
            rows[i] ^= &rj;
            rows.swap(0, n - 1);
            let m2 = BitMatrix::from_rows(m.labels().to_vec(), rows).unwrap();
            prop_assert_eq!(m.rank(), m2.rank());
            prop_assert!(m.rowspace_equal(&m2).unwrap());
        }

        #[test]
        fn in_rowspace_matches_enumeration(m in matrix_strategy(8, 10), v in proptest::collection::vec(any::<bool>(), 10)) {
            let v = BitVector::from_bools(&v[..m.ncols()]);
            prop_assert_eq!(m.in_rowspace(&v).unwrap(), span(&m).contains(&v));
        }

        #[test]
        fn reduce_vector_stays_in_coset(m in matrix_strategy(10, 16), v in proptest::collection::vec(any::<bool>(), 16)) {
            let r = m.rref(&(0..m.ncols()).collect::<Vec<_>>());
            let v = BitVector::from_bools(&v[..m.ncols()]);
            let red = r.reduce_vector(&v);
            prop_assert!(m.in_rowspace(&(&v ^ &red)).unwrap());
            for row in r.rows() {
                prop_assert!(!red.get(row.first_one().unwrap()));
            }
        }

        #[test]
        fn eliminate_columns_matches_enumeration(
            m in matrix_strategy(10, 12),
            picks in proptest::collection::vec(any::<bool>(), 12),
        ) {
            let cols: BTreeSet<usize> = (0..m.ncols()).filter(|&i| picks[i]).collect();
            let e = m.eliminate_columns(&cols).unwrap();
            let kept: Vec<usize> = (0..m.ncols()).filter(|i| !cols.contains(i)).collect();
            prop_assert_eq!(e.labels(), &kept[..]);
            let expected: BTreeSet<BitVector> = span(&m)
                .into_iter()
                .filter(|v| cols.iter().all(|&c| !v.get(c)))
                .map(|v| {
                    let map: Vec<Option<usize>> = (0..m.ncols())
                        .map(|i| kept.iter().position(|&k| k == i))
                        .collect();
                    v.remap(&map, kept.len())
                })
                .collect();
            prop_assert_eq!(span(&e), expected);
        }
    }
}
