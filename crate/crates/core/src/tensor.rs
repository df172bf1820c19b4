//! Dense symmetric tensor storage and contraction kernels.
//!
//! An order-m, dimension-n tensor is stored as the full dense array of n^m
//! values in row-major multi-index order. The problem sizes of interest stay
//! small (n <= 62, m = 3 is about 238k doubles), so density keeps the
//! contraction kernels trivial: a contraction against a vector is repeated
//! last-mode reduction of the dense array. Memory is bounded by n^m * 8
//! bytes and construction refuses to cross a configurable cap.

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use std::fmt::Write as _;
use std::path::Path;

/// Default construction cap on dense storage: 2^31 bytes.
pub const DEFAULT_STORAGE_CAP: u64 = 1 << 31;

/// Order-m, dimension-n real symmetric tensor, dense row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensor {
    m: usize,
    n: usize,
    values: Vec<f64>,
}

/// Sparse symmetric input: one value per sorted index tuple, 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryList {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<(Vec<usize>, f64)>,
}

/// Output of a full contraction pass at a point x: the matrix A x^{m-2},
/// the vector A x^{m-1} = M x, and the scalar A x^m = v . x.
#[derive(Debug, Clone)]
pub struct Contractions {
    pub matrix: SymMatrix,
    pub vector: Vec<f64>,
    pub scalar: f64,
}

impl EntryList {
    pub fn new(m: usize, n: usize, entries: Vec<(Vec<usize>, f64)>) -> Result<Self> {
        let list = Self { m, n, entries };
        list.validate()?;
        Ok(list)
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 {
            return Err(Error::BadOrder(self.m));
        }
        if self.n < 1 {
            return Err(Error::BadDimension(self.n));
        }
        let mut seen = std::collections::HashSet::new();
        for (idx, val) in &self.entries {
            if idx.len() != self.m {
                return Err(Error::DimensionMismatch {
                    expected: self.m,
                    got: idx.len(),
                });
            }
            for &i in idx {
                if i < 1 || i > self.n {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        n: self.n,
                    });
                }
            }
            if idx.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::UnsortedIndex(idx.clone()));
            }
            if !seen.insert(idx.clone()) {
                return Err(Error::DuplicateEntry(idx.clone()));
            }
            if !val.is_finite() {
                return Err(Error::NonFinite("tensor entry"));
            }
        }
        Ok(())
    }
}

impl SymmetricTensor {
    /// Symmetrize a sparse entry list into dense storage: every index
    /// permutation of a listed tuple carries the listed value, everything
    /// else is zero.
    pub fn from_entries(entries: &EntryList) -> Result<Self> {
        Self::from_entries_with_cap(entries, DEFAULT_STORAGE_CAP)
    }

    pub fn from_entries_with_cap(entries: &EntryList, cap: u64) -> Result<Self> {
        entries.validate()?;
        let (m, n) = (entries.m, entries.n);
        let len = checked_storage_len(m, n, cap)?;
        let mut values = vec![0.0; len];
        let mut idx0 = vec![0usize; m];
        for (idx, val) in &entries.entries {
            for (d, &i) in idx0.iter_mut().zip(idx) {
                *d = i - 1;
            }
            for_each_permutation(&mut idx0.clone(), &mut |perm| {
                values[flat_index(n, perm)] = *val;
            });
        }
        Ok(Self { m, n, values })
    }

    /// Wrap a dense value array directly; checks size, finiteness and full
    /// permutation symmetry.
    pub fn from_dense(m: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::BadOrder(m));
        }
        if n < 1 {
            return Err(Error::BadDimension(n));
        }
        let len = checked_storage_len(m, n, DEFAULT_STORAGE_CAP)?;
        if values.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tensor values"));
        }
        let t = Self { m, n, values };
        t.check_symmetry()?;
        Ok(t)
    }

    fn check_symmetry(&self) -> Result<()> {
        let mut idx = vec![0usize; self.m];
        loop {
            let base = self.values[flat_index(self.n, &idx)];
            let mut perm = idx.clone();
            let mut ok = true;
            for_each_permutation(&mut perm, &mut |p| {
                if self.values[flat_index(self.n, p)] != base {
                    ok = false;
                }
            });
            if !ok {
                return Err(Error::NotSymmetric(f64::NAN));
            }
            if !next_multi_index(&mut idx, self.n) {
                return Ok(());
            }
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.m);
        self.values[flat_index(self.n, idx)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// A x^{m-2}, A x^{m-1} and A x^m in one pass.
    ///
    /// The dense array is contracted one trailing mode at a time down to a
    /// matrix M; then v = M x and s = v . x, so the three outputs are
    /// mutually consistent by construction.
    pub fn contract_all(&self, x: &[f64]) -> Result<Contractions> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("contraction point"));
        }
        let n = self.n;
        let mut buf = self.values.clone();
        let mut len = buf.len();
        for _ in 0..self.m - 2 {
            let out_len = len / n;
            for o in 0..out_len {
                let chunk = &buf[o * n..(o + 1) * n];
                buf[o] = chunk.iter().zip(x).map(|(a, b)| a * b).sum();
            }
            len = out_len;
            buf.truncate(len);
        }
        let matrix = SymMatrix::new(n, buf)?;
        let vector = matrix.apply(x);
        let scalar = vector.iter().zip(x).map(|(a, b)| a * b).sum();
        Ok(Contractions {
            matrix,
            vector,
            scalar,
        })
    }

    /// Canonical sorted entry list: one line per distinct nonzero value
    /// class, nondecreasing 1-based indices.
    pub fn to_entries(&self) -> EntryList {
        let mut entries = Vec::new();
        let mut idx = vec![0usize; self.m];
        loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                let v = self.values[flat_index(self.n, &idx)];
                if v != 0.0 {
                    entries.push((idx.iter().map(|i| i + 1).collect(), v));
                }
            }
            if !next_multi_index(&mut idx, self.n) {
                break;
            }
        }
        EntryList {
            m: self.m,
            n: self.n,
            entries,
        }
    }

    /// Serialize in the tensor text format.
    pub fn to_text(&self) -> String {
        let list = self.to_entries();
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.m, self.n);
        for (idx, val) in &list.entries {
            for i in idx {
                let _ = write!(out, "{i} ");
            }
            let _ = writeln!(out, "{val}");
        }
        out
    }

    /// Parse the tensor text format: first non-comment line `m n`, then one
    /// `i_1 ... i_m value` line per entry with sorted 1-based indices.
    /// Lines starting with `#` are comments.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let int = |s: &str, what: &str| -> Result<usize> {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("{what}: {e}"),
                })
            };
            let real = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("value: {e}"),
                })
            };
            match header {
                None => {
                    if fields.len() != 2 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: "expected header `m n`".into(),
                        });
                    }
                    header = Some((int(fields[0], "order")?, int(fields[1], "dimension")?));
                }
                Some((m, _)) => {
                    if fields.len() != m + 1 {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("expected {m} indices and a value"),
                        });
                    }
                    let idx = fields[..m]
                        .iter()
                        .map(|f| int(f, "index"))
                        .collect::<Result<Vec<_>>>()?;
                    entries.push((idx, real(fields[m])?));
                }
            }
        }
        let (m, n) = header.ok_or(Error::Parse {
            line: 0,
            msg: "empty tensor file".into(),
        })?;
        Self::from_entries(&EntryList::new(m, n, entries)?)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn checked_storage_len(m: usize, n: usize, cap: u64) -> Result<usize> {
    let mut len: u128 = 1;
    for _ in 0..m {
        len = len.saturating_mul(n as u128);
    }
    let bytes = len.saturating_mul(8);
    if bytes > cap as u128 {
        return Err(Error::StorageCap { m, n, bytes, cap });
    }
    Ok(len as usize)
}

fn flat_index(n: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Advance a row-major multi-index; false once exhausted.
fn next_multi_index(idx: &mut [usize], n: usize) -> bool {
    for d in (0..idx.len()).rev() {
        idx[d] += 1;
        if idx[d] < n {
            return true;
        }
        idx[d] = 0;
    }
    false
}

/// Heap's algorithm; visits every arrangement (repeats are harmless for
/// idempotent writes).
fn for_each_permutation(items: &mut [usize], f: &mut impl FnMut(&[usize])) {
    fn heap(k: usize, items: &mut [usize], f: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            f(items);
            return;
        }
        for i in 0..k {
            heap(k - 1, items, f);
            if k.is_multiple_of(2) {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    let k = items.len();
    heap(k, items, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{example1, example2};
    use crate::rng::SplitMix64;
    use proptest::prelude::*;

    /// Direct summation over all index m-tuples; the independent oracle the
    /// optimized kernel is checked against.
    pub fn brute_force_vector(t: &SymmetricTensor, x: &[f64]) -> Vec<f64> {
        let (m, n) = (t.order(), t.dim());
        let mut v = vec![0.0; n];
        let mut idx = vec![0usize; m];
        loop {
            let mut prod = t.get(&idx);
            for &i in &idx[1..] {
                prod *= x[i];
            }
            v[idx[0]] += prod;
            if !next_multi_index(&mut idx, n) {
                break;
            }
        }
        v
    }

    fn brute_force_scalar(t: &SymmetricTensor, x: &[f64]) -> f64 {
        brute_force_vector(t, x)
            .iter()
            .zip(x)
            .map(|(a, b)| a * b)
            .sum()
    }

    #[test]
    fn single_diagonal_entry() {
        let e = EntryList::new(3, 2, vec![(vec![1, 1, 1], 1.0)]).unwrap();
        let t = SymmetricTensor::from_entries(&e).unwrap();
        assert_eq!(t.get(&[0, 0, 0]), 1.0);
        let mut idx = vec![0usize; 3];
        loop {
            if idx != [0, 0, 0] {
                assert_eq!(t.get(&idx), 0.0);
            }
            if !next_multi_index(&mut idx, 2) {
                break;
            }
        }
    }

    #[test]
    fn example1_permutation_values() {
        let t = example1();
        assert_eq!(t.get(&[0, 1, 2]), -0.1790);
        assert_eq!(t.get(&[2, 0, 1]), -0.1790);
        assert_eq!(t.get(&[1, 2, 0]), -0.1790);
        assert_eq!(t.get(&[0, 0, 0]), -0.1281);
    }

    #[test]
    fn example2_permutation_values() {
        let t = example2();
        // a_2233 at all six distinct arrangements
        for perm in [
            [1, 1, 2, 2],
            [1, 2, 1, 2],
            [1, 2, 2, 1],
            [2, 1, 1, 2],
            [2, 1, 2, 1],
            [2, 2, 1, 1],
        ] {
            assert_eq!(t.get(&perm), 0.2127);
        }
    }

    #[test]
    fn contract_single_entry() {
        let e = EntryList::new(3, 2, vec![(vec![1, 1, 1], 1.0)]).unwrap();
        let t = SymmetricTensor::from_entries(&e).unwrap();
        let c = t.contract_all(&[1.0, 0.0]).unwrap();
        assert_eq!(c.matrix.get(0, 0), 1.0);
        assert_eq!(c.matrix.get(0, 1), 0.0);
        assert_eq!(c.matrix.get(1, 1), 0.0);
        assert_eq!(c.vector, vec![1.0, 0.0]);
        assert_eq!(c.scalar, 1.0);
    }

    #[test]
    fn contract_diagonal_fourth_order() {
        let e = EntryList::new(4, 3, (1..=3).map(|i| (vec![i; 4], 1.0)).collect()).unwrap();
        let t = SymmetricTensor::from_entries(&e).unwrap();
        let c = t.contract_all(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(c.vector, vec![1.0, 0.0, 0.0]);
        assert_eq!(c.scalar, 1.0); // (1, e_1) is a Z-eigenpair
    }

    #[test]
    fn contract_example1_matches_brute_force() {
        let t = example1();
        let x = [-0.402911, 0.903051, -0.148865];
        let c = t.contract_all(&x).unwrap();
        let s = brute_force_scalar(&t, &x);
        assert!((c.scalar - s).abs() <= 1e-13 * s.abs().max(1.0));
    }

    #[test]
    fn contraction_matches_oracle_on_random_tensors() {
        let mut g = SplitMix64::new(123);
        for &(m, n) in &[(2usize, 4usize), (3, 3), (3, 5), (4, 3), (4, 5)] {
            let t = random_tensor(m, n, &mut g);
            for _ in 0..5 {
                let x = g.unit_uniform_sphere(n);
                let c = t.contract_all(&x).unwrap();
                let want = brute_force_vector(&t, &x);
                for (got, want) in c.vector.iter().zip(&want) {
                    assert!(
                        (got - want).abs() <= 1e-13 * want.abs().max(1.0),
                        "kernel {got} vs oracle {want} (m={m}, n={n})"
                    );
                }
            }
        }
    }

    #[test]
    fn contraction_rejects_dimension_mismatch() {
        let t = example1();
        assert!(matches!(
            t.contract_all(&[1.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn entry_list_rejections() {
        assert!(matches!(
            EntryList::new(3, 2, vec![(vec![1, 1, 1], 1.0), (vec![1, 1, 1], 2.0)]),
            Err(Error::DuplicateEntry(_))
        ));
        assert!(matches!(
            EntryList::new(3, 2, vec![(vec![1, 1, 3], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            EntryList::new(3, 2, vec![(vec![2, 1, 1], 1.0)]),
            Err(Error::UnsortedIndex(_))
        ));
    }

    #[test]
    fn storage_cap_is_enforced() {
        let e = EntryList::new(3, 20, vec![(vec![1, 1, 1], 1.0)]).unwrap();
        assert!(matches!(
            SymmetricTensor::from_entries_with_cap(&e, 1024),
            Err(Error::StorageCap { .. })
        ));
    }

    #[test]
    fn text_parse_rejections() {
        assert!(matches!(
            SymmetricTensor::from_text(""),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SymmetricTensor::from_text("3\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SymmetricTensor::from_text("3 3\n1 1 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            SymmetricTensor::from_text("3 3\n1 1 x 0.5\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn text_round_trip_canonical() {
        let t = example1();
        let text = t.to_text();
        assert!(text.starts_with("3 3\n"));
        let back = SymmetricTensor::from_text(&text).unwrap();
        assert_eq!(t, back);
        // comments and blank lines are tolerated
        let with_comments = format!("# tensor\n\n{text}# trailing\n");
        assert_eq!(SymmetricTensor::from_text(&with_comments).unwrap(), t);
    }

    fn random_tensor(m: usize, n: usize, g: &mut SplitMix64) -> SymmetricTensor {
        let mut entries = Vec::new();
        let mut idx = vec![0usize; m];
        loop {
            if idx.windows(2).all(|w| w[0] <= w[1]) {
                entries.push((idx.iter().map(|i| i + 1).collect(), g.uniform_symmetric()));
            }
            if !next_multi_index(&mut idx, n) {
                break;
            }
        }
        SymmetricTensor::from_entries(&EntryList::new(m, n, entries).unwrap()).unwrap()
    }

    proptest! {
        #[test]
        fn contraction_matrix_is_symmetric(seed in 0u64..500) {
            let mut g = SplitMix64::new(seed);
            let t = random_tensor(3, 4, &mut g);
            let x = g.unit_uniform_sphere(4);
            let c = t.contract_all(&x).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    prop_assert!((c.matrix.get(i, j) - c.matrix.get(j, i)).abs() <= 1e-14);
                }
            }
        }

        #[test]
        fn scalar_contraction_is_homogeneous(seed in 0u64..500, c in -3.0f64..3.0) {
            // A(cx)^m = c^m A x^m
            let mut g = SplitMix64::new(seed.wrapping_add(999));
            let t = random_tensor(3, 3, &mut g);
            let x = g.unit_uniform_sphere(3);
            let cx: Vec<f64> = x.iter().map(|v| c * v).collect();
            let s1 = t.contract_all(&x).unwrap().scalar;
            let s2 = t.contract_all(&cx).unwrap().scalar;
            let want = c.powi(3) * s1;
            prop_assert!((s2 - want).abs() <= 1e-12 * want.abs().max(1.0));
        }

        #[test]
        fn permuted_reads_return_listed_value(i in 1usize..=3, j in 1usize..=3, k in 1usize..=3) {
            let mut idx = vec![i, j, k];
            idx.sort_unstable();
            let e = EntryList::new(3, 3, vec![(idx, 0.5)]).unwrap();
            let t = SymmetricTensor::from_entries(&e).unwrap();
            prop_assert_eq!(t.get(&[i - 1, j - 1, k - 1]), 0.5);
        }
    }
}
