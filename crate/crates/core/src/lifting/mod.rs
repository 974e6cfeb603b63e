//! Shift matrices and their lifting to quasi-cyclic parity-check matrices.
//!
//! Circulant orientation is fixed crate-wide: the block for shift `s` has its
//! ones at `(r, (r + s) mod N)`. Check node `r` of block row `j` is therefore
//! adjacent to variable node `r + P[j][l]` of block column `l`.

mod alist;

pub use alist::{export_alist, import_alist, AlistError};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::group::{add_mod, sub_mod, GroupError, Permutation, Residue, MAX_MODULUS};
use crate::textdoc::{DocReader, DocWriter, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftingError {
    #[error("shift matrix dimensions must be positive (got {rows} x {cols})")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("entry {value} at ({row}, {col}) is not below the lifting factor {n}")]
    EntryOutOfRange { row: usize, col: usize, value: u32, n: u32 },
    #[error("expected {expected} entries, got {got}")]
    WrongEntryCount { expected: usize, got: usize },
    #[error("mapping must fix 0 (p(0) = {0})")]
    MappingMovesZero(u32),
    #[error("column {0} is out of range")]
    ColumnOutOfRange(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A `J x L` matrix of circulant shifts over `Z/N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShiftMatrix {
    rows: usize,
    cols: usize,
    n: u32,
    entries: Vec<u32>,
}

impl ShiftMatrix {
    /// Entries are given row-major and must already be reduced.
    pub fn new(rows: usize, cols: usize, n: u32, entries: Vec<u32>) -> Result<Self, LiftingError> {
        if rows == 0 || cols == 0 {
            return Err(LiftingError::EmptyMatrix { rows, cols });
        }
        if n == 0 || n as u64 > MAX_MODULUS {
            return Err(GroupError::BadModulus(n as u64).into());
        }
        if entries.len() != rows * cols {
            return Err(LiftingError::WrongEntryCount {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(i) = entries.iter().position(|&e| e >= n) {
            return Err(LiftingError::EntryOutOfRange {
                row: i / cols,
                col: i % cols,
                value: entries[i],
                n,
            });
        }
        Ok(ShiftMatrix { rows, cols, n, entries })
    }

    /// Builds from rows of possibly unreduced (even negative) integers.
    pub fn from_rows<R: AsRef<[i64]>>(n: u32, rows: &[R]) -> Result<Self, LiftingError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(LiftingError::WrongEntryCount {
                    expected: cols,
                    got: row.len(),
                });
            }
            for &v in row {
                entries.push(Residue::new(v, n as u64)?.value());
            }
        }
        Self::new(rows.len(), cols, n, entries)
    }

    pub fn zeros(rows: usize, cols: usize, n: u32) -> Result<Self, LiftingError> {
        Self::new(rows, cols, n, vec![0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn lifting_factor(&self) -> u32 {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        assert!(value < self.n, "shift {value} out of range");
        self.entries[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn is_canonical(&self) -> bool {
        self.row(0).iter().all(|&e| e == 0) && (0..self.rows).all(|r| self.get(r, 0) == 0)
    }

    /// Same shifts with columns reordered so that new column `i` is old column `order[i]`.
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self, LiftingError> {
        assert_eq!(order.len(), self.cols, "column order has wrong length");
        let mut entries = Vec::with_capacity(self.entries.len());
        for r in 0..self.rows {
            for &c in order {
                if c >= self.cols {
                    return Err(LiftingError::ColumnOutOfRange(c));
                }
                entries.push(self.get(r, c));
            }
        }
        Self::new(self.rows, self.cols, self.n, entries)
    }

    pub fn delete_column(&self, col: usize) -> Result<Self, LiftingError> {
        if col >= self.cols {
            return Err(LiftingError::ColumnOutOfRange(col));
        }
        let order: Vec<usize> = (0..self.cols).filter(|&c| c != col).collect();
        let entries = (0..self.rows)
            .flat_map(|r| order.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Self::new(self.rows, self.cols - 1, self.n, entries)
    }

    /// Adds `c` to every entry of row `row`, which yields an isomorphic Tanner graph.
    pub fn shift_row(&mut self, row: usize, c: u32) {
        for col in 0..self.cols {
            let v = add_mod(self.get(row, col), c, self.n);
            self.set(row, col, v);
        }
    }

    pub fn shift_col(&mut self, col: usize, c: u32) {
        for row in 0..self.rows {
            let v = add_mod(self.get(row, col), c, self.n);
            self.set(row, col, v);
        }
    }

    pub fn to_text(&self) -> String {
        let mut doc = DocWriter::new("shift-matrix");
        doc.field("rows", self.rows)
            .field("cols", self.cols)
            .field("lifting-factor", self.n);
        for r in 0..self.rows {
            doc.numbers(self.row(r));
        }
        doc.finish()
    }

    pub fn from_text(text: &str) -> Result<Self, LiftingError> {
        let mut doc = DocReader::open(text, "shift-matrix")?;
        let rows: usize = doc.parse_field("rows")?;
        let cols: usize = doc.parse_field("cols")?;
        let n: u32 = doc.parse_field("lifting-factor")?;
        let mut entries = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            entries.extend(doc.numbers::<u32>(cols)?);
        }
        doc.finish()?;
        Self::new(rows, cols, n, entries)
    }
}

impl fmt::Display for ShiftMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (self.n.max(1) - 1).to_string().len();
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| format!("{v:>width$}")).collect();
            writeln!(f, "[{}]", line.join(" "))?;
        }
        Ok(())
    }
}

/// An `N x N` circulant permutation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Circulant {
    pub shift: u32,
    pub n: u32,
}

impl Circulant {
    /// Column of the single one in row `r`.
    pub fn col_of(self, r: u32) -> u32 {
        add_mod(r, self.shift, self.n)
    }

    pub fn row_of(self, c: u32) -> u32 {
        sub_mod(c, self.shift, self.n)
    }

    pub fn ones(self) -> impl Iterator<Item = (u32, u32)> {
        (0..self.n).map(move |r| (r, self.col_of(r)))
    }

    /// Matrix product `self * other`.
    pub fn compose(self, other: Circulant) -> Circulant {
        assert_eq!(self.n, other.n, "circulants of different sizes");
        Circulant {
            shift: add_mod(self.shift, other.shift, self.n),
            n: self.n,
        }
    }
}

pub fn cpm(shift: Residue) -> Circulant {
    Circulant {
        shift: shift.value(),
        n: shift.modulus(),
    }
}

/// The canonical 3 x N shift matrix whose third row is `p`.
pub fn canonical_from_mapping(p: &Permutation) -> Result<ShiftMatrix, LiftingError> {
    if p.apply(0) != 0 {
        return Err(LiftingError::MappingMovesZero(p.apply(0)));
    }
    let n = p.modulus();
    let mut entries = vec![0; n as usize];
    entries.extend(0..n);
    entries.extend_from_slice(p.images());
    ShiftMatrix::new(3, n as usize, n, entries)
}

/// Equivalent shift matrix with zero first row and column.
///
/// Each column is shifted by minus its first-row entry, then each row by minus
/// its first-column entry.
pub fn normalize(p: &ShiftMatrix) -> ShiftMatrix {
    let n = p.n;
    let mut out = p.clone();
    for c in 0..out.cols {
        let top = out.get(0, c);
        out.shift_col(c, sub_mod(0, top, n));
    }
    for r in 0..out.rows {
        let left = out.get(r, 0);
        out.shift_row(r, sub_mod(0, left, n));
    }
    out
}

/// Block structure remembered by a lifted matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcStructure {
    pub shifts: ShiftMatrix,
}

/// A sparse binary parity-check matrix with both adjacency views.
///
/// Equality compares the set of one-positions only.
#[derive(Debug, Clone)]
pub struct ParityCheckMatrix {
    nrows: usize,
    ncols: usize,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
    qc: Option<QcStructure>,
}

impl PartialEq for ParityCheckMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.nrows == other.nrows && self.ncols == other.ncols && self.row_adj == other.row_adj
    }
}

impl Eq for ParityCheckMatrix {}

impl ParityCheckMatrix {
    /// Builds from one-positions; duplicates are merged.
    pub fn from_ones(nrows: usize, ncols: usize, ones: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut row_sets = vec![BTreeSet::new(); nrows];
        for (r, c) in ones {
            assert!(r < nrows && c < ncols, "one at ({r}, {c}) outside {nrows} x {ncols}");
            row_sets[r].insert(c);
        }
        let mut col_adj = vec![Vec::new(); ncols];
        let row_adj: Vec<Vec<usize>> = row_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        for (r, cols) in row_adj.iter().enumerate() {
            for &c in cols {
                col_adj[c].push(r);
            }
        }
        ParityCheckMatrix {
            nrows,
            ncols,
            row_adj,
            col_adj,
            qc: None,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_adj[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_adj[c]
    }

    pub fn num_ones(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    pub fn contains(&self, r: usize, c: usize) -> bool {
        self.row_adj[r].binary_search(&c).is_ok()
    }

    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_adj
            .iter()
            .enumerate()
            .flat_map(|(r, cols)| cols.iter().map(move |&c| (r, c)))
    }

    /// Block structure, present for matrices produced by [`lift`].
    pub fn qc_structure(&self) -> Option<&QcStructure> {
        self.qc.as_ref()
    }
}

/// Replaces every shift by its circulant block.
pub fn lift(p: &ShiftMatrix) -> ParityCheckMatrix {
    let n = p.n as usize;
    let mut ones = Vec::with_capacity(p.rows * p.cols * n);
    for j in 0..p.rows {
        for l in 0..p.cols {
            let block = Circulant {
                shift: p.get(j, l),
                n: p.n,
            };
            ones.extend(block.ones().map(|(r, c)| (j * n + r as usize, l * n + c as usize)));
        }
    }
    let mut h = ParityCheckMatrix::from_ones(p.rows * n, p.cols * n, ones);
    h.qc = Some(QcStructure { shifts: p.clone() });
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::girth::girth_bfs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn res(v: i64, n: u64) -> Residue {
        Residue::new(v, n).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, n: u32) -> ShiftMatrix {
        let entries = (0..rows * cols).map(|_| rng.gen_range(0..n)).collect();
        ShiftMatrix::new(rows, cols, n, entries).unwrap()
    }

    #[test]
    fn cpm_examples() {
        let id: Vec<_> = cpm(res(0, 3)).ones().collect();
        assert_eq!(id, vec![(0, 0), (1, 1), (2, 2)]);
        let s1: Vec<_> = cpm(res(1, 3)).ones().collect();
        assert_eq!(s1, vec![(0, 1), (1, 2), (2, 0)]);
        let back = cpm(res(2, 3)).compose(cpm(res(1, 3)));
        assert_eq!(back, cpm(res(0, 3)));
    }

    #[test]
    fn cpm_composition_matches_matrix_product() {
        for n in 1..=16u32 {
            for a in 0..n {
                for b in 0..n {
                    let (ca, cb) = (cpm(res(a as i64, n as u64)), cpm(res(b as i64, n as u64)));
                    // dense product of the two permutation matrices
                    let mut product = vec![vec![0u32; n as usize]; n as usize];
                    for (r, k) in ca.ones() {
                        for (k2, c) in cb.ones() {
                            if k == k2 {
                                product[r as usize][c as usize] += 1;
                            }
                        }
                    }
                    let expected = ca.compose(cb);
                    assert_eq!(expected.shift, (a + b) % n);
                    for (r, c) in expected.ones() {
                        assert_eq!(product[r as usize][c as usize], 1);
                    }
                    let total: u32 = product.iter().flatten().sum();
                    assert_eq!(total, n);
                    for r in 0..n {
                        assert_eq!(ca.row_of(ca.col_of(r)), r);
                    }
                }
            }
        }
    }

    #[test]
    fn shift_matrix_validation() {
        assert!(ShiftMatrix::new(0, 3, 5, vec![]).is_err());
        assert!(matches!(
            ShiftMatrix::new(1, 2, 5, vec![0, 5]),
            Err(LiftingError::EntryOutOfRange { row: 0, col: 1, .. })
        ));
        assert!(ShiftMatrix::new(1, 2, 5, vec![0]).is_err());
        let m = ShiftMatrix::from_rows(5, &[[0, -1], [7, 3]]).unwrap();
        assert_eq!(m.entries(), &[0, 4, 2, 3]);
    }

    #[test]
    fn canonical_examples() {
        let p = Permutation::new(vec![0, 2, 4, 1, 3]).unwrap();
        let m = canonical_from_mapping(&p).unwrap();
        assert_eq!(
            m,
            ShiftMatrix::from_rows(5, &[[0, 0, 0, 0, 0], [0, 1, 2, 3, 4], [0, 2, 4, 1, 3]]).unwrap()
        );
        let rev = Permutation::new(vec![0, 6, 5, 4, 3, 2, 1]).unwrap();
        assert_eq!(canonical_from_mapping(&rev).unwrap().row(2), &[0, 6, 5, 4, 3, 2, 1]);
        let moved = Permutation::new(vec![1, 0, 2]).unwrap();
        assert_eq!(canonical_from_mapping(&moved), Err(LiftingError::MappingMovesZero(1)));
        let id = canonical_from_mapping(&Permutation::identity(5).unwrap()).unwrap();
        assert_eq!(girth_bfs(&lift(&id), 12).girth, Some(4));
    }

    #[test]
    fn normalize_examples() {
        let p = Permutation::new(vec![0, 2, 4, 1, 3]).unwrap();
        let canonical = canonical_from_mapping(&p).unwrap();
        assert_eq!(normalize(&canonical), canonical);

        let mut shifted = canonical.clone();
        shifted.shift_col(2, 3);
        assert_eq!(normalize(&shifted), canonical);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = random_matrix(&mut rng, 3, 4, 7);
            let norm = normalize(&m);
            assert!(norm.is_canonical());
            assert_eq!(normalize(&norm), norm);
            let (a, b) = (girth_bfs(&lift(&m), 12), girth_bfs(&lift(&norm), 12));
            assert_eq!((a.girth, a.shortest_cycle_count), (b.girth, b.shortest_cycle_count));
        }
    }

    #[test]
    fn lift_examples() {
        let zeros = ShiftMatrix::zeros(3, 3, 2).unwrap();
        let h = lift(&zeros);
        assert_eq!((h.nrows(), h.ncols()), (6, 6));
        for r in 0..6 {
            assert_eq!(h.row(r), &[r % 2, 2 + r % 2, 4 + r % 2]);
        }
        assert_eq!(girth_bfs(&h, 12).girth, Some(4));

        let p = Permutation::new(vec![0, 2, 4, 1, 3]).unwrap();
        let h = lift(&canonical_from_mapping(&p).unwrap());
        assert_eq!((h.nrows(), h.ncols(), h.num_ones()), (15, 25, 75));
        assert!(h.qc_structure().is_some());
    }

    #[test]
    fn lift_is_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..7);
            let n = rng.gen_range(1..10);
            let m = random_matrix(&mut rng, rows, cols, n);
            let h = lift(&m);
            assert_eq!(h.num_ones(), rows * cols * n as usize);
            assert!((0..h.nrows()).all(|r| h.row(r).len() == cols));
            assert!((0..h.ncols()).all(|c| h.col(c).len() == rows));
            for j in 0..rows {
                for l in 0..cols {
                    let block = Circulant { shift: m.get(j, l), n };
                    for (r, c) in block.ones() {
                        assert!(h.contains(j * n as usize + r as usize, l * n as usize + c as usize));
                    }
                }
            }
        }
    }

    #[test]
    fn column_edits() {
        let m = ShiftMatrix::from_rows(7, &[[0, 1, 2], [3, 4, 5]]).unwrap();
        assert_eq!(
            m.permute_columns(&[2, 0, 1]).unwrap(),
            ShiftMatrix::from_rows(7, &[[2, 0, 1], [5, 3, 4]]).unwrap()
        );
        assert_eq!(
            m.delete_column(1).unwrap(),
            ShiftMatrix::from_rows(7, &[[0, 2], [3, 5]]).unwrap()
        );
        assert!(m.delete_column(3).is_err());
    }

    #[test]
    fn shift_matrix_text() {
        let m = ShiftMatrix::from_rows(5, &[[0, 0, 0], [0, 1, 2], [0, 2, 4]]).unwrap();
        let text = m.to_text();
        assert_eq!(
            text,
            "#qcldpc shift-matrix v1\nrows 3\ncols 3\nlifting-factor 5\n0 0 0\n0 1 2\n0 2 4\n"
        );
        assert_eq!(ShiftMatrix::from_text(&text).unwrap(), m);
        let bad = text.replace("0 2 4", "0 2 5");
        assert!(matches!(
            ShiftMatrix::from_text(&bad),
            Err(LiftingError::EntryOutOfRange { .. })
        ));
        let short = text.replace("0 2 4\n", "");
        assert_eq!(
            ShiftMatrix::from_text(&short),
            Err(LiftingError::Parse(ParseError::new(7, "unexpected end of document")))
        );
    }

    proptest::proptest! {
        #[test]
        fn shift_matrix_text_round_trip(
            rows in 1usize..5, cols in 1usize..8, n in 1u32..40, seed in 0u64..1000
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_matrix(&mut rng, rows, cols, n);
            proptest::prop_assert_eq!(ShiftMatrix::from_text(&m.to_text()).unwrap(), m);
        }
    }
}
