//! Minimal lifting factors by canonical backtracking.
//!
//! Shift matrices are searched in canonical form: zero first row and column,
//! strictly increasing second row, and rows from the third on in strictly
//! increasing lexicographic order. Entries are assigned column by column and
//! every partial assignment is checked against the 4-cycle (and, for girth 8,
//! 6-cycle) conditions restricted to the assigned entries.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{add_mod, sub_mod};
use crate::lifting::{canonical_from_mapping, ShiftMatrix};
use crate::mappings::{compatible_pairs, enumerate_complete_mappings, product_mapping, MappingError};
use crate::textdoc::DocWriter;

/// Largest modulus the search accepts.
pub const MAX_SEARCH_MODULUS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("J = {0} is outside 3..=5")]
    BadRowCount(usize),
    #[error("L = {l} is too small for girth {girth}")]
    BadColumnCount { l: usize, girth: u32 },
    #[error("target girth must be 6 or 8 (got {0})")]
    BadGirth(u32),
    #[error("modulus {0} is outside 1..={MAX_SEARCH_MODULUS}")]
    BadModulus(u32),
    #[error("L = {0} must be even and at least 4")]
    NeedEvenL(usize),
    #[error("L = {0} must be odd and at least 3")]
    NeedOddL(usize),
    #[error(transparent)]
    Mapping(#[from] MappingError),
}

/// Symmetry reductions applied on top of the zero first row and column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reductions {
    /// Second row strictly increasing (column permutations).
    pub sorted_second_row: bool,
    /// Rows three onward in increasing lexicographic order (row permutations).
    pub ordered_rows: bool,
}

impl Reductions {
    pub const ALL: Reductions = Reductions {
        sorted_second_row: true,
        ordered_rows: true,
    };
    pub const NONE: Reductions = Reductions {
        sorted_second_row: false,
        ordered_rows: false,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub node_budget: Option<u64>,
    pub workers: usize,
    pub reductions: Reductions,
    /// Use compatible complete mappings for J = 4, 5 at N = L.
    pub mapping_fast_path: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: None,
            workers: 1,
            reductions: Reductions::ALL,
            mapping_fast_path: true,
        }
    }
}

/// Decision at one modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Exists(ShiftMatrix),
    /// Exhaustive: no canonical matrix meets the target.
    None,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusAttempt {
    pub n: u32,
    pub found: bool,
    pub nodes: u64,
    pub via_mappings: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found {
        n: u32,
        witness: ShiftMatrix,
    },
    NotFound {
        n_max: u32,
    },
    /// The budget ran out at modulus `n`; smaller moduli were ruled out.
    BudgetExhausted {
        n: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub j: usize,
    pub l: usize,
    pub target_girth: u32,
    pub outcome: SearchOutcome,
    /// True when every smaller modulus was ruled out by exhaustive search.
    pub exhaustive: bool,
    pub attempts: Vec<ModulusAttempt>,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn min_n(&self) -> Option<u32> {
        match self.outcome {
            SearchOutcome::Found { n, .. } => Some(n),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&ShiftMatrix> {
        match &self.outcome {
            SearchOutcome::Found { witness, .. } => Some(witness),
            _ => None,
        }
    }

    /// Structured document; wall time is left out so reruns are byte-identical.
    pub fn to_text(&self) -> String {
        let mut doc = DocWriter::new("search-result");
        doc.field("j", self.j)
            .field("l", self.l)
            .field("target-girth", self.target_girth);
        match &self.outcome {
            SearchOutcome::Found { n, .. } => doc.field("status", "found").field("min-n", n),
            SearchOutcome::NotFound { n_max } => doc.field("status", "not-found").field("n-max", n_max),
            SearchOutcome::BudgetExhausted { n } => doc.field("status", "budget-exhausted").field("stopped-at", n),
        };
        doc.field("exhaustive", self.exhaustive)
            .field("nodes", self.stats.nodes)
            .field("attempts", self.attempts.len());
        for a in &self.attempts {
            doc.line(format!(
                "n {} {} nodes {}{}",
                a.n,
                if a.found { "found" } else { "none" },
                a.nodes,
                if a.via_mappings { " via-mappings" } else { "" }
            ));
        }
        if let Some(w) = self.witness() {
            doc.field("witness-rows", w.rows());
            for r in 0..w.rows() {
                doc.numbers(w.row(r));
            }
        }
        doc.finish()
    }
}

fn check_shape(j: usize, l: usize, target_girth: u32) -> Result<(), SearchError> {
    if !(3..=5).contains(&j) {
        return Err(SearchError::BadRowCount(j));
    }
    match target_girth {
        6 if l < 3 => Err(SearchError::BadColumnCount { l, girth: 6 }),
        8 if l < 4 => Err(SearchError::BadColumnCount { l, girth: 8 }),
        6 | 8 => Ok(()),
        g => Err(SearchError::BadGirth(g)),
    }
}

struct Backtracker {
    j: usize,
    l: usize,
    n: u32,
    girth8: bool,
    reductions: Reductions,
    /// Column-major: `grid[c * j + r]`.
    grid: Vec<u32>,
    /// Used differences `P[b][c] - P[a][c]` for each row pair `a < b`.
    used: Vec<Vec<bool>>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
    count_all: bool,
    solutions: u64,
    first: Option<Vec<u32>>,
}

impl Backtracker {
    fn new(j: usize, l: usize, n: u32, girth8: bool, reductions: Reductions, budget: u64, count_all: bool) -> Self {
        let mut bt = Backtracker {
            j,
            l,
            n,
            girth8,
            reductions,
            grid: vec![0; j * l],
            used: vec![vec![false; n as usize]; j * j],
            nodes: 0,
            budget,
            exhausted: false,
            count_all,
            solutions: 0,
            first: None,
        };
        // column 0 is all zero: difference 0 is taken for every pair
        for a in 0..j {
            for b in a + 1..j {
                bt.used[a * j + b][0] = true;
            }
        }
        bt
    }

    fn at(&self, r: usize, c: usize) -> u32 {
        self.grid[c * self.j + r]
    }

    fn done(&self) -> bool {
        self.exhausted || (!self.count_all && self.first.is_some())
    }

    /// Candidate range for position (r, c), honoring the row reductions.
    fn candidates(&self, r: usize, c: usize) -> std::ops::Range<u32> {
        if r == 1 && self.reductions.sorted_second_row {
            let low = if c == 1 { 1 } else { self.at(1, c - 1) + 1 };
            // leave room for the remaining columns
            let high = (self.n as usize).saturating_sub(self.l - 1 - c) as u32;
            return low..high.max(low);
        }
        if r >= 3 && self.reductions.ordered_rows && (1..c).all(|x| self.at(r, x) == self.at(r - 1, x)) {
            return self.at(r - 1, c)..self.n;
        }
        0..self.n
    }

    /// Row `r` of column `c` just received its value; rows below are unset.
    fn accept(&self, r: usize, c: usize) -> bool {
        let n = self.n;
        let j = self.j;
        for a in 0..r {
            let d = sub_mod(self.at(r, c), self.at(a, c), n);
            if self.used[a * j + r][d as usize] {
                return false;
            }
        }
        if self.girth8 {
            // 6-cycles through column c use two of its entries: rows r and
            // some earlier row s, closed through a third row via two earlier columns
            for s in 0..r {
                for (top, bottom) in [(r, s), (s, r)] {
                    // closing term P[bottom][c] - P[top][c]
                    let close = sub_mod(self.at(bottom, c), self.at(top, c), n);
                    for b in (0..j).filter(|&b| b != top && b != bottom) {
                        for x in 0..c {
                            let first = sub_mod(self.at(top, x), self.at(b, x), n);
                            for y in (0..c).filter(|&y| y != x) {
                                let second = sub_mod(self.at(b, y), self.at(bottom, y), n);
                                if add_mod(add_mod(first, second, n), close, n) == 0 {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    fn mark(&mut self, r: usize, c: usize, value: bool) {
        for a in 0..r {
            let d = sub_mod(self.at(r, c), self.at(a, c), self.n);
            self.used[a * self.j + r][d as usize] = value;
        }
    }

    fn place(&mut self, r: usize, c: usize) {
        if c == self.l {
            self.solutions += 1;
            if self.first.is_none() {
                self.first = Some(self.grid.clone());
            }
            return;
        }
        let (next_r, next_c) = if r + 1 == self.j { (1, c + 1) } else { (r + 1, c) };
        for v in self.candidates(r, c) {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
                return;
            }
            self.grid[c * self.j + r] = v;
            if self.accept(r, c) {
                self.mark(r, c, true);
                self.place(next_r, next_c);
                self.mark(r, c, false);
            }
            if self.done() {
                break;
            }
        }
        self.grid[c * self.j + r] = 0;
    }

    /// Explores the subtree with `P[1][1] = v`.
    fn run_branch(&mut self, v: u32) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return;
        }
        self.grid[self.j + 1] = v;
        if self.accept(1, 1) {
            self.mark(1, 1, true);
            self.place(2, 1);
            self.mark(1, 1, false);
        }
    }

    fn witness(&self) -> Option<ShiftMatrix> {
        let grid = self.first.as_ref()?;
        let mut entries = vec![0; self.j * self.l];
        for c in 0..self.l {
            for r in 0..self.j {
                entries[r * self.l + c] = grid[c * self.j + r];
            }
        }
        Some(ShiftMatrix::new(self.j, self.l, self.n, entries).expect("entries are reduced"))
    }
}

struct BranchOutcome {
    nodes: u64,
    exhausted: bool,
    solutions: u64,
    witness: Option<ShiftMatrix>,
}

/// Runs every `P[1][1]` branch and merges in ascending branch order.
///
/// In first-solution mode the merge stops at the first branch holding a
/// solution and only counts nodes up to it, so the result does not depend on
/// the worker count.
fn run_branches(
    j: usize,
    l: usize,
    n: u32,
    target_girth: u32,
    options: &SearchOptions,
    count_all: bool,
) -> (Vec<BranchOutcome>, u64, bool) {
    let budget = options.node_budget.unwrap_or(u64::MAX);
    let run = |v: u32| {
        let mut bt = Backtracker::new(j, l, n, target_girth == 8, options.reductions, budget, count_all);
        bt.run_branch(v);
        BranchOutcome {
            nodes: bt.nodes,
            exhausted: bt.exhausted,
            solutions: bt.solutions,
            witness: bt.witness(),
        }
    };
    let values: Vec<u32> = (1..n).collect();
    let branches: Vec<BranchOutcome> = if options.workers <= 1 {
        let mut out = Vec::new();
        let mut spent = 0u64;
        for &v in &values {
            let b = run(v);
            spent = spent.saturating_add(b.nodes);
            let stop = b.exhausted || spent > budget || (!count_all && b.solutions > 0);
            out.push(b);
            if stop {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| values.par_iter().map(|&v| run(v)).collect())
    };
    let mut merged = Vec::new();
    let mut spent = 0u64;
    for b in branches {
        spent = spent.saturating_add(b.nodes);
        if b.exhausted || spent > budget {
            return (merged, spent.min(budget), true);
        }
        let hit = b.solutions > 0;
        merged.push(b);
        if hit && !count_all {
            break;
        }
    }
    (merged, spent, false)
}

fn validate_modulus(n: u32) -> Result<(), SearchError> {
    if n == 0 || n > MAX_SEARCH_MODULUS {
        return Err(SearchError::BadModulus(n));
    }
    Ok(())
}

/// Decision plus nodes spent.
fn decide(
    j: usize,
    l: usize,
    n: u32,
    target_girth: u32,
    options: &SearchOptions,
) -> Result<(Existence, u64, bool), SearchError> {
    check_shape(j, l, target_girth)?;
    validate_modulus(n)?;
    if options.mapping_fast_path
        && j >= 4
        && n as usize == l
        && target_girth == 6
        && options.reductions == Reductions::ALL
    {
        let (found, nodes) = via_complete_mappings(j, n)?;
        return Ok((found.map_or(Existence::None, Existence::Exists), nodes, true));
    }
    let (branches, nodes, exhausted) = run_branches(j, l, n, target_girth, options, false);
    if exhausted {
        return Ok((Existence::BudgetExhausted, nodes, false));
    }
    let witness = branches.into_iter().find_map(|b| b.witness);
    Ok((witness.map_or(Existence::None, Existence::Exists), nodes, false))
}

/// With `N = L` the second row is forced to `0, 1, ..., N-1`, so each further
/// row is a complete mapping and any two further rows are complete mappings
/// of each other. Looks for `J - 2` mutually compatible mappings.
fn via_complete_mappings(j: usize, n: u32) -> Result<(Option<ShiftMatrix>, u64), SearchError> {
    let census = enumerate_complete_mappings(n as u64, None)?;
    let pairs = compatible_pairs(&census)?;
    let count = census.samples.len();
    let mut adjacent = vec![vec![false; count]; count];
    for &(a, b) in &pairs {
        adjacent[a][b] = true;
        adjacent[b][a] = true;
    }
    let nodes = census.nodes + (count * count.saturating_sub(1) / 2) as u64;
    let need = j - 2;
    let mut clique = Vec::new();
    fn extend(adjacent: &[Vec<bool>], need: usize, clique: &mut Vec<usize>) -> bool {
        if clique.len() == need {
            return true;
        }
        let start = clique.last().map_or(0, |&c| c + 1);
        for v in start..adjacent.len() {
            if clique.iter().all(|&u| adjacent[u][v]) {
                clique.push(v);
                if extend(adjacent, need, clique) {
                    return true;
                }
                clique.pop();
            }
        }
        false
    }
    if !extend(&adjacent, need, &mut clique) {
        return Ok((None, nodes));
    }
    // census order is lexicographic, so the rows come out in the canonical order
    let mut entries = vec![0u32; n as usize];
    entries.extend(0..n);
    for &m in &clique {
        entries.extend_from_slice(census.samples[m].images());
    }
    let witness = ShiftMatrix::new(j, n as usize, n, entries).expect("mapping images are reduced");
    Ok((Some(witness), nodes))
}

/// Exhaustive existence decision at one modulus.
pub fn exists_code(
    j: usize,
    l: usize,
    n: u32,
    target_girth: u32,
    options: &SearchOptions,
) -> Result<Existence, SearchError> {
    decide(j, l, n, target_girth, options).map(|(e, _, _)| e)
}

/// Number of matrices in the searched space (after the enabled reductions)
/// meeting the target, or `None` if the budget ran out.
pub fn count_codes(
    j: usize,
    l: usize,
    n: u32,
    target_girth: u32,
    options: &SearchOptions,
) -> Result<Option<u64>, SearchError> {
    check_shape(j, l, target_girth)?;
    validate_modulus(n)?;
    let (branches, _, exhausted) = run_branches(j, l, n, target_girth, options, true);
    Ok((!exhausted).then(|| branches.iter().map(|b| b.solutions).sum()))
}

/// Smallest `N <= n_max` admitting a `J x L` matrix of the target girth.
/// Each modulus is searched exhaustively before the next; the node budget is
/// shared across moduli.
pub fn min_lifting_factor(
    j: usize,
    l: usize,
    target_girth: u32,
    n_max: u32,
    options: &SearchOptions,
) -> Result<SearchResult, SearchError> {
    check_shape(j, l, target_girth)?;
    validate_modulus(n_max)?;
    let start = Instant::now();
    let mut attempts = Vec::new();
    let mut total = 0u64;
    let mut outcome = SearchOutcome::NotFound { n_max };
    for n in 1..=n_max {
        let remaining = options.node_budget.map(|b| b.saturating_sub(total));
        let opts = SearchOptions {
            node_budget: remaining,
            ..*options
        };
        let (existence, nodes, via_mappings) = decide(j, l, n, target_girth, &opts)?;
        total += nodes;
        match existence {
            Existence::Exists(witness) => {
                attempts.push(ModulusAttempt {
                    n,
                    found: true,
                    nodes,
                    via_mappings,
                });
                outcome = SearchOutcome::Found { n, witness };
                break;
            }
            Existence::None => attempts.push(ModulusAttempt {
                n,
                found: false,
                nodes,
                via_mappings,
            }),
            Existence::BudgetExhausted => {
                outcome = SearchOutcome::BudgetExhausted { n };
                break;
            }
        }
    }
    let exhaustive = !matches!(outcome, SearchOutcome::BudgetExhausted { .. });
    Ok(SearchResult {
        j,
        l,
        target_girth,
        outcome,
        exhaustive,
        attempts,
        stats: SearchStats {
            nodes: total,
            elapsed: start.elapsed(),
        },
    })
}

/// Girth-6 code with `N = L + 1` for even `L`: the canonical matrix of a
/// complete mapping of `Z/(L+1)` with its last column removed.
pub fn girth6_even_l(l: usize) -> Result<SearchResult, SearchError> {
    if l < 4 || l % 2 == 1 {
        return Err(SearchError::NeedEvenL(l));
    }
    let start = Instant::now();
    let n = l as u64 + 1;
    let mapping = product_mapping(2, n)?;
    let full = canonical_from_mapping(mapping.permutation()).expect("mapping fixes zero");
    let witness = full.delete_column(l).expect("column exists");
    assert!(
        crate::girth::has_girth_at_least(&witness, 6),
        "constructed matrix has 4-cycles"
    );
    Ok(SearchResult {
        j: 3,
        l,
        target_girth: 6,
        outcome: SearchOutcome::Found { n: n as u32, witness },
        exhaustive: false,
        attempts: Vec::new(),
        stats: SearchStats {
            nodes: 0,
            elapsed: start.elapsed(),
        },
    })
}

/// Canonical 3 x L matrix with `N = L` from the product mapping `i -> h i`.
/// Without `h`, the smallest valid `h >= 2` is used.
pub fn girth6_odd_l_explicit(l: usize, h: Option<u64>) -> Result<ShiftMatrix, SearchError> {
    if l < 3 || l.is_multiple_of(2) {
        return Err(SearchError::NeedOddL(l));
    }
    let n = l as u64;
    let h = match h {
        Some(h) => h,
        None => (2..n)
            .find(|&h| crate::group::gcd(h, n) == 1 && crate::group::gcd(h - 1, n) == 1)
            .expect("h = 2 works for odd N"),
    };
    let mapping = product_mapping(h, n)?;
    Ok(canonical_from_mapping(mapping.permutation()).expect("mapping fixes zero"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::girth::{girth_bfs, girth_from_shifts, has_girth_at_least};
    use crate::group::Permutation;
    use crate::lifting::{export_alist, import_alist, lift};
    use crate::mappings::is_complete_mapping;

    fn min_n(j: usize, l: usize, g: u32) -> u32 {
        let r = min_lifting_factor(j, l, g, 40, &SearchOptions::default()).unwrap();
        assert!(r.exhaustive);
        check_witness(&r);
        r.min_n().unwrap()
    }

    fn check_witness(r: &SearchResult) {
        let Some(w) = r.witness() else { return };
        assert!(w.is_canonical());
        assert_eq!((w.rows(), w.cols()), (r.j, r.l));
        assert!(has_girth_at_least(w, r.target_girth));
        let h = lift(w);
        let bfs = girth_bfs(&h, 12);
        assert!(bfs.girth.is_none_or(|g| g >= r.target_girth));
        assert!(bfs.agrees_with(&girth_from_shifts(w, 12)));
        let back = import_alist(&export_alist(&h)).unwrap();
        assert_eq!(back, h);
        assert_eq!(girth_bfs(&back, 12), bfs);
    }

    #[test]
    fn table_one_rows_for_three() {
        for (l, expected) in (4..=8).zip([5, 5, 7, 7, 9]) {
            assert_eq!(min_n(3, l, 6), expected, "L = {l}");
        }
    }

    #[test]
    fn odd_l_minimum_is_l() {
        for l in [3usize, 5, 7, 9] {
            let r = min_lifting_factor(3, l, 6, 20, &SearchOptions::default()).unwrap();
            assert_eq!(r.min_n(), Some(l as u32));
            let third = Permutation::new(r.witness().unwrap().row(2).to_vec()).unwrap();
            assert!(is_complete_mapping(&third));
        }
    }

    #[test]
    fn fixed_modulus_examples() {
        let opts = SearchOptions::default();
        assert_eq!(exists_code(3, 6, 6, 6, &opts).unwrap(), Existence::None);
        assert!(matches!(exists_code(3, 5, 5, 6, &opts).unwrap(), Existence::Exists(_)));
        assert_eq!(exists_code(4, 9, 9, 6, &opts).unwrap(), Existence::None);
    }

    #[test]
    fn four_rows_nine_columns_needs_ten() {
        assert_eq!(min_n(4, 9, 6), 10);
    }

    #[test]
    fn four_and_five_rows_small() {
        assert_eq!(min_n(4, 5, 6), 5);
        assert_eq!(min_n(4, 6, 6), 7);
        assert_eq!(min_n(5, 6, 6), 7);
        assert_eq!(min_n(5, 7, 6), 7);
    }

    fn rows_compatible(a: &[u32], b: &[u32], n: u32) -> bool {
        let mut seen = vec![false; n as usize];
        a.iter()
            .zip(b)
            .all(|(&x, &y)| !std::mem::replace(&mut seen[sub_mod(x, y, n) as usize], true))
    }

    fn all_rows(prefix: &mut Vec<u32>, l: usize, n: u32, fixed: &[Vec<u32>], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == l {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            prefix.push(v);
            if fixed.iter().all(|f| rows_compatible(&f[..prefix.len()], prefix, n)) {
                all_rows(prefix, l, n, fixed, out);
            }
            prefix.pop();
        }
    }

    /// Row-at-a-time oracle for J = 4: fix a sorted second row, list every
    /// compatible third row, then look for a compatible pair among them.
    fn four_row_code_exists(l: usize, n: u32) -> bool {
        let zero = vec![0u32; l];
        (0u32..1 << (n - 1))
            .filter(|m| m.count_ones() as usize == l - 1)
            .any(|mask| {
                let second: Vec<u32> = std::iter::once(0)
                    .chain((1..n).filter(|v| mask >> (v - 1) & 1 == 1))
                    .collect();
                let mut rows = Vec::new();
                all_rows(&mut vec![0], l, n, &[zero.clone(), second], &mut rows);
                (0..rows.len()).any(|a| (a + 1..rows.len()).any(|b| rows_compatible(&rows[a], &rows[b], n)))
            })
    }

    #[test]
    fn four_rows_eight_columns_need_ten() {
        assert!(!four_row_code_exists(8, 9));
        assert!(four_row_code_exists(8, 10));
        assert_eq!(min_n(4, 8, 6), 10);
        assert_eq!(min_n(5, 8, 6), 10);
        for (l, n) in [(5, 5), (6, 6), (6, 7), (7, 7), (9, 9)] {
            let found = matches!(
                exists_code(4, l, n, 6, &SearchOptions::default()).unwrap(),
                Existence::Exists(_)
            );
            assert_eq!(found, four_row_code_exists(l, n), "L = {l}, N = {n}");
        }
    }

    #[test]
    fn fast_path_agrees_with_general_search() {
        let slow = SearchOptions {
            mapping_fast_path: false,
            ..Default::default()
        };
        for (j, l) in [(4, 5), (4, 7), (5, 7), (5, 5)] {
            let fast = exists_code(j, l, l as u32, 6, &SearchOptions::default()).unwrap();
            let general = exists_code(j, l, l as u32, 6, &slow).unwrap();
            assert_eq!(
                matches!(fast, Existence::Exists(_)),
                matches!(general, Existence::Exists(_)),
                "J = {j}, L = {l}"
            );
        }
    }

    #[test]
    fn sorted_row_reduction_is_exact() {
        // valid matrices have distinct second-row entries: (L-1)! orderings each
        let sorted_only = SearchOptions {
            reductions: Reductions {
                sorted_second_row: true,
                ordered_rows: false,
            },
            ..Default::default()
        };
        let unsorted = SearchOptions {
            reductions: Reductions::NONE,
            ..Default::default()
        };
        for n in 4..=7 {
            let a = count_codes(3, 4, n, 6, &sorted_only).unwrap().unwrap();
            let b = count_codes(3, 4, n, 6, &unsorted).unwrap().unwrap();
            assert_eq!(b, 6 * a, "N = {n}");
        }
    }

    #[test]
    fn row_order_reduction_is_exact() {
        let sorted_only = SearchOptions {
            reductions: Reductions {
                sorted_second_row: true,
                ordered_rows: false,
            },
            ..Default::default()
        };
        for (j, fact) in [(4usize, 2u64), (5, 6)] {
            for n in 5..=7 {
                let all = count_codes(j, 4, n, 6, &SearchOptions::default()).unwrap().unwrap();
                let rows_free = count_codes(j, 4, n, 6, &sorted_only).unwrap().unwrap();
                assert_eq!(rows_free, fact * all, "J = {j}, N = {n}");
            }
        }
    }

    /// Brute force over every 3 x 3 matrix, not only canonical ones.
    #[test]
    fn zero_row_and_column_reduction_is_exact() {
        for n in 1..=5u32 {
            let mut any = false;
            for code in 0..n.pow(9) {
                let mut c = code;
                let entries: Vec<u32> = (0..9)
                    .map(|_| {
                        let v = c % n;
                        c /= n;
                        v
                    })
                    .collect();
                let p = ShiftMatrix::new(3, 3, n, entries).unwrap();
                if crate::girth::count_4cycles(&p) == 0 {
                    any = true;
                    break;
                }
            }
            let canonical = matches!(
                exists_code(
                    3,
                    3,
                    n,
                    6,
                    &SearchOptions {
                        reductions: Reductions::NONE,
                        ..Default::default()
                    }
                )
                .unwrap(),
                Existence::Exists(_)
            );
            assert_eq!(any, canonical, "N = {n}");
        }
    }

    #[test]
    fn girth8_minimum_respects_lower_bound() {
        for l in 4..=5usize {
            let r = min_lifting_factor(3, l, 8, 20, &SearchOptions::default()).unwrap();
            check_witness(&r);
            let n = r.min_n().unwrap();
            assert!(n as usize >= 2 * l - 1);
            assert_eq!(r.witness().map(|w| has_girth_at_least(w, 8)), Some(true));
        }
        assert_eq!(min_n(3, 4, 8), 9);
        assert_eq!(min_n(3, 5, 8), 13);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        for (j, l, g) in [(3usize, 6usize, 6u32), (3, 4, 8), (4, 6, 6)] {
            let one = min_lifting_factor(j, l, g, 20, &SearchOptions::default()).unwrap();
            let three = min_lifting_factor(
                j,
                l,
                g,
                20,
                &SearchOptions {
                    workers: 3,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(one.to_text(), three.to_text());
        }
    }

    #[test]
    fn budget_is_reported() {
        let opts = SearchOptions {
            node_budget: Some(50),
            ..Default::default()
        };
        let r = min_lifting_factor(3, 8, 6, 20, &opts).unwrap();
        assert!(!r.exhaustive);
        assert!(matches!(r.outcome, SearchOutcome::BudgetExhausted { .. }));
        assert!(r.to_text().contains("status budget-exhausted"));
        let limited = SearchOptions { workers: 2, ..opts };
        assert_eq!(
            min_lifting_factor(3, 8, 6, 20, &limited).unwrap().to_text(),
            r.to_text()
        );
    }

    #[test]
    fn even_l_construction() {
        for (l, n) in [(4, 5), (6, 7), (8, 9), (10, 11)] {
            let r = girth6_even_l(l).unwrap();
            assert_eq!(r.min_n(), Some(n));
            assert_eq!(girth_from_shifts(r.witness().unwrap(), 12).girth, Some(6));
            check_witness(&r);
        }
        assert_eq!(girth6_even_l(5), Err(SearchError::NeedEvenL(5)));
    }

    #[test]
    fn odd_l_construction() {
        let p = girth6_odd_l_explicit(5, Some(2)).unwrap();
        assert_eq!(p.row(2), &[0, 2, 4, 1, 3]);
        for (l, h) in [(9, None), (15, Some(2)), (3, None)] {
            let p = girth6_odd_l_explicit(l, h).unwrap();
            assert_eq!(girth_bfs(&lift(&p), 12).girth, Some(6), "L = {l}");
        }
        assert_eq!(girth6_odd_l_explicit(4, None), Err(SearchError::NeedOddL(4)));
        assert!(girth6_odd_l_explicit(9, Some(3)).is_err());
    }

    #[test]
    fn argument_errors() {
        let o = SearchOptions::default();
        assert_eq!(min_lifting_factor(2, 5, 6, 10, &o), Err(SearchError::BadRowCount(2)));
        assert_eq!(
            min_lifting_factor(3, 3, 8, 10, &o),
            Err(SearchError::BadColumnCount { l: 3, girth: 8 })
        );
        assert_eq!(min_lifting_factor(3, 5, 10, 10, &o), Err(SearchError::BadGirth(10)));
        assert_eq!(exists_code(3, 5, 0, 6, &o), Err(SearchError::BadModulus(0)));
    }
}
