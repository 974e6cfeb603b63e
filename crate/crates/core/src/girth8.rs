//! Girth-8 difference tables for canonical 3 x L shift matrices.
//!
//! For a canonical matrix with second row `0, x_1, ..., x_L'` and third row
//! `0, y_1, ..., y_L'` (`L' = L - 1`), the table entry in row `r`, column `c`
//! is `y_r - x_c`; the diagonal entries `d_i = y_i - x_i` play a special role.
//! Girth at least 8 holds exactly when the table satisfies five conditions
//! (see [`validate_g8_table`]).
//!
//! When two rows of a valid table share all but one element, the second row
//! is the first shifted by `delta = y_j - y_i`, and the elements of
//! `A_i + {d_j}` decompose under `x -> x + delta` into one chain from `d_i` to
//! `d_j` plus (possibly) closed orbits. [`classify_structure`] computes that
//! decomposition; [`case2_bound`] evaluates the counting bound for the orbit
//! case.

use std::collections::BTreeSet;
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{add_mod, gcd, sub_mod, MAX_MODULUS};
use crate::lifting::ShiftMatrix;
use crate::textdoc::DocWriter;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Girth8Error {
    #[error("expected a canonical 3 x L shift matrix with L >= 4 (got {rows} x {cols})")]
    WrongShape { rows: usize, cols: usize },
    #[error("shift matrix is not canonical; normalize it first")]
    NotCanonical,
    #[error("headers must have equal positive length (got {0} and {1})")]
    HeaderLength(usize, usize),
    #[error("header value {value} is not below the modulus {n}")]
    HeaderOutOfRange { value: u32, n: u32 },
    #[error("modulus {0} is not supported")]
    BadModulus(u32),
    #[error("table is not valid (condition {0} fails)")]
    InvalidTable(u8),
    #[error("rows {i} and {j} do not share exactly L' - 1 elements")]
    NotNearlyEqual { i: usize, j: usize },
    #[error("row index out of range or repeated ({i}, {j})")]
    BadRows { i: usize, j: usize },
    #[error("case 2 parameters violate {0}")]
    Case2Parameters(&'static str),
    #[error("l' = {0} is outside the supported range 3..=5")]
    UnsupportedSize(usize),
    #[error("n_max = {n_max} is below 3L' - 1 = {bound}")]
    RangeTooSmall { n_max: u32, bound: u32 },
}

/// `L' x L'` table of differences `row_header[r] - col_header[c] mod N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct G8Table {
    n: u32,
    col_headers: Vec<u32>,
    row_headers: Vec<u32>,
}

impl G8Table {
    pub fn from_headers(n: u32, col_headers: Vec<u32>, row_headers: Vec<u32>) -> Result<Self, Girth8Error> {
        if n == 0 || n as u64 > MAX_MODULUS {
            return Err(Girth8Error::BadModulus(n));
        }
        if col_headers.len() != row_headers.len() || col_headers.is_empty() {
            return Err(Girth8Error::HeaderLength(col_headers.len(), row_headers.len()));
        }
        if let Some(&value) = col_headers.iter().chain(&row_headers).find(|&&v| v >= n) {
            return Err(Girth8Error::HeaderOutOfRange { value, n });
        }
        Ok(G8Table {
            n,
            col_headers,
            row_headers,
        })
    }

    pub fn l_prime(&self) -> usize {
        self.col_headers.len()
    }

    pub fn modulus(&self) -> u32 {
        self.n
    }

    pub fn col_headers(&self) -> &[u32] {
        &self.col_headers
    }

    pub fn row_headers(&self) -> &[u32] {
        &self.row_headers
    }

    pub fn entry(&self, r: usize, c: usize) -> u32 {
        sub_mod(self.row_headers[r], self.col_headers[c], self.n)
    }

    pub fn diagonal(&self, i: usize) -> u32 {
        self.entry(i, i)
    }

    pub fn diagonals(&self) -> Vec<u32> {
        (0..self.l_prime()).map(|i| self.diagonal(i)).collect()
    }

    pub fn row(&self, r: usize) -> Vec<u32> {
        (0..self.l_prime()).map(|c| self.entry(r, c)).collect()
    }

    /// The canonical 3 x (L'+1) shift matrix this table describes.
    pub fn to_shift_matrix(&self) -> ShiftMatrix {
        let mut entries = vec![0; self.l_prime() + 1];
        entries.push(0);
        entries.extend(&self.col_headers);
        entries.push(0);
        entries.extend(&self.row_headers);
        ShiftMatrix::new(3, self.l_prime() + 1, self.n, entries).expect("headers are reduced")
    }
}

/// Table of a canonical 3 x L shift matrix: headers are rows 2 and 3 without column 0.
pub fn build_g8_table(p: &ShiftMatrix) -> Result<G8Table, Girth8Error> {
    if p.rows() != 3 || p.cols() < 4 {
        return Err(Girth8Error::WrongShape {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    if !p.is_canonical() {
        return Err(Girth8Error::NotCanonical);
    }
    G8Table::from_headers(p.lifting_factor(), p.row(1)[1..].to_vec(), p.row(2)[1..].to_vec())
}

/// Outcome of a girth-8 validity check.
///
/// Witness indices are 0-based. Condition 1 indexes the combined header list
/// (column headers then row headers); conditions 2-5 start with the diagonal
/// index and then name the header(s) or entry involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityVerdict {
    pub valid: bool,
    pub failed_condition: Option<u8>,
    pub witness: Option<Vec<usize>>,
}

impl ValidityVerdict {
    fn valid() -> Self {
        ValidityVerdict {
            valid: true,
            failed_condition: None,
            witness: None,
        }
    }

    fn fail(condition: u8, witness: Vec<usize>) -> Self {
        ValidityVerdict {
            valid: false,
            failed_condition: Some(condition),
            witness: Some(witness),
        }
    }
}

fn distinct_nonzero(values: &[u32]) -> Option<Vec<usize>> {
    for (i, &v) in values.iter().enumerate() {
        if v == 0 {
            return Some(vec![i]);
        }
        if let Some(j) = values[..i].iter().position(|&w| w == v) {
            return Some(vec![j, i]);
        }
    }
    None
}

/// Checks, in order: (1) the `2L'` headers are distinct and nonzero; (2) no
/// diagonal entry is the negation of a column header; (3) no diagonal entry
/// equals a row header; (4) no diagonal entry equals an off-diagonal entry;
/// (5) the diagonal entries are distinct.
#[allow(clippy::needless_range_loop)]
pub fn validate_g8_table(t: &G8Table) -> ValidityVerdict {
    let m = t.l_prime();
    let n = t.n;
    let headers: Vec<u32> = t.col_headers.iter().chain(&t.row_headers).copied().collect();
    if let Some(w) = distinct_nonzero(&headers) {
        return ValidityVerdict::fail(1, w);
    }
    let d = t.diagonals();
    for i in 0..m {
        for c in 0..m {
            if d[i] == sub_mod(0, t.col_headers[c], n) {
                return ValidityVerdict::fail(2, vec![i, c]);
            }
        }
    }
    for i in 0..m {
        for r in 0..m {
            if d[i] == t.row_headers[r] {
                return ValidityVerdict::fail(3, vec![i, r]);
            }
        }
    }
    for i in 0..m {
        for r in 0..m {
            for c in (0..m).filter(|&c| c != r) {
                if d[i] == t.entry(r, c) {
                    return ValidityVerdict::fail(4, vec![i, r, c]);
                }
            }
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            if d[i] == d[j] {
                return ValidityVerdict::fail(5, vec![i, j]);
            }
        }
    }
    ValidityVerdict::valid()
}

/// The same five conditions stated on the shifts `x_1..x_2L'` of a canonical
/// matrix, with the index exclusions of the cycle conditions.
pub fn check_girth8_conditions(p: &ShiftMatrix) -> Result<ValidityVerdict, Girth8Error> {
    if p.rows() != 3 || p.cols() < 4 {
        return Err(Girth8Error::WrongShape {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    if !p.is_canonical() {
        return Err(Girth8Error::NotCanonical);
    }
    let n = p.lifting_factor();
    let lp = p.cols() - 1;
    // x[0..lp] is row 2, x[lp..2lp] is row 3 (columns 1..L)
    let x: Vec<u32> = p.row(1)[1..].iter().chain(&p.row(2)[1..]).copied().collect();
    if let Some(w) = distinct_nonzero(&x) {
        return Ok(ValidityVerdict::fail(1, w));
    }
    let diff = |i: usize| sub_mod(x[i + lp], x[i], n);
    // the column of a third-row shift at index i + lp is i
    for j in 0..lp {
        for k in (0..lp).filter(|&k| k != j) {
            if diff(j) == sub_mod(0, x[k], n) {
                return Ok(ValidityVerdict::fail(2, vec![j, k]));
            }
        }
    }
    for j in 0..lp {
        for k in (0..lp).filter(|&k| k != j) {
            if diff(j) == x[k + lp] {
                return Ok(ValidityVerdict::fail(3, vec![j, k]));
            }
        }
    }
    for j in 0..lp {
        for k in (0..lp).filter(|&k| k != j) {
            for l in (0..lp).filter(|&l| l != j && l != k) {
                if diff(j) == sub_mod(x[k + lp], x[l], n) {
                    return Ok(ValidityVerdict::fail(4, vec![j, k, l]));
                }
            }
        }
    }
    for j in 0..lp {
        for k in (0..lp).filter(|&k| k != j) {
            if diff(j) == diff(k) {
                return Ok(ValidityVerdict::fail(5, vec![j.min(k), j.max(k)]));
            }
        }
    }
    Ok(ValidityVerdict::valid())
}

/// Entries of each table row as a set.
pub fn row_sets(t: &G8Table) -> Vec<BTreeSet<u32>> {
    (0..t.l_prime()).map(|r| t.row(r).into_iter().collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RowPair {
    pub i: usize,
    pub j: usize,
    pub intersection: usize,
}

/// First row pair (in row-index order) whose sets meet in 0 or `L' - 1`
/// elements, or `None` if no pair does.
pub fn theorem3_hypothesis(t: &G8Table) -> Result<Option<RowPair>, Girth8Error> {
    let verdict = validate_g8_table(t);
    if let Some(c) = verdict.failed_condition {
        return Err(Girth8Error::InvalidTable(c));
    }
    Ok(hypothesis_pairs(t).into_iter().next())
}

fn hypothesis_pairs(t: &G8Table) -> Vec<RowPair> {
    let sets = row_sets(t);
    let m = t.l_prime();
    let mut out = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let intersection = sets[i].intersection(&sets[j]).count();
            if intersection == 0 || intersection == m - 1 {
                out.push(RowPair { i, j, intersection });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseKind {
    Case1Chain,
    Case2Partition,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Case2Partition {
    /// The chain from `d_i` to `d_j`, in order.
    pub chain: Vec<u32>,
    /// Orbits of `x -> x + delta`, each listed from its smallest element.
    pub blocks: Vec<Vec<u32>>,
    pub k: usize,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseClassification {
    pub kind: CaseKind,
    pub delta: u32,
    /// Present for `Case1Chain`: all `L' + 1` elements from `d_i` to `d_j`.
    pub chain: Option<Vec<u32>>,
    pub partition: Option<Case2Partition>,
}

/// Decomposes `A_i + {d_j}` under `x -> x + delta`, `delta = y_j - y_i`.
pub fn classify_structure(t: &G8Table, i: usize, j: usize) -> Result<CaseClassification, Girth8Error> {
    let m = t.l_prime();
    if i >= m || j >= m || i == j {
        return Err(Girth8Error::BadRows { i, j });
    }
    if let Some(c) = validate_g8_table(t).failed_condition {
        return Err(Girth8Error::InvalidTable(c));
    }
    let sets = row_sets(t);
    if sets[i].intersection(&sets[j]).count() != m - 1 {
        return Err(Girth8Error::NotNearlyEqual { i, j });
    }
    let n = t.n;
    let delta = sub_mod(t.row_headers[j], t.row_headers[i], n);
    let (d_i, d_j) = (t.diagonal(i), t.diagonal(j));
    let mut elements = sets[i].clone();
    elements.insert(d_j);

    let not_applicable = CaseClassification {
        kind: CaseKind::NotApplicable,
        delta,
        chain: None,
        partition: None,
    };

    let mut chain = vec![d_i];
    let mut cur = d_i;
    while cur != d_j {
        cur = add_mod(cur, delta, n);
        if !elements.contains(&cur) || chain.contains(&cur) {
            return Ok(not_applicable);
        }
        chain.push(cur);
    }
    let mut rest: BTreeSet<u32> = elements.difference(&chain.iter().copied().collect()).copied().collect();
    if rest.is_empty() {
        return Ok(CaseClassification {
            kind: CaseKind::Case1Chain,
            delta,
            chain: Some(chain),
            partition: None,
        });
    }
    let mut blocks = Vec::new();
    while let Some(&start) = rest.iter().next() {
        let mut block = vec![start];
        rest.remove(&start);
        let mut cur = add_mod(start, delta, n);
        while cur != start {
            if !rest.remove(&cur) {
                return Ok(not_applicable);
            }
            block.push(cur);
            cur = add_mod(cur, delta, n);
        }
        blocks.push(block);
    }
    let k = blocks[0].len();
    if blocks.iter().any(|b| b.len() != k) || !(k as u64 * delta as u64).is_multiple_of(n as u64) {
        return Ok(not_applicable);
    }
    Ok(CaseClassification {
        kind: CaseKind::Case2Partition,
        delta,
        chain: None,
        partition: Some(Case2Partition {
            chain,
            ell: blocks.len(),
            blocks,
            k,
        }),
    })
}

fn check_case2_parameters(k: u64, ell: u64, l_prime: u64) -> Result<(), Girth8Error> {
    if k < 3 {
        return Err(Girth8Error::Case2Parameters("k >= 3"));
    }
    if ell < 1 {
        return Err(Girth8Error::Case2Parameters("ell >= 1"));
    }
    if l_prime < 5 {
        return Err(Girth8Error::Case2Parameters("L' >= 5"));
    }
    if l_prime + 1 > k + k * ell {
        return Err(Girth8Error::Case2Parameters("L' - k*ell + 1 <= k"));
    }
    Ok(())
}

/// `L' + 2 + k^2 ell`: the count of `A_i + {d_j, 0}` plus `k` new elements
/// in each of the `k ell` rows reached from orbit elements.
pub fn case2_bound(k: u64, ell: u64, l_prime: u64) -> Result<u64, Girth8Error> {
    check_case2_parameters(k, ell, l_prime)?;
    Ok(l_prime + 2 + k * k * ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRange {
    /// `k^2 >= 2L' - 3`: drop `ell` and use `k^2` directly.
    Large,
    /// `k^2 < 2L' - 3`: use `k ell >= L' - k + 1` and concavity in `k`.
    Small,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RangeArgument {
    pub range: KRange,
    /// The weaker bound the two-range argument establishes.
    pub weakened_bound: u64,
    pub case2_bound: u64,
    pub target: u64,
}

/// Replays the two-range argument that `case2_bound >= 3L' - 1`.
pub fn case2_range_argument(k: u64, ell: u64, l_prime: u64) -> Result<RangeArgument, Girth8Error> {
    let bound = case2_bound(k, ell, l_prime)?;
    let target = 3 * l_prime - 1;
    let (range, weakened_bound) = if k * k >= 2 * l_prime - 3 {
        // L' + 2 + k^2 ell >= L' + 2 + k^2 >= L' + 2 + 2L' - 3
        (KRange::Large, l_prime + 2 + k * k)
    } else {
        // k^2 ell >= k (L' - k + 1), concave in k, minimal at k = 3 here
        let via_chain = l_prime + 2 + k * (l_prime + 1 - k);
        let at_three = 4 * l_prime - 4;
        assert!(via_chain >= at_three, "concavity step fails at k = {k}, L' = {l_prime}");
        (KRange::Small, at_three)
    };
    assert!(weakened_bound <= bound, "weakened bound exceeds the case 2 bound");
    assert!(
        weakened_bound >= target,
        "two-range argument fails at k = {k}, ell = {ell}, L' = {l_prime}"
    );
    Ok(RangeArgument {
        range,
        weakened_bound,
        case2_bound: bound,
        target,
    })
}

/// Options for exhaustive table enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Require strictly increasing column headers (column-permutation reduction).
    pub sorted_columns: bool,
    pub node_budget: Option<u64>,
    pub workers: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            sorted_columns: true,
            node_budget: None,
            workers: 1,
        }
    }
}

struct TableWalker<'f, F> {
    n: u32,
    l_prime: usize,
    sorted: bool,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    cols: Vec<u32>,
    rows: Vec<u32>,
    visit: &'f mut F,
}

impl<F: FnMut(&G8Table)> TableWalker<'_, F> {
    fn extend(&mut self) {
        let depth = self.cols.len();
        if depth == self.l_prime {
            let table = G8Table {
                n: self.n,
                col_headers: self.cols.clone(),
                row_headers: self.rows.clone(),
            };
            (self.visit)(&table);
            return;
        }
        let start = if self.sorted {
            self.cols.last().map_or(1, |&c| c + 1)
        } else {
            1
        };
        for x in start..self.n {
            for y in 1..self.n {
                self.nodes += 1;
                if self.nodes > self.budget {
                    self.exhausted = true;
                    return;
                }
                self.cols.push(x);
                self.rows.push(y);
                // every condition only involves the columns it names, so a
                // violation among assigned columns rules out all extensions
                let prefix = G8Table {
                    n: self.n,
                    col_headers: self.cols.clone(),
                    row_headers: self.rows.clone(),
                };
                if validate_g8_table(&prefix).valid {
                    self.extend();
                }
                self.cols.pop();
                self.rows.pop();
                if self.exhausted {
                    return;
                }
            }
        }
    }
}

/// Result of one branch (fixed first column header) of an enumeration.
struct Branch<T> {
    value: T,
    nodes: u64,
    exhausted: bool,
}

/// Runs `fold` over every valid table of size `l_prime` over `Z/n`, one
/// accumulator per first column header, merged in ascending order.
fn enumerate_tables<T, F>(
    l_prime: usize,
    n: u32,
    options: &EnumerationOptions,
    init: impl Fn() -> T + Sync,
    fold: F,
) -> (Vec<T>, u64, bool)
where
    T: Send,
    F: Fn(&mut T, &G8Table) + Sync,
{
    let budget = options.node_budget.unwrap_or(u64::MAX);
    let run = |x0: u32| -> Branch<T> {
        let mut acc = init();
        let mut visit = |t: &G8Table| fold(&mut acc, t);
        let mut walker = TableWalker {
            n,
            l_prime,
            sorted: options.sorted_columns,
            budget,
            nodes: 0,
            exhausted: false,
            cols: Vec::new(),
            rows: Vec::new(),
            visit: &mut visit,
        };
        for y in 1..n {
            walker.nodes += 1;
            if walker.nodes > budget {
                walker.exhausted = true;
                break;
            }
            walker.cols.push(x0);
            walker.rows.push(y);
            if validate_g8_table(&G8Table {
                n,
                col_headers: vec![x0],
                row_headers: vec![y],
            })
            .valid
            {
                walker.extend();
            }
            walker.cols.clear();
            walker.rows.clear();
            if walker.exhausted {
                break;
            }
        }
        let (nodes, exhausted) = (walker.nodes, walker.exhausted);
        Branch {
            value: acc,
            nodes,
            exhausted,
        }
    };
    let firsts: Vec<u32> = (1..n).collect();
    let branches: Vec<Branch<T>> = if options.workers <= 1 {
        firsts.iter().map(|&x| run(x)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.workers)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| firsts.par_iter().map(|&x| run(x)).collect())
    };
    let mut total = 0u64;
    let mut values = Vec::new();
    for b in branches {
        total = total.saturating_add(b.nodes);
        if b.exhausted || total > budget {
            return (values, total, true);
        }
        values.push(b.value);
    }
    (values, total, false)
}

/// All valid tables of size `l_prime` over `Z/n`, in enumeration order.
pub fn valid_tables(l_prime: usize, n: u32, options: &EnumerationOptions) -> Option<Vec<G8Table>> {
    let (parts, _, exhausted) = enumerate_tables(l_prime, n, options, Vec::new, |acc, t| acc.push(t.clone()));
    (!exhausted).then(|| parts.into_iter().flatten().collect())
}

pub fn count_valid_tables(l_prime: usize, n: u32, options: &EnumerationOptions) -> Option<u64> {
    let (parts, _, exhausted) = enumerate_tables(l_prime, n, options, || 0u64, |acc, _| *acc += 1);
    (!exhausted).then(|| parts.into_iter().sum())
}

/// Per-modulus tallies from a theorem-3 sweep. Counts are over tables with
/// increasing column headers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModulusTally {
    pub n: u32,
    pub valid_tables: u64,
    pub hypothesis_tables: u64,
    /// Tables whose first qualifying pair is disjoint.
    pub disjoint_pairs: u64,
    pub case1: u64,
    pub case2: u64,
    pub unclassified: u64,
    /// Valid tables with no qualifying pair.
    pub outside_hypothesis: u64,
    pub violations: Vec<G8Table>,
    pub nodes: u64,
}

impl ModulusTally {
    fn merge(&mut self, other: ModulusTally) {
        self.valid_tables += other.valid_tables;
        self.hypothesis_tables += other.hypothesis_tables;
        self.disjoint_pairs += other.disjoint_pairs;
        self.case1 += other.case1;
        self.case2 += other.case2;
        self.unclassified += other.unclassified;
        self.outside_hypothesis += other.outside_hypothesis;
        self.violations.extend(other.violations);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem3Report {
    pub l_prime: usize,
    pub n_min: u32,
    pub n_max: u32,
    /// `3L' - 1`.
    pub bound: u32,
    pub tallies: Vec<ModulusTally>,
    /// False when the node budget ran out; `tallies` then holds finished moduli only.
    pub complete: bool,
    pub elapsed: Duration,
}

impl Theorem3Report {
    pub fn violation_count(&self) -> usize {
        self.tallies.iter().map(|t| t.violations.len()).sum()
    }

    /// Valid tables below the bound, with or without the hypothesis.
    pub fn conjecture_counterexamples(&self) -> u64 {
        self.tallies
            .iter()
            .filter(|t| t.n < self.bound)
            .map(|t| t.valid_tables)
            .sum()
    }

    pub fn to_text(&self) -> String {
        let mut doc = DocWriter::new("theorem3-report");
        doc.field("l-prime", self.l_prime)
            .field("n-min", self.n_min)
            .field("n-max", self.n_max)
            .field("bound", self.bound)
            .field("complete", self.complete)
            .field("violations", self.violation_count())
            .field("conjecture-counterexamples", self.conjecture_counterexamples())
            .line("columns n valid hypothesis disjoint case1 case2 unclassified outside-hypothesis violations");
        for t in &self.tallies {
            doc.numbers([
                t.n as u64,
                t.valid_tables,
                t.hypothesis_tables,
                t.disjoint_pairs,
                t.case1,
                t.case2,
                t.unclassified,
                t.outside_hypothesis,
                t.violations.len() as u64,
            ]);
        }
        for t in &self.tallies {
            for v in &t.violations {
                doc.line(format!(
                    "violation n={} cols={} rows={}",
                    t.n,
                    join(v.col_headers()),
                    join(v.row_headers())
                ));
            }
        }
        doc.finish()
    }
}

fn join(values: &[u32]) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

/// Tallies every valid table at one modulus against the theorem-3 hypothesis.
pub fn tally_modulus(l_prime: usize, n: u32, options: &EnumerationOptions) -> Option<ModulusTally> {
    let bound = 3 * l_prime as u32 - 1;
    let init = || ModulusTally {
        n,
        ..Default::default()
    };
    let fold = |acc: &mut ModulusTally, t: &G8Table| {
        acc.valid_tables += 1;
        let pairs = hypothesis_pairs(t);
        let Some(first) = pairs.first() else {
            acc.outside_hypothesis += 1;
            return;
        };
        acc.hypothesis_tables += 1;
        if first.intersection == 0 {
            acc.disjoint_pairs += 1;
        } else {
            let class = classify_structure(t, first.i, first.j).expect("qualifying pair");
            match class.kind {
                CaseKind::Case1Chain => acc.case1 += 1,
                CaseKind::Case2Partition => acc.case2 += 1,
                CaseKind::NotApplicable => acc.unclassified += 1,
            }
        }
        if n < bound {
            acc.violations.push(t.clone());
        }
    };
    let (parts, nodes, exhausted) = enumerate_tables(l_prime, n, options, init, fold);
    if exhausted {
        return None;
    }
    let mut tally = init();
    for p in parts {
        tally.merge(p);
    }
    tally.nodes = nodes;
    Some(tally)
}

/// Exhaustive check that every valid table meeting the intersection
/// hypothesis has `N >= 3L' - 1`, for `N` from `2L' + 1` to `n_max`.
///
/// The node budget applies per modulus.
pub fn verify_theorem3(
    l_prime: usize,
    n_max: u32,
    options: &EnumerationOptions,
) -> Result<Theorem3Report, Girth8Error> {
    if !(3..=5).contains(&l_prime) {
        return Err(Girth8Error::UnsupportedSize(l_prime));
    }
    let bound = 3 * l_prime as u32 - 1;
    if n_max < bound {
        return Err(Girth8Error::RangeTooSmall { n_max, bound });
    }
    let start = std::time::Instant::now();
    let n_min = 2 * l_prime as u32 + 1;
    let mut tallies = Vec::new();
    let mut complete = true;
    for n in n_min..=n_max {
        match tally_modulus(l_prime, n, options) {
            Some(t) => tallies.push(t),
            None => {
                complete = false;
                break;
            }
        }
    }
    Ok(Theorem3Report {
        l_prime,
        n_min,
        n_max,
        bound,
        tallies,
        complete,
        elapsed: start.elapsed(),
    })
}

/// Smallest `k` with `k * delta == 0 mod n`.
pub fn additive_order(delta: u32, n: u32) -> u32 {
    (n as u64 / gcd(delta as u64, n as u64)) as u32
}
