//! Complete mappings of `Z/N`.
//!
//! A permutation `p` with `p(0) = 0` is a complete mapping when
//! `i -> p(i) - i` is also a permutation. Placed as the third row of a
//! canonical 3 x N shift matrix, complete mappings are exactly the rows that
//! leave the lifted code free of 4-cycles.
//!
//! For `J > 3` rows the extra rows must also be complete mappings *of each
//! other*: for rows `a` and `b`, the column-wise differences `b[c] - a[c]`
//! must all be distinct. This is the reading of the pairwise condition used
//! throughout the crate, since it is exactly the absence of 4-cycles between
//! the two block rows.

use std::ops::Deref;

use rayon::prelude::*;
use thiserror::Error;

use crate::group::{gcd, sub_mod, GroupError, Permutation};
use crate::textdoc::{DocReader, DocWriter, ParseError};

/// Enumeration uses 64-bit masks, which bounds the modulus.
pub const MAX_ENUMERATION_MODULUS: u32 = 64;

pub const DEFAULT_WITNESS_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("not a complete mapping: {0}")]
    NotComplete(String),
    #[error("h = {h} and N = {n} share the factor {factor} (gcd(h, N) must be 1)")]
    HNotCoprime { h: u64, n: u64, factor: u64 },
    #[error("h - 1 = {} and N = {n} share the factor {factor} (gcd(h - 1, N) must be 1)", .h - 1)]
    HMinusOneNotCoprime { h: u64, n: u64, factor: u64 },
    #[error("h = {h} is outside 2..=N-1 for N = {n}")]
    HOutOfRange { h: u64, n: u64 },
    #[error("N = {0} must be odd and at least 3")]
    NeedOddModulus(u64),
    #[error("N = {0} must be even and at least 2")]
    NeedEvenModulus(u64),
    #[error("N = {0} is outside 1..=64 for enumeration")]
    ModulusTooLarge(u64),
    #[error("rows have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("census of Z/{modulus} keeps {kept} of {count} mappings; witnesses are required")]
    MissingWitnesses { modulus: u32, count: u64, kept: usize },
    #[error("node budget exhausted after {} nodes; {} mappings found in {} finished branches", .0.nodes, .0.count, .0.finished_branches)]
    BudgetExceeded(Box<PartialCensus>),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A permutation of `Z/N` fixing 0 whose difference sequence is a permutation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompleteMapping(Permutation);

impl CompleteMapping {
    pub fn new(p: Permutation) -> Result<Self, MappingError> {
        if p.apply(0) != 0 {
            return Err(MappingError::NotComplete(format!("p(0) = {}", p.apply(0))));
        }
        if let Some((first, second)) = repeated_difference(&p) {
            return Err(MappingError::NotComplete(format!(
                "positions {first} and {second} have the same difference"
            )));
        }
        Ok(CompleteMapping(p))
    }

    pub fn permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn into_permutation(self) -> Permutation {
        self.0
    }
}

impl Deref for CompleteMapping {
    type Target = Permutation;

    fn deref(&self) -> &Permutation {
        &self.0
    }
}

/// `(p(i) - i mod N)` for every position.
pub fn difference_sequence(p: &Permutation) -> Vec<u32> {
    let n = p.modulus();
    p.images()
        .iter()
        .enumerate()
        .map(|(i, &v)| sub_mod(v, i as u32, n))
        .collect()
}

fn repeated_difference(p: &Permutation) -> Option<(usize, usize)> {
    let mut seen = vec![usize::MAX; p.modulus() as usize];
    for (i, d) in difference_sequence(p).into_iter().enumerate() {
        let slot = &mut seen[d as usize];
        if *slot != usize::MAX {
            return Some((*slot, i));
        }
        *slot = i;
    }
    None
}

pub fn is_complete_mapping(p: &Permutation) -> bool {
    p.apply(0) == 0 && repeated_difference(p).is_none()
}

/// Whether the column-wise differences `row_b[c] - row_a[c]` are all distinct.
pub fn is_complete_mapping_of(row_a: &Permutation, row_b: &Permutation) -> Result<bool, MappingError> {
    let (a, b) = (row_a.images(), row_b.images());
    if a.len() != b.len() {
        return Err(MappingError::LengthMismatch(a.len(), b.len()));
    }
    let n = row_a.modulus();
    let mut seen = vec![false; a.len()];
    for (&x, &y) in a.iter().zip(b) {
        let d = sub_mod(y, x, n) as usize;
        if std::mem::replace(&mut seen[d], true) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The mapping `i -> h*i mod N`.
pub fn product_mapping(h: u64, n: u64) -> Result<CompleteMapping, MappingError> {
    // even N fails one of the coprimality checks below, which name the factor
    if n < 3 {
        return Err(MappingError::NeedOddModulus(n));
    }
    if n > crate::group::MAX_MODULUS {
        return Err(GroupError::BadModulus(n).into());
    }
    if !(2..n).contains(&h) {
        return Err(MappingError::HOutOfRange { h, n });
    }
    let g = gcd(h, n);
    if g != 1 {
        return Err(MappingError::HNotCoprime { h, n, factor: g });
    }
    let g = gcd(h - 1, n);
    if g != 1 {
        return Err(MappingError::HMinusOneNotCoprime { h, n, factor: g });
    }
    let images = (0..n).map(|i| ((h * i) % n) as u32).collect();
    Ok(CompleteMapping(Permutation::from_images_unchecked(images)))
}

/// Lexicographically first permutation fixing 0 whose difference sequence has
/// exactly `N - 1` distinct values.
pub fn almost_complete_mapping(n: u64) -> Result<Permutation, MappingError> {
    if n < 2 || n % 2 == 1 {
        return Err(MappingError::NeedEvenModulus(n));
    }
    if n > MAX_ENUMERATION_MODULUS as u64 {
        return Err(MappingError::ModulusTooLarge(n));
    }
    let n = n as usize;

    fn search(pos: usize, images: &mut Vec<u32>, used: &mut [bool], diff_used: &mut [bool], repeated: bool) -> bool {
        let n = used.len();
        if pos == n {
            return repeated;
        }
        for v in 0..n {
            if used[v] {
                continue;
            }
            let d = (v + n - pos) % n;
            let is_repeat = diff_used[d];
            if is_repeat && repeated {
                continue;
            }
            used[v] = true;
            if !is_repeat {
                diff_used[d] = true;
            }
            images.push(v as u32);
            if search(pos + 1, images, used, diff_used, repeated || is_repeat) {
                return true;
            }
            images.pop();
            used[v] = false;
            if !is_repeat {
                diff_used[d] = false;
            }
        }
        false
    }

    let mut images = vec![0u32];
    let mut used = vec![false; n];
    let mut diff_used = vec![false; n];
    used[0] = true;
    diff_used[0] = true;
    let found = search(1, &mut images, &mut used, &mut diff_used, false);
    // Existence for every even order is a classical result on near-complete
    // mappings of abelian groups with a unique involution.
    assert!(found, "no almost complete mapping of Z/{n}");
    Ok(Permutation::from_images_unchecked(images))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    /// Number of mappings kept as witnesses; the count is always exact.
    pub witness_cap: usize,
    pub node_budget: Option<u64>,
    pub workers: usize,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            witness_cap: DEFAULT_WITNESS_CAP,
            node_budget: None,
            workers: 1,
        }
    }
}

/// Progress carried by a census that ran out of budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialCensus {
    pub modulus: u32,
    /// Mappings found in the branches that finished before the budget ran out.
    pub count: u64,
    pub finished_branches: usize,
    pub total_branches: usize,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingCensus {
    pub modulus: u32,
    pub count: u64,
    pub samples: Vec<CompleteMapping>,
    pub nodes: u64,
}

impl MappingCensus {
    pub fn has_all_witnesses(&self) -> bool {
        self.samples.len() as u64 == self.count
    }

    pub fn to_text(&self) -> String {
        let mut doc = DocWriter::new("census");
        doc.field("modulus", self.modulus)
            .field("count", self.count)
            .field("witnesses", self.samples.len());
        for m in &self.samples {
            doc.numbers(m.images());
        }
        doc.finish()
    }

    /// Node counts are not part of the document and read back as zero.
    pub fn from_text(text: &str) -> Result<Self, MappingError> {
        let mut doc = DocReader::open(text, "census")?;
        let modulus: u32 = doc.parse_field("modulus")?;
        let count: u64 = doc.parse_field("count")?;
        let (line, raw) = doc.field("witnesses")?;
        let kept: usize = raw
            .parse()
            .map_err(|_| ParseError::new(line, format!("invalid witness count `{raw}`")))?;
        let mut samples = Vec::with_capacity(kept);
        for _ in 0..kept {
            let images = doc.numbers::<u32>(modulus as usize)?;
            samples.push(CompleteMapping::new(Permutation::new(images)?)?);
        }
        doc.finish()?;
        Ok(MappingCensus {
            modulus,
            count,
            samples,
            nodes: 0,
        })
    }
}

struct BranchOutcome {
    count: u64,
    samples: Vec<Vec<u32>>,
    nodes: u64,
    exhausted: bool,
}

struct Enumerator {
    n: u32,
    full: u64,
    cap: usize,
    budget: u64,
    images: Vec<u32>,
    out: BranchOutcome,
}

impl Enumerator {
    fn rotate_left(&self, x: u64, by: u32) -> u64 {
        if by == 0 {
            return x;
        }
        ((x << by) | x.checked_shr(self.n - by).unwrap_or(0)) & self.full
    }

    /// `free_img` / `free_diff` are bitmasks of unused images and differences.
    fn extend(&mut self, pos: u32, free_img: u64, free_diff: u64) {
        if self.out.exhausted {
            return;
        }
        if pos == self.n {
            self.out.count += 1;
            if self.out.samples.len() < self.cap {
                self.out.samples.push(self.images.clone());
            }
            return;
        }
        // image v = diff + pos, so shifting the free differences by `pos`
        // lines them up with candidate images
        let mut candidates = free_img & self.rotate_left(free_diff, pos);
        while candidates != 0 {
            let v = candidates.trailing_zeros();
            candidates &= candidates - 1;
            self.out.nodes += 1;
            if self.out.nodes > self.budget {
                self.out.exhausted = true;
                return;
            }
            let d = sub_mod(v, pos, self.n);
            self.images.push(v);
            self.extend(pos + 1, free_img & !(1 << v), free_diff & !(1 << d));
            self.images.pop();
            if self.out.exhausted {
                return;
            }
        }
    }
}

/// Counts (and collects up to `limit`) complete mappings of `Z/N`.
pub fn enumerate_complete_mappings(n: u64, limit: Option<usize>) -> Result<MappingCensus, MappingError> {
    let config = EnumerationConfig {
        witness_cap: limit.unwrap_or(DEFAULT_WITNESS_CAP),
        ..EnumerationConfig::default()
    };
    enumerate_with(n, &config)
}

/// Backtracking census. Images are assigned in position order with ascending
/// candidates; the search fans out over the image of position 1 and merges in
/// branch order, so the result does not depend on `workers`.
pub fn enumerate_with(n: u64, config: &EnumerationConfig) -> Result<MappingCensus, MappingError> {
    if n == 0 {
        return Err(GroupError::BadModulus(0).into());
    }
    if n > MAX_ENUMERATION_MODULUS as u64 {
        return Err(MappingError::ModulusTooLarge(n));
    }
    let n32 = n as u32;
    if n == 1 {
        return Ok(MappingCensus {
            modulus: 1,
            count: 1,
            samples: if config.witness_cap > 0 {
                vec![CompleteMapping(Permutation::from_images_unchecked(vec![0]))]
            } else {
                vec![]
            },
            nodes: 0,
        });
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let free_img = full & !1;
    let free_diff = full & !1;
    let budget = config.node_budget.unwrap_or(u64::MAX);

    let first_choices: Vec<u32> = (1..n32)
        .filter(|&v| free_img >> v & 1 == 1 && free_diff >> sub_mod(v, 1, n32) & 1 == 1)
        .collect();

    let run_branch = |v: u32| -> BranchOutcome {
        let mut e = Enumerator {
            n: n32,
            full,
            cap: config.witness_cap,
            budget,
            images: vec![0, v],
            out: BranchOutcome {
                count: 0,
                samples: Vec::new(),
                nodes: 1,
                exhausted: budget == 0,
            },
        };
        let d = sub_mod(v, 1, n32);
        e.extend(2, free_img & !(1 << v), free_diff & !(1 << d));
        e.out
    };

    let outcomes: Vec<BranchOutcome> = if config.workers <= 1 {
        first_choices.iter().map(|&v| run_branch(v)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .expect("failed to build worker pool");
        pool.install(|| first_choices.par_iter().map(|&v| run_branch(v)).collect())
    };

    let mut census = MappingCensus {
        modulus: n32,
        count: 0,
        samples: Vec::new(),
        nodes: 0,
    };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        census.nodes = census.nodes.saturating_add(outcome.nodes);
        if outcome.exhausted || census.nodes > budget {
            return Err(MappingError::BudgetExceeded(Box::new(PartialCensus {
                modulus: n32,
                count: census.count,
                finished_branches: i,
                total_branches: first_choices.len(),
                nodes: census.nodes,
            })));
        }
        census.count += outcome.count;
        for images in outcome.samples {
            if census.samples.len() >= config.witness_cap {
                break;
            }
            census
                .samples
                .push(CompleteMapping(Permutation::from_images_unchecked(images)));
        }
    }
    Ok(census)
}

/// Index pairs `(i, j)`, `i < j`, of census members that are complete
/// mappings of each other (both directions checked).
pub fn compatible_pairs(census: &MappingCensus) -> Result<Vec<(usize, usize)>, MappingError> {
    if !census.has_all_witnesses() {
        return Err(MappingError::MissingWitnesses {
            modulus: census.modulus,
            count: census.count,
            kept: census.samples.len(),
        });
    }
    let maps = &census.samples;
    let mut pairs = Vec::new();
    for i in 0..maps.len() {
        for j in i + 1..maps.len() {
            if is_complete_mapping_of(&maps[i], &maps[j])? && is_complete_mapping_of(&maps[j], &maps[i])? {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}
