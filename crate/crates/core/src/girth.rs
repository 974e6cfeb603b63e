//! Tanner-graph girth, computed two independent ways.
//!
//! [`girth_bfs`] works on any sparse parity-check matrix. [`girth_from_shifts`]
//! never lifts: it walks the complete protograph and tests the alternating
//! shift sum of each closed walk modulo `N`. A closed non-backtracking walk in
//! the protograph lifts to a closed walk exactly when that sum vanishes, so
//! the shortest such walk has the length of the girth.

use std::fmt;

use thiserror::Error;

use crate::group::{add_mod, sub_mod};
use crate::lifting::{ParityCheckMatrix, ShiftMatrix};
use crate::textdoc::{DocReader, DocWriter, ParseError};

pub const DEFAULT_CAP: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Variable(usize),
    Check(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Variable(i) => write!(f, "v{i}"),
            Node::Check(i) => write!(f, "c{i}"),
        }
    }
}

impl std::str::FromStr for Node {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("invalid node `{s}`");
        let (kind, index) = s.split_at_checked(1).ok_or_else(bad)?;
        let index: usize = index.parse().map_err(|_| bad())?;
        match kind {
            "v" => Ok(Node::Variable(index)),
            "c" => Ok(Node::Check(index)),
            _ => Err(bad()),
        }
    }
}

/// Girth of a Tanner graph, relative to a search cap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GirthReport {
    /// `None` when no cycle of length `<= cap` exists.
    pub girth: Option<u32>,
    pub cap: u32,
    /// Number of distinct cycles (as edge sets) of length `girth`.
    pub shortest_cycle_count: u64,
    /// One shortest cycle as an alternating vertex sequence.
    pub witness: Option<Vec<Node>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GirthError {
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl GirthReport {
    fn infinite(cap: u32) -> Self {
        GirthReport {
            girth: None,
            cap,
            shortest_cycle_count: 0,
            witness: None,
        }
    }

    /// Girth and count agree; witnesses may legitimately differ.
    pub fn agrees_with(&self, other: &GirthReport) -> bool {
        self.girth == other.girth && self.shortest_cycle_count == other.shortest_cycle_count
    }

    pub fn girth_label(&self) -> String {
        match self.girth {
            Some(g) => g.to_string(),
            None => "infinite".to_string(),
        }
    }

    pub fn to_text(&self) -> String {
        let witness = match &self.witness {
            Some(w) => w.iter().map(Node::to_string).collect::<Vec<_>>().join(" "),
            None => "none".to_string(),
        };
        DocWriter::new("girth-report")
            .field("cap", self.cap)
            .field("girth", self.girth_label())
            .field("shortest-cycles", self.shortest_cycle_count)
            .field("witness", witness)
            .finish()
    }

    pub fn from_text(text: &str) -> Result<Self, GirthError> {
        let mut doc = DocReader::open(text, "girth-report")?;
        let cap: u32 = doc.parse_field("cap")?;
        let (line, raw) = doc.field("girth")?;
        let girth = match raw {
            "infinite" => None,
            other => Some(
                other
                    .parse()
                    .map_err(|_| ParseError::new(line, format!("invalid girth `{other}`")))?,
            ),
        };
        let shortest_cycle_count: u64 = doc.parse_field("shortest-cycles")?;
        let (line, raw) = doc.field("witness")?;
        let witness = match raw {
            "none" => None,
            other => Some(
                other
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|e: String| ParseError::new(line, e)))
                    .collect::<Result<Vec<Node>, _>>()?,
            ),
        };
        doc.finish()?;
        Ok(GirthReport {
            girth,
            cap,
            shortest_cycle_count,
            witness,
        })
    }
}

struct TannerGraph<'a> {
    h: &'a ParityCheckMatrix,
}

impl TannerGraph<'_> {
    // variables are 0..ncols, checks follow
    fn len(&self) -> usize {
        self.h.ncols() + self.h.nrows()
    }

    fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        let ncols = self.h.ncols();
        let (list, offset) = if u < ncols {
            (self.h.col(u), ncols)
        } else {
            (self.h.row(u - ncols), 0)
        };
        list.iter().map(move |&x| x + offset)
    }

    fn node(&self, u: usize) -> Node {
        let ncols = self.h.ncols();
        if u < ncols {
            Node::Variable(u)
        } else {
            Node::Check(u - ncols)
        }
    }

    /// Length of the shortest cycle through `root` if shorter than `bound`.
    fn shortest_cycle_through(&self, root: usize, bound: u32, dist: &mut [u32], parent: &mut [usize]) -> Option<u32> {
        dist.fill(u32::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut best: Option<u32> = None;
        while let Some(u) = queue.pop_front() {
            let limit = best.unwrap_or(bound);
            if 2 * dist[u] + 1 >= limit {
                break;
            }
            for x in self.neighbors(u) {
                if x == parent[u] {
                    continue;
                }
                if dist[x] == u32::MAX {
                    dist[x] = dist[u] + 1;
                    parent[x] = u;
                    queue.push_back(x);
                } else {
                    let len = dist[u] + dist[x] + 1;
                    if len < best.unwrap_or(bound) {
                        best = Some(len);
                    }
                }
            }
        }
        best
    }
}

/// Exact girth of the Tanner graph of `h` when it is at most `cap`.
pub fn girth_bfs(h: &ParityCheckMatrix, cap: u32) -> GirthReport {
    assert!(cap >= 4, "girth cap must be at least 4");
    let graph = TannerGraph { h };
    let size = graph.len();
    let mut dist = vec![u32::MAX; size];
    let mut parent = vec![usize::MAX; size];

    // every cycle meets a variable node, so variable roots suffice
    let mut girth: Option<u32> = None;
    for root in 0..h.ncols() {
        let bound = girth.unwrap_or(cap + 1);
        if let Some(len) = graph.shortest_cycle_through(root, bound, &mut dist, &mut parent) {
            girth = Some(len);
        }
    }
    let Some(g) = girth else {
        return GirthReport::infinite(cap);
    };
    debug_assert!(g % 2 == 0, "Tanner graphs are bipartite");

    // A g-cycle through v pairs two shortest paths from v to its antipode at
    // distance g/2; below the girth those paths are internally disjoint.
    let half = g / 2;
    let mut paths = vec![0u64; size];
    let mut pair_total: u64 = 0;
    let mut witness = None;
    for root in 0..h.ncols() {
        dist.fill(u32::MAX);
        paths.fill(0);
        dist[root] = 0;
        paths[root] = 1;
        parent[root] = usize::MAX;
        let mut frontier = vec![root];
        for depth in 1..=half {
            let mut next = Vec::new();
            for &u in &frontier {
                for x in graph.neighbors(u) {
                    if dist[x] == u32::MAX {
                        dist[x] = depth;
                        parent[x] = u;
                        next.push(x);
                    }
                    if dist[x] == depth {
                        paths[x] += paths[u];
                    }
                }
            }
            frontier = next;
        }
        for &w in &frontier {
            let s = paths[w];
            pair_total += s * (s - 1) / 2;
            if s >= 2 && witness.is_none() {
                witness = Some(bfs_witness(&graph, &dist, &parent, root, w));
            }
        }
    }
    GirthReport {
        girth: Some(g),
        cap,
        // each cycle is seen once from each of its g/2 variable nodes
        shortest_cycle_count: pair_total / half as u64,
        witness,
    }
}

fn bfs_witness(graph: &TannerGraph<'_>, dist: &[u32], parent: &[usize], root: usize, w: usize) -> Vec<Node> {
    let preds: Vec<usize> = graph
        .neighbors(w)
        .filter(|&x| dist[x] != u32::MAX && dist[x] + 1 == dist[w])
        .take(2)
        .collect();
    let trace = |mut u: usize| {
        let mut path = vec![u];
        while u != root {
            u = parent[u];
            path.push(u);
        }
        path.reverse();
        path
    };
    let mut cycle = trace(preds[0]);
    cycle.push(w);
    let back = trace(preds[1]);
    cycle.extend(back.iter().skip(1).rev());
    cycle.into_iter().map(|u| graph.node(u)).collect()
}

/// Depth-first enumeration of closed non-backtracking protograph walks
/// `c0 v0 c1 v1 ... c(k-1) v(k-1) c0` with zero alternating shift sum.
struct WalkSearch<'a> {
    p: &'a ShiftMatrix,
    half: usize,
    checks: Vec<usize>,
    vars: Vec<usize>,
    stop_at_first: bool,
    found: u64,
    first: Option<(Vec<usize>, Vec<usize>)>,
}

impl WalkSearch<'_> {
    fn run(&mut self) {
        for c0 in 0..self.p.rows() {
            self.checks.push(c0);
            self.walk_check(c0, 0);
            self.checks.pop();
            if self.stop_at_first && self.found > 0 {
                return;
            }
        }
    }

    /// At check `c` with partial sum `sum` (entering a new variable next).
    fn walk_check(&mut self, c: usize, sum: u32) {
        let (rows, cols, n) = (self.p.rows(), self.p.cols(), self.p.lifting_factor());
        let step = self.vars.len();
        let c0 = self.checks[0];
        for v in 0..cols {
            if step > 0 && v == self.vars[step - 1] {
                continue;
            }
            let closing = step + 1 == self.half;
            if closing && v == self.vars[0] {
                continue;
            }
            let sum = add_mod(sum, self.p.get(c, v), n);
            if closing {
                if c != c0 && sub_mod(sum, self.p.get(c0, v), n) == 0 {
                    self.found += 1;
                    if self.first.is_none() {
                        let mut vars = self.vars.clone();
                        vars.push(v);
                        self.first = Some((self.checks.clone(), vars));
                    }
                    if self.stop_at_first {
                        return;
                    }
                }
                continue;
            }
            self.vars.push(v);
            for c_next in 0..rows {
                if c_next == c {
                    continue;
                }
                self.checks.push(c_next);
                self.walk_check(c_next, sub_mod(sum, self.p.get(c_next, v), n));
                self.checks.pop();
                if self.stop_at_first && self.found > 0 {
                    self.vars.pop();
                    return;
                }
            }
            self.vars.pop();
        }
    }
}

fn zero_sum_walks(p: &ShiftMatrix, length: u32, stop_at_first: bool) -> WalkSearch<'_> {
    let mut search = WalkSearch {
        p,
        half: (length / 2) as usize,
        checks: Vec::new(),
        vars: Vec::new(),
        stop_at_first,
        found: 0,
        first: None,
    };
    search.run();
    search
}

/// Lifts a protograph walk starting from copy 0 of its first check.
fn lift_walk(p: &ShiftMatrix, checks: &[usize], vars: &[usize]) -> Vec<Node> {
    let n = p.lifting_factor();
    let nu = n as usize;
    let mut r = 0u32;
    let mut out = Vec::with_capacity(2 * vars.len());
    for (i, &v) in vars.iter().enumerate() {
        let c = checks[i];
        out.push(Node::Check(c * nu + r as usize));
        let a = add_mod(r, p.get(c, v), n);
        out.push(Node::Variable(v * nu + a as usize));
        let next = checks.get(i + 1).copied().unwrap_or(checks[0]);
        r = sub_mod(a, p.get(next, v), n);
    }
    debug_assert_eq!(r, 0);
    out.rotate_left(1);
    out
}

/// Girth of `lift(p)` computed from the shifts alone.
pub fn girth_from_shifts(p: &ShiftMatrix, cap: u32) -> GirthReport {
    assert!(cap >= 4, "girth cap must be at least 4");
    for length in (4..=cap).step_by(2) {
        let search = zero_sum_walks(p, length, false);
        if search.found > 0 {
            let (checks, vars) = search.first.expect("found walk is recorded");
            // each lifted cycle is counted once per starting check copy and
            // direction: `length` rooted walks per cycle, N copies per walk
            let count = search.found * p.lifting_factor() as u64 / length as u64;
            return GirthReport {
                girth: Some(length),
                cap,
                shortest_cycle_count: count,
                witness: Some(lift_walk(p, &checks, &vars)),
            };
        }
    }
    GirthReport::infinite(cap)
}

/// Whether `lift(p)` has no cycle shorter than `g` (early exit on the first one).
pub fn has_girth_at_least(p: &ShiftMatrix, g: u32) -> bool {
    assert!(
        g >= 4 && g.is_multiple_of(2),
        "target girth must be even and at least 4"
    );
    (4..g)
        .step_by(2)
        .all(|length| zero_sum_walks(p, length, true).found == 0)
}

/// Number of 4-cycles in `lift(p)`: every 2 x 2 submatrix with zero
/// alternating sum contributes `N` of them.
pub fn count_4cycles(p: &ShiftMatrix) -> u64 {
    let n = p.lifting_factor();
    let mut total = 0;
    for j1 in 0..p.rows() {
        for j2 in j1 + 1..p.rows() {
            for l1 in 0..p.cols() {
                for l2 in l1 + 1..p.cols() {
                    let sum = add_mod(
                        sub_mod(p.get(j1, l1), p.get(j1, l2), n),
                        sub_mod(p.get(j2, l2), p.get(j2, l1), n),
                        n,
                    );
                    if sum == 0 {
                        total += n as u64;
                    }
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Permutation;
    use crate::lifting::{canonical_from_mapping, lift, normalize};
    use crate::mappings::product_mapping;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn array_code(n: u64) -> ShiftMatrix {
        canonical_from_mapping(&product_mapping(2, n).unwrap()).unwrap()
    }

    /// Oracle: 4-cycles are pairs of checks sharing two variables.
    fn brute_4cycles(h: &ParityCheckMatrix) -> u64 {
        let mut total = 0;
        for r1 in 0..h.nrows() {
            for r2 in r1 + 1..h.nrows() {
                let a: BTreeSet<_> = h.row(r1).iter().collect();
                let shared = h.row(r2).iter().filter(|c| a.contains(c)).count() as u64;
                total += shared * shared.saturating_sub(1) / 2;
            }
        }
        total
    }

    fn assert_cycle(h: &ParityCheckMatrix, cycle: &[Node]) {
        let distinct: BTreeSet<_> = cycle.iter().collect();
        assert_eq!(distinct.len(), cycle.len(), "vertices repeat in {cycle:?}");
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            let (r, c) = match (a, b) {
                (Node::Check(r), Node::Variable(c)) | (Node::Variable(c), Node::Check(r)) => (r, c),
                _ => panic!("witness does not alternate: {cycle:?}"),
            };
            assert!(h.contains(r, c), "edge ({r}, {c}) missing");
        }
    }

    #[test]
    fn bfs_examples() {
        let h = lift(&array_code(5));
        let report = girth_bfs(&h, 12);
        assert_eq!(report.girth, Some(6));
        assert_cycle(&h, report.witness.as_ref().unwrap());
        assert_eq!(report.witness.as_ref().unwrap().len(), 6);

        let zeros = ShiftMatrix::zeros(3, 2, 2).unwrap();
        let report = girth_bfs(&lift(&zeros), 12);
        assert_eq!(report.girth, Some(4));
        // two disjoint copies of K(3,2), three 4-cycles each
        assert_eq!(report.shortest_cycle_count, 6);

        let single = ShiftMatrix::zeros(1, 1, 5).unwrap();
        assert_eq!(girth_bfs(&lift(&single), 12), GirthReport::infinite(12));
    }

    #[test]
    fn bfs_on_plain_cycles() {
        // a 2k-cycle as a k x k matrix: check i meets variables i and i+1
        for k in 2..8usize {
            let ones = (0..k).flat_map(|i| [(i, i), (i, (i + 1) % k)]);
            let h = ParityCheckMatrix::from_ones(k, k, ones);
            let report = girth_bfs(&h, 16);
            assert_eq!(report.girth, Some(2 * k as u32));
            assert_eq!(report.shortest_cycle_count, 1);
            assert_cycle(&h, report.witness.as_ref().unwrap());
            if k > 2 {
                assert_eq!(girth_bfs(&h, 2 * k as u32 - 2).girth, None);
            }
        }
    }

    #[test]
    fn shifts_examples() {
        let p = array_code(5);
        let from_shifts = girth_from_shifts(&p, 12);
        assert_eq!(from_shifts.girth, Some(6));
        assert!(from_shifts.agrees_with(&girth_bfs(&lift(&p), 12)));
        assert_cycle(&lift(&p), from_shifts.witness.as_ref().unwrap());

        let repeated = ShiftMatrix::from_rows(7, &[[0, 0, 0], [0, 3, 3], [0, 1, 2]]).unwrap();
        assert_eq!(girth_from_shifts(&repeated, 12).girth, Some(4));

        let array_3x4 = array_code(5).delete_column(4).unwrap();
        assert_eq!(girth_from_shifts(&array_3x4, 12).girth, Some(6));
        assert_eq!(girth_from_shifts(&ShiftMatrix::zeros(1, 4, 3).unwrap(), 12).girth, None);
    }

    #[test]
    fn four_cycle_examples() {
        assert_eq!(count_4cycles(&array_code(7)), 0);
        let zeros = ShiftMatrix::zeros(3, 2, 2).unwrap();
        assert_eq!(count_4cycles(&zeros), brute_4cycles(&lift(&zeros)));
        assert_eq!(count_4cycles(&zeros), 6);
    }

    #[test]
    fn four_cycle_count_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rows = rng.gen_range(1..4);
            let cols = rng.gen_range(1..6);
            let n = rng.gen_range(1..10);
            let entries = (0..rows * cols).map(|_| rng.gen_range(0..n)).collect();
            let p = ShiftMatrix::new(rows, cols, n, entries).unwrap();
            let h = lift(&p);
            assert_eq!(count_4cycles(&p), brute_4cycles(&h), "{p}");
            let report = girth_bfs(&h, 12);
            if report.girth == Some(4) {
                assert_eq!(report.shortest_cycle_count, count_4cycles(&p));
            }
        }
    }

    #[test]
    fn girth_threshold_examples() {
        let p = canonical_from_mapping(&product_mapping(6, 7).unwrap()).unwrap();
        assert!(has_girth_at_least(&p, 6));
        assert!(!has_girth_at_least(&p, 8));
        let repeated = ShiftMatrix::from_rows(7, &[[0, 0, 0], [0, 3, 3], [0, 1, 2]]).unwrap();
        assert!(!has_girth_at_least(&repeated, 6));
    }

    #[test]
    fn girth_invariant_under_isomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..60 {
            let n = rng.gen_range(3..12);
            let entries = (0..12).map(|_| rng.gen_range(0..n)).collect();
            let p = ShiftMatrix::new(3, 4, n, entries).unwrap();
            let base = girth_from_shifts(&p, 12);
            let mut shifted = p.clone();
            shifted.shift_row(1, rng.gen_range(0..n));
            shifted.shift_col(2, rng.gen_range(0..n));
            assert!(girth_from_shifts(&shifted, 12).agrees_with(&base));
            assert!(girth_from_shifts(&normalize(&p), 12).agrees_with(&base));
            let permuted = p.permute_columns(&[2, 0, 3, 1]).unwrap();
            assert!(girth_from_shifts(&permuted, 12).agrees_with(&base));
        }
    }

    #[test]
    fn report_text_round_trip() {
        let report = girth_bfs(&lift(&array_code(5)), 12);
        assert_eq!(GirthReport::from_text(&report.to_text()).unwrap(), report);
        let infinite = GirthReport::infinite(8);
        assert_eq!(
            infinite.to_text(),
            "#qcldpc girth-report v1\ncap 8\ngirth infinite\nshortest-cycles 0\nwitness none\n"
        );
        assert_eq!(GirthReport::from_text(&infinite.to_text()).unwrap(), infinite);
        assert!(GirthReport::from_text("#qcldpc girth-report v1\ncap 8\ngirth x\n").is_err());
    }

    #[test]
    fn identity_mapping_has_four_cycles() {
        let p = canonical_from_mapping(&Permutation::identity(5).unwrap()).unwrap();
        assert!(count_4cycles(&p) > 0);
    }
}
