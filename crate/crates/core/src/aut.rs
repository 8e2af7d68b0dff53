//! Automorphism-group computation by equitable-partition refinement plus
//! individualization backtracking, with a factorial-time oracle for graphs
//! on at most 8 vertices.
//!
//! The search computes a stabilizer tower along the first individualization
//! path: at depth `d` it looks for one automorphism per candidate image of
//! the path vertex, fixing the path prefix pointwise. Coset representatives
//! found this way generate the full group by orbit-stabilizer. Every
//! candidate leaf is verified against the adjacency matrix before being
//! accepted, so pruning (cell-structure comparison against the first path,
//! orbit skipping under the generators found so far) affects speed only.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{bits, mask_below, Graph, Partition};
use crate::group::PermGroup;
use crate::perm::Perm;

/// Largest graph the naive factorial oracle accepts.
pub const NAIVE_ORACLE_CAP: usize = 8;

/// Refines an ordered partition (cells as bit masks) to the coarsest
/// equitable partition refining it: every vertex of a cell has the same
/// number of neighbours in every cell. Subcells produced by a split are
/// ordered by ascending neighbour count, which keeps the computation
/// equivariant under relabeling.
///
/// The returned trace records every split as (cell position, count values);
/// it is label-independent, so two partitions reached by corresponding
/// individualization choices refine with identical traces. The search uses
/// it, together with the cell-size sequence, as its pruning invariant.
fn refine_cells(g: &Graph, mut cells: Vec<u128>) -> (Vec<u128>, Trace) {
    let mut trace = Vec::new();
    let mut queue: VecDeque<u128> = cells.iter().copied().collect();
    while let Some(w) = queue.pop_front() {
        let mut i = 0;
        while i < cells.len() {
            let c = cells[i];
            if c.count_ones() <= 1 {
                i += 1;
                continue;
            }
            let mut buckets: BTreeMap<u32, u128> = BTreeMap::new();
            for v in bits(c) {
                let cnt = (g.row(v) & w).count_ones();
                *buckets.entry(cnt).or_insert(0) |= 1u128 << v;
            }
            if buckets.len() > 1 {
                trace.push((i, buckets.keys().copied().collect()));
                let parts: Vec<u128> = buckets.into_values().collect();
                for p in &parts {
                    queue.push_back(*p);
                }
                let count = parts.len();
                cells.splice(i..=i, parts);
                i += count;
            } else {
                i += 1;
            }
        }
    }
    (cells, trace)
}

type Trace = Vec<(usize, Vec<u32>)>;

/// Splits cell `t` into `[{v}, rest]` in place of the original cell.
fn individualize(cells: &[u128], t: usize, v: usize) -> Vec<u128> {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..t]);
    out.push(1u128 << v);
    let rest = cells[t] & !(1u128 << v);
    if rest != 0 {
        out.push(rest);
    }
    out.extend_from_slice(&cells[t + 1..]);
    out
}

/// Target cell rule: the first cell of smallest size ≥ 2.
fn target_cell(cells: &[u128]) -> Option<usize> {
    let mut best: Option<(usize, u32)> = None;
    for (i, &c) in cells.iter().enumerate() {
        let sz = c.count_ones();
        if sz >= 2 && best.is_none_or(|(_, bs)| sz < bs) {
            best = Some((i, sz));
        }
    }
    best.map(|(i, _)| i)
}

fn cell_sizes(cells: &[u128]) -> Vec<u32> {
    cells.iter().map(|c| c.count_ones()).collect()
}

struct PathNode {
    cells: Vec<u128>,
    target: usize,
    chosen: usize,
}

struct SearchCtx<'g> {
    g: &'g Graph,
    /// Cell-size vector and refinement trace of the first path at each
    /// depth; nodes deviating in either cannot lead to a leaf equivalent to
    /// the first one.
    structures: Vec<(Vec<u32>, Trace)>,
    /// First-leaf labeling: position → vertex.
    first_leaf: Vec<usize>,
}

impl SearchCtx<'_> {
    /// Depth-first search below one individualization, returning the first
    /// automorphism found in the subtree (or None if it contains none).
    fn dfs(&self, cells: Vec<u128>, trace: &Trace, depth: usize) -> Option<Perm> {
        if depth >= self.structures.len() {
            return None;
        }
        let (sizes, first_trace) = &self.structures[depth];
        if cell_sizes(&cells) != *sizes || trace != first_trace {
            return None;
        }
        match target_cell(&cells) {
            None => {
                let n = self.g.vertex_count();
                let mut img = vec![0usize; n];
                for (i, &c) in cells.iter().enumerate() {
                    img[self.first_leaf[i]] = c.trailing_zeros() as usize;
                }
                let p = Perm::from_images(img).expect("discrete partition yields a bijection");
                if self.g.is_automorphism(&p) {
                    Some(p)
                } else {
                    None
                }
            }
            Some(t) => {
                for w in bits(cells[t]) {
                    let (next, next_trace) = refine_cells(self.g, individualize(&cells, t, w));
                    if let Some(p) = self.dfs(next, &next_trace, depth + 1) {
                        return Some(p);
                    }
                }
                None
            }
        }
    }
}

fn orbit_mask(v: usize, gens: &[Perm]) -> u128 {
    let mut mask = 1u128 << v;
    let mut frontier = vec![v];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = g.apply(x);
            if mask >> y & 1 == 0 {
                mask |= 1u128 << y;
                frontier.push(y);
            }
        }
    }
    mask
}

/// Computes a generating set for the full automorphism group of `g`.
///
/// Every returned generator is verified to preserve adjacency. The only
/// error case is a group order overflowing `u128` (possible from roughly
/// 35 interchangeable vertices up).
pub fn automorphism_group(g: &Graph) -> Result<PermGroup> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(PermGroup::trivial(0));
    }
    let (root, root_trace) = refine_cells(g, vec![mask_below(n)]);
    let mut structures = vec![(cell_sizes(&root), root_trace)];
    let mut path: Vec<PathNode> = Vec::new();
    let mut cells = root;
    while let Some(t) = target_cell(&cells) {
        let v = cells[t].trailing_zeros() as usize;
        let (next, next_trace) = refine_cells(g, individualize(&cells, t, v));
        path.push(PathNode {
            cells,
            target: t,
            chosen: v,
        });
        structures.push((cell_sizes(&next), next_trace));
        cells = next;
    }
    let first_leaf: Vec<usize> = cells.iter().map(|c| c.trailing_zeros() as usize).collect();
    let ctx = SearchCtx {
        g,
        structures,
        first_leaf,
    };

    let mut gens: Vec<Perm> = Vec::new();
    for d in (0..path.len()).rev() {
        let node = &path[d];
        let mut orbit = orbit_mask(node.chosen, &gens);
        for w in bits(node.cells[node.target]) {
            if orbit >> w & 1 == 1 {
                continue;
            }
            let (start, start_trace) = refine_cells(g, individualize(&node.cells, node.target, w));
            if let Some(p) = ctx.dfs(start, &start_trace, d + 1) {
                debug_assert!(g.is_automorphism(&p));
                gens.push(p);
                orbit = orbit_mask(node.chosen, &gens);
            }
        }
    }
    PermGroup::new(n, gens)
}

/// Filters all n! permutations by adjacency preservation and builds the
/// group from the full element list. The independent oracle for the search
/// engine; refuses graphs on more than [`NAIVE_ORACLE_CAP`] vertices.
pub fn naive_automorphisms(g: &Graph) -> Result<PermGroup> {
    let n = g.vertex_count();
    if n > NAIVE_ORACLE_CAP {
        return Err(Error::Capacity(format!(
            "naive oracle accepts at most {} vertices, got {}",
            NAIVE_ORACLE_CAP, n
        )));
    }
    let mut found = Vec::new();
    let mut img: Vec<usize> = (0..n).collect();
    permute_filter(g, &mut img, 0, &mut found);
    PermGroup::new(n, found)
}

fn permute_filter(g: &Graph, img: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
    let n = img.len();
    if k == n {
        let p = Perm::from_images(img.clone()).unwrap();
        if g.is_automorphism(&p) {
            out.push(p);
        }
        return;
    }
    for i in k..n {
        img.swap(k, i);
        // partial adjacency consistency against already-placed vertices
        let consistent = (0..k).all(|j| g.has_edge(j, k) == g.has_edge(img[j], img[k]));
        if consistent {
            permute_filter(g, img, k + 1, out);
        }
        img.swap(k, i);
    }
}

/// The coarsest equitable partition refining `p`: every vertex of a block
/// has the same number of neighbours in every block. Idempotent. Blocks are
/// returned in refinement order (split parts by ascending neighbour count).
pub fn equitable_refinement(g: &Graph, p: &Partition) -> Result<Partition> {
    if p.ground_size() != g.vertex_count() {
        return Err(Error::Validation(format!(
            "partition of {} vertices does not match graph on {}",
            p.ground_size(),
            g.vertex_count()
        )));
    }
    let cells: Vec<u128> = p
        .blocks()
        .iter()
        .map(|b| b.iter().fold(0u128, |m, &v| m | 1u128 << v))
        .collect();
    let (refined, _) = refine_cells(g, cells);
    let blocks: Vec<Vec<usize>> = refined.iter().map(|&c| bits(c).collect()).collect();
    Partition::new(g.vertex_count(), blocks)
}
