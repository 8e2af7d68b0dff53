use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Perm;

/// Hard vertex cap: one `u128` word per adjacency row.
pub const MAX_VERTICES: usize = 128;

/// An immutable simple undirected graph. Adjacency is stored as one bit row
/// per vertex, so `rows[u] >> v & 1` answers "is {u,v} an edge" and whole-row
/// operations (neighbourhood comparison, counting into a cell) are single
/// word ops.
///
/// Invariants: symmetric, loop-free.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<u128>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Graph> {
        if n > MAX_VERTICES {
            return Err(Error::Capacity(format!(
                "{} vertices exceeds the cap of {}",
                n, MAX_VERTICES
            )));
        }
        Ok(Graph {
            n,
            rows: vec![0; n],
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    u, v, n
                )));
            }
            if u == v {
                return Err(Error::Validation(format!("loop at vertex {}", u)));
            }
            g.rows[u] |= 1u128 << v;
            g.rows[v] |= 1u128 << u;
        }
        Ok(g)
    }

    /// The complete graph K_n.
    pub fn complete(n: usize) -> Result<Graph> {
        let mut g = Graph::empty(n)?;
        let all = mask_below(n);
        for u in 0..n {
            g.rows[u] = all & !(1u128 << u);
        }
        Ok(g)
    }

    /// The cycle C_n (edgeless for n < 3).
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Graph::empty(n);
        }
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u] >> v & 1 == 1
    }

    /// Adjacency row of `v` as a bit mask.
    #[inline]
    pub fn row(&self, v: usize) -> u128 {
        self.rows[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        bits(self.rows[v])
    }

    pub fn edge_count(&self) -> usize {
        self.rows
            .iter()
            .map(|r| r.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// All edges as (u, v) with u < v, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in bits(self.rows[u] & !mask_below(u + 1)) {
                out.push((u, v));
            }
        }
        out
    }

    /// The image graph under a vertex bijection: {u,v} becomes {p(u), p(v)}.
    pub fn relabel(&self, p: &Perm) -> Result<Graph> {
        if p.degree() != self.n {
            return Err(Error::Validation(format!(
                "permutation degree {} does not match {} vertices",
                p.degree(),
                self.n
            )));
        }
        let mut g = Graph {
            n: self.n,
            rows: vec![0; self.n],
        };
        for u in 0..self.n {
            let pu = p.apply(u);
            for v in bits(self.rows[u]) {
                g.rows[pu] |= 1u128 << p.apply(v);
            }
        }
        Ok(g)
    }

    /// Does `p` map edges to edges and non-edges to non-edges?
    pub fn is_automorphism(&self, p: &Perm) -> bool {
        if p.degree() != self.n {
            return false;
        }
        for u in 0..self.n {
            let pu = p.apply(u);
            let mut mapped = 0u128;
            for v in bits(self.rows[u]) {
                mapped |= 1u128 << p.apply(v);
            }
            if mapped != self.rows[pu] {
                return false;
            }
        }
        true
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = 1u128;
        let mut frontier = 1u128;
        while frontier != 0 {
            let mut next = 0u128;
            for v in bits(frontier) {
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == mask_below(self.n)
    }

    /// Two-colours the graph if possible. The returned partition lists the
    /// colour class containing vertex 0 first; an empty class (edgeless
    /// components only) is dropped to keep partition blocks nonempty.
    pub fn bipartition(&self) -> Option<Partition> {
        let n = self.n;
        let mut colour = vec![usize::MAX; n];
        for start in 0..n {
            if colour[start] != usize::MAX {
                continue;
            }
            colour[start] = 0;
            let mut queue = vec![start];
            while let Some(u) = queue.pop() {
                for v in bits(self.rows[u]) {
                    if colour[v] == usize::MAX {
                        colour[v] = 1 - colour[u];
                        queue.push(v);
                    } else if colour[v] == colour[u] {
                        return None;
                    }
                }
            }
        }
        let class0: Vec<usize> = (0..n).filter(|&v| colour[v] == 0).collect();
        let class1: Vec<usize> = (0..n).filter(|&v| colour[v] == 1).collect();
        let blocks: Vec<Vec<usize>> = [class0, class1]
            .into_iter()
            .filter(|c| !c.is_empty())
            .collect();
        Some(Partition::new(n, blocks).expect("2-colouring always forms a partition"))
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Groups vertices by identical open neighbourhood; blocks are ordered by
    /// their minimum vertex. The graph is irreducible iff every block is a
    /// singleton.
    #[allow(clippy::needless_range_loop)]
    pub fn neighborhood_partition(&self) -> Partition {
        let mut assigned = vec![false; self.n];
        let mut blocks = Vec::new();
        for u in 0..self.n {
            if assigned[u] {
                continue;
            }
            let mut block = vec![u];
            assigned[u] = true;
            for v in u + 1..self.n {
                if !assigned[v] && self.rows[v] == self.rows[u] {
                    block.push(v);
                    assigned[v] = true;
                }
            }
            blocks.push(block);
        }
        Partition::new(self.n, blocks).expect("equivalence classes form a partition")
    }

    /// No two distinct vertices share an open neighbourhood.
    pub fn is_irreducible(&self) -> bool {
        self.neighborhood_partition()
            .blocks()
            .iter()
            .all(|b| b.len() == 1)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph[n={}, edges={:?}]", self.n, self.edges())
    }
}

#[inline]
pub(crate) fn mask_below(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Iterates the set bits of a mask in ascending order.
pub(crate) fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr {
            n: self.n,
            edges: self.edges(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Graph, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        Graph::from_edges(repr.n, &repr.edges).map_err(D::Error::custom)
    }
}

/// An inverse-closed subset of Z_n \ {0}; the defining data of a circulant.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConnectionSet {
    n: usize,
    elems: Vec<usize>,
}

impl ConnectionSet {
    /// Validates and normalizes: elements sorted ascending, deduplicated,
    /// each in 1..n, and closed under s ↦ n − s.
    pub fn new(n: usize, elems: impl IntoIterator<Item = usize>) -> Result<ConnectionSet> {
        if n == 0 {
            return Err(Error::Validation("modulus must be positive".into()));
        }
        let mut v: Vec<usize> = elems.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        for &s in &v {
            if s == 0 {
                return Err(Error::Validation(
                    "connection set must not contain 0".into(),
                ));
            }
            if s >= n {
                return Err(Error::Validation(format!(
                    "element {} out of range for modulus {}",
                    s, n
                )));
            }
            if !v.contains(&((n - s) % n)) {
                return Err(Error::Validation(format!(
                    "set is not inverse-closed: {} present but {} missing (mod {})",
                    s,
                    (n - s) % n,
                    n
                )));
            }
        }
        Ok(ConnectionSet { n, elems: v })
    }

    pub fn modulus(&self) -> usize {
        self.n
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, s: usize) -> bool {
        self.elems.binary_search(&s).is_ok()
    }

    /// S = Z_n \ {0}, i.e. the circulant is K_n.
    pub fn is_full(&self) -> bool {
        self.elems.len() == self.n - 1
    }
}

impl std::fmt::Debug for ConnectionSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cay(Z_{}, {:?})", self.n, self.elems)
    }
}

#[derive(Serialize, Deserialize)]
struct ConnectionSetRepr {
    n: usize,
    set: Vec<usize>,
}

impl Serialize for ConnectionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ConnectionSetRepr {
            n: self.n,
            set: self.elems.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ConnectionSet {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<ConnectionSet, D::Error> {
        let repr = ConnectionSetRepr::deserialize(deserializer)?;
        ConnectionSet::new(repr.n, repr.set).map_err(D::Error::custom)
    }
}

/// A partition of {0, …, n−1} into disjoint nonempty blocks.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Partition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Partition> {
        let mut seen = vec![false; n];
        let mut count = 0;
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(Error::Validation("empty block in partition".into()));
            }
            block.sort_unstable();
            for &v in block.iter() {
                if v >= n {
                    return Err(Error::Validation(format!(
                        "vertex {} out of range for {} vertices",
                        v, n
                    )));
                }
                if seen[v] {
                    return Err(Error::Validation(format!(
                        "vertex {} appears in two blocks",
                        v
                    )));
                }
                seen[v] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::Validation(format!(
                "blocks cover {} of {} vertices",
                count, n
            )));
        }
        Ok(Partition { n, blocks })
    }

    /// The partition with a single block {0, …, n−1}.
    pub fn unit(n: usize) -> Partition {
        if n == 0 {
            return Partition { n, blocks: vec![] };
        }
        Partition {
            n,
            blocks: vec![(0..n).collect()],
        }
    }

    /// The discrete partition into singletons.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            n,
            blocks: (0..n).map(|v| vec![v]).collect(),
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// The circulant Cay(Z_n, S): u ~ v iff (v − u) mod n ∈ S.
pub fn circulant(cs: &ConnectionSet) -> Result<Graph> {
    let n = cs.modulus();
    let mut g = Graph::empty(n)?;
    for u in 0..n {
        for &s in cs.elems() {
            let v = (u + s) % n;
            g.rows[u] |= 1u128 << v;
            g.rows[v] |= 1u128 << u;
        }
    }
    Ok(g)
}

/// The canonical (bipartite) double cover B(X) = X × K₂. Vertex (v, i) is
/// encoded as v + n·i, so colour class i = 0 occupies indices 0..n.
pub fn bipartite_double_cover(x: &Graph) -> Result<Graph> {
    let n = x.vertex_count();
    let mut g = Graph::empty(2 * n)?;
    for (u, v) in x.edges() {
        // {(u,0),(v,1)} and {(v,0),(u,1)}
        g.rows[u] |= 1u128 << (v + n);
        g.rows[v + n] |= 1u128 << u;
        g.rows[v] |= 1u128 << (u + n);
        g.rows[u + n] |= 1u128 << v;
    }
    Ok(g)
}

/// The wreath (lexicographic) product: vertex (u₁, u₂) encoded as
/// u₁·|V(Γ)| + u₂; (u₁,u₂) ~ (v₁,v₂) iff {u₁,v₁} ∈ E(Σ), or u₁ = v₁ and
/// {u₂,v₂} ∈ E(Γ).
pub fn wreath_product(sigma: &Graph, gamma: &Graph) -> Result<Graph> {
    let a = sigma.vertex_count();
    let b = gamma.vertex_count();
    let mut g = Graph::empty(
        a.checked_mul(b)
            .ok_or_else(|| Error::Capacity("wreath product vertex count overflow".into()))?,
    )?;
    for u1 in 0..a {
        for u2 in 0..b {
            let u = u1 * b + u2;
            for v1 in bits(sigma.rows[u1]) {
                for v2 in 0..b {
                    g.rows[u] |= 1u128 << (v1 * b + v2);
                }
            }
            for v2 in bits(gamma.rows[u2]) {
                g.rows[u] |= 1u128 << (u1 * b + v2);
            }
        }
    }
    Ok(g)
}

/// The deleted wreath product Σ wr_d K̄_d: vertex (u₁, i) encoded as
/// u₁·d + i; (u₁,i) ~ (v₁,j) iff {u₁,v₁} ∈ E(Σ) and i ≠ j.
pub fn deleted_wreath_product(sigma: &Graph, d: usize) -> Result<Graph> {
    if d == 0 {
        return Err(Error::Validation(
            "deleted wreath product requires d ≥ 1".into(),
        ));
    }
    let a = sigma.vertex_count();
    let mut g =
        Graph::empty(a.checked_mul(d).ok_or_else(|| {
            Error::Capacity("deleted wreath product vertex count overflow".into())
        })?)?;
    for u1 in 0..a {
        for i in 0..d {
            let u = u1 * d + i;
            for v1 in bits(sigma.rows[u1]) {
                for j in 0..d {
                    if i != j {
                        g.rows[u] |= 1u128 << (v1 * d + j);
                    }
                }
            }
        }
    }
    Ok(g)
}

/// The quotient graph: blocks of `p` become vertices (in block order), two
/// distinct blocks adjacent iff some cross edge exists. Edges internal to a
/// block are discarded, so the quotient is always loop-free.
#[allow(clippy::needless_range_loop)]
pub fn quotient_graph(y: &Graph, p: &Partition) -> Result<Graph> {
    if p.ground_size() != y.vertex_count() {
        return Err(Error::Validation(format!(
            "partition of {} vertices does not match graph on {}",
            p.ground_size(),
            y.vertex_count()
        )));
    }
    let blocks = p.blocks();
    let masks: Vec<u128> = blocks
        .iter()
        .map(|b| b.iter().fold(0u128, |m, &v| m | 1u128 << v))
        .collect();
    let mut g = Graph::empty(blocks.len())?;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let cross = blocks[i].iter().any(|&v| y.rows[v] & masks[j] != 0);
            if cross {
                g.rows[i] |= 1u128 << j;
                g.rows[j] |= 1u128 << i;
            }
        }
    }
    Ok(g)
}

/// Brute-force isomorphism search: backtracks over vertex bijections with
/// degree and adjacency consistency pruning. Intended for the small graphs
/// that appear in tests and audit verification, not as a general solver.
pub fn find_isomorphism(g: &Graph, h: &Graph) -> Option<Perm> {
    let n = g.vertex_count();
    if h.vertex_count() != n || g.edge_count() != h.edge_count() {
        return None;
    }
    let mut g_degs: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut h_degs: Vec<usize> = (0..n).map(|v| h.degree(v)).collect();
    g_degs.sort_unstable();
    h_degs.sort_unstable();
    if g_degs != h_degs {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = 0u128;
    if extend_isomorphism(g, h, 0, &mut map, &mut used) {
        Some(Perm::from_images(map).expect("complete mapping is a bijection"))
    } else {
        None
    }
}

fn extend_isomorphism(
    g: &Graph,
    h: &Graph,
    u: usize,
    map: &mut Vec<usize>,
    used: &mut u128,
) -> bool {
    let n = g.vertex_count();
    if u == n {
        return true;
    }
    for w in 0..n {
        if *used >> w & 1 == 1 || g.degree(u) != h.degree(w) {
            continue;
        }
        let consistent = (0..u).all(|prev| g.has_edge(u, prev) == h.has_edge(w, map[prev]));
        if !consistent {
            continue;
        }
        map[u] = w;
        *used |= 1u128 << w;
        if extend_isomorphism(g, h, u + 1, map, used) {
            return true;
        }
        map[u] = usize::MAX;
        *used &= !(1u128 << w);
    }
    false
}
