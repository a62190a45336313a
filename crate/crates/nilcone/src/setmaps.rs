//! Eventually constant pairs of set maps f: X → Y, g: Y → X and their
//! bijection with marked spanning trees of the complete bipartite graph
//! K(m, n), plus the counting formulas and a matrix-tree oracle.
//!
//! X = {0, …, m−1}, Y = {0, …, n−1}. The functional digraph G(f, g) has an
//! edge x → f(x) and y → g(y); the pair is eventually constant when the
//! iterated image of g∘f collapses to a single point, equivalently when the
//! digraph has a unique oriented cycle and that cycle has length 2.

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Pow, Signed, Zero};
use thiserror::Error;

use crate::nilpairs::{BigCount, ExactRational};
use crate::par::map_ranges;

/// Default ceiling on brute-force pair evaluations (n^m · m^n).
pub const DEFAULT_EC_CAP: u64 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SetmapError {
    #[error("invalid map data: {0}")]
    BadMap(String),
    #[error("parameter out of range: {0}")]
    BadRange(String),
    #[error("pair is not eventually constant")]
    NotEventuallyConstant,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("enumeration needs {needed} evaluations, over the cap {cap}")]
    CapExceeded { needed: u128, cap: u64 },
}

/// A pair of set maps between X (size m) and Y (size n), stored as value
/// tables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetPair {
    f: Vec<usize>, // length m, values in [0, n)
    g: Vec<usize>, // length n, values in [0, m)
}

impl SetPair {
    pub fn new(f: Vec<usize>, g: Vec<usize>) -> Result<SetPair, SetmapError> {
        let (m, n) = (f.len(), g.len());
        if m == 0 || n == 0 {
            return Err(SetmapError::BadMap("both sets must be nonempty".into()));
        }
        if let Some(&v) = f.iter().find(|&&v| v >= n) {
            return Err(SetmapError::BadMap(format!("f value {v} outside [0, {n})")));
        }
        if let Some(&v) = g.iter().find(|&&v| v >= m) {
            return Err(SetmapError::BadMap(format!("g value {v} outside [0, {m})")));
        }
        Ok(SetPair { f, g })
    }

    pub fn m(&self) -> usize {
        self.f.len()
    }

    pub fn n(&self) -> usize {
        self.g.len()
    }

    pub fn f(&self) -> &[usize] {
        &self.f
    }

    pub fn g(&self) -> &[usize] {
        &self.g
    }
}

/// A spanning tree of K(m, n) with one distinguished edge. Edges are stored
/// sorted, so structural equality is tree equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarkedSpanningTree {
    m: usize,
    n: usize,
    edges: Vec<(usize, usize)>, // (x, y), sorted
    marked: usize,              // index into edges
}

impl MarkedSpanningTree {
    pub fn new(
        m: usize,
        n: usize,
        mut edges: Vec<(usize, usize)>,
        marked_edge: (usize, usize),
    ) -> Result<MarkedSpanningTree, SetmapError> {
        if m == 0 || n == 0 {
            return Err(SetmapError::InvalidTree("both sides must be nonempty".into()));
        }
        if edges.len() != m + n - 1 {
            return Err(SetmapError::InvalidTree(format!(
                "a spanning tree of K({m},{n}) has {} edges, got {}",
                m + n - 1,
                edges.len()
            )));
        }
        for &(x, y) in &edges {
            if x >= m || y >= n {
                return Err(SetmapError::InvalidTree(format!(
                    "edge ({x},{y}) outside K({m},{n})"
                )));
            }
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(SetmapError::InvalidTree("duplicate edge".into()));
        }
        // m+n−1 distinct edges with no cycle span the m+n vertices.
        let mut uf = UnionFind::new(m + n);
        for &(x, y) in &edges {
            if !uf.union(x, m + y) {
                return Err(SetmapError::InvalidTree(format!(
                    "edge ({x},{y}) closes a cycle"
                )));
            }
        }
        let marked = edges
            .binary_search(&marked_edge)
            .map_err(|_| SetmapError::InvalidTree(format!("marked edge {marked_edge:?} not in the tree")))?;
        Ok(MarkedSpanningTree { m, n, edges, marked })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn marked_edge(&self) -> (usize, usize) {
        self.edges[self.marked]
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// False when a and b were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// Iterated image of g∘f collapses to one point within m steps (image sizes
/// are non-increasing, so m steps always suffice to stabilize).
pub fn is_eventually_constant_pair(p: &SetPair) -> bool {
    let m = p.m();
    let mut alive: Vec<bool> = vec![true; m];
    for _ in 0..m {
        let mut next = vec![false; m];
        for (x, &live) in alive.iter().enumerate() {
            if live {
                next[p.g[p.f[x]]] = true;
            }
        }
        if next == alive {
            break;
        }
        alive = next;
    }
    alive.iter().filter(|&&b| b).count() == 1
}

/// The unique oriented 2-cycle (x₀, y₀) of the functional digraph, if the
/// digraph has exactly one oriented cycle and it is a 2-cycle; `None`
/// otherwise. For eventually constant pairs this always succeeds.
pub fn unique_two_cycle(p: &SetPair) -> Option<(usize, usize)> {
    let (m, n) = (p.m(), p.n());
    // Vertices 0..m are X, m..m+n are Y; out-edge of every vertex.
    let succ = |v: usize| -> usize {
        if v < m {
            m + p.f[v]
        } else {
            p.g[v - m]
        }
    };
    // Cycle vertices = those reachable from themselves; with out-degree 1
    // everywhere, iterate past the tail (≤ m+n steps) and collect.
    let total = m + n;
    let mut on_cycle = vec![false; total];
    for start in 0..total {
        let mut v = start;
        for _ in 0..total {
            v = succ(v);
        }
        on_cycle[v] = true; // v is inside some cycle
    }
    let cycle: Vec<usize> = (0..total).filter(|&v| on_cycle[v]).collect();
    match cycle.as_slice() {
        &[x, y] if x < m && y >= m && succ(x) == y && succ(y) == x => Some((x, y - m)),
        _ => None,
    }
}

/// Converts an eventually constant pair to its marked spanning tree: the
/// functional edges become unoriented tree edges and the unique 2-cycle
/// collapses to the marked edge.
pub fn pair_to_marked_tree(p: &SetPair) -> Result<MarkedSpanningTree, SetmapError> {
    if !is_eventually_constant_pair(p) {
        return Err(SetmapError::NotEventuallyConstant);
    }
    let (x0, y0) = unique_two_cycle(p).expect("eventually constant pairs have a unique 2-cycle");
    debug_assert_eq!(p.f[x0], y0);
    debug_assert_eq!(p.g[y0], x0);
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(p.m() + p.n() - 1);
    for (x, &fx) in p.f.iter().enumerate() {
        edges.push((x, fx));
    }
    for (y, &gy) in p.g.iter().enumerate() {
        if (gy, y) != (x0, y0) {
            // The 2-cycle contributes one unoriented edge, already added by f.
            edges.push((gy, y));
        }
    }
    MarkedSpanningTree::new(p.m(), p.n(), edges, (x0, y0))
}

/// Converts a marked spanning tree back to the pair: delete the marked edge,
/// orient each component toward its endpoint of the marked edge, and close
/// the 2-cycle.
pub fn marked_tree_to_pair(t: &MarkedSpanningTree) -> Result<SetPair, SetmapError> {
    let (m, n) = (t.m, t.n);
    let (x0, y0) = t.marked_edge();
    let total = m + n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (i, &(x, y)) in t.edges.iter().enumerate() {
        if i == t.marked {
            continue;
        }
        adj[x].push(m + y);
        adj[m + y].push(x);
    }
    // BFS from both roots; parent = the neighbor toward the root.
    let mut parent: Vec<Option<usize>> = vec![None; total];
    let mut seen = vec![false; total];
    let mut queue = std::collections::VecDeque::from([x0, m + y0]);
    seen[x0] = true;
    seen[m + y0] = true;
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                parent[u] = Some(v);
                queue.push_back(u);
            }
        }
    }
    debug_assert!(seen.iter().all(|&b| b), "a tree minus one edge covers all vertices");
    let mut f = vec![0usize; m];
    let mut g = vec![0usize; n];
    f[x0] = y0;
    g[y0] = x0;
    for x in 0..m {
        if x != x0 {
            let par = parent[x].expect("non-root vertices have parents");
            debug_assert!(par >= m, "bipartite: X-vertices hang off Y-vertices");
            f[x] = par - m;
        }
    }
    for y in 0..n {
        if y != y0 {
            let par = parent[m + y].expect("non-root vertices have parents");
            debug_assert!(par < m, "bipartite: Y-vertices hang off X-vertices");
            g[y] = par;
        }
    }
    let pair = SetPair::new(f, g)?;
    debug_assert!(is_eventually_constant_pair(&pair));
    Ok(pair)
}

fn check_mn(m: u64, n: u64) -> Result<(), SetmapError> {
    if m == 0 || n == 0 {
        return Err(SetmapError::BadRange("m and n must be at least 1".into()));
    }
    if m > 1 << 20 || n > 1 << 20 {
        return Err(SetmapError::BadRange("m and n must be at most 2^20".into()));
    }
    Ok(())
}

/// m^{n−1} · n^{m−1} · (m + n − 1) eventually constant pairs.
pub fn count_ec_formula(m: u64, n: u64) -> Result<BigCount, SetmapError> {
    check_mn(m, n)?;
    Ok(BigUint::from(m).pow(n - 1) * BigUint::from(n).pow(m - 1) * BigUint::from(m + n - 1))
}

/// Exhaustive census over all n^m · m^n pairs using the image-collapse test,
/// f-space partitioned across workers.
pub fn count_ec_brute(m: u64, n: u64, cap: u64, workers: usize) -> Result<BigCount, SetmapError> {
    check_mn(m, n)?;
    let needed = (n as u128)
        .checked_pow(m as u32)
        .and_then(|a| (m as u128).checked_pow(n as u32).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX);
    if needed > cap as u128 {
        return Err(SetmapError::CapExceeded { needed, cap });
    }
    let (m, n) = (m as usize, n as usize);
    let f_total = (n as u64).pow(m as u32);
    let parts = map_ranges(f_total, workers, |range| {
        let mut f = vec![0usize; m];
        let mut g = vec![0usize; n];
        let mut count = 0u64;
        for f_idx in range {
            let mut idx = f_idx;
            for slot in f.iter_mut().rev() {
                *slot = (idx % n as u64) as usize;
                idx /= n as u64;
            }
            g.iter_mut().for_each(|v| *v = 0);
            loop {
                if ec_raw(&f, &g) {
                    count += 1;
                }
                // Odometer over g values, base m.
                let mut done = true;
                for d in g.iter_mut().rev() {
                    *d += 1;
                    if *d < m {
                        done = false;
                        break;
                    }
                    *d = 0;
                }
                if done {
                    break;
                }
            }
        }
        count
    });
    Ok(BigCount::from(parts.into_iter().sum::<u64>()))
}

/// Allocation-light eventual-constancy test for the brute-force inner loop.
fn ec_raw(f: &[usize], g: &[usize]) -> bool {
    let m = f.len();
    // Follow x ↦ g(f(x)) from 0 far enough to land on the cycle; eventually
    // constant iff that landing point is a fixed point reached by every x.
    let mut x0 = 0usize;
    for _ in 0..m {
        x0 = g[f[x0]];
    }
    if g[f[x0]] != x0 {
        return false;
    }
    (0..m).all(|mut x| {
        for _ in 0..m {
            x = g[f[x]];
        }
        x == x0
    })
}

/// m^{n−1} · n^{m−1} spanning trees in K(m, n).
pub fn count_spanning_trees_formula(m: u64, n: u64) -> Result<BigCount, SetmapError> {
    check_mn(m, n)?;
    Ok(BigUint::from(m).pow(n - 1) * BigUint::from(n).pow(m - 1))
}

/// Kirchhoff's matrix-tree count: the determinant of a Laplacian minor of
/// K(m, n), evaluated exactly over big integers. Independent of the closed
/// formula.
pub fn count_spanning_trees_oracle(m: u64, n: u64) -> Result<BigCount, SetmapError> {
    check_mn(m, n)?;
    if m + n > 64 {
        return Err(SetmapError::BadRange(
            "matrix-tree oracle supports m + n up to 64".into(),
        ));
    }
    let (m, n) = (m as usize, n as usize);
    let size = m + n - 1; // Laplacian with the last row/column deleted
    let mut lap = vec![vec![BigInt::zero(); size]; size];
    let deg = |v: usize| if v < m { n } else { m };
    let adjacent = |a: usize, b: usize| (a < m) != (b < m);
    for (i, row) in lap.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = if i == j {
                BigInt::from(deg(i))
            } else if adjacent(i, j) {
                BigInt::from(-1)
            } else {
                BigInt::zero()
            };
        }
    }
    let det = bareiss_determinant(lap);
    debug_assert!(!det.is_negative(), "spanning-tree counts are nonnegative");
    Ok(det.magnitude().clone())
}

/// Fraction-free Bareiss elimination; every division is exact for integer
/// input.
fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Cayley's count of labeled trees on m vertices: m^{m−2}, with the m = 1
/// and m = 2 cases both equal to 1.
pub fn cayley_count(m: u64) -> Result<BigCount, SetmapError> {
    if m == 0 {
        return Err(SetmapError::BadRange("m must be at least 1".into()));
    }
    if m <= 2 {
        return Ok(BigCount::one());
    }
    Ok(BigUint::from(m).pow(m - 2))
}

/// Direct census oracle for Cayley's formula: try every (m−1)-subset of the
/// C(m,2) possible edges and keep the acyclic connected ones. Exponential;
/// for small m only.
pub fn count_labeled_trees_census(m: u64) -> Result<BigCount, SetmapError> {
    if m == 0 {
        return Err(SetmapError::BadRange("m must be at least 1".into()));
    }
    if m > 6 {
        return Err(SetmapError::BadRange("tree census supports m up to 6".into()));
    }
    let m = m as usize;
    if m == 1 {
        return Ok(BigCount::one());
    }
    let all_edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
        .collect();
    let e = all_edges.len();
    let mut count = 0u64;
    for mask in 0u64..(1 << e) {
        if mask.count_ones() as usize != m - 1 {
            continue;
        }
        let mut uf = UnionFind::new(m);
        let ok = all_edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .all(|(_, &(a, b))| uf.union(a, b));
        if ok {
            count += 1;
        }
    }
    Ok(BigCount::from(count))
}

/// Probability that a uniformly random pair is eventually constant:
/// (m + n − 1)/(mn).
pub fn ec_probability(m: u64, n: u64) -> Result<ExactRational, SetmapError> {
    check_mn(m, n)?;
    Ok(Ratio::new(
        BigInt::from(m + n - 1),
        BigInt::from(m) * BigInt::from(n),
    ))
}

/// All pairs at (m, n) in lexicographic order (f outer, g inner); test-scale
/// sizes only.
pub fn enumerate_pairs(m: usize, n: usize) -> impl Iterator<Item = SetPair> {
    let f_total = (n as u64).pow(m as u32);
    let g_total = (m as u64).pow(n as u32);
    (0..f_total).flat_map(move |fi| {
        (0..g_total).map(move |gi| {
            let mut f = vec![0usize; m];
            let mut idx = fi;
            for slot in f.iter_mut().rev() {
                *slot = (idx % n as u64) as usize;
                idx /= n as u64;
            }
            let mut g = vec![0usize; n];
            let mut idx = gi;
            for slot in g.iter_mut().rev() {
                *slot = (idx % m as u64) as usize;
                idx /= m as u64;
            }
            SetPair::new(f, g).unwrap()
        })
    })
}
