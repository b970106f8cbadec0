//! Brute-force reference answers for small graphs.
//!
//! Everything here works on dense node ids `0..n` and plain `(u, v, w)`
//! triples so the checks stay independent of the production data
//! structures. Complexity is deliberately naive; keep `n` small.

pub type Triple = (usize, usize, f64);

/// Boolean adjacency matrix. Undirected edges are mirrored.
pub fn adjacency(n: usize, directed: bool, edges: &[Triple]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(u, v, _) in edges {
        m[u][v] = true;
        if !directed {
            m[v][u] = true;
        }
    }
    m
}

/// Weight matrix with `f64::INFINITY` for absent pairs and 0 on the diagonal.
pub fn weights(n: usize, directed: bool, edges: &[Triple]) -> Vec<Vec<f64>> {
    let mut m = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        if w < m[u][v] {
            m[u][v] = w;
        }
        if !directed && w < m[v][u] {
            m[v][u] = w;
        }
    }
    m
}

/// `(added, removed)` going from `g` to `h`, by materializing both edge sets
/// as membership matrices.
pub fn edit_distance(n: usize, directed: bool, g: &[Triple], h: &[Triple]) -> (usize, usize) {
    let a = adjacency(n, directed, g);
    let b = adjacency(n, directed, h);
    let mut added = 0;
    let mut removed = 0;
    for u in 0..n {
        let lo = if directed { 0 } else { u + 1 };
        for v in lo..n {
            if u == v {
                continue;
            }
            match (a[u][v], b[u][v]) {
                (false, true) => added += 1,
                (true, false) => removed += 1,
                _ => {}
            }
        }
    }
    (added, removed)
}

pub fn edge_exists(directed: bool, edges: &[Triple], u: usize, v: usize) -> bool {
    edges
        .iter()
        .any(|&(a, b, _)| (a == u && b == v) || (!directed && a == v && b == u))
}

pub fn degree(edges: &[Triple], x: usize) -> usize {
    edges.iter().filter(|&&(a, _, _)| a == x).count() + edges.iter().filter(|&&(_, b, _)| b == x).count()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Component id per node via union-find over the underlying undirected graph.
pub fn component_labels(n: usize, edges: &[Triple]) -> Vec<usize> {
    let mut uf = UnionFind::new(n);
    for &(u, v, _) in edges {
        uf.union(u, v);
    }
    (0..n).map(|x| uf.find(x)).collect()
}

pub fn component_count(n: usize, edges: &[Triple]) -> usize {
    let mut roots = component_labels(n, edges);
    roots.sort_unstable();
    roots.dedup();
    roots.len()
}

/// Undirected cycle test: some component has at least as many edges as nodes.
pub fn has_cycle_undirected(n: usize, edges: &[Triple]) -> bool {
    let labels = component_labels(n, edges);
    let mut nodes = vec![0usize; n];
    let mut edge_counts = vec![0usize; n];
    for &l in &labels {
        nodes[l] += 1;
    }
    for &(u, _, _) in edges {
        edge_counts[labels[u]] += 1;
    }
    (0..n).any(|l| nodes[l] > 0 && edge_counts[l] >= nodes[l])
}

/// Reflexive-transitive closure by repeated boolean matrix squaring.
pub fn closure(n: usize, directed: bool, edges: &[Triple]) -> Vec<Vec<bool>> {
    let mut r = adjacency(n, directed, edges);
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    loop {
        let mut next = r.clone();
        for i in 0..n {
            for k in 0..n {
                if r[i][k] {
                    for j in 0..n {
                        if r[k][j] {
                            next[i][j] = true;
                        }
                    }
                }
            }
        }
        if next == r {
            return r;
        }
        r = next;
    }
}

/// Directed cycle test: some node reaches itself through at least one edge.
pub fn has_cycle_directed(n: usize, edges: &[Triple]) -> bool {
    let reach = closure(n, true, edges);
    edges.iter().any(|&(u, v, _)| reach[v][u])
}

/// Exhaustive enumeration of unordered triples on the symmetrized graph.
pub fn triangle_count(n: usize, edges: &[Triple]) -> usize {
    let a = adjacency(n, false, edges);
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    count += 1;
                }
            }
        }
    }
    count
}

pub fn floyd_warshall(n: usize, directed: bool, edges: &[Triple]) -> Vec<Vec<f64>> {
    let mut d = weights(n, directed, edges);
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Array-based single-source search, O(n^2).
pub fn single_source(n: usize, directed: bool, edges: &[Triple], s: usize) -> Vec<f64> {
    let w = weights(n, directed, edges);
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    dist[s] = 0.0;
    for _ in 0..n {
        let mut best = None;
        for x in 0..n {
            if !done[x] && dist[x].is_finite() && best.map_or(true, |b: usize| dist[x] < dist[b]) {
                best = Some(x);
            }
        }
        let Some(u) = best else { break };
        done[u] = true;
        for v in 0..n {
            if w[u][v].is_finite() && dist[u] + w[u][v] < dist[v] {
                dist[v] = dist[u] + w[u][v];
            }
        }
    }
    dist
}

/// Max over all pairs of single-source distances; `None` if any pair is unreachable.
pub fn diameter(n: usize, directed: bool, edges: &[Triple]) -> Option<f64> {
    let mut best = 0.0f64;
    for s in 0..n {
        for d in single_source(n, directed, edges, s) {
            if !d.is_finite() {
                return None;
            }
            best = best.max(d);
        }
    }
    Some(best)
}

/// Minimum s-t cut by enumerating every node subset that contains `s` but not `t`.
/// Undirected edges contribute capacity in both directions.
pub fn min_cut(n: usize, directed: bool, edges: &[Triple], s: usize, t: usize) -> f64 {
    let others: Vec<usize> = (0..n).filter(|&x| x != s && x != t).collect();
    let mut best = f64::INFINITY;
    for mask in 0u64..(1u64 << others.len()) {
        let mut side = vec![false; n];
        side[s] = true;
        for (bit, &x) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                side[x] = true;
            }
        }
        let mut cut = 0.0;
        for &(u, v, w) in edges {
            if side[u] && !side[v] {
                cut += w;
            }
            if !directed && side[v] && !side[u] {
                cut += w;
            }
        }
        best = best.min(cut);
    }
    best
}

/// Largest k such that some non-empty node subset has minimum induced degree >= k.
pub fn max_core(n: usize, edges: &[Triple]) -> usize {
    let a = adjacency(n, false, edges);
    let mut best = 0;
    for mask in 1u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
        let min_deg = members
            .iter()
            .map(|&x| members.iter().filter(|&&y| a[x][y]).count())
            .min()
            .unwrap_or(0);
        best = best.max(min_deg);
    }
    best
}

/// `|N(u) ∩ N(v)|` with a double loop; `directed` uses out-neighborhoods.
pub fn common_neighbors(n: usize, directed: bool, edges: &[Triple], u: usize, v: usize) -> usize {
    let a = adjacency(n, directed, edges);
    let mut count = 0;
    for x in 0..n {
        if a[u][x] {
            for y in 0..n {
                if a[v][y] && x == y {
                    count += 1;
                }
            }
        }
    }
    count
}

pub fn clustering(n: usize, edges: &[Triple], v: usize) -> f64 {
    let a = adjacency(n, false, edges);
    let nbrs: Vec<usize> = (0..n).filter(|&x| a[v][x]).collect();
    let k = nbrs.len();
    if k < 2 {
        return 0.0;
    }
    let mut links = 0;
    for i in 0..k {
        for j in i + 1..k {
            if a[nbrs[i]][nbrs[j]] {
                links += 1;
            }
        }
    }
    2.0 * links as f64 / (k * (k - 1)) as f64
}

/// PageRank by solving `(I - d·Pᵀ) p = (1-d)/n · 1` with Gaussian elimination.
/// Dangling rows of `P` are uniform.
pub fn pagerank_linear(n: usize, directed: bool, edges: &[Triple], damping: f64) -> Vec<f64> {
    let a = adjacency(n, directed, edges);
    let mut m = vec![vec![0.0; n + 1]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
        row[n] = (1.0 - damping) / n as f64;
    }
    for u in 0..n {
        let out: Vec<usize> = (0..n).filter(|&v| a[u][v]).collect();
        if out.is_empty() {
            for row in m.iter_mut() {
                row[u] -= damping / n as f64;
            }
        } else {
            for &v in &out {
                m[v][u] -= damping / out.len() as f64;
            }
        }
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        for j in col..=n {
            m[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f != 0.0 {
                    for j in col..=n {
                        m[r][j] -= f * m[col][j];
                    }
                }
            }
        }
    }
    m.iter().map(|row| row[n]).collect()
}

/// Seeded Erdős–Rényi style graph on `0..n` without self-loops; `weights`
/// draws integer weights from `1..=10`, otherwise every weight is 1.
pub fn random_graph(seed: u64, n: usize, p: f64, directed: bool, weighted: bool) -> Vec<Triple> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v || (!directed && v < u) {
                continue;
            }
            if rng.gen_bool(p) {
                let w = if weighted { rng.gen_range(1..=10) as f64 } else { 1.0 };
                edges.push((u, v, w));
            }
        }
    }
    edges
}

// Variants that stay affordable at a few thousand nodes. They are still
// written independently of the production solvers.

/// Nodes reachable from `s` (including `s`) by sweeping the edge list until
/// nothing changes.
pub fn reachable(n: usize, directed: bool, edges: &[Triple], s: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(u, v, _) in edges {
            if seen[u] && !seen[v] {
                seen[v] = true;
                changed = true;
            }
            if !directed && seen[v] && !seen[u] {
                seen[u] = true;
                changed = true;
            }
        }
    }
    seen
}

/// Directed cycle test via per-edge reachability: `(u, v)` closes a cycle
/// when `u` is reachable from `v`.
pub fn has_cycle_directed_sparse(n: usize, edges: &[Triple]) -> bool {
    let mut cache: Vec<Option<Vec<bool>>> = vec![None; n];
    edges.iter().any(|&(u, v, _)| {
        let r = cache[v].get_or_insert_with(|| reachable(n, true, edges, v));
        r[u]
    })
}

/// Ford–Fulkerson with depth-first augmenting paths on a dense residual
/// matrix. Capacities must be integral for termination.
pub fn max_flow_dfs(n: usize, directed: bool, edges: &[Triple], s: usize, t: usize) -> f64 {
    let mut cap = vec![vec![0.0f64; n]; n];
    for &(u, v, w) in edges {
        cap[u][v] += w;
        if !directed {
            cap[v][u] += w;
        }
    }
    let mut total = 0.0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[s] = s;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            if u == t {
                break;
            }
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0.0 {
                    prev[v] = u;
                    stack.push(v);
                }
            }
        }
        if prev[t] == usize::MAX {
            return total;
        }
        let mut bottleneck = f64::INFINITY;
        let mut v = t;
        while v != s {
            bottleneck = bottleneck.min(cap[prev[v]][v]);
            v = prev[v];
        }
        let mut v = t;
        while v != s {
            cap[prev[v]][v] -= bottleneck;
            cap[v][prev[v]] += bottleneck;
            v = prev[v];
        }
        total += bottleneck;
    }
}

/// Degeneracy by repeatedly deleting a node of minimum remaining degree;
/// the largest minimum seen is the max core.
pub fn max_core_peeling(n: usize, edges: &[Triple]) -> usize {
    let a = adjacency(n, false, edges);
    let mut deg: Vec<usize> = (0..n).map(|x| (0..n).filter(|&y| y != x && a[x][y]).count()).collect();
    let mut alive = vec![true; n];
    let mut best = 0;
    for _ in 0..n {
        let x = (0..n).filter(|&x| alive[x]).min_by_key(|&x| deg[x]).unwrap();
        best = best.max(deg[x]);
        alive[x] = false;
        for y in 0..n {
            if alive[y] && y != x && a[x][y] {
                deg[y] -= 1;
            }
        }
    }
    best
}

/// All-pairs maximum via one shared weight matrix; `None` if some pair is
/// unreachable.
pub fn diameter_dense(n: usize, directed: bool, edges: &[Triple]) -> Option<f64> {
    let w = weights(n, directed, edges);
    let mut best = 0.0f64;
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[s] = 0.0;
        for _ in 0..n {
            let mut pick = None;
            for x in 0..n {
                if !done[x] && dist[x].is_finite() && pick.is_none_or(|b: usize| dist[x] < dist[b]) {
                    pick = Some(x);
                }
            }
            let Some(u) = pick else { break };
            done[u] = true;
            for v in 0..n {
                if dist[u] + w[u][v] < dist[v] {
                    dist[v] = dist[u] + w[u][v];
                }
            }
        }
        for d in dist {
            if !d.is_finite() {
                return None;
            }
            best = best.max(d);
        }
    }
    Some(best)
}

/// Most frequent label among labeled undirected neighbors of `v`, smallest
/// label on ties; falls back to the same rule over all other labeled nodes.
pub fn neighbor_majority(n: usize, edges: &[Triple], labels: &[Option<u32>], v: usize) -> Option<u32> {
    let a = adjacency(n, false, edges);
    let pick = |xs: Vec<u32>| {
        let mut best: Option<(usize, u32)> = None;
        for &l in &xs {
            let c = xs.iter().filter(|&&m| m == l).count();
            if best.is_none_or(|(bc, bl)| c > bc || (c == bc && l < bl)) {
                best = Some((c, l));
            }
        }
        best.map(|(_, l)| l)
    };
    let local: Vec<u32> = (0..n).filter(|&x| x != v && a[v][x]).filter_map(|x| labels[x]).collect();
    pick(local).or_else(|| pick((0..n).filter(|&x| x != v).filter_map(|x| labels[x]).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_variants_agree_with_exhaustive_ones() {
        for seed in 0..150 {
            let n = 2 + (seed as usize % 9);
            for directed in [false, true] {
                let g = random_graph(seed, n, 0.35, directed, true);
                let reach = closure(n, directed, &g);
                for s in 0..n {
                    assert_eq!(reachable(n, directed, &g, s), reach[s]);
                }
                if directed {
                    assert_eq!(has_cycle_directed_sparse(n, &g), has_cycle_directed(n, &g));
                }
                assert_eq!(max_flow_dfs(n, directed, &g, 0, n - 1), min_cut(n, directed, &g, 0, n - 1));
                assert_eq!(diameter_dense(n, directed, &g), diameter(n, directed, &g));
                assert_eq!(max_core_peeling(n, &g), max_core(n, &g));
            }
        }
    }

    #[test]
    fn majority_ties_and_fallback() {
        let g = vec![(0, 1, 1.0), (0, 2, 1.0), (3, 4, 1.0)];
        assert_eq!(neighbor_majority(5, &g, &[None, Some(4), Some(2), Some(7), Some(7)], 0), Some(2));
        assert_eq!(neighbor_majority(5, &g, &[Some(1), None, None, None, Some(7)], 3), Some(7));
        assert_eq!(neighbor_majority(5, &g, &[Some(1), Some(9), Some(9), None, None], 3), Some(9));
    }
}
