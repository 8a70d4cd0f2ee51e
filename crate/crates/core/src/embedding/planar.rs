//! Combinatorial planar embeddings of graphs with maximum degree three.
//!
//! A rotation system lists each vertex's neighbours in cyclic order. Faces
//! are traced with `next(u→v) = (v → succ_v(u))`, and a connected graph is
//! planar iff some rotation system satisfies `V − E + F = 2`. With degree at
//! most three each vertex has at most two distinct cyclic orders, so small
//! graphs can be decided by enumeration.

use std::collections::BTreeSet;

/// Cyclic neighbour orders, indexed by local vertex id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rotation {
    pub order: Vec<Vec<usize>>,
}

/// A face as its cyclic list of darts `(from, to)`.
pub type Face = Vec<(usize, usize)>;

impl Rotation {
    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    pub fn edge_count(&self) -> usize {
        self.order.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn succ(&self, v: usize, u: usize) -> usize {
        let list = &self.order[v];
        let i = list.iter().position(|&w| w == u).expect("dart endpoint is a neighbour");
        list[(i + 1) % list.len()]
    }

    /// All faces; each dart belongs to exactly one face.
    pub fn faces(&self) -> Vec<Face> {
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut faces = Vec::new();
        for v in 0..self.order.len() {
            for &w in &self.order[v] {
                if seen.contains(&(v, w)) {
                    continue;
                }
                let mut face = Vec::new();
                let mut dart = (v, w);
                while seen.insert(dart) {
                    face.push(dart);
                    dart = (dart.1, self.succ(dart.1, dart.0));
                }
                faces.push(face);
            }
        }
        faces
    }

    pub fn is_planar_connected(&self) -> bool {
        let (v, e) = (self.vertex_count() as i64, self.edge_count() as i64);
        if e == 0 {
            return true;
        }
        v - e + self.faces().len() as i64 == 2
    }

    /// Inserts edge `u–w` inside the face containing darts `u→v, v→w`
    /// (`w = succ_v(u)`), keeping the rotation planar.
    pub fn insert_chord(&mut self, u: usize, v: usize, w: usize) {
        debug_assert_eq!(self.succ(v, u), w);
        let pos = self.order[u].iter().position(|&x| x == v).unwrap();
        self.order[u].insert(pos, w);
        let pos = self.order[w].iter().position(|&x| x == v).unwrap();
        self.order[w].insert(pos + 1, u);
    }
}

/// Enumerates planar rotation systems of a connected graph given by sorted
/// adjacency lists, in a fixed order, stopping after `cap` hits or after
/// `max_trials` systems have been examined. Mirror images are skipped by
/// fixing the orientation of the first degree-3 vertex.
///
/// Returns `(found, exhausted)`; `exhausted` is true when the whole space was scanned.
pub fn planar_rotations(adjacency: &[Vec<usize>], cap: usize, max_trials: u64) -> (Vec<Rotation>, bool) {
    let branching: Vec<usize> = (0..adjacency.len()).filter(|&v| adjacency[v].len() == 3).collect();
    let free = branching.len().saturating_sub(1);
    let total: u64 = 1u64.checked_shl(free as u32).unwrap_or(u64::MAX);
    let mut found = Vec::new();
    let mut trial = 0u64;
    while trial < total {
        if trial >= max_trials {
            return (found, false);
        }
        let mut order: Vec<Vec<usize>> = adjacency.to_vec();
        for (i, &v) in branching.iter().enumerate().skip(1) {
            if trial >> (i - 1) & 1 == 1 {
                order[v].swap(1, 2);
            }
        }
        let rot = Rotation { order };
        if rot.is_planar_connected() {
            found.push(rot);
            if found.len() >= cap {
                return (found, trial + 1 == total);
            }
        }
        trial += 1;
    }
    (found, true)
}

/// Adds chords until the graph is biconnected, keeping the rotation planar.
///
/// Returns the added edges. Graphs with fewer than three vertices are left alone.
pub fn biconnect(rot: &mut Rotation) -> Vec<(usize, usize)> {
    let mut added = Vec::new();
    if rot.vertex_count() < 3 {
        return added;
    }
    loop {
        let block = edge_blocks(rot);
        let mut chord = None;
        'search: for v in 0..rot.vertex_count() {
            let list = &rot.order[v];
            if list.len() < 2 {
                // A pendant vertex: its neighbour is a cut vertex and handles it.
                continue;
            }
            for i in 0..list.len() {
                let u = list[i];
                let w = list[(i + 1) % list.len()];
                if block[&key(v, u)] != block[&key(v, w)] {
                    chord = Some((u, v, w));
                    break 'search;
                }
            }
        }
        match chord {
            Some((u, v, w)) => {
                rot.insert_chord(u, v, w);
                added.push((u, w));
            }
            None => return added,
        }
    }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Biconnected-component id of every edge (Hopcroft–Tarjan).
fn edge_blocks(rot: &Rotation) -> std::collections::BTreeMap<(usize, usize), usize> {
    let n = rot.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let mut block = std::collections::BTreeMap::new();
    let mut next_block = 0;

    // Iterative DFS: frames of (vertex, parent, next neighbour index).
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut frames = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut idx)) = frames.last_mut() {
            if *idx < rot.order[v].len() {
                let w = rot.order[v][*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    stack.push(key(v, w));
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    frames.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    stack.push(key(v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if let Some(&(p, _, _)) = frames.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let stop = key(p, v);
                        while let Some(e) = stack.pop() {
                            block.insert(e, next_block);
                            if e == stop {
                                break;
                            }
                        }
                        next_block += 1;
                    }
                }
                let _ = parent;
            }
        }
    }
    block
}

/// st-ordering of a biconnected graph by ear decomposition.
///
/// Returns the position of each vertex; `s` gets 0, `t` gets `n − 1`, and
/// every other vertex has neighbours both before and after it.
pub fn st_order(rot: &Rotation, s: usize, t: usize) -> Vec<usize> {
    let n = rot.vertex_count();
    let mut list: Vec<usize> = vec![s, t];
    let mut marked = vec![false; n];
    marked[s] = true;
    marked[t] = true;
    let mut used: BTreeSet<(usize, usize)> = BTreeSet::new();
    used.insert(key(s, t));
    loop {
        // First marked vertex (in list order) with an unused edge.
        let mut ear = None;
        'find: for &v in &list {
            for &w in &rot.order[v] {
                if !used.contains(&key(v, w)) {
                    ear = Some((v, w));
                    break 'find;
                }
            }
        }
        let Some((v, w)) = ear else { break };
        let path = if marked[w] {
            vec![v, w]
        } else {
            ear_path(rot, &marked, v, w)
        };
        for pair in path.windows(2) {
            used.insert(key(pair[0], pair[1]));
        }
        let x = *path.last().unwrap();
        let interior = &path[1..path.len() - 1];
        for &p in interior {
            marked[p] = true;
        }
        let pv = list.iter().position(|&a| a == v).unwrap();
        let px = list.iter().position(|&a| a == x).unwrap();
        if pv < px {
            list.splice(pv + 1..pv + 1, interior.iter().copied());
        } else {
            list.splice(pv..pv, interior.iter().rev().copied());
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in list.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Shortest path `v, w, …, x` whose interior is unmarked and whose end `x ≠ v` is marked.
fn ear_path(rot: &Rotation, marked: &[bool], v: usize, w: usize) -> Vec<usize> {
    let n = rot.vertex_count();
    let mut prev = vec![usize::MAX; n];
    prev[w] = v;
    let mut queue = std::collections::VecDeque::from([w]);
    while let Some(a) = queue.pop_front() {
        let mut nbrs = rot.order[a].clone();
        nbrs.sort_unstable();
        for b in nbrs {
            if b == v || prev[b] != usize::MAX {
                continue;
            }
            prev[b] = a;
            if marked[b] {
                let mut path = vec![b];
                let mut cur = b;
                while cur != v {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return path;
            }
            queue.push_back(b);
        }
    }
    panic!("graph is not biconnected: no ear from {v} through {w}");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn adjacency(g: &Graph) -> Vec<Vec<usize>> {
        (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect()
    }

    #[test]
    fn k4_and_cube_are_planar_k33_is_not() {
        let (k4, done) = planar_rotations(&adjacency(&Graph::complete(4)), 100, u64::MAX);
        assert!(done && !k4.is_empty());
        // 3-connected: unique embedding up to mirror image.
        assert_eq!(k4.len(), 1);
        assert_eq!(k4[0].faces().len(), 4);
        let (q3, _) = planar_rotations(&adjacency(&Graph::cube()), 100, u64::MAX);
        assert_eq!(q3.len(), 1);
        assert_eq!(q3[0].faces().len(), 6);
        let (k33, done) = planar_rotations(&adjacency(&Graph::complete_bipartite(3, 3)), 100, u64::MAX);
        assert!(done && k33.is_empty());
    }

    #[test]
    fn petersen_is_not_planar() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        let g = Graph::new(10, edges).unwrap();
        let (found, done) = planar_rotations(&adjacency(&g), 1, u64::MAX);
        assert!(done && found.is_empty());
    }

    #[test]
    fn biconnect_bridged_graph() {
        let g = Graph::bridged_k4_pair();
        let (rots, _) = planar_rotations(&adjacency(&g), 1, u64::MAX);
        let mut rot = rots[0].clone();
        let added = biconnect(&mut rot);
        assert!(!added.is_empty());
        assert!(rot.is_planar_connected());
        let blocks = edge_blocks(&rot);
        let ids: BTreeSet<usize> = blocks.values().copied().collect();
        assert_eq!(ids.len(), 1);
    }

    #[test]
    fn biconnect_path_and_star() {
        for g in [Graph::path(6), Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap()] {
            let (rots, _) = planar_rotations(&adjacency(&g), 1, u64::MAX);
            let mut rot = rots[0].clone();
            biconnect(&mut rot);
            assert!(rot.is_planar_connected());
            let ids: BTreeSet<usize> = edge_blocks(&rot).values().copied().collect();
            assert_eq!(ids.len(), 1);
        }
    }

    #[test]
    fn st_order_is_valid() {
        for g in [Graph::complete(4), Graph::cube(), Graph::prism(5), Graph::dodecahedron()] {
            let (rots, _) = planar_rotations(&adjacency(&g), 1, u64::MAX);
            let rot = &rots[0];
            for e in g.edges() {
                let pos = st_order(rot, e.0, e.1);
                assert_eq!(pos[e.0], 0);
                assert_eq!(pos[e.1], g.n() - 1);
                for v in 0..g.n() {
                    if v == e.0 || v == e.1 {
                        continue;
                    }
                    assert!(g.neighbors(v).iter().any(|&w| pos[w] < pos[v]));
                    assert!(g.neighbors(v).iter().any(|&w| pos[w] > pos[v]));
                }
            }
        }
    }
}
