//! Local search that shrinks a valid drawing.
//!
//! Moves keep the drawing valid by construction: paths are rerouted with a
//! breadth-first search that avoids every point used by another vertex or
//! path. A move is kept only when the number of used sites drops, so the
//! search terminates.

use std::collections::{BTreeSet, VecDeque};

use super::draw::{compact, Drawing};
use super::GridPoint;

/// Upper bound on improvement rounds.
const MAX_ROUNDS: usize = 64;

pub(crate) fn improve(d: &mut Drawing) {
    for _ in 0..MAX_ROUNDS {
        pad(d);
        let mut better = false;
        better |= reroute_edges(d);
        better |= relocate_vertices(d);
        compact(d);
        if !better {
            return;
        }
    }
}

/// Adds one empty row and column on every side so paths can swing around the hull.
fn pad(d: &mut Drawing) {
    let shift = |p: &mut GridPoint| {
        p.row += 1;
        p.col += 1;
    };
    d.points.iter_mut().for_each(shift);
    for path in d.paths.values_mut() {
        path.iter_mut().for_each(shift);
    }
    d.rows += 2;
    d.cols += 2;
}

fn occupied(d: &Drawing, skip: &[(usize, usize)]) -> BTreeSet<GridPoint> {
    let mut occ: BTreeSet<GridPoint> = d.points.iter().copied().collect();
    for (k, path) in &d.paths {
        if skip.contains(k) {
            continue;
        }
        occ.extend(path.iter().copied());
    }
    occ
}

fn reroute_edges(d: &mut Drawing) -> bool {
    let mut improved = false;
    let keys: Vec<(usize, usize)> = d.paths.keys().copied().collect();
    for key in keys {
        let occ = occupied(d, &[key]);
        let (a, b) = (d.points[key.0], d.points[key.1]);
        if let Some(path) = shortest_path(d.rows, d.cols, &occ, a, b) {
            if path.len() < d.paths[&key].len() {
                d.paths.insert(key, path);
                improved = true;
            }
        }
    }
    improved
}

fn relocate_vertices(d: &mut Drawing) -> bool {
    let mut improved = false;
    for v in 0..d.points.len() {
        let incident: Vec<(usize, usize)> = d.paths.keys().copied().filter(|&(a, b)| a == v || b == v).collect();
        let current: usize = incident.iter().map(|k| d.paths[k].len()).sum();
        let mut base = occupied(d, &incident);
        base.remove(&d.points[v]);
        let mut best: Option<(usize, GridPoint, Vec<Vec<GridPoint>>)> = None;
        for row in 0..d.rows {
            for col in 0..d.cols {
                let q = GridPoint::new(row, col);
                if base.contains(&q) {
                    continue;
                }
                // Cheap bound: every path needs at least the Manhattan distance.
                let bound: usize = incident
                    .iter()
                    .map(|&(a, b)| d.points[if a == v { b } else { a }].manhattan(&q) + 1)
                    .sum();
                if bound >= best.as_ref().map_or(current, |b| b.0) {
                    continue;
                }
                let mut occ = base.clone();
                occ.insert(q);
                let mut routed = Vec::new();
                let mut total = 0;
                for &(a, b) in &incident {
                    let (pa, pb) = (if a == v { q } else { d.points[a] }, if b == v { q } else { d.points[b] });
                    let Some(path) = shortest_path(d.rows, d.cols, &occ, pa, pb) else {
                        break;
                    };
                    total += path.len();
                    occ.extend(path.iter().copied());
                    routed.push(path);
                }
                if routed.len() == incident.len() && total < best.as_ref().map_or(current, |b| b.0) {
                    best = Some((total, q, routed));
                }
            }
        }
        if let Some((_, q, routed)) = best {
            d.points[v] = q;
            for (k, path) in incident.into_iter().zip(routed) {
                d.paths.insert(k, path);
            }
            improved = true;
        }
    }
    improved
}

/// Shortest lattice path from `from` to `to` through points not in `blocked`
/// (the endpoints themselves may be blocked). Among shortest paths, each step
/// goes to the lexicographically smallest `(row, col)` candidate.
pub(crate) fn shortest_path(
    rows: usize,
    cols: usize,
    blocked: &BTreeSet<GridPoint>,
    from: GridPoint,
    to: GridPoint,
) -> Option<Vec<GridPoint>> {
    let idx = |p: GridPoint| p.row * cols + p.col;
    let mut dist = vec![usize::MAX; rows * cols];
    dist[idx(to)] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(p) = queue.pop_front() {
        if p == from {
            break;
        }
        for q in neighbours(p, rows, cols) {
            if dist[idx(q)] != usize::MAX || (q != from && blocked.contains(&q)) {
                continue;
            }
            dist[idx(q)] = dist[idx(p)] + 1;
            queue.push_back(q);
        }
    }
    if dist[idx(from)] == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let want = dist[idx(cur)] - 1;
        cur = neighbours(cur, rows, cols)
            .into_iter()
            .filter(|&q| dist[idx(q)] == want && (q == to || !blocked.contains(&q)))
            .min()
            .expect("distance field is consistent");
        path.push(cur);
    }
    Some(path)
}

fn neighbours(p: GridPoint, rows: usize, cols: usize) -> Vec<GridPoint> {
    let mut out = Vec::with_capacity(4);
    if p.row > 0 {
        out.push(GridPoint::new(p.row - 1, p.col));
    }
    if p.col > 0 {
        out.push(GridPoint::new(p.row, p.col - 1));
    }
    if p.col + 1 < cols {
        out.push(GridPoint::new(p.row, p.col + 1));
    }
    if p.row + 1 < rows {
        out.push(GridPoint::new(p.row + 1, p.col));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_path_prefers_small_first_step() {
        let p = GridPoint::new;
        let path = shortest_path(3, 3, &BTreeSet::new(), p(0, 0), p(1, 1)).unwrap();
        assert_eq!(path, vec![p(0, 0), p(0, 1), p(1, 1)]);
        let blocked = BTreeSet::from([p(0, 1)]);
        let path = shortest_path(3, 3, &blocked, p(0, 0), p(1, 1)).unwrap();
        assert_eq!(path, vec![p(0, 0), p(1, 0), p(1, 1)]);
        let wall = BTreeSet::from([p(0, 1), p(1, 1), p(2, 1)]);
        assert!(shortest_path(3, 3, &wall, p(0, 0), p(0, 2)).is_none());
    }
}
