//! Orthogonal grid drawing of one connected component.
//!
//! The biconnected augmentation is st-ordered; each vertex gets its own row.
//! Faces are numbered by longest path in the left-to-right dual, and every
//! edge runs vertically in the column of its left face (a visibility
//! representation). A vertex is then shrunk to a single grid point on its
//! row and joined to its edge columns by short horizontal stubs; with at
//! most three real edges, at most one stub leaves on each side.

use std::collections::BTreeMap;

use super::planar::{st_order, Rotation};
use super::GridPoint;

/// A drawing in local vertex ids: vertex points and one path per real edge,
/// oriented from the smaller to the larger local id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Drawing {
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<GridPoint>,
    pub paths: BTreeMap<(usize, usize), Vec<GridPoint>>,
}

impl Drawing {
    /// Grid points in use: vertices plus path interiors.
    pub fn used_sites(&self) -> usize {
        self.points.len() + self.paths.values().map(|p| p.len().saturating_sub(2)).sum::<usize>()
    }

    pub fn transpose(&self) -> Drawing {
        let t = |p: &GridPoint| GridPoint::new(p.col, p.row);
        Drawing {
            rows: self.cols,
            cols: self.rows,
            points: self.points.iter().map(t).collect(),
            paths: self.paths.iter().map(|(k, p)| (*k, p.iter().map(t).collect())).collect(),
        }
    }
}

/// Draws `rot` (biconnected unless it has fewer than three vertices) with
/// `outer` as the outer face and `(s, t)` an edge on it. Only `real` edges
/// are routed.
pub(crate) fn visibility_drawing(
    rot: &Rotation,
    real: &[(usize, usize)],
    outer: usize,
    s: usize,
    t: usize,
) -> Option<Drawing> {
    let n = rot.vertex_count();
    if n == 1 {
        return Some(Drawing {
            rows: 1,
            cols: 1,
            points: vec![GridPoint::new(0, 0)],
            paths: BTreeMap::new(),
        });
    }
    let y = st_order(rot, s, t);
    let faces = rot.faces();
    let mut face_of = BTreeMap::new();
    for (i, f) in faces.iter().enumerate() {
        for &d in f {
            face_of.insert(d, i);
        }
    }
    let f = faces.len();
    let (s_star, t_star) = (f, f + 1);

    // Dual DAG: left face -> right face of every upward edge.
    let mut left_of = BTreeMap::new();
    let mut succ = vec![Vec::new(); f + 2];
    let mut indeg = vec![0usize; f + 2];
    for a in 0..n {
        for &b in &rot.order[a] {
            if y[a] > y[b] {
                continue;
            }
            let mut left = face_of[&(a, b)];
            let mut right = face_of[&(b, a)];
            if left == outer {
                left = s_star;
            }
            if right == outer {
                right = t_star;
            }
            left_of.insert((a, b), left);
            succ[left].push(right);
            indeg[right] += 1;
        }
    }
    // Longest-path numbering; a cycle means the orientation is not planar-st.
    let mut psi = vec![0usize; f + 2];
    let mut queue: Vec<usize> = (0..f + 2).filter(|&i| indeg[i] == 0).collect();
    let mut done = 0;
    while let Some(i) = queue.pop() {
        done += 1;
        for &j in &succ[i] {
            psi[j] = psi[j].max(psi[i] + 1);
            indeg[j] -= 1;
            if indeg[j] == 0 {
                queue.push(j);
            }
        }
    }
    if done != f + 2 {
        return None;
    }

    let column = |a: usize, b: usize| {
        let (lo, hi) = if y[a] < y[b] { (a, b) } else { (b, a) };
        psi[left_of[&(lo, hi)]]
    };

    // Vertex points.
    let mut points = Vec::with_capacity(n);
    for v in 0..n {
        let mut cols: Vec<usize> = real
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .map(|&(a, b)| column(a, b))
            .collect();
        cols.sort_unstable();
        let shared = cols.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
        let mut distinct = cols.clone();
        distinct.dedup();
        let x = match (shared, distinct.len()) {
            (Some(c), _) => c,
            (None, 0) => psi[s_star],
            (None, 3) => distinct[1],
            (None, _) => distinct[0],
        };
        points.push(GridPoint::new(y[v], x));
    }

    let mut paths = BTreeMap::new();
    for &(a, b) in real {
        let x = column(a, b);
        let mut path = Vec::new();
        let pa = points[a];
        let pb = points[b];
        push_run(&mut path, pa, GridPoint::new(pa.row, x));
        push_run(&mut path, GridPoint::new(pa.row, x), GridPoint::new(pb.row, x));
        push_run(&mut path, GridPoint::new(pb.row, x), pb);
        let key = if a < b { (a, b) } else { (b, a) };
        if a > b {
            path.reverse();
        }
        paths.insert(key, path);
    }
    let cols = psi.iter().copied().max().unwrap_or(0) + 1;
    Some(Drawing { rows: n, cols, points, paths })
}

/// Appends the straight run from `from` to `to`, skipping a repeated first point.
fn push_run(path: &mut Vec<GridPoint>, from: GridPoint, to: GridPoint) {
    let step = |a: usize, b: usize| -> isize {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => -1,
        }
    };
    let (dr, dc) = (step(from.row, to.row), step(from.col, to.col));
    let mut cur = from;
    loop {
        if path.last() != Some(&cur) {
            path.push(cur);
        }
        if cur == to {
            break;
        }
        cur = GridPoint::new((cur.row as isize + dr) as usize, (cur.col as isize + dc) as usize);
    }
}

/// Removes rows and columns that are empty or crossed only by straight path
/// segments, shortening those paths. Repeats until nothing more can go.
pub(crate) fn compact(d: &mut Drawing) {
    loop {
        let mut changed = false;
        let mut r = 0;
        while r < d.rows {
            if removable(d, r, true) {
                remove_line(d, r, true);
                changed = true;
            } else {
                r += 1;
            }
        }
        let mut c = 0;
        while c < d.cols {
            if removable(d, c, false) {
                remove_line(d, c, false);
                changed = true;
            } else {
                c += 1;
            }
        }
        if !changed {
            return;
        }
    }
}

fn coord(p: &GridPoint, row: bool) -> usize {
    if row {
        p.row
    } else {
        p.col
    }
}

fn removable(d: &Drawing, line: usize, row: bool) -> bool {
    if d.points.iter().any(|p| coord(p, row) == line) {
        return false;
    }
    d.paths.values().all(|path| {
        path.iter().enumerate().all(|(i, p)| {
            if coord(p, row) != line {
                return true;
            }
            // Interior point with neighbours on both sides of the line.
            i > 0
                && i + 1 < path.len()
                && coord(&path[i - 1], row) + 1 == line
                && coord(&path[i + 1], row) == line + 1
                || i > 0
                    && i + 1 < path.len()
                    && coord(&path[i + 1], row) + 1 == line
                    && coord(&path[i - 1], row) == line + 1
        })
    })
}

fn remove_line(d: &mut Drawing, line: usize, row: bool) {
    let shift = |p: &mut GridPoint| {
        if row && p.row > line {
            p.row -= 1;
        }
        if !row && p.col > line {
            p.col -= 1;
        }
    };
    for p in &mut d.points {
        shift(p);
    }
    for path in d.paths.values_mut() {
        path.retain(|p| coord(p, row) != line);
        for p in path.iter_mut() {
            shift(p);
        }
    }
    if row {
        d.rows -= 1;
    } else {
        d.cols -= 1;
    }
}
