//! Genus-2 hyperbolic surface from the regular octagon with interior angles
//! π/4 in the Poincaré disk, sides glued by the word `a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹`.
//!
//! The octagon is fanned from its center through the side midpoints (16
//! triangles) and refined by geodesic 1→4 subdivision. Boundary vertices are
//! identified by mapping each side onto its partner with the side-pairing
//! isometry and merging points that land within `MERGE_TOL`.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

pub const MIN_DEPTH: u32 = 1;
pub const MAX_DEPTH: u32 = 6;
/// Disk-coordinate tolerance for identifying glued boundary vertices.
pub const MERGE_TOL: f64 = 1e-9;

/// Hyperbolic distance in the Poincaré disk.
pub fn disk_distance(z: C, w: C) -> f64 {
    let r = (z - w).norm() / (C::new(1.0, 0.0) - z.conj() * w).norm();
    2.0 * r.atanh()
}

/// Disk automorphism sending `x` to 0 and `y` onto the positive real axis.
#[derive(Debug, Clone, Copy)]
struct Normalizer {
    x: C,
    rot: C,
}

impl Normalizer {
    fn new(x: C, y: C) -> Self {
        let w = Self::raw(x, y);
        Self { x, rot: w / w.norm() }
    }

    fn raw(x: C, z: C) -> C {
        (z - x) / (C::new(1.0, 0.0) - x.conj() * z)
    }

    fn apply(&self, z: C) -> C {
        Self::raw(self.x, z) / self.rot
    }

    fn invert(&self, w: C) -> C {
        let u = w * self.rot;
        (u + self.x) / (C::new(1.0, 0.0) + self.x.conj() * u)
    }
}

/// Geodesic midpoint of `a` and `b`.
pub fn geodesic_midpoint(a: C, b: C) -> C {
    let n = Normalizer::new(a, b);
    let far = n.apply(b).re;
    // |z| = tanh(d/2) along a diameter; halve the distance
    let half = (far.atanh() / 2.0).tanh();
    n.invert(C::new(half, 0.0))
}

/// Corners of the regular octagon with interior angle π/4.
pub fn octagon_corners() -> [C; 8] {
    let t = (PI / 8.0).tan();
    let cosh_r = 1.0 / (t * t);
    let radius = cosh_r.acosh();
    let re = (radius / 2.0).tanh();
    std::array::from_fn(|k| C::from_polar(re, PI / 8.0 + k as f64 * PI / 4.0))
}

/// Side pairings as `(side, partner)`: side `s` runs `P_s → P_{s+1}` and is
/// identified with the partner side traversed backwards.
pub const SIDE_PAIRS: [(usize, usize); 4] = [(0, 2), (1, 3), (4, 6), (5, 7)];

pub fn gen_hyperbolic_genus2(depth: u32) -> Result<IntrinsicMesh> {
    if !(MIN_DEPTH..=MAX_DEPTH).contains(&depth) {
        return Err(Error::OutOfRange(format!(
            "hyperbolic depth {depth} outside {MIN_DEPTH}..={MAX_DEPTH}"
        )));
    }
    let corners = octagon_corners();
    let mut pts: Vec<C> = vec![C::new(0.0, 0.0)];
    // sides[v] = sides of the octagon containing unglued vertex v (bitmask)
    let mut sides: Vec<u8> = vec![0];
    let mut corner_ids = [0usize; 8];
    for (k, &p) in corners.iter().enumerate() {
        pts.push(p);
        sides.push((1 << k) | (1 << ((k + 7) % 8)));
        corner_ids[k] = pts.len() - 1;
    }
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for k in 0..8 {
        let (a, b) = (corner_ids[k], corner_ids[(k + 1) % 8]);
        pts.push(geodesic_midpoint(pts[a], pts[b]));
        sides.push(1 << k);
        let m = pts.len() - 1;
        tris.push([0, a, m]);
        tris.push([0, m, b]);
    }

    for _ in 0..depth {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(4 * tris.len());
        for &[a, b, c] in &tris {
            let mut mid = |u: usize, v: usize| -> usize {
                let k = (u.min(v), u.max(v));
                *cache.entry(k).or_insert_with(|| {
                    pts.push(geodesic_midpoint(pts[u], pts[v]));
                    // a segment lies on a side only if both ends share it
                    sides.push(sides[u] & sides[v]);
                    pts.len() - 1
                })
            };
            let ab = mid(a, b);
            let bc = mid(b, c);
            let ca = mid(c, a);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }

    // union-find over unglued vertices
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(s, t) in &SIDE_PAIRS {
        let on = |side: usize| -> Vec<usize> { (0..pts.len()).filter(|&v| sides[v] & (1 << side) != 0).collect() };
        let (on_s, on_t) = (on(s), on(t));
        if on_s.len() != on_t.len() {
            return Err(Error::Assembly(format!("sides {s} and {t} have different vertex counts")));
        }
        // partner side t traversed from P_{t+1} to P_t maps onto P_s -> P_{s+1}
        let src = Normalizer::new(corners[(t + 1) % 8], corners[t]);
        let dst = Normalizer::new(corners[s], corners[(s + 1) % 8]);
        for &v in &on_t {
            let image = dst.invert(src.apply(pts[v]));
            let hit = on_s
                .iter()
                .copied()
                .find(|&w| (pts[w] - image).norm() <= MERGE_TOL)
                .ok_or_else(|| Error::Assembly(format!("no partner for vertex {v} on side {t}")))?;
            let (ra, rb) = (find(&mut parent, v), find(&mut parent, hit));
            if ra != rb {
                parent[ra] = rb;
            }
        }
    }

    let mut id = vec![usize::MAX; pts.len()];
    let mut n = 0;
    for v in 0..pts.len() {
        let r = find(&mut parent, v);
        if id[r] == usize::MAX {
            id[r] = n;
            n += 1;
        }
        id[v] = id[r];
    }

    let mut lengths: HashMap<(usize, usize), f64> = HashMap::new();
    let mut glued = Vec::with_capacity(tris.len());
    for &[a, b, c] in &tris {
        let t = [id[a], id[b], id[c]];
        for (u, v) in [(a, b), (b, c), (c, a)] {
            let (p, q) = (id[u], id[v]);
            let k = (p.min(q), p.max(q));
            let d = disk_distance(pts[u], pts[v]);
            if let Some(prev) = lengths.insert(k, d) {
                if (prev - d).abs() > 1e-7 * d {
                    return Err(Error::Assembly(format!("glued edge {k:?} has lengths {prev} and {d}")));
                }
            }
        }
        glued.push(t);
    }
    let mut triples: Vec<(usize, usize, f64)> = lengths.into_iter().map(|((a, b), l)| (a, b, l)).collect();
    triples.sort_by_key(|&(a, b, _)| (a, b));
    IntrinsicMesh::new(n, glued, &triples, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_is_equidistant() {
        let a = C::new(0.3, -0.2);
        let b = C::new(-0.5, 0.6);
        let m = geodesic_midpoint(a, b);
        let (da, db) = (disk_distance(a, m), disk_distance(m, b));
        assert!((da - db).abs() < 1e-12);
        assert!((da + db - disk_distance(a, b)).abs() < 1e-12);
    }

    #[test]
    fn octagon_has_expected_side_length() {
        // cosh(s/2) = cot(π/8) for interior angle π/4
        let p = octagon_corners();
        let s = disk_distance(p[0], p[1]);
        assert!(((s / 2.0).cosh() - 1.0 / (PI / 8.0).tan()).abs() < 1e-12);
    }

    #[test]
    fn genus_two_topology() {
        for depth in 1..=2 {
            let m = gen_hyperbolic_genus2(depth).unwrap();
            assert_eq!(m.euler_characteristic(), -2);
            assert_eq!(m.betti1(), 4);
            assert!(m.validate().passed(), "{:?}", m.validate());
            assert_eq!(m.n_faces(), 16 * 4usize.pow(depth));
        }
    }

    #[test]
    fn depth_out_of_range() {
        assert!(gen_hyperbolic_genus2(0).is_err());
        assert!(gen_hyperbolic_genus2(7).is_err());
    }
}
