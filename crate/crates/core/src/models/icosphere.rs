use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

pub const MAX_ICOSPHERE_LEVEL: u32 = 6;

/// Subdivided icosahedron projected onto the sphere of radius `radius`.
/// Edge lengths are chord distances.
pub fn gen_icosphere(level: u32, radius: f64) -> Result<IntrinsicMesh> {
    if level > MAX_ICOSPHERE_LEVEL {
        return Err(Error::OutOfRange(format!("icosphere level {level} > {MAX_ICOSPHERE_LEVEL}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::OutOfRange(format!("radius {radius} must be positive")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for p in pts.iter_mut() {
        *p = normalize(*p);
    }
    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut mid = |a: usize, b: usize, pts: &mut Vec<[f64; 3]>| -> usize {
            let k = if a < b { (a, b) } else { (b, a) };
            *cache.entry(k).or_insert_with(|| {
                let (p, q) = (pts[a], pts[b]);
                pts.push(normalize([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                pts.len() - 1
            })
        };
        for &[a, b, c] in &tris {
            let ab = mid(a, b, &mut pts);
            let bc = mid(b, c, &mut pts);
            let ca = mid(c, a, &mut pts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let scaled = pts
        .into_iter()
        .map(|p| [radius * p[0], radius * p[1], radius * p[2]])
        .collect();
    IntrinsicMesh::from_positions(scaled, tris)
}

fn normalize(p: [f64; 3]) -> [f64; 3] {
    let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
    [p[0] / n, p[1] / n, p[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_subdivision() {
        for level in 0..=3u32 {
            let m = gen_icosphere(level, 1.0).unwrap();
            let s = 4usize.pow(level);
            assert_eq!(m.n_vertices(), 10 * s + 2);
            assert_eq!(m.n_edges(), 30 * s);
            assert_eq!(m.n_faces(), 20 * s);
            assert_eq!(m.euler_characteristic(), 2);
            assert!(m.validate().passed());
        }
    }

    #[test]
    fn faces_are_outward_oriented() {
        let m = gen_icosphere(1, 1.0).unwrap();
        let p = m.positions().unwrap();
        for t in m.triangles() {
            let (a, b, c) = (p[t[0]], p[t[1]], p[t[2]]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            assert!(n[0] * a[0] + n[1] * a[1] + n[2] * a[2] > 0.0);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(gen_icosphere(7, 1.0).is_err());
        assert!(gen_icosphere(1, 0.0).is_err());
    }
}
