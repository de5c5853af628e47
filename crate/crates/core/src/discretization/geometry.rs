//! Per-face intrinsic geometry recovered from edge lengths.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::mesh::IntrinsicMesh;

/// Planar layout of one face. Corner `c` is `mesh.triangles()[f][c]`.
#[derive(Debug, Clone, Copy)]
pub struct FaceGeometry {
    pub layout: [[f64; 2]; 3],
    pub area: f64,
    /// interior angle at each corner
    pub angles: [f64; 3],
    /// cotangent of the angle at each corner
    pub cot: [f64; 3],
    /// gradients of the barycentric coordinates in the layout frame
    pub grad_bary: [[f64; 2]; 3],
}

impl FaceGeometry {
    /// Lays out a triangle with side lengths `[l01, l12, l20]`, corner 0 at the
    /// origin and corner 1 on the positive x axis (counter-clockwise).
    pub fn from_lengths(l: [f64; 3]) -> Self {
        let [l01, l12, l20] = l;
        let area = heron(l01, l12, l20);
        let x = (l01 * l01 + l20 * l20 - l12 * l12) / (2.0 * l01);
        let y = 2.0 * area / l01;
        let layout = [[0.0, 0.0], [l01, 0.0], [x, y]];
        // side opposite corner c
        let opp = [l12, l20, l01];
        let mut angles = [0.0; 3];
        let mut cot = [0.0; 3];
        for c in 0..3 {
            let a = opp[c];
            let b = opp[(c + 1) % 3];
            let d = opp[(c + 2) % 3];
            let num = b * b + d * d - a * a;
            angles[c] = (4.0 * area).atan2(num);
            cot[c] = num / (4.0 * area);
        }
        let mut grad_bary = [[0.0; 2]; 3];
        for c in 0..3 {
            let p = layout[(c + 1) % 3];
            let q = layout[(c + 2) % 3];
            let e = [q[0] - p[0], q[1] - p[1]];
            grad_bary[c] = [-e[1] / (2.0 * area), e[0] / (2.0 * area)];
        }
        Self {
            layout,
            area,
            angles,
            cot,
            grad_bary,
        }
    }

    /// Direction angle (layout frame) of the edge from corner `c` to `c + 1`.
    pub fn edge_direction(&self, c: usize) -> f64 {
        let p = self.layout[c];
        let q = self.layout[(c + 1) % 3];
        (q[1] - p[1]).atan2(q[0] - p[0])
    }

    /// `∇λ_i · ∇λ_j`
    pub fn grad_dot(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.grad_bary[i], self.grad_bary[j]);
        a[0] * b[0] + a[1] * b[1]
    }
}

/// Kahan's numerically stable Heron formula. Returns 0 for degenerate input.
pub fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

/// Face layouts plus the vertex quantities derived from them.
#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub faces: Vec<FaceGeometry>,
    /// barycentric lumped area (one third of each incident face)
    pub vertex_area: Vec<f64>,
    /// sum of incident corner angles
    pub angle_sum: Vec<f64>,
    pub total_area: f64,
}

impl MeshGeometry {
    pub fn new(mesh: &IntrinsicMesh) -> Self {
        let faces: Vec<FaceGeometry> = (0..mesh.n_faces())
            .into_par_iter()
            .map(|f| FaceGeometry::from_lengths(mesh.face_lengths(f)))
            .collect();
        let mut vertex_area = vec![0.0; mesh.n_vertices()];
        let mut angle_sum = vec![0.0; mesh.n_vertices()];
        for (t, g) in mesh.triangles().iter().zip(&faces) {
            for c in 0..3 {
                vertex_area[t[c]] += g.area / 3.0;
                angle_sum[t[c]] += g.angles[c];
            }
        }
        let total_area = faces.iter().map(|g| g.area).sum();
        Self {
            faces,
            vertex_area,
            angle_sum,
            total_area,
        }
    }

    /// Angle defect `2π − Σθ` per vertex.
    pub fn angle_defects(&self) -> Vec<f64> {
        self.angle_sum.iter().map(|s| 2.0 * PI - s).collect()
    }

    /// Edge cotangent weights `½(cot α + cot β)` indexed like `mesh.edges()`.
    pub fn cotan_weights(&self, mesh: &IntrinsicMesh) -> Vec<f64> {
        let mut w = vec![0.0; mesh.n_edges()];
        for (f, fe) in mesh.face_edges().iter().enumerate() {
            let g = &self.faces[f];
            for c in 0..3 {
                // edge c runs corner c -> c+1; the opposite corner is c+2
                w[fe[c]] += 0.5 * g.cot[(c + 2) % 3];
            }
        }
        w
    }
}
