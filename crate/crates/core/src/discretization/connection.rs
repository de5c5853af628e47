//! Discrete Levi-Civita connection on vertex tangent planes.
//!
//! Each vertex gets a polar frame: the outgoing edges are laid out
//! counter-clockwise with corner angles rescaled by `2π/Θ_v` so that the full
//! turn maps to `2π`. Tangent vectors are stored as `(x, y)` pairs in that
//! frame. Transport along an edge is the rotation that keeps the angle to the
//! edge fixed; the mismatch around a vertex is its angle defect.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::geometry::MeshGeometry;
use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    x
}

#[inline]
pub fn rotate(v: [f64; 2], angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

#[inline]
pub fn rotation_block(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, -s], [s, c]]
}

#[derive(Debug, Clone)]
pub struct ConnectionData {
    /// `2π / Θ_v`
    pub angle_scale: Vec<f64>,
    /// Frame angle (vertex frame of `f[c]`) of the edge `f[c] -> f[c+1]`.
    pub corner_phi: Vec<[f64; 3]>,
    /// Rotation taking vectors from the frame of `f[c]` into the layout frame
    /// of face `f`.
    pub vertex_to_face: Vec<[f64; 3]>,
    /// Rotation angle transporting from `lo` to `hi` along each canonical edge.
    pub edge_transport: Vec<f64>,
    /// Per canonical edge: frame angle of `hi` seen from `lo`, and of `lo`
    /// seen from `hi`.
    pub edge_frame_angles: Vec<[f64; 2]>,
    /// Faces around each vertex in counter-clockwise order, as `(face, corner)`.
    pub vertex_corners: Vec<Vec<(usize, usize)>>,
}

impl ConnectionData {
    pub fn new(mesh: &IntrinsicMesh, geom: &MeshGeometry) -> Result<Self> {
        let nv = mesh.n_vertices();
        let tris = mesh.triangles();
        let mut halfedge: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(3 * tris.len());
        let mut any_corner: Vec<Option<(usize, usize)>> = vec![None; nv];
        for (f, t) in tris.iter().enumerate() {
            for c in 0..3 {
                if halfedge.insert((t[c], t[(c + 1) % 3]), (f, c)).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "halfedge ({}, {}) used twice",
                        t[c],
                        t[(c + 1) % 3]
                    )));
                }
                any_corner[t[c]].get_or_insert((f, c));
            }
        }

        let angle_scale: Vec<f64> = geom.angle_sum.iter().map(|s| 2.0 * PI / s).collect();
        let mut corner_phi = vec![[0.0; 3]; tris.len()];
        let mut vertex_to_face = vec![[0.0; 3]; tris.len()];
        let mut vertex_corners = vec![Vec::new(); nv];

        for v in 0..nv {
            let Some(start) = any_corner[v] else {
                return Err(Error::InvalidMesh(format!("isolated vertex {v}")));
            };
            let s = angle_scale[v];
            let mut acc = 0.0;
            let (mut f, mut c) = start;
            loop {
                vertex_corners[v].push((f, c));
                let theta = geom.faces[f].angles[c];
                corner_phi[f][c] = acc * s;
                let alpha = geom.faces[f].edge_direction(c);
                vertex_to_face[f][c] = (alpha + 0.5 * theta) - (acc * s + 0.5 * theta * s);
                acc += theta;
                // the next face ccw holds the halfedge v -> prev(v in f)
                let prev = tris[f][(c + 2) % 3];
                let &(nf, nc) = halfedge
                    .get(&(v, prev))
                    .ok_or_else(|| Error::InvalidMesh(format!("open vertex {v}")))?;
                if (nf, nc) == start {
                    break;
                }
                (f, c) = (nf, nc);
                if vertex_corners[v].len() > tris.len() {
                    return Err(Error::InvalidMesh(format!("vertex {v} link does not close")));
                }
            }
        }

        let phi = |a: usize, b: usize| -> f64 {
            let (f, c) = halfedge[&(a, b)];
            corner_phi[f][c]
        };
        let edge_frame_angles: Vec<[f64; 2]> = mesh.edges().iter().map(|&[lo, hi]| [phi(lo, hi), phi(hi, lo)]).collect();
        let edge_transport = edge_frame_angles
            .iter()
            .map(|&[at_lo, at_hi]| wrap_angle(at_hi + PI - at_lo))
            .collect();

        Ok(Self {
            angle_scale,
            corner_phi,
            vertex_to_face,
            edge_transport,
            edge_frame_angles,
            vertex_corners,
        })
    }

    /// Rotation angle transporting a tangent vector from `a` to `b`.
    pub fn transport(&self, mesh: &IntrinsicMesh, a: usize, b: usize) -> Option<f64> {
        let e = mesh.edge_between(a, b)?;
        let r = self.edge_transport[e];
        Some(if mesh.edges()[e][0] == a { r } else { wrap_angle(-r) })
    }

    /// Holonomy around vertex `v`: parallel transport face to face across the
    /// edges incident to `v`, once around. Equals the angle defect mod 2π.
    pub fn vertex_holonomy(&self, geom: &MeshGeometry, v: usize) -> f64 {
        let corners = &self.vertex_corners[v];
        let mut beta = 0.0;
        for (k, &(f, c)) in corners.iter().enumerate() {
            let (nf, nc) = corners[(k + 1) % corners.len()];
            let g = &geom.faces[f];
            let shared_here = g.edge_direction(c) + g.angles[c];
            let shared_next = geom.faces[nf].edge_direction(nc);
            beta += shared_next - shared_here;
        }
        wrap_angle(beta)
    }
}
