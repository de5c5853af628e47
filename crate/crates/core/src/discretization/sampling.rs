//! Test fields: parallel fields, gradients of vertex functions, ambient
//! fields restricted to an embedded mesh, and smooth random fields.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::connection::{rotate, ConnectionData};
use super::dec::DecComplex;
use super::geometry::MeshGeometry;
use crate::error::{Error, Result};
use crate::field::{Basis, FieldVector, MeshShape};
use crate::mesh::IntrinsicMesh;
use crate::spectral::eigen::{eig_with, SolverOptions};

/// Rotation by a quarter turn, `ξ ↦ Jξ`, applied at every vertex.
pub fn quarter_turn(xi: &[f64]) -> Vec<f64> {
    xi.chunks_exact(2).flat_map(|v| [-v[1], v[0]]).collect()
}

/// Spreads `value` (given at `root`) by parallel transport along a BFS tree.
/// Only parallel when the connection has trivial holonomy (flat tori).
pub fn transported_field(mesh: &IntrinsicMesh, conn: &ConnectionData, root: usize, value: [f64; 2]) -> FieldVector {
    let nv = mesh.n_vertices();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (e, &[lo, hi]) in mesh.edges().iter().enumerate() {
        let r = conn.edge_transport[e];
        adj[lo].push((hi, r));
        adj[hi].push((lo, -r));
    }
    let mut coeffs = vec![0.0; 2 * nv];
    let mut seen = vec![false; nv];
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    coeffs[2 * root] = value[0];
    coeffs[2 * root + 1] = value[1];
    while let Some(v) = queue.pop_front() {
        let here = [coeffs[2 * v], coeffs[2 * v + 1]];
        for &(w, r) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                let there = rotate(here, r);
                coeffs[2 * w] = there[0];
                coeffs[2 * w + 1] = there[1];
                queue.push_back(w);
            }
        }
    }
    FieldVector::new(Basis::VertexTangent, MeshShape::of(mesh), coeffs).expect("finite transported field")
}

/// Vertex-tangent gradient of a P1 function: face gradients averaged with
/// area weights and rotated into each vertex frame.
pub fn vertex_gradient(mesh: &IntrinsicMesh, geom: &MeshGeometry, conn: &ConnectionData, f: &[f64]) -> Result<FieldVector> {
    if f.len() != mesh.n_vertices() {
        return Err(Error::Dimension(format!("{} vertex values for {} vertices", f.len(), mesh.n_vertices())));
    }
    let mut acc = vec![0.0; 2 * mesh.n_vertices()];
    let mut weight = vec![0.0; mesh.n_vertices()];
    for (fi, t) in mesh.triangles().iter().enumerate() {
        let g = &geom.faces[fi];
        let mut grad = [0.0; 2];
        for c in 0..3 {
            grad[0] += f[t[c]] * g.grad_bary[c][0];
            grad[1] += f[t[c]] * g.grad_bary[c][1];
        }
        for c in 0..3 {
            let local = rotate(grad, -conn.vertex_to_face[fi][c]);
            acc[2 * t[c]] += g.area * local[0];
            acc[2 * t[c] + 1] += g.area * local[1];
            weight[t[c]] += g.area;
        }
    }
    for (v, w) in weight.iter().enumerate() {
        acc[2 * v] /= w;
        acc[2 * v + 1] /= w;
    }
    FieldVector::new(Basis::VertexTangent, MeshShape::of(mesh), acc)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn unit(a: [f64; 3]) -> [f64; 3] {
    let n = dot3(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Area-weighted vertex normals of an embedded mesh.
pub fn vertex_normals(mesh: &IntrinsicMesh) -> Result<Vec<[f64; 3]>> {
    let pos = mesh
        .positions()
        .ok_or_else(|| Error::InvalidMesh("mesh has no embedding".into()))?;
    let mut n = vec![[0.0; 3]; mesh.n_vertices()];
    for t in mesh.triangles() {
        let fnorm = cross(sub(pos[t[1]], pos[t[0]]), sub(pos[t[2]], pos[t[0]]));
        for &v in t {
            for k in 0..3 {
                n[v][k] += fnorm[k];
            }
        }
    }
    Ok(n.into_iter().map(unit).collect())
}

/// Tangent frames `(e1, e2, n)` matching the intrinsic vertex frames: `e1`
/// points along the projected reference edge, `e2 = n × e1`.
pub fn ambient_frames(mesh: &IntrinsicMesh, conn: &ConnectionData) -> Result<Vec<[[f64; 3]; 3]>> {
    let pos = mesh
        .positions()
        .ok_or_else(|| Error::InvalidMesh("mesh has no embedding".into()))?;
    let normals = vertex_normals(mesh)?;
    let tris = mesh.triangles();
    Ok((0..mesh.n_vertices())
        .map(|v| {
            let (f, c) = conn.vertex_corners[v][0];
            let n = normals[v];
            let d = sub(pos[tris[f][(c + 1) % 3]], pos[v]);
            let t = dot3(d, n);
            let e1 = unit([d[0] - t * n[0], d[1] - t * n[1], d[2] - t * n[2]]);
            [e1, cross(n, e1), n]
        })
        .collect())
}

/// Restricts an ambient vector field to the vertex frames (tangential part).
pub fn ambient_field<F>(mesh: &IntrinsicMesh, conn: &ConnectionData, field: F) -> Result<FieldVector>
where
    F: Fn([f64; 3]) -> [f64; 3],
{
    let frames = ambient_frames(mesh, conn)?;
    let pos = mesh.positions().expect("checked by ambient_frames");
    let coeffs = frames
        .iter()
        .zip(pos)
        .flat_map(|(fr, &p)| {
            let a = field(p);
            [dot3(a, fr[0]), dot3(a, fr[1])]
        })
        .collect();
    FieldVector::new(Basis::VertexTangent, MeshShape::of(mesh), coeffs)
}

/// Rotation about `axis` through the origin: `axis × p` (a Killing field on a
/// round sphere centered at the origin).
pub fn rotation_field(mesh: &IntrinsicMesh, conn: &ConnectionData, axis: [f64; 3]) -> Result<FieldVector> {
    ambient_field(mesh, conn, |p| cross(axis, p))
}

/// Gradient of the height `⟨axis, p⟩` on a round sphere centered at the
/// origin (a conformal field). The radial part is removed with the exact
/// sphere normal; vertex normals are only first-order accurate there.
pub fn height_gradient_field(mesh: &IntrinsicMesh, conn: &ConnectionData, axis: [f64; 3]) -> Result<FieldVector> {
    ambient_field(mesh, conn, |p| {
        let t = dot3(axis, p) / dot3(p, p);
        [axis[0] - t * p[0], axis[1] - t * p[1], axis[2] - t * p[2]]
    })
}

/// `count` smooth fields `∇f + J∇g`. On embedded meshes `f` and `g` are random
/// quadratic polynomials of the ambient coordinates, which gives the same
/// continuum fields at every resolution; otherwise they are random
/// combinations of the lowest Laplace eigenfunctions.
pub fn smooth_random_fields(
    mesh: &IntrinsicMesh,
    geom: &MeshGeometry,
    conn: &ConnectionData,
    dec: &DecComplex,
    count: usize,
    seed: u64,
) -> Result<Vec<FieldVector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut uniform = move || rng.random::<f64>() * 2.0 - 1.0;
    let mut out = Vec::with_capacity(count);
    if mesh.positions().is_some() {
        let normals = vertex_normals(mesh)?;
        let frames = ambient_frames(mesh, conn)?;
        let pos = mesh.positions().expect("embedded");
        let scale = pos.iter().fold(0.0f64, |m, p| m.max(dot3(*p, *p).sqrt())).max(f64::MIN_POSITIVE);
        for _ in 0..count {
            let mut poly = || {
                let a: [f64; 3] = std::array::from_fn(|_| uniform());
                let b: [[f64; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| uniform()));
                (a, b)
            };
            let (fa, fb) = poly();
            let (ga, gb) = poly();
            // ∇(a·p + pᵀBp/scale) = a + (B + Bᵀ)p/scale
            let grad = |a: [f64; 3], b: [[f64; 3]; 3], p: [f64; 3]| -> [f64; 3] {
                std::array::from_fn(|i| a[i] + (0..3).map(|j| (b[i][j] + b[j][i]) * p[j]).sum::<f64>() / scale)
            };
            let coeffs = (0..mesh.n_vertices())
                .flat_map(|v| {
                    let p = pos[v];
                    let gf = grad(fa, fb, p);
                    let gg = cross(normals[v], grad(ga, gb, p));
                    let a = [gf[0] + gg[0], gf[1] + gg[1], gf[2] + gg[2]];
                    [dot3(a, frames[v][0]), dot3(a, frames[v][1])]
                })
                .collect();
            out.push(FieldVector::new(Basis::VertexTangent, MeshShape::of(mesh), coeffs)?);
        }
        return Ok(out);
    }

    let modes = 12.min(mesh.n_vertices() - 1);
    let opts = SolverOptions {
        seed_label: Some("smooth-fields".into()),
        ..Default::default()
    };
    let spec = eig_with(&dec.laplace0, modes + 1, &opts, None)?;
    // skip the constant mode
    let basis: Vec<&[f64]> = spec.pairs[1..].iter().map(|p| p.vector.as_slice()).collect();
    for _ in 0..count {
        let mut combo = || -> Vec<f64> {
            let mut f = vec![0.0; mesh.n_vertices()];
            for b in &basis {
                let c = uniform();
                f.iter_mut().zip(b.iter()).for_each(|(x, y)| *x += c * y);
            }
            f
        };
        let f = combo();
        let g = combo();
        let gf = vertex_gradient(mesh, geom, conn, &f)?;
        let gg = quarter_turn(vertex_gradient(mesh, geom, conn, &g)?.coeffs());
        let coeffs = gf.coeffs().iter().zip(&gg).map(|(a, b)| a + b).collect();
        out.push(FieldVector::new(Basis::VertexTangent, MeshShape::of(mesh), coeffs)?);
    }
    Ok(out)
}
