use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;

/// Largest grid resolution keeping the edge count (3m²) under 2·10⁵.
pub const MAX_TORUS_GRID: usize = 258;

/// Lattice with columns `u` and `v`: `[[u_x, v_x], [u_y, v_y]]`.
pub type Lattice = [[f64; 2]; 2];

pub const UNIT_LATTICE: Lattice = [[1.0, 0.0], [0.0, 1.0]];

/// Flat torus `R²/(uZ + vZ)` as an `m × m` periodic grid, each cell split
/// along its `(0,0)-(1,1)` diagonal.
pub fn gen_torus_grid(m: usize, lattice: Lattice) -> Result<IntrinsicMesh> {
    if m < 3 {
        return Err(Error::OutOfRange(format!("torus grid needs m >= 3, got {m}")));
    }
    if m > MAX_TORUS_GRID {
        return Err(Error::OutOfRange(format!("torus grid m = {m} exceeds {MAX_TORUS_GRID}")));
    }
    let det = lattice[0][0] * lattice[1][1] - lattice[0][1] * lattice[1][0];
    let scale = lattice.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    if !det.is_finite() || det.abs() <= 1e-12 * scale * scale {
        return Err(Error::OutOfRange("degenerate lattice".into()));
    }
    let idx = |i: usize, j: usize| (i % m) * m + (j % m);
    let step = |di: f64, dj: f64| -> f64 {
        let x = (di * lattice[0][0] + dj * lattice[0][1]) / m as f64;
        let y = (di * lattice[1][0] + dj * lattice[1][1]) / m as f64;
        (x * x + y * y).sqrt()
    };
    let (h_u, h_v, h_d) = (step(1.0, 0.0), step(0.0, 1.0), step(1.0, 1.0));

    let mut tris = Vec::with_capacity(2 * m * m);
    let mut lengths = Vec::with_capacity(3 * m * m);
    for i in 0..m {
        for j in 0..m {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            // orientation follows the sign of the lattice determinant
            if det > 0.0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, c, b]);
                tris.push([a, d, c]);
            }
            lengths.push((a, b, h_u));
            lengths.push((a, d, h_v));
            lengths.push((a, c, h_d));
        }
    }
    IntrinsicMesh::new(m * m, tris, &lengths, None)
}
