//! Intrinsic triangle meshes: combinatorics plus edge lengths, with an
//! optional embedding used only for sampling ambient fields.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed oriented triangle mesh described by its faces and the lengths of
/// its edges. Edges are stored canonically as `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone)]
pub struct IntrinsicMesh {
    n_vertices: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    positions: Option<Vec<[f64; 3]>>,
    edge_index: HashMap<(usize, usize), usize>,
    /// `face_edges[f][c]` is the edge from corner `c` to corner `c + 1`.
    face_edges: Vec<[usize; 3]>,
    /// +1 when the face traverses its edge from `lo` to `hi`.
    face_edge_signs: Vec<[i8; 3]>,
    edge_faces: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    NonClosed,
    NonManifoldEdge,
    InconsistentOrientation,
    NonManifoldVertex,
    IsolatedVertex,
    DegenerateFace,
    TriangleInequality,
    NonPositiveLength,
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Edge, face or vertex index depending on `kind`.
    pub index: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub violations: Vec<Violation>,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

#[inline]
fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl IntrinsicMesh {
    /// Builds a mesh from faces and a list of `(i, j, length)` entries. Every
    /// face edge must have a length; extra entries are rejected.
    pub fn new(
        n_vertices: usize,
        triangles: Vec<[usize; 3]>,
        edge_lengths: &[(usize, usize, f64)],
        positions: Option<Vec<[f64; 3]>>,
    ) -> Result<Self> {
        let mut length_of: HashMap<(usize, usize), f64> = HashMap::with_capacity(edge_lengths.len());
        for &(i, j, l) in edge_lengths {
            if i >= n_vertices || j >= n_vertices || i == j {
                return Err(Error::InvalidMesh(format!("bad edge ({i}, {j})")));
            }
            if length_of.insert(key(i, j), l).is_some() {
                return Err(Error::InvalidMesh(format!("duplicate edge ({i}, {j})")));
            }
        }
        if let Some(p) = &positions {
            if p.len() != n_vertices {
                return Err(Error::InvalidMesh(format!(
                    "{} positions for {} vertices",
                    p.len(),
                    n_vertices
                )));
            }
        }

        let mut edge_index = HashMap::with_capacity(triangles.len() * 3 / 2 + 1);
        let mut edges = Vec::new();
        let mut lengths = Vec::new();
        let mut face_edges = Vec::with_capacity(triangles.len());
        let mut face_edge_signs = Vec::with_capacity(triangles.len());
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        for (f, t) in triangles.iter().enumerate() {
            let mut fe = [0usize; 3];
            let mut fs = [0i8; 3];
            for c in 0..3 {
                let (a, b) = (t[c], t[(c + 1) % 3]);
                if a >= n_vertices || b >= n_vertices {
                    return Err(Error::InvalidMesh(format!("face {f} references missing vertex")));
                }
                if a == b {
                    fe[c] = usize::MAX;
                    continue;
                }
                let k = key(a, b);
                let e = match edge_index.get(&k) {
                    Some(&e) => e,
                    None => {
                        let l = *length_of.get(&k).ok_or_else(|| {
                            Error::InvalidMesh(format!("no length for edge ({a}, {b})"))
                        })?;
                        edges.push([k.0, k.1]);
                        lengths.push(l);
                        edge_faces.push(Vec::new());
                        edge_index.insert(k, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                edge_faces[e].push(f);
                fe[c] = e;
                fs[c] = if a < b { 1 } else { -1 };
            }
            face_edges.push(fe);
            face_edge_signs.push(fs);
        }
        if edges.len() != length_of.len() {
            return Err(Error::InvalidMesh(format!(
                "{} edge lengths given but faces use {} edges",
                length_of.len(),
                edges.len()
            )));
        }
        Ok(Self {
            n_vertices,
            triangles,
            edges,
            lengths,
            positions,
            edge_index,
            face_edges,
            face_edge_signs,
            edge_faces,
        })
    }

    /// Mesh whose edge lengths are chord distances between `positions`.
    pub fn from_positions(positions: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut seen = HashMap::new();
        let mut lengths = Vec::new();
        for t in &triangles {
            for c in 0..3 {
                let (a, b) = (t[c], t[(c + 1) % 3]);
                if a >= positions.len() || b >= positions.len() {
                    return Err(Error::InvalidMesh("face references missing vertex".into()));
                }
                if a != b && seen.insert(key(a, b), ()).is_none() {
                    let (p, q) = (positions[a], positions[b]);
                    let d = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();
                    lengths.push((a, b, d));
                }
            }
        }
        Self::new(positions.len(), triangles, &lengths, Some(positions))
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.triangles.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// First Betti number of a closed orientable surface, `2 - χ`.
    pub fn betti1(&self) -> usize {
        (2 - self.euler_characteristic()).max(0) as usize
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn positions(&self) -> Option<&[[f64; 3]]> {
        self.positions.as_deref()
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&key(a, b)).copied()
    }

    pub fn length_between(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_between(a, b).map(|e| self.lengths[e])
    }

    pub fn face_edges(&self) -> &[[usize; 3]] {
        &self.face_edges
    }

    pub fn face_edge_signs(&self) -> &[[i8; 3]] {
        &self.face_edge_signs
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    /// The three side lengths of face `f` as `[l(v0,v1), l(v1,v2), l(v2,v0)]`.
    pub fn face_lengths(&self, f: usize) -> [f64; 3] {
        let fe = self.face_edges[f];
        [self.lengths[fe[0]], self.lengths[fe[1]], self.lengths[fe[2]]]
    }

    /// Copy with every edge length multiplied by `c` (positions scaled too).
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.lengths.iter_mut().for_each(|l| *l *= c);
        if let Some(p) = out.positions.as_mut() {
            for x in p.iter_mut() {
                for k in x.iter_mut() {
                    *k *= c;
                }
            }
        }
        out
    }

    /// Copy with new edge lengths (same combinatorics), dropping positions.
    pub fn with_lengths(&self, lengths: Vec<f64>) -> Result<Self> {
        if lengths.len() != self.edges.len() {
            return Err(Error::Dimension("edge length count".into()));
        }
        let mut out = self.clone();
        out.lengths = lengths;
        out.positions = None;
        Ok(out)
    }

    /// `(i, j, length)` triples in edge order.
    pub fn edge_length_triples(&self) -> Vec<(usize, usize, f64)> {
        self.edges
            .iter()
            .zip(&self.lengths)
            .map(|(e, &l)| (e[0], e[1], l))
            .collect()
    }

    /// Checks closedness, orientation, manifoldness, connectivity and strict
    /// triangle inequalities. Every violation is reported with its index.
    pub fn validate(&self) -> Diagnostics {
        let mut out = Vec::new();
        for (f, t) in self.triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                out.push(Violation {
                    kind: ViolationKind::DegenerateFace,
                    index: f,
                    detail: format!("repeated vertex in {t:?}"),
                });
            }
        }
        for (e, faces) in self.edge_faces.iter().enumerate() {
            if self.lengths[e].is_nan() || self.lengths[e] <= 0.0 {
                out.push(Violation {
                    kind: ViolationKind::NonPositiveLength,
                    index: e,
                    detail: format!("length {}", self.lengths[e]),
                });
            }
            match faces.len() {
                1 => out.push(Violation {
                    kind: ViolationKind::NonClosed,
                    index: e,
                    detail: format!("boundary edge {:?}", self.edges[e]),
                }),
                2 => {
                    let s = |f: usize| {
                        let c = self.face_edges[f].iter().position(|&x| x == e).unwrap();
                        self.face_edge_signs[f][c]
                    };
                    if s(faces[0]) == s(faces[1]) {
                        out.push(Violation {
                            kind: ViolationKind::InconsistentOrientation,
                            index: e,
                            detail: format!("faces {} and {} traverse edge the same way", faces[0], faces[1]),
                        });
                    }
                }
                n => out.push(Violation {
                    kind: ViolationKind::NonManifoldEdge,
                    index: e,
                    detail: format!("{n} incident faces"),
                }),
            }
        }
        for f in 0..self.triangles.len() {
            let [a, b, c] = self.face_lengths(f);
            if !(a < b + c && b < a + c && c < a + b) {
                out.push(Violation {
                    kind: ViolationKind::TriangleInequality,
                    index: f,
                    detail: format!("lengths {a}, {b}, {c}"),
                });
            }
        }

        // vertex links: corners around each vertex must form a single cycle
        let mut corners: Vec<Vec<usize>> = vec![Vec::new(); self.n_vertices];
        for (f, t) in self.triangles.iter().enumerate() {
            for &v in t {
                corners[v].push(f);
            }
        }
        for (v, cs) in corners.iter().enumerate() {
            if cs.is_empty() {
                out.push(Violation {
                    kind: ViolationKind::IsolatedVertex,
                    index: v,
                    detail: "no incident faces".into(),
                });
                continue;
            }
            // link edges: for each face at v, the opposite pair
            let mut link: HashMap<usize, Vec<usize>> = HashMap::new();
            for &f in cs {
                let t = self.triangles[f];
                let c = t.iter().position(|&x| x == v).unwrap();
                let (a, b) = (t[(c + 1) % 3], t[(c + 2) % 3]);
                link.entry(a).or_default().push(b);
                link.entry(b).or_default().push(a);
            }
            let start = *link.keys().min().unwrap();
            let mut seen = std::collections::HashSet::from([start]);
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &link[&x] {
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != link.len() || link.values().any(|n| n.len() != 2) {
                out.push(Violation {
                    kind: ViolationKind::NonManifoldVertex,
                    index: v,
                    detail: "vertex link is not a single cycle".into(),
                });
            }
        }

        if self.n_vertices > 0 && !self.triangles.is_empty() {
            let mut parent: Vec<usize> = (0..self.n_vertices).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    p[x] = p[p[x]];
                    x = p[x];
                }
                x
            }
            for e in &self.edges {
                let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
                if a != b {
                    parent[a] = b;
                }
            }
            let root = find(&mut parent, self.triangles[0][0]);
            let components = (0..self.n_vertices)
                .filter(|&v| !corners[v].is_empty() && find(&mut parent, v) != root)
                .count();
            if components > 0 {
                out.push(Violation {
                    kind: ViolationKind::Disconnected,
                    index: 0,
                    detail: format!("{components} vertices not connected to vertex 0's component"),
                });
            }
        }

        Diagnostics { violations: out }
    }

    /// Fails with the first few violations unless the mesh validates.
    pub fn ensure_valid(&self) -> Result<()> {
        let d = self.validate();
        if d.passed() {
            Ok(())
        } else {
            let msg: Vec<String> = d
                .violations
                .iter()
                .take(5)
                .map(|v| format!("{:?}#{}: {}", v.kind, v.index, v.detail))
                .collect();
            Err(Error::InvalidMesh(msg.join("; ")))
        }
    }
}
