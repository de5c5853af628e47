//! File formats: mesh JSON, Matrix Market operators, spectrum CSV.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::mesh::IntrinsicMesh;
use crate::sparse::{CsrMatrix, TripletBuilder};
use crate::spectral::SpectrumResult;

/// Tool version and configuration checksum stamped into every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config_checksum: String,
}

impl Provenance {
    pub fn new(version: impl Into<String>, config_checksum: impl Into<String>) -> Self {
        Self {
            version: version.into(),
            config_checksum: config_checksum.into(),
        }
    }

    fn header(&self) -> String {
        format!("symlap {} config-sha256 {}", self.version, self.config_checksum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: usize,
    pub triangles: Vec<[usize; 3]>,
    pub edge_lengths: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl MeshFile {
    pub fn from_mesh(mesh: &IntrinsicMesh, meta: Map<String, Value>) -> Self {
        Self {
            vertices: mesh.n_vertices(),
            triangles: mesh.triangles().to_vec(),
            edge_lengths: mesh.edge_length_triples(),
            positions: mesh.positions().map(|p| p.to_vec()),
            meta,
        }
    }

    /// Builds and validates the mesh.
    pub fn to_mesh(&self) -> Result<IntrinsicMesh> {
        let mesh = IntrinsicMesh::new(
            self.vertices,
            self.triangles.clone(),
            &self.edge_lengths,
            self.positions.clone(),
        )?;
        mesh.ensure_valid()?;
        Ok(mesh)
    }
}

pub fn write_mesh_json(path: &Path, mesh: &IntrinsicMesh, meta: Map<String, Value>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    serde_json::to_writer(&mut w, &MeshFile::from_mesh(mesh, meta))?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_mesh_json(path: &Path) -> Result<MeshFile> {
    let file = std::fs::File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Symmetric matrices are written as their lower triangle with the
/// `symmetric` qualifier, everything else as `general`.
pub fn write_matrix_market<W: Write>(mut w: W, m: &CsrMatrix, comments: &[String]) -> Result<()> {
    let symmetric = m.nrows() == m.ncols() && m.asymmetry() == 0.0;
    let kind = if symmetric { "symmetric" } else { "general" };
    writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
    for c in comments {
        writeln!(w, "% {c}")?;
    }
    let entries: Vec<(usize, usize, f64)> = m.triplets().filter(|&(r, c, _)| !symmetric || r >= c).collect();
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), entries.len())?;
    for (r, c, v) in entries {
        writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v)?;
    }
    Ok(())
}

pub fn read_matrix_market<R: Read>(r: R) -> Result<CsrMatrix> {
    let mut lines = BufReader::new(r).lines();
    let banner = lines.next().ok_or_else(|| Error::Parse("empty Matrix Market file".into()))??;
    let lower = banner.to_ascii_lowercase();
    if !lower.starts_with("%%matrixmarket matrix coordinate real") {
        return Err(Error::Parse(format!("unsupported Matrix Market banner `{banner}`")));
    }
    let symmetric = lower.ends_with("symmetric");
    let mut size: Option<(usize, usize, usize)> = None;
    let mut builder: Option<TripletBuilder> = None;
    let mut read = 0usize;
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let bad = || Error::Parse(format!("bad Matrix Market line `{t}`"));
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad());
                let (r, c, n) = (p(fields[0])?, p(fields[1])?, p(fields[2])?);
                size = Some((r, c, n));
                builder = Some(TripletBuilder::with_capacity(r, c, if symmetric { 2 * n } else { n }));
            }
            Some((nr, nc, _)) => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let i: usize = fields[0].parse().map_err(|_| bad())?;
                let j: usize = fields[1].parse().map_err(|_| bad())?;
                let v: f64 = fields[2].parse().map_err(|_| bad())?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(bad());
                }
                let b = builder.as_mut().expect("size line seen");
                b.push(i - 1, j - 1, v);
                if symmetric && i != j {
                    b.push(j - 1, i - 1, v);
                }
                read += 1;
            }
        }
    }
    let (_, _, n) = size.ok_or_else(|| Error::Parse("missing Matrix Market size line".into()))?;
    if read != n {
        return Err(Error::Parse(format!("expected {n} entries, found {read}")));
    }
    Ok(builder.expect("size line seen").build())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub lambda: f64,
    pub residual: f64,
    pub cluster: usize,
}

pub fn spectrum_rows(spec: &SpectrumResult) -> Vec<SpectrumRow> {
    spec.pairs
        .iter()
        .enumerate()
        .map(|(index, p)| SpectrumRow {
            index,
            lambda: p.lambda,
            residual: p.residual,
            cluster: p.cluster,
        })
        .collect()
}

/// CSV with columns `index,lambda,residual,cluster`, preceded by a `#`
/// provenance line.
pub fn write_spectrum_csv<W: Write>(mut w: W, spec: &SpectrumResult, prov: &Provenance) -> Result<()> {
    writeln!(w, "# {} operator {}", prov.header(), spec.label)?;
    let mut csv = csv::Writer::from_writer(w);
    for row in spectrum_rows(spec) {
        csv.serialize(row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn read_spectrum_csv<R: Read>(r: R) -> Result<Vec<SpectrumRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<SpectrumRow>, _>>()?;
    Ok(rows)
}

/// Matrix Market comment lines carrying provenance.
pub fn provenance_comments(prov: &Provenance, what: &str) -> Vec<String> {
    vec![prov.header(), what.to_string()]
}
