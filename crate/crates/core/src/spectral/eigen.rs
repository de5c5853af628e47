//! Lowest-magnitude eigenpairs of symmetric pencils `K x = λ M x`.
//!
//! Large problems use shift-invert Lanczos in the `M` inner product with full
//! reorthogonalization. Converged Ritz pairs are locked and later runs are
//! deflated against them, which recovers every copy of a repeated eigenvalue.
//! Small problems are solved densely.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Basis;
use crate::ldlt::Ldlt;
use crate::operator::{MassSolver, OperatorPair};
use crate::sparse::{axpy, dot, CsrMatrix};

/// Problems at or below this dimension go to the dense solver.
pub const DENSE_CUTOFF: usize = 400;
pub const DEFAULT_TOL: f64 = 1e-8;
/// Relative size of the shift jitter used when `K − σM` is singular.
pub const SHIFT_JITTER: f64 = 1e-6;
pub const SHIFT_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// `|λ1| ≤ |λ2| ≤ …`
    Magnitude,
    /// `λ1 ≤ λ2 ≤ …`
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    Dense,
    Lanczos,
}

/// Orthogonal (in the pencil's mass inner product) projection applied to every
/// Krylov vector, restricting the solve to an invariant subspace.
pub trait Constraint {
    fn project(&self, x: &mut [f64]);
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub shift: f64,
    /// Seeds the starting vectors; defaults to the operator label.
    pub seed_label: Option<String>,
    pub dense_cutoff: usize,
    pub ordering: Ordering,
    pub krylov_dim: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            shift: 0.0,
            seed_label: None,
            dense_cutoff: DENSE_CUTOFF,
            ordering: Ordering::Magnitude,
            krylov_dim: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    /// `M`-normalized eigenvector
    pub vector: Vec<f64>,
    /// `‖Kx − λMx‖_{M⁻¹}` for `‖x‖_M = 1`
    pub residual: f64,
    pub cluster: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub label: String,
    pub basis: Basis,
    pub pairs: Vec<EigenPair>,
    pub clusters: Vec<Vec<usize>>,
    pub shift: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub method: SolveMethod,
    pub ordering: Ordering,
    /// pencil norm estimate used to scale tolerances
    pub norm_estimate: f64,
    pub tol: f64,
}

impl SpectrumResult {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.lambda).collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }

    /// Absolute residual bound every pair satisfies.
    pub fn residual_bound(&self) -> f64 {
        self.tol * self.norm_estimate.max(1.0)
    }

    /// Regroups the pairs with a new gap tolerance.
    pub fn recluster(&mut self, gap_tol: f64) {
        self.clusters = cluster(&self.eigenvalues(), gap_tol);
        for (c, members) in self.clusters.iter().enumerate() {
            for &i in members {
                self.pairs[i].cluster = c;
            }
        }
    }

    /// Largest `|xᵢᵀ M xⱼ − δᵢⱼ|`.
    pub fn orthonormality_error(&self, mass: &CsrMatrix) -> f64 {
        let mx: Vec<Vec<f64>> = self.pairs.iter().map(|p| mass.mul_vec(&p.vector)).collect();
        let mut worst: f64 = 0.0;
        for (i, p) in self.pairs.iter().enumerate() {
            for (j, m) in mx.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(&p.vector, m) - target).abs());
            }
        }
        worst
    }

    /// Largest `|xᵢᵀ M xⱼ|` over pairs in different clusters.
    pub fn cross_cluster_inner(&self, mass: &CsrMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, p) in self.pairs.iter().enumerate() {
            let m = mass.mul_vec(&p.vector);
            for q in &self.pairs[i + 1..] {
                if q.cluster != p.cluster {
                    worst = worst.max(dot(&q.vector, &m).abs());
                }
            }
        }
        worst
    }
}

/// Greedy grouping of consecutive values: `v[i+1]` joins the group of `v[i]`
/// when `|v[i+1] − v[i]| ≤ gap_tol · max(1, |v[i]|)`.
pub fn cluster(values: &[f64], gap_tol: f64) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (v - values[i - 1]).abs() <= gap_tol * values[i - 1].abs().max(1.0) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups
}

/// Default clustering tolerance, 50× the solver tolerance.
pub fn default_gap_tol(tol: f64) -> f64 {
    50.0 * tol
}

/// Deterministic seed derived from a label (FNV-1a).
pub fn seed_from_label(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn eig_lowest(op: &OperatorPair, count: usize, tol: f64) -> Result<SpectrumResult> {
    eig_with(op, count, &SolverOptions { tol, ..Default::default() }, None)
}

pub fn eig_with(
    op: &OperatorPair,
    count: usize,
    opts: &SolverOptions,
    constraint: Option<&dyn Constraint>,
) -> Result<SpectrumResult> {
    if count == 0 {
        return Err(Error::OutOfRange("eigenpair count must be >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::OutOfRange(format!("tolerance {} must be positive", opts.tol)));
    }
    let n = op.dim();
    if count > n {
        return Err(Error::OutOfRange(format!("asked for {count} eigenpairs of a {n}-dimensional pencil")));
    }
    let mass = op.check_mass()?;
    let norm = op.norm_estimate(&mass);
    let mut result = if constraint.is_none() && n <= opts.dense_cutoff {
        dense(op, count, opts, &mass, norm)?
    } else {
        lanczos(op, count, opts, &mass, norm, constraint)?
    };
    result.recluster(default_gap_tol(opts.tol));
    Ok(result)
}

fn sort_key(ordering: Ordering, lambda: f64) -> f64 {
    match ordering {
        Ordering::Magnitude => lambda.abs(),
        Ordering::Signed => lambda,
    }
}

/// `‖Kx − λMx‖_{M⁻¹}`
pub fn residual_norm(op: &OperatorPair, mass: &MassSolver, x: &[f64], lambda: f64) -> f64 {
    let mut r = op.stiffness.mul_vec(x);
    let mx = op.mass.mul_vec(x);
    axpy(-lambda, &mx, &mut r);
    let z = mass.solve(&r);
    dot(&r, &z).max(0.0).sqrt()
}

fn dense(op: &OperatorPair, count: usize, opts: &SolverOptions, mass: &MassSolver, norm: f64) -> Result<SpectrumResult> {
    let k = op.stiffness.to_dense();
    let m = op.mass.to_dense();
    let chol = nalgebra::Cholesky::new(m).ok_or_else(|| Error::Factorization("mass is not positive definite".into()))?;
    let l = chol.l();
    // C = L⁻¹ K L⁻ᵀ
    let linv_k = l
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::Factorization("singular mass factor".into()))?;
    let c = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::Factorization("singular mass factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let lt = l.transpose();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        sort_key(opts.ordering, eig.eigenvalues[a]).total_cmp(&sort_key(opts.ordering, eig.eigenvalues[b]))
    });
    let mut pairs = Vec::with_capacity(count);
    for &i in order.iter().take(count) {
        let y = eig.eigenvectors.column(i).into_owned();
        let x = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Factorization("singular mass factor".into()))?;
        let vector: Vec<f64> = normalize_sign(x.iter().copied().collect());
        let lambda = eig.eigenvalues[i];
        let residual = residual_norm(op, mass, &vector, lambda);
        pairs.push(EigenPair {
            lambda,
            vector,
            residual,
            cluster: 0,
        });
    }
    Ok(SpectrumResult {
        label: op.label.clone(),
        basis: op.basis,
        pairs,
        clusters: Vec::new(),
        shift: 0.0,
        iterations: 0,
        restarts: 0,
        method: SolveMethod::Dense,
        ordering: opts.ordering,
        norm_estimate: norm,
        tol: opts.tol,
    })
}

/// Flips the sign so the largest-magnitude entry is positive, making output
/// independent of the sign the solver happened to produce.
fn normalize_sign(mut x: Vec<f64>) -> Vec<f64> {
    let mut best = 0usize;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if x.get(best).is_some_and(|v| *v < 0.0) {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    x
}

struct ShiftInvert<'a> {
    factor: Ldlt,
    shift: f64,
    constraint: Option<&'a dyn Constraint>,
}

impl ShiftInvert<'_> {
    /// `(K − σM)⁻¹ M x`, projected.
    fn apply(&self, mx: &[f64]) -> Vec<f64> {
        let mut y = self.factor.solve(mx);
        if let Some(c) = self.constraint {
            c.project(&mut y);
        }
        y
    }
}

fn factor_shifted<'a>(
    op: &'a OperatorPair,
    opts: &SolverOptions,
    norm: f64,
    constraint: Option<&'a dyn Constraint>,
) -> Result<ShiftInvert<'a>> {
    let jitter = SHIFT_JITTER * norm.max(1.0);
    let mut last = None;
    for attempt in 0..=SHIFT_RETRIES {
        // σ, σ + j, σ − j, σ + 2j
        let shift = opts.shift
            + match attempt {
                0 => 0.0,
                1 => jitter,
                2 => -jitter,
                _ => 2.0 * jitter,
            };
        let shifted = if shift == 0.0 {
            op.stiffness.clone()
        } else {
            op.stiffness.add_scaled(&op.mass, -shift)?
        };
        match Ldlt::factor(&shifted) {
            Ok(factor) => {
                return Ok(ShiftInvert {
                    factor,
                    shift,
                    constraint,
                })
            }
            Err(e) => last = Some(e),
        }
    }
    Err(Error::Factorization(format!(
        "K − σM singular after {SHIFT_RETRIES} shift retries: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

struct Locked {
    vectors: Vec<Vec<f64>>,
    mvectors: Vec<Vec<f64>>,
}

impl Locked {
    /// Two passes of classical Gram–Schmidt in the `M` inner product.
    fn orthogonalize(&self, x: &mut [f64], extra: &[Vec<f64>], extra_m: &[Vec<f64>]) {
        for _ in 0..2 {
            for (q, mq) in self.vectors.iter().zip(&self.mvectors).chain(extra.iter().zip(extra_m)) {
                let c = dot(x, mq);
                axpy(-c, q, x);
            }
        }
    }
}

fn m_normalize(op: &OperatorPair, x: &mut [f64]) -> (f64, Vec<f64>) {
    let mut mx = op.mass.mul_vec(x);
    let nrm = dot(x, &mx).max(0.0).sqrt();
    if nrm > 0.0 {
        x.iter_mut().for_each(|v| *v /= nrm);
        mx.iter_mut().for_each(|v| *v /= nrm);
    }
    (nrm, mx)
}

fn lanczos(
    op: &OperatorPair,
    count: usize,
    opts: &SolverOptions,
    mass: &MassSolver,
    norm: f64,
    constraint: Option<&dyn Constraint>,
) -> Result<SpectrumResult> {
    let n = op.dim();
    let si = factor_shifted(op, opts, norm, constraint)?;
    let seed = seed_from_label(opts.seed_label.as_deref().unwrap_or(&op.label));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = opts.krylov_dim.unwrap_or((2 * count + 20).max(40)).min(n);
    let bound = opts.tol * norm.max(1.0);
    let max_restarts = 40 * count;

    let mut locked = Locked {
        vectors: Vec::new(),
        mvectors: Vec::new(),
    };
    let mut locked_theta: Vec<f64> = Vec::new();
    let mut steps = 0usize;
    let mut restarts = 0usize;
    let mut carry: Vec<Vec<f64>> = Vec::new();
    let mut exhausted = false;

    while restarts < max_restarts {
        restarts += 1;
        let mut start: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        if let Some(c) = constraint {
            c.project(&mut start);
        }
        let (rn, _) = m_normalize(op, &mut start);
        if rn == 0.0 {
            exhausted = true;
            break;
        }
        for v in &carry {
            axpy(1.0, v, &mut start);
        }
        if let Some(c) = constraint {
            c.project(&mut start);
        }
        locked.orthogonalize(&mut start, &[], &[]);
        let (sn, mstart) = m_normalize(op, &mut start);
        if sn < 1e-10 {
            exhausted = true;
            break;
        }

        // one Lanczos run
        let mut q: Vec<Vec<f64>> = vec![start];
        let mut mq: Vec<Vec<f64>> = vec![mstart];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let budget = m.min(n - locked.vectors.len());
        for j in 0..budget {
            steps += 1;
            let mut w = si.apply(&mq[j]);
            let a = dot(&w, &mq[j]);
            alpha.push(a);
            axpy(-a, &q[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &q[j - 1], &mut w);
            }
            locked.orthogonalize(&mut w, &q, &mq);
            let (b, mw) = m_normalize(op, &mut w);
            let scale = alpha.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            if j + 1 == budget || !(b > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
                break;
            }
            beta.push(b);
            q.push(w);
            mq.push(mw);
        }
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));

        // Ritz pairs, nearest the shift first
        let want = count.min(k);
        carry.clear();
        let mut top: Option<f64> = None;
        for &i in order.iter().take(want) {
            let theta = eig.eigenvalues[i];
            if theta == 0.0 {
                continue;
            }
            let s = eig.eigenvectors.column(i);
            let mut x = vec![0.0; n];
            for (qj, sj) in q.iter().zip(s.iter()) {
                axpy(*sj, qj, &mut x);
            }
            locked.orthogonalize(&mut x, &[], &[]);
            let (xn, mx) = m_normalize(op, &mut x);
            if xn < 0.5 {
                continue;
            }
            let lambda = si.shift + 1.0 / theta;
            let res = residual_norm(op, mass, &x, lambda);
            // lock with headroom so the final Rayleigh–Ritz pass stays inside the bound
            let ok = res <= 0.1 * bound;
            if top.is_none() {
                top = Some(theta.abs());
            }
            if ok {
                locked.vectors.push(x);
                locked.mvectors.push(mx);
                locked_theta.push(theta.abs());
            } else {
                carry.push(x);
            }
        }

        let mut sorted = locked_theta.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        if sorted.len() >= count {
            // the deflated run found nothing that belongs among the wanted pairs
            let kth = sorted[count - 1];
            if top.is_none_or(|t| t < kth * (1.0 - 1e-9)) {
                break;
            }
        }
        if k == 0 {
            exhausted = true;
            break;
        }
    }

    if locked.vectors.len() < count {
        let partial = locked_theta.iter().map(|t| si.shift + 1.0 / t).collect();
        if exhausted || restarts >= max_restarts {
            return Err(Error::NotConverged {
                iterations: steps,
                found: locked.vectors.len(),
                requested: count,
                partial,
            });
        }
    }

    // Rayleigh–Ritz over the locked basis
    let p = locked.vectors.len();
    let mut kp = DMatrix::<f64>::zeros(p, p);
    let kx: Vec<Vec<f64>> = locked.vectors.iter().map(|x| op.stiffness.mul_vec(x)).collect();
    for i in 0..p {
        for j in 0..p {
            kp[(i, j)] = dot(&locked.vectors[i], &kx[j]);
        }
    }
    let kp = (&kp + kp.transpose()) * 0.5;
    let small = SymmetricEigen::new(kp);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        sort_key(opts.ordering, small.eigenvalues[a]).total_cmp(&sort_key(opts.ordering, small.eigenvalues[b]))
    });
    let mut pairs = Vec::with_capacity(count);
    for &i in order.iter().take(count) {
        let s = small.eigenvectors.column(i);
        let mut x = vec![0.0; n];
        for (xj, sj) in locked.vectors.iter().zip(s.iter()) {
            axpy(*sj, xj, &mut x);
        }
        m_normalize(op, &mut x);
        let x = normalize_sign(x);
        let lambda = small.eigenvalues[i];
        let residual = residual_norm(op, mass, &x, lambda);
        if residual > bound {
            return Err(Error::NotConverged {
                iterations: steps,
                found: pairs.len(),
                requested: count,
                partial: pairs.iter().map(|p: &EigenPair| p.lambda).collect(),
            });
        }
        pairs.push(EigenPair {
            lambda,
            vector: x,
            residual,
            cluster: 0,
        });
    }
    Ok(SpectrumResult {
        label: op.label.clone(),
        basis: op.basis,
        pairs,
        clusters: Vec::new(),
        shift: si.shift,
        iterations: steps,
        restarts,
        method: SolveMethod::Lanczos,
        ordering: opts.ordering,
        norm_estimate: norm,
        tol: opts.tol,
    })
}
