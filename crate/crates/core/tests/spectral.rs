use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symlap_core::discretization::Assembly;
use symlap_core::models::MeshRecipe;
use symlap_core::sparse::{dot, TripletBuilder};
use symlap_core::spectral::hodge::{codifferential_ratio, harmonic_basis};
use symlap_core::spectral::{
    cluster, coclosed_spectrum, eig_lowest, eig_with, hodge_decompose, Ordering, SolverOptions, SpectrumResult,
};
use symlap_core::{Basis, FieldVector, MeshShape, OperatorPair};

fn build(recipe: &str) -> Assembly {
    Assembly::new(recipe.parse::<MeshRecipe>().unwrap().build().unwrap()).unwrap()
}

fn ico4() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("icosphere:4"))
}

fn genus2() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("hyperbolic-genus2:4"))
}

fn torus64() -> &'static Assembly {
    static A: OnceLock<Assembly> = OnceLock::new();
    A.get_or_init(|| build("torus-grid:64"))
}

fn opts() -> SolverOptions {
    SolverOptions {
        ordering: Ordering::Magnitude,
        ..Default::default()
    }
}

fn contracts(op: &OperatorPair, spec: &SpectrumResult) {
    let bound = spec.tol * spec.norm_estimate.max(1.0);
    assert!(spec.pairs.iter().all(|p| p.residual <= bound));
    assert!(spec.orthonormality_error(&op.mass) <= 1e-10);
    assert!(spec.cross_cluster_inner(&op.mass) <= 1e-10);
    let mags: Vec<f64> = spec.pairs.iter().map(|p| p.lambda.abs()).collect();
    assert!(mags.windows(2).all(|w| w[0] <= w[1] + 1e-12 * spec.norm_estimate));
}

#[test]
fn identity_pencil() {
    let eye = |n| {
        let mut b = TripletBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 1.0);
        }
        b.build()
    };
    let op = OperatorPair::new(eye(5), eye(5), Basis::P1Function, "identity").unwrap();
    let spec = eig_lowest(&op, 3, 1e-10).unwrap();
    assert_eq!(spec.len(), 3);
    assert!(spec.pairs.iter().all(|p| (p.lambda - 1.0).abs() < 1e-12));
    assert_eq!(spec.cluster_sizes(), vec![3]);
    assert!(eig_lowest(&op, 0, 1e-8).is_err());
    assert!(eig_lowest(&op, 6, 1e-8).is_err());
    assert!(eig_lowest(&op, 2, 0.0).is_err());
}

#[test]
fn clustering_examples() {
    assert_eq!(cluster(&[0.0001, 0.0002, 3.99, 4.01], 0.01), vec![vec![0, 1], vec![2, 3]]);
    assert!(cluster(&[], 0.01).is_empty());
    assert_eq!(cluster(&[1.0, 2.0, 3.0], 0.01).len(), 3);
}

#[test]
fn torus_hodge_spectrum() {
    let a = torus64();
    let spec = eig_with(&a.dec.hodge_l1, 12, &opts(), None).unwrap();
    contracts(&a.dec.hodge_l1, &spec);
    let four_pi2 = 4.0 * PI * PI;
    let l = spec.eigenvalues();
    assert!(l[..2].iter().all(|x| x.abs() < 1e-6));
    assert!(l[2..10].iter().all(|x| (x / four_pi2 - 1.0).abs() < 0.02));
}

#[test]
fn genus2_yano_spectrum() {
    let a = genus2();
    let spec = eig_with(&a.yano, 6, &opts(), None).unwrap();
    contracts(&a.yano, &spec);
    let l = spec.eigenvalues();
    assert_eq!(l.iter().filter(|x| (**x / 2.0 - 1.0).abs() <= 0.05).count(), 4);
    assert!(l.iter().all(|x| *x >= 2.0 * 0.95));
}

#[test]
fn icosphere_kernel_is_one_cluster() {
    let a = ico4();
    let spec = eig_with(&a.yano, 6, &opts(), None).unwrap();
    contracts(&a.yano, &spec);
    assert_eq!(spec.cluster_sizes(), vec![6]);
    assert!(spec.pairs.iter().all(|p| p.lambda.abs() < 0.5));
}

#[test]
fn solver_is_deterministic_across_thread_counts() {
    let a = ico4();
    let solve = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| eig_with(&a.yano, 8, &opts(), None).unwrap())
    };
    let (s1, s4, again) = (solve(1), solve(4), solve(4));
    for (x, y) in [(&s1, &s4), (&s4, &again)] {
        assert_eq!(x.eigenvalues(), y.eigenvalues());
        for (p, q) in x.pairs.iter().zip(&y.pairs) {
            assert_eq!(p.vector, q.vector);
        }
    }
    let assemble = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| Assembly::new(a.mesh.clone()).unwrap())
    };
    let (one, four) = (assemble(1), assemble(4));
    let entries = |x: &Assembly| x.yano.stiffness.triplets().collect::<Vec<_>>();
    assert_eq!(entries(&one), entries(&four));
    assert_eq!(entries(&one), entries(a));
}

fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>() - 0.5).collect()
}

fn m1_norm(a: &Assembly, x: &[f64]) -> f64 {
    a.dec.m1.bilinear(x, x).sqrt()
}

#[test]
fn exact_forms_decompose_to_themselves() {
    let a = ico4();
    let shape = MeshShape::of(&a.mesh);
    let f = random(a.mesh.n_vertices(), 1);
    let omega = FieldVector::new(Basis::WhitneyEdge, shape, a.dec.d0.mul_vec(&f)).unwrap();
    let parts = hodge_decompose(&a.mesh, &a.dec, &omega).unwrap();
    let scale = m1_norm(a, omega.coeffs());
    let diff: Vec<f64> = parts.exact.coeffs().iter().zip(omega.coeffs()).map(|(x, y)| x - y).collect();
    assert!(m1_norm(a, &diff) <= 1e-10 * scale);
    assert!(m1_norm(a, parts.coexact.coeffs()) <= 1e-10 * scale);
    assert!(m1_norm(a, parts.harmonic.coeffs()) <= 1e-10 * scale);
}

#[test]
fn harmonic_forms_on_torus_are_harmonic_parts() {
    let a = torus64();
    let shape = MeshShape::of(&a.mesh);
    let basis = harmonic_basis(&a.mesh, &a.dec).unwrap();
    assert_eq!(basis.len(), 2);
    for h in basis {
        let omega = FieldVector::new(Basis::WhitneyEdge, shape, h.clone()).unwrap();
        let parts = hodge_decompose(&a.mesh, &a.dec, &omega).unwrap();
        let diff: Vec<f64> = parts.harmonic.coeffs().iter().zip(&h).map(|(x, y)| x - y).collect();
        assert!(m1_norm(a, &diff) <= 1e-10);
        let lh = a.dec.hodge_l1.stiffness.mul_vec(&h);
        assert!(dot(&lh, &a.dec.hodge_l1.mass.mul_vec(&lh)).sqrt() < 1e-8);
    }
}

#[test]
fn decomposition_is_orthogonal_and_idempotent() {
    for a in [ico4(), genus2()] {
        let shape = MeshShape::of(&a.mesh);
        let x = random(a.mesh.n_edges(), 5);
        let omega = FieldVector::new(Basis::WhitneyEdge, shape, x.clone()).unwrap();
        let p = hodge_decompose(&a.mesh, &a.dec, &omega).unwrap();
        let scale = a.dec.m1.bilinear(&x, &x);
        let (e, c, h) = (p.exact.coeffs(), p.coexact.coeffs(), p.harmonic.coeffs());
        for (u, v) in [(e, c), (e, h), (c, h)] {
            assert!(a.dec.m1.bilinear(u, v).abs() <= 1e-10 * scale);
        }
        let sum: Vec<f64> = (0..x.len()).map(|i| e[i] + c[i] + h[i] - x[i]).collect();
        assert!(m1_norm(a, &sum) <= 1e-10 * scale.sqrt());
        if a.mesh.betti1() == 0 {
            assert!(m1_norm(a, h) <= 1e-10 * scale.sqrt());
        }
        for part in [&p.exact, &p.coexact, &p.harmonic] {
            let again = hodge_decompose(&a.mesh, &a.dec, part).unwrap();
            let kept = [&again.exact, &again.coexact, &again.harmonic]
                .into_iter()
                .find(|q| {
                    let d: Vec<f64> = q.coeffs().iter().zip(part.coeffs()).map(|(x, y)| x - y).collect();
                    m1_norm(a, &d) <= 1e-12 * scale.sqrt().max(1.0)
                });
            assert!(kept.is_some());
        }
    }
}

#[test]
fn coclosed_spectra() {
    let a = ico4();
    let spec = coclosed_spectrum(&a.dec, 4, &opts()).unwrap();
    let l = spec.eigenvalues();
    assert!(l[..3].iter().all(|x| (x / 2.0 - 1.0).abs() < 0.02));
    assert!(l[3] > 2.5);
    assert_eq!(spec.cluster_sizes()[0], 3);
    for p in &spec.pairs {
        assert!(codifferential_ratio(&a.dec, &p.vector) <= 10.0 * spec.tol * spec.norm_estimate.sqrt());
    }

    let t = coclosed_spectrum(&torus64().dec, 3, &opts()).unwrap().eigenvalues();
    assert!(t[0].abs() < 1e-8 && t[1].abs() < 1e-8 && t[2] > 1.0);

    let g = coclosed_spectrum(&genus2().dec, 5, &opts()).unwrap().eigenvalues();
    assert!(g[..4].iter().all(|x| x.abs() < 1e-8) && g[4] > 0.5);
}
