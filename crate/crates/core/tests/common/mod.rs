//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use bloch_lab::domains::{DomainSpec, Point};
use bloch_lab::expr::Expr;
use bloch_lab::linalg::{c, CMatrix, C64};
use bloch_lab::maps::{DiskPoint, HoloMap};
use bloch_lab::rotation::RotationNumber;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rand_c<R: Rng>(rng: &mut R, scale: f64) -> C64 {
    c(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn rand_vec<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<C64> {
    (0..n).map(|_| rand_c(rng, scale)).collect()
}

pub fn rand_disk_point<R: Rng>(rng: &mut R, rmax: f64) -> DiskPoint {
    let r = rmax * rng.random::<f64>().sqrt();
    let t = rng.random_range(0.0..TAU);
    DiskPoint::new(C64::from_polar(r, t)).unwrap()
}

pub fn rand_rotation<R: Rng>(rng: &mut R) -> RotationNumber {
    RotationNumber::from_angle(rng.random_range(0.0..TAU))
}

/// A point of the open unit ball of `C^n` with norm below `rmax`.
pub fn rand_ball_point<R: Rng>(rng: &mut R, n: usize, rmax: f64) -> Point {
    loop {
        let v = rand_vec(rng, n, 1.0);
        let r = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if r > 1e-3 && r < 1.0 {
            let s = rmax * rng.random::<f64>() / r;
            return v.into_iter().map(|x| x * s).collect();
        }
    }
}

/// Gram–Schmidt on random columns.
pub fn rand_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::new();
    while cols.len() < n {
        let mut v = rand_vec(rng, n, 1.0);
        for q in &cols {
            let dot: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, a) in v.iter_mut().zip(q) {
                *x -= dot * a;
            }
        }
        let r = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if r > 1e-3 {
            cols.push(v.into_iter().map(|x| x / r).collect());
        }
    }
    let rows: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    CMatrix::from_rows(&rows).unwrap()
}

pub fn rand_permutation<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    p
}

pub fn rand_ball_automorphism<R: Rng>(rng: &mut R, n: usize) -> HoloMap {
    let u = rand_unitary(rng, n);
    HoloMap::ball_automorphism(u, rand_ball_point(rng, n, 0.9)).unwrap()
}

pub fn rand_polydisk_automorphism<R: Rng>(rng: &mut R, n: usize) -> HoloMap {
    let factors = (0..n).map(|_| (rand_disk_point(rng, 0.9), rand_rotation(rng))).collect();
    HoloMap::polydisk_automorphism(factors, rand_permutation(rng, n)).unwrap()
}

pub fn rand_disk_automorphism<R: Rng>(rng: &mut R) -> HoloMap {
    HoloMap::mobius_disk(rand_disk_point(rng, 0.9), rand_rotation(rng))
}

/// A random automorphism of `spec` (disk, ball or polydisk).
pub fn rand_automorphism<R: Rng>(rng: &mut R, spec: &DomainSpec) -> HoloMap {
    match spec {
        DomainSpec::Disk => rand_disk_automorphism(rng),
        DomainSpec::Ball(n) => rand_ball_automorphism(rng, *n),
        DomainSpec::Polydisk(n) => rand_polydisk_automorphism(rng, *n),
        _ => panic!("no random automorphisms for {spec}"),
    }
}

fn boxed(e: Expr) -> Box<Expr> {
    Box::new(e)
}

/// A polynomial with 1 to 4 terms of total degree 1 to 3.
pub fn rand_polynomial<R: Rng>(rng: &mut R, dim: usize) -> Expr {
    let terms = rng.random_range(1..=4);
    (0..terms)
        .map(|_| {
            let degree = rng.random_range(1..=3);
            (0..degree).fold(Expr::Const(rand_c(rng, 1.0)), |acc, _| {
                Expr::Mul(boxed(acc), boxed(Expr::Var(rng.random_range(0..dim))))
            })
        })
        .reduce(|a, b| Expr::Add(boxed(a), boxed(b)))
        .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// `H_{ψ(z)}(Jψ u, Jψ u) / H_z(u, u)`.
pub fn pullback_ratio(psi: &HoloMap, spec: &DomainSpec, z: &[C64], u: &[C64]) -> f64 {
    let w = psi.evaluate(z).unwrap();
    let ju = psi.jacobian(z).unwrap().mul_vec(u).unwrap();
    let lhs = spec.metric_matrix(&w).unwrap().quadratic(&ju).unwrap();
    let rhs = spec.metric_matrix(z).unwrap().quadratic(u).unwrap();
    lhs / rhs
}

/// Disk self-maps of three shapes: Blaschke products, automorphisms after
/// `0.9 z^k`, and Blaschke products after automorphisms.
pub fn rand_disk_self_map<R: Rng>(rng: &mut R, kind: usize) -> HoloMap {
    let blaschke = |rng: &mut R| {
        let zeros = (0..rng.random_range(1..=4)).map(|_| rand_disk_point(rng, 0.95)).collect();
        HoloMap::blaschke(zeros, rand_rotation(rng))
    };
    match kind % 3 {
        0 => blaschke(rng),
        1 => {
            let k = rng.random_range(1..=3);
            let inner = HoloMap::expression(DomainSpec::Disk, &format!("0.9*z1^{k}"))
                .unwrap()
                .with_target(DomainSpec::Disk)
                .unwrap();
            HoloMap::compose(&rand_disk_automorphism(rng), &inner).unwrap()
        }
        _ => HoloMap::compose(&blaschke(rng), &rand_disk_automorphism(rng)).unwrap(),
    }
}

/// Strict contraction `z ↦ Az` with `‖A‖ = s`.
pub fn rand_contraction<R: Rng>(rng: &mut R, n: usize, s: f64) -> HoloMap {
    let rows: Vec<Vec<C64>> = (0..n).map(|_| rand_vec(rng, n, 1.0)).collect();
    let a = CMatrix::from_rows(&rows).unwrap();
    let a = a.scale_real(s / a.spectral_norm());
    HoloMap::linear(DomainSpec::Ball(n), a).unwrap()
}

/// `(z_1², z_1 z_2, …, z_1 z_n)`, a self-map of the ball fixing the origin.
pub fn ball_square_map(n: usize) -> HoloMap {
    let spec = DomainSpec::Ball(n);
    let comps = (0..n)
        .map(|j| HoloMap::expression(spec.clone(), &format!("z1*z{}", j + 1)).unwrap())
        .collect();
    HoloMap::stack(comps, Some(spec)).unwrap()
}

/// Ball self-maps: automorphisms, contractions between automorphisms, and the square map between automorphisms.
pub fn rand_ball_self_map<R: Rng>(rng: &mut R, n: usize, kind: usize) -> HoloMap {
    match kind % 3 {
        0 => rand_ball_automorphism(rng, n),
        1 => {
            let s = rng.random_range(0.3..1.0);
            let inner = HoloMap::compose(&rand_contraction(rng, n, s), &rand_ball_automorphism(rng, n)).unwrap();
            HoloMap::compose(&rand_ball_automorphism(rng, n), &inner).unwrap()
        }
        _ => {
            let inner = HoloMap::compose(&ball_square_map(n), &rand_ball_automorphism(rng, n)).unwrap();
            HoloMap::compose(&rand_ball_automorphism(rng, n), &inner).unwrap()
        }
    }
}

/// Polydisk self-maps built from the diagonal embedding, coordinate products and automorphisms.
pub fn rand_polydisk_self_map<R: Rng>(rng: &mut R, n: usize, kind: usize) -> HoloMap {
    let spec = DomainSpec::Polydisk(n);
    let core = match kind % 3 {
        0 => HoloMap::diagonal_embedding(n).unwrap(),
        1 => {
            // (z1 z2, z2 z3, …, z_n z1)
            let comps = (0..n)
                .map(|j| HoloMap::expression(spec.clone(), &format!("z{}*z{}", j + 1, (j + 1) % n + 1)).unwrap())
                .collect();
            HoloMap::stack(comps, Some(spec.clone())).unwrap()
        }
        _ => {
            // coordinate averages (z_j + z_{j+1})/2
            let comps = (0..n)
                .map(|j| HoloMap::expression(spec.clone(), &format!("(z{}+z{})/2", j + 1, (j + 1) % n + 1)).unwrap())
                .collect();
            HoloMap::stack(comps, Some(spec.clone())).unwrap()
        }
    };
    let inner = HoloMap::compose(&core, &rand_polydisk_automorphism(rng, n)).unwrap();
    HoloMap::compose(&rand_polydisk_automorphism(rng, n), &inner).unwrap()
}
