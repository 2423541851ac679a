//! Bounded symmetric domains in standard form.
//!
//! A [`DomainSpec`] describes the unit disk, the ball, the polydisk, the four
//! Cartan classical domains and finite products of these. Points are flat
//! complex vectors; matrix domains store their free variables row-major
//! (all entries for `R_I`, the upper triangle with diagonal for `R_II`, the
//! strict upper triangle for `R_III`).

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{c, is_positive_definite, CMatrix, HermitianForm, C64};

pub type Point = Vec<C64>;

/// Upper bound on rejection draws per requested sample.
const REJECTION_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DomainSpec {
    Disk,
    Ball(usize),
    Polydisk(usize),
    CartanI { m: usize, n: usize },
    CartanII(usize),
    CartanIII(usize),
    CartanIV(usize),
    Product(Vec<DomainSpec>),
}

/// Bergman metric at a point: `H_z(u, v̄) = v* M u`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricMatrix {
    pub base: Point,
    pub form: HermitianForm,
}

impl MetricMatrix {
    pub fn eval(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        self.form.eval(u, v)
    }

    pub fn quadratic(&self, u: &[C64]) -> Result<f64> {
        self.form.quadratic(u)
    }
}

impl DomainSpec {
    pub fn ball(n: usize) -> Result<Self> {
        let d = DomainSpec::Ball(n);
        d.validate()?;
        Ok(d)
    }

    pub fn polydisk(n: usize) -> Result<Self> {
        let d = DomainSpec::Polydisk(n);
        d.validate()?;
        Ok(d)
    }

    pub fn cartan_i(m: usize, n: usize) -> Result<Self> {
        let d = DomainSpec::CartanI { m, n };
        d.validate()?;
        Ok(d)
    }

    pub fn cartan_ii(n: usize) -> Result<Self> {
        let d = DomainSpec::CartanII(n);
        d.validate()?;
        Ok(d)
    }

    pub fn cartan_iii(n: usize) -> Result<Self> {
        let d = DomainSpec::CartanIII(n);
        d.validate()?;
        Ok(d)
    }

    pub fn cartan_iv(n: usize) -> Result<Self> {
        let d = DomainSpec::CartanIV(n);
        d.validate()?;
        Ok(d)
    }

    /// Product domain; nested products are flattened.
    pub fn product(factors: Vec<DomainSpec>) -> Result<Self> {
        let mut flat = Vec::new();
        for f in factors {
            match f {
                DomainSpec::Product(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        let d = DomainSpec::Product(flat);
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Validation(msg));
        match self {
            DomainSpec::Disk => Ok(()),
            DomainSpec::Ball(n) | DomainSpec::Polydisk(n) if *n == 0 => {
                bad(format!("{self}: dimension must be at least 1"))
            }
            DomainSpec::Ball(_) | DomainSpec::Polydisk(_) => Ok(()),
            DomainSpec::CartanI { m, n } if !(*m >= *n && *n >= 1) => {
                bad(format!("cartan1:{m}x{n} needs m >= n >= 1"))
            }
            DomainSpec::CartanI { .. } => Ok(()),
            DomainSpec::CartanII(n) if *n < 2 => bad(format!("cartan2:{n} needs n >= 2")),
            DomainSpec::CartanIII(n) if *n < 5 => bad(format!("cartan3:{n} needs n >= 5")),
            DomainSpec::CartanIV(n) if *n < 5 => bad(format!("cartan4:{n} needs n >= 5")),
            DomainSpec::CartanII(_) | DomainSpec::CartanIII(_) | DomainSpec::CartanIV(_) => Ok(()),
            DomainSpec::Product(factors) => {
                if factors.is_empty() {
                    return bad("product needs at least one factor".into());
                }
                for f in factors {
                    if matches!(f, DomainSpec::Product(_)) {
                        return bad("product factors must be flattened".into());
                    }
                    f.validate()?;
                }
                Ok(())
            }
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            DomainSpec::Disk => 1,
            DomainSpec::Ball(n) | DomainSpec::Polydisk(n) | DomainSpec::CartanIV(n) => *n,
            DomainSpec::CartanI { m, n } => m * n,
            DomainSpec::CartanII(n) => n * (n + 1) / 2,
            DomainSpec::CartanIII(n) => n * (n - 1) / 2,
            DomainSpec::Product(fs) => fs.iter().map(DomainSpec::dimension).sum(),
        }
    }

    /// Irreducible-or-elementary factors with their coordinate offsets.
    pub fn factors(&self) -> Vec<(&DomainSpec, usize)> {
        match self {
            DomainSpec::Product(fs) => {
                let mut off = 0;
                fs.iter()
                    .map(|f| {
                        let here = off;
                        off += f.dimension();
                        (f, here)
                    })
                    .collect()
            }
            other => vec![(other, 0)],
        }
    }

    /// Factor list with polydisks split into disks and `ball:1` read as the disk.
    pub fn elementary_factors(&self) -> Vec<DomainSpec> {
        self.factors()
            .into_iter()
            .flat_map(|(f, _)| match f {
                DomainSpec::Polydisk(n) => vec![DomainSpec::Disk; *n],
                DomainSpec::Ball(1) => vec![DomainSpec::Disk],
                other => vec![other.clone()],
            })
            .collect()
    }

    /// True when both specs describe the same domain with the same metric.
    pub fn same_geometry(&self, other: &DomainSpec) -> bool {
        self.elementary_factors() == other.elementary_factors()
    }

    pub fn is_product(&self) -> bool {
        matches!(self, DomainSpec::Product(_))
    }

    /// True when every factor is a disk, ball or polydisk.
    pub fn is_elementary(&self) -> bool {
        self.factors().iter().all(|(f, _)| {
            matches!(f, DomainSpec::Disk | DomainSpec::Ball(_) | DomainSpec::Polydisk(_))
        })
    }

    pub fn origin(&self) -> Point {
        vec![c(0.0, 0.0); self.dimension()]
    }

    pub fn rank(&self) -> usize {
        match self {
            DomainSpec::Disk | DomainSpec::Ball(_) => 1,
            DomainSpec::Polydisk(n) | DomainSpec::CartanII(n) => *n,
            DomainSpec::CartanI { n, .. } => *n,
            DomainSpec::CartanIII(n) => n / 2,
            DomainSpec::CartanIV(_) => 2,
            DomainSpec::Product(fs) => fs.iter().map(DomainSpec::rank).sum(),
        }
    }

    /// `c_D`, the supremum of `β_f` over holomorphic `f: D → 𝔻`.
    pub fn bloch_constant(&self) -> f64 {
        match self {
            DomainSpec::Disk | DomainSpec::Polydisk(_) => 1.0,
            DomainSpec::Ball(n) | DomainSpec::CartanII(n) => (2.0 / (*n as f64 + 1.0)).sqrt(),
            DomainSpec::CartanI { m, n } => (2.0 / (m + n) as f64).sqrt(),
            DomainSpec::CartanIII(n) => (1.0 / (*n as f64 - 1.0)).sqrt(),
            DomainSpec::CartanIV(n) => (2.0 / *n as f64).sqrt(),
            DomainSpec::Product(fs) => fs.iter().map(DomainSpec::bloch_constant).fold(0.0, f64::max),
        }
    }

    /// Boundary points reached along the extremal directions used for the inner radius.
    pub fn extremal_boundary_vectors(&self) -> Vec<Point> {
        let dim = self.dimension();
        let mut out = Vec::new();
        for (f, off) in self.factors() {
            let embed = |local: Vec<C64>| {
                let mut v = vec![c(0.0, 0.0); dim];
                v[off..off + local.len()].copy_from_slice(&local);
                v
            };
            let fd = f.dimension();
            match f {
                DomainSpec::CartanIV(_) => {
                    let mut e1 = vec![c(0.0, 0.0); fd];
                    e1[0] = c(1.0, 0.0);
                    out.push(embed(e1));
                    for sign in [1.0, -1.0] {
                        let mut v = vec![c(0.0, 0.0); fd];
                        v[0] = c(0.5, 0.0);
                        v[1] = c(0.0, 0.5 * sign);
                        out.push(embed(v));
                    }
                }
                DomainSpec::CartanI { .. } | DomainSpec::CartanII(_) | DomainSpec::CartanIII(_) => {
                    for a in 0..fd {
                        let norm = f.basis_matrix(a).spectral_norm();
                        let mut v = vec![c(0.0, 0.0); fd];
                        v[a] = c(1.0 / norm, 0.0);
                        out.push(embed(v));
                    }
                }
                _ => {
                    for a in 0..fd {
                        let mut v = vec![c(0.0, 0.0); fd];
                        v[a] = c(1.0, 0.0);
                        out.push(embed(v));
                    }
                }
            }
        }
        out
    }

    /// `r_D`: the smallest `H_0(u,ū)^{1/2}` over the extremal boundary vectors.
    pub fn inner_radius(&self) -> Result<f64> {
        let m0 = self.metric_matrix(&self.origin())?;
        let mut best = f64::INFINITY;
        for u in self.extremal_boundary_vectors() {
            best = best.min(m0.quadratic(&u)?.sqrt());
        }
        Ok(best)
    }

    fn check_point(&self, z: &[C64]) -> Result<()> {
        LabError::check_len(self.dimension(), z.len())?;
        if z.iter().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
            return Err(LabError::validation("point has non-finite coordinates"));
        }
        Ok(())
    }

    /// Membership test with the smallest defining-inequality slack as margin.
    pub fn contains(&self, z: &[C64]) -> Result<(bool, f64)> {
        self.validate()?;
        self.check_point(z)?;
        Ok(self.contains_unchecked(z))
    }

    fn contains_unchecked(&self, z: &[C64]) -> (bool, f64) {
        match self {
            DomainSpec::Disk | DomainSpec::Ball(_) => {
                let m = 1.0 - norm(z);
                (m > 0.0, m)
            }
            DomainSpec::Polydisk(_) => {
                let m = z.iter().map(|w| 1.0 - w.norm()).fold(f64::INFINITY, f64::min);
                (m > 0.0, m)
            }
            DomainSpec::CartanI { .. } | DomainSpec::CartanII(_) | DomainSpec::CartanIII(_) => {
                let zm = self.to_matrix(z);
                let rows = zm.rows();
                let gap = CMatrix::identity(rows)
                    .sub(&zm.mul(&zm.adjoint()).expect("shapes agree"))
                    .expect("shapes agree");
                let (flag, m) = is_positive_definite(&HermitianForm::symmetrized(&gap));
                (flag, m)
            }
            DomainSpec::CartanIV(_) => {
                let (a, s) = lie_ball_potential(z);
                let m = a.min(1.0 - s.norm());
                (a > 0.0 && s.norm() < 1.0, m)
            }
            DomainSpec::Product(_) => {
                let mut flag = true;
                let mut margin = f64::INFINITY;
                for (f, off) in self.factors() {
                    let (fl, m) = f.contains_unchecked(&z[off..off + f.dimension()]);
                    flag &= fl;
                    margin = margin.min(m);
                }
                (flag, margin)
            }
        }
    }

    /// Errors with [`LabError::NotInterior`] unless `z` is an interior point.
    pub fn require_interior(&self, z: &[C64]) -> Result<()> {
        let (flag, margin) = self.contains(z)?;
        if flag {
            Ok(())
        } else {
            Err(LabError::NotInterior {
                domain: self.to_string(),
                margin,
            })
        }
    }

    /// Basis matrix `E_a` for free variable `a` of a Cartan matrix domain.
    pub fn basis_matrix(&self, a: usize) -> CMatrix {
        let one = c(1.0, 0.0);
        match self {
            DomainSpec::CartanI { m, n } => {
                let mut e = CMatrix::zeros(*m, *n);
                e[(a / n, a % n)] = one;
                e
            }
            DomainSpec::CartanII(n) => {
                let (h, k) = upper_index(*n, a, true);
                let mut e = CMatrix::zeros(*n, *n);
                e[(h, k)] = one;
                e[(k, h)] = one;
                e
            }
            DomainSpec::CartanIII(n) => {
                let (h, k) = upper_index(*n, a, false);
                let mut e = CMatrix::zeros(*n, *n);
                e[(h, k)] = one;
                e[(k, h)] = -one;
                e
            }
            _ => panic!("basis_matrix called on non-matrix domain {self}"),
        }
    }

    /// The matrix `Z = Σ z_a E_a` of a Cartan matrix-domain point.
    pub fn to_matrix(&self, z: &[C64]) -> CMatrix {
        match self {
            DomainSpec::CartanI { m, n } => {
                CMatrix::from_vec(*m, *n, z.to_vec()).unwrap_or_else(|_| CMatrix::zeros(*m, *n))
            }
            DomainSpec::CartanII(n) | DomainSpec::CartanIII(n) => {
                let sym = matches!(self, DomainSpec::CartanII(_));
                let mut zm = CMatrix::zeros(*n, *n);
                for (a, &v) in z.iter().enumerate() {
                    let (h, k) = upper_index(*n, a, sym);
                    zm[(h, k)] = v;
                    zm[(k, h)] = if sym { v } else { -v };
                }
                zm
            }
            _ => panic!("to_matrix called on non-matrix domain {self}"),
        }
    }

    /// Free variables of a matrix; inverse of [`DomainSpec::to_matrix`] on its image.
    pub fn from_matrix(&self, zm: &CMatrix) -> Point {
        match self {
            DomainSpec::CartanI { .. } => zm.as_slice().to_vec(),
            DomainSpec::CartanII(n) | DomainSpec::CartanIII(n) => {
                let sym = matches!(self, DomainSpec::CartanII(_));
                (0..self.dimension())
                    .map(|a| {
                        let (h, k) = upper_index(*n, a, sym);
                        zm[(h, k)]
                    })
                    .collect()
            }
            _ => panic!("from_matrix called on non-matrix domain {self}"),
        }
    }

    /// Bergman metric at an interior point.
    pub fn metric_matrix(&self, z: &[C64]) -> Result<MetricMatrix> {
        self.require_interior(z)?;
        let m = self.metric_unchecked(z)?;
        Ok(MetricMatrix {
            base: z.to_vec(),
            form: m,
        })
    }

    fn metric_unchecked(&self, z: &[C64]) -> Result<HermitianForm> {
        match self {
            DomainSpec::Disk | DomainSpec::Ball(_) => Ok(ball_metric(z)),
            DomainSpec::Polydisk(_) => {
                let d: Vec<f64> = z.iter().map(|w| (1.0 - w.norm_sqr()).powi(-2)).collect();
                Ok(HermitianForm::symmetrized(&CMatrix::from_real_diag(&d)))
            }
            DomainSpec::CartanI { m, n } => self.trace_metric(z, (m + n) as f64 / 2.0),
            DomainSpec::CartanII(n) => self.trace_metric(z, (*n as f64 + 1.0) / 2.0),
            DomainSpec::CartanIII(n) => self.trace_metric(z, (*n as f64 - 1.0) / 2.0),
            DomainSpec::CartanIV(_) => Ok(lie_ball_metric(z)),
            DomainSpec::Product(_) => {
                let blocks = self
                    .factors()
                    .into_iter()
                    .map(|(f, off)| {
                        f.metric_unchecked(&z[off..off + f.dimension()])
                            .map(HermitianForm::into_matrix)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(HermitianForm::symmetrized(&CMatrix::block_diag(&blocks)))
            }
        }
    }

    /// `M_{ba} = scale · Tr[(I−ZZ*)⁻¹ E_a (I−Z*Z)⁻¹ E_b*]`.
    fn trace_metric(&self, z: &[C64], scale: f64) -> Result<HermitianForm> {
        let zm = self.to_matrix(z);
        let p = CMatrix::identity(zm.rows())
            .sub(&zm.mul(&zm.adjoint())?)?
            .inverse()?;
        let q = CMatrix::identity(zm.cols())
            .sub(&zm.adjoint().mul(&zm)?)?
            .inverse()?;
        let dim = self.dimension();
        let basis: Vec<CMatrix> = (0..dim).map(|a| self.basis_matrix(a)).collect();
        let mut out = CMatrix::zeros(dim, dim);
        for (a, ea) in basis.iter().enumerate() {
            let x = p.mul(ea)?.mul(&q)?;
            for (b, eb) in basis.iter().enumerate() {
                let tr: C64 = x
                    .as_slice()
                    .iter()
                    .zip(eb.as_slice())
                    .map(|(xv, ev)| xv * ev.conj())
                    .sum();
                out[(b, a)] = tr * scale;
            }
        }
        Ok(HermitianForm::symmetrized(&out))
    }

    /// Bergman distance for disk, ball, polydisk and their products.
    ///
    /// The ball carries the `√((n+1)/2)` factor of its metric; products combine
    /// factor distances in `ℓ²`.
    pub fn bergman_distance(&self, z: &[C64], w: &[C64]) -> Result<f64> {
        self.require_interior(z)?;
        self.require_interior(w)?;
        let mut total = 0.0;
        for (f, off) in self.factors() {
            let (zf, wf) = (&z[off..off + f.dimension()], &w[off..off + f.dimension()]);
            let d = match f {
                DomainSpec::Disk => disk_distance(zf[0], wf[0]),
                DomainSpec::Ball(n) => ((*n as f64 + 1.0) / 2.0).sqrt() * zhu_unchecked(zf, wf),
                DomainSpec::Polydisk(_) => zf
                    .iter()
                    .zip(wf)
                    .map(|(&a, &b)| disk_distance(a, b).powi(2))
                    .sum::<f64>()
                    .sqrt(),
                other => {
                    return Err(LabError::unsupported(format!(
                        "Bergman distance is not available on {other}"
                    )))
                }
            };
            total += d * d;
        }
        Ok(total.sqrt())
    }

    /// Seeded interior points with defining radius at most `radius_cap`.
    pub fn sample_points(&self, count: usize, radius_cap: f64, seed: u64) -> Result<Vec<Point>> {
        self.validate()?;
        if count == 0 {
            return Err(LabError::validation("sample count must be at least 1"));
        }
        if !(radius_cap > 0.0 && radius_cap < 1.0) {
            return Err(LabError::validation(format!(
                "radius cap must lie in (0, 1), got {radius_cap}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample_one(&mut rng, radius_cap)).collect()
    }

    pub(crate) fn sample_one(&self, rng: &mut ChaCha8Rng, cap: f64) -> Result<Point> {
        match self {
            DomainSpec::Disk | DomainSpec::Ball(_) => {
                let n = self.dimension();
                let dir = gaussian_vector(rng, n);
                let r = cap * rng.random::<f64>().powf(1.0 / (2.0 * n as f64));
                let s = r / norm(&dir);
                Ok(dir.into_iter().map(|w| w * s).collect())
            }
            DomainSpec::Polydisk(n) => Ok((0..*n)
                .map(|_| DomainSpec::Disk.sample_one(rng, cap).map(|p| p[0]))
                .collect::<Result<_>>()?),
            DomainSpec::CartanI { .. } | DomainSpec::CartanII(_) | DomainSpec::CartanIII(_) => {
                let dim = self.dimension();
                let raw = gaussian_vector(rng, dim);
                let sigma = self.to_matrix(&raw).spectral_norm();
                let r = cap * rng.random::<f64>().powf(1.0 / (2.0 * dim as f64));
                let s = r / sigma;
                Ok(raw.into_iter().map(|w| w * s).collect())
            }
            DomainSpec::CartanIV(n) => {
                for _ in 0..REJECTION_BUDGET {
                    let p = DomainSpec::Ball(*n).sample_one(rng, 1.0 - 1e-15)?;
                    if self.contains_unchecked(&p).0 {
                        return Ok(p.into_iter().map(|w| w * cap).collect());
                    }
                }
                Err(LabError::Estimation(format!(
                    "rejection sampler on {self} exceeded {REJECTION_BUDGET} draws"
                )))
            }
            DomainSpec::Product(fs) => {
                let mut out = Vec::with_capacity(self.dimension());
                for f in fs {
                    out.extend(f.sample_one(rng, cap)?);
                }
                Ok(out)
            }
        }
    }
}

/// `(h, k)` for the `a`-th free variable of an `n × n` symmetric (`with_diag`)
/// or antisymmetric matrix, rows scanned first.
fn upper_index(n: usize, a: usize, with_diag: bool) -> (usize, usize) {
    let mut idx = a;
    for h in 0..n {
        let start = if with_diag { h } else { h + 1 };
        let len = n - start;
        if idx < len {
            return (h, start + idx);
        }
        idx -= len;
    }
    panic!("free-variable index {a} out of range for n = {n}");
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub(crate) fn norm_sqr(z: &[C64]) -> f64 {
    z.iter().map(|w| w.norm_sqr()).sum()
}

pub(crate) fn norm(z: &[C64]) -> f64 {
    norm_sqr(z).sqrt()
}

/// `⟨u, v⟩ = Σ u_k v̄_k`.
pub(crate) fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}

/// `(n+1)/2 · [(1−|z|²) I + z z*] / (1−|z|²)²`; reduces to the disk metric for `n = 1`.
fn ball_metric(z: &[C64]) -> HermitianForm {
    let n = z.len();
    let scale = (n as f64 + 1.0) / 2.0;
    let d = 1.0 - norm_sqr(z);
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let mut v = z[j] * z[k].conj();
            if j == k {
                v += d;
            }
            m[(j, k)] = v * (scale / (d * d));
        }
    }
    HermitianForm::symmetrized(&m)
}

/// `(A, s)` with `s = Σ z_j²` and `A = |s|² + 1 − 2‖z‖²`.
pub(crate) fn lie_ball_potential(z: &[C64]) -> (f64, C64) {
    let s: C64 = z.iter().map(|w| w * w).sum();
    (s.norm_sqr() + 1.0 - 2.0 * norm_sqr(z), s)
}

/// `(n/2)` times the conjugated Wirtinger Hessian of `−log A`, in closed form.
fn lie_ball_metric(z: &[C64]) -> HermitianForm {
    let n = z.len();
    let (a, s) = lie_ball_potential(z);
    let a_bar: Vec<C64> = z.iter().map(|w| s * w.conj() * 2.0 - w * 2.0).collect();
    let a_hol: Vec<C64> = z.iter().map(|w| s.conj() * w * 2.0 - w.conj() * 2.0).collect();
    let half_n = n as f64 / 2.0;
    let mut m = CMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let delta = if j == k { 2.0 } else { 0.0 };
            let v = (c(delta, 0.0) - z[j].conj() * z[k] * 4.0) / a + a_bar[j] * a_hol[k] / (a * a);
            m[(j, k)] = v * half_n;
        }
    }
    HermitianForm::symmetrized(&m)
}

/// The involutive ball automorphism `φ_a` exchanging `a` and `0`.
///
/// Evaluated as `[P_a(a−w) + s_a Q_a(a−w)] / (1 − ⟨w,a⟩)`, which keeps full
/// relative accuracy when `w` is close to `a`.
pub fn ball_involution(a: &[C64], w: &[C64]) -> Point {
    let diff: Vec<C64> = a.iter().zip(w).map(|(x, y)| x - y).collect();
    let a2 = norm_sqr(a);
    let den = c(1.0, 0.0) - inner(w, a);
    if a2 == 0.0 {
        return diff.into_iter().map(|d| d / den).collect();
    }
    let s = (1.0 - a2).sqrt();
    let coef = inner(&diff, a) / a2;
    diff.iter()
        .zip(a)
        .map(|(d, ak)| {
            let p = ak * coef;
            (p + (d - p) * s) / den
        })
        .collect()
}

fn disk_distance(z: C64, w: C64) -> f64 {
    let t = ((z - w) / (c(1.0, 0.0) - w.conj() * z)).norm();
    t.min(1.0).atanh()
}

fn zhu_unchecked(z: &[C64], w: &[C64]) -> f64 {
    norm(&ball_involution(z, w)).min(1.0).atanh()
}

/// `½ log((1+‖φ_z(w)‖)/(1−‖φ_z(w)‖))`, the unscaled ball distance.
pub fn zhu_distance_ball(z: &[C64], w: &[C64], n: usize) -> Result<f64> {
    let ball = DomainSpec::ball(n)?;
    ball.require_interior(z)?;
    ball.require_interior(w)?;
    Ok(zhu_unchecked(z, w))
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Disk => write!(f, "disk"),
            DomainSpec::Ball(n) => write!(f, "ball:{n}"),
            DomainSpec::Polydisk(n) => write!(f, "polydisk:{n}"),
            DomainSpec::CartanI { m, n } => write!(f, "cartan1:{m}x{n}"),
            DomainSpec::CartanII(n) => write!(f, "cartan2:{n}"),
            DomainSpec::CartanIII(n) => write!(f, "cartan3:{n}"),
            DomainSpec::CartanIV(n) => write!(f, "cartan4:{n}"),
            DomainSpec::Product(fs) => {
                write!(f, "product(")?;
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for DomainSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|ch| !ch.is_whitespace()).collect();
        let (spec, rest) = parse_spec(&compact, 0)?;
        if rest != compact.len() {
            return Err(LabError::Parse {
                position: rest,
                message: format!("unexpected trailing input in domain spec {s:?}"),
            });
        }
        Ok(spec)
    }
}

fn parse_spec(s: &str, pos: usize) -> Result<(DomainSpec, usize)> {
    let tail = &s[pos..];
    let perr = |position: usize, message: String| LabError::Parse { position, message };
    if let Some(inner) = tail.strip_prefix("product(") {
        let mut at = pos + "product(".len();
        let mut factors = Vec::new();
        if inner.starts_with(')') {
            return Err(perr(at, "empty product".into()));
        }
        loop {
            let (f, next) = parse_spec(s, at)?;
            factors.push(f);
            match s[next..].chars().next() {
                Some(',') => at = next + 1,
                Some(')') => return Ok((DomainSpec::product(factors)?, next + 1)),
                _ => return Err(perr(next, "expected ',' or ')' in product".into())),
            }
        }
    }
    let end = tail.find([',', ')']).map_or(s.len(), |i| pos + i);
    let token = &s[pos..end];
    let num = |t: &str| -> Result<usize> {
        t.parse::<usize>()
            .map_err(|_| perr(pos, format!("expected a positive integer in {token:?}")))
    };
    let spec = match token.split_once(':') {
        None if token == "disk" => DomainSpec::Disk,
        Some(("ball", n)) => DomainSpec::ball(num(n)?)?,
        Some(("polydisk", n)) => DomainSpec::polydisk(num(n)?)?,
        Some(("cartan1", mn)) => {
            let (m, n) = mn
                .split_once('x')
                .ok_or_else(|| perr(pos, format!("expected <m>x<n> in {token:?}")))?;
            DomainSpec::cartan_i(num(m)?, num(n)?)?
        }
        Some(("cartan2", n)) => DomainSpec::cartan_ii(num(n)?)?,
        Some(("cartan3", n)) => DomainSpec::cartan_iii(num(n)?)?,
        Some(("cartan4", n)) => DomainSpec::cartan_iv(num(n)?)?,
        _ => return Err(perr(pos, format!("unknown domain {token:?}"))),
    };
    Ok((spec, end))
}

impl TryFrom<String> for DomainSpec {
    type Error = LabError;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DomainSpec> for String {
    fn from(d: DomainSpec) -> String {
        d.to_string()
    }
}
