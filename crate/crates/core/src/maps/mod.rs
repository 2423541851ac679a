//! Holomorphic maps with analytic Jacobians.
//!
//! Every built-in kind evaluates in closed form and differentiates in closed
//! form; expression maps differentiate symbolically. Finite differences appear
//! only in tests.

pub mod disk;
pub mod doc;

use crate::domains::{ball_involution, inner, norm, norm_sqr, DomainSpec, Point};
use crate::error::{LabError, Result};
use crate::expr::Expr;
use crate::linalg::{c, CMatrix, C64};
use crate::rotation::RotationNumber;

pub use disk::{mobius, thinness_products, Blaschke, DiskPoint};
pub use doc::MapDoc;

/// Tolerance for unitarity and fixed-point checks in constructors.
const STRUCTURE_TOL: f64 = 1e-10;
/// Relative distance to a pole below which evaluation reports a singularity.
const POLE_TOL: f64 = 1e-14;

/// Where a map takes its values.
#[derive(Clone, Debug, PartialEq)]
pub enum Target {
    Scalar,
    Domain(DomainSpec),
    Space(usize),
}

impl Target {
    pub fn dimension(&self) -> usize {
        match self {
            Target::Scalar => 1,
            Target::Domain(d) => d.dimension(),
            Target::Space(n) => *n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapKind {
    Identity,
    /// `z ↦ e^{iθ}(a − z)/(1 − āz)`.
    MobiusDisk { a: DiskPoint, rotation: RotationNumber },
    /// `z ↦ U φ_a(z)`.
    BallAutomorphism { u: CMatrix, a: Point },
    /// `z ↦ (T_1(z_{τ(1)}), …, T_n(z_{τ(n)}))` with Möbius `T_i`; `tau` is 0-based.
    PolydiskAutomorphism {
        factors: Vec<(DiskPoint, RotationNumber)>,
        tau: Vec<usize>,
    },
    Blaschke(Blaschke),
    /// `z ↦ z_j` (0-based).
    Projection { j: usize },
    /// `z ↦ z_r + sign·i·z_s` (0-based, sign ±1).
    ModifiedProjection { r: usize, s: usize, sign: f64 },
    /// `z ↦ (z_1, …, z_1)`.
    DiagonalEmbedding,
    /// `z ↦ ½ log((‖a‖ + ⟨z,a⟩)/(‖a‖ − ⟨z,a⟩))`.
    ExtremalLog { a: Point },
    /// `(z, ζ) ↦ (U(z), φ(ζ))` with `U(0) = 0`, `φ(0) = 0`.
    SplitProduct { u: Box<HoloMap>, phi: Box<HoloMap> },
    /// Blockwise action on a product domain.
    Product(Vec<HoloMap>),
    /// Scalar components of a vector-valued map on a common domain.
    Stack(Vec<HoloMap>),
    /// `outer ∘ inner`.
    Compose { outer: Box<HoloMap>, inner: Box<HoloMap> },
    Constant(Point),
    Linear(CMatrix),
    Expr { expr: Expr, gradient: Vec<Expr> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HoloMap {
    domain: DomainSpec,
    target: Target,
    kind: MapKind,
}

fn zero() -> C64 {
    c(0.0, 0.0)
}

impl HoloMap {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn in_dim(&self) -> usize {
        self.domain.dimension()
    }

    pub fn out_dim(&self) -> usize {
        self.target.dimension()
    }

    pub fn is_scalar(&self) -> bool {
        self.out_dim() == 1
    }

    /// True when the map is declared to send its domain into itself.
    pub fn is_self_map(&self) -> bool {
        matches!(&self.target, Target::Domain(d) if d.same_geometry(&self.domain))
    }

    pub fn identity(domain: DomainSpec) -> Result<Self> {
        domain.validate()?;
        Ok(HoloMap {
            target: Target::Domain(domain.clone()),
            domain,
            kind: MapKind::Identity,
        })
    }

    pub fn mobius_disk(a: DiskPoint, rotation: RotationNumber) -> Self {
        HoloMap {
            domain: DomainSpec::Disk,
            target: Target::Domain(DomainSpec::Disk),
            kind: MapKind::MobiusDisk { a, rotation },
        }
    }

    /// Rotation `z ↦ λ z` of the disk, written as `MobiusDisk(0, λ·(−1))`.
    pub fn disk_rotation(lambda: &RotationNumber) -> Self {
        let half = RotationNumber::rational(1, 2).expect("valid");
        HoloMap::mobius_disk(DiskPoint::ORIGIN, lambda.compose(&half))
    }

    pub fn ball_automorphism(u: CMatrix, a: Point) -> Result<Self> {
        let n = a.len();
        if n == 0 || u.rows() != n || u.cols() != n {
            return Err(LabError::validation(format!(
                "ball automorphism needs an {n}x{n} unitary, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let dev = u.adjoint().mul(&u)?.max_abs_diff(&CMatrix::identity(n));
        if dev > STRUCTURE_TOL {
            return Err(LabError::validation(format!("U is not unitary (|U*U - I| = {dev:e})")));
        }
        let ball = DomainSpec::ball(n)?;
        ball.require_interior(&a)?;
        Ok(HoloMap {
            target: Target::Domain(ball.clone()),
            domain: ball,
            kind: MapKind::BallAutomorphism { u, a },
        })
    }

    /// `tau` is 0-based: output `i` reads input `tau[i]`.
    pub fn polydisk_automorphism(factors: Vec<(DiskPoint, RotationNumber)>, tau: Vec<usize>) -> Result<Self> {
        let n = factors.len();
        check_permutation(&tau, n)?;
        let poly = DomainSpec::polydisk(n)?;
        Ok(HoloMap {
            target: Target::Domain(poly.clone()),
            domain: poly,
            kind: MapKind::PolydiskAutomorphism { factors, tau },
        })
    }

    pub fn blaschke(zeros: Vec<DiskPoint>, front: RotationNumber) -> Self {
        HoloMap {
            domain: DomainSpec::Disk,
            target: Target::Domain(DomainSpec::Disk),
            kind: MapKind::Blaschke(Blaschke::new(zeros, front)),
        }
    }

    pub fn projection(domain: DomainSpec, j: usize) -> Result<Self> {
        domain.validate()?;
        if j >= domain.dimension() {
            return Err(LabError::validation(format!(
                "projection index {} out of range for {domain}",
                j + 1
            )));
        }
        Ok(HoloMap {
            domain,
            target: Target::Scalar,
            kind: MapKind::Projection { j },
        })
    }

    pub fn modified_projection(domain: DomainSpec, r: usize, s: usize, plus: bool) -> Result<Self> {
        domain.validate()?;
        let n = domain.dimension();
        if r >= n || s >= n || r == s {
            return Err(LabError::validation(format!(
                "modified projection needs distinct indices within 1..={n}, got {} and {}",
                r + 1,
                s + 1
            )));
        }
        Ok(HoloMap {
            domain,
            target: Target::Scalar,
            kind: MapKind::ModifiedProjection {
                r,
                s,
                sign: if plus { 1.0 } else { -1.0 },
            },
        })
    }

    pub fn diagonal_embedding(n: usize) -> Result<Self> {
        let poly = DomainSpec::polydisk(n)?;
        Ok(HoloMap {
            target: Target::Domain(poly.clone()),
            domain: poly,
            kind: MapKind::DiagonalEmbedding,
        })
    }

    pub fn extremal_log(a: Point) -> Result<Self> {
        let ball = DomainSpec::ball(a.len().max(1))?;
        ball.require_interior(&a)?;
        if norm(&a) == 0.0 {
            return Err(LabError::validation("extremal log map needs a != 0"));
        }
        Ok(HoloMap {
            domain: ball,
            target: Target::Scalar,
            kind: MapKind::ExtremalLog { a },
        })
    }

    /// `(z, ζ) ↦ (U(z), φ(ζ))` on `D₁ × 𝔻`; requires `U` an automorphism and both maps fixing 0.
    pub fn split_product(u: HoloMap, phi: HoloMap) -> Result<Self> {
        if !u.is_automorphism() || !u.is_self_map() {
            return Err(LabError::validation("split product map needs U to be an automorphism of D1"));
        }
        if !phi.is_self_map() || !phi.domain.same_geometry(&DomainSpec::Disk) {
            return Err(LabError::validation("split product map needs phi to be a disk self-map"));
        }
        for (name, m) in [("U", &u), ("phi", &phi)] {
            let image = m.eval_raw(&m.domain.origin())?;
            let dev = norm(&image);
            if dev > STRUCTURE_TOL {
                return Err(LabError::validation(format!("{name}(0) must be 0, got |{name}(0)| = {dev:e}")));
            }
        }
        let domain = DomainSpec::product(vec![u.domain.clone(), DomainSpec::Disk])?;
        Ok(HoloMap {
            target: Target::Domain(domain.clone()),
            domain,
            kind: MapKind::SplitProduct {
                u: Box::new(u),
                phi: Box::new(phi),
            },
        })
    }

    pub fn product(blocks: Vec<HoloMap>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(LabError::validation("product map needs at least one block"));
        }
        let domain = DomainSpec::product(blocks.iter().map(|b| b.domain.clone()).collect())?;
        let target = if blocks.iter().all(|b| matches!(b.target, Target::Domain(_))) {
            let parts = blocks
                .iter()
                .map(|b| match &b.target {
                    Target::Domain(d) => d.clone(),
                    _ => unreachable!(),
                })
                .collect();
            Target::Domain(DomainSpec::product(parts)?)
        } else {
            Target::Space(blocks.iter().map(HoloMap::out_dim).sum())
        };
        Ok(HoloMap {
            domain,
            target,
            kind: MapKind::Product(blocks),
        })
    }

    /// Vector map from scalar components; `target` defaults to the domain when dimensions agree.
    pub fn stack(components: Vec<HoloMap>, target: Option<DomainSpec>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| LabError::validation("stack needs at least one component"))?;
        let domain = first.domain.clone();
        for comp in &components {
            if comp.out_dim() != 1 {
                return Err(LabError::validation("stack components must be scalar"));
            }
            if !comp.domain.same_geometry(&domain) {
                return Err(LabError::validation(format!(
                    "stack component on {} does not match {domain}",
                    comp.domain
                )));
            }
        }
        let k = components.len();
        let target = match target {
            Some(t) => {
                LabError::check_len(t.dimension(), k)?;
                Target::Domain(t)
            }
            None if k == domain.dimension() => Target::Domain(domain.clone()),
            None => Target::Space(k),
        };
        Ok(HoloMap {
            domain,
            target,
            kind: MapKind::Stack(components),
        })
    }

    /// `f ∘ g`, simplified to an exact closed form where one exists.
    pub fn compose(f: &HoloMap, g: &HoloMap) -> Result<Self> {
        if f.in_dim() != g.out_dim() {
            return Err(LabError::DimensionMismatch {
                expected: f.in_dim(),
                got: g.out_dim(),
            });
        }
        if let Target::Domain(gt) = &g.target {
            if !gt.same_geometry(&f.domain) {
                return Err(LabError::validation(format!(
                    "cannot compose: inner map lands in {gt}, outer map is defined on {}",
                    f.domain
                )));
            }
        }
        if matches!(g.kind, MapKind::Identity) {
            return Ok(HoloMap {
                domain: g.domain.clone(),
                ..f.clone()
            });
        }
        if matches!(f.kind, MapKind::Identity) && f.is_self_map() {
            return Ok(g.clone());
        }
        match (&f.kind, &g.kind) {
            (MapKind::Blaschke(b), MapKind::MobiusDisk { a, rotation }) => {
                return Ok(HoloMap {
                    domain: g.domain.clone(),
                    target: f.target.clone(),
                    kind: MapKind::Blaschke(b.compose_mobius(a, rotation)),
                });
            }
            _ => {}
        }
        if let (Some(fb), Some(gb)) = (f.blocks(), g.blocks()) {
            let aligned = fb.len() == gb.len()
                && fb
                    .iter()
                    .zip(&gb)
                    .all(|(x, y)| matches!(&y.target, Target::Domain(t) if t.same_geometry(&x.domain)));
            if aligned {
                let parts = fb
                    .iter()
                    .zip(&gb)
                    .map(|(x, y)| HoloMap::compose(x, y))
                    .collect::<Result<Vec<_>>>()?;
                return HoloMap::product(parts);
            }
        }
        Ok(HoloMap {
            domain: g.domain.clone(),
            target: f.target.clone(),
            kind: MapKind::Compose {
                outer: Box::new(f.clone()),
                inner: Box::new(g.clone()),
            },
        })
    }

    pub fn constant(domain: DomainSpec, value: Point) -> Result<Self> {
        domain.validate()?;
        if value.is_empty() {
            return Err(LabError::validation("constant map needs a value"));
        }
        let target = if value.len() == domain.dimension() && domain.contains(&value)?.0 {
            Target::Domain(domain.clone())
        } else if value.len() == 1 {
            Target::Scalar
        } else {
            Target::Space(value.len())
        };
        Ok(HoloMap {
            domain,
            target,
            kind: MapKind::Constant(value),
        })
    }

    /// `z ↦ A z`, declared as a self-map when `A` is square.
    pub fn linear(domain: DomainSpec, a: CMatrix) -> Result<Self> {
        domain.validate()?;
        LabError::check_len(domain.dimension(), a.cols())?;
        let target = if a.rows() == a.cols() {
            Target::Domain(domain.clone())
        } else {
            Target::Space(a.rows())
        };
        Ok(HoloMap {
            domain,
            target,
            kind: MapKind::Linear(a),
        })
    }

    /// Scalar map from an expression in `z1 … z_dim`.
    pub fn expression(domain: DomainSpec, text: &str) -> Result<Self> {
        domain.validate()?;
        let expr = Expr::parse(text, domain.dimension())?;
        Ok(HoloMap::from_expr(domain, expr))
    }

    pub fn from_expr(domain: DomainSpec, expr: Expr) -> Self {
        let gradient = expr.gradient(domain.dimension());
        HoloMap {
            domain,
            target: Target::Scalar,
            kind: MapKind::Expr { expr, gradient },
        }
    }

    /// Redeclares the target, e.g. to mark an expression stack as a self-map.
    pub fn with_target(mut self, target: DomainSpec) -> Result<Self> {
        LabError::check_len(self.out_dim(), target.dimension())?;
        self.target = Target::Domain(target);
        Ok(self)
    }

    fn blocks(&self) -> Option<Vec<&HoloMap>> {
        match &self.kind {
            MapKind::Product(bs) => Some(bs.iter().collect()),
            MapKind::SplitProduct { u, phi } => Some(vec![u, phi]),
            _ => None,
        }
    }

    /// True for kinds that are automorphisms by construction.
    pub fn is_automorphism(&self) -> bool {
        match &self.kind {
            MapKind::Identity => self.is_self_map(),
            MapKind::MobiusDisk { .. }
            | MapKind::BallAutomorphism { .. }
            | MapKind::PolydiskAutomorphism { .. } => true,
            MapKind::Blaschke(b) => b.degree() == 1,
            MapKind::Product(bs) => bs.iter().all(HoloMap::is_automorphism),
            MapKind::SplitProduct { u, phi } => u.is_automorphism() && phi.is_automorphism(),
            MapKind::Compose { outer, inner } => outer.is_automorphism() && inner.is_automorphism(),
            _ => false,
        }
    }

    /// Inverse of an automorphism kind.
    pub fn inverse(&self) -> Result<HoloMap> {
        match &self.kind {
            MapKind::Identity => Ok(self.clone()),
            MapKind::MobiusDisk { a, rotation } => Ok(HoloMap::mobius_disk(
                a.rotate(rotation.angle()),
                rotation.inverse(),
            )),
            MapKind::BallAutomorphism { u, a } => {
                let ua = u.mul_vec(a)?;
                HoloMap::ball_automorphism(u.adjoint(), ua)
            }
            MapKind::PolydiskAutomorphism { factors, tau } => {
                let n = tau.len();
                let mut inv_tau = vec![0; n];
                for (i, &t) in tau.iter().enumerate() {
                    inv_tau[t] = i;
                }
                let inv_factors = (0..n)
                    .map(|j| {
                        let (a, rot) = &factors[inv_tau[j]];
                        (a.rotate(rot.angle()), rot.inverse())
                    })
                    .collect();
                HoloMap::polydisk_automorphism(inv_factors, inv_tau)
            }
            MapKind::Blaschke(b) if b.degree() == 1 => {
                // λ u M_a(z) = e^{iθ} M_a(z) with e^{iθ} = λu.
                let a = b.zeros()[0];
                let lam = b.front().to_complex() * a.blaschke_unit();
                HoloMap::mobius_disk(a, RotationNumber::from_phase(lam)).inverse()
            }
            MapKind::Product(bs) => HoloMap::product(bs.iter().map(HoloMap::inverse).collect::<Result<_>>()?),
            MapKind::SplitProduct { u, phi } => HoloMap::product(vec![u.inverse()?, phi.inverse()?]),
            MapKind::Compose { outer, inner } => HoloMap::compose(&inner.inverse()?, &outer.inverse()?),
            _ => Err(LabError::validation("inverse is only available for automorphism kinds")),
        }
    }

    /// Image of an interior point.
    pub fn evaluate(&self, z: &[C64]) -> Result<Point> {
        self.domain.require_interior(z)?;
        self.eval_raw(z)
    }

    /// Analytic Jacobian (`out_dim × in_dim`) at an interior point.
    pub fn jacobian(&self, z: &[C64]) -> Result<CMatrix> {
        self.domain.require_interior(z)?;
        self.jac_raw(z)
    }

    /// Scalar value; errors for vector-valued maps.
    pub fn evaluate_scalar(&self, z: &[C64]) -> Result<C64> {
        self.require_scalar()?;
        Ok(self.evaluate(z)?[0])
    }

    /// Gradient `(∂f/∂z_1, …, ∂f/∂z_n)` of a scalar map.
    pub fn gradient(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.require_scalar()?;
        Ok(self.jacobian(z)?.row(0).to_vec())
    }

    fn require_scalar(&self) -> Result<()> {
        if self.out_dim() != 1 {
            return Err(LabError::validation(format!(
                "expected a scalar map, got one with {} components",
                self.out_dim()
            )));
        }
        Ok(())
    }

    /// Non-fatal evaluation notes at `z` (branch-cut contact of expression maps).
    pub fn diagnostics(&self, z: &[C64]) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_diagnostics(z, &mut out);
        out
    }

    fn collect_diagnostics(&self, z: &[C64], out: &mut Vec<String>) {
        match &self.kind {
            MapKind::Expr { expr, .. } => {
                let _ = expr.eval_with_warnings(z, out);
            }
            MapKind::Stack(cs) => cs.iter().for_each(|m| m.collect_diagnostics(z, out)),
            MapKind::Compose { outer, inner } => {
                inner.collect_diagnostics(z, out);
                if let Ok(w) = inner.eval_raw(z) {
                    outer.collect_diagnostics(&w, out);
                }
            }
            _ => {
                if let Some(bs) = self.blocks() {
                    for (b, off) in bs.into_iter().zip(self.block_offsets()) {
                        b.collect_diagnostics(&z[off..off + b.in_dim()], out);
                    }
                }
            }
        }
    }

    fn block_offsets(&self) -> Vec<usize> {
        let mut off = 0;
        self.blocks()
            .unwrap_or_default()
            .iter()
            .map(|b| {
                let here = off;
                off += b.in_dim();
                here
            })
            .collect()
    }

    pub(crate) fn eval_raw(&self, z: &[C64]) -> Result<Point> {
        LabError::check_len(self.in_dim(), z.len())?;
        Ok(match &self.kind {
            MapKind::Identity => z.to_vec(),
            MapKind::MobiusDisk { a, rotation } => {
                vec![rotation.to_complex() * mobius(a, &DiskPoint::new(z[0])?).value()]
            }
            MapKind::BallAutomorphism { u, a } => u.mul_vec(&ball_involution(a, z))?,
            MapKind::PolydiskAutomorphism { factors, tau } => factors
                .iter()
                .zip(tau)
                .map(|((a, rot), &t)| Ok(rot.to_complex() * mobius(a, &DiskPoint::new(z[t])?).value()))
                .collect::<Result<_>>()?,
            MapKind::Blaschke(b) => vec![b.eval(z[0])?],
            MapKind::Projection { j } => vec![z[*j]],
            MapKind::ModifiedProjection { r, s, sign } => vec![z[*r] + c(0.0, *sign) * z[*s]],
            MapKind::DiagonalEmbedding => vec![z[0]; z.len()],
            MapKind::ExtremalLog { a } => vec![extremal_log_value(a, z)?],
            MapKind::SplitProduct { .. } | MapKind::Product(_) => {
                let mut out = Vec::with_capacity(self.out_dim());
                for (b, off) in self.blocks().expect("block kind").into_iter().zip(self.block_offsets()) {
                    out.extend(b.eval_raw(&z[off..off + b.in_dim()])?);
                }
                out
            }
            MapKind::Stack(cs) => cs
                .iter()
                .map(|m| m.eval_raw(z).map(|v| v[0]))
                .collect::<Result<_>>()?,
            MapKind::Compose { outer, inner } => {
                let w = inner.eval_raw(z)?;
                outer.domain.require_interior(&w)?;
                outer.eval_raw(&w)?
            }
            MapKind::Constant(v) => v.clone(),
            MapKind::Linear(a) => a.mul_vec(z)?,
            MapKind::Expr { expr, .. } => vec![expr.eval(z)?],
        })
    }

    pub(crate) fn jac_raw(&self, z: &[C64]) -> Result<CMatrix> {
        let n = self.in_dim();
        LabError::check_len(n, z.len())?;
        let mut j = CMatrix::zeros(self.out_dim(), n);
        match &self.kind {
            MapKind::Identity => j = CMatrix::identity(n),
            MapKind::MobiusDisk { a, rotation } => {
                j[(0, 0)] = rotation.to_complex() * mobius_derivative(a, z[0])?;
            }
            MapKind::BallAutomorphism { u, a } => {
                j = u.mul(&ball_involution_jacobian(a, z))?;
            }
            MapKind::PolydiskAutomorphism { factors, tau } => {
                for (i, ((a, rot), &t)) in factors.iter().zip(tau).enumerate() {
                    j[(i, t)] = rot.to_complex() * mobius_derivative(a, z[t])?;
                }
            }
            MapKind::Blaschke(b) => j[(0, 0)] = b.derivative(z[0])?,
            MapKind::Projection { j: k } => j[(0, *k)] = c(1.0, 0.0),
            MapKind::ModifiedProjection { r, s, sign } => {
                j[(0, *r)] = c(1.0, 0.0);
                j[(0, *s)] = c(0.0, *sign);
            }
            MapKind::DiagonalEmbedding => {
                for k in 0..n {
                    j[(k, 0)] = c(1.0, 0.0);
                }
            }
            MapKind::ExtremalLog { a } => {
                extremal_log_value(a, z)?;
                let na = norm(a);
                let t = inner(z, a);
                let scale = c(na, 0.0) / (c(na * na, 0.0) - t * t);
                for k in 0..n {
                    j[(0, k)] = scale * a[k].conj();
                }
            }
            MapKind::SplitProduct { .. } | MapKind::Product(_) => {
                let (mut row, blocks) = (0, self.blocks().expect("block kind"));
                for (b, off) in blocks.into_iter().zip(self.block_offsets()) {
                    let jb = b.jac_raw(&z[off..off + b.in_dim()])?;
                    for r in 0..jb.rows() {
                        for col in 0..jb.cols() {
                            j[(row + r, off + col)] = jb[(r, col)];
                        }
                    }
                    row += jb.rows();
                }
            }
            MapKind::Stack(cs) => {
                for (r, m) in cs.iter().enumerate() {
                    let jr = m.jac_raw(z)?;
                    for col in 0..n {
                        j[(r, col)] = jr[(0, col)];
                    }
                }
            }
            MapKind::Compose { outer, inner } => {
                let w = inner.eval_raw(z)?;
                outer.domain.require_interior(&w)?;
                j = outer.jac_raw(&w)?.mul(&inner.jac_raw(z)?)?;
            }
            MapKind::Constant(_) => {}
            MapKind::Linear(a) => j = a.clone(),
            MapKind::Expr { gradient, .. } => {
                for (k, g) in gradient.iter().enumerate() {
                    j[(0, k)] = g.eval(z)?;
                }
            }
        }
        Ok(j)
    }
}

fn check_permutation(tau: &[usize], n: usize) -> Result<()> {
    LabError::check_len(n, tau.len())?;
    let mut seen = vec![false; n];
    for &t in tau {
        if t >= n || seen[t] {
            return Err(LabError::validation(format!("{tau:?} is not a permutation of 0..{n}")));
        }
        seen[t] = true;
    }
    Ok(())
}

/// `d/dz (a − z)/(1 − āz) = −(1 − |a|²)/(1 − āz)²`.
fn mobius_derivative(a: &DiskPoint, z: C64) -> Result<C64> {
    let den = disk::one_minus_conj_mul(a, &DiskPoint::new(z)?);
    Ok(-a.one_minus_mod_sq() / (den * den))
}

/// Jacobian of `φ_a`: `(L + φ_a(z) a*) / (1 − ⟨z,a⟩)` with `L = −(P_a + s_a Q_a)`.
fn ball_involution_jacobian(a: &[C64], z: &[C64]) -> CMatrix {
    let n = a.len();
    let a2 = norm_sqr(a);
    let s = (1.0 - a2).sqrt();
    let phi = ball_involution(a, z);
    let d = c(1.0, 0.0) - inner(z, a);
    let mut j = CMatrix::zeros(n, n);
    for r in 0..n {
        for col in 0..n {
            let p = if a2 > 0.0 { a[r] * a[col].conj() / a2 } else { zero() };
            let id = if r == col { c(1.0, 0.0) } else { zero() };
            let l = -(p + (id - p) * s);
            j[(r, col)] = (l + phi[r] * a[col].conj()) / d;
        }
    }
    j
}

fn extremal_log_value(a: &[C64], z: &[C64]) -> Result<C64> {
    let na = norm(a);
    let x = inner(z, a) / na;
    if (c(1.0, 0.0) - x).norm() < POLE_TOL || (c(1.0, 0.0) + x).norm() < POLE_TOL {
        return Err(LabError::singular(format!(
            "extremal log map at <z,a> = {} (= ±‖a‖)",
            x * na
        )));
    }
    Ok(x.atanh())
}

/// The involutive automorphism exchanging `a` and `0` on a disk, ball or polydisk (or product).
pub fn involution_at(spec: &DomainSpec, a: &[C64]) -> Result<HoloMap> {
    spec.require_interior(a)?;
    let mut blocks = Vec::new();
    for (f, off) in spec.factors() {
        let af = &a[off..off + f.dimension()];
        let m = match f {
            DomainSpec::Disk => HoloMap::mobius_disk(DiskPoint::new(af[0])?, RotationNumber::ONE),
            DomainSpec::Ball(n) => HoloMap::ball_automorphism(CMatrix::identity(*n), af.to_vec())?,
            DomainSpec::Polydisk(_) => HoloMap::polydisk_automorphism(
                af.iter()
                    .map(|&w| Ok((DiskPoint::new(w)?, RotationNumber::ONE)))
                    .collect::<Result<_>>()?,
                (0..af.len()).collect(),
            )?,
            other => {
                return Err(LabError::unsupported(format!(
                    "no explicit involution is implemented for {other}"
                )))
            }
        };
        blocks.push(m);
    }
    if spec.is_product() {
        HoloMap::product(blocks)
    } else {
        Ok(blocks.pop().expect("one factor"))
    }
}
