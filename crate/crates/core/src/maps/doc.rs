//! JSON description documents for maps.
//!
//! One object per map, tagged by `"kind"`. Complex numbers are
//! `{"re": .., "im": ..}`, unimodular constants are rotation numbers
//! (`"p/q"` or `{"irrational": x}`), indices and permutations are 1-based.
//! Disk points close to the boundary may be given as `{"gap": g, "angle": θ}`.
//!
//! ```json
//! {"kind": "compose",
//!  "outer": {"kind": "blaschke_product", "zeros": [{"re": 0.5, "im": 0}]},
//!  "inner": {"kind": "mobius_disk", "a": {"re": 0.1, "im": 0.2}, "rotation": "1/4"}}
//! ```

use serde::{Deserialize, Serialize};

use super::{DiskPoint, HoloMap, Target};
use crate::domains::{DomainSpec, Point};
use crate::error::{LabError, Result};
use crate::linalg::{c, CMatrix, C64};
use crate::rotation::RotationNumber;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexDoc> for C64 {
    fn from(d: ComplexDoc) -> C64 {
        c(d.re, d.im)
    }
}

impl From<C64> for ComplexDoc {
    fn from(z: C64) -> ComplexDoc {
        ComplexDoc { re: z.re, im: z.im }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DiskPointDoc {
    Value(ComplexDoc),
    Gap {
        gap: f64,
        #[serde(default)]
        angle: f64,
    },
}

impl DiskPointDoc {
    fn build(&self) -> Result<DiskPoint> {
        match self {
            DiskPointDoc::Value(z) => DiskPoint::new((*z).into()),
            DiskPointDoc::Gap { gap, angle } => DiskPoint::from_gap(*gap, *angle),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusDoc {
    pub a: DiskPointDoc,
    #[serde(default = "identity_rotation")]
    pub rotation: RotationNumber,
}

fn identity_rotation() -> RotationNumber {
    RotationNumber::ONE
}

fn plus() -> String {
    "+".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDoc {
    Identity,
    MobiusDisk {
        a: DiskPointDoc,
        #[serde(default = "identity_rotation")]
        rotation: RotationNumber,
    },
    BallAutomorphism {
        #[serde(default)]
        u: Option<Vec<Vec<ComplexDoc>>>,
        a: Vec<ComplexDoc>,
    },
    PolydiskAutomorphism {
        factors: Vec<MobiusDoc>,
        tau: Vec<usize>,
    },
    BlaschkeProduct {
        zeros: Vec<DiskPointDoc>,
        #[serde(default = "identity_rotation")]
        front: RotationNumber,
    },
    Projection {
        j: usize,
    },
    ModifiedProjection {
        r: usize,
        s: usize,
        #[serde(default = "plus")]
        sign: String,
    },
    DiagonalEmbedding,
    ExtremalLog {
        a: Vec<ComplexDoc>,
    },
    SplitProduct {
        u: Box<MapDoc>,
        phi: Box<MapDoc>,
    },
    Product {
        factors: Vec<MapDoc>,
    },
    Compose {
        outer: Box<MapDoc>,
        inner: Box<MapDoc>,
    },
    Constant {
        value: Vec<ComplexDoc>,
    },
    Expr {
        expr: String,
    },
    Stack {
        components: Vec<MapDoc>,
        #[serde(default)]
        codomain: Option<DomainSpec>,
    },
    Linear {
        matrix: Vec<Vec<ComplexDoc>>,
    },
}

fn points(v: &[ComplexDoc]) -> Point {
    v.iter().map(|&d| d.into()).collect()
}

fn matrix(rows: &[Vec<ComplexDoc>]) -> Result<CMatrix> {
    let rows: Vec<Vec<C64>> = rows.iter().map(|r| points(r)).collect();
    CMatrix::from_rows(&rows)
}

fn index(one_based: usize, what: &str) -> Result<usize> {
    one_based
        .checked_sub(1)
        .ok_or_else(|| LabError::validation(format!("{what} indices are 1-based, got 0")))
}

fn require_geometry(map: HoloMap, domain: &DomainSpec) -> Result<HoloMap> {
    if map.domain().same_geometry(domain) {
        Ok(map)
    } else {
        Err(LabError::validation(format!(
            "map is defined on {} but the domain is {domain}",
            map.domain()
        )))
    }
}

impl MapDoc {
    pub fn from_json(text: &str) -> Result<MapDoc> {
        serde_json::from_str(text).map_err(|e| LabError::Parse {
            position: e.column(),
            message: format!("map document: {e}"),
        })
    }

    /// Builds the map on `domain`.
    pub fn build(&self, domain: &DomainSpec) -> Result<HoloMap> {
        domain.validate()?;
        match self {
            MapDoc::Identity => HoloMap::identity(domain.clone()),
            MapDoc::MobiusDisk { a, rotation } => {
                require_geometry(HoloMap::mobius_disk(a.build()?, rotation.clone()), domain)
            }
            MapDoc::BallAutomorphism { u, a } => {
                let a = points(a);
                let u = match u {
                    Some(rows) => matrix(rows)?,
                    None => CMatrix::identity(a.len()),
                };
                require_geometry(HoloMap::ball_automorphism(u, a)?, domain)
            }
            MapDoc::PolydiskAutomorphism { factors, tau } => {
                let factors = factors
                    .iter()
                    .map(|f| Ok((f.a.build()?, f.rotation.clone())))
                    .collect::<Result<Vec<_>>>()?;
                let tau = tau.iter().map(|&t| index(t, "tau")).collect::<Result<Vec<_>>>()?;
                require_geometry(HoloMap::polydisk_automorphism(factors, tau)?, domain)
            }
            MapDoc::BlaschkeProduct { zeros, front } => {
                let zeros = zeros.iter().map(DiskPointDoc::build).collect::<Result<Vec<_>>>()?;
                require_geometry(HoloMap::blaschke(zeros, front.clone()), domain)
            }
            MapDoc::Projection { j } => HoloMap::projection(domain.clone(), index(*j, "projection")?),
            MapDoc::ModifiedProjection { r, s, sign } => {
                let plus = match sign.as_str() {
                    "+" => true,
                    "-" => false,
                    other => return Err(LabError::validation(format!("sign must be \"+\" or \"-\", got {other:?}"))),
                };
                HoloMap::modified_projection(domain.clone(), index(*r, "r")?, index(*s, "s")?, plus)
            }
            MapDoc::DiagonalEmbedding => {
                require_geometry(HoloMap::diagonal_embedding(domain.dimension())?, domain)
            }
            MapDoc::ExtremalLog { a } => require_geometry(HoloMap::extremal_log(points(a))?, domain),
            MapDoc::SplitProduct { u, phi } => {
                let factors: Vec<DomainSpec> = domain.factors().into_iter().map(|(f, _)| f.clone()).collect();
                let (last, first) = factors
                    .split_last()
                    .ok_or_else(|| LabError::validation("split product map needs a product domain"))?;
                if first.is_empty() || *last != DomainSpec::Disk {
                    return Err(LabError::validation(format!(
                        "split product map needs a domain D1 x disk, got {domain}"
                    )));
                }
                let d1 = if first.len() == 1 {
                    first[0].clone()
                } else {
                    DomainSpec::product(first.to_vec())?
                };
                HoloMap::split_product(u.build(&d1)?, phi.build(&DomainSpec::Disk)?)
            }
            MapDoc::Product { factors } => {
                let parts = if factors.len() == domain.factors().len() {
                    domain.factors().into_iter().map(|(f, _)| f.clone()).collect()
                } else {
                    domain.elementary_factors()
                };
                if parts.len() != factors.len() {
                    return Err(LabError::validation(format!(
                        "product map has {} blocks but {domain} has {} factors",
                        factors.len(),
                        parts.len()
                    )));
                }
                let blocks = factors
                    .iter()
                    .zip(&parts)
                    .map(|(doc, d)| doc.build(d))
                    .collect::<Result<Vec<_>>>()?;
                HoloMap::product(blocks)
            }
            MapDoc::Compose { outer, inner } => {
                let g = inner.build(domain)?;
                let mid = match g.target() {
                    Target::Domain(d) => d.clone(),
                    Target::Scalar => DomainSpec::Disk,
                    Target::Space(n) => {
                        return Err(LabError::validation(format!(
                            "inner map lands in C^{n}; declare a codomain to compose"
                        )))
                    }
                };
                HoloMap::compose(&outer.build(&mid)?, &g)
            }
            MapDoc::Constant { value } => HoloMap::constant(domain.clone(), points(value)),
            MapDoc::Expr { expr } => HoloMap::expression(domain.clone(), expr),
            MapDoc::Stack { components, codomain } => {
                let comps = components
                    .iter()
                    .map(|doc| doc.build(domain))
                    .collect::<Result<Vec<_>>>()?;
                HoloMap::stack(comps, codomain.clone())
            }
            MapDoc::Linear { matrix: rows } => HoloMap::linear(domain.clone(), matrix(rows)?),
        }
    }
}
