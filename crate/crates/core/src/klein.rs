//! Classification reports for twisted forms of `μ_n ⊂ SL₂` over `O_K`.
//!
//! For `n ≥ 3` the forms are controlled by the narrow class group: the
//! form is unique exactly when `Cl¹_K` is trivial, there are at least
//! `h_K` of them, and the data does not depend on `n`. For `n = 2` there is
//! only the standard form. Reports never claim an exact count.

use serde::Serialize;

use crate::classfield::{self, UnramifiedQuadExt};
use crate::density::{self, SplitKind};
use crate::embed::Mat2;
use crate::error::{Error, Result};
use crate::ideal::FracIdeal;
use crate::invar::{RdpFamily, RdpType};
use crate::qfield::{FieldElement, QuadraticField};

/// `β(n) = ⌊n/2⌋`.
pub fn beta(n: usize) -> usize {
    assert!(n >= 2, "beta needs n ≥ 2");
    n / 2
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Standard,
    FromMatrix(Mat2),
    /// `δ` of the twisting extension `K(√δ)`.
    FromExtension(FieldElement),
}

/// Classifying data of one twisted form: the étale class `η` (an
/// unramified quadratic extension, or `None`) and a Zariski ideal class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistDescriptor {
    pub eta: Option<UnramifiedQuadExt>,
    pub zariski_class: FracIdeal,
    pub provenance: Provenance,
}

impl TwistDescriptor {
    pub fn standard(k: &QuadraticField) -> Self {
        TwistDescriptor {
            eta: None,
            zariski_class: FracIdeal::unit(k),
            provenance: Provenance::Standard,
        }
    }

    pub fn is_standard(&self) -> Result<bool> {
        Ok(self.eta.is_none() && crate::ideal::is_principal(&self.zariski_class)?.is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaClass {
    /// `None` for the trivial class.
    pub delta: Option<String>,
    pub factors: Option<[i64; 2]>,
    /// Class number of `L`; degree-4 class groups are out of scope.
    pub h_l: Option<u64>,
    pub h_l_note: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KleinReport {
    pub n: usize,
    pub d: i64,
    pub singleton: bool,
    pub lower_bound: u64,
    pub h: u64,
    pub h1: u64,
    pub eta_classes: Vec<EtaClass>,
    pub zariski_fiber_order: u64,
    pub zariski_classes: Vec<String>,
    pub independent_of_n: bool,
    pub finite: bool,
    pub exact_count: Option<u64>,
}

impl KleinReport {
    /// Equal up to the `n` label.
    pub fn same_data(&self, other: &KleinReport) -> bool {
        let mut o = other.clone();
        o.n = self.n;
        *self == o
    }
}

fn trivial_eta() -> EtaClass {
    EtaClass {
        delta: None,
        factors: None,
        h_l: None,
        h_l_note: "trivial class: L = K × K",
    }
}

pub fn klein_report(k: &QuadraticField, n: usize) -> Result<KleinReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("n = {n} must be at least 2")));
    }
    let data = classfield::ray_class_data(k)?;
    let d = if k.is_rational() { 1 } else { k.d() };
    if n == 2 {
        return Ok(KleinReport {
            n,
            d,
            singleton: true,
            lower_bound: 1,
            h: data.h,
            h1: data.h1,
            eta_classes: vec![trivial_eta()],
            zariski_fiber_order: 1,
            zariski_classes: vec![FracIdeal::unit(k).to_string()],
            independent_of_n: false,
            finite: true,
            exact_count: Some(1),
        });
    }
    let mut eta_classes = vec![trivial_eta()];
    for e in classfield::unramified_quadratic_extensions(k)? {
        eta_classes.push(EtaClass {
            delta: Some(e.delta.to_string()),
            factors: Some([e.disc_factor_pair.0, e.disc_factor_pair.1]),
            h_l: None,
            h_l_note: "unavailable: L is biquadratic over Q",
        });
    }
    let zariski_classes = classfield::class_representatives(k)?
        .iter()
        .map(|r| r.to_string())
        .collect();
    let singleton = data.h1 == 1;
    Ok(KleinReport {
        n,
        d,
        singleton,
        lower_bound: data.h,
        h: data.h,
        h1: data.h1,
        eta_classes,
        zariski_fiber_order: data.h,
        zariski_classes,
        independent_of_n: true,
        finite: true,
        exact_count: singleton.then_some(1),
    })
}

/// Which primes a rule selects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FiberRule {
    AllPrimes,
    NoPrimes,
    InertIn(UnramifiedQuadExt),
    SplitIn(UnramifiedQuadExt),
}

impl FiberRule {
    /// Whether the prime `p` of `O_K` satisfies the rule.
    pub fn contains(&self, p: &FracIdeal) -> Result<bool> {
        Ok(match self {
            FiberRule::AllPrimes => true,
            FiberRule::NoPrimes => false,
            FiberRule::InertIn(e) => density::split_kind(e, p)? == SplitKind::Inert,
            FiberRule::SplitIn(e) => density::split_kind(e, p)? == SplitKind::Split,
        })
    }

    pub fn describe(&self) -> String {
        match self {
            FiberRule::AllPrimes => "all primes".into(),
            FiberRule::NoPrimes => "no primes".into(),
            FiberRule::InertIn(e) => format!("primes inert in K(sqrt({}))", e.delta),
            FiberRule::SplitIn(e) => format!("primes split in K(sqrt({}))", e.delta),
        }
    }
}

/// `Σ_A` (fibers of type `A_{n−1}`) and `Σ_B` (type `B_{β(n)}`).
#[derive(Debug, Clone)]
pub struct FiberPartition {
    pub sigma_a: FiberRule,
    pub sigma_b: FiberRule,
    /// Predicted densities of `Σ_A` and `Σ_B`.
    pub densities: (f64, f64),
}

pub fn fiber_partition(_k: &QuadraticField, twist: &TwistDescriptor, n: usize) -> FiberPartition {
    let _ = n;
    match &twist.eta {
        None => FiberPartition {
            sigma_a: FiberRule::AllPrimes,
            sigma_b: FiberRule::NoPrimes,
            densities: (1.0, 0.0),
        },
        Some(e) => FiberPartition {
            sigma_a: FiberRule::InertIn(e.clone()),
            sigma_b: FiberRule::SplitIn(e.clone()),
            densities: (0.5, 0.5),
        },
    }
}

/// Fiber type of a twist at a finite prime, or at the generic point when `prime` is `None`.
pub fn twist_fiber_type(twist: &TwistDescriptor, prime: Option<&FracIdeal>, n: usize) -> Result<RdpType> {
    let Some(e) = &twist.eta else {
        return Ok(RdpType::new(RdpFamily::A, n - 1, base_name(prime)));
    };
    let Some(p) = prime else {
        return Ok(RdpType::new(RdpFamily::B, beta(n), base_name(None)));
    };
    match density::split_kind(e, p)? {
        SplitKind::Inert => Ok(RdpType::new(RdpFamily::A, n - 1, base_name(prime))),
        SplitKind::Split => Ok(RdpType::new(RdpFamily::B, beta(n), base_name(prime))),
        SplitKind::Ramified => Err(Error::RamifiedFiber(p.to_string())),
    }
}

fn base_name(prime: Option<&FracIdeal>) -> String {
    match prime {
        Some(p) => format!("O_K/{p}"),
        None => "K".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceClassification {
    /// `"complex"`, or `"real+"` / `"real-"` for `√d ↦ ±√|d|` (`"real"` over `Q`).
    pub place: String,
    pub fiber: RdpType,
    /// Generator of the twisted torus over `R`, when it is non-split.
    pub matrix: Option<String>,
}

pub fn archimedean_report(k: &QuadraticField, twist: &TwistDescriptor, n: usize) -> Result<Vec<PlaceClassification>> {
    if n < 3 {
        return Err(Error::InvalidArgument("archimedean report needs n ≥ 3".into()));
    }
    if !k.is_rational() && !k.is_real() {
        return Ok(vec![PlaceClassification {
            place: "complex".into(),
            fiber: RdpType::new(RdpFamily::A, n - 1, "C".into()),
            matrix: None,
        }]);
    }
    let places: Vec<(String, i32)> = if k.is_rational() {
        vec![("real".into(), 1)]
    } else {
        vec![("real+".into(), 1), ("real-".into(), -1)]
    };
    Ok(places
        .into_iter()
        .map(|(name, emb)| {
            let stays_real = match &twist.eta {
                None => true,
                Some(e) => e.delta.sign_at(emb) == std::cmp::Ordering::Greater,
            };
            if stays_real {
                PlaceClassification {
                    place: name,
                    fiber: RdpType::new(RdpFamily::A, n - 1, "R".into()),
                    matrix: None,
                }
            } else {
                PlaceClassification {
                    place: name,
                    fiber: RdpType::new(RdpFamily::B, beta(n), "R".into()),
                    matrix: Some(format!("[[0, -1], [1, zeta_{n} + zeta_{n}^-1]]")),
                }
            }
        })
        .collect())
}
