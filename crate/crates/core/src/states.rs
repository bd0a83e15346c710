//! The circulant state family ρ = Σ_{i=1}^{d−1} λᵢOᵢ + λ_d P⁺_d and its
//! one-parameter β slice.
//!
//! On the β slice, with ℓ = (d−1)(2d−3) + 1,
//!
//! ```text
//! λ₁ = β/ℓ,  λ_{d−1} = ((d−1)² + 1 − β)/ℓ,  λ₂ = … = λ_{d−2} = λ_d = (d−1)/ℓ,
//! ```
//!
//! and the state is PPT exactly when λ₁λ_{d−1} ≥ λ_d², i.e. β ∈ [1, (d−1)²].
//! At d = 3 this is the Horodecki family (2/7)P⁺₃ + (β/7)O₁ + ((5−β)/7)O₂.

use serde::{Deserialize, Serialize};

use crate::circulant::disassemble;
use crate::error::{Error, Result};
use crate::linalg::{partial_transpose, require_bipartite, ComplexMatrix, Tolerance, C64};
use crate::scalar::Scalar;
use crate::witness::{max_entangled_projector, projector_o};

/// β together with its dimension; β ∈ [0, (d−1)² + 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaFamilyParams {
    pub d: usize,
    pub beta: Scalar,
}

impl BetaFamilyParams {
    pub fn new(d: usize, beta: Scalar) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!("d >= 3 required, got {d}")));
        }
        let p = BetaFamilyParams { d, beta };
        if !beta.is_finite() || beta < Scalar::int(0) || beta > p.beta_max() {
            return Err(Error::InvalidParameter(format!(
                "beta must lie in [0, {}], got {beta}",
                p.beta_max()
            )));
        }
        Ok(p)
    }

    /// ℓ = (d−1)(2d−3) + 1.
    pub fn ell(&self) -> i64 {
        ell(self.d)
    }

    /// (d−1)² + 1.
    pub fn beta_max(&self) -> Scalar {
        let m = self.d as i64 - 1;
        Scalar::int(m * m + 1)
    }
}

pub fn ell(d: usize) -> i64 {
    let d = d as i64;
    (d - 1) * (2 * d - 3) + 1
}

/// (λ₁, …, λ_{d−1}, λ_d), nonnegative and summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateLambdas {
    pub d: usize,
    pub lambdas: Vec<Scalar>,
    /// Present when the λ were produced from β.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaFamilyParams>,
}

impl StateLambdas {
    pub fn new(d: usize, lambdas: Vec<Scalar>, tol: &Tolerance) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!("d >= 3 required, got {d}")));
        }
        if lambdas.len() != d {
            return Err(Error::InvalidParameter(format!(
                "expected {d} lambdas, got {}",
                lambdas.len()
            )));
        }
        if let Some((i, x)) = lambdas
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || !x.ge_tol(&Scalar::int(0), 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "lambda[{i}] = {x} is negative"
            )));
        }
        let total = lambdas.iter().fold(Scalar::int(0), |acc, &x| acc + x);
        let normalized = match total {
            Scalar::Exact(_) => total == Scalar::int(1),
            Scalar::Real(t) => (t - 1.0).abs() <= tol.eq_tol,
        };
        if !normalized {
            return Err(Error::InvalidParameter(format!(
                "lambdas sum to {total}, not 1"
            )));
        }
        Ok(StateLambdas {
            d,
            lambdas,
            beta: None,
        })
    }

    /// λ_k, 1-based as in the formulas (λ_d weights P⁺_d).
    pub fn lambda(&self, k: usize) -> Scalar {
        self.lambdas[k - 1]
    }
}

pub fn beta_lambdas(p: &BetaFamilyParams) -> StateLambdas {
    let d = p.d;
    let ell = Scalar::int(p.ell());
    let base = Scalar::from(d - 1) / ell;
    let mut lambdas = vec![base; d];
    lambdas[0] = p.beta / ell;
    lambdas[d - 2] = (p.beta_max() - p.beta) / ell;
    StateLambdas {
        d,
        lambdas,
        beta: Some(*p),
    }
}

pub fn state_from_lambdas(s: &StateLambdas) -> Result<ComplexMatrix> {
    let d = s.d;
    let mut rho = max_entangled_projector(d)?.scale_real(s.lambda(d).to_f64());
    for i in 1..d {
        rho = &rho + &projector_o(d, i)?.scale_real(s.lambda(i).to_f64());
    }
    Ok(rho)
}

/// Checks Hermiticity, unit trace and positivity of a d⊗d density matrix.
pub fn validate_density(rho: &ComplexMatrix, d: usize, tol: &Tolerance) -> Result<()> {
    require_bipartite(rho, d)?;
    if !rho.is_hermitian(tol.eq_tol) {
        return Err(Error::NotDensityMatrix("not Hermitian".into()));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > tol.eq_tol * (d * d) as f64 {
        return Err(Error::NotDensityMatrix(format!("trace is {tr}, not 1")));
    }
    let v = crate::linalg::is_positive_semidefinite(rho, tol)?;
    if !v.psd {
        return Err(Error::NotDensityMatrix(format!(
            "negative eigenvalue {:e}",
            v.min_eigenvalue
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PptVerdict {
    pub ppt: bool,
    /// Smallest eigenvalue of ρ^Γ.
    pub min_eigenvalue: f64,
}

/// PPT test through the spectrum of the partial transpose.
pub fn is_ppt(rho: &ComplexMatrix, d: usize, tol: &Tolerance) -> Result<PptVerdict> {
    validate_density(rho, d, tol)?;
    let v = crate::linalg::is_positive_semidefinite(&partial_transpose(rho, d)?, tol)?;
    Ok(PptVerdict {
        ppt: v.psd,
        min_eigenvalue: v.min_eigenvalue,
    })
}

/// λ₁λ_{d−1} ≥ λ_d², valid only for λ produced by [`beta_lambdas`].
pub fn ppt_closed_form(s: &StateLambdas, tol: &Tolerance) -> Result<bool> {
    if s.beta.is_none() {
        return Err(Error::Unsupported(
            "closed-form PPT test applies only to beta-family states".into(),
        ));
    }
    let d = s.d;
    let lhs = s.lambda(1) * s.lambda(d - 1);
    let rhs = s.lambda(d) * s.lambda(d);
    Ok(lhs.ge_tol(&rhs, tol.eq_tol))
}

/// Region of the β slice a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BetaClass {
    #[serde(rename = "NPT")]
    Npt,
    #[serde(rename = "PPT-ENTANGLED")]
    PptEntangled,
    /// d = 3, β ∈ [2, 3]: recorded from the literature, not computed.
    #[serde(rename = "SEPARABLE")]
    Separable,
    #[serde(rename = "PPT-UNRESOLVED")]
    PptUnresolved,
}

impl BetaClass {
    pub fn label(self) -> &'static str {
        match self {
            BetaClass::Npt => "NPT",
            BetaClass::PptEntangled => "PPT-ENTANGLED",
            BetaClass::Separable => "SEPARABLE",
            BetaClass::PptUnresolved => "PPT-UNRESOLVED",
        }
    }

    /// Whether the label is taken from the literature instead of derived here.
    pub fn per_literature(self) -> bool {
        self == BetaClass::Separable
    }
}

impl std::fmt::Display for BetaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Exact for rational β; real β is compared in floating point.
pub fn classify_beta(d: usize, beta: &Scalar) -> Result<BetaClass> {
    BetaFamilyParams::new(d, *beta)?;
    let m = d as i64 - 1;
    let ppt_hi = Scalar::int(m * m);
    let one = Scalar::int(1);
    if *beta < one || *beta > ppt_hi {
        return Ok(BetaClass::Npt);
    }
    let low_edge = Scalar::int(m);
    let high_edge = Scalar::int(m * (m - 1) + 1);
    if *beta < low_edge || *beta > high_edge {
        return Ok(BetaClass::PptEntangled);
    }
    if d == 3 {
        return Ok(BetaClass::Separable);
    }
    Ok(BetaClass::PptUnresolved)
}

/// `{"d": n, "lambdas": [...]}` or `{"d": n, "beta": x}`.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum StateDescription {
    Beta { d: usize, beta: Scalar },
    Lambdas { d: usize, lambdas: Vec<Scalar> },
}

impl StateDescription {
    pub fn resolve(&self, tol: &Tolerance) -> Result<StateLambdas> {
        match self {
            StateDescription::Beta { d, beta } => {
                Ok(beta_lambdas(&BetaFamilyParams::new(*d, *beta)?))
            }
            StateDescription::Lambdas { d, lambdas } => StateLambdas::new(*d, lambdas.clone(), tol),
        }
    }
}

/// Density matrix plus optional λ provenance.
#[derive(Debug, Clone)]
pub struct TaggedState {
    pub d: usize,
    pub matrix: ComplexMatrix,
    pub lambdas: Option<StateLambdas>,
}

impl TaggedState {
    pub fn from_lambdas(s: StateLambdas) -> Result<Self> {
        Ok(TaggedState {
            d: s.d,
            matrix: state_from_lambdas(&s)?,
            lambdas: Some(s),
        })
    }

    pub fn from_matrix(matrix: ComplexMatrix, d: usize, tol: &Tolerance) -> Result<Self> {
        validate_density(&matrix, d, tol)?;
        Ok(TaggedState {
            d,
            matrix,
            lambdas: None,
        })
    }
}

/// Sidecar data for a built state.
#[derive(Debug, Clone, Serialize)]
pub struct StateSummary {
    pub d: usize,
    pub lambdas: StateLambdas,
    pub circulant: bool,
    pub ppt_eigenvalue: PptVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ppt_closed_form: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<BetaClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_source: Option<&'static str>,
}

pub fn summarize(s: &StateLambdas, tol: &Tolerance) -> Result<StateSummary> {
    let rho = state_from_lambdas(s)?;
    let label = match &s.beta {
        Some(p) => Some(classify_beta(p.d, &p.beta)?),
        None => None,
    };
    Ok(StateSummary {
        d: s.d,
        circulant: disassemble(&rho, s.d, tol)?.circulant,
        ppt_eigenvalue: is_ppt(&rho, s.d, tol)?,
        ppt_closed_form: s.beta.map(|_| ppt_closed_form(s, tol)).transpose()?,
        label,
        label_source: label.map(|l| {
            if l.per_literature() {
                "per literature"
            } else {
                "derived"
            }
        }),
        lambdas: s.clone(),
    })
}
