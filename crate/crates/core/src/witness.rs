//! Witness operators built from the Σ_n projectors.
//!
//! O_n = (1/d) Σ_i |i, i+n⟩⟨i, i+n| is the normalized projector onto Σ_n and
//! P⁺_d the projector onto the maximally entangled vector. Everything here is
//! a combination of those two and of the flip 𝒫:
//!
//! * W[a₀, …, a_{d−1}] = (a₀+1)O₀ + Σ_{n≥1} aₙOₙ − P⁺_d, optionally scaled by μ;
//! * W_α = I⊗I − (1/α)O₁ − d(O₂ + … + O_{d−1}) − (2 − 1/(dα))P⁺_d, and
//!   W′_α = 𝒫W_α𝒫, which swaps the roles of O₁ and O_{d−1}.
//!
//! W_α equals μ·W[d/μ − 1, d/μ − 1/(αμ), 0, …, 0] with μ = 2 − 1/(dα).

use serde::{Deserialize, Serialize};

use crate::circulant::PermutationPi;
use crate::error::{Error, Result};
use crate::linalg::{is_positive_semidefinite, ComplexMatrix, Tolerance, C64, ZERO};
use crate::scalar::{Rational, Scalar};

fn require_dim(d: usize, min: usize) -> Result<()> {
    if d < min {
        return Err(Error::InvalidParameter(format!(
            "d >= {min} required, got {d}"
        )));
    }
    Ok(())
}

/// O_n: trace-one projector onto Σ_n (diagonal).
pub fn projector_o(d: usize, n: usize) -> Result<ComplexMatrix> {
    require_dim(d, 2)?;
    if n >= d {
        return Err(Error::InvalidParameter(format!(
            "n must be in 0..{d}, got {n}"
        )));
    }
    let w = C64::new(1.0 / d as f64, 0.0);
    let mut o = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        let k = i * d + (i + n) % d;
        o[(k, k)] = w;
    }
    Ok(o)
}

/// P⁺_d = (1/d) Σ_ij |ii⟩⟨jj|.
pub fn max_entangled_projector(d: usize) -> Result<ComplexMatrix> {
    require_dim(d, 2)?;
    let w = C64::new(1.0 / d as f64, 0.0);
    Ok(ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            w
        } else {
            ZERO
        }
    }))
}

/// 𝒫 = Σ_ij |ij⟩⟨ji|.
pub fn flip_operator(d: usize) -> Result<ComplexMatrix> {
    require_dim(d, 2)?;
    Ok(ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r == (c % d) * d + c / d {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    }))
}

/// Σ coeff_n O_n + p_coeff P⁺_d, written straight onto the diagonal/Σ₀ block.
fn combine(d: usize, o_coeffs: &[f64], p_coeff: f64) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(d * d, d * d);
    let inv_d = 1.0 / d as f64;
    for (n, &c) in o_coeffs.iter().enumerate() {
        for i in 0..d {
            let k = i * d + (i + n) % d;
            w[(k, k)] += C64::new(c * inv_d, 0.0);
        }
    }
    for i in 0..d {
        for j in 0..d {
            w[(i * (d + 1), j * (d + 1))] += C64::new(p_coeff * inv_d, 0.0);
        }
    }
    w
}

/// Parameters of W_α (or W′_α when `primed`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaWitnessParams {
    pub d: usize,
    pub alpha: Scalar,
    #[serde(default)]
    pub primed: bool,
}

impl AlphaWitnessParams {
    /// Requires d ≥ 3 and α > 1/(2d), so that μ > 0.
    pub fn new(d: usize, alpha: Scalar, primed: bool) -> Result<Self> {
        let p = AlphaWitnessParams { d, alpha, primed };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_dim(self.d, 3)?;
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        let floor = Scalar::ratio(1, 2 * self.d as i64);
        if self.alpha <= floor {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed 1/(2d) = {floor}, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    fn d_scalar(&self) -> Scalar {
        Scalar::from(self.d)
    }

    /// μ = 2 − 1/(dα).
    pub fn mu(&self) -> Scalar {
        Scalar::int(2) - Scalar::int(1) / (self.d_scalar() * self.alpha)
    }

    /// Coefficients of the rescaled family form. For α < 1/d the O₁ (or
    /// O_{d−1}) coefficient is negative, so these bypass the nonnegativity
    /// check of [`WitnessCoefficients::new`].
    pub fn coefficients(&self) -> WitnessCoefficients {
        let d = self.d_scalar();
        let mu = self.mu();
        let one = Scalar::int(1);
        let mut a = vec![Scalar::int(0); self.d];
        a[0] = d / mu - one;
        let a1 = d / mu - one / (self.alpha * mu);
        if self.primed {
            a[self.d - 1] = a1;
        } else {
            a[1] = a1;
        }
        WitnessCoefficients { d: self.d, a, mu }
    }

    /// α > 1/d: the O₁ coefficient d − 1/α is positive and the operator is
    /// not positive semidefinite.
    pub fn exceeds_one_over_d(&self) -> bool {
        self.alpha > Scalar::ratio(1, self.d as i64)
    }
}

/// W_α (or W′_α) from the defining long form.
pub fn witness_w_alpha(params: &AlphaWitnessParams) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.d;
    let alpha = params.alpha.to_f64();
    let mu = params.mu().to_f64();
    let mut o = vec![-(d as f64); d];
    o[0] = 0.0;
    let special = if params.primed { d - 1 } else { 1 };
    o[special] = -1.0 / alpha;
    // I⊗I = d Σ O_n
    for c in o.iter_mut() {
        *c += d as f64;
    }
    Ok(combine(d, &o, -mu))
}

/// W_α (or W′_α) from the simplified form dO₀ + (d − 1/α)O₁ − μP⁺_d.
pub fn witness_w_alpha_simplified(params: &AlphaWitnessParams) -> Result<ComplexMatrix> {
    params.validate()?;
    let d = params.d;
    let alpha = params.alpha.to_f64();
    let mu = params.mu().to_f64();
    let mut o = vec![0.0; d];
    o[0] = d as f64;
    let special = if params.primed { d - 1 } else { 1 };
    o[special] = d as f64 - 1.0 / alpha;
    Ok(combine(d, &o, -mu))
}

/// (d; a₀, …, a_{d−1}; μ) describing μ·W[a₀, …, a_{d−1}].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCoefficients {
    pub d: usize,
    pub a: Vec<Scalar>,
    #[serde(default = "unit_scale")]
    pub mu: Scalar,
}

fn unit_scale() -> Scalar {
    Scalar::int(1)
}

impl WitnessCoefficients {
    pub fn new(d: usize, a: Vec<Scalar>, mu: Scalar) -> Result<Self> {
        let c = WitnessCoefficients { d, a, mu };
        c.validate()?;
        Ok(c)
    }

    pub fn unscaled(d: usize, a: Vec<Scalar>) -> Result<Self> {
        Self::new(d, a, Scalar::int(1))
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        if let Some((i, x)) = self
            .a
            .iter()
            .enumerate()
            .find(|(_, x)| **x < Scalar::int(0))
        {
            return Err(Error::InvalidParameter(format!("a[{i}] = {x} is negative")));
        }
        Ok(())
    }

    fn validate_shape(&self) -> Result<()> {
        require_dim(self.d, 3)?;
        if self.a.len() != self.d {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                self.d,
                self.a.len()
            )));
        }
        if self.a.iter().any(|x| !x.is_finite()) || !self.mu.is_finite() {
            return Err(Error::InvalidParameter(
                "coefficients must be finite".into(),
            ));
        }
        if self.mu <= Scalar::int(0) {
            return Err(Error::InvalidParameter(format!(
                "mu must be positive, got {}",
                self.mu
            )));
        }
        Ok(())
    }

    pub fn sum(&self) -> Scalar {
        self.a.iter().fold(Scalar::int(0), |acc, &x| acc + x)
    }
}

/// μ·[(a₀+1)O₀ + Σ_{n≥1} aₙOₙ − P⁺_d].
pub fn witness_family(coeffs: &WitnessCoefficients) -> Result<ComplexMatrix> {
    coeffs.validate_shape()?;
    let mu = coeffs.mu.to_f64();
    let mut o: Vec<f64> = coeffs.a.iter().map(|x| x.to_f64() * mu).collect();
    o[0] += mu;
    Ok(combine(coeffs.d, &o, -mu))
}

/// Spectrum of μ·W[a] read off the block structure: (a₀+1−d)/d once,
/// (a₀+1)/d with multiplicity d−1, and aₙ/d d times for each n ≥ 1, all
/// times μ. Sorted ascending.
pub fn family_spectrum(coeffs: &WitnessCoefficients) -> Vec<f64> {
    let d = coeffs.d as f64;
    let mu = coeffs.mu.to_f64();
    let a0 = coeffs.a[0].to_f64();
    let mut out = vec![mu * (a0 + 1.0 - d) / d];
    out.extend(std::iter::repeat_n(mu * (a0 + 1.0) / d, coeffs.d - 1));
    for an in &coeffs.a[1..] {
        out.extend(std::iter::repeat_n(mu * an.to_f64() / d, coeffs.d));
    }
    out.sort_by(f64::total_cmp);
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct NecessaryConditions {
    /// Σ aₙ ≥ d − 1.
    pub sum_at_least_d_minus_1: bool,
    /// a₀ < d − 1, i.e. the operator is not positive.
    pub a0_below_d_minus_1: bool,
    /// ⟨ψ⊗ψ|W[a]|ψ⊗ψ⟩ for ψ = Σ_i |i⟩ (unnormalized, μ removed).
    pub product_vector_value: f64,
    /// The product-vector value is nonnegative exactly when the sum condition holds.
    pub product_vector_agrees: bool,
}

impl NecessaryConditions {
    pub fn all_hold(&self) -> bool {
        self.sum_at_least_d_minus_1 && self.a0_below_d_minus_1
    }
}

pub fn check_necessary_conditions(
    coeffs: &WitnessCoefficients,
    tol: &Tolerance,
) -> Result<NecessaryConditions> {
    coeffs.validate_shape()?;
    let d = coeffs.d;
    let d_minus_1 = Scalar::from(d - 1);
    let sum_ok = coeffs.sum().ge_tol(&d_minus_1, tol.eq_tol);
    let a0_ok = coeffs.a[0].lt_tol(&d_minus_1, tol.eq_tol);

    let unscaled = WitnessCoefficients {
        d,
        a: coeffs.a.clone(),
        mu: Scalar::int(1),
    };
    let w = witness_family(&unscaled)?;
    let psi = vec![C64::new(1.0, 0.0); d * d];
    let value: f64 = psi
        .iter()
        .zip(w.mul_vec(&psi))
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .re;
    let scale = w.max_abs().max(1.0) * (d * d) as f64;
    let numeric_ok = value >= -tol.eq_tol * scale;
    Ok(NecessaryConditions {
        sum_at_least_d_minus_1: sum_ok,
        a0_below_d_minus_1: a0_ok,
        product_vector_value: value,
        product_vector_agrees: numeric_ok == sum_ok,
    })
}

/// Verdicts of the complete d = 3 characterization of W[a₀, a₁, a₂].
#[derive(Debug, Clone, Serialize)]
pub struct D3Report {
    pub necessary: NecessaryConditions,
    /// a₁a₂ ≥ (1 − a₀)²; `None` when a₀ > 1 and the condition does not apply.
    pub product_condition: Option<bool>,
    pub is_ew: bool,
    /// a₁a₂ < (2 − a₀)²/4 evaluated on its own.
    pub nd_inequality: bool,
    /// is_ew and nd_inequality.
    pub is_nd: bool,
}

pub fn check_d3_conditions(coeffs: &WitnessCoefficients, tol: &Tolerance) -> Result<D3Report> {
    if coeffs.d != 3 {
        return Err(Error::InvalidParameter(format!(
            "d = 3 characterization applied to d = {}",
            coeffs.d
        )));
    }
    let necessary = check_necessary_conditions(coeffs, tol)?;
    let (a0, a1, a2) = (coeffs.a[0], coeffs.a[1], coeffs.a[2]);
    let one = Scalar::int(1);
    let nonneg = coeffs
        .a
        .iter()
        .all(|x| x.ge_tol(&Scalar::int(0), tol.eq_tol));
    let product = a1 * a2;
    let product_condition = if a0.le_tol(&one, 0.0) {
        let gap = one - a0;
        Some(product.ge_tol(&(gap * gap), tol.eq_tol))
    } else {
        None
    };
    let is_ew = nonneg && necessary.all_hold() && product_condition.unwrap_or(true);
    let two_minus = Scalar::int(2) - a0;
    let nd_inequality = product.lt_tol(&(two_minus * two_minus / Scalar::int(4)), tol.eq_tol);
    Ok(D3Report {
        necessary,
        product_condition,
        is_ew,
        nd_inequality,
        is_nd: is_ew && nd_inequality,
    })
}

/// The certified α window (1/d, (d−1)/(d(d−2))], with exact endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaRange {
    pub d: usize,
    /// Excluded lower endpoint 1/d.
    pub lower: Scalar,
    /// Included upper endpoint (d−1)/(d(d−2)).
    pub upper: Scalar,
    /// a₁ at the upper endpoint; equals 1.
    pub a1_at_upper: Scalar,
}

impl AlphaRange {
    pub fn contains(&self, alpha: &Scalar) -> bool {
        *alpha > self.lower && *alpha <= self.upper
    }

    /// a₁ = d(dα − 1)/(2dα − 1), the weight of W[d−2, 1, 0, …, 0] in the
    /// convex combination with the positive W[d−1, 0, …, 0].
    pub fn a1(&self, alpha: &Scalar) -> Scalar {
        let d = Scalar::from(self.d);
        let one = Scalar::int(1);
        d * (d * *alpha - one) / (Scalar::int(2) * d * *alpha - one)
    }

    pub fn certify(&self, alpha: &Scalar) -> RangeCertificate {
        let a1 = self.a1(alpha);
        RangeCertificate {
            alpha: *alpha,
            a1,
            a1_in_unit_interval: a1 > Scalar::int(0) && a1 <= Scalar::int(1),
            in_certified_range: self.contains(alpha),
        }
    }

    /// `n` evenly spaced exact points lower + k(upper − lower)/n, k = 1..=n.
    pub fn grid(&self, n: usize) -> Vec<Scalar> {
        let width = self.upper - self.lower;
        (1..=n)
            .map(|k| self.lower + width * Scalar::from(k) / Scalar::from(n))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RangeCertificate {
    pub alpha: Scalar,
    pub a1: Scalar,
    pub a1_in_unit_interval: bool,
    pub in_certified_range: bool,
}

pub fn alpha_admissible_range(d: usize) -> Result<AlphaRange> {
    require_dim(d, 3)?;
    let di = d as i64;
    let lower = Scalar::ratio(1, di);
    let upper = Scalar::ratio(di - 1, di * (di - 2));
    let mut range = AlphaRange {
        d,
        lower,
        upper,
        a1_at_upper: Scalar::int(0),
    };
    range.a1_at_upper = range.a1(&upper);
    debug_assert_eq!(
        range.a1_at_upper.as_rational(),
        Some(Rational::from_integer(1))
    );
    Ok(range)
}

/// Everything a caller may want to know about a built witness.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessSummary {
    pub d: usize,
    pub min_eigenvalue: f64,
    pub psd: bool,
    pub necessary: NecessaryConditions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_range: Option<RangeCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_min_eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d3: Option<D3Report>,
}

pub fn summarize(
    matrix: &ComplexMatrix,
    coeffs: &WitnessCoefficients,
    alpha: Option<&AlphaWitnessParams>,
    tol: &Tolerance,
) -> Result<WitnessSummary> {
    let verdict = is_positive_semidefinite(matrix, tol)?;
    let alpha_range = match alpha {
        Some(p) => Some(alpha_admissible_range(p.d)?.certify(&p.alpha)),
        None => None,
    };
    let d3 = if coeffs.d == 3 {
        Some(check_d3_conditions(coeffs, tol)?)
    } else {
        None
    };
    Ok(WitnessSummary {
        d: coeffs.d,
        min_eigenvalue: verdict.min_eigenvalue,
        psd: verdict.psd,
        necessary: check_necessary_conditions(coeffs, tol)?,
        alpha_range,
        closed_form_min_eigenvalue: family_spectrum(coeffs).first().copied(),
        d3,
    })
}

/// `{"d": n, "alpha": x, "primed": bool}` or `{"d": n, "a": [...], "mu": x}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WitnessDescription {
    Alpha {
        d: usize,
        alpha: Scalar,
        #[serde(default)]
        primed: bool,
    },
    Family {
        d: usize,
        a: Vec<Scalar>,
        #[serde(default = "unit_scale")]
        mu: Scalar,
    },
}

/// Where a witness matrix came from.
#[derive(Debug, Clone)]
pub enum WitnessProvenance {
    Alpha(AlphaWitnessParams),
    Family(WitnessCoefficients),
    /// Read as a bare matrix; no closed forms apply.
    Dense,
}

/// A witness matrix with its parameters, when known.
#[derive(Debug, Clone)]
pub struct TaggedWitness {
    pub d: usize,
    pub matrix: ComplexMatrix,
    pub provenance: WitnessProvenance,
}

impl TaggedWitness {
    pub fn build(desc: &WitnessDescription) -> Result<Self> {
        match desc {
            WitnessDescription::Alpha { d, alpha, primed } => {
                let p = AlphaWitnessParams::new(*d, *alpha, *primed)?;
                Self::from_alpha(p)
            }
            WitnessDescription::Family { d, a, mu } => {
                let c = WitnessCoefficients::new(*d, a.clone(), *mu)?;
                Ok(TaggedWitness {
                    d: *d,
                    matrix: witness_family(&c)?,
                    provenance: WitnessProvenance::Family(c),
                })
            }
        }
    }

    pub fn from_alpha(p: AlphaWitnessParams) -> Result<Self> {
        Ok(TaggedWitness {
            d: p.d,
            matrix: witness_w_alpha(&p)?,
            provenance: WitnessProvenance::Alpha(p),
        })
    }

    pub fn from_matrix(matrix: ComplexMatrix, d: usize, tol: &Tolerance) -> Result<Self> {
        crate::linalg::require_bipartite(&matrix, d)?;
        matrix.require_hermitian(tol)?;
        Ok(TaggedWitness {
            d,
            matrix,
            provenance: WitnessProvenance::Dense,
        })
    }

    /// Family coefficients, when the witness has parameters.
    pub fn coefficients(&self) -> Option<WitnessCoefficients> {
        match &self.provenance {
            WitnessProvenance::Alpha(p) => Some(p.coefficients()),
            WitnessProvenance::Family(c) => Some(c.clone()),
            WitnessProvenance::Dense => None,
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        match &self.provenance {
            WitnessProvenance::Alpha(p) => serde_json::json!({
                "d": p.d, "alpha": p.alpha, "primed": p.primed
            }),
            WitnessProvenance::Family(c) => serde_json::json!({
                "d": c.d, "a": c.a, "mu": c.mu
            }),
            WitnessProvenance::Dense => serde_json::json!({ "d": self.d, "dense": true }),
        }
    }
}

/// 𝒫 O_k 𝒫 = O_{π(k)}, checked densely.
pub fn flip_maps_projector(d: usize, k: usize, tol: f64) -> Result<bool> {
    let flip = flip_operator(d)?;
    let lhs = &(&flip * &projector_o(d, k)?) * &flip;
    let pi = PermutationPi::new(d)?;
    Ok(lhs.approx_eq(&projector_o(d, pi.apply(k))?, tol))
}
