//! Witness expectation values, product-state minimization and
//! non-decomposability certificates.
//!
//! The product-state minimum min ⟨ψ⊗φ|W|ψ⊗φ⟩ is approached by see-saw: with
//! ψ fixed the problem in φ is the smallest eigenvector of a d×d operator,
//! and vice versa. Each half step is optimal given the other factor, so the
//! value never increases within a run. Many seeded random starts are tried
//! and the best is kept. The result is an upper bound on the true minimum;
//! reports label it "numerical".

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, require_bipartite, trace_product, ComplexMatrix, Tolerance, C64, ZERO,
};
use crate::scalar::Scalar;
use crate::states::{
    beta_lambdas, is_ppt, state_from_lambdas, BetaFamilyParams, StateLambdas, TaggedState,
};
use crate::witness::{
    alpha_admissible_range, AlphaWitnessParams, TaggedWitness, WitnessProvenance,
};

pub const GENERATOR_NAME: &str = "ChaCha8Rng";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeeSawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub conv_tol: f64,
    pub seed: u64,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        SeeSawConfig {
            restarts: 64,
            max_iters: 500,
            conv_tol: 1e-12,
            seed: 0,
        }
    }
}

impl SeeSawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.conv_tol.is_finite() && self.conv_tol > 0.0) {
            return Err(Error::InvalidParameter("conv_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Tr(Wρ), required to be real within eq_tol.
pub fn expectation(w: &ComplexMatrix, rho: &ComplexMatrix, tol: &Tolerance) -> Result<f64> {
    w.require_hermitian(tol)?;
    rho.require_hermitian(tol)?;
    let t = trace_product(w, rho)?;
    if t.im.abs() > tol.eq_tol {
        return Err(Error::ComplexTrace(t.im));
    }
    Ok(t.re)
}

/// One see-saw descent.
#[derive(Debug, Clone)]
pub struct SeeSawRun {
    pub value: f64,
    pub psi: Vec<C64>,
    pub phi: Vec<C64>,
    /// Value after every half step.
    pub history: Vec<f64>,
}

/// Best product vector over all restarts.
#[derive(Debug, Clone, Serialize)]
pub struct ProductMin {
    pub value: f64,
    pub psi: Vec<C64>,
    pub phi: Vec<C64>,
    pub restart_index: usize,
    pub seed: u64,
    pub restarts: usize,
    pub generator: &'static str,
    pub certification: &'static str,
}

/// M(ψ)_kl = ⟨ψ⊗e_k|W|ψ⊗e_l⟩.
fn reduce_first(w: &ComplexMatrix, d: usize, psi: &[C64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let c = psi[i].conj() * psi[j];
            if c == ZERO {
                continue;
            }
            for k in 0..d {
                for l in 0..d {
                    m[(k, l)] += c * w[(i * d + k, j * d + l)];
                }
            }
        }
    }
    m
}

/// N(φ)_ij = ⟨e_i⊗φ|W|e_j⊗φ⟩.
fn reduce_second(w: &ComplexMatrix, d: usize, phi: &[C64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 0..d {
        for l in 0..d {
            let c = phi[k].conj() * phi[l];
            if c == ZERO {
                continue;
            }
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += c * w[(i * d + k, j * d + l)];
                }
            }
        }
    }
    m
}

fn lowest(m: &ComplexMatrix, tol: &Tolerance) -> Result<(f64, Vec<C64>)> {
    let eig = hermitian_eigen(m, tol)?;
    Ok((eig.values[0], eig.vector(0)))
}

/// ⟨ψ⊗φ|W|ψ⊗φ⟩ for unit ψ, φ.
pub fn product_value(w: &ComplexMatrix, d: usize, psi: &[C64], phi: &[C64]) -> f64 {
    let m = reduce_first(w, d, psi);
    let mut acc = ZERO;
    for k in 0..d {
        for l in 0..d {
            acc += phi[k].conj() * m[(k, l)] * phi[l];
        }
    }
    acc.re
}

/// Standard complex Gaussian vector, normalized.
pub fn random_unit_vector<R: rand::Rng>(rng: &mut R, d: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                C64::new(re, im)
            })
            .collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Runs see-saw from a given first factor ψ.
pub fn see_saw_from(
    w: &ComplexMatrix,
    d: usize,
    psi0: Vec<C64>,
    cfg: &SeeSawConfig,
    tol: &Tolerance,
) -> Result<SeeSawRun> {
    let mut psi = psi0;
    let (mut value, mut phi) = lowest(&reduce_first(w, d, &psi), tol)?;
    let mut history = vec![value];
    for _ in 0..cfg.max_iters {
        let (v1, new_psi) = lowest(&reduce_second(w, d, &phi), tol)?;
        psi = new_psi;
        let (v2, new_phi) = lowest(&reduce_first(w, d, &psi), tol)?;
        phi = new_phi;
        history.push(v1);
        history.push(v2);
        let improvement = value - v2;
        value = value.min(v2);
        if improvement < cfg.conv_tol {
            break;
        }
    }
    Ok(SeeSawRun {
        value,
        psi,
        phi,
        history,
    })
}

/// Generator for restart `index`: the seed picks the key, the restart index
/// the stream, so restart k starts identically whatever the restart count.
fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Approximate min over unit ψ, φ of ⟨ψ⊗φ|W|ψ⊗φ⟩ (an upper bound).
pub fn product_min(
    w: &ComplexMatrix,
    d: usize,
    cfg: &SeeSawConfig,
    tol: &Tolerance,
) -> Result<ProductMin> {
    cfg.validate()?;
    require_bipartite(w, d)?;
    w.require_hermitian(tol)?;
    let mut best: Option<(usize, SeeSawRun)> = None;
    for index in 0..cfg.restarts {
        let mut rng = restart_rng(cfg.seed, index);
        let psi0 = random_unit_vector(&mut rng, d);
        let run = see_saw_from(w, d, psi0, cfg, tol)?;
        // strict comparison keeps the lowest index on ties
        if best.as_ref().is_none_or(|(_, b)| run.value < b.value) {
            best = Some((index, run));
        }
    }
    let (restart_index, run) = best.expect("at least one restart");
    Ok(ProductMin {
        value: run.value,
        psi: run.psi,
        phi: run.phi,
        restart_index,
        seed: cfg.seed,
        restarts: cfg.restarts,
        generator: GENERATOR_NAME,
        certification: "numerical",
    })
}

/// Compact view of a [`ProductMin`] for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ProductMinSummary {
    pub value: f64,
    pub psi: Vec<[f64; 2]>,
    pub phi: Vec<[f64; 2]>,
    pub restart_index: usize,
    pub certification: &'static str,
}

impl From<&ProductMin> for ProductMinSummary {
    fn from(p: &ProductMin) -> Self {
        let pairs = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect();
        ProductMinSummary {
            value: p.value,
            psi: pairs(&p.psi),
            phi: pairs(&p.phi),
            restart_index: p.restart_index,
            certification: p.certification,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DetectionReport {
    pub expectation: f64,
    pub detected: bool,
    pub closed_form: Option<f64>,
    /// expectation − closed_form, when a closed form exists.
    pub closed_form_difference: Option<f64>,
    pub product_min: Option<ProductMinSummary>,
}

/// Closed form of Tr(μW[a]ρ) for ρ = Σ_{i≥1} λᵢOᵢ + λ_d P⁺_d:
/// μ[Σ_{n≥1} aₙλₙ/d + λ_d((a₀+1)/d − 1)].
///
/// For W_α this is (λ₁ − λ_d)(1 − 1/(dα)), and (λ_{d−1} − λ_d)(1 − 1/(dα))
/// for W′_α; those forms are used directly for α witnesses.
pub fn closed_form_expectation(witness: &WitnessProvenance, s: &StateLambdas) -> Option<Scalar> {
    let d = s.d;
    match witness {
        WitnessProvenance::Alpha(p) if p.d == d => {
            let factor = Scalar::int(1) - Scalar::int(1) / (Scalar::from(d) * p.alpha);
            let lead = if p.primed {
                s.lambda(d - 1)
            } else {
                s.lambda(1)
            };
            Some((lead - s.lambda(d)) * factor)
        }
        WitnessProvenance::Family(c) if c.d == d => {
            let ds = Scalar::from(d);
            let mut acc = s.lambda(d) * ((c.a[0] + Scalar::int(1)) / ds - Scalar::int(1));
            for n in 1..d {
                acc = acc + c.a[n] * s.lambda(n) / ds;
            }
            Some(c.mu * acc)
        }
        _ => None,
    }
}

pub fn detect_state(
    witness: &TaggedWitness,
    state: &TaggedState,
    cfg: Option<&SeeSawConfig>,
    tol: &Tolerance,
) -> Result<DetectionReport> {
    if witness.d != state.d {
        return Err(Error::InvalidParameter(format!(
            "witness is for d = {} but state is for d = {}",
            witness.d, state.d
        )));
    }
    let value = expectation(&witness.matrix, &state.matrix, tol)?;
    let closed_form = state
        .lambdas
        .as_ref()
        .and_then(|s| closed_form_expectation(&witness.provenance, s))
        .map(|x| x.to_f64());
    let product_min = match cfg {
        Some(cfg) => Some(ProductMinSummary::from(&product_min(
            &witness.matrix,
            witness.d,
            cfg,
            tol,
        )?)),
        None => None,
    };
    Ok(DetectionReport {
        expectation: value,
        detected: value < -tol.eig_tol,
        closed_form,
        closed_form_difference: closed_form.map(|c| value - c),
        product_min,
    })
}

/// A PPT state detected by an EW: evidence that the witness is non-decomposable.
#[derive(Debug, Clone, Serialize)]
pub struct NdCertificate {
    pub witness: serde_json::Value,
    pub beta: Scalar,
    pub expectation: f64,
    pub closed_form: f64,
    pub ppt_min_eig: f64,
    pub product_min: f64,
    pub seed: u64,
    pub restarts: usize,
    pub generator: &'static str,
    pub certification: &'static str,
    /// β values tried before the certificate was found.
    pub tried: usize,
    #[serde(skip)]
    pub state: StateLambdas,
}

/// Number of β points scanned by [`certify_nd`].
pub const ND_GRID_POINTS: usize = 10;

/// β grid where detection by the α witnesses is guaranteed: [1, d−1) ascending
/// for W_α, ((d−1)(d−2)+1, (d−1)²] descending for W′_α.
pub fn nd_beta_grid(d: usize, primed: bool) -> Vec<Scalar> {
    let m = d as i64 - 1;
    let n = ND_GRID_POINTS as i64;
    if primed {
        let hi = Scalar::int(m * m);
        let width = Scalar::int(m * m - (m * (m - 1) + 1));
        (0..n).map(|k| hi - width * Scalar::ratio(k, n)).collect()
    } else {
        let width = Scalar::int(m - 1);
        (0..n)
            .map(|k| Scalar::int(1) + width * Scalar::ratio(k, n))
            .collect()
    }
}

pub fn certify_nd(
    params: &AlphaWitnessParams,
    cfg: &SeeSawConfig,
    tol: &Tolerance,
) -> Result<NdCertificate> {
    params.validate()?;
    let range = alpha_admissible_range(params.d)?;
    if !range.contains(&params.alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {} is outside the certified range ({}, {}]",
            params.alpha, range.lower, range.upper
        )));
    }
    let witness = TaggedWitness::from_alpha(*params)?;
    let pm = product_min(&witness.matrix, params.d, cfg, tol)?;
    for (tried, beta) in nd_beta_grid(params.d, params.primed)
        .into_iter()
        .enumerate()
    {
        let lambdas = beta_lambdas(&BetaFamilyParams::new(params.d, beta)?);
        let rho = state_from_lambdas(&lambdas)?;
        let ppt = is_ppt(&rho, params.d, tol)?;
        let value = expectation(&witness.matrix, &rho, tol)?;
        if ppt.ppt && value < -tol.eig_tol {
            let closed_form = closed_form_expectation(&witness.provenance, &lambdas)
                .expect("alpha witness has a closed form")
                .to_f64();
            return Ok(NdCertificate {
                witness: witness.describe(),
                beta,
                expectation: value,
                closed_form,
                ppt_min_eig: ppt.min_eigenvalue,
                product_min: pm.value,
                seed: cfg.seed,
                restarts: cfg.restarts,
                generator: GENERATOR_NAME,
                certification: "numerical",
                tried: tried + 1,
                state: lambdas,
            });
        }
    }
    Err(Error::Unsupported(format!(
        "no detected PPT state on the beta grid for d = {}, alpha = {}",
        params.d, params.alpha
    )))
}
