//! Closed-form oracle checks against the dense numerics.
//!
//! Each check compares an analytic expression with the corresponding dense
//! computation on seeded random inputs and records the worst deviation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circulant::{assemble, assemble_tilde, circulant_partial_transpose, CirculantSpec};
use crate::detect::expectation;
use crate::error::Result;
use crate::gellmann::expand_local;
use crate::linalg::{hermitian_eigenvalues, partial_transpose, ComplexMatrix, Tolerance, C64};
use crate::scalar::Scalar;
use crate::states::{
    beta_lambdas, is_ppt, ppt_closed_form, state_from_lambdas, BetaFamilyParams, StateLambdas,
};
use crate::witness::{
    alpha_admissible_range, family_spectrum, max_entangled_projector, projector_o, witness_w_alpha,
    AlphaWitnessParams,
};

/// Random Hermitian matrix with entries of modulus at most about 1.
pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_circulant_spec<R: Rng>(
    rng: &mut R,
    d: usize,
    tol: &Tolerance,
) -> Result<CirculantSpec> {
    CirculantSpec::new(d, (0..d).map(|_| random_hermitian(rng, d)).collect(), tol)
}

/// Random probability vector λ₁..λ_d with every entry positive.
pub fn random_lambdas<R: Rng>(rng: &mut R, d: usize, tol: &Tolerance) -> Result<StateLambdas> {
    let raw: Vec<f64> = (0..d).map(|_| rng.random_range(0.01..1.0)).collect();
    let total: f64 = raw.iter().sum();
    StateLambdas::new(
        d,
        raw.iter().map(|x| Scalar::real(x / total)).collect(),
        tol,
    )
}

/// α drawn uniformly from the certified window (1/d, (d−1)/(d(d−2))].
pub fn random_certified_alpha<R: Rng>(rng: &mut R, d: usize) -> Result<Scalar> {
    let range = alpha_admissible_range(d)?;
    let u: f64 = rng.random_range(0.0..1.0);
    let (lo, hi) = (range.lower.to_f64(), range.upper.to_f64());
    Ok(Scalar::real(hi - u * (hi - lo)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Tracker {
    name: &'static str,
    cases: usize,
    worst: f64,
    bound: f64,
    ok: bool,
}

impl Tracker {
    fn new(name: &'static str, bound: f64) -> Self {
        Tracker {
            name,
            cases: 0,
            worst: 0.0,
            bound,
            ok: true,
        }
    }

    fn deviation(&mut self, x: f64) {
        self.cases += 1;
        if x.is_nan() || x > self.worst {
            self.worst = x;
        }
        if x.is_nan() || x > self.bound {
            self.ok = false;
        }
    }

    fn verdict(&mut self, ok: bool) {
        self.cases += 1;
        self.ok &= ok;
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            cases: self.cases,
            max_deviation: self.worst,
            bound: self.bound,
            passed: self.ok,
        }
    }
}

fn trace_formulas(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Result<Check> {
    let mut t = Tracker::new("trace_formulas", 1e-10);
    for case in 0..40 {
        let d = 3 + case % 4;
        let alpha = random_certified_alpha(rng, d)?;
        let s = random_lambdas(rng, d, tol)?;
        let rho = state_from_lambdas(&s)?;
        let factor = 1.0 - 1.0 / (d as f64 * alpha.to_f64());
        for primed in [false, true] {
            let w = witness_w_alpha(&AlphaWitnessParams::new(d, alpha, primed)?)?;
            let lead = if primed { s.lambda(d - 1) } else { s.lambda(1) };
            let want = (lead - s.lambda(d)).to_f64() * factor;
            t.deviation((expectation(&w, &rho, tol)? - want).abs());
        }
    }
    Ok(t.finish())
}

fn witness_min_eigenvalue(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Result<Check> {
    let mut t = Tracker::new("witness_min_eigenvalue", 1e-10);
    for case in 0..12 {
        let d = 3 + case % 4;
        let alpha = random_certified_alpha(rng, d)?;
        let p = AlphaWitnessParams::new(d, alpha, case % 2 == 1)?;
        let eig = hermitian_eigenvalues(&witness_w_alpha(&p)?, tol)?;
        t.deviation((eig[0] - (1.0 / (d as f64 * alpha.to_f64()) - 1.0)).abs());
        let mut closed = family_spectrum(&p.coefficients());
        closed.sort_by(f64::total_cmp);
        let worst = eig
            .iter()
            .zip(&closed)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        t.deviation(worst);
    }
    Ok(t.finish())
}

fn ppt_window(tol: &Tolerance) -> Result<Check> {
    let mut t = Tracker::new("ppt_window", 0.0);
    for d in 3..7 {
        let m = (d as i64 - 1).pow(2);
        // exact boundaries plus points just outside and a sweep of the interior
        let mut betas = vec![
            Scalar::int(0),
            Scalar::int(1),
            Scalar::int(m),
            Scalar::int(m + 1),
        ];
        betas.push(Scalar::ratio(999, 1000));
        betas.push(Scalar::int(m) + Scalar::ratio(1, 1000));
        betas.extend((1..10).map(|k| Scalar::int(1) + Scalar::int(m - 1) * Scalar::ratio(k, 10)));
        for beta in betas {
            let s = beta_lambdas(&BetaFamilyParams::new(d, beta)?);
            let expected = beta >= Scalar::int(1) && beta <= Scalar::int(m);
            let numeric = is_ppt(&state_from_lambdas(&s)?, d, tol)?.ppt;
            let closed = ppt_closed_form(&s, tol)?;
            t.verdict(numeric == expected && closed == expected);
        }
    }
    Ok(t.finish())
}

fn circulant_pt(rng: &mut ChaCha8Rng, tol: &Tolerance) -> Result<Check> {
    let mut t = Tracker::new("circulant_partial_transpose", 1e-12);
    for case in 0..20 {
        let d = 3 + case % 4;
        let spec = random_circulant_spec(rng, d, tol)?;
        let dense = partial_transpose(&assemble(&spec)?, d)?;
        let via_blocks = assemble_tilde(&circulant_partial_transpose(&spec)?)?;
        t.deviation(dense.max_abs_diff(&via_blocks));
    }
    Ok(t.finish())
}

fn horodecki_d3() -> Result<Check> {
    let mut t = Tracker::new("horodecki_d3", 0.0);
    for k in 0..=10 {
        let beta = Scalar::ratio(k, 2);
        let s = beta_lambdas(&BetaFamilyParams::new(3, beta)?);
        let want = [
            beta / Scalar::int(7),
            (Scalar::int(5) - beta) / Scalar::int(7),
            Scalar::ratio(2, 7),
        ];
        t.verdict(
            s.lambdas
                .iter()
                .zip(&want)
                .all(|(a, b)| a == b && a.is_exact()),
        );
    }
    // the dense state agrees with (2/7)P⁺ + (β/7)O₁ + ((5−β)/7)O₂ at β = 3/2
    let s = beta_lambdas(&BetaFamilyParams::new(3, Scalar::ratio(3, 2))?);
    let want = &(&max_entangled_projector(3)?.scale_real(2.0 / 7.0)
        + &projector_o(3, 1)?.scale_real(1.5 / 7.0))
        + &projector_o(3, 2)?.scale_real(3.5 / 7.0);
    t.verdict(state_from_lambdas(&s)?.max_abs_diff(&want) < 1e-15);
    Ok(t.finish())
}

fn alpha_windows() -> Result<Check> {
    let mut t = Tracker::new("alpha_windows", 0.0);
    let d3 = alpha_admissible_range(3)?;
    t.verdict(d3.lower == Scalar::ratio(1, 3) && d3.upper == Scalar::ratio(2, 3));
    let d4 = alpha_admissible_range(4)?;
    t.verdict(d4.lower == Scalar::ratio(1, 4) && d4.upper == Scalar::ratio(3, 8));
    for d in 3..9 {
        let r = alpha_admissible_range(d)?;
        t.verdict(r.a1_at_upper == Scalar::int(1) && !r.contains(&r.lower) && r.contains(&r.upper));
    }
    Ok(t.finish())
}

fn gellmann_round_trip(tol: &Tolerance) -> Result<Check> {
    let mut t = Tracker::new("gellmann_round_trip", 1e-12);
    for d in 3..6 {
        let range = alpha_admissible_range(d)?;
        for primed in [false, true] {
            let w = witness_w_alpha(&AlphaWitnessParams::new(d, range.upper, primed)?)?;
            t.deviation(expand_local(&w, d, tol)?.reconstruct().max_abs_diff(&w));
        }
    }
    Ok(t.finish())
}

pub fn run(seed: u64, tol: &Tolerance) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        alpha_windows()?,
        witness_min_eigenvalue(&mut rng, tol)?,
        trace_formulas(&mut rng, tol)?,
        ppt_window(tol)?,
        circulant_pt(&mut rng, tol)?,
        horodecki_d3()?,
        gellmann_round_trip(tol)?,
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(SelftestReport {
        seed,
        checks,
        passed,
    })
}
