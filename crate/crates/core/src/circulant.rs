//! Circulant operators on C^d ⊗ C^d.
//!
//! The space splits into d orthogonal d-dimensional blocks Σ_n spanned by
//! |i, i+n⟩. A circulant operator is fixed by one d×d generator per block:
//! entry (i, j) of generator n sits at |i, i+n⟩⟨j, j+n|.
//!
//! The partial transpose of a circulant operator is again block structured,
//! this time over Σ̃_n spanned by |i, π(i)+n⟩ with π(k) = -k mod d, and its
//! generators follow from Hadamard products with the permutation matrices
//! Π S^m. Generators for the two families carry a [`Support`] tag so they
//! cannot be mixed up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hadamard, require_bipartite, ComplexMatrix, Tolerance, ONE, ZERO};

/// Which block family a set of generators lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    /// Σ_n = span{|i, i+n⟩}
    #[default]
    Sigma,
    /// Σ̃_n = span{|i, π(i)+n⟩}
    SigmaTilde,
}

impl Support {
    fn name(self) -> &'static str {
        match self {
            Support::Sigma => "sigma",
            Support::SigmaTilde => "sigma_tilde",
        }
    }

    fn flipped(self) -> Support {
        match self {
            Support::Sigma => Support::SigmaTilde,
            Support::SigmaTilde => Support::Sigma,
        }
    }
}

/// The permutation π(k) = (d − k) mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPi {
    d: usize,
}

impl PermutationPi {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
        }
        Ok(PermutationPi { d })
    }

    pub fn apply(&self, k: usize) -> usize {
        (self.d - k % self.d) % self.d
    }

    /// Π with Π_kl = δ_{k, π(l)}.
    pub fn matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(
            self.d,
            self.d,
            |k, l| if k == self.apply(l) { ONE } else { ZERO },
        )
    }
}

/// Permutation matrix of S^n, where S|k⟩ = |k+1 mod d⟩.
pub fn shift_matrix(d: usize, n: i64) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
    }
    let shift = n.rem_euclid(d as i64) as usize;
    Ok(ComplexMatrix::from_fn(d, d, |r, c| {
        if r == (c + shift) % d {
            ONE
        } else {
            ZERO
        }
    }))
}

/// d Hermitian d×d generators, one per block, plus the block family tag.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    d: usize,
    generators: Vec<ComplexMatrix>,
    support: Support,
}

impl CirculantSpec {
    pub fn new(d: usize, generators: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self> {
        Self::with_support(d, generators, Support::Sigma, tol)
    }

    pub fn with_support(
        d: usize,
        generators: Vec<ComplexMatrix>,
        support: Support,
        tol: &Tolerance,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("d must be >= 2, got {d}")));
        }
        if generators.len() != d {
            return Err(Error::InvalidParameter(format!(
                "expected {d} generators, got {}",
                generators.len()
            )));
        }
        for (n, g) in generators.iter().enumerate() {
            if g.shape() != (d, d) {
                return Err(Error::InvalidParameter(format!(
                    "generator {n} has shape {:?}, expected ({d}, {d})",
                    g.shape()
                )));
            }
            g.require_hermitian(tol)?;
        }
        Ok(CirculantSpec {
            d,
            generators,
            support,
        })
    }

    pub fn zero(d: usize, support: Support) -> Result<Self> {
        Self::with_support(
            d,
            vec![ComplexMatrix::zeros(d, d); d],
            support,
            &Tolerance::default(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn generator(&self, n: usize) -> &ComplexMatrix {
        &self.generators[n % self.d]
    }

    fn require_support(&self, expected: Support) -> Result<()> {
        if self.support == expected {
            Ok(())
        } else {
            Err(Error::SupportMismatch {
                expected: expected.name(),
                found: self.support.name(),
            })
        }
    }

    /// Generator-wise sum; both operands must live on the same block family.
    pub fn try_add(&self, other: &CirculantSpec) -> Result<CirculantSpec> {
        if self.d != other.d {
            return Err(Error::InvalidParameter(format!(
                "dimension mismatch: {} vs {}",
                self.d, other.d
            )));
        }
        other.require_support(self.support)?;
        Ok(CirculantSpec {
            d: self.d,
            generators: self
                .generators
                .iter()
                .zip(&other.generators)
                .map(|(a, b)| a + b)
                .collect(),
            support: self.support,
        })
    }

    /// State-form invariants: every generator PSD and Σ Tr a⁽ⁿ⁾ = 1.
    pub fn is_state(&self, tol: &Tolerance) -> Result<bool> {
        let mut total = 0.0;
        for g in &self.generators {
            if !crate::linalg::is_positive_semidefinite(g, tol)?.psd {
                return Ok(false);
            }
            total += g.trace().re;
        }
        Ok((total - 1.0).abs() <= tol.eq_tol)
    }

    /// `{"d": n, "generators": [...]}`; Σ̃ specs add `"support": "sigma_tilde"`.
    pub fn to_json(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert("d".into(), self.d.into());
        obj.insert(
            "generators".into(),
            self.generators.iter().map(|g| g.to_json_value()).collect(),
        );
        if self.support != Support::Sigma {
            obj.insert("support".into(), self.support.name().into());
        }
        serde_json::Value::Object(obj).to_string()
    }

    pub fn from_json(s: &str, tol: &Tolerance) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            d: usize,
            generators: Vec<serde_json::Value>,
            #[serde(default)]
            support: Support,
        }
        let raw: Raw = serde_json::from_str(s)?;
        let generators = raw
            .generators
            .into_iter()
            .map(ComplexMatrix::from_json_value)
            .collect::<Result<Vec<_>>>()?;
        Self::with_support(raw.d, generators, raw.support, tol)
    }
}

/// Row/column of |i, (base + n) mod d⟩ where `base` is i (Σ) or π(i) (Σ̃).
fn block_index(d: usize, support: Support, i: usize, n: usize) -> usize {
    let base = match support {
        Support::Sigma => i,
        Support::SigmaTilde => (d - i) % d,
    };
    i * d + (base + n) % d
}

fn place(spec: &CirculantSpec) -> ComplexMatrix {
    let d = spec.d;
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for n in 0..d {
        let g = &spec.generators[n];
        for i in 0..d {
            let r = block_index(d, spec.support, i, n);
            for j in 0..d {
                let c = block_index(d, spec.support, j, n);
                out[(r, c)] += g[(i, j)];
            }
        }
    }
    out
}

/// A = Σ_n A_n with a⁽ⁿ⁾_ij placed at |i, i+n⟩⟨j, j+n|.
pub fn assemble(spec: &CirculantSpec) -> Result<ComplexMatrix> {
    spec.require_support(Support::Sigma)?;
    Ok(place(spec))
}

/// Ã = Σ_n Ã_n with ã⁽ⁿ⁾_ij placed at |i, π(i)+n⟩⟨j, π(j)+n|.
pub fn assemble_tilde(spec: &CirculantSpec) -> Result<ComplexMatrix> {
    spec.require_support(Support::SigmaTilde)?;
    Ok(place(spec))
}

/// Result of reading an arbitrary operator through the Σ block layout.
#[derive(Debug, Clone)]
pub struct Disassembly {
    pub spec: CirculantSpec,
    /// Whether the operator is exactly its Σ-block part (within eq_tol).
    pub circulant: bool,
    /// Largest entry of the operator outside the Σ blocks.
    pub residual: f64,
}

/// Extracts a⁽ⁿ⁾_ij from the Σ blocks. Non-circulant input is flagged, not
/// rejected; entries outside the blocks are reported through `residual`.
pub fn disassemble(a: &ComplexMatrix, d: usize, tol: &Tolerance) -> Result<Disassembly> {
    require_bipartite(a, d)?;
    let generators: Vec<ComplexMatrix> = (0..d)
        .map(|n| {
            ComplexMatrix::from_fn(d, d, |i, j| {
                a[(
                    block_index(d, Support::Sigma, i, n),
                    block_index(d, Support::Sigma, j, n),
                )]
            })
        })
        .collect();
    let spec = CirculantSpec {
        d,
        generators,
        support: Support::Sigma,
    };
    let residual = place(&spec).max_abs_diff(a);
    Ok(Disassembly {
        circulant: residual <= tol.eq_tol * a.max_abs().max(1.0),
        spec,
        residual,
    })
}

/// Generators of the partial transpose of a circulant operator.
///
/// From Σ to Σ̃: ã⁽ⁿ⁾ = Σ_m a⁽ⁿ⁺ᵐ⁾ ∘ (Π S^m). From Σ̃ back to Σ the same sum
/// runs with S^{−m}, so applying this twice returns the original generators.
pub fn circulant_partial_transpose(spec: &CirculantSpec) -> Result<CirculantSpec> {
    let d = spec.d;
    let pi = PermutationPi::new(d)?.matrix();
    let direction: i64 = match spec.support {
        Support::Sigma => 1,
        Support::SigmaTilde => -1,
    };
    let masks = (0..d)
        .map(|m| Ok(&pi * &shift_matrix(d, direction * m as i64)?))
        .collect::<Result<Vec<_>>>()?;
    let mut generators = Vec::with_capacity(d);
    for n in 0..d {
        let mut acc = ComplexMatrix::zeros(d, d);
        for (m, mask) in masks.iter().enumerate() {
            acc = &acc + &hadamard(&spec.generators[(n + m) % d], mask)?;
        }
        generators.push(acc);
    }
    Ok(CirculantSpec {
        d,
        generators,
        support: spec.support.flipped(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_transpose, C64};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn real(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn pi_is_an_involution_fixing_zero() {
        for d in 2..9 {
            let pi = PermutationPi::new(d).unwrap();
            assert_eq!(pi.apply(0), 0);
            for k in 0..d {
                assert_eq!(pi.apply(pi.apply(k)), k);
            }
        }
    }

    #[test]
    fn shift_matrix_cases() {
        assert_eq!(shift_matrix(3, 0).unwrap(), ComplexMatrix::identity(3));
        assert_eq!(shift_matrix(5, 5).unwrap(), ComplexMatrix::identity(5));
        let s = shift_matrix(3, 1).unwrap();
        // S|2> = |0>
        assert_eq!(s.mul_vec(&[ZERO, ZERO, ONE]), vec![ONE, ZERO, ZERO]);
        assert_eq!(shift_matrix(4, -1).unwrap(), shift_matrix(4, 3).unwrap());
        assert!(shift_matrix(1, 0).is_err());
    }

    #[test]
    fn assemble_d2_identity_generator() {
        let spec = CirculantSpec::new(
            2,
            vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)],
            &tol(),
        )
        .unwrap();
        assert_eq!(
            assemble(&spec).unwrap(),
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 1.0])
        );
    }

    #[test]
    fn assemble_all_ones_gives_maximally_entangled_projector() {
        for d in 2..7 {
            let mut gens = vec![ComplexMatrix::zeros(d, d); d];
            gens[0] = ComplexMatrix::from_fn(d, d, |_, _| real(1.0 / d as f64));
            let p = assemble(&CirculantSpec::new(d, gens, &tol()).unwrap()).unwrap();
            let want = ComplexMatrix::from_fn(d * d, d * d, |r, c| {
                if r % (d + 1) == 0 && c % (d + 1) == 0 {
                    real(1.0 / d as f64)
                } else {
                    ZERO
                }
            });
            assert!(p.approx_eq(&want, 1e-15));
        }
    }

    #[test]
    fn assemble_scaled_identities_gives_scaled_identity() {
        let d = 4;
        let gens = vec![ComplexMatrix::identity(d).scale_real(1.0 / d as f64); d];
        let a = assemble(&CirculantSpec::new(d, gens, &tol()).unwrap()).unwrap();
        assert!(a.approx_eq(
            &ComplexMatrix::identity(d * d).scale_real(1.0 / d as f64),
            1e-15
        ));
    }

    #[test]
    fn spec_validation() {
        let d = 3;
        assert!(CirculantSpec::new(d, vec![ComplexMatrix::identity(3); 2], &tol()).is_err());
        assert!(CirculantSpec::new(d, vec![ComplexMatrix::identity(2); 3], &tol()).is_err());
        let mut bad = ComplexMatrix::identity(3);
        bad[(0, 1)] = real(1.0);
        let gens = vec![bad, ComplexMatrix::identity(3), ComplexMatrix::identity(3)];
        assert!(matches!(
            CirculantSpec::new(d, gens, &tol()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn disassemble_identity_and_flip() {
        let d = 3;
        let dis = disassemble(&ComplexMatrix::identity(9), d, &tol()).unwrap();
        assert!(dis.circulant);
        for g in dis.spec.generators() {
            assert_eq!(*g, ComplexMatrix::identity(3));
        }
        let flip = ComplexMatrix::from_fn(
            9,
            9,
            |r, c| if r == (c % d) * d + c / d { ONE } else { ZERO },
        );
        // |01><10| sits at (1, 3): row |01> is in Σ_1, column |10> is in Σ_2
        assert_eq!(flip[(1, 3)], ONE);
        let dis = disassemble(&flip, d, &tol()).unwrap();
        assert!(!dis.circulant);
        assert_eq!(dis.residual, 1.0);
    }

    #[test]
    fn tilde_assembly_of_identity_generator() {
        let d = 3;
        let mut gens = vec![ComplexMatrix::zeros(d, d); d];
        gens[0] = ComplexMatrix::identity(d);
        let spec = CirculantSpec::with_support(d, gens, Support::SigmaTilde, &tol()).unwrap();
        let a = assemble_tilde(&spec).unwrap();
        // |00>, |12>, |21> -> indices 0, 5, 7
        let mut diag = vec![0.0; 9];
        for k in [0, 5, 7] {
            diag[k] = 1.0;
        }
        assert_eq!(a, ComplexMatrix::from_real_diagonal(&diag));
        assert_eq!(
            assemble_tilde(&CirculantSpec::zero(d, Support::SigmaTilde).unwrap()).unwrap(),
            ComplexMatrix::zeros(9, 9)
        );
    }

    #[test]
    fn support_tags_are_enforced() {
        let sigma = CirculantSpec::zero(3, Support::Sigma).unwrap();
        let tilde = CirculantSpec::zero(3, Support::SigmaTilde).unwrap();
        assert!(matches!(
            assemble(&tilde),
            Err(Error::SupportMismatch { .. })
        ));
        assert!(matches!(
            assemble_tilde(&sigma),
            Err(Error::SupportMismatch { .. })
        ));
        assert!(sigma.try_add(&tilde).is_err());
        assert!(sigma.try_add(&sigma).is_ok());
    }

    #[test]
    fn partial_transpose_of_maximally_entangled_spec() {
        let d = 3;
        let mut gens = vec![ComplexMatrix::zeros(d, d); d];
        gens[0] = ComplexMatrix::from_fn(d, d, |_, _| real(1.0 / 3.0));
        let spec = CirculantSpec::new(d, gens, &tol()).unwrap();
        let tilde = circulant_partial_transpose(&spec).unwrap();
        assert_eq!(tilde.support(), Support::SigmaTilde);
        let dense = partial_transpose(&assemble(&spec).unwrap(), d).unwrap();
        assert!(assemble_tilde(&tilde).unwrap().approx_eq(&dense, 1e-15));
    }

    #[test]
    fn partial_transpose_of_identity_spec() {
        let d = 4;
        let gens = vec![ComplexMatrix::identity(d).scale_real(0.25); d];
        let spec = CirculantSpec::new(d, gens, &tol()).unwrap();
        let tilde = circulant_partial_transpose(&spec).unwrap();
        for g in tilde.generators() {
            for i in 0..d {
                let nonzero = (0..d).filter(|&j| g[(i, j)] != ZERO).count();
                assert_eq!(nonzero, 1);
            }
        }
        assert!(assemble_tilde(&tilde)
            .unwrap()
            .approx_eq(&ComplexMatrix::identity(16).scale_real(0.25), 1e-15));
    }

    #[test]
    fn spec_json_round_trip() {
        let d = 2;
        let mut g = ComplexMatrix::identity(2);
        g[(0, 1)] = C64::new(0.5, 0.25);
        g[(1, 0)] = C64::new(0.5, -0.25);
        let spec = CirculantSpec::new(d, vec![g, ComplexMatrix::zeros(2, 2)], &tol()).unwrap();
        let s = spec.to_json();
        assert!(s.starts_with(r#"{"d":2,"generators":["#));
        assert_eq!(CirculantSpec::from_json(&s, &tol()).unwrap(), spec);
        let tilde = circulant_partial_transpose(&spec).unwrap();
        let back = CirculantSpec::from_json(&tilde.to_json(), &tol()).unwrap();
        assert_eq!(back.support(), Support::SigmaTilde);
    }
}
